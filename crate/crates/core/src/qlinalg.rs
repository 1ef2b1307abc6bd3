//! Exact linear algebra over the rationals.
//!
//! Everything in this crate reduces to ranks of sparse rational matrices, so
//! this module keeps two elimination engines:
//!
//! * [`rank`] runs fraction-free elimination on integer rows (each input row
//!   is scaled to a primitive integer vector first), which keeps intermediate
//!   growth bounded on the large, very sparse boundary matrices of cobar
//!   complexes.
//! * [`Echelon`] maintains a fully reduced row echelon form over `BigRational`
//!   and can tag rows with coordinates, which is what quotient spaces,
//!   kernels, and projections need.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num::bigint::BigInt;
use num::integer::Integer;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Exact rational scalar. Always reduced with a positive denominator.
pub type Rational = BigRational;

pub fn q(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"3"`, `"-2/5"` and friends.
pub fn parse_rational(s: &str) -> Result<Rational, LinalgError> {
    let s = s.trim();
    let bad = || LinalgError::Parse(s.to_string());
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("entry ({row}, {col}) outside a {rows}x{cols} matrix")]
    OutOfRange {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
    #[error("duplicate entry at ({0}, {1})")]
    Duplicate(usize, usize),
    #[error("boundary shapes do not match at degree {0}")]
    Shape(usize),
    #[error("composite of boundaries is nonzero at degree {degree}: entry ({row}, {col}) = {value}")]
    NotAComplex {
        degree: usize,
        row: usize,
        col: usize,
        value: String,
    },
    #[error("vector does not lie in the span")]
    NotInSpan,
    #[error("cannot parse rational {0:?}")]
    Parse(String),
}

/// Sparse vector keyed by coordinate index. Zero entries are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SparseVec(BTreeMap<usize, Rational>);

impl SparseVec {
    pub fn new() -> Self {
        SparseVec(BTreeMap::new())
    }

    pub fn unit(i: usize) -> Self {
        let mut v = SparseVec::new();
        v.0.insert(i, Rational::one());
        v
    }

    pub fn from_dense(values: &[Rational]) -> Self {
        let mut v = SparseVec::new();
        for (i, x) in values.iter().enumerate() {
            v.add_at(i, x);
        }
        v
    }

    pub fn add_at(&mut self, i: usize, x: &Rational) {
        if x.is_zero() {
            return;
        }
        let remove = match self.0.get_mut(&i) {
            Some(y) => {
                *y += x;
                y.is_zero()
            }
            None => {
                self.0.insert(i, x.clone());
                false
            }
        };
        if remove {
            self.0.remove(&i);
        }
    }

    /// `self += c * other`
    pub fn add_scaled(&mut self, c: &Rational, other: &SparseVec) {
        if c.is_zero() {
            return;
        }
        for (&i, x) in &other.0 {
            self.add_at(i, &(c * x));
        }
    }

    pub fn scaled(&self, c: &Rational) -> SparseVec {
        if c.is_zero() {
            return SparseVec::new();
        }
        SparseVec(self.0.iter().map(|(&i, x)| (i, x * c)).collect())
    }

    pub fn get(&self, i: usize) -> Rational {
        self.0.get(&i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.0.len()
    }

    pub fn leading(&self) -> Option<(usize, &Rational)> {
        self.0.iter().next().map(|(&i, x)| (i, x))
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Rational)> {
        self.0.iter().map(|(&i, x)| (i, x))
    }

    pub fn max_index(&self) -> Option<usize> {
        self.0.keys().next_back().copied()
    }

    pub fn to_dense(&self, len: usize) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); len];
        for (i, x) in self.iter() {
            out[i] = x.clone();
        }
        out
    }
}

impl fmt::Display for SparseVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .iter()
            .map(|(i, x)| format!("{}*e{}", format_rational(x), i))
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

impl FromIterator<(usize, Rational)> for SparseVec {
    fn from_iter<T: IntoIterator<Item = (usize, Rational)>>(iter: T) -> Self {
        let mut v = SparseVec::new();
        for (i, x) in iter {
            v.add_at(i, &x);
        }
        v
    }
}

/// Immutable sparse rational matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    row_data: Vec<SparseVec>,
}

impl SparseMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        SparseMatrix {
            rows,
            cols,
            row_data: vec![SparseVec::new(); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix {
            rows: n,
            cols: n,
            row_data: (0..n).map(SparseVec::unit).collect(),
        }
    }

    /// Builds a matrix from `(row, col, value)` triples. Zero values are dropped.
    pub fn from_triples(
        rows: usize,
        cols: usize,
        triples: impl IntoIterator<Item = (usize, usize, Rational)>,
    ) -> Result<Self, LinalgError> {
        let mut row_data = vec![SparseVec::new(); rows];
        let mut seen = std::collections::HashSet::new();
        for (r, c, x) in triples {
            if r >= rows || c >= cols {
                return Err(LinalgError::OutOfRange {
                    row: r,
                    col: c,
                    rows,
                    cols,
                });
            }
            if !seen.insert((r, c)) {
                return Err(LinalgError::Duplicate(r, c));
            }
            row_data[r].add_at(c, &x);
        }
        Ok(SparseMatrix {
            rows,
            cols,
            row_data,
        })
    }

    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        SparseMatrix {
            rows: rows.len(),
            cols,
            row_data: rows
                .iter()
                .map(|r| r.iter().enumerate().map(|(i, &x)| (i, q(x))).collect())
                .collect(),
        }
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[SparseVec]) -> Self {
        let mut row_data = vec![SparseVec::new(); rows];
        for (c, v) in columns.iter().enumerate() {
            for (r, x) in v.iter() {
                assert!(r < rows, "column entry out of range");
                row_data[r].add_at(c, x);
            }
        }
        SparseMatrix {
            rows,
            cols: columns.len(),
            row_data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &SparseVec {
        &self.row_data[r]
    }

    pub fn get(&self, r: usize, c: usize) -> Rational {
        self.row_data[r].get(c)
    }

    pub fn nnz(&self) -> usize {
        self.row_data.iter().map(SparseVec::nnz).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.row_data.iter().all(SparseVec::is_zero)
    }

    pub fn triples(&self) -> impl Iterator<Item = (usize, usize, &Rational)> {
        self.row_data
            .iter()
            .enumerate()
            .flat_map(|(r, v)| v.iter().map(move |(c, x)| (r, c, x)))
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut row_data = vec![SparseVec::new(); self.cols];
        for (r, c, x) in self.triples() {
            row_data[c].add_at(r, x);
        }
        SparseMatrix {
            rows: self.cols,
            cols: self.rows,
            row_data,
        }
    }

    /// Column `c` as a sparse vector.
    pub fn column(&self, c: usize) -> SparseVec {
        self.row_data
            .iter()
            .enumerate()
            .filter_map(|(r, v)| v.0.get(&c).map(|x| (r, x.clone())))
            .collect()
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (r, row) in self.row_data.iter().enumerate() {
            let mut acc = Rational::zero();
            for (c, x) in v.iter() {
                if let Some(y) = row.0.get(&c) {
                    acc += x * y;
                }
            }
            out.add_at(r, &acc);
        }
        out
    }

    /// `self * other`; panics on shape mismatch.
    pub fn mul(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.cols, other.rows, "shape mismatch in product");
        let row_data = self
            .row_data
            .iter()
            .map(|row| {
                let mut out = SparseVec::new();
                for (k, x) in row.iter() {
                    out.add_scaled(x, &other.row_data[k]);
                }
                out
            })
            .collect();
        SparseMatrix {
            rows: self.rows,
            cols: other.cols,
            row_data,
        }
    }

    pub fn scale_row(&self, r: usize, c: &Rational) -> SparseMatrix {
        let mut m = self.clone();
        m.row_data[r] = m.row_data[r].scaled(c);
        m
    }

    pub fn swap_rows(&self, a: usize, b: usize) -> SparseMatrix {
        let mut m = self.clone();
        m.row_data.swap(a, b);
        m
    }
}

type IntRow = Vec<(usize, BigInt)>;

fn to_primitive_int_row(v: &SparseVec) -> IntRow {
    let mut lcm = BigInt::one();
    for (_, x) in v.iter() {
        lcm = lcm.lcm(x.denom());
    }
    let mut row: IntRow = v
        .iter()
        .map(|(i, x)| (i, (x * Rational::from_integer(lcm.clone())).to_integer()))
        .collect();
    make_primitive(&mut row);
    row
}

fn make_primitive(row: &mut IntRow) {
    let mut g = BigInt::zero();
    for (_, x) in row.iter() {
        g = g.gcd(x);
        if g.is_one() {
            return;
        }
    }
    if g.is_zero() || g.is_one() {
        return;
    }
    for (_, x) in row.iter_mut() {
        *x /= &g;
    }
}

/// `a*row - b*pivot`, where `a`, `b` clear the leading column of `row`.
fn eliminate(row: &IntRow, pivot: &IntRow) -> IntRow {
    let a = &pivot[0].1;
    let b = &row[0].1;
    let g = a.gcd(b);
    let (a, b) = (a / &g, b / &g);
    let mut out = Vec::with_capacity(row.len() + pivot.len());
    let (mut i, mut j) = (1, 1);
    while i < row.len() || j < pivot.len() {
        let take_row = j >= pivot.len() || (i < row.len() && row[i].0 < pivot[j].0);
        let take_piv = i >= row.len() || (j < pivot.len() && pivot[j].0 < row[i].0);
        if take_row {
            out.push((row[i].0, &a * &row[i].1));
            i += 1;
        } else if take_piv {
            out.push((pivot[j].0, -(&b * &pivot[j].1)));
            j += 1;
        } else {
            let x = &a * &row[i].1 - &b * &pivot[j].1;
            if !x.is_zero() {
                out.push((row[i].0, x));
            }
            i += 1;
            j += 1;
        }
    }
    make_primitive(&mut out);
    out
}

/// Exact rank over the rationals.
///
/// Rows are cleared to primitive integer vectors and eliminated without
/// division; rows are visited sparsest first so pivots stay short.
pub fn rank(m: &SparseMatrix) -> usize {
    // Eliminate along the shorter side.
    let rows: Vec<&SparseVec>;
    let transposed;
    if m.cols < m.rows {
        transposed = m.transpose();
        rows = transposed.row_data.iter().collect();
    } else {
        rows = m.row_data.iter().collect();
    }
    let mut order: Vec<IntRow> = rows
        .into_iter()
        .filter(|r| !r.is_zero())
        .map(to_primitive_int_row)
        .collect();
    order.sort_by_key(Vec::len);
    let mut pivots: HashMap<usize, IntRow> = HashMap::new();
    for mut row in order {
        while let Some(&(lead, _)) = row.first() {
            match pivots.get(&lead) {
                Some(p) => row = eliminate(&row, p),
                None => break,
            }
        }
        if let Some(&(lead, _)) = row.first() {
            pivots.insert(lead, row);
        }
    }
    pivots.len()
}

pub fn kernel_dim(m: &SparseMatrix) -> usize {
    m.cols() - rank(m)
}

/// A subspace of `Q^n` held in fully reduced row echelon form.
///
/// Rows may carry a *tag* vector. Tags are transformed alongside rows, so
/// after reduction a tagged echelon expresses any vector of the span as a
/// combination of the tags; [`Quotient`] uses this to compute coordinates.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: Vec<SparseVec>,
    tags: Vec<SparseVec>,
    pivot_row: BTreeMap<usize, usize>,
}

impl Echelon {
    pub fn new() -> Self {
        Echelon::default()
    }

    pub fn from_vectors<'a>(vectors: impl IntoIterator<Item = &'a SparseVec>) -> Self {
        let mut e = Echelon::new();
        for v in vectors {
            e.insert(v);
        }
        e
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivot_row.keys().copied()
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.pivot_row.contains_key(&col)
    }

    /// Reduces `v` against every pivot. Returns the remainder and the
    /// combination of tags that was subtracted.
    pub fn reduce_tagged(&self, v: &SparseVec) -> (SparseVec, SparseVec) {
        let mut rem = v.clone();
        let mut tag = SparseVec::new();
        let cols: Vec<(usize, usize)> = v
            .iter()
            .filter_map(|(c, _)| self.pivot_row.get(&c).map(|&r| (c, r)))
            .collect();
        for (c, r) in cols {
            let x = rem.get(c);
            if x.is_zero() {
                continue;
            }
            rem.add_scaled(&-x.clone(), &self.rows[r]);
            tag.add_scaled(&x, &self.tags[r]);
        }
        (rem, tag)
    }

    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        self.reduce_tagged(v).0
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_zero()
    }

    /// Inserts `v`; returns whether the span grew.
    pub fn insert(&mut self, v: &SparseVec) -> bool {
        self.insert_tagged(v, SparseVec::new())
    }

    /// Inserts `v` with tag `t`. The stored row equals `v - (pivots)` and
    /// its tag is adjusted the same way.
    pub fn insert_tagged(&mut self, v: &SparseVec, t: SparseVec) -> bool {
        let (rem, sub_tag) = self.reduce_tagged(v);
        if rem.is_zero() {
            return false;
        }
        let mut tag = t;
        tag.add_scaled(&-Rational::one(), &sub_tag);
        let (lead, lead_val) = rem.leading().map(|(c, x)| (c, x.clone())).unwrap();
        let inv = lead_val.recip();
        let row = rem.scaled(&inv);
        let tag = tag.scaled(&inv);
        for r in 0..self.rows.len() {
            let x = self.rows[r].get(lead);
            if !x.is_zero() {
                let neg = -x;
                self.rows[r].add_scaled(&neg, &row);
                self.tags[r].add_scaled(&neg, &tag);
            }
        }
        self.pivot_row.insert(lead, self.rows.len());
        self.rows.push(row);
        self.tags.push(tag);
        true
    }

    pub fn basis(&self) -> &[SparseVec] {
        &self.rows
    }
}

/// Basis of the right kernel of `m`.
pub fn kernel_basis(m: &SparseMatrix) -> Vec<SparseVec> {
    let e = Echelon::from_vectors(m.row_data.iter());
    (0..m.cols())
        .filter(|c| !e.is_pivot(*c))
        .map(|free| {
            let mut v = SparseVec::unit(free);
            for (&p, &r) in &e.pivot_row {
                let x = e.rows[r].get(free);
                if !x.is_zero() {
                    v.add_at(p, &-x);
                }
            }
            v
        })
        .collect()
}

/// `span(super) / span(sub)`, with representatives drawn from `super`.
///
/// `sub` need not be contained in `super`; coordinates are only defined for
/// vectors of `span(sub) + span(super)`.
#[derive(Clone, Debug)]
pub struct Quotient {
    sub_dim: usize,
    echelon: Echelon,
    reps: Vec<SparseVec>,
}

impl Quotient {
    pub fn new(sub: &[SparseVec], sup: &[SparseVec]) -> Self {
        let mut echelon = Echelon::new();
        for v in sub {
            echelon.insert(v);
        }
        let sub_dim = echelon.dim();
        let mut reps = Vec::new();
        for v in sup {
            if echelon.insert_tagged(v, SparseVec::unit(reps.len())) {
                reps.push(v.clone());
            }
        }
        Quotient {
            sub_dim,
            echelon,
            reps,
        }
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    pub fn sub_dim(&self) -> usize {
        self.sub_dim
    }

    /// Chosen representatives (a section of the projection).
    pub fn representatives(&self) -> &[SparseVec] {
        &self.reps
    }

    /// Coordinates of the class of `v` in the representative basis.
    pub fn coords(&self, v: &SparseVec) -> Result<SparseVec, LinalgError> {
        let (rem, tag) = self.echelon.reduce_tagged(v);
        if rem.is_zero() {
            Ok(tag)
        } else {
            Err(LinalgError::NotInSpan)
        }
    }

    /// True iff `v` lies in the subspace being divided out.
    pub fn is_trivial(&self, v: &SparseVec) -> Result<bool, LinalgError> {
        self.coords(v).map(|c| c.is_zero())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    /// `maps[i]: C_{i+1} -> C_i` (homological boundary).
    Lowering,
    /// `maps[i]: C_i -> C_{i+1}` (cohomological coboundary).
    Raising,
}

/// A bounded complex of finite-dimensional rational spaces.
#[derive(Clone, Debug)]
pub struct ChainComplex {
    dims: Vec<usize>,
    maps: Vec<SparseMatrix>,
    direction: Direction,
}

impl ChainComplex {
    /// `boundaries[i]` maps degree `i+1` to degree `i`.
    pub fn new(dims: Vec<usize>, boundaries: Vec<SparseMatrix>) -> Result<Self, LinalgError> {
        Self::with_direction(dims, boundaries, Direction::Lowering)
    }

    pub fn with_direction(
        dims: Vec<usize>,
        maps: Vec<SparseMatrix>,
        direction: Direction,
    ) -> Result<Self, LinalgError> {
        if maps.len() + 1 != dims.len().max(1) {
            return Err(LinalgError::Shape(maps.len()));
        }
        for (i, m) in maps.iter().enumerate() {
            let (src, dst) = match direction {
                Direction::Lowering => (dims[i + 1], dims[i]),
                Direction::Raising => (dims[i], dims[i + 1]),
            };
            if m.cols() != src || m.rows() != dst {
                return Err(LinalgError::Shape(i));
            }
        }
        let c = ChainComplex {
            dims,
            maps,
            direction,
        };
        c.check_square_zero()?;
        Ok(c)
    }

    fn check_square_zero(&self) -> Result<(), LinalgError> {
        for i in 0..self.maps.len().saturating_sub(1) {
            let comp = match self.direction {
                Direction::Lowering => self.maps[i].mul(&self.maps[i + 1]),
                Direction::Raising => self.maps[i + 1].mul(&self.maps[i]),
            };
            let first = comp.triples().next().map(|(r, c, x)| (r, c, x.clone()));
            if let Some((row, col, x)) = first {
                let degree = match self.direction {
                    Direction::Lowering => i + 2,
                    Direction::Raising => i,
                };
                return Err(LinalgError::NotAComplex {
                    degree,
                    row,
                    col,
                    value: format_rational(&x),
                });
            }
        }
        Ok(())
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn maps(&self) -> &[SparseMatrix] {
        &self.maps
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.dims
            .iter()
            .enumerate()
            .map(|(i, &d)| if i % 2 == 0 { d as i64 } else { -(d as i64) })
            .sum()
    }

    /// Betti number per degree.
    pub fn homology(&self) -> Vec<usize> {
        let ranks: Vec<usize> = self.maps.iter().map(rank).collect();
        (0..self.dims.len())
            .map(|i| {
                // map leaving degree i and map entering degree i
                let (out, inc) = match self.direction {
                    Direction::Lowering => (
                        i.checked_sub(1).map_or(0, |j| ranks[j]),
                        ranks.get(i).copied().unwrap_or(0),
                    ),
                    Direction::Raising => (
                        ranks.get(i).copied().unwrap_or(0),
                        i.checked_sub(1).map_or(0, |j| ranks[j]),
                    ),
                };
                self.dims[i] - out - inc
            })
            .collect()
    }
}

/// Betti numbers of a complex, or the first `d∘d ≠ 0` witness.
pub fn homology(dims: Vec<usize>, boundaries: Vec<SparseMatrix>) -> Result<Vec<usize>, LinalgError> {
    Ok(ChainComplex::new(dims, boundaries)?.homology())
}

pub fn is_nonnegative(x: &Rational) -> bool {
    !x.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&SparseMatrix::identity(3)), 3);
        assert_eq!(rank(&SparseMatrix::zero(4, 7)), 0);
        let m = SparseMatrix::from_dense(&[vec![1, 2, 3], vec![2, 4, 6]]);
        assert_eq!(rank(&m), 1);
        assert_eq!(kernel_dim(&m), 2);
        assert_eq!(kernel_dim(&SparseMatrix::identity(3)), 0);
        assert_eq!(kernel_dim(&SparseMatrix::zero(4, 7)), 7);
    }

    #[test]
    fn homology_examples() {
        assert_eq!(homology(vec![1], vec![]).unwrap(), vec![1]);
        // triangle: edges 01, 12, 02
        let d1 = SparseMatrix::from_dense(&[vec![-1, 0, -1], vec![1, -1, 0], vec![0, 1, 1]]);
        assert_eq!(homology(vec![3, 3], vec![d1]).unwrap(), vec![1, 1]);
        assert_eq!(
            homology(vec![1, 1], vec![SparseMatrix::identity(1)]).unwrap(),
            vec![0, 0]
        );
    }

    #[test]
    fn non_complex_is_rejected() {
        let d1 = SparseMatrix::from_dense(&[vec![1]]);
        let d2 = SparseMatrix::from_dense(&[vec![1]]);
        let err = homology(vec![1, 1, 1], vec![d1, d2]).unwrap_err();
        assert!(matches!(err, LinalgError::NotAComplex { degree: 2, .. }));
    }

    #[test]
    fn triples_validated() {
        assert!(SparseMatrix::from_triples(2, 2, [(2, 0, q(1))]).is_err());
        assert!(SparseMatrix::from_triples(2, 2, [(0, 0, q(1)), (0, 0, q(2))]).is_err());
    }

    #[test]
    fn kernel_and_quotient() {
        let m = SparseMatrix::from_dense(&[vec![1, 1, 0], vec![0, 1, 1]]);
        let k = kernel_basis(&m);
        assert_eq!(k.len(), 1);
        assert!(m.apply(&k[0]).is_zero());

        // Q^2 / span(e0 + e1)
        let sub = vec![SparseVec::from_dense(&[q(1), q(1)])];
        let sup = vec![SparseVec::unit(0), SparseVec::unit(1)];
        let quot = Quotient::new(&sub, &sup);
        assert_eq!(quot.dim(), 1);
        let c0 = quot.coords(&SparseVec::unit(0)).unwrap();
        let c1 = quot.coords(&SparseVec::unit(1)).unwrap();
        assert_eq!(c0.get(0), -c1.get(0));
    }

    #[test]
    fn rational_text() {
        assert_eq!(parse_rational("-2/4").unwrap(), q_frac(-1, 2));
        assert_eq!(format_rational(&q_frac(3, 6)), "1/2");
        assert!(parse_rational("1/0").is_err());
    }
}
