//! Filtered dg operads, the operads formed by the pages of their spectral
//! sequences, the slices `Dʳ_k`, and filtered algebras.
//!
//! A filtration is given by a level on every basis element: `F_p(n)` is
//! spanned by the elements of level at most `p`. With `t` the total degree
//! (the differential lowers it by one) and `q = t - p`,
//!
//! ```text
//! Zʳ_{p,q} = { x ∈ F_p : ∂x ∈ F_{p-r} }
//! Eʳ_{p,q} = Zʳ_{p,q} / (Z^{r-1}_{p-1,q+1} + ∂Z^{r-1}_{p+r-1,q-r+2})
//! ```
//!
//! with `Z^{-1} = F`. Compositions and signs on every page are those of the
//! base operad (Koszul signs with respect to the total degree).

use std::collections::BTreeMap;

use num::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cobar::{Cooperad, LieCooperad};
use crate::hoalg::{check_ainf, check_cinf, extract_mn, AinfResidual, CinfReport, LiecAlgebra, MapFamily, Multilinear};
use crate::operads::{
    act_vec, compose_vec, differential_vec, EndOperad, GradedSpace, Operad, OperadTable,
};
use crate::perm::Perm;
use crate::qlinalg::{kernel_basis, Echelon, Quotient, Rational, SparseMatrix, SparseVec};
use crate::strata::{e1_table, middle_row, AutMode, BettiTable};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FiltrationError {
    #[error("arity {arity}: {detail}")]
    NotFiltered { arity: usize, detail: String },
    #[error("closure fails on page {r}: {detail}")]
    Closure { r: usize, detail: String },
    #[error("missing filtration level for arity {0} element {1}")]
    MissingLevel(usize, usize),
    #[error("the algebra map is not a morphism of operads: {0}")]
    NotAMorphism(String),
    #[error("the algebra map does not preserve the filtration: {0}")]
    NotFilteredAlgebra(String),
    #[error("middle row unavailable at arity {arity}: {detail}")]
    Identification { arity: usize, detail: String },
    #[error("{0}")]
    Algebra(String),
}

type Res<T> = Result<T, FiltrationError>;

/// A dg operad with a basis-compatible increasing filtration.
pub struct FilteredOperad<O: Operad> {
    base: O,
    /// `levels[n-1][e]`.
    levels: Vec<Vec<i64>>,
    /// Optional elements of `E¹_{n-2,0}(n)` standing for the corolla of the
    /// middle row in arity `n` (the cell carrying `m_n`).
    generators: BTreeMap<usize, SparseVec>,
}

fn max_level(levels: &[i64], v: &SparseVec) -> Option<i64> {
    v.iter().map(|(i, _)| levels[i]).max()
}

impl<O: Operad> FilteredOperad<O> {
    /// Checks that `∂`, compositions, the symmetric action and the unit
    /// respect the levels.
    pub fn new(base: O, levels: Vec<Vec<i64>>) -> Res<Self> {
        let max = base.max_arity();
        if levels.len() < max {
            return Err(FiltrationError::MissingLevel(levels.len() + 1, 0));
        }
        for n in 1..=max {
            if levels[n - 1].len() != base.dim(n) {
                return Err(FiltrationError::MissingLevel(n, levels[n - 1].len()));
            }
        }
        let f = FilteredOperad {
            base,
            levels,
            generators: BTreeMap::new(),
        };
        f.validate()?;
        Ok(f)
    }

    fn validate(&self) -> Res<()> {
        let op = &self.base;
        let max = op.max_arity();
        if max_level(&self.levels[0], &op.unit()).unwrap_or(0) > 0 {
            return Err(FiltrationError::NotFiltered {
                arity: 1,
                detail: "unit is not in F_0".into(),
            });
        }
        for n in 1..=max {
            let lv = &self.levels[n - 1];
            for a in 0..op.dim(n) {
                if let Some(l) = max_level(lv, &op.differential(n, a)) {
                    if l > lv[a] {
                        return Err(FiltrationError::NotFiltered {
                            arity: n,
                            detail: format!("∂ raises the level of {}", op.basis_name(n, a)),
                        });
                    }
                }
                for i in 0..n.saturating_sub(1) {
                    if let Some(l) = max_level(lv, &op.act(&Perm::adjacent(n, i), a)) {
                        if l > lv[a] {
                            return Err(FiltrationError::NotFiltered {
                                arity: n,
                                detail: format!("s_{i} raises the level of {}", op.basis_name(n, a)),
                            });
                        }
                    }
                }
            }
            for m in 1..=max + 1 - n {
                let target = &self.levels[n + m - 2];
                for slot in 1..=n {
                    for a in 0..op.dim(n) {
                        for b in 0..op.dim(m) {
                            if let Some(l) = max_level(target, &op.compose(n, slot, m, a, b)) {
                                if l > lv[a] + self.levels[m - 1][b] {
                                    return Err(FiltrationError::NotFiltered {
                                        arity: n + m - 1,
                                        detail: format!(
                                            "{} ∘_{slot} {} leaves F_{}",
                                            op.basis_name(n, a),
                                            op.basis_name(m, b),
                                            lv[a] + self.levels[m - 1][b]
                                        ),
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Reads levels from the `filtration_level` fields of a table.
    pub fn from_table(table: OperadTable) -> Res<FilteredOperad<OperadTable>> {
        let mut levels = Vec::new();
        for n in 1..=table.max_arity() {
            levels.push(
                (0..table.dim(n))
                    .map(|e| table.filtration_level(n, e).ok_or(FiltrationError::MissingLevel(n, e)))
                    .collect::<Res<Vec<_>>>()?,
            );
        }
        FilteredOperad::new(table, levels)
    }

    pub fn to_table(&self) -> OperadTable {
        let levels = |n: usize, e: usize| self.levels[n - 1][e];
        OperadTable::from_operad(&self.base, self.base.max_arity(), Some(&levels))
    }

    pub fn with_generator(mut self, arity: usize, v: SparseVec) -> Self {
        self.generators.insert(arity, v);
        self
    }

    pub fn base(&self) -> &O {
        &self.base
    }

    pub fn level(&self, arity: usize, e: usize) -> i64 {
        self.levels[arity - 1][e]
    }

    pub fn generator(&self, arity: usize) -> Option<&SparseVec> {
        self.generators.get(&arity)
    }

    fn level_range(&self, n: usize) -> Option<(i64, i64)> {
        let lv = &self.levels[n - 1];
        Some((*lv.iter().min()?, *lv.iter().max()?))
    }

    /// `v ∈ Z^r_P(n)`; `r < 0` means `F_P`.
    fn in_z(&self, n: usize, r: i64, p: i64, v: &SparseVec) -> bool {
        let lv = &self.levels[n - 1];
        if max_level(lv, v).is_some_and(|l| l > p) {
            return false;
        }
        r < 0 || max_level(lv, &differential_vec(&self.base, n, v)).is_none_or(|l| l <= p - r)
    }

    /// Basis of `Z^r_{p,t}(n)` (`r < 0` gives `F_{p,t}`).
    fn z_basis(&self, n: usize, r: i64, p: i64, t: i64) -> Vec<SparseVec> {
        let op = &self.base;
        let lv = &self.levels[n - 1];
        let cols: Vec<usize> = (0..op.dim(n)).filter(|&e| op.degree(n, e) == t && lv[e] <= p).collect();
        if r < 0 {
            return cols.iter().map(|&e| SparseVec::unit(e)).collect();
        }
        let projected: Vec<SparseVec> = cols
            .iter()
            .map(|&e| op.differential(n, e).iter().filter(|&(i, _)| lv[i] > p - r).map(|(i, x)| (i, x.clone())).collect())
            .collect();
        let m = SparseMatrix::from_columns(op.dim(n), &projected);
        kernel_basis(&m)
            .into_iter()
            .map(|k| k.iter().map(|(c, x)| (cols[c], x.clone())).collect())
            .collect()
    }
}

/// One bigraded piece `Eʳ_{p,q}(n)`.
#[derive(Clone, Debug)]
pub struct ErPiece {
    pub p: i64,
    pub t: i64,
    pub numerator: Vec<SparseVec>,
    pub denominator: Vec<SparseVec>,
    quotient: Quotient,
}

impl ErPiece {
    pub fn q(&self) -> i64 {
        self.t - self.p
    }

    pub fn dim(&self) -> usize {
        self.quotient.dim()
    }

    pub fn representatives(&self) -> &[SparseVec] {
        self.quotient.representatives()
    }
}

/// The page `Eʳ` of a filtered operad, itself a dg operad with differential
/// `∂ʳ` of bidegree `(-r, r-1)`.
pub struct ErTerm<'a, O: Operad> {
    pub r: usize,
    filtered: &'a FilteredOperad<O>,
    /// `arity → (p, t) → piece`.
    pieces: Vec<BTreeMap<(i64, i64), ErPiece>>,
    /// `arity → global index → (p, t, local index)`.
    index: Vec<Vec<(i64, i64, usize)>>,
    /// `arity → (p, t) → offset`.
    offsets: Vec<BTreeMap<(i64, i64), usize>>,
}

fn degrees_of<O: Operad>(op: &O, n: usize) -> Vec<i64> {
    let mut d: Vec<i64> = (0..op.dim(n)).map(|e| op.degree(n, e)).collect();
    d.sort();
    d.dedup();
    d
}

/// Builds `Eʳ`, checking that numerators are closed under composition and
/// the symmetric action and that denominators form an ideal.
pub fn er_term<O: Operad>(f: &FilteredOperad<O>, r: usize) -> Res<ErTerm<'_, O>> {
    let op = &f.base;
    let ri = r as i64;
    let mut pieces = Vec::new();
    for n in 1..=op.max_arity() {
        let mut map = BTreeMap::new();
        if let Some((lo, hi)) = f.level_range(n) {
            for t in degrees_of(op, n) {
                for p in lo..=hi {
                    let numerator = f.z_basis(n, ri, p, t);
                    let mut denominator = f.z_basis(n, ri - 1, p - 1, t);
                    for z in f.z_basis(n, ri - 1, p + ri - 1, t + 1) {
                        let dz = differential_vec(op, n, &z);
                        if !dz.is_zero() {
                            denominator.push(dz);
                        }
                    }
                    let ech = Echelon::from_vectors(&numerator);
                    if let Some(bad) = denominator.iter().find(|v| !ech.contains(v)) {
                        return Err(FiltrationError::Closure {
                            r,
                            detail: format!("arity {n}, (p,t) = ({p},{t}): boundary {bad} not a cycle"),
                        });
                    }
                    let quotient = Quotient::new(&denominator, &numerator);
                    map.insert(
                        (p, t),
                        ErPiece {
                            p,
                            t,
                            numerator,
                            denominator,
                            quotient,
                        },
                    );
                }
            }
        }
        pieces.push(map);
    }
    let mut index = Vec::new();
    let mut offsets = Vec::new();
    for map in &pieces {
        let mut idx = Vec::new();
        let mut off = BTreeMap::new();
        for (&(p, t), piece) in map {
            off.insert((p, t), idx.len());
            idx.extend((0..piece.dim()).map(|i| (p, t, i)));
        }
        index.push(idx);
        offsets.push(off);
    }
    let e = ErTerm {
        r,
        filtered: f,
        pieces,
        index,
        offsets,
    };
    e.check_closure()?;
    Ok(e)
}

impl<'a, O: Operad> ErTerm<'a, O> {
    pub fn piece(&self, n: usize, p: i64, q: i64) -> Option<&ErPiece> {
        self.pieces.get(n - 1)?.get(&(p, p + q))
    }

    pub fn pieces(&self, n: usize) -> impl Iterator<Item = &ErPiece> {
        self.pieces[n - 1].values()
    }

    /// Nonzero `(p, q) → dim` in arity `n`.
    pub fn dims(&self, n: usize) -> BTreeMap<(i64, i64), usize> {
        self.pieces(n).filter(|x| x.dim() > 0).map(|x| ((x.p, x.q()), x.dim())).collect()
    }

    pub fn total_dim(&self, n: usize) -> usize {
        self.index[n - 1].len()
    }

    /// `(p, q)` of a basis element.
    pub fn bidegree(&self, n: usize, e: usize) -> (i64, i64) {
        let (p, t, _) = self.index[n - 1][e];
        (p, t - p)
    }

    /// Class of `v ∈ Zʳ_{p,t}(n)` in global coordinates; `None` if `v` is
    /// not a cycle of that piece.
    fn class(&self, n: usize, p: i64, t: i64, v: &SparseVec) -> Option<SparseVec> {
        let f = self.filtered;
        match self.pieces[n - 1].get(&(p, t)) {
            Some(piece) => {
                let c = piece.quotient.coords(v).ok()?;
                let off = self.offsets[n - 1][&(p, t)];
                Some(c.iter().map(|(i, x)| (i + off, x.clone())).collect())
            }
            // outside the level range: F_p = 0 below, Eʳ = 0 above
            None => {
                let below = f.level_range(n).is_none_or(|(lo, _)| p < lo);
                if (below && !v.is_zero()) || !f.in_z(n, self.r as i64, p, v) {
                    None
                } else {
                    Some(SparseVec::new())
                }
            }
        }
    }

    fn in_denominator(&self, n: usize, p: i64, t: i64, v: &SparseVec) -> bool {
        match self.pieces[n - 1].get(&(p, t)) {
            Some(piece) => piece.quotient.is_trivial(v).unwrap_or(false),
            None => self.class(n, p, t, v).is_some(),
        }
    }

    fn check_closure(&self) -> Res<()> {
        let f = self.filtered;
        let op = &f.base;
        let max = op.max_arity();
        let r = self.r as i64;
        let fail = |detail: String| FiltrationError::Closure { r: self.r, detail };
        for n in 1..=max {
            for piece in self.pieces(n) {
                for i in 0..n.saturating_sub(1) {
                    let s = Perm::adjacent(n, i);
                    for x in &piece.numerator {
                        if !f.in_z(n, r, piece.p, &act_vec(op, &s, x)) {
                            return Err(fail(format!("s_{i} moves {x} out of Z (arity {n})")));
                        }
                    }
                    for x in &piece.denominator {
                        if !self.in_denominator(n, piece.p, piece.t, &act_vec(op, &s, x)) {
                            return Err(fail(format!("s_{i} moves {x} out of B (arity {n})")));
                        }
                    }
                }
            }
            for m in 1..=max + 1 - n {
                let k = n + m - 1;
                for slot in 1..=n {
                    for a in self.pieces(n) {
                        for b in self.pieces(m) {
                            let (p, t) = (a.p + b.p, a.t + b.t);
                            for x in &a.numerator {
                                for y in &b.numerator {
                                    let c = compose_vec(op, n, slot, m, x, y);
                                    if !f.in_z(k, r, p, &c) {
                                        return Err(fail(format!("{x} ∘_{slot} {y} not in Z_{p} (arity {k})")));
                                    }
                                }
                                for y in &b.denominator {
                                    let c = compose_vec(op, n, slot, m, x, y);
                                    if !self.in_denominator(k, p, t, &c) {
                                        return Err(fail(format!("Z ∘_{slot} B: {x}, {y} (arity {k})")));
                                    }
                                }
                            }
                            for x in &a.denominator {
                                for y in &b.numerator {
                                    let c = compose_vec(op, n, slot, m, x, y);
                                    if !self.in_denominator(k, p, t, &c) {
                                        return Err(fail(format!("B ∘_{slot} Z: {x}, {y} (arity {k})")));
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Matrix of `∂ʳ` from `Eʳ_{p,q}(n)` to `Eʳ_{p-r,q+r-1}(n)`.
    pub fn differential_matrix(&self, n: usize, p: i64, q: i64) -> SparseMatrix {
        let r = self.r as i64;
        let src = self.piece(n, p, q);
        let tgt = self.piece(n, p - r, q + r - 1);
        let rows = tgt.map_or(0, |x| x.dim());
        let Some(src) = src else { return SparseMatrix::zero(rows, 0) };
        let cols: Vec<SparseVec> = src
            .representatives()
            .iter()
            .map(|x| {
                let dx = differential_vec(&self.filtered.base, n, x);
                match tgt {
                    Some(t) => t.quotient.coords(&dx).expect("∂ of a cycle lies in the target cycles"),
                    None => SparseVec::new(),
                }
            })
            .collect();
        SparseMatrix::from_columns(rows, &cols)
    }

    /// Whether `∂ʳ ∘ ∂ʳ = 0` on every piece.
    pub fn differential_squares_to_zero(&self) -> bool {
        let r = self.r as i64;
        (1..=self.filtered.base.max_arity()).all(|n| {
            self.pieces(n).all(|x| {
                let (p, q) = (x.p, x.q());
                let d1 = self.differential_matrix(n, p, q);
                let d2 = self.differential_matrix(n, p - r, q + r - 1);
                d2.cols() == 0 || d1.rows() == 0 || d2.mul(&d1).is_zero()
            })
        })
    }

    /// Dimensions of the homology of `(Eʳ, ∂ʳ)`, which must agree with
    /// `E^{r+1}`.
    pub fn homology_dims(&self, n: usize) -> BTreeMap<(i64, i64), usize> {
        let r = self.r as i64;
        let mut out = BTreeMap::new();
        for x in self.pieces(n) {
            let (p, q) = (x.p, x.q());
            let out_rank = crate::qlinalg::rank(&self.differential_matrix(n, p, q));
            let in_rank = crate::qlinalg::rank(&self.differential_matrix(n, p + r, q - r + 1));
            let h = x.dim() - out_rank - in_rank;
            if h > 0 {
                out.insert((p, q), h);
            }
        }
        out
    }
}

impl<'a, O: Operad> Operad for ErTerm<'a, O> {
    fn name(&self) -> String {
        format!("E^{}({})", self.r, self.filtered.base.name())
    }
    fn max_arity(&self) -> usize {
        self.filtered.base.max_arity()
    }
    fn dim(&self, arity: usize) -> usize {
        self.index.get(arity.wrapping_sub(1)).map_or(0, |v| v.len())
    }
    fn degree(&self, arity: usize, e: usize) -> i64 {
        self.index[arity - 1][e].1
    }
    fn basis_name(&self, arity: usize, e: usize) -> String {
        let (p, t, i) = self.index[arity - 1][e];
        format!("[{}]_{{{p},{}}}", self.pieces[arity - 1][&(p, t)].representatives()[i], t - p)
    }
    fn unit(&self) -> SparseVec {
        self.class(1, 0, 0, &self.filtered.base.unit()).expect("unit is a cycle")
    }
    fn compose(&self, n: usize, slot: usize, m: usize, a: usize, b: usize) -> SparseVec {
        let (p, t, i) = self.index[n - 1][a];
        let (p2, t2, j) = self.index[m - 1][b];
        let x = &self.pieces[n - 1][&(p, t)].representatives()[i];
        let y = &self.pieces[m - 1][&(p2, t2)].representatives()[j];
        let c = compose_vec(&self.filtered.base, n, slot, m, x, y);
        self.class(n + m - 1, p + p2, t + t2, &c).expect("closure checked on construction")
    }
    fn act(&self, sigma: &Perm, a: usize) -> SparseVec {
        let n = sigma.len();
        let (p, t, i) = self.index[n - 1][a];
        let x = &self.pieces[n - 1][&(p, t)].representatives()[i];
        self.class(n, p, t, &act_vec(&self.filtered.base, sigma, x)).expect("closure checked on construction")
    }
    fn differential(&self, arity: usize, a: usize) -> SparseVec {
        let (p, t, i) = self.index[arity - 1][a];
        let x = &self.pieces[arity - 1][&(p, t)].representatives()[i];
        let dx = differential_vec(&self.filtered.base, arity, x);
        self.class(arity, p - self.r as i64, t - 1, &dx).expect("∂ of a cycle is a cycle")
    }
}

/// Smallest `r` from which the pages stop changing (dimension-wise), up to
/// the filtration length plus one.
pub fn degeneration_page<O: Operad>(f: &FilteredOperad<O>) -> Res<usize> {
    let len = (1..=f.base.max_arity())
        .filter_map(|n| f.level_range(n))
        .map(|(lo, hi)| (hi - lo) as usize)
        .max()
        .unwrap_or(0);
    let dims = |r| -> Res<Vec<BTreeMap<(i64, i64), usize>>> {
        let e = er_term(f, r)?;
        Ok((1..=f.base.max_arity()).map(|n| e.dims(n)).collect())
    };
    let last = dims(len + 1)?;
    let mut r = len + 1;
    while r > 0 && dims(r - 1)? == last {
        r -= 1;
    }
    Ok(r)
}

// ---------------------------------------------------------------- Dʳ_k

/// `(r-1)p + rq - k(n-1)`; zero exactly on the slice `Dʳ_k(n)`.
pub fn dk_defect(r: i64, k: i64, p: i64, q: i64, n: i64) -> i64 {
    (r - 1) * p + r * q - k * (n - 1)
}

/// Composition of two slice members lands in the slice.
pub fn dk_identity(r: i64, k: i64, (p, q, n): (i64, i64, i64), (p2, q2, n2): (i64, i64, i64)) -> bool {
    dk_defect(r, k, p, q, n) != 0 || dk_defect(r, k, p2, q2, n2) != 0 || dk_defect(r, k, p + p2, q + q2, n + n2 - 1) == 0
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DkSlice {
    pub arity: usize,
    pub p: i64,
    pub q: i64,
    pub dim: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DkCertificate {
    /// Basis pairs whose composites were examined.
    pub pairs_checked: usize,
    /// Composites with a component outside the slice.
    pub escapes: Vec<String>,
    /// Arity/bidegree tuples where the index identity fails.
    pub identity_failures: Vec<String>,
}

impl DkCertificate {
    pub fn holds(&self) -> bool {
        self.escapes.is_empty() && self.identity_failures.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DkSuboperad {
    pub r: usize,
    pub k: i64,
    pub slices: Vec<DkSlice>,
    pub certificate: DkCertificate,
}

/// `Dʳ_k(n) = ⊕_{(r-1)p + rq = k(n-1)} Eʳ_{p,q}(n)` with an exhaustive
/// closure certificate.
pub fn suboperad_dk<O: Operad>(e: &ErTerm<'_, O>, k: i64) -> DkSuboperad {
    let r = e.r as i64;
    let max = e.max_arity();
    let inside = |n: usize, (p, q): (i64, i64)| dk_defect(r, k, p, q, n as i64) == 0;
    let mut slices = Vec::new();
    for n in 1..=max {
        for ((p, q), dim) in e.dims(n) {
            if inside(n, (p, q)) {
                slices.push(DkSlice { arity: n, p, q, dim });
            }
        }
    }
    let mut cert = DkCertificate::default();
    for n in 1..=max {
        for m in 1..=max + 1 - n {
            let target = n + m - 1;
            for a in (0..e.dim(n)).filter(|&a| inside(n, e.bidegree(n, a))) {
                for b in (0..e.dim(m)).filter(|&b| inside(m, e.bidegree(m, b))) {
                    let (pa, qa) = e.bidegree(n, a);
                    let (pb, qb) = e.bidegree(m, b);
                    if !dk_identity(r, k, (pa, qa, n as i64), (pb, qb, m as i64)) {
                        cert.identity_failures.push(format!("({pa},{qa},{n}) ∘ ({pb},{qb},{m})"));
                    }
                    for slot in 1..=n {
                        cert.pairs_checked += 1;
                        let c = e.compose(n, slot, m, a, b);
                        if c.iter().any(|(i, _)| !inside(target, e.bidegree(target, i))) {
                            cert.escapes.push(format!("{} ∘_{slot} {}", e.basis_name(n, a), e.basis_name(m, b)));
                        }
                    }
                }
            }
        }
    }
    DkSuboperad {
        r: e.r,
        k,
        slices,
        certificate: cert,
    }
}

/// `Dʳ_k` slices of the genus-zero moduli tables: arity `n` uses
/// `E¹(M̄_{0,n+1})`. Only `r = 1` is tabulated.
pub fn dk_on_moduli(k: i64, max_arity: usize) -> Vec<DkSlice> {
    let mut out = Vec::new();
    for n in 2..=max_arity {
        let t = e1_table(0, n + 1, &BettiTable::new(), AutMode::default()).expect("genus zero is always available");
        for (&(p, q), &dim) in &t.entries {
            if dk_defect(1, k, p, q, n as i64) == 0 {
                out.push(DkSlice { arity: n, p, q, dim: dim as usize });
            }
        }
    }
    out
}

// ---------------------------------------------------------------- filtered algebras

/// `End_V` filtered by degree: `F_p` is spanned by the maps of degree at
/// most `p`.
pub fn degree_filtered_end(end: EndOperad) -> Res<FilteredOperad<EndOperad>> {
    let levels = (1..=end.max_arity()).map(|n| (0..end.dim(n)).map(|e| end.degree(n, e)).collect()).collect();
    FilteredOperad::new(end, levels)
}

/// An algebra structure `μ : O → End_V`, given on basis elements.
#[derive(Clone, Debug)]
pub struct FilteredAlgebraData {
    pub end: EndOperad,
    /// `mu[n-1][e]` is `μ(e)` as a vector of `End_V(n)`.
    pub mu: Vec<Vec<SparseVec>>,
}

impl FilteredAlgebraData {
    pub fn space(&self) -> &GradedSpace {
        self.end.space()
    }

    fn image(&self, n: usize, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (e, c) in v.iter() {
            out.add_scaled(c, &self.mu[n - 1][e]);
        }
        out
    }

    /// `μ(v)` as a multilinear map.
    pub fn multilinear(&self, n: usize, v: &SparseVec) -> Multilinear {
        let mut m = Multilinear::new(n);
        for (e, c) in self.image(n, v).iter() {
            let (o, ins) = self.end.decode(n, e);
            let mut cur = m.get(&ins);
            cur.add_at(o, c);
            m.set(ins, cur);
        }
        m
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilteredAlgebraReport {
    /// Failures of `μ` to commute with unit, ∘_i, the action, ∂ or degrees.
    pub morphism_violations: Vec<String>,
    /// Basis elements of level `p` and degree `> p` on which `μ` is nonzero.
    pub witnesses: Vec<String>,
}

impl FilteredAlgebraReport {
    pub fn is_morphism(&self) -> bool {
        self.morphism_violations.is_empty()
    }

    pub fn preserves_filtration(&self) -> bool {
        self.witnesses.is_empty()
    }
}

/// With `V` filtered by degree, `μ` preserves filtrations exactly when it
/// kills every basis element whose degree exceeds its level.
pub fn check_filtered_algebra<O: Operad>(f: &FilteredOperad<O>, a: &FilteredAlgebraData) -> Res<FilteredAlgebraReport> {
    let op = &f.base;
    let end = &a.end;
    let max = op.max_arity();
    if end.max_arity() < max || a.mu.len() < max {
        return Err(FiltrationError::Algebra(format!("μ must be given up to arity {max}")));
    }
    for n in 1..=max {
        if a.mu[n - 1].len() != op.dim(n) {
            return Err(FiltrationError::Algebra(format!("arity {n}: μ has {} values", a.mu[n - 1].len())));
        }
    }
    let mut report = FilteredAlgebraReport::default();
    let mut bad = Vec::new();
    if a.image(1, &op.unit()) != end.unit() {
        bad.push("μ(1) ≠ id".into());
    }
    for n in 1..=max {
        for e in 0..op.dim(n) {
            let img = &a.mu[n - 1][e];
            let name = op.basis_name(n, e);
            if img.iter().any(|(x, _)| end.degree(n, x) != op.degree(n, e)) {
                bad.push(format!("μ({name}) has the wrong degree"));
            }
            if a.image(n, &op.differential(n, e)) != differential_vec(end, n, img) {
                bad.push(format!("μ(∂{name}) ≠ ∂μ({name})"));
            }
            for i in 0..n.saturating_sub(1) {
                let s = Perm::adjacent(n, i);
                if a.image(n, &op.act(&s, e)) != act_vec(end, &s, img) {
                    bad.push(format!("μ(s_{i}·{name}) ≠ s_{i}·μ({name})"));
                }
            }
            let level = f.level(n, e);
            if op.degree(n, e) > level && !img.is_zero() {
                report.witnesses.push(format!("{name} (arity {n}, level {level}, degree {})", op.degree(n, e)));
            }
        }
        for m in 1..=max + 1 - n {
            for slot in 1..=n {
                for x in 0..op.dim(n) {
                    for y in 0..op.dim(m) {
                        let lhs = a.image(n + m - 1, &op.compose(n, slot, m, x, y));
                        let rhs = compose_vec(end, n, slot, m, &a.mu[n - 1][x], &a.mu[m - 1][y]);
                        if lhs != rhs {
                            bad.push(format!(
                                "μ({} ∘_{slot} {}) ≠ μ ∘_{slot} μ",
                                op.basis_name(n, x),
                                op.basis_name(m, y)
                            ));
                        }
                    }
                }
            }
        }
    }
    report.morphism_violations = bad;
    Ok(report)
}

/// Matrices of the map `Eʳ(O) → Eʳ(End_V)` induced by a filtered `μ`,
/// checked to be a morphism of dg operads. Returns the number of identities
/// verified.
pub fn check_induced_algebra<O: Operad>(
    eo: &ErTerm<'_, O>,
    ev: &ErTerm<'_, EndOperad>,
    a: &FilteredAlgebraData,
) -> Res<usize> {
    if eo.r != ev.r {
        return Err(FiltrationError::Algebra("pages differ".into()));
    }
    let max = eo.max_arity();
    let induced = |n: usize, v: &SparseVec| -> Res<SparseVec> {
        let mut out = SparseVec::new();
        for (e, c) in v.iter() {
            let (p, t, i) = eo.index[n - 1][e];
            let x = &eo.pieces[n - 1][&(p, t)].representatives()[i];
            let cls = ev
                .class(n, p, t, &a.image(n, x))
                .ok_or_else(|| FiltrationError::NotFilteredAlgebra(format!("μ{x} is not a cycle of level {p}")))?;
            out.add_scaled(c, &cls);
        }
        Ok(out)
    };
    let mut checks = 0;
    let fail = |s: String| Err(FiltrationError::NotAMorphism(s));
    if induced(1, &eo.unit())? != ev.unit() {
        return fail("induced map misses the unit".into());
    }
    for n in 1..=max {
        for e in 0..eo.dim(n) {
            let img = induced(n, &SparseVec::unit(e))?;
            checks += 1;
            if induced(n, &eo.differential(n, e))? != differential_vec(ev, n, &img) {
                return fail(format!("∂ʳ at {}", eo.basis_name(n, e)));
            }
            for i in 0..n.saturating_sub(1) {
                checks += 1;
                let s = Perm::adjacent(n, i);
                if induced(n, &eo.act(&s, e))? != act_vec(ev, &s, &img) {
                    return fail(format!("s_{i} at {}", eo.basis_name(n, e)));
                }
            }
        }
        for m in 1..=max + 1 - n {
            for slot in 1..=n {
                for x in 0..eo.dim(n) {
                    for y in 0..eo.dim(m) {
                        checks += 1;
                        let lhs = induced(n + m - 1, &eo.compose(n, slot, m, x, y))?;
                        let rhs = compose_vec(
                            ev,
                            n,
                            slot,
                            m,
                            &induced(n, &SparseVec::unit(x))?,
                            &induced(m, &SparseVec::unit(y))?,
                        );
                        if lhs != rhs {
                            return fail(format!("∘_{slot} at {}, {}", eo.basis_name(n, x), eo.basis_name(m, y)));
                        }
                    }
                }
            }
        }
    }
    Ok(checks)
}

// ---------------------------------------------------------------- toy moduli operad

/// A cellular stand-in for the chains on compactified genus-zero moduli up
/// to arity 3. Arity 2 is a point `c`. Arity 3 is a sphere: three boundary
/// points `t_B` (`B` the colliding pair), an equator of three edges and two
/// hemispheres `U`, `L`. Points have level 0, everything else level 1.
#[derive(Clone, Debug, Default)]
pub struct ToyModuli;

const TOY_POINTS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];
/// Oriented equator edges as (from, to) point indices: `t12 → t23 → t13 → t12`.
const TOY_EDGES: [(usize, usize); 3] = [(0, 2), (2, 1), (1, 0)];

fn toy_point(a: usize, b: usize) -> usize {
    let key = (a.min(b), a.max(b));
    TOY_POINTS.iter().position(|&x| x == key).expect("two distinct inputs")
}

impl Operad for ToyModuli {
    fn name(&self) -> String {
        "ToyModuli".into()
    }
    fn max_arity(&self) -> usize {
        3
    }
    fn dim(&self, arity: usize) -> usize {
        match arity {
            1 | 2 => 1,
            3 => 8,
            _ => 0,
        }
    }
    fn degree(&self, arity: usize, e: usize) -> i64 {
        match (arity, e) {
            (3, 3..=5) => 1,
            (3, 6 | 7) => 2,
            _ => 0,
        }
    }
    fn basis_name(&self, arity: usize, e: usize) -> String {
        let names = ["t12", "t13", "t23", "e(12,23)", "e(23,13)", "e(13,12)", "U", "L"];
        match arity {
            1 => "1".into(),
            2 => "c".into(),
            _ => names[e].into(),
        }
    }
    fn unit(&self) -> SparseVec {
        SparseVec::unit(0)
    }
    fn compose(&self, n: usize, slot: usize, m: usize, a: usize, b: usize) -> SparseVec {
        match (n, m) {
            (1, _) => SparseVec::unit(b),
            (_, 1) => SparseVec::unit(a),
            (2, 2) => SparseVec::unit(if slot == 1 { 0 } else { 2 }),
            _ => SparseVec::new(),
        }
    }
    fn act(&self, sigma: &Perm, a: usize) -> SparseVec {
        if sigma.len() < 3 {
            return SparseVec::unit(a);
        }
        let image = |pt: usize| {
            let (x, y) = TOY_POINTS[pt];
            toy_point(sigma.apply(x), sigma.apply(y))
        };
        let mut v = SparseVec::new();
        match a {
            0..=2 => v.add_at(image(a), &Rational::one()),
            3..=5 => {
                let (s, t) = TOY_EDGES[a - 3];
                let (s2, t2) = (image(s), image(t));
                if let Some(k) = TOY_EDGES.iter().position(|&e| e == (s2, t2)) {
                    v.add_at(k + 3, &Rational::one());
                } else {
                    let k = TOY_EDGES.iter().position(|&e| e == (t2, s2)).expect("edges join all pairs");
                    v.add_at(k + 3, &-Rational::one());
                }
            }
            _ => {
                let flip = sigma.sign() < 0;
                v.add_at(if flip { 13 - a } else { a }, &Rational::one());
            }
        }
        v
    }
    fn differential(&self, arity: usize, a: usize) -> SparseVec {
        let mut v = SparseVec::new();
        if arity != 3 {
            return v;
        }
        match a {
            3..=5 => {
                let (s, t) = TOY_EDGES[a - 3];
                v.add_at(t, &Rational::one());
                v.add_at(s, &-Rational::one());
            }
            6 | 7 => {
                let c = if a == 6 { Rational::one() } else { -Rational::one() };
                for k in 3..6 {
                    v.add_at(k, &c);
                }
            }
            _ => {}
        }
        v
    }
}

/// [`ToyModuli`] with its levels, and generators `c` (arity 2) and the edge
/// from `((12)3)` to `(1(23))` (arity 3).
pub fn toy_moduli() -> FilteredOperad<ToyModuli> {
    let levels = vec![vec![0], vec![0], vec![0, 0, 0, 1, 1, 1, 1, 1]];
    FilteredOperad::new(ToyModuli, levels)
        .expect("toy levels are compatible")
        .with_generator(2, SparseVec::unit(0))
        .with_generator(3, SparseVec::unit(3))
}

/// The algebra `μ : ToyModuli → End_V` generated by a binary product `m2`
/// (a vector of `End_V(2)`), sending cells of positive degree to zero.
pub fn toy_moduli_algebra(end: EndOperad, m2: SparseVec) -> Res<FilteredAlgebraData> {
    if end.max_arity() < 3 {
        return Err(FiltrationError::Algebra("End_V is needed up to arity 3".into()));
    }
    let t12 = compose_vec(&end, 2, 1, 2, &m2, &m2);
    let t23 = compose_vec(&end, 2, 2, 2, &m2, &m2);
    // (23) sends the pair {1,2} to {1,3}
    let t13 = act_vec(&end, &Perm::adjacent(3, 1), &t12);
    let zero = SparseVec::new();
    let mu = vec![
        vec![end.unit()],
        vec![m2],
        vec![t12, t13, t23, zero.clone(), zero.clone(), zero.clone(), zero.clone(), zero],
    ];
    Ok(FilteredAlgebraData { end, mu })
}

// ---------------------------------------------------------------- pipeline

/// The `C∞` structure read off the middle row of `E¹`.
#[derive(Clone, Debug)]
pub struct InducedCinf {
    pub family: MapFamily,
    /// `(arity, E¹_{p,0} dims, middle-row dims)` for each arity used.
    pub identification: Vec<(usize, Vec<u64>, Vec<u64>)>,
    /// `m_n` recovered from the `Cobar Lie^c` corolla data agrees with `m_n`.
    pub extraction_consistent: bool,
    pub ainf: Vec<AinfResidual>,
    pub cinf: CinfReport,
}

impl InducedCinf {
    pub fn passed(&self) -> bool {
        self.extraction_consistent && self.ainf.is_empty() && self.cinf.passed()
    }
}

/// Restricts the induced `E¹`-algebra to the middle row `D¹_0`, takes
/// `m_n = μ(generator(n))`, and verifies the result.
pub fn induce_cinf<O: Operad>(
    f: &FilteredOperad<O>,
    a: &FilteredAlgebraData,
    max_n: usize,
    lie: &LieCooperad,
) -> Res<InducedCinf> {
    let report = check_filtered_algebra(f, a)?;
    if let Some(v) = report.morphism_violations.first() {
        return Err(FiltrationError::NotAMorphism(v.clone()));
    }
    if let Some(w) = report.witnesses.first() {
        return Err(FiltrationError::NotFilteredAlgebra(w.clone()));
    }
    let e1 = er_term(f, 1)?;
    let mut identification = Vec::new();
    let mut family = MapFamily::new(a.space().clone(), a.end.q().clone()).map_err(|e| FiltrationError::Algebra(e.to_string()))?;
    for n in 2..=max_n {
        let unavailable = |detail: String| FiltrationError::Identification { arity: n, detail };
        if n > f.base.max_arity() || n > lie.max_arity() {
            return Err(unavailable("beyond the operad or cooperad".into()));
        }
        let row = middle_row(n, lie).map_err(|e| unavailable(e.to_string()))?;
        let ours: Vec<u64> = (0..=n as i64 - 2)
            .map(|p| e1.piece(n, p, 0).map_or(0, |x| x.dim() as u64))
            .collect();
        if ours != row.e1 || !row.equal {
            return Err(unavailable(format!("E¹_(p,0) = {ours:?}, middle row {:?}", row.e1)));
        }
        identification.push((n, ours, row.e1));
        let g = f.generator(n).ok_or_else(|| unavailable("no generator".into()))?;
        let p = n as i64 - 2;
        let cls = e1.class(n, p, p, g).ok_or_else(|| unavailable("generator is not a cycle of E¹_(n-2,0)".into()))?;
        if cls.is_zero() {
            return Err(unavailable("generator vanishes in E¹".into()));
        }
        family
            .set_map(a.multilinear(n, g))
            .map_err(|e| FiltrationError::Algebra(e.to_string()))?;
    }
    let liec_alg = LiecAlgebra::from_family(&family, lie).map_err(|e| FiltrationError::Algebra(e.to_string()))?;
    let mut extraction_consistent = true;
    for n in 2..=max_n {
        let got = extract_mn(&liec_alg, lie, n).map_err(|e| FiltrationError::Algebra(e.to_string()))?;
        let want = family.map(n).cloned().unwrap_or_else(|| Multilinear::new(n));
        let mut diff = got;
        diff.add_scaled(&-Rational::one(), &want);
        extraction_consistent &= diff.is_zero();
    }
    Ok(InducedCinf {
        ainf: check_ainf(&family, max_n),
        cinf: check_cinf(&family, max_n),
        family,
        identification,
        extraction_consistent,
    })
}
