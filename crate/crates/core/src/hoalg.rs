//! A∞ and C∞ verification on finite-dimensional graded spaces.
//!
//! A [`MapFamily`] is a dg space `(V, Q)` (`Q` of degree `-1`) with
//! multilinear maps `m_n` of degree `n-2`. The A∞ relation in arity `n` is
//!
//! ```text
//! Q m_n(v) - (-1)^n Σ_k (-1)^{ε(k)} m_n(v_1, .., Q v_k, .., v_n)
//!     = Σ_{r+s=n+1, 2<=r<n, 1<=k<=r} (-1)^{k(s-1)+sn} (m_r ∘_k m_s)(v)
//! ```
//!
//! with `ε(k) = |v_1| + .. + |v_{k-1}|` and `∘_k` the endomorphism-operad
//! composition, which slides `m_s` past `v_1 .. v_{k-1}`.
//! [`ainf_relation`] lists these terms symbolically; [`check_ainf`]
//! evaluates them.

use std::collections::BTreeMap;
use std::fmt;

use num::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cobar::{shuffle_sum, shuffle_words, Cooperad, LieCooperad};
use crate::operads::GradedSpace;
use crate::perm::Perm;
use crate::qlinalg::{format_rational, parse_rational, Rational, SparseMatrix, SparseVec};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HoalgError {
    #[error("m_{arity} sends inputs {inputs:?} to degree {got}, expected {expected}")]
    DegreeMismatch {
        arity: usize,
        inputs: Vec<usize>,
        got: i64,
        expected: i64,
    },
    #[error("Q must have degree -1 and square to zero: {0}")]
    BadDifferential(String),
    #[error("index out of range: {0}")]
    Index(String),
    #[error("invalid map family file: {0}")]
    Format(String),
    #[error("arity {0} is beyond the Lie^c bound")]
    Arity(usize),
}

/// Multilinear map on basis tuples.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Multilinear {
    pub arity: usize,
    pub entries: BTreeMap<Vec<usize>, SparseVec>,
}

impl Multilinear {
    pub fn new(arity: usize) -> Self {
        Multilinear {
            arity,
            entries: BTreeMap::new(),
        }
    }

    pub fn set(&mut self, inputs: Vec<usize>, value: SparseVec) {
        assert_eq!(inputs.len(), self.arity);
        if value.is_zero() {
            self.entries.remove(&inputs);
        } else {
            self.entries.insert(inputs, value);
        }
    }

    pub fn get(&self, inputs: &[usize]) -> SparseVec {
        self.entries.get(inputs).cloned().unwrap_or_default()
    }

    /// Multilinear extension to vector arguments.
    pub fn eval(&self, args: &[SparseVec]) -> SparseVec {
        let mut out = SparseVec::new();
        let mut stack: Vec<(Vec<usize>, Rational)> = vec![(vec![], Rational::one())];
        for a in args {
            let mut next = Vec::new();
            for (idx, c) in &stack {
                for (i, x) in a.iter() {
                    let mut idx = idx.clone();
                    idx.push(i);
                    next.push((idx, c * x));
                }
            }
            stack = next;
        }
        for (idx, c) in stack {
            if let Some(v) = self.entries.get(&idx) {
                out.add_scaled(&c, v);
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn add_scaled(&mut self, c: &Rational, other: &Multilinear) {
        for (k, v) in &other.entries {
            let mut cur = self.get(k);
            cur.add_scaled(c, v);
            self.set(k.clone(), cur);
        }
    }
}

/// A dg space with operations `m_n` (`n >= 2`). Missing `m_n` are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct MapFamily {
    space: GradedSpace,
    q: SparseMatrix,
    maps: BTreeMap<usize, Multilinear>,
}

fn parity(x: i64) -> Rational {
    if x.rem_euclid(2) == 0 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

impl MapFamily {
    /// `q.get(target, source)`.
    pub fn new(space: GradedSpace, q: SparseMatrix) -> Result<Self, HoalgError> {
        let d = space.dim();
        if q.rows() != d || q.cols() != d {
            return Err(HoalgError::BadDifferential(format!("Q is {}x{}, V has dimension {d}", q.rows(), q.cols())));
        }
        for (r, c, _) in q.triples() {
            if space.basis[r].degree != space.basis[c].degree - 1 {
                return Err(HoalgError::BadDifferential(format!(
                    "Q({}) has a component on {}",
                    space.basis[c].name, space.basis[r].name
                )));
            }
        }
        if !q.mul(&q).is_zero() {
            return Err(HoalgError::BadDifferential("Q∘Q ≠ 0".into()));
        }
        Ok(MapFamily {
            space,
            q,
            maps: BTreeMap::new(),
        })
    }

    /// Space with zero differential.
    pub fn without_differential(space: GradedSpace) -> Self {
        let d = space.dim();
        MapFamily::new(space, SparseMatrix::zero(d, d)).expect("zero differential is valid")
    }

    /// Installs `m_n`, checking that it has degree `n-2`.
    pub fn set_map(&mut self, m: Multilinear) -> Result<(), HoalgError> {
        let n = m.arity;
        for (inputs, out) in &m.entries {
            if let Some(&bad) = inputs.iter().find(|&&i| i >= self.space.dim()) {
                return Err(HoalgError::Index(format!("input {bad}")));
            }
            let expected = self.degree_sum(inputs) + n as i64 - 2;
            for (o, _) in out.iter() {
                let got = self
                    .space
                    .basis
                    .get(o)
                    .ok_or_else(|| HoalgError::Index(format!("output {o}")))?
                    .degree;
                if got != expected {
                    return Err(HoalgError::DegreeMismatch {
                        arity: n,
                        inputs: inputs.clone(),
                        got,
                        expected,
                    });
                }
            }
        }
        if m.is_zero() {
            self.maps.remove(&n);
        } else {
            self.maps.insert(n, m);
        }
        Ok(())
    }

    pub fn space(&self) -> &GradedSpace {
        &self.space
    }

    pub fn q(&self) -> &SparseMatrix {
        &self.q
    }

    pub fn map(&self, n: usize) -> Option<&Multilinear> {
        self.maps.get(&n)
    }

    pub fn arities(&self) -> Vec<usize> {
        self.maps.keys().copied().collect()
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    fn degree_sum(&self, inputs: &[usize]) -> i64 {
        inputs.iter().map(|&i| self.space.basis[i].degree).sum()
    }

    fn apply_q(&self, v: &SparseVec) -> SparseVec {
        self.q.apply(v)
    }

    fn m(&self, n: usize, args: &[SparseVec]) -> SparseVec {
        self.maps.get(&n).map(|m| m.eval(args)).unwrap_or_default()
    }

    pub fn from_json(s: &str) -> Result<Self, HoalgError> {
        let file: MapFamilyFile = serde_json::from_str(s).map_err(|e| HoalgError::Format(e.to_string()))?;
        if file.format_version != 1 {
            return Err(HoalgError::Format(format!("unsupported format_version {}", file.format_version)));
        }
        let space = GradedSpace::new(file.basis.into_iter().map(|b| (b.name, b.degree)).collect());
        let d = space.dim();
        let parse = |s: &str| parse_rational(s).map_err(|e| HoalgError::Format(e.to_string()));
        let mut qt = Vec::new();
        for (r, c, x) in &file.q {
            qt.push((*r, *c, parse(x)?));
        }
        let q = SparseMatrix::from_triples(d, d, qt).map_err(|e| HoalgError::Format(e.to_string()))?;
        let mut f = MapFamily::new(space, q)?;
        for m in file.maps {
            let mut ml = Multilinear::new(m.arity);
            for e in m.entries {
                if e.inputs.len() != m.arity {
                    return Err(HoalgError::Format(format!("entry of m_{} with {} inputs", m.arity, e.inputs.len())));
                }
                let mut v = ml.get(&e.inputs);
                v.add_at(e.output, &parse(&e.coeff)?);
                ml.set(e.inputs, v);
            }
            f.set_map(ml)?;
        }
        Ok(f)
    }

    pub fn to_json(&self) -> String {
        let file = MapFamilyFile {
            format_version: 1,
            basis: self.space.basis.iter().map(|b| BasisEntry { name: b.name.clone(), degree: b.degree }).collect(),
            q: self.q.triples().map(|(r, c, x)| (r, c, format_rational(x))).collect(),
            maps: self
                .maps
                .values()
                .map(|m| MapFile {
                    arity: m.arity,
                    entries: m
                        .entries
                        .iter()
                        .flat_map(|(inputs, out)| {
                            out.iter().map(move |(o, x)| MapEntry {
                                inputs: inputs.clone(),
                                output: o,
                                coeff: format_rational(x),
                            })
                        })
                        .collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("serialisable")
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct BasisEntry {
    name: String,
    degree: i64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct MapEntry {
    inputs: Vec<usize>,
    output: usize,
    coeff: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct MapFile {
    arity: usize,
    entries: Vec<MapEntry>,
}

/// JSON layout of a [`MapFamily`]: basis with degrees, `Q` as
/// `[target, source, "p/q"]` triples, and each `m_n` as a list of
/// `{inputs, output, coeff}` entries.
#[derive(Clone, Debug, Serialize, Deserialize)]
struct MapFamilyFile {
    format_version: u32,
    basis: Vec<BasisEntry>,
    #[serde(default)]
    q: Vec<(usize, usize, String)>,
    #[serde(default)]
    maps: Vec<MapFile>,
}

// ---------------------------------------------------------------- A∞

/// Shape of one term of the A∞ relation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RelationOp {
    /// `Q m_n(v_1, .., v_n)`
    QAfter,
    /// `m_n(v_1, .., Q v_k, .., v_n)`, `k` one-based.
    QAt(usize),
    /// `m_r(v_1, .., m_s(v_k, ..), .., v_n)`
    Compose { r: usize, s: usize, k: usize },
}

/// `sign · (-1)^{weight · (|v_1| + .. + |v_{k-1}|)} · op`; the relation
/// states that the terms sum to zero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationTerm {
    pub arity: usize,
    pub op: RelationOp,
    pub sign: i64,
    /// Number of leading inputs whose degrees enter the exponent.
    pub slide_over: usize,
    pub weight: i64,
}

impl RelationTerm {
    fn value_sign(&self, degrees: &[i64]) -> Rational {
        let s: i64 = degrees[..self.slide_over].iter().sum();
        parity(self.weight * s) * Rational::from_integer(self.sign.into())
    }
}

impl fmt::Display for RelationTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", if self.sign > 0 { "+ " } else { "- " })?;
        if self.weight.rem_euclid(2) == 1 && self.slide_over > 0 {
            let vs: Vec<String> = (1..=self.slide_over).map(|j| format!("|v{j}|")).collect();
            write!(f, "(-1)^{{{}}} ", vs.join("+"))?;
        }
        let n = self.arity;
        let v = |j: usize| format!("v{j}");
        let list = |range: std::ops::RangeInclusive<usize>| range.map(v).collect::<Vec<_>>();
        match self.op {
            RelationOp::QAfter => write!(f, "Q m{n}({})", list(1..=n).join(",")),
            RelationOp::QAt(k) => {
                let mut a = list(1..=n);
                a[k - 1] = format!("Q{}", a[k - 1]);
                write!(f, "m{n}({})", a.join(","))
            }
            RelationOp::Compose { r, s, k } => {
                let mut a = list(1..=k - 1);
                a.push(format!("m{s}({})", list(k..=k + s - 1).join(",")));
                a.extend(list(k + s..=n));
                write!(f, "m{r}({})", a.join(","))
            }
        }
    }
}

/// Terms of the arity-`n` A∞ relation, everything moved to the left side.
pub fn ainf_relation(n: usize) -> Vec<RelationTerm> {
    let mut out = vec![RelationTerm {
        arity: n,
        op: RelationOp::QAfter,
        sign: 1,
        slide_over: 0,
        weight: 0,
    }];
    let sn: i64 = if n.is_multiple_of(2) { 1 } else { -1 };
    for k in 1..=n {
        out.push(RelationTerm {
            arity: n,
            op: RelationOp::QAt(k),
            sign: -sn,
            slide_over: k - 1,
            weight: 1,
        });
    }
    for r in 2..n {
        let s = n + 1 - r;
        for k in 1..=r {
            let e = (k * (s - 1) + s * n) as i64;
            out.push(RelationTerm {
                arity: n,
                op: RelationOp::Compose { r, s, k },
                sign: if e % 2 == 0 { -1 } else { 1 },
                slide_over: k - 1,
                weight: s as i64 - 2,
            });
        }
    }
    out
}

/// Left side minus right side of the A∞ relation on one basis tuple.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AinfResidual {
    pub arity: usize,
    pub inputs: Vec<usize>,
    pub defect: String,
}

fn evaluate_term(f: &MapFamily, n: usize, t: &RelationTerm, inputs: &[usize]) -> SparseVec {
    let args: Vec<SparseVec> = inputs.iter().map(|&i| SparseVec::unit(i)).collect();
    let v = match t.op {
        RelationOp::QAfter => f.apply_q(&f.m(n, &args)),
        RelationOp::QAt(k) => {
            let mut a = args.clone();
            a[k - 1] = f.apply_q(&a[k - 1]);
            f.m(n, &a)
        }
        RelationOp::Compose { r, s, k } => {
            let inner = f.m(s, &args[k - 1..k - 1 + s]);
            let mut a: Vec<SparseVec> = args[..k - 1].to_vec();
            a.push(inner);
            a.extend_from_slice(&args[k - 1 + s..]);
            f.m(r, &a)
        }
    };
    let degrees: Vec<i64> = inputs.iter().map(|&i| f.space.basis[i].degree).collect();
    v.scaled(&t.value_sign(&degrees))
}

fn tuples(d: usize, n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..d.pow(n as u32)).map(move |mut c| {
        let mut t = vec![0; n];
        for k in (0..n).rev() {
            t[k] = c % d;
            c /= d;
        }
        t
    })
}

/// Evaluates the A∞ relations for `2 <= n <= max_n` on every basis tuple;
/// empty iff they all hold.
pub fn check_ainf(f: &MapFamily, max_n: usize) -> Vec<AinfResidual> {
    let mut out = Vec::new();
    let d = f.dim();
    for n in 2..=max_n {
        let terms = ainf_relation(n);
        for inputs in tuples(d, n) {
            let mut acc = SparseVec::new();
            for t in &terms {
                acc.add_scaled(&Rational::one(), &evaluate_term(f, n, t, &inputs));
            }
            if !acc.is_zero() {
                out.push(AinfResidual {
                    arity: n,
                    inputs,
                    defect: acc.to_string(),
                });
            }
        }
    }
    out
}

// ---------------------------------------------------------------- C∞

/// Sign of feeding `m_n` the inputs in `order` within a shuffle sum: the
/// Koszul sign for the shifted degrees `|a|+1`, times the sign relating
/// `m_n` to its desuspension `b_n = s m_n (s^{-1})^{⊗n}` on the reordered
/// versus the original inputs.
pub fn word_sign(order: &[usize], degrees: &[i64]) -> Rational {
    let n = order.len();
    let mut odd = 0i64;
    for a in 0..n {
        for b in a + 1..n {
            if order[a] > order[b] && (degrees[order[a]] + 1).rem_euclid(2) == 1 && (degrees[order[b]] + 1).rem_euclid(2) == 1 {
                odd += 1;
            }
        }
    }
    let desusp: i64 = (0..n).map(|t| (n - 1 - t) as i64 * (degrees[order[t]] - degrees[t])).sum();
    parity(odd + desusp)
}

/// `(w · m)(a_1, .., a_n) = ± m(a_{w_1}, .., a_{w_n})` with [`word_sign`].
pub fn word_action(order: &[usize], m: &Multilinear, degrees_of: impl Fn(usize) -> i64) -> Multilinear {
    let mut out = Multilinear::new(m.arity);
    let n = m.arity;
    for (inputs, v) in &m.entries {
        // m(b_{J_0}, ..) = v contributes to (w·m)(I) where J_t = I_{order[t]}
        let mut target = vec![0; n];
        for t in 0..n {
            target[order[t]] = inputs[t];
        }
        let degrees: Vec<i64> = target.iter().map(|&i| degrees_of(i)).collect();
        let s = word_sign(order, &degrees);
        let mut cur = out.get(&target);
        cur.add_scaled(&s, v);
        out.set(target, cur);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShuffleViolation {
    pub arity: usize,
    pub p: usize,
    pub q: usize,
    pub inputs: Vec<usize>,
    pub defect: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CinfReport {
    pub ainf: Vec<AinfResidual>,
    pub shuffles: Vec<ShuffleViolation>,
    pub checks: usize,
}

impl CinfReport {
    pub fn passed(&self) -> bool {
        self.ainf.is_empty() && self.shuffles.is_empty()
    }
}

/// A∞ relations plus vanishing of every `m_n` on the `(p, q)`-shuffle sums.
pub fn check_cinf(f: &MapFamily, max_n: usize) -> CinfReport {
    let mut report = CinfReport {
        ainf: check_ainf(f, max_n),
        ..Default::default()
    };
    let d = f.dim();
    for n in 2..=max_n {
        let Some(m) = f.map(n) else { continue };
        for p in 1..n {
            let q = n - p;
            let terms = shuffle_sum(p, q);
            for inputs in tuples(d, n) {
                report.checks += 1;
                let degrees: Vec<i64> = inputs.iter().map(|&i| f.space.basis[i].degree).collect();
                let mut acc = SparseVec::new();
                for t in &terms {
                    let permuted: Vec<usize> = t.order.iter().map(|&j| inputs[j]).collect();
                    acc.add_scaled(&word_sign(&t.order, &degrees), &m.get(&permuted));
                }
                if !acc.is_zero() {
                    report.shuffles.push(ShuffleViolation {
                        arity: n,
                        p,
                        q,
                        inputs: inputs.clone(),
                        defect: acc.to_string(),
                    });
                }
            }
        }
    }
    report
}

// ---------------------------------------------------------------- Cobar Lie^c algebras

/// Corolla data of an algebra over `Cobar Lie^c`: for each arity, the
/// multilinear map assigned to every basis element of `Lie^c(n)`.
#[derive(Clone, Debug)]
pub struct LiecAlgebra {
    pub space: GradedSpace,
    pub q: SparseMatrix,
    /// arity → one map per `Lie^c(n)` basis element.
    pub corollas: BTreeMap<usize, Vec<Multilinear>>,
}

/// Value of `word ↦ (word · m_n)` summed over a vector of `As^c(n)`.
fn pulled_back(l: &LieCooperad, m: &Multilinear, v: &SparseVec, space: &GradedSpace) -> Multilinear {
    let mut out = Multilinear::new(m.arity);
    for (w, c) in v.iter() {
        let order: Vec<usize> = l.asc().word(m.arity, w).iter().map(|&x| x as usize).collect();
        out.add_scaled(c, &word_action(&order, m, |i| space.basis[i].degree));
    }
    out
}

impl LiecAlgebra {
    /// Assigns to the class of each representative word `w` the map
    /// `w · m_n`.
    pub fn from_family(f: &MapFamily, l: &LieCooperad) -> Result<Self, HoalgError> {
        let mut corollas = BTreeMap::new();
        for n in f.arities() {
            if n > l.max_arity() {
                return Err(HoalgError::Arity(n));
            }
            let m = f.map(n).unwrap();
            let maps = (0..l.dim(n))
                .map(|b| {
                    let rep = SparseVec::unit(l.component(n).representative(b));
                    pulled_back(l, m, &rep, &f.space)
                })
                .collect();
            corollas.insert(n, maps);
        }
        Ok(LiecAlgebra {
            space: f.space.clone(),
            q: f.q.clone(),
            corollas,
        })
    }

    /// Evaluates the structure on the class of a vector of `As^c(n)`.
    pub fn evaluate(&self, l: &LieCooperad, n: usize, words: &SparseVec) -> Multilinear {
        let mut out = Multilinear::new(n);
        let Some(maps) = self.corollas.get(&n) else { return out };
        let coords = l.component(n).coords(words);
        for (b, c) in coords.iter() {
            out.add_scaled(c, &maps[b]);
        }
        out
    }
}

/// `m_n` as the value on the class of the identity word `x_1 .. x_n`.
pub fn extract_mn(a: &LiecAlgebra, l: &LieCooperad, n: usize) -> Result<Multilinear, HoalgError> {
    if n > l.max_arity() {
        return Err(HoalgError::Arity(n));
    }
    let id: Vec<u8> = (0..n as u8).collect();
    Ok(a.evaluate(l, n, &SparseVec::unit(l.asc().index(&id))))
}

/// How far `m_n` is from descending to `Lie^c(n)`: the largest number of
/// nonzero values of `Σ (w · m_n)` over the shuffle products `u ш v`
/// (zero iff `m_n` kills the shuffle span).
pub fn shuffle_defect(f: &MapFamily, l: &LieCooperad, n: usize) -> usize {
    let Some(m) = f.map(n) else { return 0 };
    let mut worst = 0;
    for mask in 1u64..(1 << n) - 1 {
        if mask & 1 == 0 {
            continue;
        }
        let p: Vec<u8> = (0..n as u8).filter(|&j| mask >> j & 1 == 1).collect();
        let q: Vec<u8> = (0..n as u8).filter(|&j| mask >> j & 1 == 0).collect();
        for su in Perm::all(p.len()) {
            let u: Vec<u8> = su.images().iter().map(|&i| p[i]).collect();
            for sv in Perm::all(q.len()) {
                let v: Vec<u8> = sv.images().iter().map(|&i| q[i]).collect();
                let mut vec = SparseVec::new();
                for w in shuffle_words(&u, &v) {
                    vec.add_at(l.asc().index(&w), &Rational::one());
                }
                worst = worst.max(pulled_back(l, m, &vec, &f.space).entries.len());
            }
        }
    }
    worst
}
