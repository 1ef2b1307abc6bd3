//! Graded rational operads.
//!
//! An [`Operad`] exposes finite bases per arity together with partial
//! compositions `∘_i`, the symmetric action and (optionally) a differential,
//! all on basis elements. The convention for the action is that `σ·f`
//! relabels input `j` of `f` as `σ(j)`; for word operads that literally
//! renames letters.
//!
//! Shipped operads: [`CommOperad`], [`AssocOperad`], [`LieOperad`] and
//! [`EndOperad`]. Any operad can be frozen into an [`OperadTable`], which is
//! also the JSON interchange form.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::perm::{block_permutation, class_size, factorial, koszul_sign, partitions, Perm};
use crate::qlinalg::{format_rational, parse_rational, q, Rational, SparseMatrix, SparseVec};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OperadError {
    #[error("component dimension {dim} at arity {arity} exceeds the cap {cap}")]
    TooLarge { arity: usize, dim: u128, cap: u128 },
    #[error("max_arity must be at least 1")]
    NoArity,
    #[error("invalid operad table: {0}")]
    Table(String),
    #[error("differential must have degree -1 and square to zero: {0}")]
    Differential(String),
}

/// A named basis element with an integer degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisElement {
    pub name: String,
    pub degree: i64,
}

/// Finite-dimensional graded space given by a named basis.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedSpace {
    pub basis: Vec<BasisElement>,
}

impl GradedSpace {
    pub fn new(basis: Vec<(String, i64)>) -> Self {
        GradedSpace {
            basis: basis
                .into_iter()
                .map(|(name, degree)| BasisElement { name, degree })
                .collect(),
        }
    }

    /// `dim` basis elements all in degree zero, named `e0, e1, ..`.
    pub fn trivial(dim: usize) -> Self {
        GradedSpace::new((0..dim).map(|i| (format!("e{i}"), 0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn degrees(&self) -> Vec<i64> {
        self.basis.iter().map(|b| b.degree).collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.basis.iter().position(|b| b.name == name)
    }
}

/// Operad with finite-dimensional components in arities `1..=max_arity`.
pub trait Operad {
    fn name(&self) -> String;
    fn max_arity(&self) -> usize;
    fn dim(&self, arity: usize) -> usize;
    fn degree(&self, arity: usize, element: usize) -> i64;
    fn basis_name(&self, arity: usize, element: usize) -> String;
    /// Unit as a vector of the arity-one component.
    fn unit(&self) -> SparseVec;
    /// `a ∘_slot b` on basis elements (`slot` one-based, `a` of arity `n`,
    /// `b` of arity `m`).
    fn compose(&self, n: usize, slot: usize, m: usize, a: usize, b: usize) -> SparseVec;
    /// `σ · a` for `a` of arity `σ.len()`.
    fn act(&self, sigma: &Perm, a: usize) -> SparseVec;
    /// Differential (degree `-1`). Zero unless overridden.
    fn differential(&self, _arity: usize, _a: usize) -> SparseVec {
        SparseVec::new()
    }

    fn component(&self, arity: usize) -> GradedSpace {
        GradedSpace {
            basis: (0..self.dim(arity))
                .map(|b| BasisElement {
                    name: self.basis_name(arity, b),
                    degree: self.degree(arity, b),
                })
                .collect(),
        }
    }
}

/// Bilinear extension of [`Operad::compose`].
pub fn compose_vec<O: Operad + ?Sized>(op: &O, n: usize, slot: usize, m: usize, a: &SparseVec, b: &SparseVec) -> SparseVec {
    let mut out = SparseVec::new();
    for (i, x) in a.iter() {
        for (j, y) in b.iter() {
            out.add_scaled(&(x * y), &op.compose(n, slot, m, i, j));
        }
    }
    out
}

pub fn act_vec<O: Operad + ?Sized>(op: &O, sigma: &Perm, a: &SparseVec) -> SparseVec {
    let mut out = SparseVec::new();
    for (i, x) in a.iter() {
        out.add_scaled(x, &op.act(sigma, i));
    }
    out
}

pub fn differential_vec<O: Operad + ?Sized>(op: &O, arity: usize, a: &SparseVec) -> SparseVec {
    let mut out = SparseVec::new();
    for (i, x) in a.iter() {
        out.add_scaled(x, &op.differential(arity, i));
    }
    out
}

/// Degree of a homogeneous vector (degree of any basis element in support).
pub fn vec_degree<O: Operad + ?Sized>(op: &O, arity: usize, a: &SparseVec) -> Option<i64> {
    a.leading().map(|(i, _)| op.degree(arity, i))
}

fn sign(parity: i64) -> Rational {
    if parity.rem_euclid(2) == 0 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

// ---------------------------------------------------------------- Comm

/// `Comm(n)` is one-dimensional, spanned by `x1...xn`.
#[derive(Clone, Debug)]
pub struct CommOperad {
    max_arity: usize,
}

pub fn comm_operad(max_arity: usize) -> CommOperad {
    CommOperad {
        max_arity: max_arity.max(1),
    }
}

impl Operad for CommOperad {
    fn name(&self) -> String {
        "Comm".into()
    }
    fn max_arity(&self) -> usize {
        self.max_arity
    }
    fn dim(&self, arity: usize) -> usize {
        usize::from(arity >= 1 && arity <= self.max_arity)
    }
    fn degree(&self, _: usize, _: usize) -> i64 {
        0
    }
    fn basis_name(&self, arity: usize, _: usize) -> String {
        (1..=arity).map(|i| format!("x{i}")).collect()
    }
    fn unit(&self) -> SparseVec {
        SparseVec::unit(0)
    }
    fn compose(&self, _: usize, _: usize, _: usize, _: usize, _: usize) -> SparseVec {
        SparseVec::unit(0)
    }
    fn act(&self, _: &Perm, _: usize) -> SparseVec {
        SparseVec::unit(0)
    }
}

// ---------------------------------------------------------------- Assoc

/// Index of multilinear words of each arity.
#[derive(Clone, Debug)]
pub(crate) struct WordIndex {
    pub words: Vec<Vec<Vec<u8>>>,
    pub index: Vec<HashMap<Vec<u8>, usize>>,
}

impl WordIndex {
    pub fn new(max_arity: usize, filter: impl Fn(&[u8]) -> bool) -> Self {
        let mut words = vec![vec![]];
        let mut index = vec![HashMap::new()];
        for n in 1..=max_arity {
            let ws: Vec<Vec<u8>> = Perm::all(n)
                .into_iter()
                .map(|p| p.images().iter().map(|&x| x as u8).collect::<Vec<u8>>())
                .filter(|w| filter(w))
                .collect();
            index.push(ws.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect());
            words.push(ws);
        }
        WordIndex { words, index }
    }
}

/// Substitutes word `u` (arity `m`) into letter `slot-1` of word `w`.
pub fn substitute(w: &[u8], slot: usize, u: &[u8]) -> Vec<u8> {
    let i = (slot - 1) as u8;
    let m = u.len() as u8;
    let mut out = Vec::with_capacity(w.len() + u.len() - 1);
    for &x in w {
        if x < i {
            out.push(x);
        } else if x == i {
            out.extend(u.iter().map(|&y| y + i));
        } else {
            out.push(x + m - 1);
        }
    }
    out
}

pub fn word_name(w: &[u8]) -> String {
    w.iter().map(|x| format!("x{}", x + 1)).collect()
}

/// `Assoc(n)` has basis the words `x_{σ(1)} ... x_{σ(n)}`, one per `σ ∈ S_n`.
#[derive(Clone, Debug)]
pub struct AssocOperad {
    max_arity: usize,
    words: WordIndex,
}

pub fn assoc_operad(max_arity: usize) -> AssocOperad {
    let max_arity = max_arity.max(1);
    AssocOperad {
        max_arity,
        words: WordIndex::new(max_arity, |_| true),
    }
}

impl AssocOperad {
    pub fn word(&self, arity: usize, i: usize) -> &[u8] {
        &self.words.words[arity][i]
    }

    pub fn index(&self, w: &[u8]) -> Option<usize> {
        self.words.index.get(w.len())?.get(w).copied()
    }
}

impl Operad for AssocOperad {
    fn name(&self) -> String {
        "Assoc".into()
    }
    fn max_arity(&self) -> usize {
        self.max_arity
    }
    fn dim(&self, arity: usize) -> usize {
        self.words.words.get(arity).map_or(0, Vec::len)
    }
    fn degree(&self, _: usize, _: usize) -> i64 {
        0
    }
    fn basis_name(&self, arity: usize, i: usize) -> String {
        word_name(self.word(arity, i))
    }
    fn unit(&self) -> SparseVec {
        SparseVec::unit(0)
    }
    fn compose(&self, n: usize, slot: usize, m: usize, a: usize, b: usize) -> SparseVec {
        let w = substitute(self.word(n, a), slot, self.word(m, b));
        match self.index(&w) {
            Some(i) => SparseVec::unit(i),
            None => SparseVec::new(),
        }
    }
    fn act(&self, sigma: &Perm, a: usize) -> SparseVec {
        let n = sigma.len();
        let w: Vec<u8> = self.word(n, a).iter().map(|&x| sigma.apply(x as usize) as u8).collect();
        SparseVec::unit(self.index(&w).unwrap())
    }
}

// ---------------------------------------------------------------- Lie

/// A bracket expression in distinct letters (zero-based).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LieBracket {
    Letter(u8),
    Bracket(Box<LieBracket>, Box<LieBracket>),
}

impl LieBracket {
    pub fn bracket(a: LieBracket, b: LieBracket) -> LieBracket {
        LieBracket::Bracket(Box::new(a), Box::new(b))
    }

    pub fn letters(&self) -> Vec<u8> {
        match self {
            LieBracket::Letter(x) => vec![*x],
            LieBracket::Bracket(a, b) => {
                let mut v = a.letters();
                v.extend(b.letters());
                v
            }
        }
    }

    /// Left-normed bracket `[..[x_{w0}, x_{w1}], .., x_{wk}]`.
    pub fn left_normed(word: &[u8]) -> LieBracket {
        let mut it = word.iter();
        let mut acc = LieBracket::Letter(*it.next().expect("empty word"));
        for &x in it {
            acc = LieBracket::bracket(acc, LieBracket::Letter(x));
        }
        acc
    }

    /// Expansion into the tensor algebra (commutators).
    pub fn expand(&self) -> BTreeMap<Vec<u8>, i64> {
        match self {
            LieBracket::Letter(x) => BTreeMap::from([(vec![*x], 1)]),
            LieBracket::Bracket(a, b) => {
                let (ea, eb) = (a.expand(), b.expand());
                let mut out = BTreeMap::new();
                for (u, x) in &ea {
                    for (v, y) in &eb {
                        let mut uv = u.clone();
                        uv.extend(v);
                        *out.entry(uv).or_insert(0) += x * y;
                        let mut vu = v.clone();
                        vu.extend(u);
                        *out.entry(vu).or_insert(0) -= x * y;
                    }
                }
                out.retain(|_, c| *c != 0);
                out
            }
        }
    }

    /// Rewrites into left-normed brackets whose first letter is the
    /// smallest letter, using only antisymmetry and the Jacobi identity.
    /// Keys are the left-normed words.
    pub fn normalize(&self) -> BTreeMap<Vec<u8>, i64> {
        match self {
            LieBracket::Letter(x) => BTreeMap::from([(vec![*x], 1)]),
            LieBracket::Bracket(a, b) => {
                let (mut na, mut nb) = (a.normalize(), b.normalize());
                let min_a = *a.letters().iter().min().unwrap();
                let min_b = *b.letters().iter().min().unwrap();
                let mut sgn = 1;
                if min_b < min_a {
                    std::mem::swap(&mut na, &mut nb);
                    sgn = -1;
                }
                let mut out = BTreeMap::new();
                for (u, x) in &na {
                    for (v, y) in &nb {
                        for (w, z) in bracket_left_normed(u, v) {
                            *out.entry(w).or_insert(0) += sgn * x * y * z;
                        }
                    }
                }
                out.retain(|_, c| *c != 0);
                out
            }
        }
    }
}

/// `[ℓ_u, ℓ_v]` as left-normed words, where `u` starts with the overall
/// smallest letter. Uses `[X, [Y, y]] = [[X, Y], y] - [[X, y], Y]`.
fn bracket_left_normed(u: &[u8], v: &[u8]) -> Vec<(Vec<u8>, i64)> {
    if v.len() == 1 {
        let mut w = u.to_vec();
        w.push(v[0]);
        return vec![(w, 1)];
    }
    let (head, y) = v.split_at(v.len() - 1);
    let mut out: BTreeMap<Vec<u8>, i64> = BTreeMap::new();
    for (mut w, c) in bracket_left_normed(u, head) {
        w.push(y[0]);
        *out.entry(w).or_insert(0) += c;
    }
    let mut uy = u.to_vec();
    uy.push(y[0]);
    for (w, c) in bracket_left_normed(&uy, head) {
        *out.entry(w).or_insert(0) -= c;
    }
    out.into_iter().filter(|(_, c)| *c != 0).collect()
}

impl fmt::Display for LieBracket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LieBracket::Letter(x) => write!(f, "x{}", x + 1),
            LieBracket::Bracket(a, b) => write!(f, "[{a},{b}]"),
        }
    }
}

/// `Lie(n)`: multilinear Lie words with basis the left-normed brackets
/// `[..[x1, x_{w2}], .., x_{wn}]`, indexed by the Lyndon words `1 w2 .. wn`.
///
/// Inside the tensor algebra such a bracket contains exactly one word
/// starting with `x1`, namely `x1 x_{w2} .. x_{wn}`, with coefficient one.
/// So coordinates of any Lie element are read off its `x1`-initial words.
#[derive(Clone, Debug)]
pub struct LieOperad {
    max_arity: usize,
    words: WordIndex,
    expansions: Vec<Vec<Vec<(Vec<u8>, i64)>>>,
}

pub fn lie_operad(max_arity: usize) -> LieOperad {
    let max_arity = max_arity.max(1);
    let words = WordIndex::new(max_arity, |w| w[0] == 0);
    let expansions = words
        .words
        .iter()
        .map(|ws| {
            ws.iter()
                .map(|w| LieBracket::left_normed(w).expand().into_iter().collect())
                .collect()
        })
        .collect();
    LieOperad {
        max_arity,
        words,
        expansions,
    }
}

impl LieOperad {
    pub fn lyndon_word(&self, arity: usize, i: usize) -> &[u8] {
        &self.words.words[arity][i]
    }

    /// Tensor-algebra expansion of basis element `i`.
    pub fn expansion(&self, arity: usize, i: usize) -> &[(Vec<u8>, i64)] {
        &self.expansions[arity][i]
    }

    /// Basis coordinates of a multilinear tensor that lies in `Lie(n)`.
    pub fn coords_of_tensor<'a>(&self, terms: impl IntoIterator<Item = (&'a Vec<u8>, &'a i64)>) -> SparseVec {
        let mut out = SparseVec::new();
        for (w, c) in terms {
            if w[0] == 0 {
                if let Some(&i) = self.words.index[w.len()].get(w) {
                    out.add_at(i, &q(*c));
                }
            }
        }
        out
    }

    /// Coordinates of a bracket expression in letters `0..n`.
    pub fn coords_of_bracket(&self, b: &LieBracket) -> SparseVec {
        let e = b.expand();
        self.coords_of_tensor(e.iter())
    }
}

impl Operad for LieOperad {
    fn name(&self) -> String {
        "Lie".into()
    }
    fn max_arity(&self) -> usize {
        self.max_arity
    }
    fn dim(&self, arity: usize) -> usize {
        self.words.words.get(arity).map_or(0, Vec::len)
    }
    fn degree(&self, _: usize, _: usize) -> i64 {
        0
    }
    fn basis_name(&self, arity: usize, i: usize) -> String {
        LieBracket::left_normed(self.lyndon_word(arity, i)).to_string()
    }
    fn unit(&self) -> SparseVec {
        SparseVec::unit(0)
    }
    fn compose(&self, n: usize, slot: usize, m: usize, a: usize, b: usize) -> SparseVec {
        let mut acc: BTreeMap<Vec<u8>, i64> = BTreeMap::new();
        let i = (slot - 1) as u8;
        for (u, x) in self.expansion(n, a) {
            // only x1-initial words of the result matter
            let starts_low = u[0] == 0 && i != 0;
            if !starts_low && u[0] != i {
                continue;
            }
            for (v, y) in self.expansion(m, b) {
                let w = substitute(u, slot, v);
                if w[0] == 0 {
                    *acc.entry(w).or_insert(0) += x * y;
                }
            }
        }
        self.coords_of_tensor(acc.iter())
    }
    fn act(&self, sigma: &Perm, a: usize) -> SparseVec {
        let n = sigma.len();
        let mut acc: BTreeMap<Vec<u8>, i64> = BTreeMap::new();
        for (u, x) in self.expansion(n, a) {
            let w: Vec<u8> = u.iter().map(|&l| sigma.apply(l as usize) as u8).collect();
            if w[0] == 0 {
                *acc.entry(w).or_insert(0) += x;
            }
        }
        self.coords_of_tensor(acc.iter())
    }
}

// ---------------------------------------------------------------- End_V

/// Default cap on `dim End_V(n)`.
pub const DEFAULT_END_CAP: u128 = 1 << 16;

/// Endomorphism operad `End_V(n) = Hom(V^{⊗n}, V)` of a dg space `(V, Q)`.
///
/// Basis element `(o; i_1..i_n)` sends `b_{i_1} ⊗ .. ⊗ b_{i_n}` to `b_o` and
/// every other basis tensor to zero. Composition carries the sign of
/// sliding the inner map past the preceding inputs.
#[derive(Clone, Debug)]
pub struct EndOperad {
    space: GradedSpace,
    q: SparseMatrix,
    max_arity: usize,
}

pub fn endomorphism_operad(space: GradedSpace, max_arity: usize) -> Result<EndOperad, OperadError> {
    let d = space.dim();
    endomorphism_operad_dg(space, SparseMatrix::zero(d, d), max_arity, DEFAULT_END_CAP)
}

/// `q` is the differential of `V` (`q.get(target, source)`).
pub fn endomorphism_operad_dg(
    space: GradedSpace,
    q: SparseMatrix,
    max_arity: usize,
    cap: u128,
) -> Result<EndOperad, OperadError> {
    if max_arity == 0 {
        return Err(OperadError::NoArity);
    }
    let d = space.dim() as u128;
    let dim = d.pow(max_arity as u32 + 1);
    if dim > cap {
        return Err(OperadError::TooLarge {
            arity: max_arity,
            dim,
            cap,
        });
    }
    let degs = space.degrees();
    for (r, c, _) in q.triples() {
        if degs[r] != degs[c] - 1 {
            return Err(OperadError::Differential(format!("Q maps degree {} to {}", degs[c], degs[r])));
        }
    }
    if !q.mul(&q).is_zero() {
        return Err(OperadError::Differential("Q∘Q ≠ 0".into()));
    }
    Ok(EndOperad { space, q, max_arity })
}

impl EndOperad {
    pub fn space(&self) -> &GradedSpace {
        &self.space
    }

    pub fn q(&self) -> &SparseMatrix {
        &self.q
    }

    /// `(output, inputs)` of basis element `e`.
    pub fn decode(&self, arity: usize, mut e: usize) -> (usize, Vec<usize>) {
        let d = self.space.dim();
        let mut inputs = vec![0; arity];
        for k in (0..arity).rev() {
            inputs[k] = e % d;
            e /= d;
        }
        (e, inputs)
    }

    pub fn encode(&self, output: usize, inputs: &[usize]) -> usize {
        let d = self.space.dim();
        inputs.iter().fold(output, |acc, &i| acc * d + i)
    }

    fn input_degree(&self, inputs: &[usize]) -> i64 {
        inputs.iter().map(|&i| self.space.basis[i].degree).sum()
    }
}

impl Operad for EndOperad {
    fn name(&self) -> String {
        "End".into()
    }
    fn max_arity(&self) -> usize {
        self.max_arity
    }
    fn dim(&self, arity: usize) -> usize {
        if arity == 0 || arity > self.max_arity {
            0
        } else {
            self.space.dim().pow(arity as u32 + 1)
        }
    }
    fn degree(&self, arity: usize, e: usize) -> i64 {
        let (o, ins) = self.decode(arity, e);
        self.space.basis[o].degree - self.input_degree(&ins)
    }
    fn basis_name(&self, arity: usize, e: usize) -> String {
        let (o, ins) = self.decode(arity, e);
        let names: Vec<&str> = ins.iter().map(|&i| self.space.basis[i].name.as_str()).collect();
        format!("{}<-{}", self.space.basis[o].name, names.join("⊗"))
    }
    fn unit(&self) -> SparseVec {
        (0..self.space.dim())
            .map(|b| (self.encode(b, &[b]), Rational::one()))
            .collect()
    }
    fn compose(&self, n: usize, slot: usize, m: usize, a: usize, b: usize) -> SparseVec {
        let (o, ins) = self.decode(n, a);
        let (o2, ins2) = self.decode(m, b);
        let i = slot - 1;
        if ins[i] != o2 {
            return SparseVec::new();
        }
        let deg_b = self.degree(m, b);
        let slide = deg_b * self.input_degree(&ins[..i]);
        let mut new_ins = ins[..i].to_vec();
        new_ins.extend(&ins2);
        new_ins.extend(&ins[i + 1..]);
        let mut v = SparseVec::new();
        v.add_at(self.encode(o, &new_ins), &sign(slide));
        v
    }
    fn act(&self, sigma: &Perm, a: usize) -> SparseVec {
        let n = sigma.len();
        let (o, ins) = self.decode(n, a);
        let inv = sigma.inverse();
        let new_ins: Vec<usize> = (0..n).map(|j| ins[inv.apply(j)]).collect();
        let degs: Vec<i64> = new_ins.iter().map(|&i| self.space.basis[i].degree).collect();
        let s = koszul_sign(sigma.images(), &degs);
        let mut v = SparseVec::new();
        v.add_at(self.encode(o, &new_ins), &q(s));
        v
    }
    fn differential(&self, arity: usize, a: usize) -> SparseVec {
        let (o, ins) = self.decode(arity, a);
        let deg = self.degree(arity, a);
        let mut out = SparseVec::new();
        // Q ∘ f
        for (r, c, x) in self.q.triples() {
            if c == o {
                out.add_at(self.encode(r, &ins), x);
            }
        }
        // -(-1)^{|f|} Σ_k f ∘ (1 ⊗ .. ⊗ Q ⊗ .. ⊗ 1)
        for k in 0..arity {
            let pre = self.input_degree(&ins[..k]);
            for (r, c, x) in self.q.triples() {
                if r == ins[k] {
                    let mut new_ins = ins.clone();
                    new_ins[k] = c;
                    let coeff = -(x * sign(deg + pre));
                    out.add_at(self.encode(o, &new_ins), &coeff);
                }
            }
        }
        out
    }
}

// ---------------------------------------------------------------- table form

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableBasis {
    pub name: String,
    pub degree: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub filtration_level: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableComponent {
    pub arity: usize,
    pub basis: Vec<TableBasis>,
}

/// Sparse vector as `[index, "rational"]` pairs.
pub type TableVec = Vec<(usize, String)>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableComposition {
    pub outer_arity: usize,
    pub slot: usize,
    pub inner_arity: usize,
    pub outer: usize,
    pub inner: usize,
    pub result: TableVec,
}

/// Action of the adjacent transposition swapping inputs `position` and
/// `position + 1` (one-based) on `element`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableTransposition {
    pub arity: usize,
    pub position: usize,
    pub element: usize,
    pub result: TableVec,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableDifferential {
    pub arity: usize,
    pub element: usize,
    pub result: TableVec,
}

/// Materialised operad; the JSON interchange format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperadTable {
    pub format_version: u32,
    pub name: String,
    pub max_arity: usize,
    pub components: Vec<TableComponent>,
    pub unit: TableVec,
    pub compositions: Vec<TableComposition>,
    pub transpositions: Vec<TableTransposition>,
    #[serde(default)]
    pub differential: Vec<TableDifferential>,
    #[serde(skip)]
    cache: Option<TableCache>,
}

#[derive(Clone, Debug, PartialEq)]
struct TableCache {
    comp: HashMap<(usize, usize, usize, usize, usize), SparseVec>,
    trans: HashMap<(usize, usize, usize), SparseVec>,
    diff: HashMap<(usize, usize), SparseVec>,
    unit: SparseVec,
}

fn to_table_vec(v: &SparseVec) -> TableVec {
    v.iter().map(|(i, x)| (i, format_rational(x))).collect()
}

fn from_table_vec(v: &TableVec) -> Result<SparseVec, OperadError> {
    let mut out = SparseVec::new();
    for (i, s) in v {
        out.add_at(*i, &parse_rational(s).map_err(|e| OperadError::Table(e.to_string()))?);
    }
    Ok(out)
}

impl OperadTable {
    /// Freezes `op` up to `max_arity`. `levels` optionally attaches a
    /// filtration level to every basis element.
    pub fn from_operad<O: Operad + ?Sized>(
        op: &O,
        max_arity: usize,
        levels: Option<&dyn Fn(usize, usize) -> i64>,
    ) -> OperadTable {
        let max_arity = max_arity.min(op.max_arity());
        let components = (1..=max_arity)
            .map(|n| TableComponent {
                arity: n,
                basis: (0..op.dim(n))
                    .map(|b| TableBasis {
                        name: op.basis_name(n, b),
                        degree: op.degree(n, b),
                        filtration_level: levels.map(|f| f(n, b)),
                    })
                    .collect(),
            })
            .collect();
        let mut compositions = Vec::new();
        for n in 1..=max_arity {
            for m in 1..=max_arity + 1 - n {
                for slot in 1..=n {
                    for a in 0..op.dim(n) {
                        for b in 0..op.dim(m) {
                            let r = op.compose(n, slot, m, a, b);
                            if !r.is_zero() {
                                compositions.push(TableComposition {
                                    outer_arity: n,
                                    slot,
                                    inner_arity: m,
                                    outer: a,
                                    inner: b,
                                    result: to_table_vec(&r),
                                });
                            }
                        }
                    }
                }
            }
        }
        let mut transpositions = Vec::new();
        let mut differential = Vec::new();
        for n in 1..=max_arity {
            for a in 0..op.dim(n) {
                for p in 1..n {
                    transpositions.push(TableTransposition {
                        arity: n,
                        position: p,
                        element: a,
                        result: to_table_vec(&op.act(&Perm::adjacent(n, p - 1), a)),
                    });
                }
                let d = op.differential(n, a);
                if !d.is_zero() {
                    differential.push(TableDifferential {
                        arity: n,
                        element: a,
                        result: to_table_vec(&d),
                    });
                }
            }
        }
        let mut t = OperadTable {
            format_version: 1,
            name: op.name(),
            max_arity,
            components,
            unit: to_table_vec(&op.unit()),
            compositions,
            transpositions,
            differential,
            cache: None,
        };
        t.build_cache().expect("freshly built table is valid");
        t
    }

    pub fn from_json(s: &str) -> Result<OperadTable, OperadError> {
        let mut t: OperadTable = serde_json::from_str(s).map_err(|e| OperadError::Table(e.to_string()))?;
        t.build_cache()?;
        Ok(t)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serialises")
    }

    fn build_cache(&mut self) -> Result<(), OperadError> {
        if self.format_version != 1 {
            return Err(OperadError::Table(format!("unsupported format_version {}", self.format_version)));
        }
        for (k, c) in self.components.iter().enumerate() {
            if c.arity != k + 1 {
                return Err(OperadError::Table("components must be listed for arities 1, 2, ..".into()));
            }
        }
        if self.components.len() != self.max_arity {
            return Err(OperadError::Table("component count differs from max_arity".into()));
        }
        let dim = |n: usize| self.components.get(n.wrapping_sub(1)).map_or(0, |c| c.basis.len());
        let check_vec = |v: &SparseVec, n: usize| -> Result<(), OperadError> {
            match v.max_index() {
                Some(i) if i >= dim(n) => Err(OperadError::Table(format!("index {i} out of range at arity {n}"))),
                _ => Ok(()),
            }
        };
        let mut comp = HashMap::new();
        for c in &self.compositions {
            let v = from_table_vec(&c.result)?;
            check_vec(&v, c.outer_arity + c.inner_arity - 1)?;
            comp.insert((c.outer_arity, c.slot, c.inner_arity, c.outer, c.inner), v);
        }
        let mut trans = HashMap::new();
        for t in &self.transpositions {
            let v = from_table_vec(&t.result)?;
            check_vec(&v, t.arity)?;
            trans.insert((t.arity, t.position, t.element), v);
        }
        let mut diff = HashMap::new();
        for d in &self.differential {
            let v = from_table_vec(&d.result)?;
            check_vec(&v, d.arity)?;
            diff.insert((d.arity, d.element), v);
        }
        let unit = from_table_vec(&self.unit)?;
        check_vec(&unit, 1)?;
        self.cache = Some(TableCache { comp, trans, diff, unit });
        Ok(())
    }

    fn cache(&self) -> &TableCache {
        self.cache.as_ref().expect("table cache built on construction")
    }

    pub fn filtration_level(&self, arity: usize, element: usize) -> Option<i64> {
        self.components.get(arity - 1)?.basis.get(element)?.filtration_level
    }
}

impl Operad for OperadTable {
    fn name(&self) -> String {
        self.name.clone()
    }
    fn max_arity(&self) -> usize {
        self.max_arity
    }
    fn dim(&self, arity: usize) -> usize {
        if arity == 0 {
            return 0;
        }
        self.components.get(arity - 1).map_or(0, |c| c.basis.len())
    }
    fn degree(&self, arity: usize, e: usize) -> i64 {
        self.components[arity - 1].basis[e].degree
    }
    fn basis_name(&self, arity: usize, e: usize) -> String {
        self.components[arity - 1].basis[e].name.clone()
    }
    fn unit(&self) -> SparseVec {
        self.cache().unit.clone()
    }
    fn compose(&self, n: usize, slot: usize, m: usize, a: usize, b: usize) -> SparseVec {
        self.cache().comp.get(&(n, slot, m, a, b)).cloned().unwrap_or_default()
    }
    fn act(&self, sigma: &Perm, a: usize) -> SparseVec {
        let n = sigma.len();
        let mut v = SparseVec::unit(a);
        // σ = s_{w0} s_{w1} ...; apply the rightmost generator first
        for &g in sigma.adjacent_word().iter().rev() {
            let mut next = SparseVec::new();
            for (i, x) in v.iter() {
                let img = self.cache().trans.get(&(n, g + 1, i)).cloned().unwrap_or_default();
                next.add_scaled(x, &img);
            }
            v = next;
        }
        v
    }
    fn differential(&self, arity: usize, a: usize) -> SparseVec {
        self.cache().diff.get(&(arity, a)).cloned().unwrap_or_default()
    }
}

/// Wraps an operad and negates one composition entry (test fixture for
/// the axiom checker).
pub struct SignFault<'a, O: Operad + ?Sized> {
    pub inner: &'a O,
    /// `(n, slot, m, a, b)`
    pub entry: (usize, usize, usize, usize, usize),
}

impl<O: Operad + ?Sized> Operad for SignFault<'_, O> {
    fn name(&self) -> String {
        format!("{} (faulty)", self.inner.name())
    }
    fn max_arity(&self) -> usize {
        self.inner.max_arity()
    }
    fn dim(&self, arity: usize) -> usize {
        self.inner.dim(arity)
    }
    fn degree(&self, arity: usize, e: usize) -> i64 {
        self.inner.degree(arity, e)
    }
    fn basis_name(&self, arity: usize, e: usize) -> String {
        self.inner.basis_name(arity, e)
    }
    fn unit(&self) -> SparseVec {
        self.inner.unit()
    }
    fn compose(&self, n: usize, slot: usize, m: usize, a: usize, b: usize) -> SparseVec {
        let v = self.inner.compose(n, slot, m, a, b);
        if (n, slot, m, a, b) == self.entry {
            v.scaled(&-Rational::one())
        } else {
            v
        }
    }
    fn act(&self, sigma: &Perm, a: usize) -> SparseVec {
        self.inner.act(sigma, a)
    }
    fn differential(&self, arity: usize, a: usize) -> SparseVec {
        self.inner.differential(arity, a)
    }
}

// ---------------------------------------------------------------- axioms

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Axiom {
    /// `(f∘_i g)∘_{j+m-1} h = (-1)^{|g||h|} (f∘_j h)∘_i g`, `i < j`.
    ParallelComposition,
    /// `(f∘_i g)∘_{i+j-1} h = f∘_i (g∘_j h)`.
    SequentialComposition,
    /// `(σ·f)∘_i(τ·g) = (σ∘_i τ)·(f∘_k g)`.
    Equivariance,
    /// `I∘_1 f = f = f∘_i I`.
    Unit,
    /// `∂(f∘_i g) = ∂f∘_i g + (-1)^{|f|} f∘_i ∂g` and `∂` commutes with the action.
    Differential,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub axiom: Axiom,
    /// Arities of the elements involved.
    pub arities: Vec<usize>,
    /// Basis indices of the elements involved.
    pub elements: Vec<usize>,
    /// Slots / permutations, human readable.
    pub detail: String,
    /// Left side minus right side.
    pub defect: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub operad: String,
    pub max_arity: usize,
    pub checks: usize,
    pub violations: Vec<Violation>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Options for [`check_axioms_with`].
#[derive(Clone, Copy, Debug)]
pub struct AxiomOptions {
    /// Equivariance is checked for all `σ, τ` when the composite arity is at
    /// most this; otherwise only for adjacent transpositions, which generate.
    pub exhaustive_equivariance_arity: usize,
}

impl Default for AxiomOptions {
    fn default() -> Self {
        AxiomOptions {
            exhaustive_equivariance_arity: 4,
        }
    }
}

pub fn check_axioms<O: Operad + ?Sized>(op: &O, max_arity: usize) -> AxiomReport {
    check_axioms_with(op, max_arity, AxiomOptions::default())
}

/// Exhaustive verification of the operad axioms on basis elements for every
/// composite of arity at most `max_arity`.
pub fn check_axioms_with<O: Operad + ?Sized>(op: &O, max_arity: usize, opts: AxiomOptions) -> AxiomReport {
    let max_arity = max_arity.min(op.max_arity());
    let mut report = AxiomReport {
        operad: op.name(),
        max_arity,
        ..Default::default()
    };
    let record = |axiom: Axiom, arities: Vec<usize>, elements: Vec<usize>, detail: String, lhs: SparseVec, rhs: SparseVec, report: &mut AxiomReport| {
        report.checks += 1;
        if lhs != rhs {
            let mut defect = lhs;
            defect.add_scaled(&-Rational::one(), &rhs);
            report.violations.push(Violation {
                axiom,
                arities,
                elements,
                detail,
                defect: defect.to_string(),
            });
        }
    };

    // (1) and (2)
    for n in 1..=max_arity {
        for m in 1..=max_arity + 1 - n {
            for l in 1..=max_arity + 2 - n - m {
                for f in 0..op.dim(n) {
                    for g in 0..op.dim(m) {
                        let dg = op.degree(m, g);
                        for h in 0..op.dim(l) {
                            let dh = op.degree(l, h);
                            for i in 1..=n {
                                let fg = op.compose(n, i, m, f, g);
                                // parallel
                                for j in i + 1..=n {
                                    let lhs = compose_vec(op, n + m - 1, j + m - 1, l, &fg, &SparseVec::unit(h));
                                    let fh = op.compose(n, j, l, f, h);
                                    let rhs = compose_vec(op, n + l - 1, i, m, &fh, &SparseVec::unit(g)).scaled(&sign(dg * dh));
                                    record(Axiom::ParallelComposition, vec![n, m, l], vec![f, g, h], format!("i={i} j={j}"), lhs, rhs, &mut report);
                                }
                                // sequential
                                for j in 1..=m {
                                    let lhs = compose_vec(op, n + m - 1, i + j - 1, l, &fg, &SparseVec::unit(h));
                                    let gh = op.compose(m, j, l, g, h);
                                    let rhs = compose_vec(op, n, i, m + l - 1, &SparseVec::unit(f), &gh);
                                    record(Axiom::SequentialComposition, vec![n, m, l], vec![f, g, h], format!("i={i} j={j}"), lhs, rhs, &mut report);
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    // (3) equivariance
    for n in 1..=max_arity {
        for m in 1..=max_arity + 1 - n {
            let total = n + m - 1;
            let pairs: Vec<(Perm, Perm)> = if total <= opts.exhaustive_equivariance_arity {
                Perm::all(n)
                    .into_iter()
                    .flat_map(|s| Perm::all(m).into_iter().map(move |t| (s.clone(), t)))
                    .collect()
            } else {
                let mut v: Vec<(Perm, Perm)> = (0..n.saturating_sub(1)).map(|k| (Perm::adjacent(n, k), Perm::identity(m))).collect();
                v.extend((0..m.saturating_sub(1)).map(|k| (Perm::identity(n), Perm::adjacent(m, k))));
                v
            };
            for (sigma, tau) in &pairs {
                for f in 0..op.dim(n) {
                    let sf = op.act(sigma, f);
                    for g in 0..op.dim(m) {
                        let tg = op.act(tau, g);
                        for i in 0..n {
                            let lhs = compose_vec(op, n, i + 1, m, &sf, &tg);
                            let (pi, k) = block_permutation(sigma, i, tau);
                            let rhs = act_vec(op, &pi, &op.compose(n, k + 1, m, f, g));
                            record(Axiom::Equivariance, vec![n, m], vec![f, g], format!("σ={sigma} τ={tau} i={}", i + 1), lhs, rhs, &mut report);
                        }
                    }
                }
            }
        }
    }

    // (4) unit
    let unit = op.unit();
    for n in 1..=max_arity {
        for f in 0..op.dim(n) {
            let fv = SparseVec::unit(f);
            record(Axiom::Unit, vec![1, n], vec![f], "I∘_1 f".into(), compose_vec(op, 1, 1, n, &unit, &fv), fv.clone(), &mut report);
            for i in 1..=n {
                record(Axiom::Unit, vec![n, 1], vec![f], format!("f∘_{i} I"), compose_vec(op, n, i, 1, &fv, &unit), fv.clone(), &mut report);
            }
        }
    }

    // differential: derivation of ∘_i, equivariant
    for n in 1..=max_arity {
        for m in 1..=max_arity + 1 - n {
            for f in 0..op.dim(n) {
                let df = op.differential(n, f);
                let sf = sign(op.degree(n, f));
                for g in 0..op.dim(m) {
                    let dg = op.differential(m, g);
                    for i in 1..=n {
                        let lhs = differential_vec(op, n + m - 1, &op.compose(n, i, m, f, g));
                        let mut rhs = compose_vec(op, n, i, m, &df, &SparseVec::unit(g));
                        rhs.add_scaled(&sf, &compose_vec(op, n, i, m, &SparseVec::unit(f), &dg));
                        record(Axiom::Differential, vec![n, m], vec![f, g], format!("i={i}"), lhs, rhs, &mut report);
                    }
                }
            }
        }
        for k in 0..n.saturating_sub(1) {
            let s = Perm::adjacent(n, k);
            for f in 0..op.dim(n) {
                let lhs = differential_vec(op, n, &op.act(&s, f));
                let rhs = act_vec(op, &s, &op.differential(n, f));
                record(Axiom::Differential, vec![n], vec![f], format!("σ={s}"), lhs, rhs, &mut report);
            }
        }
    }
    report
}

// ---------------------------------------------------------------- free algebras

/// Trace of `σ` on `O(n)`.
pub fn character<O: Operad + ?Sized>(op: &O, sigma: &Perm) -> Rational {
    let n = sigma.len();
    let mut t = Rational::zero();
    for b in 0..op.dim(n) {
        t += op.act(sigma, b).get(b);
    }
    t
}

/// `dim (O(n) ⊗ V^{⊗n})_{S_n}` for `n = 1..=max_arity`, `dim V = d` (V in
/// degree zero).
///
/// The coinvariants are the image of the averaging projector
/// `P = (1/n!) Σ_σ σ ⊗ σ`; being idempotent, its rank equals its trace,
/// which is summed class by class as `|C_λ| · χ_O(σ_λ) · d^{ℓ(λ)}`.
pub fn free_algebra_dims<O: Operad + ?Sized>(op: &O, d: usize, max_arity: usize) -> Vec<u64> {
    (1..=max_arity.min(op.max_arity()))
        .map(|n| {
            let mut total = Rational::zero();
            for parts in partitions(n) {
                let rep = Perm::with_cycle_type(&parts);
                let chi = character(op, &rep);
                let v = Rational::from_integer((d as u128).pow(parts.len() as u32).into());
                total += chi * v * Rational::from_integer(class_size(&parts).into());
            }
            let dim = total / Rational::from_integer(factorial(n).into());
            assert!(dim.is_integer() && !dim.is_negative(), "projector trace must be a natural number");
            dim.to_integer().try_into().expect("dimension fits u64")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn assoc_examples() {
        let a = assoc_operad(4);
        assert_eq!((1..=4).map(|n| a.dim(n)).collect::<Vec<_>>(), vec![1, 2, 6, 24]);
        let id2 = a.index(&[0, 1]).unwrap();
        let r = a.compose(2, 1, 2, id2, id2);
        assert_eq!(a.basis_name(3, r.leading().unwrap().0), "x1x2x3");
        let sw = a.index(&[1, 0]).unwrap();
        let r = a.compose(2, 2, 2, sw, id2);
        assert_eq!(a.basis_name(3, r.leading().unwrap().0), "x2x3x1");
    }

    #[test]
    fn lie_examples() {
        let l = lie_operad(5);
        assert_eq!((1..=5).map(|n| l.dim(n)).collect::<Vec<_>>(), vec![1, 1, 2, 6, 24]);
        let r = l.compose(2, 1, 2, 0, 0);
        assert_eq!(r, SparseVec::unit(l.words.index[3][&vec![0, 1, 2]]));
        let r = l.compose(2, 2, 2, 0, 0);
        let a = l.words.index[3][&vec![0, 1, 2]];
        let b = l.words.index[3][&vec![0, 2, 1]];
        assert_eq!(r.get(a), q(1));
        assert_eq!(r.get(b), q(-1));
        assert_eq!(r.nnz(), 2);
    }

    #[test]
    fn jacobi_rewriting_matches_tensor_reading() {
        use LieBracket::*;
        let t = LieBracket::bracket(Letter(0), LieBracket::bracket(Letter(1), Letter(2)));
        let norm = t.normalize();
        assert_eq!(norm, BTreeMap::from([(vec![0, 1, 2], 1), (vec![0, 2, 1], -1)]));
        let l = lie_operad(3);
        let coords = l.coords_of_bracket(&t);
        assert_eq!(coords.get(l.words.index[3][&vec![0, 1, 2]]), q(1));
    }

    #[test]
    fn comm_examples() {
        let c = comm_operad(6);
        assert!((1..=6).all(|n| c.dim(n) == 1));
        assert_eq!(c.act(&Perm::adjacent(3, 1), 0), SparseVec::unit(0));
    }

    #[test]
    fn end_dims_and_unit() {
        let v = GradedSpace::trivial(2);
        let e = endomorphism_operad(v, 3).unwrap();
        assert_eq!(e.dim(2), 8);
        let u = e.unit();
        for f in 0..e.dim(2) {
            let fv = SparseVec::unit(f);
            assert_eq!(compose_vec(&e, 1, 1, 2, &u, &fv), fv);
            assert_eq!(compose_vec(&e, 2, 2, 1, &fv, &u), fv);
        }
        assert!(endomorphism_operad_dg(GradedSpace::trivial(4), SparseMatrix::zero(4, 4), 8, 1000).is_err());
    }

    #[test]
    fn free_dims_small() {
        assert_eq!(free_algebra_dims(&comm_operad(5), 1, 5), vec![1, 1, 1, 1, 1]);
        assert_eq!(free_algebra_dims(&assoc_operad(4), 2, 4), vec![2, 4, 8, 16]);
        assert_eq!(free_algebra_dims(&lie_operad(4), 2, 4), vec![2, 1, 2, 3]);
    }

    #[test]
    fn table_round_trip_preserves_structure() {
        let l = lie_operad(4);
        let t = OperadTable::from_operad(&l, 4, None);
        let back = OperadTable::from_json(&t.to_json()).unwrap();
        for s in Perm::all(4) {
            for b in 0..l.dim(4) {
                assert_eq!(back.act(&s, b), l.act(&s, b));
            }
        }
        assert_eq!(back.compose(2, 2, 3, 0, 1), l.compose(2, 2, 3, 0, 1));
    }
}
