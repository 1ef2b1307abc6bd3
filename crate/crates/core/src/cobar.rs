//! Co-operads and the cobar construction.
//!
//! Cocompositions are labeled by blocks: for a block `B` of inputs
//! (`2 <= |B| < n`), `Δ_B : K(n) → K(n-|B|+1) ⊗ K(|B|)`. The outer factor's
//! inputs are the complement of `B` together with `min B` (standing for the
//! whole block), in increasing order; the inner factor's inputs are `B` in
//! increasing order. This is the transpose of composing into the slot at
//! `min B` and relabeling, and it matches the way a tree vertex splits.
//!
//! The cobar complex of `K` in arity `n` has one piece per tree with `n`
//! leaves, decorated by `K(k)` at each vertex with `k` inputs, graded by the
//! number of internal edges. The differential splits one vertex, inserting
//! an edge; with edges ordered by their leaf masks, inserting an edge at
//! position `p` contributes `(-1)^p`.

use std::collections::{BTreeMap, HashMap};
use std::sync::OnceLock;

use num::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::operads::{word_name, Operad, WordIndex};
use crate::perm::{factorial, shuffles, Perm};
use crate::qlinalg::{format_rational, ChainComplex, Direction, Echelon, LinalgError, Rational, SparseMatrix, SparseVec};
use crate::treegraph::{enumerate_trees, Input, Tree};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CobarError {
    #[error("d∘d ≠ 0 in arity {arity}: {source}")]
    NotAComplex { arity: usize, source: LinalgError },
    #[error("arity {arity} exceeds the cooperad's bound {max}")]
    Arity { arity: usize, max: usize },
    #[error("only degree-zero cooperads are supported (arity {arity}, element {element})")]
    Graded { arity: usize, element: usize },
    #[error("unknown cooperad {0:?} (expected liec, asc or commc)")]
    Unknown(String),
    #[error("not a basis element of the cobar operad: {0}")]
    Basis(String),
}

/// Co-operad with finite-dimensional components in arities `1..=max_arity`.
/// Only the reduced part (arity `>= 2`) enters the cobar construction.
pub trait Cooperad {
    fn name(&self) -> String;
    fn max_arity(&self) -> usize;
    fn dim(&self, arity: usize) -> usize;
    fn degree(&self, _arity: usize, _element: usize) -> i64 {
        0
    }
    fn basis_name(&self, arity: usize, element: usize) -> String;
    /// `Δ_B(element)` as `(outer, inner, coefficient)` triples.
    fn cocompose(&self, arity: usize, block: u64, element: usize) -> Vec<(usize, usize, Rational)>;
    /// `σ · element`, relabeling input `j` as `σ(j)`.
    fn act(&self, sigma: &Perm, element: usize) -> SparseVec;
}

/// Outer labels of `Δ_B`: the complement of `block` plus `min block`, sorted.
pub fn outer_labels(arity: usize, block: u64) -> Vec<usize> {
    let min = block.trailing_zeros() as usize;
    (0..arity).filter(|&j| block >> j & 1 == 0 || j == min).collect()
}

pub fn block_labels(block: u64) -> Vec<usize> {
    (0..64).filter(|&j| block >> j & 1 == 1).collect()
}

/// Labeled composition `a ∘_B c`: `c` is inserted at the outer input
/// standing for `min B`, then inputs are relabeled so that the inner ones
/// become `B`.
pub fn labeled_compose<O: Operad + ?Sized>(op: &O, arity: usize, block: u64, a: usize, c: usize) -> SparseVec {
    let outer = outer_labels(arity, block);
    let inner = block_labels(block);
    let k = outer.iter().position(|&l| l == inner[0]).unwrap();
    let m = inner.len();
    let images: Vec<usize> = (0..arity)
        .map(|p| {
            if p < k {
                outer[p]
            } else if p < k + m {
                inner[p - k]
            } else {
                outer[p - m + 1]
            }
        })
        .collect();
    let composed = op.compose(outer.len(), k + 1, m, a, c);
    let pi = Perm::from_images(images);
    crate::operads::act_vec(op, &pi, &composed)
}

// ---------------------------------------------------------------- As^c

/// `As^c(n)`: multilinear words of the tensor coalgebra. `Δ_B(w)` is
/// nonzero only when the letters of `B` are adjacent in `w`; then the outer
/// word collapses them to `min B` and the inner word is the run itself.
#[derive(Clone, Debug)]
pub struct AsCooperad {
    max_arity: usize,
    words: WordIndex,
}

pub fn asc(max_arity: usize) -> AsCooperad {
    let max_arity = max_arity.max(1);
    AsCooperad {
        max_arity,
        words: WordIndex::new(max_arity, |_| true),
    }
}

fn relabel_by_rank(letters: &[u8], labels: &[usize]) -> Vec<u8> {
    letters
        .iter()
        .map(|&x| labels.binary_search(&(x as usize)).expect("letter among labels") as u8)
        .collect()
}

impl AsCooperad {
    pub fn word(&self, arity: usize, i: usize) -> &[u8] {
        &self.words.words[arity][i]
    }

    pub fn index(&self, w: &[u8]) -> usize {
        self.words.index[w.len()][w]
    }

    /// `Δ_B` on a word, as `(outer word, inner word)` if `B` is a run.
    pub fn split_word(w: &[u8], block: u64) -> Option<(Vec<u8>, Vec<u8>)> {
        let n = w.len();
        let pos: Vec<usize> = (0..n).filter(|&p| block >> w[p] & 1 == 1).collect();
        let (start, end) = (pos[0], *pos.last().unwrap());
        if end - start + 1 != pos.len() {
            return None;
        }
        let min = block.trailing_zeros() as u8;
        let mut outer: Vec<u8> = w[..start].to_vec();
        outer.push(min);
        outer.extend(&w[end + 1..]);
        let outer = relabel_by_rank(&outer, &outer_labels(n, block));
        let inner = relabel_by_rank(&w[start..=end], &block_labels(block));
        Some((outer, inner))
    }
}

impl Cooperad for AsCooperad {
    fn name(&self) -> String {
        "As^c".into()
    }
    fn max_arity(&self) -> usize {
        self.max_arity
    }
    fn dim(&self, arity: usize) -> usize {
        self.words.words.get(arity).map_or(0, Vec::len)
    }
    fn basis_name(&self, arity: usize, i: usize) -> String {
        word_name(self.word(arity, i))
    }
    fn cocompose(&self, arity: usize, block: u64, i: usize) -> Vec<(usize, usize, Rational)> {
        match AsCooperad::split_word(self.word(arity, i), block) {
            Some((o, inner)) => vec![(self.index(&o), self.index(&inner), Rational::one())],
            None => vec![],
        }
    }
    fn act(&self, sigma: &Perm, i: usize) -> SparseVec {
        let w: Vec<u8> = self.word(sigma.len(), i).iter().map(|&x| sigma.apply(x as usize) as u8).collect();
        SparseVec::unit(self.index(&w))
    }
}

// ---------------------------------------------------------------- shuffles

/// One term of a shuffle sum: `order[t]` is the input placed at position
/// `t`; `crossings` lists the pairs `(a, b)`, `a` from the first block and
/// `b` from the second, that end up with `b` before `a`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShuffleTerm {
    pub order: Vec<usize>,
    pub crossings: Vec<(usize, usize)>,
}

impl ShuffleTerm {
    /// Koszul sign `∏ (-1)^{(|x_a|+1)(|x_b|+1)}` over crossings, for the
    /// given unshifted degrees.
    pub fn shifted_sign(&self, degrees: &[i64]) -> i64 {
        let odd = self
            .crossings
            .iter()
            .filter(|&&(a, b)| (degrees[a] + 1).rem_euclid(2) == 1 && (degrees[b] + 1).rem_euclid(2) == 1)
            .count();
        if odd % 2 == 0 {
            1
        } else {
            -1
        }
    }
}

/// The `C(p+q, p)` shuffles of blocks `0..p` and `p..p+q`, with their sign
/// exponents recorded symbolically.
pub fn shuffle_sum(p: usize, q: usize) -> Vec<ShuffleTerm> {
    shuffles(p, q)
        .into_iter()
        .map(|order| {
            let mut crossings = Vec::new();
            for s in 0..order.len() {
                for t in s + 1..order.len() {
                    if order[s] >= p && order[t] < p {
                        crossings.push((order[t], order[s]));
                    }
                }
            }
            ShuffleTerm { order, crossings }
        })
        .collect()
}

/// Shuffle product of two words on disjoint letters (all signs `+`).
pub fn shuffle_words(u: &[u8], v: &[u8]) -> Vec<Vec<u8>> {
    let uv: Vec<u8> = u.iter().chain(v).copied().collect();
    shuffles(u.len(), v.len())
        .into_iter()
        .map(|order| order.iter().map(|&i| uv[i]).collect())
        .collect()
}

// ---------------------------------------------------------------- Lie^c

/// One arity of `Lie^c`: words modulo the span of shuffle products.
#[derive(Clone, Debug)]
pub struct LiecComponent {
    shuffles: Echelon,
    /// Word indices (in `As^c(n)`) of the representatives.
    reps: Vec<usize>,
    rep_of_word: HashMap<usize, usize>,
}

impl LiecComponent {
    fn build(asc: &AsCooperad, n: usize) -> LiecComponent {
        let total = factorial(n) as usize;
        let target = total - factorial(n - 1) as usize;
        let mut ech = Echelon::new();
        // u ш v = v ш u, so the block containing letter 0 may go first
        'outer: for size in 1..n {
            for mask in 1u64..(1 << n) - 1 {
                if mask & 1 == 0 || mask.count_ones() as usize != n - size {
                    continue;
                }
                let p: Vec<u8> = (0..n as u8).filter(|&j| mask >> j & 1 == 1).collect();
                let qs: Vec<u8> = (0..n as u8).filter(|&j| mask >> j & 1 == 0).collect();
                for su in Perm::all(p.len()) {
                    let u: Vec<u8> = su.images().iter().map(|&i| p[i]).collect();
                    for sv in Perm::all(qs.len()) {
                        let v: Vec<u8> = sv.images().iter().map(|&i| qs[i]).collect();
                        let mut vec = SparseVec::new();
                        for w in shuffle_words(&u, &v) {
                            vec.add_at(asc.index(&w), &Rational::one());
                        }
                        ech.insert(&vec);
                        if ech.dim() == target {
                            break 'outer;
                        }
                    }
                }
            }
        }
        let reps: Vec<usize> = (0..total).filter(|&c| !ech.is_pivot(c)).collect();
        let rep_of_word = reps.iter().enumerate().map(|(i, &w)| (w, i)).collect();
        LiecComponent {
            shuffles: ech,
            reps,
            rep_of_word,
        }
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    /// Rank of the shuffle span inside `As^c(n)`.
    pub fn shuffle_rank(&self) -> usize {
        self.shuffles.dim()
    }

    /// Coordinates of the class of a vector of `As^c(n)`.
    pub fn coords(&self, v: &SparseVec) -> SparseVec {
        let r = self.shuffles.reduce(v);
        r.iter().map(|(c, x)| (self.rep_of_word[&c], x.clone())).collect()
    }

    /// Whether `v` lies in the span of shuffle products.
    pub fn is_shuffle(&self, v: &SparseVec) -> bool {
        self.shuffles.contains(v)
    }

    /// Word index of the representative of basis element `i`.
    pub fn representative(&self, i: usize) -> usize {
        self.reps[i]
    }
}

/// `Lie^c(n)`: the indecomposables of the tensor coalgebra, i.e. multilinear
/// words modulo the image of the shuffle product. Basis: classes of the
/// words that are not pivots of the reduced shuffle span. Components are
/// built on first use.
#[derive(Debug)]
pub struct LieCooperad {
    asc: AsCooperad,
    comps: Vec<OnceLock<LiecComponent>>,
}

pub fn liec(max_arity: usize) -> LieCooperad {
    let asc = asc(max_arity);
    LieCooperad {
        comps: (0..=asc.max_arity).map(|_| OnceLock::new()).collect(),
        asc,
    }
}

impl LieCooperad {
    pub fn component(&self, n: usize) -> &LiecComponent {
        self.comps[n].get_or_init(|| LiecComponent::build(&self.asc, n))
    }

    pub fn asc(&self) -> &AsCooperad {
        &self.asc
    }

    /// Class of a single word.
    pub fn class_of_word(&self, w: &[u8]) -> SparseVec {
        self.component(w.len()).coords(&SparseVec::unit(self.asc.index(w)))
    }

    /// Representative word of basis element `i`.
    pub fn representative(&self, n: usize, i: usize) -> &[u8] {
        self.asc.word(n, self.component(n).representative(i))
    }
}

impl Cooperad for LieCooperad {
    fn name(&self) -> String {
        "Lie^c".into()
    }
    fn max_arity(&self) -> usize {
        self.asc.max_arity
    }
    fn dim(&self, arity: usize) -> usize {
        if arity == 0 || arity > self.max_arity() {
            return 0;
        }
        self.component(arity).dim()
    }
    fn basis_name(&self, arity: usize, i: usize) -> String {
        format!("[{}]", word_name(self.representative(arity, i)))
    }
    fn cocompose(&self, arity: usize, block: u64, i: usize) -> Vec<(usize, usize, Rational)> {
        let w = self.representative(arity, i);
        let Some((o, inner)) = AsCooperad::split_word(w, block) else {
            return vec![];
        };
        let co = self.class_of_word(&o);
        let ci = self.class_of_word(&inner);
        let mut out = Vec::new();
        for (a, x) in co.iter() {
            for (b, y) in ci.iter() {
                out.push((a, b, x * y));
            }
        }
        out
    }
    fn act(&self, sigma: &Perm, i: usize) -> SparseVec {
        let w: Vec<u8> = self.representative(sigma.len(), i).iter().map(|&x| sigma.apply(x as usize) as u8).collect();
        self.class_of_word(&w)
    }
}

// ---------------------------------------------------------------- duals

/// Linear dual of a finite-type operad: `Δ_B(b*) = Σ ⟨b, a ∘_B c⟩ a* ⊗ c*`.
pub struct DualCooperad<'a, O: Operad + ?Sized> {
    op: &'a O,
    table: HashMap<(usize, u64, usize), Vec<(usize, usize, Rational)>>,
}

/// Dualises `op` up to its maximal arity.
pub fn dualize<O: Operad + ?Sized>(op: &O) -> DualCooperad<'_, O> {
    let mut table: HashMap<(usize, u64, usize), Vec<(usize, usize, Rational)>> = HashMap::new();
    for n in 3..=op.max_arity() {
        for block in 1u64..(1 << n) - 1 {
            let size = block.count_ones() as usize;
            if size < 2 {
                continue;
            }
            let outer_arity = n - size + 1;
            for a in 0..op.dim(outer_arity) {
                for c in 0..op.dim(size) {
                    for (b, x) in labeled_compose(op, n, block, a, c).iter() {
                        table.entry((n, block, b)).or_default().push((a, c, x.clone()));
                    }
                }
            }
        }
    }
    DualCooperad { op, table }
}

impl<O: Operad + ?Sized> Cooperad for DualCooperad<'_, O> {
    fn name(&self) -> String {
        format!("{}^c", self.op.name())
    }
    fn max_arity(&self) -> usize {
        self.op.max_arity()
    }
    fn dim(&self, arity: usize) -> usize {
        self.op.dim(arity)
    }
    fn degree(&self, arity: usize, i: usize) -> i64 {
        -self.op.degree(arity, i)
    }
    fn basis_name(&self, arity: usize, i: usize) -> String {
        format!("{}*", self.op.basis_name(arity, i))
    }
    fn cocompose(&self, arity: usize, block: u64, i: usize) -> Vec<(usize, usize, Rational)> {
        self.table.get(&(arity, block, i)).cloned().unwrap_or_default()
    }
    /// Contragredient: `(σ·φ)(x) = φ(σ^{-1}·x)`.
    fn act(&self, sigma: &Perm, i: usize) -> SparseVec {
        let inv = sigma.inverse();
        let n = sigma.len();
        let mut out = SparseVec::new();
        for b in 0..self.op.dim(n) {
            let x = self.op.act(&inv, b).get(i);
            if !x.is_zero() {
                out.add_at(b, &x);
            }
        }
        out
    }
}

/// `Comm^c(n)`, one-dimensional in every arity.
#[derive(Clone, Debug)]
pub struct CommCooperad {
    max_arity: usize,
}

pub fn commc(max_arity: usize) -> CommCooperad {
    CommCooperad {
        max_arity: max_arity.max(1),
    }
}

impl Cooperad for CommCooperad {
    fn name(&self) -> String {
        "Comm^c".into()
    }
    fn max_arity(&self) -> usize {
        self.max_arity
    }
    fn dim(&self, arity: usize) -> usize {
        usize::from(arity >= 1 && arity <= self.max_arity)
    }
    fn basis_name(&self, arity: usize, _: usize) -> String {
        format!("{}*", (1..=arity).map(|i| format!("x{i}")).collect::<String>())
    }
    fn cocompose(&self, _: usize, _: u64, _: usize) -> Vec<(usize, usize, Rational)> {
        vec![(0, 0, Rational::one())]
    }
    fn act(&self, _: &Perm, _: usize) -> SparseVec {
        SparseVec::unit(0)
    }
}

/// `liec`, `asc` or `commc`.
pub fn cooperad_by_name(name: &str, max_arity: usize) -> Result<Box<dyn Cooperad + Send + Sync>, CobarError> {
    match name.to_ascii_lowercase().replace(['^', '_', '-'], "").as_str() {
        "liec" => Ok(Box::new(liec(max_arity))),
        "asc" => Ok(Box::new(asc(max_arity))),
        "commc" => Ok(Box::new(commc(max_arity))),
        _ => Err(CobarError::Unknown(name.into())),
    }
}

// ---------------------------------------------------------------- cobar complex

/// Sign rule of the cobar differential.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignConvention {
    /// Inserting the edge at position `p` (edges ordered by leaf mask)
    /// contributes `(-1)^p`.
    EdgeOrdering,
    /// Every term `+1`. Deliberately wrong; used to exercise the `d∘d = 0`
    /// check.
    Unsigned,
}

/// Arities of the vertices of `tree`, in block order.
pub fn vertex_arities(tree: &Tree) -> Vec<usize> {
    tree.blocks().iter().map(|&b| tree.inputs(b).len()).collect()
}

/// Dimension of the piece of `tree`: `∏_v dim K(n(v))`.
pub fn piece_dim<K: Cooperad + ?Sized>(k: &K, tree: &Tree) -> usize {
    vertex_arities(tree).iter().map(|&a| k.dim(a)).product()
}

fn decode_decorations(radices: &[usize], mut idx: usize) -> Vec<usize> {
    let mut out = vec![0; radices.len()];
    for j in (0..radices.len()).rev() {
        out[j] = idx % radices[j];
        idx /= radices[j];
    }
    out
}

fn encode_decorations(radices: &[usize], decs: &[usize]) -> usize {
    decs.iter().zip(radices).fold(0, |acc, (&d, &r)| acc * r + d)
}

fn parity_sign(odd: bool) -> Rational {
    if odd {
        -Rational::one()
    } else {
        Rational::one()
    }
}

/// Sign of sorting `keys` when every item is odd.
fn sorting_sign(keys: &[u64]) -> Rational {
    let mut inv = 0usize;
    for a in 0..keys.len() {
        for b in a + 1..keys.len() {
            if keys[a] > keys[b] {
                inv += 1;
            }
        }
    }
    parity_sign(inv % 2 == 1)
}

/// Terms of the cobar differential applied to a decorated tree:
/// `(tree with one more edge, decorations, coefficient)`.
pub fn split_terms<K: Cooperad + ?Sized>(
    k: &K,
    tree: &Tree,
    decs: &[usize],
    convention: SignConvention,
) -> Vec<(Tree, Vec<usize>, Rational)> {
    let mut out = Vec::new();
    let blocks = tree.blocks();
    for (j, &v) in blocks.iter().enumerate() {
        let ins = tree.inputs(v);
        let arity = ins.len();
        for sel in 1u64..(1 << arity) - 1 {
            if sel.count_ones() < 2 {
                continue;
            }
            let b = block_labels(sel).iter().fold(0u64, |acc, &p| acc | ins[p].mask());
            let mut new_blocks = blocks.to_vec();
            new_blocks.push(b);
            let t2 = Tree::from_blocks(tree.arity(), new_blocks).expect("split of a vertex is a tree");
            let p = t2.blocks().iter().position(|&x| x == b).unwrap();
            let sign = match convention {
                SignConvention::EdgeOrdering => parity_sign(p % 2 == 1),
                SignConvention::Unsigned => Rational::one(),
            };
            for (o, i, c) in k.cocompose(arity, sel, decs[j]) {
                let new_decs: Vec<usize> = t2
                    .blocks()
                    .iter()
                    .map(|&x| {
                        if x == v {
                            o
                        } else if x == b {
                            i
                        } else {
                            decs[blocks.iter().position(|&y| y == x).unwrap()]
                        }
                    })
                    .collect();
                out.push((t2.clone(), new_decs, &sign * c));
            }
        }
    }
    out
}

fn trees_of_arity(n: usize) -> Vec<Vec<Tree>> {
    if n == 1 {
        return vec![vec![Tree::unit()]];
    }
    (0..=n - 2).map(|e| enumerate_trees(n, e)).collect()
}

/// `dim Cobar(K)(n)` by internal-edge count, from the tree census alone.
pub fn cobar_dims<K: Cooperad + ?Sized>(k: &K, n: usize) -> Vec<usize> {
    trees_of_arity(n)
        .iter()
        .map(|ts| ts.iter().map(|t| piece_dim(k, t)).sum())
        .collect()
}

/// The cobar complex of a co-operad in one arity, graded by internal edges.
#[derive(Clone, Debug)]
pub struct CobarComplex {
    arity: usize,
    cooperad: String,
    convention: SignConvention,
    trees: Vec<Vec<Tree>>,
    radices: Vec<Vec<Vec<usize>>>,
    offsets: Vec<Vec<usize>>,
    complex: ChainComplex,
}

fn check_degree_zero<K: Cooperad + ?Sized>(k: &K, n: usize) -> Result<(), CobarError> {
    for a in 2..=n {
        for e in 0..k.dim(a) {
            if k.degree(a, e) != 0 {
                return Err(CobarError::Graded { arity: a, element: e });
            }
        }
    }
    Ok(())
}

pub fn cobar_complex<K: Cooperad + ?Sized>(k: &K, n: usize) -> Result<CobarComplex, CobarError> {
    cobar_complex_with(k, n, SignConvention::EdgeOrdering)
}

/// Builds the complex and verifies `d∘d = 0`.
pub fn cobar_complex_with<K: Cooperad + ?Sized>(k: &K, n: usize, convention: SignConvention) -> Result<CobarComplex, CobarError> {
    if n == 0 || n > k.max_arity() {
        return Err(CobarError::Arity {
            arity: n,
            max: k.max_arity(),
        });
    }
    check_degree_zero(k, n)?;
    let trees = trees_of_arity(n);
    let mut radices = Vec::new();
    let mut offsets = Vec::new();
    let mut dims = Vec::new();
    let mut index: HashMap<Tree, (usize, usize)> = HashMap::new();
    for ts in &trees {
        let mut off = 0;
        let mut rs = Vec::new();
        let mut os = Vec::new();
        for (ti, t) in ts.iter().enumerate() {
            let r: Vec<usize> = vertex_arities(t).iter().map(|&a| k.dim(a)).collect();
            index.insert(t.clone(), (ti, off));
            os.push(off);
            off += r.iter().product::<usize>();
            rs.push(r);
        }
        radices.push(rs);
        offsets.push(os);
        dims.push(off);
    }
    let mut maps = Vec::new();
    for e in 0..trees.len().saturating_sub(1) {
        let mut entries: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
        for (ti, t) in trees[e].iter().enumerate() {
            let r = &radices[e][ti];
            let size: usize = r.iter().product();
            for local in 0..size {
                let decs = decode_decorations(r, local);
                let col = offsets[e][ti] + local;
                for (t2, d2, c) in split_terms(k, t, &decs, convention) {
                    let (t2i, off2) = index[&t2];
                    let row = off2 + encode_decorations(&radices[e + 1][t2i], &d2);
                    *entries.entry((row, col)).or_insert_with(Rational::zero) += c;
                }
            }
        }
        let triples: Vec<_> = entries.into_iter().filter(|(_, x)| !x.is_zero()).map(|((r, c), x)| (r, c, x)).collect();
        maps.push(SparseMatrix::from_triples(dims[e + 1], dims[e], triples).expect("indices in range"));
    }
    let complex = ChainComplex::with_direction(dims, maps, Direction::Raising)
        .map_err(|source| CobarError::NotAComplex { arity: n, source })?;
    Ok(CobarComplex {
        arity: n,
        cooperad: k.name(),
        convention,
        trees,
        radices,
        offsets,
        complex,
    })
}

/// Homology of [`cobar_complex`] by internal-edge count.
pub fn cobar_homology<K: Cooperad + ?Sized>(k: &K, n: usize) -> Result<Vec<usize>, CobarError> {
    Ok(cobar_complex(k, n)?.homology())
}

impl CobarComplex {
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn cooperad(&self) -> &str {
        &self.cooperad
    }

    pub fn convention(&self) -> SignConvention {
        self.convention
    }

    /// Dimensions by internal-edge count.
    pub fn dims(&self) -> &[usize] {
        self.complex.dims()
    }

    /// `d_e : C_e → C_{e+1}`.
    pub fn differential(&self, e: usize) -> &SparseMatrix {
        &self.complex.maps()[e]
    }

    pub fn chain_complex(&self) -> &ChainComplex {
        &self.complex
    }

    pub fn homology(&self) -> Vec<usize> {
        self.complex.homology()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.complex.euler_characteristic()
    }

    pub fn trees(&self, e: usize) -> &[Tree] {
        &self.trees[e]
    }

    /// Tree and vertex decorations of basis element `idx` in degree `e`.
    pub fn basis_element(&self, e: usize, idx: usize) -> (Tree, Vec<usize>) {
        let ti = match self.offsets[e].binary_search(&idx) {
            Ok(i) => {
                // skip empty pieces sharing this offset
                let mut i = i;
                while i + 1 < self.offsets[e].len() && self.offsets[e][i + 1] == idx {
                    i += 1;
                }
                i
            }
            Err(i) => i - 1,
        };
        let local = idx - self.offsets[e][ti];
        (self.trees[e][ti].clone(), decode_decorations(&self.radices[e][ti], local))
    }

    pub fn to_file(&self) -> CobarComplexFile {
        CobarComplexFile {
            format_version: 1,
            cooperad: self.cooperad.clone(),
            arity: self.arity,
            convention: self.convention,
            dims: self.dims().to_vec(),
            trees: self
                .trees
                .iter()
                .enumerate()
                .map(|(e, ts)| {
                    ts.iter()
                        .enumerate()
                        .map(|(ti, t)| TreePiece {
                            tree: t.to_string(),
                            offset: self.offsets[e][ti],
                            dim: self.radices[e][ti].iter().product(),
                        })
                        .collect()
                })
                .collect(),
            differentials: self
                .complex
                .maps()
                .iter()
                .enumerate()
                .map(|(e, m)| MatrixFile {
                    from_degree: e,
                    rows: m.rows(),
                    cols: m.cols(),
                    entries: m.triples().map(|(r, c, x)| (r, c, format_rational(x))).collect(),
                })
                .collect(),
            homology: self.homology(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreePiece {
    pub tree: String,
    pub offset: usize,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub from_degree: usize,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<(usize, usize, String)>,
}

/// JSON form of a [`CobarComplex`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CobarComplexFile {
    pub format_version: u32,
    pub cooperad: String,
    pub arity: usize,
    pub convention: SignConvention,
    pub dims: Vec<usize>,
    /// Pieces by internal-edge count.
    pub trees: Vec<Vec<TreePiece>>,
    pub differentials: Vec<MatrixFile>,
    pub homology: Vec<usize>,
}

// ---------------------------------------------------------------- cobar operad

/// `Cobar(K)` as a dg operad: basis elements are decorated trees; vertices
/// behave as odd generators (degree `-1` each), composition grafts trees
/// and the differential is the cobar differential.
pub struct CobarOperad<'a, K: Cooperad + ?Sized> {
    k: &'a K,
    max_arity: usize,
    basis: Vec<Vec<(Tree, Vec<usize>)>>,
    index: Vec<HashMap<(Tree, Vec<usize>), usize>>,
}

pub fn cobar_operad<K: Cooperad + ?Sized>(k: &K, max_arity: usize) -> Result<CobarOperad<'_, K>, CobarError> {
    let max_arity = max_arity.min(k.max_arity()).max(1);
    check_degree_zero(k, max_arity)?;
    let mut basis = vec![vec![]];
    let mut index = vec![HashMap::new()];
    for n in 1..=max_arity {
        let mut b = Vec::new();
        for ts in trees_of_arity(n) {
            for t in ts {
                let r: Vec<usize> = vertex_arities(&t).iter().map(|&a| k.dim(a)).collect();
                for local in 0..r.iter().product::<usize>() {
                    b.push((t.clone(), decode_decorations(&r, local)));
                }
            }
        }
        index.push(b.iter().cloned().enumerate().map(|(i, x)| (x, i)).collect());
        basis.push(b);
    }
    Ok(CobarOperad {
        k,
        max_arity,
        basis,
        index,
    })
}

impl<K: Cooperad + ?Sized> CobarOperad<'_, K> {
    pub fn element(&self, arity: usize, i: usize) -> &(Tree, Vec<usize>) {
        &self.basis[arity][i]
    }

    pub fn index_of(&self, tree: &Tree, decs: &[usize]) -> Result<usize, CobarError> {
        self.index
            .get(tree.arity())
            .and_then(|m| m.get(&(tree.clone(), decs.to_vec())))
            .copied()
            .ok_or_else(|| CobarError::Basis(format!("{tree} {decs:?}")))
    }

    /// Decorated-tree grafting, the composition of [`Operad::compose`].
    pub fn graft(&self, t1: &Tree, d1: &[usize], slot: usize, t2: &Tree, d2: &[usize]) -> (Tree, Vec<usize>, Rational) {
        let i = slot - 1;
        let m = t2.arity();
        let low = (1u64 << i) - 1;
        let inner_range = ((1u64 << m) - 1) << i;
        let remap = |b: u64| -> u64 {
            let hit = if b >> i & 1 == 1 { inner_range } else { 0 };
            (b & low) | ((b >> (i + 1)) << (i + m)) | hit
        };
        let t = t1.graft(slot, t2).expect("slot in range");
        let keys: Vec<u64> = t1.blocks().iter().map(|&b| remap(b)).chain(t2.blocks().iter().map(|&b| b << i)).collect();
        let decs_all: Vec<usize> = d1.iter().chain(d2).copied().collect();
        let decs: Vec<usize> = t
            .blocks()
            .iter()
            .map(|b| decs_all[keys.iter().position(|k| k == b).unwrap()])
            .collect();
        (t, decs, sorting_sign(&keys))
    }
}

impl<K: Cooperad + ?Sized> Operad for CobarOperad<'_, K> {
    fn name(&self) -> String {
        format!("Cobar {}", self.k.name())
    }
    fn max_arity(&self) -> usize {
        self.max_arity
    }
    fn dim(&self, arity: usize) -> usize {
        self.basis.get(arity).map_or(0, Vec::len)
    }
    fn degree(&self, arity: usize, i: usize) -> i64 {
        -(self.basis[arity][i].0.vertex_count() as i64)
    }
    fn basis_name(&self, arity: usize, i: usize) -> String {
        let (t, d) = &self.basis[arity][i];
        let arities = vertex_arities(t);
        let decs: Vec<String> = d.iter().zip(&arities).map(|(&x, &a)| self.k.basis_name(a, x)).collect();
        if decs.is_empty() {
            t.to_string()
        } else {
            format!("{t}|{}", decs.join("|"))
        }
    }
    fn unit(&self) -> SparseVec {
        SparseVec::unit(0)
    }
    fn compose(&self, n: usize, slot: usize, m: usize, a: usize, b: usize) -> SparseVec {
        let (t1, d1) = &self.basis[n][a];
        let (t2, d2) = &self.basis[m][b];
        let (t, d, s) = self.graft(t1, d1, slot, t2, d2);
        let mut v = SparseVec::new();
        v.add_at(self.index[n + m - 1][&(t, d)], &s);
        v
    }
    fn act(&self, sigma: &Perm, a: usize) -> SparseVec {
        let n = sigma.len();
        let (t, d) = &self.basis[n][a];
        let map = |b: u64| block_labels(b).iter().fold(0u64, |acc, &j| acc | 1 << sigma.apply(j));
        let t2 = t.relabel(sigma);
        let keys: Vec<u64> = t.blocks().iter().map(|&b| map(b)).collect();
        let sign = sorting_sign(&keys);
        // decoration vectors, indexed by position in t2's block order
        let mut factors: Vec<SparseVec> = vec![SparseVec::new(); keys.len()];
        for (j, &v) in t.blocks().iter().enumerate() {
            let ins = t.inputs(v);
            let new_ins = t2.inputs(keys[j]);
            let images: Vec<usize> = ins
                .iter()
                .map(|inp| {
                    let img = match *inp {
                        Input::Leaf(l) => 1u64 << sigma.apply(l),
                        Input::Vertex(b) => map(b),
                    };
                    new_ins.iter().position(|x| x.mask() == img).unwrap()
                })
                .collect();
            let tau = Perm::from_images(images);
            let pos = t2.blocks().iter().position(|&x| x == keys[j]).unwrap();
            factors[pos] = self.k.act(&tau, d[j]);
        }
        let mut terms: Vec<(Vec<usize>, Rational)> = vec![(vec![], sign)];
        for f in &factors {
            let mut next = Vec::new();
            for (decs, c) in &terms {
                for (x, y) in f.iter() {
                    let mut d2 = decs.clone();
                    d2.push(x);
                    next.push((d2, c * y));
                }
            }
            terms = next;
        }
        let mut out = SparseVec::new();
        for (decs, c) in terms {
            out.add_at(self.index[n][&(t2.clone(), decs)], &c);
        }
        out
    }
    fn differential(&self, arity: usize, a: usize) -> SparseVec {
        let (t, d) = &self.basis[arity][a];
        let mut out = SparseVec::new();
        for (t2, d2, c) in split_terms(self.k, t, d, SignConvention::EdgeOrdering) {
            out.add_at(self.index[arity][&(t2, d2)], &c);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn liec_small() {
        let l = liec(4);
        assert_eq!((2..=4).map(|n| l.dim(n)).collect::<Vec<_>>(), vec![1, 2, 6]);
        let c = l.component(2);
        let mut v = SparseVec::unit(l.asc().index(&[0, 1]));
        v.add_at(l.asc().index(&[1, 0]), &Rational::one());
        assert!(c.is_shuffle(&v));
        assert_eq!(l.component(3).shuffle_rank(), 4);
    }

    #[test]
    fn shuffle_sums() {
        assert_eq!(shuffle_sum(1, 1).len(), 2);
        assert_eq!(shuffle_sum(1, 2).len(), 3);
        assert_eq!(shuffle_sum(2, 2).len(), 6);
        let t = &shuffle_sum(1, 1)[1];
        assert_eq!(t.order, vec![1, 0]);
        assert_eq!(t.shifted_sign(&[0, 0]), -1);
        assert_eq!(t.shifted_sign(&[1, 0]), 1);
    }

    #[test]
    fn cobar_examples() {
        let l = liec(3);
        let c2 = cobar_complex(&l, 2).unwrap();
        assert_eq!(c2.dims(), &[1]);
        let c3 = cobar_complex(&l, 3).unwrap();
        assert_eq!(c3.dims(), &[2, 3]);
        assert_eq!(crate::qlinalg::rank(c3.differential(0)), 2);
        assert_eq!(c3.homology(), vec![0, 1]);
        let a = asc(3);
        assert_eq!(cobar_complex(&a, 3).unwrap().dims(), &[6, 12]);
    }
}
