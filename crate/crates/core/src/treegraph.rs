//! Leaf-labeled rooted trees (genus-zero strata, cobar pieces) and stable
//! genus-labeled graphs (higher-genus strata).
//!
//! A tree of arity `n` is stored as the laminar family of leaf sets sitting
//! above each vertex: the root block is `{1..n}`, every other block is the
//! leaf set above an internal edge. Distinct blocks force every vertex to
//! have at least two inputs, and the block family is already a canonical
//! form, so tree equality ignores input order.
//!
//! ## Text encodings
//!
//! Trees print as nested parenthesised leaf lists, children ordered by their
//! smallest leaf: the corolla is `(1,2,3)`, a tree with `{1,2}` grafted into
//! the first input of a binary vertex is `((1,2),3)`. The arity-one unit tree
//! prints as `1`.
//!
//! Graphs print as `g=[..];legs=[..];edges=[(u,v),..]` where `g` lists
//! vertex genera, `legs[i]` is the vertex carrying leg `i+1`, and edges are
//! sorted pairs `u <= v` (a loop is `(v,v)`), in canonical vertex order.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::perm::Perm;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("slot {slot} out of range for arity {arity}")]
    SlotOutOfRange { slot: usize, arity: usize },
    #[error("block {0:#b} is not an internal edge")]
    NotInternal(u64),
    #[error("arity {0} not supported (need 1..=63)")]
    Arity(usize),
    #[error("cannot parse tree: {0}")]
    Parse(String),
    #[error("invalid block family: {0}")]
    Invalid(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("(g, n) = ({0}, {1}) is unstable: need 2g - 2 + n > 0")]
    Unstable(u32, usize),
    #[error("legs cannot be contracted (leg {0})")]
    ContractLeg(usize),
    #[error("no interior edge with index {0}")]
    NoSuchEdge(usize),
    #[error("invalid graph: {0}")]
    Invalid(String),
    #[error("cannot parse graph: {0}")]
    Parse(String),
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn leaves_of(mask: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| mask >> i & 1 == 1)
}

/// One input of a tree vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Input {
    /// Leaf with zero-based label.
    Leaf(usize),
    /// The vertex whose leaf set is this block.
    Vertex(u64),
}

impl Input {
    pub fn min_leaf(&self) -> usize {
        match *self {
            Input::Leaf(l) => l,
            Input::Vertex(b) => b.trailing_zeros() as usize,
        }
    }

    pub fn mask(&self) -> u64 {
        match *self {
            Input::Leaf(l) => 1 << l,
            Input::Vertex(b) => b,
        }
    }
}

/// Rooted tree with leaves labeled `1..=n`, every vertex with at least two
/// inputs. Blocks are kept sorted ascending; the root block is the full set.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tree {
    arity: usize,
    blocks: Vec<u64>,
}

impl Tree {
    /// Corolla `δ_n`.
    pub fn corolla(n: usize) -> Result<Tree, TreeError> {
        if !(2..=63).contains(&n) {
            return Err(TreeError::Arity(n));
        }
        Ok(Tree {
            arity: n,
            blocks: vec![full_mask(n)],
        })
    }

    /// The arity-one tree with no vertex (the unit of grafting).
    pub fn unit() -> Tree {
        Tree {
            arity: 1,
            blocks: vec![],
        }
    }

    /// Validates a block family (leaf labels zero-based bit positions).
    pub fn from_blocks(arity: usize, blocks: impl IntoIterator<Item = u64>) -> Result<Tree, TreeError> {
        if arity == 0 || arity > 63 {
            return Err(TreeError::Arity(arity));
        }
        let set: BTreeSet<u64> = blocks.into_iter().collect();
        let blocks: Vec<u64> = set.into_iter().collect();
        if arity == 1 {
            return if blocks.is_empty() {
                Ok(Tree::unit())
            } else {
                Err(TreeError::Invalid("arity-one tree has no vertex".into()))
            };
        }
        let full = full_mask(arity);
        if !blocks.contains(&full) {
            return Err(TreeError::Invalid("missing root block".into()));
        }
        for (i, &a) in blocks.iter().enumerate() {
            if a & !full != 0 || a.count_ones() < 2 {
                return Err(TreeError::Invalid(format!("bad block {a:#b}")));
            }
            for &b in &blocks[i + 1..] {
                let inter = a & b;
                if inter != 0 && inter != a && inter != b {
                    return Err(TreeError::Invalid(format!("blocks {a:#b} and {b:#b} overlap")));
                }
            }
        }
        Ok(Tree { arity, blocks })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn blocks(&self) -> &[u64] {
        &self.blocks
    }

    pub fn root(&self) -> Option<u64> {
        (self.arity >= 2).then(|| full_mask(self.arity))
    }

    /// Internal edges, identified with the leaf set above them.
    pub fn internal_edges(&self) -> Vec<u64> {
        let full = full_mask(self.arity);
        self.blocks.iter().copied().filter(|&b| b != full).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.blocks.len().saturating_sub(1)
    }

    pub fn vertex_count(&self) -> usize {
        self.blocks.len()
    }

    /// Inputs of the vertex with leaf set `block`, ordered by smallest leaf.
    pub fn inputs(&self, block: u64) -> Vec<Input> {
        // maximal proper sub-blocks
        let subs: Vec<u64> = self
            .blocks
            .iter()
            .copied()
            .filter(|&b| b != block && b & block == b)
            .collect();
        let maximal: Vec<u64> = subs
            .iter()
            .copied()
            .filter(|&b| !subs.iter().any(|&c| c != b && c & b == b))
            .collect();
        let covered = maximal.iter().fold(0u64, |acc, b| acc | b);
        let mut out: Vec<Input> = maximal.into_iter().map(Input::Vertex).collect();
        out.extend(leaves_of(block & !covered).map(Input::Leaf));
        out.sort_by_key(Input::min_leaf);
        out
    }

    /// Parent block of a non-root block.
    pub fn parent(&self, block: u64) -> Option<u64> {
        self.blocks
            .iter()
            .copied()
            .filter(|&b| b != block && b & block == block)
            .min_by_key(|b| b.count_ones())
    }

    /// Grafts `s` into leaf `slot` (one-based) of `self`. Leaves of `s` take
    /// labels `slot..slot+arity(s)-1`; leaves of `self` after `slot` shift up.
    pub fn graft(&self, slot: usize, s: &Tree) -> Result<Tree, TreeError> {
        if slot == 0 || slot > self.arity {
            return Err(TreeError::SlotOutOfRange {
                slot,
                arity: self.arity,
            });
        }
        let m = s.arity;
        let arity = self.arity + m - 1;
        if arity > 63 {
            return Err(TreeError::Arity(arity));
        }
        let i = slot - 1;
        let inner_range = full_mask(m) << i;
        let remap = |b: u64| -> u64 {
            let low = b & full_mask(i);
            let high = (b >> (i + 1)) << (i + m);
            let hit = if b >> i & 1 == 1 { inner_range } else { 0 };
            low | high | hit
        };
        let mut blocks: Vec<u64> = self.blocks.iter().map(|&b| remap(b)).collect();
        blocks.extend(s.blocks.iter().map(|&b| b << i));
        Tree::from_blocks(arity, blocks)
    }

    /// Removes the internal edge `edge` and merges its two vertices.
    pub fn contract_edge(&self, edge: u64) -> Result<Tree, TreeError> {
        if Some(edge) == self.root() || !self.blocks.contains(&edge) {
            return Err(TreeError::NotInternal(edge));
        }
        Ok(Tree {
            arity: self.arity,
            blocks: self.blocks.iter().copied().filter(|&b| b != edge).collect(),
        })
    }

    /// All trees obtained by inserting one internal edge.
    pub fn expansions(&self) -> Vec<(Tree, u64)> {
        let mut out = Vec::new();
        for &v in &self.blocks {
            let ins = self.inputs(v);
            let k = ins.len();
            if k < 3 {
                continue;
            }
            // proper subsets of the inputs with at least two elements
            for sel in 1u64..(1 << k) - 1 {
                if sel.count_ones() < 2 {
                    continue;
                }
                let b = leaves_of(sel).fold(0u64, |acc, j| acc | ins[j].mask());
                let mut blocks = self.blocks.clone();
                blocks.push(b);
                blocks.sort_unstable();
                out.push((
                    Tree {
                        arity: self.arity,
                        blocks,
                    },
                    b,
                ));
            }
        }
        out
    }

    /// Applies a leaf relabeling (`sigma` maps zero-based leaf `j` to `sigma(j)`).
    pub fn relabel(&self, sigma: &Perm) -> Tree {
        let map = |b: u64| leaves_of(b).fold(0u64, |acc, j| acc | 1 << sigma.apply(j));
        let mut blocks: Vec<u64> = self.blocks.iter().map(|&b| map(b)).collect();
        blocks.sort_unstable();
        Tree {
            arity: self.arity,
            blocks,
        }
    }

    fn write_block(&self, f: &mut fmt::Formatter<'_>, block: u64) -> fmt::Result {
        write!(f, "(")?;
        for (k, inp) in self.inputs(block).into_iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            match inp {
                Input::Leaf(l) => write!(f, "{}", l + 1)?,
                Input::Vertex(b) => self.write_block(f, b)?,
            }
        }
        write!(f, ")")
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.root() {
            None => write!(f, "1"),
            Some(r) => self.write_block(f, r),
        }
    }
}

impl FromStr for Tree {
    type Err = TreeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s == "1" {
            return Ok(Tree::unit());
        }
        let bytes = s.as_bytes();
        let mut pos = 0;
        let mut blocks = Vec::new();
        let mut leaves = 0u64;
        fn parse(
            b: &[u8],
            pos: &mut usize,
            blocks: &mut Vec<u64>,
            leaves: &mut u64,
        ) -> Result<u64, TreeError> {
            let err = |m: &str| TreeError::Parse(m.to_string());
            if *pos < b.len() && b[*pos] == b'(' {
                *pos += 1;
                let mut mask = 0u64;
                let mut count = 0;
                loop {
                    mask |= parse(b, pos, blocks, leaves)?;
                    count += 1;
                    match b.get(*pos) {
                        Some(b',') => *pos += 1,
                        Some(b')') => {
                            *pos += 1;
                            break;
                        }
                        _ => return Err(err("expected ',' or ')'")),
                    }
                }
                if count < 2 {
                    return Err(err("vertex with fewer than two inputs"));
                }
                blocks.push(mask);
                Ok(mask)
            } else {
                let start = *pos;
                while *pos < b.len() && b[*pos].is_ascii_digit() {
                    *pos += 1;
                }
                let num: usize = std::str::from_utf8(&b[start..*pos])
                    .unwrap()
                    .parse()
                    .map_err(|_| err("expected leaf number"))?;
                if num == 0 || num > 63 {
                    return Err(err("leaf label out of range"));
                }
                let bit = 1u64 << (num - 1);
                if *leaves & bit != 0 {
                    return Err(err("repeated leaf"));
                }
                *leaves |= bit;
                Ok(bit)
            }
        }
        let root = parse(bytes, &mut pos, &mut blocks, &mut leaves)?;
        if pos != bytes.len() {
            return Err(TreeError::Parse("trailing input".into()));
        }
        let n = leaves.count_ones() as usize;
        if root != full_mask(n) {
            return Err(TreeError::Parse("leaves must be exactly 1..n".into()));
        }
        Tree::from_blocks(n, blocks)
    }
}

/// All trees of arity `n` with exactly `e` internal edges, sorted.
///
/// Built by inserting one edge at a time into the corolla and
/// deduplicating; out-of-range `e` gives an empty list.
pub fn enumerate_trees(n: usize, e: usize) -> Vec<Tree> {
    if n == 1 {
        return if e == 0 { vec![Tree::unit()] } else { vec![] };
    }
    if !(2..=63).contains(&n) || e > n - 2 {
        return vec![];
    }
    let mut level: BTreeSet<Tree> = BTreeSet::new();
    level.insert(Tree::corolla(n).unwrap());
    for _ in 0..e {
        level = level
            .iter()
            .flat_map(|t| t.expansions().into_iter().map(|(t, _)| t))
            .collect();
    }
    level.into_iter().collect()
}

/// All trees of arity `n`, grouped by edge count.
pub fn enumerate_all_trees(n: usize) -> Vec<Vec<Tree>> {
    if n == 1 {
        return vec![vec![Tree::unit()]];
    }
    let mut out = Vec::new();
    let mut level: BTreeSet<Tree> = BTreeSet::new();
    level.insert(Tree::corolla(n).unwrap());
    while !level.is_empty() {
        let next: BTreeSet<Tree> = level
            .iter()
            .flat_map(|t| t.expansions().into_iter().map(|(t, _)| t))
            .collect();
        out.push(level.into_iter().collect());
        level = next;
    }
    out
}

/// Half-edge reference used by [`StableGraph::contract`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeRef {
    /// Exterior leg (zero-based).
    Leg(usize),
    /// Interior edge or loop (index into [`StableGraph::edges`]).
    Edge(usize),
}

/// Connected graph with genus-labeled vertices, `n` numbered legs, and
/// interior edges (loops allowed). Always held in canonical vertex order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StableGraph {
    genus: Vec<u32>,
    legs: Vec<usize>,
    edges: Vec<(usize, usize)>,
}

impl StableGraph {
    /// Builds, validates (connected, stable) and canonicalises a graph.
    pub fn new(genus: Vec<u32>, legs: Vec<usize>, edges: Vec<(usize, usize)>) -> Result<Self, GraphError> {
        let g = Self::raw(genus, legs, edges)?;
        if !g.is_connected() {
            return Err(GraphError::Invalid("graph is not connected".into()));
        }
        if !g.is_stable() {
            return Err(GraphError::Invalid("graph is not stable".into()));
        }
        Ok(g.canonical())
    }

    fn raw(genus: Vec<u32>, legs: Vec<usize>, edges: Vec<(usize, usize)>) -> Result<Self, GraphError> {
        let v = genus.len();
        if v == 0 {
            return Err(GraphError::Invalid("no vertices".into()));
        }
        if legs.iter().any(|&x| x >= v) || edges.iter().any(|&(a, b)| a >= v || b >= v) {
            return Err(GraphError::Invalid("vertex index out of range".into()));
        }
        let mut edges: Vec<(usize, usize)> = edges.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
        edges.sort_unstable();
        Ok(StableGraph { genus, legs, edges })
    }

    pub fn genus_labels(&self) -> &[u32] {
        &self.genus
    }

    pub fn legs(&self) -> &[usize] {
        &self.legs
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.genus.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn leg_count(&self) -> usize {
        self.legs.len()
    }

    /// Valence: legs plus edge ends, a loop counting twice.
    pub fn valence(&self, v: usize) -> usize {
        let legs = self.legs.iter().filter(|&&x| x == v).count();
        let ends: usize = self
            .edges
            .iter()
            .map(|&(a, b)| usize::from(a == v) + usize::from(b == v))
            .sum();
        legs + ends
    }

    /// First Betti number `edges - vertices + 1`.
    pub fn b1(&self) -> usize {
        self.edges.len() + 1 - self.genus.len()
    }

    /// `b_1(G) + Σ_v g(v)`.
    pub fn genus_invariant(&self) -> u32 {
        self.b1() as u32 + self.genus.iter().sum::<u32>()
    }

    pub fn is_stable(&self) -> bool {
        (0..self.genus.len()).all(|v| match self.genus[v] {
            0 => self.valence(v) >= 3,
            1 => self.valence(v) >= 1,
            _ => true,
        })
    }

    pub fn is_connected(&self) -> bool {
        let n = self.genus.len();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(a, b) in &self.edges {
                for (x, y) in [(a, b), (b, a)] {
                    if x == v && !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    fn relabeled(&self, p: &[usize]) -> StableGraph {
        // p[old] = new
        let mut genus = vec![0; self.genus.len()];
        for (old, &new) in p.iter().enumerate() {
            genus[new] = self.genus[old];
        }
        let legs = self.legs.iter().map(|&v| p[v]).collect();
        let mut edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|&(a, b)| (p[a].min(p[b]), p[a].max(p[b])))
            .collect();
        edges.sort_unstable();
        StableGraph { genus, legs, edges }
    }

    /// Minimal encoding over all vertex orderings.
    pub fn canonical(&self) -> StableGraph {
        Perm::all(self.genus.len())
            .into_iter()
            .map(|p| self.relabeled(p.images()))
            .min()
            .unwrap()
    }

    /// Contracts an interior edge: a loop raises its vertex genus by one,
    /// any other edge merges its endpoints adding their genera.
    pub fn contract(&self, edge: EdgeRef) -> Result<StableGraph, GraphError> {
        let k = match edge {
            EdgeRef::Leg(i) => return Err(GraphError::ContractLeg(i)),
            EdgeRef::Edge(k) if k >= self.edges.len() => return Err(GraphError::NoSuchEdge(k)),
            EdgeRef::Edge(k) => k,
        };
        let (a, b) = self.edges[k];
        let mut edges = self.edges.clone();
        edges.remove(k);
        if a == b {
            let mut genus = self.genus.clone();
            genus[a] += 1;
            return Ok(StableGraph::raw(genus, self.legs.clone(), edges)?.canonical());
        }
        // merge b into a, then drop b
        let idx = |v: usize| -> usize {
            let v = if v == b { a } else { v };
            if v > b {
                v - 1
            } else {
                v
            }
        };
        let mut genus = self.genus.clone();
        genus[a] += genus[b];
        genus.remove(b);
        let legs = self.legs.iter().map(|&v| idx(v)).collect();
        let edges = edges.into_iter().map(|(x, y)| (idx(x), idx(y))).collect();
        Ok(StableGraph::raw(genus, legs, edges)?.canonical())
    }

    /// The full automorphism group: vertex permutations fixing every leg and
    /// the genus labels, together with every compatible half-edge bijection.
    /// Half-edges of edge `k = (u, v)` are `2k` (at `u`) and `2k+1` (at `v`).
    pub fn automorphisms(&self) -> Vec<GraphAutomorphism> {
        let nv = self.genus.len();
        let mut out = Vec::new();
        for p in Perm::all(nv) {
            let p = p.images();
            if (0..nv).any(|v| self.genus[p[v]] != self.genus[v]) {
                continue;
            }
            if self.legs.iter().any(|&v| p[v] != v) {
                continue;
            }
            if self.relabeled(p).edges != self.edges {
                continue;
            }
            // For each edge, candidate targets are edges joining the image endpoints.
            let mut partial = vec![usize::MAX; 2 * self.edges.len()];
            let mut used = vec![false; self.edges.len()];
            self.extend_half_edges(p, 0, &mut partial, &mut used, &mut out);
        }
        out
    }

    fn extend_half_edges(
        &self,
        p: &[usize],
        k: usize,
        partial: &mut Vec<usize>,
        used: &mut Vec<bool>,
        out: &mut Vec<GraphAutomorphism>,
    ) {
        if k == self.edges.len() {
            out.push(GraphAutomorphism {
                vertex_perm: Perm::from_images(p.to_vec()),
                half_edge_perm: Perm::from_images(partial.clone()),
            });
            return;
        }
        let (u, v) = self.edges[k];
        let (pu, pv) = (p[u], p[v]);
        for t in 0..self.edges.len() {
            if used[t] {
                continue;
            }
            let (x, y) = self.edges[t];
            let mut orients = Vec::new();
            if (x, y) == (pu, pv) {
                orients.push((2 * t, 2 * t + 1));
            }
            if (x, y) == (pv, pu) && x != y {
                orients.push((2 * t + 1, 2 * t));
            }
            if u == v && x == y && x == pu {
                orients.push((2 * t + 1, 2 * t));
            }
            for (h0, h1) in orients {
                used[t] = true;
                partial[2 * k] = h0;
                partial[2 * k + 1] = h1;
                self.extend_half_edges(p, k + 1, partial, used, out);
                used[t] = false;
            }
        }
    }
}

impl fmt::Display for StableGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g: Vec<String> = self.genus.iter().map(u32::to_string).collect();
        let l: Vec<String> = self.legs.iter().map(usize::to_string).collect();
        let e: Vec<String> = self.edges.iter().map(|(a, b)| format!("({a},{b})")).collect();
        write!(f, "g=[{}];legs=[{}];edges=[{}]", g.join(","), l.join(","), e.join(","))
    }
}

impl FromStr for StableGraph {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let err = || GraphError::Parse(s.clone());
        let mut genus = None;
        let mut legs = None;
        let mut edges = None;
        for part in s.split(';') {
            let (key, val) = part.split_once('=').ok_or_else(err)?;
            let inner = val.strip_prefix('[').and_then(|v| v.strip_suffix(']')).ok_or_else(err)?;
            match key {
                "g" => {
                    genus = Some(
                        inner
                            .split(',')
                            .filter(|x| !x.is_empty())
                            .map(|x| x.parse::<u32>().map_err(|_| err()))
                            .collect::<Result<Vec<_>, _>>()?,
                    )
                }
                "legs" => {
                    legs = Some(
                        inner
                            .split(',')
                            .filter(|x| !x.is_empty())
                            .map(|x| x.parse::<usize>().map_err(|_| err()))
                            .collect::<Result<Vec<_>, _>>()?,
                    )
                }
                "edges" => {
                    let mut out = Vec::new();
                    for pair in inner.split(')').filter(|x| !x.is_empty()) {
                        let pair = pair.trim_start_matches(',').trim_start_matches('(');
                        let (a, b) = pair.split_once(',').ok_or_else(err)?;
                        out.push((a.parse().map_err(|_| err())?, b.parse().map_err(|_| err())?));
                    }
                    edges = Some(out)
                }
                _ => return Err(err()),
            }
        }
        StableGraph::new(genus.ok_or_else(err)?, legs.ok_or_else(err)?, edges.ok_or_else(err)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphAutomorphism {
    pub vertex_perm: Perm,
    pub half_edge_perm: Perm,
}

/// All stable graphs of genus `g` with `n` legs and at most `max_edges`
/// interior edges, one per isomorphism class, sorted by (edges, encoding).
pub fn enumerate_stable_graphs(g: u32, n: usize, max_edges: usize) -> Result<Vec<StableGraph>, GraphError> {
    if 2 * g as i64 - 2 + n as i64 <= 0 {
        return Err(GraphError::Unstable(g, n));
    }
    let top = (3 * g as usize + n).saturating_sub(3);
    let mut layer: BTreeSet<StableGraph> = BTreeSet::from([StableGraph::new(vec![g], vec![0; n], vec![])?]);
    let mut out: Vec<StableGraph> = layer.iter().cloned().collect();
    for _ in 0..max_edges.min(top) {
        let mut next = BTreeSet::new();
        for gr in &layer {
            for x in gr.expansions() {
                next.insert(x);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    Ok(out)
}

impl StableGraph {
    /// Stable graphs with one more edge that contract back onto `self`
    /// (canonical, possibly repeated).
    pub fn expansions(&self) -> Vec<StableGraph> {
        let mut out = Vec::new();
        let v = self.genus.len();
        for x in 0..v {
            // lower the genus by one and attach a loop
            if self.genus[x] >= 1 {
                let mut genus = self.genus.clone();
                genus[x] -= 1;
                let mut edges = self.edges.clone();
                edges.push((x, x));
                if let Ok(gr) = StableGraph::raw(genus, self.legs.clone(), edges) {
                    if gr.is_stable() {
                        out.push(gr.canonical());
                    }
                }
            }
            // split x into x and a new vertex y joined by an edge;
            // half-edges at x are distributed between the two
            let y = v;
            let mut slots: Vec<(usize, usize)> = Vec::new(); // (kind, index): kind 0 leg, 1 edge first end, 2 edge second end
            for (i, &l) in self.legs.iter().enumerate() {
                if l == x {
                    slots.push((0, i));
                }
            }
            for (i, &(a, b)) in self.edges.iter().enumerate() {
                if a == x {
                    slots.push((1, i));
                }
                if b == x {
                    slots.push((2, i));
                }
            }
            for mask in 0u64..(1 << slots.len()) {
                let mut legs = self.legs.clone();
                let mut edges = self.edges.clone();
                for (k, &(kind, i)) in slots.iter().enumerate() {
                    if mask >> k & 1 == 1 {
                        match kind {
                            0 => legs[i] = y,
                            1 => edges[i].0 = y,
                            _ => edges[i].1 = y,
                        }
                    }
                }
                for e in edges.iter_mut() {
                    if e.0 > e.1 {
                        *e = (e.1, e.0);
                    }
                }
                edges.push((x, y));
                for h in 0..=self.genus[x] {
                    let mut genus = self.genus.clone();
                    genus[x] = h;
                    genus.push(self.genus[x] - h);
                    if let Ok(gr) = StableGraph::raw(genus, legs.clone(), edges.clone()) {
                        if gr.is_stable() {
                            out.push(gr.canonical());
                        }
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_counts() {
        assert_eq!(enumerate_trees(4, 0), vec![Tree::corolla(4).unwrap()]);
        assert_eq!(enumerate_trees(4, 1).len(), 10);
        assert_eq!(enumerate_trees(4, 2).len(), 15);
        assert!(enumerate_trees(4, 3).is_empty());
    }

    #[test]
    fn graft_examples() {
        let d2 = Tree::corolla(2).unwrap();
        let d3 = Tree::corolla(3).unwrap();
        let t = d2.graft(1, &d2).unwrap();
        assert_eq!(t.to_string(), "((1,2),3)");
        let t2 = d3.graft(2, &d2).unwrap();
        assert_eq!(t2.internal_edges(), vec![0b0110]);
        assert_eq!(t.contract_edge(0b011).unwrap(), d3);
        assert!(t.graft(4, &d2).is_err());
        assert!(t.contract_edge(0b111).is_err());
    }

    #[test]
    fn tree_text_round_trip() {
        for t in enumerate_trees(5, 2) {
            let s = t.to_string();
            assert_eq!(s.parse::<Tree>().unwrap(), t);
        }
        assert_eq!("1".parse::<Tree>().unwrap(), Tree::unit());
        assert!("(1,1)".parse::<Tree>().is_err());
        assert!("((1),2)".parse::<Tree>().is_err());
        assert!("(1,3)".parse::<Tree>().is_err());
    }

    #[test]
    fn graph_examples() {
        assert_eq!(enumerate_stable_graphs(0, 3, 5).unwrap().len(), 1);
        assert_eq!(enumerate_stable_graphs(1, 1, 1).unwrap().len(), 2);
        assert_eq!(enumerate_stable_graphs(0, 4, 1).unwrap().len(), 4);
        assert!(enumerate_stable_graphs(0, 2, 1).is_err());
        assert!(enumerate_stable_graphs(1, 0, 1).is_err());
        assert_eq!(enumerate_stable_graphs(1, 2, 9).unwrap().len(), 5);
        assert_eq!(enumerate_stable_graphs(2, 0, 9).unwrap().len(), 7);
    }

    #[test]
    fn genus_invariant_examples() {
        let smooth = StableGraph::new(vec![2], vec![], vec![]).unwrap();
        assert_eq!(smooth.genus_invariant(), 2);
        let loop_ = StableGraph::new(vec![0], vec![0], vec![(0, 0)]).unwrap();
        assert_eq!(loop_.genus_invariant(), 1);
        let banana = StableGraph::new(vec![0, 0], vec![0, 1], vec![(0, 1), (0, 1)]).unwrap();
        assert_eq!(banana.genus_invariant(), 1);
    }

    #[test]
    fn automorphism_examples() {
        let loop_ = StableGraph::new(vec![0], vec![0], vec![(0, 0)]).unwrap();
        assert_eq!(loop_.automorphisms().len(), 2);
        let banana = StableGraph::new(vec![0, 0], vec![0, 1], vec![(0, 1), (0, 1)]).unwrap();
        assert_eq!(banana.automorphisms().len(), 2);
        let tree = StableGraph::new(vec![0, 0], vec![0, 0, 1, 1], vec![(0, 1)]).unwrap();
        assert_eq!(tree.automorphisms().len(), 1);
    }

    #[test]
    fn contraction_examples() {
        let banana = StableGraph::new(vec![0, 0], vec![0, 1], vec![(0, 1), (0, 1)]).unwrap();
        let c = banana.contract(EdgeRef::Edge(0)).unwrap();
        assert_eq!(c, StableGraph::new(vec![0], vec![0, 0], vec![(0, 0)]).unwrap());
        let loop_ = StableGraph::new(vec![0], vec![0], vec![(0, 0)]).unwrap();
        let smooth = loop_.contract(EdgeRef::Edge(0)).unwrap();
        assert_eq!(smooth, StableGraph::new(vec![1], vec![0], vec![]).unwrap());
        assert!(loop_.contract(EdgeRef::Leg(0)).is_err());
        assert!(loop_.contract(EdgeRef::Edge(3)).is_err());
    }

    #[test]
    fn graph_text_round_trip() {
        for g in enumerate_stable_graphs(1, 2, 2).unwrap() {
            assert_eq!(g.to_string().parse::<StableGraph>().unwrap(), g);
        }
    }
}
