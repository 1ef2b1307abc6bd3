//! Dimension bookkeeping for the stratification spectral sequences of
//! compactified moduli spaces of curves.
//!
//! Strata of `M̄_{g,n}` are indexed by stable graphs `G`; a stratum with
//! `e` interior edges has complex dimension `p = 3g-3+n-e`. The first page
//! of the homological sequence is
//!
//! ```text
//! E¹_{p,q} = ⊕_G ( ⊕_{Σ k(v) = p-q} ⊗_v H^{k(v)}(M_{g(v),n(v)}) )^{Aut G}
//! ```
//!
//! and the first page of the logarithmic (weight) sequence is
//!
//! ```text
//! E₁^{p,q} = ⊕_{G, e = -p} ( ⊕_{Σ k(v) = 2p+q} ⊗_v H^{k(v)}(M̄_{g(v),n(v)}) )^{Aut G}.
//! ```
//!
//! Genus-zero open Betti numbers come from `∏_{k=2}^{n-2} (1 + k t)`;
//! everything else has to be supplied.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cobar::{cobar_dims, LieCooperad};
use crate::treegraph::{enumerate_stable_graphs, enumerate_trees, GraphError, StableGraph, Tree};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StrataError {
    #[error("n = {0} is too small (need n >= 3)")]
    TooSmall(usize),
    #[error("no Betti numbers for M_{{{0},{1}}}")]
    MissingBetti(u32, usize),
    #[error("no Betti numbers for the compactification of M_{{{0},{1}}}")]
    MissingCompactBetti(u32, usize),
    #[error("row g={g}, n={n}, k={k}: dim {got} conflicts with the genus-0 value {expected}")]
    Conflict { g: u32, n: usize, k: usize, got: u64, expected: u64 },
    #[error("row g={g}, n={n}, k={k} given twice with different values")]
    Duplicate { g: u32, n: usize, k: usize },
    #[error("graph {graph} has a nontrivial automorphism group and needs invariants of degree {degree} classes (unsupported)")]
    Unsupported { graph: String, degree: usize },
    #[error("predicted Betti number h_{degree} = {value} is negative")]
    Negative { degree: usize, value: i64 },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Coefficients of `∏_{k=2}^{n-2} (1 + k t)`: the Betti numbers of `M_{0,n}`.
pub fn open_betti(n: usize) -> Result<Vec<u64>, StrataError> {
    if n < 3 {
        return Err(StrataError::TooSmall(n));
    }
    let mut poly = vec![1u64];
    for k in 2..=(n as u64).saturating_sub(2) {
        let mut next = vec![0u64; poly.len() + 1];
        for (i, &c) in poly.iter().enumerate() {
            next[i] += c;
            next[i + 1] += c * k;
        }
        poly = next;
    }
    Ok(poly)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Provenance {
    /// Genus zero, from the product formula.
    Computed,
    /// Shipped with the library.
    Shipped,
    /// Supplied by the user.
    Ingested,
}

/// Betti numbers of open moduli spaces `M_{g,n}`, indexed by degree.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BettiTable {
    entries: BTreeMap<(u32, usize), (Vec<u64>, Provenance)>,
}

impl BettiTable {
    /// Only the genus-zero values.
    pub fn new() -> Self {
        BettiTable::default()
    }

    /// Genus zero plus `M_{1,1} → (1)`.
    pub fn shipped() -> Self {
        let mut t = BettiTable::new();
        t.entries.insert((1, 1), (vec![1], Provenance::Shipped));
        t
    }

    /// Adds one `g,n,k,dim` row. Genus-zero rows must agree with the
    /// product formula.
    pub fn insert(&mut self, g: u32, n: usize, k: usize, dim: u64) -> Result<(), StrataError> {
        if g == 0 {
            let internal = open_betti(n)?;
            let expected = internal.get(k).copied().unwrap_or(0);
            if expected != dim {
                return Err(StrataError::Conflict { g, n, k, got: dim, expected });
            }
            return Ok(());
        }
        let (list, prov) = self.entries.entry((g, n)).or_insert((vec![], Provenance::Ingested));
        *prov = Provenance::Ingested;
        if list.len() <= k {
            list.resize(k + 1, 0);
        } else if list[k] != 0 && list[k] != dim {
            return Err(StrataError::Duplicate { g, n, k });
        }
        list[k] = dim;
        while list.last() == Some(&0) {
            list.pop();
        }
        Ok(())
    }

    pub fn get(&self, g: u32, n: usize) -> Result<(Vec<u64>, Provenance), StrataError> {
        if g == 0 {
            return Ok((open_betti(n)?, Provenance::Computed));
        }
        self.entries.get(&(g, n)).cloned().ok_or(StrataError::MissingBetti(g, n))
    }

    /// Stored (non-genus-zero) entries.
    pub fn stored(&self) -> impl Iterator<Item = (&(u32, usize), &(Vec<u64>, Provenance))> {
        self.entries.iter()
    }
}

/// Betti numbers (all degrees, odd included) of compactified `M̄_{g,n}`.
/// Genus zero is taken from [`predict_compactified_betti`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CompactBettiTable {
    entries: BTreeMap<(u32, usize), Vec<u64>>,
}

impl CompactBettiTable {
    pub fn new() -> Self {
        CompactBettiTable::default()
    }

    pub fn insert(&mut self, g: u32, n: usize, k: usize, dim: u64) -> Result<(), StrataError> {
        if g == 0 {
            let expected = full_degree_list(&predict_compactified_betti(n)?).get(k).copied().unwrap_or(0);
            if expected != dim {
                return Err(StrataError::Conflict { g, n, k, got: dim, expected });
            }
            return Ok(());
        }
        let list = self.entries.entry((g, n)).or_default();
        if list.len() <= k {
            list.resize(k + 1, 0);
        }
        list[k] = dim;
        Ok(())
    }

    pub fn get(&self, g: u32, n: usize) -> Result<Vec<u64>, StrataError> {
        if g == 0 {
            return Ok(full_degree_list(&predict_compactified_betti(n)?));
        }
        self.entries.get(&(g, n)).cloned().ok_or(StrataError::MissingCompactBetti(g, n))
    }
}

fn full_degree_list(even: &[u64]) -> Vec<u64> {
    let mut out = Vec::new();
    for (i, &h) in even.iter().enumerate() {
        if i > 0 {
            out.push(0);
        }
        out.push(h);
    }
    out
}

/// How `Aut(G)`-invariants are handled for `g >= 1`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum AutMode {
    /// Graphs with nontrivial automorphisms contribute only through
    /// all-degree-zero decorations (a trivial one-dimensional
    /// representation); any other contribution is reported as unsupported.
    #[default]
    DegreeZeroOnly,
    /// Any graph with a nontrivial automorphism is an error.
    RejectNontrivial,
}

/// `(p, q) → dim` maps as JSON lists of `{p, q, dim}`.
mod pq_entries {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Entry {
        p: i64,
        q: i64,
        dim: u64,
    }

    pub fn serialize<S: Serializer>(m: &BTreeMap<(i64, i64), u64>, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<Entry> = m.iter().map(|(&(p, q), &dim)| Entry { p, q, dim }).collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<(i64, i64), u64>, D::Error> {
        Ok(Vec::<Entry>::deserialize(d)?.into_iter().map(|e| ((e.p, e.q), e.dim)).collect())
    }
}

/// Per-graph data behind a table, kept for the vanishing re-derivation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratumRecord {
    pub graph: String,
    pub p: i64,
    pub vertices: usize,
    /// Edges including the `n` legs.
    pub all_edges: usize,
    /// `(g(v), n(v))` per vertex.
    pub vertex_types: Vec<(u32, usize)>,
    pub automorphisms: usize,
}

/// First page of the homological stratification sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct E1Table {
    pub g: u32,
    pub n: usize,
    /// Nonzero entries `(p, q) → dim`.
    #[serde(with = "pq_entries")]
    pub entries: BTreeMap<(i64, i64), u64>,
    pub provenance: BTreeMap<String, Provenance>,
    pub strata: Vec<StratumRecord>,
}

impl E1Table {
    pub fn get(&self, p: i64, q: i64) -> u64 {
        self.entries.get(&(p, q)).copied().unwrap_or(0)
    }

    pub fn top(&self) -> i64 {
        3 * self.g as i64 - 3 + self.n as i64
    }

    /// `Σ (-1)^{p+q} dim E¹_{p,q}`.
    pub fn euler_characteristic(&self) -> i64 {
        self.entries
            .iter()
            .map(|(&(p, q), &d)| if (p + q).rem_euclid(2) == 0 { d as i64 } else { -(d as i64) })
            .sum()
    }
}

/// Genus-zero stable graph with legs `1..n` for the rooted tree `t` of
/// arity `n-1` (the root is leg `n`).
fn tree_vertex_types(t: &Tree) -> Vec<(u32, usize)> {
    t.blocks().iter().map(|&b| (0, t.inputs(b).len() + 1)).collect()
}

fn poly_mul(a: &[u64], b: &[u64]) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn strata_of(g: u32, n: usize) -> Result<Vec<(String, Vec<(u32, usize)>, usize, usize)>, StrataError> {
    // (name, vertex types, interior edges, |Aut|)
    if 2 * g as i64 - 2 + n as i64 <= 0 {
        return Err(StrataError::Graph(GraphError::Unstable(g, n)));
    }
    if g == 0 {
        let mut out = Vec::new();
        for e in 0..=n - 3 {
            for t in enumerate_trees(n - 1, e) {
                out.push((t.to_string(), tree_vertex_types(&t), e, 1));
            }
        }
        return Ok(out);
    }
    let top = 3 * g as usize + n - 3;
    Ok(enumerate_stable_graphs(g, n, top)?
        .into_iter()
        .map(|gr: StableGraph| {
            let types = (0..gr.vertex_count()).map(|v| (gr.genus_labels()[v], gr.valence(v))).collect();
            (gr.to_string(), types, gr.edge_count(), gr.automorphisms().len())
        })
        .collect())
}

/// `E¹_{p,q}` dimensions for `M̄_{g,n}`.
pub fn e1_table(g: u32, n: usize, betti: &BettiTable, aut: AutMode) -> Result<E1Table, StrataError> {
    let mut table = E1Table {
        g,
        n,
        entries: BTreeMap::new(),
        provenance: BTreeMap::new(),
        strata: Vec::new(),
    };
    let top = 3 * g as i64 - 3 + n as i64;
    for (name, types, e, aut_order) in strata_of(g, n)? {
        let p = top - e as i64;
        let mut poly = vec![1u64];
        for &(gv, nv) in &types {
            let (b, prov) = betti.get(gv, nv)?;
            table.provenance.insert(format!("M_{{{gv},{nv}}}"), prov);
            poly = poly_mul(&poly, &b);
        }
        if aut_order > 1 {
            if aut == AutMode::RejectNontrivial {
                return Err(StrataError::Unsupported { graph: name, degree: 0 });
            }
            if let Some(k) = (1..poly.len()).find(|&k| poly[k] != 0) {
                return Err(StrataError::Unsupported { graph: name, degree: k });
            }
            poly.truncate(1);
        }
        for (k, &d) in poly.iter().enumerate() {
            if d > 0 {
                *table.entries.entry((p, p - k as i64)).or_insert(0) += d;
            }
        }
        table.strata.push(StratumRecord {
            graph: name,
            p,
            vertices: types.len(),
            all_edges: e + n,
            vertex_types: types,
            automorphisms: aut_order,
        });
    }
    Ok(table)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VanishingReport {
    /// Entries outside `-p <= q <= p <= 3g-3+n`.
    pub out_of_bounds: Vec<(i64, i64)>,
    /// Strata whose arithmetic fails: for genus zero,
    /// `Σ_v (n(v)-3) = 2 ed(G) - n - 3 v(G) = p`; in general
    /// `Σ_v dim M_{g(v),n(v)} = p`.
    pub bad_strata: Vec<String>,
}

impl VanishingReport {
    pub fn holds(&self) -> bool {
        self.out_of_bounds.is_empty() && self.bad_strata.is_empty()
    }
}

pub fn vanishing_report(table: &E1Table) -> VanishingReport {
    let top = table.top();
    let out_of_bounds = table
        .entries
        .iter()
        .filter(|(&(p, q), &d)| d != 0 && !(-p <= q && q <= p && p <= top))
        .map(|(&k, _)| k)
        .collect();
    let n = table.n as i64;
    let bad_strata = table
        .strata
        .iter()
        .filter(|s| {
            let dims: i64 = s.vertex_types.iter().map(|&(g, m)| 3 * g as i64 - 3 + m as i64).sum();
            if table.g == 0 {
                let excess: i64 = s.vertex_types.iter().map(|&(_, m)| m as i64 - 3).sum();
                let formula = 2 * s.all_edges as i64 - n - 3 * s.vertices as i64;
                !(excess == formula && formula == s.p && dims == s.p)
            } else {
                dims != s.p
            }
        })
        .map(|s| s.graph.clone())
        .collect();
    VanishingReport { out_of_bounds, bad_strata }
}

/// Whether the table vanishes outside `-p <= q <= p <= 3g-3+n` and each
/// stratum satisfies the dimension count behind that bound.
pub fn verify_vanishing(table: &E1Table) -> bool {
    vanishing_report(table).holds()
}

/// `h_{2q}(M̄_{0,n}) = (-1)^q Σ_p (-1)^p dim E¹_{p,q}`, for `q = 0..=n-3`.
pub fn predict_compactified_betti(n: usize) -> Result<Vec<u64>, StrataError> {
    let t = e1_table(0, n, &BettiTable::new(), AutMode::default())?;
    row_alternating_sums(&t)
}

/// Row sums `(-1)^q Σ_p (-1)^p E¹_{p,q}` of any table, as Betti numbers.
pub fn row_alternating_sums(t: &E1Table) -> Result<Vec<u64>, StrataError> {
    let top = t.top();
    (0..=top)
        .map(|q| {
            let s: i64 = (q..=top)
                .map(|p| {
                    let d = t.get(p, q) as i64;
                    if p % 2 == 0 {
                        d
                    } else {
                        -d
                    }
                })
                .sum();
            let h = if q % 2 == 0 { s } else { -s };
            u64::try_from(h).map_err(|_| StrataError::Negative {
                degree: 2 * q as usize,
                value: h,
            })
        })
        .collect()
}

/// Middle row `E¹_{p,0}(M̄_{0,n+1})` next to `Cobar Lie^c(n)` by edge count.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MiddleRow {
    pub arity: usize,
    /// Indexed by `p = 0..=n-2`.
    pub e1: Vec<u64>,
    /// Indexed by `p`; the cobar piece with `n-2-p` edges.
    pub cobar: Vec<u64>,
    pub equal: bool,
}

pub fn middle_row(n: usize, lie: &LieCooperad) -> Result<MiddleRow, StrataError> {
    if n < 2 {
        return Err(StrataError::TooSmall(n + 1));
    }
    let t = e1_table(0, n + 1, &BettiTable::new(), AutMode::default())?;
    let e1: Vec<u64> = (0..=n as i64 - 2).map(|p| t.get(p, 0)).collect();
    let by_edges = cobar_dims(lie, n);
    let cobar: Vec<u64> = (0..=n - 2).map(|p| by_edges[n - 2 - p] as u64).collect();
    Ok(MiddleRow {
        arity: n,
        equal: e1 == cobar,
        e1,
        cobar,
    })
}

/// First page of the logarithmic sequence, with the column Euler
/// characteristic checks available in genus zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualE1Table {
    pub g: u32,
    pub n: usize,
    #[serde(with = "pq_entries")]
    pub entries: BTreeMap<(i64, i64), u64>,
    /// `(q, Σ_p (-1)^p E₁^{p,q}, expected from E₂)`; genus zero only.
    pub chi_checks: Vec<(i64, i64, i64)>,
}

impl DualE1Table {
    pub fn get(&self, p: i64, q: i64) -> u64 {
        self.entries.get(&(p, q)).copied().unwrap_or(0)
    }

    pub fn consistent(&self) -> bool {
        self.chi_checks.iter().all(|&(_, a, b)| a == b)
    }

    pub fn within_bounds(&self) -> bool {
        let top = 3 * self.g as i64 - 3 + self.n as i64;
        self.entries
            .keys()
            .all(|&(p, q)| -top <= p && p <= 0 && -2 * p <= q && q <= 2 * top)
    }
}

pub fn dual_e1_table(g: u32, n: usize, compact: &CompactBettiTable, aut: AutMode) -> Result<DualE1Table, StrataError> {
    let mut entries = BTreeMap::new();
    for (name, types, e, aut_order) in strata_of(g, n)? {
        let p = -(e as i64);
        let mut poly = vec![1u64];
        for &(gv, nv) in &types {
            poly = poly_mul(&poly, &compact.get(gv, nv)?);
        }
        if aut_order > 1 {
            if aut == AutMode::RejectNontrivial {
                return Err(StrataError::Unsupported { graph: name, degree: 0 });
            }
            if let Some(k) = (1..poly.len()).find(|&k| poly[k] != 0) {
                return Err(StrataError::Unsupported { graph: name, degree: k });
            }
            poly.truncate(1);
        }
        for (k, &d) in poly.iter().enumerate() {
            if d > 0 {
                // Σ k(v) = 2p + q
                *entries.entry((p, k as i64 - 2 * p)).or_insert(0) += d;
            }
        }
    }
    let mut chi_checks = Vec::new();
    if g == 0 {
        let open = open_betti(n)?;
        let top = n as i64 - 3;
        for q in 0..=2 * top {
            let lhs: i64 = entries
                .iter()
                .filter(|(&(_, qq), _)| qq == q)
                .map(|(&(p, _), &d)| if p % 2 == 0 { d as i64 } else { -(d as i64) })
                .sum();
            // E₂^{p,q} = H^{-p}(M_{0,n}) exactly when q = -2p
            let rhs = if q % 2 == 0 {
                let m = (q / 2) as usize;
                let h = open.get(m).copied().unwrap_or(0) as i64;
                if m.is_multiple_of(2) {
                    h
                } else {
                    -h
                }
            } else {
                0
            };
            chi_checks.push((q, lhs, rhs));
        }
    }
    Ok(DualE1Table {
        g,
        n,
        entries,
        chi_checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn open_betti_examples() {
        assert_eq!(open_betti(3).unwrap(), vec![1]);
        assert_eq!(open_betti(4).unwrap(), vec![1, 2]);
        assert_eq!(open_betti(5).unwrap(), vec![1, 5, 6]);
        assert_eq!(open_betti(6).unwrap(), vec![1, 9, 26, 24]);
        assert!(open_betti(2).is_err());
    }

    #[test]
    fn e1_examples() {
        let b = BettiTable::new();
        let t = e1_table(0, 4, &b, AutMode::default()).unwrap();
        assert_eq!(t.entries, BTreeMap::from([((1, 1), 1), ((1, 0), 2), ((0, 0), 3)]));
        let t = e1_table(0, 5, &b, AutMode::default()).unwrap();
        assert_eq!(
            t.entries,
            BTreeMap::from([((2, 2), 1), ((2, 1), 5), ((2, 0), 6), ((1, 1), 10), ((1, 0), 20), ((0, 0), 15)])
        );
        let t = e1_table(0, 3, &b, AutMode::default()).unwrap();
        assert_eq!(t.entries, BTreeMap::from([((0, 0), 1)]));
    }

    #[test]
    fn genus_one_one_point() {
        let t = e1_table(1, 1, &BettiTable::shipped(), AutMode::default()).unwrap();
        assert_eq!(t.entries, BTreeMap::from([((1, 1), 1), ((0, 0), 1)]));
        assert!(verify_vanishing(&t));
        assert!(e1_table(1, 1, &BettiTable::new(), AutMode::default()).is_err());
        assert!(e1_table(1, 1, &BettiTable::shipped(), AutMode::RejectNontrivial).is_err());
    }

    #[test]
    fn predictions() {
        assert_eq!(predict_compactified_betti(4).unwrap(), vec![1, 1]);
        assert_eq!(predict_compactified_betti(5).unwrap(), vec![1, 5, 1]);
        assert_eq!(predict_compactified_betti(6).unwrap(), vec![1, 16, 16, 1]);
    }

    #[test]
    fn dual_examples() {
        let c = CompactBettiTable::new();
        let t = dual_e1_table(0, 4, &c, AutMode::default()).unwrap();
        assert_eq!(t.get(0, 0), 1);
        assert_eq!(t.get(0, 2), 1);
        assert_eq!(t.get(-1, 2), 3);
        assert!(t.chi_checks.contains(&(2, -2, -2)));
        assert!(t.consistent());
        let t3 = dual_e1_table(0, 3, &c, AutMode::default()).unwrap();
        assert_eq!(t3.entries, BTreeMap::from([((0, 0), 1)]));
    }

    #[test]
    fn ingestion_conflicts() {
        let mut b = BettiTable::new();
        assert!(b.insert(0, 5, 1, 5).is_ok());
        assert!(matches!(b.insert(0, 5, 1, 4), Err(StrataError::Conflict { .. })));
        b.insert(1, 2, 0, 1).unwrap();
        assert_eq!(b.get(1, 2).unwrap().0, vec![1]);
    }
}
