use std::collections::{BTreeMap, BTreeSet};

use num::{BigRational, Zero};
use proptest::prelude::*;
use stratops::perm::Perm;
use stratops::treegraph::*;

mod common;
use common::*;

#[test]
fn tree_counts_match_recursive_splitting() {
    let mut memo = BTreeMap::new();
    for n in 1..=7 {
        let oracle = tree_poly(n, &mut memo);
        let ours: Vec<u64> = enumerate_all_trees(n).iter().map(|ts| ts.len() as u64).collect();
        assert_eq!(ours, oracle, "n = {n}");
        for (e, &c) in oracle.iter().enumerate() {
            assert_eq!(enumerate_trees(n, e).len() as u64, c);
        }
    }
    assert_eq!(enumerate_trees(4, 2).len(), 15);
}

#[test]
fn stable_graph_census_matches_brute_force() {
    for (g, n) in [(1u32, 1usize), (1, 2), (0, 4), (0, 5)] {
        let ours = enumerate_stable_graphs(g, n, 2).unwrap();
        let (classes, mass) = brute_graphs(g, n, 2);
        assert_eq!(ours.len(), classes.len(), "({g},{n})");
        let our_mass: BigRational = ours
            .iter()
            .map(|x| BigRational::new(1.into(), (x.automorphisms().len() as u64).into()))
            .fold(BigRational::zero(), |a, b| a + b);
        assert_eq!(our_mass, mass, "({g},{n})");
        let ours_canon: BTreeSet<_> = ours
            .iter()
            .map(|x| canonical(x.genus_labels(), x.legs(), x.edges()))
            .collect();
        assert_eq!(ours_canon, classes);
    }
    let one_one = enumerate_stable_graphs(1, 1, 1).unwrap();
    assert_eq!(one_one.len(), 2);
    let looped = one_one.iter().find(|x| x.edge_count() == 1).unwrap();
    assert_eq!(looped.automorphisms().len(), 2);
}

#[test]
fn genus_two_without_legs() {
    assert_eq!(enumerate_stable_graphs(2, 0, 3).unwrap().len(), 7);
}

proptest! {
    #[test]
    fn relabel_and_graft_are_compatible(n in 2usize..6, e in 0usize..3, seed in 0usize..1000) {
        let ts = enumerate_trees(n, e.min(n - 2));
        let t = &ts[seed % ts.len()];
        let perms = Perm::all(n);
        let s = &perms[seed % perms.len()];
        let r = t.relabel(s);
        prop_assert_eq!(r.edge_count(), t.edge_count());
        prop_assert_eq!(r.relabel(&s.inverse()), t.clone());
        for edge in t.internal_edges() {
            let c = t.contract_edge(edge).unwrap();
            prop_assert_eq!(c.edge_count() + 1, t.edge_count());
        }
    }
}
