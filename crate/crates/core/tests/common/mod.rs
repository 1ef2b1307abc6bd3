//! Brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use num::{BigRational, Zero};
use stratops::perm::Perm;

/// Polynomial in the edge count of rooted trees on `n` labelled leaves, by
/// splitting the leaf set at the root into at least two blocks.
pub fn tree_poly(n: usize, memo: &mut BTreeMap<usize, Vec<u64>>) -> Vec<u64> {
    if n == 1 {
        return vec![1];
    }
    if let Some(p) = memo.get(&n) {
        return p.clone();
    }
    // forests on a labelled set of size s: F[s] with blocks of size >= 1,
    // counted by the block containing the smallest element
    let block = |k: usize, memo: &mut BTreeMap<usize, Vec<u64>>| -> Vec<u64> {
        if k == 1 {
            vec![1]
        } else {
            let mut p = vec![0];
            p.extend(tree_poly(k, memo));
            p
        }
    };
    let mut forests: Vec<Vec<Vec<u64>>> = vec![vec![vec![1]]]; // forests[s][b] = poly with b blocks
    for s in 1..=n {
        let mut by_blocks = vec![vec![0u64; n + 1]; s + 1];
        for k in 1..=s {
            if k == n {
                continue; // a single block is not a split of the whole set
            }
            let choose = binom(s - 1, k - 1);
            let bp = block(k, memo);
            for (b, rest) in forests[s - k].iter().enumerate() {
                for (i, &x) in bp.iter().enumerate() {
                    for (j, &y) in rest.iter().enumerate() {
                        if i + j <= n {
                            by_blocks[b + 1][i + j] += choose * x * y;
                        }
                    }
                }
            }
        }
        forests.push(by_blocks);
    }
    let mut total = vec![0u64; n + 1];
    for (b, p) in forests[n].iter().enumerate() {
        if b >= 2 {
            for (i, &x) in p.iter().enumerate() {
                total[i] += x;
            }
        }
    }
    while total.last() == Some(&0) {
        total.pop();
    }
    memo.insert(n, total.clone());
    total
}

pub fn binom(n: usize, k: usize) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// Brute-force iso classes of stable graphs with at most `max_edges` edges,
/// plus `Σ 1/|Aut|` from labelled counts.
pub fn brute_graphs(g: u32, n: usize, max_edges: usize) -> (BTreeSet<(Vec<u32>, Vec<usize>, Vec<(usize, usize)>)>, BigRational) {
    let mut classes = BTreeSet::new();
    let mut mass = BigRational::zero();
    for e in 0..=max_edges {
        for v in 1..=e + 1 {
            let pairs: Vec<(usize, usize)> = (0..v).flat_map(|a| (0..v).map(move |b| (a, b))).collect();
            // ordered pairs for oriented, labelled edges
            let mut labelled = 0u64;
            for edges in product(&pairs, e) {
                for legs in product(&(0..v).collect::<Vec<_>>(), n) {
                    let b1 = e as i64 - v as i64 + 1;
                    let rest = g as i64 - b1;
                    if rest < 0 {
                        continue;
                    }
                    for genus in compositions(rest as u32, v) {
                        if !valid(&genus, &legs, &edges) {
                            continue;
                        }
                        labelled += 1;
                        classes.insert(canonical(&genus, &legs, &edges));
                    }
                }
            }
            let denom = (1..=v as u64).product::<u64>() * (1..=e as u64).product::<u64>() * (1u64 << e);
            mass += BigRational::new(labelled.into(), denom.into());
        }
    }
    (classes, mass)
}

pub fn product<T: Clone>(xs: &[T], k: usize) -> Vec<Vec<T>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out.into_iter().flat_map(|p| xs.iter().map(move |x| {
            let mut q = p.clone();
            q.push(x.clone());
            q
        })).collect();
    }
    out
}

pub fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    (0..=total)
        .flat_map(|first| compositions(total - first, parts - 1).into_iter().map(move |mut r| {
            r.insert(0, first);
            r
        }))
        .collect()
}

pub fn valid(genus: &[u32], legs: &[usize], edges: &[(usize, usize)]) -> bool {
    let v = genus.len();
    let mut val = vec![0usize; v];
    for &l in legs {
        val[l] += 1;
    }
    for &(a, b) in edges {
        val[a] += 1;
        val[b] += 1;
    }
    if (0..v).any(|i| 2 * genus[i] as i64 - 2 + val[i] as i64 <= 0) {
        return false;
    }
    let mut seen = vec![false; v];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(x) = stack.pop() {
        for &(a, b) in edges {
            for (s, t) in [(a, b), (b, a)] {
                if s == x && !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
    }
    seen.iter().all(|&s| s)
}

pub fn canonical(genus: &[u32], legs: &[usize], edges: &[(usize, usize)]) -> (Vec<u32>, Vec<usize>, Vec<(usize, usize)>) {
    Perm::all(genus.len())
        .into_iter()
        .map(|s| {
            let inv = s.inverse();
            let g: Vec<u32> = (0..genus.len()).map(|i| genus[inv.apply(i)]).collect();
            let l: Vec<usize> = legs.iter().map(|&x| s.apply(x)).collect();
            let mut e: Vec<(usize, usize)> = edges
                .iter()
                .map(|&(a, b)| (s.apply(a).min(s.apply(b)), s.apply(a).max(s.apply(b))))
                .collect();
            e.sort();
            (g, l, e)
        })
        .min()
        .unwrap()
}

/// Witt's formula `(1/n) Σ_{k|n} μ(k) d^{n/k}` by trial division.
pub fn witt(d: u64, n: u64) -> u64 {
    fn mobius(mut k: u64) -> i64 {
        let mut r = 1;
        let mut p = 2;
        while p * p <= k {
            if k % p == 0 {
                k /= p;
                if k % p == 0 {
                    return 0;
                }
                r = -r;
            }
            p += 1;
        }
        if k > 1 {
            r = -r;
        }
        r
    }
    let s: i64 = (1..=n).filter(|k| n % k == 0).map(|k| mobius(k) * (d as i64).pow((n / k) as u32)).sum();
    (s / n as i64) as u64
}
