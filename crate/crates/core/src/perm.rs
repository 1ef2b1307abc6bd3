//! Permutations of `{0, .., n-1}` and the few symmetric-group utilities the
//! operad code needs (block permutations, shuffles, cycle types).

use std::fmt;

/// `p.images()[i]` is the image of `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<usize>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n).collect())
    }

    /// Panics if `images` is not a permutation.
    pub fn from_images(images: Vec<usize>) -> Self {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            assert!(i < images.len() && !seen[i], "not a permutation: {images:?}");
            seen[i] = true;
        }
        Perm(images)
    }

    /// Swaps `i` and `i+1`.
    pub fn adjacent(n: usize, i: usize) -> Self {
        let mut v: Vec<usize> = (0..n).collect();
        v.swap(i, i + 1);
        Perm(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Perm(inv)
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm(other.0.iter().map(|&j| self.0[j]).collect())
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn cycle_type(&self) -> Vec<usize> {
        let mut seen = vec![false; self.0.len()];
        let mut out = Vec::new();
        for s in 0..self.0.len() {
            if seen[s] {
                continue;
            }
            let mut len = 0;
            let mut i = s;
            while !seen[i] {
                seen[i] = true;
                i = self.0[i];
                len += 1;
            }
            out.push(len);
        }
        out.sort_unstable_by(|a, b| b.cmp(a));
        out
    }

    pub fn sign(&self) -> i64 {
        let even = self.cycle_type().iter().filter(|&&l| l % 2 == 0).count();
        if even % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// All permutations of `n` letters in lexicographic order.
    pub fn all(n: usize) -> Vec<Perm> {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (0..n).collect();
        loop {
            out.push(Perm(cur.clone()));
            // next lexicographic permutation
            let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
                break;
            };
            let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
            cur.swap(i - 1, j);
            cur[i..].reverse();
        }
        out
    }

    /// A permutation with the given cycle type (parts summing to `n`).
    pub fn with_cycle_type(parts: &[usize]) -> Perm {
        let n: usize = parts.iter().sum();
        let mut v = vec![0; n];
        let mut start = 0;
        for &p in parts {
            for k in 0..p {
                v[start + k] = start + (k + 1) % p;
            }
            start += p;
        }
        Perm(v)
    }

    /// Writes `self` as a product of adjacent transpositions
    /// `s_{i_1} s_{i_2} ... s_{i_k}` (bubble sort).
    pub fn adjacent_word(&self) -> Vec<usize> {
        // Sort a copy of the image list; each swap records a generator.
        let mut arr = self.0.clone();
        let mut word = Vec::new();
        let n = arr.len();
        for pass in 0..n {
            for i in 0..n.saturating_sub(1 + pass) {
                if arr[i] > arr[i + 1] {
                    arr.swap(i, i + 1);
                    word.push(i);
                }
            }
        }
        // arr = self ∘ s_{w1} ∘ ... ∘ s_{wk} = id, so self = s_{wk} ... s_{w1}
        word.reverse();
        word
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "[{}]", s.join(" "))
    }
}

/// Block permutation for equivariance of partial composition.
///
/// With the convention that `σ·f` relabels input `j` of `f` as `σ(j)`,
/// `(σ·f) ∘_i (τ·g) = π · (f ∘_k g)` where `(π, k)` is returned here
/// (`i`, `k` are zero-based slots).
pub fn block_permutation(sigma: &Perm, i: usize, tau: &Perm) -> (Perm, usize) {
    let n = sigma.len();
    let m = tau.len();
    let k = sigma.inverse().apply(i);
    let shift = |x: usize| if x < i { x } else { x + m - 1 };
    let mut images = Vec::with_capacity(n + m - 1);
    for p in 0..n + m - 1 {
        let img = if p < k {
            shift(sigma.apply(p))
        } else if p < k + m {
            i + tau.apply(p - k)
        } else {
            shift(sigma.apply(p - m + 1))
        };
        images.push(img);
    }
    (Perm::from_images(images), k)
}

/// All `(p, q)`-shuffles as permutations `σ` of `p+q` letters, written as
/// the sequence of letters in output order: the result lists
/// `[σ^{-1}(0), ..]`-style orderings, i.e. `order[t]` is the input placed
/// at output position `t`. Each block keeps its internal order.
pub fn shuffles(p: usize, q: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let n = p + q;
    // choose output positions of the first block
    let mut chosen = Vec::new();
    fn rec(start: usize, n: usize, p: usize, chosen: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if chosen.len() == p {
            let mut order = vec![0; n];
            let (mut a, mut b) = (0, p);
            for (t, slot) in order.iter_mut().enumerate() {
                if chosen.contains(&t) {
                    *slot = a;
                    a += 1;
                } else {
                    *slot = b;
                    b += 1;
                }
            }
            out.push(order);
            return;
        }
        for t in start..n {
            if n - t < p - chosen.len() {
                break;
            }
            chosen.push(t);
            rec(t + 1, n, p, chosen, out);
            chosen.pop();
        }
    }
    rec(0, n, p, &mut chosen, &mut out);
    out
}

/// Koszul sign of reordering items with the given degrees into `order`
/// (`order[t]` = index of the item landing at position `t`).
pub fn koszul_sign(order: &[usize], degrees: &[i64]) -> i64 {
    let mut odd_swaps = 0i64;
    for a in 0..order.len() {
        for b in a + 1..order.len() {
            if order[a] > order[b] && degrees[order[a]].rem_euclid(2) == 1 && degrees[order[b]].rem_euclid(2) == 1 {
                odd_swaps += 1;
            }
        }
    }
    if odd_swaps % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Integer partitions of `n` with parts in non-increasing order.
pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        for p in (1..=n.min(max)).rev() {
            cur.push(p);
            rec(n - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

pub fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// Size of the conjugacy class of `S_n` with the given cycle type.
pub fn class_size(parts: &[usize]) -> u128 {
    let n: usize = parts.iter().sum();
    let mut denom: u128 = 1;
    let mut i = 0;
    while i < parts.len() {
        let mut j = i;
        while j < parts.len() && parts[j] == parts[i] {
            j += 1;
        }
        let mult = j - i;
        denom *= (parts[i] as u128).pow(mult as u32) * factorial(mult);
        i = j;
    }
    factorial(n) / denom
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u64 = 1;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perms_and_signs() {
        assert_eq!(Perm::all(4).len(), 24);
        let t = Perm::adjacent(3, 0);
        assert_eq!(t.sign(), -1);
        assert_eq!(Perm::with_cycle_type(&[3]).sign(), 1);
        for p in Perm::all(4) {
            let mut acc = Perm::identity(4);
            for g in p.adjacent_word() {
                acc = acc.compose(&Perm::adjacent(4, g));
            }
            assert_eq!(acc, p);
        }
    }

    #[test]
    fn shuffle_counts() {
        assert_eq!(shuffles(1, 1).len(), 2);
        assert_eq!(shuffles(1, 2).len(), 3);
        assert_eq!(shuffles(2, 2).len(), 6);
        assert_eq!(shuffles(1, 1), vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn class_sizes_sum() {
        for n in 1..8 {
            let total: u128 = partitions(n).iter().map(|p| class_size(p)).sum();
            assert_eq!(total, factorial(n));
        }
    }

    #[test]
    fn block_perm_identity() {
        let (p, k) = block_permutation(&Perm::identity(3), 1, &Perm::identity(2));
        assert!(p.is_identity());
        assert_eq!(k, 1);
    }
}
