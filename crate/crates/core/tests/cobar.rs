use stratops::cobar::*;
use stratops::operads::*;
use stratops::perm::factorial;
use stratops::strata::{e1_table, AutMode, BettiTable};

fn alternating(dims: &[usize]) -> i64 {
    dims.iter().enumerate().map(|(e, &d)| if e % 2 == 0 { d as i64 } else { -(d as i64) }).sum()
}

/// Homology concentrated in the top edge count (binary trees) with the
/// given dimension.
fn assert_top(h: &[usize], n: usize, dim: usize) {
    assert_eq!(h.len(), n - 1);
    assert_eq!(h[n - 2], dim, "{h:?}");
    assert_eq!(h.iter().sum::<usize>(), dim, "{h:?}");
}

#[test]
fn liec_resolves_comm() {
    let l = liec(6);
    for n in 2..=6 {
        let c = cobar_complex(&l, n).unwrap();
        assert_top(&c.homology(), n, 1);
        let sign = if n % 2 == 0 { 1 } else { -1 };
        assert_eq!(alternating(c.dims()), sign);
    }
    assert_eq!(cobar_complex(&l, 4).unwrap().dims(), &[6, 20, 15]);
}

#[test]
fn asc_resolves_assoc() {
    let a = asc(5);
    for n in 2..=5 {
        let h = cobar_complex(&a, n).unwrap().homology();
        assert_top(&h, n, factorial(n) as usize);
    }
}

#[test]
fn commc_resolves_lie() {
    let c = commc(6);
    for n in 2..=6 {
        let h = cobar_complex(&c, n).unwrap().homology();
        assert_top(&h, n, factorial(n - 1) as usize);
    }
}

#[test]
fn dims_match_the_middle_row() {
    // independent count: E¹_{p,0} of the (n+1)-pointed sphere via open Betti numbers
    let l = liec(6);
    for n in 2..=6 {
        let t = e1_table(0, n + 1, &BettiTable::new(), AutMode::default()).unwrap();
        let by_edges: Vec<usize> = (0..=n - 2).map(|e| t.get((n - 2 - e) as i64, 0) as usize).collect();
        assert_eq!(cobar_dims(&l, n), by_edges);
    }
}

#[test]
fn wrong_signs_are_detected() {
    let l = liec(5);
    for n in 4..=5 {
        assert!(matches!(
            cobar_complex_with(&l, n, SignConvention::Unsigned),
            Err(CobarError::NotAComplex { .. })
        ));
    }
    let a = asc(4);
    assert!(cobar_complex_with(&a, 4, SignConvention::Unsigned).is_err());
}

#[test]
fn cobar_operad_axioms() {
    let l = liec(4);
    let op = cobar_operad(&l, 4).unwrap();
    let r = check_axioms(&op, 4);
    assert!(r.passed(), "{:?}", &r.violations[..r.violations.len().min(3)]);
    assert!(r.checks > 1000);
    let faulty = SignFault { inner: &op, entry: (2, 1, 2, 0, 0) };
    assert!(!check_axioms(&faulty, 4).passed());
}

#[test]
fn cobar_file_round_trip() {
    let l = liec(4);
    let c = cobar_complex(&l, 4).unwrap();
    let file = c.to_file();
    let back: CobarComplexFile = serde_json::from_str(&serde_json::to_string(&file).unwrap()).unwrap();
    assert_eq!(back, file);
    assert_eq!(file.trees.iter().map(|t| t.len()).collect::<Vec<_>>(), vec![1, 10, 15]);
}
