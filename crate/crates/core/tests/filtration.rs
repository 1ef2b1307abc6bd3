use std::collections::BTreeMap;

use proptest::prelude::*;
use stratops::cobar::liec;
use stratops::filtration::*;
use stratops::operads::{check_axioms, endomorphism_operad_dg, EndOperad, GradedSpace, Operad, DEFAULT_END_CAP};
use stratops::qlinalg::{homology, q, SparseMatrix, SparseVec};

/// `⟨1, x, y⟩` with `|x| = 1`, `Q x = y`, unit 1 and all other products 0.
fn cdga_end(max_arity: usize) -> EndOperad {
    let space = GradedSpace::new(vec![("1".into(), 0), ("x".into(), 1), ("y".into(), 0)]);
    let qm = SparseMatrix::from_triples(3, 3, vec![(2, 1, q(1))]).unwrap();
    endomorphism_operad_dg(space, qm, max_arity, DEFAULT_END_CAP).unwrap()
}

fn cdga_product(end: &EndOperad) -> SparseVec {
    let mut m2 = SparseVec::new();
    for (i, j, o) in [(0, 0, 0), (0, 1, 1), (1, 0, 1), (0, 2, 2), (2, 0, 2)] {
        m2.add_at(end.encode(o, &[i, j]), &q(1));
    }
    m2
}

/// Graded dimension of `Hom(H^{⊗n}, H)` from the graded dimension of `H`.
fn hom_dims(h: &BTreeMap<i64, usize>, n: usize) -> BTreeMap<i64, usize> {
    let mut tensor = BTreeMap::from([(0i64, 1usize)]);
    for _ in 0..n {
        let mut next = BTreeMap::new();
        for (&a, &x) in &tensor {
            for (&b, &y) in h {
                *next.entry(a + b).or_insert(0) += x * y;
            }
        }
        tensor = next;
    }
    let mut out = BTreeMap::new();
    for (&o, &x) in h {
        for (&i, &y) in &tensor {
            *out.entry(o - i).or_insert(0) += x * y;
        }
    }
    out
}

#[test]
fn toy_moduli_is_an_operad_with_the_expected_pages() {
    let f = toy_moduli();
    let report = check_axioms(f.base(), 3);
    assert!(report.passed(), "{:?}", report.violations);
    let e0 = er_term(&f, 0).unwrap();
    assert_eq!(e0.dims(3), BTreeMap::from([((0, 0), 3), ((1, 0), 3), ((1, 1), 2)]));
    let e1 = er_term(&f, 1).unwrap();
    // E¹ of the four-pointed sphere: (0,0):3, (1,0):2, (1,1):1
    assert_eq!(e1.dims(3), BTreeMap::from([((0, 0), 3), ((1, 0), 2), ((1, 1), 1)]));
    assert_eq!(e1.dims(2), BTreeMap::from([((0, 0), 1)]));
    let strata = stratops::strata::e1_table(0, 4, &Default::default(), Default::default()).unwrap();
    let as_usize: BTreeMap<_, _> = strata.entries.iter().map(|(&k, &v)| (k, v as usize)).collect();
    assert_eq!(e1.dims(3), as_usize);
    for r in 0..4 {
        let e = er_term(&f, r).unwrap();
        assert!(e.differential_squares_to_zero());
        let ax = check_axioms(&e, 3);
        assert!(ax.passed(), "E^{r}: {:?}", ax.violations);
        let next = er_term(&f, r + 1).unwrap();
        for n in 1..=3 {
            assert_eq!(e.homology_dims(n), next.dims(n), "E^{} from E^{r}, arity {n}", r + 1);
        }
    }
    // E² is the homology of the sphere, points and top cell
    let e2 = er_term(&f, 2).unwrap();
    assert_eq!(e2.dims(3), BTreeMap::from([((0, 0), 1), ((1, 1), 1)]));
    assert_eq!(degeneration_page(&f).unwrap(), 2);
}

#[test]
fn trivial_filtration_gives_the_base_on_page_zero() {
    let end = cdga_end(2);
    let levels = (1..=2).map(|n| vec![0; end.dim(n)]).collect();
    let f = FilteredOperad::new(end.clone(), levels).unwrap();
    let e0 = er_term(&f, 0).unwrap();
    for n in 1..=2 {
        assert_eq!(e0.total_dim(n), end.dim(n));
    }
    // with one jump, ∂⁰ is ∂ and E¹ is the homology
    let e1 = er_term(&f, 1).unwrap();
    assert_eq!(e1.total_dim(2), 1);
}

#[test]
fn degree_filtration_on_end_degenerates_at_two() {
    let end = cdga_end(3);
    let f = degree_filtered_end(end.clone()).unwrap();
    let e1 = er_term(&f, 1).unwrap();
    let e2 = er_term(&f, 2).unwrap();
    // H(V) = ⟨1⟩ in degree 0
    let h = BTreeMap::from([(0i64, 1usize)]);
    for n in 1..=3 {
        assert_eq!(e1.total_dim(n), end.dim(n));
        assert!(e1.dims(n).keys().all(|&(_, q)| q == 0));
        let e2_by_degree: BTreeMap<i64, usize> = e2.dims(n).into_iter().map(|((p, q), d)| (p + q, d)).collect();
        assert_eq!(e2_by_degree, hom_dims(&h, n));
        assert_eq!(e2.total_dim(n), 1);
    }
    // ∂¹ is induced by Q: homology of End_V(n) as a complex
    for n in 1..=2 {
        let degs: Vec<i64> = (0..end.dim(n)).map(|e| end.degree(n, e)).collect();
        let lo = *degs.iter().min().unwrap();
        let hi = *degs.iter().max().unwrap();
        let dims: Vec<usize> = (lo..=hi).map(|t| degs.iter().filter(|&&d| d == t).count()).collect();
        let idx: Vec<Vec<usize>> = (lo..=hi).map(|t| (0..end.dim(n)).filter(|&e| degs[e] == t).collect()).collect();
        let maps: Vec<SparseMatrix> = (1..dims.len())
            .map(|k| {
                let cols: Vec<SparseVec> = idx[k]
                    .iter()
                    .map(|&e| {
                        end.differential(n, e)
                            .iter()
                            .map(|(i, x)| (idx[k - 1].iter().position(|&j| j == i).unwrap(), x.clone()))
                            .collect()
                    })
                    .collect();
                SparseMatrix::from_columns(dims[k - 1], &cols)
            })
            .collect();
        let hom: usize = homology(dims, maps).unwrap().iter().sum();
        assert_eq!(hom, e2.total_dim(n));
    }
    assert!(check_axioms(&e1, 3).passed());
    assert!(check_axioms(&e2, 2).passed());
    assert_eq!(degeneration_page(&f).unwrap(), 2);
}

#[test]
fn dk_slices_and_certificates() {
    let f = toy_moduli();
    let e1 = er_term(&f, 1).unwrap();
    let d = suboperad_dk(&e1, 0);
    assert!(d.certificate.holds(), "{:?}", d.certificate);
    assert!(d.certificate.pairs_checked > 0);
    assert!(d.slices.iter().all(|s| s.q == 0));
    assert_eq!(d.slices.iter().filter(|s| s.arity == 3).map(|s| s.dim).sum::<usize>(), 5);
    for r in 0..3 {
        let e = er_term(&f, r).unwrap();
        for k in -2..=2 {
            assert!(suboperad_dk(&e, k).certificate.holds());
        }
    }
    let end = degree_filtered_end(cdga_end(3)).unwrap();
    let e2 = er_term(&end, 2).unwrap();
    assert!(suboperad_dk(&e2, 1).certificate.holds());
    for k in [-2i64, -1, 1, 2] {
        assert!(dk_on_moduli(k, 7).is_empty());
    }
    let middle = dk_on_moduli(0, 4);
    assert!(middle.iter().all(|s| s.q == 0));
    let arity4: Vec<usize> = middle.iter().filter(|s| s.arity == 4).map(|s| s.dim).collect();
    assert_eq!(arity4, vec![15, 20, 6]);
}

proptest! {
    #[test]
    fn dk_index_identity(r in 0i64..5, k in -3i64..4, p in -6i64..7, n in 1i64..8, p2 in -6i64..7, n2 in 1i64..8) {
        // solve for q when possible so that the hypotheses hold
        if r != 0 {
            let num = k * (n - 1) - (r - 1) * p;
            let num2 = k * (n2 - 1) - (r - 1) * p2;
            if num % r == 0 && num2 % r == 0 {
                let (q, q2) = (num / r, num2 / r);
                prop_assert_eq!(dk_defect(r, k, p, q, n), 0);
                prop_assert_eq!(dk_defect(r, k, p + p2, q + q2, n + n2 - 1), 0);
            }
        }
        prop_assert!(dk_identity(r, k, (p, 0, n), (p2, 0, n2)));
    }
}

#[test]
fn filtered_algebra_checks() {
    let f = toy_moduli();
    let end = cdga_end(3);
    let m2 = cdga_product(&end);
    let a = toy_moduli_algebra(end.clone(), m2.clone()).unwrap();
    let report = check_filtered_algebra(&f, &a).unwrap();
    assert!(report.is_morphism(), "{:?}", report.morphism_violations);
    assert!(report.preserves_filtration());

    // E¹[V] is an algebra over E¹
    let fe = degree_filtered_end(end.clone()).unwrap();
    let checks = check_induced_algebra(&er_term(&f, 1).unwrap(), &er_term(&fe, 1).unwrap(), &a).unwrap();
    assert!(checks > 0);

    // one violating assignment: the upper hemisphere sent to a degree-2 map
    let space = GradedSpace::new(vec![("a".into(), 0), ("b".into(), 2)]);
    let big = endomorphism_operad_dg(space, SparseMatrix::zero(2, 2), 3, DEFAULT_END_CAP).unwrap();
    let mut bad = toy_moduli_algebra(big.clone(), SparseVec::new()).unwrap();
    bad.mu[2][6] = SparseVec::unit(big.encode(1, &[0, 0, 0]));
    let report = check_filtered_algebra(&f, &bad).unwrap();
    assert!(!report.preserves_filtration());
    assert_eq!(report.witnesses.len(), 1);
    assert!(report.witnesses[0].starts_with("U"));

    // y·y = 1 breaks associativity, so μ(∂e) ≠ ∂μ(e) on an edge
    let mut skew = m2.clone();
    skew.add_at(end.encode(0, &[2, 2]), &q(1));
    let a = toy_moduli_algebra(end, skew).unwrap();
    assert!(!check_filtered_algebra(&f, &a).unwrap().is_morphism());
}

#[test]
fn pipeline_recovers_the_product() {
    let f = toy_moduli();
    let end = cdga_end(3);
    let m2 = cdga_product(&end);
    let a = toy_moduli_algebra(end, m2).unwrap();
    let lie = liec(3);
    let out = induce_cinf(&f, &a, 3, &lie).unwrap();
    assert!(out.passed(), "{:?} {:?}", out.ainf, out.cinf);
    let m = out.family.map(2).unwrap();
    assert_eq!(m.get(&[0, 1]), SparseVec::unit(1));
    assert!(out.family.map(3).is_none());
    assert_eq!(out.identification, vec![(2, vec![1], vec![1]), (3, vec![3, 2], vec![3, 2])]);

    // zero μ in positive arity: zero family
    let zero_end = cdga_end(3);
    let a = toy_moduli_algebra(zero_end, SparseVec::new()).unwrap();
    let out = induce_cinf(&f, &a, 3, &lie).unwrap();
    assert!(out.passed());
    assert!(out.family.arities().is_empty());

    // beyond the toy operad
    let a = toy_moduli_algebra(cdga_end(4), SparseVec::new()).unwrap();
    assert!(matches!(induce_cinf(&f, &a, 4, &liec(4)), Err(FiltrationError::Identification { .. })));
}

#[test]
fn pipeline_refuses_unfiltered_maps() {
    let f = toy_moduli();
    let space = GradedSpace::new(vec![("a".into(), 0), ("b".into(), 2)]);
    let big = endomorphism_operad_dg(space, SparseMatrix::zero(2, 2), 3, DEFAULT_END_CAP).unwrap();
    let mut bad = toy_moduli_algebra(big.clone(), SparseVec::new()).unwrap();
    bad.mu[2][6] = SparseVec::unit(big.encode(1, &[0, 0, 0]));
    bad.mu[2][7] = SparseVec::unit(big.encode(1, &[0, 0, 0]));
    let r = induce_cinf(&f, &bad, 3, &liec(3));
    assert!(r.is_err());
}

#[test]
fn toy_table_round_trip() {
    let f = toy_moduli();
    let json = f.to_table().to_json();
    let table = stratops::operads::OperadTable::from_json(&json).unwrap();
    let g = FilteredOperad::<stratops::operads::OperadTable>::from_table(table).unwrap();
    assert_eq!(er_term(&g, 1).unwrap().dims(3), er_term(&f, 1).unwrap().dims(3));
}
