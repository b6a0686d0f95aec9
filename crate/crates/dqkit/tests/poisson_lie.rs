use dqkit::poisson_lie::*;
use num_rational::BigRational;
use proptest::prelude::*;

fn g(i: usize) -> SklyaninPoly {
    SklyaninPoly::gen(i)
}

fn poly_strategy() -> impl Strategy<Value = SklyaninPoly> {
    prop::collection::vec((prop::array::uniform4(0u32..3), -4i64..5), 1..4).prop_map(|terms| {
        let mut p = SklyaninPoly::default();
        for (e, c) in terms {
            p.add_term(e, &rat(c, 1));
        }
        p
    })
}

fn word_strategy(max: usize) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..4, 1..=max)
}

#[test]
fn sl2_structure_and_representation() {
    assert!(sl2_jacobi_defects().iter().all(|x| x.is_zero()));
    assert!(rep_bracket_defects(&rho_h()).iter().all(|(_, m)| m.is_zero()));
    // the rotation matrix fails [X+, X-] = H
    let bad = rep_bracket_defects(&rotation_rho_h());
    assert!(bad.iter().any(|(n, m)| n == "[X+,X-]" && !m.is_zero()));
}

#[test]
fn schouten_bracket_of_standard_r() {
    let zero = TensorMatrix::<BigRational>::zero(4);
    assert!(schouten_bracket_rep(&zero).unwrap().is_zero());
    let r = r_hat();
    let rr = schouten_bracket_rep(&r).unwrap();
    assert!(!rr.is_zero());
    assert!(ad3_defects(&rr).iter().all(|m| m.is_zero()));
    assert_eq!(schouten_t_ratio(&r, &t_hat()), Some(rat(-1, 1)));
    assert!(matches!(schouten_bracket_rep(&t_hat()), Err(PlError::NotAntisymmetric)));
}

#[test]
fn sklyanin_table_matches_matrix_form() {
    let m = bracket_from_matrix(&r_hat());
    assert_eq!(m, generator_table());
    assert_eq!(sklyanin_bracket(&g(0), &g(3)).to_string(), "2*b*c");
    assert!(Coeff::is_zero(&sklyanin_bracket(&g(1), &g(2))));
    assert_eq!(sklyanin_bracket(&g(0), &g(1)).to_string(), "a*b");
    for x in 0..4 {
        assert!(Coeff::is_zero(&sklyanin_bracket(&SklyaninPoly::det(), &g(x))));
        for y in 0..4 {
            for z in 0..4 {
                assert!(Coeff::is_zero(&sklyanin_jacobi(&g(x), &g(y), &g(z))));
            }
        }
    }
}

#[test]
fn rq_from_twist_is_exact() {
    let rq = rq_symbolic().unwrap();
    assert_eq!(rq, explicit_rq(&RatFunc::q()));
    assert_eq!(rq.get(2, 1).to_string(), "q - q^-1");
    assert!(qybe_defect(&rq).is_zero());
    assert_eq!(qybe_residual(&TensorMatrix::<RatFunc>::identity(4)), 0.0);
    let u = unitarity_defect(&rq);
    let w = u.witness().unwrap();
    assert_eq!((w.row, w.col, w.value.as_str()), (0, 0, "q^2 - 1"));
    // the twist itself needs u; R_q does not
    let f = build_fhat(&Symbolic);
    assert!(f.entries().iter().any(|x| x.to_base().is_none()));
}

#[test]
fn series_pipeline_first_orders() {
    let s = Series::new(Series::DEFAULT_ORDER).unwrap();
    let f = build_fhat(&s);
    assert_eq!(series_coefficient(&f, 0), TensorMatrix::identity(4));
    // F = I - (h/2) r + O(h^2); no first-order t contribution survives
    assert_eq!(series_coefficient(&f, 1), r_hat().scale(&rat(-1, 2)));
    let r = build_rq(&s, &f).unwrap();
    assert_eq!(r, explicit_rq(&s.q()));
    let want = TensorMatrix::from_fn(4, |i, j| match (i, j) {
        (0, 0) | (3, 3) => rat(1, 1),
        (2, 1) => rat(2, 1),
        _ => rat(0, 1),
    });
    assert_eq!(series_coefficient(&r, 1), want);
    assert_eq!(want, TensorMatrix::flip().sub(&r_hat()));
    assert!(matches!(Series::new(1), Err(PlError::TruncationTooLow { .. })));
}

#[test]
fn numeric_mode_agrees() {
    for h in [0.0, 0.1, -0.7, 1.3] {
        let d = Numeric { h };
        let r = build_rq(&d, &build_fhat(&d)).unwrap();
        assert!(r.sub(&explicit_rq(&d.q())).max_magnitude() < 1e-13);
        assert!(qybe_residual(&r) < 1e-12);
        let u = unitarity_defect(&r).max_magnitude();
        assert_eq!(u == 0.0, h == 0.0, "{} {}", h, u);
    }
}

#[test]
fn rewriting_examples_and_confluence() {
    let rel = Relations::symbolic();
    let nf = |s: &str| nc_normalize(&parse_word(s).unwrap(), &rel).to_string();
    assert_eq!(nf("d*a"), "a*d - (q - q^-1)*b*c");
    assert_eq!(nf("b*a"), "q^-1*a*b");
    assert_eq!(nf("c*b"), "b*c");
    assert_eq!(nf("d*c*b*a"), nf("d*c*b*a"));
    assert!(confluence_failures(4, &rel).is_empty());
    let series = Relations::series(3).unwrap();
    assert!(confluence_failures(4, &series).is_empty());
}

#[test]
fn rtt_relations() {
    let rel = Relations::symbolic();
    let rq = rq_symbolic().unwrap();
    assert!(rtt_residual(&rq, &rel).iter().all(|p| p.is_zero()));
    let control = rtt_residual(&TensorMatrix::identity(4), &rel);
    assert!(control.iter().filter(|p| !p.is_zero()).count() >= 6);
    let one = Relations::new(rat(1, 1)).unwrap();
    assert!(rtt_residual(&TensorMatrix::identity(4), &one).iter().all(|p| p.is_zero()));
    // a specialized rational q works too
    let two = Relations::new(rat(2, 1)).unwrap();
    assert!(rtt_residual(&explicit_rq(&rat(2, 1)), &two).iter().all(|p| p.is_zero()));
    assert!(!rtt_residual(&explicit_rq(&rat(3, 1)), &two).iter().all(|p| p.is_zero()));
}

#[test]
fn quantum_determinant_is_central() {
    let rel = Relations::symbolic();
    assert!(quantum_determinant_central(&rel));
    assert_eq!(quantum_determinant(&rel).to_string(), "a*d - q*b*c");
    // ad - bc is not central for generic q
    let bad = nc_normalize_terms(vec![(RatFunc::one(), vec![0, 3]), (RatFunc::one().neg(), vec![1, 2])], &rel);
    let a = nc_normalize(&[0], &rel);
    assert_ne!(bad.mul(&a, &rel), a.mul(&bad, &rel));
    assert!(quantum_determinant_central(&Relations::new(rat(1, 1)).unwrap()));
}

#[test]
fn semiclassical_generators() {
    let rel = Relations::series(3).unwrap();
    for x in 0..4u8 {
        for y in 0..4u8 {
            let (got, want) = semiclassical_limit(x, y, &rel).unwrap();
            assert_eq!(got, want, "({}, {})", x, y);
        }
    }
    assert_eq!(semiclassical_limit(0, 3, &rel).unwrap().0.to_string(), "2*b*c");
    assert!(matches!(semiclassical_limit(0, 3, &Relations::series(2).unwrap()), Err(PlError::TruncationTooLow { .. })));
}

#[test]
fn report_checks_all_pass() {
    let all: Vec<PlReport> = classical_checks()
        .into_iter()
        .chain(quantum_checks(Series::DEFAULT_ORDER).unwrap())
        .chain(semiclassical_checks(Series::DEFAULT_ORDER).unwrap())
        .collect();
    for r in &all {
        assert!(r.passed(), "{:?}", r);
    }
    let js = serde_json::to_value(&all[0]).unwrap();
    for k in ["check_name", "mode", "residual", "witness"] {
        assert!(js.get(k).is_some());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sklyanin_jacobi_on_polynomials(f in poly_strategy(), h in poly_strategy(), k in poly_strategy()) {
        prop_assert!(Coeff::is_zero(&sklyanin_jacobi(&f, &h, &k)));
    }

    #[test]
    fn sklyanin_antisymmetric_and_det_casimir(f in poly_strategy(), h in poly_strategy()) {
        prop_assert_eq!(sklyanin_bracket(&f, &h), sklyanin_bracket(&h, &f).neg());
        prop_assert!(Coeff::is_zero(&sklyanin_bracket(&SklyaninPoly::det(), &f)));
    }

    #[test]
    fn normal_form_product_is_associative(x in word_strategy(3), y in word_strategy(3), z in word_strategy(3)) {
        let rel = Relations::symbolic();
        let (x, y, z) = (nc_normalize(&x, &rel), nc_normalize(&y, &rel), nc_normalize(&z, &rel));
        prop_assert_eq!(x.mul(&y, &rel).mul(&z, &rel), x.mul(&y.mul(&z, &rel), &rel));
    }

    #[test]
    fn semiclassical_limit_on_monomials(x in word_strategy(3), y in word_strategy(2)) {
        let rel = Relations::series(3).unwrap();
        let (f, h) = (nc_normalize(&x, &rel), nc_normalize(&y, &rel));
        let got = star_commutator_h1(&f, &h, &rel).unwrap();
        let want = sklyanin_bracket(&abelianize(&f, 0), &abelianize(&h, 0));
        prop_assert_eq!(got, want);
    }
}
