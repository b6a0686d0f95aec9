use dqkit::phase_poly::*;
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn poly_strategy(max_deg: u32) -> impl Strategy<Value = PhasePoly> {
    prop::collection::vec((0..=max_deg, 0..=max_deg, -5i64..=5, 1i64..=4, -3i64..=3), 1..5).prop_map(move |terms| {
        let mut f = PhasePoly::zero(1);
        for (a, b, re, den, im) in terms {
            let (a, b) = if a + b > max_deg { (a.min(max_deg / 2), b.min(max_deg / 2)) } else { (a, b) };
            f.add_term(vec![a, b], CRat::new(rat(re, den), rat(im, den)));
        }
        f
    })
}

fn real_poly_strategy(max_deg: u32) -> impl Strategy<Value = PhasePoly> {
    poly_strategy(max_deg).prop_map(|f| {
        let mut g = PhasePoly::zero(1);
        for (e, c) in f.terms() {
            g.add_term(e.clone(), CRat::real(c.re.clone()));
        }
        g
    })
}

fn mat(rows: Vec<Vec<BigRational>>) -> RatMatrix {
    rows
}

fn deg(f: &PhasePoly) -> usize {
    f.degree().unwrap_or(0) as usize
}

fn series(f: &PhasePoly, n: usize) -> HbarSeries {
    HbarSeries::from_poly(f, n)
}

// term-by-term oracle for the iterated bidifferential: literal k-fold application of
// (d_q x d_p - d_p x d_q) on the tensor f x g before multiplying
fn bidiff_literal(f: &PhasePoly, g: &PhasePoly, k: u32) -> PhasePoly {
    let mut pairs = vec![(f.clone(), g.clone(), CRat::one())];
    for _ in 0..k {
        let mut next = Vec::new();
        for (a, b, c) in pairs {
            next.push((a.dq(0), b.dp(0), c.clone()));
            next.push((a.dp(0), b.dq(0), -c));
        }
        pairs = next;
    }
    let mut out = PhasePoly::zero(f.dim());
    for (a, b, c) in pairs {
        out = out.add(&a.mul(&b).scale(&c));
    }
    out
}

#[test]
fn spec_examples_star() {
    let q = PhasePoly::q(1, 1);
    let p = PhasePoly::p(1, 1);
    assert_eq!(poisson_bracket(&q, &p).unwrap(), PhasePoly::one(1));
    assert_eq!(poisson_bracket(&q.pow(2), &p.pow(2)).unwrap(), q.mul(&p).scale(&CRat::from_ints(4, 0)));
    assert_eq!(bidiff_power(&q.pow(2), &p.pow(2), 2).unwrap(), PhasePoly::constant(1, CRat::from_ints(4, 0)));
    assert!(bidiff_power(&q, &p, 2).unwrap().is_zero());
    let s = moyal_star(&series(&q, 1), &series(&p, 1)).unwrap();
    assert_eq!(s.pretty(), "q*p - (i/2)*hbar");
    let s = moyal_star(&series(&q.pow(2), 2), &series(&p.pow(2), 2)).unwrap();
    assert_eq!(s.coeff(0), &q.pow(2).mul(&p.pow(2)));
    assert_eq!(s.coeff(1), &q.mul(&p).scale(&CRat::from_ints(0, -2)));
    assert_eq!(s.coeff(2), &PhasePoly::constant(1, CRat::frac(-1, 2)));
    let b = moyal_bracket(&series(&q.pow(2), 2), &series(&p.pow(2), 2)).unwrap();
    assert_eq!(b.coeff(0), &q.mul(&p).scale(&CRat::from_ints(4, 0)));
    assert!(b.coeff(1).is_zero());
}

#[test]
fn canonical_commutator_is_exact() {
    let q = series(&PhasePoly::q(1, 1), 1);
    let p = series(&PhasePoly::p(1, 1), 1);
    let c = star_commutator(&q, &p).unwrap();
    assert!(c.coeff(0).is_zero());
    assert_eq!(c.coeff(1), &PhasePoly::constant(1, CRat::from_ints(0, -1)));
}

#[test]
fn symmetrization_examples() {
    let q = PhasePoly::q(1, 1);
    let p = PhasePoly::p(1, 1);
    assert_eq!(weyl_symmetrize(&q, Convention::Moyal).pretty(), "Q");
    assert_eq!(weyl_symmetrize(&q.mul(&p), Convention::Moyal).pretty(), "Q*P + (i/2)*hbar");
    assert_eq!(weyl_symmetrize(&q.pow(2).mul(&p), Convention::Moyal).pretty(), "Q^2*P + i*Q*hbar");
}

#[test]
fn symmetrization_agrees_with_word_rewriting() {
    for m in 0..=4u32 {
        for n in 0..=4u32 {
            let f = PhasePoly::qp(m, n, CRat::one());
            for conv in [Convention::Moyal, Convention::Deformation] {
                assert_eq!(weyl_symmetrize(&f, conv), weyl_symmetrize_by_words(m, n, conv), "q^{} p^{}", m, n);
            }
        }
    }
}

#[test]
fn homomorphism_on_all_monomial_pairs_to_degree_eight() {
    let mut monos = Vec::new();
    for d in 0..=8u32 {
        for a in 0..=d {
            monos.push((a, d - a));
        }
    }
    let mut count = 0;
    for &(a, b) in &monos {
        for &(c, d) in &monos {
            if a + b + c + d > 8 {
                continue;
            }
            let f = PhasePoly::qp(a, b, CRat::one());
            let g = PhasePoly::qp(c, d, CRat::one());
            assert!(weyl_homomorphism_check(&f, &g), "q^{}p^{} * q^{}p^{}", a, b, c, d);
            count += 1;
        }
    }
    assert!(count > 100);
}

#[test]
fn symplectic_examples() {
    let q = PhasePoly::q(1, 1);
    let p = PhasePoly::p(1, 1);
    let id = mat(vec![vec![rat(1, 1), rat(0, 1)], vec![rat(0, 1), rat(1, 1)]]);
    assert_eq!(symplectic_equivariance_residual(&q, &p, &id).unwrap(), 0.0);
    let rot = mat(vec![vec![rat(0, 1), rat(1, 1)], vec![rat(-1, 1), rat(0, 1)]]);
    assert_eq!(symplectic_equivariance_residual(&q, &p, &rot).unwrap(), 0.0);
    let shear = mat(vec![vec![rat(1, 1), rat(1, 1)], vec![rat(0, 1), rat(1, 1)]]);
    assert_eq!(symplectic_equivariance_residual(&q.pow(3), &p.pow(2).add(&q), &shear).unwrap(), 0.0);
    let bad = mat(vec![vec![rat(2, 1), rat(0, 1)], vec![rat(0, 1), rat(1, 1)]]);
    assert!(matches!(symplectic_equivariance_residual(&q, &p, &bad), Err(PolyError::NotSymplectic)));
}

#[test]
fn text_format_round_trips() {
    let f = PhasePoly::qp(2, 1, CRat::frac(3, 2)).add(&PhasePoly::constant(1, CRat::from_ints(0, -2)));
    let s = f.to_string();
    assert_eq!(s.parse::<PhasePoly>().unwrap(), f);
    let st = moyal_star(&series(&f, 2), &series(&PhasePoly::p(1, 1), 2)).unwrap();
    assert_eq!(st.to_string().parse::<HbarSeries>().unwrap(), st);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn star_is_associative(f in poly_strategy(6), g in poly_strategy(6), h in poly_strategy(6)) {
        let n = deg(&f) + deg(&g) + deg(&h);
        let (f, g, h) = (series(&f, n), series(&g, n), series(&h, n));
        let l = moyal_star(&moyal_star(&f, &g).unwrap(), &h).unwrap();
        let r = moyal_star(&f, &moyal_star(&g, &h).unwrap()).unwrap();
        prop_assert_eq!(l, r);
    }

    #[test]
    fn unit_is_neutral(f in poly_strategy(5)) {
        let n = deg(&f);
        let one = series(&PhasePoly::one(1), n);
        prop_assert_eq!(moyal_star(&one, &series(&f, n)).unwrap(), series(&f, n));
        prop_assert_eq!(moyal_star(&series(&f, n), &one).unwrap(), series(&f, n));
    }

    #[test]
    fn semiclassical_limit(f in poly_strategy(5), g in poly_strategy(5)) {
        let n = deg(&f).min(deg(&g)).max(1);
        let c = star_commutator(&series(&f, n), &series(&g, n)).unwrap();
        prop_assert!(c.coeff(0).is_zero());
        prop_assert_eq!(c.coeff(1), &poisson_bracket(&f, &g).unwrap().scale(&CRat::from_ints(0, -1)));
    }

    #[test]
    fn quadratic_observables_act_as_derivations(a in poly_strategy(2), f in poly_strategy(4), g in poly_strategy(4)) {
        let n = deg(&a) + deg(&f) + deg(&g) + 1;
        let (sa, sf, sg) = (series(&a, n), series(&f, n), series(&g, n));
        let fg = moyal_star(&sf, &sg).unwrap();
        let lhs = moyal_bracket(&sa, &fg).unwrap();
        let af = moyal_bracket(&sa, &sf).unwrap();
        let ag = moyal_bracket(&sa, &sg).unwrap();
        let rhs = moyal_star(&af, &sg.with_order(af.order())).unwrap()
            .try_add(&moyal_star(&sf.with_order(ag.order()), &ag).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(af.coeff(0), &poisson_bracket(&a, &f).unwrap());
        for k in 1..=af.order() {
            prop_assert!(af.coeff(k).is_zero());
        }
    }

    #[test]
    fn real_inputs_alternate_real_and_imaginary(f in real_poly_strategy(5), g in real_poly_strategy(5)) {
        let n = deg(&f).min(deg(&g));
        let s = moyal_star(&series(&f, n), &series(&g, n)).unwrap();
        for k in 0..=n {
            for c in s.coeff(k).terms().values() {
                if k % 2 == 0 { prop_assert!(c.is_real()); } else { prop_assert!(c.is_imaginary()); }
            }
        }
    }

    #[test]
    fn bidiff_matches_literal_iteration(f in poly_strategy(4), g in poly_strategy(4), k in 0u32..5) {
        prop_assert_eq!(bidiff_power(&f, &g, k).unwrap(), bidiff_literal(&f, &g, k));
    }

    #[test]
    fn poisson_bracket_is_antisymmetric_and_jacobi(f in poly_strategy(3), g in poly_strategy(3), h in poly_strategy(3)) {
        let pb = |a: &PhasePoly, b: &PhasePoly| poisson_bracket(a, b).unwrap();
        prop_assert_eq!(pb(&f, &g), pb(&g, &f).neg());
        let j = pb(&f, &pb(&g, &h)).add(&pb(&g, &pb(&h, &f))).add(&pb(&h, &pb(&f, &g)));
        prop_assert!(j.is_zero());
    }

    #[test]
    fn homomorphism_for_random_pairs(f in poly_strategy(4), g in poly_strategy(4)) {
        prop_assert!(weyl_homomorphism_check(&f, &g));
    }

    #[test]
    fn shear_equivariance(f in poly_strategy(3), g in poly_strategy(3), s in -3i64..=3) {
        let m = mat(vec![vec![rat(1, 1), rat(s, 2)], vec![rat(0, 1), rat(1, 1)]]);
        prop_assert_eq!(symplectic_equivariance_residual(&f, &g, &m).unwrap(), 0.0);
    }
}
