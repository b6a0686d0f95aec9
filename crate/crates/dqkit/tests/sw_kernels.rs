use std::f64::consts::PI;

use dqkit::sw_kernels::*;
use dqkit::weyl_numeric::hermite_functions;
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn gal(rng: &mut ChaCha8Rng) -> GalileiElement {
    GalileiElement::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))
}

fn nh(rng: &mut ChaCha8Rng, tau: f64) -> NhElement {
    NhElement::new(rng.random_range(-3.0..3.0), rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), tau)
}

fn close3(a: (f64, f64, f64), b: (f64, f64, f64), tol: f64) -> bool {
    (a.0 - b.0).abs() < tol && (a.1 - b.1).abs() < tol && (a.2 - b.2).abs() < tol
}

fn band_matrix(n: usize, seed: u64, hermitian: bool) -> DMatrix<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = DMatrix::from_fn(n, n, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    if hermitian {
        (&m + m.adjoint()) * c(0.5, 0.0)
    } else {
        m
    }
}

fn embed(a: &DMatrix<Complex64>, size: usize) -> DMatrix<Complex64> {
    let mut m = DMatrix::zeros(size, size);
    m.view_mut((0, 0), (a.nrows(), a.ncols())).copy_from(a);
    m
}

#[test]
fn galilei_group_axioms_on_random_triples() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let (g1, g2, g3) = (gal(&mut rng), gal(&mut rng), gal(&mut rng));
        let l = g1.compose(&g2).compose(&g3);
        let r = g1.compose(&g2.compose(&g3));
        assert!(close3((l.b, l.a, l.v), (r.b, r.a, r.v), 1e-12));
        let e = g1.inverse().compose(&g1);
        assert!(close3((e.b, e.a, e.v), (0.0, 0.0, 0.0), 1e-12));
        assert_eq!(GalileiElement::identity().compose(&g1), g1);
        let x = (rng.random_range(-2.0..2.0), 1.3, rng.random_range(-2.0..2.0));
        assert!(close3(g1.coadjoint(g2.coadjoint(x)), g1.compose(&g2).coadjoint(x), 1e-12));
        assert_eq!(g1.coadjoint(x).1, 1.3);
    }
}

#[test]
fn nh_group_axioms_on_random_triples() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let tau = 1.7;
    for _ in 0..1000 {
        let (g1, g2, g3) = (nh(&mut rng, tau), nh(&mut rng, tau), nh(&mut rng, tau));
        let l = g1.compose(&g2).compose(&g3);
        let r = g1.compose(&g2.compose(&g3));
        assert!(close3((l.b, l.a, l.v), (r.b, r.a, r.v), 1e-12));
        let e = g1.compose(&g1.inverse());
        assert!(close3((e.b, e.a, e.v), (0.0, 0.0, 0.0), 1e-12));
        let al: f64 = rng.random_range(-PI..PI);
        let x = (rng.random_range(-2.0..2.0), al.cos(), tau * al.sin());
        let y = g1.coadjoint(x);
        assert!((nh_orbit_invariant(y, tau) - 1.0).abs() < 1e-12);
        assert!(close3(g1.coadjoint(g2.coadjoint(x)), g1.compose(&g2).coadjoint(x), 1e-12));
        // the chart action agrees with the coadjoint action
        let p = NhOrbitPoint::from_dual(x, tau).unwrap();
        let q = NhOrbitPoint::from_dual(y, tau).unwrap();
        let a = p.act(&g1);
        let dal = (a.alpha - q.alpha).rem_euclid(2.0 * PI);
        assert!((a.j - q.j).abs() < 1e-12 && (dal < 1e-12 || 2.0 * PI - dal < 1e-12));
    }
}

#[test]
fn compose_example() {
    let g = GalileiElement::new(1.0, 0.0, 0.0).compose(&GalileiElement::new(0.0, 0.0, 1.0));
    assert_eq!(g, GalileiElement::new(1.0, 0.0, 1.0));
}

#[test]
fn galilei_section_property_and_isotropy() {
    let o = GalileiOrbitPoint::new(1.0, 0.0, 0.0);
    assert_eq!(galilei_section(0.0, 0.0, 1.0), GalileiElement::identity());
    let s = galilei_section(1.0, 2.0, 1.0);
    assert_eq!(s, GalileiElement::new(2.0, 0.0, -1.0));
    let x = GalileiOrbitPoint::from_dual(galilei_coadjoint(&s, o.to_dual())).unwrap();
    assert_eq!((x.p, x.q), (1.0, 2.0));
    let si = s.compose(&GalileiElement::new(0.0, 0.37, 0.0));
    let xi = GalileiOrbitPoint::from_dual(si.coadjoint(o.to_dual())).unwrap();
    assert_eq!((xi.p, xi.q), (1.0, 2.0));
}

#[test]
fn nh_section_with_isotropy_projects_to_point() {
    let o = NhOrbitPoint::new(2.0, 0.0, 0.0);
    let s = nh_section(-1.1, 0.6, 2.0).compose(&NhElement::new(0.0, 0.9, 0.0, 2.0));
    let x = NhOrbitPoint::from_dual(s.coadjoint(o.to_dual()), 2.0).unwrap();
    assert!((x.alpha + 1.1).abs() < 1e-14 && (x.j - 0.6).abs() < 1e-14);
}

#[test]
fn lie_brackets_from_group_commutators() {
    let tau = 2.0;
    let kh = nh_lie_bracket(2, 0, tau, 1e-4);
    assert!((kh[1] - 1.0).abs() < 1e-6 && kh[0].abs() < 1e-6 && kh[2].abs() < 1e-6, "{:?}", kh);
    let ph = nh_lie_bracket(1, 0, tau, 1e-4);
    assert!((ph[2] + 1.0 / (tau * tau)).abs() < 1e-6 && ph[0].abs() < 1e-6 && ph[1].abs() < 1e-6, "{:?}", ph);
    let pk = nh_lie_bracket(1, 2, tau, 1e-4);
    assert!(pk.iter().all(|x| x.abs() < 1e-6));
    assert_eq!(galilei_lie_bracket(2, 0, 1e-3), [0.0, 1.0, 0.0]);
}

#[test]
fn galilei_puir_is_unitary_and_projective() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let psi = LineState::wave_packet(24.0, 2048, 0.2, 1.1, -0.4).unwrap();
    let alpha = 1.3;
    assert!(galilei_puir(&GalileiElement::identity(), alpha, &psi).unwrap().distance(&psi) < 1e-14);
    for _ in 0..20 {
        let (g1, g2) = (gal(&mut rng), gal(&mut rng));
        let u2 = galilei_puir(&g2, alpha, &psi).unwrap();
        assert!((u2.norm() - psi.norm()).abs() < 1e-10);
        let lhs = galilei_puir(&g1, alpha, &u2).unwrap();
        let rhs = galilei_puir(&g1.compose(&g2), alpha, &psi).unwrap();
        let lambda = rhs.inner(&lhs) / rhs.inner(&rhs);
        assert!((lambda.norm() - 1.0).abs() < 1e-8);
        assert!(lhs.distance(&rhs.multiply(|_| lambda)) < 1e-8);
    }
}

#[test]
fn nh_puir_is_a_unitary_representation() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let tau = 1.4;
    let psi = CircleState::from_fn(8, 64, |t| c((t.cos()).exp() * 0.3, 0.1 * (2.0 * t).sin()));
    assert_eq!(nh_puir(&NhElement::identity(tau), &psi).unwrap(), psi);
    for _ in 0..20 {
        let (g1, g2) = (nh(&mut rng, tau), nh(&mut rng, tau));
        let u2 = nh_puir_to(&g2, &psi, 60);
        assert!((u2.norm() - psi.norm()).abs() < 1e-10);
        let lhs = nh_puir_to(&g1, &u2, 20);
        let rhs = nh_puir_to(&g1.compose(&g2), &psi, 20);
        let lambda = rhs.coeffs.iter().zip(&lhs.coeffs).map(|(a, b)| a.conj() * b).sum::<Complex64>() / rhs.norm().powi(2);
        assert!((lambda.norm() - 1.0).abs() < 1e-8);
        let d: f64 = lhs.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| (a - lambda * b).norm_sqr()).sum::<f64>().sqrt();
        assert!(d < 1e-8, "{}", d);
    }
}

#[test]
fn galilei_kernel_origin_and_covariance() {
    let k = GalileiKernel::parity(1.0);
    let psi = LineState::wave_packet(20.0, 1024, 0.5, 0.9, 0.8).unwrap();
    let o = k.apply(0.0, 0.0, &psi).unwrap();
    assert!(o.distance(&psi.reflect().multiply(|_| c(2.0, 0.0))) < 1e-14);
    for kern in [GalileiKernel::parity(1.0), GalileiKernel::sine(1.0), GalileiKernel::parity(0.6)] {
        let r = kern.covariance_residual(50, 99).unwrap();
        assert!(r < 1e-8, "{} {}", kern.id, r);
        assert!(kern.hermitian_defect(20, 0.7, -0.4) < 1e-8);
    }
}

#[test]
fn galilei_unit_trace() {
    for k in [GalileiKernel::parity(1.0), GalileiKernel::sine(1.0)] {
        for (p, q) in [(0.0, 0.0), (0.5, 1.0), (-1.0, -0.3)] {
            let t = k.windowed_unit_trace(p, q, 0.05);
            assert!((t - 1.0).norm() < 0.02, "{} {:?}", k.id, t);
        }
    }
    // independent oracle: heat-regularized trace sum_n e^{-eps n} <n|Omega(0)|n> = 2 / (1 + e^{-eps})
    let m = GalileiKernel::sine(1.0).hermite_matrix(40, 0.0, 0.0);
    let eps: f64 = 0.4;
    let t: Complex64 = (0..40).map(|n| m[(n, n)] * (-eps * n as f64).exp()).sum();
    let par = GalileiKernel::parity(1.0).hermite_matrix(40, 0.0, 0.0);
    let tp: Complex64 = (0..40).map(|n| par[(n, n)] * (-eps * n as f64).exp()).sum();
    assert!((tp.re - 2.0 / (1.0 + (-eps).exp())).abs() < 1e-6);
    assert!(t.im.abs() < 1e-10);
}

#[test]
fn galilei_phase_constraint_is_enforced() {
    let bad = GalileiKernel::custom("even-phase", 1.0, |w| 0.3 * w * w);
    assert!(matches!(bad.check_constraints(), Err(SwError::ConstraintViolated { .. })));
    assert!(galilei_traciality_checked(&bad, 16, (0.0, 0.0), &GalileiGrid::default_grid(), 4).is_err());
    let odd = GalileiKernel::custom("odd-phase", 1.0, |w| w.powi(3) - 2.0 * w);
    assert!(odd.check_constraints().is_ok());
}

#[test]
fn galilei_traciality_and_refinement() {
    let g = GalileiGrid::default_grid();
    for k in [GalileiKernel::parity(1.0), GalileiKernel::sine(1.0)] {
        let r = galilei_traciality_checked(&k, 24, (0.0, 0.0), &g, 4).unwrap();
        assert!(r.residual < 5e-2 && r.decreasing(), "{} {:?}", k.id, r);
    }
    let r = galilei_traciality(&GalileiKernel::parity(1.0), 24, (0.5, -0.3), &g, 4);
    assert!(r.residual < 5e-2 && r.decreasing());
    // a grid too coarse for the basis is flagged
    let coarse = GalileiGrid { half_width: 6.0, step: 0.6 };
    assert!(matches!(galilei_traciality_checked(&GalileiKernel::parity(1.0), 24, (0.0, 0.0), &coarse, 4), Err(SwError::NotConverged { .. })));
}

#[test]
fn galilei_symbols_and_round_trip() {
    let k = GalileiKernel::parity(1.0);
    let g = GalileiGrid::default_grid();
    let size = 24;
    let pts = [(0.0, 0.0), (0.4, -0.9), (1.2, 0.3)];
    // identity, read through the taper
    let f = hermite_taper(64);
    let id = DMatrix::from_fn(64, 64, |i, j| if i == j { c(f[i] * f[i], 0.0) } else { c(0.0, 0.0) });
    for w in galilei_symbol(&k, &id, &pts) {
        assert!((w - 1.0).norm() < 1e-8, "{}", w);
    }
    let h = embed(&band_matrix(4, 3, true), size);
    for w in galilei_symbol(&GalileiKernel::sine(1.0), &h, &pts) {
        assert!(w.im.abs() < 1e-10);
    }
    let a = embed(&band_matrix(4, 4, false), size);
    let sym = galilei_symbol(&k, &a, &g.points());
    let back = galilei_dequantize(&k, &sym, &g, size).unwrap();
    let rt = (back.view((0, 0), (4, 4)) - a.view((0, 0), (4, 4))).norm() / a.norm();
    assert!(rt < 1e-4, "{}", rt);
}

#[test]
fn galilei_lemmas() {
    let g = GalileiGrid::default_grid();
    for k in [GalileiKernel::parity(1.0), GalileiKernel::sine(1.0)] {
        let comm = galilei_lemma31(&k, 16);
        let direct = k.covariance_residual(10, 1).unwrap();
        assert!(comm < 1e-8 && direct < 1e-8);
    }
    let k = GalileiKernel::parity(1.0);
    let xs = [(0.0, 0.0), (0.5, -0.3), (-1.0, 0.7)];
    let full = galilei_reproducing_residual(&k, 24, &xs, &g, 4);
    let origin = galilei_reproducing_residual(&k, 24, &xs[..1], &g, 4);
    let trac = galilei_traciality_residual(&k, 24, (0.0, 0.0), &g, 4);
    assert!(full < 5e-2 && origin <= full && full <= 2.0 * origin.max(1e-12) + 1e-6);
    assert!(origin <= 2.0 * trac && trac <= 2.0 * origin);
}

#[test]
fn nh_profile_constraints() {
    let (conj, norm) = NhKernel::default_profile(1.0).constraint_residuals().unwrap();
    assert!(conj < 1e-12 && norm < 1e-12);
    assert!(NhKernel::default_profile(1.0).check_constraints().is_ok());
    // pointwise oracle
    for i in 0..1024 {
        let t = -PI + 2.0 * PI * i as f64 / 1024.0;
        let a = |t: f64| NhProfile::Default.eval(t);
        assert!((a(t).norm_sqr() + a(t + PI).norm_sqr() - 4.0 * t.cos().abs()).abs() < 1e-12);
    }
    assert!(NhKernel::parity(1.0).check_constraints().is_err());
    let (_, n) = NhKernel::parity(1.0).constraint_residuals().unwrap();
    assert!(n > 1.0);
    assert!(NhKernel::shift_pi(1.0).constraint_residuals().is_none());
}

#[test]
fn nh_kernel_hermitian_and_covariance() {
    for k in NhKernel::candidates(1.0) {
        assert!(k.hermitian_defect(0.8, -1.2, 16) < 1e-8, "{}", k.id);
    }
    for tau in [1.0, 2.5] {
        let d = NhKernel::default_profile(tau).covariance_residual(50, 17);
        assert!(d < 1e-6, "{}", d);
    }
    assert!(NhKernel::parity(1.0).covariance_residual(50, 17) < 1e-6);
    assert!(NhKernel::shift_pi(1.0).covariance_residual(50, 17) > 0.5);
    assert!(NhKernel::reflect_pi(1.0).covariance_residual(50, 17) > 0.5);
}

#[test]
fn nh_lemma31_equivalence_on_all_candidates() {
    let tol = 1e-6;
    for k in NhKernel::candidates(1.0) {
        let comm = k.lemma31_residual();
        let direct = k.covariance_residual(50, 21);
        let agree = (comm < tol && direct < tol) || (comm > 10.0 * tol && direct > 10.0 * tol);
        assert!(agree, "{}: commutator {} direct {}", k.id, comm, direct);
    }
}

#[test]
fn nh_traciality_of_candidates() {
    let q = NhQuadrature::default_quadrature();
    let r = nh_traciality_checked(&NhKernel::default_profile(1.0), 0.0, &q).unwrap();
    assert!(r.residual < 5e-2 && r.decreasing(), "{:?}", r);
    let p = nh_traciality(&NhKernel::parity(1.0), 0.0, &q).unwrap();
    assert!(p.residual > 0.5);
    assert!(nh_traciality_checked(&NhKernel::parity(1.0), 0.0, &q).is_err());
    assert!(nh_traciality(&NhKernel::shift_pi(1.0), 0.0, &q).is_err());
    let rich = nh_traciality_richardson(&NhKernel::default_profile(1.0), 0.0, &q).unwrap();
    assert!(rich < r.refined_residual);
}

#[test]
fn nh_reproducing_kernel_tracks_traciality() {
    let q = NhQuadrature::default_quadrature();
    let xs = [(0.0, 0.0), (1.3, 0.5), (-0.7, 2.0)];
    for k in [NhKernel::default_profile(1.0), NhKernel::parity(1.0)] {
        let full = nh_reproducing_residual(&k, &xs, &q).unwrap();
        let origin = nh_reproducing_residual(&k, &xs[..1], &q).unwrap();
        let trac = nh_traciality_residual(&k, 0.0, &q).unwrap();
        assert!(origin <= 2.0 * trac && trac <= 2.0 * origin, "{} {} {}", k.id, origin, trac);
        assert!(full <= 2.0 * origin && origin <= 2.0 * full);
    }
    assert!(nh_reproducing_residual(&NhKernel::default_profile(1.0), &xs, &q).unwrap() < 5e-2);
    assert!(nh_reproducing_residual(&NhKernel::parity(1.0), &xs, &q).unwrap() > 0.5);
}

#[test]
fn nh_symbols() {
    let k = NhKernel::default_profile(1.0);
    for j in [0.0, 0.8, -2.0] {
        let w = nh_identity_symbol(&k, j, 50.0).unwrap();
        assert!((w - 1.0).norm() < 5e-3, "{}", w);
    }
    let h = band_matrix(7, 8, true);
    for (j, al) in [(0.3, 0.2), (-1.5, 2.9)] {
        assert!(nh_symbol(&k, &h, j, al).im.abs() < 1e-10);
    }
    // symbol as a trace, against the kernel applied to basis states
    let a = band_matrix(5, 9, false);
    let (j, al) = (0.7, -0.4);
    let mut tr = c(0.0, 0.0);
    for s in -2i64..=2 {
        let om = k.apply(j, al, &CircleState::mode(2, s), 2);
        for r in -2i64..=2 {
            tr += a[((s + 2) as usize, (r + 2) as usize)] * om.coeff(r);
        }
    }
    assert!((tr - nh_symbol(&k, &a, j, al)).norm() < 1e-12);
}

#[test]
fn nh_round_trip_and_trikernel() {
    let k = NhKernel::default_profile(1.0);
    let a = band_matrix(5, 31, false);
    let b = band_matrix(5, 32, false);
    let q = NhQuadrature { j_max: 80.0, ..NhQuadrature::default_quadrature() };
    let back = nh_dequantize_band(&k, &a, &q, 2, true).unwrap();
    let rt = (&back - &a).norm() / a.norm();
    assert!(rt < 1e-4, "{}", rt);

    let xs = [(0.0, 0.0), (0.5, 1.0), (-1.2, -2.0), (2.0, 0.3)];
    let st = nh_trikernel_star(&k, &a, &b, &xs, &q, TRIKERNEL_BUDGET).unwrap();
    let ab = &a * &b;
    let want: Vec<Complex64> = xs.iter().map(|&(j, al)| nh_symbol(&k, &ab, j, al)).collect();
    let num: f64 = st.iter().zip(&want).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
    let den: f64 = want.iter().map(|y| y.norm_sqr()).sum::<f64>().sqrt();
    assert!(num / den < 1e-3, "{}", num / den);

    // W_A * W_I = W_A for the band identity
    let id = DMatrix::<Complex64>::identity(5, 5);
    let st = nh_trikernel_star(&k, &a, &id, &xs, &q, TRIKERNEL_BUDGET).unwrap();
    for (s, &(j, al)) in st.iter().zip(&xs) {
        assert!((s - nh_symbol(&k, &a, j, al)).norm() < 1e-2 * a.norm());
    }

    let (lhs, rhs) = nh_average_identity(&k, &a, &b, &q).unwrap();
    assert!((lhs - rhs).norm() < 2e-2 * rhs.norm().max(1.0), "{} {}", lhs, rhs);

    assert!(matches!(nh_trikernel_star(&k, &a, &b, &xs, &q, 1000), Err(SwError::CostExceeded { .. })));
}

#[test]
fn nh_general_dequantize_matches_band_route() {
    let k = NhKernel::default_profile(1.0);
    let a = band_matrix(3, 40, true);
    let q = NhQuadrature { j_max: 10.0, ..NhQuadrature::default_quadrature() };
    let direct = nh_dequantize(&k, |j, al| nh_symbol(&k, &a, j, al), &q, 16, 1);
    let fast = nh_dequantize_band(&k, &a, &q, 1, false).unwrap();
    assert!((&direct - &fast).norm() < 1e-10, "{}", (&direct - &fast).norm());
}

#[test]
fn report_json_schema() {
    let q = NhQuadrature::default_quadrature();
    let r = nh_traciality(&NhKernel::default_profile(1.0), 0.0, &q).unwrap();
    let rep = AxiomReport::new("nh-default", "traciality", r.residual, q.describe()).with_refined(r.refined_residual);
    let v: serde_json::Value = serde_json::from_str(&rep.to_json()).unwrap();
    assert_eq!(v["kernel_id"], "nh-default");
    assert!(v["refined_residual"].as_f64().unwrap() < v["residual"].as_f64().unwrap());
}

#[test]
fn hermite_matrix_agrees_with_line_quadrature() {
    // <h_a| Omega |h_b> computed from the line action
    let k = GalileiKernel::parity(0.8);
    let (p, q) = (-0.6, 0.9);
    let m = k.hermite_matrix(6, p, q);
    let h = |j: usize| LineState::from_fn(16.0, 1024, |w| c(hermite_functions(6, 1.0, w)[j], 0.0)).unwrap();
    for (a, b) in [(0, 0), (2, 5), (4, 1)] {
        let elt = h(a).inner(&k.apply(p, q, &h(b)).unwrap());
        assert!((elt - m[(a, b)]).norm() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn nh_covariance_holds_pointwise(b in -3.0..3.0f64, a in -1.5..1.5f64, v in -1.5..1.5f64, j in -1.5..1.5f64, al in -3.0..3.0f64) {
        let k = NhKernel::default_profile(1.3);
        let psi = CircleState::from_fn(5, 32, |t| c(t.cos(), 0.4 * t.sin()));
        let r = k.covariance_at(&NhElement::new(b, a, v, 1.3), &NhOrbitPoint::new(1.3, j, al), &psi);
        prop_assert!(r < 1e-6);
    }

    #[test]
    fn galilei_kernel_is_an_involution_up_to_four(p in -1.0..1.0f64, q in -1.0..1.0f64) {
        // Omega(x)^2 = 4 for phi = 0
        let k = GalileiKernel::parity(1.0);
        let psi = LineState::wave_packet(20.0, 1024, 0.1, 1.0, 0.3).unwrap();
        let twice = k.apply(p, q, &k.apply(p, q, &psi).unwrap()).unwrap();
        prop_assert!(twice.distance(&psi.multiply(|_| c(4.0, 0.0))) < 1e-10);
    }

    #[test]
    fn nh_orbit_invariant_is_preserved(b in -5.0..5.0f64, a in -3.0..3.0f64, v in -3.0..3.0f64, al in -3.1..3.1f64, h in -2.0..2.0f64) {
        let tau = 0.7;
        let x = (h, al.cos(), tau * al.sin());
        let y = NhElement::new(b, a, v, tau).coadjoint(x);
        prop_assert!((nh_orbit_invariant(y, tau) - 1.0).abs() < 1e-12);
    }
}
