use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::function::gamma::ln_gamma;

use super::bessel::{bessel_cutoff, bessel_j_signed};
use super::circle::{block_norm, cos_matrix, CircleState};
use super::report::Refinement;
use super::{SwError, CONSTRAINT_SAMPLES, CONSTRAINT_TOL};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// `(b, a, v)` with characteristic time `tau`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NhElement {
    pub b: f64,
    pub a: f64,
    pub v: f64,
    pub tau: f64,
}

impl NhElement {
    pub fn new(b: f64, a: f64, v: f64, tau: f64) -> Self {
        NhElement { b, a, v, tau }
    }

    pub fn identity(tau: f64) -> Self {
        NhElement::new(0.0, 0.0, 0.0, tau)
    }

    /// `(b',a',v')(b,a,v) = (b'+b, a' cos(b/tau) + v' tau sin(b/tau) + a, v' cos(b/tau) - (a'/tau) sin(b/tau) + v)`.
    pub fn compose(&self, g: &NhElement) -> NhElement {
        let t = self.tau;
        let (s, c) = (g.b / t).sin_cos();
        NhElement::new(self.b + g.b, self.a * c + self.v * t * s + g.a, self.v * c - self.a / t * s + g.v, t)
    }

    pub fn inverse(&self) -> NhElement {
        let t = self.tau;
        let (s, c) = (self.b / t).sin_cos();
        NhElement::new(-self.b, -self.a * c + self.v * t * s, -self.v * c - self.a / t * s, t)
    }

    /// Coadjoint action on `(h, p, k)`.
    pub fn coadjoint(&self, x: (f64, f64, f64)) -> (f64, f64, f64) {
        let (h, p, k) = x;
        let t = self.tau;
        let (s, c) = (self.b / t).sin_cos();
        (h - self.v * p + self.a * k / (t * t), p * c - k / t * s, p * t * s + k * c)
    }

    /// Mode-space data of `U(g)`: `U_rs = e^{-i r b/tau} w_{r-s}`, `w_m = (-i)^m J_m(R) e^{-i m theta}`
    /// with `(R cos theta, R sin theta) = (a, v tau)`.
    fn puir_weights(&self) -> (usize, Vec<Complex64>) {
        let r = self.a.hypot(self.v * self.tau);
        let theta = (self.v * self.tau).atan2(self.a);
        let k = bessel_cutoff(r);
        let js = bessel_j_signed(k, r);
        let w = (0..=2 * k)
            .map(|i| {
                let m = i as i64 - k as i64;
                let mi = match m.rem_euclid(4) {
                    0 => Complex64::new(1.0, 0.0),
                    1 => Complex64::new(0.0, -1.0),
                    2 => Complex64::new(-1.0, 0.0),
                    _ => Complex64::new(0.0, 1.0),
                };
                mi * js[i] * Complex64::from_polar(1.0, -(m as f64) * theta)
            })
            .collect();
        (k, w)
    }

    /// Matrix of `U(g)` on modes `|r| <= out` (rows) and `|s| <= inp` (columns).
    pub fn puir_matrix(&self, out: usize, inp: usize) -> DMatrix<Complex64> {
        let (k, w) = self.puir_weights();
        let c = self.b / self.tau;
        DMatrix::from_fn(2 * out + 1, 2 * inp + 1, |i, j| {
            let r = i as i64 - out as i64;
            let s = j as i64 - inp as i64;
            let d = r - s;
            if d.unsigned_abs() as usize > k {
                ZERO
            } else {
                w[(d + k as i64) as usize] * Complex64::from_polar(1.0, -(r as f64) * c)
            }
        })
    }
}

pub fn nh_compose(g1: &NhElement, g2: &NhElement) -> NhElement {
    g1.compose(g2)
}

pub fn nh_coadjoint(g: &NhElement, x: (f64, f64, f64)) -> (f64, f64, f64) {
    g.coadjoint(x)
}

/// `p^2 + k^2 / tau^2`.
pub fn nh_orbit_invariant(x: (f64, f64, f64), tau: f64) -> f64 {
    x.1 * x.1 + x.2 * x.2 / (tau * tau)
}

fn wrap_angle(a: f64) -> f64 {
    let w = (a + PI).rem_euclid(2.0 * PI) - PI;
    if w >= PI {
        w - 2.0 * PI
    } else {
        w
    }
}

/// Point `(j, alpha)` of the cylinder `p^2 + k^2/tau^2 = 1`, `j = tau h`, `alpha in [-pi, pi)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NhOrbitPoint {
    pub tau: f64,
    pub j: f64,
    pub alpha: f64,
}

impl NhOrbitPoint {
    pub fn new(tau: f64, j: f64, alpha: f64) -> Self {
        NhOrbitPoint { tau, j, alpha: wrap_angle(alpha) }
    }

    pub fn to_dual(&self) -> (f64, f64, f64) {
        (self.j / self.tau, self.alpha.cos(), self.tau * self.alpha.sin())
    }

    /// Chart on the orbit `beta = 1`; other orbits are rejected.
    pub fn from_dual(x: (f64, f64, f64), tau: f64) -> Result<Self, SwError> {
        let beta = nh_orbit_invariant(x, tau);
        if (beta - 1.0).abs() > 1e-9 {
            return Err(SwError::BadParameter(format!("point lies on the orbit beta = {}, expected 1", beta)));
        }
        Ok(NhOrbitPoint::new(tau, tau * x.0, (x.2 / tau).atan2(x.1)))
    }

    /// `g . (j, alpha) = (j - v tau cos alpha + a sin alpha, alpha + b / tau)`.
    pub fn act(&self, g: &NhElement) -> NhOrbitPoint {
        let (s, c) = self.alpha.sin_cos();
        NhOrbitPoint::new(self.tau, self.j - g.v * g.tau * c + g.a * s, self.alpha + g.b / g.tau)
    }
}

/// `s(alpha, j) = (tau alpha, 0, 0)(0, 0, -j / tau) = (tau alpha, 0, -j / tau)`.
pub fn nh_section(alpha: f64, j: f64, tau: f64) -> NhElement {
    NhElement::new(tau * alpha, 0.0, -j / tau, tau)
}

/// `[U(g) psi](t) = e^{-i (a cos(t - b/tau) + v tau sin(t - b/tau))} psi(t - b/tau)` on modes `|r| <= out`.
pub fn nh_puir_to(g: &NhElement, psi: &CircleState, out: usize) -> CircleState {
    let (k, w) = g.puir_weights();
    let c = g.b / g.tau;
    let n = psi.cutoff as i64;
    let kk = k as i64;
    let coeffs = (-(out as i64)..=out as i64)
        .map(|r| {
            let lo = (r - kk).max(-n);
            let hi = (r + kk).min(n);
            let acc: Complex64 = (lo..=hi).map(|s| w[(r - s + kk) as usize] * psi.coeff(s)).sum();
            acc * Complex64::from_polar(1.0, -(r as f64) * c)
        })
        .collect();
    CircleState { cutoff: out, coeffs }
}

/// [`nh_puir_to`] on the input cutoff; errors when more than `1e-10` of the norm leaves it.
pub fn nh_puir(g: &NhElement, psi: &CircleState) -> Result<CircleState, SwError> {
    let k = bessel_cutoff(g.a.hypot(g.v * g.tau));
    let wide = nh_puir_to(g, psi, psi.cutoff + k);
    let inner: f64 = (-(psi.cutoff as i64)..=psi.cutoff as i64).map(|r| wide.coeff(r).norm_sqr()).sum();
    let tail = (wide.norm().powi(2) - inner).max(0.0).sqrt();
    if tail > 1e-10 * psi.norm().max(f64::MIN_POSITIVE) {
        return Err(SwError::ModeOverflow { tail });
    }
    Ok(nh_puir_to(g, psi, psi.cutoff))
}

/// Lie algebra bracket of two basis generators (`0 = H`, `1 = P`, `2 = K`) from the group
/// commutator `x y x^{-1} y^{-1}` of one-parameter subgroups at step `eps`, divided by `eps^2`.
pub fn nh_lie_bracket(x: usize, y: usize, tau: f64, eps: f64) -> [f64; 3] {
    let gen = |i: usize, t: f64| {
        let mut c = [0.0; 3];
        c[i] = t;
        NhElement::new(c[0], c[1], c[2], tau)
    };
    let comm = |e: f64| {
        let (gx, gy) = (gen(x, e), gen(y, e));
        let g = gx.compose(&gy).compose(&gx.inverse()).compose(&gy.inverse());
        [g.b / (e * e), g.a / (e * e), g.v / (e * e)]
    };
    // 2 c(eps/2) - c(eps) removes the O(eps) term
    let (c1, c2) = (comm(eps), comm(eps / 2.0));
    [2.0 * c2[0] - c1[0], 2.0 * c2[1] - c1[1], 2.0 * c2[2] - c1[2]]
}

/// Same as [`nh_lie_bracket`] for the Galilei group.
pub fn galilei_lie_bracket(x: usize, y: usize, eps: f64) -> [f64; 3] {
    use super::galilei::GalileiElement;
    let gen = |i: usize, t: f64| {
        let mut c = [0.0; 3];
        c[i] = t;
        GalileiElement::new(c[0], c[1], c[2])
    };
    let (gx, gy) = (gen(x, eps), gen(y, eps));
    let g = gx.compose(&gy).compose(&gx.inverse()).compose(&gy.inverse());
    [g.b / (eps * eps), g.a / (eps * eps), g.v / (eps * eps)]
}

/// Profile `a` of the covariant family `[Omega psi](t) = e^{2ij sin(t-alpha)} a(t-alpha) psi(2 alpha - t)`.
#[derive(Clone)]
pub enum NhProfile {
    /// `2 sqrt(cos t)` on `|t| < pi/2`, zero elsewhere.
    Default,
    /// `a = 2`, the plain parity `2 psi(-t)`.
    Parity,
    Custom(Arc<dyn Fn(f64) -> Complex64 + Send + Sync>),
}

impl NhProfile {
    pub fn eval(&self, t: f64) -> Complex64 {
        let t = wrap_angle(t);
        match self {
            NhProfile::Default => {
                let c = t.cos();
                if t.abs() < PI / 2.0 && c > 0.0 {
                    Complex64::new(2.0 * c.sqrt(), 0.0)
                } else {
                    ZERO
                }
            }
            NhProfile::Parity => Complex64::new(2.0, 0.0),
            NhProfile::Custom(f) => f(t),
        }
    }

    /// Fourier coefficients `a(t) = sum_k A(k) e^{ikt}` for `|k| <= kmax`, index `k + kmax`.
    fn coefficients(&self, kmax: usize) -> Vec<Complex64> {
        match self {
            NhProfile::Default => {
                let c = PI.sqrt() / (2.0 * 2f64.sqrt());
                (0..=2 * kmax)
                    .map(|i| {
                        let k = (i as i64 - kmax as i64).unsigned_abs() as f64;
                        let v = if k == 0.0 {
                            c / ln_gamma(1.25).exp().powi(2)
                        } else {
                            // 1/Gamma(5/4 - k/2) by reflection
                            c * (PI * (1.25 - k / 2.0)).sin() * (ln_gamma(k / 2.0 - 0.25) - ln_gamma(k / 2.0 + 1.25)).exp() / PI
                        };
                        Complex64::new(v, 0.0)
                    })
                    .collect()
            }
            NhProfile::Parity => (0..=2 * kmax).map(|i| if i == kmax { Complex64::new(2.0, 0.0) } else { ZERO }).collect(),
            NhProfile::Custom(f) => {
                let n = 1 << 15;
                let vals: Vec<(f64, Complex64)> = (0..n)
                    .map(|i| {
                        let t = -PI + 2.0 * PI * i as f64 / n as f64;
                        (t, f(t))
                    })
                    .collect();
                (0..=2 * kmax)
                    .map(|i| {
                        let k = i as f64 - kmax as f64;
                        vals.iter().map(|(t, v)| v * Complex64::from_polar(1.0, -k * t)).sum::<Complex64>() / n as f64
                    })
                    .collect()
            }
        }
    }

    /// Worst violation of `a(-t) = conj a(t)` and `|a(t)|^2 + |a(t+pi)|^2 = 4|cos t|` on 1024 points.
    pub fn constraint_residuals(&self) -> (f64, f64) {
        let n = CONSTRAINT_SAMPLES;
        let (mut conj, mut norm) = (0.0f64, 0.0f64);
        for i in 0..n {
            let t = -PI + 2.0 * PI * i as f64 / n as f64;
            conj = conj.max((self.eval(-t) - self.eval(t).conj()).norm());
            norm = norm.max((self.eval(t).norm_sqr() + self.eval(t + PI).norm_sqr() - 4.0 * t.cos().abs()).abs());
        }
        (conj, norm)
    }
}

/// Kernel candidates on the cylinder.
#[derive(Clone)]
pub enum NhKind {
    Covariant(NhProfile),
    /// `A psi(t) = 2 psi(t + pi)` transported by the section.
    ShiftPi,
    /// `A psi(t) = 2 psi(pi - t)` transported by the section.
    ReflectPi,
}

#[derive(Clone)]
pub struct NhKernel {
    pub id: String,
    pub tau: f64,
    pub kind: NhKind,
    kmax: usize,
    ahat: Arc<Vec<Complex64>>,
}

impl fmt::Debug for NhKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NhKernel").field("id", &self.id).field("tau", &self.tau).finish()
    }
}

const AHAT_MAX: usize = 8192;

impl NhKernel {
    fn build(id: &str, tau: f64, kind: NhKind) -> Self {
        let ahat = match &kind {
            NhKind::Covariant(p) => {
                let kmax = if matches!(p, NhProfile::Custom(_)) { 1024 } else { AHAT_MAX };
                (kmax, p.coefficients(kmax))
            }
            _ => (0, vec![ZERO]),
        };
        NhKernel { id: id.into(), tau, kind, kmax: ahat.0, ahat: Arc::new(ahat.1) }
    }

    pub fn default_profile(tau: f64) -> Self {
        NhKernel::build("nh-default", tau, NhKind::Covariant(NhProfile::Default))
    }

    /// `2 psi(-t)`: covariant, not tracial.
    pub fn parity(tau: f64) -> Self {
        NhKernel::build("nh-parity", tau, NhKind::Covariant(NhProfile::Parity))
    }

    /// `2 psi(t + pi)`: not covariant.
    pub fn shift_pi(tau: f64) -> Self {
        NhKernel::build("nh-shift-pi", tau, NhKind::ShiftPi)
    }

    /// `2 psi(pi - t)`: not covariant.
    pub fn reflect_pi(tau: f64) -> Self {
        NhKernel::build("nh-reflect-pi", tau, NhKind::ReflectPi)
    }

    pub fn custom(id: &str, tau: f64, a: impl Fn(f64) -> Complex64 + Send + Sync + 'static) -> Self {
        NhKernel::build(id, tau, NhKind::Covariant(NhProfile::Custom(Arc::new(a))))
    }

    /// The default kernel and the three rejected candidates.
    pub fn candidates(tau: f64) -> Vec<NhKernel> {
        vec![NhKernel::default_profile(tau), NhKernel::parity(tau), NhKernel::shift_pi(tau), NhKernel::reflect_pi(tau)]
    }

    pub fn is_covariant_form(&self) -> bool {
        matches!(self.kind, NhKind::Covariant(_))
    }

    fn profile(&self) -> Result<&NhProfile, SwError> {
        match &self.kind {
            NhKind::Covariant(p) => Ok(p),
            _ => Err(SwError::BadParameter(format!("{} is not of the covariant profile form", self.id))),
        }
    }

    /// Fourier coefficient `A(k)` of the profile.
    pub fn ahat(&self, k: i64) -> Complex64 {
        if k.unsigned_abs() as usize > self.kmax {
            ZERO
        } else {
            self.ahat[(k + self.kmax as i64) as usize]
        }
    }

    /// `(conjugation, norm)` constraint residuals; `None` for the section-transported candidates.
    pub fn constraint_residuals(&self) -> Option<(f64, f64)> {
        self.profile().ok().map(|p| p.constraint_residuals())
    }

    pub fn check_constraints(&self) -> Result<(), SwError> {
        match self.constraint_residuals() {
            Some((c, n)) if c > CONSTRAINT_TOL || n > CONSTRAINT_TOL => {
                Err(SwError::ConstraintViolated { what: format!("{} profile", self.id), residual: c.max(n) })
            }
            None => Err(SwError::ConstraintViolated { what: format!("{} is not a profile kernel", self.id), residual: f64::NAN }),
            _ => Ok(()),
        }
    }

    /// `F_j(n) = sum_m J_m(2j) A(n - m)` for `|n| <= nmax`, index `n + nmax`.
    pub fn f_values(&self, j: f64, nmax: usize) -> Vec<Complex64> {
        let mc = bessel_cutoff(2.0 * j);
        let js = bessel_j_signed(mc, 2.0 * j);
        let (mc, nm, km) = (mc as i64, nmax as i64, self.kmax as i64);
        (-nm..=nm)
            .map(|n| {
                let lo = (-mc).max(n - km);
                let hi = mc.min(n + km);
                (lo..=hi).map(|m| self.ahat[(n - m + km) as usize] * js[(m + mc) as usize]).sum()
            })
            .collect()
    }

    /// `<r| Omega(j, alpha) |s>` for `|r|, |s| <= cutoff`.
    pub fn matrix(&self, j: f64, alpha: f64, cutoff: usize) -> DMatrix<Complex64> {
        let n = cutoff as i64;
        match &self.kind {
            NhKind::Covariant(_) => {
                let f = self.f_values(j, 2 * cutoff);
                DMatrix::from_fn(2 * cutoff + 1, 2 * cutoff + 1, |i, k| {
                    let (r, s) = (i as i64 - n, k as i64 - n);
                    f[(r + s + 2 * n) as usize] * Complex64::from_polar(1.0, (s - r) as f64 * alpha)
                })
            }
            _ => {
                let sec = nh_section(alpha, j, self.tau);
                let wide = cutoff + bessel_cutoff(j.abs());
                let u = sec.puir_matrix(cutoff, wide);
                let a = self.origin_operator(wide);
                &u * a * u.adjoint()
            }
        }
    }

    /// Operator at the origin on modes `|r| <= cutoff`.
    pub fn origin_operator(&self, cutoff: usize) -> DMatrix<Complex64> {
        let n = cutoff as i64;
        let sz = 2 * cutoff + 1;
        match &self.kind {
            NhKind::Covariant(_) => DMatrix::from_fn(sz, sz, |i, k| self.ahat(i as i64 + k as i64 - 2 * n)),
            NhKind::ShiftPi => DMatrix::from_fn(sz, sz, |i, k| {
                let s = k as i64 - n;
                if i == k {
                    Complex64::new(if s % 2 == 0 { 2.0 } else { -2.0 }, 0.0)
                } else {
                    ZERO
                }
            }),
            NhKind::ReflectPi => DMatrix::from_fn(sz, sz, |i, k| {
                let (r, s) = (i as i64 - n, k as i64 - n);
                if r == -s {
                    Complex64::new(if s % 2 == 0 { 2.0 } else { -2.0 }, 0.0)
                } else {
                    ZERO
                }
            }),
        }
    }

    /// `Omega(j, alpha) psi` on modes `|r| <= out`, exact for the band-limited input.
    pub fn apply(&self, j: f64, alpha: f64, psi: &CircleState, out: usize) -> CircleState {
        match &self.kind {
            NhKind::Covariant(_) => {
                let nmax = out + psi.cutoff;
                let f = self.f_values(j, nmax);
                let nm = nmax as i64;
                let n = psi.cutoff as i64;
                let coeffs = (-(out as i64)..=out as i64)
                    .map(|r| (-n..=n).map(|s| f[(r + s + nm) as usize] * Complex64::from_polar(1.0, (s - r) as f64 * alpha) * psi.coeff(s)).sum())
                    .collect();
                CircleState { cutoff: out, coeffs }
            }
            _ => {
                let sec = nh_section(alpha, j, self.tau);
                let k = bessel_cutoff(j.abs());
                let back = nh_puir_to(&sec.inverse(), psi, psi.cutoff + k);
                let mid = back.apply(&self.origin_operator(back.cutoff));
                nh_puir_to(&sec, &mid, out)
            }
        }
    }

    /// `||Omega - Omega^+|| / ||Omega||` on modes `|r| <= cutoff`.
    pub fn hermitian_defect(&self, j: f64, alpha: f64, cutoff: usize) -> f64 {
        let m = self.matrix(j, alpha, cutoff);
        super::rel_frobenius(&m.adjoint(), &m)
    }

    /// Worst relative residual of `U(g) Omega(x) U(g)^{-1} psi = Omega(g.x) psi` on modes `|r| <= 12`
    /// over `samples` random `g` (entries in `[-1, 1]`) and `x` (`|j| <= 1`, any `alpha`).
    pub fn covariance_residual(&self, samples: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = test_state();
        let mut worst = 0.0f64;
        for _ in 0..samples {
            let g = NhElement::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), self.tau);
            let x = NhOrbitPoint::new(self.tau, rng.random_range(-1.0..1.0), rng.random_range(-PI..PI));
            worst = worst.max(self.covariance_at(&g, &x, &psi));
        }
        worst
    }

    pub fn covariance_at(&self, g: &NhElement, x: &NhOrbitPoint, psi: &CircleState) -> f64 {
        const OUT: usize = 12;
        let kg = bessel_cutoff(g.a.hypot(g.v * g.tau));
        let ginv = g.inverse();
        let s1 = nh_puir_to(&ginv, psi, psi.cutoff + kg);
        let s2 = self.apply(x.j, x.alpha, &s1, OUT + kg);
        let lhs = nh_puir_to(g, &s2, OUT);
        let gx = x.act(g);
        let rhs = self.apply(gx.j, gx.alpha, psi, OUT);
        let d: f64 = lhs.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        d / rhs.norm()
    }

    /// `||[cos t, Omega(o)]|| / ||Omega(o)||` on the interior block: the isotropy group of the
    /// origin is `(0, a, 0)`, acting as multiplication by `e^{-i a cos t}`.
    pub fn lemma31_residual(&self) -> f64 {
        let n = 40;
        let a = self.origin_operator(n);
        let c = cos_matrix(n);
        let comm = &c * &a - &a * &c;
        block_norm(&comm, n, n - 4) / block_norm(&a, n, n - 4)
    }
}

fn test_state() -> CircleState {
    // smooth, band-limited
    let mut s = CircleState::zero(6);
    for r in -6i64..=6 {
        s.coeffs[(r + 6) as usize] = Complex64::new(1.0 / (1.0 + (r * r) as f64), 0.3 * r as f64 / (2.0 + (r * r) as f64));
    }
    s
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let (pn, pn1) = if n == 1 { (z, 1.0) } else { (p1, p0) };
            dp = n as f64 * (z * pn - pn1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Orbit quadrature on the cylinder: `j in [-J, J]` by Gauss-Legendre with `nodes_per_unit` nodes per
/// unit length; the `alpha` integral is done exactly in Fourier space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NhQuadrature {
    pub j_max: f64,
    pub nodes_per_unit: f64,
    /// Test block `|r|, |s| <= band`.
    pub band: usize,
}

impl NhQuadrature {
    /// `J = 20`, 4 nodes per unit, band 3.
    pub fn default_quadrature() -> Self {
        NhQuadrature { j_max: 20.0, nodes_per_unit: 4.0, band: 3 }
    }

    pub fn refined(&self) -> Self {
        NhQuadrature { j_max: 2.0 * self.j_max, ..*self }
    }

    pub fn nodes(&self) -> (Vec<f64>, Vec<f64>) {
        let n = ((2.0 * self.j_max * self.nodes_per_unit).ceil() as usize).max(2);
        let (x, w) = gauss_legendre(n);
        (x.iter().map(|x| x * self.j_max).collect(), w.iter().map(|w| w * self.j_max).collect())
    }

    /// Mode sums run over `|n| <= 2 (2J + 40)`.
    pub fn n_max(&self) -> usize {
        2 * ((2.0 * self.j_max).ceil() as usize + 40)
    }

    /// Rough operation count of a Gram assembly with columns `|n| <= cols`.
    pub fn cost(&self, cols: usize) -> u64 {
        let nodes = (2.0 * self.j_max * self.nodes_per_unit).ceil() as u64;
        let m = bessel_cutoff(2.0 * self.j_max) as u64 * 2 + 1;
        nodes * (2 * cols as u64 + 1) * m
    }

    pub fn describe(&self) -> String {
        format!("J={} nodes/unit={} band={}", self.j_max, self.nodes_per_unit, self.band)
    }
}

/// Rows `G(n', n) = int_{-J}^{J} F_j(n') F_j(n) dj` for `|n'| <= rows`, `|n| <= nmax`.
fn gram_rows(kernel: &NhKernel, quad: &NhQuadrature, rows: usize, nmax: usize) -> DMatrix<Complex64> {
    let nmax = nmax.max(rows);
    let (xs, ws) = quad.nodes();
    let pairs: Vec<(f64, f64)> = xs.into_iter().zip(ws).collect();
    let parts: Vec<DMatrix<Complex64>> = pairs
        .par_chunks(16)
        .map(|chunk| {
            let mut g = DMatrix::<Complex64>::zeros(2 * rows + 1, 2 * nmax + 1);
            for &(j, w) in chunk {
                let f = kernel.f_values(j, nmax);
                for a in 0..2 * rows + 1 {
                    let fa = f[a + nmax - rows] * w;
                    for (b, fb) in f.iter().enumerate() {
                        g[(a, b)] += fa * fb;
                    }
                }
            }
            g
        })
        .collect();
    parts.into_iter().fold(DMatrix::zeros(2 * rows + 1, 2 * nmax + 1), |a, b| a + b)
}

const RICHARDSON_ORDER: f64 = 0.5;
const RICHARDSON_ORDER_2: f64 = 1.5;

fn richardson_step(coarse: &DMatrix<Complex64>, fine: &DMatrix<Complex64>, order: f64) -> DMatrix<Complex64> {
    let k = 2f64.powf(order);
    (fine * Complex64::new(k, 0.0) - coarse) / Complex64::new(k - 1.0, 0.0)
}

fn richardson(coarse: &DMatrix<Complex64>, fine: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    richardson_step(coarse, fine, RICHARDSON_ORDER)
}

/// Gram rows extrapolated from `J`, `2J`, `4J`: the truncation error runs as `J^{-1/2}` then `J^{-3/2}`.
fn gram_rows_extrapolated(kernel: &NhKernel, quad: &NhQuadrature, rows: usize, nmax: usize) -> DMatrix<Complex64> {
    let q2 = quad.refined();
    let q4 = q2.refined();
    let (g1, g2, g4) = (gram_rows(kernel, quad, rows, nmax), gram_rows(kernel, &q2, rows, nmax), gram_rows(kernel, &q4, rows, nmax));
    richardson_step(&richardson(&g1, &g2), &richardson(&g2, &g4), RICHARDSON_ORDER_2)
}

/// Block-weighted residual of `sum_n F_y(n) G(n, n') = F_y(n')` over `|n'| <= 2 band`, `n = n' mod 2`.
fn traciality_from_gram(kernel: &NhKernel, y: f64, g: &DMatrix<Complex64>, band: usize, nmax: usize) -> (f64, Vec<Complex64>) {
    let fy = kernel.f_values(y, nmax);
    let rows = 2 * band;
    let (mut num, mut den) = (0.0, 0.0);
    let mut t = Vec::with_capacity(2 * rows + 1);
    for a in 0..2 * rows + 1 {
        let np = a as i64 - rows as i64;
        let mut acc = ZERO;
        for (b, fb) in fy.iter().enumerate() {
            let n = b as i64 - nmax as i64;
            if (n - np).rem_euclid(2) == 0 {
                acc += fb * g[(a, b)];
            }
        }
        let mult = (2 * band + 1) as f64 - np.unsigned_abs() as f64;
        let want = fy[(np + nmax as i64) as usize];
        num += mult * (acc - want).norm_sqr();
        den += mult * want.norm_sqr();
        t.push(acc);
    }
    ((num / den).sqrt(), t)
}

/// Traciality residual `||int dmu(x) Tr[Omega(y) Omega(x)] Omega(x) - Omega(y)|| / ||Omega(y)||` on the
/// test block, for a kernel of the covariant profile form. Depends on `y` only through `j`.
pub fn nh_traciality_residual(kernel: &NhKernel, y_j: f64, quad: &NhQuadrature) -> Result<f64, SwError> {
    kernel.profile()?;
    let nmax = quad.n_max();
    let g = gram_rows(kernel, quad, 2 * quad.band, nmax);
    Ok(traciality_from_gram(kernel, y_j, &g, quad.band, nmax).0)
}

/// Traciality at `quad` and at `J -> 2J`.
pub fn nh_traciality(kernel: &NhKernel, y_j: f64, quad: &NhQuadrature) -> Result<Refinement, SwError> {
    kernel.profile()?;
    let fine = quad.refined();
    let nmax = fine.n_max();
    let g1 = gram_rows(kernel, quad, 2 * quad.band, nmax);
    let g2 = gram_rows(kernel, &fine, 2 * quad.band, nmax);
    let (r1, t1) = traciality_from_gram(kernel, y_j, &g1, quad.band, nmax);
    let (r2, t2) = traciality_from_gram(kernel, y_j, &g2, quad.band, nmax);
    let d: f64 = t1.iter().zip(&t2).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
    let n: f64 = t2.iter().map(|b| b.norm_sqr()).sum::<f64>().sqrt();
    Ok(Refinement { residual: r1, refined_residual: r2, change: d / n })
}

/// [`nh_traciality`] after the constraint check; errors when refinement changes the result by more than 10%.
pub fn nh_traciality_checked(kernel: &NhKernel, y_j: f64, quad: &NhQuadrature) -> Result<Refinement, SwError> {
    kernel.check_constraints()?;
    let r = nh_traciality(kernel, y_j, quad)?;
    if !r.converged() {
        return Err(SwError::NotConverged { change: r.change });
    }
    Ok(r)
}

/// Traciality residual with the Gram matrix extrapolated from `J` and `2J` assuming `J^{-3/4}` decay.
pub fn nh_traciality_richardson(kernel: &NhKernel, y_j: f64, quad: &NhQuadrature) -> Result<f64, SwError> {
    kernel.profile()?;
    let fine = quad.refined();
    let nmax = fine.n_max();
    let g = richardson(&gram_rows(kernel, quad, 2 * quad.band, nmax), &gram_rows(kernel, &fine, 2 * quad.band, nmax));
    Ok(traciality_from_gram(kernel, y_j, &g, quad.band, nmax).0)
}

/// Reproducing-kernel residual: `int dmu(y) K(x, y) W(y) = W(x)` with `K(x, y) = Tr[Omega(x) Omega(y)]`,
/// for the symbols `W(y) = Tr[E_rs Omega(y)]` of the unit matrices of the test block, worst over `xs`
/// (`(j, alpha)` pairs). The `alpha` integral uses uniform nodes, exact for the trigonometric
/// polynomials that survive against the test symbols.
pub fn nh_reproducing_residual(kernel: &NhKernel, xs: &[(f64, f64)], quad: &NhQuadrature) -> Result<f64, SwError> {
    kernel.profile()?;
    let band = quad.band as i64;
    let nmax = quad.n_max();
    let nm = nmax as i64;
    let (js, jw) = quad.nodes();
    let n_alpha = (8 * band + 2) as usize;
    let alphas: Vec<f64> = (0..n_alpha).map(|i| -PI + 2.0 * PI * i as f64 / n_alpha as f64).collect();
    let fys: Vec<Vec<Complex64>> = js.par_iter().map(|&j| kernel.f_values(j, nmax)).collect();
    let mut worst = 0.0f64;
    for &(xj, xa) in xs {
        let fx = kernel.f_values(xj, nmax);
        // K(x, y) = sum_{d, n = d mod 2} e^{-i d alpha_x} e^{i d alpha_y} F_x(n) F_y(n), kept for
        // |d| <= 2 band (other frequencies integrate to zero against the test symbols)
        let kvals: Vec<Vec<Complex64>> = fys
            .par_iter()
            .map(|fy| {
                let parity: [Complex64; 2] = [0, 1].map(|p| {
                    let mut acc = ZERO;
                    let mut n = -nm + (p - (-nm)).rem_euclid(2);
                    while n <= nm {
                        acc += fx[(n + nm) as usize] * fy[(n + nm) as usize];
                        n += 2;
                    }
                    acc
                });
                alphas
                    .iter()
                    .map(|&ya| (-2 * band..=2 * band).map(|d| parity[d.rem_euclid(2) as usize] * Complex64::from_polar(1.0, d as f64 * (ya - xa))).sum())
                    .collect()
            })
            .collect();
        let (mut num, mut den) = (0.0, 0.0);
        for r in -band..=band {
            for s in -band..=band {
                // W(y) = Omega(y)_{sr} = e^{i(r-s) alpha} F_j(r+s)
                let (dw, nw) = (r - s, r + s);
                let mut lhs = ZERO;
                for ((fy, w), kv) in fys.iter().zip(&jw).zip(&kvals) {
                    for (&ya, k) in alphas.iter().zip(kv) {
                        let wy = Complex64::from_polar(1.0, dw as f64 * ya) * fy[(nw + nm) as usize];
                        lhs += k * wy * (w / n_alpha as f64);
                    }
                }
                let rhs = Complex64::from_polar(1.0, dw as f64 * xa) * fx[(nw + nm) as usize];
                num += (lhs - rhs).norm_sqr();
                den += rhs.norm_sqr();
            }
        }
        worst = worst.max((num / den).sqrt());
    }
    Ok(worst)
}

/// Symbol `W_A(j, alpha) = Tr[A Omega(j, alpha)]` of a mode matrix `A` on `|r| <= cutoff`.
pub fn nh_symbol(kernel: &NhKernel, a: &DMatrix<Complex64>, j: f64, alpha: f64) -> Complex64 {
    let cutoff = (a.nrows() - 1) / 2;
    let om = kernel.matrix(j, alpha, cutoff);
    let mut acc = ZERO;
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * om[(k, i)];
        }
    }
    acc
}

/// `W_I(j, alpha) = sum_r F_j(2r)`, summed with a Gaussian window of width `window` in `r`.
pub fn nh_identity_symbol(kernel: &NhKernel, j: f64, window: f64) -> Result<Complex64, SwError> {
    kernel.profile()?;
    let nmax = (12.0 * window).ceil() as usize;
    let f = kernel.f_values(j, 2 * nmax);
    Ok((-(nmax as i64)..=nmax as i64).map(|r| f[(2 * r + 2 * nmax as i64) as usize] * (-(r as f64 / window).powi(2)).exp()).sum())
}

/// `int dmu W_A Omega` for a band operator `A` on `|r| <= band`, returned on modes `|r| <= out`:
/// `Q_{r's'} = sum_{s - r = r' - s'} A_{sr} G(r + s, r' + s')`.
fn dequantize_with_gram(a: &DMatrix<Complex64>, g: &DMatrix<Complex64>, rows: usize, nmax: usize, out: usize) -> DMatrix<Complex64> {
    let band = ((a.nrows() - 1) / 2) as i64;
    let o = out as i64;
    DMatrix::from_fn(2 * out + 1, 2 * out + 1, |i, k| {
        let (rp, sp) = (i as i64 - o, k as i64 - o);
        let np = rp + sp;
        if np.unsigned_abs() as usize > nmax {
            return ZERO;
        }
        let mut acc = ZERO;
        for r in -band..=band {
            let s = r + rp - sp;
            if s.abs() > band {
                continue;
            }
            acc += a[((s + band) as usize, (r + band) as usize)] * g[((r + s + rows as i64) as usize, (np + nmax as i64) as usize)];
        }
        acc
    })
}

/// Dequantization of the symbol of a band operator `A` (on `|r| <= band`) by the orbit quadrature,
/// returned on modes `|r| <= out`; `richardson_extrapolate` combines `J`, `2J` and `4J`.
pub fn nh_dequantize_band(
    kernel: &NhKernel,
    a: &DMatrix<Complex64>,
    quad: &NhQuadrature,
    out: usize,
    richardson_extrapolate: bool,
) -> Result<DMatrix<Complex64>, SwError> {
    kernel.profile()?;
    let band = (a.nrows() - 1) / 2;
    let rows = 2 * band;
    let nmax = 2 * out;
    let g = if richardson_extrapolate { gram_rows_extrapolated(kernel, quad, rows, nmax) } else { gram_rows(kernel, quad, rows, nmax) };
    Ok(dequantize_with_gram(a, &g, rows, nmax, out))
}

/// Dequantization of an arbitrary symbol by direct quadrature over `(j, alpha)`, `n_alpha` uniform angles.
pub fn nh_dequantize(
    kernel: &NhKernel,
    symbol: impl Fn(f64, f64) -> Complex64 + Sync,
    quad: &NhQuadrature,
    n_alpha: usize,
    cutoff: usize,
) -> DMatrix<Complex64> {
    let (js, jw) = quad.nodes();
    let sz = 2 * cutoff + 1;
    let parts: Vec<DMatrix<Complex64>> = js
        .par_iter()
        .zip(jw.par_iter())
        .map(|(&j, &w)| {
            let mut acc = DMatrix::<Complex64>::zeros(sz, sz);
            for i in 0..n_alpha {
                let al = -PI + 2.0 * PI * i as f64 / n_alpha as f64;
                acc += kernel.matrix(j, al, cutoff) * (symbol(j, al) * (w / n_alpha as f64));
            }
            acc
        })
        .collect();
    parts.into_iter().fold(DMatrix::zeros(sz, sz), |a, b| a + b)
}

/// Default budget for [`nh_trikernel_star`], in multiply-adds.
pub const TRIKERNEL_BUDGET: u64 = 2_000_000_000;

/// Trikernel star product of the symbols of two band operators at the points `xs`:
/// `(W_A * W_B)(x) = int int Tr[Omega(x) Omega(y) Omega(z)] W_A(y) W_B(z) = Tr[Omega(x) Q(W_A) Q(W_B)]`,
/// with each `Q` an orbit integral (Richardson-extrapolated from `J`, `2J`, `4J`).
pub fn nh_trikernel_star(
    kernel: &NhKernel,
    a: &DMatrix<Complex64>,
    b: &DMatrix<Complex64>,
    xs: &[(f64, f64)],
    quad: &NhQuadrature,
    budget: u64,
) -> Result<Vec<Complex64>, SwError> {
    kernel.profile()?;
    let band = (a.nrows() - 1) / 2;
    let out = 2 * band + 12;
    let cost = 2 * quad.refined().refined().cost(2 * out) + (xs.len() * (2 * out + 1).pow(2)) as u64;
    if cost > budget {
        return Err(SwError::CostExceeded { cost, budget });
    }
    let qa = nh_dequantize_band(kernel, a, quad, out, true)?;
    let qb = nh_dequantize_band(kernel, b, quad, out, true)?;
    let prod = qa * qb;
    Ok(xs.iter().map(|&(j, al)| nh_symbol(kernel, &prod, j, al)).collect())
}

/// `(int dmu (W_A * W_B), int dmu W_A W_B)`. The first uses `int dmu Omega(x) = I`; the second is
/// `Tr[A Q(W_B)]`.
pub fn nh_average_identity(kernel: &NhKernel, a: &DMatrix<Complex64>, b: &DMatrix<Complex64>, quad: &NhQuadrature) -> Result<(Complex64, Complex64), SwError> {
    let band = (a.nrows() - 1) / 2;
    let out = 2 * band + 12;
    let qa = nh_dequantize_band(kernel, a, quad, out, true)?;
    let qb = nh_dequantize_band(kernel, b, quad, out, true)?;
    let lhs = (qa * &qb).trace();
    let o = out - band;
    let qb_band = qb.view((o, o), (2 * band + 1, 2 * band + 1));
    let rhs = (a * qb_band).trace();
    Ok((lhs, rhs))
}
