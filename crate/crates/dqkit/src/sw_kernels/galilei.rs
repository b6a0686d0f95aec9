use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::function::erf::erfc;

use super::line::LineState;
use super::report::Refinement;
use super::{dist_to_2pi_z, rel_frobenius, SwError, CONSTRAINT_SAMPLES, CONSTRAINT_TOL, MEASURE_NORM};
use crate::weyl_numeric::{displaced_parity, hermite_functions, TAPER_FRACTION, TAPER_WIDTH};

/// `(b, a, v)`: time translation, space translation, boost.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GalileiElement {
    pub b: f64,
    pub a: f64,
    pub v: f64,
}

impl GalileiElement {
    pub fn new(b: f64, a: f64, v: f64) -> Self {
        GalileiElement { b, a, v }
    }

    pub fn identity() -> Self {
        GalileiElement::new(0.0, 0.0, 0.0)
    }

    /// `(b', a', v')(b, a, v) = (b' + b, a' + a + v' b, v' + v)`.
    pub fn compose(&self, g: &GalileiElement) -> GalileiElement {
        GalileiElement::new(self.b + g.b, self.a + g.a + self.v * g.b, self.v + g.v)
    }

    pub fn inverse(&self) -> GalileiElement {
        GalileiElement::new(-self.b, -self.a + self.v * self.b, -self.v)
    }

    /// Coadjoint action on `(h, p, k)`.
    pub fn coadjoint(&self, x: (f64, f64, f64)) -> (f64, f64, f64) {
        let (h, p, k) = x;
        (h - self.v * p, p, self.b * p + k)
    }
}

pub fn galilei_compose(g1: &GalileiElement, g2: &GalileiElement) -> GalileiElement {
    g1.compose(g2)
}

pub fn galilei_coadjoint(g: &GalileiElement, x: (f64, f64, f64)) -> (f64, f64, f64) {
    g.coadjoint(x)
}

/// Point of the orbit `p = alpha` in canonical coordinates `p_c = h`, `q_c = k / alpha`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GalileiOrbitPoint {
    pub alpha: f64,
    pub p: f64,
    pub q: f64,
}

impl GalileiOrbitPoint {
    pub fn new(alpha: f64, p: f64, q: f64) -> Self {
        GalileiOrbitPoint { alpha, p, q }
    }

    pub fn to_dual(&self) -> (f64, f64, f64) {
        (self.p, self.alpha, self.q * self.alpha)
    }

    pub fn from_dual(x: (f64, f64, f64)) -> Result<Self, SwError> {
        if x.1 == 0.0 {
            return Err(SwError::BadParameter("orbit label p = 0 has no canonical chart".into()));
        }
        Ok(GalileiOrbitPoint::new(x.1, x.0, x.2 / x.1))
    }

    /// `g . (p, q) = (p - alpha v, q + b)`.
    pub fn act(&self, g: &GalileiElement) -> GalileiOrbitPoint {
        GalileiOrbitPoint::new(self.alpha, self.p - self.alpha * g.v, self.q + g.b)
    }
}

/// `s(p, q) = (q, 0, -p / alpha)`.
pub fn galilei_section(p: f64, q: f64, alpha: f64) -> GalileiElement {
    GalileiElement::new(q, 0.0, -p / alpha)
}

/// `[U(g) psi](w) = exp(-i alpha (a - b w)) psi(w - v)`.
pub fn galilei_puir(g: &GalileiElement, alpha: f64, psi: &LineState) -> Result<LineState, SwError> {
    let (a, b) = (g.a, g.b);
    Ok(psi.shift(g.v)?.multiply(|w| Complex64::from_polar(1.0, -alpha * (a - b * w))))
}

/// `U(g)^{-1}`; differs from `U(g^{-1})` by a phase.
pub fn galilei_puir_inverse(g: &GalileiElement, alpha: f64, psi: &LineState) -> Result<LineState, SwError> {
    let (a, b, v) = (g.a, g.b, g.v);
    psi.multiply(|w| Complex64::from_polar(1.0, alpha * (a - b * w))).shift(-v)
}

type PhaseFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Kernel family `[Omega(p,q) psi](w) = 2 e^{i phi(w + c)} e^{2 i alpha q (w + c)} psi(-w - 2c)`, `c = p / alpha`.
#[derive(Clone)]
pub struct GalileiKernel {
    pub id: String,
    pub alpha: f64,
    phi: PhaseFn,
    phi_zero: bool,
}

impl fmt::Debug for GalileiKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GalileiKernel").field("id", &self.id).field("alpha", &self.alpha).finish()
    }
}

impl GalileiKernel {
    /// `phi = 0`: the displaced parity.
    pub fn parity(alpha: f64) -> Self {
        GalileiKernel { id: "galilei-phi0".into(), alpha, phi: Arc::new(|_| 0.0), phi_zero: true }
    }

    /// `phi(w) = sin w`.
    pub fn sine(alpha: f64) -> Self {
        GalileiKernel { id: "galilei-sine".into(), alpha, phi: Arc::new(f64::sin), phi_zero: false }
    }

    pub fn custom(id: &str, alpha: f64, phi: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        GalileiKernel { id: id.into(), alpha, phi: Arc::new(phi), phi_zero: false }
    }

    pub fn phi(&self, w: f64) -> f64 {
        (self.phi)(w)
    }

    /// Largest violation of `phi(w) + phi(-w) in 2pi Z` and `phi(0) in 2pi Z` on sample points of `[-8, 8]`.
    pub fn constraint_residual(&self) -> f64 {
        let n = CONSTRAINT_SAMPLES;
        let mut worst = dist_to_2pi_z(self.phi(0.0));
        for k in 0..n {
            let w = -8.0 + 16.0 * k as f64 / (n - 1) as f64;
            worst = worst.max(dist_to_2pi_z(self.phi(w) + self.phi(-w)));
        }
        worst
    }

    pub fn check_constraints(&self) -> Result<f64, SwError> {
        let r = self.constraint_residual();
        if r > CONSTRAINT_TOL || !self.alpha.is_finite() || self.alpha == 0.0 {
            return Err(SwError::ConstraintViolated { what: format!("{} phase", self.id), residual: r });
        }
        Ok(r)
    }

    /// `Omega(p, q) psi`.
    pub fn apply(&self, p: f64, q: f64, psi: &LineState) -> Result<LineState, SwError> {
        let c = p / self.alpha;
        let kq = 2.0 * self.alpha * q;
        let r = psi.reflect().shift(-2.0 * c)?;
        Ok(r.multiply(|w| Complex64::from_polar(2.0, self.phi(w + c) + kq * (w + c))))
    }

    /// `<h_m| Omega(p, q) |h_n>` in the `hbar = 1` Hermite basis of the `w` line, `m, n < size`.
    pub fn hermite_matrix(&self, size: usize, p: f64, q: f64) -> DMatrix<Complex64> {
        let c = p / self.alpha;
        if self.phi_zero {
            let beta = Complex64::new(-c, self.alpha * q) / 2f64.sqrt();
            return displaced_parity(size, beta);
        }
        // u = w + c: h_m(u - c) h_n(-u - c) 2 e^{i phi(u)} e^{2 i alpha q u}
        let reach = (2.0 * size as f64 + 1.0).sqrt() + 6.0;
        let du = 0.08;
        let nu = (2.0 * reach / du).ceil() as usize + 1;
        let mut left = DMatrix::<Complex64>::zeros(size, nu);
        let mut right = DMatrix::<Complex64>::zeros(nu, size);
        for k in 0..nu {
            let u = -reach + k as f64 * du;
            let wgt = Complex64::from_polar(2.0 * du, self.phi(u) + 2.0 * self.alpha * q * u);
            let hl = hermite_functions(size, 1.0, u - c);
            let hr = hermite_functions(size, 1.0, -u - c);
            for m in 0..size {
                left[(m, k)] = Complex64::new(hl[m], 0.0) * wgt;
                right[(k, m)] = Complex64::new(hr[m], 0.0);
            }
        }
        left * right
    }

    /// `int du e^{i phi(u/2)} e^{i alpha q u} delta_eps(u)`, the trace of `Omega(p, q)` with the
    /// diagonal delta replaced by a Gaussian of width `eps`.
    pub fn windowed_unit_trace(&self, _p: f64, q: f64, eps: f64) -> Complex64 {
        let n = 4001;
        let reach = 12.0 * eps;
        let du = 2.0 * reach / (n - 1) as f64;
        let norm = 1.0 / (eps * (2.0 * std::f64::consts::PI).sqrt());
        (0..n)
            .map(|k| {
                let u = -reach + k as f64 * du;
                Complex64::from_polar(norm * (-u * u / (2.0 * eps * eps)).exp() * du, self.phi(u / 2.0) + self.alpha * q * u)
            })
            .sum()
    }

    /// Residual of `U(g) Omega(x) U(g)^{-1} = Omega(g.x)` on a wave packet, worst over `samples`
    /// random `g` and `x` with entries in `[-1, 1]`.
    pub fn covariance_residual(&self, samples: usize, seed: u64) -> Result<f64, SwError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = LineState::wave_packet(24.0, 2048, 0.3, 1.0, 0.5)?;
        let mut worst = 0.0f64;
        for _ in 0..samples {
            let g = GalileiElement::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let x = GalileiOrbitPoint::new(self.alpha, rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            worst = worst.max(self.covariance_at(&g, &x, &psi)?);
        }
        Ok(worst)
    }

    pub fn covariance_at(&self, g: &GalileiElement, x: &GalileiOrbitPoint, psi: &LineState) -> Result<f64, SwError> {
        let lhs = galilei_puir(g, self.alpha, &self.apply(x.p, x.q, &galilei_puir_inverse(g, self.alpha, psi)?)?)?;
        let gx = x.act(g);
        let rhs = self.apply(gx.p, gx.q, psi)?;
        Ok(lhs.distance(&rhs) / rhs.norm())
    }

    /// `||A - A^+|| / ||A||` for `A = <h_m| Omega(p, q) |h_n>`.
    pub fn hermitian_defect(&self, size: usize, p: f64, q: f64) -> f64 {
        let m = self.hermite_matrix(size, p, q);
        rel_frobenius(&m.adjoint(), &m)
    }
}

/// Square `(p, q)` box `[-L, L]^2` sampled with spacing `step`, weight `step^2 / 2pi`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GalileiGrid {
    pub half_width: f64,
    pub step: f64,
}

impl GalileiGrid {
    /// `L = 6`, step `0.3`.
    pub fn default_grid() -> Self {
        GalileiGrid { half_width: 6.0, step: 0.3 }
    }

    pub fn refined(&self) -> Self {
        GalileiGrid { half_width: self.half_width, step: self.step / 2.0 }
    }

    pub fn points(&self) -> Vec<(f64, f64)> {
        let n = (2.0 * self.half_width / self.step).round() as i64;
        let mut out = Vec::with_capacity(((n + 1) * (n + 1)) as usize);
        for i in 0..=n {
            for j in 0..=n {
                out.push((-self.half_width + i as f64 * self.step, -self.half_width + j as f64 * self.step));
            }
        }
        out
    }

    pub fn weight(&self) -> f64 {
        self.step * self.step * MEASURE_NORM
    }

    pub fn describe(&self) -> String {
        format!("box={} step={}", self.half_width, self.step)
    }
}

/// `diag(erfc((n - 0.625 M) / (0.094 M)) / 2)`, the same taper as the Weyl numerics.
pub fn hermite_taper(size: usize) -> Vec<f64> {
    let (nc, w) = (TAPER_FRACTION * size as f64, TAPER_WIDTH * size as f64);
    (0..size).map(|n| 0.5 * erfc((n as f64 - nc) / w)).collect()
}

fn tapered(a: &DMatrix<Complex64>, f: &[f64]) -> DMatrix<Complex64> {
    DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * f[i] * f[j])
}

fn trace_prod(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// Ordered sum of per-point blocks, parallel over fixed chunks so the result is reproducible.
fn grid_sum(points: &[(f64, f64)], rows: usize, f: impl Fn(f64, f64) -> DMatrix<Complex64> + Sync) -> DMatrix<Complex64> {
    let parts: Vec<DMatrix<Complex64>> = points
        .par_chunks(64)
        .map(|chunk| {
            let mut acc = DMatrix::<Complex64>::zeros(rows, rows);
            for &(p, q) in chunk {
                acc += f(p, q);
            }
            acc
        })
        .collect();
    parts.into_iter().fold(DMatrix::zeros(rows, rows), |a, b| a + b)
}

/// Leading `band x band` block of `int dmu(x) Tr[F Omega(y) F Omega(x)] Omega(x)`.
pub fn galilei_traciality_block(kernel: &GalileiKernel, size: usize, y: (f64, f64), grid: &GalileiGrid, band: usize) -> DMatrix<Complex64> {
    let f = hermite_taper(size);
    let oy = tapered(&kernel.hermite_matrix(size, y.0, y.1), &f);
    let wgt = grid.weight();
    grid_sum(&grid.points(), band, |p, q| {
        let ox = kernel.hermite_matrix(size, p, q);
        let tau = trace_prod(&oy, &ox) * wgt;
        ox.view((0, 0), (band, band)).map(|z| z * tau)
    })
}

/// Relative residual of traciality at `y` on the leading `band x band` block.
pub fn galilei_traciality_residual(kernel: &GalileiKernel, size: usize, y: (f64, f64), grid: &GalileiGrid, band: usize) -> f64 {
    let f = hermite_taper(size);
    let oy = tapered(&kernel.hermite_matrix(size, y.0, y.1), &f).view((0, 0), (band, band)).into_owned();
    rel_frobenius(&galilei_traciality_block(kernel, size, y, grid, band), &oy)
}

/// Traciality at `grid` and at its refinement.
pub fn galilei_traciality(kernel: &GalileiKernel, size: usize, y: (f64, f64), grid: &GalileiGrid, band: usize) -> Refinement {
    let f = hermite_taper(size);
    let oy = tapered(&kernel.hermite_matrix(size, y.0, y.1), &f).view((0, 0), (band, band)).into_owned();
    let t1 = galilei_traciality_block(kernel, size, y, grid, band);
    let t2 = galilei_traciality_block(kernel, size, y, &grid.refined(), band);
    Refinement { residual: rel_frobenius(&t1, &oy), refined_residual: rel_frobenius(&t2, &oy), change: rel_frobenius(&t1, &t2) }
}

/// [`galilei_traciality`] that errors when refinement changes the result by more than 10%.
pub fn galilei_traciality_checked(kernel: &GalileiKernel, size: usize, y: (f64, f64), grid: &GalileiGrid, band: usize) -> Result<Refinement, SwError> {
    kernel.check_constraints()?;
    let r = galilei_traciality(kernel, size, y, grid, band);
    if !r.converged() {
        return Err(SwError::NotConverged { change: r.change });
    }
    Ok(r)
}

/// Symbol `W_A(x) = Tr[A Omega(x)]` at the given points (A in the Hermite basis).
pub fn galilei_symbol(kernel: &GalileiKernel, a: &DMatrix<Complex64>, points: &[(f64, f64)]) -> Vec<Complex64> {
    let size = a.nrows();
    points.par_iter().map(|&(p, q)| trace_prod(a, &kernel.hermite_matrix(size, p, q))).collect()
}

/// `int dmu W(x) Omega(x)` over `grid`, with `symbol` sampled on `grid.points()`.
pub fn galilei_dequantize(kernel: &GalileiKernel, symbol: &[Complex64], grid: &GalileiGrid, size: usize) -> Result<DMatrix<Complex64>, SwError> {
    let points = grid.points();
    if symbol.len() != points.len() {
        return Err(SwError::BadParameter(format!("{} symbol values for {} grid points", symbol.len(), points.len())));
    }
    let wgt = grid.weight();
    let indexed: Vec<(f64, f64)> = (0..points.len()).map(|i| (i as f64, 0.0)).collect();
    Ok(grid_sum(&indexed, size, |i, _| {
        let (p, q) = points[i as usize];
        kernel.hermite_matrix(size, p, q) * (symbol[i as usize] * wgt)
    }))
}

/// Reproducing-kernel residual `int dmu(y) K(x, y) W(y) - W(x)`, `K(x, y) = Tr[F Omega(x) F Omega(y)]`,
/// for the symbols `W(y) = Tr[E_rs Omega(y)]` of unit matrices in the leading `band` block,
/// worst over the points `xs`.
pub fn galilei_reproducing_residual(kernel: &GalileiKernel, size: usize, xs: &[(f64, f64)], grid: &GalileiGrid, band: usize) -> f64 {
    let f = hermite_taper(size);
    let ys = grid.points();
    let wgt = grid.weight();
    let omegas: Vec<DMatrix<Complex64>> = ys.par_iter().map(|&(p, q)| kernel.hermite_matrix(size, p, q)).collect();
    let mut worst = 0.0f64;
    for &x in xs {
        let ox = tapered(&kernel.hermite_matrix(size, x.0, x.1), &f);
        let kxy: Vec<Complex64> = omegas.iter().map(|oy| trace_prod(&ox, oy) * wgt).collect();
        let (mut num, mut den) = (0.0, 0.0);
        for r in 0..band {
            for s in 0..band {
                // Tr[E_rs Omega] = Omega_sr
                let lhs: Complex64 = kxy.iter().zip(&omegas).map(|(k, oy)| k * oy[(s, r)]).sum();
                let rhs = ox[(s, r)];
                num += (lhs - rhs).norm_sqr();
                den += rhs.norm_sqr();
            }
        }
        worst = worst.max((num / den).sqrt());
    }
    worst
}

/// `||[X, Omega(0)]||` for the isotropy generator `X = -i alpha` of `(0, a, 0)`, which acts as a scalar.
pub fn galilei_lemma31(kernel: &GalileiKernel, size: usize) -> f64 {
    let o = kernel.hermite_matrix(size, 0.0, 0.0);
    let x = DMatrix::<Complex64>::identity(size, size) * Complex64::new(0.0, -kernel.alpha);
    (&x * &o - &o * &x).norm()
}
