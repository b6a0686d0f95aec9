use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::basis::{HermiteBasis, OperatorMatrix};
use super::grid::{GridSpec, PhaseGrid};
use super::weyl::{weyl_inverse, weyl_map_poly};
use super::WeylError;
use crate::phase_poly::{CRat, PhasePoly};

/// `H = (p^2 + q^2) / 2`.
pub fn ho_symbol() -> PhasePoly {
    PhasePoly::qp(2, 0, CRat::frac(1, 2)).add(&PhasePoly::qp(0, 2, CRat::frac(1, 2)))
}

/// Spectrum and eigenvectors of the truncated `W_H`.
pub struct HoSpectrum {
    pub energies: Vec<f64>,
    pub vectors: DMatrix<Complex64>,
    pub hbar: f64,
}

impl HoSpectrum {
    pub fn new(basis: &HermiteBasis) -> Result<Self, WeylError> {
        let wh = weyl_map_poly(basis, &ho_symbol())?;
        let eig = SymmetricEigen::new(wh.entries.clone());
        let mut order: Vec<usize> = (0..basis.size()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
        let energies = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = DMatrix::from_fn(basis.size(), basis.size(), |i, j| eig.eigenvectors[(i, order[j])]);
        Ok(HoSpectrum { energies, vectors, hbar: basis.hbar() })
    }

    /// `sum_n c_n |n><n|` in the eigenbasis.
    pub fn function_of(&self, c: impl Fn(f64) -> Complex64) -> OperatorMatrix {
        let m = self.energies.len();
        let d = DMatrix::from_fn(m, m, |i, j| if i == j { c(self.energies[i]) } else { Complex64::new(0.0, 0.0) });
        OperatorMatrix::new(self.hbar, &self.vectors * d * self.vectors.adjoint())
    }

    /// `exp(-i t W_H / hbar)`.
    pub fn evolution(&self, t: f64) -> OperatorMatrix {
        let h = self.hbar;
        self.function_of(|e| Complex64::from_polar(1.0, -t * e / h))
    }

    /// Smallest spacing between consecutive levels.
    pub fn gap(&self) -> f64 {
        self.energies.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    }
}

fn check_time(t: f64) -> Result<(), WeylError> {
    if (0.5 * t).cos().abs() <= 0.1 {
        return Err(WeylError::NearSingularTime(t));
    }
    Ok(())
}

/// Moyal propagator `Xi(t) = W^{-1}(exp(-i t W_H / hbar))` for the harmonic oscillator.
pub fn moyal_propagator_ho(basis: &HermiteBasis, t: f64, spec: &GridSpec) -> Result<PhaseGrid, WeylError> {
    check_time(t)?;
    let sp = HoSpectrum::new(basis)?;
    weyl_inverse(basis, &sp.evolution(t), spec)
}

/// Closed form `sec(t/2) exp(-(2i/hbar) H tan(t/2))`.
pub fn moyal_propagator_exact(t: f64, hbar: f64, p: f64, q: f64) -> Complex64 {
    let hh = 0.5 * (p * p + q * q);
    Complex64::from_polar(1.0 / (0.5 * t).cos(), -2.0 * hh * (0.5 * t).tan() / hbar)
}

/// Max over the interior of `|i hbar d_t Xi - H * Xi|`, relative to `max |Xi|`.
///
/// Time derivative by a five-point stencil in `t`; `H * Xi` uses the terminating
/// star series `H Xi - (i hbar/2)(q d_p - p d_q) Xi - (hbar^2/8) Laplacian Xi`
/// with fourth-order differences on a grid of spacing `step` over `[-half_width, half_width]^2`.
pub fn star_schrodinger_residual(basis: &HermiteBasis, t: f64, half_width: f64, step: f64) -> Result<f64, WeylError> {
    let dt = 1e-2;
    for k in -2..=2 {
        check_time(t + k as f64 * dt)?;
    }
    let pad = 2.0 * step;
    let spec = GridSpec::with_step(half_width + pad, step);
    let sp = HoSpectrum::new(basis)?;
    let xi = |tt: f64| weyl_inverse(basis, &sp.evolution(tt), &spec);
    let (m2, m1, z, p1, p2) = (xi(t - 2.0 * dt)?, xi(t - dt)?, xi(t)?, xi(t + dt)?, xi(t + 2.0 * dt)?);
    let h = basis.hbar();
    let n = spec.nq;
    let mut worst = 0.0f64;
    let scale = z.max_abs();
    let d1 = |f: &dyn Fn(isize) -> Complex64| (f(-2) - f(-1) * 8.0 + f(1) * 8.0 - f(2)) / (12.0 * step);
    let d2 = |f: &dyn Fn(isize) -> Complex64| (-f(-2) + f(-1) * 16.0 - f(0) * 30.0 + f(1) * 16.0 - f(2)) / (12.0 * step * step);
    for iq in 2..n - 2 {
        for ip in 2..n - 2 {
            let (q, p) = (spec.q(iq), spec.p(ip));
            let at = |a: isize, b: isize| z.at((iq as isize + a) as usize, (ip as isize + b) as usize);
            let dxi_dt = (m2.at(iq, ip) - m1.at(iq, ip) * 8.0 + p1.at(iq, ip) * 8.0 - p2.at(iq, ip)) / (12.0 * dt);
            let dq = d1(&|k| at(k, 0));
            let dp = d1(&|k| at(0, k));
            let lap = d2(&|k| at(k, 0)) + d2(&|k| at(0, k));
            let hv = 0.5 * (q * q + p * p);
            let star = at(0, 0) * hv - Complex64::new(0.0, 0.5 * h) * (dp * q - dq * p) - lap * (h * h / 8.0);
            let r = (Complex64::new(0.0, h) * dxi_dt - star).norm();
            worst = worst.max(r);
        }
    }
    Ok(worst / scale)
}

/// Hann-windowed transform weight `(1/2 pi hbar) int_{-T}^{T} w(t) exp(i t (E - E_n)/hbar) dt`.
fn window_weight(omega: f64, window: f64, hbar: f64) -> f64 {
    // trapezoid in t; the window vanishes at both ends
    let nt = 4000;
    let dt = 2.0 * window / nt as f64;
    let mut acc = 0.0;
    for k in 0..=nt {
        let t = -window + k as f64 * dt;
        let w = (std::f64::consts::PI * t / (2.0 * window)).cos().powi(2);
        acc += w * (t * omega / hbar).cos();
    }
    acc * dt / (2.0 * std::f64::consts::PI * hbar)
}

fn check_window(sp: &HoSpectrum, window: f64) -> Result<(), WeylError> {
    let need = 4.0 * std::f64::consts::PI * sp.hbar / sp.gap();
    if window < need {
        return Err(WeylError::WindowTooShort { window, need });
    }
    Ok(())
}

/// Spectral projection `Gamma_H(p, q, E)`: Hann-windowed Fourier transform of `Xi(t)` over `[-T, T]`,
/// with kernel `exp(+i t E / hbar)` so that the peaks sit at the eigenvalues.
pub fn spectral_projection_ho(basis: &HermiteBasis, energy: f64, window: f64, spec: &GridSpec) -> Result<PhaseGrid, WeylError> {
    let sp = HoSpectrum::new(basis)?;
    check_window(&sp, window)?;
    let h = basis.hbar();
    let op = sp.function_of(|e| Complex64::new(window_weight(energy - e, window, h), 0.0));
    weyl_inverse(basis, &op, spec)
}

/// `int Gamma_H(E) dp dq / (2 pi hbar)`, evaluated through the trace of the tapered projector.
pub fn spectral_density(sp: &HoSpectrum, taper: &[f64], energy: f64, window: f64) -> f64 {
    // eigenvectors of the truncated W_H are the Fock states up to round-off
    sp.energies
        .iter()
        .enumerate()
        .map(|(n, &e)| {
            let weight: f64 = (0..taper.len()).map(|k| sp.vectors[(k, n)].norm_sqr() * taper[k] * taper[k]).sum();
            weight * window_weight(energy - e, window, sp.hbar)
        })
        .sum()
}

/// Local maxima of the spectral density on `[0, e_max]`, refined by a parabola through three samples.
pub fn spectral_peaks(basis: &HermiteBasis, window: f64, e_max: f64, de: f64) -> Result<Vec<f64>, WeylError> {
    let sp = HoSpectrum::new(basis)?;
    check_window(&sp, window)?;
    let n = (e_max / de).ceil() as usize;
    let vals: Vec<f64> = (0..=n).map(|k| spectral_density(&sp, basis.taper(), k as f64 * de, window)).collect();
    let top = vals.iter().cloned().fold(0.0, f64::max);
    let mut peaks = Vec::new();
    for k in 1..n {
        if vals[k] > vals[k - 1] && vals[k] >= vals[k + 1] && vals[k] > 0.05 * top {
            let (a, b, c) = (vals[k - 1], vals[k], vals[k + 1]);
            let off = 0.5 * (a - c) / (a - 2.0 * b + c);
            peaks.push((k as f64 + off) * de);
        }
    }
    Ok(peaks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_propagator_at_zero_is_one() {
        assert!((moyal_propagator_exact(0.0, 1.0, 0.3, -1.2) - 1.0).norm() < 1e-15);
    }

    #[test]
    fn rejects_singular_times() {
        let b = HermiteBasis::new(8, 1.0).unwrap();
        assert!(matches!(moyal_propagator_ho(&b, std::f64::consts::PI, &GridSpec::square(1.0, 3)), Err(WeylError::NearSingularTime(_))));
    }

    #[test]
    fn short_window_rejected() {
        let b = HermiteBasis::new(8, 1.0).unwrap();
        assert!(matches!(spectral_projection_ho(&b, 0.5, 5.0, &GridSpec::square(1.0, 3)), Err(WeylError::WindowTooShort { .. })));
    }
}
