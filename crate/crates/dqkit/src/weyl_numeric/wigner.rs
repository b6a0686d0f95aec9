use num_complex::Complex64;
use rayon::prelude::*;

use super::basis::HermiteBasis;
use super::grid::{GridSpec, PhaseGrid};
use super::hermite::hermite_functions;
use super::WeylError;

/// Pure state given by its Hermite coefficients.
#[derive(Clone, Debug)]
pub struct HermiteState {
    pub hbar: f64,
    pub coeffs: Vec<Complex64>,
}

impl HermiteState {
    pub fn basis_state(basis: &HermiteBasis, n: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); basis.size()];
        coeffs[n] = Complex64::new(1.0, 0.0);
        HermiteState { hbar: basis.hbar(), coeffs }
    }

    /// Project uniform samples `psi(x0 + k dx)` onto the basis.
    pub fn from_samples(basis: &HermiteBasis, x0: f64, dx: f64, samples: &[Complex64]) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); basis.size()];
        for (k, v) in samples.iter().enumerate() {
            let h = hermite_functions(basis.size(), basis.hbar(), x0 + k as f64 * dx);
            for (c, hn) in coeffs.iter_mut().zip(&h) {
                *c += v * hn * dx;
            }
        }
        HermiteState { hbar: basis.hbar(), coeffs }
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        hermite_functions(self.coeffs.len(), self.hbar, x).iter().zip(&self.coeffs).map(|(h, c)| c * h).sum()
    }
}

/// Wigner function `rho(p,q) = int dx exp(-i x p / hbar) psi*(q + x/2) psi(q - x/2)`.
///
/// Normalization: `int rho dp dq / (2 pi hbar) = 1`, and `rho = Tr[Omega(p,q) |psi><psi|]`.
/// The exponent sign follows the crate's momentum convention (`[Q,P] = -i hbar`).
pub fn wigner_from_state(psi: &HermiteState, spec: &GridSpec) -> Result<PhaseGrid, WeylError> {
    spec.validate()?;
    let norm = psi.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(WeylError::NotNormalized(norm));
    }
    let h = psi.hbar;
    let m = psi.coeffs.len();
    // the integrand decays like the basis envelope; cover it with a fine trapezoid rule
    let reach = 2.0 * ((2.0 * m as f64 + 1.0) * h).sqrt() + 12.0 * h.sqrt();
    let dx = 0.02 * h.sqrt();
    let nx = (reach / dx).ceil() as usize;
    let rows: Vec<Vec<Complex64>> = (0..spec.nq)
        .into_par_iter()
        .map(|iq| {
            let q = spec.q(iq);
            let xs: Vec<f64> = (0..=2 * nx).map(|k| (k as f64 - nx as f64) * dx).collect();
            let g: Vec<Complex64> = xs.iter().map(|&x| psi.eval(q + 0.5 * x).conj() * psi.eval(q - 0.5 * x)).collect();
            (0..spec.np)
                .map(|ip| {
                    let p = spec.p(ip);
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (x, gv) in xs.iter().zip(&g) {
                        acc += gv * Complex64::from_polar(1.0, -x * p / h);
                    }
                    acc * dx
                })
                .collect()
        })
        .collect();
    Ok(PhaseGrid { spec: *spec, values: rows.into_iter().flatten().collect() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ground_state_gaussian() {
        let b = HermiteBasis::new(8, 1.0).unwrap();
        let spec = GridSpec::square(2.0, 5);
        let w = wigner_from_state(&HermiteState::basis_state(&b, 0), &spec).unwrap();
        for iq in 0..5 {
            for ip in 0..5 {
                let (q, p) = (spec.q(iq), spec.p(ip));
                let want = 2.0 * (-(q * q + p * p)).exp();
                assert!((w.at(iq, ip) - want).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn first_excited_is_negative_at_origin() {
        let b = HermiteBasis::new(8, 1.0).unwrap();
        let w = wigner_from_state(&HermiteState::basis_state(&b, 1), &GridSpec::square(0.0, 1)).unwrap();
        assert!((w.values[0] - Complex64::new(-2.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn rejects_unnormalized() {
        let b = HermiteBasis::new(4, 1.0).unwrap();
        let mut s = HermiteState::basis_state(&b, 0);
        s.coeffs[1] = Complex64::new(0.1, 0.0);
        assert!(matches!(wigner_from_state(&s, &GridSpec::square(1.0, 3)), Err(WeylError::NotNormalized(_))));
    }
}
