use nalgebra::DMatrix;
use num_complex::Complex64;

/// Fourier coefficients `c_r`, `|r| <= R`, of `psi(t) = sum c_r e^{irt} / sqrt(2 pi)` on `[-pi, pi]`.
#[derive(Clone, Debug, PartialEq)]
pub struct CircleState {
    pub cutoff: usize,
    pub coeffs: Vec<Complex64>,
}

impl CircleState {
    pub fn zero(cutoff: usize) -> Self {
        CircleState { cutoff, coeffs: vec![Complex64::new(0.0, 0.0); 2 * cutoff + 1] }
    }

    /// `|r>`.
    pub fn mode(cutoff: usize, r: i64) -> Self {
        let mut s = CircleState::zero(cutoff);
        s.coeffs[(r + cutoff as i64) as usize] = Complex64::new(1.0, 0.0);
        s
    }

    /// Coefficients of a smooth periodic function by the trapezoid rule on `samples` points.
    pub fn from_fn(cutoff: usize, samples: usize, f: impl Fn(f64) -> Complex64) -> Self {
        let tp = 2.0 * std::f64::consts::PI;
        let vals: Vec<(f64, Complex64)> = (0..samples)
            .map(|k| {
                let t = -std::f64::consts::PI + tp * k as f64 / samples as f64;
                (t, f(t))
            })
            .collect();
        let coeffs = (-(cutoff as i64)..=cutoff as i64)
            .map(|r| vals.iter().map(|(t, v)| v * Complex64::from_polar(1.0, -(r as f64) * t)).sum::<Complex64>() * (tp.sqrt() / samples as f64))
            .collect();
        CircleState { cutoff, coeffs }
    }

    pub fn coeff(&self, r: i64) -> Complex64 {
        let i = r + self.cutoff as i64;
        if i < 0 || i as usize >= self.coeffs.len() {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[i as usize]
        }
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        let c = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
        (-(self.cutoff as i64)..=self.cutoff as i64).map(|r| self.coeff(r) * Complex64::from_polar(c, r as f64 * t)).sum()
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Apply a mode-space operator with the same cutoff.
    pub fn apply(&self, op: &DMatrix<Complex64>) -> CircleState {
        let v = nalgebra::DVector::from_column_slice(&self.coeffs);
        CircleState { cutoff: self.cutoff, coeffs: (op * v).as_slice().to_vec() }
    }
}

/// Multiplication by `cos t` in modes `|r| <= cutoff`.
pub fn cos_matrix(cutoff: usize) -> DMatrix<Complex64> {
    let n = 2 * cutoff + 1;
    DMatrix::from_fn(n, n, |i, j| if i + 1 == j || j + 1 == i { Complex64::new(0.5, 0.0) } else { Complex64::new(0.0, 0.0) })
}

/// Frobenius norm of the block `|r|, |s| <= k` of a mode matrix with the given cutoff.
pub fn block_norm(m: &DMatrix<Complex64>, cutoff: usize, k: usize) -> f64 {
    let lo = cutoff - k;
    m.view((lo, lo), (2 * k + 1, 2 * k + 1)).norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fourier_round_trip() {
        let s = CircleState::from_fn(8, 64, |t| Complex64::new((2.0 * t).cos(), t.sin()));
        for t in [-2.0, 0.3, 1.7] {
            assert!((s.eval(t) - Complex64::new((2.0 * t).cos(), t.sin())).norm() < 1e-12);
        }
        assert!((s.coeff(2).re - (std::f64::consts::PI / 2.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn cos_matrix_matches_multiplication() {
        let s = CircleState::mode(4, 1);
        let c = s.apply(&cos_matrix(4));
        assert!((c.coeff(0) - 0.5).norm() < 1e-15 && (c.coeff(2) - 0.5).norm() < 1e-15);
    }
}
