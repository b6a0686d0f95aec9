use num_complex::Complex64;
use rustfft::FftPlanner;

use super::SwError;

/// Samples of `psi(w)` on the periodic grid `w_k = (k - N/2) dw`, `dw = 2L/N`.
///
/// Shifts are spectral (exact for band-limited data); the reflection `w -> -w`
/// is the index map `k -> N - k`.
#[derive(Clone, Debug, PartialEq)]
pub struct LineState {
    pub half_width: f64,
    pub values: Vec<Complex64>,
}

impl LineState {
    /// Samples `f` and checks that the boundary values are below `1e-10` of the maximum.
    pub fn from_fn(half_width: f64, n: usize, f: impl Fn(f64) -> Complex64) -> Result<Self, SwError> {
        if n < 8 || !n.is_multiple_of(2) || half_width <= 0.0 {
            return Err(SwError::BadParameter(format!("line grid needs even n >= 8 and L > 0 (n={}, L={})", n, half_width)));
        }
        let dw = 2.0 * half_width / n as f64;
        let values = (0..n).map(|k| f((k as f64 - n as f64 / 2.0) * dw)).collect();
        let s = LineState { half_width, values };
        s.check_decay()?;
        Ok(s)
    }

    /// Gaussian wave packet `exp(-(w - w0)^2 / (2 s^2) + i k0 w)`, normalized.
    pub fn wave_packet(half_width: f64, n: usize, w0: f64, s: f64, k0: f64) -> Result<Self, SwError> {
        let mut st = LineState::from_fn(half_width, n, |w| Complex64::from_polar((-(w - w0).powi(2) / (2.0 * s * s)).exp(), k0 * w))?;
        let nrm = st.norm();
        for v in st.values.iter_mut() {
            *v /= nrm;
        }
        Ok(st)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dw(&self) -> f64 {
        2.0 * self.half_width / self.len() as f64
    }

    pub fn w(&self, k: usize) -> f64 {
        (k as f64 - self.len() as f64 / 2.0) * self.dw()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn check_decay(&self) -> Result<(), SwError> {
        let n = self.len();
        let edge = self.values[0].norm().max(self.values[n - 1].norm());
        let top = self.max_abs();
        if top > 0.0 && edge > 1e-10 * top {
            return Err(SwError::SupportOverflow { edge: edge / top });
        }
        Ok(())
    }

    pub fn norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.dw()).sqrt()
    }

    pub fn inner(&self, o: &LineState) -> Complex64 {
        self.values.iter().zip(&o.values).map(|(a, b)| a.conj() * b).sum::<Complex64>() * self.dw()
    }

    pub fn distance(&self, o: &LineState) -> f64 {
        (self.values.iter().zip(&o.values).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>() * self.dw()).sqrt()
    }

    /// `psi(w) -> f(w) psi(w)`.
    pub fn multiply(&self, f: impl Fn(f64) -> Complex64) -> LineState {
        let values = self.values.iter().enumerate().map(|(k, v)| v * f(self.w(k))).collect();
        LineState { half_width: self.half_width, values }
    }

    /// `psi(w) -> psi(-w)`.
    pub fn reflect(&self) -> LineState {
        let n = self.len();
        let values = (0..n).map(|k| self.values[(n - k) % n]).collect();
        LineState { half_width: self.half_width, values }
    }

    /// `psi(w) -> psi(w - s)`; errors if mass would wrap around the periodic box.
    pub fn shift(&self, s: f64) -> Result<LineState, SwError> {
        let n = self.len();
        let dw = self.dw();
        let cells = (s.abs() / dw).ceil() as usize + 1;
        if cells >= n {
            return Err(SwError::SupportOverflow { edge: 1.0 });
        }
        let top = self.max_abs();
        // samples that would cross the box edge
        let moving: Box<dyn Iterator<Item = &Complex64>> =
            if s > 0.0 { Box::new(self.values[n - cells..].iter()) } else { Box::new(self.values[..cells].iter()) };
        let edge = moving.map(|v| v.norm()).fold(0.0, f64::max);
        if top > 0.0 && edge > 1e-10 * top {
            return Err(SwError::SupportOverflow { edge: edge / top });
        }
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let mut buf = self.values.clone();
        fwd.process(&mut buf);
        let two_pi_over_len = 2.0 * std::f64::consts::PI / (n as f64 * dw);
        for (k, v) in buf.iter_mut().enumerate() {
            let kk = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
            // Nyquist bin kept real so real data stays real
            let omega = if 2 * k == n { 0.0 } else { kk * two_pi_over_len };
            *v *= Complex64::from_polar(1.0 / n as f64, -omega * s);
        }
        inv.process(&mut buf);
        Ok(LineState { half_width: self.half_width, values: buf })
    }
}
