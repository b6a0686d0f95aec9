use num_complex::Complex64;

use super::basis::{HermiteBasis, OperatorMatrix};
use super::grid::PhaseGrid;
use super::weyl::{weyl_inverse, weyl_map};
use super::WeylError;

/// Both sides of the smeared identity `int int f(x) g(x') Tr[Omega(x) Omega(x')] = (2 pi hbar) int f g`.
#[derive(Clone, Copy, Debug)]
pub struct SmearedTrace {
    pub lhs: Complex64,
    pub rhs: Complex64,
}

impl SmearedTrace {
    pub fn relative_error(&self) -> f64 {
        let s = self.rhs.norm().max(self.lhs.norm());
        if s == 0.0 {
            0.0
        } else {
            (self.lhs - self.rhs).norm() / s
        }
    }
}

/// Smeared form of `Tr[Omega(x) Omega(x')] = 2 pi hbar delta(x - x')`.
///
/// The left side is `(2 pi hbar)^2 Tr[W_f W_g]` since `int f Omega = 2 pi hbar W_f`.
pub fn smeared_trace_product(basis: &HermiteBasis, f: &PhaseGrid, g: &PhaseGrid) -> Result<SmearedTrace, WeylError> {
    if f.spec != g.spec {
        return Err(WeylError::BadGrid("test symbols must share a grid".into()));
    }
    let tp = 2.0 * std::f64::consts::PI * basis.hbar();
    let wf = weyl_map(basis, f)?;
    let wg = weyl_map(basis, g)?;
    let lhs = (&wf.entries * &wg.entries).trace() * (tp * tp);
    let fg: Complex64 = f.values.iter().zip(&g.values).map(|(a, b)| a * b).sum::<Complex64>() * (f.spec.dq() * f.spec.dp());
    Ok(SmearedTrace { lhs, rhs: fg * tp })
}

/// `Tr(AB)` against `int W_A W_B dp dq / (2 pi hbar)` with symbols sampled on a shared grid.
pub fn trace_formula(basis: &HermiteBasis, a: &OperatorMatrix, b: &OperatorMatrix, wa: &PhaseGrid, wb: &PhaseGrid) -> (Complex64, Complex64) {
    let direct = (&a.entries * &b.entries).trace();
    let s = wa.spec;
    let phase: Complex64 =
        wa.values.iter().zip(&wb.values).map(|(x, y)| x * y).sum::<Complex64>() * (s.dq() * s.dp()) / (2.0 * std::f64::consts::PI * basis.hbar());
    (direct, phase)
}

/// `int (f*g)` against `int f g`, with `f*g = W^{-1}(W_f W_g)` computed on the same grid.
pub fn average_identity(basis: &HermiteBasis, f: &PhaseGrid, g: &PhaseGrid) -> Result<(Complex64, Complex64), WeylError> {
    let wf = weyl_map(basis, f)?;
    let wg = weyl_map(basis, g)?;
    let star = weyl_inverse(basis, &wf.mul(&wg), &f.spec)?;
    let direct: Complex64 = f.values.iter().zip(&g.values).map(|(a, b)| a * b).sum::<Complex64>() * (f.spec.dq() * f.spec.dp());
    Ok((star.integrate(), direct))
}
