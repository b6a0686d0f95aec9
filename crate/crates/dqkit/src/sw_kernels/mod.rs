//! Stratonovich-Weyl kernels for the Galilei group `G(1,1)` and the Newton-Hooke group `NH(1,1)`.
//!
//! Galilei states live on the line (`LineState`, argument = velocity); Newton-Hooke states
//! live on the circle and are handled in Fourier modes (`CircleState`). Kernels are also
//! assembled as matrices (Hermite basis on the line, modes `|r>` on the circle) for the
//! trace-based axioms.
//!
//! The orbit measure is `dmu = dp dq / 2pi` per canonical pair.

mod bessel;
mod circle;
mod galilei;
mod line;
mod nh;
mod report;

pub use bessel::{bessel_cutoff, bessel_j_signed, bessel_j_upto};
pub use circle::{block_norm, cos_matrix, CircleState};
pub use galilei::*;
pub use line::LineState;
pub use nh::*;
pub use report::{AxiomReport, Refinement};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SwError {
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("state support reaches the grid edge (relative value {edge:e})")]
    SupportOverflow { edge: f64 },
    #[error("mode truncation overflow: Bessel tail {tail:e}")]
    ModeOverflow { tail: f64 },
    #[error("kernel constraint `{what}` violated by {residual:e}")]
    ConstraintViolated { what: String, residual: f64 },
    #[error("quadrature not converged: refinement changed the result by {change:.3}")]
    NotConverged { change: f64 },
    #[error("cost {cost} exceeds budget {budget}")]
    CostExceeded { cost: u64, budget: u64 },
}

/// Orbit measure normalization per canonical pair.
pub const MEASURE_NORM: f64 = 1.0 / (2.0 * std::f64::consts::PI);

/// Tolerance for pointwise kernel constraints.
pub const CONSTRAINT_TOL: f64 = 1e-9;

/// Number of sample points used by constraint checks.
pub const CONSTRAINT_SAMPLES: usize = 1024;

pub(crate) fn dist_to_2pi_z(x: f64) -> f64 {
    let tp = 2.0 * std::f64::consts::PI;
    (x - tp * (x / tp).round()).abs()
}

pub(crate) fn rel_frobenius(a: &nalgebra::DMatrix<num_complex::Complex64>, b: &nalgebra::DMatrix<num_complex::Complex64>) -> f64 {
    let d = (a - b).norm();
    let n = b.norm();
    if n == 0.0 {
        d
    } else {
        d / n
    }
}
