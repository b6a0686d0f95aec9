//! Weyl-Wigner correspondence on a truncated Hermite basis (one degree of freedom).
//!
//! Operators live in the span of the first `M` Hermite functions. Symbols of
//! operators are read off with a smooth spectral taper `F = diag(erfc((n - n_c)/w)/2)`
//! (`W^{-1}(A) = Tr[Omega F A F]`), because the symbol of a sharply truncated
//! operator is not local: the truncated identity gives `0` or `2` at the origin.

mod basis;
mod crossval;
mod gr;
mod grid;
mod hermite;
mod propagator;
mod traces;
mod weyl;
mod wigner;

pub use basis::{HermiteBasis, OperatorMatrix, TAPER_FRACTION, TAPER_WIDTH};
pub use crossval::{cross_validate_star, trusted_half_width};
pub use gr::{displaced_parity, displacement, grossmann_royer_fast, phase_point_alpha, trace_with};
pub use grid::{GridSpec, PhaseGrid};
pub use hermite::{gauss_hermite, hermite_functions};
pub use propagator::{
    ho_symbol, moyal_propagator_exact, moyal_propagator_ho, spectral_density, spectral_peaks, spectral_projection_ho, star_schrodinger_residual, HoSpectrum,
};
pub use traces::{average_identity, smeared_trace_product, trace_formula, SmearedTrace};
pub use weyl::{
    grossmann_royer, grossmann_royer_recurrence, grossmann_royer_unchecked, symbol_at, weyl_inverse, weyl_inverse_raw, weyl_map, weyl_map_poly,
    weyl_product_poly,
};
pub use wigner::{wigner_from_state, HermiteState};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum WeylError {
    #[error("point (p={p}, q={q}) outside the resolved region q^2+p^2 <= {bound}")]
    Unresolved { p: f64, q: f64, bound: f64 },
    #[error("symbol does not decay at the grid boundary: {edge:e} > {tol:e}")]
    BoundaryDecay { edge: f64, tol: f64 },
    #[error("state norm {0} differs from 1")]
    NotNormalized(f64),
    #[error("time {0} too close to a secant singularity")]
    NearSingularTime(f64),
    #[error("window {window} shorter than {need} needed to separate levels")]
    WindowTooShort { window: f64, need: f64 },
    #[error("operator size {0} does not match basis size {1}")]
    SizeMismatch(usize, usize),
    #[error("bad grid: {0}")]
    BadGrid(String),
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("io: {0}")]
    Io(String),
}
