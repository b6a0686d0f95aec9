//! Exact phase-space polynomial algebra: Poisson bracket, Moyal star product and
//! bracket as terminating series, and Weyl symmetrization into normal-ordered words.

mod crat;
mod heisenberg;
mod poly;
mod series;
mod star;
mod symplectic;

pub use crat::{CRat, ParseCRatError};
pub use heisenberg::{
    commutator_constant, weyl_homomorphism_check, weyl_homomorphism_defect, weyl_symmetrize, weyl_symmetrize_by_words, weyl_symmetrize_series, HeisenbergWord,
    Letter, WeylPoly,
};
pub use poly::PhasePoly;
pub use series::HbarSeries;
pub use star::{bidiff_power, moyal_bracket, moyal_star, poisson_bracket, star_commutator, star_poly, star_with, Convention};
pub use symplectic::{is_symplectic, pull_back, standard_j, symplectic_equivariance_defect, symplectic_equivariance_residual, symplectic_inverse, RatMatrix};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PolyError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("truncation order mismatch: {0} vs {1}")]
    OrderMismatch(usize, usize),
    #[error("truncation order {got} too low, need at least {needed}")]
    OrderTooLow { needed: usize, got: usize },
    #[error("commutator has a nonzero hbar^0 part")]
    NonDivisible,
    #[error("matrix is not symplectic")]
    NotSymplectic,
    #[error("parse error: {0}")]
    Parse(String),
}
