//! Deformation quantization toolkit.
//!
//! * [`phase_poly`] exact Moyal star algebra on phase-space polynomials
//! * [`weyl_numeric`] Weyl-Wigner correspondence on a truncated Hermite basis
//! * [`sw_kernels`] Stratonovich-Weyl kernels for the Galilei and Newton-Hooke groups
//! * [`poisson_lie`] Sklyanin bracket, R-matrices and the SL_q(2) rewriting engine
//! * [`cli`] verification suites and the expression evaluator behind the `dqkit` binary

pub mod cli;
pub mod phase_poly;
pub mod poisson_lie;
pub mod sw_kernels;
pub mod weyl_numeric;
