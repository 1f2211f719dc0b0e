//! Numerical laboratory for quantum Zeno dynamics on one-dimensional grids.
//!
//! The crate is organised bottom-up:
//!
//! * [`grid`]: uniform lattices, state vectors, interval projectors.
//! * [`operators`]: Hamiltonians as Fourier multipliers or dense matrices,
//!   compression onto a region, Hermitian eigendecomposition, closed-form spectra.
//! * [`propagator`]: exact `exp(-iHt)` in a diagonalizing basis.
//! * [`zeno`]: products `[E U(T/N) E]^N`, their limit `exp(-iT EHE) E`,
//!   convergence sweeps and the translation oracles for `H = p`.
//! * [`euclidean`]: restricted heat kernels, their N-fold products and the
//!   Dirichlet heat-kernel series.
//!
//! Units have `hbar = 1` throughout.

pub mod error;
mod fourier;
pub mod euclidean;
pub mod grid;
pub mod operators;
pub mod propagator;
pub mod zeno;

pub use error::{Result, ZenoError};
pub use grid::{Grid, Region, StateVector};
pub use num_complex::Complex64;
pub use operators::{Boundary, HamiltonianOperator, HamiltonianSpec, Model, Spectrum};
pub use propagator::Propagator;

/// Largest matrix dimension handed to the dense eigensolver.
pub const DENSE_LIMIT: usize = 4096;
