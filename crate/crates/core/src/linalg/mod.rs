//! Dense linear algebra for small real-symmetric Hamiltonians: Jacobi
//! eigendecomposition, spectral time evolution, numeric resolvent, and a
//! Taylor scaling-and-squaring matrix exponential used as an independent check
//! on the spectral propagator.

mod cmatrix;
mod eig;
mod expm;
mod resolvent;
mod state;

pub use cmatrix::ComplexMatrix;
pub use eig::{symmetric_eig, SpectralDecomposition, JACOBI_MAX_SWEEPS, JACOBI_TOLERANCE};
pub use expm::matexp_oracle;
pub use resolvent::{resolvent_column, resolvent_element, resolvent_matrix};
pub use state::{evolve, expectation, Propagator, WalkState};

pub use num_complex::Complex64;
