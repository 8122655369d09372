//! Closed-form spectral machinery for the triple graph.
//!
//! * bare-chain levels and eigenvector amplitudes,
//! * main-chain and side-chain Green-function elements,
//! * level classification (remaining vs. shifted levels) and the large-`J`
//!   sub-chain predictions,
//! * root finding for the finite-`J` and large-`J` level equations, and the
//!   `O(1/J²)` level shift,
//! * the perturbative crossing amplitude and the side-chain leakage residue.

mod chain;
mod green;
mod levels;
mod perturbative;
mod roots;

pub use chain::{chain_amplitude, chain_levels, ChainSpectrum};
pub use green::{g0_diag, g0_element, g0_squared_diag, side_chain_g_diag, POLE_TOLERANCE};
pub use levels::{
    classify_levels, gcd, lambda_s, remaining_levels, shifted_levels_large_j, LevelClassification,
};
pub use perturbative::{perturbative_amplitude, side_leak_residue};
pub use roots::{delta_shift, find_roots, level_equation, LevelMode, RootSet};
