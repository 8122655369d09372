//! Continuous-time quantum walks on triple graphs.
//!
//! A triple graph is an `N`-site main chain (unit hopping) with an `S`-site
//! side chain (hopping `J`) hanging off main-chain site `ℓ`. This crate builds
//! the tight-binding Hamiltonian, diagonalizes it, propagates walkers, and
//! provides the closed-form Green-function machinery that explains when the
//! side chain blocks transport between the two halves of the main chain.
//!
//! Sites are 1-indexed everywhere in the public API: main-chain sites are
//! `1..=N`, side-chain sites are `N+1..=N+S`, and site `N+1` is the one bonded
//! to `ℓ`.
//!
//! ```
//! use triplewalk::{dynamics, model::TripleGraphSpec, dynamics::Side};
//!
//! let spec = TripleGraphSpec::new(11, 1, 5, 10.0).unwrap();
//! let trace = dynamics::propagate_trace(&spec, 3, 20.0, 0.05).unwrap();
//! let verdict = dynamics::detect_switching(&trace, Side::Left, 0.05).unwrap();
//! assert!(verdict.switching);
//! ```

pub mod dynamics;
pub mod error;
pub mod exec;
pub mod linalg;
pub mod model;
pub mod spectral;
pub mod sweep;
pub mod verify;

pub use error::{Error, Result};
pub use exec::Execution;
pub use model::{Hamiltonian, SitePartition, TripleGraphSpec};
