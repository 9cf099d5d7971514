//! Entanglement measures and quantum Fisher information for small bipartite
//! density matrices.
//!
//! The crate is organised bottom-up:
//!
//! - [`linalg`]: dense complex matrices, a cyclic Jacobi Hermitian
//!   eigensolver, Kronecker products, partial trace/transpose and spectral
//!   matrix functions.
//! - [`states`]: named states (Bell, GHZ, W, W-like, W/GHZ superpositions,
//!   Schmidt, Werner) and seeded random ensembles.
//! - [`channels`]: single-qubit Kraus channels applied to every qubit, plus
//!   strength sweeps.
//! - [`measures`]: concurrence, maximal concurrence, negativity family,
//!   entanglement of formation and a Frank–Wolfe relative entropy of
//!   entanglement estimator.
//! - [`qfi`]: C-matrix quantum Fisher information and the local Euler
//!   rotation grid optimizer.
//! - [`ordering`]: pairwise ordering classes and ensemble censuses.

#![forbid(unsafe_code)]

pub mod channels;
pub mod error;
pub mod linalg;
pub mod measures;
pub mod ordering;
pub mod qfi;
pub mod states;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, DensityMatrix, Spectrum, Subsystem, C64};
