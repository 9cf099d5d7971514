//! Dense complex linear algebra for matrices up to 16×16.

mod density;
mod eigen;
mod matrix;

pub use density::{partial_transpose, DensityMatrix, Subsystem, HERMITIAN_TOL, PSD_TOL, TRACE_TOL};
pub use eigen::{
    clamp_psd, hermitian_eig, hermitian_eigenvalues, log2_pd, spectral_fn, sqrt_psd,
    symmetric_eig, Spectrum, JACOBI_MAX_SWEEPS, JACOBI_TOL, PSD_CLAMP,
};
pub use matrix::{kron, kron_all, kron_vec, pauli, ComplexMatrix, C64, I, ONE, ZERO};
