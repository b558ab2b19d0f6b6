//! Dense complex matrices and the spectral primitives everything else uses.

pub mod ensemble;
pub mod matrix;
pub mod spectral;

pub use ensemble::{random_sample, EnsembleConfig, EnsembleKind, Sample};
pub use matrix::{ComplexMatrix, DensityMatrix, HermitianMatrix, C64};
pub use spectral::{
    abs_mat, eig_hermitian, mat_power, mat_power_with, polar, svd, trace_inner, PolarFactors,
    PowerMode, SingularValues, SpectralDecomposition,
};

/// Singular values / eigenvalues below `RANK_TOL × largest` count as zero.
pub const RANK_TOL: f64 = 1e-12;
/// Negative eigenvalues down to `-PSD_CLAMP_TOL` are rounding noise.
pub const PSD_CLAMP_TOL: f64 = 1e-10;
/// Allowed `|Tr ρ - 1|` for density matrices.
pub const TRACE_TOL: f64 = 1e-10;
/// Allowed `max|H - H*|` relative to `max|H|`.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Reconstruction residual accepted from a decomposition.
pub const DECOMP_RESIDUAL_TOL: f64 = 1e-10;
