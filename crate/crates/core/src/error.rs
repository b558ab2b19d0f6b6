use thiserror::Error;

/// Errors raised by matrix construction, decompositions and certificates.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix must be square with dim >= 1, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("matrix is not Hermitian (max |H - H*| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("density matrix must have unit trace, got {trace}")]
    NotNormalized { trace: f64 },

    #[error("{routine} did not converge (residual {residual:e})")]
    NotConverged { routine: &'static str, residual: f64 },

    #[error("expected a unit vector in the {which} norm, got norm {norm}")]
    NotUnit { which: &'static str, norm: f64 },

    #[error("norm gradient is undefined at the zero matrix")]
    ZeroMatrix,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("{name} = {value} is outside {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("degenerate fit: {0}")]
    DegenerateFit(&'static str),

    #[error("invalid ensemble config: {0}")]
    InvalidConfig(String),

    #[error("unknown inequality {0:?}")]
    UnknownInequality(String),
}

pub type Result<T> = core::result::Result<T, Error>;

/// Reject a real parameter that falls outside an interval.
pub(crate) fn check_domain(
    name: &'static str,
    value: f64,
    domain: &'static str,
    ok: bool,
) -> Result<()> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            domain,
        })
    }
}
