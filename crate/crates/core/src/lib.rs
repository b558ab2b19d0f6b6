pub mod certificate;
pub mod convexity;
pub mod entropy;
pub mod error;
pub mod experiments;
pub mod fit;
pub mod matcore;
pub mod schatten;

pub use certificate::{default_tolerance, CertificateStatus, InequalityCertificate};
pub use error::{Error, Result};
pub use fit::SlopeFit;
pub use matcore::{ComplexMatrix, DensityMatrix, HermitianMatrix, C64};
