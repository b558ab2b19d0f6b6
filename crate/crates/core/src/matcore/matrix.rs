use std::fmt;
use std::ops::{Add, Deref, Mul, Neg, Sub};

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};

use super::{
    spectral::eig_hermitian, HERMITIAN_TOL, PSD_CLAMP_TOL, TRACE_TOL,
};

pub type C64 = Complex<f64>;

/// Dense square complex matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl ComplexMatrix {
    pub fn new(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                let z = m[(i, j)];
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(Self(m))
    }

    /// Wrap without validation; callers guarantee squareness and finiteness.
    pub(crate) fn from_inner(m: DMatrix<C64>) -> Self {
        debug_assert_eq!(m.nrows(), m.ncols());
        Self(m)
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize, usize) -> C64) -> Result<Self> {
        Self::new(DMatrix::from_fn(n, n, f))
    }

    /// Row-major construction.
    pub fn from_row_slice(n: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch(entries.len(), n * n));
        }
        Self::new(DMatrix::from_row_slice(n, n, entries))
    }

    pub fn from_real_row_slice(n: usize, entries: &[f64]) -> Result<Self> {
        let c: Vec<C64> = entries.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_row_slice(n, &c)
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n.max(1), n.max(1)))
    }

    pub fn zeros(n: usize) -> Self {
        Self(DMatrix::zeros(n.max(1), n.max(1)))
    }

    pub fn from_diagonal(d: &[C64]) -> Result<Self> {
        let n = d.len();
        Self::from_fn(n, |i, j| if i == j { d[i] } else { C64::new(0.0, 0.0) })
    }

    pub fn from_real_diagonal(d: &[f64]) -> Result<Self> {
        let c: Vec<C64> = d.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_diagonal(&c)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<C64> {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn scale(&self, c: C64) -> Self {
        Self(self.0.map(|z| z * c))
    }

    pub fn scale_real(&self, c: f64) -> Self {
        Self(self.0.map(|z| z * c))
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, z| m.max(z.norm()))
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).norm()))
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.dim();
        (0..n).all(|j| (0..n).all(|i| i == j || self.0[(i, j)] == C64::new(0.0, 0.0)))
    }

    /// Max entry of `AB - BA`.
    pub fn commutator_norm(&self, other: &Self) -> f64 {
        (self * other).max_abs_diff(&(other * self))
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix{}", self.0)
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl $tr<&ComplexMatrix> for &ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: &ComplexMatrix) -> ComplexMatrix {
                assert_eq!(self.dim(), rhs.dim(), "matrix dimension mismatch");
                let f: fn(&DMatrix<C64>, &DMatrix<C64>) -> DMatrix<C64> = $body;
                ComplexMatrix(f(&self.0, &rhs.0))
            }
        }
        impl $tr<ComplexMatrix> for ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: ComplexMatrix) -> ComplexMatrix {
                (&self).$method(&rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| a + b);
binop!(Sub, sub, |a, b| a - b);
binop!(Mul, mul, |a, b| a * b);

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-&self.0)
    }
}

/// Complex matrix equal to its adjoint up to `1e-12 × max|entry|`.
///
/// The stored entries are exactly Hermitian: the constructor replaces the
/// input by `(H + H*)/2` once the tolerance check has passed.
#[derive(Clone, PartialEq)]
pub struct HermitianMatrix(ComplexMatrix);

impl HermitianMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let deviation = m.max_abs_diff(&m.adjoint());
        if deviation > HERMITIAN_TOL * m.max_abs() {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self::hermitize(m))
    }

    /// Project onto the Hermitian part without checking.
    pub(crate) fn hermitize(m: ComplexMatrix) -> Self {
        let sym = (&m.0 + m.0.adjoint()) * C64::new(0.5, 0.0);
        Self(ComplexMatrix(sym))
    }

    pub fn from_real_diagonal(d: &[f64]) -> Result<Self> {
        Ok(Self(ComplexMatrix::from_real_diagonal(d)?))
    }

    pub fn identity(n: usize) -> Self {
        Self(ComplexMatrix::identity(n))
    }

    pub fn as_complex(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_complex(self) -> ComplexMatrix {
        self.0
    }

    /// Real trace.
    pub fn real_trace(&self) -> f64 {
        self.0.trace().re
    }
}

impl Deref for HermitianMatrix {
    type Target = ComplexMatrix;
    fn deref(&self) -> &ComplexMatrix {
        &self.0
    }
}

impl fmt::Debug for HermitianMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HermitianMatrix{}", self.0 .0)
    }
}

/// Positive semidefinite Hermitian matrix with unit trace.
///
/// Eigenvalues in `[-1e-10, 0)` are clamped to zero on construction; anything
/// more negative is rejected.
#[derive(Clone, PartialEq)]
pub struct DensityMatrix(HermitianMatrix);

impl DensityMatrix {
    pub fn new(h: HermitianMatrix) -> Result<Self> {
        let trace = h.real_trace();
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::NotNormalized { trace });
        }
        let spec = eig_hermitian(&h)?;
        let min_eigenvalue = spec.eigenvalues()[0];
        if min_eigenvalue < -PSD_CLAMP_TOL {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        if min_eigenvalue < 0.0 {
            return Ok(Self(spec.map(|x| x.max(0.0))));
        }
        Ok(Self(h))
    }

    /// Normalize an arbitrary PSD matrix by its trace.
    pub fn from_psd(h: &HermitianMatrix) -> Result<Self> {
        let t = h.real_trace();
        if !(t > 0.0) {
            return Err(Error::NotNormalized { trace: t });
        }
        Self::new(HermitianMatrix::hermitize(h.scale_real(1.0 / t)))
    }

    pub fn from_diagonal(d: &[f64]) -> Result<Self> {
        Self::new(HermitianMatrix::from_real_diagonal(d)?)
    }

    pub fn maximally_mixed(n: usize) -> Self {
        let n = n.max(1);
        Self(HermitianMatrix(ComplexMatrix::identity(n).scale_real(1.0 / n as f64)))
    }

    pub fn as_hermitian(&self) -> &HermitianMatrix {
        &self.0
    }

    pub fn into_hermitian(self) -> HermitianMatrix {
        self.0
    }
}

impl Deref for DensityMatrix {
    type Target = HermitianMatrix;
    fn deref(&self) -> &HermitianMatrix {
        &self.0
    }
}

impl fmt::Debug for DensityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DensityMatrix{}", self.0 .0 .0)
    }
}
