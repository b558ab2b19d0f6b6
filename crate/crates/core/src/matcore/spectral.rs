//! Hermitian eigendecomposition, SVD, polar decomposition and the
//! support-restricted functional calculus built on them.
//!
//! The factorizations come from `nalgebra`; every result is checked against a
//! reconstruction residual before it is handed out, and that residual check is
//! what callers rely on.

use nalgebra::{linalg::SymmetricEigen, DMatrix, SVD};

use crate::error::{Error, Result};

use super::{
    matrix::{ComplexMatrix, HermitianMatrix, C64},
    DECOMP_RESIDUAL_TOL, PSD_CLAMP_TOL, RANK_TOL,
};

const MAX_SWEEPS: usize = 10_000;

/// `H = V diag(λ) V*` with eigenvalues in ascending order.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: ComplexMatrix,
}

impl SpectralDecomposition {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &ComplexMatrix {
        &self.eigenvectors
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    /// `V diag(f(λ)) V*`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> HermitianMatrix {
        let v = self.eigenvectors.as_matrix();
        let mut scaled = v.clone();
        for (j, &lambda) in self.eigenvalues.iter().enumerate() {
            let fl = f(lambda);
            scaled.column_mut(j).scale_mut(fl);
        }
        HermitianMatrix::hermitize(ComplexMatrix::from_inner(scaled * v.adjoint()))
    }

    pub fn reconstruct(&self) -> HermitianMatrix {
        self.map(|x| x)
    }

    /// Eigenvalue threshold below which an eigenvalue counts as zero.
    pub fn rank_threshold(&self) -> f64 {
        RANK_TOL * self.spectral_radius()
    }

    /// Orthogonal projector onto the span of eigenvectors with `λ > threshold`.
    pub fn support_projector(&self) -> HermitianMatrix {
        let thr = self.rank_threshold();
        self.map(|x| if x > thr { 1.0 } else { 0.0 })
    }

    /// Spectral projector onto eigenvalues strictly above `cut`.
    pub fn projector_above(&self, cut: f64) -> HermitianMatrix {
        self.map(|x| if x > cut { 1.0 } else { 0.0 })
    }

    /// Support-convention power of a PSD spectrum: `λ ↦ λ^s` on the support,
    /// `0` elsewhere (including `s = 0`).
    pub fn power(&self, s: f64) -> Result<HermitianMatrix> {
        self.check_psd()?;
        let thr = self.rank_threshold();
        Ok(self.map(|x| if x > thr { x.powf(s) } else { 0.0 }))
    }

    fn check_psd(&self) -> Result<()> {
        let min = self.eigenvalues[0];
        if min < -PSD_CLAMP_TOL * self.spectral_radius().max(1.0) {
            return Err(Error::NotPositive { min_eigenvalue: min });
        }
        Ok(())
    }
}

pub fn eig_hermitian(h: &HermitianMatrix) -> Result<SpectralDecomposition> {
    let m = h.as_matrix().clone();
    let n = m.nrows();
    let eig = SymmetricEigen::try_new(m, f64::EPSILON, MAX_SWEEPS).ok_or(
        Error::NotConverged {
            routine: "eig_hermitian",
            residual: f64::NAN,
        },
    )?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    let out = SpectralDecomposition {
        eigenvalues,
        eigenvectors: ComplexMatrix::from_inner(vecs),
    };

    let scale = 1.0 + out.spectral_radius();
    let residual = out.reconstruct().max_abs_diff(h);
    let v = out.eigenvectors.as_matrix();
    let unitarity = (v.adjoint() * v - DMatrix::<C64>::identity(n, n))
        .iter()
        .fold(0.0_f64, |m, z| m.max(z.norm()));
    if !(residual <= DECOMP_RESIDUAL_TOL * scale) || !(unitarity <= DECOMP_RESIDUAL_TOL) {
        return Err(Error::NotConverged {
            routine: "eig_hermitian",
            residual: residual.max(unitarity),
        });
    }
    Ok(out)
}

/// `A = U diag(σ) V*` with `σ_1 ≥ … ≥ σ_n ≥ 0`.
#[derive(Debug, Clone)]
pub struct SingularValues {
    values: Vec<f64>,
    left: ComplexMatrix,
    right: ComplexMatrix,
}

impl SingularValues {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Left singular vectors `U` (columns).
    pub fn left(&self) -> &ComplexMatrix {
        &self.left
    }

    /// Right singular vectors `V` (columns), so that `A = U Σ V*`.
    pub fn right(&self) -> &ComplexMatrix {
        &self.right
    }

    pub fn largest(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn rank_threshold(&self) -> f64 {
        RANK_TOL * self.largest()
    }

    /// `Σ_i w_i x_i y_i*` over the numerical support, where `x`/`y` are
    /// columns of the two chosen factors and `w_i = f(σ_i)`.
    pub(crate) fn outer_sum(
        &self,
        x: &ComplexMatrix,
        y: &ComplexMatrix,
        f: impl Fn(f64) -> f64,
    ) -> ComplexMatrix {
        let thr = self.rank_threshold();
        let mut xs = x.as_matrix().clone();
        for (j, &s) in self.values.iter().enumerate() {
            let w = if s > thr { f(s) } else { 0.0 };
            xs.column_mut(j).scale_mut(w);
        }
        ComplexMatrix::from_inner(xs * y.as_matrix().adjoint())
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut us = self.left.as_matrix().clone();
        for (j, &s) in self.values.iter().enumerate() {
            us.column_mut(j).scale_mut(s);
        }
        ComplexMatrix::from_inner(us * self.right.as_matrix().adjoint())
    }
}

/// Singular value decomposition, checked by reconstruction.
///
/// `nalgebra`'s bidiagonal SVD occasionally stalls at a residual near `1e-10`
/// on inputs with close singular values. When its result fails the residual
/// check, the factors are recomputed from the Hermitian eigendecomposition of
/// the dilation `[[0, A], [A*, 0]]`, whose eigenpairs are `±σ_i` with
/// eigenvectors `(u_i, ±v_i)/√2`.
pub fn svd(a: &ComplexMatrix) -> Result<SingularValues> {
    if let Some(out) = svd_bidiagonal(a) {
        if svd_residual(&out, a).is_ok() {
            return Ok(out);
        }
    }
    let out = svd_by_dilation(a)?;
    svd_residual(&out, a)?;
    Ok(out)
}

fn svd_residual(out: &SingularValues, a: &ComplexMatrix) -> Result<()> {
    let residual = out.reconstruct().max_abs_diff(a);
    if !(residual <= DECOMP_RESIDUAL_TOL * out.largest().max(f64::MIN_POSITIVE)) {
        return Err(Error::NotConverged {
            routine: "svd",
            residual,
        });
    }
    Ok(())
}

fn sorted_factors(values: &[f64], u: &DMatrix<C64>, v: &DMatrix<C64>) -> SingularValues {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]));
    SingularValues {
        values: order.iter().map(|&i| values[i].max(0.0)).collect(),
        left: ComplexMatrix::from_inner(DMatrix::from_fn(n, n, |i, j| u[(i, order[j])])),
        right: ComplexMatrix::from_inner(DMatrix::from_fn(n, n, |i, j| v[(i, order[j])])),
    }
}

fn svd_bidiagonal(a: &ComplexMatrix) -> Option<SingularValues> {
    let dec = SVD::try_new(a.as_matrix().clone(), true, true, f64::EPSILON, MAX_SWEEPS)?;
    let (u, v_t) = (dec.u?, dec.v_t?);
    let values: Vec<f64> = dec.singular_values.iter().copied().collect();
    Some(sorted_factors(&values, &u, &v_t.adjoint()))
}

/// Columns spanning the orthogonal complement of the orthonormal columns of
/// `basis`.
fn orthonormal_complement(basis: &DMatrix<C64>) -> DMatrix<C64> {
    let (n, k) = basis.shape();
    let mut m = DMatrix::<C64>::zeros(n, n + k);
    m.view_mut((0, 0), (n, k)).copy_from(basis);
    m.view_mut((0, k), (n, n)).fill_with_identity();
    m.qr().q().columns(k, n - k).into_owned()
}

fn svd_by_dilation(a: &ComplexMatrix) -> Result<SingularValues> {
    let n = a.dim();
    let mut h = DMatrix::<C64>::zeros(2 * n, 2 * n);
    h.view_mut((0, n), (n, n)).copy_from(a.as_matrix());
    h.view_mut((n, 0), (n, n)).copy_from(&a.as_matrix().adjoint());
    let eig = SymmetricEigen::try_new(h, f64::EPSILON, MAX_SWEEPS).ok_or(Error::NotConverged {
        routine: "svd",
        residual: f64::NAN,
    })?;
    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let top = eig.eigenvalues[order[0]].max(0.0);
    if top == 0.0 {
        let id = DMatrix::<C64>::identity(n, n);
        return Ok(sorted_factors(&vec![0.0; n], &id, &id));
    }
    // Below this the ±σ eigenvectors may mix and the halves lose balance.
    let cut = 1e-8 * top;
    let kept: Vec<usize> = order[..n].iter().copied().filter(|&i| eig.eigenvalues[i] > cut).collect();
    let k = kept.len();
    let mut values: Vec<f64> = kept.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut u = DMatrix::<C64>::zeros(n, n);
    let mut v = DMatrix::<C64>::zeros(n, n);
    for (j, &i) in kept.iter().enumerate() {
        let w = eig.eigenvectors.column(i);
        u.set_column(j, &w.rows(0, n).normalize());
        v.set_column(j, &w.rows(n, n).normalize());
    }
    if k < n {
        let uc = orthonormal_complement(&u.columns(0, k).into_owned());
        let vc = orthonormal_complement(&v.columns(0, k).into_owned());
        let inner = svd(&ComplexMatrix::from_inner(uc.adjoint() * a.as_matrix() * &vc))?;
        u.columns_mut(k, n - k).copy_from(&(&uc * inner.left.as_matrix()));
        v.columns_mut(k, n - k).copy_from(&(&vc * inner.right.as_matrix()));
        values.extend_from_slice(&inner.values);
    }
    Ok(sorted_factors(&values, &u, &v))
}

/// `|A| = (A*A)^{1/2}`, computed as `V Σ V*`.
pub fn abs_mat(a: &ComplexMatrix) -> Result<HermitianMatrix> {
    let s = svd(a)?;
    Ok(abs_from_svd(&s))
}

pub(crate) fn abs_from_svd(s: &SingularValues) -> HermitianMatrix {
    HermitianMatrix::hermitize(s.outer_sum(s.right(), s.right(), |x| x))
}

/// `A = U|A|` with `U` a partial isometry supported on `range(|A|)`.
#[derive(Debug, Clone)]
pub struct PolarFactors {
    pub isometry: ComplexMatrix,
    pub modulus: HermitianMatrix,
}

impl PolarFactors {
    pub fn reconstruct(&self) -> ComplexMatrix {
        &self.isometry * self.modulus.as_complex()
    }
}

pub fn polar(a: &ComplexMatrix) -> Result<PolarFactors> {
    let s = svd(a)?;
    Ok(PolarFactors {
        isometry: s.outer_sum(s.left(), s.right(), |_| 1.0),
        modulus: abs_from_svd(&s),
    })
}

/// How negative exponents treat the kernel of `H`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerMode {
    /// Pseudo-power restricted to the support; `0^s := 0`.
    Support,
    /// Genuine inverse powers on the full space. Not supported for `s < 0`.
    FullSpace,
}

/// `H^s` for PSD `H` under the support convention.
pub fn mat_power(h: &HermitianMatrix, s: f64) -> Result<HermitianMatrix> {
    mat_power_with(h, s, PowerMode::Support)
}

pub fn mat_power_with(h: &HermitianMatrix, s: f64, mode: PowerMode) -> Result<HermitianMatrix> {
    if !s.is_finite() {
        return Err(Error::Domain {
            name: "s",
            value: s,
            domain: "finite reals",
        });
    }
    if s < 0.0 && mode == PowerMode::FullSpace {
        return Err(Error::Unsupported(format!(
            "full-space power with negative exponent {s}"
        )));
    }
    eig_hermitian(h)?.power(s)
}

/// `Tr[AB]`.
pub fn trace_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<C64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    let (am, bm) = (a.as_matrix(), b.as_matrix());
    let n = a.dim();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += am[(i, k)] * bm[(k, i)];
        }
    }
    Ok(acc)
}
