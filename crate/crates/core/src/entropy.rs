//! Rényi and von Neumann relative entropies and the Pinsker-type lower bounds
//! on them.
//!
//! All powers use the support convention `0^s = 0`, so `σ^{1-α}` is defined
//! for singular `σ`. Every bound is returned as an [`InequalityCertificate`]
//! oriented as `bound ≤ divergence` (gap = divergence − bound).

use serde::Serialize;

use crate::certificate::{default_tolerance, InequalityCertificate};
use crate::convexity::{conjugate_remainder_constant, quadratic_remainder_constant};
use crate::error::{check_domain, Error, Result};
use crate::matcore::{
    eig_hermitian, trace_inner, ComplexMatrix, DensityMatrix, HermitianMatrix, SpectralDecomposition,
};
use crate::schatten::{conjugate_exponent, norm_of_values};

/// Traces at or below this are treated as zero (divergence `+∞`).
pub const UNDERFLOW_FLOOR: f64 = 1e-300;
/// Mass of `ρ` outside `supp σ` above which `D(ρ‖σ) = +∞`.
pub const SUPPORT_LEAK_TOL: f64 = 1e-10;
/// Eigenvalues of `ρ - σ` above this span the pinching projector.
pub const PINCH_CUT: f64 = 1e-12;

/// `‖H‖_p` for Hermitian `H`, from `|eigenvalues|`.
pub fn hermitian_norm(h: &HermitianMatrix, p: f64) -> Result<f64> {
    let e = eig_hermitian(h)?;
    Ok(norm_of_values(e.eigenvalues(), p))
}

/// `‖ρ - σ‖_1`.
pub fn trace_norm_distance(rho: &HermitianMatrix, sigma: &HermitianMatrix) -> Result<f64> {
    hermitian_norm(&difference(rho, sigma), 1.0)
}

fn difference(a: &HermitianMatrix, b: &HermitianMatrix) -> HermitianMatrix {
    HermitianMatrix::new(a.as_complex() - b.as_complex())
        .expect("difference of Hermitian matrices is Hermitian")
}

struct Spectra {
    rho: SpectralDecomposition,
    sigma: SpectralDecomposition,
}

impl Spectra {
    fn of(rho: &HermitianMatrix, sigma: &HermitianMatrix) -> Result<Self> {
        if rho.dim() != sigma.dim() {
            return Err(Error::DimensionMismatch(rho.dim(), sigma.dim()));
        }
        Ok(Self {
            rho: eig_hermitian(rho)?,
            sigma: eig_hermitian(sigma)?,
        })
    }

    /// `Re Tr[ρ^a σ^b]`.
    fn power_trace(&self, a: f64, b: f64) -> Result<f64> {
        let ra = self.rho.power(a)?;
        let sb = self.sigma.power(b)?;
        Ok(trace_inner(&ra, &sb)?.re)
    }

    /// `D_α(ρ‖σ)`. The excess `Tr[ρ^α σ^{1-α}] - Tr ρ` is formed as
    /// `Tr[ρ^α (σ^{1-α} - ρ^{1-α})]` so nearby states keep their digits as
    /// `α → 1`.
    fn renyi(&self, alpha: f64) -> Result<f64> {
        let ra = self.rho.power(alpha)?;
        let delta = self.sigma.power(1.0 - alpha)?.as_complex() - self.rho.power(1.0 - alpha)?.as_complex();
        let excess = trace_inner(&ra, &delta)?.re;
        let thr = self.rho.rank_threshold();
        let mass: f64 = self.rho.eigenvalues().iter().filter(|&&x| x > thr).sum();
        if mass + excess <= UNDERFLOW_FLOOR {
            return Ok(f64::INFINITY);
        }
        Ok((excess / mass).ln_1p() / (alpha - 1.0))
    }

    /// `‖ρ^s - σ^s‖_p`.
    fn power_distance(&self, s: f64, p: f64) -> Result<f64> {
        let d = difference(&self.rho.power(s)?, &self.sigma.power(s)?);
        hermitian_norm(&d, p)
    }
}

fn check_open_alpha(alpha: f64) -> Result<()> {
    check_domain("alpha", alpha, "(0, 1)", alpha > 0.0 && alpha < 1.0)
}

fn check_upper_alpha(alpha: f64) -> Result<()> {
    check_domain("alpha", alpha, "[1/2, 1)", (0.5..1.0).contains(&alpha))
}

fn check_overlap_exponent(p: f64) -> Result<()> {
    check_domain("p", p, "(1, 2]", p > 1.0 && p <= 2.0)
}

/// `D_α(ρ‖σ) = log(Tr[ρ^α σ^{1-α}]) / (α - 1)` for `α ∈ (0, 1)`.
pub fn renyi_relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix, alpha: f64) -> Result<f64> {
    check_open_alpha(alpha)?;
    Spectra::of(rho, sigma)?.renyi(alpha)
}

/// `D(ρ‖σ) = Tr[ρ(log ρ - log σ)]`, `+∞` when `supp ρ ⊄ supp σ`.
pub fn von_neumann_relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    let sp = Spectra::of(rho, sigma)?;
    von_neumann_from(&sp, rho)
}

fn von_neumann_from(sp: &Spectra, rho: &DensityMatrix) -> Result<f64> {
    let support = sp.sigma.support_projector();
    let inside = trace_inner(rho, &support)?.re;
    if 1.0 - inside > SUPPORT_LEAK_TOL {
        return Ok(f64::INFINITY);
    }
    let neg_entropy: f64 = sp
        .rho
        .eigenvalues()
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| x * x.ln())
        .sum();
    let thr = sp.sigma.rank_threshold();
    let log_sigma = sp.sigma.map(|x| if x > thr { x.ln() } else { 0.0 });
    let cross = trace_inner(rho, &log_sigma)?.re;
    Ok(neg_entropy - cross)
}

/// `Tr[σ^{1-1/p} ρ^{1/p}]` for `p ∈ (1, 2]`.
pub fn trace_overlap(rho: &DensityMatrix, sigma: &DensityMatrix, p: f64) -> Result<f64> {
    check_overlap_exponent(p)?;
    let alpha = 1.0 / p;
    Spectra::of(rho, sigma)?.power_trace(alpha, 1.0 - alpha)
}

/// The two overlap bounds
/// `Tr[σ^{1-1/p} ρ^{1/p}] ≤ 1 - (p-1)/4 ‖ρ^{1/p} - σ^{1/p}‖_p²` and
/// `Tr[σ^{1-1/p} ρ^{1/p}] ≤ 1 - 1/(p'2^{p'-1}) ‖ρ^{1/p'} - σ^{1/p'}‖_{p'}^{p'}`.
pub fn overlap_certificates(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    p: f64,
) -> Result<(InequalityCertificate, InequalityCertificate)> {
    check_overlap_exponent(p)?;
    let q = conjugate_exponent(p);
    let alpha = 1.0 / p;
    let sp = Spectra::of(rho, sigma)?;
    let overlap = sp.power_trace(alpha, 1.0 - alpha)?;
    let d_p = sp.power_distance(1.0 / p, p)?;
    let d_q = sp.power_distance(1.0 / q, q)?;
    let tol = default_tolerance(rho.dim());
    let first = InequalityCertificate::new(
        "overlap_quadratic",
        overlap,
        1.0 - quadratic_remainder_constant(p) * d_p * d_p,
        tol,
    )
    .with("p", p)
    .with("diff_norm_p", d_p)
    .with("diff_norm_conjugate", d_q);
    let second = InequalityCertificate::new(
        "overlap_conjugate",
        overlap,
        1.0 - conjugate_remainder_constant(p) * d_q.powf(q),
        tol,
    )
    .with("p", p)
    .with("diff_norm_p", d_p)
    .with("diff_norm_conjugate", d_q);
    Ok((first, second))
}

/// `D_α(ρ‖σ) ≥ ‖ρ^α - σ^α‖_{1/α}² / (4α)` for `α ∈ [1/2, 1)`.
pub fn renyi_pinsker_certificate(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    alpha: f64,
) -> Result<InequalityCertificate> {
    check_upper_alpha(alpha)?;
    let sp = Spectra::of(rho, sigma)?;
    let d = sp.renyi(alpha)?;
    let x = sp.power_distance(alpha, 1.0 / alpha)?;
    Ok(InequalityCertificate::new(
        "renyi_pinsker",
        x * x / (4.0 * alpha),
        d,
        default_tolerance(rho.dim()),
    )
    .with("alpha", alpha)
    .with("power_distance", x))
}

/// `D_α(ρ‖σ) ≥ (α/2) ‖ρ - σ‖_1²`, on arbitrary (non-commuting) pairs.
pub fn classical_renyi_bound_certificate(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    alpha: f64,
) -> Result<InequalityCertificate> {
    check_open_alpha(alpha)?;
    let sp = Spectra::of(rho, sigma)?;
    let d = sp.renyi(alpha)?;
    let t = trace_norm_distance(rho, sigma)?;
    Ok(InequalityCertificate::new(
        "classical_renyi",
        0.5 * alpha * t * t,
        d,
        default_tolerance(rho.dim()),
    )
    .with("alpha", alpha)
    .with("trace_distance", t))
}

/// `(α/3)‖A - B‖_1 ≤ ‖A^α - B^α‖_{1/α} · M^{(1-α)/α}` with
/// `M = max{‖A^α‖_{1/α}, ‖B^α‖_{1/α}}`, for PSD `A, B`.
///
/// When `A` and `B` have unit trace `M = 1`, and the bound reads
/// `(α/3)‖A - B‖_1 ≤ ‖A^α - B^α‖_{1/α}`. The exponent on `M` makes both
/// sides homogeneous of degree one; without it the inequality fails under
/// rescaling of `A` and `B`. The unexponentiated product is kept in the
/// metadata as `unscaled_rhs`.
pub fn ricard_bound_certificate(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    alpha: f64,
) -> Result<InequalityCertificate> {
    check_open_alpha(alpha)?;
    let sp = Spectra::of(a, b)?;
    let r = 1.0 / alpha;
    let x = sp.power_distance(alpha, r)?;
    let na = hermitian_norm(&sp.rho.power(alpha)?, r)?;
    let nb = hermitian_norm(&sp.sigma.power(alpha)?, r)?;
    let m = na.max(nb);
    let t = hermitian_norm(&difference(a, b), 1.0)?;
    let rhs = if m > 0.0 { x * m.powf((1.0 - alpha) / alpha) } else { 0.0 };
    Ok(
        InequalityCertificate::new("ricard", alpha / 3.0 * t, rhs, default_tolerance(a.dim()))
            .with("alpha", alpha)
            .with("power_distance", x)
            .with("max_factor", m)
            .with("unscaled_rhs", x * m),
    )
}

/// `D_α(ρ‖σ) ≥ (α/36)‖ρ - σ‖_1²` for `α ∈ [1/2, 1)`.
///
/// Metadata `chain_margin` is `‖ρ^α - σ^α‖_{1/α}²/(4α) − (α/36)‖ρ - σ‖_1²`,
/// nonnegative whenever the trace-norm comparison behind this bound holds.
pub fn weakened_pinsker_certificate(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    alpha: f64,
) -> Result<InequalityCertificate> {
    check_upper_alpha(alpha)?;
    let sp = Spectra::of(rho, sigma)?;
    let d = sp.renyi(alpha)?;
    let x = sp.power_distance(alpha, 1.0 / alpha)?;
    let t = trace_norm_distance(rho, sigma)?;
    let bound = alpha / 36.0 * t * t;
    let stronger = x * x / (4.0 * alpha);
    Ok(
        InequalityCertificate::new("weakened_pinsker", bound, d, default_tolerance(rho.dim()))
            .with("alpha", alpha)
            .with("trace_distance", t)
            .with("renyi_pinsker_bound", stronger)
            .with("chain_margin", stronger - bound),
    )
}

/// `D(ρ‖σ) ≥ ½‖ρ - σ‖_1²`; an infinite divergence holds automatically.
pub fn pinsker_certificate(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<InequalityCertificate> {
    let sp = Spectra::of(rho, sigma)?;
    let d = von_neumann_from(&sp, rho)?;
    let t = trace_norm_distance(rho, sigma)?;
    Ok(
        InequalityCertificate::new("pinsker", 0.5 * t * t, d, default_tolerance(rho.dim()))
            .with("trace_distance", t),
    )
}

/// Two-block averages of a pair of states with respect to the positive
/// spectral projector `P` of `ρ - σ`.
#[derive(Debug, Clone)]
pub struct PinchingResult {
    pub projector: HermitianMatrix,
    pub rho_hat: DensityMatrix,
    pub sigma_hat: DensityMatrix,
    /// `Tr[Pρ]`.
    pub p_weight: f64,
    /// `Tr[Pσ]`.
    pub q_weight: f64,
}

/// `ρ̂ = (Tr[Pρ]/Tr P) P + (Tr[(I-P)ρ]/Tr(I-P)) (I-P)`, `σ̂` likewise, with
/// an empty block dropped when `P ∈ {0, I}`.
///
/// `ρ̂` and `σ̂` commute, `‖ρ̂ - σ̂‖_1 = ‖ρ - σ‖_1`, and `D_α` does not increase.
pub fn pinch_to_commuting(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<PinchingResult> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), sigma.dim()));
    }
    let n = rho.dim();
    let spec = eig_hermitian(&difference(rho, sigma))?;
    let projector = spec.projector_above(PINCH_CUT);
    let rank_p = spec.eigenvalues().iter().filter(|&&x| x > PINCH_CUT).count();
    let p_weight = trace_inner(rho, &projector)?.re;
    let q_weight = trace_inner(sigma, &projector)?.re;
    let complement = HermitianMatrix::new(
        ComplexMatrix::identity(n) - projector.as_complex().clone(),
    )?;

    let block = |w_in: f64| -> Result<DensityMatrix> {
        let mut m = ComplexMatrix::zeros(n);
        if rank_p > 0 {
            m = &m + &projector.scale_real(w_in / rank_p as f64);
        }
        if rank_p < n {
            m = &m + &complement.scale_real((1.0 - w_in) / (n - rank_p) as f64);
        }
        DensityMatrix::from_psd(&HermitianMatrix::new(m)?)
    };
    Ok(PinchingResult {
        rho_hat: block(p_weight)?,
        sigma_hat: block(q_weight)?,
        projector,
        p_weight,
        q_weight,
    })
}

/// Summary statistics of one pinching, for reports and tests.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PinchingCheck {
    pub trace_distance: f64,
    pub pinched_trace_distance: f64,
    pub renyi: f64,
    pub pinched_renyi: f64,
}

pub fn pinching_check(rho: &DensityMatrix, sigma: &DensityMatrix, alpha: f64) -> Result<PinchingCheck> {
    let pinched = pinch_to_commuting(rho, sigma)?;
    Ok(PinchingCheck {
        trace_distance: trace_norm_distance(rho, sigma)?,
        pinched_trace_distance: trace_norm_distance(&pinched.rho_hat, &pinched.sigma_hat)?,
        renyi: renyi_relative_entropy(rho, sigma, alpha)?,
        pinched_renyi: renyi_relative_entropy(&pinched.rho_hat, &pinched.sigma_hat, alpha)?,
    })
}
