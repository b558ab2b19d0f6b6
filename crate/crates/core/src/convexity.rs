//! Uniform convexity of the Schatten classes and the two Hölder-with-remainder
//! bounds that follow from it.
//!
//! For `1 < p ≤ 2`, unit `A ∈ C_p`, unit `B ∈ C_{p'}` and `θ` rotating
//! `Tr[AB]` onto the nonnegative axis:
//!
//! ```text
//! |Tr[AB]| ≤ 1 - (p-1)/4 · ‖D_{p'}(B) - e^{iθ}A‖_p²
//! |Tr[AB]| ≤ 1 - 1/(p' 2^{p'-1}) · ‖e^{iθ}B - D_p(A)‖_{p'}^{p'}
//! ```
//!
//! Both come from `1 + |Tr[AB]| ≤ ‖D_{p'}(B) + e^{iθ}A‖_p` combined with the
//! midpoint bounds checked by [`uniform_convexity_gap`].

use std::f64::consts::TAU;

use serde::Serialize;

use crate::certificate::{default_tolerance, InequalityCertificate};
use crate::error::{Error, Result};
use crate::fit::SlopeFit;
use crate::matcore::{svd, trace_inner, ComplexMatrix, C64};
use crate::schatten::{conjugate_exponent, duality_map, norm_of_values, schatten_norm};

const UNIT_TOL: f64 = 1e-9;

/// `θ ∈ [0, 2π)` with `e^{iθ} Tr[AB] ≥ 0`; `θ = 0` when the trace vanishes.
pub fn phase_align(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    let tr = trace_inner(a, b)?;
    Ok(phase_of(tr))
}

fn phase_of(tr: C64) -> f64 {
    if tr.norm() == 0.0 {
        return 0.0;
    }
    let theta = (-tr.arg()).rem_euclid(TAU);
    if theta >= TAU {
        0.0
    } else {
        theta
    }
}

fn require_unit(m: &ComplexMatrix, p: f64, which: &'static str) -> Result<()> {
    let norm = schatten_norm(m, p)?;
    if (norm - 1.0).abs() > UNIT_TOL {
        return Err(Error::NotUnit { which, norm });
    }
    Ok(())
}

fn check_holder_exponent(p: f64) -> Result<()> {
    if p > 1.0 && p <= 2.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            name: "p",
            value: p,
            domain: "(1, 2]",
        })
    }
}

/// Midpoint bound for unit `X, Y ∈ C_p`:
/// `‖(X+Y)/2‖_p ≤ 1 - (p-1)/2 ‖(X-Y)/2‖_p²` for `1 < p ≤ 2`, and
/// `‖(X+Y)/2‖_p ≤ 1 - (1/p) ‖(X-Y)/2‖_p^p` for `p ≥ 2`.
pub fn uniform_convexity_gap(
    x: &ComplexMatrix,
    y: &ComplexMatrix,
    p: f64,
) -> Result<InequalityCertificate> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::Domain {
            name: "p",
            value: p,
            domain: "(1, ∞)",
        });
    }
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch(x.dim(), y.dim()));
    }
    require_unit(x, p, "C_p (X)")?;
    require_unit(y, p, "C_p (Y)")?;
    let mid = schatten_norm(&(x + y).scale_real(0.5), p)?;
    let half_diff = schatten_norm(&(x - y).scale_real(0.5), p)?;
    let rhs = if p <= 2.0 {
        1.0 - 0.5 * (p - 1.0) * half_diff * half_diff
    } else {
        1.0 - half_diff.powf(p) / p
    };
    Ok(
        InequalityCertificate::new("uniform_convexity", mid, rhs, default_tolerance(x.dim()))
            .with("p", p)
            .with("half_diff_norm", half_diff),
    )
}

/// `(p-1)/4`.
pub fn quadratic_remainder_constant(p: f64) -> f64 {
    (p - 1.0) / 4.0
}

/// `1/(p' 2^{p'-1})`.
pub fn conjugate_remainder_constant(p: f64) -> f64 {
    let q = conjugate_exponent(p);
    1.0 / (q * 2.0_f64.powf(q - 1.0))
}

fn holder_setup(a: &ComplexMatrix, b: &ComplexMatrix, p: f64) -> Result<(f64, C64, f64)> {
    check_holder_exponent(p)?;
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    let q = conjugate_exponent(p);
    require_unit(a, p, "C_p (A)")?;
    require_unit(b, q, "C_p' (B)")?;
    let tr = trace_inner(a, b)?;
    Ok((q, tr, phase_of(tr)))
}

fn rotation(theta: f64) -> C64 {
    C64::from_polar(1.0, theta)
}

/// `|Tr[AB]| ≤ 1 - (p-1)/4 ‖D_{p'}(B) - e^{iθ}A‖_p²`.
pub fn holder_remainder_1(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    p: f64,
) -> Result<InequalityCertificate> {
    let (q, tr, theta) = holder_setup(a, b, p)?;
    let grad_b = duality_map(b, q)?;
    let diff = schatten_norm(&(&grad_b.matrix - &a.scale(rotation(theta))), p)?;
    let rhs = 1.0 - quadratic_remainder_constant(p) * diff * diff;
    Ok(
        InequalityCertificate::new("holder_remainder_1", tr.norm(), rhs, default_tolerance(a.dim()))
            .with("p", p)
            .with("theta", theta)
            .with("diff_norm", diff),
    )
}

/// `|Tr[AB]| ≤ 1 - 1/(p' 2^{p'-1}) ‖e^{iθ}B - D_p(A)‖_{p'}^{p'}`.
pub fn holder_remainder_2(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    p: f64,
) -> Result<InequalityCertificate> {
    let (q, tr, theta) = holder_setup(a, b, p)?;
    let grad_a = duality_map(a, p)?;
    let diff = schatten_norm(&(&b.scale(rotation(theta)) - &grad_a.matrix), q)?;
    let rhs = 1.0 - conjugate_remainder_constant(p) * diff.powf(q);
    Ok(
        InequalityCertificate::new("holder_remainder_2", tr.norm(), rhs, default_tolerance(a.dim()))
            .with("p", p)
            .with("theta", theta)
            .with("diff_norm", diff),
    )
}

/// The first step of both bounds: `1 + |Tr[AB]| ≤ ‖D_{p'}(B) + e^{iθ}A‖_p`.
pub fn holder_chain_certificate(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    p: f64,
) -> Result<InequalityCertificate> {
    let (q, tr, theta) = holder_setup(a, b, p)?;
    let grad_b = duality_map(b, q)?;
    let sum = schatten_norm(&(&grad_b.matrix + &a.scale(rotation(theta))), p)?;
    Ok(
        InequalityCertificate::new("holder_chain", 1.0 + tr.norm(), sum, default_tolerance(a.dim()))
            .with("p", p)
            .with("theta", theta),
    )
}

/// One-parameter commuting families that approach equality in the two
/// remainder bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SharpnessFamily {
    /// `B = I/‖I‖_{p'}`, `A(s) ∝ diag(1+s, 1-s)`; the first bound's gap
    /// scales like the square of the distance.
    QuadraticRemainder,
    /// `A = diag(1, 0)`, `B(s) ∝ diag(1, s)`; the second bound's gap scales
    /// like the `p'`-th power of the distance.
    ConjugateRemainder,
}

/// Fit `log(1 - |Tr[AB]|)` against the log of the distance that appears in
/// the corresponding remainder term, along the chosen family.
pub fn sharpness_scan(p: f64, family: SharpnessFamily, scales: &[f64]) -> Result<SlopeFit> {
    check_holder_exponent(p)?;
    let q = conjugate_exponent(p);
    let unit = |m: ComplexMatrix, r: f64| -> Result<ComplexMatrix> {
        let n = norm_of_values(svd(&m)?.values(), r);
        Ok(m.scale_real(1.0 / n))
    };
    let mut distances = Vec::with_capacity(scales.len());
    let mut gaps = Vec::with_capacity(scales.len());
    for &s in scales {
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::Domain {
                name: "scale",
                value: s,
                domain: "(0, 1)",
            });
        }
        let (dist, overlap) = match family {
            SharpnessFamily::QuadraticRemainder => {
                let b = unit(ComplexMatrix::identity(2), q)?;
                let a = unit(ComplexMatrix::from_real_diagonal(&[1.0 + s, 1.0 - s])?, p)?;
                let tr = trace_inner(&a, &b)?;
                let target = duality_map(&b, q)?.matrix;
                let d = schatten_norm(&(&target - &a.scale(rotation(phase_of(tr)))), p)?;
                (d, tr.norm())
            }
            SharpnessFamily::ConjugateRemainder => {
                let a = ComplexMatrix::from_real_diagonal(&[1.0, 0.0])?;
                let b = unit(ComplexMatrix::from_real_diagonal(&[1.0, s])?, q)?;
                let tr = trace_inner(&a, &b)?;
                let target = duality_map(&a, p)?.matrix;
                let d = schatten_norm(&(&b.scale(rotation(phase_of(tr))) - &target), q)?;
                (d, tr.norm())
            }
        };
        distances.push(dist);
        gaps.push(1.0 - overlap);
    }
    SlopeFit::log_log(&distances, &gaps)
}
