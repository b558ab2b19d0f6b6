//! Schatten norms, the norm-gradient (duality) map and the Mazur map.
//!
//! For `1 < p < ∞` and `A = U|A|`, the duality map
//! `D_p(A) = ‖A‖_p^{1-p} |A|^{p-1} U*` is the unique element of the unit
//! sphere of `C_{p'}` with `Tr[D_p(A) A] = ‖A‖_p`; it is the gradient of
//! `A ↦ ‖A‖_p`. In terms of the SVD `A = Σ σ_i u_i v_i*` it is
//! `Σ (σ_i/‖A‖_p)^{p-1} v_i u_i*`, which is how it is evaluated here.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matcore::{
    abs_mat, mat_power, svd, trace_inner, ComplexMatrix, SingularValues, C64,
};

/// An exponent `p ∈ [1, ∞]` together with its conjugate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SchattenExponent {
    p: f64,
}

impl SchattenExponent {
    pub const ONE: Self = Self { p: 1.0 };
    pub const TWO: Self = Self { p: 2.0 };
    pub const INFINITY: Self = Self { p: f64::INFINITY };

    pub fn new(p: f64) -> Result<Self> {
        if p >= 1.0 {
            Ok(Self { p })
        } else {
            Err(Error::Domain {
                name: "p",
                value: p,
                domain: "[1, ∞]",
            })
        }
    }

    pub fn value(self) -> f64 {
        self.p
    }

    pub fn is_infinite(self) -> bool {
        self.p.is_infinite()
    }

    /// `p'` with `1/p + 1/p' = 1`.
    pub fn conjugate(self) -> Self {
        Self {
            p: conjugate_exponent(self.p),
        }
    }
}

/// `p/(p-1)`, with `1 ↔ ∞`.
pub fn conjugate_exponent(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

/// `(Σ σ_j^p)^{1/p}` (max for `p = ∞`), scaled by the largest value to
/// avoid overflow.
pub fn norm_of_values(values: &[f64], p: f64) -> f64 {
    let top = values.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if top == 0.0 {
        return 0.0;
    }
    if p.is_infinite() {
        return top;
    }
    let s: f64 = values.iter().map(|x| (x.abs() / top).powf(p)).sum();
    top * s.powf(1.0 / p)
}

pub fn schatten_norm(a: &ComplexMatrix, p: f64) -> Result<f64> {
    let p = SchattenExponent::new(p)?;
    Ok(norm_of_values(svd(a)?.values(), p.value()))
}

/// `‖A‖_p^p` without the final root.
pub fn schatten_norm_pow(a: &ComplexMatrix, p: f64) -> Result<f64> {
    check_finite_exponent(p)?;
    Ok(schatten_norm(a, p)?.powf(p))
}

fn check_finite_exponent(p: f64) -> Result<()> {
    if p > 1.0 && p.is_finite() {
        Ok(())
    } else if p == 1.0 || p.is_infinite() {
        Err(Error::Unsupported(format!(
            "duality map needs 1 < p < ∞, got p = {p}"
        )))
    } else {
        Err(Error::Domain {
            name: "p",
            value: p,
            domain: "(1, ∞)",
        })
    }
}

/// Value of `D_p(A)` with the data needed to check its two defining
/// properties.
#[derive(Debug, Clone)]
pub struct NormGradient {
    pub matrix: ComplexMatrix,
    pub exponent: SchattenExponent,
    /// `‖A‖_p`.
    pub source_norm: f64,
}

impl NormGradient {
    /// `(‖D_p(A)‖_{p'}, Tr[D_p(A) A])`; ideally `(1, ‖A‖_p)`.
    pub fn pairing(&self, a: &ComplexMatrix) -> Result<(f64, C64)> {
        let dual = schatten_norm(&self.matrix, self.exponent.conjugate().value())?;
        Ok((dual, trace_inner(&self.matrix, a)?))
    }
}

pub fn duality_map(a: &ComplexMatrix, p: f64) -> Result<NormGradient> {
    check_finite_exponent(p)?;
    let s = svd(a)?;
    duality_from_svd(&s, p)
}

pub(crate) fn duality_from_svd(s: &SingularValues, p: f64) -> Result<NormGradient> {
    let norm = norm_of_values(s.values(), p);
    if !(norm > 0.0) {
        return Err(Error::ZeroMatrix);
    }
    let matrix = s.outer_sum(s.right(), s.left(), |x| (x / norm).powf(p - 1.0));
    Ok(NormGradient {
        matrix,
        exponent: SchattenExponent::new(p)?,
        source_norm: norm,
    })
}

/// `M_{p,q}(A) = A |A|^{(p-q)/q}` with support-convention powers.
pub fn mazur_map(a: &ComplexMatrix, p: f64, q: f64) -> Result<ComplexMatrix> {
    if !(q > 0.0 && q.is_finite()) {
        return Err(Error::Domain {
            name: "q",
            value: q,
            domain: "(0, ∞)",
        });
    }
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::Domain {
            name: "p",
            value: p,
            domain: "(0, ∞)",
        });
    }
    let modulus = abs_mat(a)?;
    let r = mat_power(&modulus, (p - q) / q)?;
    Ok(a * r.as_complex())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GradientCheck {
    pub fd_slope: f64,
    pub analytic_slope: f64,
    pub deviation: f64,
    /// Whether the Richardson-combined estimate replaced the plain central
    /// difference.
    pub richardson: bool,
}

/// Compare the central difference of `t ↦ ‖A + tB‖_p` at 0 with
/// `Re Tr[D_p(A) B]`.
///
/// If the plain central difference misses by more than
/// `1e-8 · n · (1 + |analytic|)`, the step is halved and the two estimates
/// are Richardson-combined.
pub fn gradient_fd_check(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    p: f64,
    t: f64,
) -> Result<GradientCheck> {
    if !(t != 0.0 && t.is_finite()) {
        return Err(Error::Domain {
            name: "t",
            value: t,
            domain: "finite nonzero reals",
        });
    }
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    let grad = duality_map(a, p)?;
    let analytic_slope = trace_inner(&grad.matrix, b)?.re;
    let central = |h: f64| -> Result<f64> {
        let plus = schatten_norm(&(a + &b.scale_real(h)), p)?;
        let minus = schatten_norm(&(a - &b.scale_real(h)), p)?;
        Ok((plus - minus) / (2.0 * h))
    };
    let coarse = central(t)?;
    let fallback_tol = 1e-8 * a.dim() as f64 * (1.0 + analytic_slope.abs());
    let (fd_slope, richardson) = if (coarse - analytic_slope).abs() <= fallback_tol {
        (coarse, false)
    } else {
        let fine = central(t / 2.0)?;
        ((4.0 * fine - coarse) / 3.0, true)
    };
    Ok(GradientCheck {
        fd_slope,
        analytic_slope,
        deviation: fd_slope - analytic_slope,
        richardson,
    })
}
