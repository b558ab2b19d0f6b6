//! Ordinary least squares on log–log data, for scaling-exponent checks.

use serde::Serialize;

use crate::error::{Error, Result};

/// Least-squares line `y = exponent · x + intercept` through log-transformed
/// data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeFit {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub exponent: f64,
    pub intercept: f64,
    pub max_residual: f64,
}

impl SlopeFit {
    /// Fit a line to already-transformed data.
    pub fn fit(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::DimensionMismatch(xs.len(), ys.len()));
        }
        if xs.len() < 2 {
            return Err(Error::DegenerateFit("need at least two points"));
        }
        if xs.iter().chain(&ys).any(|v| !v.is_finite()) {
            return Err(Error::DegenerateFit("non-finite data"));
        }
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        if !(sxx > f64::EPSILON * (1.0 + mx * mx) * n) {
            return Err(Error::DegenerateFit("zero variance in regressor"));
        }
        let exponent = sxy / sxx;
        let intercept = my - exponent * mx;
        let max_residual = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| (y - exponent * x - intercept).abs())
            .fold(0.0, f64::max);
        Ok(Self {
            xs,
            ys,
            exponent,
            intercept,
            max_residual,
        })
    }

    /// Fit `log y` against `log x`; all inputs must be positive.
    pub fn log_log(x: &[f64], y: &[f64]) -> Result<Self> {
        if x.iter().chain(y).any(|&v| !(v > 0.0)) {
            return Err(Error::DegenerateFit("log-log data must be positive"));
        }
        Self::fit(x.iter().map(|v| v.ln()).collect(), y.iter().map(|v| v.ln()).collect())
    }

    /// Recompute residuals and compare with the stored maximum.
    pub fn residuals_consistent(&self) -> bool {
        let m = self
            .xs
            .iter()
            .zip(&self.ys)
            .map(|(x, y)| (y - self.exponent * x - self.intercept).abs())
            .fold(0.0, f64::max);
        (m - self.max_residual).abs() <= 1e-12
    }
}

/// `count` points log-spaced between `lo` and `hi` inclusive.
pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exact_power_law() {
        let x = log_spaced(1e-4, 1e-1, 7);
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v.powf(2.5)).collect();
        let f = SlopeFit::log_log(&x, &y).unwrap();
        assert_relative_eq!(f.exponent, 2.5, epsilon = 1e-12);
        assert_relative_eq!(f.intercept, 3.0_f64.ln(), epsilon = 1e-10);
        assert!(f.max_residual < 1e-12);
        assert!(f.residuals_consistent());
    }

    #[test]
    fn constant_regressor_is_degenerate() {
        let x = vec![0.01; 5];
        let y = vec![1.0, 2.0, 3.0, 4.0, 5.0];
        assert!(matches!(SlopeFit::log_log(&x, &y), Err(Error::DegenerateFit(_))));
        assert!(SlopeFit::log_log(&[1.0, -1.0], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn grid_endpoints() {
        let g = log_spaced(1e-5, 1e-2, 6);
        assert_eq!(g.len(), 6);
        assert_relative_eq!(g[0], 1e-5, max_relative = 1e-12);
        assert_relative_eq!(g[5], 1e-2, max_relative = 1e-12);
    }
}
