use std::collections::BTreeMap;

use serde::Serialize;

/// Default absolute tolerance for certificates on matrices of dimension `dim`.
pub fn default_tolerance(dim: usize) -> f64 {
    if dim > 10 {
        dim as f64 * 1e-10
    } else {
        1e-9
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateStatus {
    Holds,
    ViolatedWithinTolerance,
    Violated,
}

impl CertificateStatus {
    /// `Holds` iff `gap ≥ -tol`, `Violated` iff `gap < -10 tol`. NaN gaps are
    /// `Violated`.
    pub fn classify(gap: f64, tolerance: f64) -> Self {
        if gap >= -tolerance {
            Self::Holds
        } else if gap >= -10.0 * tolerance {
            Self::ViolatedWithinTolerance
        } else {
            Self::Violated
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Holds => "holds",
            Self::ViolatedWithinTolerance => "violated_within_tolerance",
            Self::Violated => "violated",
        }
    }
}

/// One evaluated instance of an inequality `lhs ≤ rhs`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityCertificate {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`.
    pub gap: f64,
    pub tolerance: f64,
    pub status: CertificateStatus,
    pub metadata: BTreeMap<String, f64>,
}

impl InequalityCertificate {
    pub fn new(name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let gap = rhs - lhs;
        Self {
            name: name.into(),
            lhs,
            rhs,
            gap,
            tolerance,
            status: CertificateStatus::classify(gap, tolerance),
            metadata: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.metadata.insert(key.to_owned(), value);
        self
    }

    pub fn holds(&self) -> bool {
        self.status == CertificateStatus::Holds
    }

    pub fn meta(&self, key: &str) -> Option<f64> {
        self.metadata.get(key).copied()
    }
}
