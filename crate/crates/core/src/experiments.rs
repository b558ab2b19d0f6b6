//! Worked examples, limits and ensemble campaigns built on the certificate
//! functions.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::certificate::{default_tolerance, CertificateStatus, InequalityCertificate};
use crate::convexity::{holder_remainder_1, holder_remainder_2, uniform_convexity_gap};
use crate::entropy::{
    classical_renyi_bound_certificate, hermitian_norm, overlap_certificates, pinsker_certificate,
    renyi_pinsker_certificate, renyi_relative_entropy, ricard_bound_certificate,
    trace_norm_distance, von_neumann_relative_entropy, weakened_pinsker_certificate,
};
use crate::error::{check_domain, Error, Result};
use crate::fit::SlopeFit;
use crate::matcore::{
    eig_hermitian, random_sample, trace_inner, ComplexMatrix, DensityMatrix, EnsembleConfig,
    HermitianMatrix,
};
use crate::schatten::schatten_norm;

/// Two-state families indexed by a small parameter `ε ∈ (0, 1/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExampleFamily {
    /// `ρ = diag(1/2, 1/2)`, `σ = diag(1/2 + ε, 1/2 - ε)`.
    Midpoint,
    /// `ρ = diag(1, 0)`, `σ = diag(1 - ε, ε)`: `σ` has an eigenvalue of order
    /// `ε` where `ρ` vanishes.
    Boundary,
}

impl ExampleFamily {
    pub fn states(self, epsilon: f64) -> Result<(DensityMatrix, DensityMatrix)> {
        check_domain("epsilon", epsilon, "(0, 1/2)", epsilon > 0.0 && epsilon < 0.5)?;
        let (r, s) = match self {
            Self::Midpoint => ([0.5, 0.5], [0.5 + epsilon, 0.5 - epsilon]),
            Self::Boundary => ([1.0, 0.0], [1.0 - epsilon, epsilon]),
        };
        Ok((DensityMatrix::from_diagonal(&r)?, DensityMatrix::from_diagonal(&s)?))
    }
}

/// `ρ = diag(1/2, 1/2)` and `σ = diag(1/2 + ε, 1/2 - ε)`.
pub fn example_states(epsilon: f64) -> Result<(DensityMatrix, DensityMatrix)> {
    ExampleFamily::Midpoint.states(epsilon)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExampleRatio {
    pub epsilon: f64,
    pub alpha: f64,
    /// `‖ρ^α - σ^α‖_{1/α}`.
    pub numerator: f64,
    /// `‖ρ - σ‖_1`.
    pub trace_distance: f64,
    /// `numerator / trace_distance`.
    pub measured: f64,
    /// `α^α / (2 ε^{1-α})`.
    pub predicted_leading: f64,
}

pub fn predicted_leading_ratio(epsilon: f64, alpha: f64) -> f64 {
    alpha.powf(alpha) / (2.0 * epsilon.powf(1.0 - alpha))
}

/// Ratio `‖ρ^α - σ^α‖_{1/α} / ‖ρ - σ‖_1` on [`example_states`].
pub fn example_ratio(epsilon: f64, alpha: f64) -> Result<ExampleRatio> {
    example_ratio_in(ExampleFamily::Midpoint, epsilon, alpha)
}

pub fn example_ratio_in(family: ExampleFamily, epsilon: f64, alpha: f64) -> Result<ExampleRatio> {
    check_domain("alpha", alpha, "(0, 1)", alpha > 0.0 && alpha < 1.0)?;
    let (rho, sigma) = family.states(epsilon)?;
    let ra = eig_hermitian(&rho)?.power(alpha)?;
    let sa = eig_hermitian(&sigma)?.power(alpha)?;
    let numerator = schatten_norm(&(ra.as_complex() - sa.as_complex()), 1.0 / alpha)?;
    let trace_distance = trace_norm_distance(&rho, &sigma)?;
    Ok(ExampleRatio {
        epsilon,
        alpha,
        numerator,
        trace_distance,
        measured: numerator / trace_distance,
        predicted_leading: predicted_leading_ratio(epsilon, alpha),
    })
}

/// Log–log fit of the measured ratio against `ε` on [`example_states`].
pub fn epsilon_sweep_slope(alpha: f64, grid: &[f64]) -> Result<SlopeFit> {
    epsilon_sweep_slope_in(ExampleFamily::Midpoint, alpha, grid)
}

pub fn epsilon_sweep_slope_in(family: ExampleFamily, alpha: f64, grid: &[f64]) -> Result<SlopeFit> {
    if grid.len() < 6 {
        return Err(Error::DegenerateFit("need at least six grid points"));
    }
    let ratios = grid
        .iter()
        .map(|&e| example_ratio_in(family, e, alpha).map(|r| r.measured))
        .collect::<Result<Vec<_>>>()?;
    SlopeFit::log_log(grid, &ratios)
}

/// The two lower bounds on `D_α` evaluated on one example pair:
/// `‖ρ^α - σ^α‖_{1/α}²/(4α)` and `(α/2)‖ρ - σ‖_1²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundComparison {
    pub renyi_pinsker_bound: f64,
    pub classical_bound: f64,
    pub divergence: f64,
}

pub fn example_bound_comparison(family: ExampleFamily, epsilon: f64, alpha: f64) -> Result<BoundComparison> {
    let (rho, sigma) = family.states(epsilon)?;
    let rp = renyi_pinsker_certificate(&rho, &sigma, alpha)?;
    let cl = classical_renyi_bound_certificate(&rho, &sigma, alpha)?;
    Ok(BoundComparison {
        renyi_pinsker_bound: rp.lhs,
        classical_bound: cl.lhs,
        divergence: rp.rhs,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaLimitReport {
    pub alphas: Vec<f64>,
    pub renyi: Vec<f64>,
    pub von_neumann: f64,
    pub deviations: Vec<f64>,
    pub final_deviation: f64,
    /// Deviations never increase along the grid.
    pub monotone: bool,
}

/// `D_{1-10^{-k}}(ρ‖σ)` for `k = 1..=k_max` against `D(ρ‖σ)`.
pub fn alpha_limit_check(rho: &DensityMatrix, sigma: &DensityMatrix, k_max: u32) -> Result<AlphaLimitReport> {
    if k_max < 3 {
        return Err(Error::InvalidConfig(format!("k_max {k_max} must be >= 3")));
    }
    let d = von_neumann_relative_entropy(rho, sigma)?;
    let mut alphas = Vec::new();
    let mut renyi = Vec::new();
    let mut deviations = Vec::new();
    for k in 1..=k_max {
        let a = 1.0 - 10f64.powi(-(k as i32));
        let da = renyi_relative_entropy(rho, sigma, a)?;
        alphas.push(a);
        renyi.push(da);
        deviations.push(if d.is_infinite() && da.is_infinite() { 0.0 } else { (da - d).abs() });
    }
    let monotone = deviations.windows(2).all(|w| w[1] <= w[0]);
    Ok(AlphaLimitReport {
        final_deviation: *deviations.last().expect("k_max >= 3"),
        alphas,
        renyi,
        von_neumann: d,
        deviations,
        monotone,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveRule {
    /// `A(p) = ρ^{1/p}`.
    PowerCurve,
}

/// A map `p ↦ A(p)` into the unit sphere of `C_p`, for `p ∈ (1, 2]`.
#[derive(Debug, Clone)]
pub struct MatrixCurve {
    pub generator: DensityMatrix,
    pub rule: CurveRule,
}

fn check_curve_exponent(p: f64) -> Result<()> {
    check_domain("p", p, "(1, 2]", p > 1.0 && p <= 2.0)
}

impl MatrixCurve {
    pub fn power(generator: DensityMatrix) -> Self {
        Self {
            generator,
            rule: CurveRule::PowerCurve,
        }
    }

    pub fn at(&self, p: f64) -> Result<HermitianMatrix> {
        self.power_at(p, 1.0)
    }

    /// `A(p)^t`.
    pub fn power_at(&self, p: f64, t: f64) -> Result<HermitianMatrix> {
        check_curve_exponent(p)?;
        match self.rule {
            CurveRule::PowerCurve => eig_hermitian(&self.generator)?.power(t / p),
        }
    }
}

/// `(A(p) + B(p)) / ‖A(p) + B(p)‖_p` together with the normalizing norm.
pub fn normalized_sum(a: &MatrixCurve, b: &MatrixCurve, p: f64) -> Result<(HermitianMatrix, f64)> {
    let sum = HermitianMatrix::new(a.at(p)?.as_complex() + b.at(p)?.as_complex())?;
    let norm = hermitian_norm(&sum, p)?;
    if norm == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    Ok((HermitianMatrix::new(sum.scale_real(1.0 / norm))?, norm))
}

/// `Tr[A(p) B(p)^{p-1}] ≤ 1 - K(p-1)‖A(p) - B(p)‖_p²`, with no allowance for
/// higher-order terms in `p - 1`.
pub fn curve_overlap_certificate(
    curve_a: &MatrixCurve,
    curve_b: &MatrixCurve,
    p: f64,
    k: f64,
) -> Result<InequalityCertificate> {
    let a = curve_a.at(p)?;
    let b = curve_b.at(p)?;
    let bq = curve_b.power_at(p, p - 1.0)?;
    let lhs = trace_inner(&a, &bq)?.re;
    let d = hermitian_norm(&HermitianMatrix::new(a.as_complex() - b.as_complex())?, p)?;
    Ok(InequalityCertificate::new(
        "curve_overlap",
        lhs,
        1.0 - k * (p - 1.0) * d * d,
        default_tolerance(a.dim()),
    )
    .with("p", p)
    .with("k", k)
    .with("diff_norm", d))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PinskerConstantEstimate {
    pub p_grid: Vec<f64>,
    pub k_estimates: Vec<f64>,
    pub extrapolated_k: f64,
    /// `D(ρ‖σ) / ‖ρ - σ‖_1²`, the value `K(p)` tends to as `p → 1`.
    pub limit: f64,
}

/// `p = 1 + 2^{-j}` for `j = 1..=levels`.
pub fn dyadic_p_grid(levels: u32) -> Vec<f64> {
    (1..=levels).map(|j| 1.0 + 0.5f64.powi(j as i32)).collect()
}

/// Empirical constants
/// `K(p) = (1 - Tr[σ^{1-1/p} ρ^{1/p}]) / ((p-1)‖ρ^{1/p} - σ^{1/p}‖_p²)` and
/// their two-level Richardson limit at `p → 1` from the last two grid points.
pub fn pinsker_constant_extraction(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    p_grid: &[f64],
) -> Result<PinskerConstantEstimate> {
    if p_grid.len() < 2 {
        return Err(Error::InvalidConfig("p grid needs at least two points".into()));
    }
    let t = trace_norm_distance(rho, sigma)?;
    if t <= 1e-12 {
        return Err(Error::Domain {
            name: "trace_distance",
            value: t,
            domain: "(0, 2]",
        });
    }
    let rho_curve = MatrixCurve::power(rho.clone());
    let sigma_curve = MatrixCurve::power(sigma.clone());
    let mut k_estimates = Vec::with_capacity(p_grid.len());
    for &p in p_grid {
        let c = curve_overlap_certificate(&rho_curve, &sigma_curve, p, 0.0)?;
        let d = c.meta("diff_norm").expect("set by curve_overlap_certificate");
        let denom = (p - 1.0) * d * d;
        if !(denom > 0.0) {
            return Err(Error::DegenerateFit("vanishing power distance"));
        }
        k_estimates.push((1.0 - c.lhs) / denom);
    }
    let n = p_grid.len();
    let (h1, h2) = (p_grid[n - 2] - 1.0, p_grid[n - 1] - 1.0);
    let (k1, k2) = (k_estimates[n - 2], k_estimates[n - 1]);
    if h1 == h2 {
        return Err(Error::DegenerateFit("last two grid points coincide"));
    }
    let extrapolated_k = (h1 * k2 - h2 * k1) / (h1 - h2);
    let limit = von_neumann_relative_entropy(rho, sigma)? / (t * t);
    Ok(PinskerConstantEstimate {
        p_grid: p_grid.to_vec(),
        k_estimates,
        extrapolated_k,
        limit,
    })
}

/// `K_{i+1} = 1/4 + K_i/2`, returning `K_0, …, K_steps`.
pub fn constant_iteration(k0: f64, steps: usize) -> Vec<f64> {
    std::iter::successors(Some(k0), |k| Some(0.25 + k / 2.0))
        .take(steps + 1)
        .collect()
}

/// Inequalities known to [`ensemble_suite`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Inequality {
    UniformConvexity,
    HolderRemainder1,
    HolderRemainder2,
    OverlapQuadratic,
    OverlapConjugate,
    RenyiPinsker,
    ClassicalRenyi,
    Ricard,
    WeakenedPinsker,
    Pinsker,
}

impl Inequality {
    pub const ALL: [Inequality; 10] = [
        Self::UniformConvexity,
        Self::HolderRemainder1,
        Self::HolderRemainder2,
        Self::OverlapQuadratic,
        Self::OverlapConjugate,
        Self::RenyiPinsker,
        Self::ClassicalRenyi,
        Self::Ricard,
        Self::WeakenedPinsker,
        Self::Pinsker,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::UniformConvexity => "uniform_convexity",
            Self::HolderRemainder1 => "holder_remainder_1",
            Self::HolderRemainder2 => "holder_remainder_2",
            Self::OverlapQuadratic => "overlap_quadratic",
            Self::OverlapConjugate => "overlap_conjugate",
            Self::RenyiPinsker => "renyi_pinsker",
            Self::ClassicalRenyi => "classical_renyi",
            Self::Ricard => "ricard",
            Self::WeakenedPinsker => "weakened_pinsker",
            Self::Pinsker => "pinsker",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|i| i.name() == name)
            .ok_or_else(|| Error::UnknownInequality(name.to_owned()))
    }

    fn parameter(self) -> Option<&'static str> {
        match self {
            Self::UniformConvexity
            | Self::HolderRemainder1
            | Self::HolderRemainder2
            | Self::OverlapQuadratic
            | Self::OverlapConjugate => Some("p"),
            Self::RenyiPinsker | Self::ClassicalRenyi | Self::Ricard | Self::WeakenedPinsker => Some("alpha"),
            Self::Pinsker => None,
        }
    }
}

/// Exponent grids swept by [`ensemble_suite`]. `p` values must lie in `(1, 2]`
/// and `alpha` values in `(0, 1)`; the Rényi–Pinsker pair additionally needs
/// `alpha ≥ 1/2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteParams {
    pub p: Vec<f64>,
    pub alpha: Vec<f64>,
    /// Overrides the dimension-based default when set.
    pub tolerance: Option<f64>,
}

impl Default for SuiteParams {
    fn default() -> Self {
        Self {
            p: vec![1.1, 1.25, 1.5, 1.75, 2.0],
            alpha: vec![0.5, 0.6, 0.7, 0.8, 0.9, 0.99],
            tolerance: None,
        }
    }
}

impl SuiteParams {
    fn validate(&self, set: &[Inequality]) -> Result<()> {
        for &p in &self.p {
            check_domain("p", p, "(1, 2]", p > 1.0 && p <= 2.0)?;
        }
        for &a in &self.alpha {
            check_domain("alpha", a, "(0, 1)", a > 0.0 && a < 1.0)?;
            if a < 0.5 && set.iter().any(|i| matches!(i, Inequality::RenyiPinsker | Inequality::WeakenedPinsker)) {
                return Err(Error::Domain {
                    name: "alpha",
                    value: a,
                    domain: "[1/2, 1) for renyi_pinsker and weakened_pinsker",
                });
            }
        }
        if let Some(t) = self.tolerance {
            check_domain("tolerance", t, "(0, ∞)", t > 0.0 && t.is_finite())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteRecord {
    pub name: String,
    pub dim: usize,
    pub trial: usize,
    pub parameters: BTreeMap<String, f64>,
    pub certificate: InequalityCertificate,
}

/// Counts of gaps by decade. Bucket `i` of `counts` holds gaps in
/// `[edges[i], edges[i+1])`; gaps below the tolerance band and infinite gaps
/// are counted separately.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapHistogram {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
    pub negative: usize,
    pub infinite: usize,
}

impl GapHistogram {
    const EDGES: [f64; 8] = [0.0, 1e-12, 1e-9, 1e-6, 1e-3, 1.0, 1e3, f64::INFINITY];

    fn new() -> Self {
        Self {
            edges: Self::EDGES.to_vec(),
            counts: vec![0; Self::EDGES.len() - 1],
            negative: 0,
            infinite: 0,
        }
    }

    fn add(&mut self, gap: f64) {
        if gap == f64::INFINITY {
            self.infinite += 1;
        } else if !(gap >= 0.0) {
            self.negative += 1;
        } else {
            let i = Self::EDGES.windows(2).position(|w| gap >= w[0] && gap < w[1]).expect("finite gap");
            self.counts[i] += 1;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalitySummary {
    pub count: usize,
    pub min_gap: f64,
    pub violations: usize,
    pub within_tolerance: usize,
    pub histogram: GapHistogram,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    /// Sorted by `(name, dim, trial)`, grid order within a trial.
    pub records: Vec<SuiteRecord>,
    pub summaries: BTreeMap<String, InequalitySummary>,
    /// `+∞` for an empty report.
    pub min_gap: f64,
    pub violations: usize,
}

impl SuiteReport {
    pub fn from_records(mut records: Vec<SuiteRecord>) -> Self {
        records.sort_by(|a, b| (&a.name, a.dim, a.trial).cmp(&(&b.name, b.dim, b.trial)));
        let mut summaries: BTreeMap<String, InequalitySummary> = BTreeMap::new();
        for r in &records {
            let s = summaries.entry(r.name.clone()).or_insert_with(|| InequalitySummary {
                count: 0,
                min_gap: f64::INFINITY,
                violations: 0,
                within_tolerance: 0,
                histogram: GapHistogram::new(),
            });
            let c = &r.certificate;
            s.count += 1;
            s.min_gap = if c.gap.is_nan() { f64::NAN } else { s.min_gap.min(c.gap) };
            match c.status {
                CertificateStatus::Violated => s.violations += 1,
                CertificateStatus::ViolatedWithinTolerance => s.within_tolerance += 1,
                CertificateStatus::Holds => {}
            }
            s.histogram.add(c.gap);
        }
        let min_gap = summaries
            .values()
            .map(|s| s.min_gap)
            .fold(f64::INFINITY, |m, g| if g.is_nan() || m.is_nan() { f64::NAN } else { m.min(g) });
        let violations = summaries.values().map(|s| s.violations).sum();
        Self {
            records,
            summaries,
            min_gap,
            violations,
        }
    }

    pub fn merge(reports: impl IntoIterator<Item = SuiteReport>) -> Self {
        Self::from_records(reports.into_iter().flat_map(|r| r.records).collect())
    }
}

fn unit_normalize(m: &ComplexMatrix, p: f64) -> Result<ComplexMatrix> {
    let n = schatten_norm(m, p)?;
    if n == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    Ok(m.scale_real(1.0 / n))
}

fn trial_records(
    config: &EnsembleConfig,
    set: &[Inequality],
    params: &SuiteParams,
    trial: usize,
) -> Result<Vec<SuiteRecord>> {
    let sample = random_sample(config, trial)?;
    let needs_density = set.iter().any(|i| {
        !matches!(
            i,
            Inequality::UniformConvexity | Inequality::HolderRemainder1 | Inequality::HolderRemainder2
        )
    });
    let (a, b) = sample.general_pair();
    let densities = if needs_density { Some(sample.density_pair()?) } else { None };
    let mut out = Vec::new();
    for &ineq in set {
        let grid: Vec<Option<f64>> = match ineq.parameter() {
            Some("p") => params.p.iter().copied().map(Some).collect(),
            Some(_) => params.alpha.iter().copied().map(Some).collect(),
            None => vec![None],
        };
        for value in grid {
            let certs = certify_one(ineq, &a, &b, densities.as_ref(), value)?;
            for mut cert in certs {
                if let Some(t) = params.tolerance {
                    cert.tolerance = t;
                    cert.status = CertificateStatus::classify(cert.gap, t);
                }
                let mut parameters = BTreeMap::new();
                parameters.insert("dim".to_owned(), config.dim as f64);
                parameters.insert("trial".to_owned(), trial as f64);
                if let (Some(key), Some(v)) = (ineq.parameter(), value) {
                    parameters.insert(key.to_owned(), v);
                }
                out.push(SuiteRecord {
                    name: cert.name.clone(),
                    dim: config.dim,
                    trial,
                    parameters,
                    certificate: cert,
                });
            }
        }
    }
    Ok(out)
}

fn certify_one(
    ineq: Inequality,
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    densities: Option<&(DensityMatrix, DensityMatrix)>,
    value: Option<f64>,
) -> Result<Vec<InequalityCertificate>> {
    let v = value.unwrap_or(f64::NAN);
    let dens = || densities.expect("density pair drawn for entropy inequalities");
    Ok(match ineq {
        Inequality::UniformConvexity => {
            vec![uniform_convexity_gap(&unit_normalize(a, v)?, &unit_normalize(b, v)?, v)?]
        }
        Inequality::HolderRemainder1 | Inequality::HolderRemainder2 => {
            let q = crate::schatten::conjugate_exponent(v);
            let (ua, ub) = (unit_normalize(a, v)?, unit_normalize(b, q)?);
            if ineq == Inequality::HolderRemainder1 {
                vec![holder_remainder_1(&ua, &ub, v)?]
            } else {
                vec![holder_remainder_2(&ua, &ub, v)?]
            }
        }
        Inequality::OverlapQuadratic | Inequality::OverlapConjugate => {
            let (r, s) = dens();
            let (c1, c2) = overlap_certificates(r, s, v)?;
            vec![if ineq == Inequality::OverlapQuadratic { c1 } else { c2 }]
        }
        Inequality::RenyiPinsker => vec![renyi_pinsker_certificate(&dens().0, &dens().1, v)?],
        Inequality::ClassicalRenyi => vec![classical_renyi_bound_certificate(&dens().0, &dens().1, v)?],
        Inequality::Ricard => vec![ricard_bound_certificate(&dens().0, &dens().1, v)?],
        Inequality::WeakenedPinsker => vec![weakened_pinsker_certificate(&dens().0, &dens().1, v)?],
        Inequality::Pinsker => vec![pinsker_certificate(&dens().0, &dens().1)?],
    })
}

/// Evaluate every named inequality on every trial of `config`, sweeping the
/// exponent grids in `params`. Trials run in parallel; the report depends only
/// on the inputs.
pub fn ensemble_suite(config: &EnsembleConfig, names: &[&str], params: &SuiteParams) -> Result<SuiteReport> {
    config.validate()?;
    let mut set = names.iter().map(|n| Inequality::parse(n)).collect::<Result<Vec<_>>>()?;
    set.sort();
    set.dedup();
    params.validate(&set)?;
    if set.is_empty() {
        return Ok(SuiteReport::from_records(Vec::new()));
    }
    let per_trial = (0..config.trials)
        .into_par_iter()
        .map(|t| trial_records(config, &set, params, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(SuiteReport::from_records(per_trial.into_iter().flatten().collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fit::log_spaced;
    use crate::matcore::ensemble::tests_support::wishart;
    use crate::matcore::EnsembleKind;
    use approx::assert_relative_eq;

    #[test]
    fn example_states_match_definition() {
        let (r, s) = example_states(0.1).unwrap();
        assert_eq!(s, DensityMatrix::from_diagonal(&[0.6, 0.4]).unwrap());
        assert_eq!(r, DensityMatrix::maximally_mixed(2));
        for e in [1e-6, 1e-3, 0.1, 0.3, 0.49] {
            let (r, s) = example_states(e).unwrap();
            assert!((trace_norm_distance(&r, &s).unwrap() - 2.0 * e).abs() <= 1e-14);
        }
        assert!(example_states(0.0).is_err());
        assert!(example_states(0.5).is_err());
    }

    #[test]
    fn predicted_ratio_value() {
        let r = example_ratio(0.01, 0.5).unwrap();
        assert_relative_eq!(r.predicted_leading, 0.5f64.sqrt() / 0.2, max_relative = 1e-14);
        assert_relative_eq!(r.predicted_leading, 3.5355, epsilon = 1e-4);
    }

    // Scalar oracle: the entries of ρ^α - σ^α are ±(x^α - (1/2)^α) with
    // x = 1/2 ± ε, so the ratio is a two-term ℓ_{1/α} sum over 2ε.
    fn midpoint_ratio_oracle(e: f64, a: f64) -> f64 {
        let h = 0.5f64.powf(a);
        let u = ((0.5 + e).powf(a) - h).abs();
        let v = (h - (0.5 - e).powf(a)).abs();
        (u.powf(1.0 / a) + v.powf(1.0 / a)).powf(a) / (2.0 * e)
    }

    #[test]
    fn midpoint_ratio_tends_to_alpha() {
        for a in [0.5, 0.7, 0.9] {
            for e in [1e-4, 1e-3, 1e-2] {
                let r = example_ratio(e, a).unwrap();
                assert_relative_eq!(r.measured, midpoint_ratio_oracle(e, a), max_relative = 1e-9);
                assert_relative_eq!(r.numerator, 2.0 * a * e, max_relative = 1e-3);
            }
            assert_relative_eq!(example_ratio(1e-5, a).unwrap().measured, a, max_relative = 1e-4);
        }
        let fit = epsilon_sweep_slope(0.5, &log_spaced(1e-5, 1e-2, 8)).unwrap();
        assert!(fit.exponent.abs() < 1e-3);
    }

    #[test]
    fn boundary_ratio_blows_up() {
        let fit = epsilon_sweep_slope_in(ExampleFamily::Boundary, 0.5, &log_spaced(1e-5, 1e-2, 8)).unwrap();
        assert!((fit.exponent + 0.5).abs() < 0.02, "{}", fit.exponent);
        // ‖diag(1 - (1-ε)^α, -ε^α)‖_{1/α} / 2ε
        for (a, e) in [(0.9, 1e-2), (0.9, 1e-5), (0.7, 1e-3)] {
            let u: f64 = 1.0 - (1.0f64 - e).powf(a);
            let oracle = (u.powf(1.0 / a) + e).powf(a) / (2.0 * e);
            let r = example_ratio_in(ExampleFamily::Boundary, e, a).unwrap();
            assert_relative_eq!(r.measured, oracle, max_relative = 1e-9);
        }
        let r = example_ratio_in(ExampleFamily::Boundary, 1e-4, 0.5).unwrap();
        assert_relative_eq!(r.measured, 1.0 / (2.0 * 1e-4f64.sqrt()), max_relative = 0.02);
    }

    #[test]
    fn sweep_needs_six_points() {
        assert!(matches!(
            epsilon_sweep_slope(0.5, &[1e-5, 1e-4, 1e-3]),
            Err(Error::DegenerateFit(_))
        ));
    }

    #[test]
    fn bound_comparison_on_midpoint_pair() {
        // ‖ρ^α - σ^α‖_{1/α}²/(4α) ≈ αε² while (α/2)(2ε)² = 2αε²
        let c = example_bound_comparison(ExampleFamily::Midpoint, 1e-3, 0.5).unwrap();
        assert_relative_eq!(c.renyi_pinsker_bound, 0.5e-6, max_relative = 1e-2);
        assert_relative_eq!(c.classical_bound, 1e-6, max_relative = 1e-12);
        assert!(c.divergence >= c.classical_bound);
    }

    #[test]
    fn alpha_limit() {
        let r = wishart(3, 1);
        let rep = alpha_limit_check(&r, &r, 6).unwrap();
        assert!(rep.renyi.iter().all(|d| d.abs() <= 1e-12));
        let (r, s) = example_states(0.1).unwrap();
        let rep = alpha_limit_check(&r, &s, 6).unwrap();
        assert!(rep.final_deviation <= 1e-4 * (1.0 + rep.von_neumann));
        assert!(rep.monotone);
        for seed in 0..10 {
            let rep = alpha_limit_check(&wishart(2, seed), &wishart(2, seed + 40), 6).unwrap();
            assert!(rep.monotone, "{:?}", rep.deviations);
        }
        assert!(alpha_limit_check(&r, &s, 2).is_err());
    }

    #[test]
    fn curve_normalization_and_limit() {
        let c = MatrixCurve::power(wishart(4, 2));
        let mut prev = f64::INFINITY;
        for j in 0..12 {
            let p = 1.0 + 0.5f64.powi(j);
            let a = c.at(p).unwrap();
            assert!((hermitian_norm(&a, p).unwrap() - 1.0).abs() <= 1e-10);
            let d = schatten_norm(&(a.as_complex() - c.generator.as_complex()), 1.0).unwrap();
            prev = prev.min(d);
        }
        assert!(prev < 1e-3);
    }

    #[test]
    fn normalized_sums_stay_on_sphere() {
        for seed in 0..10 {
            let a = MatrixCurve::power(wishart(3, seed));
            let b = MatrixCurve::power(wishart(3, seed + 100));
            for p in [1.001, 1.3, 2.0] {
                let (c, norm) = normalized_sum(&a, &b, p).unwrap();
                assert!((hermitian_norm(&c, p).unwrap() - 1.0).abs() <= 1e-10);
                if p == 1.001 {
                    assert!((norm - 2.0).abs() < 0.01);
                }
            }
        }
    }

    #[test]
    fn curve_overlap_examples() {
        let a = MatrixCurve::power(wishart(3, 5));
        let c = curve_overlap_certificate(&a, &a, 1.5, 0.25).unwrap();
        assert!((c.lhs - 1.0).abs() < 1e-12 && (c.rhs - 1.0).abs() < 1e-12 && c.gap.abs() < 1e-12);
        for seed in 0..20 {
            let (r, s) = (wishart(3, seed), wishart(3, seed + 7));
            let (ca, cb) = (MatrixCurve::power(r.clone()), MatrixCurve::power(s.clone()));
            for p in [1.1, 1.5, 2.0] {
                let c = curve_overlap_certificate(&ca, &cb, p, 0.25).unwrap();
                assert!(c.holds());
                let (o, _) = overlap_certificates(&r, &s, p).unwrap();
                assert!((o.lhs - c.lhs).abs() <= 1e-10 && (o.rhs - c.rhs).abs() <= 1e-10);
            }
            let c = curve_overlap_certificate(&ca, &cb, 1.001, 0.49).unwrap();
            assert!(c.gap >= -0.05 * 0.001);
        }
    }

    #[test]
    fn pinsker_constant_on_examples() {
        let grid = dyadic_p_grid(12);
        let (r, s) = example_states(0.1).unwrap();
        let est = pinsker_constant_extraction(&r, &s, &grid).unwrap();
        let d = 0.5 * (0.5f64 / 0.6).ln() + 0.5 * (0.5f64 / 0.4).ln();
        assert_relative_eq!(est.limit, d / 0.04, max_relative = 1e-10);
        assert!((est.extrapolated_k - est.limit).abs() < 1e-5);
        assert!(est.extrapolated_k >= 0.499);
        assert!(est.k_estimates.iter().all(|&k| k >= 0.25 - 1e-6));
        let mut last = f64::INFINITY;
        for e in [0.1, 0.01, 0.001] {
            let (r, s) = example_states(e).unwrap();
            let k = pinsker_constant_extraction(&r, &s, &grid).unwrap().extrapolated_k;
            assert!(k >= 0.499 && k < last);
            last = k;
        }
        assert!((last - 0.5).abs() < 1e-3);
        assert!(pinsker_constant_extraction(&r, &r, &grid).is_err());
    }

    #[test]
    fn iteration() {
        assert_eq!(constant_iteration(0.25, 1), vec![0.25, 0.375]);
        assert_eq!(constant_iteration(0.5, 4), vec![0.5; 5]);
        assert_eq!(constant_iteration(0.25, 0), vec![0.25]);
        let seq = constant_iteration(0.0, 20);
        for (n, k) in seq.iter().enumerate() {
            assert!((k - 0.5).abs() - 0.5 * 0.5f64.powi(n as i32) <= 1e-16);
        }
        assert!((seq[20] - 0.5).abs() < 1e-6);
    }

    #[test]
    fn suite_basics() {
        let cfg = EnsembleConfig::new(4, EnsembleKind::WishartDensity, 100, 7).unwrap();
        let params = SuiteParams::default();
        let empty = ensemble_suite(&cfg, &[], &params).unwrap();
        assert!(empty.records.is_empty() && empty.violations == 0);
        let names: Vec<&str> = Inequality::ALL.iter().map(|i| i.name()).collect();
        let rep = ensemble_suite(&cfg, &names, &params).unwrap();
        assert_eq!(rep.violations, 0);
        assert_eq!(rep.summaries.len(), 10);
        assert_eq!(rep.summaries["pinsker"].count, 100);
        assert_eq!(rep.summaries["ricard"].count, 600);
        let again = ensemble_suite(&cfg, &names, &params).unwrap();
        assert_eq!(rep, again);
        assert!(rep.records.windows(2).all(|w| (&w[0].name, w[0].trial) <= (&w[1].name, w[1].trial)));
        assert!(matches!(
            ensemble_suite(&cfg, &["nope"], &params),
            Err(Error::UnknownInequality(_))
        ));
        let bad = SuiteParams {
            alpha: vec![0.3],
            ..SuiteParams::default()
        };
        assert!(ensemble_suite(&cfg, &["renyi_pinsker"], &bad).is_err());
        assert!(ensemble_suite(&cfg, &["classical_renyi"], &bad).is_ok());
    }

    #[test]
    fn suite_on_general_matrices() {
        let cfg = EnsembleConfig::new(3, EnsembleKind::GinibreGeneral, 30, 1).unwrap();
        let rep = ensemble_suite(
            &cfg,
            &["holder_remainder_1", "holder_remainder_2", "uniform_convexity", "pinsker"],
            &SuiteParams::default(),
        )
        .unwrap();
        assert_eq!(rep.violations, 0);
        assert!(rep.min_gap >= -1e-9);
        let h = &rep.summaries["holder_remainder_1"].histogram;
        assert_eq!(h.counts.iter().sum::<usize>() + h.negative + h.infinite, 150);
    }
}
