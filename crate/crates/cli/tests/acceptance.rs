//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use schatten::convexity::{
    holder_remainder_1, holder_remainder_2, sharpness_scan, SharpnessFamily,
};
use schatten::entropy::{
    overlap_certificates, pinching_check, ricard_bound_certificate, von_neumann_relative_entropy,
};
use schatten::experiments::{
    constant_iteration, dyadic_p_grid, ensemble_suite, epsilon_sweep_slope, example_ratio,
    example_states, pinsker_constant_extraction, SuiteParams,
};
use schatten::fit::log_spaced;
use schatten::matcore::{mat_power, random_sample, EnsembleConfig, EnsembleKind, Sample};
use schatten::schatten::{conjugate_exponent, duality_map, gradient_fd_check, schatten_norm};
use schatten::{DensityMatrix, C64};

const ALPHAS: [f64; 6] = [0.5, 0.6, 0.7, 0.8, 0.9, 0.99];
const HOLDER_P: [f64; 5] = [1.1, 1.25, 1.5, 1.75, 2.0];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn samples(dim: usize, kind: EnsembleKind, trials: usize, seed: u64) -> impl Iterator<Item = Sample> {
    let cfg = EnsembleConfig::new(dim, kind, trials, seed).unwrap();
    (0..trials).map(move |t| random_sample(&cfg, t).unwrap())
}

/// `total` pairs spread as evenly as possible over `dims`.
fn density_pairs(dims: std::ops::RangeInclusive<usize>, total: usize, seed: u64) -> Vec<(DensityMatrix, DensityMatrix)> {
    let dims: Vec<usize> = dims.collect();
    let per = total.div_ceil(dims.len());
    dims.iter()
        .flat_map(|&d| samples(d, EnsembleKind::WishartDensity, per, seed + d as u64))
        .take(total)
        .map(|s| s.density_pair().unwrap())
        .collect()
}

fn duality_contract() -> Outcome {
    let start = Instant::now();
    let (mut worst_norm, mut worst_pair, mut count) = (0.0f64, 0.0f64, 0);
    let per_dim = 10_000usize.div_ceil(11);
    for dim in 2..=12 {
        for s in samples(dim, EnsembleKind::GinibreGeneral, per_dim, 100 + dim as u64) {
            let (a, _) = s.general_pair();
            count += 1;
            for p in [1.1, 1.5, 2.0, 3.0] {
                let d = duality_map(&a, p).unwrap();
                let q = conjugate_exponent(p);
                let norm_a = schatten_norm(&a, p).unwrap();
                worst_norm = worst_norm.max((schatten_norm(&d.matrix, q).unwrap() - 1.0).abs());
                let (_, tr) = d.pairing(&a).unwrap();
                worst_pair = worst_pair.max((tr.re - norm_a).abs().max(tr.im.abs()) / norm_a);
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        count >= 10_000 && worst_norm <= 1e-9 && worst_pair <= 1e-9 && elapsed <= Duration::from_secs(60),
        format!(
            "{count} matrices, max |‖D‖_p' - 1| = {worst_norm:.2e}, max rel pairing error = {worst_pair:.2e} (budget 60s)",
        ),
    )
}

fn gradient_check() -> Outcome {
    // relative in the sense |deviation| ≤ 1e-6 (1 + |analytic|); the pure
    // ratio to |analytic| is reported alongside
    let (mut worst, mut worst_pure) = (0.0f64, 0.0f64);
    for s in samples(8, EnsembleKind::GinibreGeneral, 1000, 200) {
        let (a, b) = s.general_pair();
        for p in [1.3, 1.7] {
            let g = gradient_fd_check(&a, &b, p, 1e-5).unwrap();
            worst = worst.max(g.deviation.abs() / (1.0 + g.analytic_slope.abs()));
            worst_pure = worst_pure.max(g.deviation.abs() / g.analytic_slope.abs());
        }
    }
    outcome(
        worst <= 1e-6,
        format!("1000 pairs, max |dev|/(1 + |analytic|) = {worst:.2e}, max |dev|/|analytic| = {worst_pure:.2e}"),
    )
}

fn holder_remainders() -> Outcome {
    let params = SuiteParams {
        p: HOLDER_P.to_vec(),
        alpha: vec![],
        tolerance: Some(1e-9),
    };
    let per_dim = 10_000usize.div_ceil(7);
    let mut reports = Vec::new();
    for dim in 2..=8 {
        let cfg = EnsembleConfig::new(dim, EnsembleKind::GinibreGeneral, per_dim, 300 + dim as u64).unwrap();
        reports.push(ensemble_suite(&cfg, &["holder_remainder_1", "holder_remainder_2"], &params).unwrap());
    }
    let violations: usize = reports.iter().map(|r| r.violations).sum();
    let min_gap = reports.iter().map(|r| r.min_gap).fold(f64::INFINITY, f64::min);

    // saturation: A = e^{-iθ} D_{p'}(B)
    let mut worst_sat = 0.0f64;
    for dim in 2..=8 {
        for (t, s) in samples(dim, EnsembleKind::GinibreGeneral, 20, 350 + dim as u64).enumerate() {
            let (_, b0) = s.general_pair();
            for p in HOLDER_P {
                let q = conjugate_exponent(p);
                let b = b0.scale_real(1.0 / schatten_norm(&b0, q).unwrap());
                let theta = (0.7 * t as f64) % std::f64::consts::TAU;
                let a = duality_map(&b, q).unwrap().matrix.scale(C64::from_polar(1.0, -theta));
                let g1 = holder_remainder_1(&a, &b, p).unwrap().gap;
                let g2 = holder_remainder_2(&a, &b, p).unwrap().gap;
                worst_sat = worst_sat.max(g1.abs()).max(g2.abs());
            }
        }
    }
    outcome(
        violations == 0 && worst_sat <= 1e-9,
        format!(
            "{} pairs per p, {violations} violated, min gap {min_gap:.3e}, max saturation |gap| {worst_sat:.2e}",
            per_dim * 7
        ),
    )
}

fn suite_over_densities(names: &[&str], seed: u64) -> (usize, f64, usize) {
    let params = SuiteParams {
        p: ALPHAS.iter().map(|a| 1.0 / a).collect(),
        alpha: ALPHAS.to_vec(),
        tolerance: Some(1e-9),
    };
    let per_dim = 10_000usize.div_ceil(7);
    let (mut v, mut m, mut n) = (0, f64::INFINITY, 0);
    for dim in 2..=8 {
        let cfg = EnsembleConfig::new(dim, EnsembleKind::WishartDensity, per_dim, seed + dim as u64).unwrap();
        let r = ensemble_suite(&cfg, names, &params).unwrap();
        v += r.violations;
        m = m.min(r.min_gap);
        n += r.records.len();
    }
    (v, m, n)
}

fn entropy_overlap() -> Outcome {
    let (v, m, n) = suite_over_densities(&["overlap_quadratic", "overlap_conjugate", "renyi_pinsker"], 400);
    let mut worst = 0.0f64;
    for (rho, sigma) in density_pairs(2..=8, 10_000, 450) {
        for alpha in ALPHAS {
            let p = 1.0 / alpha;
            let q = conjugate_exponent(p);
            let a = mat_power(&rho, 1.0 / p).unwrap();
            let b = mat_power(&sigma, 1.0 / q).unwrap();
            let h = holder_remainder_1(&a, &b, p).unwrap();
            let (c, _) = overlap_certificates(&rho, &sigma, p).unwrap();
            worst = worst.max((h.lhs - c.lhs).abs()).max((h.rhs - c.rhs).abs());
        }
    }
    outcome(
        v == 0 && worst <= 1e-10,
        format!("{n} certificates, {v} violated, min gap {m:.3e}, max cross-module deviation {worst:.2e}"),
    )
}

fn entropy_lower_bounds() -> Outcome {
    let (v, m, n) = suite_over_densities(&["classical_renyi", "weakened_pinsker", "ricard"], 400);
    let mut worst = f64::NEG_INFINITY;
    for (rho, sigma) in density_pairs(2..=8, 10_000, 400) {
        for alpha in ALPHAS {
            let c = ricard_bound_certificate(&rho, &sigma, alpha).unwrap();
            worst = worst.max(c.lhs - c.meta("power_distance").unwrap());
        }
    }
    outcome(
        v == 0 && worst <= 1e-9,
        format!("{n} certificates, {v} violated, min gap {m:.3e}, max (α/3)‖ρ-σ‖₁ - ‖ρ^α-σ^α‖_1/α = {worst:.3e}"),
    )
}

fn pinching() -> Outcome {
    let (mut dt, mut dd) = (0.0f64, f64::INFINITY);
    for (rho, sigma) in density_pairs(2..=8, 1000, 500) {
        for alpha in [0.5, 0.7, 0.9] {
            let c = pinching_check(&rho, &sigma, alpha).unwrap();
            dt = dt.max((c.trace_distance - c.pinched_trace_distance).abs());
            dd = dd.min(c.renyi - c.pinched_renyi);
        }
    }
    outcome(
        dt <= 1e-9 && dd >= -1e-9,
        format!("1000 pairs, max trace-distance change {dt:.2e}, min D_α decrease {dd:.3e}"),
    )
}

fn worked_example() -> Outcome {
    let start = Instant::now();
    let fit = epsilon_sweep_slope(0.5, &log_spaced(1e-5, 1e-2, 10)).unwrap();
    let r = example_ratio(1e-4, 0.5).unwrap();
    let ratio = r.measured / r.predicted_leading;
    let slope_ok = (fit.exponent + 0.5).abs() <= 0.02;
    let ratio_ok = (0.95..=1.05).contains(&ratio);
    outcome(
        slope_ok && ratio_ok && start.elapsed() < Duration::from_secs(10),
        format!(
            "slope {:.4} (target -0.5 ± 0.02), measured/predicted at ε=1e-4 = {ratio:.4} (target [0.95, 1.05]); \
             measured ratio {:.6} vs predicted {:.4}",
            fit.exponent, r.measured, r.predicted_leading
        ),
    )
}

fn alpha_limit() -> Outcome {
    let mut worst = 0.0f64;
    let mut pairs = density_pairs(2..=8, 1000, 600);
    pairs.push(example_states(0.1).unwrap());
    for (rho, sigma) in &pairs {
        let d = von_neumann_relative_entropy(rho, sigma).unwrap();
        let da = schatten::entropy::renyi_relative_entropy(rho, sigma, 1.0 - 1e-6).unwrap();
        worst = worst.max((da - d).abs() / (1.0 + d));
    }
    outcome(
        worst <= 1e-4,
        format!("{} pairs, max |D_α - D|/(1 + D) at α = 1 - 1e-6: {worst:.2e}", pairs.len()),
    )
}

fn sharp_pinsker() -> Outcome {
    let grid = dyadic_p_grid(12);
    let (mut min_k, mut min_grid) = (f64::INFINITY, f64::INFINITY);
    let per_dim = 100usize.div_ceil(3);
    let mut pairs: Vec<_> = (2..=4)
        .flat_map(|d| samples(d, EnsembleKind::WishartDensity, per_dim, 700 + d as u64))
        .take(100)
        .map(|s| s.density_pair().unwrap())
        .collect();
    for e in [0.1, 0.01, 0.001, 1e-4] {
        pairs.push(example_states(e).unwrap());
    }
    for (rho, sigma) in &pairs {
        let est = pinsker_constant_extraction(rho, sigma, &grid).unwrap();
        min_k = min_k.min(est.extrapolated_k);
        min_grid = est.k_estimates.iter().copied().fold(min_grid, f64::min);
    }
    let (v, m, n) = suite_over_densities(&["pinsker"], 750);
    let k20 = constant_iteration(0.25, 20)[20];
    outcome(
        min_k >= 0.499 && min_grid >= 0.25 - 1e-6 && v == 0 && (k20 - 0.5).abs() < 1e-6,
        format!(
            "{} pairs, min extrapolated K {min_k:.5}, min grid K {min_grid:.4}; \
             {n} Pinsker certificates, {v} violated, min gap {m:.3e}; |K_20 - 1/2| = {:.2e}",
            pairs.len(),
            (k20 - 0.5).abs()
        ),
    )
}

fn sharpness() -> Outcome {
    let scales = log_spaced(1e-4, 1e-1, 10);
    let quad = sharpness_scan(2.0, SharpnessFamily::QuadraticRemainder, &scales).unwrap();
    let conj = sharpness_scan(1.5, SharpnessFamily::ConjugateRemainder, &scales).unwrap();
    let q = conjugate_exponent(1.5);
    outcome(
        (1.9..=2.1).contains(&quad.exponent) && (conj.exponent - q).abs() <= 0.15,
        format!(
            "quadratic family exponent {:.4} (target [1.9, 2.1]), conjugate family exponent {:.4} (target {q} ± 0.15)",
            quad.exponent, conj.exponent
        ),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let code = schatten_cli::run([
            "schatten", "certify", "--trials", "200", "--seed", "2024", "--out", path.to_str().unwrap(),
        ]);
        let text = std::fs::read_to_string(&path).unwrap();
        let start = text.find("\"records\"").unwrap();
        let end = text.find("\"aggregate\"").unwrap();
        (code, text[start..end].to_owned())
    };
    let (c1, r1) = run("a.json");
    let (c2, r2) = run("b.json");
    outcome(
        c1 == 0 && c2 == 0 && r1 == r2,
        format!("exit codes {c1}/{c2}, records section {} bytes, identical: {}", r1.len(), r1 == r2),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("duality map contract", duality_contract),
        ("gradient check", gradient_check),
        ("Hölder remainder bounds", holder_remainders),
        ("entropy overlap and Rényi Pinsker bounds", entropy_overlap),
        ("classical, weakened and power-difference bounds", entropy_lower_bounds),
        ("pinching", pinching),
        ("two-state example scaling", worked_example),
        ("α → 1 limit", alpha_limit),
        ("sharp Pinsker constant", sharp_pinsker),
        ("sharpness exponents", sharpness),
        ("determinism", determinism),
    ];
    let mut failed = Vec::new();
    for (i, (title, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        let tag = if res.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {:>2} {tag} {title}: {} [{:.1}s]",
            i + 1,
            res.detail,
            start.elapsed().as_secs_f64()
        );
        if !res.pass {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", criteria.len());
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
