//! Seeded random matrix ensembles.
//!
//! Every sample is a pure function of `(seed, trial_index)`: the generator is a
//! ChaCha8 stream keyed by the seed with the trial index selecting the stream,
//! so trials can be drawn in any order or in parallel.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};

use super::{
    matrix::{ComplexMatrix, DensityMatrix, HermitianMatrix, C64},
    spectral::eig_hermitian,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnsembleKind {
    /// Pair of independent complex Ginibre matrices.
    GinibreGeneral,
    /// Pair of independent `GG*/Tr[GG*]` density matrices.
    WishartDensity,
    /// Pair of diagonal density matrices, uniform on the simplex.
    DiagonalCommuting,
    /// Pair of Wishart densities built from `n × rank` Ginibre factors.
    RankDeficientDensity { rank: usize },
    /// `(ρ, ρ + ε H)` with `H` traceless Hermitian of unit Frobenius norm,
    /// the second state projected back onto density matrices.
    NearIdenticalPair { epsilon: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnsembleConfig {
    pub dim: usize,
    pub kind: EnsembleKind,
    pub trials: usize,
    pub seed: u64,
}

impl EnsembleConfig {
    pub fn new(dim: usize, kind: EnsembleKind, trials: usize, seed: u64) -> Result<Self> {
        let cfg = Self {
            dim,
            kind,
            trials,
            seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 1 {
            return Err(Error::InvalidConfig("dim must be >= 1".into()));
        }
        if self.trials < 1 {
            return Err(Error::InvalidConfig("trials must be >= 1".into()));
        }
        match self.kind {
            EnsembleKind::RankDeficientDensity { rank } if rank < 1 || rank > self.dim => Err(
                Error::InvalidConfig(format!("rank {rank} not in 1..={}", self.dim)),
            ),
            EnsembleKind::NearIdenticalPair { epsilon } if !(epsilon > 0.0 && epsilon.is_finite()) => {
                Err(Error::InvalidConfig(format!("epsilon {epsilon} must be positive")))
            }
            _ => Ok(()),
        }
    }
}

/// One draw from an ensemble.
#[derive(Debug, Clone)]
pub enum Sample {
    General(ComplexMatrix, ComplexMatrix),
    Density(DensityMatrix, DensityMatrix),
}

impl Sample {
    pub fn general_pair(&self) -> (ComplexMatrix, ComplexMatrix) {
        match self {
            Sample::General(a, b) => (a.clone(), b.clone()),
            Sample::Density(r, s) => (r.as_complex().clone(), s.as_complex().clone()),
        }
    }

    /// Density pair; Ginibre draws are mapped through `G ↦ GG*/Tr[GG*]`.
    pub fn density_pair(&self) -> Result<(DensityMatrix, DensityMatrix)> {
        match self {
            Sample::Density(r, s) => Ok((r.clone(), s.clone())),
            Sample::General(a, b) => Ok((gram_density(a)?, gram_density(b)?)),
        }
    }
}

pub fn trial_rng(seed: u64, trial_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial_index);
    rng
}

pub fn random_sample(config: &EnsembleConfig, trial_index: usize) -> Result<Sample> {
    config.validate()?;
    if trial_index >= config.trials {
        return Err(Error::InvalidConfig(format!(
            "trial index {trial_index} >= trials {}",
            config.trials
        )));
    }
    let mut rng = trial_rng(config.seed, trial_index as u64);
    let n = config.dim;
    Ok(match config.kind {
        EnsembleKind::GinibreGeneral => {
            Sample::General(ginibre_matrix(&mut rng, n), ginibre_matrix(&mut rng, n))
        }
        EnsembleKind::WishartDensity => {
            Sample::Density(wishart_density(&mut rng, n, n)?, wishart_density(&mut rng, n, n)?)
        }
        EnsembleKind::DiagonalCommuting => {
            Sample::Density(simplex_diagonal(&mut rng, n)?, simplex_diagonal(&mut rng, n)?)
        }
        EnsembleKind::RankDeficientDensity { rank } => Sample::Density(
            wishart_density(&mut rng, n, rank)?,
            wishart_density(&mut rng, n, rank)?,
        ),
        EnsembleKind::NearIdenticalPair { epsilon } => {
            let rho = wishart_density(&mut rng, n, n)?;
            let sigma = perturbed_density(&mut rng, &rho, epsilon)?;
            Sample::Density(rho, sigma)
        }
    })
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// `n × n` matrix of i.i.d. standard complex Gaussians.
pub fn ginibre_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let entries: Vec<C64> = (0..n * n).map(|_| complex_normal(rng)).collect();
    ComplexMatrix::from_row_slice(n, &entries).expect("finite gaussian entries")
}

/// `GG*/Tr[GG*]` for an `n × rank` Ginibre factor `G`.
pub fn wishart_density<R: Rng + ?Sized>(rng: &mut R, n: usize, rank: usize) -> Result<DensityMatrix> {
    let g = nalgebra::DMatrix::from_fn(n, rank, |_, _| complex_normal(rng));
    let w = ComplexMatrix::new(&g * g.adjoint())?;
    DensityMatrix::from_psd(&HermitianMatrix::hermitize(w))
}

fn gram_density(a: &ComplexMatrix) -> Result<DensityMatrix> {
    DensityMatrix::from_psd(&HermitianMatrix::hermitize(a * &a.adjoint()))
}

fn simplex_diagonal<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<DensityMatrix> {
    let w: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = w.iter().sum();
    let d: Vec<f64> = w.iter().map(|x| x / total).collect();
    DensityMatrix::from_psd(&HermitianMatrix::from_real_diagonal(&d)?)
}

fn perturbed_density<R: Rng + ?Sized>(
    rng: &mut R,
    rho: &DensityMatrix,
    epsilon: f64,
) -> Result<DensityMatrix> {
    let n = rho.dim();
    let g = ginibre_matrix(rng, n);
    let h = HermitianMatrix::hermitize(&g + &g.adjoint());
    let shift = h.real_trace() / n as f64;
    let traceless = h.as_complex() - &ComplexMatrix::identity(n).scale_real(shift);
    let frob = traceless.as_matrix().norm();
    let direction = if frob > 0.0 {
        traceless.scale_real(1.0 / frob)
    } else {
        traceless
    };
    let moved = HermitianMatrix::hermitize(rho.as_complex() + &direction.scale_real(epsilon));
    let clamped = eig_hermitian(&moved)?.map(|x| x.max(0.0));
    DensityMatrix::from_psd(&clamped)
}

#[cfg(test)]
pub(crate) mod tests_support {
    use super::*;

    pub fn ginibre(n: usize, seed: u64) -> ComplexMatrix {
        ginibre_matrix(&mut trial_rng(0xA11CE, seed), n)
    }

    pub fn random_unitary(n: usize, seed: u64) -> ComplexMatrix {
        let g = ginibre(n, seed ^ 0x5EED);
        let q = g.into_inner().qr().q();
        ComplexMatrix::new(q).unwrap()
    }

    pub fn wishart(n: usize, seed: u64) -> DensityMatrix {
        wishart_density(&mut trial_rng(0xBEEF, seed), n, n).unwrap()
    }
}
