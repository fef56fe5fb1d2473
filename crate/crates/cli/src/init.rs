//! Initial data for a scenario.

use lohe_core::analysis::frequency_spread;
use lohe_core::matcore::{expm_skew, sample_gaussian_su, sample_haar};
use lohe_core::transport::PointCloud;
use lohe_core::{Oscillator, Rng, SkewHermitianMatrix, UnitaryMatrix};

use crate::config::{HamiltonianMode, InitMode, ScenarioConfig};
use crate::CliError;

/// Unit-Frobenius-norm scale of the shared generator in `identical` mode.
const IDENTICAL_SIGMA: f64 = 1.0;

/// `n` oscillators drawn from the scenario's laws.
///
/// States come from `rng.derive(0)` and generators from `rng.derive(1)`, so
/// changing one law never shifts the other's stream.
pub fn initial_oscillators(
    cfg: &ScenarioConfig,
    n: usize,
    rng: &Rng,
) -> Result<Vec<Oscillator<f64>>, CliError> {
    let states = initial_states(cfg.init_mode, cfg.d, n, &mut rng.derive(0));
    let mut generators = initial_generators(cfg.hamiltonian_mode, cfg.d, n, &mut rng.derive(1));
    if let Some(alpha) = cfg.alpha {
        generators = impose_spread(generators, alpha)?;
    }
    Ok(states
        .into_iter()
        .zip(generators)
        .map(|(u, a)| Oscillator { u, a })
        .collect())
}

pub fn initial_states(mode: InitMode, d: usize, n: usize, rng: &mut Rng) -> Vec<UnitaryMatrix<f64>> {
    match mode {
        InitMode::Haar => (0..n).map(|_| sample_haar(rng, d)).collect(),
        InitMode::Cluster { center_seed, radius } => {
            let center: UnitaryMatrix<f64> = sample_haar(&mut Rng::new(center_seed), d);
            (0..n)
                .map(|_| {
                    let b = sample_gaussian_su::<f64>(rng, d, 1.0);
                    let xi = rng.uniform();
                    let step = radius * xi / b.frobenius_norm();
                    expm_skew(&b, step)
                        .expect("Jacobi converges on small Hermitian matrices")
                        .compose(&center)
                })
                .collect()
        }
    }
}

pub fn initial_generators(
    mode: HamiltonianMode,
    d: usize,
    n: usize,
    rng: &mut Rng,
) -> Vec<SkewHermitianMatrix<f64>> {
    match mode {
        HamiltonianMode::Zero => vec![SkewHermitianMatrix::zeros(d); n],
        HamiltonianMode::Identical => vec![sample_gaussian_su(rng, d, IDENTICAL_SIGMA); n],
        HamiltonianMode::Gaussian { sigma } => {
            (0..n).map(|_| sample_gaussian_su(rng, d, sigma)).collect()
        }
    }
}

/// Rescales the generators so that `max_{i,j} ‖A_i − A_j‖₂ = alpha`.
fn impose_spread(
    generators: Vec<SkewHermitianMatrix<f64>>,
    alpha: f64,
) -> Result<Vec<SkewHermitianMatrix<f64>>, CliError> {
    let cloud = PointCloud::new(
        generators
            .iter()
            .map(|a| Oscillator {
                u: UnitaryMatrix::identity(a.dim()),
                a: a.clone(),
            })
            .collect(),
    )?;
    let spread = frequency_spread(&cloud);
    if !(spread > 0.0) {
        return Err(CliError::Config(
            "alpha: generators have zero spread and cannot be rescaled".into(),
        ));
    }
    Ok(generators
        .iter()
        .map(|a| a.scale(alpha / spread))
        .collect())
}
