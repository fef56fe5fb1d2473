//! Kinetic-equation side of the model.
//!
//! The mean field `⟨U⟩(t)` is taken from a large reference run of the
//! interacting system and recorded at every generator evaluation time.
//! Characteristic particles are then integrated under that frozen field
//! with the same stepper, so they see exactly the values the reference
//! particles saw and no interpolation error enters the comparison.

use crate::analysis::DiagnosticSeries;
use crate::error::{LoheError, Result};
use crate::integrate::{integrate, GeneratorField, LoheField, StepperConfig, Trajectory};
use crate::matcore::{coupling_kernel, expm_skew, sample_haar, ComplexMatrix, Rng, SkewHermitianMatrix};
use crate::model::{centroid, check_uniform_dim, frozen_field_generator, Ensemble, Oscillator};
use crate::scalar::Real;

/// Recorded mean field `t ↦ ⟨U⟩(t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldTrajectory<T> {
    times: Vec<T>,
    means: Vec<ComplexMatrix<T>>,
    kappa: T,
    dim: usize,
}

impl<T: Real> FieldTrajectory<T> {
    pub fn new(times: Vec<T>, means: Vec<ComplexMatrix<T>>, kappa: T) -> Result<Self> {
        if times.is_empty() || times.len() != means.len() {
            return Err(LoheError::InvalidArgument(format!(
                "{} times for {} field values",
                times.len(),
                means.len()
            )));
        }
        if times.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(LoheError::InvalidArgument(
                "field times must be strictly increasing".into(),
            ));
        }
        let dim = means[0].dim();
        for m in &means {
            if m.dim() != dim {
                return Err(LoheError::DimensionMismatch {
                    expected: dim,
                    found: m.dim(),
                });
            }
            let norm = m.operator_norm();
            if norm > T::one() + T::lit(1e-10) {
                return Err(LoheError::InvalidArgument(format!(
                    "field value has operator norm {norm} > 1"
                )));
            }
        }
        Ok(Self {
            times,
            means,
            kappa,
            dim,
        })
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn means(&self) -> &[ComplexMatrix<T>] {
        &self.means
    }

    pub fn kappa(&self) -> T {
        self.kappa
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Field value at a grid time; errors when `t` is not on the grid.
    pub fn at(&self, t: T) -> Result<&ComplexMatrix<T>> {
        let tol = T::lit(1e-9) * t.abs().max(T::one());
        let idx = self.times.partition_point(|&s| s < t - tol);
        match self.times.get(idx) {
            Some(&s) if (s - t).abs() <= tol => Ok(&self.means[idx]),
            _ => Err(LoheError::GridMismatch { time: t.as_f64() }),
        }
    }

    /// Constant field `m` on the given grid.
    pub fn constant(times: Vec<T>, m: ComplexMatrix<T>, kappa: T) -> Result<Self> {
        let means = vec![m; times.len()];
        Self::new(times, means, kappa)
    }
}

/// Wraps the interacting field and records the centroid it used.
struct RecordingField<T> {
    times: Vec<T>,
    means: Vec<ComplexMatrix<T>>,
}

impl<T: Real> GeneratorField<T> for RecordingField<T> {
    fn generators(
        &mut self,
        t: T,
        oscillators: &[Oscillator<T>],
        kappa: T,
    ) -> Result<Vec<SkewHermitianMatrix<T>>> {
        check_uniform_dim(oscillators)?;
        let mean = centroid(oscillators);
        let gens = oscillators
            .iter()
            .map(|o| frozen_field_generator(o, &mean, kappa))
            .collect::<Result<Vec<_>>>()?;
        self.times.push(t);
        self.means.push(mean);
        Ok(gens)
    }
}

/// Frozen-field drift: every particle sees the recorded `⟨V⟩(t)`.
pub struct FrozenField<'a, T> {
    field: &'a FieldTrajectory<T>,
}

impl<'a, T: Real> FrozenField<'a, T> {
    pub fn new(field: &'a FieldTrajectory<T>) -> Self {
        Self { field }
    }
}

impl<T: Real> GeneratorField<T> for FrozenField<'_, T> {
    fn generators(
        &mut self,
        t: T,
        oscillators: &[Oscillator<T>],
        kappa: T,
    ) -> Result<Vec<SkewHermitianMatrix<T>>> {
        let mean = self.field.at(t)?;
        oscillators
            .iter()
            .map(|o| frozen_field_generator(o, mean, kappa))
            .collect()
    }
}

/// Reference run of the interacting system together with the mean field
/// it produced.
#[derive(Clone, Debug)]
pub struct ReferenceRun<T> {
    pub field: FieldTrajectory<T>,
    pub trajectory: Trajectory<T>,
}

pub fn reference_run<T: Real>(e0: &Ensemble<T>, cfg: &StepperConfig<T>) -> Result<ReferenceRun<T>> {
    let mut rec = RecordingField {
        times: Vec::with_capacity(cfg.stage_times().len() + 1),
        means: Vec::new(),
    };
    let trajectory = integrate(e0, cfg, &mut rec)?;
    let t_final = cfg.time_of(cfg.n_steps());
    rec.times.push(t_final);
    rec.means.push(trajectory.last().centroid());
    let field = FieldTrajectory::new(rec.times, rec.means, e0.kappa())?;
    Ok(ReferenceRun { field, trajectory })
}

/// Mean field of a `P`-particle reference run, recorded at every generator
/// evaluation time and at `t_end`.
pub fn reference_field<T: Real>(
    e0: &Ensemble<T>,
    cfg: &StepperConfig<T>,
) -> Result<FieldTrajectory<T>> {
    Ok(reference_run(e0, cfg)?.field)
}

/// Characteristic flow `Φ(t, 0)` of independent particles in a frozen field.
pub fn flow_characteristics<T: Real>(
    initials: &[Oscillator<T>],
    field: &FieldTrajectory<T>,
    cfg: &StepperConfig<T>,
) -> Result<Trajectory<T>> {
    let e0 = Ensemble::new(initials.to_vec(), field.kappa())?;
    if e0.dim() != field.dim() {
        return Err(LoheError::DimensionMismatch {
            expected: field.dim(),
            found: e0.dim(),
        });
    }
    for t in cfg.stage_times() {
        field.at(t)?;
    }
    integrate(&e0, cfg, &mut FrozenField::new(field))
}

/// Interacting and characteristic trajectories from shared initial data.
#[derive(Clone, Debug)]
pub struct CoupledRun<T> {
    pub interacting: Trajectory<T>,
    pub characteristic: Trajectory<T>,
}

impl<T: Real> CoupledRun<T> {
    pub fn new(interacting: Trajectory<T>, characteristic: Trajectory<T>) -> Result<Self> {
        if interacting.times != characteristic.times {
            return Err(LoheError::InvalidArgument(
                "coupled runs must share a time grid".into(),
            ));
        }
        if interacting.first().len() != characteristic.first().len() {
            return Err(LoheError::UnequalClouds {
                left: interacting.first().len(),
                right: characteristic.first().len(),
            });
        }
        Ok(Self {
            interacting,
            characteristic,
        })
    }

    /// Runs both systems from `initials`.
    pub fn simulate(
        initials: &[Oscillator<T>],
        field: &FieldTrajectory<T>,
        cfg: &StepperConfig<T>,
    ) -> Result<Self> {
        let e0 = Ensemble::new(initials.to_vec(), field.kappa())?;
        let interacting = integrate(&e0, cfg, &mut LoheField)?;
        let characteristic = flow_characteristics(initials, field, cfg)?;
        Self::new(interacting, characteristic)
    }
}

/// `(1/N) Σ_j (‖U_j − V_j‖₂² + ‖A_j − B_j‖₂²)` for index-paired clouds.
pub fn paired_discrepancy<T: Real>(a: &[Oscillator<T>], b: &[Oscillator<T>]) -> T {
    debug_assert_eq!(a.len(), b.len());
    let total = a.iter().zip(b).fold(T::zero(), |acc, (p, q)| {
        acc + p.u.distance_sqr(&q.u) + p.a.distance_sqr(&q.a)
    });
    total / T::from_usize(a.len()).unwrap()
}

/// `J_N(t)` at every recorded time of a coupled run.
pub fn jn_series<T: Real>(run: &CoupledRun<T>) -> DiagnosticSeries<T> {
    let values = run
        .characteristic
        .snapshots
        .iter()
        .zip(&run.interacting.snapshots)
        .map(|(f, g)| paired_discrepancy(f.oscillators(), g.oscillators()))
        .collect();
    let mut series = DiagnosticSeries::new(run.interacting.times.clone());
    series
        .push_column("JN", values)
        .expect("one J_N value per recorded time");
    series
}

/// Left translation `U ↦ exp(−t·a0) U` of every snapshot. The result carries
/// zero generators: it is a trajectory of the Hamiltonian-free dynamics.
pub fn gauge_transform<T: Real>(
    traj: &Trajectory<T>,
    a0: &SkewHermitianMatrix<T>,
) -> Result<Trajectory<T>> {
    let tol = T::lit(T::SKEW_TOL) * (T::one() + a0.frobenius_norm());
    let mut snapshots = Vec::with_capacity(traj.len());
    for (t, e) in traj.iter() {
        if e.oscillators().iter().any(|o| o.a.distance(a0) > tol) {
            return Err(LoheError::UnequalHamiltonians);
        }
        let back = expm_skew(a0, -t)?;
        let oscs = e
            .oscillators()
            .iter()
            .map(|o| Oscillator::at_rest(back.compose(&o.u)))
            .collect();
        snapshots.push(Ensemble::new(oscs, e.kappa())?);
    }
    Ok(Trajectory {
        times: traj.times.clone(),
        snapshots,
    })
}

/// Monte-Carlo estimate of `E‖(1/N) Σ_k 𝒱(U_k)‖₂²` under the Haar law.
#[derive(Clone, Debug, PartialEq)]
pub struct FluctuationEstimate {
    pub d: usize,
    pub n: usize,
    pub samples: usize,
    pub estimate: f64,
    pub std_error: f64,
    /// `16d/N`.
    pub bound: f64,
    /// Largest `‖𝒱(U_k)‖₂` seen; never above `4√d`.
    pub max_term_norm: f64,
}

/// Field fluctuation for i.i.d. Haar particles.
///
/// With `𝒱(U_k) = ∫ K(Û, U₁) ρ(dÛ) − K(U_k, U₁)` and `ρ` the Haar measure,
/// the integral is `E[Û]U₁* − U₁E[Û]*`, which vanishes because the Haar
/// first moment is zero. Each sample draws `U₁, …, U_N` and evaluates the
/// squared norm of the average.
pub fn field_fluctuation_bound_check(
    rng: &mut Rng,
    d: usize,
    n: usize,
    samples: usize,
) -> Result<FluctuationEstimate> {
    if n == 0 || d == 0 || samples < 2 {
        return Err(LoheError::InvalidArgument(
            "need d ≥ 1, N ≥ 1 and at least two samples".into(),
        ));
    }
    let mut values = Vec::with_capacity(samples);
    let mut max_term = 0.0f64;
    for _ in 0..samples {
        let us: Vec<_> = (0..n).map(|_| sample_haar::<f64>(rng, d)).collect();
        let mut acc = ComplexMatrix::<f64>::zeros(d);
        for uk in &us {
            let term = -coupling_kernel(uk, &us[0])?.into_inner();
            max_term = max_term.max(term.frobenius_norm());
            acc += &term;
        }
        values.push(acc.scale(1.0 / n as f64).frobenius_norm_sqr());
    }
    let m = samples as f64;
    let mean = values.iter().sum::<f64>() / m;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0);
    Ok(FluctuationEstimate {
        d,
        n,
        samples,
        estimate: mean,
        std_error: (var / m).sqrt(),
        bound: 16.0 * d as f64 / n as f64,
        max_term_norm: max_term,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrate::Method;
    use crate::matcore::sample_gaussian_su;

    fn initials(seed: u64, n: usize, d: usize) -> Vec<Oscillator<f64>> {
        let mut rng = Rng::new(seed);
        (0..n)
            .map(|_| Oscillator::new(sample_haar(&mut rng, d), sample_gaussian_su(&mut rng, d, 1.0)).unwrap())
            .collect()
    }

    #[test]
    fn field_lookup_off_grid_fails() {
        let f = FieldTrajectory::constant(vec![0.0, 0.5, 1.0], ComplexMatrix::zeros(2), 1.0).unwrap();
        assert!(f.at(0.5).is_ok());
        assert!(matches!(f.at(0.25), Err(LoheError::GridMismatch { .. })));
    }

    #[test]
    fn field_rejects_large_mean() {
        let r = FieldTrajectory::constant(vec![0.0], ComplexMatrix::<f64>::identity(2).scale(1.5), 1.0);
        assert!(r.is_err());
    }

    #[test]
    fn single_particle_field_is_its_state() {
        let init = initials(1, 1, 2);
        let e = Ensemble::new(init, 1.0).unwrap();
        let cfg = StepperConfig::new(Method::Cf2, 0.01, 0.1, 1).unwrap();
        let run = reference_run(&e, &cfg).unwrap();
        for (t, snap) in run.trajectory.iter() {
            let m = run.field.at(t).unwrap();
            assert!(m.distance(&snap.oscillators()[0].u) < 1e-15);
        }
    }

    #[test]
    fn characteristics_on_coarser_subgrid() {
        let e = Ensemble::new(initials(2, 4, 2), 1.0).unwrap();
        let fine = StepperConfig::new(Method::LieEuler, 0.01, 0.2, 1).unwrap();
        let field = reference_field(&e, &fine).unwrap();
        let coarse = StepperConfig::new(Method::LieEuler, 0.02, 0.2, 1).unwrap();
        assert!(flow_characteristics(e.oscillators(), &field, &coarse).is_ok());
        let off = StepperConfig::new(Method::LieEuler, 0.015, 0.15, 1).unwrap();
        assert!(matches!(
            flow_characteristics(e.oscillators(), &field, &off),
            Err(LoheError::GridMismatch { .. })
        ));
    }

    #[test]
    fn jn_of_identical_runs_vanishes() {
        let e = Ensemble::new(initials(3, 5, 2), 1.0).unwrap();
        let cfg = StepperConfig::new(Method::Cf2, 0.01, 0.1, 2).unwrap();
        let traj = integrate(&e, &cfg, &mut LoheField).unwrap();
        let run = CoupledRun::new(traj.clone(), traj).unwrap();
        assert!(jn_series(&run).column("JN").unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn gauge_rejects_mixed_generators() {
        let e = Ensemble::new(initials(4, 3, 2), 1.0).unwrap();
        let cfg = StepperConfig::new(Method::Cf2, 0.01, 0.02, 1).unwrap();
        let traj = integrate(&e, &cfg, &mut LoheField).unwrap();
        let a0 = e.oscillators()[0].a.clone();
        assert_eq!(gauge_transform(&traj, &a0).unwrap_err(), LoheError::UnequalHamiltonians);
    }

    #[test]
    fn gauge_with_zero_generator_is_identity() {
        let mut rng = Rng::new(5);
        let oscs = (0..3)
            .map(|_| Oscillator::at_rest(sample_haar::<f64>(&mut rng, 2)))
            .collect();
        let e = Ensemble::new(oscs, 1.0).unwrap();
        let cfg = StepperConfig::new(Method::Cf2, 0.01, 0.05, 1).unwrap();
        let traj = integrate(&e, &cfg, &mut LoheField).unwrap();
        let g = gauge_transform(&traj, &SkewHermitianMatrix::zeros(2)).unwrap();
        assert_eq!(g, traj);
    }

    #[test]
    fn fluctuation_terms_are_bounded() {
        let mut rng = Rng::new(6);
        let est = field_fluctuation_bound_check(&mut rng, 2, 10, 50).unwrap();
        assert!(est.max_term_norm <= 4.0 * 2f64.sqrt());
        assert_eq!(est.bound, 3.2);
    }
}
