//! Fixed-step Lie-group integrators for `U̇_j = 𝒜_j U_j`.
//!
//! Each update is a left multiplication by `exp(h·𝒜_j)` with a
//! skew-Hermitian `𝒜_j`, so the states stay on U(d) up to roundoff.
//! `Cf2` is the exponential midpoint rule: the generators are re-evaluated
//! on a Lie–Euler half step and the full step uses those frozen values.

use crate::error::{LoheError, Result};
use crate::matcore::{expm_skew, retract_unitary, SkewHermitianMatrix, UnitaryMatrix};
use crate::model::{lohe_generators_of, Ensemble, Oscillator};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    LieEuler,
    Cf2,
}

impl Method {
    /// Offsets, in units of `dt`, at which generators are evaluated.
    pub fn stage_offsets(self) -> &'static [f64] {
        match self {
            Method::LieEuler => &[0.0],
            Method::Cf2 => &[0.0, 0.5],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepperConfig<T> {
    pub method: Method,
    pub dt: T,
    pub t_end: T,
    pub record_every: usize,
    pub retract_every: usize,
}

pub const DEFAULT_RETRACT_EVERY: usize = 64;

impl<T: Real> StepperConfig<T> {
    pub fn new(method: Method, dt: T, t_end: T, record_every: usize) -> Result<Self> {
        let cfg = Self {
            method,
            dt,
            t_end,
            record_every,
            retract_every: DEFAULT_RETRACT_EVERY,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_retract_every(mut self, retract_every: usize) -> Result<Self> {
        self.retract_every = retract_every;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(LoheError::InvalidArgument(msg));
        if !(self.dt > T::zero()) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.t_end > T::zero()) {
            return bad(format!("t_end must be positive, got {}", self.t_end));
        }
        if self.dt > self.t_end * (T::one() + T::epsilon() * T::lit(16.0)) {
            return bad(format!("dt = {} exceeds t_end = {}", self.dt, self.t_end));
        }
        if self.record_every == 0 || self.retract_every == 0 {
            return bad("record_every and retract_every must be at least 1".into());
        }
        let steps = (self.t_end / self.dt).round();
        if (steps * self.dt - self.t_end).abs() > T::lit(1e-9) * self.t_end.max(T::one()) {
            return bad(format!(
                "t_end = {} is not an integer multiple of dt = {}",
                self.t_end, self.dt
            ));
        }
        Ok(())
    }

    pub fn n_steps(&self) -> usize {
        (self.t_end / self.dt).round().to_usize().unwrap()
    }

    /// Time of step index `n`, computed as `n·dt` to keep grids comparable.
    pub fn time_of(&self, n: usize) -> T {
        T::from_usize(n).unwrap() * self.dt
    }

    /// Every time at which a generator is evaluated, in order.
    pub fn stage_times(&self) -> Vec<T> {
        let offsets = self.method.stage_offsets();
        let mut out = Vec::with_capacity(self.n_steps() * offsets.len());
        for n in 0..self.n_steps() {
            for &o in offsets {
                out.push((T::from_usize(n).unwrap() + T::lit(o)) * self.dt);
            }
        }
        out
    }

    /// Step indices at which snapshots are stored: 0, every
    /// `record_every`, and the last step.
    pub fn record_steps(&self) -> Vec<usize> {
        let n = self.n_steps();
        let mut steps: Vec<usize> = (0..=n).step_by(self.record_every).collect();
        if *steps.last().unwrap() != n {
            steps.push(n);
        }
        steps
    }
}

/// Source of the generators `𝒜_j` driving each oscillator.
pub trait GeneratorField<T: Real> {
    fn generators(
        &mut self,
        t: T,
        oscillators: &[Oscillator<T>],
        kappa: T,
    ) -> Result<Vec<SkewHermitianMatrix<T>>>;
}

impl<T, F> GeneratorField<T> for F
where
    T: Real,
    F: FnMut(T, &[Oscillator<T>], T) -> Result<Vec<SkewHermitianMatrix<T>>>,
{
    fn generators(
        &mut self,
        t: T,
        oscillators: &[Oscillator<T>],
        kappa: T,
    ) -> Result<Vec<SkewHermitianMatrix<T>>> {
        self(t, oscillators, kappa)
    }
}

/// The interacting Lohe system (centroid coupling).
#[derive(Clone, Copy, Debug, Default)]
pub struct LoheField;

impl<T: Real> GeneratorField<T> for LoheField {
    fn generators(
        &mut self,
        _t: T,
        oscillators: &[Oscillator<T>],
        kappa: T,
    ) -> Result<Vec<SkewHermitianMatrix<T>>> {
        lohe_generators_of(oscillators, kappa)
    }
}

fn advance<T: Real>(
    e: &Ensemble<T>,
    generators: &[SkewHermitianMatrix<T>],
    h: T,
) -> Result<Ensemble<T>> {
    if generators.len() != e.len() {
        return Err(LoheError::InvalidArgument(format!(
            "{} generators for {} oscillators",
            generators.len(),
            e.len()
        )));
    }
    let states = e
        .oscillators()
        .iter()
        .zip(generators)
        .map(|(o, g)| Ok(expm_skew(g, h)?.compose(&o.u)))
        .collect::<Result<Vec<UnitaryMatrix<T>>>>()?;
    Ok(e.with_states(states))
}

/// One step of size `dt` (negative `dt` integrates backwards) from time `t`.
pub fn step<T: Real, F: GeneratorField<T> + ?Sized>(
    e: &Ensemble<T>,
    t: T,
    dt: T,
    method: Method,
    field: &mut F,
) -> Result<Ensemble<T>> {
    let g0 = field.generators(t, e.oscillators(), e.kappa())?;
    match method {
        Method::LieEuler => advance(e, &g0, dt),
        Method::Cf2 => {
            let half_dt = dt * T::lit(0.5);
            let half = advance(e, &g0, half_dt)?;
            let g1 = field.generators(t + half_dt, half.oscillators(), e.kappa())?;
            advance(e, &g1, dt)
        }
    }
}

/// Time-ordered snapshots of an ensemble.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory<T> {
    pub times: Vec<T>,
    pub snapshots: Vec<Ensemble<T>>,
}

impl<T: Real> Trajectory<T> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn first(&self) -> &Ensemble<T> {
        &self.snapshots[0]
    }

    pub fn last(&self) -> &Ensemble<T> {
        self.snapshots.last().expect("trajectory is never empty")
    }

    pub fn iter(&self) -> impl Iterator<Item = (T, &Ensemble<T>)> {
        self.times.iter().copied().zip(self.snapshots.iter())
    }

    /// Largest `‖U*U − I‖₂` over every recorded state.
    pub fn max_unitarity_defect(&self) -> T {
        self.snapshots
            .iter()
            .flat_map(|e| e.oscillators().iter())
            .fold(T::zero(), |acc, o| acc.max(o.u.unitarity_defect()))
    }
}

fn max_defect<T: Real>(e: &Ensemble<T>) -> T {
    e.oscillators()
        .iter()
        .fold(T::zero(), |acc, o| acc.max(o.u.unitarity_defect()))
}

fn retract_all<T: Real>(e: &Ensemble<T>) -> Result<Ensemble<T>> {
    let states = e
        .oscillators()
        .iter()
        .map(|o| retract_unitary(&o.u))
        .collect::<Result<Vec<_>>>()?;
    Ok(e.with_states(states))
}

fn guard_drift<T: Real>(e: &Ensemble<T>, t: T) -> Result<()> {
    let drift = max_defect(e);
    if !(drift <= T::lit(T::DRIFT_ABORT_TOL)) {
        return Err(LoheError::UnitarityDrift {
            drift: drift.as_f64(),
            time: t.as_f64(),
        });
    }
    Ok(())
}

/// Integrates from `t = 0` to `cfg.t_end`, retracting every
/// `cfg.retract_every` steps and recording at [`StepperConfig::record_steps`].
pub fn integrate<T: Real, F: GeneratorField<T> + ?Sized>(
    e0: &Ensemble<T>,
    cfg: &StepperConfig<T>,
    field: &mut F,
) -> Result<Trajectory<T>> {
    cfg.validate()?;
    let n_steps = cfg.n_steps();
    let records = cfg.record_steps();
    let mut next_record = 1;
    let mut traj = Trajectory {
        times: vec![T::zero()],
        snapshots: vec![e0.clone()],
    };
    let mut state = e0.clone();
    for n in 0..n_steps {
        let t = cfg.time_of(n);
        state = step(&state, t, cfg.dt, cfg.method, field)?;
        let t_next = cfg.time_of(n + 1);
        if (n + 1) % cfg.retract_every == 0 {
            guard_drift(&state, t_next)?;
            state = retract_all(&state)?;
        }
        if next_record < records.len() && records[next_record] == n + 1 {
            guard_drift(&state, t_next)?;
            traj.times.push(t_next);
            traj.snapshots.push(state.clone());
            next_record += 1;
        }
    }
    Ok(traj)
}

/// Identical-Hamiltonian solve through the rotation/coupling splitting:
/// the coupling-only system is integrated numerically, then every state is
/// rotated by the exact free flow `exp(t_end·A)`.
pub fn split_integrate<T: Real>(e0: &Ensemble<T>, cfg: &StepperConfig<T>) -> Result<Ensemble<T>> {
    let common = common_generator(e0)?;
    let d = e0.dim();
    let coupling_only = Ensemble::new(
        e0.oscillators()
            .iter()
            .map(|o| Oscillator::at_rest(o.u.clone()))
            .collect(),
        e0.kappa(),
    )?;
    let w = integrate(&coupling_only, cfg, &mut LoheField)?;
    let rotation = expm_skew(&common, cfg.time_of(cfg.n_steps()))?;
    let states = w
        .last()
        .oscillators()
        .iter()
        .map(|o| rotation.compose(&o.u))
        .collect();
    debug_assert_eq!(rotation.dim(), d);
    Ok(e0.with_states(states))
}

/// The generator shared by every oscillator, or an error if they differ.
pub fn common_generator<T: Real>(e: &Ensemble<T>) -> Result<SkewHermitianMatrix<T>> {
    let first = &e.oscillators()[0].a;
    let tol = T::lit(T::SKEW_TOL) * (T::one() + first.frobenius_norm());
    if e
        .oscillators()
        .iter()
        .any(|o| o.a.distance(first) > tol)
    {
        return Err(LoheError::UnequalHamiltonians);
    }
    Ok(first.clone())
}
