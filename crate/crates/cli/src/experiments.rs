//! The verification experiments behind each subcommand.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};

use lohe_core::analysis::{
    barrier_ode, critical_radius, diameter, frequency_spread, lambda_functional,
    practical_sync_limit, practical_sync_threshold, sync_envelopes, thm31_bound, zeta_roots,
};
use lohe_core::integrate::{integrate, split_integrate, LoheField};
use lohe_core::matcore::{sample_gaussian_su, sample_haar};
use lohe_core::meanfield::{
    field_fluctuation_bound_check, gauge_transform, jn_series, reference_field, CoupledRun,
};
use lohe_core::model::{
    kuramoto_rhs, lohe_d1_phase, pauli_compose, swarm_state_of, swarming_rhs, KuramotoState,
    SwarmState,
};
use lohe_core::transport::{assignment_solve, CostMatrix, Exponent, PointCloud};
use lohe_core::{Ensemble, Oscillator, Rng, Trajectory};

use crate::config::{HamiltonianMode, ScenarioConfig};
use crate::init::initial_oscillators;
use crate::report::{Cell, CsvReport};
use crate::CliError;

/// Envelope containment slack on `D(t)²`.
pub const ENVELOPE_TOL: f64 = 1e-3;
/// Barrier domination slack on `D(t)`.
pub const BARRIER_TOL: f64 = 1e-4;
/// Slack on `dist_MK,2² ≤ J_N`.
pub const JN_MK2_TOL: f64 = 1e-10;
/// Relative slack, in units of `α/κ`, on the practical-synchronization level.
pub const PRACTICAL_SLACK: f64 = 0.05;
/// Trajectory agreement required of each reduction check.
pub const REDUCTION_TOL: f64 = 1e-6;
/// Largest accepted `‖U*U − I‖₂` on recorded states.
pub const UNITARITY_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// Output of one subcommand.
#[derive(Clone, Debug)]
pub struct Experiment {
    /// File stem of the CSV.
    pub name: &'static str,
    pub report: CsvReport,
    pub checks: Vec<Check>,
    pub summary: Map<String, Value>,
}

impl Experiment {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn cloud(e: &Ensemble<f64>) -> PointCloud<f64> {
    PointCloud::from(e)
}

fn config_error(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let m = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / m;
    let my = ly.iter().sum::<f64>() / m;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

fn max_unitarity_defect(traj: &Trajectory<f64>) -> f64 {
    traj.max_unitarity_defect()
}

/// Integrates one scenario and records `D`, `Λ` and, where the hypotheses
/// hold, the envelope or barrier curves they are checked against.
pub fn run_simulate(cfg: &ScenarioConfig) -> Result<Experiment, CliError> {
    let oscs = initial_oscillators(cfg, cfg.n, &Rng::new(cfg.seed).derive(0))?;
    let e0 = Ensemble::new(oscs, cfg.kappa)?;
    let stepper = cfg.stepper(cfg.t_end)?;
    let traj = integrate(&e0, &stepper, &mut LoheField)?;

    let times = traj.times.clone();
    let ds: Vec<f64> = traj.snapshots.iter().map(|e| diameter(&cloud(e))).collect();
    let lambdas: Vec<f64> = traj
        .snapshots
        .iter()
        .map(|e| lambda_functional(&cloud(e)))
        .collect();
    let d0 = ds[0];
    let alpha = frequency_spread(&cloud(&e0));

    let mut header = vec!["t", "D", "Lambda"];
    let mut extra: Vec<Vec<f64>> = Vec::new();
    let mut checks = Vec::new();
    let mut summary = Map::new();
    summary.insert("d0".into(), json!(d0));
    summary.insert("alpha".into(), json!(alpha));

    let defect = max_unitarity_defect(&traj);
    summary.insert("max_unitarity_defect".into(), json!(defect));
    checks.push(Check::new(
        "unitarity",
        defect <= UNITARITY_TOL,
        format!("max ‖U*U − I‖₂ = {defect:e}"),
    ));

    match cfg.hamiltonian_mode {
        HamiltonianMode::Zero | HamiltonianMode::Identical => {
            if d0 < std::f64::consts::SQRT_2 {
                let mut lower = Vec::with_capacity(times.len());
                let mut upper = Vec::with_capacity(times.len());
                for &t in &times {
                    let (lo, hi) = sync_envelopes(d0, cfg.kappa, t)?;
                    lower.push(lo);
                    upper.push(hi);
                }
                let worst = ds
                    .iter()
                    .zip(lower.iter().zip(&upper))
                    .map(|(d, (lo, hi))| (lo - d * d).max(d * d - hi))
                    .fold(f64::NEG_INFINITY, f64::max);
                checks.push(Check::new(
                    "envelope_containment",
                    worst <= ENVELOPE_TOL,
                    format!("largest excursion outside the envelopes {worst:e}"),
                ));
                header.extend(["env_lower", "env_upper"]);
                extra.push(lower);
                extra.push(upper);
            } else {
                summary.insert(
                    "envelope".into(),
                    json!("not applicable: measured D(0) is not below sqrt(2)"),
                );
            }
        }
        HamiltonianMode::Gaussian { .. } => {
            let in_regime = cfg.kappa > 0.0
                && zeta_roots(alpha / cfg.kappa).is_ok_and(|r| d0 < r.zeta2);
            if in_regime {
                let barrier = barrier_ode(alpha, cfg.kappa, d0, &times)?;
                let worst = ds
                    .iter()
                    .zip(&barrier.y)
                    .map(|(d, y)| d - y)
                    .fold(f64::NEG_INFINITY, f64::max);
                checks.push(Check::new(
                    "barrier_domination",
                    worst <= BARRIER_TOL,
                    format!("max D(t) − y(t) = {worst:e}"),
                ));
                if let Some(tc) = barrier.first_crossing {
                    let after = times
                        .iter()
                        .zip(&ds)
                        .filter(|(t, _)| **t >= tc)
                        .map(|(_, d)| *d)
                        .fold(0.0, f64::max);
                    checks.push(Check::new(
                        "barrier_trapping",
                        after <= critical_radius::<f64>() + BARRIER_TOL,
                        format!("max D(t) after t = {tc} is {after:e}"),
                    ));
                }
                summary.insert("barrier_first_crossing".into(), json!(barrier.first_crossing));
                header.push("barrier_y");
                extra.push(barrier.y);
            } else {
                summary.insert(
                    "barrier".into(),
                    json!("not applicable: outside the barrier regime"),
                );
            }
        }
    }

    let mut report = CsvReport::new(header);
    for k in 0..times.len() {
        let mut row: Vec<Cell> = vec![times[k].into(), ds[k].into(), lambdas[k].into()];
        row.extend(extra.iter().map(|col| Cell::Real(col[k])));
        report.push_row(row);
    }
    Ok(Experiment {
        name: "simulate",
        report,
        checks,
        summary,
    })
}

/// `J_N(t)` and `dist_MK,2²(t)` of one realization at one particle count.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceSample {
    pub n: usize,
    pub times: Vec<f64>,
    pub jn: Vec<f64>,
    pub mk2_sq: Vec<f64>,
}

/// Minimum mean squared pair cost, i.e. `dist_MK,2²`.
pub fn mk2_squared(a: &Ensemble<f64>, b: &Ensemble<f64>) -> Result<f64, CliError> {
    let costs = CostMatrix::between(&cloud(a), &cloud(b), Exponent::Two)?;
    Ok(assignment_solve(&costs).total / a.len() as f64)
}

/// One repetition: a reference field from `p` particles, then a coupled
/// run for every `N` from initial data independent of the reference.
pub fn convergence_repetition(
    cfg: &ScenarioConfig,
    n_list: &[usize],
    p: usize,
    repetition: usize,
) -> Result<Vec<ConvergenceSample>, CliError> {
    let rng = Rng::new(cfg.seed).derive(repetition as u64);
    let stepper = cfg.stepper(cfg.t_end)?;
    let reference = Ensemble::new(initial_oscillators(cfg, p, &rng.derive(0))?, cfg.kappa)?;
    let field = reference_field(&reference, &stepper)?;
    n_list
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let initials = initial_oscillators(cfg, n, &rng.derive(1 + i as u64))?;
            let run = CoupledRun::simulate(&initials, &field, &stepper)?;
            let jn = jn_series(&run).column("JN").expect("JN column").to_vec();
            let mk2_sq = run
                .interacting
                .snapshots
                .iter()
                .zip(&run.characteristic.snapshots)
                .map(|(a, b)| mk2_squared(a, b))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(ConvergenceSample {
                n,
                times: run.interacting.times.clone(),
                jn,
                mk2_sq,
            })
        })
        .collect()
}

/// Mean-field convergence study over `n_list`.
pub fn run_converge(cfg: &ScenarioConfig) -> Result<Experiment, CliError> {
    let n_list = cfg
        .n_list
        .clone()
        .ok_or_else(|| config_error("n_list: required by converge"))?;
    if cfg.alpha.is_some() {
        return Err(config_error("alpha: not supported by converge"));
    }
    let n_max = *n_list.last().unwrap();
    let p = cfg.p_reference.unwrap_or(8 * n_max);
    if p < 8 * n_max {
        return Err(config_error(format!(
            "p_reference: must be at least 8·max(n_list) = {}",
            8 * n_max
        )));
    }
    let reps: Vec<Vec<ConvergenceSample>> = (0..cfg.repetitions)
        .into_par_iter()
        .map(|r| convergence_repetition(cfg, &n_list, p, r))
        .collect::<Result<_, _>>()?;

    let mut report = CsvReport::new(["N", "t", "JN_mean", "thm31_bound", "mk2_sq"]);
    let mut bound_violations = 0usize;
    let mut order_violations = 0usize;
    let mut worst_order = f64::NEG_INFINITY;
    let mut final_means = Vec::with_capacity(n_list.len());
    let m = cfg.repetitions as f64;
    for (i, &n) in n_list.iter().enumerate() {
        let times = &reps[0][i].times;
        for (k, &t) in times.iter().enumerate() {
            let bound = thm31_bound(cfg.d, n, t);
            let mut jn_sum = 0.0;
            let mut mk_sum = 0.0;
            for rep in &reps {
                let s = &rep[i];
                jn_sum += s.jn[k];
                mk_sum += s.mk2_sq[k];
                if !(s.jn[k] <= bound) {
                    bound_violations += 1;
                }
                worst_order = worst_order.max(s.mk2_sq[k] - s.jn[k]);
                if !(s.mk2_sq[k] <= s.jn[k] + JN_MK2_TOL) {
                    order_violations += 1;
                }
            }
            let jn_mean = jn_sum / m;
            if k + 1 == times.len() {
                final_means.push(jn_mean);
            }
            report.push_row(vec![
                n.into(),
                t.into(),
                jn_mean.into(),
                bound.into(),
                (mk_sum / m).into(),
            ]);
        }
    }

    let mut summary = Map::new();
    summary.insert("p_reference".into(), json!(p));
    summary.insert("jn_final_mean".into(), json!(final_means));
    if n_list.len() >= 2 {
        let ns: Vec<f64> = n_list.iter().map(|&n| n as f64).collect();
        summary.insert("jn_loglog_slope".into(), json!(loglog_slope(&ns, &final_means)));
    }
    let checks = vec![
        Check::new(
            "thm31_bound",
            bound_violations == 0,
            format!("{bound_violations} realization-times above (8d/5N)(e^(10t) − 1)"),
        ),
        Check::new(
            "jn_dominates_mk2",
            order_violations == 0,
            format!("max dist_MK,2² − J_N = {worst_order:e}"),
        ),
    ];
    Ok(Experiment {
        name: "converge",
        report,
        checks,
        summary,
    })
}

/// First barrier crossing below `√(2/3)`, searched on growing horizons.
pub fn barrier_crossing_time(alpha: f64, kappa: f64, d0: f64) -> Result<f64, CliError> {
    let mut horizon = 1.0;
    for _ in 0..40 {
        let grid: Vec<f64> = (0..=2000).map(|k| horizon * k as f64 / 2000.0).collect();
        if let Some(t) = barrier_ode(alpha, kappa, d0, &grid)?.first_crossing {
            return Ok(t);
        }
        horizon *= 2.0;
    }
    Err(CliError::Model(lohe_core::LoheError::OutsideBarrierRegime(
        "barrier never crosses sqrt(2/3)".into(),
    )))
}

/// One κ of the practical-synchronization sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct PracticalPoint {
    pub kappa: f64,
    pub t_end: f64,
    pub crossing: f64,
    pub lambda_final: f64,
    pub limit: f64,
}

/// Terminal `Λ` for each coupling strength, from one shared initial cloud.
pub fn run_practical_sync(cfg: &ScenarioConfig) -> Result<Experiment, CliError> {
    let kappas = cfg
        .kappa_list
        .clone()
        .ok_or_else(|| config_error("kappa_list: required by practical-sync"))?;
    if !matches!(cfg.hamiltonian_mode, HamiltonianMode::Gaussian { .. }) {
        return Err(config_error(
            "hamiltonian_mode: practical-sync needs gaussian generators",
        ));
    }
    let oscs = initial_oscillators(cfg, cfg.n, &Rng::new(cfg.seed).derive(0))?;
    let initial = PointCloud::new(oscs.clone())?;
    let alpha = frequency_spread(&initial);
    let d0 = diameter(&initial);

    // every precondition is checked before any integration starts
    let mut plans = Vec::with_capacity(kappas.len());
    for &kappa in &kappas {
        let limit = practical_sync_limit(alpha, kappa).map_err(|e| config_error(format!("kappa_list: {e}")))?;
        let roots = zeta_roots(alpha / kappa).map_err(|e| config_error(format!("kappa_list: {e}")))?;
        if !(d0 < roots.zeta2) {
            return Err(config_error(format!(
                "init_mode: measured D(0) = {d0} is not below zeta2(alpha/kappa) = {} for kappa = {kappa}",
                roots.zeta2
            )));
        }
        let crossing = barrier_crossing_time(alpha, kappa, d0)?;
        let steps = (cfg.t_end.max(5.0 * crossing) / cfg.dt).ceil();
        plans.push((kappa, limit, crossing, steps * cfg.dt));
    }

    let points: Vec<PracticalPoint> = plans
        .par_iter()
        .map(|&(kappa, limit, crossing, t_end)| {
            let e0 = Ensemble::new(oscs.clone(), kappa)?;
            let stepper = cfg.stepper(t_end)?;
            let traj = integrate(&e0, &stepper, &mut LoheField)?;
            Ok(PracticalPoint {
                kappa,
                t_end,
                crossing,
                lambda_final: lambda_functional(&cloud(traj.last())),
                limit,
            })
        })
        .collect::<Result<_, CliError>>()?;

    let mut report = CsvReport::new([
        "kappa",
        "alpha",
        "lambda_final",
        "sqrt_lambda_final",
        "limit_3a_over_2k",
    ]);
    let mut checks = Vec::new();
    for p in &points {
        let root = p.lambda_final.sqrt();
        report.push_row(vec![
            p.kappa.into(),
            alpha.into(),
            p.lambda_final.into(),
            root.into(),
            p.limit.into(),
        ]);
        let level = p.limit + PRACTICAL_SLACK * alpha / p.kappa;
        checks.push(Check::new(
            format!("practical_level_kappa_{}", p.kappa),
            root <= level,
            format!("sqrt(Lambda) = {root:e}, level {level:e}"),
        ));
    }
    let mut by_kappa: Vec<&PracticalPoint> = points.iter().collect();
    by_kappa.sort_by(|a, b| a.kappa.total_cmp(&b.kappa));
    let decreasing = by_kappa
        .windows(2)
        .all(|w| w[1].lambda_final.sqrt() < w[0].lambda_final.sqrt());
    checks.push(Check::new(
        "practical_monotone",
        decreasing,
        "terminal sqrt(Lambda) strictly decreasing in kappa",
    ));

    let mut summary = Map::new();
    summary.insert("alpha".into(), json!(alpha));
    summary.insert("d0".into(), json!(d0));
    summary.insert("threshold_kappa".into(), json!(practical_sync_threshold(alpha)));
    summary.insert(
        "runs".into(),
        json!(points
            .iter()
            .map(|p| json!({"kappa": p.kappa, "t_end": p.t_end, "barrier_first_crossing": p.crossing}))
            .collect::<Vec<_>>()),
    );
    Ok(Experiment {
        name: "practical_sync",
        report,
        checks,
        summary,
    })
}

/// Substeps of the RK4 oracles per integrator step.
const ORACLE_SUBSTEPS: usize = 10;

fn rk4_step(y: &[f64], h: f64, f: &impl Fn(&[f64]) -> Vec<f64>) -> Vec<f64> {
    let shift = |k: &[f64], s: f64| -> Vec<f64> { y.iter().zip(k).map(|(a, b)| a + s * b).collect() };
    let k1 = f(y);
    let k2 = f(&shift(&k1, 0.5 * h));
    let k3 = f(&shift(&k2, 0.5 * h));
    let k4 = f(&shift(&k3, h));
    y.iter()
        .enumerate()
        .map(|(i, a)| a + h / 6.0 * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]))
        .collect()
}

/// Classical RK4 on `[0, times.last()]` with `ORACLE_SUBSTEPS` substeps per
/// `dt`, sampled at `times` (each a multiple of `dt`).
fn rk4_sampled(
    y0: Vec<f64>,
    dt: f64,
    times: &[f64],
    f: impl Fn(&[f64]) -> Vec<f64>,
) -> Vec<Vec<f64>> {
    let h = dt / ORACLE_SUBSTEPS as f64;
    let mut y = y0;
    let mut steps_done = 0usize;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        let target = (t / dt).round() as usize;
        while steps_done < target {
            for _ in 0..ORACLE_SUBSTEPS {
                y = rk4_step(&y, h, &f);
            }
            steps_done += 1;
        }
        out.push(y.clone());
    }
    out
}

fn wrapped_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(std::f64::consts::TAU);
    d.min(std::f64::consts::TAU - d)
}

/// Largest phase gap between the d = 1 Lohe run and an RK4 integration of
/// the Kuramoto model from the same data.
pub fn kuramoto_equivalence(cfg: &ScenarioConfig, rng: &mut Rng) -> Result<f64, CliError> {
    let thetas: Vec<f64> = (0..cfg.n).map(|_| std::f64::consts::TAU * rng.uniform()).collect();
    let nus: Vec<f64> = (0..cfg.n).map(|_| rng.normal()).collect();
    let state = KuramotoState::new(thetas.clone(), nus.clone(), cfg.kappa)?;
    let traj = integrate(&state.to_ensemble(), &cfg.stepper(cfg.t_end)?, &mut LoheField)?;
    let oracle = rk4_sampled(thetas, cfg.dt, &traj.times, |th| {
        kuramoto_rhs(&KuramotoState {
            thetas: th.to_vec(),
            nus: nus.clone(),
            kappa: cfg.kappa,
        })
    });
    let mut worst: f64 = 0.0;
    for (e, th) in traj.snapshots.iter().zip(&oracle) {
        let (phases, _) = lohe_d1_phase(e)?;
        for (a, b) in phases.iter().zip(th) {
            worst = worst.max(wrapped_gap(*a, *b));
        }
    }
    Ok(worst)
}

fn pack_swarm(s: &SwarmState<f64>) -> Vec<f64> {
    let mut y = Vec::with_capacity(5 * s.xs.len());
    for (x, th) in s.xs.iter().zip(&s.thetas) {
        y.extend_from_slice(x);
        y.push(*th);
    }
    y
}

fn unpack_swarm(y: &[f64], template: &SwarmState<f64>) -> SwarmState<f64> {
    let mut s = template.clone();
    for (j, chunk) in y.chunks_exact(5).enumerate() {
        s.xs[j] = [chunk[0], chunk[1], chunk[2], chunk[3]];
        s.thetas[j] = chunk[4];
    }
    s
}

/// `(norm drift, trajectory gap)` between an RK4 integration of the
/// augmented swarming system and the d = 2 Lohe run it reduces from.
pub fn swarming_checks(cfg: &ScenarioConfig, rng: &mut Rng) -> Result<(f64, f64), CliError> {
    let oscs: Vec<Oscillator<f64>> = (0..cfg.n)
        .map(|_| Oscillator {
            u: sample_haar(rng, 2),
            a: sample_gaussian_su(rng, 2, 1.0),
        })
        .collect();
    let e0 = Ensemble::new(oscs, cfg.kappa)?;
    let traj = integrate(&e0, &cfg.stepper(cfg.t_end)?, &mut LoheField)?;
    let template = swarm_state_of(&e0)?;
    let oracle = rk4_sampled(pack_swarm(&template), cfg.dt, &traj.times, |y| {
        let v = swarming_rhs(&unpack_swarm(y, &template)).expect("nonzero swarm vectors");
        let mut out = Vec::with_capacity(y.len());
        for (dx, dth) in v.dx.iter().zip(&v.dtheta) {
            out.extend_from_slice(dx);
            out.push(*dth);
        }
        out
    });
    let mut norm_drift: f64 = 0.0;
    let mut gap: f64 = 0.0;
    for (e, y) in traj.snapshots.iter().zip(&oracle) {
        let s = unpack_swarm(y, &template);
        for (j, o) in e.oscillators().iter().enumerate() {
            let x = &s.xs[j];
            let norm = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3]).sqrt();
            norm_drift = norm_drift.max((norm - 1.0).abs());
            gap = gap.max(pauli_compose(s.thetas[j], x).distance(o.u.as_matrix()));
        }
    }
    Ok((norm_drift, gap))
}

fn identical_ensemble(cfg: &ScenarioConfig, rng: &mut Rng) -> Result<Ensemble<f64>, CliError> {
    let a = sample_gaussian_su(rng, cfg.d, 1.0);
    let oscs = (0..cfg.n)
        .map(|_| Oscillator {
            u: sample_haar(rng, cfg.d),
            a: a.clone(),
        })
        .collect();
    Ok(Ensemble::new(oscs, cfg.kappa)?)
}

/// Largest per-oscillator gap at `t_end` between the rotation/coupling
/// splitting and direct integration.
pub fn splitting_check(cfg: &ScenarioConfig, rng: &mut Rng) -> Result<f64, CliError> {
    let e0 = identical_ensemble(cfg, rng)?;
    let stepper = cfg.stepper(cfg.t_end)?;
    let direct = integrate(&e0, &stepper, &mut LoheField)?;
    let split = split_integrate(&e0, &stepper)?;
    Ok(direct
        .last()
        .oscillators()
        .iter()
        .zip(split.oscillators())
        .map(|(p, q)| p.u.distance(&q.u))
        .fold(0.0, f64::max))
}

/// Largest gap between the gauge-transformed identical-Hamiltonian run and
/// the Hamiltonian-free run from the same states.
pub fn gauge_check(cfg: &ScenarioConfig, rng: &mut Rng) -> Result<f64, CliError> {
    let e0 = identical_ensemble(cfg, rng)?;
    let a0 = e0.oscillators()[0].a.clone();
    let stepper = cfg.stepper(cfg.t_end)?;
    let gauged = gauge_transform(&integrate(&e0, &stepper, &mut LoheField)?, &a0)?;
    let free0 = Ensemble::new(
        e0.oscillators()
            .iter()
            .map(|o| Oscillator::at_rest(o.u.clone()))
            .collect(),
        cfg.kappa,
    )?;
    let free = integrate(&free0, &stepper, &mut LoheField)?;
    let mut worst: f64 = 0.0;
    for (g, f) in gauged.snapshots.iter().zip(&free.snapshots) {
        for (p, q) in g.oscillators().iter().zip(f.oscillators()) {
            worst = worst.max(p.u.distance(&q.u));
        }
    }
    Ok(worst)
}

/// Kuramoto, swarming, splitting and gauge reductions, one row each.
pub fn run_reduction_checks(cfg: &ScenarioConfig) -> Result<Experiment, CliError> {
    let root = Rng::new(cfg.seed);
    let kuramoto = kuramoto_equivalence(cfg, &mut root.derive(0))?;
    let (norm_drift, swarm_gap) = swarming_checks(cfg, &mut root.derive(1))?;
    let splitting = splitting_check(cfg, &mut root.derive(2))?;
    let gauge = gauge_check(cfg, &mut root.derive(3))?;
    let rows = [
        ("kuramoto_equivalence", kuramoto),
        ("swarming_norm_conservation", norm_drift),
        ("swarming_reduction", swarm_gap),
        ("splitting", splitting),
        ("gauge", gauge),
    ];
    let mut report = CsvReport::new(["check_name", "max_error", "tolerance", "pass"]);
    let mut checks = Vec::new();
    for (name, err) in rows {
        let pass = err <= REDUCTION_TOL;
        report.push_row(vec![name.into(), err.into(), REDUCTION_TOL.into(), pass.into()]);
        checks.push(Check::new(name, pass, format!("max error {err:e}")));
    }
    Ok(Experiment {
        name: "reduction_checks",
        report,
        checks,
        summary: Map::new(),
    })
}

/// Monte-Carlo field fluctuation against `16d/N` for every `N`.
pub fn run_field_fluctuation(cfg: &ScenarioConfig) -> Result<Experiment, CliError> {
    let n_list = cfg.n_list.clone().unwrap_or_else(|| vec![cfg.n]);
    let samples = cfg.samples();
    let estimates = n_list
        .par_iter()
        .enumerate()
        .map(|(i, &n)| {
            let mut rng = Rng::new(cfg.seed).derive(i as u64);
            field_fluctuation_bound_check(&mut rng, cfg.d, n, samples)
        })
        .collect::<lohe_core::Result<Vec<_>>>()?;
    let mut report = CsvReport::new([
        "d",
        "N",
        "estimate",
        "std_error",
        "bound_16d_over_n",
        "max_term_norm",
    ]);
    let mut checks = Vec::new();
    for est in &estimates {
        report.push_row(vec![
            est.d.into(),
            est.n.into(),
            est.estimate.into(),
            est.std_error.into(),
            est.bound.into(),
            est.max_term_norm.into(),
        ]);
        checks.push(Check::new(
            format!("fluctuation_bound_n_{}", est.n),
            est.estimate <= est.bound,
            format!("estimate {:e} vs 16d/N = {:e}", est.estimate, est.bound),
        ));
    }
    let mut summary = Map::new();
    summary.insert("samples".into(), json!(samples));
    if estimates.len() >= 2 {
        let ns: Vec<f64> = estimates.iter().map(|e| e.n as f64).collect();
        let ys: Vec<f64> = estimates.iter().map(|e| e.estimate).collect();
        summary.insert("loglog_slope".into(), json!(loglog_slope(&ns, &ys)));
    }
    Ok(Experiment {
        name: "field_fluctuation",
        report,
        checks,
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(-1.5)).collect();
        assert!((loglog_slope(&xs, &ys) + 1.5).abs() < 1e-12);
    }

    #[test]
    fn wrapped_gap_is_circular() {
        assert!((wrapped_gap(0.1, std::f64::consts::TAU - 0.1) - 0.2).abs() < 1e-12);
    }

    #[test]
    fn rk4_sampling_hits_exponential() {
        let ys = rk4_sampled(vec![1.0], 0.01, &[0.0, 0.5, 1.0], |y| vec![-y[0]]);
        assert_eq!(ys[0][0], 1.0);
        assert!((ys[2][0] - (-1.0f64).exp()).abs() < 1e-12);
    }
}
