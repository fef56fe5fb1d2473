//! Acceptance suite: one pass/fail line per criterion.
//!
//! Runs as a plain binary (`harness = false`) so the lines are printed on
//! every `cargo test`, and exits nonzero if any criterion fails.

use std::time::{Duration, Instant};

use lohe_cli::config::{parse_config, ScenarioConfig};
use lohe_cli::experiments::{
    convergence_repetition, kuramoto_equivalence, run_practical_sync, splitting_check,
};
use lohe_cli::init::initial_oscillators;
use lohe_core::analysis::{
    aux_identity_check, barrier_ode, critical_radius, diameter, eta_max, frequency_spread,
    sync_envelopes, thm31_bound, zeta_roots,
};
use lohe_core::integrate::{integrate, LoheField};
use lohe_core::matcore::{sample_gaussian_su, sample_haar};
use lohe_core::meanfield::field_fluctuation_bound_check;
use lohe_core::transport::{assignment_solve, mk_distance, CostMatrix, Exponent, PointCloud};
use lohe_core::{Ensemble, Method, Oscillator, Rng, StepperConfig};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn config(json: &str) -> ScenarioConfig {
    parse_config(json).expect("acceptance configs are valid")
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    lohe_cli::experiments::loglog_slope(xs, ys)
}

fn haar_cloud(rng: &mut Rng, d: usize, n: usize) -> PointCloud<f64> {
    PointCloud::new(
        (0..n)
            .map(|_| Oscillator {
                u: sample_haar(rng, d),
                a: sample_gaussian_su(rng, d, 1.0),
            })
            .collect(),
    )
    .unwrap()
}

const UNITARITY_TOL: f64 = 1e-8;

fn unitarity() -> Outcome {
    let mut worst: f64 = 0.0;
    for (i, d) in [2usize, 4].into_iter().enumerate() {
        let mut rng = Rng::new(100 + i as u64);
        let e0 = Ensemble::new(haar_cloud(&mut rng, d, 16).points().to_vec(), 1.0).unwrap();
        let cfg = StepperConfig::new(Method::Cf2, 1e-3, 10.0, 1).unwrap();
        let traj = integrate(&e0, &cfg, &mut LoheField).unwrap();
        worst = worst.max(traj.max_unitarity_defect());
    }
    outcome(worst <= UNITARITY_TOL, format!("max ‖U*U − I‖₂ = {worst:.3e}"))
}

const AUX_TOL: f64 = 1e-11;

fn aux_identity() -> Outcome {
    let mut rng = Rng::new(200);
    let mut worst: f64 = 0.0;
    for k in 0..1000 {
        let d = 1 + k % 4;
        let n = 1 + (rng.next_u64() % 16) as usize;
        let u1 = sample_haar(&mut rng, d);
        let u2 = sample_haar(&mut rng, d);
        let cloud = PointCloud::from_unitaries((0..n).map(|_| sample_haar(&mut rng, d)).collect()).unwrap();
        worst = worst.max(aux_identity_check(&u1, &u2, &cloud).unwrap().gap);
    }
    outcome(worst <= AUX_TOL, format!("max |LHS − RHS| = {worst:.3e} over 1000 instances"))
}

const KURAMOTO_TOL: f64 = 1e-6;

fn kuramoto() -> Outcome {
    let cfg = config(r#"{"d":1,"n":8,"kappa":1.0,"t_end":10.0,"dt":0.001,"record_every":10}"#);
    let err = kuramoto_equivalence(&cfg, &mut Rng::new(300)).unwrap();
    outcome(err <= KURAMOTO_TOL, format!("sup phase gap {err:.3e}"))
}

const SPLITTING_TOL: f64 = 1e-6;

fn splitting() -> Outcome {
    let cfg = config(r#"{"d":2,"n":16,"kappa":1.0,"t_end":1.0,"dt":0.001}"#);
    let err = splitting_check(&cfg, &mut Rng::new(400)).unwrap();
    outcome(err <= SPLITTING_TOL, format!("max ‖split − direct‖₂ = {err:.3e}"))
}

const SLOPE_RANGE: (f64, f64) = (-1.3, -0.7);
const JN_MK2_TOL: f64 = 1e-10;

fn convergence() -> Outcome {
    let cfg = config(
        r#"{"d":2,"n":16,"kappa":1.0,"t_end":1.0,"dt":0.01,"record_every":10,
            "hamiltonian_mode":{"gaussian":{"sigma":1.0}},
            "n_list":[16,32,64,128,256,512],"p_reference":4096,"repetitions":32,"seed":500}"#,
    );
    let n_list = cfg.n_list.clone().unwrap();
    let mut final_sum = vec![0.0; n_list.len()];
    let mut bound_ok = true;
    let mut order_ok = true;
    for r in 0..cfg.repetitions {
        let samples = convergence_repetition(&cfg, &n_list, 4096, r).unwrap();
        for (i, s) in samples.iter().enumerate() {
            for k in 0..s.times.len() {
                bound_ok &= s.jn[k] <= thm31_bound(cfg.d, s.n, s.times[k]);
                order_ok &= s.mk2_sq[k] <= s.jn[k] + JN_MK2_TOL;
            }
            final_sum[i] += *s.jn.last().unwrap();
        }
    }
    let ns: Vec<f64> = n_list.iter().map(|&n| n as f64).collect();
    let means: Vec<f64> = final_sum.iter().map(|s| s / cfg.repetitions as f64).collect();
    let fit = slope(&ns, &means);
    let slope_ok = fit >= SLOPE_RANGE.0 && fit <= SLOPE_RANGE.1;
    outcome(
        slope_ok && bound_ok && order_ok,
        format!("slope {fit:.3}, J_N ≤ bound: {bound_ok}, MK2² ≤ J_N: {order_ok}"),
    )
}

const ENVELOPE_TOL: f64 = 1e-3;

fn envelopes() -> Outcome {
    let cfg = config(
        r#"{"d":2,"n":64,"kappa":1.0,"t_end":5.0,"dt":0.001,"record_every":10,
            "init_mode":{"cluster":{"center_seed":1,"radius":0.55}},"seed":600}"#,
    );
    let e0 = Ensemble::new(initial_oscillators(&cfg, cfg.n, &Rng::new(cfg.seed)).unwrap(), cfg.kappa).unwrap();
    let traj = integrate(&e0, &cfg.stepper(cfg.t_end).unwrap(), &mut LoheField).unwrap();
    let ds: Vec<f64> = traj.snapshots.iter().map(|e| diameter(&PointCloud::from(e))).collect();
    let d0 = ds[0];
    let mut contained = true;
    for (t, d) in traj.times.iter().zip(&ds) {
        let (lo, hi) = sync_envelopes(d0, cfg.kappa, *t).unwrap();
        contained &= lo - ENVELOPE_TOL <= d * d && d * d <= hi + ENVELOPE_TOL;
    }
    let d_end = *ds.last().unwrap();
    let start_ok = (0.8..=1.2).contains(&d0);
    outcome(
        start_ok && contained && d_end * d_end <= 1e-3,
        format!("D(0) = {d0:.4}, contained: {contained}, D(5)² = {:.3e}", d_end * d_end),
    )
}

const BARRIER_TOL: f64 = 1e-4;

fn barrier() -> Outcome {
    let mut cfg = config(
        r#"{"d":2,"n":64,"kappa":1.0,"t_end":10.0,"dt":0.001,"record_every":10,
            "hamiltonian_mode":{"gaussian":{"sigma":1.0}},"alpha":1.0,
            "init_mode":{"cluster":{"center_seed":2,"radius":0.55}},"seed":700}"#,
    );
    let oscs = initial_oscillators(&cfg, cfg.n, &Rng::new(cfg.seed)).unwrap();
    let alpha = frequency_spread(&PointCloud::new(oscs.clone()).unwrap());
    cfg.kappa = alpha / 0.3;
    let e0 = Ensemble::new(oscs, cfg.kappa).unwrap();
    let traj = integrate(&e0, &cfg.stepper(cfg.t_end).unwrap(), &mut LoheField).unwrap();
    let ds: Vec<f64> = traj.snapshots.iter().map(|e| diameter(&PointCloud::from(e))).collect();
    let d0 = ds[0];
    let zeta2 = zeta_roots(alpha / cfg.kappa).unwrap().zeta2;
    let sol = barrier_ode(alpha, cfg.kappa, d0, &traj.times).unwrap();
    let dominated = ds.iter().zip(&sol.y).all(|(d, y)| *d <= y + BARRIER_TOL);
    let crossing = sol.first_crossing;
    let trapped = crossing.is_some_and(|tc| {
        traj.times
            .iter()
            .zip(&ds)
            .filter(|(t, _)| **t >= tc)
            .all(|(_, d)| *d <= critical_radius::<f64>() + BARRIER_TOL)
    });
    outcome(
        d0 < zeta2 && dominated && trapped,
        format!("D(0) = {d0:.4} < ζ2 = {zeta2:.4}, D ≤ y: {dominated}, crossing at {crossing:?}, trapped: {trapped}"),
    )
}

const PRACTICAL_SLACK: f64 = 0.05;

fn practical() -> Outcome {
    let cfg = config(
        r#"{"d":2,"n":64,"kappa":5.0,"t_end":10.0,"dt":0.001,"record_every":100,
            "hamiltonian_mode":{"gaussian":{"sigma":1.0}},"alpha":1.0,
            "kappa_list":[5.0,10.0,20.0],
            "init_mode":{"cluster":{"center_seed":3,"radius":0.5}},"seed":800}"#,
    );
    let exp = run_practical_sync(&cfg).unwrap();
    let kappas = exp.report.reals("kappa").unwrap();
    let alphas = exp.report.reals("alpha").unwrap();
    let roots = exp.report.reals("sqrt_lambda_final").unwrap();
    let mut below = true;
    for k in 0..kappas.len() {
        let (a, kappa) = (alphas[k], kappas[k]);
        below &= roots[k] <= 3.0 * a / (2.0 * kappa) + PRACTICAL_SLACK * a / kappa;
    }
    let decreasing = roots.windows(2).all(|w| w[1] < w[0]);
    outcome(
        below && decreasing,
        format!("sqrt(Λ) = {roots:.4?} for κ = {kappas:?}"),
    )
}

fn brute_force_min(c: &CostMatrix<f64>) -> f64 {
    fn visit(c: &CostMatrix<f64>, perm: &mut Vec<usize>, used: &mut [bool], best: &mut f64) {
        let n = c.size();
        if perm.len() == n {
            *best = best.min(c.total(perm));
            return;
        }
        for j in 0..n {
            if !used[j] {
                used[j] = true;
                perm.push(j);
                visit(c, perm, used, best);
                perm.pop();
                used[j] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    visit(c, &mut Vec::new(), &mut vec![false; c.size()], &mut best);
    best
}

const TRANSPORT_TOL: f64 = 1e-12;

fn transport() -> Outcome {
    let mut rng = Rng::new(900);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let a = haar_cloud(&mut rng, 2, 7);
        let b = haar_cloud(&mut rng, 2, 7);
        for exponent in [Exponent::One, Exponent::Two] {
            let c = CostMatrix::between(&a, &b, exponent).unwrap();
            let exact = brute_force_min(&c);
            worst = worst.max((assignment_solve(&c).total - exact).abs());
            let mean = exact / 7.0;
            let expected = match exponent {
                Exponent::One => mean,
                Exponent::Two => mean.sqrt(),
            };
            worst = worst.max((mk_distance(&a, &b, exponent).unwrap() - expected).abs());
        }
    }
    outcome(worst <= TRANSPORT_TOL, format!("max gap to brute force {worst:.3e}"))
}

const FLUCTUATION_SLOPE_TOL: f64 = 0.15;

fn fluctuation() -> Outcome {
    let ns = [8usize, 16, 32, 64, 128, 256, 512];
    let mut below = true;
    let mut slopes = Vec::new();
    for d in 1..=3usize {
        let mut estimates = Vec::new();
        for (i, &n) in ns.iter().enumerate() {
            let mut rng = Rng::new(1000 + d as u64).derive(i as u64);
            let est = field_fluctuation_bound_check(&mut rng, d, n, 1000).unwrap();
            below &= est.estimate <= 16.0 * d as f64 / n as f64;
            estimates.push(est.estimate);
        }
        let xs: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
        slopes.push(slope(&xs, &estimates));
    }
    let slopes_ok = slopes.iter().all(|s| (s + 1.0).abs() <= FLUCTUATION_SLOPE_TOL);
    outcome(
        below && slopes_ok,
        format!("estimate ≤ 16d/N: {below}, slopes {slopes:.3?}"),
    )
}

const ROOT_TOL: f64 = 1e-12;

fn zeta() -> Outcome {
    let top = eta_max::<f64>();
    let mid = critical_radius::<f64>();
    let mut residual: f64 = 0.0;
    let mut ordered = true;
    for k in 0..100 {
        let eta = top * k as f64 / 100.0;
        let r = zeta_roots(eta).unwrap();
        for z in [r.zeta1, r.zeta2] {
            residual = residual.max((0.5 * z * z * z - z + eta).abs());
        }
        ordered &= r.zeta1 < mid && mid < r.zeta2;
    }
    let r0 = zeta_roots(0.0f64).unwrap();
    let endpoints = r0.zeta1.abs() <= ROOT_TOL && (r0.zeta2 - 2f64.sqrt()).abs() <= ROOT_TOL;
    outcome(
        residual <= ROOT_TOL && ordered && endpoints,
        format!("max residual {residual:.3e}, ordered: {ordered}, ζ(0) = ({}, {})", r0.zeta1, r0.zeta2),
    )
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 11] = [
        ("1 unitarity preservation", Duration::from_secs(10), unitarity),
        ("2 auxiliary trace identity", Duration::from_secs(5), aux_identity),
        ("3 kuramoto equivalence", Duration::from_secs(5), kuramoto),
        ("4 splitting", Duration::from_secs(5), splitting),
        ("5 mean-field convergence", Duration::from_secs(600), convergence),
        ("6 synchronization envelopes", Duration::from_secs(10), envelopes),
        ("7 barrier domination", Duration::from_secs(30), barrier),
        ("8 practical synchronization", Duration::from_secs(120), practical),
        ("9 transport exactness", Duration::from_secs(10), transport),
        ("10 field fluctuation", Duration::from_secs(60), fluctuation),
        ("11 zeta roots", Duration::from_secs(1), zeta),
    ];
    let mut failures = 0;
    for (name, budget, check) in criteria {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let passed = result.passed && elapsed < budget;
        if !passed {
            failures += 1;
        }
        println!(
            "criterion {name}: {} ({}; {:.2}s of {}s)",
            if passed { "PASS" } else { "FAIL" },
            result.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    if failures > 0 {
        println!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
}
