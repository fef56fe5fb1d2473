//! Synchronization diagnostics and the closed-form curves they are checked
//! against.

use num_complex::Complex;

use crate::error::{LoheError, Result};
use crate::matcore::{ComplexMatrix, UnitaryMatrix};
use crate::model::Ensemble;
use crate::scalar::Real;
use crate::transport::PointCloud;

/// Columns that hold distances or squared distances.
const NONNEGATIVE_COLUMNS: [&str; 3] = ["D", "Lambda", "JN"];

/// Named real columns over a common time grid.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagnosticSeries<T> {
    times: Vec<T>,
    columns: Vec<(String, Vec<T>)>,
}

impl<T: Real> DiagnosticSeries<T> {
    pub fn new(times: Vec<T>) -> Self {
        Self {
            times,
            columns: Vec::new(),
        }
    }

    pub fn push_column(&mut self, name: &str, values: Vec<T>) -> Result<()> {
        if values.len() != self.times.len() {
            return Err(LoheError::InvalidArgument(format!(
                "column {name} has {} values for {} times",
                values.len(),
                self.times.len()
            )));
        }
        if self.column(name).is_some() {
            return Err(LoheError::InvalidArgument(format!("duplicate column {name}")));
        }
        if NONNEGATIVE_COLUMNS.contains(&name) && values.iter().any(|v| !(*v >= T::zero())) {
            return Err(LoheError::InvalidArgument(format!(
                "column {name} must be nonnegative"
            )));
        }
        self.columns.push((name.to_string(), values));
        Ok(())
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn column(&self, name: &str) -> Option<&[T]> {
        self.columns
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.columns.iter().map(|(n, _)| n.as_str())
    }

    pub fn columns(&self) -> &[(String, Vec<T>)] {
        &self.columns
    }
}

impl<T: Real> From<&Ensemble<T>> for PointCloud<T> {
    fn from(e: &Ensemble<T>) -> Self {
        PointCloud::new(e.oscillators().to_vec()).expect("ensembles share one dimension")
    }
}

fn pairwise_max<T: Real>(n: usize, f: impl Fn(usize, usize) -> T) -> T {
    let mut best = T::zero();
    for i in 0..n {
        for j in (i + 1)..n {
            best = best.max(f(i, j));
        }
    }
    best
}

/// `max_{i,j} ‖U_i − U_j‖₂`.
pub fn diameter<T: Real>(cloud: &PointCloud<T>) -> T {
    let p = cloud.points();
    pairwise_max(p.len(), |i, j| p[i].u.distance(&p[j].u))
}

/// `max_{i,j} ‖A_i − A_j‖₂`.
pub fn frequency_spread<T: Real>(cloud: &PointCloud<T>) -> T {
    let p = cloud.points();
    pairwise_max(p.len(), |i, j| p[i].a.distance(&p[j].a))
}

/// `(1/N²) Σ_i Σ_j ‖U_i − U_j‖₂²`, diagonal terms included.
pub fn lambda_functional<T: Real>(cloud: &PointCloud<T>) -> T {
    let p = cloud.points();
    let n = p.len();
    let mut sum = T::zero();
    for i in 0..n {
        for j in (i + 1)..n {
            sum += p[i].u.distance_sqr(&p[j].u);
        }
    }
    let two = T::lit(2.0);
    let n = T::from_usize(n).unwrap();
    two * sum / (n * n)
}

/// The two nonnegative roots of `½z³ − z + η`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CubicRoots<T> {
    pub eta: T,
    pub zeta1: T,
    pub zeta2: T,
}

/// `(2/3)^{3/2}`, the largest `η` with two nonnegative roots.
pub fn eta_max<T: Real>() -> T {
    T::lit(2.0 / 3.0).powf(T::lit(1.5))
}

/// `√(2/3)`, the double root at `η = (2/3)^{3/2}`.
pub fn critical_radius<T: Real>() -> T {
    T::lit(2.0 / 3.0).sqrt()
}

fn cubic<T: Real>(z: T, eta: T) -> T {
    T::lit(0.5) * z * z * z - z + eta
}

fn bracketed_root<T: Real>(mut lo: T, mut hi: T, eta: T) -> T {
    let p_lo = cubic(lo, eta);
    if p_lo == T::zero() {
        return lo;
    }
    if cubic(hi, eta) == T::zero() {
        return hi;
    }
    let lo_positive = p_lo > T::zero();
    for _ in 0..200 {
        let mid = T::lit(0.5) * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let p = cubic(mid, eta);
        if p == T::zero() {
            return mid;
        }
        if (p > T::zero()) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut z = T::lit(0.5) * (lo + hi);
    for _ in 0..3 {
        let slope = T::lit(1.5) * z * z - T::one();
        if slope == T::zero() {
            break;
        }
        let next = z - cubic(z, eta) / slope;
        if (next - z).abs() > hi - lo || cubic(next, eta).abs() >= cubic(z, eta).abs() {
            break;
        }
        z = next;
    }
    z
}

/// Roots `ζ₁ < √(2/3) < ζ₂` by bisection on `[0, √(2/3)]` and
/// `[√(2/3), √2]`, then Newton polish.
pub fn zeta_roots<T: Real>(eta: T) -> Result<CubicRoots<T>> {
    if !(eta >= T::zero() && eta < eta_max()) {
        return Err(LoheError::NoTwoRoots { eta: eta.as_f64() });
    }
    let mid = critical_radius();
    Ok(CubicRoots {
        eta,
        zeta1: bracketed_root(T::zero(), mid, eta),
        zeta2: bracketed_root(mid, T::SQRT_2(), eta),
    })
}

/// Solution of `ẏ = α − κy + ½κy³` sampled on a time grid.
#[derive(Clone, Debug, PartialEq)]
pub struct BarrierSolution<T> {
    pub times: Vec<T>,
    pub y: Vec<T>,
    /// First grid time with `y ≤ √(2/3)`.
    pub first_crossing: Option<T>,
}

const BARRIER_MAX_SUBSTEP: f64 = 1e-3;

/// Classical RK4 for the barrier ODE, with at most `10⁻³` per substep
/// between consecutive grid times. The grid must start at `t = 0`.
pub fn barrier_ode<T: Real>(alpha: T, kappa: T, y0: T, t_grid: &[T]) -> Result<BarrierSolution<T>> {
    let regime = |msg: String| Err(LoheError::OutsideBarrierRegime(msg));
    if !(alpha >= T::zero() && kappa > T::zero() && y0 >= T::zero()) {
        return regime(format!(
            "need alpha ≥ 0, kappa > 0, y0 ≥ 0 (got {alpha}, {kappa}, {y0})"
        ));
    }
    let eta = alpha / kappa;
    let roots = match zeta_roots(eta) {
        Ok(r) => r,
        Err(_) => return regime(format!("alpha/kappa = {eta} is not below (2/3)^(3/2)")),
    };
    if !(y0 < roots.zeta2) {
        return regime(format!("y0 = {y0} is not below zeta2 = {}", roots.zeta2));
    }
    if t_grid.first().is_some_and(|t| *t != T::zero())
        || t_grid.windows(2).any(|w| !(w[1] >= w[0]))
    {
        return Err(LoheError::InvalidArgument(
            "time grid must start at 0 and be nondecreasing".into(),
        ));
    }

    let half = T::lit(0.5);
    let f = |y: T| alpha - kappa * y + half * kappa * y * y * y;
    let mut y = y0;
    let mut t = T::zero();
    let mut ys = Vec::with_capacity(t_grid.len());
    for &target in t_grid {
        let span = target - t;
        if span > T::zero() {
            let n = (span.as_f64() / BARRIER_MAX_SUBSTEP).ceil().max(1.0) as usize;
            let h = span / T::from_usize(n).unwrap();
            for _ in 0..n {
                let k1 = f(y);
                let k2 = f(y + half * h * k1);
                let k3 = f(y + half * h * k2);
                let k4 = f(y + h * k3);
                y += h / T::lit(6.0) * (k1 + T::lit(2.0) * (k2 + k3) + k4);
            }
            t = target;
        }
        ys.push(y);
    }
    let threshold = critical_radius::<T>();
    let first_crossing = t_grid
        .iter()
        .zip(&ys)
        .find(|(_, y)| **y <= threshold)
        .map(|(t, _)| *t);
    Ok(BarrierSolution {
        times: t_grid.to_vec(),
        y: ys,
        first_crossing,
    })
}

/// Lower and upper envelopes for `D(t)²` under identical Hamiltonians:
/// `D₀²e^{−2κt}(1 − ½D₀²(1 − e^{−2κt}))` and
/// `2D₀² / ((2 − D₀²)e^{2κt} + D₀²)`. At `κ = 0` both reduce to `D₀²`.
pub fn sync_envelopes<T: Real>(d0: T, kappa: T, t: T) -> Result<(T, T)> {
    if !(d0 < T::SQRT_2()) {
        return Err(LoheError::OutsideSmallSupport { d0: d0.as_f64() });
    }
    if !(d0 >= T::zero() && kappa >= T::zero() && t >= T::zero()) {
        return Err(LoheError::InvalidArgument(format!(
            "need d0 ≥ 0, kappa ≥ 0, t ≥ 0 (got {d0}, {kappa}, {t})"
        )));
    }
    let two = T::lit(2.0);
    let d2 = d0 * d0;
    let decay = (-two * kappa * t).exp();
    let lower = d2 * decay * (T::one() - T::lit(0.5) * d2 * (T::one() - decay));
    let upper = two * d2 / ((two - d2) * (two * kappa * t).exp() + d2);
    Ok((lower, upper))
}

/// `(8d/5N)(e^{10t} − 1)`.
pub fn thm31_bound<T: Real>(d: usize, n: usize, t: T) -> T {
    let d = T::from_usize(d).unwrap();
    let n = T::from_usize(n).unwrap();
    T::lit(8.0) * d / (T::lit(5.0) * n) * (T::lit(10.0) * t).exp_m1()
}

/// `(3/2)^{3/2}α`, the coupling strength above which practical
/// synchronization is asserted.
pub fn practical_sync_threshold<T: Real>(alpha: T) -> T {
    T::lit(1.5).powf(T::lit(1.5)) * alpha
}

/// Asymptotic level `3α/(2κ)`.
pub fn practical_sync_limit<T: Real>(alpha: T, kappa: T) -> Result<T> {
    let threshold = practical_sync_threshold(alpha);
    if !(alpha > T::zero() && kappa > threshold) {
        return Err(LoheError::OutsidePracticalRegime {
            kappa: kappa.as_f64(),
            threshold: threshold.as_f64(),
        });
    }
    Ok(T::lit(3.0) * alpha / (T::lit(2.0) * kappa))
}

/// Both sides of the trace identity used to compare two states against the
/// mean of a cloud.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AuxIdentity<T> {
    /// `tr((U₁−U₂)*(U₂⟨V*⟩U₂ − U₁⟨V*⟩U₁)) + tr((U₂*⟨V⟩U₂* − U₁*⟨V⟩U₁*)(U₁−U₂))`.
    pub lhs: T,
    /// `−4‖U₁−U₂‖₂² + tr(⟨(V−U₂)(V−U₂)*⟩Δ) + tr(⟨(V−U₁)(V−U₁)*⟩Δ)`
    /// with `Δ = (U₁−U₂)(U₁−U₂)*`.
    pub rhs: T,
    /// `−2‖U₁−U₂‖₂² + ½tr(⟨(V−U₂)(V−U₂)*⟩Δ) + ½tr(⟨(V−U₁)(V−U₁)*⟩Δ)`,
    /// exactly half of `rhs`.
    pub half_rhs: T,
    /// `|lhs − rhs|`, imaginary residues included.
    pub gap: T,
}

/// Evaluates both sides with `⟨·⟩` the empirical mean over `cloud`.
pub fn aux_identity_check<T: Real>(
    u1: &UnitaryMatrix<T>,
    u2: &UnitaryMatrix<T>,
    cloud: &PointCloud<T>,
) -> Result<AuxIdentity<T>> {
    u1.check_dim(u2)?;
    u1.check_dim(&cloud.points()[0].u)?;
    let vs: Vec<ComplexMatrix<T>> = cloud.points().iter().map(|p| p.u.as_matrix().clone()).collect();
    let v_mean = ComplexMatrix::mean(&vs).expect("clouds are nonempty");
    let v_mean_adj = v_mean.adjoint();
    let (m1, m2) = (u1.as_matrix(), u2.as_matrix());
    let (m1a, m2a) = (m1.adjoint(), m2.adjoint());
    let diff = m1 - m2;
    let diff_adj = diff.adjoint();

    let first = diff_adj.matmul(&(&m2.matmul(&v_mean_adj).matmul(m2) - &m1.matmul(&v_mean_adj).matmul(m1)));
    let second = (&m2a.matmul(&v_mean).matmul(&m2a) - &m1a.matmul(&v_mean).matmul(&m1a)).matmul(&diff);
    let lhs = first.trace() + second.trace();

    let delta = diff.matmul(&diff_adj);
    let spread = |w: &ComplexMatrix<T>| {
        let outer: Vec<ComplexMatrix<T>> = vs
            .iter()
            .map(|v| {
                let x = v - w;
                x.mul_adjoint(&x)
            })
            .collect();
        ComplexMatrix::mean(&outer)
            .expect("clouds are nonempty")
            .matmul(&delta)
            .trace()
    };
    let norm = Complex::new(T::lit(4.0) * diff.frobenius_norm_sqr(), T::zero());
    let rhs = spread(m2) + spread(m1) - norm;
    Ok(AuxIdentity {
        lhs: lhs.re,
        rhs: rhs.re,
        half_rhs: T::lit(0.5) * rhs.re,
        gap: (lhs - rhs).norm(),
    })
}
