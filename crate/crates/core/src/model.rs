//! Right-hand sides of the Lohe system and its low-dimensional reductions.
//!
//! The all-to-all coupling `(κ/2N) Σ_k K(U_k, U_j)` is evaluated in
//! centroid form `(κ/2)(⟨U⟩U_j* − U_j⟨U⟩*)`, which costs one ensemble mean
//! per evaluation. The same formula with a prescribed mean is the drift of
//! the kinetic characteristics.

use num_complex::Complex;

use crate::error::{LoheError, Result};
use crate::matcore::{ComplexMatrix, SkewHermitianMatrix, UnitaryMatrix};
use crate::scalar::Real;

/// One oscillator: state `U` and frequency generator `A = −iH`.
#[derive(Clone, Debug, PartialEq)]
pub struct Oscillator<T> {
    pub u: UnitaryMatrix<T>,
    pub a: SkewHermitianMatrix<T>,
}

impl<T: Real> Oscillator<T> {
    pub fn new(u: UnitaryMatrix<T>, a: SkewHermitianMatrix<T>) -> Result<Self> {
        u.check_dim(&a)?;
        Ok(Self { u, a })
    }

    /// Oscillator with zero generator.
    pub fn at_rest(u: UnitaryMatrix<T>) -> Self {
        let d = u.dim();
        Self {
            u,
            a: SkewHermitianMatrix::zeros(d),
        }
    }

    pub fn dim(&self) -> usize {
        self.u.dim()
    }
}

/// `N` oscillators with a common coupling strength `κ ≥ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Ensemble<T> {
    oscillators: Vec<Oscillator<T>>,
    kappa: T,
}

impl<T: Real> Ensemble<T> {
    pub fn new(oscillators: Vec<Oscillator<T>>, kappa: T) -> Result<Self> {
        check_uniform_dim(&oscillators)?;
        if !(kappa >= T::zero()) {
            return Err(LoheError::InvalidArgument(format!(
                "coupling strength must be nonnegative, got {kappa}"
            )));
        }
        Ok(Self { oscillators, kappa })
    }

    pub fn oscillators(&self) -> &[Oscillator<T>] {
        &self.oscillators
    }

    pub fn into_oscillators(self) -> Vec<Oscillator<T>> {
        self.oscillators
    }

    pub fn kappa(&self) -> T {
        self.kappa
    }

    pub fn len(&self) -> usize {
        self.oscillators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.oscillators.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.oscillators[0].dim()
    }

    pub fn centroid(&self) -> ComplexMatrix<T> {
        centroid(&self.oscillators)
    }

    /// Same oscillators with new states; generators and `κ` are kept.
    pub(crate) fn with_states(&self, states: Vec<UnitaryMatrix<T>>) -> Self {
        debug_assert_eq!(states.len(), self.oscillators.len());
        let oscillators = self
            .oscillators
            .iter()
            .zip(states)
            .map(|(o, u)| Oscillator { u, a: o.a.clone() })
            .collect();
        Self {
            oscillators,
            kappa: self.kappa,
        }
    }

    /// Reorders oscillators so that slot `i` holds old index `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self {
            oscillators: perm.iter().map(|&i| self.oscillators[i].clone()).collect(),
            kappa: self.kappa,
        }
    }

    pub fn cast<S: Real>(&self) -> Ensemble<S> {
        Ensemble {
            oscillators: self
                .oscillators
                .iter()
                .map(|o| Oscillator {
                    u: o.u.cast(),
                    a: o.a.cast(),
                })
                .collect(),
            kappa: S::lit(self.kappa.as_f64()),
        }
    }
}

pub(crate) fn check_uniform_dim<T: Real>(oscillators: &[Oscillator<T>]) -> Result<()> {
    let first = oscillators
        .first()
        .ok_or_else(|| LoheError::InvalidArgument("ensemble must be nonempty".into()))?;
    let d = first.dim();
    for o in oscillators {
        if o.dim() != d || o.a.dim() != d {
            return Err(LoheError::DimensionMismatch {
                expected: d,
                found: o.dim().max(o.a.dim()),
            });
        }
    }
    Ok(())
}

/// `⟨U⟩ = (1/N) Σ U_k`, summed in index order.
pub fn centroid<T: Real>(oscillators: &[Oscillator<T>]) -> ComplexMatrix<T> {
    ComplexMatrix::mean(oscillators.iter().map(|o| o.u.as_matrix()))
        .expect("centroid of an empty ensemble")
}

/// Lohe generators `𝒜_j = A_j + (κ/2)(⟨U⟩U_j* − U_j⟨U⟩*)`.
pub fn lohe_generators<T: Real>(e: &Ensemble<T>) -> Result<Vec<SkewHermitianMatrix<T>>> {
    lohe_generators_of(e.oscillators(), e.kappa())
}

pub fn lohe_generators_of<T: Real>(
    oscillators: &[Oscillator<T>],
    kappa: T,
) -> Result<Vec<SkewHermitianMatrix<T>>> {
    check_uniform_dim(oscillators)?;
    let mean = centroid(oscillators);
    Ok(oscillators
        .iter()
        .map(|o| coupled_generator(o, &mean, kappa))
        .collect())
}

/// Drift generator of one particle in a prescribed mean field ⟨V⟩.
pub fn frozen_field_generator<T: Real>(
    osc: &Oscillator<T>,
    field_mean: &ComplexMatrix<T>,
    kappa: T,
) -> Result<SkewHermitianMatrix<T>> {
    osc.u.check_dim(field_mean)?;
    Ok(coupled_generator(osc, field_mean, kappa))
}

fn coupled_generator<T: Real>(
    osc: &Oscillator<T>,
    mean: &ComplexMatrix<T>,
    kappa: T,
) -> SkewHermitianMatrix<T> {
    if kappa == T::zero() {
        return osc.a.clone();
    }
    let pull = SkewHermitianMatrix::difference_with_adjoint(&mean.mul_adjoint(&osc.u));
    osc.a.add(&pull.scale(kappa * T::lit(0.5)))
}

/// Phases, natural frequencies and coupling of a Kuramoto network.
#[derive(Clone, Debug, PartialEq)]
pub struct KuramotoState<T> {
    pub thetas: Vec<T>,
    pub nus: Vec<T>,
    pub kappa: T,
}

impl<T: Real> KuramotoState<T> {
    pub fn new(thetas: Vec<T>, nus: Vec<T>, kappa: T) -> Result<Self> {
        if thetas.len() != nus.len() || thetas.is_empty() {
            return Err(LoheError::InvalidArgument(format!(
                "{} phases for {} frequencies",
                thetas.len(),
                nus.len()
            )));
        }
        Ok(Self { thetas, nus, kappa })
    }

    /// The d = 1 Lohe ensemble with `U_j = e^{−iθ_j}`, `A_j = −iν_j`.
    pub fn to_ensemble(&self) -> Ensemble<T> {
        let oscillators = self
            .thetas
            .iter()
            .zip(&self.nus)
            .map(|(&th, &nu)| Oscillator {
                u: UnitaryMatrix::from_phase(th),
                a: SkewHermitianMatrix::from_hamiltonian(&ComplexMatrix::from_diagonal(&[
                    Complex::new(nu, T::zero()),
                ])),
            })
            .collect();
        Ensemble {
            oscillators,
            kappa: self.kappa,
        }
    }
}

/// `θ̇_j = ν_j + (κ/N) Σ_k sin(θ_k − θ_j)`.
pub fn kuramoto_rhs<T: Real>(s: &KuramotoState<T>) -> Vec<T> {
    let n = T::from_usize(s.thetas.len()).unwrap();
    s.thetas
        .iter()
        .zip(&s.nus)
        .map(|(&tj, &nu)| {
            let pull = s
                .thetas
                .iter()
                .fold(T::zero(), |acc, &tk| acc + (tk - tj).sin());
            nu + s.kappa / n * pull
        })
        .collect()
}

/// Phase `θ ∈ (−π, π]` of a unit scalar written as `e^{−iθ}`.
pub fn phase_of<T: Real>(u: &UnitaryMatrix<T>) -> T {
    let z = u[(0, 0)];
    let theta = -z.im.atan2(z.re);
    if theta <= -T::PI() {
        theta + T::TAU()
    } else {
        theta
    }
}

/// Phases and phase velocities implied by the d = 1 Lohe flow.
pub fn lohe_d1_phase<T: Real>(e: &Ensemble<T>) -> Result<(Vec<T>, Vec<T>)> {
    if e.dim() != 1 {
        return Err(LoheError::DimensionMismatch {
            expected: 1,
            found: e.dim(),
        });
    }
    for o in e.oscillators() {
        let modulus = o.u[(0, 0)].norm();
        if (modulus - T::one()).abs() > T::lit(T::UNITARY_TOL) {
            return Err(LoheError::NotUnitary {
                defect: (modulus - T::one()).abs().as_f64(),
            });
        }
    }
    let thetas = e.oscillators().iter().map(|o| phase_of(&o.u)).collect();
    // U̇ = 𝒜U = −iθ̇U, so θ̇ = −Im 𝒜
    let velocities = lohe_generators(e)?
        .iter()
        .map(|g| -g[(0, 0)].im)
        .collect();
    Ok((thetas, velocities))
}

pub type Vec4<T> = [T; 4];
pub type Mat4<T> = [[T; 4]; 4];

/// State of the d = 2 reduction: four-vectors `x_j`, real skew-symmetric
/// `Ω_j`, U(1) phases `θ_j` and frequencies `ν_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct SwarmState<T> {
    pub xs: Vec<Vec4<T>>,
    pub omegas: Vec<Mat4<T>>,
    pub thetas: Vec<T>,
    pub nus: Vec<T>,
    pub kappa: T,
}

/// Time derivatives of a [`SwarmState`].
#[derive(Clone, Debug, PartialEq)]
pub struct SwarmVelocity<T> {
    pub dx: Vec<Vec4<T>>,
    pub dtheta: Vec<T>,
}

fn dot4<T: Real>(a: &Vec4<T>, b: &Vec4<T>) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

/// Augmented d = 2 system:
///
/// ```text
/// ‖x_j‖² θ̇_j = ν_j + (κ/N) Σ_k sin(θ_k − θ_j) ⟨x_j|x_k⟩
/// ‖x_j‖² ẋ_j = Ω_j x_j + (κ/N) Σ_k cos(θ_k − θ_j) (‖x_j‖² x_k − ⟨x_j|x_k⟩ x_j)
/// ```
///
/// With `θ ≡ 0`, `ν ≡ 0` this is the swarming model on the sphere.
pub fn swarming_rhs<T: Real>(s: &SwarmState<T>) -> Result<SwarmVelocity<T>> {
    let n = s.xs.len();
    if n == 0 || s.omegas.len() != n || s.thetas.len() != n || s.nus.len() != n {
        return Err(LoheError::InvalidArgument(
            "swarm state fields must share a nonzero length".into(),
        ));
    }
    let nf = T::from_usize(n).unwrap();
    let mut dx = Vec::with_capacity(n);
    let mut dtheta = Vec::with_capacity(n);
    for j in 0..n {
        let xj = &s.xs[j];
        let norm2 = dot4(xj, xj);
        if !(norm2 > T::zero()) {
            return Err(LoheError::InvalidArgument(format!(
                "x_{j} has zero norm"
            )));
        }
        let mut vel = [T::zero(); 4];
        for (r, row) in s.omegas[j].iter().enumerate() {
            vel[r] = dot4(row, xj);
        }
        let mut phase_pull = T::zero();
        for k in 0..n {
            let xk = &s.xs[k];
            let delta = s.thetas[k] - s.thetas[j];
            let inner = dot4(xj, xk);
            phase_pull += delta.sin() * inner;
            let w = s.kappa / nf * delta.cos();
            for r in 0..4 {
                vel[r] += w * (norm2 * xk[r] - inner * xj[r]);
            }
        }
        dx.push(vel.map(|v| v / norm2));
        dtheta.push((s.nus[j] + s.kappa / nf * phase_pull) / norm2);
    }
    Ok(SwarmVelocity { dx, dtheta })
}

/// Pauli basis `(σ₁, σ₂, σ₃)` with `σ₁ = diag(1, −1)`,
/// `σ₂ = [[0, −i], [i, 0]]`, `σ₃ = [[0, 1], [1, 0]]`.
pub fn pauli_basis<T: Real>() -> [ComplexMatrix<T>; 3] {
    let z = Complex::new(T::zero(), T::zero());
    let one = Complex::new(T::one(), T::zero());
    let i = Complex::new(T::zero(), T::one());
    [
        ComplexMatrix::from_row_major(vec![one, z, z, -one]).unwrap(),
        ComplexMatrix::from_row_major(vec![z, -i, i, z]).unwrap(),
        ComplexMatrix::from_row_major(vec![z, one, one, z]).unwrap(),
    ]
}

/// `e^{−iθ}(i Σ x^k σ_k + x⁴ I₂)`.
pub fn pauli_compose<T: Real>(theta: T, x: &Vec4<T>) -> ComplexMatrix<T> {
    let c = |re: T, im: T| Complex::new(re, im);
    let m = ComplexMatrix::from_row_major(vec![
        c(x[3], x[0]),
        c(x[1], x[2]),
        c(-x[1], x[2]),
        c(x[3], -x[0]),
    ])
    .unwrap();
    m.scale_complex(Complex::from_polar(T::one(), -theta))
}

/// Real-linear coordinates of `M = i Σ x^k σ_k + x⁴ I₂ + (rest)`; exact
/// inverse of [`pauli_compose`] at `θ = 0`.
pub fn pauli_coordinates<T: Real>(m: &ComplexMatrix<T>) -> Vec4<T> {
    let half = T::lit(0.5);
    [
        (m[(0, 0)].im - m[(1, 1)].im) * half,
        (m[(0, 1)].re - m[(1, 0)].re) * half,
        (m[(0, 1)].im + m[(1, 0)].im) * half,
        (m[(0, 0)].re + m[(1, 1)].re) * half,
    ]
}

/// Splits `U ∈ U(2)` as `e^{−iθ}(i Σ x^k σ_k + x⁴ I₂)` with `‖x‖ = 1`.
///
/// The parametrization is two-to-one (`(θ, x) ~ (θ + π, −x)`); the branch
/// taken is `θ ∈ (−π/2, π/2]` from the principal square root of `det U`.
pub fn pauli_decompose<T: Real>(u: &UnitaryMatrix<T>) -> Result<(T, Vec4<T>)> {
    if u.dim() != 2 {
        return Err(LoheError::DimensionMismatch {
            expected: 2,
            found: u.dim(),
        });
    }
    let det = u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)];
    // det U = e^{−2iθ}‖x‖²
    let mut theta = -det.arg() * T::lit(0.5);
    if theta <= -T::FRAC_PI_2() {
        theta += T::PI();
    }
    let rotated = u.scale_complex(Complex::from_polar(T::one(), theta));
    Ok((theta, pauli_coordinates(&rotated)))
}

/// Maps `H = Σ ω^n σ_n + ν I₂` to the skew-symmetric `Ω` with
/// `−iH (i Σ x^k σ_k + x⁴ I₂) ↔ Ω x + (U(1) part)`, and returns `(Ω, ν)`.
pub fn swarm_frequency<T: Real>(h: &ComplexMatrix<T>) -> Result<(Mat4<T>, T)> {
    if h.dim() != 2 {
        return Err(LoheError::DimensionMismatch {
            expected: 2,
            found: h.dim(),
        });
    }
    let half = T::lit(0.5);
    let basis = pauli_basis::<T>();
    let w: Vec<T> = basis
        .iter()
        .map(|s| h.matmul(s).trace().re * half)
        .collect();
    let nu = h.trace().re * half;
    let z = T::zero();
    let omega = [
        [z, w[2], -w[1], -w[0]],
        [-w[2], z, w[0], -w[1]],
        [w[1], -w[0], z, -w[2]],
        [w[0], w[1], w[2], z],
    ];
    Ok((omega, nu))
}

/// The swarm state corresponding to a d = 2 Lohe ensemble.
pub fn swarm_state_of<T: Real>(e: &Ensemble<T>) -> Result<SwarmState<T>> {
    let n = e.len();
    let mut s = SwarmState {
        xs: Vec::with_capacity(n),
        omegas: Vec::with_capacity(n),
        thetas: Vec::with_capacity(n),
        nus: Vec::with_capacity(n),
        kappa: e.kappa(),
    };
    for o in e.oscillators() {
        let (theta, x) = pauli_decompose(&o.u)?;
        let (omega, nu) = swarm_frequency(&o.a.hamiltonian())?;
        s.xs.push(x);
        s.omegas.push(omega);
        s.thetas.push(theta);
        s.nus.push(nu);
    }
    Ok(s)
}

/// Swarm-coordinate velocities `(ẋ_j, θ̇_j)` implied by the d = 2 Lohe flow.
///
/// With `U = e^{−iθ}M`, `e^{iθ}U̇ = −iθ̇M + Ṁ`; the Pauli coordinates of the
/// first term vanish and `tr(M*Ṁ) = 2⟨x|ẋ⟩ = 0`, so
/// `ẋ = coords(e^{iθ}U̇)` and `θ̇ = −½ Im tr(M* e^{iθ}U̇)`.
pub fn lohe_swarm_velocity<T: Real>(e: &Ensemble<T>) -> Result<SwarmVelocity<T>> {
    let generators = lohe_generators(e)?;
    let mut dx = Vec::with_capacity(e.len());
    let mut dtheta = Vec::with_capacity(e.len());
    for (o, g) in e.oscillators().iter().zip(&generators) {
        let (theta, x) = pauli_decompose(&o.u)?;
        let rotated = g
            .matmul(&o.u)
            .scale_complex(Complex::from_polar(T::one(), theta));
        let m = pauli_compose(T::zero(), &x);
        dx.push(pauli_coordinates(&rotated));
        dtheta.push(-m.inner(&rotated).im * T::lit(0.5));
    }
    Ok(SwarmVelocity { dx, dtheta })
}
