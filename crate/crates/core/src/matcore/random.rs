use num_complex::Complex;
use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::matcore::matrix::ComplexMatrix;
use crate::matcore::{SkewHermitianMatrix, UnitaryMatrix};
use crate::scalar::Real;

/// Seeded counter-based generator (ChaCha8).
///
/// The stream is a pure function of the 64-bit seed, so samples agree
/// across platforms and thread counts. Independent sub-streams are obtained
/// with [`Rng::derive`], never by sharing one generator.
#[derive(Clone, Debug)]
pub struct Rng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Fresh generator whose seed mixes this seed with `stream`.
    pub fn derive(&self, stream: u64) -> Rng {
        Rng::new(derive_seed(self.seed, stream))
    }

    pub fn normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.random::<u64>()
    }
}

/// SplitMix64 finalizer applied to `seed ⊕ golden·(stream + 1)`.
pub(crate) fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ 0x9E37_79B9_7F4A_7C15u64.wrapping_mul(stream.wrapping_add(1));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Haar-distributed unitary from the QR factorization of a complex
/// Ginibre matrix.
///
/// Columns are orthonormalized by Gram–Schmidt with one reorthogonalization
/// pass. That yields the factorization whose `R` has a positive real
/// diagonal, which is exactly the phase-corrected QR needed for the Haar
/// law.
pub fn sample_haar<T: Real>(rng: &mut Rng, d: usize) -> UnitaryMatrix<T> {
    assert!(d >= 1, "dimension must be at least 1");
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let mut cols: Vec<Vec<Complex<T>>> = (0..d)
        .map(|_| {
            (0..d)
                .map(|_| {
                    let re = rng.normal() * scale;
                    let im = rng.normal() * scale;
                    Complex::new(T::lit(re), T::lit(im))
                })
                .collect()
        })
        .collect();

    for j in 0..d {
        for _pass in 0..2 {
            for k in 0..j {
                let proj = cols[k]
                    .iter()
                    .zip(&cols[j])
                    .fold(Complex::new(T::zero(), T::zero()), |acc, (q, v)| {
                        acc + q.conj() * v
                    });
                let (head, tail) = cols.split_at_mut(j);
                for (v, q) in tail[0].iter_mut().zip(&head[k]) {
                    *v -= proj * q;
                }
            }
        }
        let norm = cols[j]
            .iter()
            .fold(T::zero(), |acc, z| acc + z.norm_sqr())
            .sqrt();
        for v in cols[j].iter_mut() {
            *v /= norm;
        }
    }
    UnitaryMatrix::new_unchecked(ComplexMatrix::from_fn(d, |i, j| cols[j][i]))
}

/// Gaussian element of the Lie algebra: the imaginary part of each
/// diagonal entry and both parts of each strictly-lower entry are
/// independent `N(0, σ²)`; the upper triangle follows from `A = −A*`.
pub fn sample_gaussian_su<T: Real>(rng: &mut Rng, d: usize, sigma: T) -> SkewHermitianMatrix<T> {
    assert!(d >= 1, "dimension must be at least 1");
    assert!(sigma > T::zero(), "sigma must be positive");
    let mut m = ComplexMatrix::<T>::zeros(d);
    for i in 0..d {
        m[(i, i)] = Complex::new(T::zero(), sigma * T::lit(rng.normal()));
        for j in 0..i {
            let re = sigma * T::lit(rng.normal());
            let im = sigma * T::lit(rng.normal());
            m[(i, j)] = Complex::new(re, im);
            m[(j, i)] = Complex::new(-re, im);
        }
    }
    SkewHermitianMatrix::new(m).expect("skew-Hermitian by construction")
}
