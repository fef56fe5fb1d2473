//! Small complex matrices on the unitary group and its Lie algebra.
//!
//! [`ComplexMatrix`] is the storage type; [`UnitaryMatrix`] and
//! [`SkewHermitianMatrix`] are validated wrappers that dereference to it.
//! Exponentials of skew-Hermitian generators go through the spectral
//! decomposition of the Hermitian matrix `iA`, so the result is unitary up
//! to roundoff regardless of the step size.

mod eigen;
mod matrix;
mod random;

use std::ops::Deref;

use num_complex::Complex;

pub use eigen::{hermitian_eigen, HermitianEigen};
pub use matrix::ComplexMatrix;
pub use random::{sample_gaussian_su, sample_haar, Rng};

use crate::error::{LoheError, Result};
use crate::scalar::Real;

/// Element of U(d): `U*U = I` up to [`Real::UNITARY_TOL`].
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryMatrix<T>(ComplexMatrix<T>);

impl<T: Real> UnitaryMatrix<T> {
    pub fn new(m: ComplexMatrix<T>) -> Result<Self> {
        let defect = m.unitarity_defect();
        if !(defect <= T::lit(T::UNITARY_TOL)) {
            return Err(LoheError::NotUnitary {
                defect: defect.as_f64(),
            });
        }
        Ok(Self(m))
    }

    /// Wraps a product of unitary factors without re-checking; callers
    /// track drift themselves.
    pub(crate) fn new_unchecked(m: ComplexMatrix<T>) -> Self {
        Self(m)
    }

    pub fn identity(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim))
    }

    /// `e^{-iθ}` as a 1×1 unitary.
    pub fn from_phase(theta: T) -> Self {
        Self(ComplexMatrix::from_diagonal(&[Complex::from_polar(
            T::one(),
            -theta,
        )]))
    }

    pub fn as_matrix(&self) -> &ComplexMatrix<T> {
        &self.0
    }

    pub fn into_inner(self) -> ComplexMatrix<T> {
        self.0
    }

    /// Product of two unitaries; unitary up to roundoff.
    pub fn compose(&self, rhs: &UnitaryMatrix<T>) -> UnitaryMatrix<T> {
        Self(self.0.matmul(&rhs.0))
    }

    pub fn inverse(&self) -> UnitaryMatrix<T> {
        Self(self.0.adjoint())
    }

    pub fn cast<S: Real>(&self) -> UnitaryMatrix<S> {
        UnitaryMatrix(self.0.cast())
    }
}

impl<T> Deref for UnitaryMatrix<T> {
    type Target = ComplexMatrix<T>;
    fn deref(&self) -> &ComplexMatrix<T> {
        &self.0
    }
}

/// Element of the Lie algebra: `A + A* = 0`.
///
/// Dimension one admits any purely imaginary scalar, so the diagonal is not
/// restricted to trace zero.
#[derive(Clone, Debug, PartialEq)]
pub struct SkewHermitianMatrix<T>(ComplexMatrix<T>);

impl<T: Real> SkewHermitianMatrix<T> {
    pub fn new(m: ComplexMatrix<T>) -> Result<Self> {
        let defect = m.skew_defect();
        if !(defect <= T::lit(T::SKEW_TOL) * (T::one() + m.frobenius_norm())) {
            return Err(LoheError::NotSkewHermitian {
                defect: defect.as_f64(),
            });
        }
        Ok(Self(m))
    }

    /// Skew-Hermitian part `(M − M*)/2`, exact by construction.
    pub fn skew_part(m: &ComplexMatrix<T>) -> Self {
        Self((m - &m.adjoint()).scale(T::lit(0.5)))
    }

    /// `M − M*`, exact by construction.
    pub(crate) fn difference_with_adjoint(m: &ComplexMatrix<T>) -> Self {
        Self(m - &m.adjoint())
    }

    pub fn zeros(dim: usize) -> Self {
        Self(ComplexMatrix::zeros(dim))
    }

    /// `−iH` for a Hermitian `H`. The input is symmetrized.
    pub fn from_hamiltonian(h: &ComplexMatrix<T>) -> Self {
        let minus_i = Complex::new(T::zero(), -T::one());
        let herm = (h + &h.adjoint()).scale(T::lit(0.5));
        Self::skew_part(&herm.scale_complex(minus_i))
    }

    /// The Hermitian `H = iA`.
    pub fn hamiltonian(&self) -> ComplexMatrix<T> {
        self.0.scale_complex(Complex::new(T::zero(), T::one()))
    }

    pub fn as_matrix(&self) -> &ComplexMatrix<T> {
        &self.0
    }

    pub fn into_inner(self) -> ComplexMatrix<T> {
        self.0
    }

    pub fn scale(&self, s: T) -> Self {
        Self(self.0.scale(s))
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self(&self.0 + &rhs.0)
    }

    pub fn cast<S: Real>(&self) -> SkewHermitianMatrix<S> {
        SkewHermitianMatrix(self.0.cast())
    }
}

impl<T> Deref for SkewHermitianMatrix<T> {
    type Target = ComplexMatrix<T>;
    fn deref(&self) -> &ComplexMatrix<T> {
        &self.0
    }
}

/// `exp(tA)` through the spectral decomposition `iA = W Λ W*`, giving
/// `exp(tA) = W diag(e^{-itλ}) W*`.
pub fn expm_skew<T: Real>(a: &SkewHermitianMatrix<T>, t: T) -> Result<UnitaryMatrix<T>> {
    let d = a.dim();
    if t == T::zero() || a.entries().iter().all(|z| z.re == T::zero() && z.im == T::zero()) {
        return Ok(UnitaryMatrix::identity(d));
    }
    let eig = hermitian_eigen(&a.hamiltonian())?;
    Ok(UnitaryMatrix::new_unchecked(
        eig.map_spectrum(|l| Complex::from_polar(T::one(), -(t * l))),
    ))
}

/// Unitary polar factor `Q` of `M = Q P`.
pub fn retract_unitary<T: Real>(m: &ComplexMatrix<T>) -> Result<UnitaryMatrix<T>> {
    let gram = m.adjoint().matmul(m);
    let eig = hermitian_eigen(&gram)?;
    let largest = eig.values.iter().fold(T::zero(), |acc, &v| acc.max(v));
    let smallest = eig.values.iter().fold(T::infinity(), |acc, &v| acc.min(v));
    let floor = T::epsilon() * T::lit(64.0) * largest;
    if !(largest > T::zero()) || smallest <= floor {
        return Err(LoheError::SingularMatrix);
    }
    let inv_sqrt = eig.map_spectrum(|l| Complex::new(T::one() / l.sqrt(), T::zero()));
    Ok(UnitaryMatrix::new_unchecked(m.matmul(&inv_sqrt)))
}

/// Synchronization kernel `K(U, V) = UV* − VU*`.
pub fn coupling_kernel<T: Real>(
    u: &UnitaryMatrix<T>,
    v: &UnitaryMatrix<T>,
) -> Result<SkewHermitianMatrix<T>> {
    u.check_dim(v)?;
    Ok(SkewHermitianMatrix::difference_with_adjoint(&u.mul_adjoint(v)))
}
