use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use num_complex::Complex;

use crate::error::{LoheError, Result};
use crate::matcore::eigen::hermitian_eigen;
use crate::scalar::Real;

/// Dense square complex matrix stored row-major.
///
/// Sizes in this crate are small (d ≤ 16 in practice), so every operation
/// allocates a fresh matrix rather than working in place.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix<T> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be at least 1");
        Self {
            dim,
            data: vec![Complex::new(T::zero(), T::zero()); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        assert!(dim >= 1, "matrix dimension must be at least 1");
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// Builds a matrix from row-major entries; `entries.len()` must be a
    /// nonzero perfect square.
    pub fn from_row_major(entries: Vec<Complex<T>>) -> Result<Self> {
        let dim = (entries.len() as f64).sqrt().round() as usize;
        if dim == 0 || dim * dim != entries.len() {
            return Err(LoheError::InvalidArgument(format!(
                "{} entries do not form a square matrix",
                entries.len()
            )));
        }
        Ok(Self { dim, data: entries })
    }

    pub fn from_diagonal(diag: &[Complex<T>]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &z) in diag.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    /// Interleaved `[re, im, re, im, ...]` layout, row-major.
    pub fn from_interleaved(dim: usize, values: &[T]) -> Result<Self> {
        if dim == 0 || values.len() != 2 * dim * dim {
            return Err(LoheError::InvalidArgument(format!(
                "expected {} interleaved values for d = {dim}, found {}",
                2 * dim * dim,
                values.len()
            )));
        }
        let data = values
            .chunks_exact(2)
            .map(|p| Complex::new(p[0], p[1]))
            .collect();
        Ok(Self { dim, data })
    }

    pub fn to_interleaved(&self) -> Vec<T> {
        self.data.iter().flat_map(|z| [z.re, z.im]).collect()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        Self::from_fn(d, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.dim).fold(Complex::new(T::zero(), T::zero()), |acc, i| {
            acc + self[(i, i)]
        })
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_complex(&self, s: Complex<T>) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    /// `sqrt(trace(M*M))`.
    pub fn frobenius_norm(&self) -> T {
        self.frobenius_norm_sqr().sqrt()
    }

    pub fn frobenius_norm_sqr(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, z| acc + z.norm_sqr())
    }

    /// Largest singular value, from the spectrum of `M*M`.
    pub fn operator_norm(&self) -> T {
        let gram = self.adjoint().matmul(self);
        match hermitian_eigen(&gram) {
            Ok(eig) => eig
                .values
                .iter()
                .fold(T::zero(), |acc, &v| acc.max(v))
                .sqrt(),
            // Jacobi on a d ≤ 64 Gram matrix does not fail in practice; fall
            // back to the Frobenius bound rather than panic.
            Err(_) => self.frobenius_norm(),
        }
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "matrix dimension mismatch");
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self.data[i * d + k];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                for j in 0..d {
                    out.data[i * d + j] += a * rhs.data[k * d + j];
                }
            }
        }
        out
    }

    /// `self * rhs*` without materializing the adjoint.
    pub fn mul_adjoint(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "matrix dimension mismatch");
        let d = self.dim;
        Self::from_fn(d, |i, j| {
            (0..d).fold(Complex::new(T::zero(), T::zero()), |acc, k| {
                acc + self.data[i * d + k] * rhs.data[j * d + k].conj()
            })
        })
    }

    /// `trace(self* rhs)`, the Frobenius inner product.
    pub fn inner(&self, rhs: &Self) -> Complex<T> {
        assert_eq!(self.dim, rhs.dim, "matrix dimension mismatch");
        self.data
            .iter()
            .zip(&rhs.data)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| {
                acc + a.conj() * b
            })
    }

    /// `‖self − rhs‖₂²` without allocating the difference.
    pub fn distance_sqr(&self, rhs: &Self) -> T {
        assert_eq!(self.dim, rhs.dim, "matrix dimension mismatch");
        self.data
            .iter()
            .zip(&rhs.data)
            .fold(T::zero(), |acc, (a, b)| acc + (a - b).norm_sqr())
    }

    pub fn distance(&self, rhs: &Self) -> T {
        self.distance_sqr(rhs).sqrt()
    }

    /// `‖M*M − I‖₂`.
    pub fn unitarity_defect(&self) -> T {
        let gram = self.adjoint().matmul(self);
        (gram - Self::identity(self.dim)).frobenius_norm()
    }

    /// `‖M + M*‖₂`.
    pub fn skew_defect(&self) -> T {
        (self + &self.adjoint()).frobenius_norm()
    }

    pub fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(LoheError::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    /// Arithmetic mean of a nonempty sequence, summed left to right.
    pub fn mean<'a, I>(items: I) -> Option<Self>
    where
        I: IntoIterator<Item = &'a Self>,
    {
        let mut iter = items.into_iter();
        let mut acc = iter.next()?.clone();
        let mut count = 1usize;
        for m in iter {
            acc += m;
            count += 1;
        }
        Some(acc.scale(T::one() / T::from_usize(count).unwrap()))
    }

    pub fn cast<S: Real>(&self) -> ComplexMatrix<S> {
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .map(|z| Complex::new(S::lit(z.re.as_f64()), S::lit(z.im.as_f64())))
                .collect(),
        }
    }
}

impl<T> Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = Complex<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.dim + j]
    }
}

impl<T> IndexMut<(usize, usize)> for ComplexMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.dim + j]
    }
}

impl<T: Real> AddAssign<&ComplexMatrix<T>> for ComplexMatrix<T> {
    fn add_assign(&mut self, rhs: &ComplexMatrix<T>) {
        assert_eq!(self.dim, rhs.dim, "matrix dimension mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a = *a + b;
        }
    }
}

impl<T: Real> SubAssign<&ComplexMatrix<T>> for ComplexMatrix<T> {
    fn sub_assign(&mut self, rhs: &ComplexMatrix<T>) {
        assert_eq!(self.dim, rhs.dim, "matrix dimension mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a = *a - b;
        }
    }
}

impl<T: Real> Add<&ComplexMatrix<T>> for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn add(self, rhs: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<T: Real> Sub<&ComplexMatrix<T>> for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn sub(self, rhs: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<T: Real> Add for ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn add(mut self, rhs: ComplexMatrix<T>) -> ComplexMatrix<T> {
        self += &rhs;
        self
    }
}

impl<T: Real> Sub for ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn sub(mut self, rhs: ComplexMatrix<T>) -> ComplexMatrix<T> {
        self -= &rhs;
        self
    }
}

impl<T: Real> Mul<&ComplexMatrix<T>> for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn mul(self, rhs: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        self.matmul(rhs)
    }
}

impl<T: Real> Mul for ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn mul(self, rhs: ComplexMatrix<T>) -> ComplexMatrix<T> {
        self.matmul(&rhs)
    }
}

impl<T: Real> Neg for ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn neg(mut self) -> ComplexMatrix<T> {
        for z in self.data.iter_mut() {
            *z = -*z;
        }
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = ComplexMatrix<f64>;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn identity_frobenius_is_sqrt_dim() {
        for d in 1..6 {
            let n = M::identity(d).frobenius_norm();
            assert!((n - (d as f64).sqrt()).abs() < 1e-15);
        }
        assert_eq!(M::zeros(3).frobenius_norm(), 0.0);
    }

    #[test]
    fn operator_norm_of_diagonal() {
        assert!((M::identity(4).operator_norm() - 1.0).abs() < 1e-14);
        let m = M::from_diagonal(&[c(3.0, 0.0), c(0.0, -4.0)]);
        assert!((m.operator_norm() - 4.0).abs() < 1e-13);
    }

    #[test]
    fn interleaved_layout_is_row_major() {
        let m = M::from_fn(2, |i, j| c(i as f64, j as f64));
        assert_eq!(
            m.to_interleaved(),
            vec![0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 1.0, 1.0]
        );
        assert_eq!(M::from_interleaved(2, &m.to_interleaved()).unwrap(), m);
        assert!(M::from_interleaved(2, &[0.0; 6]).is_err());
    }

    #[test]
    fn mul_adjoint_matches_explicit_product() {
        let a = M::from_fn(3, |i, j| c(i as f64 - j as f64, (i * j) as f64));
        let b = M::from_fn(3, |i, j| c((i + 2 * j) as f64, 1.0 - i as f64));
        let direct = a.matmul(&b.adjoint());
        assert!(direct.distance(&a.mul_adjoint(&b)) < 1e-14);
        let inner = a.inner(&b);
        assert!((inner - a.adjoint().matmul(&b).trace()).norm() < 1e-13);
    }

    #[test]
    fn mean_sums_left_to_right() {
        let ms = [M::identity(2), M::identity(2).scale(3.0)];
        let mean = M::mean(ms.iter()).unwrap();
        assert!(mean.distance(&M::identity(2).scale(2.0)) < 1e-15);
        assert!(M::mean(std::iter::empty()).is_none());
    }
}
