//! Cyclic Jacobi eigensolver for small Hermitian matrices.

use num_complex::Complex;

use crate::error::{LoheError, Result};
use crate::matcore::matrix::ComplexMatrix;
use crate::scalar::Real;

const MAX_SWEEPS: usize = 64;

/// Spectral decomposition `H = W diag(values) W*` with ascending `values`
/// and orthonormal eigenvector columns in `vectors`.
#[derive(Clone, Debug)]
pub struct HermitianEigen<T> {
    pub values: Vec<T>,
    pub vectors: ComplexMatrix<T>,
}

impl<T: Real> HermitianEigen<T> {
    /// `W diag(f(λ)) W*`.
    pub fn map_spectrum(&self, f: impl Fn(T) -> Complex<T>) -> ComplexMatrix<T> {
        let d = self.vectors.dim();
        let w = &self.vectors;
        let fl: Vec<Complex<T>> = self.values.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(d, |i, j| {
            (0..d).fold(Complex::new(T::zero(), T::zero()), |acc, k| {
                acc + w[(i, k)] * fl[k] * w[(j, k)].conj()
            })
        })
    }
}

/// Diagonalizes a Hermitian matrix. Only the upper triangle and the real
/// part of the diagonal are trusted; the input is symmetrized first.
pub fn hermitian_eigen<T: Real>(h: &ComplexMatrix<T>) -> Result<HermitianEigen<T>> {
    let d = h.dim();
    let half = T::lit(0.5);
    let mut a = ComplexMatrix::from_fn(d, |i, j| (h[(i, j)] + h[(j, i)].conj()) * half);
    let mut v = ComplexMatrix::<T>::identity(d);

    let scale = a.frobenius_norm();
    if scale == T::zero() {
        return Ok(HermitianEigen {
            values: vec![T::zero(); d],
            vectors: v,
        });
    }
    let threshold = T::epsilon() * scale;

    let mut converged = d == 1;
    for _ in 0..MAX_SWEEPS {
        let off = off_diagonal_norm(&a);
        if off <= threshold {
            converged = true;
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > threshold {
        return Err(LoheError::EigenNonConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..d).collect();
    let diag: Vec<T> = (0..d).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = ComplexMatrix::from_fn(d, |i, k| v[(i, order[k])]);
    Ok(HermitianEigen { values, vectors })
}

fn off_diagonal_norm<T: Real>(a: &ComplexMatrix<T>) -> T {
    let d = a.dim();
    let mut s = T::zero();
    for p in 0..d {
        for q in (p + 1)..d {
            s += a[(p, q)].norm_sqr();
        }
    }
    (s + s).sqrt()
}

/// One complex Jacobi rotation annihilating `a[p][q]`.
///
/// The rotation is `J = diag(1, e^{-iφ}) · R(c, s)` on the (p, q) plane,
/// where `φ = arg a[p][q]` turns the pivot real and `R` is the classical
/// real Jacobi rotation.
fn rotate<T: Real>(a: &mut ComplexMatrix<T>, v: &mut ComplexMatrix<T>, p: usize, q: usize) {
    let d = a.dim();
    let b = a[(p, q)];
    let bn = b.norm();
    if bn == T::zero() {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    if bn <= T::epsilon() * T::epsilon() * (app.abs() + aqq.abs()) {
        a[(p, q)] = Complex::new(T::zero(), T::zero());
        a[(q, p)] = Complex::new(T::zero(), T::zero());
        return;
    }
    let phase_conj = (b / bn).conj();
    let two = T::lit(2.0);
    let theta = (aqq - app) / (two * bn);
    let t = if theta == T::zero() {
        T::one()
    } else {
        theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt())
    };
    let c = T::one() / (t * t + T::one()).sqrt();
    let s = t * c;

    let j_pp = Complex::new(c, T::zero());
    let j_pq = Complex::new(s, T::zero());
    let j_qp = phase_conj * (-s);
    let j_qq = phase_conj * c;

    for k in 0..d {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * j_pp + akq * j_qp;
        a[(k, q)] = akp * j_pq + akq * j_qq;
    }
    for k in 0..d {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = j_pp.conj() * apk + j_qp.conj() * aqk;
        a[(q, k)] = j_pq.conj() * apk + j_qq.conj() * aqk;
    }
    a[(p, q)] = Complex::new(T::zero(), T::zero());
    a[(q, p)] = Complex::new(T::zero(), T::zero());
    a[(p, p)].im = T::zero();
    a[(q, q)].im = T::zero();

    for k in 0..d {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * j_pp + vkq * j_qp;
        v[(k, q)] = vkp * j_pq + vkq * j_qq;
    }
}
