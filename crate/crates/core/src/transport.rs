//! Monge–Kantorovich distances between equal-size empirical measures.
//!
//! For two clouds of `N` equally weighted points the optimal coupling can be
//! taken to be a permutation, so the distance reduces to a linear
//! assignment problem on the `N × N` ground-cost matrix, solved exactly
//! with the shortest-augmenting-path Hungarian method in `O(N³)`.

use crate::error::{LoheError, Result};
use crate::model::{check_uniform_dim, Oscillator};
use crate::scalar::Real;
use crate::UnitaryMatrix;

/// Uniformly weighted point cloud on U(d) × 𝔲(d).
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud<T> {
    points: Vec<Oscillator<T>>,
}

impl<T: Real> PointCloud<T> {
    pub fn new(points: Vec<Oscillator<T>>) -> Result<Self> {
        check_uniform_dim(&points)?;
        Ok(Self { points })
    }

    /// Points with zero generators.
    pub fn from_unitaries(us: Vec<UnitaryMatrix<T>>) -> Result<Self> {
        Self::new(us.into_iter().map(Oscillator::at_rest).collect())
    }

    pub fn points(&self) -> &[Oscillator<T>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exponent {
    One,
    Two,
}

/// Ground cost: `‖ΔU‖₂ + ‖ΔA‖₂` for exponent one, `‖ΔU‖₂² + ‖ΔA‖₂²` for two.
pub fn pair_cost<T: Real>(p: &Oscillator<T>, q: &Oscillator<T>, exponent: Exponent) -> Result<T> {
    p.u.check_dim(&q.u)?;
    let du = p.u.distance_sqr(&q.u);
    let da = p.a.distance_sqr(&q.a);
    Ok(match exponent {
        Exponent::One => du.sqrt() + da.sqrt(),
        Exponent::Two => du + da,
    })
}

/// Square matrix of nonnegative finite costs, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CostMatrix<T> {
    n: usize,
    costs: Vec<T>,
}

impl<T: Real> CostMatrix<T> {
    pub fn new(n: usize, costs: Vec<T>) -> Result<Self> {
        if n == 0 || costs.len() != n * n {
            return Err(LoheError::InvalidArgument(format!(
                "cost matrix of size {n} needs {} entries, found {}",
                n * n,
                costs.len()
            )));
        }
        if let Some(bad) = costs.iter().find(|c| !(c.is_finite() && **c >= T::zero())) {
            return Err(LoheError::InvalidArgument(format!(
                "costs must be finite and nonnegative, found {bad}"
            )));
        }
        Ok(Self { n, costs })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Result<Self> {
        let mut costs = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                costs.push(f(i, j));
            }
        }
        Self::new(n, costs)
    }

    /// Ground costs between two equal-size clouds.
    pub fn between(a: &PointCloud<T>, b: &PointCloud<T>, exponent: Exponent) -> Result<Self> {
        if a.len() != b.len() {
            return Err(LoheError::UnequalClouds {
                left: a.len(),
                right: b.len(),
            });
        }
        let n = a.len();
        let mut costs = Vec::with_capacity(n * n);
        for p in a.points() {
            for q in b.points() {
                costs.push(pair_cost(p, q, exponent)?);
            }
        }
        Self::new(n, costs)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.costs[i * self.n + j]
    }

    /// `Σ_i costs[i][perm[i]]`, summed in row order.
    pub fn total(&self, perm: &[usize]) -> T {
        perm.iter()
            .enumerate()
            .fold(T::zero(), |acc, (i, &j)| acc + self.get(i, j))
    }
}

/// Optimal permutation (row `i` assigned to column `permutation[i]`) and its
/// total cost.
#[derive(Clone, Debug, PartialEq)]
pub struct Assignment<T> {
    pub permutation: Vec<usize>,
    pub total: T,
}

/// Exact minimum-cost perfect matching.
pub fn assignment_solve<T: Real>(c: &CostMatrix<T>) -> Assignment<T> {
    let n = c.size();
    // 1-based potentials and matching, row 0 / column 0 are sentinels
    let mut u = vec![T::zero(); n + 1];
    let mut v = vec![T::zero(); n + 1];
    let mut row_of_col = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        row_of_col[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![T::infinity(); n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of_col[j0];
            let mut delta = T::infinity();
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = c.get(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of_col[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of_col[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of_col[j0] = row_of_col[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut permutation = vec![0usize; n];
    for j in 1..=n {
        permutation[row_of_col[j] - 1] = j - 1;
    }
    let total = c.total(&permutation);
    Assignment { permutation, total }
}

/// `dist_MK,p` between equal-size uniform clouds: the optimal mean cost for
/// exponent one, its square root for exponent two.
pub fn mk_distance<T: Real>(a: &PointCloud<T>, b: &PointCloud<T>, exponent: Exponent) -> Result<T> {
    let costs = CostMatrix::between(a, b, exponent)?;
    let mean = assignment_solve(&costs).total / T::from_usize(a.len()).unwrap();
    Ok(match exponent {
        Exponent::One => mean,
        Exponent::Two => mean.sqrt(),
    })
}
