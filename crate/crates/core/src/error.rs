use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LoheError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not unitary (‖U*U − I‖₂ = {defect:e})")]
    NotUnitary { defect: f64 },
    #[error("matrix is not skew-Hermitian (‖A + A*‖₂ = {defect:e})")]
    NotSkewHermitian { defect: f64 },
    #[error("no unique polar factor: matrix is singular")]
    SingularMatrix,
    #[error("Hermitian eigendecomposition did not converge after {sweeps} sweeps")]
    EigenNonConvergence { sweeps: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unitarity drift {drift:e} at t = {time} exceeds abort threshold")]
    UnitarityDrift { drift: f64, time: f64 },
    #[error("splitting requires equal Hamiltonians")]
    UnequalHamiltonians,
    #[error("time grid mismatch: no field value at t = {time}")]
    GridMismatch { time: f64 },
    #[error("equal-size clouds required ({left} vs {right})")]
    UnequalClouds { left: usize, right: usize },
    #[error("no two nonnegative roots for eta = {eta}")]
    NoTwoRoots { eta: f64 },
    #[error("outside barrier regime: {0}")]
    OutsideBarrierRegime(String),
    #[error("outside small-support regime: D(0) = {d0} must be below sqrt(2)")]
    OutsideSmallSupport { d0: f64 },
    #[error("outside practical-synchronization regime: kappa = {kappa} must exceed (3/2)^(3/2) alpha = {threshold}")]
    OutsidePracticalRegime { kappa: f64, threshold: f64 },
}

pub type Result<T> = std::result::Result<T, LoheError>;
