//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssignOps, ToPrimitive};

/// Real floating-point type the matrix code is generic over.
///
/// Besides the arithmetic bounds, each implementation carries the
/// tolerances that depend on the precision of the type: the unitarity
/// threshold used to accept a [`UnitaryMatrix`](crate::UnitaryMatrix), the
/// tighter one expected of freshly sampled or retracted values, and the
/// level at which integration drift is considered fatal.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + NumAssignOps + Debug + Display + Send + Sync + 'static
{
    /// Largest `‖U*U − I‖₂` accepted when constructing a unitary matrix.
    const UNITARY_TOL: f64;
    /// Largest `‖U*U − I‖₂` expected right after sampling or retraction.
    const FRESH_UNITARY_TOL: f64;
    /// Largest `‖A + A*‖₂` accepted for a skew-Hermitian matrix.
    const SKEW_TOL: f64;
    /// Drift beyond which an integration run is aborted.
    const DRIFT_ABORT_TOL: f64;

    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in every Real type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("Real values convert to f64")
    }
}

impl Real for f64 {
    const UNITARY_TOL: f64 = 1e-8;
    const FRESH_UNITARY_TOL: f64 = 1e-12;
    const SKEW_TOL: f64 = 1e-12;
    const DRIFT_ABORT_TOL: f64 = 1e-6;
}

impl Real for f32 {
    const UNITARY_TOL: f64 = 1e-4;
    const FRESH_UNITARY_TOL: f64 = 1e-5;
    const SKEW_TOL: f64 = 1e-5;
    const DRIFT_ABORT_TOL: f64 = 1e-3;
}
