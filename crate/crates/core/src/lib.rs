//! Simulation and verification toolkit for the Lohe matrix model of
//! coupled quantum oscillators on the unitary group U(d).
//!
//! The crate integrates the interacting N-oscillator system, solves the
//! kinetic (mean-field) equation along frozen-field characteristics,
//! measures the discrepancy between the two in Monge–Kantorovich distance,
//! and evaluates the synchronization diagnostics and closed-form bounds
//! they are compared against.
//!
//! All numerics are generic over a [`Real`] scalar (`f32` or `f64`); the
//! `*64` aliases below fix the double-precision instantiation used by the
//! experiment driver.

// `!(x > 0)` style guards also reject NaN, which `x <= 0` would let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod integrate;
pub mod matcore;
pub mod meanfield;
pub mod model;
pub mod scalar;
pub mod transport;

pub use error::{LoheError, Result};
pub use integrate::{Method, StepperConfig, Trajectory};
pub use matcore::{ComplexMatrix, Rng, SkewHermitianMatrix, UnitaryMatrix};
pub use model::{Ensemble, KuramotoState, Oscillator, SwarmState};
pub use scalar::Real;

/// Version of this library, echoed into experiment manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub type ComplexMatrix64 = ComplexMatrix<f64>;
pub type UnitaryMatrix64 = UnitaryMatrix<f64>;
pub type SkewHermitianMatrix64 = SkewHermitianMatrix<f64>;
pub type Oscillator64 = Oscillator<f64>;
pub type Ensemble64 = Ensemble<f64>;
pub type Trajectory64 = Trajectory<f64>;
pub type StepperConfig64 = StepperConfig<f64>;
pub type KuramotoState64 = KuramotoState<f64>;
pub type SwarmState64 = SwarmState<f64>;
pub type FieldTrajectory64 = meanfield::FieldTrajectory<f64>;
pub type DiagnosticSeries64 = analysis::DiagnosticSeries<f64>;

pub type ComplexMatrix32 = ComplexMatrix<f32>;
pub type UnitaryMatrix32 = UnitaryMatrix<f32>;
pub type Ensemble32 = Ensemble<f32>;
