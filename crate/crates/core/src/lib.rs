//! Uncertainty products and nodal structure of three textbook quantum systems:
//! the particle in a one-dimensional box, the particle on a ring and the
//! harmonic oscillator.
//!
//! Every quantity is available along three independent routes:
//!
//! * [`analytic`]: closed-form expectation values, uncertainties and energies;
//! * [`oracle`]: quadrature and finite-difference moments of sampled
//!   wavefunctions, never touching the closed forms;
//! * [`eigen`]: finite-difference Hamiltonians whose lowest eigenpairs are
//!   found by Sturm bisection and inverse iteration.
//!
//! [`nodes`] counts sign changes of sampled states and [`report`] reconciles
//! the three routes into CSV/JSON sweeps.
//!
//! The numerical core is generic over the scalar type through [`Real`]; the
//! `*F64` aliases below are what the command-line front end uses.

pub mod analytic;
pub mod eigen;
mod error;
mod linalg;
pub mod model;
pub mod nodes;
pub mod oracle;
pub mod report;
pub mod special;

pub use error::{Error, Result};
pub use model::{Constants, RingState, RingSuperposition, StateIndex, SystemKind, SystemSpec};

use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating-point scalar used throughout the numerical core (`f32` or `f64`).
pub trait Real: Float + FloatConst + FromPrimitive + Debug + Display + LowerExp + Default + Send + Sync + 'static {
    /// Converts an `f64` literal into `Self`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in target float")
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in target float")
    }

    #[inline]
    fn from_level(n: i64) -> Self {
        Self::from_i64(n).expect("quantum number representable in target float")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub type Complex<T> = num_complex::Complex<T>;

pub type ConstantsF64 = model::Constants<f64>;
pub type SystemSpecF64 = model::SystemSpec<f64>;
pub type RingSuperpositionF64 = model::RingSuperposition<f64>;
pub type RingStateF64 = model::RingState<f64>;
pub type ExpectationSetF64 = analytic::ExpectationSet<f64>;
pub type UncertaintyRecordF64 = analytic::UncertaintyRecord<f64>;
pub type GridSpecF64 = oracle::GridSpec<f64>;
pub type SampledFunctionF64 = oracle::SampledFunction<f64>;
pub type HamiltonianF64 = eigen::Hamiltonian<f64>;
pub type EigenResultF64 = eigen::EigenResult<f64>;
pub type NodeReportF64 = nodes::NodeReport<f64>;

pub type SystemSpecF32 = model::SystemSpec<f32>;
pub type GridSpecF32 = oracle::GridSpec<f32>;
