//! Bayes factors for linear models computed from study summaries, their
//! meta-analytic synthesis, and a simulation harness for comparing synthesis
//! methods against the pooled-data Bayes factor.
//!
//! Numerical building blocks are generic over the scalar type through
//! [`Real`]; the aliases below fix the common choices.

pub mod bf;
pub mod distributions;
pub mod error;
pub mod evidence;
pub mod io;
pub mod quadrature;
pub mod rawdata;
pub mod real;
pub mod simulation;
pub mod special;
pub mod synthesis;

pub use error::{Error, Result};
pub use real::Real;

/// Double-precision Bayes factor.
pub type LogBf64 = bf::LogBf<f64>;
/// Single-precision Bayes factor.
pub type LogBf32 = bf::LogBf<f32>;
pub type GPrior64 = bf::GPrior<f64>;
pub type GPrior32 = bf::GPrior<f32>;
pub type Dof64 = distributions::DegreesOfFreedom<f64>;
pub type Dof32 = distributions::DegreesOfFreedom<f32>;
pub type Noncentrality64 = distributions::Noncentrality<f64>;
pub type Noncentrality32 = distributions::Noncentrality<f32>;
