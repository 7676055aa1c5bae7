//! Classical simulation laboratory for period finding over the real line.
//!
//! A hidden periodic function is modeled exactly (rational or quadratic-surd
//! period), a two-register measurement process is simulated either on a finite
//! grid or directly on the frequency lattice, and the period is recovered from
//! measured eigenvalues through continued-fraction postprocessing. A companion
//! module verifies the coprimality bounds that control how many measurement
//! rounds the recovery loop needs.
//!
//! Floating-point numerics are generic over the scalar type via [`Real`];
//! everything number-theoretic runs on exact big integers and big rationals.

pub mod arith;
pub mod contfrac;
pub mod function;
pub mod prob;
pub mod recovery;
pub mod scalar;
pub mod seed;
pub mod sim;

pub use scalar::Real;

/// Concrete f64 instantiations used by the CLI and most callers.
pub type PeriodicFn = function::PeriodicFunction<f64>;
pub type Comb = function::LatticeComb<f64>;
pub type GridState = sim::TwoRegisterState<f64>;
pub type Distribution = sim::FrequencyDistribution<f64>;
pub type Weights = sim::WeightTable<f64>;
pub type Recovery = recovery::RecoveryResult<f64>;
