//! Finite simulation of the two-register measurement pipeline.
//!
//! Two modes realize the same measurement contract. Grid mode discretizes
//! one window of the real line, applies the discrete Fourier transform per
//! right-register value bin, and measures the left register; it validates
//! the lattice-support structure honestly. Ideal mode samples the frequency
//! lattice {n/P} directly and is the fast path for end-to-end recovery runs.

pub mod grid;
pub mod measure;

use thiserror::Error;

pub use grid::{
    apply_fourier, left_register_distribution, prepare_superposition, FrequencyDistribution,
    FrequencyPoint, TwoRegisterState,
};
pub use measure::{
    ideal_lattice_sample, measure_observable, MeasurementMode, MeasurementOutcome, WeightTable,
};

use crate::function::QuadratureError;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("grid mode needs a rational period, got {0}")]
    IrrationalPeriod(String),
    #[error("need at least 2 samples per period, got {0}")]
    TooFewSamples(usize),
    #[error("need at least 1 window period, got {0}")]
    EmptyWindow(usize),
    #[error("state must be transformed before reading the left register")]
    NotTransformed,
    #[error("probabilities sum to {0}, expected 1")]
    NotNormalized(f64),
    #[error("modulus must be at least 1")]
    ZeroModulus,
    #[error("no lattice weight in the window |n| <= {n_max} (largest coefficient {max_coeff:.3e}); widen the window or check the function")]
    EmptyWeights { n_max: u64, max_coeff: f64 },
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}
