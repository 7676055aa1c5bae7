//! Sampling measurement outcomes from either register model.
//!
//! Grid mode draws a frequency cell from a transformed two-register state
//! and floors it against the modulus. Ideal mode skips the grid entirely:
//! it draws a lattice index n from the weight table and reports the floor
//! of Q·|n|/P computed in exact integer arithmetic, which is what an
//! infinite grid would concentrate on.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use rand::Rng;
use std::io::{self, Write};

use super::{FrequencyDistribution, SimError};
use crate::function::{fourier, Period, PeriodicFunction};
use crate::scalar::Real;

/// Relative cutoff below which a Fourier coefficient does not count as part
/// of the lattice support.
const SUPPORT_THRESHOLD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasurementMode {
    Grid,
    Ideal,
}

/// One measured eigenvalue m/q together with its integer parts and, when
/// the sampler knows it, the lattice index n that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasurementOutcome {
    pub eigenvalue: BigRational,
    pub m: BigInt,
    pub q: u64,
    pub lattice_index: Option<i64>,
    pub mode: MeasurementMode,
}

/// Draws one frequency cell y from the distribution and reports the floored
/// eigenvalue m/q with m = ⌊q·y⌋.
pub fn measure_observable<T: Real, R: Rng + ?Sized>(
    dist: &FrequencyDistribution<T>,
    q: u64,
    rng: &mut R,
) -> Result<MeasurementOutcome, SimError> {
    if q == 0 {
        return Err(SimError::ZeroModulus);
    }
    let total = dist.total().as_f64();
    if (total - 1.0).abs() > 1e-9 {
        return Err(SimError::NotNormalized(total));
    }
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    let mut chosen = None;
    for p in dist.points() {
        acc += p.probability.as_f64();
        if u < acc {
            chosen = Some(p);
            break;
        }
    }
    let point = chosen.unwrap_or_else(|| {
        dist.points()
            .iter()
            .rev()
            .find(|p| p.probability.as_f64() > 0.0)
            .expect("a normalized distribution has positive mass")
    });
    let qi = BigInt::from(q);
    let m = (&qi * point.y.numer()).div_floor(point.y.denom());
    Ok(MeasurementOutcome {
        eigenvalue: BigRational::new(m.clone(), qi),
        m,
        q,
        lattice_index: None,
        mode: MeasurementMode::Grid,
    })
}

/// Sampling weights for the lattice indices |n| ≤ n_max: uniform over the
/// indices whose Fourier coefficient is nonzero, zero elsewhere.
#[derive(Debug, Clone)]
pub struct WeightTable<T: Real> {
    n_max: u64,
    entries: Vec<(i64, T)>,
}

impl<T: Real> WeightTable<T> {
    pub fn build(f: &PeriodicFunction<T>, n_max: u64) -> Result<Self, SimError> {
        let comb = fourier::fourier_transform(f, n_max as i64)?;
        let support = comb.support_indices(T::of(SUPPORT_THRESHOLD));
        if support.is_empty() {
            let max_coeff = comb
                .entries()
                .iter()
                .map(|(_, c)| c.norm().as_f64())
                .fold(0.0, f64::max);
            return Err(SimError::EmptyWeights { n_max, max_coeff });
        }
        let w = T::one() / T::of(support.len() as f64);
        let entries = (-(n_max as i64)..=n_max as i64)
            .map(|n| (n, if support.binary_search(&n).is_ok() { w } else { T::zero() }))
            .collect();
        Ok(WeightTable { n_max, entries })
    }

    pub fn n_max(&self) -> u64 {
        self.n_max
    }

    pub fn entries(&self) -> &[(i64, T)] {
        &self.entries
    }

    /// Lattice indices that carry weight, ascending.
    pub fn support(&self) -> Vec<i64> {
        self.entries
            .iter()
            .filter(|(_, w)| *w > T::zero())
            .map(|(n, _)| *n)
            .collect()
    }

    /// Weight of index n; zero outside the window.
    pub fn weight(&self, n: i64) -> T {
        if n.unsigned_abs() > self.n_max {
            return T::zero();
        }
        self.entries[(n + self.n_max as i64) as usize].1
    }

    /// Draws one lattice index.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> i64 {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (n, w) in &self.entries {
            acc += w.as_f64();
            if u < acc {
                return *n;
            }
        }
        self.entries
            .iter()
            .rev()
            .find(|(_, w)| *w > T::zero())
            .expect("weight tables are built with nonempty support")
            .0
    }

    /// Draws an index n and reports the eigenvalue ⌊q·|n|/P⌋/q, the exact
    /// floor an unbounded grid would produce.
    pub fn sample_outcome<R: Rng + ?Sized>(
        &self,
        period: &Period,
        q: u64,
        rng: &mut R,
    ) -> Result<MeasurementOutcome, SimError> {
        if q == 0 {
            return Err(SimError::ZeroModulus);
        }
        let n = self.sample(rng);
        let m = period.floor_scaled(&BigInt::from(n.unsigned_abs()), &BigUint::from(q));
        Ok(MeasurementOutcome {
            eigenvalue: BigRational::new(m.clone(), BigInt::from(q)),
            m,
            q,
            lattice_index: Some(n),
            mode: MeasurementMode::Ideal,
        })
    }

    /// CSV rows `n,weight` over the full window.
    pub fn write_csv(&self, out: &mut dyn Write) -> io::Result<()> {
        writeln!(out, "n,weight")?;
        for (n, w) in &self.entries {
            writeln!(out, "{},{}", n, w.as_f64())?;
        }
        Ok(())
    }
}

/// One-shot ideal-mode draw: builds the weight table for f and samples one
/// outcome.
pub fn ideal_lattice_sample<T: Real, R: Rng + ?Sized>(
    f: &PeriodicFunction<T>,
    n_max: u64,
    q: u64,
    rng: &mut R,
) -> Result<MeasurementOutcome, SimError> {
    WeightTable::build(f, n_max)?.sample_outcome(f.period(), q, rng)
}
