//! Reconstructing the period from floored eigenvalue readings.
//!
//! A reading m/q with m = ⌊q·n/P⌋ pins n/P inside a window of width 1/q.
//! Once q ≥ 2·P², that window is tight enough that n/P must appear among
//! the convergents of m/q, so integer periods fall out of a single reading.
//! Rational periods a/b need two readings: convergents of the two values
//! that share a denominator q estimate two lattice fractions over a common
//! grid, and q divided by the gcd of the matched numerators is a period
//! candidate. Irrational periods use the same candidate stream as starting
//! points for a bracketed defect minimization, trading exactness for an
//! interval of requested width.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use std::cmp::Ordering;
use thiserror::Error;

use crate::arith::{gcd, gcd_int, ratio_to_f64};
use crate::contfrac::{cf_expand, convergents, ConvergentList};
use crate::function::{FunctionError, PeriodicFunction, DEFAULT_PERIOD_SAMPLES};
use crate::scalar::Real;
use crate::seed::child_seed;
use crate::sim::{
    apply_fourier, left_register_distribution, measure_observable, prepare_superposition,
    FrequencyDistribution, MeasurementOutcome, SimError, WeightTable,
};

/// Rounds of modulus escalation tried by the irrational pipeline.
pub const ESCALATION_ROUNDS: u32 = 8;

/// Modulus growth per escalation round.
const ESCALATION_FACTOR: u64 = 4;

/// Golden-section interior ratio (1/φ).
const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Error)]
pub enum RecoveryError {
    #[error("modulus {q} is below the guarantee threshold {needed}")]
    ModulusTooSmall { q: u64, needed: u64 },
    #[error("rational recovery needs a rational period, got {0}")]
    NotRational(String),
    #[error("interval recovery needs a continuous function")]
    NotContinuous,
    #[error("precision must be a positive finite number, got {0}")]
    BadPrecision(f64),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Function(#[from] FunctionError),
}

/// Modulus selection: derive from the declared period or use a fixed value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QMode {
    Auto,
    Fixed(u64),
}

/// Where readings come from: the closed-form lattice sampler or a finite
/// simulated grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplerMode {
    Ideal,
    Grid {
        samples_per_period: usize,
        window_periods: usize,
    },
}

#[derive(Debug, Clone)]
pub struct RecoveryConfig<T: Real> {
    pub q: QMode,
    /// Lattice window for the ideal sampler; defaults from the period.
    pub n_max: Option<u64>,
    /// Defect tolerance when testing period candidates.
    pub epsilon_period: T,
    pub max_iterations: usize,
    pub seed: u64,
    pub sampler: SamplerMode,
}

impl<T: Real> RecoveryConfig<T> {
    pub fn new(seed: u64) -> Self {
        RecoveryConfig {
            q: QMode::Auto,
            n_max: None,
            epsilon_period: T::of(1e-6),
            max_iterations: 25,
            seed,
            sampler: SamplerMode::Ideal,
        }
    }
}

/// One reading as stored in a result: the floored integer m, the modulus it
/// was floored against, and the lattice index when the sampler knows it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleRecord {
    pub m: BigInt,
    pub q: u64,
    pub n: Option<i64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RecoveredPeriod<T: Real> {
    Rational(BigRational),
    Interval { lo: T, hi: T },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryResult<T: Real> {
    pub period: Option<RecoveredPeriod<T>>,
    /// Reading pairs consumed before success or giving up.
    pub iterations: usize,
    pub samples: Vec<SampleRecord>,
    /// One entry per pair: whether the coprimality condition held, or None
    /// when the sampler cannot expose lattice indices.
    pub condition_a: Vec<Option<bool>>,
}

impl<T: Real> RecoveryResult<T> {
    pub fn recovered_rational(&self) -> Option<&BigRational> {
        match &self.period {
            Some(RecoveredPeriod::Rational(r)) => Some(r),
            _ => None,
        }
    }

    pub fn to_json(&self) -> Value {
        let period = match &self.period {
            Some(RecoveredPeriod::Rational(r)) => {
                let mut obj = serde_json::Map::new();
                obj.insert("numer".into(), int_value(r.numer()));
                obj.insert("denom".into(), int_value(r.denom()));
                Value::Object(obj)
            }
            Some(RecoveredPeriod::Interval { lo, hi }) => {
                let mut obj = serde_json::Map::new();
                obj.insert("lo".into(), Value::from(lo.as_f64()));
                obj.insert("hi".into(), Value::from(hi.as_f64()));
                Value::Object(obj)
            }
            None => Value::Null,
        };
        let samples: Vec<Value> = self
            .samples
            .iter()
            .map(|s| {
                let mut obj = serde_json::Map::new();
                obj.insert("m".into(), int_value(&s.m));
                obj.insert("Q".into(), Value::from(s.q));
                if let Some(n) = s.n {
                    obj.insert("n".into(), Value::from(n));
                }
                Value::Object(obj)
            })
            .collect();
        let condition_a: Vec<Value> = self
            .condition_a
            .iter()
            .map(|c| c.map(Value::from).unwrap_or(Value::Null))
            .collect();
        let mut root = serde_json::Map::new();
        root.insert("period".into(), period);
        root.insert("iterations".into(), Value::from(self.iterations as u64));
        root.insert("samples".into(), Value::Array(samples));
        root.insert("condition_a".into(), Value::Array(condition_a));
        Value::Object(root)
    }
}

fn int_value(v: &BigInt) -> Value {
    match v.to_i64() {
        Some(i) => Value::from(i),
        None => Value::from(v.to_string()),
    }
}

/// The coprimality condition under which a reading pair is guaranteed to
/// expose the full period a/b: both lattice indices nonzero, coprime to
/// each other, and coprime to the period numerator a.
pub fn condition_a_holds(n1: i64, n2: i64, a: &BigUint) -> bool {
    if n1 == 0 || n2 == 0 {
        return false;
    }
    let u1 = BigUint::from(n1.unsigned_abs());
    let u2 = BigUint::from(n2.unsigned_abs());
    gcd(&u1, &u2).is_one() && gcd(&u1, a).is_one() && gcd(&u2, a).is_one()
}

/// Recovers an integer period from a single reading m/q, assuming the true
/// period is an integer at most p_bound. Candidates are the convergent
/// denominators of |m|/q, tried largest first; the first that actually
/// repeats the function wins. A zero reading carries no information.
pub fn recover_integer_period<T: Real>(
    m: &BigInt,
    q: u64,
    p_bound: u64,
    f: &PeriodicFunction<T>,
    epsilon: T,
) -> Result<Option<u64>, RecoveryError> {
    let needed = 2u128 * (p_bound as u128) * (p_bound as u128);
    if (q as u128) < needed {
        return Err(RecoveryError::ModulusTooSmall {
            q,
            needed: needed.try_into().unwrap_or(u64::MAX),
        });
    }
    if m.is_zero() {
        return Ok(None);
    }
    let x = BigRational::new(m.abs(), BigInt::from(q));
    let list = convergents(&cf_expand(&x).expect("absolute values are nonnegative"));
    for c in list.entries().iter().rev() {
        if c.numer.is_zero() {
            continue;
        }
        let Some(denom) = c.denom.to_u64() else { continue };
        if denom > p_bound {
            continue;
        }
        if f.is_period(T::of(denom as f64), epsilon, DEFAULT_PERIOD_SAMPLES)? {
            return Ok(Some(denom));
        }
    }
    Ok(None)
}

/// Index pairs (i, j) where the two convergent lists share a denominator,
/// in increasing denominator order. Denominators within a list repeat only
/// at the 1,1 head, so equal runs are crossed pairwise.
pub fn matched_denominator_pairs(
    list1: &ConvergentList,
    list2: &ConvergentList,
) -> Vec<(usize, usize)> {
    let xs = list1.entries();
    let ys = list2.entries();
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < xs.len() && j < ys.len() {
        match xs[i].denom.cmp(&ys[j].denom) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                let q = xs[i].denom.clone();
                let (i0, j0) = (i, j);
                while i < xs.len() && xs[i].denom == q {
                    i += 1;
                }
                while j < ys.len() && ys[j].denom == q {
                    j += 1;
                }
                for ii in i0..i {
                    for jj in j0..j {
                        out.push((ii, jj));
                    }
                }
            }
        }
    }
    out
}

/// Period candidates q/gcd(p1, p2) from the matched convergents of two
/// readings over a shared modulus, in increasing denominator order. Zero
/// numerators are skipped: they estimate the empty fraction 0/1 and have
/// no gcd content.
fn candidate_alphas(m1: &BigInt, m2: &BigInt, q: u64) -> Vec<BigRational> {
    let qi = BigInt::from(q);
    let x1 = BigRational::new(m1.abs(), qi.clone());
    let x2 = BigRational::new(m2.abs(), qi);
    let list1 = convergents(&cf_expand(&x1).expect("absolute values are nonnegative"));
    let list2 = convergents(&cf_expand(&x2).expect("absolute values are nonnegative"));
    let mut out = Vec::new();
    for (i, j) in matched_denominator_pairs(&list1, &list2) {
        let c1 = &list1.entries()[i];
        let c2 = &list2.entries()[j];
        if c1.numer.is_zero() || c2.numer.is_zero() {
            continue;
        }
        let g = gcd_int(&c1.numer, &c2.numer);
        out.push(BigRational::new(c1.denom.clone(), g));
    }
    out
}

/// Divides out small integer factors while the quotient still repeats the
/// function, so a recovered multiple of the period collapses to the period
/// itself.
fn reduce_to_minimal<T: Real>(
    f: &PeriodicFunction<T>,
    mut alpha: BigRational,
    epsilon: T,
) -> Result<BigRational, RecoveryError> {
    'outer: loop {
        for k in 2u32..=7 {
            let candidate = &alpha / BigRational::from_integer(BigInt::from(k));
            let value = T::of(ratio_to_f64(&candidate));
            if f.is_period(value, epsilon, DEFAULT_PERIOD_SAMPLES)? {
                alpha = candidate;
                continue 'outer;
            }
        }
        return Ok(alpha);
    }
}

/// Tries to reconstruct a rational period from one pair of readings over a
/// shared modulus. Candidates are tested in increasing denominator order
/// and the first that repeats the function is reduced to minimality.
pub fn period_from_pair<T: Real>(
    m1: &BigInt,
    m2: &BigInt,
    q: u64,
    f: &PeriodicFunction<T>,
    epsilon: T,
) -> Result<Option<BigRational>, RecoveryError> {
    for alpha in candidate_alphas(m1, m2, q) {
        let value = T::of(ratio_to_f64(&alpha));
        if f.is_period(value, epsilon, DEFAULT_PERIOD_SAMPLES)? {
            return Ok(Some(reduce_to_minimal(f, alpha, epsilon)?));
        }
    }
    Ok(None)
}

enum Sampler<T: Real> {
    Ideal(WeightTable<T>),
    Grid(FrequencyDistribution<T>),
}

impl<T: Real> Sampler<T> {
    fn build(
        f: &PeriodicFunction<T>,
        n_max: u64,
        mode: &SamplerMode,
    ) -> Result<Self, RecoveryError> {
        match mode {
            SamplerMode::Ideal => Ok(Sampler::Ideal(WeightTable::build(f, n_max)?)),
            SamplerMode::Grid { samples_per_period, window_periods } => {
                let state = prepare_superposition(f, *samples_per_period, *window_periods)?;
                let dist = left_register_distribution(&apply_fourier(&state))?;
                Ok(Sampler::Grid(dist))
            }
        }
    }

    fn draw(
        &self,
        f: &PeriodicFunction<T>,
        q: u64,
        seed: u64,
    ) -> Result<MeasurementOutcome, RecoveryError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        match self {
            Sampler::Ideal(table) => Ok(table.sample_outcome(f.period(), q, &mut rng)?),
            Sampler::Grid(dist) => Ok(measure_observable(dist, q, &mut rng)?),
        }
    }
}

/// Repeats reading pairs until one reconstructs the rational period or the
/// iteration budget runs out. Every run is a pure function of the config
/// seed.
pub fn recover_rational_period<T: Real>(
    f: &PeriodicFunction<T>,
    config: &RecoveryConfig<T>,
) -> Result<RecoveryResult<T>, RecoveryError> {
    let period = f.period();
    let rational = period
        .as_rational()
        .ok_or_else(|| RecoveryError::NotRational(period.to_string()))?
        .clone();
    let a = rational
        .numer()
        .to_biguint()
        .expect("periods are positive");
    let needed = (BigUint::from(2u32) * &a * &a)
        .to_u64()
        .unwrap_or(u64::MAX);
    let q = match config.q {
        QMode::Auto => period
            .default_modulus()
            .to_u64()
            .expect("default modulus fits in u64"),
        QMode::Fixed(v) => v,
    };
    if q < needed {
        return Err(RecoveryError::ModulusTooSmall { q, needed });
    }
    let n_max = config.n_max.unwrap_or_else(|| period.default_n_max());
    let sampler = Sampler::build(f, n_max, &config.sampler)?;
    let mut samples = Vec::new();
    let mut condition_a = Vec::new();
    for iter in 0..config.max_iterations {
        let o1 = sampler.draw(f, q, child_seed(config.seed, iter as u64, 0))?;
        let o2 = sampler.draw(f, q, child_seed(config.seed, iter as u64, 1))?;
        condition_a.push(match (o1.lattice_index, o2.lattice_index) {
            (Some(n1), Some(n2)) => Some(condition_a_holds(n1, n2, &a)),
            _ => None,
        });
        samples.push(SampleRecord { m: o1.m.clone(), q, n: o1.lattice_index });
        samples.push(SampleRecord { m: o2.m.clone(), q, n: o2.lattice_index });
        if let Some(alpha) = period_from_pair(&o1.m, &o2.m, q, f, config.epsilon_period)? {
            return Ok(RecoveryResult {
                period: Some(RecoveredPeriod::Rational(alpha)),
                iterations: iter + 1,
                samples,
                condition_a,
            });
        }
    }
    Ok(RecoveryResult {
        period: None,
        iterations: config.max_iterations,
        samples,
        condition_a,
    })
}

/// Shrinks [lo, hi] around a minimizer of g by golden-section steps until
/// the bracket is narrower than target_width.
fn golden_section_minimize<T: Real>(
    g: impl Fn(T) -> T,
    mut lo: T,
    mut hi: T,
    target_width: T,
) -> (T, T) {
    let r = T::of(INV_PHI);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let mut g1 = g(x1);
    let mut g2 = g(x2);
    let mut steps = 0;
    while hi - lo > target_width && steps < 300 {
        if g1 <= g2 {
            hi = x2;
            x2 = x1;
            g2 = g1;
            x1 = hi - r * (hi - lo);
            g1 = g(x1);
        } else {
            lo = x1;
            x1 = x2;
            g1 = g2;
            x2 = lo + r * (hi - lo);
            g2 = g(x2);
        }
        steps += 1;
    }
    (lo, hi)
}

/// Narrows an irrational (or unknown) period to an interval of width at
/// most `precision`.
///
/// Reading pairs are drawn as in the rational pipeline, but their exact
/// candidates only seed a numeric search: a candidate whose defect is
/// consistent with sitting within 5% of the period bound from the true
/// period opens a bracket, the defect is minimized inside it by golden
/// section, and the result is accepted when the residual defect matches a
/// displacement no larger than twice the precision. Failed rounds escalate
/// the modulus, which refines where the readings can fall.
pub fn recover_irrational_period<T: Real>(
    f: &PeriodicFunction<T>,
    precision: T,
    config: &RecoveryConfig<T>,
) -> Result<RecoveryResult<T>, RecoveryError> {
    if !f.is_continuous() {
        return Err(RecoveryError::NotContinuous);
    }
    if !(precision > T::zero()) || !precision.is_finite() {
        return Err(RecoveryError::BadPrecision(precision.as_f64()));
    }
    let period = f.period();
    let a_bound = period
        .ceil_int()
        .to_u64()
        .expect("period bound fits in u64");
    let a_bound_val = T::of(a_bound as f64);
    let q0 = match config.q {
        QMode::Auto => period
            .default_modulus()
            .to_u64()
            .expect("default modulus fits in u64"),
        QMode::Fixed(v) => v,
    };
    let needed = 2u128 * (a_bound as u128) * (a_bound as u128);
    if (q0 as u128) < needed {
        return Err(RecoveryError::ModulusTooSmall {
            q: q0,
            needed: needed.try_into().unwrap_or(u64::MAX),
        });
    }
    let n_max = config.n_max.unwrap_or_else(|| period.default_n_max());
    let table = WeightTable::build(f, n_max)?;
    let defect = |alpha: T| f.period_defect(alpha, DEFAULT_PERIOD_SAMPLES);
    // A candidate within 5% of the bound from the true period can have a
    // defect no larger than this displacement produces.
    let pre_gate = defect(T::of(0.05) * a_bound_val);
    let post_gate = defect(T::of(2.0) * precision) * T::of(1.5) + T::of(1e-12);
    let bound_rational = BigRational::from_integer(BigInt::from(a_bound));
    let radius = T::of(0.1) * a_bound_val;
    let target_width = T::of(0.9) * precision;

    let mut samples = Vec::new();
    let mut condition_a = Vec::new();
    let mut iterations = 0usize;
    for round in 0..ESCALATION_ROUNDS {
        let Some(q) = q0.checked_mul(ESCALATION_FACTOR.pow(round)) else {
            break;
        };
        for iter in 0..config.max_iterations {
            iterations += 1;
            let seed1 = child_seed(config.seed, round as u64, 2 * iter as u64);
            let seed2 = child_seed(config.seed, round as u64, 2 * iter as u64 + 1);
            let o1 = table.sample_outcome(period, q, &mut ChaCha8Rng::seed_from_u64(seed1))?;
            let o2 = table.sample_outcome(period, q, &mut ChaCha8Rng::seed_from_u64(seed2))?;
            samples.push(SampleRecord { m: o1.m.clone(), q, n: o1.lattice_index });
            samples.push(SampleRecord { m: o2.m.clone(), q, n: o2.lattice_index });
            condition_a.push(None);
            for alpha in candidate_alphas(&o1.m, &o2.m, q) {
                if alpha > bound_rational {
                    continue;
                }
                let value = T::of(ratio_to_f64(&alpha));
                if defect(value) > pre_gate {
                    continue;
                }
                let lo = (value - radius).max(T::of(1e-12));
                let hi = value + radius;
                let (lo, hi) = golden_section_minimize(defect, lo, hi, target_width);
                let mid = (lo + hi) / T::of(2.0);
                if defect(mid) <= post_gate {
                    return Ok(RecoveryResult {
                        period: Some(RecoveredPeriod::Interval { lo, hi }),
                        iterations,
                        samples,
                        condition_a,
                    });
                }
            }
        }
    }
    Ok(RecoveryResult { period: None, iterations, samples, condition_a })
}
