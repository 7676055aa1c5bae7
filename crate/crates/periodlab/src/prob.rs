//! Coprimality probabilities governing how often a reading pair exposes the
//! full period.
//!
//! Everything countable is counted exactly: single coprimality by
//! inclusion-exclusion over the distinct primes of a, pair statistics by
//! enumeration up to a size cap, and beyond the cap by seeded Monte Carlo.
//! The classical lower bounds (φ(a)/a for one draw, 6/π² for pairwise
//! coprimality, and their product for the combined condition) are reported
//! and checked, never assumed: the single-draw bound already fails off the
//! tested grid (a = 6, N = 10 gives 3/10 < 1/3), so callers get the truth
//! and a flag, not an assertion.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use std::io::{self, Write};
use thiserror::Error;

use crate::arith::{distinct_prime_factors, euler_phi, gcd_u64};
use crate::seed::child_seed;

/// 6/π² = 1/ζ(2), the density of coprime integer pairs.
pub const SIX_OVER_PI_SQUARED: f64 = 0.607927101854027;

/// e^{−γ}, the liminf constant of φ(a)·ln ln a / a.
pub const EXP_NEG_GAMMA: f64 = 0.561459483566885;

/// Cap on O(N²) exhaustive pair enumeration.
pub const EXHAUSTIVE_LIMIT: u64 = 5000;

/// Minimum trial count for the Monte Carlo estimator.
pub const MIN_TRIALS: u64 = 1000;

const MONTE_CARLO_CHUNK: u64 = 4096;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProbError {
    #[error("N = {n} is below a = {a}; the bounds are stated for N >= a")]
    RangeTooSmall { a: u64, n: u64 },
    #[error("N = {n} exceeds the exhaustive enumeration cap {limit}; use the Monte Carlo estimator")]
    ExhaustiveLimit { n: u64, limit: u64 },
    #[error("need at least {MIN_TRIALS} trials, got {0}")]
    TooFewTrials(u64),
    #[error("scans start at a = 10 (ln ln a must be positive), got a_max = {0}")]
    ScanTooSmall(u64),
}

/// |{1 <= n <= N : gcd(n, a) = 1}| by inclusion-exclusion over the distinct
/// primes of a: each squarefree divisor d built from them contributes
/// ⌊N/d⌋ with the sign of its prime count.
pub fn count_coprime(a: u64, n: u64) -> u64 {
    let primes = distinct_prime_factors(a);
    let mut total: i128 = 0;
    for mask in 0..(1u32 << primes.len()) {
        let mut d: u64 = 1;
        for (i, p) in primes.iter().enumerate() {
            if mask & (1 << i) != 0 {
                d *= p;
            }
        }
        let term = (n / d) as i128;
        if mask.count_ones() % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total as u64
}

fn require_range(a: u64, n: u64) -> Result<(), ProbError> {
    if n < a {
        return Err(ProbError::RangeTooSmall { a, n });
    }
    Ok(())
}

fn require_exhaustive(n: u64) -> Result<(), ProbError> {
    if n > EXHAUSTIVE_LIMIT {
        return Err(ProbError::ExhaustiveLimit { n, limit: EXHAUSTIVE_LIMIT });
    }
    Ok(())
}

fn fraction(numer: u64, denom: u64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Probability that one uniform draw from [1, N] is coprime to a, exactly.
pub fn prob_coprime(a: u64, n: u64) -> Result<BigRational, ProbError> {
    require_range(a, n)?;
    Ok(fraction(count_coprime(a, n), n))
}

/// Probability that two independent draws are both coprime to a.
pub fn prob_pair_coprime_to_a(a: u64, n: u64) -> Result<BigRational, ProbError> {
    let p = prob_coprime(a, n)?;
    Ok(&p * &p)
}

fn condition_a_pair(a: u64, n1: u64, n2: u64) -> bool {
    gcd_u64(n1, a) == 1 && gcd_u64(n2, a) == 1 && gcd_u64(n1, n2) == 1
}

/// Conditional probability that two draws are coprime to each other, given
/// both are coprime to a. Exhaustive over ordered pairs.
pub fn prob_pairwise_coprime_given(a: u64, n: u64) -> Result<BigRational, ProbError> {
    require_range(a, n)?;
    require_exhaustive(n)?;
    let residues: Vec<u64> = (1..=n).filter(|k| gcd_u64(*k, a) == 1).collect();
    let mut hits: u64 = 0;
    for &n1 in &residues {
        for &n2 in &residues {
            if gcd_u64(n1, n2) == 1 {
                hits += 1;
            }
        }
    }
    let pairs = residues.len() as u64 * residues.len() as u64;
    Ok(fraction(hits, pairs))
}

/// Joint probability over ordered pairs from [1, N]² that a, n1, n2 are
/// pairwise coprime. Exhaustive.
pub fn prob_condition_a(a: u64, n: u64) -> Result<BigRational, ProbError> {
    require_range(a, n)?;
    require_exhaustive(n)?;
    let residues: Vec<u64> = (1..=n).filter(|k| gcd_u64(*k, a) == 1).collect();
    let mut hits: u64 = 0;
    for &n1 in &residues {
        for &n2 in &residues {
            if gcd_u64(n1, n2) == 1 {
                hits += 1;
            }
        }
    }
    Ok(fraction(hits, n * n))
}

/// The classical lower bound (6/π²)·(φ(a)/a)² on the joint probability.
pub fn condition_a_lower_bound(a: u64) -> f64 {
    let phi = euler_phi(a).expect("a is positive") as f64;
    let ratio = phi / a as f64;
    SIX_OVER_PI_SQUARED * ratio * ratio
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub trials: u64,
}

/// Outcome of one bound check: the exact probability when enumeration was
/// feasible, the sampled estimate otherwise, and whether the lower bound
/// held (exactly, or within three standard errors for estimates).
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityReport {
    pub a: u64,
    pub n: u64,
    pub exact_probability: Option<BigRational>,
    pub monte_carlo_estimate: Option<MonteCarloEstimate>,
    pub lower_bound: f64,
    pub bound_satisfied: bool,
}

impl ProbabilityReport {
    /// Exhaustive joint-probability report against the classical bound,
    /// with 10⁻¹² slack absorbing the bound constant's rounding.
    pub fn exhaustive_condition_a(a: u64, n: u64) -> Result<Self, ProbError> {
        let exact = prob_condition_a(a, n)?;
        let lower_bound = condition_a_lower_bound(a);
        let value = crate::arith::ratio_to_f64(&exact);
        Ok(ProbabilityReport {
            a,
            n,
            exact_probability: Some(exact),
            monte_carlo_estimate: None,
            lower_bound,
            bound_satisfied: value >= lower_bound - 1e-12,
        })
    }

    pub fn to_json(&self) -> Value {
        let mut root = serde_json::Map::new();
        root.insert("a".into(), Value::from(self.a));
        root.insert("N".into(), Value::from(self.n));
        let exact = match &self.exact_probability {
            Some(r) => {
                let mut obj = serde_json::Map::new();
                obj.insert("numer".into(), Value::from(r.numer().to_string()));
                obj.insert("denom".into(), Value::from(r.denom().to_string()));
                obj.insert("value".into(), Value::from(crate::arith::ratio_to_f64(r)));
                Value::Object(obj)
            }
            None => Value::Null,
        };
        root.insert("exact_probability".into(), exact);
        let mc = match &self.monte_carlo_estimate {
            Some(e) => {
                let mut obj = serde_json::Map::new();
                obj.insert("estimate".into(), Value::from(e.estimate));
                obj.insert("std_error".into(), Value::from(e.std_error));
                obj.insert("trials".into(), Value::from(e.trials));
                Value::Object(obj)
            }
            None => Value::Null,
        };
        root.insert("monte_carlo_estimate".into(), mc);
        root.insert("lower_bound".into(), Value::from(self.lower_bound));
        root.insert("bound_satisfied".into(), Value::from(self.bound_satisfied));
        Value::Object(root)
    }
}

/// Estimates the joint probability by sampling ordered pairs uniformly with
/// replacement. Trials run in fixed-size chunks, each chunk on its own
/// derived seed, so the report depends only on (a, N, trials, seed) no
/// matter how the chunks are scheduled.
pub fn monte_carlo_condition_a(
    a: u64,
    n: u64,
    trials: u64,
    seed: u64,
) -> Result<ProbabilityReport, ProbError> {
    require_range(a, n)?;
    if trials < MIN_TRIALS {
        return Err(ProbError::TooFewTrials(trials));
    }
    let mut hits: u64 = 0;
    let chunks = trials.div_ceil(MONTE_CARLO_CHUNK);
    for chunk in 0..chunks {
        let lo = chunk * MONTE_CARLO_CHUNK;
        let hi = (lo + MONTE_CARLO_CHUNK).min(trials);
        let mut rng = ChaCha8Rng::seed_from_u64(child_seed(seed, chunk, 0));
        for _ in lo..hi {
            let n1 = rng.gen_range(1..=n);
            let n2 = rng.gen_range(1..=n);
            if condition_a_pair(a, n1, n2) {
                hits += 1;
            }
        }
    }
    let estimate = hits as f64 / trials as f64;
    let std_error = (estimate * (1.0 - estimate) / trials as f64).sqrt();
    let lower_bound = condition_a_lower_bound(a);
    Ok(ProbabilityReport {
        a,
        n,
        exact_probability: None,
        monte_carlo_estimate: Some(MonteCarloEstimate { estimate, std_error, trials }),
        lower_bound,
        bound_satisfied: estimate >= lower_bound - 3.0 * std_error,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiRatioRow {
    pub a: u64,
    pub phi: u64,
    /// φ(a)·ln ln a / a.
    pub ratio: f64,
}

/// Scan of φ(a)·ln ln a / a over 10 ≤ a ≤ a_max, with the running minimum
/// and the primorial subsequence surfaced. The liminf of the ratio is
/// e^{−γ}, approached along primorials from above only asymptotically;
/// finite rows sit on either side, so nothing here is asserted against the
/// constant.
#[derive(Debug, Clone)]
pub struct PhiRatioScan {
    rows: Vec<PhiRatioRow>,
    minimum: PhiRatioRow,
    primorials: Vec<PhiRatioRow>,
}

impl PhiRatioScan {
    pub fn rows(&self) -> &[PhiRatioRow] {
        &self.rows
    }

    pub fn minimum(&self) -> PhiRatioRow {
        self.minimum
    }

    pub fn primorial_rows(&self) -> &[PhiRatioRow] {
        &self.primorials
    }

    /// CSV rows `a,phi,ratio`.
    pub fn write_csv(&self, out: &mut dyn Write) -> io::Result<()> {
        writeln!(out, "a,phi,ratio")?;
        for row in &self.rows {
            writeln!(out, "{},{},{}", row.a, row.phi, row.ratio)?;
        }
        Ok(())
    }
}

fn phi_sieve(n: u64) -> Vec<u64> {
    let n = n as usize;
    let mut phi: Vec<u64> = (0..=n as u64).collect();
    for p in 2..=n {
        if phi[p] == p as u64 {
            let mut m = p;
            while m <= n {
                phi[m] -= phi[m] / p as u64;
                m += p;
            }
        }
    }
    phi
}

pub fn phi_ratio_scan(a_max: u64) -> Result<PhiRatioScan, ProbError> {
    if a_max < 10 {
        return Err(ProbError::ScanTooSmall(a_max));
    }
    let phi = phi_sieve(a_max);
    let mut rows = Vec::with_capacity((a_max - 9) as usize);
    for a in 10..=a_max {
        let ratio = phi[a as usize] as f64 / a as f64 * (a as f64).ln().ln();
        rows.push(PhiRatioRow { a, phi: phi[a as usize], ratio });
    }
    let minimum = *rows
        .iter()
        .min_by(|x, y| x.ratio.partial_cmp(&y.ratio).expect("finite ratios"))
        .expect("scan range is nonempty");
    let mut primorials = Vec::new();
    let mut product: u64 = 1;
    for p in 2..=a_max {
        if phi[p as usize] != p - 1 {
            continue;
        }
        match product.checked_mul(p) {
            Some(next) if next <= a_max => product = next,
            _ => break,
        }
        if product >= 10 {
            primorials.push(rows[(product - 10) as usize]);
        }
    }
    Ok(PhiRatioScan { rows, minimum, primorials })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{euler_phi, ratio_to_f64};

    fn frac(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn counting_examples() {
        assert_eq!(count_coprime(1, 10), 10);
        assert_eq!(count_coprime(6, 7), 3);
        assert_eq!(count_coprime(12, 12), 4);
        assert_eq!(count_coprime(12, 12), euler_phi(12).unwrap());
        assert_eq!(count_coprime(30, 30), euler_phi(30).unwrap());
    }

    #[test]
    fn counting_matches_the_naive_loop() {
        for a in 1..=100u64 {
            let mut running = 0u64;
            for n in 1..=2000u64 {
                if gcd_u64(n, a) == 1 {
                    running += 1;
                }
                assert_eq!(count_coprime(a, n), running, "a={a}, N={n}");
            }
        }
    }

    #[test]
    fn single_draw_probability_examples() {
        assert_eq!(prob_coprime(1, 100).unwrap(), frac(1, 1));
        assert_eq!(prob_coprime(6, 7).unwrap(), frac(3, 7));
        assert_eq!(prob_coprime(30, 300).unwrap(), frac(4, 15));
        assert_eq!(
            prob_coprime(6, 5),
            Err(ProbError::RangeTooSmall { a: 6, n: 5 })
        );
    }

    #[test]
    fn the_single_draw_bound_is_not_universal() {
        // The classical bound φ(a)/a holds on the tested grids but not for
        // every N >= a: three of the first ten integers are coprime to 6,
        // and 3/10 < 1/3. This is why the bound is reported, not asserted.
        let p = prob_coprime(6, 10).unwrap();
        assert_eq!(p, frac(3, 10));
        assert!(p < frac(1, 3));
    }

    #[test]
    fn pair_probability_squares_the_single_draw() {
        assert_eq!(prob_pair_coprime_to_a(1, 50).unwrap(), frac(1, 1));
        assert_eq!(prob_pair_coprime_to_a(6, 7).unwrap(), frac(9, 49));
        let quarter = prob_pair_coprime_to_a(30, 300).unwrap();
        assert_eq!(quarter, &frac(4, 15) * &frac(4, 15));
    }

    #[test]
    fn conditional_pairwise_examples() {
        assert_eq!(prob_pairwise_coprime_given(2, 2).unwrap(), frac(1, 1));
        assert_eq!(prob_pairwise_coprime_given(1, 100).unwrap(), frac(6087, 10000));
        let given6 = prob_pairwise_coprime_given(6, 100).unwrap();
        assert!(ratio_to_f64(&given6) >= SIX_OVER_PI_SQUARED);
        assert_eq!(
            prob_pairwise_coprime_given(1, 5001),
            Err(ProbError::ExhaustiveLimit { n: 5001, limit: 5000 })
        );
    }

    #[test]
    fn joint_probability_examples() {
        assert_eq!(
            prob_condition_a(1, 100).unwrap(),
            prob_pairwise_coprime_given(1, 100).unwrap()
        );
        let p6 = prob_condition_a(6, 100).unwrap();
        assert!(ratio_to_f64(&p6) >= condition_a_lower_bound(6));
        let p30 = prob_condition_a(30, 500).unwrap();
        assert!(ratio_to_f64(&p30) >= condition_a_lower_bound(30));
    }

    #[test]
    fn joint_count_matches_the_mobius_identity() {
        // Ordered pairs coprime to each other and to a can also be counted
        // by sieving the shared factor d of the pair:
        //   hits = Σ_d μ(d)·[gcd(d,a)=1]·count_coprime(a, ⌊N/d⌋)².
        let mobius = |limit: usize| {
            let mut mu = vec![1i64; limit + 1];
            let mut composite = vec![false; limit + 1];
            let mut primes = Vec::new();
            for i in 2..=limit {
                if !composite[i] {
                    primes.push(i);
                    mu[i] = -1;
                }
                for &p in &primes {
                    if i * p > limit {
                        break;
                    }
                    composite[i * p] = true;
                    if i % p == 0 {
                        mu[i * p] = 0;
                        break;
                    }
                    mu[i * p] = -mu[i];
                }
            }
            mu
        };
        for (a, n) in [(1u64, 300u64), (6, 400), (30, 500)] {
            let mu = mobius(n as usize);
            let mut total: i128 = 0;
            for d in 1..=n {
                if mu[d as usize] == 0 || gcd_u64(d, a) != 1 {
                    continue;
                }
                let c = count_coprime(a, n / d) as i128;
                total += mu[d as usize] as i128 * c * c;
            }
            let exact = prob_condition_a(a, n).unwrap();
            let expected = &exact * BigRational::from_integer(BigInt::from(n * n));
            assert_eq!(BigRational::from_integer(BigInt::from(total)), expected);
        }
    }

    #[test]
    fn monte_carlo_matches_exhaustive_within_four_sigma() {
        let report = monte_carlo_condition_a(6, 100, 20_000, 99).unwrap();
        let mc = report.monte_carlo_estimate.unwrap();
        let exact = ratio_to_f64(&prob_condition_a(6, 100).unwrap());
        assert!((mc.estimate - exact).abs() <= 4.0 * mc.std_error);
        assert!(report.bound_satisfied);
    }

    #[test]
    fn monte_carlo_is_deterministic_and_validated() {
        let r1 = monte_carlo_condition_a(30, 1_000_000, 5000, 7).unwrap();
        let r2 = monte_carlo_condition_a(30, 1_000_000, 5000, 7).unwrap();
        assert_eq!(r1, r2);
        assert_eq!(
            monte_carlo_condition_a(1, 100, 999, 7),
            Err(ProbError::TooFewTrials(999))
        );
        assert_eq!(
            monte_carlo_condition_a(9, 5, 5000, 7),
            Err(ProbError::RangeTooSmall { a: 9, n: 5 })
        );
    }

    #[test]
    fn reports_serialize_with_both_shapes() {
        let exact = ProbabilityReport::exhaustive_condition_a(6, 100).unwrap();
        let json = exact.to_json();
        assert_eq!(json["a"], 6);
        assert_eq!(json["N"], 100);
        assert!(json["exact_probability"]["numer"].is_string());
        assert!(json["monte_carlo_estimate"].is_null());
        assert_eq!(json["bound_satisfied"], true);

        let mc = monte_carlo_condition_a(6, 100, 2000, 5).unwrap();
        let json = mc.to_json();
        assert!(json["exact_probability"].is_null());
        assert!(json["monte_carlo_estimate"]["estimate"].is_number());
        assert_eq!(json["monte_carlo_estimate"]["trials"], 2000);
    }

    #[test]
    fn scan_spans_the_requested_range() {
        assert!(matches!(phi_ratio_scan(9), Err(ProbError::ScanTooSmall(9))));
        let scan = phi_ratio_scan(100).unwrap();
        assert_eq!(scan.rows().len(), 91);
        assert_eq!(scan.rows()[0].a, 10);
        let row30 = scan.rows().iter().find(|r| r.a == 30).unwrap();
        assert_eq!(row30.phi, 8);
        let expected = 8.0 / 30.0 * 30f64.ln().ln();
        assert!((row30.ratio - expected).abs() < 1e-12);
    }

    #[test]
    fn scan_minimum_and_primorials() {
        let scan = phi_ratio_scan(10_000).unwrap();
        // The minimum of φ(a)·ln ln a / a on [10, 10⁴] sits at a = 12,
        // where the ratio is (1/3)·ln ln 12; the primorials 30, 210, 2310
        // carry larger values that descend toward e^{−γ} only far beyond
        // this range.
        let min = scan.minimum();
        assert_eq!(min.a, 12);
        let expected = 4.0 / 12.0 * 12f64.ln().ln();
        assert!((min.ratio - expected).abs() < 1e-12);
        let primorial_as: Vec<u64> = scan.primorial_rows().iter().map(|r| r.a).collect();
        assert_eq!(primorial_as, vec![30, 210, 2310]);
        for row in scan.primorial_rows() {
            assert!(row.ratio > EXP_NEG_GAMMA * 0.5 && row.ratio < 1.0);
        }
        let r2310 = scan.primorial_rows()[2].ratio;
        assert!((r2310 - 0.4254).abs() < 1e-3);
    }

    #[test]
    fn scan_csv_layout() {
        let scan = phi_ratio_scan(12).unwrap();
        let mut buf = Vec::new();
        scan.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "a,phi,ratio");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("10,4,"));
        assert!(lines[3].starts_with("12,4,"));
    }
}
