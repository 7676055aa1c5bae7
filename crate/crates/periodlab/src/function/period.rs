//! Exact period values: positive rationals and quadratic surds c·sqrt(d).
//!
//! Keeping the period symbolic lets the rest of the crate do exact integer
//! arithmetic against it, most importantly floor(Q·n / P), which decides
//! every measured eigenvalue. Surds are normalized so the radicand is
//! squarefree; a radicand reduced to 1 collapses to the rational case.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::arith::{parse_rational, ratio_to_f64, ArithError};
use crate::scalar::Real;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PeriodError {
    #[error("period must be positive, got {0}")]
    NotPositive(String),
    #[error("bad period syntax {0:?}: expected `a/b`, `sqrt:d`, or `sqrt:d*r`")]
    Syntax(String),
    #[error("bad radicand {0}: must be a positive integer")]
    BadRadicand(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// A positive period, either an exact rational or coeff·sqrt(radicand) with
/// the radicand squarefree and at least 2 (so the value is irrational).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Period {
    Rational(BigRational),
    Surd { coeff: BigRational, radicand: u64 },
}

impl Period {
    pub fn rational(r: BigRational) -> Result<Self, PeriodError> {
        if !r.is_positive() {
            return Err(PeriodError::NotPositive(r.to_string()));
        }
        Ok(Period::Rational(r))
    }

    pub fn from_integer(p: u64) -> Self {
        Period::Rational(BigRational::from_integer(BigInt::from(p)))
    }

    /// Builds coeff·sqrt(radicand), extracting the square part of the
    /// radicand into the coefficient.
    pub fn surd(coeff: BigRational, radicand: u64) -> Result<Self, PeriodError> {
        if !coeff.is_positive() {
            return Err(PeriodError::NotPositive(format!("{}*sqrt:{}", coeff, radicand)));
        }
        if radicand == 0 {
            return Err(PeriodError::BadRadicand("0".into()));
        }
        let mut square_free = radicand;
        let mut square_root = 1u64;
        let mut f = 2u64;
        while f * f <= square_free {
            while square_free % (f * f) == 0 {
                square_free /= f * f;
                square_root *= f;
            }
            f += 1;
        }
        let coeff = coeff * BigRational::from_integer(BigInt::from(square_root));
        if square_free == 1 {
            Ok(Period::Rational(coeff))
        } else {
            Ok(Period::Surd { coeff, radicand: square_free })
        }
    }

    /// Parses `a/b`, `sqrt:d`, or products of those joined by `*`
    /// (e.g. `sqrt:2*1`, `sqrt:8*3/2`).
    pub fn parse(text: &str) -> Result<Self, PeriodError> {
        let mut coeff = BigRational::one();
        let mut radicand: Option<u64> = None;
        for part in text.split('*') {
            let part = part.trim();
            if let Some(d_text) = part.strip_prefix("sqrt:") {
                if radicand.is_some() {
                    return Err(PeriodError::Syntax(text.into()));
                }
                let d: u64 = d_text
                    .parse()
                    .map_err(|_| PeriodError::BadRadicand(d_text.into()))?;
                radicand = Some(d);
            } else {
                coeff *= parse_rational(part)?;
            }
        }
        match radicand {
            Some(d) => Period::surd(coeff, d),
            None => Period::rational(coeff),
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Period::Rational(_))
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Period::Rational(r) => Some(r),
            Period::Surd { .. } => None,
        }
    }

    /// The period as a floating-point scalar.
    pub fn value<T: Real>(&self) -> T {
        match self {
            Period::Rational(r) => T::of(ratio_to_f64(r)),
            Period::Surd { coeff, radicand } => {
                T::of(ratio_to_f64(coeff) * (*radicand as f64).sqrt())
            }
        }
    }

    /// floor(q·n / P), exactly.
    ///
    /// For rational P = a/b this is floor(q·n·b / a). For P = (cp/cq)·sqrt(d)
    /// the quotient equals A·sqrt(d)/B with A = q·n·cq and B = cp·d, and for
    /// A >= 0 its floor is isqrt(A²·d) div B; negative A reflects through
    /// floor(x) = -floor(-x) - 1, valid because the value is irrational.
    pub fn floor_scaled(&self, n: &BigInt, q: &BigUint) -> BigInt {
        let q = BigInt::from(q.clone());
        match self {
            Period::Rational(r) => (q * n * r.denom()).div_floor(r.numer()),
            Period::Surd { coeff, radicand } => {
                let a: BigInt = q * n * coeff.denom();
                let b: BigInt = coeff.numer() * BigInt::from(*radicand);
                if a.is_zero() {
                    return BigInt::zero();
                }
                let mag = (&a * &a * BigInt::from(*radicand))
                    .to_biguint()
                    .expect("square is nonnegative");
                let root = BigInt::from(mag.sqrt());
                let nonneg = root.div_floor(&b);
                if a.is_positive() {
                    nonneg
                } else {
                    -nonneg - BigInt::one()
                }
            }
        }
    }

    /// ceil(P) as an integer (for a surd, floor + 1, since the value is
    /// never an integer).
    pub fn ceil_int(&self) -> BigUint {
        match self {
            Period::Rational(r) => r
                .numer()
                .div_ceil(r.denom())
                .to_biguint()
                .expect("positive period"),
            Period::Surd { coeff, radicand } => {
                let mag = (coeff.numer() * coeff.numer() * BigInt::from(*radicand))
                    .to_biguint()
                    .expect("positive coefficient");
                let floor = BigInt::from(mag.sqrt()).div_floor(coeff.denom());
                (floor + BigInt::one()).to_biguint().expect("positive")
            }
        }
    }

    /// The smallest admissible eigenvalue modulus: 2a² for rational a/b,
    /// 2·ceil(P)² for a surd.
    pub fn default_modulus(&self) -> BigUint {
        let a = match self {
            Period::Rational(r) => r.numer().to_biguint().expect("positive period"),
            Period::Surd { .. } => self.ceil_int(),
        };
        BigUint::from(2u32) * &a * &a
    }

    /// Default truncation for the frequency lattice: 4·(denominator of P)
    /// for rational P, 4·ceil(P) for a surd.
    pub fn default_n_max(&self) -> u64 {
        let bound = match self {
            Period::Rational(r) => r.denom().to_biguint().expect("positive denominator"),
            Period::Surd { .. } => self.ceil_int(),
        };
        4 * bound.to_u64().expect("desk-scale period")
    }
}

impl fmt::Display for Period {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Period::Rational(r) => write!(f, "{}", r),
            Period::Surd { coeff, radicand } => write!(f, "sqrt:{}*{}", radicand, coeff),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ratio;

    fn floor_i64(p: &Period, n: i64, q: u64) -> i64 {
        i64::try_from(&p.floor_scaled(&BigInt::from(n), &BigUint::from(q))).unwrap()
    }

    #[test]
    fn parse_forms() {
        assert_eq!(Period::parse("5").unwrap(), Period::Rational(ratio(5, 1)));
        assert_eq!(Period::parse("5/3").unwrap(), Period::Rational(ratio(5, 3)));
        assert_eq!(
            Period::parse("sqrt:2").unwrap(),
            Period::Surd { coeff: ratio(1, 1), radicand: 2 }
        );
        assert_eq!(
            Period::parse("sqrt:2*1").unwrap(),
            Period::Surd { coeff: ratio(1, 1), radicand: 2 }
        );
        assert_eq!(
            Period::parse("sqrt:2*3/2").unwrap(),
            Period::Surd { coeff: ratio(3, 2), radicand: 2 }
        );
        assert_eq!(
            Period::parse("3/2*sqrt:2").unwrap(),
            Period::Surd { coeff: ratio(3, 2), radicand: 2 }
        );
    }

    #[test]
    fn surd_normalization() {
        // sqrt(8) = 2 sqrt(2); sqrt(9) = 3 exactly.
        assert_eq!(
            Period::parse("sqrt:8").unwrap(),
            Period::Surd { coeff: ratio(2, 1), radicand: 2 }
        );
        assert_eq!(Period::parse("sqrt:9").unwrap(), Period::Rational(ratio(3, 1)));
        assert_eq!(
            Period::parse("sqrt:12").unwrap(),
            Period::Surd { coeff: ratio(2, 1), radicand: 3 }
        );
    }

    #[test]
    fn bad_inputs_rejected() {
        assert!(Period::parse("0").is_err());
        assert!(Period::parse("-5/3").is_err());
        assert!(Period::parse("sqrt:0").is_err());
        assert!(Period::parse("sqrt:x").is_err());
        assert!(Period::parse("sqrt:2*sqrt:3").is_err());
        assert!(Period::parse("").is_err());
    }

    #[test]
    fn display_round_trips() {
        for text in ["5", "5/3", "sqrt:2*1", "sqrt:2*3/2"] {
            let p = Period::parse(text).unwrap();
            assert_eq!(Period::parse(&p.to_string()).unwrap(), p);
        }
    }

    #[test]
    fn floor_scaled_rational_examples() {
        let p = Period::parse("5").unwrap();
        assert_eq!(floor_i64(&p, 2, 10), 4);
        assert_eq!(floor_i64(&p, 3, 10), 6);
        let p = Period::parse("5/3").unwrap();
        // 50·1/(5/3) = 30 and 50·2/(5/3) = 60, both exact.
        assert_eq!(floor_i64(&p, 1, 50), 30);
        assert_eq!(floor_i64(&p, 2, 50), 60);
        let p = Period::parse("3").unwrap();
        assert_eq!(floor_i64(&p, 1, 20), 6);
    }

    #[test]
    fn floor_scaled_surd_examples() {
        let p = Period::parse("sqrt:2").unwrap();
        // 50/sqrt(2) = 35.355..., so floors are 35 and -36.
        assert_eq!(floor_i64(&p, 1, 50), 35);
        assert_eq!(floor_i64(&p, -1, 50), -36);
        assert_eq!(floor_i64(&p, 0, 50), 0);
    }

    #[test]
    fn floor_scaled_matches_float_floor_away_from_edges() {
        let cases = [
            Period::parse("7/4").unwrap(),
            Period::parse("sqrt:3").unwrap(),
            Period::parse("sqrt:5*2/3").unwrap(),
        ];
        for p in &cases {
            let pv: f64 = p.value();
            for n in -25i64..=25 {
                for q in [7u64, 50, 128] {
                    let exact = floor_i64(p, n, q);
                    let float = (q as f64 * n as f64 / pv).floor() as i64;
                    assert!(
                        (exact - float).abs() <= 1,
                        "floor mismatch beyond rounding: {} n={} q={}",
                        p,
                        n,
                        q
                    );
                    // The exact value always satisfies the sandwich.
                    let lhs = exact as f64 / q as f64;
                    let rhs = (exact + 1) as f64 / q as f64;
                    let target = n as f64 / pv;
                    assert!(lhs <= target + 1e-12 && target < rhs + 1e-12);
                }
            }
        }
    }

    #[test]
    fn ceil_and_defaults() {
        assert_eq!(Period::parse("5/3").unwrap().ceil_int(), BigUint::from(2u32));
        assert_eq!(Period::parse("2").unwrap().ceil_int(), BigUint::from(2u32));
        assert_eq!(Period::parse("sqrt:2").unwrap().ceil_int(), BigUint::from(2u32));

        assert_eq!(Period::parse("5/3").unwrap().default_modulus(), BigUint::from(50u32));
        assert_eq!(Period::parse("5").unwrap().default_modulus(), BigUint::from(50u32));
        assert_eq!(Period::parse("sqrt:2").unwrap().default_modulus(), BigUint::from(8u32));

        assert_eq!(Period::parse("5/3").unwrap().default_n_max(), 12);
        assert_eq!(Period::parse("5").unwrap().default_n_max(), 4);
        assert_eq!(Period::parse("sqrt:2").unwrap().default_n_max(), 8);
    }
}
