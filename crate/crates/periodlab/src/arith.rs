//! Exact integer and rational helpers: gcd, Euler's totient, parsing.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ArithError {
    #[error("totient is undefined for 0")]
    ZeroTotient,
    #[error("cannot parse `{0}` as a rational number")]
    BadRational(String),
    #[error("denominator is zero in `{0}`")]
    ZeroDenominator(String),
}

/// Greatest common divisor with the convention gcd(0, 0) = 0.
pub fn gcd(u: &BigUint, v: &BigUint) -> BigUint {
    u.gcd(v)
}

/// gcd on signed big integers, always nonnegative.
pub fn gcd_int(u: &BigInt, v: &BigInt) -> BigInt {
    u.gcd(v)
}

/// gcd on machine words, used by the exhaustive counting loops.
pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Distinct prime factors in increasing order, by trial division.
pub fn distinct_prime_factors(mut a: u64) -> Vec<u64> {
    let mut primes = Vec::new();
    let mut p = 2u64;
    while p * p <= a {
        if a % p == 0 {
            primes.push(p);
            while a % p == 0 {
                a /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if a > 1 {
        primes.push(a);
    }
    primes
}

/// Euler's totient via the product formula over distinct prime factors.
pub fn euler_phi(a: u64) -> Result<u64, ArithError> {
    if a == 0 {
        return Err(ArithError::ZeroTotient);
    }
    let mut phi = a;
    for p in distinct_prime_factors(a) {
        phi = phi / p * (p - 1);
    }
    Ok(phi)
}

/// Parses `"p"` or `"p/q"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational, ArithError> {
    let s = s.trim();
    let bad = || ArithError::BadRational(s.to_string());
    match s.split_once('/') {
        None => {
            let n: BigInt = s.parse().map_err(|_| bad())?;
            Ok(BigRational::from_integer(n))
        }
        Some((num, den)) => {
            let n: BigInt = num.trim().parse().map_err(|_| bad())?;
            let d: BigInt = den.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(ArithError::ZeroDenominator(s.to_string()));
            }
            Ok(BigRational::new(n, d))
        }
    }
}

/// Rational from machine integers, `denom` must be nonzero.
pub fn ratio(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Exact conversion to the scalar type for reporting (not for arithmetic).
pub fn ratio_to_f64(r: &BigRational) -> f64 {
    // Good to a ulp for desk-scale operands; exactness elsewhere never
    // routes through this.
    let n = r.numer();
    let d = r.denom();
    big_to_f64(n) / big_to_f64(d)
}

fn big_to_f64(x: &BigInt) -> f64 {
    let mag: f64 = x
        .magnitude()
        .to_u64_digits()
        .iter()
        .rev()
        .fold(0.0, |acc, &digit| acc * 2f64.powi(64) + digit as f64);
    if x.is_negative() {
        -mag
    } else {
        mag
    }
}
