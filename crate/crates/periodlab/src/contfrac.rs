//! Continued fractions of nonnegative rationals and their convergents.
//!
//! Expansions are canonical: every coefficient after the first is >= 1 and the
//! final coefficient is >= 2 whenever there is more than one, so each rational
//! has exactly one expansion. Convergents p_k/q_k follow the recurrences
//!
//! ```text
//! p_k = a_k p_{k-1} + p_{k-2}        q_k = a_k q_{k-1} + q_{k-2}
//! ```
//!
//! seeded with (p_{-1}, q_{-1}) = (1, 0) and (p_{-2}, q_{-2}) = (0, 1), and
//! satisfy the determinant identity p_k q_{k-1} - p_{k-1} q_k = (-1)^{k-1},
//! which forces every convergent into lowest terms.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::arith::gcd_int;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ContfracError {
    #[error("continued fractions are defined here for nonnegative inputs, got {0}")]
    NegativeInput(BigRational),
}

/// Canonical continued-fraction expansion `[a0; a1, a2, ...]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CfExpansion {
    coefficients: Vec<BigInt>,
}

impl CfExpansion {
    pub fn coefficients(&self) -> &[BigInt] {
        &self.coefficients
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Folds the expansion back into the rational it came from.
    pub fn value(&self) -> BigRational {
        let mut it = self.coefficients.iter().rev();
        let last = it.next().expect("expansion has at least one coefficient");
        let mut acc = BigRational::from_integer(last.clone());
        for a in it {
            acc = BigRational::from_integer(a.clone()) + acc.recip();
        }
        acc
    }
}

/// One convergent p/q, already in lowest terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Convergent {
    pub numer: BigInt,
    pub denom: BigInt,
}

impl Convergent {
    pub fn as_rational(&self) -> BigRational {
        BigRational::new(self.numer.clone(), self.denom.clone())
    }
}

/// The full convergent sequence of an expansion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvergentList {
    entries: Vec<Convergent>,
}

impl ConvergentList {
    pub fn entries(&self) -> &[Convergent] {
        &self.entries
    }

    pub fn last(&self) -> &Convergent {
        self.entries.last().expect("at least one convergent")
    }
}

/// Expands a nonnegative rational by the Euclidean algorithm.
///
/// The Euclidean quotients are canonical automatically: remainders decrease
/// strictly, so when the expansion has more than one term the final quotient
/// is at least 2.
pub fn cf_expand(r: &BigRational) -> Result<CfExpansion, ContfracError> {
    if r.is_negative() {
        return Err(ContfracError::NegativeInput(r.clone()));
    }
    let mut n = r.numer().clone();
    let mut d = r.denom().clone();
    let mut coefficients = Vec::new();
    loop {
        let (q, rem) = num_integer::Integer::div_rem(&n, &d);
        coefficients.push(q);
        if rem.is_zero() {
            break;
        }
        n = d;
        d = rem;
    }
    Ok(CfExpansion { coefficients })
}

/// Runs the convergent recurrences over an expansion.
pub fn convergents(cf: &CfExpansion) -> ConvergentList {
    let mut p_prev = BigInt::one(); // p_{-1}
    let mut p_prev2 = BigInt::zero(); // p_{-2}
    let mut q_prev = BigInt::zero(); // q_{-1}
    let mut q_prev2 = BigInt::one(); // q_{-2}
    let mut entries = Vec::with_capacity(cf.len());
    for a in cf.coefficients() {
        let p = a * &p_prev + &p_prev2;
        let q = a * &q_prev + &q_prev2;
        p_prev2 = std::mem::replace(&mut p_prev, p.clone());
        q_prev2 = std::mem::replace(&mut q_prev, q.clone());
        entries.push(Convergent { numer: p, denom: q });
    }
    ConvergentList { entries }
}

/// Convergents of `r` with denominator at most `q_bound`, in list order
/// (denominators nondecreasing). These are the best rational approximations
/// available at each denominator scale.
pub fn best_denominator_candidates(
    r: &BigRational,
    q_bound: &BigUint,
) -> Result<Vec<BigRational>, ContfracError> {
    let bound = BigInt::from(q_bound.clone());
    let list = convergents(&cf_expand(r)?);
    Ok(list
        .entries()
        .iter()
        .take_while(|c| c.denom <= bound)
        .map(Convergent::as_rational)
        .collect())
}

/// Checks the determinant identity at every index of a convergent list.
pub fn determinant_identity_holds(list: &ConvergentList) -> bool {
    let e = list.entries();
    for k in 1..e.len() {
        let det = &e[k].numer * &e[k - 1].denom - &e[k - 1].numer * &e[k].denom;
        let expect = if (k - 1) % 2 == 0 {
            BigInt::one()
        } else {
            -BigInt::one()
        };
        if det != expect {
            return false;
        }
    }
    true
}

/// True when every convergent is in lowest terms (implied by the determinant
/// identity; kept as an independent check).
pub fn all_reduced(list: &ConvergentList) -> bool {
    list.entries()
        .iter()
        .all(|c| gcd_int(&c.numer, &c.denom).is_one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ratio;
    use proptest::prelude::*;

    fn coeffs(cf: &CfExpansion) -> Vec<i64> {
        cf.coefficients()
            .iter()
            .map(|a| i64::try_from(a).unwrap())
            .collect()
    }

    fn pairs(list: &ConvergentList) -> Vec<(i64, i64)> {
        list.entries()
            .iter()
            .map(|c| {
                (
                    i64::try_from(&c.numer).unwrap(),
                    i64::try_from(&c.denom).unwrap(),
                )
            })
            .collect()
    }

    #[test]
    fn expansion_examples() {
        assert_eq!(coeffs(&cf_expand(&ratio(7, 10)).unwrap()), vec![0, 1, 2, 3]);
        assert_eq!(coeffs(&cf_expand(&ratio(5, 1)).unwrap()), vec![5]);
        // 6/20 reduces to 3/10 before expansion.
        assert_eq!(coeffs(&cf_expand(&ratio(6, 20)).unwrap()), vec![0, 3, 3]);
        assert_eq!(coeffs(&cf_expand(&ratio(0, 1)).unwrap()), vec![0]);
    }

    #[test]
    fn negative_input_is_rejected() {
        assert!(matches!(
            cf_expand(&ratio(-1, 2)),
            Err(ContfracError::NegativeInput(_))
        ));
    }

    #[test]
    fn convergent_examples() {
        let list = convergents(&cf_expand(&ratio(7, 10)).unwrap());
        assert_eq!(pairs(&list), vec![(0, 1), (1, 1), (2, 3), (7, 10)]);

        let list = convergents(&cf_expand(&ratio(5, 1)).unwrap());
        assert_eq!(pairs(&list), vec![(5, 1)]);

        let list = convergents(&cf_expand(&ratio(6, 20)).unwrap());
        assert_eq!(pairs(&list), vec![(0, 1), (1, 3), (3, 10)]);
    }

    #[test]
    fn candidate_examples() {
        let cands = best_denominator_candidates(&ratio(6, 20), &BigUint::from(5u32)).unwrap();
        assert_eq!(cands, vec![ratio(0, 1), ratio(1, 3)]);

        let cands = best_denominator_candidates(&ratio(0, 1), &BigUint::from(10u32)).unwrap();
        assert_eq!(cands, vec![ratio(0, 1)]);

        let cands = best_denominator_candidates(&ratio(7, 10), &BigUint::from(3u32)).unwrap();
        assert_eq!(cands, vec![ratio(0, 1), ratio(1, 1), ratio(2, 3)]);
    }

    #[test]
    fn canonical_form_invariants_on_a_sweep() {
        // 10^4 pseudorandom rationals with numerator and denominator up to 10^6.
        let mut state = 0x1234_5678_9abc_def0u64;
        let mut next = || {
            state = crate::seed::splitmix64(state);
            state
        };
        for _ in 0..10_000 {
            let n = next() % 1_000_000;
            let d = 1 + next() % 999_999;
            let r = ratio(n as i64, d as i64);
            let cf = cf_expand(&r).unwrap();
            let cs = cf.coefficients();
            for a in &cs[1..] {
                assert!(*a >= BigInt::one(), "non-positive tail coefficient for {}", r);
            }
            if cs.len() > 1 {
                assert!(
                    *cs.last().unwrap() >= BigInt::from(2),
                    "non-canonical final coefficient for {}",
                    r
                );
            }
            assert_eq!(cf.value(), r, "expansion round trip failed for {}", r);

            let list = convergents(&cf);
            assert_eq!(list.last().as_rational(), r, "last convergent != input for {}", r);
            assert!(determinant_identity_holds(&list), "determinant identity failed for {}", r);
            assert!(all_reduced(&list), "unreduced convergent for {}", r);
            let e = list.entries();
            for k in 2..e.len() {
                assert!(e[k].denom > e[k - 1].denom, "denominators not increasing for {}", r);
            }
        }
    }

    #[test]
    fn eigenvalue_denominators_appear_among_convergents() {
        // For every period P in 2..=50 and every lattice index n in 0..2P,
        // flooring Q n / P at Q = 2 P^2 loses nothing: the reduced n/P shows
        // up among the convergents of m/Q. Also checked at Q slightly above
        // the threshold, where m/Q only approximates n/P.
        for p in 2i64..=50 {
            for n in 0..(2 * p) {
                for q in [2 * p * p, 2 * p * p + 1, 2 * p * p + 7] {
                    let m = (q * n) / p; // floor, all operands nonnegative
                    let measured = ratio(m, q);
                    let target = ratio(n, p);
                    let list = convergents(&cf_expand(&measured).unwrap());
                    let found = list
                        .entries()
                        .iter()
                        .any(|c| c.as_rational() == target);
                    assert!(
                        found,
                        "n/P = {}/{} missing from convergents of {}/{}",
                        n, p, m, q
                    );
                }
            }
        }
    }

    proptest! {
        #[test]
        fn expansion_round_trips(n in 0i64..=1_000_000, d in 1i64..=1_000_000) {
            let r = ratio(n, d);
            let cf = cf_expand(&r).unwrap();
            prop_assert_eq!(cf.value(), r.clone());
            let list = convergents(&cf);
            prop_assert_eq!(list.last().as_rational(), r);
            prop_assert!(determinant_identity_holds(&list));
        }

        #[test]
        fn candidates_respect_the_bound(n in 0i64..=100_000, d in 1i64..=100_000, bound in 1u64..=1000) {
            let r = ratio(n, d);
            let cands = best_denominator_candidates(&r, &BigUint::from(bound)).unwrap();
            for c in &cands {
                prop_assert!(c.denom() <= &BigInt::from(bound));
            }
            let mut prev = BigInt::zero();
            for c in &cands {
                prop_assert!(c.denom() >= &prev);
                prev = c.denom().clone();
            }
        }
    }
}
