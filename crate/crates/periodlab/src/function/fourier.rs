//! Fourier coefficients on the frequency lattice {n/P} and truncated
//! reconstruction.
//!
//! Coefficients follow c_n = (1/P)·∫₀ᴾ Φ(x)·e^{−2πinx/P} dx, computed by
//! adaptive Simpson quadrature over the smooth pieces of the shape, with
//! closed forms available for the analytic kinds as an independent
//! cross-check. Reconstruction uses the conjugate kernel e^{+2πinx/P}, so
//! partial sums converge to Φ at continuity points.

use std::io::{self, Write};

use num_complex::Complex;
use thiserror::Error;

use super::{FunctionKind, PeriodicFunction};
use crate::scalar::Real;

/// Absolute tolerance for coefficient quadrature.
pub const DEFAULT_QUADRATURE_TOLERANCE: f64 = 1e-10;

const MAX_DEPTH: u32 = 40;
const EVAL_BUDGET: i64 = 400_000;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("quadrature stalled at achieved tolerance {achieved:.3e} (requested {requested:.3e})")]
pub struct QuadratureError {
    pub requested: f64,
    pub achieved: f64,
}

fn simpson_rule<T: Real>(fa: T, fm: T, fb: T, width: T) -> T {
    width / T::of(6.0) * (fa + T::of(4.0) * fm + fb)
}

/// Standard adaptive Simpson: split until the Richardson defect is within
/// the local budget, with a depth cap and a global evaluation budget so the
/// worst case stays bounded. Returns (value, error bound).
#[allow(clippy::too_many_arguments)]
fn adapt<T: Real>(
    f: &dyn Fn(T) -> T,
    a: T,
    fa: T,
    b: T,
    fb: T,
    m: T,
    fm: T,
    whole: T,
    tol: T,
    depth: u32,
    budget: &mut i64,
) -> (T, T) {
    let two = T::of(2.0);
    let lm = (a + m) / two;
    let rm = (m + b) / two;
    let flm = f(lm);
    let frm = f(rm);
    *budget -= 2;
    let left = simpson_rule(fa, flm, fm, m - a);
    let right = simpson_rule(fm, frm, fb, b - m);
    let delta = left + right - whole;
    let err = delta.abs() / T::of(15.0);
    if delta.abs() <= T::of(15.0) * tol || depth == 0 || *budget <= 0 {
        (left + right + delta / T::of(15.0), err)
    } else {
        let half = tol / two;
        let (lv, le) = adapt(f, a, fa, m, fm, lm, flm, left, half, depth - 1, budget);
        let (rv, re) = adapt(f, m, fm, b, fb, rm, frm, right, half, depth - 1, budget);
        (lv + rv, le + re)
    }
}

/// Integrates f over [lo, hi], pre-splitting into `panels` so oscillatory
/// integrands start resolved. Returns (value, error bound).
fn integrate<T: Real>(f: &dyn Fn(T) -> T, lo: T, hi: T, panels: usize, tol: T) -> (T, T) {
    let mut budget = EVAL_BUDGET;
    let mut value = T::zero();
    let mut err = T::zero();
    let width = (hi - lo) / T::of(panels as f64);
    let panel_tol = tol / T::of(panels as f64);
    for i in 0..panels {
        let a = lo + width * T::of(i as f64);
        let b = if i + 1 == panels { hi } else { lo + width * T::of((i + 1) as f64) };
        let m = (a + b) / T::of(2.0);
        let (fa, fm, fb) = (f(a), f(m), f(b));
        let whole = simpson_rule(fa, fm, fb, b - a);
        let (v, e) = adapt(f, a, fa, b, fb, m, fm, whole, panel_tol, MAX_DEPTH, &mut budget);
        value = value + v;
        err = err + e;
    }
    (value, err)
}

/// Highest active harmonic of a trigonometric polynomial (0 for other
/// kinds); used to seed the panel count.
fn max_harmonic<T: Real>(f: &PeriodicFunction<T>) -> i64 {
    match f.kind() {
        FunctionKind::TrigPolynomial { cos, sin, .. } => {
            let top = |v: &Vec<T>| {
                v.iter()
                    .enumerate()
                    .rev()
                    .find(|(_, c)| **c != T::zero())
                    .map(|(i, _)| (i + 1) as i64)
                    .unwrap_or(0)
            };
            top(cos).max(top(sin))
        }
        _ => 0,
    }
}

fn panel_count<T: Real>(oscillations: i64, len: T, period: T) -> usize {
    let frac = (len / period).as_f64();
    let n = (4.0 * oscillations as f64 * frac).ceil() as usize;
    n.max(1)
}

pub fn fourier_coefficient<T: Real>(
    f: &PeriodicFunction<T>,
    n: i64,
) -> Result<Complex<T>, QuadratureError> {
    fourier_coefficient_with_tolerance(f, n, T::of(DEFAULT_QUADRATURE_TOLERANCE))
}

/// c_n by piecewise adaptive quadrature of the real and imaginary parts.
pub fn fourier_coefficient_with_tolerance<T: Real>(
    f: &PeriodicFunction<T>,
    n: i64,
    tol: T,
) -> Result<Complex<T>, QuadratureError> {
    let p = f.period_value();
    let two_pi = T::PI() + T::PI();
    let omega = two_pi * T::of(n as f64) / p;
    let oscillations = n.abs() + max_harmonic(f);
    // Budget the requested coefficient tolerance across the integral:
    // |Δc| <= (Δre + Δim)/P.
    let integral_tol = tol * p / T::of(2.0);
    let mut re = T::zero();
    let mut im = T::zero();
    let mut err = T::zero();
    for piece in f.pieces() {
        let len = piece.hi - piece.lo;
        let panels = panel_count(oscillations, len, p);
        let share = integral_tol * len / p;
        let eval = &piece.eval;
        let g_re = move |x: T| (eval)(x) * (omega * x).cos();
        let g_im = move |x: T| -(eval)(x) * (omega * x).sin();
        let (vr, er) = integrate(&g_re, piece.lo, piece.hi, panels, share);
        let (vi, ei) = integrate(&g_im, piece.lo, piece.hi, panels, share);
        re = re + vr;
        im = im + vi;
        err = err + er + ei;
    }
    let achieved = (err / p).as_f64();
    if achieved > tol.as_f64() {
        return Err(QuadratureError { requested: tol.as_f64(), achieved });
    }
    let theta = -omega * f.phase();
    Ok(Complex::new(re / p, im / p) * Complex::from_polar(T::one(), theta))
}

/// Exact coefficient where the kind admits one (all kinds except tabulated).
/// Amplitude scales linearly; the phase shift contributes e^{−2πin·phase/P}.
pub fn closed_form_coefficient<T: Real>(f: &PeriodicFunction<T>, n: i64) -> Option<Complex<T>> {
    let p = f.period_value();
    let a = f.amplitude();
    let pi = T::PI();
    let nf = T::of(n as f64);
    let base: Complex<T> = match f.kind() {
        FunctionKind::Sawtooth => {
            if n == 0 {
                Complex::new(a * p / T::of(2.0), T::zero())
            } else {
                Complex::new(T::zero(), a * p / (T::of(2.0) * pi * nf))
            }
        }
        FunctionKind::Triangle => {
            if n == 0 {
                Complex::new(a / T::of(2.0), T::zero())
            } else if n % 2 != 0 {
                Complex::new(-T::of(2.0) * a / (pi * pi * nf * nf), T::zero())
            } else {
                Complex::new(T::zero(), T::zero())
            }
        }
        FunctionKind::Square { low, high } => {
            if n == 0 {
                Complex::new(a * (*high + *low) / T::of(2.0), T::zero())
            } else if n % 2 != 0 {
                Complex::new(T::zero(), -a * (*high - *low) / (pi * nf))
            } else {
                Complex::new(T::zero(), T::zero())
            }
        }
        FunctionKind::TrigPolynomial { dc, cos, sin } => {
            if n == 0 {
                Complex::new(a * *dc, T::zero())
            } else {
                let k = n.unsigned_abs() as usize;
                let ck = cos.get(k - 1).copied().unwrap_or_else(T::zero);
                let sk = sin.get(k - 1).copied().unwrap_or_else(T::zero);
                // cos contributes (ck/2) at ±k; sin contributes ∓i·(sk/2).
                let half = T::of(2.0);
                if n > 0 {
                    Complex::new(a * ck / half, -a * sk / half)
                } else {
                    Complex::new(a * ck / half, a * sk / half)
                }
            }
        }
        FunctionKind::Tabulated { .. } => return None,
    };
    let two_pi = T::PI() + T::PI();
    let theta = -two_pi * nf * f.phase() / p;
    Some(base * Complex::from_polar(T::one(), theta))
}

/// The transform of Φ restricted to the lattice window |n| ≤ n_max: the
/// frequency-space comb supported on {n/P} with scalar factors c_n.
#[derive(Debug, Clone)]
pub struct LatticeComb<T: Real> {
    period_value: T,
    entries: Vec<(i64, Complex<T>)>,
}

impl<T: Real> LatticeComb<T> {
    pub fn period_value(&self) -> T {
        self.period_value
    }

    /// Entries ordered by n from −n_max to n_max.
    pub fn entries(&self) -> &[(i64, Complex<T>)] {
        &self.entries
    }

    pub fn n_max(&self) -> i64 {
        self.entries.last().map(|(n, _)| *n).unwrap_or(0)
    }

    pub fn coefficient(&self, n: i64) -> Option<Complex<T>> {
        let n_max = self.n_max();
        if n < -n_max || n > n_max {
            return None;
        }
        Some(self.entries[(n + n_max) as usize].1)
    }

    /// Re Σ c_n e^{+2πinx/P}.
    pub fn reconstruct(&self, x: T) -> T {
        let two_pi = T::PI() + T::PI();
        let mut acc = Complex::new(T::zero(), T::zero());
        for (n, c) in &self.entries {
            let theta = two_pi * T::of(*n as f64) * x / self.period_value;
            acc = acc + *c * Complex::from_polar(T::one(), theta);
        }
        acc.re
    }

    /// Σ |c_n|² over the window (the truncated Parseval sum).
    pub fn power(&self) -> T {
        self.entries
            .iter()
            .map(|(_, c)| c.norm_sqr())
            .fold(T::zero(), |acc, v| acc + v)
    }

    /// Indices whose coefficient magnitude exceeds `relative_threshold`
    /// times the largest magnitude in the window.
    pub fn support_indices(&self, relative_threshold: T) -> Vec<i64> {
        let max = self
            .entries
            .iter()
            .map(|(_, c)| c.norm())
            .fold(T::zero(), T::max);
        let cut = max * relative_threshold;
        self.entries
            .iter()
            .filter(|(_, c)| c.norm() > cut)
            .map(|(n, _)| *n)
            .collect()
    }

    /// CSV rows `n,re,im,abs`.
    pub fn write_csv(&self, out: &mut dyn Write) -> io::Result<()> {
        writeln!(out, "n,re,im,abs")?;
        for (n, c) in &self.entries {
            writeln!(out, "{},{},{},{}", n, c.re.as_f64(), c.im.as_f64(), c.norm().as_f64())?;
        }
        Ok(())
    }
}

/// Tabulates c_n for |n| ≤ n_max, using closed forms where the kind has
/// them and quadrature otherwise.
pub fn fourier_transform<T: Real>(
    f: &PeriodicFunction<T>,
    n_max: i64,
) -> Result<LatticeComb<T>, QuadratureError> {
    let mut entries = Vec::with_capacity((2 * n_max + 1) as usize);
    for n in -n_max..=n_max {
        let c = match closed_form_coefficient(f, n) {
            Some(c) => c,
            None => fourier_coefficient(f, n)?,
        };
        entries.push((n, c));
    }
    Ok(LatticeComb { period_value: f.period_value(), entries })
}

/// Truncated inverse transform at a point.
pub fn reconstruct<T: Real>(
    f: &PeriodicFunction<T>,
    x: T,
    n_terms: i64,
) -> Result<T, QuadratureError> {
    Ok(fourier_transform(f, n_terms)?.reconstruct(x))
}

/// (1/P)·∫₀ᴾ Φ² by piecewise quadrature; the Parseval ceiling for the
/// truncated power sums.
pub fn mean_square<T: Real>(f: &PeriodicFunction<T>) -> Result<T, QuadratureError> {
    let p = f.period_value();
    let tol = T::of(DEFAULT_QUADRATURE_TOLERANCE);
    let oscillations = 2 * max_harmonic(f);
    let mut acc = T::zero();
    let mut err = T::zero();
    for piece in f.pieces() {
        let len = piece.hi - piece.lo;
        let panels = panel_count(oscillations, len, p);
        let eval = &piece.eval;
        let g = move |x: T| (eval)(x) * (eval)(x);
        let (v, e) = integrate(&g, piece.lo, piece.hi, panels, tol * len / p);
        acc = acc + v;
        err = err + e;
    }
    let achieved = (err / p).as_f64();
    if achieved > tol.as_f64() {
        return Err(QuadratureError { requested: tol.as_f64(), achieved });
    }
    Ok(acc / p)
}

/// Largest |reconstruction − Φ| over the deterministic low-discrepancy
/// sample of one period (which avoids the measure-zero discontinuity set).
pub fn max_reconstruction_error<T: Real>(
    f: &PeriodicFunction<T>,
    comb: &LatticeComb<T>,
    n_samples: usize,
) -> T {
    let p = f.period_value();
    let mut worst = T::zero();
    for i in 0..n_samples {
        let t = ((i as f64 + 0.5) * super::GOLDEN_FRACTION).fract();
        let x = T::of(t) * p;
        let d = (comb.reconstruct(x) - f.value_at(x)).abs();
        if d > worst {
            worst = d;
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::{Period, PeriodicFunction};

    fn unit_sawtooth() -> PeriodicFunction<f64> {
        PeriodicFunction::sawtooth(Period::parse("1").unwrap()).unwrap()
    }

    fn cdist(a: Complex<f64>, b: Complex<f64>) -> f64 {
        (a - b).norm()
    }

    #[test]
    fn sawtooth_dc_term() {
        let c0 = fourier_coefficient(&unit_sawtooth(), 0).unwrap();
        assert!(cdist(c0, Complex::new(0.5, 0.0)) < 1e-10);
    }

    #[test]
    fn sawtooth_third_harmonic_is_i_over_6pi() {
        let c3 = fourier_coefficient(&unit_sawtooth(), 3).unwrap();
        let expected = Complex::new(0.0, 1.0 / (6.0 * std::f64::consts::PI));
        assert!(cdist(c3, expected) < 1e-9, "got {}", c3);
        assert!((c3.norm() - 1.0 / (6.0 * std::f64::consts::PI)).abs() < 1e-9);
    }

    #[test]
    fn constant_has_only_a_dc_coefficient() {
        let f = PeriodicFunction::constant(Period::parse("1").unwrap(), 1.0).unwrap();
        for n in [-3i64, -1, 1, 2, 5] {
            assert!(fourier_coefficient(&f, n).unwrap().norm() < 1e-10);
        }
        assert!(cdist(fourier_coefficient(&f, 0).unwrap(), Complex::new(1.0, 0.0)) < 1e-12);
    }

    #[test]
    fn cosine_transform_is_half_at_plus_minus_one() {
        let f = PeriodicFunction::trig_polynomial(
            Period::parse("1").unwrap(),
            0.0,
            vec![1.0],
            vec![],
        )
        .unwrap();
        let comb = fourier_transform(&f, 2).unwrap();
        assert!(cdist(comb.coefficient(1).unwrap(), Complex::new(0.5, 0.0)) < 1e-12);
        assert!(cdist(comb.coefficient(-1).unwrap(), Complex::new(0.5, 0.0)) < 1e-12);
        for n in [-2i64, 0, 2] {
            assert!(comb.coefficient(n).unwrap().norm() < 1e-12);
        }
        assert_eq!(comb.support_indices(1e-9), vec![-1, 1]);
    }

    #[test]
    fn quadrature_matches_closed_forms() {
        let shapes: Vec<PeriodicFunction<f64>> = vec![
            unit_sawtooth(),
            PeriodicFunction::sawtooth(Period::parse("5/3").unwrap())
                .unwrap()
                .with_amplitude(2.0)
                .unwrap()
                .with_phase(0.3)
                .unwrap(),
            PeriodicFunction::triangle(Period::parse("2").unwrap()).unwrap(),
            PeriodicFunction::square(Period::parse("1").unwrap(), -1.0, 1.0).unwrap(),
            PeriodicFunction::square(Period::parse("3/2").unwrap(), 0.0, 1.0)
                .unwrap()
                .with_phase(0.41)
                .unwrap(),
            PeriodicFunction::trig_polynomial(
                Period::parse("5").unwrap(),
                0.25,
                vec![1.0, 0.0, -0.5],
                vec![0.0, 0.75],
            )
            .unwrap(),
        ];
        for f in &shapes {
            for n in -16i64..=16 {
                let q = fourier_coefficient(f, n).unwrap();
                let c = closed_form_coefficient(f, n).unwrap();
                assert!(
                    cdist(q, c) < 1e-8,
                    "coefficient mismatch at n={} for {:?}: {} vs {}",
                    n,
                    f.kind(),
                    q,
                    c
                );
            }
        }
    }

    #[test]
    fn tabulated_kind_has_no_closed_form() {
        let f: PeriodicFunction<f64> = PeriodicFunction::tabulated(
            Period::parse("1").unwrap(),
            vec![0.0, 0.5],
            vec![0.0, 1.0],
        )
        .unwrap();
        assert!(closed_form_coefficient(&f, 1).is_none());
        // Quadrature still works on the piecewise-linear shape.
        let c0 = fourier_coefficient(&f, 0).unwrap();
        assert!((c0.re - 0.5).abs() < 1e-10);
    }

    #[test]
    fn reconstruction_examples() {
        let constant: PeriodicFunction<f64> =
            PeriodicFunction::constant(Period::parse("2").unwrap(), 1.0).unwrap();
        for x in [0.0, 0.7, 1.9] {
            assert!((reconstruct(&constant, x, 5).unwrap() - 1.0).abs() < 1e-10);
        }

        let triangle: PeriodicFunction<f64> =
            PeriodicFunction::triangle(Period::parse("1").unwrap()).unwrap();
        let got = reconstruct(&triangle, 0.25, 100).unwrap();
        assert!((got - triangle.value_at(0.25)).abs() < 0.01);

        let saw = unit_sawtooth();
        let got = reconstruct(&saw, 0.5, 500).unwrap();
        assert!((got - 0.5).abs() < 0.01);
    }

    #[test]
    fn reconstruction_error_shrinks_for_continuous_kinds() {
        let shapes: Vec<PeriodicFunction<f64>> = vec![
            PeriodicFunction::triangle(Period::parse("1").unwrap()).unwrap(),
            PeriodicFunction::trig_polynomial(
                Period::parse("1").unwrap(),
                0.0,
                vec![1.0, 0.5],
                vec![0.25],
            )
            .unwrap(),
        ];
        for f in &shapes {
            let mut prev = f64::INFINITY;
            for n_terms in [25i64, 50, 100, 200, 400] {
                let comb = fourier_transform(f, n_terms).unwrap();
                let err = max_reconstruction_error(f, &comb, 500);
                assert!(
                    err <= prev * 1.1 + 1e-12,
                    "error did not shrink: {} after {} at n_terms={}",
                    err,
                    prev,
                    n_terms
                );
                prev = err;
            }
            assert!(prev < 0.01);
        }
    }

    #[test]
    fn truncated_power_respects_parseval() {
        let shapes: Vec<PeriodicFunction<f64>> = vec![
            unit_sawtooth(),
            PeriodicFunction::triangle(Period::parse("2").unwrap()).unwrap(),
            PeriodicFunction::square(Period::parse("1").unwrap(), -1.0, 1.0).unwrap(),
        ];
        for f in &shapes {
            let ceiling = mean_square(f).unwrap();
            let mut prev = 0.0;
            for n_max in [1i64, 4, 16, 64] {
                let power = fourier_transform(f, n_max).unwrap().power();
                assert!(power + 1e-12 >= prev, "power sum not monotone");
                assert!(power <= ceiling + 1e-6, "power {} above ceiling {}", power, ceiling);
                prev = power;
            }
        }
    }

    #[test]
    fn comb_csv_layout() {
        let f = PeriodicFunction::constant(Period::parse("1").unwrap(), 1.0).unwrap();
        let comb = fourier_transform(&f, 1).unwrap();
        let mut buf = Vec::new();
        comb.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "n,re,im,abs");
        assert_eq!(lines.len(), 4);
        assert!(lines[2].starts_with("0,1,"));
    }

    #[test]
    fn unattainable_tolerance_reports_achieved_error() {
        let f = unit_sawtooth();
        let err = fourier_coefficient_with_tolerance(&f, 7, 1e-300).unwrap_err();
        assert_eq!(err.requested, 1e-300);
        assert!(err.achieved > 1e-300);
    }
}
