//! Grid-mode state: a window of W periods sampled M times per period.
//!
//! The left register holds the grid index j = 0..MW−1 (position x = j·P/M);
//! the right register holds the function value, clustered into bins. The DFT
//! runs per bin, and for a function that is exactly M-sample periodic each
//! bin's support is an arithmetic progression with step M, so the transform
//! concentrates all mass on frequency multiples of W: the discrete shadow of
//! the lattice {n/P}.

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use std::io::{self, Write};

use super::SimError;
use crate::function::{Period, PeriodicFunction};
use crate::scalar::Real;

/// Clustering tolerance for right-register values; values produced by the
/// registered kinds repeat exactly across periods, so this only absorbs
/// rounding.
const EPSILON_BIN: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct TwoRegisterState<T: Real> {
    period: Period,
    samples_per_period: usize,
    window_periods: usize,
    x_step: T,
    /// Bin id of each residue j mod M, bins ordered by representative value.
    bin_of_residue: Vec<usize>,
    /// Representative function value per bin, ascending.
    bin_values: Vec<T>,
    /// Per-bin left-register amplitude vectors over j = 0..MW−1.
    amplitudes: Vec<Vec<Complex<T>>>,
    transformed: bool,
}

impl<T: Real> TwoRegisterState<T> {
    pub fn period(&self) -> &Period {
        &self.period
    }

    pub fn samples_per_period(&self) -> usize {
        self.samples_per_period
    }

    pub fn window_periods(&self) -> usize {
        self.window_periods
    }

    pub fn grid_size(&self) -> usize {
        self.samples_per_period * self.window_periods
    }

    pub fn x_step(&self) -> T {
        self.x_step
    }

    pub fn bin_count(&self) -> usize {
        self.bin_values.len()
    }

    pub fn bin_values(&self) -> &[T] {
        &self.bin_values
    }

    pub fn is_transformed(&self) -> bool {
        self.transformed
    }

    /// Number of grid slots carrying amplitude in each bin.
    pub fn bin_populations(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.bin_count()];
        for b in &self.bin_of_residue {
            counts[*b] += self.window_periods;
        }
        counts
    }

    pub fn bin_amplitudes(&self, bin: usize) -> &[Complex<T>] {
        &self.amplitudes[bin]
    }

    pub fn total_probability(&self) -> T {
        self.amplitudes
            .iter()
            .flat_map(|v| v.iter())
            .map(|c| c.norm_sqr())
            .fold(T::zero(), |acc, v| acc + v)
    }
}

/// Uniform superposition over the grid with the right register set to the
/// binned function value: amplitude 1/sqrt(MW) at (j, bin(Φ(j·P/M))).
pub fn prepare_superposition<T: Real>(
    f: &PeriodicFunction<T>,
    samples_per_period: usize,
    window_periods: usize,
) -> Result<TwoRegisterState<T>, SimError> {
    if !f.period().is_rational() {
        return Err(SimError::IrrationalPeriod(f.period().to_string()));
    }
    if samples_per_period < 2 {
        return Err(SimError::TooFewSamples(samples_per_period));
    }
    if window_periods < 1 {
        return Err(SimError::EmptyWindow(window_periods));
    }
    let m = samples_per_period;
    let n = m * window_periods;
    let x_step = f.period_value() / T::of(m as f64);

    // Evaluate one period of residues; every other grid point reuses the
    // identical float, so cross-period bin membership is exact.
    let values: Vec<T> = (0..m).map(|r| f.value_at(T::of(r as f64) * x_step)).collect();

    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|a, b| values[*a].partial_cmp(&values[*b]).expect("finite values"));
    let eps = T::of(EPSILON_BIN);
    let mut bin_of_residue = vec![0usize; m];
    let mut bin_values: Vec<T> = Vec::new();
    for r in order {
        match bin_values.last() {
            Some(last) if values[r] - *last <= eps => {}
            _ => bin_values.push(values[r]),
        }
        bin_of_residue[r] = bin_values.len() - 1;
    }

    let amp = T::one() / T::of(n as f64).sqrt();
    let mut amplitudes = vec![vec![Complex::new(T::zero(), T::zero()); n]; bin_values.len()];
    for j in 0..n {
        amplitudes[bin_of_residue[j % m]][j] = Complex::new(amp, T::zero());
    }

    Ok(TwoRegisterState {
        period: f.period().clone(),
        samples_per_period: m,
        window_periods,
        x_step,
        bin_of_residue,
        bin_values,
        amplitudes,
        transformed: false,
    })
}

/// Size-N DFT of the left index within each value bin independently
/// (out[k] = N^{-1/2}·Σ_j in[j]·e^{−2πijk/N}); unitary, so normalization is
/// preserved. Phases come from a root table indexed by (j·k) mod N, so equal
/// angles get bit-identical values and comb cancellations are exact.
pub fn apply_fourier<T: Real>(state: &TwoRegisterState<T>) -> TwoRegisterState<T> {
    let n = state.grid_size();
    let mut roots = Vec::with_capacity(n);
    for r in 0..n {
        let theta = -2.0 * std::f64::consts::PI * (r as f64) / (n as f64);
        roots.push(Complex::new(T::of(theta.cos()), T::of(theta.sin())));
    }
    let scale = T::one() / T::of(n as f64).sqrt();
    let amplitudes = state
        .amplitudes
        .iter()
        .map(|input| {
            let support: Vec<usize> = (0..n).filter(|j| input[*j].norm_sqr() != T::zero()).collect();
            (0..n)
                .map(|k| {
                    let mut acc = Complex::new(T::zero(), T::zero());
                    for &j in &support {
                        acc = acc + input[j] * roots[(j as u64 * k as u64 % n as u64) as usize];
                    }
                    acc * scale
                })
                .collect()
        })
        .collect();
    TwoRegisterState {
        period: state.period.clone(),
        samples_per_period: state.samples_per_period,
        window_periods: state.window_periods,
        x_step: state.x_step,
        bin_of_residue: state.bin_of_residue.clone(),
        bin_values: state.bin_values.clone(),
        amplitudes,
        transformed: true,
    }
}

/// One frequency cell of the left-register distribution: raw DFT index k,
/// its signed alias, the physical frequency y = alias/(W·P) as an exact
/// rational, and the probability.
#[derive(Debug, Clone)]
pub struct FrequencyPoint<T: Real> {
    pub k: u64,
    pub alias: i64,
    pub y: BigRational,
    pub probability: T,
}

#[derive(Debug, Clone)]
pub struct FrequencyDistribution<T: Real> {
    points: Vec<FrequencyPoint<T>>,
}

impl<T: Real> FrequencyDistribution<T> {
    /// Wraps externally built points, enforcing normalization.
    pub fn from_points(points: Vec<FrequencyPoint<T>>) -> Result<Self, SimError> {
        let dist = FrequencyDistribution { points };
        let total = dist.total().as_f64();
        if (total - 1.0).abs() > 1e-9 {
            return Err(SimError::NotNormalized(total));
        }
        Ok(dist)
    }

    pub fn points(&self) -> &[FrequencyPoint<T>] {
        &self.points
    }

    pub fn total(&self) -> T {
        self.points
            .iter()
            .map(|p| p.probability)
            .fold(T::zero(), |acc, v| acc + v)
    }

    /// Probability mass on DFT indices that are not multiples of `stride`.
    pub fn off_lattice_mass(&self, stride: u64) -> T {
        self.points
            .iter()
            .filter(|p| p.k % stride != 0)
            .map(|p| p.probability)
            .fold(T::zero(), |acc, v| acc + v)
    }

    /// Masses aggregated to lattice indices n = alias/stride for |n| ≤
    /// n_window, renormalized over the window.
    pub fn lattice_marginal(&self, stride: u64, n_window: i64) -> Vec<(i64, T)> {
        let mut out: Vec<(i64, T)> =
            (-n_window..=n_window).map(|n| (n, T::zero())).collect();
        let mut mass = T::zero();
        for p in &self.points {
            if p.k % stride != 0 {
                continue;
            }
            let n = p.alias / stride as i64;
            if n.abs() <= n_window {
                out[(n + n_window) as usize].1 = out[(n + n_window) as usize].1 + p.probability;
                mass = mass + p.probability;
            }
        }
        if mass > T::zero() {
            for (_, w) in &mut out {
                *w = *w / mass;
            }
        }
        out
    }

    /// CSV rows `k,y_numer,y_denom,probability`.
    pub fn write_csv(&self, out: &mut dyn Write) -> io::Result<()> {
        writeln!(out, "k,y_numer,y_denom,probability")?;
        for p in &self.points {
            writeln!(
                out,
                "{},{},{},{}",
                p.k,
                p.y.numer(),
                p.y.denom(),
                p.probability.as_f64()
            )?;
        }
        Ok(())
    }
}

/// Aggregates the transformed state over bins: prob(k) = Σ_bins |amplitude
/// at k|². Frequencies above Nyquist are reported as negative aliases, and
/// y = alias/(W·P) exactly.
pub fn left_register_distribution<T: Real>(
    state: &TwoRegisterState<T>,
) -> Result<FrequencyDistribution<T>, SimError> {
    if !state.transformed {
        return Err(SimError::NotTransformed);
    }
    let n = state.grid_size();
    let period = state
        .period
        .as_rational()
        .expect("grid states always carry a rational period");
    let w = BigInt::from(state.window_periods);
    let mut points = Vec::with_capacity(n);
    for k in 0..n {
        let probability = state
            .amplitudes
            .iter()
            .map(|bin| bin[k].norm_sqr())
            .fold(T::zero(), |acc, v| acc + v);
        let alias = if k <= n / 2 { k as i64 } else { k as i64 - n as i64 };
        // y = alias/(W·P) = alias·b/(W·a) for P = a/b.
        let y = BigRational::new(
            BigInt::from(alias) * period.denom(),
            &w * period.numer(),
        );
        points.push(FrequencyPoint { k: k as u64, alias, y, probability });
    }
    let dist = FrequencyDistribution { points };
    let total = dist.total().as_f64();
    if (total - 1.0).abs() > 1e-10 {
        return Err(SimError::NotNormalized(total));
    }
    Ok(dist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ratio;
    use crate::function::PeriodicFunction;

    fn saw1() -> PeriodicFunction<f64> {
        PeriodicFunction::sawtooth(Period::parse("1").unwrap()).unwrap()
    }

    #[test]
    fn constant_state_has_one_bin() {
        let f = PeriodicFunction::constant(Period::parse("1").unwrap(), 2.0).unwrap();
        let state = prepare_superposition(&f, 4, 2).unwrap();
        assert_eq!(state.grid_size(), 8);
        assert_eq!(state.bin_count(), 1);
        assert_eq!(state.bin_populations(), vec![8]);
        let amp = 1.0 / 8f64.sqrt();
        for c in state.bin_amplitudes(0) {
            assert!((c.re - amp).abs() < 1e-15 && c.im == 0.0);
        }
        assert!((state.total_probability() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sawtooth_bins_enumerate_the_period() {
        let state = prepare_superposition(&saw1(), 4, 2).unwrap();
        assert_eq!(state.bin_count(), 4);
        assert_eq!(state.bin_values(), &[0.0, 0.25, 0.5, 0.75]);
        assert_eq!(state.bin_populations(), vec![2, 2, 2, 2]);

        let state = prepare_superposition(&saw1(), 8, 1).unwrap();
        assert_eq!(state.bin_count(), 8);
        assert_eq!(state.bin_populations(), vec![1; 8]);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(matches!(
            prepare_superposition(&saw1(), 1, 4),
            Err(SimError::TooFewSamples(1))
        ));
        assert!(matches!(
            prepare_superposition(&saw1(), 8, 0),
            Err(SimError::EmptyWindow(0))
        ));
        let irr = PeriodicFunction::<f64>::triangle(Period::parse("sqrt:2").unwrap()).unwrap();
        assert!(matches!(
            prepare_superposition(&irr, 8, 2),
            Err(SimError::IrrationalPeriod(_))
        ));
    }

    #[test]
    fn constant_transforms_to_pure_dc() {
        let f: PeriodicFunction<f64> =
            PeriodicFunction::constant(Period::parse("1").unwrap(), 1.0).unwrap();
        let state = apply_fourier(&prepare_superposition(&f, 4, 2).unwrap());
        let dist = left_register_distribution(&state).unwrap();
        assert!((dist.points()[0].probability - 1.0).abs() < 1e-12);
        for p in &dist.points()[1..] {
            assert!(p.probability < 1e-12);
        }
    }

    #[test]
    fn transform_is_unitary() {
        let state = apply_fourier(&prepare_superposition(&saw1(), 8, 4).unwrap());
        assert!((state.total_probability() - 1.0).abs() < 1e-12);
        assert!(state.is_transformed());
    }

    #[test]
    fn grid_periodic_function_concentrates_on_stride_multiples() {
        let state = apply_fourier(&prepare_superposition(&saw1(), 8, 4).unwrap());
        let dist = left_register_distribution(&state).unwrap();
        assert!(dist.off_lattice_mass(4) <= 1e-9);
        // The sawtooth is injective on its 8 grid residues, so the on-comb
        // mass is uniform: 8 lattice points at 1/8 each.
        for p in dist.points() {
            if p.k % 4 == 0 {
                assert!((p.probability - 0.125).abs() < 1e-9, "k={}", p.k);
            }
        }
    }

    #[test]
    fn aliases_and_exact_frequencies() {
        let f: PeriodicFunction<f64> =
            PeriodicFunction::sawtooth(Period::parse("5/3").unwrap()).unwrap();
        let state = apply_fourier(&prepare_superposition(&f, 4, 2).unwrap());
        let dist = left_register_distribution(&state).unwrap();
        let points = dist.points();
        assert_eq!(points[4].alias, 4); // n = 8 keeps k = N/2 positive
        assert_eq!(points[5].alias, -3);
        // y = alias/(W·P): k=5 aliases to -3, so y = -3/(2·5/3) = -9/10.
        assert_eq!(points[5].y, ratio(-9, 10));
        assert_eq!(points[2].y, ratio(3, 5));
    }

    #[test]
    fn lattice_marginal_aggregates_and_renormalizes() {
        let state = apply_fourier(&prepare_superposition(&saw1(), 8, 4).unwrap());
        let dist = left_register_distribution(&state).unwrap();
        let marginal = dist.lattice_marginal(4, 2);
        assert_eq!(marginal.len(), 5);
        for (_, w) in &marginal {
            assert!((w - 0.2).abs() < 1e-9);
        }
    }

    #[test]
    fn from_points_requires_normalization() {
        let err = FrequencyDistribution::from_points(vec![FrequencyPoint {
            k: 0,
            alias: 0,
            y: ratio(1, 3),
            probability: 0.5f64,
        }]);
        assert!(matches!(err, Err(SimError::NotNormalized(_))));
    }

    #[test]
    fn distribution_csv_layout() {
        let f = PeriodicFunction::constant(Period::parse("1").unwrap(), 1.0).unwrap();
        let state = apply_fourier(&prepare_superposition(&f, 2, 1).unwrap());
        let dist = left_register_distribution(&state).unwrap();
        let mut buf = Vec::new();
        dist.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "k,y_numer,y_denom,probability");
        assert_eq!(lines.len(), 3);
        let fields: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(&fields[..3], &["0", "0", "1"]);
        assert!((fields[3].parse::<f64>().unwrap() - 1.0).abs() < 1e-12);
    }
}
