//! Periodic test functions with exactly known minimum period.
//!
//! Every function is amplitude·base((x − phase) mod P) for a registered base
//! shape, so the ground-truth period is part of the value and recovery runs
//! can be judged against it. Construction validates that the declared period
//! really is minimal (sampled, plus a structural check for trigonometric
//! polynomials), which keeps "recovered period = declared period" a
//! meaningful test.

pub mod fourier;
pub mod period;

use thiserror::Error;

use crate::scalar::Real;
pub use fourier::{LatticeComb, QuadratureError};
pub use period::{Period, PeriodError};

/// Sample count for the deterministic period test.
pub const DEFAULT_PERIOD_SAMPLES: usize = 1000;

/// Fractional part of the golden ratio; drives the low-discrepancy sample
/// sequence used by the period test, so accept/reject decisions are
/// deterministic.
const GOLDEN_FRACTION: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Error, PartialEq)]
pub enum FunctionError {
    #[error("input must be finite, got {0}")]
    NonFiniteInput(f64),
    #[error("{0} must be finite")]
    NonFiniteParameter(&'static str),
    #[error("{0} must be positive")]
    NotPositiveParameter(&'static str),
    #[error("amplitude must be nonzero for this kind")]
    ZeroAmplitude,
    #[error("square levels must differ")]
    DegenerateLevels,
    #[error("active harmonics share the common factor {0}, so the declared period is not minimal")]
    HarmonicCommonFactor(u64),
    #[error("declared period is not minimal: period/{divisor} is also a period")]
    NotMinimal { divisor: u32 },
    #[error("bad sample table: {0}")]
    BadTable(String),
    #[error(transparent)]
    Period(#[from] PeriodError),
}

/// Base shape of a periodic function, before amplitude and phase are applied.
#[derive(Debug, Clone, PartialEq)]
pub enum FunctionKind<T: Real> {
    /// base(u) = u on [0, P); jumps at period boundaries.
    Sawtooth,
    /// Rises 0 to 1 on [0, P/2], falls back to 0 on [P/2, P]; continuous.
    Triangle,
    /// `high` on [0, P/2), `low` on [P/2, P).
    Square { low: T, high: T },
    /// dc + Σ_k cos[k−1]·cos(2πku/P) + sin[k−1]·sin(2πku/P).
    TrigPolynomial { dc: T, cos: Vec<T>, sin: Vec<T> },
    /// Piecewise-linear interpolation of samples covering one period,
    /// wrapping from the last point back to the first.
    Tabulated { xs: Vec<T>, ys: Vec<T> },
}

#[derive(Debug, Clone)]
pub struct PeriodicFunction<T: Real> {
    kind: FunctionKind<T>,
    period: Period,
    period_value: T,
    amplitude: T,
    phase: T,
}

/// One smooth span of the base shape: `eval` is amplitude·base restricted to
/// [lo, hi], continuously extended to the closed endpoints so quadrature
/// never straddles a jump.
pub(crate) struct Piece<T> {
    pub lo: T,
    pub hi: T,
    pub eval: Box<dyn Fn(T) -> T>,
}

impl<T: Real> PeriodicFunction<T> {
    pub fn new(
        kind: FunctionKind<T>,
        period: Period,
        amplitude: T,
        phase: T,
    ) -> Result<Self, FunctionError> {
        if !amplitude.is_finite() {
            return Err(FunctionError::NonFiniteParameter("amplitude"));
        }
        if !phase.is_finite() {
            return Err(FunctionError::NonFiniteParameter("phase"));
        }
        let period_value: T = period.value();
        if !period_value.is_finite() || period_value <= T::zero() {
            return Err(FunctionError::NotPositiveParameter("period"));
        }
        let f = PeriodicFunction { kind, period, period_value, amplitude, phase };
        f.validate()?;
        Ok(f)
    }

    pub fn sawtooth(period: Period) -> Result<Self, FunctionError> {
        Self::new(FunctionKind::Sawtooth, period, T::one(), T::zero())
    }

    pub fn triangle(period: Period) -> Result<Self, FunctionError> {
        Self::new(FunctionKind::Triangle, period, T::one(), T::zero())
    }

    pub fn square(period: Period, low: T, high: T) -> Result<Self, FunctionError> {
        Self::new(FunctionKind::Square { low, high }, period, T::one(), T::zero())
    }

    pub fn constant(period: Period, value: T) -> Result<Self, FunctionError> {
        Self::new(
            FunctionKind::TrigPolynomial { dc: value, cos: Vec::new(), sin: Vec::new() },
            period,
            T::one(),
            T::zero(),
        )
    }

    pub fn trig_polynomial(
        period: Period,
        dc: T,
        cos: Vec<T>,
        sin: Vec<T>,
    ) -> Result<Self, FunctionError> {
        Self::new(FunctionKind::TrigPolynomial { dc, cos, sin }, period, T::one(), T::zero())
    }

    pub fn tabulated(period: Period, xs: Vec<T>, ys: Vec<T>) -> Result<Self, FunctionError> {
        Self::new(FunctionKind::Tabulated { xs, ys }, period, T::one(), T::zero())
    }

    pub fn with_amplitude(self, amplitude: T) -> Result<Self, FunctionError> {
        Self::new(self.kind, self.period, amplitude, self.phase)
    }

    pub fn with_phase(self, phase: T) -> Result<Self, FunctionError> {
        Self::new(self.kind, self.period, self.amplitude, phase)
    }

    pub fn kind(&self) -> &FunctionKind<T> {
        &self.kind
    }

    pub fn period(&self) -> &Period {
        &self.period
    }

    pub fn period_value(&self) -> T {
        self.period_value
    }

    pub fn amplitude(&self) -> T {
        self.amplitude
    }

    pub fn phase(&self) -> T {
        self.phase
    }

    /// True when the function takes a single value everywhere; such
    /// functions are exempt from the minimality requirement (every positive
    /// number is a period).
    pub fn is_constant(&self) -> bool {
        match &self.kind {
            FunctionKind::Sawtooth | FunctionKind::Triangle => false,
            FunctionKind::Square { .. } => false,
            FunctionKind::TrigPolynomial { cos, sin, .. } => {
                self.amplitude == T::zero()
                    || (cos.iter().all(|c| *c == T::zero())
                        && sin.iter().all(|s| *s == T::zero()))
            }
            FunctionKind::Tabulated { ys, .. } => {
                self.amplitude == T::zero() || ys.iter().all(|y| *y == ys[0])
            }
        }
    }

    /// True when the function has no jump discontinuities (decided per kind,
    /// not numerically).
    pub fn is_continuous(&self) -> bool {
        match &self.kind {
            FunctionKind::Sawtooth | FunctionKind::Square { .. } => false,
            FunctionKind::Triangle
            | FunctionKind::TrigPolynomial { .. }
            | FunctionKind::Tabulated { .. } => true,
        }
    }

    /// Absolute tolerance at which this kind reproduces its own values
    /// across periods: closed forms are exact up to rounding, tables carry
    /// interpolation error.
    pub fn periodicity_tolerance(&self) -> T {
        match &self.kind {
            FunctionKind::Tabulated { .. } => T::of(1e-6),
            _ => T::of(1e-9),
        }
    }

    pub fn evaluate(&self, x: T) -> Result<T, FunctionError> {
        if !x.is_finite() {
            return Err(FunctionError::NonFiniteInput(x.as_f64()));
        }
        Ok(self.value_at(x))
    }

    /// Infallible evaluation: folds x − phase into [0, P) and applies the
    /// amplitude-scaled base shape.
    pub fn value_at(&self, x: T) -> T {
        let p = self.period_value;
        let t = (x - self.phase) / p;
        let mut u = (t - t.floor()) * p;
        if u >= p {
            u = u - p;
        }
        if u < T::zero() {
            u = T::zero();
        }
        self.amplitude * self.base_value(u)
    }

    fn base_value(&self, u: T) -> T {
        let p = self.period_value;
        match &self.kind {
            FunctionKind::Sawtooth => u,
            FunctionKind::Triangle => {
                let h = p / T::of(2.0);
                if u <= h {
                    u / h
                } else {
                    (p - u) / h
                }
            }
            FunctionKind::Square { low, high } => {
                if u < p / T::of(2.0) {
                    *high
                } else {
                    *low
                }
            }
            FunctionKind::TrigPolynomial { dc, cos, sin } => {
                let two_pi = T::PI() + T::PI();
                let mut acc = *dc;
                for (i, c) in cos.iter().enumerate() {
                    let k = T::of((i + 1) as f64);
                    acc = acc + *c * (two_pi * k * u / p).cos();
                }
                for (i, s) in sin.iter().enumerate() {
                    let k = T::of((i + 1) as f64);
                    acc = acc + *s * (two_pi * k * u / p).sin();
                }
                acc
            }
            FunctionKind::Tabulated { xs, ys } => {
                let mut v = u;
                if v < xs[0] {
                    v = v + p;
                }
                let last = xs.len() - 1;
                if v >= xs[last] {
                    // Wrap segment from the final sample back to the first.
                    let x1 = xs[0] + p;
                    if xs[last] == x1 {
                        return ys[last];
                    }
                    let t = (v - xs[last]) / (x1 - xs[last]);
                    ys[last] + t * (ys[0] - ys[last])
                } else {
                    // xs[idx] <= v < xs[idx+1]; v >= xs[0] is guaranteed by
                    // the wrap above.
                    let idx = xs.partition_point(|x0| *x0 <= v) - 1;
                    let t = (v - xs[idx]) / (xs[idx + 1] - xs[idx]);
                    ys[idx] + t * (ys[idx + 1] - ys[idx])
                }
            }
        }
    }

    /// Largest observed |Φ(x+alpha) − Φ(x)| over a fixed low-discrepancy
    /// sample of [0, 2P). Zero (up to rounding) exactly when alpha is a
    /// period at the sampled resolution.
    pub fn period_defect(&self, alpha: T, n_samples: usize) -> T {
        let range = self.period_value * T::of(2.0);
        let mut worst = T::zero();
        for i in 0..n_samples {
            let t = ((i as f64 + 0.5) * GOLDEN_FRACTION).fract();
            let x = T::of(t) * range;
            let d = (self.value_at(x + alpha) - self.value_at(x)).abs();
            if d > worst {
                worst = d;
            }
        }
        worst
    }

    /// Numerical period test: true iff the sampled defect of `alpha` stays
    /// within `epsilon`.
    pub fn is_period(
        &self,
        alpha: T,
        epsilon: T,
        n_samples: usize,
    ) -> Result<bool, FunctionError> {
        if !(alpha > T::zero()) || !alpha.is_finite() {
            return Err(FunctionError::NotPositiveParameter("alpha"));
        }
        if !(epsilon > T::zero()) || !epsilon.is_finite() {
            return Err(FunctionError::NotPositiveParameter("epsilon"));
        }
        Ok(self.period_defect(alpha, n_samples) <= epsilon)
    }

    /// Smooth spans of amplitude·base covering one contiguous period, for
    /// piecewise quadrature. Endpoint values are one-sided limits, so each
    /// piece is continuous on its closed interval.
    pub(crate) fn pieces(&self) -> Vec<Piece<T>> {
        let p = self.period_value;
        let a = self.amplitude;
        match &self.kind {
            FunctionKind::Sawtooth => vec![Piece {
                lo: T::zero(),
                hi: p,
                eval: Box::new(move |u| a * u),
            }],
            FunctionKind::Triangle => {
                let h = p / T::of(2.0);
                vec![
                    Piece { lo: T::zero(), hi: h, eval: Box::new(move |u| a * u / h) },
                    Piece { lo: h, hi: p, eval: Box::new(move |u| a * (p - u) / h) },
                ]
            }
            FunctionKind::Square { low, high } => {
                let h = p / T::of(2.0);
                let (lo_v, hi_v) = (a * *low, a * *high);
                vec![
                    Piece { lo: T::zero(), hi: h, eval: Box::new(move |_| hi_v) },
                    Piece { lo: h, hi: p, eval: Box::new(move |_| lo_v) },
                ]
            }
            FunctionKind::TrigPolynomial { dc, cos, sin } => {
                let dc = *dc;
                let cos = cos.clone();
                let sin = sin.clone();
                let two_pi = T::PI() + T::PI();
                vec![Piece {
                    lo: T::zero(),
                    hi: p,
                    eval: Box::new(move |u| {
                        let mut acc = dc;
                        for (i, c) in cos.iter().enumerate() {
                            let k = T::of((i + 1) as f64);
                            acc = acc + *c * (two_pi * k * u / p).cos();
                        }
                        for (i, s) in sin.iter().enumerate() {
                            let k = T::of((i + 1) as f64);
                            acc = acc + *s * (two_pi * k * u / p).sin();
                        }
                        a * acc
                    }),
                }]
            }
            FunctionKind::Tabulated { xs, ys } => {
                let mut out = Vec::with_capacity(xs.len());
                for i in 0..xs.len() - 1 {
                    let (x0, x1, y0, y1) = (xs[i], xs[i + 1], ys[i], ys[i + 1]);
                    out.push(Piece {
                        lo: x0,
                        hi: x1,
                        eval: Box::new(move |u| {
                            a * (y0 + (u - x0) / (x1 - x0) * (y1 - y0))
                        }),
                    });
                }
                let last = xs.len() - 1;
                let (x0, x1, y0, y1) = (xs[last], xs[0] + p, ys[last], ys[0]);
                if x1 > x0 {
                    out.push(Piece {
                        lo: x0,
                        hi: x1,
                        eval: Box::new(move |u| {
                            a * (y0 + (u - x0) / (x1 - x0) * (y1 - y0))
                        }),
                    });
                }
                out
            }
        }
    }

    fn validate(&self) -> Result<(), FunctionError> {
        match &self.kind {
            FunctionKind::Sawtooth | FunctionKind::Triangle => {
                if self.amplitude == T::zero() {
                    return Err(FunctionError::ZeroAmplitude);
                }
            }
            FunctionKind::Square { low, high } => {
                if !low.is_finite() || !high.is_finite() {
                    return Err(FunctionError::NonFiniteParameter("levels"));
                }
                if self.amplitude == T::zero() {
                    return Err(FunctionError::ZeroAmplitude);
                }
                if low == high {
                    return Err(FunctionError::DegenerateLevels);
                }
            }
            FunctionKind::TrigPolynomial { dc, cos, sin } => {
                if !dc.is_finite() {
                    return Err(FunctionError::NonFiniteParameter("dc"));
                }
                if cos.iter().chain(sin.iter()).any(|c| !c.is_finite()) {
                    return Err(FunctionError::NonFiniteParameter("harmonic coefficients"));
                }
                let mut g = 0u64;
                for (i, c) in cos.iter().enumerate() {
                    if *c != T::zero() {
                        g = crate::arith::gcd_u64(g, (i + 1) as u64);
                    }
                }
                for (i, s) in sin.iter().enumerate() {
                    if *s != T::zero() {
                        g = crate::arith::gcd_u64(g, (i + 1) as u64);
                    }
                }
                if g > 1 {
                    return Err(FunctionError::HarmonicCommonFactor(g));
                }
            }
            FunctionKind::Tabulated { xs, ys } => {
                if xs.is_empty() || xs.len() != ys.len() {
                    return Err(FunctionError::BadTable(
                        "need equal, nonempty x and value columns".into(),
                    ));
                }
                if xs.iter().chain(ys.iter()).any(|v| !v.is_finite()) {
                    return Err(FunctionError::BadTable("non-finite entry".into()));
                }
                if xs[0] < T::zero() || xs[0] >= self.period_value {
                    return Err(FunctionError::BadTable(
                        "first x must lie in [0, period)".into(),
                    ));
                }
                for w in xs.windows(2) {
                    if w[1] <= w[0] {
                        return Err(FunctionError::BadTable("x values must strictly increase".into()));
                    }
                }
                if *xs.last().unwrap() - xs[0] >= self.period_value {
                    return Err(FunctionError::BadTable(
                        "x values must span less than one period".into(),
                    ));
                }
            }
        }
        if !self.is_constant() {
            let eps = self.periodicity_tolerance();
            for divisor in [2u32, 3, 5, 7] {
                let alpha = self.period_value / T::of(divisor as f64);
                if self.period_defect(alpha, DEFAULT_PERIOD_SAMPLES) <= eps {
                    return Err(FunctionError::NotMinimal { divisor });
                }
            }
        }
        Ok(())
    }
}

/// Loads a tabulated function from CSV text with header `x,phi_x` and
/// strictly increasing x covering one period.
pub fn tabulated_from_csv<T: Real>(
    text: &str,
    period: Period,
) -> Result<PeriodicFunction<T>, FunctionError> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| FunctionError::BadTable("empty input".into()))?;
    if header.trim() != "x,phi_x" {
        return Err(FunctionError::BadTable(format!(
            "expected header `x,phi_x`, got {:?}",
            header.trim()
        )));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (i, line) in lines.enumerate() {
        let mut fields = line.trim().split(',');
        let (x, y) = match (fields.next(), fields.next(), fields.next()) {
            (Some(x), Some(y), None) => (x, y),
            _ => {
                return Err(FunctionError::BadTable(format!(
                    "row {}: expected two comma-separated fields",
                    i + 1
                )))
            }
        };
        let x: f64 = x
            .trim()
            .parse()
            .map_err(|_| FunctionError::BadTable(format!("row {}: bad x value", i + 1)))?;
        let y: f64 = y
            .trim()
            .parse()
            .map_err(|_| FunctionError::BadTable(format!("row {}: bad value", i + 1)))?;
        xs.push(T::of(x));
        ys.push(T::of(y));
    }
    PeriodicFunction::tabulated(period, xs, ys)
}
