//! Adaptive quadrature on finite intervals, semi-infinite reduction driven by
//! a decay hint, and half-period splitting for oscillatory tails.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

// Gauss-Kronrod 7/15 nodes and weights (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Values that can be integrated: real scalars and complex numbers.
///
/// Complex integrands share one subdivision of the interval; the error of a
/// complex estimate is the larger of the real and imaginary errors.
pub trait QuadValue<T: Real>:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<T, Output = Self> + Send + Sync
{
    fn zero() -> Self;
    /// Componentwise absolute value.
    fn abs_parts(self) -> Self;
    /// Largest component magnitude.
    fn magnitude(self) -> T;
    fn is_finite_value(self) -> bool;
}

impl<T: Real> QuadValue<T> for T {
    fn zero() -> Self {
        T::zero()
    }
    fn abs_parts(self) -> Self {
        self.abs()
    }
    fn magnitude(self) -> T {
        self.abs()
    }
    fn is_finite_value(self) -> bool {
        self.is_finite()
    }
}

impl<T: Real> QuadValue<T> for Complex<T> {
    fn zero() -> Self {
        Complex::new(T::zero(), T::zero())
    }
    fn abs_parts(self) -> Self {
        Complex::new(self.re.abs(), self.im.abs())
    }
    fn magnitude(self) -> T {
        self.re.abs().max(self.im.abs())
    }
    fn is_finite_value(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Tolerances and limits for a quadrature call.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct QuadratureSpec<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_subdivisions: usize,
    /// Period hint: when set, finite intervals are pre-split into panels of
    /// about one half-period.
    pub oscillation_frequency: Option<T>,
    /// Largest radius used when a semi-infinite integral is truncated.
    pub truncation_radius: T,
}

impl<T: Real> Default for QuadratureSpec<T> {
    fn default() -> Self {
        Self {
            abs_tol: T::lit(1e-10),
            rel_tol: T::lit(1e-9),
            max_subdivisions: 4000,
            oscillation_frequency: None,
            truncation_radius: T::lit(1e12),
        }
    }
}

impl<T: Real> QuadratureSpec<T> {
    pub fn with_tolerances(abs_tol: T, rel_tol: T) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > T::zero()) {
            return Err(invalid("abs_tol", "must be positive"));
        }
        if !(self.rel_tol > T::zero()) {
            return Err(invalid("rel_tol", "must be positive"));
        }
        if self.max_subdivisions < 1 {
            return Err(invalid("max_subdivisions", "must be at least 1"));
        }
        if let Some(w) = self.oscillation_frequency {
            if !(w > T::zero()) {
                return Err(invalid("oscillation_frequency", "must be positive"));
            }
        }
        if !(self.truncation_radius > T::zero()) {
            return Err(invalid("truncation_radius", "must be positive"));
        }
        Ok(())
    }

    fn target(&self, value_mag: T) -> T {
        self.abs_tol.max(self.rel_tol * value_mag)
    }
}

fn invalid(name: &'static str, reason: &str) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.to_string(),
    }
}

/// Result of a quadrature: the value, an error estimate, and whether the
/// tolerance was met within the subdivision budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<V, T> {
    pub value: V,
    pub error: T,
    pub converged: bool,
    pub evaluations: usize,
}

impl<V: Copy, T: Real> Estimate<V, T> {
    /// Converts a non-converged estimate into [`Error::NotConverged`].
    pub fn require_converged(self) -> Result<Self>
    where
        V: QuadValue<T>,
    {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NotConverged {
                value: self.value.magnitude().as_f64(),
                error: self.error.as_f64(),
            })
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel<V, T> {
    a: T,
    b: T,
    value: V,
    error: T,
}

struct ByError<V, T>(Panel<V, T>);

impl<V, T: Real> PartialEq for ByError<V, T> {
    fn eq(&self, other: &Self) -> bool {
        self.0.error == other.0.error
    }
}
impl<V, T: Real> Eq for ByError<V, T> {}
impl<V, T: Real> PartialOrd for ByError<V, T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<V, T: Real> Ord for ByError<V, T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .error
            .partial_cmp(&other.0.error)
            .unwrap_or(Ordering::Equal)
    }
}

fn gauss_kronrod<T, V, F>(f: &F, a: T, b: T) -> Panel<V, T>
where
    T: Real,
    V: QuadValue<T>,
    F: Fn(T) -> V + ?Sized,
{
    let center = (a + b) * T::lit(0.5);
    let half = (b - a) * T::lit(0.5);
    let fc = f(center);
    let mut kronrod = fc * T::lit(WGK[7]);
    let mut gauss = fc * T::lit(WG[3]);
    let mut abs_sum = fc.abs_parts() * T::lit(WGK[7]);
    let mut fv1 = [V::zero(); 7];
    let mut fv2 = [V::zero(); 7];
    for j in 0..7 {
        let dx = half * T::lit(XGK[j]);
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod = kronrod + (f1 + f2) * T::lit(WGK[j]);
        abs_sum = abs_sum + (f1.abs_parts() + f2.abs_parts()) * T::lit(WGK[j]);
        if j % 2 == 1 {
            gauss = gauss + (f1 + f2) * T::lit(WG[j / 2]);
        }
    }
    let mean = kronrod * T::lit(0.5);
    let mut asc = (fc - mean).abs_parts() * T::lit(WGK[7]);
    for j in 0..7 {
        asc = asc + ((fv1[j] - mean).abs_parts() + (fv2[j] - mean).abs_parts()) * T::lit(WGK[j]);
    }
    let half_abs = half.abs();
    let value = kronrod * half;
    let raw = ((kronrod - gauss) * half).magnitude();
    let resasc = asc.magnitude() * half_abs;
    let resabs = abs_sum.magnitude() * half_abs;
    let mut error = raw;
    if resasc != T::zero() && error != T::zero() {
        let scale = (T::lit(200.0) * error / resasc).powf(T::lit(1.5));
        error = if scale < T::one() { resasc * scale } else { resasc };
    }
    let floor = T::lit(50.0) * T::epsilon() * resabs;
    if resabs > T::min_positive_value() / (T::lit(50.0) * T::epsilon()) && floor > error {
        error = floor;
    }
    if !value.is_finite_value() {
        error = T::infinity();
    }
    Panel { a, b, value, error }
}

/// Adaptive Gauss-Kronrod integration of `f` over `[a, b]`.
///
/// The interval is bisected where the local error is largest until the total
/// error estimate is below `max(abs_tol, rel_tol * |value|)` or the
/// subdivision budget is spent, in which case the best estimate is returned
/// with `converged == false`.
pub fn integrate<T, V, F>(f: F, a: T, b: T, spec: &QuadratureSpec<T>) -> Result<Estimate<V, T>>
where
    T: Real,
    V: QuadValue<T>,
    F: Fn(T) -> V,
{
    integrate_with_breaks(f, a, b, &[], spec)
}

/// [`integrate`] with user breakpoints (kinks, peaks) inside `(a, b)`.
pub fn integrate_with_breaks<T, V, F>(
    f: F,
    a: T,
    b: T,
    breaks: &[T],
    spec: &QuadratureSpec<T>,
) -> Result<Estimate<V, T>>
where
    T: Real,
    V: QuadValue<T>,
    F: Fn(T) -> V,
{
    spec.validate()?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(invalid("interval", "endpoints must be finite"));
    }
    if a > b {
        return Err(invalid("interval", "requires a <= b"));
    }
    if a == b {
        return Ok(Estimate {
            value: V::zero(),
            error: T::zero(),
            converged: true,
            evaluations: 0,
        });
    }
    let mut points: Vec<T> = Vec::with_capacity(breaks.len() + 2);
    points.push(a);
    let mut interior: Vec<T> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    interior.sort_by(|x, y| x.partial_cmp(y).unwrap_or(Ordering::Equal));
    points.extend(interior);
    points.push(b);
    if let Some(w) = spec.oscillation_frequency {
        points = refine_by_period(&points, T::PI() / w, spec.max_subdivisions / 2);
    }
    points.dedup();

    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    for pair in points.windows(2) {
        heap.push(ByError(gauss_kronrod(&f, pair[0], pair[1])));
        evaluations += 15;
    }
    let budget = spec.max_subdivisions.max(heap.len());
    loop {
        let (value, error) = totals(&heap);
        if error <= spec.target(value.magnitude()) {
            return Ok(Estimate {
                value,
                error,
                converged: true,
                evaluations,
            });
        }
        if heap.len() >= budget {
            return Ok(Estimate {
                value,
                error,
                converged: false,
                evaluations,
            });
        }
        let ByError(worst) = heap.pop().expect("non-empty heap");
        let mid = (worst.a + worst.b) * T::lit(0.5);
        if !(mid > worst.a && mid < worst.b) {
            // Interval at machine resolution; nothing left to refine.
            heap.push(ByError(worst));
            let (value, error) = totals(&heap);
            return Ok(Estimate {
                value,
                error,
                converged: false,
                evaluations,
            });
        }
        heap.push(ByError(gauss_kronrod(&f, worst.a, mid)));
        heap.push(ByError(gauss_kronrod(&f, mid, worst.b)));
        evaluations += 30;
    }
}

fn totals<V: QuadValue<T>, T: Real>(heap: &BinaryHeap<ByError<V, T>>) -> (V, T) {
    heap.iter().fold((V::zero(), T::zero()), |(v, e), p| {
        (v + p.0.value, e + p.0.error)
    })
}

fn refine_by_period<T: Real>(points: &[T], step: T, cap: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(points.len());
    for pair in points.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        out.push(lo);
        let pieces = ((hi - lo) / step).ceil().to_usize().unwrap_or(1).clamp(1, cap.max(1));
        let h = (hi - lo) / T::from_count(pieces);
        for j in 1..pieces {
            out.push(lo + h * T::from_count(j));
        }
    }
    out.push(*points.last().expect("at least two points"));
    out
}

/// One oscillatory summand `scale * envelope(s) * cos(frequency * s + phase)`
/// with a non-negative, non-increasing envelope.
pub struct OscillatoryTerm<'a, T> {
    pub envelope: &'a (dyn Fn(T) -> T + Sync),
    pub scale: T,
    pub frequency: T,
    pub phase: T,
}

/// How the integrand of [`integrate_semi_infinite`] decays.
pub enum DecayHint<'a, T> {
    /// `|f(s)| <= C exp(-rate (s - a))`.
    Exponential { rate: T },
    /// `|f(s)| <= C s^(-power)` for `s >= a > 0`.
    Polynomial { power: T },
    /// `f` is the sum of the listed oscillatory terms on `[a, inf)`.
    Oscillatory(Vec<OscillatoryTerm<'a, T>>),
}

const TERM_FLOOR: f64 = 1e-14;
const MAX_HALF_PERIODS: usize = 4096;
const AVERAGING_WINDOW: usize = 48;

/// `int_from^inf envelope(s) cos(frequency s + phase) ds`.
///
/// The range is cut at the zeros of the cosine, which makes the half-period
/// integrals an alternating series with non-increasing magnitudes. Summation
/// stops once a term drops below `1e-14`; slowly decaying tails are summed by
/// repeated averaging of the partial sums (Euler transform) instead.
pub fn integrate_oscillatory<T, E>(
    envelope: E,
    frequency: T,
    phase: T,
    from: T,
    spec: &QuadratureSpec<T>,
) -> Result<Estimate<T, T>>
where
    T: Real,
    E: Fn(T) -> T,
{
    spec.validate()?;
    if !(frequency > T::zero()) || !frequency.is_finite() {
        return Err(invalid("frequency", "must be positive and finite"));
    }
    if !from.is_finite() {
        return Err(invalid("from", "must be finite"));
    }
    let half_period = T::PI() / frequency;
    check_decreasing(&envelope, from, half_period)?;

    let integrand = |s: T| envelope(s) * (frequency * s + phase).cos();
    // First zero of cos(frequency * s + phase) strictly after `from`.
    let offset = T::FRAC_PI_2() - phase;
    let mut m = ((frequency * from - offset) / T::PI()).floor() + T::one();
    let mut first_zero = (offset + m * T::PI()) / frequency;
    while first_zero <= from {
        m = m + T::one();
        first_zero = (offset + m * T::PI()) / frequency;
    }
    let local = QuadratureSpec {
        abs_tol: spec.abs_tol * T::lit(1e-3),
        rel_tol: spec.rel_tol.min(T::lit(1e-11)),
        oscillation_frequency: None,
        ..*spec
    };
    let head = integrate(integrand, from, first_zero, &local)?;
    let mut evaluations = head.evaluations;
    let mut quad_error = head.error;
    let mut converged = head.converged;

    let mut partial = head.value;
    let mut partials: Vec<T> = Vec::with_capacity(64);
    partials.push(partial);
    let mut previous_accel: Option<T> = None;
    let mut left = first_zero;
    for j in 0..MAX_HALF_PERIODS {
        let right = first_zero + half_period * T::from_count(j + 1);
        let term = integrate(integrand, left, right, &local)?;
        evaluations += term.evaluations;
        quad_error = quad_error + term.error;
        converged &= term.converged;
        partial = partial + term.value;
        partials.push(partial);
        left = right;
        if term.value.abs() < T::lit(TERM_FLOOR) {
            return Ok(Estimate {
                value: partial,
                error: quad_error + term.value.abs(),
                converged,
                evaluations,
            });
        }
        if partials.len() > AVERAGING_WINDOW && (j + 1) % 16 == 0 {
            let accel = euler_average(&partials[partials.len() - AVERAGING_WINDOW..]);
            if let Some(prev) = previous_accel {
                let diff = (accel - prev).abs();
                if diff <= spec.target(accel.abs()) * T::lit(1e-2) {
                    return Ok(Estimate {
                        value: accel,
                        error: quad_error + diff,
                        converged,
                        evaluations,
                    });
                }
            }
            previous_accel = Some(accel);
        }
    }
    let accel = euler_average(&partials[partials.len() - AVERAGING_WINDOW..]);
    let diff = previous_accel.map_or(T::infinity(), |p| (accel - p).abs());
    Ok(Estimate {
        value: accel,
        error: quad_error + diff,
        converged: converged && diff <= spec.target(accel.abs()),
        evaluations,
    })
}

/// Repeated pairwise averaging of consecutive partial sums.
fn euler_average<T: Real>(partials: &[T]) -> T {
    let mut level = partials.to_vec();
    while level.len() > 1 {
        for i in 0..level.len() - 1 {
            level[i] = (level[i] + level[i + 1]) * T::lit(0.5);
        }
        level.pop();
    }
    level[0]
}

fn check_decreasing<T: Real, E: Fn(T) -> T>(envelope: &E, from: T, half_period: T) -> Result<()> {
    let mut samples: Vec<T> = (0..=32)
        .map(|j| from + half_period * T::lit(0.25) * T::from_count(j))
        .collect();
    let base = from.abs().max(half_period);
    samples.extend((1..=40).map(|j| from + base * T::lit(1.5).powi(j)));
    samples.sort_by(|x, y| x.partial_cmp(y).unwrap_or(Ordering::Equal));
    let mut last = envelope(samples[0]);
    if !(last >= T::zero()) {
        return Err(Error::EnvelopeNotDecreasing {
            at: samples[0].as_f64(),
        });
    }
    for &s in &samples[1..] {
        let v = envelope(s);
        if !(v >= T::zero()) || v > last * (T::one() + T::lit(1e-12)) + T::min_positive_value() {
            return Err(Error::EnvelopeNotDecreasing { at: s.as_f64() });
        }
        last = v;
    }
    Ok(())
}

/// `int_a^inf f(s) ds`, truncated where the hinted tail bound drops below
/// `abs_tol / 2`; the oscillatory hint delegates to
/// [`integrate_oscillatory`] term by term.
pub fn integrate_semi_infinite<T, F>(
    f: F,
    a: T,
    hint: &DecayHint<'_, T>,
    spec: &QuadratureSpec<T>,
) -> Result<Estimate<T, T>>
where
    T: Real,
    F: Fn(T) -> T,
{
    spec.validate()?;
    if !a.is_finite() {
        return Err(invalid("a", "must be finite"));
    }
    let half_tol = spec.abs_tol * T::lit(0.5);
    match hint {
        DecayHint::Exponential { rate } => {
            let rate = *rate;
            if !(rate > T::zero()) {
                return Err(Error::NonIntegrable {
                    reason: "exponential rate must be positive".into(),
                });
            }
            let scale = sample_scale(&f, a, T::one() / rate);
            let width = ((scale / (rate * half_tol)).ln() / rate).max(T::one() / rate);
            let radius = (a + width).min(a + spec.truncation_radius);
            let tail = scale * (-(rate) * (radius - a)).exp() / rate;
            let breaks: Vec<T> = (1..64)
                .map(|j| a + T::from_count(j) / rate)
                .take_while(|&x| x < radius)
                .collect();
            let body = integrate_with_breaks(&f, a, radius, &breaks, spec)?;
            Ok(Estimate {
                error: body.error + tail,
                ..body
            })
        }
        DecayHint::Polynomial { power } => {
            let p = *power;
            if !(p > T::one()) {
                return Err(Error::NonIntegrable {
                    reason: format!("polynomial decay s^-{} is not integrable", p.as_f64()),
                });
            }
            if !(a > T::zero()) {
                return Err(invalid("a", "polynomial hint needs a > 0"));
            }
            let scale = sample_scale(&f, a, a) * a.powf(p);
            let needed = (T::lit(2.0) * scale / ((p - T::one()) * spec.abs_tol))
                .powf(T::one() / (p - T::one()));
            let radius = needed.max(a * T::lit(2.0)).min(a + spec.truncation_radius);
            let tail = scale * radius.powf(T::one() - p) / (p - T::one());
            let mut breaks = Vec::new();
            let mut x = a * T::lit(4.0);
            while x < radius {
                breaks.push(x);
                x = x * T::lit(4.0);
            }
            let body = integrate_with_breaks(&f, a, radius, &breaks, spec)?;
            Ok(Estimate {
                error: body.error + tail,
                ..body
            })
        }
        DecayHint::Oscillatory(terms) => {
            if terms.is_empty() {
                return Err(invalid("hint", "oscillatory hint needs at least one term"));
            }
            for probe in [a, a + T::one(), a + T::lit(10.0), a + T::lit(123.25)] {
                let modeled: T = terms
                    .iter()
                    .map(|term| term.scale * (term.envelope)(probe) * (term.frequency * probe + term.phase).cos())
                    .sum();
                let actual = f(probe);
                let diff = (modeled - actual).abs();
                if !(diff <= T::lit(1e-9) * T::one().max(actual.abs())) {
                    return Err(Error::HintMismatch {
                        at: probe.as_f64(),
                        difference: diff.as_f64(),
                    });
                }
            }
            let mut value = T::zero();
            let mut error = T::zero();
            let mut converged = true;
            let mut evaluations = 0;
            for term in terms {
                let est = integrate_oscillatory(term.envelope, term.frequency, term.phase, a, spec)?;
                value = value + term.scale * est.value;
                error = error + term.scale.abs() * est.error;
                converged &= est.converged;
                evaluations += est.evaluations;
            }
            Ok(Estimate {
                value,
                error,
                converged,
                evaluations,
            })
        }
    }
}

fn sample_scale<T: Real, F: Fn(T) -> T>(f: &F, a: T, width: T) -> T {
    let mut scale = T::min_positive_value();
    for j in 0..8 {
        let v = f(a + width * T::lit(0.125) * T::from_count(j)).abs();
        if v.is_finite() && v > scale {
            scale = v;
        }
    }
    scale
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> QuadratureSpec<f64> {
        QuadratureSpec::default()
    }

    #[test]
    fn constant_and_cosine() {
        let one = integrate(|_x: f64| 1.0, 0.0, 1.0, &spec()).unwrap();
        assert!((one.value - 1.0).abs() < 1e-14 && one.converged);
        let cos = integrate(f64::cos, 0.0, std::f64::consts::FRAC_PI_2, &spec()).unwrap();
        assert!((cos.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn complex_integrand_shares_panels() {
        // int_0^pi e^{ix} dx = 2i
        let est = integrate(|x: f64| Complex::new(x.cos(), x.sin()), 0.0, std::f64::consts::PI, &spec()).unwrap();
        assert!(est.value.re.abs() < 1e-12);
        assert!((est.value.im - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_reversed_interval_and_bad_spec() {
        assert!(integrate(|x: f64| x, 1.0, 0.0, &spec()).is_err());
        let bad = QuadratureSpec { abs_tol: 0.0, ..spec() };
        assert!(integrate(|x: f64| x, 0.0, 1.0, &bad).is_err());
        let bad = QuadratureSpec { max_subdivisions: 0, ..spec() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn budget_exhaustion_is_flagged_not_raised() {
        let tight = QuadratureSpec {
            abs_tol: 1e-300,
            rel_tol: 1e-300,
            max_subdivisions: 3,
            ..spec()
        };
        let est = integrate(|x: f64| (1.0 / x).sin(), 1e-3, 1.0, &tight).unwrap();
        assert!(!est.converged);
        assert!(est.require_converged().is_err());
    }

    #[test]
    fn oscillatory_exponential_envelope() {
        let est = integrate_oscillatory(|s: f64| (-s).exp(), 1.0, 0.0, 0.0, &spec()).unwrap();
        assert!((est.value - 0.5).abs() < 1e-10, "{}", est.value);
    }

    #[test]
    fn oscillatory_rejects_growing_envelope() {
        let err = integrate_oscillatory(|s: f64| s, 1.0, 0.0, 1.0, &spec()).unwrap_err();
        assert!(matches!(err, Error::EnvelopeNotDecreasing { .. }));
        assert!(integrate_oscillatory(|s: f64| (-s).exp(), 0.0, 0.0, 0.0, &spec()).is_err());
    }

    #[test]
    fn semi_infinite_hints() {
        let e = integrate_semi_infinite(|s: f64| (-s).exp(), 0.0, &DecayHint::Exponential { rate: 1.0 }, &spec()).unwrap();
        assert!((e.value - 1.0).abs() < 1e-10);
        let p = integrate_semi_infinite(|s: f64| s.powi(-2), 1.0, &DecayHint::Polynomial { power: 2.0 }, &spec()).unwrap();
        assert!((p.value - 1.0).abs() < 1e-10, "{}", p.value);
        let err = integrate_semi_infinite(|s: f64| 1.0 / s, 1.0, &DecayHint::Polynomial { power: 1.0 }, &spec()).unwrap_err();
        assert!(matches!(err, Error::NonIntegrable { .. }));
    }

    #[test]
    fn oscillatory_hint_must_match_integrand() {
        let env = |s: f64| s.powi(-2);
        let hint = DecayHint::Oscillatory(vec![OscillatoryTerm {
            envelope: &env,
            scale: 1.0,
            frequency: 1.0,
            phase: 0.0,
        }]);
        let err = integrate_semi_infinite(|s: f64| s.sin() / (s * s), 1.0, &hint, &spec()).unwrap_err();
        assert!(matches!(err, Error::HintMismatch { .. }));
    }

    #[test]
    fn period_hint_splits_panels() {
        let s = QuadratureSpec {
            oscillation_frequency: Some(50.0),
            ..spec()
        };
        let est = integrate(|x: f64| (50.0 * x).cos(), 0.0, 10.0, &s).unwrap();
        assert!((est.value - (500.0f64).sin() / 50.0).abs() < 1e-11);
    }

    #[test]
    fn single_precision_smoke() {
        let s = QuadratureSpec::<f32>::with_tolerances(1e-5, 1e-5);
        let est = integrate(|x: f32| x * x, 0.0, 3.0, &s).unwrap();
        assert!((est.value - 9.0).abs() < 1e-4);
    }
}
