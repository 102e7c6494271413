//! Smoothing kernels `φ` with compactly supported Fourier transform `ψ`.
//!
//! The transform convention is `ψ(s) = ∫ e^{-ist} φ(t) dt`, so a kernel with
//! `ψ(0) = 1` has unit mass. The literal formulas [`tent_time`] and
//! [`fudge_time`] have mass `2π`; [`Kernel`] divides them by `2π`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate, integrate_oscillatory, integrate_with_breaks, QuadratureSpec};
use crate::scalar::Real;

const SERIES_CUTOFF: f64 = 1e-4;

/// Smoothstep sharpness with the smallest truncation defect on `[-200, 200]`.
pub const DEFAULT_BUMP_SHARPNESS: f64 = 2.0;

/// `4(cos(t/2) - cos t)/t²`, with value `3/2` at the origin.
pub fn tent_time<T: Real>(t: T) -> T {
    let a = t.abs();
    if a < T::lit(SERIES_CUTOFF) {
        // 4 Σ (-1)^n (4^{-n} - 1) t^{2n-2} / (2n)!, n = 1..6
        let t2 = t * t;
        let mut sum = T::zero();
        let mut power = T::one();
        let mut fact = T::lit(2.0);
        for n in 1..=6i32 {
            let sign = if n % 2 == 0 { T::one() } else { -T::one() };
            sum = sum + sign * (T::lit(4f64.powi(-n)) - T::one()) * power / fact;
            power = power * t2;
            fact = fact * T::from_count((2 * n + 1) as usize) * T::from_count((2 * n + 2) as usize);
        }
        return T::lit(4.0) * sum;
    }
    T::lit(4.0) * ((a * T::lit(0.5)).cos() - a.cos()) / (a * a)
}

/// Transform of `tent_time / 2π`: `1` on `|s| <= 1/2`, `2(1 - |s|)` on
/// `[1/2, 1]`, `0` beyond.
pub fn tent_freq<T: Real>(s: T) -> T {
    let a = s.abs();
    if a <= T::lit(0.5) {
        T::one()
    } else if a < T::one() {
        T::lit(2.0) * (T::one() - a)
    } else {
        T::zero()
    }
}

/// `4(sin t / t - cos t)/t²`, with limit `4/3` at the origin.
pub fn fudge_time<T: Real>(t: T) -> T {
    let a = t.abs();
    if a < T::lit(SERIES_CUTOFF) {
        // 4 Σ (-1)^{n+1} 2n t^{2n-2} / (2n+1)!, n = 1..6
        let t2 = t * t;
        let mut sum = T::zero();
        let mut power = T::one();
        let mut fact = T::lit(6.0);
        for n in 1..=6usize {
            let sign = if n % 2 == 1 { T::one() } else { -T::one() };
            sum = sum + sign * T::from_count(2 * n) * power / fact;
            power = power * t2;
            fact = fact * T::from_count(2 * n + 2) * T::from_count(2 * n + 3);
        }
        return T::lit(4.0) * sum;
    }
    T::lit(4.0) * (a.sin() / a - a.cos()) / (a * a)
}

/// `max(0, 1 - s²)`.
pub fn fudge_freq<T: Real>(s: T) -> T {
    (T::one() - s * s).max(T::zero())
}

/// `Φ_α(t) = ∫_t^∞ env(s) cos(α s) ds` for a decreasing integrable envelope.
pub fn leibniz_tail<T: Real>(envelope: impl Fn(T) -> T, alpha: T, t: T) -> Result<T> {
    leibniz_tail_with(envelope, alpha, t, &QuadratureSpec::default())
}

pub fn leibniz_tail_with<T: Real>(envelope: impl Fn(T) -> T, alpha: T, t: T, spec: &QuadratureSpec<T>) -> Result<T> {
    if !(alpha > T::zero()) {
        return Err(Error::InvalidParameter {
            name: "alpha",
            reason: "must be positive".into(),
        });
    }
    if !(t >= T::zero()) {
        return Err(Error::InvalidParameter {
            name: "t",
            reason: "must be non-negative".into(),
        });
    }
    let est = integrate_oscillatory(envelope, alpha, T::zero(), t, spec)?;
    if !est.converged || !est.value.is_finite() {
        return Err(Error::NonIntegrable {
            reason: format!("oscillatory tail did not settle (value {}, error {})", est.value.as_f64(), est.error.as_f64()),
        });
    }
    Ok(est.value)
}

/// Kernel family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    Tent,
    Fudge,
    Bump,
}

impl KernelKind {
    pub fn name(self) -> &'static str {
        match self {
            KernelKind::Tent => "tent",
            KernelKind::Fudge => "fudge",
            KernelKind::Bump => "bump",
        }
    }
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tent" => Ok(KernelKind::Tent),
            "fudge" => Ok(KernelKind::Fudge),
            "bump" => Ok(KernelKind::Bump),
            other => Err(Error::InvalidParameter {
                name: "kernel",
                reason: format!("unknown kernel `{other}`"),
            }),
        }
    }
}

/// `coef · cos(frequency t + phase) / t^power`, one piece of a closed-form
/// kernel for `t > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerWave<T> {
    pub coef: T,
    pub power: i32,
    pub frequency: T,
    pub phase: T,
}

/// Tabulated time side of the bump kernel on `[0, range]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BumpTable<T> {
    sharpness: T,
    step: T,
    range: T,
    values: Vec<T>,
    mass_defect: T,
    decay_constant: T,
}

impl<T: Real> BumpTable<T> {
    pub const DEFAULT_RANGE: f64 = 200.0;
    pub const DEFAULT_STEP: f64 = 0.02;

    fn build(sharpness: T, range: T, step: T) -> Result<Self> {
        if !(sharpness > T::zero()) || !sharpness.is_finite() {
            return Err(Error::InvalidParameter {
                name: "transition_sharpness",
                reason: "must be positive and finite".into(),
            });
        }
        if !(step > T::zero()) || !(range > step) {
            return Err(Error::InvalidParameter {
                name: "step",
                reason: "need 0 < step < range".into(),
            });
        }
        let n = (range / step).round().as_f64() as usize;
        let step = range / T::from_count(n);
        let spec = QuadratureSpec::with_tolerances(T::lit(1e-14).max(T::epsilon() * T::lit(8.0)), T::lit(1e-12));
        let plateau_plus_shoulder = |t: T| -> Result<T> {
            let shoulder = integrate(
                |s: T| (s * t).cos() * bump_freq(sharpness, s),
                T::lit(0.5),
                T::one(),
                &QuadratureSpec {
                    oscillation_frequency: (t > T::one()).then_some(t),
                    ..spec
                },
            )?;
            let plateau = if t == T::zero() {
                T::lit(0.5)
            } else {
                (t * T::lit(0.5)).sin() / t
            };
            Ok((plateau + shoulder.value) / T::PI())
        };
        let values = (0..=n)
            .into_par_iter()
            .map(|j| plateau_plus_shoulder(step * T::from_count(j)))
            .collect::<Result<Vec<T>>>()?;
        // Trapezoid over the symmetric grid.
        let interior: T = values[1..n].iter().copied().sum();
        let mass = step * (values[0] + T::lit(2.0) * interior + values[n]);
        let mass_defect = (mass - T::one()).abs();
        let decay_constant = values
            .iter()
            .enumerate()
            .map(|(j, v)| {
                let t = step * T::from_count(j);
                v.abs() * t.powi(4)
            })
            .fold(T::zero(), T::max);
        let table = Self {
            sharpness,
            step,
            range,
            values,
            mass_defect,
            decay_constant,
        };
        if !(mass_defect <= T::lit(1e-8)) {
            return Err(Error::Resolution {
                defect: mass_defect.as_f64(),
            });
        }
        Ok(table)
    }

    pub fn mass_defect(&self) -> T {
        self.mass_defect
    }

    /// `max |φ(t)| t⁴` over the grid.
    pub fn decay_constant(&self) -> T {
        self.decay_constant
    }

    pub fn range(&self) -> T {
        self.range
    }

    pub fn step(&self) -> T {
        self.step
    }

    /// Four-point Lagrange interpolation; zero beyond the tabulated range.
    fn eval(&self, t: T) -> T {
        let a = t.abs();
        if a > self.range {
            return T::zero();
        }
        let n = self.values.len() - 1;
        let x = a / self.step;
        let i = (x.floor().as_f64() as usize).min(n - 1);
        let u = x - T::from_count(i);
        // Nodes i-1, i, i+1, i+2, reflected at the origin by evenness.
        let at = |k: isize| -> T {
            let idx = k.unsigned_abs();
            if idx > n {
                T::zero()
            } else {
                self.values[idx]
            }
        };
        let i = i as isize;
        let (p0, p1, p2, p3) = (at(i - 1), at(i), at(i + 1), at(i + 2));
        let one = T::one();
        let two = T::lit(2.0);
        let six = T::lit(6.0);
        -p0 * u * (u - one) * (u - two) / six + p1 * (u + one) * (u - one) * (u - two) / two
            - p2 * (u + one) * u * (u - two) / two
            + p3 * (u + one) * u * (u - one) / six
    }
}

/// Exponential smoothstep: `1` on `|s| <= 1/2`, `0` on `|s| >= 1`.
pub fn bump_freq<T: Real>(sharpness: T, s: T) -> T {
    let a = s.abs();
    if a <= T::lit(0.5) {
        return T::one();
    }
    if a >= T::one() {
        return T::zero();
    }
    let x = (a - T::lit(0.5)) * T::lit(2.0);
    let rise = (-sharpness / x).exp();
    let fall = (-sharpness / (T::one() - x)).exp();
    fall / (rise + fall)
}

/// A kernel `φ_r(t) = r φ(rt)` with `ψ_r(s) = ψ(s/r)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel<T> {
    kind: KernelKind,
    scale: T,
    bump: Option<Arc<BumpTable<T>>>,
}

impl<T: Real> Kernel<T> {
    pub fn tent() -> Self {
        Self {
            kind: KernelKind::Tent,
            scale: T::one(),
            bump: None,
        }
    }

    pub fn fudge() -> Self {
        Self {
            kind: KernelKind::Fudge,
            scale: T::one(),
            bump: None,
        }
    }

    /// Bump kernel with the default table (`[-200, 200]`, step `0.02`).
    pub fn bump(transition_sharpness: T) -> Result<Self> {
        Self::bump_with_grid(
            transition_sharpness,
            T::lit(BumpTable::<T>::DEFAULT_RANGE),
            T::lit(BumpTable::<T>::DEFAULT_STEP),
        )
    }

    pub fn bump_with_grid(transition_sharpness: T, range: T, step: T) -> Result<Self> {
        Ok(Self {
            kind: KernelKind::Bump,
            scale: T::one(),
            bump: Some(Arc::new(BumpTable::build(transition_sharpness, range, step)?)),
        })
    }

    /// Unit-scale kernel of the given kind (bump with the default sharpness).
    pub fn of_kind(kind: KernelKind) -> Result<Self> {
        match kind {
            KernelKind::Tent => Ok(Self::tent()),
            KernelKind::Fudge => Ok(Self::fudge()),
            KernelKind::Bump => Self::bump(T::lit(DEFAULT_BUMP_SHARPNESS)),
        }
    }

    pub fn scaled(&self, r: T) -> Result<Self> {
        if !(r > T::zero()) || !r.is_finite() {
            return Err(Error::InvalidParameter {
                name: "scale",
                reason: format!("must be positive and finite, got {}", r.as_f64()),
            });
        }
        Ok(Self {
            scale: self.scale * r,
            ..self.clone()
        })
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    pub fn scale(&self) -> T {
        self.scale
    }

    pub fn bump_table(&self) -> Option<&BumpTable<T>> {
        self.bump.as_deref()
    }

    /// `ψ ≡ 1` near the origin, as the regularity arguments need.
    pub fn is_regular(&self) -> bool {
        self.kind != KernelKind::Fudge
    }

    pub fn require_regular(&self) -> Result<()> {
        if self.is_regular() {
            Ok(())
        } else {
            Err(Error::InadmissibleKernel {
                kernel: self.name(),
                reason: "ψ(s) = 1 - s² is not identically 1 near 0",
            })
        }
    }

    /// `φ_r(t)`.
    pub fn time(&self, t: T) -> T {
        self.scale * self.unit_time(self.scale * t)
    }

    /// `ψ_r(s)`.
    pub fn freq(&self, s: T) -> T {
        self.unit_freq(s / self.scale)
    }

    /// `∫ φ_r = ψ_r(0)`.
    pub fn mass(&self) -> T {
        self.freq(T::zero())
    }

    /// Points where `ψ_r` is not smooth or changes regime.
    pub fn freq_breaks(&self) -> Vec<T> {
        let r = self.scale;
        let half = T::lit(0.5) * r;
        match self.kind {
            KernelKind::Fudge => vec![-r, r],
            _ => vec![-r, -half, half, r],
        }
    }

    fn unit_time(&self, t: T) -> T {
        match self.kind {
            KernelKind::Tent => tent_time(t) / T::TAU(),
            KernelKind::Fudge => fudge_time(t) / T::TAU(),
            KernelKind::Bump => self.bump.as_ref().expect("bump table").eval(t),
        }
    }

    fn unit_freq(&self, s: T) -> T {
        match self.kind {
            KernelKind::Tent => tent_freq(s),
            KernelKind::Fudge => fudge_freq(s),
            KernelKind::Bump => bump_freq(self.bump.as_ref().expect("bump table").sharpness, s),
        }
    }

    /// Unit-scale `φ(t)` for `t > 0` as a sum of damped waves; `None` for
    /// the tabulated bump.
    pub fn waves(&self) -> Option<Vec<PowerWave<T>>> {
        let c = T::lit(2.0) / T::PI();
        match self.kind {
            KernelKind::Tent => Some(vec![
                PowerWave {
                    coef: c,
                    power: 2,
                    frequency: T::lit(0.5),
                    phase: T::zero(),
                },
                PowerWave {
                    coef: c,
                    power: 2,
                    frequency: T::one(),
                    phase: T::PI(),
                },
            ]),
            KernelKind::Fudge => Some(vec![
                PowerWave {
                    coef: c,
                    power: 3,
                    frequency: T::one(),
                    phase: -T::FRAC_PI_2(),
                },
                PowerWave {
                    coef: c,
                    power: 2,
                    frequency: T::one(),
                    phase: T::PI(),
                },
            ]),
            KernelKind::Bump => None,
        }
    }

    /// `∫_a^∞ φ(t) cos(s t) dt` for the unit-scale kernel, `a > 0`.
    fn cosine_tail(&self, s: T, a: T, spec: &QuadratureSpec<T>) -> Result<T> {
        let waves = self.waves().expect("closed-form kernel");
        let mut total = T::zero();
        for w in waves {
            let p = w.power;
            let envelope = move |x: T| x.powi(-p);
            // cos(f t + φ) cos(s t) = [cos((f+s)t + φ) + cos((f-s)t + φ)] / 2
            for freq in [w.frequency + s, w.frequency - s] {
                let (freq, phase) = if freq < T::zero() { (-freq, -w.phase) } else { (freq, w.phase) };
                let half = w.coef * T::lit(0.5);
                if freq <= T::epsilon() {
                    total = total + half * phase.cos() * a.powi(1 - p) / T::from_count((p - 1) as usize);
                } else {
                    let est = integrate_oscillatory(envelope, freq, phase, a, spec)?.require_converged()?;
                    total = total + half * est.value;
                }
            }
        }
        Ok(total)
    }

    /// Numerical `∫ e^{-ist} φ_r(t) dt`, to compare against [`Kernel::freq`].
    pub fn fourier_transform(&self, s: T, spec: &QuadratureSpec<T>) -> Result<T> {
        let u = s / self.scale;
        let core = |t: T| self.unit_time(t) * (u * t).cos();
        match self.kind {
            KernelKind::Bump => {
                let table = self.bump.as_ref().expect("bump table");
                let breaks: Vec<T> = (1..40)
                    .map(|j| table.range * T::from_count(j) / T::lit(40.0))
                    .collect();
                let est = integrate_with_breaks(core, T::zero(), table.range, &breaks, spec)?.require_converged()?;
                Ok(T::lit(2.0) * est.value)
            }
            _ => {
                let cut = T::lit(20.0);
                let breaks: Vec<T> = (1..20).map(T::from_count).collect();
                let head = integrate_with_breaks(core, T::zero(), cut, &breaks, spec)?.require_converged()?;
                let tail = self.cosine_tail(u, cut, spec)?;
                Ok(T::lit(2.0) * (head.value + tail))
            }
        }
    }

    /// `Φ₊(t) = -∫_t^∞ φ_r`.
    pub fn primitive_plus(&self, t: T) -> Result<T> {
        Ok(-self.upper_mass(self.scale * t)?)
    }

    /// `Φ₋(t) = ∫_{-∞}^t φ_r`.
    pub fn primitive_minus(&self, t: T) -> Result<T> {
        Ok(T::one() - self.upper_mass(self.scale * t)?)
    }

    /// `∫_x^∞ φ` for the unit-scale kernel.
    fn upper_mass(&self, x: T) -> Result<T> {
        if x < T::zero() {
            return Ok(T::one() - self.upper_mass(-x)?);
        }
        let spec = QuadratureSpec::default();
        match self.kind {
            KernelKind::Bump => {
                let table = self.bump.as_ref().expect("bump table");
                if x >= table.range {
                    return Ok(T::zero());
                }
                let est = integrate(|t| self.unit_time(t), x, table.range, &spec)?.require_converged()?;
                Ok(est.value)
            }
            _ => {
                let cut = x.max(T::one());
                let head = if cut > x {
                    integrate(|t| self.unit_time(t), x, cut, &spec)?.require_converged()?.value
                } else {
                    T::zero()
                };
                Ok(head + self.cosine_tail(T::zero(), cut, &spec)?)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn tent_examples() {
        assert_eq!(tent_time(0.0f64), 1.5);
        assert!((tent_time(PI) - 4.0 / (PI * PI)).abs() < 1e-15);
        assert!((tent_time(2.0 * PI) + 2.0 / (PI * PI)).abs() < 1e-15);
        assert_eq!(tent_freq(0.0f64), 1.0);
        assert_eq!(tent_freq(0.75f64), 0.5);
        assert_eq!(tent_freq(0.5f64), 1.0);
        assert_eq!(tent_freq(2.0f64), 0.0);
    }

    #[test]
    fn series_matches_direct_formula_at_the_cutoff() {
        for t in [0.99e-4f64, 1.01e-4, 1e-3] {
            let direct = 4.0 * ((t / 2.0).cos() - t.cos()) / (t * t);
            assert!((tent_time(t) - direct).abs() < 1e-7);
            let direct = 4.0 * (t.sin() / t - t.cos()) / (t * t);
            assert!((fudge_time(t) - direct).abs() < 1e-7);
        }
        assert!((fudge_time(1e-9f64) - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn fudge_examples() {
        assert!((fudge_time(PI) - 4.0 / (PI * PI)).abs() < 1e-15);
        assert_eq!(fudge_freq(0.5f64), 0.75);
        assert_eq!(fudge_freq(1.5f64), 0.0);
    }

    #[test]
    fn waves_reproduce_closed_forms() {
        for kernel in [Kernel::<f64>::tent(), Kernel::fudge()] {
            let waves = kernel.waves().unwrap();
            for t in [0.5, 3.0, 17.25] {
                let sum: f64 = waves
                    .iter()
                    .map(|w| w.coef * (w.frequency * t + w.phase).cos() / t.powi(w.power))
                    .sum();
                assert!((sum - kernel.time(t)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn scaling() {
        let k = Kernel::<f64>::tent().scaled(4.0).unwrap();
        assert_eq!(k.freq(3.0), tent_freq(0.75));
        assert_eq!(k.freq(3.0), 0.5);
        assert!((k.time(0.3) - 4.0 * tent_time(1.2) / (2.0 * PI)).abs() < 1e-15);
        assert_eq!(k.mass(), 1.0);
        assert!(Kernel::<f64>::tent().scaled(0.0).is_err());
    }

    #[test]
    fn primitives_of_tent() {
        let k = Kernel::<f64>::tent();
        assert!((k.primitive_minus(0.0).unwrap() - 0.5).abs() < 1e-9);
        let p = k.primitive_plus(10.0).unwrap();
        let m = k.primitive_minus(10.0).unwrap();
        assert!((m - p - 1.0).abs() < 1e-12);
        assert!(p.abs() < 1.0 / 10.0);
    }

    #[test]
    fn leibniz_exponential() {
        let v = leibniz_tail(|s: f64| (-s).exp(), 1.0, 0.0).unwrap();
        assert!((v - 0.5).abs() < 1e-10);
    }

    #[test]
    fn fudge_is_flagged() {
        assert!(Kernel::<f64>::fudge().require_regular().is_err());
        assert!(Kernel::<f64>::tent().require_regular().is_ok());
    }

    #[test]
    fn bump_plateau_and_support() {
        assert_eq!(bump_freq(1.0f64, 0.4), 1.0);
        assert_eq!(bump_freq(1.0f64, 1.1), 0.0);
        let v = bump_freq(2.0f64, 0.75);
        assert!((v - 0.5).abs() < 1e-15);
    }
}
