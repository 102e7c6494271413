use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::composite::{Composition, MonotoneEval, RateFunction};
use super::inversion::{invert_monotone, DEFAULT_INVERSION_TOL};
use super::monotone::{MonotoneFunction, Shape};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// The shape of a decay bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// `1/M_k^{-1}(ct)`.
    InfinityCk { k: u32 },
    /// `1/M_log^{-1}(ct)`.
    InfinitySmooth,
    /// `m_k^{-1}(ct) + 1/t`.
    ZeroCk { k: u32 },
    /// `m_log^{-1}(ct) + 1/t`.
    ZeroSmooth,
    /// `m_k^{-1}(ct) + 1/M_k^{-1}(ct)`.
    ZeroInfinityCk { k: u32 },
    /// `m_log^{-1}(ct) + 1/M_log^{-1}(ct) + 1/t`.
    ZeroInfinitySmooth,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::InfinityCk { .. } => "infinity_Ck",
            Variant::InfinitySmooth => "infinity_smooth",
            Variant::ZeroCk { .. } => "zero_Ck",
            Variant::ZeroSmooth => "zero_smooth",
            Variant::ZeroInfinityCk { .. } => "zero_infinity_Ck",
            Variant::ZeroInfinitySmooth => "zero_infinity_smooth",
        }
    }

    /// Parses a variant name; `k` is required by the `Ck` variants.
    pub fn parse(name: &str, k: Option<u32>) -> Result<Self> {
        let need_k = || {
            k.filter(|&k| k >= 1).ok_or_else(|| Error::InvalidParameter {
                name: "k",
                reason: format!("{name} needs an integer k >= 1"),
            })
        };
        Ok(match name {
            "infinity_Ck" | "infinity_ck" => Variant::InfinityCk { k: need_k()? },
            "infinity_smooth" => Variant::InfinitySmooth,
            "zero_Ck" | "zero_ck" => Variant::ZeroCk { k: need_k()? },
            "zero_smooth" => Variant::ZeroSmooth,
            "zero_infinity_Ck" | "zero_infinity_ck" => Variant::ZeroInfinityCk { k: need_k()? },
            "zero_infinity_smooth" => Variant::ZeroInfinitySmooth,
            other => {
                return Err(Error::InvalidParameter {
                    name: "variant",
                    reason: format!("unknown variant `{other}`"),
                })
            }
        })
    }

    pub fn k(self) -> Option<u32> {
        match self {
            Variant::InfinityCk { k } | Variant::ZeroCk { k } | Variant::ZeroInfinityCk { k } => Some(k),
            _ => None,
        }
    }

    pub fn uses_growth(self) -> bool {
        !matches!(self, Variant::ZeroCk { .. } | Variant::ZeroSmooth)
    }

    pub fn uses_decay(self) -> bool {
        !matches!(self, Variant::InfinityCk { .. } | Variant::InfinitySmooth)
    }

    fn adds_reciprocal_time(self) -> bool {
        matches!(self, Variant::ZeroCk { .. } | Variant::ZeroSmooth | Variant::ZeroInfinitySmooth)
    }

    fn composition(self) -> Composition {
        match self.k() {
            Some(k) => Composition::Smoothness { k },
            None => Composition::Logarithmic,
        }
    }

    /// Open interval of admissible `c`, as `(low, high, label)`.
    pub fn admissible_c(self) -> (f64, f64, &'static str) {
        match self {
            Variant::InfinitySmooth | Variant::ZeroInfinitySmooth => (0.0, 0.5, "c∈(0,1/2)"),
            Variant::ZeroSmooth => (0.0, 1.0, "c∈(0,1)"),
            _ => (0.0, f64::INFINITY, "c∈(0,∞)"),
        }
    }

    /// Near the supremum of the admissible range, or 1 where any `c > 0` works.
    pub fn default_c(self) -> f64 {
        match self {
            Variant::InfinitySmooth | Variant::ZeroInfinitySmooth => 0.45,
            Variant::ZeroSmooth => 0.9,
            _ => 1.0,
        }
    }

    pub fn check_c<T: Real>(self, c: T) -> Result<()> {
        let (lo, hi, range) = self.admissible_c();
        let c64 = c.as_f64();
        if c64 > lo && c64 < hi && c64.is_finite() {
            Ok(())
        } else {
            Err(Error::InadmissibleC {
                variant: self.name(),
                c: c64,
                range,
            })
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.k() {
            Some(k) => write!(f, "{}(k={k})", self.name()),
            None => f.write_str(self.name()),
        }
    }
}

impl FromStr for Variant {
    type Err = Error;
    /// Accepts `infinity_smooth` or `infinity_Ck:2` style names.
    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            Some((name, k)) => {
                let k = k.parse::<u32>().map_err(|_| Error::InvalidParameter {
                    name: "k",
                    reason: format!("cannot parse `{k}`"),
                })?;
                Variant::parse(name, Some(k))
            }
            None => Variant::parse(s, None),
        }
    }
}

/// A decay bound `t -> B(t)` with implicit constant 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateBound<T> {
    variant: Variant,
    c: T,
    growth: Option<RateFunction<T>>,
    decay: Option<RateFunction<T>>,
    t_min: T,
    tol_rel: T,
}

impl<T: Real> RateBound<T> {
    /// Builds the bound from the source functions the variant needs; unused
    /// sources are ignored.
    pub fn new(
        variant: Variant,
        growth: Option<&MonotoneFunction<T>>,
        decay: Option<&MonotoneFunction<T>>,
        c: T,
    ) -> Result<Self> {
        variant.check_c(c)?;
        let composition = variant.composition();
        let growth = if variant.uses_growth() {
            let m = growth.ok_or_else(|| missing(variant, "a growth function M"))?;
            if m.shape() != Shape::Growth {
                return Err(missing(variant, "M with growth shape"));
            }
            Some(RateFunction::new(m.clone(), composition)?)
        } else {
            None
        };
        let decay = if variant.uses_decay() {
            let m = decay.ok_or_else(|| missing(variant, "a decay function m"))?;
            if m.shape() != Shape::Decay {
                return Err(missing(variant, "m with decay shape"));
            }
            Some(RateFunction::new(m.clone(), composition)?)
        } else {
            None
        };
        let mut t_min = T::zero();
        if let Some(g) = &growth {
            t_min = t_min.max(g.value(T::zero())? / c);
        }
        if let Some(d) = &decay {
            t_min = t_min.max(d.value(T::one())? / c);
        }
        Ok(Self {
            variant,
            c,
            growth,
            decay,
            t_min,
            tol_rel: T::lit(DEFAULT_INVERSION_TOL),
        })
    }

    pub fn with_tolerance(mut self, tol_rel: T) -> Self {
        self.tol_rel = tol_rel;
        self
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn c(&self) -> T {
        self.c
    }

    /// The bound is defined for `t > t_min`.
    pub fn t_min(&self) -> T {
        self.t_min
    }

    pub fn growth(&self) -> Option<&RateFunction<T>> {
        self.growth.as_ref()
    }

    pub fn decay(&self) -> Option<&RateFunction<T>> {
        self.decay.as_ref()
    }

    /// `M^{-1}(ct)` for the growth part.
    pub fn growth_radius(&self, t: T) -> Result<Option<T>> {
        self.growth
            .as_ref()
            .map(|g| invert_monotone(g, self.c * t, self.tol_rel))
            .transpose()
    }

    /// `m^{-1}(ct)` for the decay part.
    pub fn decay_radius(&self, t: T) -> Result<Option<T>> {
        self.decay
            .as_ref()
            .map(|d| invert_monotone(d, self.c * t, self.tol_rel))
            .transpose()
    }

    pub fn eval(&self, t: T) -> Result<T> {
        if !(t > self.t_min) || !t.is_finite() {
            return Err(Error::BelowTMin {
                t: t.as_f64(),
                t_min: self.t_min.as_f64(),
            });
        }
        let mut value = T::zero();
        if let Some(r) = self.growth_radius(t)? {
            value = value + r.recip();
        }
        if let Some(r) = self.decay_radius(t)? {
            value = value + r;
        }
        if self.variant.adds_reciprocal_time() {
            value = value + t.recip();
        }
        Ok(value)
    }
}

fn missing(variant: Variant, what: &str) -> Error {
    Error::InvalidParameter {
        name: "source",
        reason: format!("{} needs {what}", variant.name()),
    }
}

/// One-shot evaluation of a bound at time `t`.
pub fn bound<T: Real>(
    variant: Variant,
    growth: Option<&MonotoneFunction<T>>,
    decay: Option<&MonotoneFunction<T>>,
    c: T,
    t: T,
) -> Result<T> {
    RateBound::new(variant, growth, decay, c)?.eval(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn growth_power(alpha: f64) -> MonotoneFunction<f64> {
        MonotoneFunction::<f64>::power(Shape::Growth, alpha).unwrap()
    }

    #[test]
    fn constant_m_ck_bound() {
        let one = MonotoneFunction::<f64>::constant(Shape::Growth, 1.0).unwrap();
        let v = bound(Variant::InfinityCk { k: 2 }, Some(&one), None, 1.0, 100.0).unwrap();
        assert!((v - 1.0 / 99.0).abs() < 1e-12);
    }

    #[test]
    fn c_ranges_are_enforced() {
        let m = growth_power(1.0);
        let err = RateBound::new(Variant::InfinitySmooth, Some(&m), None, 0.7).unwrap_err();
        assert!(err.to_string().contains("c∈(0,1/2)"), "{err}");
        let d = MonotoneFunction::<f64>::power(Shape::Decay, 1.0).unwrap();
        assert!(RateBound::new(Variant::ZeroSmooth, None, Some(&d), 0.95).is_ok());
        assert!(RateBound::new(Variant::ZeroSmooth, None, Some(&d), 1.0).is_err());
        assert!(RateBound::new(Variant::ZeroCk { k: 1 }, None, Some(&d), 50.0).is_ok());
        assert!(RateBound::new(Variant::ZeroCk { k: 1 }, None, Some(&d), 0.0).is_err());
    }

    #[test]
    fn below_t_min_is_an_error() {
        let d = MonotoneFunction::<f64>::power(Shape::Decay, 1.0).unwrap();
        let b = RateBound::new(Variant::ZeroCk { k: 1 }, None, Some(&d), 1.0).unwrap();
        // m_1(1) = 1, so c t must exceed 1.
        assert_eq!(b.t_min(), 1.0);
        assert!(matches!(b.eval(0.5), Err(Error::BelowTMin { .. })));
        assert!(b.eval(2.0).is_ok());
    }

    #[test]
    fn missing_sources() {
        let m = growth_power(1.0);
        assert!(RateBound::new(Variant::ZeroSmooth, Some(&m), None, 0.5).is_err());
        assert!(RateBound::new(Variant::ZeroInfinitySmooth, Some(&m), None, 0.4).is_err());
        assert!(RateBound::new(Variant::InfinitySmooth, Some(&m), None, 0.4).is_ok());
    }

    #[test]
    fn variant_names_round_trip() {
        for v in [
            Variant::InfinityCk { k: 3 },
            Variant::InfinitySmooth,
            Variant::ZeroCk { k: 1 },
            Variant::ZeroSmooth,
            Variant::ZeroInfinityCk { k: 2 },
            Variant::ZeroInfinitySmooth,
        ] {
            let text = match v.k() {
                Some(k) => format!("{}:{k}", v.name()),
                None => v.name().to_string(),
            };
            assert_eq!(text.parse::<Variant>().unwrap(), v);
        }
        assert!("infinity_Ck".parse::<Variant>().is_err());
        assert!("nope".parse::<Variant>().is_err());
    }

    #[test]
    fn combined_bound_adds_terms() {
        let m = growth_power(1.0);
        let d = MonotoneFunction::<f64>::power(Shape::Decay, 1.0).unwrap();
        let c = 0.4;
        let t = 1e4;
        let both = bound(Variant::ZeroInfinitySmooth, Some(&m), Some(&d), c, t).unwrap();
        let inf = bound(Variant::InfinitySmooth, Some(&m), None, c, t).unwrap();
        let zero = bound(Variant::ZeroSmooth, None, Some(&d), c, t).unwrap();
        // zero_smooth already contains the 1/t term.
        assert!((both - (inf + zero)).abs() < 1e-12 * both);
    }
}
