use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Domain and direction of a [`MonotoneFunction`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    /// Non-decreasing on `[0, inf)`; a resolvent bound at high frequency.
    Growth,
    /// Non-increasing on `(0, 1]`; a resolvent bound near frequency zero.
    Decay,
}

impl Shape {
    pub fn domain(self) -> &'static str {
        match self {
            Shape::Growth => "[0, inf)",
            Shape::Decay => "(0, 1]",
        }
    }

    pub fn contains<T: Real>(self, x: T) -> bool {
        match self {
            Shape::Growth => x >= T::zero() && x.is_finite(),
            Shape::Decay => x > T::zero() && x <= T::one(),
        }
    }
}

/// Closed-form families and tabulated data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family<T> {
    /// `(1+R)^alpha` for growth, `r^(-alpha)` for decay.
    Power { alpha: T },
    /// `exp(R^alpha)` for growth, `exp(r^(-alpha))` for decay.
    Exponential { alpha: T },
    Constant { value: T },
    /// Piecewise-linear interpolation of strictly increasing knots, extended
    /// by the nearest end value outside the knot range.
    Tabulated { knots: Vec<T>, values: Vec<T> },
}

/// A continuous monotone function with values in `[1, inf)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotoneFunction<T> {
    shape: Shape,
    family: Family<T>,
    /// Decay functions only: evaluate as `max(value, 1/r)`.
    reciprocal_floor: bool,
}

impl<T: Real> MonotoneFunction<T> {
    pub fn power(shape: Shape, alpha: T) -> Result<Self> {
        positive("alpha", alpha)?;
        Ok(Self::raw(shape, Family::Power { alpha }))
    }

    pub fn exponential(shape: Shape, alpha: T) -> Result<Self> {
        positive("alpha", alpha)?;
        Ok(Self::raw(shape, Family::Exponential { alpha }))
    }

    pub fn constant(shape: Shape, value: T) -> Result<Self> {
        if !(value >= T::one()) || !value.is_finite() {
            return Err(Error::InvalidParameter {
                name: "value",
                reason: "constant rate functions must be finite and >= 1".into(),
            });
        }
        Ok(Self::raw(shape, Family::Constant { value }))
    }

    /// Tabulated function; the table must be monotone in the direction of
    /// `shape` and is rejected otherwise.
    pub fn tabulated(shape: Shape, knots: Vec<T>, values: Vec<T>) -> Result<Self> {
        if knots.is_empty() || knots.len() != values.len() {
            return Err(Error::InvalidParameter {
                name: "knots",
                reason: format!("need matching non-empty knots/values, got {}/{}", knots.len(), values.len()),
            });
        }
        for (i, (&x, &v)) in knots.iter().zip(&values).enumerate() {
            if !x.is_finite() || !v.is_finite() {
                return Err(Error::InvalidParameter {
                    name: "knots",
                    reason: format!("non-finite entry at index {i}"),
                });
            }
            if !shape.contains(x) {
                return Err(Error::Domain {
                    value: x.as_f64(),
                    domain: shape.domain(),
                });
            }
            if v < T::one() {
                return Err(Error::InvalidParameter {
                    name: "values",
                    reason: format!("value {} at index {i} is below 1", v.as_f64()),
                });
            }
            if i > 0 {
                if knots[i - 1] >= x {
                    return Err(Error::InvalidParameter {
                        name: "knots",
                        reason: format!("knots not strictly increasing at index {i}"),
                    });
                }
                let ordered = match shape {
                    Shape::Growth => values[i - 1] <= v,
                    Shape::Decay => values[i - 1] >= v,
                };
                if !ordered {
                    return Err(Error::NonMonotoneTable { index: i });
                }
            }
        }
        Ok(Self::raw(shape, Family::Tabulated { knots, values }))
    }

    fn raw(shape: Shape, family: Family<T>) -> Self {
        Self {
            shape,
            family,
            reciprocal_floor: false,
        }
    }

    /// Clamps a decay function below by `1/r`.
    pub fn with_reciprocal_floor(mut self) -> Result<Self> {
        if self.shape != Shape::Decay {
            return Err(Error::InvalidParameter {
                name: "reciprocal_floor",
                reason: "only decay functions take a 1/r floor".into(),
            });
        }
        self.reciprocal_floor = true;
        Ok(self)
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn family(&self) -> &Family<T> {
        &self.family
    }

    pub fn has_reciprocal_floor(&self) -> bool {
        self.reciprocal_floor
    }

    /// Value at `x`.
    pub fn eval(&self, x: T) -> Result<T> {
        self.check(x)?;
        Ok(self.eval_unchecked(x))
    }

    /// Natural logarithm of the value; finite even where the value overflows
    /// (exponential families).
    pub fn ln_eval(&self, x: T) -> Result<T> {
        self.check(x)?;
        Ok(self.ln_unchecked(x))
    }

    fn check(&self, x: T) -> Result<()> {
        if self.shape.contains(x) {
            Ok(())
        } else {
            Err(Error::Domain {
                value: x.as_f64(),
                domain: self.shape.domain(),
            })
        }
    }

    pub(crate) fn eval_unchecked(&self, x: T) -> T {
        let base = match (&self.family, self.shape) {
            (Family::Power { alpha }, Shape::Growth) => (T::one() + x).powf(*alpha),
            (Family::Power { alpha }, Shape::Decay) => x.powf(-*alpha),
            (Family::Exponential { alpha }, Shape::Growth) => x.powf(*alpha).exp(),
            (Family::Exponential { alpha }, Shape::Decay) => x.powf(-*alpha).exp(),
            (Family::Constant { value }, _) => *value,
            (Family::Tabulated { knots, values }, _) => interpolate(knots, values, x),
        };
        self.floored(base, x)
    }

    pub(crate) fn ln_unchecked(&self, x: T) -> T {
        let base = match (&self.family, self.shape) {
            (Family::Power { alpha }, Shape::Growth) => *alpha * x.ln_1p(),
            (Family::Power { alpha }, Shape::Decay) => -*alpha * x.ln(),
            (Family::Exponential { alpha }, Shape::Growth) => x.powf(*alpha),
            (Family::Exponential { alpha }, Shape::Decay) => x.powf(-*alpha),
            (Family::Constant { value }, _) => value.ln(),
            (Family::Tabulated { knots, values }, _) => interpolate(knots, values, x).ln(),
        };
        if self.reciprocal_floor {
            base.max(-x.ln())
        } else {
            base
        }
    }

    fn floored(&self, value: T, x: T) -> T {
        if self.reciprocal_floor {
            value.max(x.recip())
        } else {
            value
        }
    }
}

fn positive<T: Real>(name: &'static str, v: T) -> Result<()> {
    if v > T::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("must be positive and finite, got {}", v.as_f64()),
        })
    }
}

fn interpolate<T: Real>(knots: &[T], values: &[T], x: T) -> T {
    let last = knots.len() - 1;
    if x <= knots[0] {
        return values[0];
    }
    if x >= knots[last] {
        return values[last];
    }
    // First knot strictly greater than x.
    let hi = knots.partition_point(|&k| k <= x);
    let lo = hi - 1;
    let w = (x - knots[lo]) / (knots[hi] - knots[lo]);
    values[lo] + (values[hi] - values[lo]) * w
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_families() {
        let m = MonotoneFunction::<f64>::power(Shape::Growth, 2.0).unwrap();
        assert_eq!(m.eval(1.0).unwrap(), 4.0);
        let d = MonotoneFunction::<f64>::power(Shape::Decay, 1.0).unwrap();
        assert_eq!(d.eval(0.25).unwrap(), 4.0);
        let e = MonotoneFunction::<f64>::exponential(Shape::Growth, 1.0).unwrap();
        assert!((e.eval(1.0).unwrap() - std::f64::consts::E).abs() < 1e-15);
        assert_eq!(e.ln_eval(800.0).unwrap(), 800.0);
        let ed = MonotoneFunction::<f64>::exponential(Shape::Decay, 1.0).unwrap();
        assert!((ed.ln_eval(0.5).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn domain_is_enforced() {
        let d = MonotoneFunction::<f64>::power(Shape::Decay, 1.0).unwrap();
        assert!(matches!(d.eval(0.0), Err(Error::Domain { .. })));
        assert!(d.eval(1.5).is_err());
        let g = MonotoneFunction::<f64>::constant(Shape::Growth, 1.0).unwrap();
        assert!(g.eval(-1.0).is_err());
        assert!(MonotoneFunction::<f64>::constant(Shape::Growth, 0.5).is_err());
        assert!(MonotoneFunction::<f64>::power(Shape::Growth, 0.0).is_err());
    }

    #[test]
    fn tabulated_interpolates_and_extends() {
        let t = MonotoneFunction::<f64>::tabulated(Shape::Growth, vec![0.0, 1.0, 3.0], vec![1.0, 2.0, 6.0]).unwrap();
        assert_eq!(t.eval(0.5).unwrap(), 1.5);
        assert_eq!(t.eval(2.0).unwrap(), 4.0);
        assert_eq!(t.eval(10.0).unwrap(), 6.0);
        assert_eq!(t.eval(1.0).unwrap(), 2.0);
    }

    #[test]
    fn tabulated_rejects_bad_tables() {
        let non_monotone = MonotoneFunction::<f64>::tabulated(Shape::Growth, vec![0.0, 1.0, 2.0], vec![1.0, 3.0, 2.0]);
        assert_eq!(non_monotone.unwrap_err(), Error::NonMonotoneTable { index: 2 });
        let wrong_way = MonotoneFunction::<f64>::tabulated(Shape::Decay, vec![0.1, 0.5], vec![1.0, 2.0]);
        assert!(matches!(wrong_way, Err(Error::NonMonotoneTable { .. })));
        assert!(MonotoneFunction::<f64>::tabulated(Shape::Growth, vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(MonotoneFunction::<f64>::tabulated(Shape::Growth, vec![0.0, f64::NAN], vec![1.0, 1.0]).is_err());
        assert!(MonotoneFunction::<f64>::tabulated(Shape::Growth, vec![0.0], vec![0.5]).is_err());
        assert!(MonotoneFunction::<f64>::tabulated(Shape::Growth, vec![], vec![]).is_err());
    }

    #[test]
    fn reciprocal_floor_applies_to_decay_only() {
        let m = MonotoneFunction::<f64>::constant(Shape::Decay, 1.0).unwrap().with_reciprocal_floor().unwrap();
        assert_eq!(m.eval(0.25).unwrap(), 4.0);
        assert_eq!(m.eval(1.0).unwrap(), 1.0);
        assert!((m.ln_eval(0.25).unwrap() - 4f64.ln()).abs() < 1e-15);
        assert!(MonotoneFunction::<f64>::constant(Shape::Growth, 1.0).unwrap().with_reciprocal_floor().is_err());
    }
}
