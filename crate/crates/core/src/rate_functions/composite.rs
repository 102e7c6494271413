use serde::{Deserialize, Serialize};

use super::monotone::{MonotoneFunction, Shape};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Anything [`invert_monotone`](super::invert_monotone) can invert: a
/// monotone map on the domain of `shape`, non-decreasing for growth and
/// non-increasing for decay.
pub trait MonotoneEval<T: Real> {
    fn shape(&self) -> Shape;
    fn value(&self, x: T) -> Result<T>;
}

impl<T: Real> MonotoneEval<T> for MonotoneFunction<T> {
    fn shape(&self) -> Shape {
        MonotoneFunction::shape(self)
    }
    fn value(&self, x: T) -> Result<T> {
        self.eval(x)
    }
}

/// How a rate function is composed from its source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Composition {
    /// `M(R)((1+R)^2 M(R))^(1/k)` or `m(r)(m(r)/r)^(1/k)`.
    Smoothness { k: u32 },
    /// `M(R)(log(1+R) + log M(R))` or `m(r) log(1 + m(r)/r)`.
    Logarithmic,
}

/// A composed rate function built on a growth or decay source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFunction<T> {
    source: MonotoneFunction<T>,
    composition: Composition,
}

impl<T: Real> RateFunction<T> {
    pub fn new(source: MonotoneFunction<T>, composition: Composition) -> Result<Self> {
        if let Composition::Smoothness { k: 0 } = composition {
            return Err(Error::InvalidParameter {
                name: "k",
                reason: "smoothness order must be at least 1".into(),
            });
        }
        Ok(Self { source, composition })
    }

    pub fn source(&self) -> &MonotoneFunction<T> {
        &self.source
    }

    pub fn composition(&self) -> Composition {
        self.composition
    }

    /// Logarithm of the composed value at `x` (overflow-free for the
    /// exponential families).
    pub fn ln_value(&self, x: T) -> Result<T> {
        let ln_m = self.source.ln_eval(x)?;
        Ok(match (self.source.shape(), self.composition) {
            (Shape::Growth, Composition::Smoothness { k }) => {
                ln_m + (T::lit(2.0) * x.ln_1p() + ln_m) / T::from_count(k as usize)
            }
            (Shape::Growth, Composition::Logarithmic) => ln_m + (x.ln_1p() + ln_m).ln(),
            (Shape::Decay, Composition::Smoothness { k }) => {
                ln_m + (ln_m - x.ln()) / T::from_count(k as usize)
            }
            (Shape::Decay, Composition::Logarithmic) => ln_m + ln_1p_exp(ln_m - x.ln()).ln(),
        })
    }
}

impl<T: Real> MonotoneEval<T> for RateFunction<T> {
    fn shape(&self) -> Shape {
        self.source.shape()
    }

    fn value(&self, x: T) -> Result<T> {
        match (self.source.shape(), self.composition) {
            // M(0) = 1 gives M_log(0) = 0, whose logarithm is -inf.
            (Shape::Growth, Composition::Logarithmic) => {
                let ln_m = self.source.ln_eval(x)?;
                Ok(ln_m.exp() * (x.ln_1p() + ln_m))
            }
            _ => Ok(self.ln_value(x)?.exp()),
        }
    }
}

/// `log(1 + e^x)` without overflow.
fn ln_1p_exp<T: Real>(x: T) -> T {
    if x > T::zero() {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn require(f: &MonotoneFunction<impl Real>, shape: Shape) -> Result<()> {
    if f.shape() == shape {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "source",
            reason: format!("expected a {shape:?} function, got {:?}", f.shape()),
        })
    }
}

/// `M(R)((1+R)^2 M(R))^(1/k)` for a growth function `M`.
pub fn eval_growth_k<T: Real>(m: &MonotoneFunction<T>, k: u32, r: T) -> Result<T> {
    require(m, Shape::Growth)?;
    RateFunction::new(m.clone(), Composition::Smoothness { k })?.value(r)
}

/// `M(R)(log(1+R) + log M(R))` for a growth function `M`.
pub fn eval_growth_log<T: Real>(m: &MonotoneFunction<T>, r: T) -> Result<T> {
    require(m, Shape::Growth)?;
    RateFunction::new(m.clone(), Composition::Logarithmic)?.value(r)
}

/// `m(r)(m(r)/r)^(1/k)` for a decay function `m`.
pub fn eval_decay_k<T: Real>(m: &MonotoneFunction<T>, k: u32, r: T) -> Result<T> {
    require(m, Shape::Decay)?;
    RateFunction::new(m.clone(), Composition::Smoothness { k })?.value(r)
}

/// `m(r) log(1 + m(r)/r)` for a decay function `m`.
pub fn eval_decay_log<T: Real>(m: &MonotoneFunction<T>, r: T) -> Result<T> {
    require(m, Shape::Decay)?;
    RateFunction::new(m.clone(), Composition::Logarithmic)?.value(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn growth_k_examples() {
        let lin = MonotoneFunction::<f64>::power(Shape::Growth, 1.0).unwrap();
        assert!(close(eval_growth_k(&lin, 2, 3.0).unwrap(), 32.0, 1e-14));
        let one = MonotoneFunction::<f64>::constant(Shape::Growth, 1.0).unwrap();
        assert!(close(eval_growth_k(&one, 2, 99.0).unwrap(), 100.0, 1e-14));
        assert!(eval_growth_k(&one, 0, 1.0).is_err());
        assert!(eval_growth_k(&one, 1, -1.0).is_err());
    }

    #[test]
    fn growth_k_power_exponent() {
        // (1+R)^alpha composes to (1+R)^(alpha + (alpha+2)/k); alpha = 1, k = 2 gives 5/2.
        let lin = MonotoneFunction::<f64>::power(Shape::Growth, 1.0).unwrap();
        for r in [0.5, 4.0, 30.0] {
            let v = eval_growth_k(&lin, 2, r).unwrap();
            assert!(close(v, (1.0 + r).powf(2.5), 1e-13));
        }
    }

    #[test]
    fn growth_log_examples() {
        let lin = MonotoneFunction::<f64>::power(Shape::Growth, 1.0).unwrap();
        assert!(close(eval_growth_log(&lin, E - 1.0).unwrap(), 2.0 * E, 1e-14));
        let one = MonotoneFunction::<f64>::constant(Shape::Growth, 1.0).unwrap();
        assert_eq!(eval_growth_log(&one, 0.0).unwrap(), 0.0);
        assert!(close(eval_growth_log(&one, 5.0).unwrap(), 6f64.ln(), 1e-14));
        let exp = MonotoneFunction::<f64>::exponential(Shape::Growth, 1.0).unwrap();
        assert!(close(eval_growth_log(&exp, 1.0).unwrap(), E * (2f64.ln() + 1.0), 1e-14));
        assert!(close(eval_growth_log(&exp, 1.0).unwrap(), 4.602451, 1e-5));
    }

    #[test]
    fn decay_k_examples() {
        let inv = MonotoneFunction::<f64>::power(Shape::Decay, 1.0).unwrap();
        assert!(close(eval_decay_k(&inv, 2, 0.5).unwrap(), 4.0, 1e-14));
        let one = MonotoneFunction::<f64>::constant(Shape::Decay, 1.0).unwrap();
        for r in [0.1, 0.5, 1.0] {
            assert!(close(eval_decay_k(&one, 1, r).unwrap(), 1.0 / r, 1e-14));
        }
        // r^(-alpha) composes to r^(-(alpha(k+1)+1)/k); alpha = 1, k = 2 gives 2.
        for r in [0.01, 0.3] {
            assert!(close(eval_decay_k(&inv, 2, r).unwrap(), r.powi(-2), 1e-13));
        }
        assert!(eval_decay_k(&inv, 2, 0.0).is_err());
    }

    #[test]
    fn decay_log_examples() {
        let one = MonotoneFunction::<f64>::constant(Shape::Decay, 1.0).unwrap();
        assert!(close(eval_decay_log(&one, 1.0).unwrap(), 2f64.ln(), 1e-14));
        let inv = MonotoneFunction::<f64>::power(Shape::Decay, 1.0).unwrap();
        assert!(close(eval_decay_log(&inv, 1.0).unwrap(), 2f64.ln(), 1e-14));
        assert!(close(eval_decay_log(&inv, 0.1).unwrap(), 10.0 * 101f64.ln(), 1e-14));
        assert!(close(eval_decay_log(&inv, 0.1).unwrap(), 46.1512, 1e-5));
        assert!(eval_decay_log(&inv, 1.01).is_err());
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let inv = MonotoneFunction::<f64>::power(Shape::Decay, 1.0).unwrap();
        assert!(eval_growth_log(&inv, 1.0).is_err());
        let lin = MonotoneFunction::<f64>::power(Shape::Growth, 1.0).unwrap();
        assert!(eval_decay_log(&lin, 0.5).is_err());
    }

    #[test]
    fn exponential_sources_stay_finite_in_log_space() {
        let exp = MonotoneFunction::<f64>::exponential(Shape::Growth, 1.0).unwrap();
        let f = RateFunction::new(exp, Composition::Smoothness { k: 1 }).unwrap();
        let ln = f.ln_value(1000.0).unwrap();
        assert!(ln.is_finite() && ln > 2000.0);
        let dexp = MonotoneFunction::<f64>::exponential(Shape::Decay, 1.0).unwrap();
        let g = RateFunction::new(dexp, Composition::Logarithmic).unwrap();
        assert!(g.ln_value(1e-3).unwrap().is_finite());
    }
}
