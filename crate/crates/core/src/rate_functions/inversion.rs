use super::composite::MonotoneEval;
use super::monotone::Shape;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Default relative tolerance for [`invert_monotone`].
pub const DEFAULT_INVERSION_TOL: f64 = 1e-10;

const MAX_EXPANSIONS: usize = 2100;
const MAX_BISECTIONS: usize = 4000;

/// Solves `f(x) = y` for a monotone `f`.
///
/// The bracket is grown geometrically from the edge of the domain (doubling
/// from 0 for growth functions, halving from 1 for decay functions) and then
/// refined by bisection, geometric while the bracket spans more than a factor
/// four. Iteration stops once the bracket is narrower than `tol_rel`
/// relative to its upper end, or when it cannot shrink further in floating
/// point; very steep functions can therefore end with a residual above
/// `tol_rel * max(1, |y|)`.
pub fn invert_monotone<T: Real, F: MonotoneEval<T> + ?Sized>(f: &F, y: T, tol_rel: T) -> Result<T> {
    if !y.is_finite() {
        return Err(Error::InvalidParameter {
            name: "y",
            reason: "target must be finite".into(),
        });
    }
    if !(tol_rel > T::zero()) {
        return Err(Error::InvalidParameter {
            name: "tol_rel",
            reason: "must be positive".into(),
        });
    }
    match f.shape() {
        Shape::Growth => invert_growth(f, y, tol_rel),
        Shape::Decay => invert_decay(f, y, tol_rel),
    }
}

fn finite_or_nan<T: Real>(v: T, at: T) -> Result<T> {
    if v.is_nan() {
        Err(Error::Domain {
            value: at.as_f64(),
            domain: "evaluation returned NaN",
        })
    } else {
        Ok(v)
    }
}

fn invert_growth<T: Real, F: MonotoneEval<T> + ?Sized>(f: &F, y: T, tol: T) -> Result<T> {
    let floor = finite_or_nan(f.value(T::zero())?, T::zero())?;
    if y < floor {
        return Err(Error::BelowRange {
            target: y.as_f64(),
            infimum: floor.as_f64(),
        });
    }
    if y == floor {
        return Ok(T::zero());
    }
    let mut lo = T::zero();
    let mut hi = T::one();
    let mut expansions = 0;
    loop {
        let v = finite_or_nan(f.value(hi)?, hi)?;
        if v >= y {
            break;
        }
        lo = hi;
        hi = hi + hi;
        expansions += 1;
        if !hi.is_finite() || expansions > MAX_EXPANSIONS {
            return Err(Error::AboveRange {
                target: y.as_f64(),
                supremum: v.as_f64(),
            });
        }
    }
    bisect(f, y, tol, lo, hi, true)
}

fn invert_decay<T: Real, F: MonotoneEval<T> + ?Sized>(f: &F, y: T, tol: T) -> Result<T> {
    let floor = finite_or_nan(f.value(T::one())?, T::one())?;
    if y < floor {
        return Err(Error::BelowRange {
            target: y.as_f64(),
            infimum: floor.as_f64(),
        });
    }
    if y == floor {
        return Ok(T::one());
    }
    let mut hi = T::one();
    let mut lo = T::lit(0.5);
    let mut expansions = 0;
    loop {
        let v = finite_or_nan(f.value(lo)?, lo)?;
        if v >= y {
            break;
        }
        hi = lo;
        lo = lo * T::lit(0.5);
        expansions += 1;
        if !(lo > T::zero()) || expansions > MAX_EXPANSIONS {
            return Err(Error::AboveRange {
                target: y.as_f64(),
                supremum: v.as_f64(),
            });
        }
    }
    bisect(f, y, tol, lo, hi, false)
}

/// Bisection on `[lo, hi]`; `increasing` tells which side moves.
fn bisect<T: Real, F: MonotoneEval<T> + ?Sized>(f: &F, y: T, tol: T, mut lo: T, mut hi: T, increasing: bool) -> Result<T> {
    for _ in 0..MAX_BISECTIONS {
        if hi - lo <= tol * hi {
            break;
        }
        let mid = if lo > T::zero() && hi > T::lit(4.0) * lo {
            (lo * hi).sqrt()
        } else {
            lo + (hi - lo) * T::lit(0.5)
        };
        if !(mid > lo && mid < hi) {
            break;
        }
        let v = finite_or_nan(f.value(mid)?, mid)?;
        let below = v < y;
        if below == increasing {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Prefer the endpoint with the smaller residual.
    let r_lo = (f.value(lo)? - y).abs();
    let r_hi = (f.value(hi)? - y).abs();
    Ok(if r_lo <= r_hi { lo } else { hi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rate_functions::{Composition, MonotoneFunction, RateFunction};

    fn tol() -> f64 {
        DEFAULT_INVERSION_TOL
    }

    #[test]
    fn log_of_constant_inverts_to_e_minus_one() {
        let one = MonotoneFunction::<f64>::constant(Shape::Growth, 1.0).unwrap();
        let f = RateFunction::new(one, Composition::Logarithmic).unwrap();
        let x = invert_monotone(&f, 1.0, tol()).unwrap();
        assert!((x - (std::f64::consts::E - 1.0)).abs() < 1e-9);
    }

    #[test]
    fn growth_k_inverse() {
        let lin = MonotoneFunction::<f64>::power(Shape::Growth, 1.0).unwrap();
        let f = RateFunction::new(lin, Composition::Smoothness { k: 2 }).unwrap();
        assert!((invert_monotone(&f, 32.0, tol()).unwrap() - 3.0).abs() < 1e-9);
    }

    #[test]
    fn decay_log_round_trip() {
        let inv = MonotoneFunction::<f64>::power(Shape::Decay, 1.0).unwrap();
        let f = RateFunction::new(inv, Composition::Logarithmic).unwrap();
        let y = f.value(0.1).unwrap();
        let x = invert_monotone(&f, y, tol()).unwrap();
        assert!((x - 0.1).abs() < 1e-10);
        // Rounded target from a four-decimal printout still lands near 0.1.
        let x = invert_monotone(&f, 46.1512, tol()).unwrap();
        assert!((x - 0.1).abs() < 1e-5);
    }

    #[test]
    fn out_of_range_targets_report_the_range() {
        let lin = MonotoneFunction::<f64>::power(Shape::Growth, 1.0).unwrap();
        let f = RateFunction::new(lin, Composition::Smoothness { k: 1 }).unwrap();
        match invert_monotone(&f, 0.5, tol()) {
            Err(Error::BelowRange { infimum, .. }) => assert_eq!(infimum, 1.0),
            other => panic!("unexpected {other:?}"),
        }
        let dec = MonotoneFunction::<f64>::power(Shape::Decay, 1.0).unwrap();
        assert!(matches!(invert_monotone(&dec, 0.5, tol()), Err(Error::BelowRange { .. })));
        let flat = MonotoneFunction::<f64>::constant(Shape::Decay, 2.0).unwrap();
        assert!(matches!(invert_monotone(&flat, 3.0, tol()), Err(Error::AboveRange { .. })));
        let capped = MonotoneFunction::<f64>::tabulated(Shape::Growth, vec![0.0, 1.0], vec![1.0, 5.0]).unwrap();
        assert!(matches!(invert_monotone(&capped, 6.0, tol()), Err(Error::AboveRange { .. })));
    }

    #[test]
    fn endpoint_targets() {
        let lin = MonotoneFunction::<f64>::power(Shape::Growth, 1.0).unwrap();
        assert_eq!(invert_monotone(&lin, 1.0, tol()).unwrap(), 0.0);
        let dec = MonotoneFunction::<f64>::power(Shape::Decay, 2.0).unwrap();
        assert_eq!(invert_monotone(&dec, 1.0, tol()).unwrap(), 1.0);
    }

    #[test]
    fn tiny_decay_solutions() {
        let dec = MonotoneFunction::<f64>::power(Shape::Decay, 1.0).unwrap();
        let x = invert_monotone(&dec, 1e12, tol()).unwrap();
        assert!((x * 1e12 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn single_precision() {
        let lin = MonotoneFunction::<f32>::power(Shape::Growth, 1.0).unwrap();
        let f = RateFunction::new(lin, Composition::Smoothness { k: 2 }).unwrap();
        let x = invert_monotone(&f, 32.0f32, 1e-6).unwrap();
        assert!((x - 3.0).abs() < 1e-4);
    }
}
