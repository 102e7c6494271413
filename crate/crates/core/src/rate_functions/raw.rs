use serde::{Deserialize, Serialize};

use super::bounds::Variant;
use super::composite::{Composition, RateFunction};
use super::inversion::{invert_monotone, DEFAULT_INVERSION_TOL};
use super::monotone::{MonotoneFunction, Shape};
use crate::error::{Error, Result};
use crate::scalar::Real;

const GRID_PER_DECADE: usize = 20;
const SEARCH_TOL: f64 = 1e-6;
const MAX_WIDENINGS: usize = 8;

/// Minimum of a raw two-term estimate over `R ∈ [1, r_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawBound<T> {
    pub value: T,
    pub argmin: T,
    /// Upper end of the final search interval.
    pub r_max: T,
}

/// `min_R (1/R)((1+R)^2 M(R)^2 exp(-2ct/M(R)) + 1)`.
pub fn raw_bound_smooth<T: Real>(m: &MonotoneFunction<T>, c: T, t: T) -> Result<RawBound<T>> {
    check_inputs(m, t)?;
    Variant::InfinitySmooth.check_c(c)?;
    let two = T::lit(2.0);
    let objective = |u: T| -> T {
        let r = u.exp();
        let ln_m = m.ln_unchecked(r);
        let a = two * r.ln_1p() + two * ln_m - two * c * t * (-ln_m).exp();
        ln_1p_exp(a) - u
    };
    let scale = RateFunction::new(m.clone(), Composition::Logarithmic)?;
    let r_max = initial_r_max(invert_monotone(&scale, c * t, T::lit(DEFAULT_INVERSION_TOL)));
    minimise(objective, r_max)
}

/// `min_R 1/R + R M(R)^(k+1) / t^k`.
pub fn raw_bound_ck<T: Real>(m: &MonotoneFunction<T>, k: u32, c: T, t: T) -> Result<RawBound<T>> {
    check_inputs(m, t)?;
    Variant::InfinityCk { k }.check_c(c)?;
    let scale = RateFunction::new(m.clone(), Composition::Smoothness { k })?;
    let kk = T::from_count(k as usize);
    let ln_t = t.ln();
    let objective = |u: T| -> T {
        let r = u.exp();
        let ln_m = m.ln_unchecked(r);
        log_add_exp(-u, u + (kk + T::one()) * ln_m - kk * ln_t)
    };
    let r_max = initial_r_max(invert_monotone(&scale, c * t, T::lit(DEFAULT_INVERSION_TOL)));
    minimise(objective, r_max)
}

fn check_inputs<T: Real>(m: &MonotoneFunction<T>, t: T) -> Result<()> {
    if m.shape() != Shape::Growth {
        return Err(Error::InvalidParameter {
            name: "m",
            reason: "raw bounds need a growth function".into(),
        });
    }
    if !(t >= T::one()) || !t.is_finite() {
        return Err(Error::InvalidParameter {
            name: "t",
            reason: format!("need finite t >= 1, got {}", t.as_f64()),
        });
    }
    Ok(())
}

fn r_cap<T: Real>() -> T {
    T::lit(1e150).min(T::max_value().sqrt())
}

fn initial_r_max<T: Real>(scale: Result<T>) -> T {
    let cap = r_cap::<T>();
    match scale {
        Ok(r) => T::lit(1e6).max(r * T::lit(1e3)).min(cap),
        Err(_) => cap,
    }
}

fn minimise<T: Real>(objective: impl Fn(T) -> T, mut r_max: T) -> Result<RawBound<T>> {
    let cap = r_cap::<T>();
    for _ in 0..=MAX_WIDENINGS {
        let u_max = r_max.ln();
        let n = ((u_max / T::LN_10() * T::from_count(GRID_PER_DECADE)).ceil().as_f64() as usize).max(4);
        let step = u_max / T::from_count(n);
        let (mut best, mut best_val) = (0, objective(T::zero()));
        for i in 1..=n {
            let v = objective(step * T::from_count(i));
            if v < best_val {
                best = i;
                best_val = v;
            }
        }
        if best == n && r_max < cap {
            // Widen the search in log scale: R_max -> R_max^2.
            r_max = (r_max * r_max).min(cap);
            continue;
        }
        if best == n {
            return Err(Error::BracketExhausted {
                r_max: r_max.as_f64(),
                value: best_val.exp().as_f64(),
            });
        }
        let lo = step * T::from_count(best.saturating_sub(1));
        let hi = step * T::from_count((best + 1).min(n));
        let (u, v) = golden_section(&objective, lo, hi);
        let (u, v) = if v <= best_val { (u, v) } else { (step * T::from_count(best), best_val) };
        return Ok(RawBound {
            value: v.exp(),
            argmin: u.exp(),
            r_max,
        });
    }
    Err(Error::BracketExhausted {
        r_max: r_max.as_f64(),
        value: f64::NAN,
    })
}

/// Golden-section search for a minimum of `f` on `[a, b]` until the bracket
/// is narrower than the relative tolerance in `R = e^u`.
fn golden_section<T: Real>(f: &impl Fn(T) -> T, mut a: T, mut b: T) -> (T, T) {
    let inv_phi = (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0);
    let tol = T::lit(SEARCH_TOL).max(T::epsilon() * T::lit(16.0));
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..200 {
        if b - a <= tol {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

fn ln_1p_exp<T: Real>(x: T) -> T {
    if x > T::zero() {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn log_add_exp<T: Real>(a: T, b: T) -> T {
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_m_ck_closed_form() {
        let one = MonotoneFunction::<f64>::constant(Shape::Growth, 1.0).unwrap();
        for (k, t) in [(1u32, 100.0), (2, 1e3), (3, 50.0)] {
            let raw = raw_bound_ck(&one, k, 1.0, t).unwrap();
            let expected = 2.0 * t.powf(-(k as f64) / 2.0);
            assert!((raw.value / expected - 1.0).abs() < 1e-6, "k={k}: {} vs {expected}", raw.value);
            let r_star = t.powf(k as f64 / 2.0);
            assert!((raw.argmin / r_star - 1.0).abs() < 1e-2);
        }
    }

    #[test]
    fn linear_m_ck_argmin_near_closed_form() {
        let lin = MonotoneFunction::<f64>::power(Shape::Growth, 1.0).unwrap();
        let raw = raw_bound_ck(&lin, 2, 1.0, 1e4).unwrap();
        let f = RateFunction::new(lin, Composition::Smoothness { k: 2 }).unwrap();
        let closed = invert_monotone(&f, 1e4, 1e-10).unwrap();
        let ratio = raw.argmin / closed;
        assert!(ratio > 1.0 / 3.0 && ratio < 3.0, "ratio {ratio}");
    }

    #[test]
    fn constant_m_smooth_has_interior_minimiser() {
        let one = MonotoneFunction::<f64>::constant(Shape::Growth, 1.0).unwrap();
        let raw = raw_bound_smooth(&one, 0.4, 100.0).unwrap();
        // (1+R)^2 e^{-80} balances 1 near R = e^40, giving about 2 e^{-40}.
        assert!((raw.argmin.ln() - 40.0).abs() < 0.5, "{}", raw.argmin);
        assert!((raw.value / (2.0 * (-40f64).exp()) - 1.0).abs() < 1e-3);
        assert!(raw.argmin < raw.r_max);
    }

    #[test]
    fn larger_k_gives_smaller_value() {
        let lin = MonotoneFunction::<f64>::power(Shape::Growth, 1.0).unwrap();
        let v1 = raw_bound_ck(&lin, 1, 1.0, 1e5).unwrap().value;
        let v2 = raw_bound_ck(&lin, 2, 1.0, 1e5).unwrap().value;
        let v3 = raw_bound_ck(&lin, 3, 1.0, 1e5).unwrap().value;
        assert!(v1 > v2 && v2 > v3);
    }

    #[test]
    fn preconditions() {
        let one = MonotoneFunction::<f64>::constant(Shape::Growth, 1.0).unwrap();
        assert!(raw_bound_smooth(&one, 0.6, 10.0).is_err());
        assert!(raw_bound_smooth(&one, 0.4, 0.5).is_err());
        let dec = MonotoneFunction::<f64>::power(Shape::Decay, 1.0).unwrap();
        assert!(raw_bound_ck(&dec, 1, 1.0, 10.0).is_err());
    }
}
