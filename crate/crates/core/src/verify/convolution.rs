//! Mode-by-mode evaluation of `f * φ_R` for diagonal scenarios.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernels::Kernel;
use crate::quadrature::{integrate_with_breaks, QuadratureSpec};
use crate::scalar::Real;
use crate::semigroup::Scenario;

/// Componentwise values with the combined quadrature status.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeValues<T> {
    pub values: Vec<Complex<T>>,
    /// Largest reported quadrature error over the modes.
    pub error: T,
    pub converged: bool,
}

impl<T: Real> ModeValues<T> {
    pub fn sup_norm(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.norm()))
    }

    fn collect(parts: Vec<(Complex<T>, T, bool)>) -> Self {
        let mut values = Vec::with_capacity(parts.len());
        let mut error = T::zero();
        let mut converged = true;
        for (v, e, c) in parts {
            values.push(v);
            error = error.max(e);
            converged &= c;
        }
        Self {
            values,
            error,
            converged,
        }
    }
}

/// `(1/2π) ∫_{-R}^{R} e^{ist} F(s) ψ_R(s) ds`, the frequency side of the
/// smoothed orbit.
pub fn smoothed_orbit_frequency<T: Real>(
    scenario: &Scenario<T>,
    kernel: &Kernel<T>,
    t: T,
    spec: &QuadratureSpec<T>,
) -> Result<ModeValues<T>> {
    let r = kernel.scale();
    let base_breaks = kernel.freq_breaks();
    let local = QuadratureSpec {
        oscillation_frequency: (t.abs() > T::one()).then_some(t.abs()),
        ..*spec
    };
    let eigen = scenario.operator().eigenvalues();
    let parts = scenario
        .coefficients()
        .par_iter()
        .zip(eigen.par_iter())
        .map(|(&c, &l)| -> Result<(Complex<T>, T, bool)> {
            if c == Complex::new(T::zero(), T::zero()) {
                return Ok((c, T::zero(), true));
            }
            let mut breaks = base_breaks.clone();
            let width = l.re.abs();
            for k in [T::zero(), T::one(), T::lit(4.0), T::lit(16.0)] {
                breaks.push(l.im - k * width);
                breaks.push(l.im + k * width);
            }
            let integrand = |s: T| {
                let is = Complex::new(T::zero(), s);
                (is * t).exp() * c / (is - l) * kernel.freq(s)
            };
            let est = integrate_with_breaks(integrand, -r, r, &breaks, &local)?;
            Ok((est.value / T::TAU(), est.error / T::TAU(), est.converged))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ModeValues::collect(parts))
}

/// `∫_0^∞ f(u) φ_R(t - u) du`, the time side of the smoothed orbit.
pub fn smoothed_orbit_time<T: Real>(
    scenario: &Scenario<T>,
    kernel: &Kernel<T>,
    t: T,
    spec: &QuadratureSpec<T>,
) -> Result<ModeValues<T>> {
    let r = kernel.scale();
    let peak = kernel.time(T::zero()).abs();
    let eigen = scenario.operator().eigenvalues();
    let parts = scenario
        .coefficients()
        .par_iter()
        .zip(eigen.par_iter())
        .map(|(&c, &l)| -> Result<(Complex<T>, T, bool)> {
            if c == Complex::new(T::zero(), T::zero()) {
                return Ok((c, T::zero(), true));
            }
            let rate = -l.re;
            // |φ_R| <= φ_R(0), so the tail past U is at most |c| φ_R(0) e^{-rate U} / rate.
            let target = spec.abs_tol * T::lit(0.01);
            let cutoff = (c.norm() * peak / (rate * target)).ln().max(T::zero()) / rate;
            let upper = cutoff.max(t + T::lit(10.0) / r).max(T::one());
            if upper > spec.truncation_radius {
                return Err(Error::NonIntegrable {
                    reason: format!("time-side truncation {} exceeds the radius", upper.as_f64()),
                });
            }
            let local = QuadratureSpec {
                oscillation_frequency: Some(r.max(l.im.abs()).max(T::lit(0.5))),
                max_subdivisions: spec.max_subdivisions.max(4 * (upper * r).as_f64() as usize),
                ..*spec
            };
            let integrand = |u: T| (l * u).exp() * c * kernel.time(t - u);
            let est = integrate_with_breaks(integrand, T::zero(), upper, &[t], &local)?;
            let tail = c.norm() * peak * (-rate * upper).exp() / rate;
            Ok((est.value, est.error + tail, est.converged))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ModeValues::collect(parts))
}

/// `‖f(t) - f * φ_R(t)‖` via the frequency side, with the quadrature status.
pub fn mollifier_error<T: Real>(
    scenario: &Scenario<T>,
    kernel: &Kernel<T>,
    t: T,
    spec: &QuadratureSpec<T>,
) -> Result<(T, bool)> {
    let smoothed = smoothed_orbit_frequency(scenario, kernel, t, spec)?;
    let exact = scenario.orbit_components(t);
    let err = exact
        .iter()
        .zip(&smoothed.values)
        .fold(T::zero(), |m, (a, b)| m.max((a - b).norm()));
    Ok((err, smoothed.converged))
}
