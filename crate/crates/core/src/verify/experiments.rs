use rayon::prelude::*;

use super::convolution::{mollifier_error, smoothed_orbit_frequency, smoothed_orbit_time};
use super::fit::{fit_loglog, geometric, last_decades};
use super::report::{median, spread, ExperimentReport, Row};
use crate::error::{Error, Result};
use crate::kernels::{Kernel, KernelKind};
use crate::quadrature::QuadratureSpec;
use crate::rate_functions::{raw_bound_ck, raw_bound_smooth, MonotoneFunction, RateBound, Variant};
use crate::scalar::Real;
use crate::semigroup::{
    resolvent_envelope_decay, resolvent_envelope_growth, EnvelopeShape, OrbitKind, Scenario, ScenarioFamily,
};

/// Slack on the non-increasing checks, relative to the previous value.
const MONOTONE_SLACK: f64 = 1e-9;
/// Samples per envelope grid on top of the eigenvalue ordinates.
const ENVELOPE_SAMPLES: usize = 400;

/// `‖f * φ_R(t)‖` computed on the time side minus the frequency side, in the
/// supremum norm over modes.
pub fn check_parseval<T: Real>(
    scenario: &Scenario<T>,
    kernel: &Kernel<T>,
    t: T,
    spec: &QuadratureSpec<T>,
) -> Result<T> {
    spec.validate()?;
    let lhs = smoothed_orbit_time(scenario, kernel, t, spec)?;
    let rhs = smoothed_orbit_frequency(scenario, kernel, t, spec)?;
    if !lhs.converged || !rhs.converged {
        return Err(Error::NotConverged {
            value: rhs.sup_norm().as_f64(),
            error: lhs.error.max(rhs.error).as_f64(),
        });
    }
    Ok(lhs
        .values
        .iter()
        .zip(&rhs.values)
        .fold(T::zero(), |m, (a, b)| m.max((a - b).norm())))
}

/// Parseval residuals over a list of times, checked against `tolerance`.
pub fn parseval_sweep<T: Real>(
    scenario: &Scenario<T>,
    kernel: &Kernel<T>,
    times: &[T],
    tolerance: f64,
    spec: &QuadratureSpec<T>,
) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("parseval", "t");
    report
        .meta("scenario", scenario.family())
        .meta("orbit", scenario.orbit().name())
        .meta("kernel", kernel.name())
        .meta("R", kernel.scale())
        .meta("abs_tol", spec.abs_tol)
        .meta("rel_tol", spec.rel_tol);
    let mut worst = 0.0f64;
    for &t in times {
        let (residual, converged) = match check_parseval(scenario, kernel, t, spec) {
            Ok(r) => (r.as_f64(), true),
            Err(Error::NotConverged { .. }) => {
                report.converged = false;
                (f64::NAN, false)
            }
            Err(e) => return Err(e),
        };
        worst = worst.max(residual);
        report.rows.push(Row::new(t.as_f64(), residual, Some(tolerance)).flagged(converged));
    }
    let passed = report.converged && report.rows.iter().all(|r| r.measured <= tolerance);
    report.check("residual", passed, format!("max residual {worst:.3e}, tolerance {tolerance:.1e}"));
    Ok(report)
}

/// `E(R) = max_{t in [1, T]} ‖f(t) - f * φ_R(t)‖` for each `R`, with the
/// stability of `R E(R)`.
pub fn check_mollifier_rate<T: Real>(
    scenario: &Scenario<T>,
    kernel: &Kernel<T>,
    radii: &[T],
    t_max: T,
    t_points: usize,
    spec: &QuadratureSpec<T>,
) -> Result<ExperimentReport> {
    if radii.is_empty() || radii.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter {
            name: "radii",
            reason: "need a non-empty increasing list".into(),
        });
    }
    if !(t_max > T::one()) || t_points < 2 {
        return Err(Error::InvalidParameter {
            name: "t_max",
            reason: "need T > 1 and at least two time points".into(),
        });
    }
    let times = super::fit::linear(T::one(), t_max, t_points);
    let mut report = ExperimentReport::new("mollifier_rate", "R");
    report
        .meta("scenario", scenario.family())
        .meta("orbit", scenario.orbit().name())
        .meta("kernel", kernel.name())
        .meta("t_max", t_max)
        .meta("t_points", t_points)
        .meta("abs_tol", spec.abs_tol)
        .meta("rel_tol", spec.rel_tol);
    let mut errors = Vec::with_capacity(radii.len());
    for &r in radii {
        let scaled = kernel.scaled(r)?;
        let sweep = times
            .par_iter()
            .map(|&t| mollifier_error(scenario, &scaled, t, spec))
            .collect::<Result<Vec<_>>>()?;
        let e = sweep.iter().fold(T::zero(), |m, (v, _)| m.max(*v)).as_f64();
        let converged = sweep.iter().all(|(_, c)| *c);
        report.converged &= converged;
        errors.push(e);
        report.rows.push(Row::new(r.as_f64(), e, Some(r.recip().as_f64())).flagged(converged));
    }
    let scaled: Vec<f64> = report.ratios();
    if errors.iter().all(|&e| e == 0.0) {
        report.constant_stability = Some(1.0);
        report.check("rate_stable", true, "E(R) vanishes identically");
    } else {
        let stability = spread(&scaled);
        report.constant_stability = Some(stability);
        report.check("rate_stable", stability <= 2.0, format!("max/min of R E(R) = {stability:.4}"));
        let r64: Vec<f64> = radii.iter().map(|r| r.as_f64()).collect();
        if let Ok(fit) = fit_loglog(&r64, &errors) {
            report.slope("error", fit);
        }
    }
    let worst = errors
        .windows(2)
        .map(|w| if w[0] > 0.0 { w[1] / w[0] } else if w[1] > 0.0 { f64::INFINITY } else { 1.0 })
        .fold(0.0, f64::max);
    report.check(
        "non_increasing",
        errors.len() < 2 || worst <= 1.1,
        format!("largest E(R') / E(R) = {worst:.4}"),
    );
    Ok(report)
}

fn regularity_sweep<T: Real>(
    scenario: &Scenario<T>,
    kernel: &Kernel<T>,
    times: &[T],
    spec: &QuadratureSpec<T>,
) -> Result<ExperimentReport> {
    kernel.require_regular()?;
    let mut report = ExperimentReport::new("asymptotic_regularity", "t");
    report
        .meta("scenario", scenario.family())
        .meta("orbit", scenario.orbit().name())
        .meta("kernel", kernel.name())
        .meta("abs_tol", spec.abs_tol)
        .meta("rel_tol", spec.rel_tol);
    // Modes run in parallel inside each point, so times go in order.
    for &t in times {
        let (err, converged) = mollifier_error(scenario, kernel, t, spec)?;
        report.converged &= converged;
        report.rows.push(Row::new(t.as_f64(), err.as_f64(), Some(t.recip().as_f64())).flagged(converged));
    }
    let constants = report.ratios();
    let finite = !constants.is_empty() && constants.iter().all(|c| c.is_finite());
    let stability = if constants.iter().all(|&c| c > 0.0) { spread(&constants) } else { f64::INFINITY };
    report.constant_stability = Some(stability);
    let largest = constants.iter().copied().fold(0.0, f64::max);
    report.check("constant_finite", finite, format!("largest t·error = {largest:.6e}"));
    let x: Vec<f64> = report.rows.iter().map(|r| r.abscissa).collect();
    let y: Vec<f64> = report.rows.iter().map(|r| r.measured).collect();
    if let Ok(fit) = fit_loglog(&x, &y) {
        report.slope("error", fit);
    }
    Ok(report)
}

/// `t ‖f(t) - f * φ(t)‖` over the grid for `kernel`, repeated for a second
/// admissible kernel (bump, or tent when `kernel` is the bump).
///
/// The main sweep must have a constant stable within a factor 2; the second
/// only needs a finite constant.
pub fn check_asymptotic_regularity<T: Real>(
    scenario: &Scenario<T>,
    kernel: &Kernel<T>,
    times: &[T],
    spec: &QuadratureSpec<T>,
) -> Result<ExperimentReport> {
    kernel.require_regular()?;
    if matches!(
        scenario.family(),
        ScenarioFamily::ClusterInfinity { .. } | ScenarioFamily::Combined { .. }
    ) {
        return Err(Error::Hypothesis {
            variant: "asymptotic_regularity",
            reason: format!("{} has an unbounded resolvent at infinity", scenario.family().name()),
        });
    }
    if times.is_empty() {
        return Err(Error::InvalidParameter {
            name: "t_grid",
            reason: "must be non-empty".into(),
        });
    }
    let mut report = regularity_sweep(scenario, kernel, times, spec)?;
    let stability = report.constant_stability.unwrap_or(f64::INFINITY);
    report.check("constant_stable", stability <= 2.0, format!("max/min of t·error = {stability:.4}"));
    let second = match kernel.kind() {
        KernelKind::Bump => Kernel::tent(),
        _ => Kernel::of_kind(KernelKind::Bump)?,
    };
    let companion = regularity_sweep(scenario, &second, times, spec)?;
    report.meta("second_kernel", second.name());
    report.companions.push(companion);
    Ok(report)
}

/// The orbit each variant's corollary is stated for.
pub fn hypothesis_orbit(variant: Variant) -> &'static str {
    match variant {
        Variant::InfinityCk { .. } | Variant::InfinitySmooth => "Ainv",
        Variant::ZeroCk { .. } | Variant::ZeroSmooth => "AR_omega",
        Variant::ZeroInfinityCk { .. } | Variant::ZeroInfinitySmooth => "AR_omega_sq",
    }
}

fn check_hypothesis<T: Real>(scenario: &Scenario<T>, variant: Variant) -> Result<()> {
    let wanted = hypothesis_orbit(variant);
    if scenario.orbit().name() != wanted {
        return Err(Error::Hypothesis {
            variant: variant.name(),
            reason: format!("orbit must be {wanted}, got {}", scenario.orbit().name()),
        });
    }
    let family = scenario.family();
    let clash = match variant {
        Variant::InfinityCk { .. } | Variant::InfinitySmooth => {
            matches!(family, ScenarioFamily::ClusterZero { .. } | ScenarioFamily::Combined { .. })
        }
        Variant::ZeroCk { .. } | Variant::ZeroSmooth => {
            matches!(family, ScenarioFamily::ClusterInfinity { .. } | ScenarioFamily::Combined { .. })
        }
        _ => false,
    };
    if clash {
        return Err(Error::Hypothesis {
            variant: variant.name(),
            reason: format!("{} violates the resolvent hypothesis", family.name()),
        });
    }
    Ok(())
}

/// Options for [`compare_decay`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayOptions {
    /// `None` picks the variant's default.
    pub c: Option<f64>,
    pub envelope: EnvelopeShape,
    /// Slopes use rows in this many decades at the top of the grid.
    pub fit_decades: f64,
    /// Also require the ratio to be non-increasing.
    pub expect_monotone_ratio: bool,
}

impl Default for DecayOptions {
    fn default() -> Self {
        Self {
            c: None,
            envelope: EnvelopeShape::RunningMax,
            fit_decades: 2.0,
            expect_monotone_ratio: false,
        }
    }
}

/// Growth and decay envelopes of the scenario's resolvent, as the variant
/// needs them.
pub fn scenario_envelopes<T: Real>(
    scenario: &Scenario<T>,
    variant: Variant,
    shape: EnvelopeShape,
) -> Result<(Option<MonotoneFunction<T>>, Option<MonotoneFunction<T>>)> {
    let op = scenario.operator();
    let ordinates: Vec<T> = op.eigenvalues().iter().map(|l| l.im.abs()).collect();
    let top = ordinates.iter().copied().fold(T::one(), T::max);
    let growth = if variant.uses_growth() {
        // With a singularity at zero the growth envelope only covers |s| >= 1.
        let from = if variant.uses_decay() { T::one() } else { T::zero() };
        let lo = from.max(T::lit(1e-3));
        let mut grid = geometric(lo, T::lit(4.0) * top + T::one(), ENVELOPE_SAMPLES);
        grid.push(from);
        Some(resolvent_envelope_growth(op, &grid, shape, from)?)
    } else {
        None
    };
    let decay = if variant.uses_decay() {
        let bottom = ordinates
            .iter()
            .copied()
            .filter(|&v| v > T::zero())
            .fold(T::one(), T::min);
        let grid = geometric(bottom * T::lit(1e-2), T::one(), ENVELOPE_SAMPLES);
        Some(resolvent_envelope_decay(op, &grid)?)
    } else {
        None
    };
    Ok((growth, decay))
}

/// Measured `‖T(t) B‖` against the variant's bound built from the scenario's
/// resolvent envelopes.
pub fn compare_decay<T: Real>(
    scenario: &Scenario<T>,
    variant: Variant,
    times: &[T],
    options: &DecayOptions,
) -> Result<ExperimentReport> {
    let c = T::lit(options.c.unwrap_or_else(|| variant.default_c()));
    variant.check_c(c)?;
    check_hypothesis(scenario, variant)?;
    if times.len() < 2 || times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter {
            name: "t_grid",
            reason: "need an increasing grid with at least two points".into(),
        });
    }
    for &t in times {
        scenario.check_truncation(t)?;
    }
    let (growth, decay) = scenario_envelopes(scenario, variant, options.envelope)?;
    let bound = RateBound::new(variant, growth.as_ref(), decay.as_ref(), c)?;

    let mut report = ExperimentReport::new("compare_decay", "t");
    report
        .meta("scenario", scenario.family())
        .meta("orbit", scenario.orbit().name())
        .meta("omega", scenario.omega())
        .meta("variant", variant)
        .meta("c", c)
        .meta("envelope", format!("{:?}", options.envelope))
        .meta("fit_decades", options.fit_decades)
        .meta("t_min", bound.t_min());

    let rows = times
        .par_iter()
        .map(|&t| -> Result<Row> {
            let measured = scenario.orbit_norm(t)?;
            let b = bound.eval(t)?;
            Ok(Row::new(t.as_f64(), measured.as_f64(), Some(b.as_f64())))
        })
        .collect::<Result<Vec<_>>>()?;
    report.rows = rows;

    let x: Vec<f64> = report.rows.iter().map(|r| r.abscissa).collect();
    let tail = last_decades(&x, options.fit_decades);
    let pick = |f: &dyn Fn(&Row) -> f64| -> (Vec<f64>, Vec<f64>) {
        tail.iter().map(|&i| (x[i], f(&report.rows[i]))).unzip()
    };
    let (tx, measured) = pick(&|r| r.measured);
    let (_, bounds) = pick(&|r| r.reference.unwrap_or(f64::NAN));
    let measured_fit = fit_loglog(&tx, &measured)?;
    let bound_fit = fit_loglog(&tx, &bounds)?;
    report.slope("measured", measured_fit).slope("bound", bound_fit);

    let ratios = report.ratios();
    let bounded = ratios.len() == report.rows.len() && ratios.iter().all(|r| r.is_finite());
    let top = x.last().copied().unwrap_or(f64::NAN);
    let first = x[0];
    let late: Vec<f64> = (0..x.len()).filter(|&i| x[i] >= top / 10.0 * (1.0 - 1e-12)).map(|i| ratios[i]).collect();
    let early: Vec<f64> = (0..x.len()).filter(|&i| x[i] <= first * 10.0 * (1.0 + 1e-12)).map(|i| ratios[i]).collect();
    let late_max = late.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let early_median = median(&early);
    report.constant_stability = Some(late_max / early_median);
    report.check(
        "dominance",
        bounded && late_max <= early_median,
        format!("max ratio in last decade {late_max:.6e}, median in first decade {early_median:.6e}"),
    );
    report.check(
        "slope_ordering",
        measured_fit.slope <= bound_fit.slope + 0.05,
        format!("measured {:.4} vs bound {:.4}", measured_fit.slope, bound_fit.slope),
    );
    if options.expect_monotone_ratio {
        let worst = ratios.windows(2).map(|w| w[1] / w[0] - 1.0).fold(f64::NEG_INFINITY, f64::max);
        report.check(
            "ratio_non_increasing",
            worst <= MONOTONE_SLACK,
            format!("largest relative step up {worst:.3e}"),
        );
    }
    if let Some(m) = &growth {
        let coherence = oracle_coherence(m, variant, c, &bound, times)?;
        let (lo, hi) = coherence
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        report.check(
            "oracle_coherence",
            lo >= 0.1 && hi <= 10.0,
            format!("raw / closed-form growth term in [{lo:.4}, {hi:.4}]"),
        );
    }
    Ok(report)
}

/// Raw two-term minimum over the growth term `1 / M^{-1}(ct)` at the first,
/// middle and last grid times (those with `t >= 1`).
fn oracle_coherence<T: Real>(
    m: &MonotoneFunction<T>,
    variant: Variant,
    c: T,
    bound: &RateBound<T>,
    times: &[T],
) -> Result<Vec<f64>> {
    let picks = [0, times.len() / 2, times.len() - 1];
    let mut out = Vec::new();
    for &i in &picks {
        let t = times[i];
        if t < T::one() {
            continue;
        }
        let raw = match variant.k() {
            Some(k) => raw_bound_ck(m, k, c, t)?,
            // The raw smooth estimate needs c < 1/2 whatever the variant.
            None => raw_bound_smooth(m, c.min(T::lit(0.45)), t)?,
        };
        let radius = bound.growth_radius(t)?.expect("growth variant");
        out.push(raw.value.as_f64() * radius.as_f64());
    }
    Ok(out)
}

/// Bound values over a time grid, with an optional closed-form reference.
pub fn bound_table<T: Real>(
    bound: &RateBound<T>,
    times: &[T],
    reference: Option<&(dyn Fn(f64) -> f64 + Sync)>,
    expected_slope: Option<f64>,
) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("bound_table", "t");
    report
        .meta("variant", bound.variant())
        .meta("c", bound.c())
        .meta("t_min", bound.t_min());
    report.rows = times
        .par_iter()
        .map(|&t| -> Result<Row> {
            let v = bound.eval(t)?.as_f64();
            Ok(Row::new(t.as_f64(), v, reference.map(|f| f(t.as_f64()))))
        })
        .collect::<Result<Vec<_>>>()?;
    let x: Vec<f64> = report.rows.iter().map(|r| r.abscissa).collect();
    let y: Vec<f64> = report.rows.iter().map(|r| r.measured).collect();
    let fit = fit_loglog(&x, &y)?;
    report.slope("bound", fit);
    if reference.is_some() {
        let yr: Vec<f64> = report.rows.iter().map(|r| r.reference.unwrap_or(f64::NAN)).collect();
        if let Ok(rfit) = fit_loglog(&x, &yr) {
            report.slope("reference", rfit);
        }
    }
    let non_increasing = y.windows(2).all(|w| w[1] <= w[0] * (1.0 + MONOTONE_SLACK));
    report.check("non_increasing", non_increasing, "bound is non-increasing in t");
    if let Some(expected) = expected_slope {
        report.meta("expected_slope", expected);
        report.check(
            "slope",
            (fit.slope - expected).abs() <= 0.02,
            format!("fitted {:.5} vs expected {expected:.5}", fit.slope),
        );
    }
    Ok(report)
}

/// Polynomial exponent of the Ck bounds for power-law sources:
/// `-k/(α(k+1)+2)` at infinity, `-k/(α(k+1)+1)` at zero.
pub fn power_law_slope(variant: Variant, alpha: f64) -> Option<f64> {
    let k = variant.k()? as f64;
    match variant {
        Variant::InfinityCk { .. } => Some(-k / (alpha * (k + 1.0) + 2.0)),
        Variant::ZeroCk { .. } => Some(-k / (alpha * (k + 1.0) + 1.0)),
        _ => None,
    }
}

/// Numeric against closed-form `ψ` on a frequency grid.
pub fn kernel_check<T: Real>(
    kernel: &Kernel<T>,
    frequencies: &[T],
    tolerance: f64,
    spec: &QuadratureSpec<T>,
) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("kernel_check", "s");
    report
        .meta("kernel", kernel.name())
        .meta("R", kernel.scale())
        .meta("abs_tol", spec.abs_tol)
        .meta("rel_tol", spec.rel_tol);
    report.rows = frequencies
        .par_iter()
        .map(|&s| -> Result<Row> {
            let numeric = kernel.fourier_transform(s, spec)?;
            Ok(Row::new(s.as_f64(), numeric.as_f64(), Some(kernel.freq(s).as_f64())))
        })
        .collect::<Result<Vec<_>>>()?;
    let worst = report
        .rows
        .iter()
        .map(|r| (r.measured - r.reference.unwrap_or(f64::NAN)).abs())
        .fold(0.0, f64::max);
    report.check(
        "fourier_pair",
        worst <= tolerance,
        format!("max |numeric - closed| = {worst:.3e}"),
    );
    Ok(report)
}

/// Raw minimisation against the closed-form bound for the infinity
/// variants.
pub fn raw_bound_oracle<T: Real>(
    m: &MonotoneFunction<T>,
    variant: Variant,
    c: T,
    times: &[T],
) -> Result<ExperimentReport> {
    if !matches!(variant, Variant::InfinityCk { .. } | Variant::InfinitySmooth) {
        return Err(Error::InvalidParameter {
            name: "variant",
            reason: "raw bounds exist for infinity_Ck and infinity_smooth only".into(),
        });
    }
    let bound = RateBound::new(variant, Some(m), None, c)?;
    let mut report = ExperimentReport::new("raw_bound_oracle", "t");
    report.meta("variant", variant).meta("c", c);
    report.rows = times
        .par_iter()
        .map(|&t| -> Result<Row> {
            let raw = match variant.k() {
                Some(k) => raw_bound_ck(m, k, c, t)?,
                None => raw_bound_smooth(m, c, t)?,
            };
            Ok(Row::new(t.as_f64(), raw.value.as_f64(), Some(bound.eval(t)?.as_f64())))
        })
        .collect::<Result<Vec<_>>>()?;
    let ratios = report.ratios();
    let (lo, hi) = ratios
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    report.constant_stability = Some(hi / lo);
    report.check(
        "within_factor_10",
        ratios.len() == report.rows.len() && lo >= 0.1 && hi <= 10.0,
        format!("raw / closed in [{lo:.4}, {hi:.4}]"),
    );
    Ok(report)
}

/// Default orbit for a variant's corollary.
pub fn corollary_orbit<T>(variant: Variant) -> OrbitKind<T> {
    match hypothesis_orbit(variant) {
        "Ainv" => OrbitKind::Ainv,
        "AR_omega" => OrbitKind::AROmega,
        _ => OrbitKind::AROmegaSq,
    }
}
