//! Dispatch from a validated configuration to the experiment routines.

use anyhow::Result;
use ingham_core::rate_functions::{Family, RateBound, Shape, Variant};
use ingham_core::verify::{
    bound_table, check_asymptotic_regularity, check_mollifier_rate, compare_decay, kernel_check, parseval_sweep,
    power_law_slope, raw_bound_oracle, DecayOptions, ExperimentReport,
};

use crate::config::{Experiment, RunConfig};

pub fn run(config: &RunConfig) -> Result<ExperimentReport> {
    let spec = config.spec();
    let mut report = match config.experiment {
        Experiment::BoundTable => run_bound_table(config)?,
        Experiment::KernelCheck => kernel_check(&config.kernel()?, &config.grid.values(), 1e-6, &spec)?,
        Experiment::Parseval => parseval_sweep(
            &config.scenario()?,
            &config.kernel()?,
            &config.parseval.times,
            config.parseval.tolerance,
            &spec,
        )?,
        Experiment::MollifierRate => check_mollifier_rate(
            &config.scenario()?,
            &config.kernel()?,
            &config.mollifier.radii,
            config.mollifier.t_max,
            config.mollifier.t_points,
            &spec,
        )?,
        Experiment::AsymptoticRegularity => {
            check_asymptotic_regularity(&config.scenario()?, &config.kernel()?, &config.grid.values(), &spec)?
        }
        Experiment::CompareDecay => {
            let options = DecayOptions {
                c: Some(config.bound.c),
                envelope: config.envelope(),
                fit_decades: config.bound.fit_decades,
                expect_monotone_ratio: config.bound.expect_monotone_ratio,
            };
            compare_decay(&config.scenario()?, config.variant(), &config.grid.values(), &options)?
        }
        Experiment::RawBoundOracle => raw_bound_oracle(
            &config.source(Shape::Growth)?,
            config.variant(),
            config.bound.c,
            &config.grid.values(),
        )?,
    };
    if let Some(seed) = config.seed {
        report.meta("seed", format!("{seed} (unused)"));
    }
    Ok(report)
}

fn power_alpha(family: &Family<f64>) -> Option<f64> {
    match family {
        Family::Power { alpha } => Some(*alpha),
        _ => None,
    }
}

/// Bound table with a closed-form shape as the reference column when the
/// relevant source is a power law.
fn run_bound_table(config: &RunConfig) -> Result<ExperimentReport> {
    let variant = config.variant();
    let growth = config.source(Shape::Growth)?;
    let decay = config.source(Shape::Decay)?;
    let bound = RateBound::new(variant, Some(&growth), Some(&decay), config.bound.c)?;
    let alpha = match variant {
        Variant::InfinityCk { .. } | Variant::InfinitySmooth => power_alpha(growth.family()),
        Variant::ZeroCk { .. } | Variant::ZeroSmooth => power_alpha(decay.family()),
        _ => None,
    };
    let expected = alpha.and_then(|a| power_law_slope(variant, a));
    let reference: Option<Box<dyn Fn(f64) -> f64 + Sync>> = match (alpha, expected) {
        (Some(_), Some(p)) => Some(Box::new(move |t: f64| t.powf(p))),
        (Some(a), None) => Some(Box::new(move |t: f64| (t.ln() / t).powf(1.0 / a))),
        _ => None,
    };
    // The exponent is only reached as t grows without bound, so on a finite
    // grid it is reported rather than checked.
    let mut report = bound_table(&bound, &config.grid.values(), reference.as_deref(), None)?;
    if let Some(p) = expected {
        report.meta("asymptotic_slope", p);
    }
    report
        .meta("growth", format!("{:?}", growth.family()))
        .meta("decay", format!("{:?}", decay.family()));
    Ok(report)
}
