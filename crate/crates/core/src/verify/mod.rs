//! Numerical experiments and the reports they produce.

mod convolution;
mod experiments;
mod fit;
mod report;

pub use convolution::{mollifier_error, smoothed_orbit_frequency, smoothed_orbit_time, ModeValues};
pub use experiments::{
    bound_table, check_asymptotic_regularity, check_mollifier_rate, check_parseval, compare_decay,
    corollary_orbit, hypothesis_orbit, kernel_check, parseval_sweep, power_law_slope, raw_bound_oracle,
    scenario_envelopes, DecayOptions,
};
pub use fit::{fit_loglog, geometric, last_decades, linear, log_grid, LogLogFit};
pub use report::{median, spread, Check, ExperimentReport, NamedFit, Row};
