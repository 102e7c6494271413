use thiserror::Error;

/// Errors raised by the numerical routines.
///
/// Scalars are carried as `f64` regardless of the working precision so the
/// error type stays independent of the scalar parameter.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument {value} outside the domain {domain}")]
    Domain { value: f64, domain: &'static str },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("target {target} below the infimum {infimum} of the function range")]
    BelowRange { target: f64, infimum: f64 },

    #[error("target {target} above the supremum {supremum} of the function range")]
    AboveRange { target: f64, supremum: f64 },

    #[error("tabulated values are not monotone at knot {index}")]
    NonMonotoneTable { index: usize },

    #[error("search bracket exhausted: minimiser still at the upper end R_max = {r_max} (value {value})")]
    BracketExhausted { r_max: f64, value: f64 },

    #[error("t = {t} is not above the smallest admissible time t_min = {t_min}")]
    BelowTMin { t: f64, t_min: f64 },

    #[error("c = {c} is inadmissible for {variant}: need {range}")]
    InadmissibleC { variant: &'static str, c: f64, range: &'static str },

    #[error("envelope is not decreasing near s = {at}")]
    EnvelopeNotDecreasing { at: f64 },

    #[error("tail is not integrable: {reason}")]
    NonIntegrable { reason: String },

    #[error("decay hint does not describe the integrand at s = {at} (difference {difference})")]
    HintMismatch { at: f64, difference: f64 },

    #[error("quadrature did not converge: estimate {value}, error {error}")]
    NotConverged { value: f64, error: f64 },

    #[error("i*s with s = {s} lies in the spectrum")]
    SpectralPoint { s: f64 },

    #[error("kernel `{kernel}` is inadmissible: {reason}")]
    InadmissibleKernel { kernel: &'static str, reason: &'static str },

    #[error("t = {t} exceeds the truncation-safe range (maximising mode {mode} of {modes})")]
    TruncationUnsafe { t: f64, mode: usize, modes: usize },

    #[error("scenario does not satisfy the hypotheses of {variant}: {reason}")]
    Hypothesis { variant: &'static str, reason: String },

    #[error("log-log fit needs positive values (row {row} has {value})")]
    NonPositive { row: usize, value: f64 },

    #[error("log-log fit needs at least {needed} rows, got {got}")]
    TooFewRows { needed: usize, got: usize },

    #[error("bump kernel tabulation too coarse: mass defect {defect}")]
    Resolution { defect: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
