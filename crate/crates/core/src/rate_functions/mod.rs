//! Growth and decay rate functions, their compositions and inverses, and the
//! decay bounds built from them.

mod bounds;
mod composite;
mod inversion;
mod monotone;
mod raw;

pub use bounds::{bound, RateBound, Variant};
pub use composite::{eval_decay_k, eval_decay_log, eval_growth_k, eval_growth_log, Composition, MonotoneEval, RateFunction};
pub use inversion::{invert_monotone, DEFAULT_INVERSION_TOL};
pub use monotone::{Family, MonotoneFunction, Shape};
pub use raw::{raw_bound_ck, raw_bound_smooth, RawBound};
