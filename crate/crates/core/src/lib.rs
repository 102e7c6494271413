pub mod error;
pub mod kernels;
pub mod quadrature;
pub mod rate_functions;
pub mod scalar;
pub mod semigroup;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Real;

/// `f64` instances of the generic types.
pub type MonotoneFunctionF64 = rate_functions::MonotoneFunction<f64>;
pub type RateBoundF64 = rate_functions::RateBound<f64>;
pub type KernelF64 = kernels::Kernel<f64>;
pub type QuadratureSpecF64 = quadrature::QuadratureSpec<f64>;
pub type DiagonalOperatorF64 = semigroup::DiagonalOperator<f64>;
pub type ScenarioF64 = semigroup::Scenario<f64>;
pub type ScenarioFamilyF64 = semigroup::ScenarioFamily<f64>;
