//! Certified bounds and exhaustive search for
//! `U_{n_1} + ... + U_{n_t} = b_1 p_1^{z_1} + ... + b_s p_s^{z_s}`
//! with `U` a binary recurrence.
//!
//! The bound formulas are generic over [`Real`], which is implemented for
//! `f32`, `f64` and the interval type [`CertifiedReal`]. Reductions,
//! continued fractions and the searches work on exact integers and
//! certified intervals only.

pub mod arith;
pub mod certificate;
pub mod decimal;
pub mod error;
pub mod heights;
pub mod matveev;
pub mod pipeline;
pub mod recurrence;
pub mod reduction;
pub mod search;
pub mod spec_file;

pub use arith::expr::Expr;
pub use arith::real::CertifiedReal;
pub use arith::scalar::Real;
pub use arith::PrecisionPolicy;
pub use certificate::Certificate;
pub use error::{Error, Result};
pub use pipeline::{BoundLedger, LedgerStep};
pub use recurrence::{BinaryRecurrence, ProblemSpec};
pub use search::SolutionTuple;

/// Exact rationals.
pub type Rational = num_rational::BigRational;

pub type LinearForm = matveev::LinearFormSpec<CertifiedReal>;
pub type LinearFormF64 = matveev::LinearFormSpec<f64>;
pub type LinearFormF32 = matveev::LinearFormSpec<f32>;

pub type GammaData = matveev::GammaData<CertifiedReal>;
pub type GammaDataF64 = matveev::GammaData<f64>;

pub type DeltaConstants = pipeline::DeltaConstants<CertifiedReal>;
pub type DeltaConstantsF64 = pipeline::DeltaConstants<f64>;

pub type GrowthConstants = recurrence::GrowthConstants<CertifiedReal>;
pub type GrowthConstantsF64 = recurrence::GrowthConstants<f64>;
