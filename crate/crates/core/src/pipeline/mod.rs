//! The two theorem-level computations and the ledger they emit.

pub mod fixed_point;
pub mod ledger;
pub mod theorem1;
pub mod theorem2;

pub use fixed_point::{solve_fixed_point, verify_fixed_point};
pub use ledger::{BoundLedger, Check, LedgerStep, Sense, StepOutput};
pub use theorem2::{theorem2_solve, theorem2_solve_with, PhaseTiming, PipelineFailure, Theorem2Options, Theorem2Solution};
pub use theorem1::{delta_constants, theorem1_constant, DeltaConstants};
