//! Subdiffusion with a piecewise-constant fractional order, solved mode by
//! mode through Mittag-Leffler segment recursions.

#![allow(
    clippy::neg_cmp_op_on_partial_ord,
    clippy::needless_range_loop,
    clippy::excessive_precision
)]

pub mod error;
pub mod l1;
pub mod order_schedule;
pub mod quadrature;
pub mod scalar;
pub mod solver;
pub mod special;
pub mod spectral;
pub mod verification;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use error::{Error, Result};
pub use l1::{l1_weights, solve_mode_l1, L1Grid};
pub use order_schedule::OrderSchedule;
pub use scalar::Real;
pub use solver::{
    Backend, ProblemSpec, QuadratureConfig, SegmentModeSolution, SeparableSource, SolutionField, SourceTerm,
    SpatialProfile, TimeProfile,
};
pub use special::{beta_fn, duhamel_kernel, gamma_fn, ml, relaxation, MLParams, MittagLeffler};
pub use spectral::{Coefficient, EigenSystem, OperatorSpec};
pub use verification::RegularityReport;

pub type OrderScheduleF64 = OrderSchedule<f64>;
pub type OrderScheduleF32 = OrderSchedule<f32>;
pub type MittagLefflerF64 = MittagLeffler<f64>;
pub type MittagLefflerF32 = MittagLeffler<f32>;
pub type EigenSystemF64 = EigenSystem<f64>;
pub type EigenSystemF32 = EigenSystem<f32>;
pub type ProblemSpecF64 = ProblemSpec<f64>;
pub type ProblemSpecF32 = ProblemSpec<f32>;
pub type SolutionFieldF64 = SolutionField<f64>;
pub type SolutionFieldF32 = SolutionField<f32>;
