//! Exhaustive statistics over F_q[T], prediction-versus-measurement reports
//! and the identity suite behind `ffvar verify`.

mod empirical;
mod report;
pub mod tolerances;
mod types;
mod verify;

pub use empirical::{
    abs_f64, empirical_covariance, empirical_moment, empirical_variance, partial_sums, EmpiricalStats,
    EnumerationOptions, MomentReport, PartialSums,
};
pub use report::{compare_variance, convergence_report, ComparisonReport, ComparisonRow, Envelope, SCHEMA};
pub use types::{shift_independence, type_distribution, ShiftReport, TypeDistribution, TypeEntry};
pub use verify::{run_verify, CheckResult, Level, VerifyReport};
