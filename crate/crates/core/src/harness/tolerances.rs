//! Frozen tolerance constants.
//!
//! The asymptotic statements only give O(·) error terms. The C values below
//! are engineering choices calibrated on a reference run and then frozen as
//! regression guards; they are not claims about the true constants.

/// |empirical/q^{h+1} − prediction| ≤ C·q^{−1/2}.
pub const C_VARIANCE: i64 = 5;
/// Family maximum of the Schur-of-zeros residual, in units of q^{−1/2}.
pub const C_SCHUR: f64 = 5.0;
/// |Δ_{λ,ν} − target| in units of q^{−1/2}.
pub const C_DELTA: f64 = 5.0;
/// Character-sum decay ratios.
pub const C_DECAY: f64 = 5.0;
/// Shift-independence deviation in units of q^{−1/2}.
pub const C_SHIFT: f64 = 3.0;

/// Explicit-formula residual.
pub const EXPLICIT_FORMULA_TOL: f64 = 1e-6;
/// Relative residual of the short-interval character identity.
pub const SHORT_INTERVAL_TOL: f64 = 1e-8;
/// Relative residual of the Frobenius identities.
pub const FROBENIUS_TOL: f64 = 1e-9;

/// Default cap on the number of polynomials factored by one enumeration.
pub const DEFAULT_BUDGET: u128 = 100_000_000;
