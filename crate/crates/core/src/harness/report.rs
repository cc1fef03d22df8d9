use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;

use super::empirical::{empirical_variance, EnumerationOptions};
use super::tolerances::C_VARIANCE;
use crate::arith::FactorizationFunction;
use crate::error::Result;
use crate::predictor::{predict_variance, RangePolicy};
use crate::rational::{serde_str, Rational};

pub const SCHEMA: &str = "ffvar-report/1";

/// Top-level JSON envelope for every report.
#[derive(Clone, Debug, Serialize)]
pub struct Envelope<T: Serialize> {
    pub schema: &'static str,
    pub command: String,
    pub data: T,
}

impl<T: Serialize> Envelope<T> {
    pub fn new(command: impl Into<String>, data: T) -> Self {
        Envelope {
            schema: SCHEMA,
            command: command.into(),
            data,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ComparisonRow {
    pub q: u32,
    /// empirical variance / q^{h+1}
    #[serde(with = "serde_str")]
    pub empirical_normalized: Rational,
    #[serde(with = "serde_str")]
    pub abs_error: Rational,
    /// C·q^{−1/2}
    pub bound: f64,
    pub pass: bool,
}

/// Prediction against exhaustive measurement along a sequence of q.
#[derive(Clone, Debug, Serialize)]
pub struct ComparisonReport {
    pub function: String,
    pub n: usize,
    pub h: usize,
    #[serde(with = "serde_str")]
    pub prediction: Rational,
    /// Declared engineering constant, not a proven value.
    pub c: i64,
    pub rows: Vec<ComparisonRow>,
    /// Every row within its bound.
    pub pass: bool,
    /// abs_error weakly decreasing along the q sequence.
    pub monotone: bool,
}

/// Compares predict_variance with empirical_variance / q^{h+1} for each q;
/// the pass test |err| ≤ C q^{−1/2} is decided exactly as err² · q ≤ C².
pub fn compare_variance(
    a: &FactorizationFunction,
    n: usize,
    h: usize,
    qs: &[u32],
    c: i64,
    policy: RangePolicy,
    opts: &EnumerationOptions,
) -> Result<ComparisonReport> {
    let prediction = predict_variance(a, n, h, policy)?.leading_coeff;
    let mut rows = Vec::new();
    for &q in qs {
        let stats = empirical_variance(a, q, n, h, opts)?;
        let scale = Rational::from_integer(BigInt::from(q).pow(h as u32 + 1));
        let normalized = stats.variance / scale;
        let err = &normalized - &prediction;
        let abs_error = if err < Rational::from_integer(0.into()) { -err } else { err };
        let pass = &abs_error * &abs_error * Rational::from_integer(BigInt::from(q))
            <= Rational::from_integer(BigInt::from(c * c));
        rows.push(ComparisonRow {
            q,
            empirical_normalized: normalized,
            abs_error,
            bound: c as f64 / (q as f64).sqrt(),
            pass,
        });
    }
    let pass = rows.iter().all(|r| r.pass);
    let monotone = rows.windows(2).all(|w| w[1].abs_error <= w[0].abs_error);
    Ok(ComparisonReport {
        function: a.name().to_string(),
        n,
        h,
        prediction,
        c,
        rows,
        pass,
        monotone,
    })
}

/// The default comparison with the frozen constant.
pub fn convergence_report(
    a: &FactorizationFunction,
    n: usize,
    h: usize,
    qs: &[u32],
    opts: &EnumerationOptions,
) -> Result<ComparisonReport> {
    compare_variance(a, n, h, qs, C_VARIANCE, RangePolicy::Theorem, opts)
}

impl ComparisonReport {
    pub fn errors_f64(&self) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| r.abs_error.to_f64().unwrap_or(f64::NAN))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mu_at_q5_is_within_two_units() {
        let mu = FactorizationFunction::parse("mu").unwrap();
        let r = compare_variance(&mu, 5, 0, &[5], 2, RangePolicy::Theorem, &EnumerationOptions::default()).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn envelope_has_schema() {
        let v = serde_json::to_value(Envelope::new("x", 1)).unwrap();
        assert_eq!(v["schema"], SCHEMA);
    }
}
