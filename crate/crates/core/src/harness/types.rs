use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::empirical::check_budget;
use crate::error::{Error, Result};
use crate::ffpoly::{FactorTable, FieldSpec, Poly};
use crate::partitions::{enumerate_partitions, Partition};
use crate::rational::{serde_str, Rational};
use crate::symmetric::cauchy_probability;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeEntry {
    /// `None` collects every squareful polynomial.
    pub lambda: Option<Partition>,
    #[serde(with = "serde_str")]
    pub empirical: Rational,
    #[serde(with = "serde_str")]
    pub cauchy: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeDistribution {
    pub q: u32,
    pub n: usize,
    pub entries: Vec<TypeEntry>,
    /// ½ Σ |empirical − Cauchy|, the squareful mass included.
    #[serde(with = "serde_str")]
    pub tv_distance: Rational,
}

impl TypeDistribution {
    pub fn probability(&self, lambda: Option<&Partition>) -> Rational {
        self.entries
            .iter()
            .find(|e| e.lambda.as_ref() == lambda)
            .map(|e| e.empirical.clone())
            .unwrap_or_else(Rational::zero)
    }
}

// Squarefree type id → index into `parts`; squareful ids map to `parts.len()`.
fn class_map(table: &FactorTable, parts: &[Partition]) -> Vec<usize> {
    let pos: HashMap<&Partition, usize> = parts.iter().enumerate().map(|(i, p)| (p, i)).collect();
    table
        .types()
        .iter()
        .map(|t| {
            if t.is_squarefree() {
                let lam = Partition::from_unsorted(t.pairs().iter().map(|p| p.0).collect());
                pos[&lam]
            } else {
                parts.len()
            }
        })
        .collect()
}

/// Exact distribution of factorization types over M_n against Cauchy's formula.
pub fn type_distribution(q: u32, n: usize, budget: u128) -> Result<TypeDistribution> {
    let field = FieldSpec::new(q)?;
    check_budget(field, n, budget)?;
    let table = FactorTable::build(field, n);
    let parts = enumerate_partitions(n);
    let classes = class_map(&table, &parts);
    let mut counts = vec![0u64; parts.len() + 1];
    for (id, c) in table.counts().into_iter().enumerate() {
        counts[classes[id]] += c;
    }
    let total = BigInt::from(table.len());
    let mut entries = Vec::new();
    let mut tv = Rational::zero();
    for (i, &c) in counts.iter().enumerate() {
        let empirical = Rational::new(BigInt::from(c), total.clone());
        let (lambda, cauchy) = if i < parts.len() {
            (Some(parts[i].clone()), cauchy_probability(&parts[i]))
        } else {
            (None, Rational::zero())
        };
        tv += (&empirical - &cauchy).abs();
        entries.push(TypeEntry {
            lambda,
            empirical,
            cauchy,
        });
    }
    Ok(TypeDistribution {
        q,
        n,
        entries,
        tv_distance: tv / Rational::from_integer(BigInt::from(2)),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftReport {
    pub q: u32,
    pub n: usize,
    pub alpha: Poly,
    /// max_{λ,ν ⊢ n} |P(τ_f = λ, τ_{f+α} = ν) − 𝐩(λ)𝐩(ν)|
    #[serde(with = "serde_str")]
    pub max_deviation: Rational,
    /// q^{−1/2}
    pub yardstick: f64,
    /// max_deviation / yardstick
    pub ratio: f64,
}

/// Joint factorization types of f and f + α against the product of Cauchy laws.
pub fn shift_independence(q: u32, n: usize, alpha: &Poly, budget: u128) -> Result<ShiftReport> {
    let field = FieldSpec::new(q)?;
    if alpha.q() != q {
        return Err(Error::FieldMismatch(alpha.q(), q));
    }
    if alpha.degree().is_some_and(|d| d >= n) {
        return Err(Error::InvalidParameter {
            name: "alpha".into(),
            reason: format!("degree must be below n = {n}"),
        });
    }
    check_budget(field, n, budget)?;
    let table = FactorTable::build(field, n);
    let parts = enumerate_partitions(n);
    let classes = class_map(&table, &parts);
    let k = parts.len() + 1;
    let mut joint = vec![0u64; k * k];
    let q64 = q as u64;
    for idx in 0..table.len() as u64 {
        // add α digit by digit
        let (mut rest, mut shifted, mut place) = (idx, 0u64, 1u64);
        for i in 0..n {
            let digit = (rest % q64 + alpha.coeff(i) as u64) % q64;
            shifted += digit * place;
            rest /= q64;
            place *= q64;
        }
        let a = classes[table.type_id(idx) as usize];
        let b = classes[table.type_id(shifted) as usize];
        joint[a * k + b] += 1;
    }
    let total = BigInt::from(table.len());
    let probs: Vec<Rational> = parts.iter().map(cauchy_probability).collect();
    let mut max = Rational::zero();
    for i in 0..parts.len() {
        for j in 0..parts.len() {
            let emp = Rational::new(BigInt::from(joint[i * k + j]), total.clone());
            let dev = (emp - &probs[i] * &probs[j]).abs();
            if dev > max {
                max = dev;
            }
        }
    }
    let yardstick = (q as f64).powf(-0.5);
    let ratio = max.to_f64().unwrap_or(f64::NAN) / yardstick;
    Ok(ShiftReport {
        q,
        n,
        alpha: alpha.clone(),
        max_deviation: max,
        yardstick,
        ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;
    use crate::harness::tolerances::DEFAULT_BUDGET;

    #[test]
    fn q3_n2_distribution() {
        let d = type_distribution(3, 2, DEFAULT_BUDGET).unwrap();
        assert_eq!(d.probability(Some(&Partition::row(2))), frac(1, 3));
        assert_eq!(d.probability(Some(&Partition::column(2))), frac(1, 3));
        assert_eq!(d.probability(None), frac(1, 3));
        assert_eq!(cauchy_probability(&Partition::row(2)), frac(1, 2));
        assert_eq!(cauchy_probability(&Partition::column(2)), frac(1, 2));
    }

    #[test]
    fn tv_distance_decreases_in_q() {
        let tvs: Vec<Rational> = [3u32, 5, 7, 11]
            .iter()
            .map(|&q| type_distribution(q, 4, DEFAULT_BUDGET).unwrap().tv_distance)
            .collect();
        assert!(tvs.windows(2).all(|w| w[0] > w[1]), "{tvs:?}");
    }

    #[test]
    fn squarefree_density() {
        for (q, n) in [(2u32, 2usize), (2, 6), (3, 4), (5, 3), (7, 2)] {
            let d = type_distribution(q, n, DEFAULT_BUDGET).unwrap();
            assert_eq!(d.probability(None), frac(1, q as i64));
        }
    }

    #[test]
    fn shift_by_zero_is_diagonal() {
        let zero = Poly::zero(7);
        let one = Poly::one(7);
        let z = shift_independence(7, 3, &zero, DEFAULT_BUDGET).unwrap();
        let s = shift_independence(7, 3, &one, DEFAULT_BUDGET).unwrap();
        assert!(z.max_deviation > s.max_deviation);
        assert!(s.ratio <= 3.0, "{s:?}");
    }

    #[test]
    fn shift_rejects_large_alpha() {
        let alpha = Poly::monomial(3, 1, 3);
        assert!(shift_independence(3, 3, &alpha, DEFAULT_BUDGET).is_err());
    }
}
