use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{FactorizationFunction, NamedFn};
use crate::error::{Error, Result};
use crate::ffpoly::ExtFactType;
use crate::partitions::{enumerate_partitions, Partition};
use crate::rational::{frac, harmonic, int, serde_str, Rational};
use crate::symmetric::{cauchy_probability, character, character_table, schur_ones};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coefficient {
    pub lambda: Partition,
    #[serde(with = "serde_str")]
    pub value: Rational,
}

/// a(f) = Σ_λ â_λ X^λ(f) + b(f) on M_n, with b supported on squareful f.
///
/// Only nonzero coefficients are stored, in reverse-lexicographic order of λ.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FourierExpansion {
    pub n: usize,
    pub coeffs: Vec<Coefficient>,
    #[serde(skip)]
    remainder: Option<FactorizationFunction>,
}

impl PartialEq for FourierExpansion {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.coeffs == other.coeffs
    }
}

impl FourierExpansion {
    fn from_map(n: usize, map: BTreeMap<Partition, Rational>) -> Self {
        let mut coeffs: Vec<Coefficient> = map
            .into_iter()
            .filter(|(_, v)| !v.is_zero())
            .map(|(lambda, value)| Coefficient { lambda, value })
            .collect();
        coeffs.sort_by(|a, b| b.lambda.cmp(&a.lambda));
        FourierExpansion {
            n,
            coeffs,
            remainder: None,
        }
    }

    pub fn coeff(&self, lambda: &Partition) -> Rational {
        self.coeffs
            .iter()
            .find(|c| &c.lambda == lambda)
            .map(|c| c.value.clone())
            .unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Partition, &Rational)> {
        self.coeffs.iter().map(|c| (&c.lambda, &c.value))
    }

    /// The squareful part b, when the expansion was computed from a function.
    pub fn remainder(&self) -> Option<&FactorizationFunction> {
        self.remainder.as_ref()
    }

    /// Σ_λ â_λ X^λ(t), the squarefree part evaluated on a type of degree n.
    pub fn squarefree_part(&self, t: &ExtFactType) -> Rational {
        if !t.is_squarefree() || t.degree() != self.n {
            return Rational::zero();
        }
        let tau = Partition::from_unsorted(t.pairs().iter().map(|&(m, _)| m).collect());
        self.iter()
            .map(|(lam, v)| v * int(character(lam, &tau).expect("weights agree")))
            .sum()
    }

    /// Σ_λ â_λ X^λ(t) + b(t).
    pub fn reconstruct(&self, t: &ExtFactType) -> Option<Rational> {
        let b = self.remainder.as_ref()?;
        Some(self.squarefree_part(t) + b.eval_type(t))
    }

    /// Splits into (λ_1 > bound, λ_1 ≤ bound); the squareful remainder goes
    /// with the first part.
    pub fn split_at(&self, max_first_part: usize) -> (FourierExpansion, FourierExpansion) {
        let (low, high): (Vec<_>, Vec<_>) = self
            .coeffs
            .iter()
            .cloned()
            .partition(|c| c.lambda.first() <= max_first_part);
        let upper = FourierExpansion {
            n: self.n,
            coeffs: high,
            remainder: self.remainder.clone(),
        };
        let lower = FourierExpansion {
            n: self.n,
            coeffs: low,
            remainder: None,
        };
        (upper, lower)
    }

    /// Σ_{λ_1 ≤ bound} â_λ b̂_λ.
    pub fn pairing(&self, other: &FourierExpansion, max_first_part: usize) -> Rational {
        self.iter()
            .filter(|(lam, _)| lam.first() <= max_first_part)
            .map(|(lam, v)| v * other.coeff(lam))
            .sum()
    }
}

/// â_λ = Σ_ν 𝐩(ν) a(ν) X^λ(ν), computed from the values of a on squarefree
/// polynomials of degree n. The result is checked by reconstructing a on
/// every squarefree class.
pub fn fourier_coefficients(a: &FactorizationFunction, n: usize) -> Result<FourierExpansion> {
    let (parts, table) = character_table(n);
    let values: Vec<Rational> = parts
        .iter()
        .map(|nu| a.eval_type(&ExtFactType::squarefree(nu)))
        .collect();
    let weights: Vec<Rational> = parts
        .iter()
        .zip(&values)
        .map(|(nu, v)| cauchy_probability(nu) * v)
        .collect();
    let mut map = BTreeMap::new();
    for (i, lam) in parts.iter().enumerate() {
        let c: Rational = weights
            .iter()
            .zip(&table[i])
            .map(|(w, &x)| w * int(x))
            .sum();
        map.insert(lam.clone(), c);
    }
    for (j, nu) in parts.iter().enumerate() {
        let back: Rational = parts
            .iter()
            .enumerate()
            .map(|(i, lam)| &map[lam] * int(table[i][j]))
            .sum();
        if back != values[j] {
            return Err(Error::Inconsistent(format!(
                "expansion of {} does not reconstruct the value at {nu}",
                a.name()
            )));
        }
    }
    let mut exp = FourierExpansion::from_map(n, map);
    let inner = a.clone();
    exp.remainder = Some(FactorizationFunction::from_fn(
        format!("{}|squareful", a.name()),
        move |t| {
            if t.is_squarefree() {
                Rational::zero()
            } else {
                inner.eval_type(t)
            }
        },
    ));
    Ok(exp)
}

fn sign(k: usize) -> Rational {
    if k % 2 == 0 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

fn add(map: &mut BTreeMap<Partition, Rational>, lam: Partition, v: Rational) {
    *map.entry(lam).or_insert_with(Rational::zero) += v;
}

/// Closed-form expansions for the eight functions that have one.
pub fn closed_form_expansion(which: &NamedFn, n: usize) -> Result<FourierExpansion> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "n".into(),
            reason: "closed forms need n >= 1".into(),
        });
    }
    let mut map = BTreeMap::new();
    match which {
        NamedFn::Mu => add(&mut map, Partition::column(n), sign(n)),
        NamedFn::MuSquared => add(&mut map, Partition::row(n), Rational::one()),
        NamedFn::Lambda | NamedFn::LambdaJ(_) => {
            let j = match which {
                NamedFn::LambdaJ(j) => *j,
                _ => 1,
            };
            for r in 1..=n {
                let step = int(r as i64).pow(j as i32) - int(r as i64 - 1).pow(j as i32);
                add(&mut map, Partition::hook(r, n - r), sign(n - r) * step);
            }
        }
        NamedFn::MuTrunc(s) => {
            if *s < n {
                add(&mut map, Partition::hook(n - s, *s), sign(*s));
            }
        }
        NamedFn::DK(k) => {
            for lam in enumerate_partitions(n) {
                if lam.len() <= *k as usize {
                    let v = schur_ones(&lam, *k as usize)?;
                    add(&mut map, lam, v);
                }
            }
        }
        NamedFn::Omega => {
            add(&mut map, Partition::row(n), harmonic(n));
            // (λ1, λ2, 1^ν) with λ1 ≥ λ2 ≥ 1
            for lam in enumerate_partitions(n) {
                if lam.len() < 2 || lam.part(2) == 0 {
                    continue;
                }
                if lam.parts()[2..].iter().any(|&p| p != 1) {
                    continue;
                }
                let (l1, l2) = (lam.part(1) as i64, lam.part(2) as i64);
                let nu = lam.len() - 2;
                let v = sign(nu) * (frac(1, l2 + nu as i64) - frac(1, l1 + nu as i64 + 1));
                add(&mut map, lam, v);
            }
        }
        NamedFn::MuOmega => {
            let mut inner = BTreeMap::new();
            add(&mut inner, Partition::column(n), harmonic(n));
            // (ν+2, 2^j, 1^i) with ν + 2 + 2j + i = n
            for nu in 0..n.saturating_sub(1) {
                let rest = n - 2 - nu;
                for j in 0..=rest / 2 {
                    let i = rest - 2 * j;
                    let mut parts = vec![nu + 2];
                    parts.extend(std::iter::repeat(2).take(j));
                    parts.extend(std::iter::repeat(1).take(i));
                    let v = sign(nu)
                        * (frac(1, (j + nu + 1) as i64) - frac(1, (i + j + nu + 2) as i64));
                    add(&mut inner, Partition::new(parts)?, v);
                }
            }
            for (lam, v) in inner {
                add(&mut map, lam, sign(n) * v);
            }
        }
        other => return Err(Error::NoClosedForm(other.to_string())),
    }
    let mut exp = FourierExpansion::from_map(n, map);
    let func = FactorizationFunction::named(which);
    exp.remainder = Some(FactorizationFunction::from_fn(
        format!("{}|squareful", func.name()),
        move |t| {
            if t.is_squarefree() {
                Rational::zero()
            } else {
                func.eval_type(t)
            }
        },
    ));
    Ok(exp)
}

/// Largest |â_λ| in an expansion; zero for an empty one.
pub fn max_abs_coefficient(exp: &FourierExpansion) -> Rational {
    exp.iter()
        .map(|(_, v)| v.abs())
        .fold(Rational::zero(), |a, b| if b > a { b } else { a })
}
