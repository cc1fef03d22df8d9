//! Factorization functions: arithmetic functions whose value depends only on
//! the extended factorization type, and their factorization-Fourier expansions.

mod expansion;

pub use expansion::{
    closed_form_expansion, fourier_coefficients, max_abs_coefficient, Coefficient, FourierExpansion,
};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::ffpoly::{factor, ExtFactType, Poly};
use crate::partitions::{enumerate_partitions, Partition};
use crate::rational::{binomial, int, Rational};
use crate::symmetric::character;

/// The named functions the crate knows how to build.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum NamedFn {
    Const1,
    Mu,
    MuSquared,
    Lambda,
    LambdaJ(u32),
    DK(u32),
    Omega,
    MuOmega,
    Iota(usize, usize),
    CharX(Partition),
    /// Σ_{g | f, deg g ≤ s} μ(g)
    MuTrunc(usize),
    /// 1 − μ², the indicator of non-squarefree polynomials.
    Squareful,
}

impl NamedFn {
    pub fn new(name: &str, params: &[usize]) -> Result<Self> {
        let arity = |k: usize| -> Result<()> {
            if params.len() != k {
                return Err(Error::InvalidParameter {
                    name: name.to_string(),
                    reason: format!("expected {k} parameter(s), got {}", params.len()),
                });
            }
            Ok(())
        };
        let positive = |v: usize| -> Result<()> {
            if v == 0 {
                return Err(Error::InvalidParameter {
                    name: name.to_string(),
                    reason: "parameters must be positive".into(),
                });
            }
            Ok(())
        };
        let f = match name {
            "const1" => {
                arity(0)?;
                NamedFn::Const1
            }
            "mu" => {
                arity(0)?;
                NamedFn::Mu
            }
            "mu_squared" => {
                arity(0)?;
                NamedFn::MuSquared
            }
            "lambda" => {
                arity(0)?;
                NamedFn::Lambda
            }
            "omega" => {
                arity(0)?;
                NamedFn::Omega
            }
            "mu_omega" => {
                arity(0)?;
                NamedFn::MuOmega
            }
            "squareful" => {
                arity(0)?;
                NamedFn::Squareful
            }
            "lambda_j" => {
                arity(1)?;
                positive(params[0])?;
                NamedFn::LambdaJ(params[0] as u32)
            }
            "d_k" => {
                arity(1)?;
                positive(params[0])?;
                NamedFn::DK(params[0] as u32)
            }
            "mu_trunc" => {
                arity(1)?;
                NamedFn::MuTrunc(params[0])
            }
            "iota" => {
                arity(2)?;
                positive(params[0])?;
                positive(params[1])?;
                NamedFn::Iota(params[0], params[1])
            }
            "char_X" => {
                if params.is_empty() {
                    return Err(Error::InvalidParameter {
                        name: name.into(),
                        reason: "needs a nonempty partition".into(),
                    });
                }
                NamedFn::CharX(Partition::new(params.to_vec())?)
            }
            other => return Err(Error::UnknownFunction(other.to_string())),
        };
        Ok(f)
    }
}

impl fmt::Display for NamedFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NamedFn::Const1 => write!(f, "const1"),
            NamedFn::Mu => write!(f, "mu"),
            NamedFn::MuSquared => write!(f, "mu_squared"),
            NamedFn::Lambda => write!(f, "lambda"),
            NamedFn::LambdaJ(j) => write!(f, "lambda_j:{j}"),
            NamedFn::DK(k) => write!(f, "d_k:{k}"),
            NamedFn::Omega => write!(f, "omega"),
            NamedFn::MuOmega => write!(f, "mu_omega"),
            NamedFn::Iota(m, e) => write!(f, "iota:{m},{e}"),
            NamedFn::CharX(lam) => {
                let parts: Vec<String> = lam.parts().iter().map(|p| p.to_string()).collect();
                write!(f, "char_X:{}", parts.join(","))
            }
            NamedFn::MuTrunc(s) => write!(f, "mu_trunc:{s}"),
            NamedFn::Squareful => write!(f, "squareful"),
        }
    }
}

/// Parses `NAME[:p1,p2,...]`, e.g. `d_k:3` or `char_X:2,1`.
impl FromStr for NamedFn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, params) = match s.split_once(':') {
            Some((n, p)) => {
                let params = p
                    .split(',')
                    .map(|x| {
                        x.trim()
                            .parse::<usize>()
                            .map_err(|_| Error::Parse(format!("bad parameter `{x}` in `{s}`")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                (n, params)
            }
            None => (s, Vec::new()),
        };
        NamedFn::new(name.trim(), &params)
    }
}

type Eval = dyn Fn(&ExtFactType) -> Rational + Send + Sync;

/// A function on monic polynomials determined by the extended factorization type.
#[derive(Clone)]
pub struct FactorizationFunction {
    name: String,
    eval: Arc<Eval>,
}

impl fmt::Debug for FactorizationFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FactorizationFunction")
            .field("name", &self.name)
            .finish()
    }
}

impl FactorizationFunction {
    pub fn from_fn<F>(name: impl Into<String>, eval: F) -> Self
    where
        F: Fn(&ExtFactType) -> Rational + Send + Sync + 'static,
    {
        FactorizationFunction {
            name: name.into(),
            eval: Arc::new(eval),
        }
    }

    pub fn named(which: &NamedFn) -> Self {
        let name = which.to_string();
        match which.clone() {
            NamedFn::Const1 => Self::from_fn(name, |_| Rational::one()),
            NamedFn::Mu => Self::from_fn(name, |t| int(mobius_of(t))),
            NamedFn::MuSquared => Self::from_fn(name, |t| int(mobius_of(t).abs())),
            NamedFn::Lambda => Self::from_fn(name, |t| match t.pairs() {
                [(m, _)] => int(*m as i64),
                _ => Rational::zero(),
            }),
            NamedFn::LambdaJ(j) => Self::from_fn(name, move |t| {
                let n = t.degree() as i64;
                let total: BigInt = subset_sums(t)
                    .into_iter()
                    .map(|(size, deg)| sign(size) * BigInt::from(n - deg as i64).pow(j))
                    .sum();
                Rational::from_integer(total)
            }),
            NamedFn::DK(k) => Self::from_fn(name, move |t| {
                let v = t.pairs().iter().fold(BigInt::one(), |acc, &(_, e)| {
                    acc * binomial(e as u64 + k as u64 - 1, k as u64 - 1)
                });
                Rational::from_integer(v)
            }),
            NamedFn::Omega => Self::from_fn(name, |t| int(t.distinct_primes() as i64)),
            NamedFn::MuOmega => {
                Self::from_fn(name, |t| int(mobius_of(t) * t.distinct_primes() as i64))
            }
            NamedFn::Iota(m, e) => Self::from_fn(name, move |t| {
                if t.pairs() == [(m, e)] {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            }),
            NamedFn::CharX(lambda) => Self::from_fn(name, move |t| {
                if t.is_squarefree() && t.degree() == lambda.weight() {
                    let tau = Partition::from_unsorted(t.pairs().iter().map(|&(m, _)| m).collect());
                    int(character(&lambda, &tau).expect("weights agree"))
                } else {
                    Rational::zero()
                }
            }),
            NamedFn::MuTrunc(s) => Self::from_fn(name, move |t| {
                let total: BigInt = subset_sums(t)
                    .into_iter()
                    .filter(|&(_, deg)| deg <= s)
                    .map(|(size, _)| sign(size))
                    .sum();
                Rational::from_integer(total)
            }),
            NamedFn::Squareful => Self::from_fn(name, |t| {
                if t.is_squarefree() {
                    Rational::zero()
                } else {
                    Rational::one()
                }
            }),
        }
    }

    pub fn parse(spec: &str) -> Result<Self> {
        Ok(Self::named(&spec.parse()?))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval_type(&self, t: &ExtFactType) -> Rational {
        (self.eval)(t)
    }

    /// Value on a polynomial, through its factorization.
    pub fn eval(&self, f: &Poly) -> Result<Rational> {
        Ok(self.eval_type(&factor(f)?.ext_type))
    }

    /// Restriction to squarefree polynomials of degree n, keyed by type.
    pub fn squarefree_class_values(&self, n: usize) -> BTreeMap<Partition, Rational> {
        enumerate_partitions(n)
            .into_iter()
            .map(|lam| {
                let v = self.eval_type(&ExtFactType::squarefree(&lam));
                (lam, v)
            })
            .collect()
    }

    pub fn scaled(&self, c: Rational) -> Self {
        let inner = self.eval.clone();
        Self::from_fn(format!("({c})*{}", self.name), move |t| &c * inner(t))
    }

    pub fn sub(&self, other: &Self) -> Self {
        let (a, b) = (self.eval.clone(), other.eval.clone());
        Self::from_fn(format!("{}-{}", self.name, other.name), move |t| a(t) - b(t))
    }
}

fn sign(size: usize) -> BigInt {
    if size % 2 == 0 {
        BigInt::one()
    } else {
        -BigInt::one()
    }
}

fn mobius_of(t: &ExtFactType) -> i64 {
    if !t.is_squarefree() {
        0
    } else if t.distinct_primes() % 2 == 0 {
        1
    } else {
        -1
    }
}

// (|S|, Σ_{i∈S} m_i) for every subset S of the distinct primes.
fn subset_sums(t: &ExtFactType) -> Vec<(usize, usize)> {
    let pairs = t.pairs();
    (0u32..1 << pairs.len())
        .map(|mask| {
            let mut size = 0;
            let mut deg = 0;
            for (i, &(m, _)) in pairs.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    size += 1;
                    deg += m;
                }
            }
            (size, deg)
        })
        .collect()
}

/// Dirichlet convolution (a ⋆ b)(f) = Σ_{f1 f2 = f} a(f1) b(f2), evaluated by
/// distributing each prime power of the type between the two factors.
pub fn convolve(a: &FactorizationFunction, b: &FactorizationFunction) -> FactorizationFunction {
    let (ea, eb) = (a.eval.clone(), b.eval.clone());
    FactorizationFunction::from_fn(format!("{}*{}", a.name, b.name), move |t| {
        let pairs = t.pairs();
        let mut split = vec![0usize; pairs.len()];
        let mut total = Rational::zero();
        loop {
            let mut left = Vec::new();
            let mut right = Vec::new();
            for (&(m, e), &s) in pairs.iter().zip(&split) {
                if s > 0 {
                    left.push((m, s));
                }
                if e > s {
                    right.push((m, e - s));
                }
            }
            total += ea(&ExtFactType::new(left)) * eb(&ExtFactType::new(right));
            // odometer over 0..=e_i
            let mut i = 0;
            loop {
                if i == pairs.len() {
                    return total;
                }
                if split[i] < pairs[i].1 {
                    split[i] += 1;
                    break;
                }
                split[i] = 0;
                i += 1;
            }
        }
    })
}

/// ι_{(m,e)} = ι_{m_1,e_1} ⋆ ⋯ ⋆ ι_{m_ℓ,e_ℓ}.
pub fn iota_product(pairs: &[(usize, usize)]) -> FactorizationFunction {
    let mut acc = FactorizationFunction::from_fn("delta_1", |t| {
        if t.pairs().is_empty() {
            Rational::one()
        } else {
            Rational::zero()
        }
    });
    for &(m, e) in pairs {
        acc = convolve(&acc, &FactorizationFunction::named(&NamedFn::Iota(m, e)));
    }
    acc
}

/// Σ_{g | f, deg g ≤ s} μ(g), from the factorization of f.
pub fn truncated_mobius_sum(f: &Poly, s: usize) -> Result<i64> {
    let t = factor(f)?.ext_type;
    Ok(subset_sums(&t)
        .into_iter()
        .filter(|&(_, deg)| deg <= s)
        .map(|(size, _)| if size % 2 == 0 { 1 } else { -1 })
        .sum())
}
