use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tolerances::DEFAULT_BUDGET;
use crate::arith::FactorizationFunction;
use crate::error::{Error, Result};
use crate::ffpoly::{factor, shard_range, ExtFactType, FactorTable, FieldSpec, Poly};
use crate::rational::{serde_str, Rational};

/// How much to enumerate and which slice of the work to do.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerationOptions {
    pub budget: u128,
    pub shards: u64,
    pub shard_index: u64,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        EnumerationOptions {
            budget: DEFAULT_BUDGET,
            shards: 1,
            shard_index: 0,
        }
    }
}

impl EnumerationOptions {
    pub fn with_budget(budget: u128) -> Self {
        EnumerationOptions {
            budget,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.shards == 0 || self.shard_index >= self.shards {
            return Err(Error::InvalidParameter {
                name: "shard-index".into(),
                reason: format!("need 0 <= index < shards, got {}/{}", self.shard_index, self.shards),
            });
        }
        Ok(())
    }
}

pub(crate) fn check_budget(field: FieldSpec, n: usize, budget: u128) -> Result<()> {
    let needed = (field.q() as u128).pow(n as u32);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    Ok(())
}

/// Mean and variance of η(f) = Σ_{g∈I(f;h)} a(g) over f ∈ M_n.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmpiricalStats {
    pub function: String,
    pub q: u32,
    pub n: usize,
    pub h: usize,
    #[serde(with = "serde_str")]
    pub mean: Rational,
    #[serde(with = "serde_str")]
    pub variance: Rational,
    pub sample_space: u64,
}

/// Exact per-block sums over a range of intervals, ready to be merged with
/// other shards. Function values are scaled to integers by `dens`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartialSums {
    pub functions: Vec<String>,
    pub q: u32,
    pub n: usize,
    pub h: usize,
    pub total_blocks: u64,
    pub blocks: u64,
    #[serde(with = "big_vec")]
    pub dens: Vec<BigInt>,
    #[serde(with = "big_vec")]
    pub sums: Vec<BigInt>,
    /// Upper-triangular Σ S_i S_j, row-major.
    #[serde(with = "big_vec")]
    pub cross: Vec<BigInt>,
}

mod big_vec {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|x| x.to_string()).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|x| x.parse().map_err(serde::de::Error::custom))
            .collect()
    }
}

fn pair_index(k: usize, i: usize, j: usize) -> usize {
    // position of (i, j), i ≤ j, in the row-major upper triangle
    i * k - i * (i + 1) / 2 + j
}

impl PartialSums {
    pub fn merge(mut self, other: &PartialSums) -> Result<PartialSums> {
        if (self.q, self.n, self.h, &self.functions, &self.dens)
            != (other.q, other.n, other.h, &other.functions, &other.dens)
        {
            return Err(Error::InvalidParameter {
                name: "merge".into(),
                reason: "partial sums come from different runs".into(),
            });
        }
        self.blocks += other.blocks;
        for (a, b) in self.sums.iter_mut().zip(&other.sums) {
            *a += b;
        }
        for (a, b) in self.cross.iter_mut().zip(&other.cross) {
            *a += b;
        }
        Ok(self)
    }

    pub fn is_complete(&self) -> bool {
        self.blocks == self.total_blocks
    }

    fn require_complete(&self) -> Result<()> {
        if !self.is_complete() {
            return Err(Error::InvalidParameter {
                name: "shards".into(),
                reason: format!("only {} of {} intervals covered", self.blocks, self.total_blocks),
            });
        }
        Ok(())
    }

    /// Mean of η for function i.
    pub fn mean(&self, i: usize) -> Result<Rational> {
        self.require_complete()?;
        Ok(Rational::new(
            self.sums[i].clone(),
            &self.dens[i] * BigInt::from(self.total_blocks),
        ))
    }

    /// Covar(η_i, η_j) over f ∈ M_n; every f in an interval shares its η.
    pub fn covariance(&self, i: usize, j: usize) -> Result<Rational> {
        self.require_complete()?;
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        let k = self.functions.len();
        let b = BigInt::from(self.total_blocks);
        let raw = Rational::new(self.cross[pair_index(k, i, j)].clone(), &b * &self.dens[i] * &self.dens[j]);
        Ok(raw - self.mean(i)? * self.mean(j)?)
    }

    pub fn stats(&self, i: usize) -> Result<EmpiricalStats> {
        Ok(EmpiricalStats {
            function: self.functions[i].clone(),
            q: self.q,
            n: self.n,
            h: self.h,
            mean: self.mean(i)?,
            variance: self.covariance(i, i)?,
            sample_space: (self.q as u64).pow(self.n as u32),
        })
    }
}

fn scaled_values(funcs: &[&FactorizationFunction], types: &[ExtFactType]) -> Result<(Vec<BigInt>, Vec<Vec<i128>>)> {
    let mut dens = Vec::new();
    let mut table = Vec::new();
    for f in funcs {
        let vals: Vec<Rational> = types.iter().map(|t| f.eval_type(t)).collect();
        let den = vals.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let ints = vals
            .iter()
            .map(|v| {
                (v.numer() * (&den / v.denom()))
                    .to_i128()
                    .ok_or_else(|| Error::Inconsistent("scaled value overflows i128".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        dens.push(den);
        table.push(ints);
    }
    Ok((dens, table))
}

fn check_interval(n: usize, h: usize) -> Result<()> {
    if n == 0 || h >= n {
        return Err(Error::IntervalRange { n, h });
    }
    Ok(())
}

/// Interval sums S_B (scaled) for each function over the shard's blocks,
/// reduced to Σ S_i and Σ S_i S_j.
pub fn partial_sums(
    funcs: &[&FactorizationFunction],
    q: u32,
    n: usize,
    h: usize,
    opts: &EnumerationOptions,
) -> Result<PartialSums> {
    check_interval(n, h)?;
    opts.validate()?;
    let field = FieldSpec::new(q)?;
    check_budget(field, n, opts.budget)?;
    let types = ExtFactType::all_of_degree(n);
    let (dens, vals) = scaled_values(funcs, &types)?;
    let k = funcs.len();
    let block = (q as u64).pow(h as u32 + 1);
    let total_blocks = field.pow(n) / block;
    let range = shard_range(total_blocks, opts.shards, opts.shard_index);

    // A single shard uses the sieve; a proper shard factors only its own slice.
    let block_ids: Box<dyn Fn(u64) -> Vec<u16> + Sync> = if opts.shards == 1 {
        let table = FactorTable::build(field, n);
        Box::new(move |b| {
            let start = (b * block) as usize;
            table.type_ids()[start..start + block as usize].to_vec()
        })
    } else {
        let lookup: std::collections::HashMap<ExtFactType, u16> =
            types.iter().enumerate().map(|(i, t)| (t.clone(), i as u16)).collect();
        Box::new(move |b| {
            (b * block..(b + 1) * block)
                .map(|idx| {
                    let f = Poly::monic_from_index(q, n, idx);
                    lookup[&factor(&f).expect("monic").ext_type]
                })
                .collect()
        })
    };

    let zero = || (vec![0i128; k], vec![0i128; k * (k + 1) / 2]);
    let (sums, cross) = range
        .clone()
        .into_par_iter()
        .map(|b| {
            let ids = block_ids(b);
            let s: Vec<i128> = (0..k).map(|i| ids.iter().map(|&id| vals[i][id as usize]).sum()).collect();
            let mut c = vec![0i128; k * (k + 1) / 2];
            for i in 0..k {
                for j in i..k {
                    c[pair_index(k, i, j)] = s[i] * s[j];
                }
            }
            (s, c)
        })
        .reduce(zero, |(mut s1, mut c1), (s2, c2)| {
            for (a, b) in s1.iter_mut().zip(s2) {
                *a += b;
            }
            for (a, b) in c1.iter_mut().zip(c2) {
                *a += b;
            }
            (s1, c1)
        });
    Ok(PartialSums {
        functions: funcs.iter().map(|f| f.name().to_string()).collect(),
        q,
        n,
        h,
        total_blocks,
        blocks: range.end - range.start,
        dens,
        sums: sums.into_iter().map(BigInt::from).collect(),
        cross: cross.into_iter().map(BigInt::from).collect(),
    })
}

/// Exact mean and variance of short-interval sums of a over M_n.
pub fn empirical_variance(
    a: &FactorizationFunction,
    q: u32,
    n: usize,
    h: usize,
    opts: &EnumerationOptions,
) -> Result<EmpiricalStats> {
    partial_sums(&[a], q, n, h, opts)?.stats(0)
}

/// Exact Covar(η_a, η_b) over M_n.
pub fn empirical_covariance(
    a: &FactorizationFunction,
    b: &FactorizationFunction,
    q: u32,
    n: usize,
    h: usize,
    opts: &EnumerationOptions,
) -> Result<Rational> {
    partial_sums(&[a, b], q, n, h, opts)?.covariance(0, 1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MomentReport {
    pub function: String,
    pub q: u32,
    pub n: usize,
    pub h: usize,
    pub k: u32,
    /// q^{−n} Σ_f η(f)^k
    #[serde(with = "serde_str")]
    pub raw_moment: Rational,
    /// raw_moment / q^{k(h+1)}
    #[serde(with = "serde_str")]
    pub normalized: Rational,
    /// (E_{f∈M_n} a)^k
    #[serde(with = "serde_str")]
    pub mean_power: Rational,
}

/// k-th raw moment of short-interval sums, normalized against (E a)^k.
pub fn empirical_moment(
    a: &FactorizationFunction,
    q: u32,
    n: usize,
    h: usize,
    k: u32,
    opts: &EnumerationOptions,
) -> Result<MomentReport> {
    check_interval(n, h)?;
    if k == 0 {
        return Err(Error::InvalidParameter {
            name: "k".into(),
            reason: "must be positive".into(),
        });
    }
    let field = FieldSpec::new(q)?;
    check_budget(field, n, opts.budget)?;
    let table = FactorTable::build(field, n);
    let (dens, vals) = scaled_values(&[a], table.types())?;
    let (den, vals) = (&dens[0], &vals[0]);
    let block = (q as usize).pow(h as u32 + 1);
    let power_sum: BigInt = table
        .type_ids()
        .par_chunks(block)
        .map(|ids| BigInt::from(ids.iter().map(|&id| vals[id as usize]).sum::<i128>()).pow(k))
        .reduce(BigInt::zero, |x, y| x + y);
    let blocks = BigInt::from(table.len() / block);
    let raw_moment = Rational::new(power_sum, blocks * den.pow(k));
    let qk = Rational::from_integer(BigInt::from(q).pow(k * (h as u32 + 1)));
    let total: BigInt = table.type_ids().iter().map(|&id| BigInt::from(vals[id as usize])).sum();
    let mean = Rational::new(total, den * BigInt::from(table.len()));
    Ok(MomentReport {
        function: a.name().to_string(),
        q,
        n,
        h,
        k,
        normalized: &raw_moment / &qk,
        raw_moment,
        mean_power: num_traits::pow::pow(mean, k as usize),
    })
}

/// |x| as f64, for reporting.
pub fn abs_f64(r: &Rational) -> f64 {
    r.abs().to_f64().unwrap_or(f64::NAN)
}
