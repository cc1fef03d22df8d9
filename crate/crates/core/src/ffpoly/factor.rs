use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use super::{enumerate_monics, FieldSpec, Poly};
use crate::error::{Error, Result};
use crate::partitions::Partition;

/// Multiset of (degree, exponent) pairs of a prime factorization, sorted by
/// degree then exponent, both descending.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
pub struct ExtFactType {
    pairs: Vec<(usize, usize)>,
}

impl ExtFactType {
    pub fn new(mut pairs: Vec<(usize, usize)>) -> Self {
        assert!(pairs.iter().all(|&(m, e)| m >= 1 && e >= 1));
        pairs.sort_unstable_by(|a, b| b.cmp(a));
        ExtFactType { pairs }
    }

    /// The type of a squarefree polynomial with factorization type λ.
    pub fn squarefree(lambda: &Partition) -> Self {
        ExtFactType::new(lambda.parts().iter().map(|&m| (m, 1)).collect())
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn degree(&self) -> usize {
        self.pairs.iter().map(|&(m, e)| m * e).sum()
    }

    pub fn is_squarefree(&self) -> bool {
        self.pairs.iter().all(|&(_, e)| e == 1)
    }

    /// ω: the number of distinct prime factors.
    pub fn distinct_primes(&self) -> usize {
        self.pairs.len()
    }

    pub fn fact_type(&self) -> FactType {
        if self.is_squarefree() {
            FactType::Squarefree(Partition::from_unsorted(
                self.pairs.iter().map(|&(m, _)| m).collect(),
            ))
        } else {
            FactType::Squareful
        }
    }

    /// Every extended type of the given degree.
    pub fn all_of_degree(n: usize) -> Vec<ExtFactType> {
        // (m, e) blocks of size m·e, chosen as a multiset
        let mut blocks = Vec::new();
        for m in 1..=n.max(1) {
            for e in 1..=n / m {
                blocks.push((m, e));
            }
        }
        blocks.sort_unstable_by(|a, b| b.cmp(a));
        let mut out = Vec::new();
        fn go(
            blocks: &[(usize, usize)],
            start: usize,
            remaining: usize,
            cur: &mut Vec<(usize, usize)>,
            out: &mut Vec<ExtFactType>,
        ) {
            if remaining == 0 {
                out.push(ExtFactType::new(cur.clone()));
                return;
            }
            for i in start..blocks.len() {
                let (m, e) = blocks[i];
                if m * e <= remaining {
                    cur.push((m, e));
                    go(blocks, i, remaining - m * e, cur, out);
                    cur.pop();
                }
            }
        }
        go(&blocks, 0, n, &mut Vec::new(), &mut out);
        out.sort();
        out
    }
}

impl fmt::Display for ExtFactType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (m, e)) in self.pairs.iter().enumerate() {
            if i > 0 {
                write!(f, ";")?;
            }
            write!(f, "{m},{e}")?;
        }
        write!(f, "}}")
    }
}

/// τ_f: a partition for squarefree f, the empty marker otherwise.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FactType {
    Squarefree(Partition),
    Squareful,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub q: u32,
    /// Leading coefficient of the input.
    pub unit: u32,
    /// Monic primes with exponents, ordered by (degree, index).
    pub factors: Vec<(Poly, usize)>,
    pub ext_type: ExtFactType,
}

impl Factorization {
    pub fn product(&self) -> Poly {
        let q = self.q;
        self.factors
            .iter()
            .fold(Poly::new(q, vec![self.unit]), |acc, (p, e)| acc.mul(&p.pow(*e)))
    }
}

type IrredCache = RwLock<HashMap<(u32, usize), Arc<Vec<Poly>>>>;

fn irred_cache() -> &'static IrredCache {
    static CACHE: OnceLock<IrredCache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// (1/d) Σ_{e|d} μ(e) q^{d/e}.
pub fn necklace_count(q: u64, d: usize) -> u64 {
    let mut total: i128 = 0;
    for e in 1..=d {
        if d % e == 0 {
            total += mobius(e) as i128 * (q as i128).pow((d / e) as u32);
        }
    }
    (total / d as i128) as u64
}

fn mobius(mut n: usize) -> i64 {
    let mut sign = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

/// All monic irreducibles of degree d, in index order. Cached per (q, d).
///
/// Sieve: every reducible monic of degree d is P·g with P irreducible of
/// degree ≤ d/2, so marking those products leaves exactly the primes.
pub fn irreducibles(field: FieldSpec, d: usize) -> Arc<Vec<Poly>> {
    assert!(d >= 1, "irreducibles need d >= 1");
    let q = field.q();
    if let Some(v) = irred_cache().read().unwrap().get(&(q, d)) {
        return v.clone();
    }
    let total = field.pow(d) as usize;
    let mut composite = vec![false; total];
    for e in 1..=d / 2 {
        let small = irreducibles(field, e);
        for p in small.iter() {
            for g in enumerate_monics(field, d - e) {
                let idx = p.mul(&g).monic_index().unwrap() as usize;
                composite[idx] = true;
            }
        }
    }
    let primes: Vec<Poly> = composite
        .iter()
        .enumerate()
        .filter(|(_, &c)| !c)
        .map(|(i, _)| Poly::monic_from_index(q, d, i as u64))
        .collect();
    assert_eq!(
        primes.len() as u64,
        necklace_count(q as u64, d),
        "irreducible count for q={q}, d={d}"
    );
    let primes = Arc::new(primes);
    irred_cache()
        .write()
        .unwrap()
        .entry((q, d))
        .or_insert_with(|| primes.clone())
        .clone()
}

/// Complete factorization by trial division; non-monic input is first
/// normalized by its leading coefficient.
pub fn factor(f: &Poly) -> Result<Factorization> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let field = FieldSpec::new(f.q())?;
    let unit = f.leading();
    let mut rest = f.make_monic();
    let mut factors = Vec::new();
    let mut d = 1;
    while rest.degree().unwrap() >= 2 * d {
        for p in irreducibles(field, d).iter() {
            let mut e = 0;
            loop {
                let (quot, rem) = rest.div_rem(p);
                if !rem.is_zero() {
                    break;
                }
                rest = quot;
                e += 1;
            }
            if e > 0 {
                factors.push((p.clone(), e));
            }
        }
        d += 1;
    }
    if rest.degree().unwrap() > 0 {
        factors.push((rest, 1));
    }
    factors.sort_by(|(a, _), (b, _)| {
        (a.degree(), a.monic_index()).cmp(&(b.degree(), b.monic_index()))
    });
    let ext_type = ExtFactType::new(
        factors
            .iter()
            .map(|(p, e)| (p.degree().unwrap(), *e))
            .collect(),
    );
    Ok(Factorization {
        q: f.q(),
        unit,
        factors,
        ext_type,
    })
}

pub fn factorization_type(f: &Poly) -> Result<FactType> {
    Ok(factor(f)?.ext_type.fact_type())
}

/// Decided from the factorization and cross-checked against gcd(f, f′) = 1.
pub fn is_squarefree(f: &Poly) -> Result<bool> {
    let by_factor = factor(f)?.ext_type.is_squarefree();
    let by_gcd = f.gcd(&f.derivative()).degree() == Some(0);
    if by_factor != by_gcd {
        return Err(Error::Inconsistent(format!(
            "squarefree test disagrees on {f}"
        )));
    }
    Ok(by_factor)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(q: u32, c: &[u32]) -> Poly {
        Poly::new(q, c.to_vec())
    }

    fn f(q: u32) -> FieldSpec {
        FieldSpec::new(q).unwrap()
    }

    #[test]
    fn irreducible_examples() {
        assert_eq!(*irreducibles(f(2), 2), vec![poly(2, &[1, 1, 1])]);
        assert_eq!(irreducibles(f(2), 3).len(), 2);
        assert_eq!(irreducibles(f(3), 1).len(), 3);
        // root test oracle
        for q in [2u32, 3, 5] {
            for d in 2..=3 {
                let expected: Vec<Poly> = enumerate_monics(f(q), d)
                    .filter(|p| {
                        (0..q).all(|x| {
                            p.coeffs()
                                .iter()
                                .rev()
                                .fold(0u64, |acc, &c| (acc * x as u64 + c as u64) % q as u64)
                                != 0
                        })
                    })
                    .collect();
                assert_eq!(*irreducibles(f(q), d), expected);
            }
        }
    }

    #[test]
    fn factor_examples() {
        let t2t = factor(&poly(2, &[0, 1, 1])).unwrap();
        assert_eq!(t2t.ext_type, ExtFactType::new(vec![(1, 1), (1, 1)]));
        assert_eq!(
            factor(&poly(2, &[0, 0, 1])).unwrap().ext_type,
            ExtFactType::new(vec![(1, 2)])
        );
        assert_eq!(
            factor(&poly(2, &[1, 1, 1])).unwrap().ext_type,
            ExtFactType::new(vec![(2, 1)])
        );
        assert!(matches!(factor(&Poly::zero(3)), Err(Error::ZeroPolynomial)));
    }

    #[test]
    fn non_monic_is_normalized() {
        let g = poly(5, &[1, 2, 3]);
        let fac = factor(&g).unwrap();
        assert_eq!(fac.unit, 3);
        assert_eq!(fac.product(), g);
        assert_eq!(fac.ext_type, factor(&g.make_monic()).unwrap().ext_type);
    }

    #[test]
    fn factor_round_trip() {
        for q in [2u32, 3, 5] {
            for n in 1..=6 {
                if q == 5 && n > 5 {
                    continue;
                }
                for g in enumerate_monics(f(q), n) {
                    let fac = factor(&g).unwrap();
                    assert_eq!(fac.product(), g);
                    assert_eq!(fac.ext_type.degree(), n);
                }
            }
        }
    }

    #[test]
    fn factorization_type_examples() {
        assert_eq!(factorization_type(&poly(3, &[0, 0, 1])).unwrap(), FactType::Squareful);
        for g in enumerate_monics(f(3), 4) {
            if let FactType::Squarefree(lam) = factorization_type(&g).unwrap() {
                assert_eq!(lam.weight(), 4);
            }
        }
    }

    #[test]
    fn star_preserves_type() {
        for n in 1..=4 {
            for g in enumerate_monics(f(3), n) {
                if g.constant_term() == 0 {
                    continue;
                }
                let s = g.star().unwrap();
                assert_eq!(factorization_type(&g).unwrap(), factorization_type(&s).unwrap());
            }
        }
    }

    #[test]
    fn squarefree_examples_and_density() {
        assert!(is_squarefree(&poly(2, &[0, 1, 1])).unwrap());
        assert!(!is_squarefree(&poly(2, &[0, 0, 1])).unwrap());
        for q in [2u32, 3, 5] {
            for n in 2..=6 {
                if q == 5 && n == 6 {
                    continue;
                }
                let count = enumerate_monics(f(q), n)
                    .filter(|g| is_squarefree(g).unwrap())
                    .count() as u64;
                let qq = q as u64;
                assert_eq!(count, qq.pow(n as u32) - qq.pow(n as u32 - 1), "q={q} n={n}");
            }
        }
    }

    #[test]
    fn types_of_degree() {
        // p(n) squarefree types among the extended ones
        let all = ExtFactType::all_of_degree(4);
        assert_eq!(all.iter().filter(|t| t.is_squarefree()).count(), 5);
        assert!(all.iter().all(|t| t.degree() == 4));
        assert!(all.contains(&ExtFactType::new(vec![(1, 2), (1, 1), (1, 1)])));
        assert!(all.contains(&ExtFactType::new(vec![(1, 4)])));
    }

    #[test]
    fn necklaces() {
        assert_eq!(necklace_count(2, 3), 2);
        assert_eq!(necklace_count(5, 8), 48750);
    }
}
