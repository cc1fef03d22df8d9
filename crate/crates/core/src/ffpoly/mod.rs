//! Polynomials over prime fields F_q: arithmetic, enumeration of monics,
//! factorization, short intervals and the coefficient-reversal involution.

mod factor;
mod table;

pub use factor::{factor, factorization_type, irreducibles, is_squarefree, necklace_count, ExtFactType, FactType, Factorization};
pub use table::FactorTable;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    q: u32,
}

impl FieldSpec {
    pub fn new(q: u32) -> Result<Self> {
        if !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        Ok(FieldSpec { q })
    }

    pub fn q(self) -> u32 {
        self.q
    }

    pub fn inv(self, a: u32) -> u32 {
        debug_assert!(a % self.q != 0);
        pow_mod(a as u64, self.q as u64 - 2, self.q as u64) as u32
    }

    /// q^n as u64.
    pub fn pow(self, n: usize) -> u64 {
        (self.q as u64).pow(n as u32)
    }

    /// A generator of F_q^*.
    pub fn primitive_root(self) -> u32 {
        if self.q == 2 {
            return 1;
        }
        let order = self.q as u64 - 1;
        let factors = prime_factors(order);
        (2..self.q)
            .find(|&g| {
                factors
                    .iter()
                    .all(|&p| pow_mod(g as u64, order / p, self.q as u64) != 1)
            })
            .expect("F_q^* is cyclic")
    }
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

/// A polynomial over F_q, constant term first, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Poly {
    q: u32,
    coeffs: Vec<u32>,
}

impl Poly {
    pub fn new(q: u32, coeffs: Vec<u32>) -> Self {
        let mut p = Poly {
            q,
            coeffs: coeffs.into_iter().map(|c| c % q).collect(),
        };
        p.trim();
        p
    }

    pub fn zero(q: u32) -> Self {
        Poly { q, coeffs: Vec::new() }
    }

    pub fn one(q: u32) -> Self {
        Poly { q, coeffs: vec![1] }
    }

    /// c·T^k
    pub fn monomial(q: u32, c: u32, k: usize) -> Self {
        let mut coeffs = vec![0; k + 1];
        coeffs[k] = c;
        Poly::new(q, coeffs)
    }

    /// The monic polynomial of degree n whose lower coefficients are the
    /// base-q digits of `index`, constant term least significant.
    pub fn monic_from_index(q: u32, n: usize, mut index: u64) -> Self {
        let mut coeffs = Vec::with_capacity(n + 1);
        for _ in 0..n {
            coeffs.push((index % q as u64) as u32);
            index /= q as u64;
        }
        coeffs.push(1);
        Poly { q, coeffs }
    }

    /// Inverse of [`Poly::monic_from_index`]; `None` unless monic.
    pub fn monic_index(&self) -> Option<u64> {
        if !self.is_monic() {
            return None;
        }
        let n = self.coeffs.len() - 1;
        Some(low_index(self.q, &self.coeffs[..n]))
    }

    fn trim(&mut self) {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> u32 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    /// `None` for the zero polynomial (degree −∞).
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> u32 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == 1
    }

    pub fn constant_term(&self) -> u32 {
        self.coeff(0)
    }

    fn check_field(&self, other: &Poly) {
        assert_eq!(self.q, other.q, "polynomials over different fields");
    }

    pub fn add(&self, other: &Poly) -> Poly {
        self.check_field(other);
        let q = self.q;
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len).map(|i| (self.coeff(i) + other.coeff(i)) % q).collect();
        Poly::new(q, coeffs)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.check_field(other);
        let q = self.q;
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|i| (self.coeff(i) + q - other.coeff(i)) % q)
            .collect();
        Poly::new(q, coeffs)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        self.check_field(other);
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.q);
        }
        let q = self.q as u64;
        let mut out = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = (out[i + j] + a as u64 * b as u64) % q;
            }
        }
        Poly::new(self.q, out.into_iter().map(|c| c as u32).collect())
    }

    pub fn scale(&self, c: u32) -> Poly {
        let q = self.q as u64;
        Poly::new(
            self.q,
            self.coeffs.iter().map(|&a| (a as u64 * c as u64 % q) as u32).collect(),
        )
    }

    pub fn make_monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let field = FieldSpec { q: self.q };
        self.scale(field.inv(self.leading()))
    }

    /// Quotient and remainder; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        self.check_field(divisor);
        let dd = divisor.degree().expect("division by zero polynomial");
        let q = self.q as u64;
        let inv = FieldSpec { q: self.q }.inv(divisor.leading()) as u64;
        let mut rem: Vec<u64> = self.coeffs.iter().map(|&c| c as u64).collect();
        if rem.len() <= dd {
            return (Poly::zero(self.q), self.clone());
        }
        let mut quot = vec![0u64; rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = rem[k + dd] * inv % q;
            quot[k] = c;
            if c == 0 {
                continue;
            }
            for (j, &d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] = (rem[k + j] + q * q - c * d as u64) % q;
            }
        }
        rem.truncate(dd);
        (
            Poly::new(self.q, quot.into_iter().map(|c| c as u32).collect()),
            Poly::new(self.q, rem.into_iter().map(|c| c as u32).collect()),
        )
    }

    /// Monic gcd (zero if both are zero).
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.make_monic()
    }

    pub fn derivative(&self) -> Poly {
        let q = self.q as u64;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| (i as u64 % q * c as u64 % q) as u32)
            .collect();
        Poly::new(self.q, coeffs)
    }

    pub fn pow(&self, e: usize) -> Poly {
        (0..e).fold(Poly::one(self.q), |acc, _| acc.mul(self))
    }

    /// Coefficient reversal at the polynomial's own degree.
    pub fn star(&self) -> Result<Poly> {
        if self.is_zero() || self.constant_term() == 0 {
            return Err(Error::ZeroConstantTerm);
        }
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        Ok(Poly::new(self.q, coeffs))
    }

    /// Reduction modulo T^m.
    pub fn mod_t_power(&self, m: usize) -> Poly {
        Poly::new(self.q, self.coeffs.iter().take(m).copied().collect())
    }

    /// The short interval I(f;h) = {g monic : deg(f − g) ≤ h}, for 0 ≤ h < deg f.
    pub fn interval(&self, h: usize) -> Result<impl Iterator<Item = Poly> + '_> {
        let n = self.degree().unwrap_or(0);
        if !self.is_monic() || h >= n {
            return Err(Error::IntervalRange { n, h });
        }
        let q = self.q;
        let count = (q as u64).pow(h as u32 + 1);
        Ok((0..count).map(move |mut idx| {
            let mut coeffs = self.coeffs.clone();
            for c in coeffs.iter_mut().take(h + 1) {
                *c = (idx % q as u64) as u32;
                idx /= q as u64;
            }
            Poly::new(q, coeffs)
        }))
    }
}

pub(crate) fn low_index(q: u32, digits: &[u32]) -> u64 {
    digits
        .iter()
        .rev()
        .fold(0u64, |acc, &c| acc * q as u64 + c as u64)
}

/// Monic polynomials of degree n in lexicographic order, constant term fastest.
pub fn enumerate_monics(field: FieldSpec, n: usize) -> impl Iterator<Item = Poly> {
    let q = field.q();
    (0..field.pow(n)).map(move |i| Poly::monic_from_index(q, n, i))
}

/// Half-open index range of shard `index` out of `shards` over `total` items.
pub fn shard_range(total: u64, shards: u64, index: u64) -> std::ops::Range<u64> {
    assert!(shards >= 1 && index < shards, "bad shard spec");
    let start = total * index / shards;
    let end = total * (index + 1) / shards;
    start..end
}

/// Monic polynomials of degree n whose index falls in the given shard.
pub fn enumerate_monics_shard(
    field: FieldSpec,
    n: usize,
    shards: u64,
    index: u64,
) -> impl Iterator<Item = Poly> {
    let q = field.q();
    shard_range(field.pow(n), shards, index).map(move |i| Poly::monic_from_index(q, n, i))
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q={}:[", self.q)?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

impl FromStr for Poly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad polynomial `{s}`, expected e.g. q=3:[2,0,1]"));
        let rest = s.trim().strip_prefix("q=").ok_or_else(bad)?;
        let (q, body) = rest.split_once(':').ok_or_else(bad)?;
        let q: u32 = q.trim().parse().map_err(|_| bad())?;
        FieldSpec::new(q)?;
        let body = body
            .trim()
            .strip_prefix('[')
            .and_then(|b| b.strip_suffix(']'))
            .ok_or_else(bad)?;
        let coeffs = if body.trim().is_empty() {
            Vec::new()
        } else {
            body.split(',')
                .map(|c| c.trim().parse::<u32>().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()?
        };
        if coeffs.iter().any(|&c| c >= q) {
            return Err(bad());
        }
        Ok(Poly::new(q, coeffs))
    }
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn poly(q: u32, c: &[u32]) -> Poly {
        Poly::new(q, c.to_vec())
    }

    #[test]
    fn field_construction() {
        assert!(FieldSpec::new(5).is_ok());
        assert!(matches!(FieldSpec::new(9), Err(Error::NotPrime(9))));
        assert!(FieldSpec::new(1).is_err());
        assert_eq!(FieldSpec::new(7).unwrap().primitive_root(), 3);
    }

    #[test]
    fn monic_enumeration() {
        let f2 = FieldSpec::new(2).unwrap();
        let all: Vec<Poly> = enumerate_monics(f2, 2).collect();
        assert_eq!(
            all,
            vec![poly(2, &[0, 0, 1]), poly(2, &[1, 0, 1]), poly(2, &[0, 1, 1]), poly(2, &[1, 1, 1])]
        );
        assert_eq!(enumerate_monics(FieldSpec::new(5).unwrap(), 5).count(), 3125);
        let f3 = FieldSpec::new(3).unwrap();
        assert_eq!(enumerate_monics(f3, 0).collect::<Vec<_>>(), vec![Poly::one(3)]);
        for (i, f) in enumerate_monics(f3, 3).enumerate() {
            assert_eq!(f.monic_index(), Some(i as u64));
        }
    }

    #[test]
    fn shards_cover_everything_once() {
        let f3 = FieldSpec::new(3).unwrap();
        let mut joined = Vec::new();
        for s in 0..4 {
            joined.extend(enumerate_monics_shard(f3, 4, 4, s));
        }
        assert_eq!(joined, enumerate_monics(f3, 4).collect::<Vec<_>>());
    }

    #[test]
    fn text_format() {
        let f = poly(3, &[2, 0, 1]);
        assert_eq!(f.to_string(), "q=3:[2,0,1]");
        assert_eq!("q=3:[2,0,1]".parse::<Poly>().unwrap(), f);
        assert!("q=4:[1]".parse::<Poly>().is_err());
        assert!("q=3:[3]".parse::<Poly>().is_err());
        assert!("3:[1]".parse::<Poly>().is_err());
    }

    #[test]
    fn star_examples() {
        assert_eq!(poly(3, &[2, 0, 1]).star().unwrap(), poly(3, &[1, 0, 2]));
        assert!(matches!(poly(3, &[0, 1]).star(), Err(Error::ZeroConstantTerm)));
    }

    #[test]
    fn star_is_multiplicative() {
        let f3 = FieldSpec::new(3).unwrap();
        let mut polys = Vec::new();
        for d in 0..=3 {
            for c in 1..3 {
                for f in enumerate_monics(f3, d) {
                    let g = f.scale(c);
                    if g.constant_term() != 0 {
                        polys.push(g);
                    }
                }
            }
        }
        for f in &polys {
            assert_eq!(&f.star().unwrap().star().unwrap(), f);
            for g in &polys {
                let lhs = f.mul(g).star().unwrap();
                let rhs = f.star().unwrap().mul(&g.star().unwrap());
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn interval_properties() {
        let f3 = FieldSpec::new(3).unwrap();
        let n = 3;
        let monics: Vec<Poly> = enumerate_monics(f3, n).collect();
        for h in 0..n {
            for f in &monics {
                let members: Vec<Poly> = f.interval(h).unwrap().collect();
                assert_eq!(members.len(), 3usize.pow(h as u32 + 1));
                assert!(members.contains(f));
                for g in &members {
                    let d = f.sub(g).degree();
                    assert!(d.map_or(true, |d| d <= h));
                    assert!(g.interval(h).unwrap().any(|x| &x == f));
                }
            }
        }
        assert!(matches!(
            monics[0].interval(3),
            Err(Error::IntervalRange { n: 3, h: 3 })
        ));
    }

    #[test]
    fn short_interval_is_congruence_after_star() {
        let f3 = FieldSpec::new(3).unwrap();
        for n in 1..=4 {
            let mut polys = Vec::new();
            for c in 1..3 {
                for f in enumerate_monics(f3, n) {
                    let g = f.scale(c);
                    if g.constant_term() != 0 {
                        polys.push(g);
                    }
                }
            }
            for h in 0..n {
                for a in &polys {
                    for b in &polys {
                        let close = a.sub(b).degree().map_or(true, |d| d <= h);
                        let diff = a.star().unwrap().sub(&b.star().unwrap());
                        let congruent = diff.mod_t_power(n - h).is_zero();
                        assert_eq!(close, congruent);
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn div_rem_reconstructs(a in proptest::collection::vec(0u32..5, 0..8),
                                b in proptest::collection::vec(0u32..5, 1..5)) {
            let a = Poly::new(5, a);
            let b = Poly::new(5, b);
            prop_assume!(!b.is_zero());
            let (quot, rem) = a.div_rem(&b);
            prop_assert_eq!(quot.mul(&b).add(&rem), a);
            prop_assert!(rem.degree().map_or(true, |d| d < b.degree().unwrap()));
        }

        #[test]
        fn text_round_trip(c in proptest::collection::vec(0u32..7, 0..8)) {
            let f = Poly::new(7, c);
            prop_assert_eq!(f.to_string().parse::<Poly>().unwrap(), f);
        }
    }
}
