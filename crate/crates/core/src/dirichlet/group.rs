use std::collections::HashMap;

use num_integer::Integer;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ffpoly::{FieldSpec, Poly};

const NOT_UNIT: u32 = u32::MAX;

/// Residues modulo T^M, encoded as base-q digit strings with the constant
/// term least significant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Residues {
    pub q: u32,
    pub m: usize,
}

impl Residues {
    pub fn count(self) -> usize {
        (self.q as usize).pow(self.m as u32)
    }

    pub fn decode(self, mut r: usize) -> Vec<u32> {
        let mut d = Vec::with_capacity(self.m);
        for _ in 0..self.m {
            d.push((r % self.q as usize) as u32);
            r /= self.q as usize;
        }
        d
    }

    pub fn encode(self, digits: &[u32]) -> usize {
        digits
            .iter()
            .take(self.m)
            .rev()
            .fold(0usize, |acc, &c| acc * self.q as usize + (c % self.q) as usize)
    }

    pub fn of_poly(self, f: &Poly) -> usize {
        self.encode(f.coeffs())
    }

    pub fn to_poly(self, r: usize) -> Poly {
        Poly::new(self.q, self.decode(r))
    }

    pub fn is_unit(self, r: usize) -> bool {
        r % self.q as usize != 0
    }

    pub fn mul(self, a: usize, b: usize) -> usize {
        let (x, y) = (self.decode(a), self.decode(b));
        let q = self.q as u64;
        let mut out = vec![0u64; self.m];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for (j, &yj) in y.iter().enumerate().take(self.m - i) {
                out[i + j] = (out[i + j] + xi as u64 * yj as u64) % q;
            }
        }
        let digits: Vec<u32> = out.into_iter().map(|c| c as u32).collect();
        self.encode(&digits)
    }

    pub fn pow(self, mut base: usize, mut e: u64) -> usize {
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn one(self) -> usize {
        if self.m == 0 {
            0
        } else {
            1
        }
    }

    /// Residue of the monic polynomial of degree n with the given index.
    pub fn of_monic_index(self, n: usize, index: u64) -> usize {
        let total = self.count() as u64;
        if n >= self.m {
            (index % total) as usize
        } else {
            (index + (self.q as u64).pow(n as u32)) as usize
        }
    }
}

/// (F_q[T]/T^M)^* as a product of cyclic groups, with a full discrete-log table.
#[derive(Clone, Debug, Serialize)]
pub struct UnitGroupDecomposition {
    q: u32,
    m: usize,
    generators: Vec<Poly>,
    orders: Vec<u64>,
    exponent: u64,
    #[serde(skip)]
    logs: Vec<u32>,
}

impl UnitGroupDecomposition {
    /// The scalars form one cyclic factor; the p-group 1 + T·F_q[T] is split
    /// greedily, each new generator having maximal order in the quotient by
    /// the span of the previous ones and then corrected to meet that span
    /// trivially.
    pub fn new(field: FieldSpec, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter {
                name: "M".into(),
                reason: "modulus T^M needs M >= 1".into(),
            });
        }
        let q = field.q();
        let res = Residues { q, m };
        let size = res.count();

        let root = field.primitive_root() as usize;
        let mut scalar_log = vec![NOT_UNIT; q as usize];
        let mut c = 1usize;
        for e in 0..q - 1 {
            scalar_log[c] = e;
            c = c * root % q as usize;
        }

        let u1: Vec<usize> = (0..size).filter(|r| r % q as usize == 1).collect();
        let mut span: HashMap<usize, Vec<u32>> = HashMap::from([(res.one(), Vec::new())]);
        let mut p_gens = Vec::new();
        let mut p_orders = Vec::new();
        while span.len() < u1.len() {
            let quotient_order = |x: usize| -> u64 {
                let (mut y, mut k) = (x, 1u64);
                while !span.contains_key(&y) {
                    y = res.pow(y, q as u64);
                    k *= q as u64;
                }
                k
            };
            let (ord, x) = u1
                .iter()
                .filter(|x| !span.contains_key(x))
                .map(|&x| (quotient_order(x), x))
                .max_by_key(|&(o, x)| (o, std::cmp::Reverse(x)))
                .expect("span is a proper subgroup");
            let y = res.pow(x, ord);
            let root_in_span = span
                .keys()
                .copied()
                .filter(|&h| res.pow(h, ord) == y)
                .min()
                .ok_or_else(|| Error::Inconsistent("greedy decomposition found no correction".into()))?;
            let g = res.mul(x, res.pow(root_in_span, u1.len() as u64 - 1));
            let old: Vec<(usize, Vec<u32>)> = span.drain().collect();
            let mut power = res.one();
            for e in 0..ord {
                for (el, v) in &old {
                    let mut w = v.clone();
                    w.push(e as u32);
                    span.insert(res.mul(*el, power), w);
                }
                power = res.mul(power, g);
            }
            if span.len() != old.len() * ord as usize || power != res.one() {
                return Err(Error::Inconsistent("cyclic factor overlaps its predecessors".into()));
            }
            p_gens.push(g);
            p_orders.push(ord);
        }

        let rank = 1 + p_gens.len();
        let mut logs = vec![NOT_UNIT; size * rank];
        for r in 0..size {
            if !res.is_unit(r) {
                continue;
            }
            let c0 = (r % q as usize) as u32;
            let inv = field.inv(c0);
            let digits: Vec<u32> = res.decode(r).iter().map(|&d| d * inv % q).collect();
            let u = res.encode(&digits);
            let v = &span[&u];
            logs[r * rank] = scalar_log[c0 as usize];
            for (i, &e) in v.iter().enumerate() {
                logs[r * rank + 1 + i] = e;
            }
        }

        let mut generators = vec![Poly::new(q, vec![root as u32])];
        generators.extend(p_gens.iter().map(|&g| res.to_poly(g)));
        let mut orders = vec![q as u64 - 1];
        orders.extend(p_orders);
        let exponent = orders.iter().fold(1u64, |a, &o| a.lcm(&o));
        let group = UnitGroupDecomposition {
            q,
            m,
            generators,
            orders,
            exponent,
            logs,
        };
        let phi = (q as u64 - 1) * (q as u64).pow(m as u32 - 1);
        if group.order() != phi {
            return Err(Error::Inconsistent(format!(
                "unit group order {} differs from {phi}",
                group.order()
            )));
        }
        Ok(group)
    }

    pub fn residues(&self) -> Residues {
        Residues { q: self.q, m: self.m }
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn modulus_exponent(&self) -> usize {
        self.m
    }

    pub fn generators(&self) -> &[Poly] {
        &self.generators
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    /// Least common multiple of the cyclic orders.
    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    /// Φ(T^M).
    pub fn order(&self) -> u64 {
        self.orders.iter().product()
    }

    /// Exponent vector of a residue, `None` for non-units.
    pub fn log(&self, r: usize) -> Option<&[u32]> {
        let rank = self.rank();
        let v = &self.logs[r * rank..(r + 1) * rank];
        (v[0] != NOT_UNIT).then_some(v)
    }

    pub fn log_poly(&self, f: &Poly) -> Option<Vec<u32>> {
        if f.q() != self.q {
            return None;
        }
        self.log(self.residues().of_poly(f)).map(|v| v.to_vec())
    }

    /// ∏ g_i^{e_i} mod T^M.
    pub fn element(&self, exps: &[u64]) -> Poly {
        let res = self.residues();
        let mut acc = res.one();
        for (g, &e) in self.generators.iter().zip(exps) {
            acc = res.mul(acc, res.pow(res.of_poly(g), e));
        }
        res.to_poly(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders_multiply_to_phi() {
        for (q, m) in [(2u32, 1usize), (2, 4), (2, 6), (3, 1), (3, 4), (5, 5), (7, 3)] {
            let g = UnitGroupDecomposition::new(FieldSpec::new(q).unwrap(), m).unwrap();
            assert_eq!(g.order(), (q as u64 - 1) * (q as u64).pow(m as u32 - 1));
        }
        let g = UnitGroupDecomposition::new(FieldSpec::new(3).unwrap(), 1).unwrap();
        assert_eq!(g.orders(), &[2]);
    }

    #[test]
    fn log_round_trip() {
        for (q, m) in [(2u32, 5usize), (3, 4), (5, 3)] {
            let g = UnitGroupDecomposition::new(FieldSpec::new(q).unwrap(), m).unwrap();
            let res = g.residues();
            let mut seen = std::collections::HashSet::new();
            for r in 0..res.count() {
                match g.log(r) {
                    None => assert!(!res.is_unit(r)),
                    Some(v) => {
                        let exps: Vec<u64> = v.iter().map(|&e| e as u64).collect();
                        for (e, o) in exps.iter().zip(g.orders()) {
                            assert!(e < o);
                        }
                        assert!(seen.insert(exps.clone()));
                        assert_eq!(res.of_poly(&g.element(&exps)), r);
                    }
                }
            }
            assert_eq!(seen.len() as u64, g.order());
        }
    }

    #[test]
    fn generator_orders_are_exact() {
        let g = UnitGroupDecomposition::new(FieldSpec::new(2).unwrap(), 6).unwrap();
        let res = g.residues();
        for (gen, &o) in g.generators().iter().zip(g.orders()) {
            let r = res.of_poly(gen);
            assert_eq!(res.pow(r, o), res.one());
            for d in 1..o {
                if o % d == 0 {
                    assert_ne!(res.pow(r, d), res.one());
                }
            }
        }
    }

    #[test]
    fn residue_of_monic_index() {
        let res = Residues { q: 3, m: 2 };
        // T + 2 has degree 1 < 2: residue digits [2, 1]
        assert_eq!(res.of_monic_index(1, 2), 2 + 3);
        // T^3 + T + 2 reduces to T + 2
        assert_eq!(res.of_monic_index(3, 2 + 3), 5);
    }
}
