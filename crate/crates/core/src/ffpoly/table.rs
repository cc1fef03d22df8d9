use std::collections::HashMap;
use std::sync::atomic::{AtomicU16, Ordering};

use rayon::prelude::*;

use super::factor::{irreducibles, necklace_count, ExtFactType};
use super::{FieldSpec, Poly};

const UNSET: u16 = u16::MAX;

/// Extended factorization type of every monic polynomial of degree n,
/// indexed like [`Poly::monic_from_index`].
///
/// Built by multiplying out every multiset of primes of degree < n whose
/// degrees sum to n; the indices never reached are the degree-n primes.
/// Each polynomial of M_n is therefore visited exactly once.
#[derive(Clone, Debug)]
pub struct FactorTable {
    q: u32,
    n: usize,
    types: Vec<ExtFactType>,
    ids: Vec<u16>,
}

impl FactorTable {
    pub fn build(field: FieldSpec, n: usize) -> Self {
        let q = field.q();
        let types = ExtFactType::all_of_degree(n);
        assert!(types.len() < UNSET as usize, "too many factorization types");
        let lookup: HashMap<ExtFactType, u16> = types
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u16))
            .collect();
        if n == 0 {
            return FactorTable { q, n, types, ids: vec![0] };
        }

        let mut primes: Vec<(Poly, usize)> = Vec::new();
        for d in 1..n {
            primes.extend(irreducibles(field, d).iter().map(|p| (p.clone(), d)));
        }
        let cells: Vec<AtomicU16> = (0..field.pow(n)).map(|_| AtomicU16::new(UNSET)).collect();
        let ctx = Ctx {
            n,
            primes: &primes,
            lookup: &lookup,
            cells: &cells,
        };
        (0..primes.len()).into_par_iter().for_each(|i| {
            let mut pairs = Vec::new();
            ctx.extend_with(i, &Poly::one(q), 0, &mut pairs);
        });

        let prime_id = lookup[&ExtFactType::new(vec![(n, 1)])];
        let mut unset = 0u64;
        let ids: Vec<u16> = cells
            .into_iter()
            .map(|c| {
                let v = c.into_inner();
                if v == UNSET {
                    unset += 1;
                    prime_id
                } else {
                    v
                }
            })
            .collect();
        assert_eq!(unset, necklace_count(q as u64, n), "sieve missed a composite");
        FactorTable { q, n, types, ids }
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Every extended type of degree n; ids index into this slice.
    pub fn types(&self) -> &[ExtFactType] {
        &self.types
    }

    pub fn type_ids(&self) -> &[u16] {
        &self.ids
    }

    pub fn type_id(&self, index: u64) -> u16 {
        self.ids[index as usize]
    }

    pub fn ext_type(&self, index: u64) -> &ExtFactType {
        &self.types[self.ids[index as usize] as usize]
    }

    /// Number of polynomials of each type, indexed by type id.
    pub fn counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.types.len()];
        for &id in &self.ids {
            counts[id as usize] += 1;
        }
        counts
    }
}

struct Ctx<'a> {
    n: usize,
    primes: &'a [(Poly, usize)],
    lookup: &'a HashMap<ExtFactType, u16>,
    cells: &'a [AtomicU16],
}

impl Ctx<'_> {
    // Multiplies `base` by powers of prime i, then recurses into primes > i.
    fn extend_with(&self, i: usize, base: &Poly, deg: usize, pairs: &mut Vec<(usize, usize)>) {
        let (p, d) = &self.primes[i];
        let mut power = base.clone();
        let mut e = 0;
        loop {
            e += 1;
            let total = deg + d * e;
            if total > self.n {
                break;
            }
            power = power.mul(p);
            pairs.push((*d, e));
            if total == self.n {
                let id = self.lookup[&ExtFactType::new(pairs.clone())];
                let idx = power.monic_index().unwrap() as usize;
                self.cells[idx].store(id, Ordering::Relaxed);
            } else {
                for j in i + 1..self.primes.len() {
                    if total + self.primes[j].1 > self.n {
                        break;
                    }
                    self.extend_with(j, &power, total, pairs);
                }
            }
            pairs.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffpoly::{enumerate_monics, factor};

    #[test]
    fn table_matches_trial_division() {
        for (q, n) in [(2u32, 1usize), (2, 6), (3, 4), (5, 3), (7, 3)] {
            let field = FieldSpec::new(q).unwrap();
            let table = FactorTable::build(field, n);
            assert_eq!(table.len() as u64, field.pow(n));
            for (i, f) in enumerate_monics(field, n).enumerate() {
                assert_eq!(table.ext_type(i as u64), &factor(&f).unwrap().ext_type, "{f}");
            }
        }
    }

    #[test]
    fn degree_zero_table() {
        let table = FactorTable::build(FieldSpec::new(3).unwrap(), 0);
        assert_eq!(table.len(), 1);
        assert_eq!(table.ext_type(0).pairs(), &[]);
    }

    #[test]
    fn squarefree_count_from_table() {
        let field = FieldSpec::new(5).unwrap();
        let table = FactorTable::build(field, 4);
        let counts = table.counts();
        let sf: u64 = table
            .types()
            .iter()
            .zip(&counts)
            .filter(|(t, _)| t.is_squarefree())
            .map(|(_, c)| c)
            .sum();
        assert_eq!(sf, 625 - 125);
    }
}
