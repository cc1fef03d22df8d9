use std::f64::consts::TAU;
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::group::{Residues, UnitGroupDecomposition};
use crate::error::{Error, Result};
use crate::ffpoly::{FactorTable, FieldSpec};
use crate::rational::Rational;

pub(crate) const NOT_UNIT: u32 = u32::MAX;

/// χ(g_i) = e^{2πi a_i / o_i} on the cyclic generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DirichletCharacter {
    pub exps: Vec<u64>,
    pub is_trivial: bool,
    pub is_even: bool,
    pub is_primitive: bool,
    pub is_real: bool,
}

impl DirichletCharacter {
    /// Unclassified character with the given exponent vector.
    fn raw(exps: Vec<u64>) -> Self {
        DirichletCharacter {
            exps,
            is_trivial: false,
            is_even: false,
            is_primitive: false,
            is_real: false,
        }
    }

    /// Numerator t·L of the rotation χ(r) = e^{2πi t}, L the group exponent.
    pub fn rotation(&self, group: &UnitGroupDecomposition, r: usize) -> Option<u64> {
        let log = group.log(r)?;
        let l = group.exponent();
        let mut acc = 0u64;
        for ((&a, &e), &o) in self.exps.iter().zip(log).zip(group.orders()) {
            acc = (acc + a * e as u64 % o * (l / o)) % l;
        }
        Some(acc)
    }

    /// The rotation t ∈ [0, 1) with χ(r) = e^{2πi t}; `None` when T | r.
    pub fn value(&self, group: &UnitGroupDecomposition, r: usize) -> Option<Rational> {
        self.rotation(group, r).map(|k| {
            Rational::new(BigInt::from(k), BigInt::from(group.exponent()))
        })
    }

    /// Rotation numerators for every residue, [`NOT_UNIT`] on non-units.
    pub fn rotations(&self, group: &UnitGroupDecomposition) -> Vec<u32> {
        (0..group.residues().count())
            .map(|r| self.rotation(group, r).map_or(NOT_UNIT, |k| k as u32))
            .collect()
    }

    /// χ·ψ
    pub fn product(&self, other: &Self, group: &UnitGroupDecomposition) -> Vec<u64> {
        self.exps
            .iter()
            .zip(&other.exps)
            .zip(group.orders())
            .map(|((a, b), o)| (a + b) % o)
            .collect()
    }

    fn classify(mut self, group: &UnitGroupDecomposition) -> Self {
        let res = group.residues();
        let q = res.q as usize;
        let l = group.exponent();
        self.is_trivial = self.exps.iter().all(|&a| a == 0);
        self.is_even = (1..q).all(|c| self.rotation(group, c) == Some(0));
        self.is_primitive = if res.m == 1 {
            !self.is_trivial
        } else {
            let step = q.pow(res.m as u32 - 1);
            (1..q).any(|c| self.rotation(group, 1 + c * step) != Some(0))
        };
        self.is_real = (0..res.count())
            .filter_map(|r| self.rotation(group, r))
            .all(|k| (2 * k) % l == 0);
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyCounts {
    pub total: u64,
    pub primitive: u64,
    pub even: u64,
    pub even_primitive: u64,
    pub real_nontrivial: u64,
}

impl FamilyCounts {
    /// Φ(T^M), the primitive count, the even count and the even primitive count
    /// for M ≥ 2.
    pub fn expected(q: u64, m: usize) -> (u64, u64, u64, u64) {
        assert!(m >= 2);
        let qm1 = q.pow(m as u32 - 1);
        let qm2 = q.pow(m as u32 - 2);
        (qm1 * (q - 1), qm2 * (q - 1) * (q - 1), qm1, qm2 * (q - 1))
    }
}

/// Every Dirichlet character modulo T^M, classified.
#[derive(Clone, Debug)]
pub struct CharacterFamily {
    group: Arc<UnitGroupDecomposition>,
    characters: Vec<DirichletCharacter>,
    roots: Arc<Vec<Complex64>>,
}

impl CharacterFamily {
    pub fn new(field: FieldSpec, m: usize) -> Result<Self> {
        let group = Arc::new(UnitGroupDecomposition::new(field, m)?);
        let orders = group.orders().to_vec();
        let total = group.order();
        let characters: Vec<DirichletCharacter> = (0..total)
            .into_par_iter()
            .map(|mut code| {
                let exps = orders
                    .iter()
                    .map(|&o| {
                        let a = code % o;
                        code /= o;
                        a
                    })
                    .collect();
                DirichletCharacter::raw(exps).classify(&group)
            })
            .collect();
        let l = group.exponent();
        let roots = (0..l)
            .map(|k| {
                let (s, c) = (TAU * k as f64 / l as f64).sin_cos();
                Complex64::new(c, s)
            })
            .collect();
        let family = CharacterFamily {
            group,
            characters,
            roots: Arc::new(roots),
        };
        if m >= 2 {
            let c = family.counts();
            let (phi, prim, even, even_prim) = FamilyCounts::expected(field.q() as u64, m);
            if (c.total, c.primitive, c.even, c.even_primitive) != (phi, prim, even, even_prim) {
                return Err(Error::Inconsistent(format!(
                    "character counts {c:?} differ from ({phi}, {prim}, {even}, {even_prim})"
                )));
            }
        }
        Ok(family)
    }

    pub fn group(&self) -> &UnitGroupDecomposition {
        &self.group
    }

    pub fn residues(&self) -> Residues {
        self.group.residues()
    }

    pub fn characters(&self) -> &[DirichletCharacter] {
        &self.characters
    }

    pub fn primitive_even(&self) -> Vec<&DirichletCharacter> {
        self.characters
            .iter()
            .filter(|c| c.is_primitive && c.is_even)
            .collect()
    }

    pub fn counts(&self) -> FamilyCounts {
        let count = |f: &dyn Fn(&DirichletCharacter) -> bool| {
            self.characters.iter().filter(|c| f(c)).count() as u64
        };
        FamilyCounts {
            total: self.characters.len() as u64,
            primitive: count(&|c| c.is_primitive),
            even: count(&|c| c.is_even),
            even_primitive: count(&|c| c.is_even && c.is_primitive),
            real_nontrivial: count(&|c| c.is_real && !c.is_trivial),
        }
    }

    /// e^{2πi k/L}
    pub fn root(&self, k: u64) -> Complex64 {
        self.roots[k as usize]
    }

    /// Σ_r w(r) χ(r), summing weights exactly per rotation class first.
    pub fn character_sum(&self, rotations: &[u32], weights: &ResidueWeights) -> Complex64 {
        let mut per_class = vec![0i128; self.roots.len()];
        for (r, &w) in weights.num.iter().enumerate() {
            if w != 0 && rotations[r] != NOT_UNIT {
                per_class[rotations[r] as usize] += w;
            }
        }
        let s: Complex64 = per_class
            .iter()
            .zip(self.roots.iter())
            .filter(|(&c, _)| c != 0)
            .map(|(&c, z)| z * c as f64)
            .sum();
        s / weights.den as f64
    }
}

/// Weights on residues modulo T^M as exact integers over a common denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueWeights {
    pub res: Residues,
    pub num: Vec<i128>,
    pub den: i128,
}

impl ResidueWeights {
    pub fn zeros(res: Residues) -> Self {
        ResidueWeights {
            res,
            num: vec![0; res.count()],
            den: 1,
        }
    }

    /// w(r) = Σ_{f ∈ M_n, f ≡ r} a(f), with a given on factorization types.
    pub fn from_table<F>(table: &FactorTable, res: Residues, a: F) -> Result<Self>
    where
        F: Fn(&crate::ffpoly::ExtFactType) -> Rational,
    {
        let values: Vec<Rational> = table.types().iter().map(&a).collect();
        let den = values
            .iter()
            .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let ints: Vec<i128> = values
            .iter()
            .map(|v| {
                (v.numer() * (&den / v.denom()))
                    .to_i128()
                    .ok_or_else(|| Error::Inconsistent("weight overflows i128".into()))
            })
            .collect::<Result<_>>()?;
        let mut num = vec![0i128; res.count()];
        let n = table.degree();
        for (idx, &id) in table.type_ids().iter().enumerate() {
            let v = ints[id as usize];
            if v != 0 {
                num[res.of_monic_index(n, idx as u64)] += v;
            }
        }
        Ok(ResidueWeights {
            res,
            num,
            den: den.to_i128().expect("denominator fits"),
        })
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(|w| w.is_zero())
    }
}
