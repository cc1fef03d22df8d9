use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::character::{CharacterFamily, DirichletCharacter, ResidueWeights};
use super::group::Residues;
use super::lfunc::{l_polynomial, LFunctionData};
use crate::arith::FactorizationFunction;
use crate::error::{Error, Result};
use crate::ffpoly::{irreducibles, FactorTable, FieldSpec};
use crate::partitions::{enumerate_partitions, Partition};
use crate::rational::{int, Rational};
use crate::symmetric::{character, schur_eval};

/// w(r) = Σ_{f ∈ M_n, f ≡ r} Λ(f), assembled from prime powers P^{n/d}.
pub fn prime_power_weights(field: FieldSpec, res: Residues, n: usize) -> ResidueWeights {
    let mut w = ResidueWeights::zeros(res);
    for d in (1..=n).filter(|d| n % d == 0) {
        for p in irreducibles(field, d).iter() {
            let r = res.of_poly(&p.pow(n / d).mod_t_power(res.m));
            let r = if n < res.m { res.of_poly(&p.pow(n / d)) } else { r };
            w.num[r] += d as i128;
        }
    }
    w
}

/// w(r) = Σ_{f ∈ M_n, f ≡ r} X^λ(f), X^λ vanishing on squareful f.
pub fn class_function_weights(table: &FactorTable, res: Residues, lambda: &Partition) -> Result<ResidueWeights> {
    if lambda.weight() != table.degree() {
        return Err(Error::WeightMismatch(lambda.weight(), table.degree()));
    }
    ResidueWeights::from_table(table, res, |t| {
        if t.is_squarefree() {
            let tau = Partition::from_unsorted(t.pairs().iter().map(|p| p.0).collect());
            int(character(lambda, &tau).expect("weights agree"))
        } else {
            Rational::zero()
        }
    })
}

/// |Σ_{f∈M_n} Λ(f)χ(f) − (−q^{n/2} Tr Θ^n − λ_χ)|.
pub fn explicit_formula_residual(
    family: &CharacterFamily,
    chi: &DirichletCharacter,
    ldata: &LFunctionData,
    lambda_weights: &ResidueWeights,
    n: usize,
) -> Result<f64> {
    if !chi.is_primitive || chi.is_trivial {
        return Err(Error::NotPrimitive);
    }
    let left = family.character_sum(&chi.rotations(family.group()), lambda_weights);
    Ok((left - ldata.prime_sum_from_zeros(n)).norm())
}

/// Single-character form of [`explicit_formula_residual`].
pub fn explicit_formula_check(family: &CharacterFamily, chi: &DirichletCharacter, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "n".into(),
            reason: "must be positive".into(),
        });
    }
    let ldata = l_polynomial(family, chi)?;
    let field = FieldSpec::new(family.residues().q)?;
    let w = prime_power_weights(field, family.residues(), n);
    explicit_formula_residual(family, chi, &ldata, &w, n)
}

fn check_schur_preconditions(chi: &DirichletCharacter) -> Result<()> {
    if !chi.is_primitive || chi.is_trivial {
        return Err(Error::NotPrimitive);
    }
    if !chi.is_even || chi.is_real {
        return Err(Error::InvalidParameter {
            name: "chi".into(),
            reason: "needs an even character with non-trivial square".into(),
        });
    }
    Ok(())
}

/// |s_λ(Θ_χ) − (−1)^n q^{−n/2} Σ_{f∈M_n} X^{λ'}(f)χ(f)|, the weights being
/// those of the dual partition λ'.
pub fn schur_of_zeros_residual(
    family: &CharacterFamily,
    chi: &DirichletCharacter,
    ldata: &LFunctionData,
    lambda: &Partition,
    dual_weights: &ResidueWeights,
) -> Result<f64> {
    check_schur_preconditions(chi)?;
    let n = lambda.weight();
    let q = family.residues().q as f64;
    let s = schur_eval(lambda, &ldata.eigenvalues());
    let sum = family.character_sum(&chi.rotations(family.group()), dual_weights);
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    Ok((s - sum * sign * q.powf(-(n as f64) / 2.0)).norm())
}

/// Single-character form of [`schur_of_zeros_residual`].
pub fn schur_of_zeros_check(
    family: &CharacterFamily,
    chi: &DirichletCharacter,
    lambda: &Partition,
) -> Result<f64> {
    check_schur_preconditions(chi)?;
    let ldata = l_polynomial(family, chi)?;
    let field = FieldSpec::new(family.residues().q)?;
    let table = FactorTable::build(field, lambda.weight());
    let w = class_function_weights(&table, family.residues(), &lambda.dual())?;
    schur_of_zeros_residual(family, chi, &ldata, lambda, &w)
}

/// Δ_{λ,ν} over all λ, ν ⊢ n and its target δ_{λν}·[λ_1 ≤ m − 2].
#[derive(Clone, Debug, Serialize)]
pub struct DeltaMatrix {
    pub q: u32,
    pub m: usize,
    pub n: usize,
    pub partitions: Vec<Partition>,
    /// values[i][j] = [re, im] of Δ_{λ_i, λ_j}
    pub values: Vec<Vec<[f64; 2]>>,
    pub targets: Vec<Vec<f64>>,
    pub family_size: usize,
}

impl DeltaMatrix {
    pub fn max_deviation(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.targets)
            .flat_map(|(row, trow)| {
                row.iter()
                    .zip(trow)
                    .map(|(v, t)| Complex64::new(v[0] - t, v[1]).norm())
            })
            .fold(0.0, f64::max)
    }

    pub fn entry(&self, lambda: &Partition, nu: &Partition) -> Option<Complex64> {
        let i = self.partitions.iter().position(|p| p == lambda)?;
        let j = self.partitions.iter().position(|p| p == nu)?;
        Some(Complex64::new(self.values[i][j][0], self.values[i][j][1]))
    }
}

/// E_χ over primitive even χ mod T^m of q^{−n} (Σ X^λ χ)(conj Σ X^ν χ).
pub fn family_delta_matrix(family: &CharacterFamily, n: usize) -> Result<DeltaMatrix> {
    let res = family.residues();
    let (q, m) = (res.q, res.m);
    if m < 5 {
        return Err(Error::InvalidParameter {
            name: "m".into(),
            reason: "family orthogonality needs m >= 5".into(),
        });
    }
    let table = FactorTable::build(FieldSpec::new(q)?, n);
    let parts = enumerate_partitions(n);
    let weights: Vec<ResidueWeights> = parts
        .iter()
        .map(|lam| class_function_weights(&table, res, lam))
        .collect::<Result<_>>()?;
    let chars = family.primitive_even();
    let k = parts.len();
    let total = chars
        .par_iter()
        .map(|chi| {
            let rot = chi.rotations(family.group());
            let sums: Vec<Complex64> = weights.iter().map(|w| family.character_sum(&rot, w)).collect();
            let mut acc = vec![Complex64::zero(); k * k];
            for i in 0..k {
                for j in 0..k {
                    acc[i * k + j] = sums[i] * sums[j].conj();
                }
            }
            acc
        })
        .reduce(
            || vec![Complex64::zero(); k * k],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    let norm = chars.len() as f64 * (q as f64).powi(n as i32);
    let values = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    let z = total[i * k + j] / norm;
                    [z.re, z.im]
                })
                .collect()
        })
        .collect();
    let targets = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| (i == j && parts[i].first() + 2 <= m) as u8 as f64)
                .collect()
        })
        .collect();
    Ok(DeltaMatrix {
        q,
        m,
        n,
        partitions: parts,
        values,
        targets,
        family_size: chars.len(),
    })
}

/// One entry Δ_{λ,ν} of the family average.
pub fn family_delta(lambda: &Partition, nu: &Partition, q: u32, m: usize) -> Result<Complex64> {
    if lambda.weight() != nu.weight() {
        return Err(Error::WeightMismatch(lambda.weight(), nu.weight()));
    }
    let family = CharacterFamily::new(FieldSpec::new(q)?, m)?;
    let matrix = family_delta_matrix(&family, lambda.weight())?;
    Ok(matrix.entry(lambda, nu).expect("both partitions enumerated"))
}

#[derive(Clone, Debug, Serialize)]
pub struct ShortIntervalCheck {
    pub q: u32,
    pub n: usize,
    pub h: usize,
    #[serde(with = "crate::rational::serde_str")]
    pub lhs: Rational,
    pub rhs: f64,
    pub relative_residual: f64,
}

/// Both sides of the identity
/// Σ_{f∈M_n} |Σ_{g∈I(f;h), g(0)≠0} (a(g) − E♮a)|²
///   = q^{h+1}(q−1)/Φ(T^{n−h}) Σ_{χ≠χ₀ even mod T^{n−h}} |Σ_{g∈M_n} a(g)χ(g)|²,
/// the left side exactly by enumeration, the right side by character sums.
pub fn short_interval_identity_check(
    a: &FactorizationFunction,
    q: u32,
    n: usize,
    h: usize,
) -> Result<ShortIntervalCheck> {
    if h > n || n == 0 {
        return Err(Error::IntervalRange { n, h });
    }
    let field = FieldSpec::new(q)?;
    let table = FactorTable::build(field, n);
    let values: Vec<Rational> = table.types().iter().map(|t| a.eval_type(t)).collect();
    let unit_count = table.len() as u64 / q as u64 * (q as u64 - 1);
    let mean: Rational = table
        .type_ids()
        .iter()
        .enumerate()
        .filter(|(i, _)| i % q as usize != 0)
        .map(|(_, &id)| &values[id as usize])
        .sum::<Rational>()
        / int(unit_count as i64);

    let block = (q as usize).pow((h + 1).min(n) as u32);
    let mut lhs = Rational::zero();
    for chunk in table.type_ids().chunks(block).enumerate().map(|(b, ids)| (b * block, ids)) {
        let (start, ids) = chunk;
        let s: Rational = ids
            .iter()
            .enumerate()
            .filter(|(i, _)| (start + i) % q as usize != 0)
            .map(|(_, &id)| &values[id as usize] - &mean)
            .sum();
        lhs += &s * &s;
    }
    lhs *= int(block as i64);

    let m = n - h;
    let rhs = if m == 0 {
        0.0
    } else {
        let family = CharacterFamily::new(field, m)?;
        let res = family.residues();
        let weights = ResidueWeights::from_table(&table, res, |t| a.eval_type(t))?;
        let total: f64 = family
            .characters()
            .par_iter()
            .filter(|c| c.is_even && !c.is_trivial)
            .map(|c| family.character_sum(&c.rotations(family.group()), &weights).norm_sqr())
            .sum();
        let phi = family.group().order() as f64;
        (q as f64).powi(h as i32 + 1) * (q as f64 - 1.0) / phi * total
    };
    let lhs_f = lhs.to_f64().unwrap_or(f64::NAN);
    let relative_residual = (lhs_f - rhs).abs() / lhs_f.abs().max(1.0);
    Ok(ShortIntervalCheck {
        q,
        n,
        h,
        lhs,
        rhs,
        relative_residual,
    })
}

/// max over non-real χ mod T^m of |Σ_{f∈M_n} a(f)χ(f)| · q^{−exponent}.
pub fn character_sum_decay(
    a: &FactorizationFunction,
    family: &CharacterFamily,
    n: usize,
    exponent: f64,
) -> Result<f64> {
    let res = family.residues();
    let table = FactorTable::build(FieldSpec::new(res.q)?, n);
    let weights = ResidueWeights::from_table(&table, res, |t| a.eval_type(t))?;
    let max = family
        .characters()
        .par_iter()
        .filter(|c| !c.is_real)
        .map(|c| family.character_sum(&c.rotations(family.group()), &weights).norm())
        .reduce(|| 0.0, f64::max);
    Ok(max * (res.q as f64).powf(-exponent))
}
