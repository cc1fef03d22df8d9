use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Serialize, Serializer};

use super::character::{CharacterFamily, DirichletCharacter, NOT_UNIT};
use crate::error::{Error, Result};

/// Tolerance for placing a zero on |u| = 1 or |u| = q^{-1/2}.
pub const ZERO_TOL: f64 = 1e-6;

/// Roots closer than this (relative) are treated as one multiple root.
const CLUSTER_TOL: f64 = 1e-6;

fn pairs<S: Serializer>(v: &[Complex64], s: S) -> std::result::Result<S::Ok, S::Error> {
    let out: Vec<[f64; 2]> = v.iter().map(|z| [z.re, z.im]).collect();
    out.serialize(s)
}

/// L(u, χ) = Σ_{n<M} c_n u^n and, for primitive χ, its unitarized zeros.
#[derive(Clone, Debug, Serialize)]
pub struct LFunctionData {
    pub q: u32,
    #[serde(rename = "M")]
    pub m: usize,
    pub chi: Vec<u64>,
    pub even: bool,
    pub primitive: bool,
    #[serde(serialize_with = "pairs")]
    pub coeffs: Vec<Complex64>,
    #[serde(serialize_with = "pairs")]
    pub zeros: Vec<Complex64>,
    /// ϑ_j ∈ [0, 1), sorted; empty unless χ is primitive.
    pub thetas: Vec<f64>,
    pub lambda_chi: u8,
    #[serde(rename = "N")]
    pub n_zeros: usize,
}

impl LFunctionData {
    /// e^{2πiϑ_j}, the eigenvalues of the unitarized Frobenius.
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        self.thetas
            .iter()
            .map(|t| Complex64::from_polar(1.0, TAU * t))
            .collect()
    }

    /// −q^{n/2} Tr Θ^n − λ_χ
    pub fn prime_sum_from_zeros(&self, n: usize) -> Complex64 {
        let trace: Complex64 = self.eigenvalues().iter().map(|z| z.powu(n as u32)).sum();
        -(self.q as f64).powf(n as f64 / 2.0) * trace - self.lambda_chi as f64
    }

    pub fn eval(&self, u: Complex64) -> Complex64 {
        horner(&self.coeffs, u)
    }
}

fn horner(coeffs: &[Complex64], u: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * u + c)
}

/// Σ_{f ∈ M_k} χ(f) for k ≤ M, from the rotation table.
fn monic_sums(family: &CharacterFamily, rot: &[u32], upto: usize) -> Vec<Complex64> {
    let res = family.residues();
    let l = family.group().exponent() as usize;
    (0..=upto)
        .map(|k| {
            let mut per_class = vec![0i64; l];
            for idx in 0..(res.q as u64).pow(k as u32) {
                let r = rot[res.of_monic_index(k, idx)];
                if r != NOT_UNIT {
                    per_class[r as usize] += 1;
                }
            }
            per_class
                .iter()
                .enumerate()
                .filter(|(_, &c)| c != 0)
                .map(|(j, &c)| family.root(j as u64) * c as f64)
                .sum()
        })
        .collect()
}

/// Roots of Σ c_k u^k through the eigenvalues of the companion matrix,
/// each polished by Newton's method.
pub fn polynomial_roots(coeffs: &[Complex64], newton_steps: usize) -> Vec<Complex64> {
    let mut c = coeffs.to_vec();
    let scale = c.iter().map(|z| z.norm()).fold(0.0, f64::max);
    while c.len() > 1 && c.last().unwrap().norm() <= 1e-12 * scale.max(1.0) {
        c.pop();
    }
    let d = c.len() - 1;
    if d == 0 {
        return Vec::new();
    }
    let lead = c[d];
    let companion = DMatrix::from_fn(d, d, |i, j| {
        if j == d - 1 {
            -c[i] / lead
        } else if i == j + 1 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let eig: Vec<Complex64> = match companion.clone().eigenvalues() {
        Some(v) => v.iter().copied().collect(),
        None => durand_kerner(&c),
    };
    let deriv = derivative(&c);
    let polished: Vec<Complex64> = eig.into_iter().map(|z| newton(&c, &deriv, z, newton_steps)).collect();
    merge_clusters(&c, polished, newton_steps)
}

fn newton(c: &[Complex64], deriv: &[Complex64], mut z: Complex64, steps: usize) -> Complex64 {
    for _ in 0..steps {
        let dp = horner(deriv, z);
        if dp.norm() == 0.0 {
            break;
        }
        let next = z - horner(c, z) / dp;
        if horner(c, next).norm() >= horner(c, z).norm() {
            break;
        }
        z = next;
    }
    z
}

fn derivative(c: &[Complex64]) -> Vec<Complex64> {
    c.iter().enumerate().skip(1).map(|(k, z)| z * k as f64).collect()
}

// A root of multiplicity k comes back from the eigensolver as k points spread
// over ~eps^{1/k}. Their centroid is accurate; it is then a simple root of the
// (k−1)-th derivative and is polished there.
fn merge_clusters(c: &[Complex64], roots: Vec<Complex64>, steps: usize) -> Vec<Complex64> {
    let mut group = vec![usize::MAX; roots.len()];
    let mut out = roots.clone();
    for i in 0..roots.len() {
        if group[i] != usize::MAX {
            continue;
        }
        group[i] = i;
        let mut members = vec![i];
        for j in i + 1..roots.len() {
            if group[j] == usize::MAX && (roots[i] - roots[j]).norm() < CLUSTER_TOL * roots[i].norm().max(1.0) {
                group[j] = i;
                members.push(j);
            }
        }
        if members.len() == 1 {
            continue;
        }
        let mut d = c.to_vec();
        for _ in 1..members.len() {
            d = derivative(&d);
        }
        let centroid = members.iter().map(|&k| roots[k]).sum::<Complex64>() / members.len() as f64;
        let z = newton(&d, &derivative(&d), centroid, steps);
        for k in members {
            out[k] = z;
        }
    }
    out
}

fn durand_kerner(c: &[Complex64]) -> Vec<Complex64> {
    let d = c.len() - 1;
    let monic: Vec<Complex64> = c.iter().map(|z| z / c[d]).collect();
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..d).map(|k| seed.powu(k as u32)).collect();
    for _ in 0..500 {
        for i in 0..d {
            let denom: Complex64 = (0..d)
                .filter(|&j| j != i)
                .map(|j| z[i] - z[j])
                .product();
            let step = horner(&monic, z[i]) / denom;
            z[i] -= step;
        }
    }
    z
}

/// Coefficients, zeros and (for primitive χ) the unitarized zeros.
pub fn l_polynomial(family: &CharacterFamily, chi: &DirichletCharacter) -> Result<LFunctionData> {
    l_polynomial_with(family, chi, 8)
}

/// As [`l_polynomial`] with an explicit number of Newton polishing steps.
pub fn l_polynomial_with(
    family: &CharacterFamily,
    chi: &DirichletCharacter,
    newton_steps: usize,
) -> Result<LFunctionData> {
    if chi.is_trivial {
        return Err(Error::TrivialCharacter);
    }
    let res = family.residues();
    let (q, m) = (res.q, res.m);
    let rot = chi.rotations(family.group());
    let mut sums = monic_sums(family, &rot, m);
    let top = sums.pop().expect("M + 1 sums");
    if top.norm() > 1e-6 * (q as f64).powi(m as i32 / 2) {
        return Err(Error::Inconsistent(format!(
            "degree-M character sum {top} does not vanish"
        )));
    }
    let coeffs = sums;
    let zeros = polynomial_roots(&coeffs, newton_steps);
    let mut data = LFunctionData {
        q,
        m,
        chi: chi.exps.clone(),
        even: chi.is_even,
        primitive: chi.is_primitive,
        coeffs,
        zeros: zeros.clone(),
        thetas: Vec::new(),
        lambda_chi: 0,
        n_zeros: zeros.len(),
    };
    if !chi.is_primitive {
        return Ok(data);
    }
    if zeros.len() != m - 1 {
        return Err(Error::Inconsistent(format!(
            "primitive L-polynomial has {} zeros, expected {}",
            zeros.len(),
            m - 1
        )));
    }
    let one = Complex64::new(1.0, 0.0);
    let at_one = zeros.iter().filter(|z| (*z - one).norm() < ZERO_TOL).count();
    if at_one > 1 {
        return Err(Error::Inconsistent("multiple zeros at u = 1".into()));
    }
    let radius = (q as f64).powf(-0.5);
    let mut thetas = Vec::new();
    for z in zeros.iter().filter(|z| (*z - one).norm() >= ZERO_TOL) {
        if (z.norm() - radius).abs() >= ZERO_TOL {
            return Err(Error::Inconsistent(format!(
                "zero {z} off the circle |u| = q^(-1/2)"
            )));
        }
        let eig = 1.0 / ((q as f64).sqrt() * z);
        thetas.push((eig.arg() / TAU).rem_euclid(1.0) % 1.0);
    }
    thetas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    data.lambda_chi = at_one as u8;
    data.n_zeros = thetas.len();
    data.thetas = thetas;
    Ok(data)
}
