//! Symmetric-group characters and symmetric polynomial evaluation.
//!
//! Characters X^λ(τ) come from the Murnaghan–Nakayama rule, realized on
//! beta-sets: removing a border strip of length r from λ is the same as moving
//! one bead of the beta-set down by r onto an empty position, with sign given by
//! the parity of the beads jumped over. Results are memoized in a process-wide
//! cache keyed on (shape, type).
//!
//! Schur polynomials at arbitrary complex points go through Newton's identities
//! (power sums to complete homogeneous) and the Jacobi–Trudi determinant, which
//! stays finite at repeated points. The bialternant is kept for cross-checks at
//! distinct points.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::partitions::{enumerate_partitions, gt_pattern_count, Partition};
use crate::rational::{factorial, Rational};

type CharKey = (Vec<usize>, Vec<usize>);

fn cache() -> &'static RwLock<HashMap<CharKey, i64>> {
    static CACHE: OnceLock<RwLock<HashMap<CharKey, i64>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// X^λ(τ) by the Murnaghan–Nakayama rule.
pub fn character(lambda: &Partition, tau: &Partition) -> Result<i64> {
    if lambda.weight() != tau.weight() {
        return Err(Error::WeightMismatch(lambda.weight(), tau.weight()));
    }
    Ok(mn(lambda.parts(), tau.parts()))
}

fn mn(shape: &[usize], ty: &[usize]) -> i64 {
    if ty.is_empty() {
        return if shape.is_empty() { 1 } else { 0 };
    }
    let key = (shape.to_vec(), ty.to_vec());
    if let Some(&v) = cache().read().unwrap().get(&key) {
        return v;
    }
    let r = ty[0];
    let rest = &ty[1..];
    let len = shape.len();
    let beta: Vec<usize> = shape
        .iter()
        .enumerate()
        .map(|(i, &p)| p + len - 1 - i)
        .collect();
    let mut total = 0i64;
    for (idx, &b) in beta.iter().enumerate() {
        if b < r || beta.contains(&(b - r)) {
            continue;
        }
        let target = b - r;
        let jumped = beta.iter().filter(|&&c| c > target && c < b).count();
        let sign = if jumped % 2 == 0 { 1 } else { -1 };
        let mut next: Vec<usize> = beta.clone();
        next[idx] = target;
        next.sort_unstable_by(|a, b| b.cmp(a));
        let new_shape: Vec<usize> = next
            .iter()
            .enumerate()
            .map(|(i, &c)| c - (len - 1 - i))
            .filter(|&p| p > 0)
            .collect();
        total += sign * mn(&new_shape, rest);
    }
    cache().write().unwrap().insert(key, total);
    total
}

/// The full character table of S_n, rows λ and columns τ, both in
/// reverse-lexicographic order.
pub fn character_table(n: usize) -> (Vec<Partition>, Vec<Vec<i64>>) {
    let parts = enumerate_partitions(n);
    let table = parts
        .iter()
        .map(|lam| parts.iter().map(|tau| mn(lam.parts(), tau.parts())).collect())
        .collect();
    (parts, table)
}

/// Cauchy's cycle-type probability 𝐩(λ) = ∏ 1/(i^{m_i} m_i!).
pub fn cauchy_probability(lambda: &Partition) -> Rational {
    let mut denom = BigInt::one();
    for (&i, &m) in &lambda.frequencies().multiplicities {
        denom *= BigInt::from(i).pow(m as u32) * factorial(m as u64);
    }
    Rational::new(BigInt::one(), denom)
}

/// p_ν(points) = ∏_i Σ_j x_j^{ν_i}.
pub fn power_sum_eval(nu: &Partition, points: &[Complex64]) -> Complex64 {
    nu.parts()
        .iter()
        .map(|&k| power_sum(k, points))
        .product()
}

fn power_sum(k: usize, points: &[Complex64]) -> Complex64 {
    points.iter().map(|x| x.powu(k as u32)).sum()
}

/// Complete homogeneous values h_0..=h_max via Newton's identities.
pub fn complete_homogeneous(max: usize, points: &[Complex64]) -> Vec<Complex64> {
    let p: Vec<Complex64> = (0..=max).map(|k| power_sum(k, points)).collect();
    let mut h = vec![Complex64::zero(); max + 1];
    h[0] = Complex64::one();
    for k in 1..=max {
        let s: Complex64 = (1..=k).map(|i| p[i] * h[k - i]).sum();
        h[k] = s / k as f64;
    }
    h
}

/// s_λ(points) by Jacobi–Trudi; zero when ℓ(λ) exceeds the number of points.
pub fn schur_eval(lambda: &Partition, points: &[Complex64]) -> Complex64 {
    let l = lambda.len();
    if l > points.len() {
        return Complex64::zero();
    }
    if l == 0 {
        return Complex64::one();
    }
    let max = lambda.first() + l;
    let h = complete_homogeneous(max, points);
    let hk = |k: i64| -> Complex64 {
        if k < 0 {
            Complex64::zero()
        } else {
            h[k as usize]
        }
    };
    let mut m = vec![vec![Complex64::zero(); l]; l];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            *entry = hk(lambda.parts()[i] as i64 - i as i64 + j as i64);
        }
    }
    determinant(m)
}

/// s_λ as the ratio det(x_i^{λ_j+m−j}) / det(x_i^{m−j}); needs distinct points.
pub fn schur_bialternant(lambda: &Partition, points: &[Complex64]) -> Complex64 {
    let m = points.len();
    if lambda.len() > m {
        return Complex64::zero();
    }
    let num = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| points[i].powu((lambda.part(j + 1) + m - 1 - j) as u32))
                .collect()
        })
        .collect();
    let den = (0..m)
        .map(|i| (0..m).map(|j| points[i].powu((m - 1 - j) as u32)).collect())
        .collect();
    determinant(num) / determinant(den)
}

/// LU with partial pivoting.
pub fn determinant(mut a: Vec<Vec<Complex64>>) -> Complex64 {
    let n = a.len();
    let mut det = Complex64::one();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| a[x][col].norm().total_cmp(&a[y][col].norm()))
            .unwrap();
        if a[pivot][col].norm() == 0.0 {
            return Complex64::zero();
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        let p = a[col][col];
        det *= p;
        for r in col + 1..n {
            let factor = a[r][col] / p;
            if factor.norm() == 0.0 {
                continue;
            }
            for c in col..n {
                let v = a[col][c];
                a[r][c] -= factor * v;
            }
        }
    }
    det
}

/// s_λ(1^k) by the product formula over pairs i < j.
pub fn schur_ones_product(lambda: &Partition, k: usize) -> Rational {
    if lambda.len() > k {
        return Rational::zero();
    }
    let mut acc = Rational::one();
    for i in 1..=k {
        for j in i + 1..=k {
            let num = lambda.part(i) as i64 - lambda.part(j) as i64 + (j - i) as i64;
            acc *= Rational::new(BigInt::from(num), BigInt::from((j - i) as i64));
        }
    }
    acc
}

/// s_λ(1^k) = ∏_u (k + c(u)) / h(u).
pub fn schur_ones_hook_content(lambda: &Partition, k: usize) -> Rational {
    lambda
        .hooks_and_contents()
        .cells
        .iter()
        .fold(Rational::one(), |acc, c| {
            acc * Rational::new(BigInt::from(k as i64 + c.content), BigInt::from(c.hook))
        })
}

/// s_λ(1^k) computed three independent ways; any disagreement is a bug.
pub fn schur_ones(lambda: &Partition, k: usize) -> Result<Rational> {
    assert!(k >= 1, "schur_ones needs k >= 1");
    let product = schur_ones_product(lambda, k);
    let gt = Rational::from_integer(BigInt::from(gt_pattern_count(lambda, k)));
    let hook = schur_ones_hook_content(lambda, k);
    if product != gt || product != hook {
        return Err(Error::Inconsistent(format!(
            "s_{lambda}(1^{k}): product {product}, GT {gt}, hook-content {hook}"
        )));
    }
    Ok(product)
}

/// Max relative residual of the two Frobenius identities at `points`:
/// s_λ = Σ_ν 𝐩(ν) X^λ(ν) p_ν, and p_λ = Σ_μ X^μ(λ) s_μ with λ read as a cycle type.
pub fn frobenius_check(lambda: &Partition, points: &[Complex64]) -> f64 {
    let n = lambda.weight();
    let parts = enumerate_partitions(n);

    let lhs = schur_eval(lambda, points);
    let mut rhs = Complex64::zero();
    let mut scale = lhs.norm();
    for nu in &parts {
        let w = crate::rational::to_f64(&cauchy_probability(nu)) * mn(lambda.parts(), nu.parts()) as f64;
        let term = power_sum_eval(nu, points) * w;
        scale += term.norm();
        rhs += term;
    }
    let first = (lhs - rhs).norm() / scale.max(1.0);

    let lhs = power_sum_eval(lambda, points);
    let mut rhs = Complex64::zero();
    let mut scale = lhs.norm();
    for mu in &parts {
        let term = schur_eval(mu, points) * mn(mu.parts(), lambda.parts()) as f64;
        scale += term.norm();
        rhs += term;
    }
    let second = (lhs - rhs).norm() / scale.max(1.0);
    first.max(second)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{binomial, frac, int};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p(v: &[usize]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    fn random_points(seed: u64, m: usize) -> Vec<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..m)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect()
    }

    #[test]
    fn trivial_character_is_one() {
        for n in 1..=8 {
            for tau in enumerate_partitions(n) {
                assert_eq!(character(&Partition::row(n), &tau).unwrap(), 1);
            }
        }
    }

    #[test]
    fn small_character_values() {
        assert_eq!(character(&p(&[1, 1, 1]), &p(&[3])).unwrap(), 1);
        assert_eq!(character(&p(&[2, 1]), &p(&[1, 1, 1])).unwrap(), 2);
        assert_eq!(character(&p(&[2, 1]), &p(&[3])).unwrap(), -1);
        assert!(matches!(
            character(&p(&[2]), &p(&[1])),
            Err(Error::WeightMismatch(2, 1))
        ));
    }

    #[test]
    fn cauchy_examples() {
        assert_eq!(cauchy_probability(&Partition::row(5)), frac(1, 5));
        assert_eq!(cauchy_probability(&Partition::column(4)), frac(1, 24));
        let total: Rational = enumerate_partitions(6).iter().map(cauchy_probability).sum();
        assert_eq!(total, int(1));
    }

    #[test]
    fn orthogonality_exact() {
        for n in 1..=8 {
            let (parts, table) = character_table(n);
            let probs: Vec<Rational> = parts.iter().map(cauchy_probability).collect();
            for a in 0..parts.len() {
                for b in 0..parts.len() {
                    let s: Rational = (0..parts.len())
                        .map(|c| &probs[c] * int(table[a][c] * table[b][c]))
                        .sum();
                    assert_eq!(s, if a == b { int(1) } else { int(0) });
                }
            }
        }
    }

    #[test]
    fn dual_partition_sign() {
        for n in 1..=8 {
            for lam in enumerate_partitions(n) {
                for tau in enumerate_partitions(n) {
                    let sign = if (n - tau.len()) % 2 == 0 { 1 } else { -1 };
                    assert_eq!(
                        character(&lam.dual(), &tau).unwrap(),
                        sign * character(&lam, &tau).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn power_sums() {
        let x = Complex64::new(0.3, -0.7);
        assert_eq!(power_sum_eval(&p(&[1]), &[x]), x);
        let ones = [Complex64::one(), Complex64::one()];
        assert_eq!(power_sum_eval(&p(&[2, 1]), &ones), Complex64::new(4.0, 0.0));
        assert_eq!(power_sum_eval(&p(&[3]), &[]), Complex64::zero());
        let circle: Vec<Complex64> = (0..5).map(|j| Complex64::from_polar(1.0, j as f64)).collect();
        let nu = p(&[3, 2]);
        assert!(power_sum_eval(&nu, &circle).norm() <= 25.0 + 1e-12);
    }

    #[test]
    fn schur_basic_values() {
        let pts = random_points(1, 4);
        let s1 = schur_eval(&p(&[1]), &pts);
        assert!((s1 - pts.iter().sum::<Complex64>()).norm() < 1e-12);
        assert_eq!(schur_eval(&p(&[1, 1, 1]), &pts[..2]), Complex64::zero());
        let ones = [Complex64::one(), Complex64::one()];
        assert!((schur_eval(&p(&[2, 1]), &ones) - Complex64::new(2.0, 0.0)).norm() < 1e-12);
        assert_eq!(schur_ones(&p(&[2, 1]), 2).unwrap(), int(2));
    }

    #[test]
    fn jacobi_trudi_matches_bialternant() {
        for n in 1..=6 {
            for lam in enumerate_partitions(n) {
                let pts = random_points(n as u64 * 31 + lam.len() as u64, 5);
                let jt = schur_eval(&lam, &pts);
                let bi = schur_bialternant(&lam, &pts);
                assert!((jt - bi).norm() <= 1e-9 * (1.0 + jt.norm()), "{lam}");
            }
        }
    }

    #[test]
    fn schur_ones_special_shapes() {
        for k in 1..=6 {
            assert_eq!(schur_ones(&p(&[1]), k).unwrap(), int(k as i64));
            for n in 1..=6 {
                let expect = Rational::from_integer(binomial((n + k - 1) as u64, n as u64));
                assert_eq!(schur_ones(&Partition::row(n), k).unwrap(), expect);
            }
        }
    }

    #[test]
    fn schur_ones_three_way_and_numeric() {
        for n in 1..=10 {
            for lam in enumerate_partitions(n) {
                for k in 1..=5 {
                    let exact = schur_ones(&lam, k).unwrap();
                    if n <= 7 {
                        let ones = vec![Complex64::one(); k];
                        let num = schur_eval(&lam, &ones);
                        assert!((num.re - crate::rational::to_f64(&exact)).abs() < 1e-6);
                    }
                }
            }
        }
    }

    #[test]
    fn frobenius_identities_hold() {
        for n in 1..=6 {
            for lam in enumerate_partitions(n) {
                let pts = random_points(1000 + n as u64, 10);
                assert!(frobenius_check(&lam, &pts) < 1e-9, "{lam}");
            }
        }
        let one = [Complex64::new(0.4, 0.2)];
        assert!((schur_eval(&p(&[1]), &one) - power_sum_eval(&p(&[1]), &one)).norm() == 0.0);
    }

    #[test]
    fn power_length_expansion_at_integers() {
        // k^{ℓ(τ)} = Σ_λ s_λ(1^k) X^λ(τ)
        for n in 1..=7 {
            let parts = enumerate_partitions(n);
            for tau in &parts {
                for k in 1..=4usize {
                    let rhs: Rational = parts
                        .iter()
                        .map(|lam| schur_ones(lam, k).unwrap() * int(character(lam, tau).unwrap()))
                        .sum();
                    assert_eq!(rhs, int((k as i64).pow(tau.len() as u32)));
                }
            }
        }
    }
}
