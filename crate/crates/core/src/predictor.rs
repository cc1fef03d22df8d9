//! Large-q variance and covariance predictions from Fourier coefficients,
//! the subspace split behind them, and the lattice count for divisor functions.

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{fourier_coefficients, FactorizationFunction, FourierExpansion, NamedFn};
use crate::error::{Error, Result};
use crate::ffpoly::ExtFactType;
use crate::partitions::{enumerate_partitions, Partition};
use crate::rational::{frac, harmonic, serde_str, Rational};
use crate::symmetric::{cauchy_probability, schur_ones};

/// Which (n, h) are accepted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum RangePolicy {
    /// 0 ≤ h ≤ n − 5, where the asymptotics are proven.
    #[default]
    Theorem,
    /// 0 ≤ h ≤ n − 2; the formula is defined but unproven there.
    Relaxed,
}

impl RangePolicy {
    pub fn check(self, n: usize, h: usize) -> Result<()> {
        match self {
            RangePolicy::Theorem if n < 5 || h > n - 5 => Err(Error::OutsideTheoremRange { n, h }),
            RangePolicy::Relaxed if n < 2 || h > n - 2 => Err(Error::OutsideRelaxedRange { n, h }),
            _ => Ok(()),
        }
    }

    pub fn is_relaxed(self) -> bool {
        self == RangePolicy::Relaxed
    }
}

/// Largest admissible first part n − h − 2.
fn threshold(n: usize, h: usize) -> usize {
    n - h - 2
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Contribution {
    pub lambda: Partition,
    #[serde(with = "serde_str")]
    pub sq: Rational,
}

/// Var ∼ q^{h+1} · coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariancePrediction {
    pub n: usize,
    pub h: usize,
    #[serde(rename = "coefficient", with = "serde_str")]
    pub leading_coeff: Rational,
    pub contributing: Vec<Contribution>,
    /// Set when (n, h) lies outside the proven range.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub relaxed: bool,
}

pub fn predict_variance(
    a: &FactorizationFunction,
    n: usize,
    h: usize,
    policy: RangePolicy,
) -> Result<VariancePrediction> {
    policy.check(n, h)?;
    let exp = fourier_coefficients(a, n)?;
    variance_from_expansion(&exp, h, policy)
}

pub fn variance_from_expansion(
    exp: &FourierExpansion,
    h: usize,
    policy: RangePolicy,
) -> Result<VariancePrediction> {
    let n = exp.n;
    policy.check(n, h)?;
    let bound = threshold(n, h);
    let contributing: Vec<Contribution> = exp
        .iter()
        .filter(|(lam, _)| lam.first() <= bound)
        .map(|(lam, v)| Contribution {
            lambda: lam.clone(),
            sq: v * v,
        })
        .collect();
    let leading_coeff = contributing.iter().map(|c| &c.sq).sum();
    Ok(VariancePrediction {
        n,
        h,
        leading_coeff,
        contributing,
        relaxed: policy.is_relaxed(),
    })
}

/// Covar ∼ q^{h+1} Σ_{λ_1 ≤ n−h−2} â_λ b̂_λ. All coefficients in scope are
/// real, so no conjugation is needed.
pub fn predict_covariance(
    a: &FactorizationFunction,
    b: &FactorizationFunction,
    n: usize,
    h: usize,
    policy: RangePolicy,
) -> Result<Rational> {
    policy.check(n, h)?;
    let ea = fourier_coefficients(a, n)?;
    let eb = fourier_coefficients(b, n)?;
    Ok(ea.pairing(&eb, threshold(n, h)))
}

/// Number of k×k integer arrays, weakly decreasing along each row and down
/// each column, with entries in [0, N] and main-diagonal sum n.
pub fn ik_count(k: usize, n: usize, big_n: usize) -> u128 {
    assert!(k >= 1, "ik_count needs k >= 1");
    // Shard on the top-left entry; each shard fills the rest row by row.
    (0..=big_n.min(n))
        .into_par_iter()
        .map(|x11| {
            let mut grid = vec![vec![0usize; k]; k];
            grid[0][0] = x11;
            fill(&mut grid, k, 1, n - x11)
        })
        .sum()
}

fn fill(grid: &mut [Vec<usize>], k: usize, pos: usize, diag_left: usize) -> u128 {
    if pos == k * k {
        return (diag_left == 0) as u128;
    }
    let (i, j) = (pos / k, pos % k);
    let mut upper = usize::MAX;
    if j > 0 {
        upper = upper.min(grid[i][j - 1]);
    }
    if i > 0 {
        upper = upper.min(grid[i - 1][j]);
    }
    if i == j {
        upper = upper.min(diag_left);
        // later diagonal entries can be at most this one
        let remaining = k - i;
        let mut total = 0;
        for x in 0..=upper {
            if x * remaining < diag_left {
                continue;
            }
            grid[i][j] = x;
            total += fill(grid, k, pos + 1, diag_left - x);
        }
        total
    } else {
        let mut total = 0;
        for x in 0..=upper {
            grid[i][j] = x;
            total += fill(grid, k, pos + 1, diag_left);
        }
        total
    }
}

/// Σ_{λ ⊢ n, ℓ(λ) ≤ k, λ_1 ≤ N} s_λ(1^k)².
pub fn dk_schur_sum(k: usize, n: usize, big_n: usize) -> Result<Rational> {
    let mut total = Rational::zero();
    for lam in enumerate_partitions(n) {
        if lam.len() <= k && lam.first() <= big_n {
            let s = schur_ones(&lam, k)?;
            total += &s * &s;
        }
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DkCrosscheck {
    pub k: usize,
    pub n: usize,
    pub h: usize,
    #[serde(with = "serde_str")]
    pub schur_side: Rational,
    pub lattice_side: u128,
}

/// The d_k variance coefficient computed from its Fourier expansion and
/// from the lattice count I_k(n, n−h−2); they must agree.
pub fn dk_variance_crosscheck(
    k: usize,
    n: usize,
    h: usize,
    policy: RangePolicy,
) -> Result<DkCrosscheck> {
    if k == 0 {
        return Err(Error::InvalidParameter {
            name: "k".into(),
            reason: "must be positive".into(),
        });
    }
    let pred = predict_variance(&FactorizationFunction::named(&NamedFn::DK(k as u32)), n, h, policy)?;
    let lattice = ik_count(k, n, threshold(n, h));
    if pred.leading_coeff != Rational::from_integer(BigInt::from(lattice)) {
        return Err(Error::Inconsistent(format!(
            "d_{k} variance {} vs lattice count {lattice} at n={n}, h={h}",
            pred.leading_coeff
        )));
    }
    Ok(DkCrosscheck {
        k,
        n,
        h,
        schur_side: pred.leading_coeff,
        lattice_side: lattice,
    })
}

/// Σ over 1 ≤ λ_2 ≤ λ_1 ≤ n−h−2 with λ_1 + λ_2 ≤ n of
/// (1/(n−λ_1) − 1/(n−λ_2+1))², checked against the Fourier route.
pub fn omega_variance_closed_form(n: usize, h: usize, policy: RangePolicy) -> Result<Rational> {
    policy.check(n, h)?;
    let bound = threshold(n, h);
    let mut total = Rational::zero();
    for l1 in 1..=bound {
        for l2 in 1..=l1.min(n - l1) {
            let d = frac(1, (n - l1) as i64) - frac(1, (n - l2 + 1) as i64);
            total += &d * &d;
        }
    }
    let fourier = predict_variance(&FactorizationFunction::named(&NamedFn::Omega), n, h, policy)?;
    if fourier.leading_coeff != total {
        return Err(Error::Inconsistent(format!(
            "omega closed form {total} vs Fourier route {}",
            fourier.leading_coeff
        )));
    }
    Ok(total)
}

/// H_n² + Σ over i, j ≥ 0 with h+2 ≤ i+2j ≤ n−2 of (1/(n−i−j−1) − 1/(n−j))²,
/// checked against the Fourier route.
pub fn mu_omega_variance_closed_form(n: usize, h: usize, policy: RangePolicy) -> Result<Rational> {
    policy.check(n, h)?;
    let hn = harmonic(n);
    let mut total = &hn * &hn;
    for j in 0..=n / 2 {
        for i in 0..=n {
            let s = i + 2 * j;
            if s < h + 2 || s + 2 > n {
                continue;
            }
            let d = frac(1, (n - i - j - 1) as i64) - frac(1, (n - j) as i64);
            total += &d * &d;
        }
    }
    let fourier = predict_variance(&FactorizationFunction::named(&NamedFn::MuOmega), n, h, policy)?;
    if fourier.leading_coeff != total {
        return Err(Error::Inconsistent(format!(
            "mu*omega closed form {total} vs Fourier route {}",
            fourier.leading_coeff
        )));
    }
    Ok(total)
}

/// a = u + v with u carrying λ_1 ≥ n−h−1 and the squareful part, v the rest.
#[derive(Clone, Debug)]
pub struct SubspaceSplit {
    pub u_part: FourierExpansion,
    pub v_part: FourierExpansion,
    pub inner_vv: Rational,
}

impl SubspaceSplit {
    /// u(t) + v(t), which must equal a(t) on every type of degree n.
    pub fn reconstruct(&self, t: &ExtFactType) -> Rational {
        self.u_part.reconstruct(t).expect("u-part keeps the remainder") + self.v_part.squarefree_part(t)
    }
}

/// Splits the expansion of a at the threshold and computes ⟨v,v⟩ both as the
/// S_n-average Σ 𝐩(ν) v(ν)² and as Σ â_λ² over the v-part.
pub fn subspace_decompose(
    a: &FactorizationFunction,
    n: usize,
    h: usize,
    policy: RangePolicy,
) -> Result<SubspaceSplit> {
    policy.check(n, h)?;
    let exp = fourier_coefficients(a, n)?;
    let (u_part, v_part) = exp.split_at(threshold(n, h));
    let by_coeffs: Rational = v_part.iter().map(|(_, v)| v * v).sum();
    let by_average: Rational = enumerate_partitions(n)
        .iter()
        .map(|nu| {
            let v = v_part.squarefree_part(&ExtFactType::squarefree(nu));
            cauchy_probability(nu) * &v * &v
        })
        .sum();
    if by_coeffs != by_average {
        return Err(Error::Inconsistent(format!(
            "<v,v>: coefficient route {by_coeffs} vs average route {by_average}"
        )));
    }
    Ok(SubspaceSplit {
        u_part,
        v_part,
        inner_vv: by_coeffs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;
    use proptest::prelude::*;

    fn named(s: &str) -> FactorizationFunction {
        FactorizationFunction::parse(s).unwrap()
    }

    fn all_named() -> Vec<FactorizationFunction> {
        [
            "const1", "mu", "mu_squared", "lambda", "lambda_j:2", "d_k:2", "d_k:3", "omega",
            "mu_omega", "mu_trunc:2", "char_X:3,1,1", "iota:1,1",
        ]
        .iter()
        .map(|s| named(s))
        .collect()
    }

    #[test]
    fn headline_values() {
        let t = RangePolicy::Theorem;
        assert_eq!(predict_variance(&named("mu"), 5, 0, t).unwrap().leading_coeff, int(1));
        assert_eq!(predict_variance(&named("lambda"), 5, 0, t).unwrap().leading_coeff, int(3));
        assert_eq!(predict_variance(&named("const1"), 7, 2, t).unwrap().leading_coeff, int(0));
        assert_eq!(
            predict_covariance(&named("lambda"), &named("mu"), 5, 0, t).unwrap(),
            int(-1)
        );
        assert_eq!(
            predict_covariance(&named("mu_squared"), &named("mu"), 5, 0, t).unwrap(),
            int(0)
        );
        for n in 5..=8 {
            for h in 0..=n - 5 {
                let v = predict_variance(&named("lambda"), n, h, t).unwrap();
                assert_eq!(v.leading_coeff, int((n - h - 2) as i64));
                assert!(v.contributing.iter().all(|c| c.lambda.first() <= n - h - 2));
                assert_eq!(v.leading_coeff, v.contributing.iter().map(|c| &c.sq).sum());
            }
        }
    }

    #[test]
    fn range_guard() {
        let mu = named("mu");
        assert!(matches!(
            predict_variance(&mu, 5, 1, RangePolicy::Theorem),
            Err(Error::OutsideTheoremRange { .. })
        ));
        assert!(matches!(
            predict_variance(&mu, 4, 0, RangePolicy::Theorem),
            Err(Error::OutsideTheoremRange { .. })
        ));
        let relaxed = predict_variance(&mu, 5, 3, RangePolicy::Relaxed).unwrap();
        assert!(relaxed.relaxed);
        assert!(matches!(
            predict_variance(&mu, 5, 4, RangePolicy::Relaxed),
            Err(Error::OutsideRelaxedRange { .. })
        ));
    }

    #[test]
    fn covariance_with_self_is_variance() {
        for a in all_named() {
            for n in 5..=7 {
                let v = predict_variance(&a, n, 0, RangePolicy::Theorem).unwrap();
                let c = predict_covariance(&a, &a, n, 0, RangePolicy::Theorem).unwrap();
                assert_eq!(v.leading_coeff, c, "{}", a.name());
            }
        }
    }

    #[test]
    fn ik_small_values() {
        for n in 0..5 {
            for big_n in 0..5 {
                assert_eq!(ik_count(1, n, big_n), (n <= big_n) as u128);
            }
        }
        assert_eq!(ik_count(2, 1, 1), 4);
        assert_eq!(ik_count(2, 2, 1), 1);
    }

    // Unpruned enumeration of every array in [0, N]^{k×k}.
    fn ik_brute(k: usize, n: usize, big_n: usize) -> u128 {
        let cells = k * k;
        let base = big_n + 1;
        let mut count = 0;
        for code in 0..base.pow(cells as u32) {
            let mut c = code;
            let mut x = vec![0usize; cells];
            for v in x.iter_mut() {
                *v = c % base;
                c /= base;
            }
            let at = |i: usize, j: usize| x[i * k + j];
            let ok = (0..k).all(|i| (0..k).all(|j| {
                (j + 1 == k || at(i, j) >= at(i, j + 1)) && (i + 1 == k || at(i, j) >= at(i + 1, j))
            }));
            if ok && (0..k).map(|i| at(i, i)).sum::<usize>() == n {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn ik_matches_unpruned_enumeration() {
        for k in 1..=3 {
            for n in 0..=5 {
                for big_n in 0..=3 {
                    if k == 3 && big_n == 3 {
                        continue;
                    }
                    assert_eq!(ik_count(k, n, big_n), ik_brute(k, n, big_n), "k={k} n={n} N={big_n}");
                }
            }
        }
    }

    #[test]
    fn ik_equals_schur_sum() {
        for k in 1..=3 {
            for n in 0..=8 {
                for big_n in 0..=n {
                    assert_eq!(
                        dk_schur_sum(k, n, big_n).unwrap(),
                        Rational::from_integer(BigInt::from(ik_count(k, n, big_n))),
                        "k={k} n={n} N={big_n}"
                    );
                }
            }
        }
    }

    #[test]
    fn dk_crosscheck_examples() {
        dk_variance_crosscheck(2, 5, 0, RangePolicy::Theorem).unwrap();
        dk_variance_crosscheck(3, 6, 1, RangePolicy::Theorem).unwrap();
        let one = dk_variance_crosscheck(1, 6, 3, RangePolicy::Relaxed).unwrap();
        assert_eq!(one.lattice_side, 0);
    }

    #[test]
    fn omega_closed_forms() {
        let t = RangePolicy::Theorem;
        assert_eq!(omega_variance_closed_form(5, 0, t).unwrap(), frac(647, 3600));
        assert_eq!(omega_variance_closed_form(6, 0, t).unwrap(), frac(317, 1200));
        assert_eq!(omega_variance_closed_form(6, 1, t).unwrap(), frac(227, 3600));
        assert_eq!(mu_omega_variance_closed_form(5, 0, t).unwrap(), frac(21647, 3600));
        assert_eq!(mu_omega_variance_closed_form(6, 1, t).unwrap(), frac(12461, 1800));
        for n in 5..=8 {
            for h in 0..=n - 5 {
                omega_variance_closed_form(n, h, t).unwrap();
                mu_omega_variance_closed_form(n, h, t).unwrap();
            }
        }
        assert_eq!(omega_variance_closed_form(6, 4, RangePolicy::Relaxed).unwrap(), int(0));
        assert_eq!(harmonic(2), frac(3, 2));
    }

    #[test]
    fn subspace_examples() {
        let mu = subspace_decompose(&named("mu"), 6, 2, RangePolicy::Relaxed).unwrap();
        assert!(mu.u_part.coeffs.is_empty());
        assert_eq!(mu.inner_vv, int(1));
        let sq = subspace_decompose(&named("mu_squared"), 6, 0, RangePolicy::Theorem).unwrap();
        assert!(sq.v_part.coeffs.is_empty());
        assert_eq!(sq.inner_vv, int(0));
    }

    #[test]
    fn subspace_split_reconstructs_and_matches_variance() {
        for a in all_named() {
            for n in 5..=8 {
                for h in 0..=n - 2 {
                    let split = subspace_decompose(&a, n, h, RangePolicy::Relaxed).unwrap();
                    let v = predict_variance(&a, n, h, RangePolicy::Relaxed).unwrap();
                    assert_eq!(split.inner_vv, v.leading_coeff);
                    if n <= 6 {
                        for t in ExtFactType::all_of_degree(n) {
                            assert_eq!(split.reconstruct(&t), a.eval_type(&t));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn variance_is_monotone_in_h() {
        for a in all_named() {
            for n in 2..=8 {
                let values: Vec<Rational> = (0..=n - 2)
                    .map(|h| predict_variance(&a, n, h, RangePolicy::Relaxed).unwrap().leading_coeff)
                    .collect();
                assert!(values.windows(2).all(|w| w[0] >= w[1]), "{} n={n}", a.name());
            }
        }
    }

    #[test]
    fn json_schema() {
        let v = predict_variance(&named("mu"), 5, 0, RangePolicy::Theorem).unwrap();
        let j = serde_json::to_value(&v).unwrap();
        assert_eq!(j["coefficient"], "1");
        assert_eq!(j["contributing"][0]["lambda"], serde_json::json!([1, 1, 1, 1, 1]));
        assert_eq!(j["contributing"][0]["sq"], "1");
        assert!(j.get("relaxed").is_none());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn cauchy_schwarz(i in 0usize..12, j in 0usize..12, n in 5usize..8, h in 0usize..4) {
            let fns = all_named();
            let h = h.min(n - 2);
            let (a, b) = (&fns[i], &fns[j]);
            let c = predict_covariance(a, b, n, h, RangePolicy::Relaxed).unwrap();
            let va = predict_variance(a, n, h, RangePolicy::Relaxed).unwrap().leading_coeff;
            let vb = predict_variance(b, n, h, RangePolicy::Relaxed).unwrap().leading_coeff;
            prop_assert!(&c * &c <= va * vb);
        }
    }
}
