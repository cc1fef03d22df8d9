use std::time::Instant;

use num_traits::{One, Zero};
use serde::Serialize;

use super::empirical::{empirical_variance, EnumerationOptions};
use super::report::convergence_report;
use super::tolerances::{EXPLICIT_FORMULA_TOL, SHORT_INTERVAL_TOL};
use super::types::type_distribution;
use crate::arith::{closed_form_expansion, fourier_coefficients, FactorizationFunction, NamedFn};
use crate::dirichlet::{characters, explicit_formula_residual, l_polynomial, prime_power_weights, short_interval_identity_check};
use crate::error::{Error, Result};
use crate::ffpoly::FieldSpec;
use crate::predictor::{
    dk_variance_crosscheck, mu_omega_variance_closed_form, omega_variance_closed_form, predict_covariance,
    predict_variance, RangePolicy,
};
use crate::rational::{frac, int, Rational};
use crate::symmetric::{cauchy_probability, character_table};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Fast,
    Full,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub level: Level,
    pub checks: Vec<CheckResult>,
    pub pass: bool,
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Inconsistent(msg()))
    }
}

fn orthogonality(max_n: usize) -> Result<String> {
    for n in 1..=max_n {
        let (parts, table) = character_table(n);
        let probs: Vec<Rational> = parts.iter().map(cauchy_probability).collect();
        for i in 0..parts.len() {
            for j in 0..parts.len() {
                let s: Rational = (0..parts.len())
                    .map(|k| &probs[k] * int(table[i][k] * table[j][k]))
                    .sum();
                let expect = if i == j { Rational::one() } else { Rational::zero() };
                ensure(s == expect, || format!("n={n}: <X^{}, X^{}> = {s}", parts[i], parts[j]))?;
            }
        }
    }
    Ok(format!("all pairs, n <= {max_n}"))
}

fn closed_forms(max_n: usize) -> Result<String> {
    let mut fns = vec![NamedFn::Mu, NamedFn::MuSquared, NamedFn::Lambda, NamedFn::Omega, NamedFn::MuOmega];
    fns.extend((1..=3).map(NamedFn::LambdaJ));
    fns.extend((1..=3).map(NamedFn::DK));
    fns.extend((0..4).map(NamedFn::MuTrunc));
    let mut count = 0;
    for n in 1..=max_n {
        for f in &fns {
            let numeric = fourier_coefficients(&FactorizationFunction::named(f), n)?;
            ensure(numeric == closed_form_expansion(f, n)?, || format!("{f} at n={n}"))?;
            count += 1;
        }
    }
    Ok(format!("{count} expansions agree"))
}

fn headlines(max_n: usize) -> Result<String> {
    let t = RangePolicy::Theorem;
    let mu = FactorizationFunction::named(&NamedFn::Mu);
    let lam = FactorizationFunction::named(&NamedFn::Lambda);
    for n in 5..=max_n {
        for h in 0..=n - 5 {
            ensure(predict_variance(&mu, n, h, t)?.leading_coeff == int(1), || format!("mu n={n} h={h}"))?;
            let l = predict_variance(&lam, n, h, t)?.leading_coeff;
            ensure(l == int((n - h - 2) as i64), || format!("lambda n={n} h={h}: {l}"))?;
            let c = predict_covariance(&lam, &mu, n, h, t)?;
            ensure(c == int(-1), || format!("cov n={n} h={h}: {c}"))?;
            omega_variance_closed_form(n, h, t)?;
            mu_omega_variance_closed_form(n, h, t)?;
            for k in 1..=3 {
                dk_variance_crosscheck(k, n, h, t)?;
            }
        }
    }
    Ok(format!("n in 5..={max_n}, all h"))
}

fn character_family(q: u32, m: usize, max_n: usize) -> Result<String> {
    let family = characters(q, m)?;
    let c = family.counts();
    let field = FieldSpec::new(q)?;
    let weights: Vec<_> = (1..=max_n).map(|n| prime_power_weights(field, family.residues(), n)).collect();
    let mut worst: f64 = 0.0;
    for chi in family.characters().iter().filter(|c| c.is_primitive) {
        let l = l_polynomial(&family, chi)?;
        ensure(l.n_zeros == m - 1 - l.lambda_chi as usize, || format!("zero count {:?}", chi.exps))?;
        ensure(l.lambda_chi == chi.is_even as u8, || format!("trivial zero {:?}", chi.exps))?;
        for (i, w) in weights.iter().enumerate() {
            worst = worst.max(explicit_formula_residual(&family, chi, &l, w, i + 1)?);
        }
    }
    ensure(worst < EXPLICIT_FORMULA_TOL, || format!("explicit formula residual {worst:e}"))?;
    Ok(format!(
        "q={q} M={m}: {} characters, {} primitive, {} even, {} even primitive; explicit formula max residual {worst:.2e}",
        c.total, c.primitive, c.even, c.even_primitive
    ))
}

fn short_interval(q: u32, n: usize) -> Result<String> {
    let mut worst: f64 = 0.0;
    for name in ["mu", "lambda", "d_k:2"] {
        let a = FactorizationFunction::parse(name)?;
        for h in 0..n {
            worst = worst.max(short_interval_identity_check(&a, q, n, h)?.relative_residual);
        }
    }
    ensure(worst < SHORT_INTERVAL_TOL, || format!("relative residual {worst:e}"))?;
    Ok(format!("q={q} n={n}: max relative residual {worst:.2e}"))
}

fn densities() -> Result<String> {
    let opts = EnumerationOptions::default();
    for (q, n) in [(2u32, 4usize), (3, 4), (5, 3), (7, 3)] {
        let d = type_distribution(q, n, opts.budget)?;
        ensure(d.probability(None) == frac(1, q as i64), || format!("squarefree density q={q} n={n}"))?;
    }
    let s = empirical_variance(&FactorizationFunction::named(&NamedFn::Const1), 5, 4, 1, &opts)?;
    ensure(s.variance.is_zero(), || "constant has nonzero variance".into())?;
    Ok("squarefree densities exact, constant variance 0".into())
}

fn convergence() -> Result<String> {
    let opts = EnumerationOptions::default();
    let mut out = Vec::new();
    for name in ["mu", "lambda"] {
        let r = convergence_report(&FactorizationFunction::parse(name)?, 5, 0, &[5, 7], &opts)?;
        ensure(r.pass, || format!("{name}: {:?}", r.errors_f64()))?;
        out.push(format!("{name} {:?}", r.errors_f64()));
    }
    Ok(out.join("; "))
}

type Check = (&'static str, Box<dyn Fn() -> Result<String>>);

fn checks(level: Level) -> Vec<Check> {
    let full = level == Level::Full;
    let (n_small, n_big) = if full { (8, 8) } else { (6, 6) };
    let mut v: Vec<Check> = vec![
        ("character orthogonality", Box::new(move || orthogonality(n_small))),
        ("closed-form expansions", Box::new(move || closed_forms(n_small))),
        ("variance predictions", Box::new(move || headlines(n_big))),
        ("character family q=3 M=4", Box::new(|| character_family(3, 4, 6))),
        ("short-interval character identity", Box::new(|| short_interval(3, 4))),
        ("densities", Box::new(densities)),
    ];
    if full {
        v.push(("character family q=5 M=5", Box::new(|| character_family(5, 5, 8))));
        v.push(("empirical convergence", Box::new(convergence)));
    }
    v
}

/// Runs the identity suite; every check is independent.
pub fn run_verify(level: Level) -> VerifyReport {
    let results: Vec<CheckResult> = checks(level)
        .into_iter()
        .map(|(name, f)| {
            let start = Instant::now();
            let (pass, detail) = match f() {
                Ok(d) => (true, d),
                Err(e) => (false, e.to_string()),
            };
            CheckResult {
                name: name.to_string(),
                pass,
                detail,
                seconds: start.elapsed().as_secs_f64(),
            }
        })
        .collect();
    let pass = results.iter().all(|r| r.pass);
    VerifyReport {
        level,
        checks: results,
        pass,
    }
}
