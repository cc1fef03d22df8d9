use std::fs;
use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use ffvar::arith::{closed_form_expansion, fourier_coefficients, FactorizationFunction, NamedFn};
use ffvar::dirichlet::{
    characters, class_function_weights, family_delta_matrix, l_polynomial, schur_of_zeros_residual, LFunctionData,
};
use ffvar::error::Error;
use ffvar::ffpoly::{FactorTable, FieldSpec, Poly};
use ffvar::harness::{
    compare_variance, empirical_moment, partial_sums, run_verify, shift_independence, tolerances, type_distribution,
    EnumerationOptions, Envelope, Level, PartialSums,
};
use ffvar::partitions::{enumerate_partitions, Partition};
use ffvar::predictor::{dk_schur_sum, ik_count, predict_covariance, predict_variance, RangePolicy};
use ffvar::rational::{self, Rational};

#[derive(Parser)]
#[command(name = "ffvar", version, about = "Short-interval variance of factorization functions over F_q[T]")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Fast,
    Full,
}

#[derive(Subcommand)]
enum Command {
    /// Fourier coefficients of a factorization function on M_n.
    Coeffs {
        #[arg(long = "fn")]
        function: String,
        #[arg(long)]
        n: usize,
        /// Always use the character table, even when a closed form exists.
        #[arg(long)]
        numeric: bool,
    },
    /// Leading variance (or covariance with --with) coefficient.
    Predict {
        #[arg(long = "fn")]
        function: String,
        #[arg(long = "with")]
        other: Option<String>,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        h: usize,
        /// Accept h <= n - 2 instead of h <= n - 5.
        #[arg(long)]
        relaxed: bool,
    },
    /// Count I_k(n, N) of k×k monotone arrays, with the Schur-sum cross-check.
    Ik {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long = "N")]
        big_n: usize,
    },
    /// Exhaustive short-interval statistics over M_n.
    Empirical {
        #[arg(long = "fn")]
        function: String,
        /// Second function; adds the covariance.
        #[arg(long = "with")]
        other: Option<String>,
        #[arg(long)]
        q: u32,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        h: usize,
        /// Report the k-th raw moment instead of the variance.
        #[arg(long)]
        moment: Option<u32>,
        #[arg(long, default_value_t = 1)]
        shards: u64,
        #[arg(long, default_value_t = 0)]
        shard_index: u64,
        #[arg(long, default_value_t = tolerances::DEFAULT_BUDGET)]
        budget: u128,
    },
    /// Combine sharded partial sums into final statistics.
    Merge {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Prediction against measurement along a list of q.
    Compare {
        #[arg(long = "fn")]
        function: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        h: usize,
        #[arg(long, value_delimiter = ',', default_value = "5,7,11,13")]
        qs: Vec<u32>,
        #[arg(long, default_value_t = tolerances::C_VARIANCE)]
        c: i64,
        #[arg(long)]
        relaxed: bool,
        #[arg(long, default_value_t = tolerances::DEFAULT_BUDGET)]
        budget: u128,
    },
    /// L-polynomials and unitarized zeros of Dirichlet characters mod T^M.
    Lfunc {
        #[arg(long)]
        q: u32,
        #[arg(long = "M")]
        m: usize,
        /// Character by position in the family; all primitive characters if omitted.
        #[arg(long)]
        index: Option<usize>,
    },
    /// Family average Δ_{λ,ν} and Schur-of-zeros residuals for λ ⊢ n.
    Family {
        #[arg(long)]
        q: u32,
        #[arg(long = "M")]
        m: usize,
        #[arg(long)]
        n: usize,
        /// Also compute max |s_λ(Θ) − character sum| over the family.
        #[arg(long)]
        schur: bool,
    },
    /// Distribution of factorization types against Cauchy's formula.
    Types {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        n: usize,
        /// Also measure independence of f and f + alpha, e.g. q=7:[1].
        #[arg(long)]
        shift: Option<String>,
        #[arg(long, default_value_t = tolerances::DEFAULT_BUDGET)]
        budget: u128,
    },
    /// Run the identity suite.
    Verify {
        #[arg(long, value_enum, default_value_t = LevelArg::Fast)]
        level: LevelArg,
    },
}

struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

struct Report {
    command: &'static str,
    data: Value,
    table: Table,
    ok: bool,
}

enum Failure {
    Usage(String),
    Identity(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Inconsistent(_) => Failure::Identity(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = std::result::Result<Report, Failure>;

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("report types serialize")
}

fn parts_str(p: &Partition) -> String {
    p.parts().iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn r(x: &Rational) -> String {
    rational::to_string(x)
}

fn policy(relaxed: bool) -> RangePolicy {
    if relaxed {
        RangePolicy::Relaxed
    } else {
        RangePolicy::Theorem
    }
}

fn coeffs(function: &str, n: usize, numeric: bool) -> Outcome {
    let named: Option<NamedFn> = function.parse().ok();
    let closed = match (&named, numeric) {
        (Some(f), false) => match closed_form_expansion(f, n) {
            Ok(e) => Some(e),
            Err(Error::NoClosedForm(_)) => None,
            Err(e) => return Err(e.into()),
        },
        _ => None,
    };
    let source = if closed.is_some() { "closed-form" } else { "character-table" };
    let exp = match closed {
        Some(e) => e,
        None => fourier_coefficients(&FactorizationFunction::parse(function)?, n)?,
    };
    let rows = exp.iter().map(|(l, v)| vec![parts_str(l), r(v)]).collect();
    let mut data = to_value(&exp);
    data["function"] = json!(function);
    data["source"] = json!(source);
    Ok(Report {
        command: "coeffs",
        data,
        table: Table {
            header: vec!["lambda", "value"],
            rows,
        },
        ok: true,
    })
}

fn predict(function: &str, other: Option<&str>, n: usize, h: usize, relaxed: bool) -> Outcome {
    let a = FactorizationFunction::parse(function)?;
    let policy = policy(relaxed);
    match other {
        Some(g) => {
            let b = FactorizationFunction::parse(g)?;
            let c = predict_covariance(&a, &b, n, h, policy)?;
            Ok(Report {
                command: "predict",
                data: json!({"function": function, "with": g, "n": n, "h": h, "coefficient": r(&c)}),
                table: Table {
                    header: vec!["function", "with", "n", "h", "coefficient"],
                    rows: vec![vec![function.into(), g.into(), n.to_string(), h.to_string(), r(&c)]],
                },
                ok: true,
            })
        }
        None => {
            let p = predict_variance(&a, n, h, policy)?;
            let mut data = to_value(&p);
            data["function"] = json!(function);
            let rows = p
                .contributing
                .iter()
                .map(|c| vec![function.into(), n.to_string(), h.to_string(), r(&p.leading_coeff), parts_str(&c.lambda), r(&c.sq)])
                .collect();
            Ok(Report {
                command: "predict",
                data,
                table: Table {
                    header: vec!["function", "n", "h", "coefficient", "lambda", "sq"],
                    rows,
                },
                ok: true,
            })
        }
    }
}

fn ik(k: usize, n: usize, big_n: usize) -> Outcome {
    if k == 0 {
        return Err(Failure::Usage("k must be positive".into()));
    }
    let count = ik_count(k, n, big_n);
    let schur = dk_schur_sum(k, n, big_n)?;
    let ok = schur == Rational::from_integer(count.into());
    Ok(Report {
        command: "ik",
        data: json!({"k": k, "n": n, "N": big_n, "count": count.to_string(), "schur_sum": r(&schur), "agree": ok}),
        table: Table {
            header: vec!["k", "n", "N", "count", "schur_sum"],
            rows: vec![vec![k.to_string(), n.to_string(), big_n.to_string(), count.to_string(), r(&schur)]],
        },
        ok,
    })
}

fn stats_report(sums: &PartialSums) -> Outcome {
    let mut rows = Vec::new();
    let mut stats = Vec::new();
    for i in 0..sums.functions.len() {
        let s = sums.stats(i)?;
        rows.push(vec![s.function.clone(), s.q.to_string(), s.n.to_string(), s.h.to_string(), r(&s.mean), r(&s.variance)]);
        stats.push(to_value(&s));
    }
    let mut data = json!({"stats": stats});
    if sums.functions.len() == 2 {
        data["covariance"] = json!(r(&sums.covariance(0, 1)?));
    }
    Ok(Report {
        command: "empirical",
        data,
        table: Table {
            header: vec!["function", "q", "n", "h", "mean", "variance"],
            rows,
        },
        ok: true,
    })
}

#[allow(clippy::too_many_arguments)]
fn empirical(
    function: &str,
    other: Option<&str>,
    q: u32,
    n: usize,
    h: usize,
    moment: Option<u32>,
    opts: EnumerationOptions,
) -> Outcome {
    let a = FactorizationFunction::parse(function)?;
    if let Some(k) = moment {
        if other.is_some() || opts.shards > 1 {
            return Err(Failure::Usage("--moment takes a single function and no sharding".into()));
        }
        let m = empirical_moment(&a, q, n, h, k, &opts)?;
        let row = vec![function.into(), k.to_string(), r(&m.raw_moment), r(&m.normalized), r(&m.mean_power)];
        return Ok(Report {
            command: "empirical",
            data: to_value(&m),
            table: Table {
                header: vec!["function", "k", "raw_moment", "normalized", "mean_power"],
                rows: vec![row],
            },
            ok: true,
        });
    }
    let b = other.map(FactorizationFunction::parse).transpose()?;
    let mut funcs = vec![&a];
    funcs.extend(b.as_ref());
    let sums = partial_sums(&funcs, q, n, h, &opts)?;
    if sums.is_complete() {
        stats_report(&sums)
    } else {
        Ok(Report {
            command: "partial",
            data: to_value(&sums),
            table: Table {
                header: vec!["function", "blocks", "total_blocks", "den", "sum"],
                rows: sums
                    .functions
                    .iter()
                    .enumerate()
                    .map(|(i, f)| {
                        vec![
                            f.clone(),
                            sums.blocks.to_string(),
                            sums.total_blocks.to_string(),
                            sums.dens[i].to_string(),
                            sums.sums[i].to_string(),
                        ]
                    })
                    .collect(),
            },
            ok: true,
        })
    }
}

fn merge(files: &[PathBuf]) -> Outcome {
    let mut acc: Option<PartialSums> = None;
    for path in files {
        let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        let v: Value = serde_json::from_str(&text)?;
        let part: PartialSums = serde_json::from_value(v.get("data").cloned().unwrap_or(v))?;
        acc = Some(match acc {
            None => part,
            Some(a) => a.merge(&part)?,
        });
    }
    stats_report(&acc.expect("at least one file"))
}

#[allow(clippy::too_many_arguments)]
fn compare(function: &str, n: usize, h: usize, qs: &[u32], c: i64, relaxed: bool, budget: u128) -> Outcome {
    let a = FactorizationFunction::parse(function)?;
    let rep = compare_variance(&a, n, h, qs, c, policy(relaxed), &EnumerationOptions::with_budget(budget))?;
    let rows = rep
        .rows
        .iter()
        .map(|row| {
            vec![
                row.q.to_string(),
                r(&rep.prediction),
                r(&row.empirical_normalized),
                format!("{:.6e}", rational::to_f64(&row.abs_error)),
                format!("{:.6e}", row.bound),
                row.pass.to_string(),
            ]
        })
        .collect();
    Ok(Report {
        command: "compare",
        data: to_value(&rep),
        table: Table {
            header: vec!["q", "prediction", "empirical_normalized", "abs_error", "bound", "pass"],
            rows,
        },
        ok: rep.pass,
    })
}

fn lfunc_row(i: usize, l: &LFunctionData) -> Vec<String> {
    let chi: Vec<String> = l.chi.iter().map(|e| e.to_string()).collect();
    let thetas: Vec<String> = l.thetas.iter().map(|t| format!("{t:.9}")).collect();
    vec![
        i.to_string(),
        chi.join(" "),
        l.even.to_string(),
        l.primitive.to_string(),
        l.lambda_chi.to_string(),
        l.n_zeros.to_string(),
        thetas.join(" "),
    ]
}

fn lfunc(q: u32, m: usize, index: Option<usize>) -> Outcome {
    let family = characters(q, m)?;
    let chosen: Vec<usize> = match index {
        Some(i) if i < family.characters().len() => vec![i],
        Some(i) => return Err(Failure::Usage(format!("index {i} out of range 0..{}", family.characters().len()))),
        None => (0..family.characters().len())
            .filter(|&i| family.characters()[i].is_primitive)
            .collect(),
    };
    let mut data = Vec::new();
    let mut rows = Vec::new();
    for i in chosen {
        let l = l_polynomial(&family, &family.characters()[i])?;
        rows.push(lfunc_row(i, &l));
        let mut v = to_value(&l);
        v["index"] = json!(i);
        data.push(v);
    }
    Ok(Report {
        command: "lfunc",
        data: json!({"q": q, "M": m, "counts": to_value(&family.counts()), "characters": data}),
        table: Table {
            header: vec!["index", "chi", "even", "primitive", "lambda_chi", "N", "thetas"],
            rows,
        },
        ok: true,
    })
}

fn family(q: u32, m: usize, n: usize, schur: bool) -> Outcome {
    let fam = characters(q, m)?;
    let delta = family_delta_matrix(&fam, n)?;
    let yardstick = (q as f64).powf(-0.5);
    let mut ok = delta.max_deviation() <= tolerances::C_DELTA * yardstick;
    let mut rows = Vec::new();
    for (i, l) in delta.partitions.iter().enumerate() {
        for (j, nu) in delta.partitions.iter().enumerate() {
            let v = delta.values[i][j];
            rows.push(vec![
                parts_str(l),
                parts_str(nu),
                format!("{:.9}", v[0]),
                format!("{:.9}", v[1]),
                delta.targets[i][j].to_string(),
            ]);
        }
    }
    let mut data = json!({"delta": to_value(&delta), "max_deviation": delta.max_deviation(), "yardstick": yardstick});
    if schur {
        let table = FactorTable::build(FieldSpec::new(q)?, n);
        let chis: Vec<_> = fam.primitive_even().into_iter().filter(|c| !c.is_real).collect();
        let ldata = chis.iter().map(|c| l_polynomial(&fam, c)).collect::<Result<Vec<_>, _>>()?;
        let mut residuals = serde_json::Map::new();
        for lam in enumerate_partitions(n) {
            let w = class_function_weights(&table, fam.residues(), &lam.dual())?;
            let mut worst: f64 = 0.0;
            for (c, l) in chis.iter().zip(&ldata) {
                worst = worst.max(schur_of_zeros_residual(&fam, c, l, &lam, &w)?);
            }
            ok &= worst <= tolerances::C_SCHUR * yardstick;
            residuals.insert(lam.to_string(), json!(worst));
        }
        data["schur_residuals"] = Value::Object(residuals);
    }
    data["pass"] = json!(ok);
    Ok(Report {
        command: "family",
        data,
        table: Table {
            header: vec!["lambda", "nu", "re", "im", "target"],
            rows,
        },
        ok,
    })
}

fn types(q: u32, n: usize, shift: Option<&str>, budget: u128) -> Outcome {
    let d = type_distribution(q, n, budget)?;
    let rows = d
        .entries
        .iter()
        .map(|e| {
            let l = e.lambda.as_ref().map(parts_str).unwrap_or_else(|| "squareful".into());
            vec![l, r(&e.empirical), r(&e.cauchy)]
        })
        .collect();
    let mut data = json!({"distribution": to_value(&d)});
    if let Some(s) = shift {
        let alpha: Poly = s.parse()?;
        data["shift"] = to_value(&shift_independence(q, n, &alpha, budget)?);
    }
    Ok(Report {
        command: "types",
        data,
        table: Table {
            header: vec!["lambda", "empirical", "cauchy"],
            rows,
        },
        ok: true,
    })
}

fn verify(level: LevelArg) -> Outcome {
    let rep = run_verify(match level {
        LevelArg::Fast => Level::Fast,
        LevelArg::Full => Level::Full,
    });
    let rows = rep
        .checks
        .iter()
        .map(|c| vec![c.name.clone(), c.pass.to_string(), format!("{:.3}", c.seconds), c.detail.clone()])
        .collect();
    Ok(Report {
        command: "verify",
        data: to_value(&rep),
        table: Table {
            header: vec!["check", "pass", "seconds", "detail"],
            rows,
        },
        ok: rep.pass,
    })
}

fn run(cmd: Command) -> Outcome {
    match cmd {
        Command::Coeffs { function, n, numeric } => coeffs(&function, n, numeric),
        Command::Predict {
            function,
            other,
            n,
            h,
            relaxed,
        } => predict(&function, other.as_deref(), n, h, relaxed),
        Command::Ik { k, n, big_n } => ik(k, n, big_n),
        Command::Empirical {
            function,
            other,
            q,
            n,
            h,
            moment,
            shards,
            shard_index,
            budget,
        } => {
            let opts = EnumerationOptions {
                budget,
                shards,
                shard_index,
            };
            empirical(&function, other.as_deref(), q, n, h, moment, opts)
        }
        Command::Merge { files } => merge(&files),
        Command::Compare {
            function,
            n,
            h,
            qs,
            c,
            relaxed,
            budget,
        } => compare(&function, n, h, &qs, c, relaxed, budget),
        Command::Lfunc { q, m, index } => lfunc(q, m, index),
        Command::Family { q, m, n, schur } => family(q, m, n, schur),
        Command::Types { q, n, shift, budget } => types(q, n, shift.as_deref(), budget),
        Command::Verify { level } => verify(level),
    }
}

fn emit(format: Format, report: &Report) -> io::Result<()> {
    match format {
        Format::Json => {
            let env = Envelope::new(report.command, &report.data);
            println!("{}", serde_json::to_string_pretty(&env)?);
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(io::stdout());
            w.write_record(&report.table.header)?;
            for row in &report.table.rows {
                w.write_record(row)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(report) => {
            if let Err(e) = emit(cli.format, &report) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if report.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Identity(msg)) => {
            eprintln!("identity failure: {msg}");
            ExitCode::from(1)
        }
    }
}
