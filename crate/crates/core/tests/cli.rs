use std::process::{Command, Output};

use serde_json::Value;

fn ffvar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ffvar"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = ffvar(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn predict_mu() {
    let v = json(&["predict", "--fn", "mu", "--n", "5", "--h", "0"]);
    assert_eq!(v["schema"], "ffvar-report/1");
    assert_eq!(v["data"]["coefficient"], "1");
}

#[test]
fn predict_lambda_mu_covariance() {
    let v = json(&["predict", "--fn", "lambda", "--with", "mu", "--n", "7", "--h", "1"]);
    assert_eq!(v["data"]["coefficient"], "-1");
}

#[test]
fn relaxed_range_needs_flag() {
    assert_eq!(ffvar(&["predict", "--fn", "lambda", "--n", "5", "--h", "2"]).status.code(), Some(2));
    let v = json(&["predict", "--fn", "lambda", "--n", "5", "--h", "2", "--relaxed"]);
    assert_eq!(v["data"]["coefficient"], "1");
    assert_eq!(v["data"]["relaxed"], true);
}

#[test]
fn ik_csv() {
    let out = ffvar(&["--format", "csv", "ik", "--k", "2", "--n", "1", "--N", "1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text, "k,n,N,count,schur_sum\n2,1,1,4,4\n");
}

#[test]
fn coeffs_closed_form_and_numeric_agree() {
    let a = json(&["coeffs", "--fn", "omega", "--n", "5"]);
    let b = json(&["coeffs", "--fn", "omega", "--n", "5", "--numeric"]);
    assert_eq!(a["data"]["source"], "closed-form");
    assert_eq!(b["data"]["source"], "character-table");
    assert_eq!(a["data"]["coeffs"], b["data"]["coeffs"]);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(ffvar(&["predict", "--fn", "nope", "--n", "5", "--h", "0"]).status.code(), Some(2));
    assert_eq!(ffvar(&["empirical", "--fn", "mu", "--q", "4", "--n", "3", "--h", "0"]).status.code(), Some(2));
    assert_eq!(ffvar(&["bogus"]).status.code(), Some(2));
    let out = ffvar(&["empirical", "--fn", "mu", "--q", "13", "--n", "6", "--h", "0", "--budget", "1000"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
}

#[test]
fn sharded_run_merges_to_single_run() {
    let dir = std::env::temp_dir().join(format!("ffvar-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let mut files = Vec::new();
    for i in 0..3 {
        let out = ffvar(&[
            "empirical", "--fn", "lambda", "--with", "mu", "--q", "5", "--n", "4", "--h", "1", "--shards", "3",
            "--shard-index", &i.to_string(),
        ]);
        assert!(out.status.success());
        let path = dir.join(format!("part{i}.json"));
        std::fs::write(&path, &out.stdout).unwrap();
        files.push(path.to_string_lossy().into_owned());
    }
    let mut args = vec!["merge"];
    args.extend(files.iter().map(String::as_str));
    let merged = json(&args);
    let single = json(&["empirical", "--fn", "lambda", "--with", "mu", "--q", "5", "--n", "4", "--h", "1"]);
    assert_eq!(merged["data"], single["data"]);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn lfunc_single_character() {
    let v = json(&["lfunc", "--q", "3", "--M", "3", "--index", "2"]);
    let c = &v["data"]["characters"][0];
    assert_eq!(c["primitive"], true);
    assert_eq!(c["N"].as_u64().unwrap() + c["lambda_chi"].as_u64().unwrap(), 2);
}

#[test]
fn types_with_shift() {
    let v = json(&["types", "--q", "5", "--n", "3", "--shift", "q=5:[1]"]);
    assert_eq!(v["data"]["distribution"]["entries"].as_array().unwrap().len(), 4);
    assert!(v["data"]["shift"]["ratio"].as_f64().unwrap() < 3.0);
}

#[test]
fn verify_fast_passes() {
    let v = json(&["verify", "--level", "fast"]);
    assert_eq!(v["data"]["pass"], true);
}
