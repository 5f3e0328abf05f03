use std::path::PathBuf;
use std::process::{Command, Output};

fn psum(args: &[&str]) -> Output {
    psum_env(args, &[])
}

fn psum_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_psum"));
    cmd.args(args);
    for (k, _) in std::env::vars() {
        if k.starts_with("PSUM_") {
            cmd.env_remove(k);
        }
    }
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("psum runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("psum-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

/// Field `col` of the first data row of a CSV report.
fn field(csv: &str, col: usize) -> String {
    let row = csv.lines().nth(1).expect("data row");
    // params may not contain commas, so a plain split is enough
    row.split(',').nth(col).unwrap().to_string()
}

#[test]
fn msum_direct_is_log_60() {
    let o = psum(&["msum", "--x", "10", "--method", "direct"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("suite,params,lhs,rhs,ratio,verdict,seed,wall_ms\n"));
    let v: f64 = field(&text, 2).parse().unwrap();
    assert!((v - 60f64.ln()).abs() < 1e-12);
}

#[test]
fn expcalc_balance_gives_17_36() {
    let o = psum(&[
        "expcalc",
        "balance",
        "--terms",
        "E, x^{17/19}*E^{-17/19}, x^{212/285}*E^{-329/570}",
        "--range",
        "8/17:1/2",
    ]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().next(), Some("E = x^{17/36}"));
}

#[test]
fn dio_b0_counts_six() {
    let o = psum(&["dio", "--kind", "B0", "--N", "2", "--beta", "2", "--X", "100"]);
    assert!(o.status.success());
    assert_eq!(field(&stdout(&o), 2), "6");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(psum(&["msum"]).status.code(), Some(2));
    assert_eq!(psum(&["nope"]).status.code(), Some(2));
    assert_eq!(psum(&["--format", "xml", "msum", "--x", "3"]).status.code(), Some(2));
    let o = psum(&["expcalc", "substitute", "--expr", "Q^2", "--var", "D", "--with", "x"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn refused_computations_exit_3() {
    let o = psum(&["frak-s", "--x", "1", "--D", "10"]);
    assert_eq!(o.status.code(), Some(3));
    let o = psum_env(&["msum", "--x", "100000"], &[("PSUM_SIEVE_LIMIT", "1000")]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn failing_dominance_exits_1() {
    let o = psum(&["expcalc", "dominate", "--term", "D", "--by", "D^{1/2}", "--range", "0:1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("fails"));
    let ok = psum(&["expcalc", "dominate", "--term", "D^{8/9}", "--by", "D^{17/19}", "--range", "0:1"]);
    assert!(ok.status.success());
}

#[test]
fn baseline_regression_echoes_first_failure() {
    let base = scratch("baseline.json");
    let _ = std::fs::remove_file(&base);
    let b = base.to_str().unwrap();
    let args = ["--baseline", b, "expsum", "scan", "--cases", "8", "--max-terms", "20000"];
    let mut rec: Vec<&str> = args.to_vec();
    rec.push("--record-baseline");
    assert!(psum(&rec).status.success());
    assert!(psum(&args).status.success());
    // shrink the stored baseline so every ratio is now 10× over it
    let text = std::fs::read_to_string(&base).unwrap();
    let mut map: std::collections::BTreeMap<String, f64> = serde_json::from_str(&text).unwrap();
    for v in map.values_mut() {
        *v *= 1e-6;
    }
    std::fs::write(&base, serde_json::to_string(&map).unwrap()).unwrap();
    let o = psum(&args);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("first failure in thm1_grid"));
}

#[test]
fn reports_do_not_depend_on_workers() {
    let runs: Vec<Vec<u8>> = ["1", "2", "8"]
        .iter()
        .map(|w| {
            let o = psum(&["--workers", w, "psi", "--cases", "3000"]);
            assert!(o.status.success());
            o.stdout
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
    assert_eq!(runs[0], runs[2]);
    let a = psum(&["--workers", "1", "--format", "json", "dls", "--cases", "60"]).stdout;
    let b = psum(&["--workers", "8", "--format", "json", "dls", "--cases", "60"]).stdout;
    assert_eq!(a, b);
}

#[test]
fn config_layers_and_seed_echo() {
    let cfg = scratch("run.cfg");
    std::fs::write(&cfg, "# test config\nseed = 5\nformat = json\n").unwrap();
    let c = cfg.to_str().unwrap();
    let seed_of = |o: &Output| -> u64 {
        let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        doc["rows"][0]["seed"].as_u64().unwrap()
    };
    let args = ["--config", c, "msum", "--x", "50"];
    assert_eq!(seed_of(&psum(&args)), 5);
    assert_eq!(seed_of(&psum_env(&args, &[("PSUM_SEED", "6")])), 6);
    let mut flagged = args.to_vec();
    flagged.extend(["--seed", "7"]);
    assert_eq!(seed_of(&psum_env(&flagged, &[("PSUM_SEED", "6")])), 7);

    std::fs::write(&cfg, "colour = blue\n").unwrap();
    assert_eq!(psum(&["--config", c, "msum", "--x", "5"]).status.code(), Some(2));
}

#[test]
fn json_meta_hash_is_stable() {
    let hash = |args: &[&str]| -> String {
        let doc: serde_json::Value = serde_json::from_slice(&psum(args).stdout).unwrap();
        doc["meta"]["config_hash"].as_str().unwrap().to_string()
    };
    let a = hash(&["--format", "json", "vaughan", "--D", "101", "--g", "2"]);
    let b = hash(&["--format", "json", "--workers", "2", "vaughan", "--D", "101", "--g", "2"]);
    let c = hash(&["--format", "json", "--seed", "1", "vaughan", "--D", "101", "--g", "2"]);
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn timing_fills_wall_ms() {
    let o = psum(&["--timing", "sieve", "--limit", "10000"]);
    assert!(o.status.success());
    assert_ne!(field(&stdout(&o), 7), "NA");
    let o = psum(&["sieve", "--limit", "10000", "--lo", "5000"]);
    assert!(o.status.success());
    assert_eq!(field(&stdout(&o), 7), "NA");
}

#[test]
fn out_file_receives_the_report() {
    let path = scratch("vaughan.csv");
    let o = psum(&["--out", path.to_str().unwrap(), "vaughan", "--D", "101", "--g", "2"]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 1 + 3 + 1);
}
