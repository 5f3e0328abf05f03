//! `psum`: batch front end for the verification suites.
//!
//! Exit status is 0 when every row of the report passes, 1 when a check
//! fails (the first failing row goes to stderr), 2 on usage or config
//! errors and 3 when a computation is refused (budget, domain, regime).

mod commands;
mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use psum_core::report::{ReportMeta, SuiteReport};

use crate::commands::{CmdError, Output};
use crate::config::{Format, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "psum", version, about = "Verification suites for perturbed exponential sums and the floor Mangoldt sum")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// key=value config file (overridden by PSUM_* variables and flags)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_parser = ["csv", "json"])]
    format: Option<String>,
    /// rayon worker count; reports do not depend on it
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// fill the wall_ms column
    #[arg(long, global = true)]
    timing: bool,
    /// write the report here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// baseline file for regression checks
    #[arg(long, global = true)]
    baseline: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sieve Λ on (lo, limit] and compare with pointwise Λ
    Sieve(commands::SieveArgs),
    /// Vaaler approximation suite
    Psi(commands::PsiArgs),
    /// Mean-square kernel and double large sieve suites
    Dls(commands::DlsArgs),
    /// Evaluate a perturbed triple sum or run the thm1 regression grid
    #[command(subcommand)]
    Expsum(commands::ExpsumCommand),
    /// Diophantine correlation counts
    Dio(commands::DioArgs),
    /// Vaughan identity against the direct sieve sum
    Vaughan(commands::VaughanArgs),
    /// The floor Mangoldt sum S(x)
    Msum(commands::MsumArgs),
    /// Σ_{D<d≤2D} Λ(d)ψ(x/(d+δ)), direct and through Vaughan's identity
    #[command(name = "frak-s")]
    FrakS(commands::FrakSArgs),
    /// Error curve E(x) = S(x) − Cx and its log-log slope
    Fit(commands::FitArgs),
    /// Exact exponent calculus
    #[command(subcommand)]
    Expcalc(commands::ExpcalcCommand),
}

fn resolve(global: &GlobalArgs) -> Result<RunConfig, String> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &global.config {
        cfg.apply_file(path)?;
    }
    cfg.apply_env(std::env::vars())?;
    if let Some(s) = global.seed {
        cfg.seed = s;
    }
    if let Some(f) = &global.format {
        cfg.format = f.parse()?;
    }
    if let Some(w) = global.workers {
        cfg.workers = w;
    }
    if global.timing {
        cfg.timing = true;
    }
    if let Some(b) = &global.baseline {
        cfg.baseline = b.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn emit(report: &mut SuiteReport, cfg: &RunConfig, hash: String, out: Option<&PathBuf>, wall_ms: f64) -> std::io::Result<()> {
    if cfg.timing {
        for r in &mut report.rows {
            r.wall_ms = Some(wall_ms);
        }
    }
    let mut sink: Box<dyn Write> = match out {
        Some(path) => Box::new(std::fs::File::create(path)?),
        None => Box::new(std::io::LineWriter::new(std::io::stdout().lock())),
    };
    let res = match cfg.format {
        Format::Csv => report.write_csv(&mut sink, cfg.timing),
        Format::Json => {
            let meta = ReportMeta {
                version: env!("CARGO_PKG_VERSION").to_string(),
                config_hash: hash,
                suite: report.suite.clone(),
            };
            report.write_json(&mut sink, &meta, cfg.timing)
        }
    };
    res.map_err(std::io::Error::other)?;
    sink.flush()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match resolve(&cli.global) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("psum: {e}");
            return ExitCode::from(2);
        }
    };
    if cfg.workers > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build_global() {
            eprintln!("psum: cannot start {} workers: {e}", cfg.workers);
            return ExitCode::from(2);
        }
    }
    let hash = cfg.hash(&format!("{:?}", cli.command));
    let start = Instant::now();
    let output = match commands::run(&cli.command, &cfg) {
        Ok(o) => o,
        Err(CmdError::Usage(msg)) => {
            eprintln!("psum: {msg}");
            return ExitCode::from(2);
        }
        Err(CmdError::Core(e)) => {
            eprintln!("psum: {e}");
            return ExitCode::from(3);
        }
    };
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    match output {
        Output::Report(mut report) => {
            if let Err(e) = emit(&mut report, &cfg, hash, cli.global.out.as_ref(), wall_ms) {
                eprintln!("psum: writing report: {e}");
                return ExitCode::from(3);
            }
            match report.first_failure() {
                None => ExitCode::SUCCESS,
                Some(r) => {
                    eprintln!(
                        "psum: first failure in {}: {} lhs={} rhs={} ratio={}",
                        r.suite,
                        r.params_string(),
                        r.lhs,
                        r.rhs,
                        r.ratio
                    );
                    ExitCode::from(1)
                }
            }
        }
        Output::Text { lines, json, pass } => {
            let body = match cfg.format {
                Format::Csv => lines.join("\n") + "\n",
                Format::Json => format!("{json:#}\n"),
            };
            let written = match cli.global.out.as_ref() {
                Some(path) => std::fs::write(path, body),
                None => std::io::stdout().write_all(body.as_bytes()),
            };
            if let Err(e) = written {
                eprintln!("psum: {e}");
                return ExitCode::from(3);
            }
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}
