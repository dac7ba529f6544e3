//! Configuration-driven experiment runner: builds problems, runs
//! continuous/discrete experiments, evaluates certificates, and emits CSV
//! data plus a machine-readable pass/fail report.
//!
//! Exit codes: 0 all certificates pass, 1 certificate failure,
//! 2 configuration error, 3 runtime error.

mod catalog;
mod config;
mod runner;

use std::borrow::Cow;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Deserialize;
use serde::Serialize;

use agdlab::error::Error;
use config::ExperimentConfig;
use runner::{run_experiment, ExperimentOutcome, Report};

#[derive(Parser)]
#[command(
    name = "labcli",
    version,
    about = "accelerated-gradient dynamics laboratory"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single experiment config.
    Run {
        config: PathBuf,
        /// Output directory for CSV data and the JSON report.
        #[arg(long, default_value = "lab-out")]
        out: PathBuf,
        /// Multiply every certificate tolerance by this factor.
        #[arg(long, default_value_t = 1.0)]
        tol_scale: f64,
    },
    /// Run every config listed in a manifest and aggregate the reports.
    Suite {
        manifest: PathBuf,
        #[arg(long, default_value = "lab-out")]
        out: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        tol_scale: f64,
        /// Number of experiments to run concurrently.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// List the problem catalog keys.
    ListProblems,
    /// List the laws available in ODE mode.
    ListLaws,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    configs: Vec<PathBuf>,
}

#[derive(Serialize)]
struct SuiteReport {
    artifact_version: String,
    experiments: Vec<SuiteEntry>,
    pass: bool,
}

#[derive(Serialize)]
struct SuiteEntry {
    config_path: String,
    status: String,
    report: Option<Report>,
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Configuration(_) | Error::InvalidParameter(_) | Error::Metadata(_) => 2,
        _ => 3,
    }
}

fn experiment_id(cfg: &ExperimentConfig, path: &Path) -> String {
    match &cfg.id {
        Some(id) => id.clone(),
        None => path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "experiment".into()),
    }
}

fn load_config(path: &Path) -> Result<(ExperimentConfig, serde_json::Value), Error> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Configuration(format!("cannot read {}: {e}", path.display())))?;
    let cfg: ExperimentConfig = serde_json::from_str(&text).map_err(|e| {
        Error::Configuration(format!("{} at line {}, column {}", e, e.line(), e.column()))
    })?;
    let raw: serde_json::Value = serde_json::from_str(&text).unwrap();
    Ok((cfg, raw))
}

fn write_outcome(outcome: &ExperimentOutcome, out_dir: &Path) -> Result<(), Error> {
    fs::create_dir_all(out_dir)
        .map_err(|e| Error::Configuration(format!("cannot create {}: {e}", out_dir.display())))?;
    let id = &outcome.report.experiment;
    for (suffix, contents) in &outcome.files {
        let path = out_dir.join(format!("{id}.{suffix}"));
        fs::write(&path, contents)
            .map_err(|e| Error::Configuration(format!("cannot write {}: {e}", path.display())))?;
    }
    let report_path = out_dir.join(format!("{id}.report.json"));
    let json = serde_json::to_string_pretty(&outcome.report).expect("report serializes");
    fs::write(&report_path, json).map_err(|e| {
        Error::Configuration(format!("cannot write {}: {e}", report_path.display()))
    })?;
    Ok(())
}

fn print_summary(report: &Report) {
    for c in &report.certificates {
        let tag = if c.pass { "pass" } else { "FAIL" };
        println!(
            "  [{tag}] {:<36} worst {:>12.4e}  tol {:>10.2e}  ({:.2}s)",
            c.id, c.worst_violation, c.tolerance, c.runtime_s
        );
    }
    for w in &report.warnings {
        println!("  [warn] {w}");
    }
}

fn run_single(path: &Path, out: &Path, tol_scale: f64) -> u8 {
    let (cfg, raw) = match load_config(path) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let id = experiment_id(&cfg, path);
    match run_experiment(&cfg, raw, id.clone(), tol_scale) {
        Ok(outcome) => {
            println!("experiment '{id}'");
            print_summary(&outcome.report);
            let pass = outcome.report.pass;
            if let Err(e) = write_outcome(&outcome, out) {
                eprintln!("error: {e}");
                return 3;
            }
            if pass {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error in '{id}': {e}");
            exit_code_for(&e)
        }
    }
}

fn run_suite(manifest_path: &Path, out: &Path, tol_scale: f64, jobs: usize) -> u8 {
    let text = match fs::read_to_string(manifest_path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", manifest_path.display());
            return 2;
        }
    };
    let manifest: Manifest = match serde_json::from_str(&text) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: bad manifest: {e}");
            return 2;
        }
    };
    let base = manifest_path.parent().unwrap_or(Path::new("."));
    let paths: Vec<PathBuf> = manifest
        .configs
        .iter()
        .map(|p| {
            if p.is_absolute() {
                p.clone()
            } else {
                base.join(p)
            }
        })
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .expect("thread pool");
    let results: Vec<(String, Result<ExperimentOutcome, Error>)> = pool.install(|| {
        use rayon::prelude::*;
        paths
            .par_iter()
            .map(|path| {
                let shown = path.display().to_string();
                let res = load_config(path).and_then(|(cfg, raw)| {
                    let id = experiment_id(&cfg, path);
                    run_experiment(&cfg, raw, id, tol_scale)
                });
                (shown, res)
            })
            .collect()
    });

    let mut code = 0u8;
    let mut entries = Vec::new();
    for (shown, res) in results {
        match res {
            Ok(outcome) => {
                println!("experiment '{}' from {shown}", outcome.report.experiment);
                print_summary(&outcome.report);
                if !outcome.report.pass {
                    code = code.max(1);
                }
                let status: Cow<str> = if outcome.report.pass {
                    "pass".into()
                } else {
                    "certificate-failure".into()
                };
                if let Err(e) = write_outcome(&outcome, out) {
                    eprintln!("error: {e}");
                    code = code.max(3);
                }
                entries.push(SuiteEntry {
                    config_path: shown,
                    status: status.into_owned(),
                    report: Some(outcome.report),
                });
            }
            Err(e) => {
                eprintln!("error in {shown}: {e}");
                code = code.max(exit_code_for(&e));
                entries.push(SuiteEntry {
                    config_path: shown,
                    status: format!("error: {e}"),
                    report: None,
                });
            }
        }
    }

    let suite = SuiteReport {
        artifact_version: runner::ARTIFACT_VERSION.to_string(),
        pass: code == 0,
        experiments: entries,
    };
    if let Err(e) = fs::create_dir_all(out)
        .map_err(|e| e.to_string())
        .and_then(|_| {
            fs::write(
                out.join("suite.report.json"),
                serde_json::to_string_pretty(&suite).expect("suite report serializes"),
            )
            .map_err(|e| e.to_string())
        })
    {
        eprintln!("error: cannot write suite report: {e}");
        code = code.max(3);
    }
    code
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run {
            config,
            out,
            tol_scale,
        } => run_single(&config, &out, tol_scale),
        Command::Suite {
            manifest,
            out,
            tol_scale,
            jobs,
        } => run_suite(&manifest, &out, tol_scale, jobs),
        Command::ListProblems => {
            for (key, desc) in catalog::CATALOG_HELP {
                println!("{key:<20} {desc}");
            }
            0
        }
        Command::ListLaws => {
            for (law, params, desc) in config::LAW_TABLE {
                let p = if params.is_empty() {
                    "T"
                } else {
                    &format!("T, {params}")
                };
                println!("{law:<15} params: {p:<28} {desc}");
            }
            0
        }
    };
    ExitCode::from(code)
}
