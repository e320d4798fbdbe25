// Copyright 2026 The squeezecool Authors
// SPDX-License-Identifier: Apache-2.0

//! `squeezecool <single-sweep|continuum-sweep|oracle|validate> --config <path> --out <dir>`
//!
//! Exit codes: 0 success, 1 a validation check failed, 2 bad configuration
//! or arguments, 3 computation or i/o failure. Errors go to stderr as one
//! JSON object.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use squeezecool_core::singlemode::Backend;
use squeezecool_core::{run_experiment, Error, ExperimentConfig, ExperimentKind};

#[derive(Parser, Debug)]
#[command(name = "squeezecool", version, about = "Dissipative squeezing simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Single-mode cavity sweep over eta2/eta1 and Q.
    SingleSweep(RunArgs),
    /// Waveguide band sweep over nu and Q.
    ContinuumSweep(RunArgs),
    /// Full qubit-cavity simulation against the effective model.
    Oracle(RunArgs),
    /// Invariant suite; exits 1 if a check fails.
    Validate(RunArgs),
}

#[derive(clap::Args, Debug)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Overrides the config's backend.
    #[arg(long, value_enum)]
    backend: Option<BackendArg>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BackendArg {
    Gaussian,
    Fock,
    Both,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Gaussian => Backend::Gaussian,
            BackendArg::Fock => Backend::Fock,
            BackendArg::Both => Backend::Both,
        }
    }
}

fn fail(kind: &str, message: String, code: u8) -> ExitCode {
    eprintln!("{}", json!({ "error": { "kind": kind, "message": message } }));
    ExitCode::from(code)
}

fn run(kind: ExperimentKind, args: RunArgs) -> ExitCode {
    let mut cfg = match ExperimentConfig::from_file(&args.config) {
        Ok(c) => c,
        Err(Error::Io(m)) => return fail("io", m, 2),
        Err(e) => return fail("config", e.to_string(), 2),
    };
    if cfg.kind != kind {
        return fail("config", format!("config kind is {} but the subcommand is {}", cfg.kind.name(), kind.name()), 2);
    }
    if let Some(b) = args.backend {
        cfg.backend = b.into();
        if let Err(e) = cfg.validate() {
            return fail("config", e.to_string(), 2);
        }
    }
    if args.jobs == Some(0) {
        return fail("config", "--jobs must be positive".into(), 2);
    }
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(args.jobs.unwrap_or(0)).build() {
        Ok(p) => p,
        Err(e) => return fail("runtime", e.to_string(), 3),
    };
    match pool.install(|| run_experiment(&cfg, &args.out, args.jobs)) {
        Ok(outcome) if outcome.passed => ExitCode::SUCCESS,
        Ok(_) => fail("validation", "one or more checks failed; see validate.json".into(), 1),
        Err(e @ Error::Config(_)) | Err(e @ Error::InvalidParameter { .. }) => fail("config", e.to_string(), 2),
        Err(e) => fail("computation", e.to_string(), 3),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::SingleSweep(a) => run(ExperimentKind::SingleSweep, a),
        Command::ContinuumSweep(a) => run(ExperimentKind::ContinuumSweep, a),
        Command::Oracle(a) => run(ExperimentKind::Oracle, a),
        Command::Validate(a) => run(ExperimentKind::Validate, a),
    }
}
