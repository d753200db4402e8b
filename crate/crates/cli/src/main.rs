//! `pdm`: batch experiment runner for the predictive-maintenance pipeline.

mod artifacts;
mod commands;
mod config;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::Context;
use config::RunConfig;

#[derive(Debug, Parser)]
#[command(name = "pdm", version, about = "Predictive-maintenance classification experiments")]
struct Cli {
    /// TOML run configuration, or a manifest.json from an earlier run.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Use this seed for the split, SMOTE, training and cross-validation.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (overrides `out_dir`).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Override a config key, e.g. `--set cv.k=10`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Suppress progress output.
    #[arg(long, short, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Load, validate, scale, encode, split and balance the dataset.
    Prepare,
    /// Fit one model, or `all` thirteen, on the balanced training split.
    Train {
        #[arg(default_value = "all")]
        model: String,
    },
    /// Score trained models on the held-out test split.
    Evaluate {
        #[arg(default_value = "all")]
        model: String,
    },
    /// Repeated k-fold cross-validation of `cv.model`.
    Cv {
        /// Model to cross-validate (overrides `cv.model`).
        #[arg(long)]
        model: Option<String>,
    },
    /// TOPSIS ranking of every model with a metrics file.
    Rank,
    /// prepare, train all, evaluate all, cv and rank in sequence.
    Run,
    /// Write a synthetic dataset with the AI4I column layout.
    Synth {
        #[arg(long, default_value_t = 10_000)]
        rows: usize,
        #[arg(long, value_name = "PATH")]
        output: PathBuf,
    },
}

/// A failure reported as `error: <kind>: <message>` on one line.
#[derive(Debug)]
pub struct Failure {
    pub kind: &'static str,
    pub message: String,
}

impl Failure {
    pub fn config(message: impl Into<String>) -> Self {
        Failure {
            kind: "InvalidConfig",
            message: message.into(),
        }
    }

    pub fn context(self, ctx: impl std::fmt::Display) -> Self {
        Failure {
            message: format!("{ctx}: {}", self.message),
            ..self
        }
    }

    fn line(&self) -> String {
        let flat: Vec<&str> = self.message.split_whitespace().collect();
        format!("error: {}: {}", self.kind, flat.join(" "))
    }
}

impl From<pdm_core::Error> for Failure {
    fn from(e: pdm_core::Error) -> Self {
        Failure {
            kind: e.kind(),
            message: e.to_string(),
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let mut sets = cli.set.clone();
    if let Command::Cv { model: Some(m) } = &cli.command {
        sets.push(format!("cv.model=\"{m}\""));
    }
    let mut cfg = RunConfig::load(cli.config.as_deref(), &sets)?;
    if let Some(seed) = cli.seed {
        cfg.set_seed(seed);
    }
    if let Some(out) = cli.out {
        cfg.out_dir = out;
    }
    let mut ctx = Context::new(cfg);
    ctx.verbose = !cli.quiet;
    match cli.command {
        Command::Prepare => commands::prepare(&ctx).map(drop),
        Command::Train { model } => commands::train(&ctx, &commands::parse_selector(&model)?).map(drop),
        Command::Evaluate { model } => commands::evaluate(&ctx, &commands::parse_selector(&model)?).map(drop),
        Command::Cv { .. } => commands::cv(&ctx).map(drop),
        Command::Rank => commands::rank(&ctx).map(drop),
        Command::Run => commands::run_all(&ctx).map(drop),
        Command::Synth { rows, output } => {
            commands::synth(rows, cli.seed.unwrap_or(pdm_core::rng::DEFAULT_SEED), &output)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let first = e.to_string();
            let first = first.lines().next().unwrap_or("").trim_start_matches("error: ");
            eprintln!("error: Usage: {first}");
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.line());
            ExitCode::FAILURE
        }
    }
}
