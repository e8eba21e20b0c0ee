use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use serde_json::json;
use ssl_gibbs_lab::harness::{self, parse_override, Experiment, ExperimentConfig};
use ssl_gibbs_lab::Error;

/// Run a named experiment and write `<out>/<experiment>.csv` and `.svg`.
#[derive(Parser, Debug)]
#[command(name = "ssl-gibbs-lab", version)]
struct Cli {
    /// One of: mean-gen-sweep, crosscov-threshold-sweep, verify-theorem1,
    /// verify-oracles, sgld-check, logistic-theory-sweep, logistic-empirical,
    /// logistic-excess-risk.
    experiment: String,
    /// TOML config file.
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override a config key of the selected experiment (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

fn report(kind: &str, message: String) {
    eprintln!(
        "{}",
        json!({ "status": "error", "kind": kind, "message": message })
    );
}

fn exit_for(err: Error) -> ExitCode {
    match err {
        Error::Config(msg) => {
            report("config", msg);
            ExitCode::from(2)
        }
        other => {
            report("runtime", other.to_string());
            ExitCode::from(1)
        }
    }
}

fn load(cli: &Cli) -> ssl_gibbs_lab::Result<ExperimentConfig> {
    let experiment: Experiment = cli.experiment.parse()?;
    let overrides = cli
        .set
        .iter()
        .map(|s| parse_override(s))
        .collect::<ssl_gibbs_lab::Result<Vec<_>>>()?;
    let mut cfg = ExperimentConfig::load(experiment, &cli.config, &overrides)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.output_dir = out.clone();
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match load(&cli).and_then(|cfg| harness::init_thread_pool().map(|_| cfg)) {
        Ok(cfg) => cfg,
        Err(e) => return exit_for(e),
    };
    match harness::run(&cfg) {
        Ok(art) if art.outcome.invalid.is_empty() => ExitCode::SUCCESS,
        Ok(art) => {
            let cells: Vec<_> = art
                .outcome
                .invalid
                .iter()
                .map(|c| json!({ "sweep_variable": c.sweep_variable, "reason": c.reason }))
                .collect();
            eprintln!(
                "{}",
                json!({ "status": "error", "kind": "invalid_cells", "experiment": cfg.experiment.as_str(), "cells": cells })
            );
            ExitCode::from(1)
        }
        Err(e) => exit_for(e),
    }
}
