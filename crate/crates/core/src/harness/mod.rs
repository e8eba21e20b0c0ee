//! Named experiments, their CSV tables and SVG plots.

mod config;
mod experiments;
mod svg;
mod sweep;

pub use config::{
    parse_override, Experiment, ExperimentConfig, LogisticEmpiricalParams, LogisticTheoryParams,
    MeanGenSweepParams, OraclesParams, Params, SgldParams, Theorem1Params, ThresholdSweepParams,
};
pub use experiments::{ASSEMBLY_TOLERANCE, GRADIENT_TOLERANCE};
pub use svg::render_svg;
pub use sweep::{format_float, Quantity, SweepResult, SweepRow, CSV_HEADER};

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "SSL_GIBBS_THREADS";

/// A sweep point that could not be computed reliably.
#[derive(Debug, Clone, PartialEq)]
pub struct InvalidCell {
    pub sweep_variable: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub result: SweepResult,
    pub invalid: Vec<InvalidCell>,
}

impl Outcome {
    fn new(result: SweepResult) -> Self {
        Outcome {
            result,
            invalid: Vec::new(),
        }
    }
}

/// Files written by [`run`].
#[derive(Debug, Clone, PartialEq)]
pub struct RunArtifacts {
    pub csv: PathBuf,
    pub svg: PathBuf,
    pub outcome: Outcome,
}

/// Compute an experiment without touching the filesystem.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Outcome> {
    cfg.validate()?;
    let root = RngStream::new(cfg.seed, 0);
    let mut outcome = match &cfg.params {
        Params::MeanGenSweep(p) => experiments::mean_gen_sweep(p, &root),
        Params::CrossCovThresholdSweep(p) => experiments::threshold_sweep(p, &root),
        Params::VerifyTheorem1(p) => experiments::verify_theorem1(p, &root),
        Params::VerifyOracles(p) => experiments::verify_oracles(p, &root),
        Params::SgldCheck(p) => experiments::sgld_check(p, &root),
        Params::LogisticTheorySweep(p) => experiments::logistic_theory_sweep(p, &root),
        Params::LogisticEmpirical(p) => experiments::logistic_empirical(p, &root),
        Params::LogisticExcessRisk(p) => experiments::logistic_excess_risk(p, &root),
    }?;
    outcome.result.sort();
    Ok(outcome)
}

fn log_x(experiment: Experiment) -> bool {
    matches!(
        experiment,
        Experiment::MeanGenSweep
            | Experiment::VerifyOracles
            | Experiment::LogisticTheorySweep
            | Experiment::LogisticEmpirical
            | Experiment::LogisticExcessRisk
    )
}

/// One line per sweep point: `label=x quantity=value±se ...`.
pub fn summary_lines(result: &SweepResult) -> Vec<String> {
    let mut points: BTreeMap<u64, (f64, Vec<String>)> = BTreeMap::new();
    for r in &result.rows {
        // total-order key so -0.0 and 0.0 stay distinct but sort correctly
        let bits = r.sweep_variable.to_bits();
        let key = if bits >> 63 == 1 {
            !bits
        } else {
            bits | (1 << 63)
        };
        let entry = points
            .entry(key)
            .or_insert_with(|| (r.sweep_variable, Vec::new()));
        let v = match r.std_err {
            Some(se) => format!("{}={:.6e}±{:.2e}", r.quantity, r.value, se),
            None => format!("{}={:.6e}", r.quantity, r.value),
        };
        entry.1.push(v);
    }
    points
        .into_values()
        .map(|(x, parts)| format!("{}={} {}", result.sweep_label, x, parts.join(" ")))
        .collect()
}

/// Run, write `<output_dir>/<experiment>.csv` and `.svg`, and print a
/// summary line per sweep point.
pub fn run(cfg: &ExperimentConfig) -> Result<RunArtifacts> {
    let outcome = run_experiment(cfg)?;
    let dir = &cfg.output_dir;
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.clone(),
        source,
    })?;
    let name = cfg.experiment.as_str();
    let csv = dir.join(format!("{name}.csv"));
    let svg = dir.join(format!("{name}.svg"));
    let file = fs::File::create(&csv).map_err(|source| Error::Io {
        path: csv.clone(),
        source,
    })?;
    outcome.result.write_csv(file)?;
    fs::write(
        &svg,
        render_svg(name, &outcome.result, log_x(cfg.experiment)),
    )
    .map_err(|source| Error::Io {
        path: svg.clone(),
        source,
    })?;
    for line in summary_lines(&outcome.result) {
        println!("{line}");
    }
    Ok(RunArtifacts { csv, svg, outcome })
}

/// Re-render the plot for a CSV written by [`run`].
pub fn svg_from_csv(experiment: Experiment, csv: &std::path::Path) -> Result<String> {
    let label = match experiment {
        Experiment::CrossCovThresholdSweep => "threshold",
        Experiment::VerifyTheorem1 => "draw",
        Experiment::VerifyOracles => "alpha",
        Experiment::SgldCheck => "coordinate",
        _ => "lambda",
    };
    let result = SweepResult::read_csv_file(csv, label)?;
    Ok(render_svg(experiment.as_str(), &result, log_x(experiment)))
}

/// Threshold with the smallest cross-covariance estimate; ties go to the
/// smaller threshold, which keeps more pseudo-labels.
pub fn select_threshold(sweep: &SweepResult) -> Result<f64> {
    sweep
        .series(Quantity::CrossCov)
        .map(|r| (r.value, r.sweep_variable))
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)))
        .map(|(_, t)| t)
        .ok_or_else(|| Error::invalid("sweep", "no cross_cov rows to select a threshold from"))
}

/// Size the global worker pool from `SSL_GIBBS_THREADS` if set.
pub fn init_thread_pool() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().ok().filter(|t| *t > 0).ok_or_else(|| {
        Error::Config(format!(
            "{THREADS_ENV} must be a positive integer, got {raw:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::Config(format!("cannot build worker pool: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cc_sweep(points: &[(f64, f64)]) -> SweepResult {
        let mut s = SweepResult::new("threshold");
        for &(t, v) in points {
            s.push(SweepRow {
                sweep_variable: t,
                quantity: Quantity::CrossCov,
                value: v,
                std_err: Some(0.01),
                n: Some(5),
                m: None,
            });
        }
        s
    }

    #[test]
    fn select_threshold_rules() {
        assert_eq!(
            select_threshold(&cc_sweep(&[(0.0, 0.3), (1.0, 0.2), (2.0, 0.1)])).unwrap(),
            2.0
        );
        assert_eq!(
            select_threshold(&cc_sweep(&[(3.0, 0.1), (1.0, 0.1), (2.0, 0.5)])).unwrap(),
            1.0
        );
        assert!(select_threshold(&SweepResult::new("threshold")).is_err());
    }

    #[test]
    fn assembly_experiment_is_clean() {
        let cfg = ExperimentConfig::defaults(Experiment::VerifyTheorem1);
        let out = run_experiment(&cfg).unwrap();
        assert!(out.invalid.is_empty());
        assert_eq!(out.result.series(Quantity::AssemblyResidual).count(), 100);
    }

    #[test]
    fn summary_has_one_line_per_point() {
        let s = cc_sweep(&[(2.0, 0.1), (0.0, 0.3), (0.0, 0.3)]);
        let lines = summary_lines(&s);
        assert_eq!(lines.len(), 2);
        assert!(lines[0].starts_with("threshold=0 "));
    }
}
