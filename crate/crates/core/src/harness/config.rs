//! Experiment configuration.
//!
//! A config file is TOML with two optional top-level keys (`seed`,
//! `output_dir`) and one table per experiment, named as on the command
//! line:
//!
//! ```toml
//! seed = 7
//! output_dir = "out"
//!
//! [mean-gen-sweep]
//! sigma = 1.0
//! n = 5
//! lambda_grid = [0, 0.5, 1, 3, 10, 30, 100]
//! ```
//!
//! Unknown keys anywhere are rejected. Missing tables and keys take their
//! defaults.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::ssmle_logistic::MIN_QUADRATURE;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Experiment {
    MeanGenSweep,
    CrossCovThresholdSweep,
    VerifyTheorem1,
    VerifyOracles,
    SgldCheck,
    LogisticTheorySweep,
    LogisticEmpirical,
    LogisticExcessRisk,
}

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Experiment::MeanGenSweep,
        Experiment::CrossCovThresholdSweep,
        Experiment::VerifyTheorem1,
        Experiment::VerifyOracles,
        Experiment::SgldCheck,
        Experiment::LogisticTheorySweep,
        Experiment::LogisticEmpirical,
        Experiment::LogisticExcessRisk,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Experiment::MeanGenSweep => "mean-gen-sweep",
            Experiment::CrossCovThresholdSweep => "crosscov-threshold-sweep",
            Experiment::VerifyTheorem1 => "verify-theorem1",
            Experiment::VerifyOracles => "verify-oracles",
            Experiment::SgldCheck => "sgld-check",
            Experiment::LogisticTheorySweep => "logistic-theory-sweep",
            Experiment::LogisticEmpirical => "logistic-empirical",
            Experiment::LogisticExcessRisk => "logistic-excess-risk",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .iter()
            .copied()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Experiment::ALL.iter().map(|e| e.as_str()).collect();
                Error::Config(format!(
                    "unknown experiment {s:?}; expected one of {}",
                    names.join(", ")
                ))
            })
    }
}

fn default_lambda_grid() -> Vec<f64> {
    vec![0.0, 0.5, 1.0, 3.0, 10.0, 30.0, 100.0]
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MeanGenSweepParams {
    pub sigma: f64,
    pub dim: usize,
    pub n: usize,
    pub lambda_grid: Vec<f64>,
    pub trials: u64,
    /// Confidence threshold; absent means the sign labeler.
    pub threshold: Option<f64>,
}

impl Default for MeanGenSweepParams {
    fn default() -> Self {
        MeanGenSweepParams {
            sigma: 1.0,
            dim: 2,
            n: 5,
            lambda_grid: default_lambda_grid(),
            trials: 1_000_000,
            threshold: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ThresholdSweepParams {
    pub sigma: f64,
    pub dim: usize,
    pub n: usize,
    pub threshold_grid: Vec<f64>,
    pub trials: u64,
}

impl Default for ThresholdSweepParams {
    fn default() -> Self {
        ThresholdSweepParams {
            sigma: 1.0,
            dim: 2,
            n: 5,
            threshold_grid: (0..=10).map(f64::from).collect(),
            trials: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Theorem1Params {
    pub draws: usize,
}

impl Default for Theorem1Params {
    fn default() -> Self {
        Theorem1Params { draws: 100 }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OraclesParams {
    pub sigma: f64,
    pub dim: usize,
    pub n: usize,
    pub m: usize,
    pub alpha: f64,
    /// α values for the posterior-draw runs of the definition oracle.
    pub alpha_grid: Vec<f64>,
    pub trials: u64,
    pub threshold: Option<f64>,
}

impl Default for OraclesParams {
    fn default() -> Self {
        OraclesParams {
            sigma: 1.0,
            dim: 2,
            n: 5,
            m: 25,
            alpha: 1.0,
            alpha_grid: vec![0.1, 10.0],
            trials: 1_000_000,
            threshold: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SgldParams {
    pub sigma: f64,
    pub dim: usize,
    pub n: usize,
    pub m: usize,
    pub alpha: f64,
    /// Defaults to `0.01/alpha`.
    pub step_size: Option<f64>,
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub batches: usize,
    /// Regularisation of the logistic risk used in the gradient check.
    pub nu: f64,
    pub probes: usize,
}

impl Default for SgldParams {
    fn default() -> Self {
        SgldParams {
            sigma: 1.0,
            dim: 2,
            n: 5,
            m: 25,
            alpha: 1.0,
            step_size: None,
            iterations: 200_000,
            burn_in: 2_000,
            thin: 1,
            batches: 50,
            nu: 1e-3,
            probes: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LogisticTheoryParams {
    pub dim: usize,
    pub mu: f64,
    pub nu: f64,
    pub quadrature_size: usize,
    pub lambda_grid: Vec<f64>,
    /// Labeled sample size used to scale the excess-risk variance.
    pub n: usize,
}

impl Default for LogisticTheoryParams {
    fn default() -> Self {
        LogisticTheoryParams {
            dim: 2,
            mu: 2.0,
            nu: 1e-3,
            quadrature_size: 1_000_000,
            lambda_grid: default_lambda_grid(),
            n: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LogisticEmpiricalParams {
    pub dim: usize,
    pub mu: f64,
    pub nu: f64,
    pub n: usize,
    pub lambda_grid: Vec<f64>,
    pub repetitions: usize,
    pub test_size: usize,
    /// Optional CSV dataset used instead of synthetic draws.
    pub data_path: Option<PathBuf>,
    /// Label column of `data_path`: a header name or a zero-based index.
    pub label_column: Option<String>,
}

impl Default for LogisticEmpiricalParams {
    fn default() -> Self {
        LogisticEmpiricalParams {
            dim: 2,
            mu: 2.0,
            nu: 1e-3,
            n: 1000,
            lambda_grid: default_lambda_grid(),
            repetitions: 40,
            test_size: 200_000,
            data_path: None,
            label_column: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Params {
    MeanGenSweep(MeanGenSweepParams),
    CrossCovThresholdSweep(ThresholdSweepParams),
    VerifyTheorem1(Theorem1Params),
    VerifyOracles(OraclesParams),
    SgldCheck(SgldParams),
    LogisticTheorySweep(LogisticTheoryParams),
    LogisticEmpirical(LogisticEmpiricalParams),
    LogisticExcessRisk(LogisticTheoryParams),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileSchema {
    seed: Option<u64>,
    output_dir: Option<PathBuf>,
    #[serde(rename = "mean-gen-sweep")]
    mean_gen_sweep: Option<MeanGenSweepParams>,
    #[serde(rename = "crosscov-threshold-sweep")]
    crosscov_threshold_sweep: Option<ThresholdSweepParams>,
    #[serde(rename = "verify-theorem1")]
    verify_theorem1: Option<Theorem1Params>,
    #[serde(rename = "verify-oracles")]
    verify_oracles: Option<OraclesParams>,
    #[serde(rename = "sgld-check")]
    sgld_check: Option<SgldParams>,
    #[serde(rename = "logistic-theory-sweep")]
    logistic_theory_sweep: Option<LogisticTheoryParams>,
    #[serde(rename = "logistic-empirical")]
    logistic_empirical: Option<LogisticEmpiricalParams>,
    #[serde(rename = "logistic-excess-risk")]
    logistic_excess_risk: Option<LogisticTheoryParams>,
}

/// A fully resolved, validated run description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub params: Params,
}

fn parse_override_value(raw: &str) -> toml::Value {
    match toml::from_str::<toml::Table>(&format!("v = {raw}")) {
        Ok(mut t) => t
            .remove("v")
            .unwrap_or_else(|| toml::Value::String(raw.to_string())),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}

/// Split `key=value`.
pub fn parse_override(s: &str) -> Result<(String, String)> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override {s:?} is not of the form key=value")))?;
    let k = k.trim();
    if k.is_empty() {
        return Err(Error::Config(format!("override {s:?} has an empty key")));
    }
    Ok((k.to_string(), v.trim().to_string()))
}

impl ExperimentConfig {
    /// Defaults for `experiment` with no file.
    pub fn defaults(experiment: Experiment) -> Self {
        Self::from_toml_str(experiment, "", &[]).expect("defaults are valid")
    }

    pub fn load(
        experiment: Experiment,
        path: &Path,
        overrides: &[(String, String)],
    ) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(experiment, &text, overrides)
    }

    /// Parse `text`, apply `key=value` overrides to the experiment's table
    /// (or to `seed` / `output_dir`), then validate.
    pub fn from_toml_str(
        experiment: Experiment,
        text: &str,
        overrides: &[(String, String)],
    ) -> Result<Self> {
        let mut table: toml::Table =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        for (key, raw) in overrides {
            let value = parse_override_value(raw);
            if key == "seed" || key == "output_dir" {
                table.insert(key.clone(), value);
            } else {
                let section = table
                    .entry(experiment.as_str())
                    .or_insert_with(|| toml::Value::Table(toml::Table::new()));
                match section {
                    toml::Value::Table(t) => {
                        t.insert(key.clone(), value);
                    }
                    _ => return Err(Error::Config(format!("[{experiment}] is not a table"))),
                }
            }
        }
        let file: FileSchema = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        let params = match experiment {
            Experiment::MeanGenSweep => {
                Params::MeanGenSweep(file.mean_gen_sweep.unwrap_or_default())
            }
            Experiment::CrossCovThresholdSweep => {
                Params::CrossCovThresholdSweep(file.crosscov_threshold_sweep.unwrap_or_default())
            }
            Experiment::VerifyTheorem1 => {
                Params::VerifyTheorem1(file.verify_theorem1.unwrap_or_default())
            }
            Experiment::VerifyOracles => {
                Params::VerifyOracles(file.verify_oracles.unwrap_or_default())
            }
            Experiment::SgldCheck => Params::SgldCheck(file.sgld_check.unwrap_or_default()),
            Experiment::LogisticTheorySweep => {
                Params::LogisticTheorySweep(file.logistic_theory_sweep.unwrap_or_default())
            }
            Experiment::LogisticEmpirical => {
                Params::LogisticEmpirical(file.logistic_empirical.unwrap_or_default())
            }
            Experiment::LogisticExcessRisk => {
                Params::LogisticExcessRisk(file.logistic_excess_risk.unwrap_or_default())
            }
        };
        let cfg = ExperimentConfig {
            experiment,
            seed: file.seed.unwrap_or(0),
            output_dir: file.output_dir.unwrap_or_else(|| PathBuf::from("out")),
            params,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        match &self.params {
            Params::MeanGenSweep(p) => {
                mixture(p.sigma, p.dim)?;
                positive_usize("n", p.n)?;
                grid("lambda_grid", &p.lambda_grid)?;
                trials("trials", p.trials)?;
                if let Some(t) = p.threshold {
                    nonneg("threshold", t)?;
                }
            }
            Params::CrossCovThresholdSweep(p) => {
                mixture(p.sigma, p.dim)?;
                positive_usize("n", p.n)?;
                grid("threshold_grid", &p.threshold_grid)?;
                trials("trials", p.trials)?;
            }
            Params::VerifyTheorem1(p) => positive_usize("draws", p.draws)?,
            Params::VerifyOracles(p) => {
                mixture(p.sigma, p.dim)?;
                if p.dim < 2 {
                    return Err(Error::Config(
                        "dim must be at least 2 for the E_n estimator".into(),
                    ));
                }
                positive_usize("n", p.n)?;
                positive_usize("m", p.m)?;
                positive("alpha", p.alpha)?;
                for a in &p.alpha_grid {
                    positive("alpha_grid", *a)?;
                }
                trials("trials", p.trials)?;
                if let Some(t) = p.threshold {
                    nonneg("threshold", t)?;
                }
            }
            Params::SgldCheck(p) => {
                mixture(p.sigma, p.dim)?;
                positive_usize("n", p.n)?;
                positive("alpha", p.alpha)?;
                if let Some(b) = p.step_size {
                    positive("step_size", b)?;
                }
                positive_usize("thin", p.thin)?;
                if p.iterations <= p.burn_in {
                    return Err(Error::Config("iterations must exceed burn_in".into()));
                }
                if p.batches < 2 {
                    return Err(Error::Config("batches must be at least 2".into()));
                }
                nonneg("nu", p.nu)?;
                positive_usize("probes", p.probes)?;
            }
            Params::LogisticTheorySweep(p) | Params::LogisticExcessRisk(p) => {
                positive_usize("dim", p.dim)?;
                nonneg("mu", p.mu)?;
                positive("nu", p.nu)?;
                if p.quadrature_size < MIN_QUADRATURE {
                    return Err(Error::Config(format!(
                        "quadrature_size must be at least {MIN_QUADRATURE}"
                    )));
                }
                positive_usize("n", p.n)?;
                grid("lambda_grid", &p.lambda_grid)?;
            }
            Params::LogisticEmpirical(p) => {
                positive_usize("dim", p.dim)?;
                nonneg("mu", p.mu)?;
                positive("nu", p.nu)?;
                positive_usize("n", p.n)?;
                positive_usize("test_size", p.test_size)?;
                grid("lambda_grid", &p.lambda_grid)?;
                if p.repetitions < 2 {
                    return Err(Error::Config("repetitions must be at least 2".into()));
                }
                if p.label_column.is_some() && p.data_path.is_none() {
                    return Err(Error::Config("label_column given without data_path".into()));
                }
            }
        }
        Ok(())
    }
}

fn positive_usize(name: &str, v: usize) -> Result<()> {
    if v == 0 {
        Err(Error::Config(format!("{name} must be at least 1")))
    } else {
        Ok(())
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

fn nonneg(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "{name} must be finite and nonnegative, got {v}"
        )))
    }
}

fn trials(name: &str, v: u64) -> Result<()> {
    if v < 2 {
        Err(Error::Config(format!("{name} must be at least 2")))
    } else {
        Ok(())
    }
}

fn grid(name: &str, values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::Config(format!("{name} must not be empty")));
    }
    for v in values {
        nonneg(name, *v)?;
    }
    Ok(())
}

fn mixture(sigma: f64, dim: usize) -> Result<()> {
    nonneg("sigma", sigma)?;
    positive_usize("dim", dim)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn experiment_names_round_trip() {
        for e in Experiment::ALL {
            assert_eq!(e.as_str().parse::<Experiment>().unwrap(), e);
        }
        assert!("figure-9".parse::<Experiment>().is_err());
    }

    #[test]
    fn defaults_and_sections() {
        let cfg = ExperimentConfig::from_toml_str(
            Experiment::MeanGenSweep,
            "seed = 9\n[mean-gen-sweep]\nsigma = 0.5\nn = 100\n[sgld-check]\nalpha = 2.0\n",
            &[],
        )
        .unwrap();
        assert_eq!(cfg.seed, 9);
        match cfg.params {
            Params::MeanGenSweep(p) => {
                assert_eq!(p.sigma, 0.5);
                assert_eq!(p.n, 100);
                assert_eq!(p.lambda_grid, default_lambda_grid());
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = ExperimentConfig::from_toml_str(
            Experiment::MeanGenSweep,
            "[mean-gen-sweep]\nsigmaa = 1\n",
            &[],
        );
        assert!(matches!(err, Err(Error::Config(_))));
        let err = ExperimentConfig::from_toml_str(Experiment::MeanGenSweep, "colour = 1\n", &[]);
        assert!(err.is_err());
        let err =
            ExperimentConfig::from_toml_str(Experiment::MeanGenSweep, "[figure-9]\nx = 1\n", &[]);
        assert!(err.is_err());
    }

    #[test]
    fn overrides_apply_to_selected_section() {
        let sets = vec![
            parse_override("n=100").unwrap(),
            parse_override("seed = 3").unwrap(),
            parse_override("lambda_grid=[0, 1]").unwrap(),
        ];
        let cfg = ExperimentConfig::from_toml_str(Experiment::MeanGenSweep, "", &sets).unwrap();
        assert_eq!(cfg.seed, 3);
        match cfg.params {
            Params::MeanGenSweep(p) => {
                assert_eq!(p.n, 100);
                assert_eq!(p.lambda_grid, vec![0.0, 1.0]);
            }
            _ => unreachable!(),
        }
        let path = vec![parse_override("data_path=/tmp/x.csv").unwrap()];
        let cfg =
            ExperimentConfig::from_toml_str(Experiment::LogisticEmpirical, "", &path).unwrap();
        match cfg.params {
            Params::LogisticEmpirical(p) => {
                assert_eq!(p.data_path, Some(PathBuf::from("/tmp/x.csv")))
            }
            _ => unreachable!(),
        }
        assert!(parse_override("novalue").is_err());
    }

    #[test]
    fn invalid_values_are_config_errors() {
        for (exp, text) in [
            (Experiment::MeanGenSweep, "[mean-gen-sweep]\nn = 0\n"),
            (Experiment::MeanGenSweep, "[mean-gen-sweep]\nsigma = -1.0\n"),
            (
                Experiment::CrossCovThresholdSweep,
                "[crosscov-threshold-sweep]\ntrials = 1\n",
            ),
            (Experiment::VerifyOracles, "[verify-oracles]\ndim = 1\n"),
            (
                Experiment::SgldCheck,
                "[sgld-check]\niterations = 10\nburn_in = 10\n",
            ),
            (
                Experiment::LogisticTheorySweep,
                "[logistic-theory-sweep]\nnu = 0.0\n",
            ),
            (
                Experiment::LogisticEmpirical,
                "[logistic-empirical]\nrepetitions = 1\n",
            ),
            (Experiment::MeanGenSweep, "[mean-gen-sweep]\nn = \"five\"\n"),
        ] {
            assert!(
                ExperimentConfig::from_toml_str(exp, text, &[]).is_err(),
                "{text}"
            );
        }
    }
}
