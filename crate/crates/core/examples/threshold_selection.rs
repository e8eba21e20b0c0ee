//! Sweep the confidence threshold and keep the one with the smallest
//! cross-covariance.

use ssl_gibbs_lab::harness::{
    run_experiment, select_threshold, Experiment, ExperimentConfig, Quantity,
};

fn main() -> ssl_gibbs_lab::Result<()> {
    let overrides = vec![("trials".to_string(), "100000".to_string())];
    let cfg = ExperimentConfig::from_toml_str(
        Experiment::CrossCovThresholdSweep,
        "seed = 5",
        &overrides,
    )?;
    let out = run_experiment(&cfg)?;
    for r in out.result.series(Quantity::CrossCov) {
        println!(
            "T={:>4}  cross_cov={:+.5} ± {:.5}",
            r.sweep_variable,
            r.value,
            r.std_err.unwrap_or(0.0)
        );
    }
    println!("selected T = {}", select_threshold(&out.result)?);
    Ok(())
}
