//! Finite-sample gen-error of regularized logistic regression trained on
//! labeled plus pseudo-labeled data.

use ssl_gibbs_lab::ssmle_logistic::{empirical_gen_experiment, DataSource, EmpiricalOptions};
use ssl_gibbs_lab::synthdata::GaussianMixtureSpec;
use ssl_gibbs_lab::RngStream;

fn main() -> ssl_gibbs_lab::Result<()> {
    let source = DataSource::Synthetic(GaussianMixtureSpec::ones_direction(2, 2.0)?);
    let opts = EmpiricalOptions {
        n: 200,
        lambda_grid: vec![0.0, 1.0, 10.0],
        repetitions: 20,
        test_size: 50_000,
        nu: 1e-3,
    };
    for c in empirical_gen_experiment(&source, &opts, &RngStream::new(8, 0))? {
        println!(
            "lambda={:>4} m={:>5} n*gen={:.3} ± {:.3} failures={}",
            c.lambda,
            c.m,
            c.gen.value * opts.n as f64,
            c.gen.std_err * opts.n as f64,
            c.failures
        );
    }
    Ok(())
}
