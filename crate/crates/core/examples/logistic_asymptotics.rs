//! Population minimizers, asymptotic gen-error and excess risk of
//! semi-supervised logistic regression over a λ grid.

use ssl_gibbs_lab::ssmle_logistic::{asymptotic_sweep, LogisticProblemSpec};
use ssl_gibbs_lab::RngStream;

fn main() -> ssl_gibbs_lab::Result<()> {
    let spec = LogisticProblemSpec::new(2, 2.0, 1e-3, 200_000)?;
    let grid = [0.0, 0.5, 1.0, 3.0, 10.0, 30.0, 100.0];
    println!(
        "{:>6} {:>10} {:>12} {:>12} {:>10}",
        "lambda", "n*gen", "bias", "total@1000", "|w*_λ|"
    );
    for r in asymptotic_sweep(&spec, &grid, &RngStream::new(7, 0))? {
        println!(
            "{:>6} {:>10.5} {:>12.3e} {:>12.3e} {:>10.4}",
            r.lambda,
            r.n_times_gen,
            r.excess_bias,
            r.excess_total(1000),
            r.w_star_lambda.norm()
        );
    }
    Ok(())
}
