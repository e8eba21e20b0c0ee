//! Closed-form Gibbs posterior for mean estimation and the gen-error
//! formulas built from it.

use ssl_gibbs_lab::mean_estimation::{
    fit_w0, gen_error_sl, gen_error_ssl, gibbs_posterior, theorem1_assembly,
};
use ssl_gibbs_lab::synthdata::{
    pseudo_label_sign, sample_labeled, sample_unlabeled, GaussianMixtureSpec,
};
use ssl_gibbs_lab::RngStream;

fn main() -> ssl_gibbs_lab::Result<()> {
    let spec = GaussianMixtureSpec::unit_axis(2, 1.0)?;
    let root = RngStream::new(3, 0);
    let labeled = sample_labeled(&spec, 5, &root.child(0))?;
    let pool = sample_unlabeled(&spec, 25, &root.child(1))?;
    let pseudo = pseudo_label_sign(&fit_w0(&labeled)?, pool.features())?;
    let post = gibbs_posterior(&labeled, &pseudo, 2.0)?;
    println!(
        "posterior mean {:?}, variance {}",
        post.mean.as_slice(),
        post.variance
    );

    let (n, m, cc) = (5, 25, 0.16);
    println!("gen SL(n)   = {}", gen_error_sl(&spec, n)?);
    println!("gen SL(n+m) = {}", gen_error_sl(&spec, n + m)?);
    println!("gen SSL     = {}", gen_error_ssl(&spec, n, m, cc)?);
    let t = theorem1_assembly(&spec, n, m, 2.0, cc)?;
    println!(
        "information terms {} + {} assemble to {}",
        t.skl_diff, t.log_lambda_term, t.assembled_gen
    );
    Ok(())
}
