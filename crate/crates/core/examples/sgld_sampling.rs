//! Langevin sampling on the quadratic mean-estimation risk, checked
//! against the closed-form posterior.

use nalgebra::DVector;
use ssl_gibbs_lab::gibbs_sgld::{
    chain_moments, check_gradient, make_logistic_risk, make_mean_est_risk, random_probes, run_sgld,
    SgldConfig,
};
use ssl_gibbs_lab::mean_estimation::{fit_w0, gibbs_posterior};
use ssl_gibbs_lab::synthdata::{
    pseudo_label_sign, sample_labeled, sample_unlabeled, GaussianMixtureSpec,
};
use ssl_gibbs_lab::RngStream;

fn main() -> ssl_gibbs_lab::Result<()> {
    let spec = GaussianMixtureSpec::unit_axis(2, 1.0)?;
    let root = RngStream::new(6, 0);
    let labeled = sample_labeled(&spec, 5, &root.child(0))?;
    let pool = sample_unlabeled(&spec, 25, &root.child(1))?;
    let pseudo = pseudo_label_sign(&fit_w0(&labeled)?, pool.features())?;

    let alpha = 1.0;
    let risk = make_mean_est_risk(&labeled, &pseudo)?;
    let post = gibbs_posterior(&labeled, &pseudo, alpha)?;
    let samples = run_sgld(
        &risk,
        &SgldConfig::for_alpha(alpha),
        &DVector::zeros(2),
        &root.child(2),
    )?;
    for (j, m) in chain_moments(&samples, 50).iter().enumerate() {
        println!(
            "w[{j}]: chain mean {:.4}±{:.4} (exact {:.4}), variance {:.4} (exact {:.4})",
            m.mean.value, m.mean.std_err, post.mean[j], m.variance, post.variance
        );
    }

    let probes = random_probes(2, 10, 2.0, &root.child(3));
    let logistic = make_logistic_risk(&labeled, &pseudo, 1e-3)?;
    println!(
        "gradient check: quadratic {:.1e}, logistic {:.1e}",
        check_gradient(&risk, &probes),
        check_gradient(&logistic, &probes)
    );
    Ok(())
}
