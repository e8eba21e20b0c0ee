//! Three independent estimates of the same quantity: the direct
//! cross-covariance, the E_n integral, and the gen-error definition.

use ssl_gibbs_lab::mean_estimation::{
    cross_cov_mc, e_n_mc, gen_error_definition_mc, gen_error_ssl, GapEvaluation,
};
use ssl_gibbs_lab::synthdata::{GaussianMixtureSpec, Labeler};
use ssl_gibbs_lab::RngStream;

fn main() -> ssl_gibbs_lab::Result<()> {
    let trials = 200_000;
    let root = RngStream::new(4, 0);
    for sigma in [0.5, 1.0, 2.0] {
        let spec = GaussianMixtureSpec::unit_axis(2, sigma)?;
        let cc = cross_cov_mc(&spec, 5, &Labeler::Sign, trials, &root.child(0))?;
        let en = e_n_mc(&spec, 5, trials, &root.child(1))?;
        println!(
            "sigma={sigma}: cross_cov {:.4}±{:.4}  E_n {:.4}±{:.4}  z={:.2}",
            cc.value,
            cc.std_err,
            en.value,
            en.std_err,
            cc.z_score(&en)
        );
    }

    let spec = GaussianMixtureSpec::unit_axis(2, 1.0)?;
    let cc = cross_cov_mc(&spec, 5, &Labeler::Sign, trials, &root.child(2))?;
    let formula = gen_error_ssl(&spec, 5, 25, cc.value)?;
    let def = gen_error_definition_mc(
        &spec,
        5,
        25,
        1.0,
        &Labeler::Sign,
        GapEvaluation::ClosedForm,
        trials,
        &root.child(3),
    )?;
    println!(
        "gen SSL: formula {formula:.4}, definition {:.4}±{:.4}",
        def.value, def.std_err
    );
    Ok(())
}
