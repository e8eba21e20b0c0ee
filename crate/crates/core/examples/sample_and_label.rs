//! Draw a labeled and an unlabeled sample from the Gaussian mixture and
//! pseudo-label the unlabeled part with the sign and threshold rules.

use ssl_gibbs_lab::mean_estimation::fit_w0;
use ssl_gibbs_lab::synthdata::{sample_labeled, sample_unlabeled, GaussianMixtureSpec, Labeler};
use ssl_gibbs_lab::RngStream;

fn main() -> ssl_gibbs_lab::Result<()> {
    let spec = GaussianMixtureSpec::unit_axis(2, 1.0)?;
    let root = RngStream::new(42, 0);
    let labeled = sample_labeled(&spec, 5, &root.child(0))?;
    let pool = sample_unlabeled(&spec, 20, &root.child(1))?;
    let w0 = fit_w0(&labeled)?;
    println!("W0 = {:?}", w0.as_slice());

    for labeler in [Labeler::Sign, Labeler::Threshold(1.0)] {
        let pseudo = labeler.apply(&w0, pool.features(), &root.child(2))?;
        let agree = pseudo
            .pseudo_labels()
            .iter()
            .zip(pool.oracle_labels())
            .filter(|(p, y)| p.sign() == y.sign())
            .count();
        let kept = pseudo
            .pseudo_labels()
            .iter()
            .filter(|p| p.sign() != 0.0)
            .count();
        println!(
            "{labeler:?}: {kept} of {} kept, {agree} agree with the true label",
            pool.len()
        );
    }
    Ok(())
}
