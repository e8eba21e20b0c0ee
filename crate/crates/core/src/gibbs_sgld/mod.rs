//! Langevin sampling from the Gibbs posterior `∝ exp(−γ L̄_E(w))`.

mod risks;

pub use risks::{make_logistic_risk, make_mean_est_risk, LogisticMixedRisk, QuadraticMixedRisk};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::stats::{batch_means, Estimate};

/// Sizes behind a mixed empirical risk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskMetadata {
    pub n: usize,
    pub m: usize,
    /// Mixing weight on the pseudo-labeled term.
    pub eta: f64,
}

/// A normalised mixed empirical risk `L̄_E(w)` on fixed data.
pub trait EmpiricalRisk {
    fn dim(&self) -> usize;
    fn metadata(&self) -> RiskMetadata;
    fn value(&self, w: &DVector<f64>) -> f64;
    fn gradient(&self, w: &DVector<f64>) -> DVector<f64>;
}

/// Largest relative error between the analytic gradient and central
/// differences over `probes`, with per-probe error
/// `‖g − g_fd‖ / max(‖g‖, ‖g_fd‖, 1e−8)`.
pub fn check_gradient<R: EmpiricalRisk + ?Sized>(risk: &R, probes: &[DVector<f64>]) -> f64 {
    let mut worst: f64 = 0.0;
    for w in probes {
        let g = risk.gradient(w);
        let mut fd = DVector::zeros(w.len());
        for j in 0..w.len() {
            let h = 1e-5 * w[j].abs().max(1.0);
            let mut up = w.clone();
            let mut down = w.clone();
            up[j] += h;
            down[j] -= h;
            fd[j] = (risk.value(&up) - risk.value(&down)) / (up[j] - down[j]);
        }
        let scale = g.norm().max(fd.norm()).max(1e-8);
        worst = worst.max((g - fd).norm() / scale);
    }
    worst
}

/// `count` probe points with i.i.d. `N(0, scale²)` coordinates.
pub fn random_probes(
    dim: usize,
    count: usize,
    scale: f64,
    stream: &RngStream,
) -> Vec<DVector<f64>> {
    let mut rng = stream.rng();
    (0..count)
        .map(|_| DVector::from_fn(dim, |_, _| scale * rng.sample::<f64, _>(StandardNormal)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SgldConfig {
    /// β
    pub step_size: f64,
    /// γ
    pub inverse_temperature: f64,
    pub burn_in: usize,
    pub thin: usize,
    pub iterations: usize,
    /// Turning the noise off gives plain gradient descent.
    pub langevin_noise: bool,
}

impl SgldConfig {
    /// `γ = α`, `β = 0.01/α`.
    ///
    /// On a quadratic risk the chain is AR(1) with stationary variance
    /// `1/(2γ(1 − β))`, so β sets the bias of the sampled variance.
    pub fn for_alpha(alpha: f64) -> Self {
        SgldConfig {
            step_size: 0.01 / alpha,
            inverse_temperature: alpha,
            burn_in: 2_000,
            thin: 1,
            iterations: 200_000,
            langevin_noise: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step_size > 0.0 && self.step_size.is_finite()) {
            return Err(Error::invalid(
                "step_size",
                format!("must be positive, got {}", self.step_size),
            ));
        }
        if !(self.inverse_temperature > 0.0 && self.inverse_temperature.is_finite()) {
            return Err(Error::invalid(
                "inverse_temperature",
                format!("must be positive, got {}", self.inverse_temperature),
            ));
        }
        if self.thin == 0 {
            return Err(Error::invalid("thin", "must be at least 1"));
        }
        if self.iterations <= self.burn_in {
            return Err(Error::invalid(
                "iterations",
                format!(
                    "must exceed burn_in ({} ≤ {})",
                    self.iterations, self.burn_in
                ),
            ));
        }
        Ok(())
    }

    pub fn kept(&self) -> usize {
        (self.iterations - self.burn_in).div_ceil(self.thin)
    }
}

/// `W_{k+1} = W_k − β∇L̄_E(W_k) + √(2β/γ) ζ_k`, returning the iterates after
/// burn-in, thinned, one per row.
pub fn run_sgld<R: EmpiricalRisk + ?Sized>(
    risk: &R,
    cfg: &SgldConfig,
    init: &DVector<f64>,
    stream: &RngStream,
) -> Result<DMatrix<f64>> {
    cfg.validate()?;
    let d = risk.dim();
    if init.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: init.len(),
            context: "SGLD initial point",
        });
    }
    let mut rng = stream.rng();
    let noise = (2.0 * cfg.step_size / cfg.inverse_temperature).sqrt();
    let mut out = DMatrix::zeros(cfg.kept(), d);
    let mut w = init.clone();
    let mut row = 0;
    for k in 0..cfg.iterations {
        let g = risk.gradient(&w);
        if g.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteGradient {
                iteration: k,
                w_norm: w.norm(),
            });
        }
        w.axpy(-cfg.step_size, &g, 1.0);
        if cfg.langevin_noise {
            for v in w.iter_mut() {
                let z: f64 = rng.sample(StandardNormal);
                *v += noise * z;
            }
        }
        if k >= cfg.burn_in && (k - cfg.burn_in).is_multiple_of(cfg.thin) {
            out.set_row(row, &w.transpose());
            row += 1;
        }
    }
    Ok(out)
}

/// Per-coordinate mean (batch-means standard error) and sample variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoordinateMoments {
    pub mean: Estimate,
    pub variance: f64,
}

pub fn chain_moments(samples: &DMatrix<f64>, batches: usize) -> Vec<CoordinateMoments> {
    samples
        .column_iter()
        .map(|col| {
            let xs: Vec<f64> = col.iter().copied().collect();
            let mean = batch_means(&xs, batches);
            let var =
                xs.iter().map(|x| (x - mean.value).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0);
            CoordinateMoments {
                mean,
                variance: var,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mean_estimation::{fit_w0, gibbs_posterior};
    use crate::synthdata::{
        pseudo_label_sign, pseudo_label_threshold, sample_labeled, sample_unlabeled,
        GaussianMixtureSpec,
    };

    fn data(
        seed: u64,
    ) -> (
        crate::synthdata::LabeledSet,
        crate::synthdata::PseudoLabeledSet,
    ) {
        let spec = GaussianMixtureSpec::unit_axis(2, 1.0).unwrap();
        let l = sample_labeled(&spec, 5, &RngStream::new(seed, 0)).unwrap();
        let u = sample_unlabeled(&spec, 25, &RngStream::new(seed, 1)).unwrap();
        let p = pseudo_label_sign(&fit_w0(&l).unwrap(), u.features()).unwrap();
        (l, p)
    }

    #[test]
    fn quadratic_minimiser_is_posterior_mean() {
        let (l, p) = data(1);
        let risk = make_mean_est_risk(&l, &p).unwrap();
        let post = gibbs_posterior(&l, &p, 1.0).unwrap();
        assert!(risk.gradient(&post.mean).amax() < 1e-10);
        let base = risk.value(&post.mean);
        for w in random_probes(2, 50, 2.0, &RngStream::new(2, 0)) {
            assert!(risk.value(&(&post.mean + w)) >= base);
        }
        assert_eq!(
            risk.metadata(),
            RiskMetadata {
                n: 5,
                m: 25,
                eta: 5.0
            }
        );
    }

    #[test]
    fn gradients_match_finite_differences() {
        let (l, p) = data(3);
        let probes = random_probes(2, 10, 1.5, &RngStream::new(3, 9));
        assert!(check_gradient(&make_mean_est_risk(&l, &p).unwrap(), &probes) <= 1e-5);
        for nu in [0.0, 1e-3, 1.0] {
            let risk = make_logistic_risk(&l, &p, nu).unwrap();
            assert!(check_gradient(&risk, &probes) <= 1e-5);
        }
    }

    #[test]
    fn logistic_at_origin() {
        let (l, p) = data(4);
        let risk = make_logistic_risk(&l, &p, 0.5).unwrap();
        let w = DVector::zeros(2);
        assert!((risk.value(&w) - std::f64::consts::LN_2).abs() < 1e-15);
        let eta = risk.metadata().eta;
        let expected = -(l.signed_features().row_mean() + p.signed_features().row_mean() * eta)
            .transpose()
            / (2.0 * (1.0 + eta));
        assert!((risk.gradient(&w) - expected).amax() < 1e-14);
    }

    #[test]
    fn logistic_drops_abstentions() {
        let spec = GaussianMixtureSpec::unit_axis(2, 1.0).unwrap();
        let l = sample_labeled(&spec, 5, &RngStream::new(5, 0)).unwrap();
        let u = sample_unlabeled(&spec, 40, &RngStream::new(5, 1)).unwrap();
        let p = pseudo_label_threshold(&fit_w0(&l).unwrap(), u.features(), 1.0).unwrap();
        let kept = p.pseudo_labels().iter().filter(|y| y.sign() != 0.0).count();
        assert!(kept < 40);
        let risk = make_logistic_risk(&l, &p, 0.1).unwrap();
        assert_eq!(risk.metadata().m, kept);
    }

    #[test]
    fn strong_regularisation_shrinks_to_origin() {
        let (l, p) = data(6);
        let risk = make_logistic_risk(&l, &p, 1e6).unwrap();
        let sol = risk.fit(&Default::default()).unwrap();
        assert!(sol.w.norm() <= 1e-3);
    }

    #[test]
    fn noiseless_sgld_is_gradient_descent() {
        let (l, p) = data(7);
        let risk = make_mean_est_risk(&l, &p).unwrap();
        let cfg = SgldConfig {
            step_size: 0.05,
            inverse_temperature: 1.0,
            burn_in: 0,
            thin: 1,
            iterations: 500,
            langevin_noise: false,
        };
        let path = run_sgld(
            &risk,
            &cfg,
            &DVector::from_vec(vec![5.0, -5.0]),
            &RngStream::new(0, 0),
        )
        .unwrap();
        let last = path.row(path.nrows() - 1).transpose();
        assert!((last - risk.minimizer()).norm() < 1e-12);
    }

    #[test]
    fn sgld_is_deterministic_and_validates() {
        let (l, p) = data(8);
        let risk = make_mean_est_risk(&l, &p).unwrap();
        let mut cfg = SgldConfig::for_alpha(1.0);
        cfg.iterations = 3_000;
        let a = run_sgld(&risk, &cfg, &DVector::zeros(2), &RngStream::new(1, 1)).unwrap();
        let b = run_sgld(&risk, &cfg, &DVector::zeros(2), &RngStream::new(1, 1)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.nrows(), cfg.kept());
        cfg.iterations = cfg.burn_in;
        assert!(run_sgld(&risk, &cfg, &DVector::zeros(2), &RngStream::new(1, 1)).is_err());
    }

    struct Exploding;
    impl EmpiricalRisk for Exploding {
        fn dim(&self) -> usize {
            1
        }
        fn metadata(&self) -> RiskMetadata {
            RiskMetadata {
                n: 1,
                m: 0,
                eta: 0.0,
            }
        }
        fn value(&self, w: &DVector<f64>) -> f64 {
            w[0].exp()
        }
        fn gradient(&self, w: &DVector<f64>) -> DVector<f64> {
            DVector::from_element(1, -w[0].exp() * 1e300)
        }
    }

    #[test]
    fn non_finite_gradient_aborts() {
        let cfg = SgldConfig {
            step_size: 1.0,
            inverse_temperature: 1.0,
            burn_in: 0,
            thin: 1,
            iterations: 100,
            langevin_noise: false,
        };
        let err = run_sgld(
            &Exploding,
            &cfg,
            &DVector::from_element(1, 1.0),
            &RngStream::new(0, 0),
        )
        .unwrap_err();
        assert!(matches!(err, Error::NonFiniteGradient { .. }), "{err}");
    }
}
