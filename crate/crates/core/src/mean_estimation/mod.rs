//! Gaussian mean estimation under the Gibbs algorithm with squared loss.
//!
//! The loss is `‖y x − w‖²`, so the Gibbs posterior is Gaussian and every
//! gen-error quantity has either a closed form or a cheap Monte-Carlo oracle.

mod correlation;
mod oracles;

pub use correlation::{
    e_n_mc, e_n_mc_with, j_kernel, k_kernel, CorrelationSample, PerpendicularCoupling,
};
pub use oracles::{
    cross_cov_mc, cross_cov_trial, gen_error_definition_mc, gen_error_definition_trial,
    GapEvaluation,
};

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::stats::Estimate;
use crate::synthdata::{GaussianMixtureSpec, LabeledSet, PseudoLabeledSet};

/// `W₀ = (1/n) Σ Y_i X_i`.
pub fn fit_w0(labeled: &LabeledSet) -> Result<DVector<f64>> {
    if labeled.is_empty() {
        return Err(Error::invalid("labeled", "empty labeled set"));
    }
    Ok(labeled.signed_features().row_mean().transpose())
}

/// The Gibbs posterior `N(mean, variance · I_d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianPosterior {
    pub mean: DVector<f64>,
    pub variance: f64,
    pub alpha: f64,
}

impl GaussianPosterior {
    pub fn std_dev(&self) -> f64 {
        self.variance.sqrt()
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(
            "alpha",
            format!("must be positive and finite, got {alpha}"),
        ))
    }
}

/// Posterior for the `λ = m/n` weighted risk. An empty pseudo set is the
/// `λ = 0` limit and gives `mean = W₀`.
pub fn gibbs_posterior(
    labeled: &LabeledSet,
    pseudo: &PseudoLabeledSet,
    alpha: f64,
) -> Result<GaussianPosterior> {
    check_alpha(alpha)?;
    let w0 = fit_w0(labeled)?;
    let n = labeled.len() as f64;
    let m = pseudo.len() as f64;
    let mean = if pseudo.is_empty() {
        w0
    } else {
        if pseudo.features().ncols() != labeled.dim() {
            return Err(Error::DimensionMismatch {
                expected: labeled.dim(),
                found: pseudo.features().ncols(),
                context: "pseudo-labeled vs labeled feature dimension",
            });
        }
        let lambda = m / n;
        let w_u = pseudo.signed_features().row_mean().transpose();
        w0 / (1.0 + lambda) + w_u * (lambda / (1.0 + lambda))
    };
    Ok(GaussianPosterior {
        mean,
        variance: 1.0 / (2.0 * alpha),
        alpha,
    })
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::invalid(
            "n",
            "labeled sample size must be at least 1",
        ))
    } else {
        Ok(())
    }
}

/// Supervised gen-error `2σ²d/n`.
pub fn gen_error_sl(spec: &GaussianMixtureSpec, n: usize) -> Result<f64> {
    spec.validate()?;
    check_n(n)?;
    Ok(2.0 * spec.sigma * spec.sigma * spec.dim as f64 / n as f64)
}

/// `2σ²d/(n+m) + (2m/(n+m)) · cross_cov`.
pub fn gen_error_ssl(
    spec: &GaussianMixtureSpec,
    n: usize,
    m: usize,
    cross_cov: f64,
) -> Result<f64> {
    check_n(n)?;
    if m == 0 {
        return gen_error_sl(spec, n);
    }
    let total = (n + m) as f64;
    Ok(gen_error_sl(spec, n + m)? + 2.0 * m as f64 / total * cross_cov)
}

/// The two information terms and their assembly into the gen-error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Theorem1Terms {
    /// Symmetrized-KL information term, `2ασ²d/((1+λ)²n)`.
    pub skl_diff: f64,
    /// Expected log-likelihood-ratio term, `2αλ/(1+λ)² · cross_cov`.
    pub log_lambda_term: f64,
    /// `((1+λ)/α) · (skl_diff + log_lambda_term)`.
    pub assembled_gen: f64,
}

pub fn theorem1_assembly(
    spec: &GaussianMixtureSpec,
    n: usize,
    m: usize,
    alpha: f64,
    cross_cov: f64,
) -> Result<Theorem1Terms> {
    spec.validate()?;
    check_n(n)?;
    check_alpha(alpha)?;
    let nf = n as f64;
    let lambda = m as f64 / nf;
    let s2d = spec.sigma * spec.sigma * spec.dim as f64;
    let onep = 1.0 + lambda;
    let skl_diff = 2.0 * alpha * s2d / (onep * onep * nf);
    let log_lambda_term = 2.0 * alpha * lambda / (onep * onep) * cross_cov;
    Ok(Theorem1Terms {
        skl_diff,
        log_lambda_term,
        assembled_gen: onep / alpha * (skl_diff + log_lambda_term),
    })
}

/// Gen-error quantities at one `(n, m)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenErrorReport {
    pub ssl_gen: f64,
    pub sl_n_gen: f64,
    pub sl_nm_gen: f64,
    pub cross_cov: f64,
    pub e_n: f64,
    /// Standard error of `ssl_gen` inherited from the cross-covariance estimate.
    pub std_err: f64,
    pub n: usize,
    pub m: usize,
    pub lambda: f64,
}

impl GenErrorReport {
    pub fn new(
        spec: &GaussianMixtureSpec,
        n: usize,
        m: usize,
        cross_cov: Estimate,
        e_n: Estimate,
    ) -> Result<Self> {
        let weight = if m == 0 {
            0.0
        } else {
            2.0 * m as f64 / (n + m) as f64
        };
        Ok(GenErrorReport {
            ssl_gen: gen_error_ssl(spec, n, m, cross_cov.value)?,
            sl_n_gen: gen_error_sl(spec, n)?,
            sl_nm_gen: gen_error_sl(spec, n + m)?,
            cross_cov: cross_cov.value,
            e_n: e_n.value,
            std_err: weight * cross_cov.std_err,
            n,
            m,
            lambda: m as f64 / n as f64,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use crate::synthdata::{
        pseudo_label_sign, sample_labeled, sample_unlabeled, Label, PseudoLabel,
    };
    use nalgebra::DMatrix;
    use proptest::prelude::*;

    fn spec(sigma: f64, d: usize) -> GaussianMixtureSpec {
        GaussianMixtureSpec::unit_axis(d, sigma).unwrap()
    }

    #[test]
    fn fit_w0_examples() {
        let x = DMatrix::from_row_slice(1, 2, &[0.3, -1.2]);
        let one = LabeledSet::new(x.clone(), vec![Label::Positive]).unwrap();
        assert_eq!(fit_w0(&one).unwrap(), DVector::from_vec(vec![0.3, -1.2]));
        let two = LabeledSet::new(
            DMatrix::from_row_slice(2, 2, &[0.3, -1.2, 0.3, -1.2]),
            vec![Label::Positive, Label::Negative],
        )
        .unwrap();
        assert_eq!(fit_w0(&two).unwrap(), DVector::zeros(2));
        let empty = LabeledSet::new(DMatrix::zeros(0, 2), vec![]).unwrap();
        assert!(fit_w0(&empty).is_err());
    }

    #[test]
    fn fit_w0_concentrates() {
        let n = 1_000_000;
        let set = sample_labeled(&spec(1.0, 2), n, &RngStream::new(4, 0)).unwrap();
        let w0 = fit_w0(&set).unwrap();
        let tol = 3.0 / (n as f64).sqrt();
        assert!((w0[0] - 1.0).abs() < tol && w0[1].abs() < tol, "{w0}");
    }

    #[test]
    fn posterior_examples() {
        let s = spec(1.0, 3);
        let set = sample_labeled(&s, 7, &RngStream::new(1, 0)).unwrap();
        let labels = set.labels().iter().map(|l| PseudoLabel::from(*l)).collect();
        let copy = PseudoLabeledSet::new(set.features().clone(), labels).unwrap();
        let post = gibbs_posterior(&set, &copy, 0.5).unwrap();
        assert!((post.mean - fit_w0(&set).unwrap()).norm() < 1e-14);
        assert_eq!(post.variance, 1.0);
        assert!(gibbs_posterior(&set, &copy, 0.0).is_err());

        let big = sample_labeled(&s, 1_000_000, &RngStream::new(2, 0)).unwrap();
        let u = sample_unlabeled(&s, 1, &RngStream::new(2, 1)).unwrap();
        let w0 = fit_w0(&big).unwrap();
        let pseudo = pseudo_label_sign(&w0, u.features()).unwrap();
        let post = gibbs_posterior(&big, &pseudo, 1.0).unwrap();
        assert!((post.mean - w0).amax() < 2.0 / 1000.0);
    }

    #[test]
    fn posterior_mean_is_pooled_average() {
        let s = spec(1.3, 2);
        let set = sample_labeled(&s, 6, &RngStream::new(3, 0)).unwrap();
        let u = sample_unlabeled(&s, 9, &RngStream::new(3, 1)).unwrap();
        let pseudo = pseudo_label_sign(&fit_w0(&set).unwrap(), u.features()).unwrap();
        let post = gibbs_posterior(&set, &pseudo, 2.0).unwrap();
        let pooled = (set.signed_features().row_sum() + pseudo.signed_features().row_sum()) / 15.0;
        assert!((post.mean - pooled.transpose()).norm() < 1e-14);
        assert!((post.variance - 0.25).abs() < 1e-12);
    }

    #[test]
    fn sl_formula() {
        assert!((gen_error_sl(&spec(1.0, 2), 5).unwrap() - 0.8).abs() < 1e-15);
        assert_eq!(gen_error_sl(&spec(0.0, 2), 5).unwrap(), 0.0);
        let a = gen_error_sl(&spec(1.7, 4), 10).unwrap();
        let b = gen_error_sl(&spec(1.7, 4), 20).unwrap();
        assert!((a - 2.0 * b).abs() < 1e-15);
        assert!(gen_error_sl(&spec(1.0, 2), 0).is_err());
    }

    #[test]
    fn ssl_formula_boundaries() {
        let s = spec(1.0, 2);
        assert_eq!(
            gen_error_ssl(&s, 5, 20, 0.0).unwrap(),
            gen_error_sl(&s, 25).unwrap()
        );
        assert_eq!(
            gen_error_ssl(&s, 5, 0, 123.0).unwrap(),
            gen_error_sl(&s, 5).unwrap()
        );
        let at_bound = gen_error_ssl(&s, 5, 20, 2.0 / 5.0).unwrap();
        assert!((at_bound - gen_error_sl(&s, 5).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn assembly_examples() {
        let s = spec(1.0, 2);
        let t = theorem1_assembly(&s, 5, 25, 3.0, 0.0).unwrap();
        assert_eq!(t.log_lambda_term, 0.0);
        let t2 = theorem1_assembly(&s, 5, 25, 6.0, 0.0).unwrap();
        assert!((t2.skl_diff - 2.0 * t.skl_diff).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn assembly_matches_ssl(
            n in 1usize..500, m in 0usize..5000, sigma in 0.01f64..5.0,
            d in 1usize..8, alpha in 1e-3f64..1e3, cc in -2.0f64..5.0,
        ) {
            let s = spec(sigma, d);
            let t = theorem1_assembly(&s, n, m, alpha, cc).unwrap();
            let direct = gen_error_ssl(&s, n, m, cc).unwrap();
            prop_assert!((t.assembled_gen - direct).abs() <= 1e-10 * direct.abs().max(1e-300));
        }

        #[test]
        fn ssl_decreases_in_m(n in 1usize..50, sigma in 0.1f64..3.0, frac in 0.0f64..1.0) {
            let s = spec(sigma, 2);
            let bound = sigma * sigma * 2.0 / n as f64;
            let cc = frac * bound * 0.999;
            let mut prev = f64::INFINITY;
            for m in [0usize, 1, 5, 20, 100, 1000] {
                let g = gen_error_ssl(&s, n, m, cc).unwrap();
                prop_assert!(g <= prev);
                prev = g;
            }
        }
    }
}
