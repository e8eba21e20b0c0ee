//! Monte-Carlo oracles: brute-force cross-covariance and the gen-error
//! straight from its definition.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::stats::{monte_carlo, Estimate};
use crate::synthdata::{GaussianMixtureSpec, Labeler};

fn check_trials(trials: u64) -> Result<()> {
    if trials < 2 {
        Err(Error::invalid(
            "trials",
            format!("need at least 2, got {trials}"),
        ))
    } else {
        Ok(())
    }
}

fn check_common(
    spec: &GaussianMixtureSpec,
    n: usize,
    labeler: &Labeler,
    trials: u64,
) -> Result<()> {
    spec.validate()?;
    labeler.validate()?;
    check_trials(trials)?;
    if n == 0 {
        return Err(Error::invalid(
            "n",
            "labeled sample size must be at least 1",
        ));
    }
    Ok(())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// One trial of the cross-covariance estimator: `(Y₁X₁)ᵀ(ŷx) − μᵀ(ŷx)` for
/// a fresh `S_l` of size `n` and one fresh feature `x` labeled by `labeler`
/// using `W₀` fit on that `S_l`.
pub fn cross_cov_trial(
    spec: &GaussianMixtureSpec,
    n: usize,
    labeler: &Labeler,
    stream: RngStream,
) -> f64 {
    let d = spec.dim;
    let mut rng = stream.rng();
    let mut x = vec![0.0; d];
    let mut z1 = vec![0.0; d];
    let mut w0 = vec![0.0; d];
    for i in 0..n {
        let y = spec.draw_into(&mut rng, &mut x).sign();
        for j in 0..d {
            w0[j] += y * x[j];
            if i == 0 {
                z1[j] = y * x[j];
            }
        }
    }
    for v in &mut w0 {
        *v /= n as f64;
    }
    spec.draw_into(&mut rng, &mut x);
    let yhat = labeler.label(dot(&w0, &x), &mut rng).sign();
    let mu = spec.mean_vector();
    yhat * (dot(&z1, &x) - dot(mu.as_slice(), &x))
}

/// Estimate of `E[(Y_iX_i − μ)ᵀ(Ŷ_jX_j − μ′)]`.
pub fn cross_cov_mc(
    spec: &GaussianMixtureSpec,
    n: usize,
    labeler: &Labeler,
    trials: u64,
    root: &RngStream,
) -> Result<Estimate> {
    check_common(spec, n, labeler, trials)?;
    Ok(monte_carlo(trials, root, |s| {
        cross_cov_trial(spec, n, labeler, s)
    }))
}

/// How the per-trial generalization gap is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GapEvaluation {
    /// Integrate `W` out analytically; the posterior variance cancels and
    /// the gap no longer involves `α`.
    #[default]
    ClosedForm,
    /// Draw one `W` from the posterior per trial. Unbiased for the same gap,
    /// with `α`-dependent noise.
    PosteriorDraw,
}

/// One trial of the definition oracle: population risk minus empirical risk
/// on `S_l`, for the Gibbs posterior built from a fresh `(S_l, Ŝ_u)`.
pub fn gen_error_definition_trial(
    spec: &GaussianMixtureSpec,
    n: usize,
    m: usize,
    alpha: f64,
    labeler: &Labeler,
    mode: GapEvaluation,
    stream: RngStream,
) -> f64 {
    let d = spec.dim;
    let mut rng = stream.rng();
    let mut x = vec![0.0; d];
    let mut sum_z = vec![0.0; d];
    let mut sum_sq = 0.0;
    for _ in 0..n {
        let y = spec.draw_into(&mut rng, &mut x).sign();
        for j in 0..d {
            let z = y * x[j];
            sum_z[j] += z;
            sum_sq += z * z;
        }
    }
    let w0: Vec<f64> = sum_z.iter().map(|v| v / n as f64).collect();
    let mut sum_u = vec![0.0; d];
    for _ in 0..m {
        spec.draw_into(&mut rng, &mut x);
        let yhat = labeler.label(dot(&w0, &x), &mut rng).sign();
        for j in 0..d {
            sum_u[j] += yhat * x[j];
        }
    }
    let total = (n + m) as f64;
    let mut w: Vec<f64> = sum_z
        .iter()
        .zip(&sum_u)
        .map(|(a, b)| (a + b) / total)
        .collect();
    if mode == GapEvaluation::PosteriorDraw {
        let sd = (1.0 / (2.0 * alpha)).sqrt();
        for v in &mut w {
            let g: f64 = rng.sample(StandardNormal);
            *v += sd * g;
        }
    }
    let mu = spec.mean_vector();
    let nf = n as f64;
    // (1/n) Σ ‖z_i − w‖² = (1/n)Σ‖z_i‖² − 2 z̄ᵀw + ‖w‖²
    let empirical = sum_sq / nf - 2.0 * dot(&w0, &w) + dot(&w, &w);
    let dist: f64 = mu.iter().zip(&w).map(|(a, b)| (a - b) * (a - b)).sum();
    let population = spec.sigma * spec.sigma * d as f64 + dist;
    population - empirical
}

/// Gen-error of the Gibbs algorithm estimated from its definition.
#[allow(clippy::too_many_arguments)]
pub fn gen_error_definition_mc(
    spec: &GaussianMixtureSpec,
    n: usize,
    m: usize,
    alpha: f64,
    labeler: &Labeler,
    mode: GapEvaluation,
    trials: u64,
    root: &RngStream,
) -> Result<Estimate> {
    check_common(spec, n, labeler, trials)?;
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::invalid(
            "alpha",
            format!("must be positive and finite, got {alpha}"),
        ));
    }
    Ok(monte_carlo(trials, root, |s| {
        gen_error_definition_trial(spec, n, m, alpha, labeler, mode, s)
    }))
}
