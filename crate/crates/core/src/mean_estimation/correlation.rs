//! The λ-free limit `E_n` of the cross-covariance, written through the
//! correlation coefficient between `W₀` and the class mean.
//!
//! Split `Y_iX_i = s·μ̂ + σ(g̃_i μ̂ + μ_i⊥)` and the sum of the other `n − 1`
//! labeled samples as `√(n−1)·σ(ξ'₀ μ̂ + μ'⊥)`. Then
//!
//! ```text
//! W₀ = c·μ̂ + P,   c = s + a ξ'₀ + b g̃_i,   P = a μ'⊥ + b μ_i⊥
//! a = σ√(n−1)/n,  b = σ/n,  γ'_n = c / √(c² + ‖P‖²)
//! E_n = σ s · E[ g̃_i J_{σ/s}(γ'_n) + (μ_i⊥ᵀP/‖P‖) K_{σ/s}(γ'_n) ]
//! ```

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::special::gaussian_tail;
use crate::stats::{monte_carlo, Estimate};
use crate::synthdata::GaussianMixtureSpec;

/// `J_σ(x) = 1 − 2Q(x/σ) + (2σx/√(2π)) e^{−x²/2σ²}`.
pub fn j_kernel(x: f64, sigma: f64) -> f64 {
    if sigma == 0.0 {
        return if x == 0.0 { 0.0 } else { x.signum() };
    }
    let e = (-x * x / (2.0 * sigma * sigma)).exp();
    1.0 - 2.0 * gaussian_tail(x / sigma) + 2.0 * sigma * x / (2.0 * PI).sqrt() * e
}

/// `K_σ(x) = (2σ√(1−x²)/√(2π)) e^{−x²/2σ²}`.
pub fn k_kernel(x: f64, sigma: f64) -> f64 {
    if sigma == 0.0 {
        return 0.0;
    }
    let e = (-x * x / (2.0 * sigma * sigma)).exp();
    2.0 * sigma * (1.0 - x * x).max(0.0).sqrt() / (2.0 * PI).sqrt() * e
}

/// How the two perpendicular Gaussian parts combine inside `‖P‖`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PerpendicularCoupling {
    /// `P = a μ'⊥ + b μ_i⊥` as vectors.
    #[default]
    Vector,
    /// Treat `μ'⊥` and `μ_i⊥` as co-directed: `‖P‖ = a‖μ'⊥‖ + b‖μ_i⊥‖` and
    /// `μ_i⊥ᵀP/‖P‖ = ‖μ_i⊥‖`. Only exact when `d = 2` and the two happen to
    /// point the same way; kept for comparison.
    Collinear,
}

/// One draw of the variables behind `γ'_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationSample {
    pub xi0_prime: f64,
    pub g_tilde: f64,
    pub norm_mu_prime_perp: f64,
    pub norm_mu_i_perp: f64,
    /// Cosine of the angle between `μ'⊥` and `μ_i⊥` (0 if either vanishes).
    pub perp_cosine: f64,
    pub gamma_n_prime: f64,
}

struct Coefficients {
    a: f64,
    b: f64,
    scale: f64,
}

impl Coefficients {
    fn new(n: usize, sigma: f64, mu_scale: f64) -> Self {
        let nf = n as f64;
        Coefficients {
            a: sigma * (nf - 1.0).sqrt() / nf,
            b: sigma / nf,
            scale: mu_scale,
        }
    }
}

impl CorrelationSample {
    /// Draw the five underlying variables for a labeled set of size `n`.
    /// The perpendicular parts are projections of `d`-dimensional standard
    /// Gaussians onto the complement of `μ̂`.
    pub fn draw<R: Rng + ?Sized>(
        rng: &mut R,
        spec: &GaussianMixtureSpec,
        n: usize,
        coupling: PerpendicularCoupling,
    ) -> Self {
        let xi0_prime: f64 = rng.sample(StandardNormal);
        let g_tilde: f64 = rng.sample(StandardNormal);
        let p1 = perpendicular(rng, spec);
        let p2 = perpendicular(rng, spec);
        let n1 = p1.iter().map(|v| v * v).sum::<f64>().sqrt();
        let n2 = p2.iter().map(|v| v * v).sum::<f64>().sqrt();
        let cos = if n1 > 0.0 && n2 > 0.0 {
            (p1.iter().zip(&p2).map(|(a, b)| a * b).sum::<f64>() / (n1 * n2)).clamp(-1.0, 1.0)
        } else {
            0.0
        };
        let mut s = CorrelationSample {
            xi0_prime,
            g_tilde,
            norm_mu_prime_perp: n1,
            norm_mu_i_perp: n2,
            perp_cosine: cos,
            gamma_n_prime: 0.0,
        };
        s.gamma_n_prime = s.gamma(n, spec.sigma, spec.mu_scale, coupling);
        s
    }

    fn parallel(&self, k: &Coefficients) -> f64 {
        k.scale + k.a * self.xi0_prime + k.b * self.g_tilde
    }

    fn perp_norm(&self, k: &Coefficients, coupling: PerpendicularCoupling) -> f64 {
        let (p1, p2) = (self.norm_mu_prime_perp, self.norm_mu_i_perp);
        match coupling {
            PerpendicularCoupling::Vector => {
                let sq = k.a * k.a * p1 * p1
                    + k.b * k.b * p2 * p2
                    + 2.0 * k.a * k.b * p1 * p2 * self.perp_cosine;
                sq.max(0.0).sqrt()
            }
            PerpendicularCoupling::Collinear => k.a * p1 + k.b * p2,
        }
    }

    /// `γ'_n` recomputed from the stored variables.
    pub fn gamma(
        &self,
        n: usize,
        sigma: f64,
        mu_scale: f64,
        coupling: PerpendicularCoupling,
    ) -> f64 {
        let k = Coefficients::new(n, sigma, mu_scale);
        let c = self.parallel(&k);
        let p = self.perp_norm(&k, coupling);
        let r = c.hypot(p);
        if r == 0.0 {
            0.0
        } else {
            (c / r).clamp(-1.0, 1.0)
        }
    }

    /// `μ_i⊥ᵀP/‖P‖`.
    fn projection(&self, k: &Coefficients, coupling: PerpendicularCoupling) -> f64 {
        match coupling {
            PerpendicularCoupling::Collinear => self.norm_mu_i_perp,
            PerpendicularCoupling::Vector => {
                let p = self.perp_norm(k, coupling);
                if p == 0.0 {
                    return 0.0;
                }
                let (p1, p2) = (self.norm_mu_prime_perp, self.norm_mu_i_perp);
                (k.a * p1 * p2 * self.perp_cosine + k.b * p2 * p2) / p
            }
        }
    }

    /// Integrand of `E_n` for this draw (including the `σ s` factor).
    pub fn integrand(
        &self,
        n: usize,
        sigma: f64,
        mu_scale: f64,
        coupling: PerpendicularCoupling,
    ) -> f64 {
        if mu_scale == 0.0 {
            return 0.0;
        }
        let k = Coefficients::new(n, sigma, mu_scale);
        let gamma = self.gamma(n, sigma, mu_scale, coupling);
        let ratio = sigma / mu_scale;
        sigma
            * mu_scale
            * (self.g_tilde * j_kernel(gamma, ratio)
                + self.projection(&k, coupling) * k_kernel(gamma, ratio))
    }
}

fn perpendicular<R: Rng + ?Sized>(rng: &mut R, spec: &GaussianMixtureSpec) -> Vec<f64> {
    let mut g: Vec<f64> = (0..spec.dim).map(|_| rng.sample(StandardNormal)).collect();
    let along: f64 = g
        .iter()
        .zip(spec.mu_direction.iter())
        .map(|(a, b)| a * b)
        .sum();
    for (v, u) in g.iter_mut().zip(spec.mu_direction.iter()) {
        *v -= along * u;
    }
    g
}

/// Monte-Carlo estimate of `E_n` with the vector coupling.
pub fn e_n_mc(
    spec: &GaussianMixtureSpec,
    n: usize,
    samples: u64,
    root: &RngStream,
) -> Result<Estimate> {
    e_n_mc_with(spec, n, samples, root, PerpendicularCoupling::Vector)
}

pub fn e_n_mc_with(
    spec: &GaussianMixtureSpec,
    n: usize,
    samples: u64,
    root: &RngStream,
    coupling: PerpendicularCoupling,
) -> Result<Estimate> {
    spec.validate()?;
    if spec.dim < 2 {
        return Err(Error::invalid(
            "dim",
            "E_n needs d ≥ 2 so that μ has a perpendicular complement",
        ));
    }
    if n == 0 {
        return Err(Error::invalid(
            "n",
            "labeled sample size must be at least 1",
        ));
    }
    if samples < 2 {
        return Err(Error::invalid(
            "samples",
            format!("need at least 2, got {samples}"),
        ));
    }
    Ok(monte_carlo(samples, root, |s| {
        let mut rng = s.rng();
        CorrelationSample::draw(&mut rng, spec, n, coupling).integrand(
            n,
            spec.sigma,
            spec.mu_scale,
            coupling,
        )
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    #[test]
    fn kernels_at_zero() {
        for sigma in [0.3, 1.0, 2.5] {
            assert_eq!(j_kernel(0.0, sigma), 0.0);
            assert!((k_kernel(0.0, sigma) - 2.0 * sigma / (2.0 * PI).sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn kernels_at_full_correlation() {
        // γ = 1: K vanishes, J = 1 − 2Q(1/σ) + 2σφ(1/σ)
        assert_eq!(k_kernel(1.0, 0.7), 0.0);
        assert!(j_kernel(1.0, 1e-3) > 1.0 - 1e-12);
    }

    proptest! {
        #[test]
        fn kernel_parity(x in -1.0f64..1.0, sigma in 0.05f64..5.0) {
            prop_assert!((j_kernel(-x, sigma) + j_kernel(x, sigma)).abs() < 1e-14);
            prop_assert_eq!(k_kernel(-x, sigma), k_kernel(x, sigma));
        }

        #[test]
        fn gamma_is_a_correlation(seed in any::<u64>(), n in 1usize..200, sigma in 0.01f64..10.0) {
            let spec = GaussianMixtureSpec::unit_axis(3, sigma).unwrap();
            let mut rng = RngStream::new(seed, 0).rng();
            for coupling in [PerpendicularCoupling::Vector, PerpendicularCoupling::Collinear] {
                let s = CorrelationSample::draw(&mut rng, &spec, n, coupling);
                prop_assert!((-1.0..=1.0).contains(&s.gamma_n_prime));
                let again = s.gamma(n, sigma, 1.0, coupling);
                prop_assert!((again - s.gamma_n_prime).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn gamma_matches_direct_w0_geometry() {
        // Rebuild W₀ from explicit vectors and compare the cosine with μ̂.
        let spec = GaussianMixtureSpec::unit_axis(4, 1.3).unwrap();
        let n = 7;
        let mut rng = RngStream::new(17, 0).rng();
        for _ in 0..100 {
            let xi: f64 = rng.sample(StandardNormal);
            let g: f64 = rng.sample(StandardNormal);
            let p1 = perpendicular(&mut rng, &spec);
            let p2 = perpendicular(&mut rng, &spec);
            let k = Coefficients::new(n, spec.sigma, spec.mu_scale);
            let mut w0: Vec<f64> = (0..4).map(|j| k.a * p1[j] + k.b * p2[j]).collect();
            w0[0] += k.scale + k.a * xi + k.b * g;
            let norm = w0.iter().map(|v| v * v).sum::<f64>().sqrt();
            let n1 = p1.iter().map(|v| v * v).sum::<f64>().sqrt();
            let n2 = p2.iter().map(|v| v * v).sum::<f64>().sqrt();
            let s = CorrelationSample {
                xi0_prime: xi,
                g_tilde: g,
                norm_mu_prime_perp: n1,
                norm_mu_i_perp: n2,
                perp_cosine: p1.iter().zip(&p2).map(|(a, b)| a * b).sum::<f64>() / (n1 * n2),
                gamma_n_prime: 0.0,
            };
            let gamma = s.gamma(n, spec.sigma, spec.mu_scale, PerpendicularCoupling::Vector);
            assert!((gamma - w0[0] / norm).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_one_dimension() {
        let spec = GaussianMixtureSpec::unit_axis(1, 1.0).unwrap();
        assert!(e_n_mc(&spec, 5, 100, &RngStream::new(0, 0)).is_err());
    }

    #[test]
    fn noiseless_limit_is_zero() {
        let spec = GaussianMixtureSpec::unit_axis(2, 0.0).unwrap();
        let e = e_n_mc(&spec, 5, 100, &RngStream::new(0, 0)).unwrap();
        assert_eq!(e.value, 0.0);
    }
}
