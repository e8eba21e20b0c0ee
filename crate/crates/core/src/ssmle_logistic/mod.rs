//! Asymptotics of semi-supervised maximum likelihood for regularised
//! logistic regression on the two-class Gaussian model, and the finite-sample
//! experiment they predict.

mod empirical;
mod population;

pub use empirical::{empirical_gen_experiment, DataSource, EmpiricalCell, EmpiricalOptions};
pub use population::{
    asymptotic_gen, asymptotic_sweep, compute_matrices, excess_risk, solve_w_star_0,
    solve_w_star_l, solve_w_star_lambda, weighted_objective, AsymptoticReport, ExcessRisk,
    PopulationMatrices,
};

use std::ops::Range;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::synthdata::GaussianMixtureSpec;

/// Default lower bound on the quadrature size.
pub const MIN_QUADRATURE: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticProblemSpec {
    pub mixture: GaussianMixtureSpec,
    /// ν
    pub nu: f64,
    /// N_q
    pub quadrature_size: usize,
    /// λ = m/n
    pub lambda: f64,
    /// Smallest accepted `quadrature_size`.
    pub quadrature_floor: usize,
}

impl LogisticProblemSpec {
    /// Class means `±mu·1_d`, unit noise.
    pub fn new(dim: usize, mu: f64, nu: f64, quadrature_size: usize) -> Result<Self> {
        let spec = LogisticProblemSpec {
            mixture: GaussianMixtureSpec::ones_direction(dim, mu)?,
            nu,
            quadrature_size,
            lambda: 0.0,
            quadrature_floor: MIN_QUADRATURE,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_lambda(&self, lambda: f64) -> Self {
        LogisticProblemSpec {
            lambda,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.mixture.validate()?;
        if !(self.nu > 0.0 && self.nu.is_finite()) {
            return Err(Error::invalid(
                "nu",
                format!("must be positive, got {}", self.nu),
            ));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::invalid(
                "lambda",
                format!("must be finite and nonnegative, got {}", self.lambda),
            ));
        }
        if self.quadrature_size < self.quadrature_floor.max(1) {
            return Err(Error::invalid(
                "quadrature_size",
                format!(
                    "{} is below the floor {}",
                    self.quadrature_size, self.quadrature_floor
                ),
            ));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.mixture.dim
    }
}

/// A frozen sample from `P_Z` used for every population expectation.
///
/// Draws come in antithetic pairs `(x, y), (−x, −y)`; when the class mean
/// is a multiple of `1_d` each draw is also replicated under all cyclic
/// coordinate shifts. Both maps preserve `P_Z`, and they make the
/// quadrature objectives exactly symmetric, so minimisers are exactly
/// aligned with `1_d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadrature {
    dim: usize,
    /// Row-major `N × d`.
    x: Vec<f64>,
    y: Vec<f64>,
}

/// Rows per parallel work unit; fixed so sums do not depend on thread count.
const CHUNK: usize = 4096;

impl Quadrature {
    pub fn from_parts(dim: usize, x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if dim == 0 || x.len() != dim * y.len() {
            return Err(Error::DimensionMismatch {
                expected: dim * y.len(),
                found: x.len(),
                context: "quadrature feature buffer",
            });
        }
        Ok(Quadrature { dim, x, y })
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn x(&self, i: usize) -> &[f64] {
        &self.x[i * self.dim..(i + 1) * self.dim]
    }

    pub fn y(&self, i: usize) -> f64 {
        self.y[i]
    }

    /// Map fixed row blocks in parallel; results come back in block order.
    pub(crate) fn map_blocks<T, F>(&self, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(Range<usize>) -> T + Sync,
    {
        let n = self.len();
        (0..n.div_ceil(CHUNK))
            .into_par_iter()
            .map(|b| f(b * CHUNK..((b + 1) * CHUNK).min(n)))
            .collect()
    }
}

fn cyclic_symmetric(spec: &GaussianMixtureSpec) -> bool {
    let first = spec.mu_direction[0];
    spec.mu_direction.iter().all(|v| *v == first)
}

/// Draw a quadrature of (at least) `spec.quadrature_size` points, rounded up
/// to a whole number of symmetry orbits.
pub fn draw_quadrature(spec: &LogisticProblemSpec, stream: &RngStream) -> Result<Quadrature> {
    spec.validate()?;
    let d = spec.dim();
    let shifts = if cyclic_symmetric(&spec.mixture) {
        d
    } else {
        1
    };
    let orbit = 2 * shifts;
    let base = spec.quadrature_size.div_ceil(orbit);
    let mut rng = stream.rng();
    let total = base * orbit;
    let mut x = Vec::with_capacity(total * d);
    let mut y = Vec::with_capacity(total);
    let mut row = vec![0.0; d];
    for _ in 0..base {
        let label = spec.mixture.draw_into(&mut rng, &mut row).sign();
        for s in 0..shifts {
            for sign in [1.0, -1.0] {
                x.extend((0..d).map(|j| sign * row[(j + s) % d]));
                y.push(sign * label);
            }
        }
    }
    Quadrature::from_parts(d, x, y)
}
