//! Damped Newton for smooth strongly convex objectives.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Value, gradient and Hessian at a point.
pub struct Evaluation {
    pub value: f64,
    pub gradient: DVector<f64>,
    pub hessian: DMatrix<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    pub grad_tol: f64,
    pub max_iterations: usize,
    pub max_halvings: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            grad_tol: 1e-9,
            max_iterations: 200,
            max_halvings: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonSolution {
    pub w: DVector<f64>,
    pub value: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    /// Objective value after each accepted step, starting at the initial point.
    pub trace: Vec<f64>,
}

/// Minimise `eval` from `init`.
///
/// Each iteration solves `H p = -g` (Cholesky, falling back to a gradient
/// step if `H` is not positive definite) and halves the step until the
/// objective decreases. Near the optimum the decrease can fall below the
/// rounding level of `f`; a step that keeps `f` within that level and
/// shrinks the gradient is accepted too.
pub fn minimize<F>(init: DVector<f64>, opts: &NewtonOptions, mut eval: F) -> Result<NewtonSolution>
where
    F: FnMut(&DVector<f64>) -> Evaluation,
{
    let mut w = init;
    let mut cur = eval(&w);
    let mut trace = vec![cur.value];
    for it in 0..=opts.max_iterations {
        let gnorm = cur.gradient.norm();
        if !gnorm.is_finite() || !cur.value.is_finite() {
            return Err(Error::NewtonFailed {
                iterations: it,
                grad_norm: gnorm,
            });
        }
        if gnorm <= opts.grad_tol {
            return Ok(NewtonSolution {
                w,
                value: cur.value,
                grad_norm: gnorm,
                iterations: it,
                trace,
            });
        }
        if it == opts.max_iterations {
            break;
        }
        let step = match cur.hessian.clone().cholesky() {
            Some(ch) => -ch.solve(&cur.gradient),
            None => -&cur.gradient,
        };
        let slack = 4.0 * f64::EPSILON * cur.value.abs().max(1.0);
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let cand = &w + &step * t;
            let next = eval(&cand);
            let decreased = next.value < cur.value;
            let flat = next.value <= cur.value + slack && next.gradient.norm() < gnorm;
            if next.value.is_finite() && (decreased || flat) {
                accepted = Some((cand, next));
                break;
            }
            t *= 0.5;
        }
        match accepted {
            Some((cand, next)) => {
                w = cand;
                cur = next;
                trace.push(cur.value);
            }
            None => {
                return Err(Error::NewtonFailed {
                    iterations: it,
                    grad_norm: gnorm,
                })
            }
        }
    }
    Err(Error::NewtonFailed {
        iterations: opts.max_iterations,
        grad_norm: cur.gradient.norm(),
    })
}
