//! The damped Newton solver used for every logistic fit.

use nalgebra::{DMatrix, DVector};
use ssl_gibbs_lab::newton::{minimize, Evaluation, NewtonOptions};

fn main() -> ssl_gibbs_lab::Result<()> {
    // f(w) = Σ log cosh(w_j − c_j): smooth, convex, Newton needs damping far
    // from the minimum.
    let c = DVector::from_vec(vec![3.0, -1.0, 0.5]);
    let sol = minimize(
        DVector::from_element(3, 10.0),
        &NewtonOptions::default(),
        |w| {
            let r = w - &c;
            Evaluation {
                value: r.iter().map(|v| v.cosh().ln()).sum(),
                gradient: r.map(f64::tanh),
                hessian: DMatrix::from_diagonal(&r.map(|v| 1.0 / v.cosh().powi(2))),
            }
        },
    )?;
    println!(
        "w = {:?} after {} iterations, |grad| = {:.1e}",
        sol.w.as_slice(),
        sol.iterations,
        sol.grad_norm
    );
    Ok(())
}
