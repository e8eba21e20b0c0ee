use nalgebra::{DMatrix, DVector};

use super::{draw_quadrature, LogisticProblemSpec, Quadrature};
use crate::error::{Error, Result};
use crate::newton::{minimize, Evaluation, NewtonOptions};
use crate::rng::RngStream;
use crate::special::{log1p_exp_neg, sigmoid};
use crate::synthdata::sign_label;

struct Partial {
    value: f64,
    grad: Vec<f64>,
    hess: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Quadrature estimate of
/// `a·E_Z[ℓ(y wᵀx)] + b·E_X[ℓ(ŷ wᵀx)] + (ν/2)‖w‖²` with `ŷ = sgn(xᵀw₀)`,
/// together with its gradient and Hessian. `b` is ignored when `w0` is
/// `None`.
pub fn weighted_objective(
    quad: &Quadrature,
    w: &DVector<f64>,
    w0: Option<&DVector<f64>>,
    a: f64,
    b: f64,
    nu: f64,
) -> Evaluation {
    let d = quad.dim();
    let b = if w0.is_some() { b } else { 0.0 };
    let parts = quad.map_blocks(|range| {
        let mut p = Partial {
            value: 0.0,
            grad: vec![0.0; d],
            hess: vec![0.0; d * d],
        };
        for i in range {
            let x = quad.x(i);
            let t = dot(w.as_slice(), x);
            let y = quad.y(i);
            p.value += a * log1p_exp_neg(y * t);
            let mut coef = -a * sigmoid(-y * t) * y;
            if let Some(w0) = w0 {
                let yh = sign_label(dot(w0.as_slice(), x)).sign();
                p.value += b * log1p_exp_neg(yh * t);
                coef -= b * sigmoid(-yh * t) * yh;
            }
            let s = sigmoid(t);
            let h = (a + b) * s * (1.0 - s);
            for r in 0..d {
                p.grad[r] += coef * x[r];
                for c in 0..=r {
                    p.hess[r * d + c] += h * x[r] * x[c];
                }
            }
        }
        p
    });
    let n = quad.len() as f64;
    let mut value = 0.0;
    let mut gradient = DVector::zeros(d);
    let mut hessian = DMatrix::zeros(d, d);
    for p in &parts {
        value += p.value;
        for r in 0..d {
            gradient[r] += p.grad[r];
            for c in 0..=r {
                hessian[(r, c)] += p.hess[r * d + c];
            }
        }
    }
    value /= n;
    gradient /= n;
    hessian /= n;
    for r in 0..d {
        for c in 0..r {
            hessian[(c, r)] = hessian[(r, c)];
        }
        hessian[(r, r)] += nu;
    }
    value += 0.5 * nu * w.norm_squared();
    gradient += w * nu;
    Evaluation {
        value,
        gradient,
        hessian,
    }
}

fn solve(
    spec: &LogisticProblemSpec,
    quad: &Quadrature,
    w0: Option<&DVector<f64>>,
    a: f64,
    b: f64,
) -> Result<DVector<f64>> {
    spec.validate()?;
    if quad.is_empty() {
        return Err(Error::invalid("quadrature", "empty quadrature sample"));
    }
    if quad.dim() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            found: quad.dim(),
            context: "quadrature dimension",
        });
    }
    let sol = minimize(DVector::zeros(quad.dim()), &NewtonOptions::default(), |w| {
        weighted_objective(quad, w, w0, a, b, spec.nu)
    })?;
    Ok(sol.w)
}

/// `argmin E_Z[log(1 + e^{−y wᵀx})] + (ν/2)‖w‖²`.
pub fn solve_w_star_0(spec: &LogisticProblemSpec, quad: &Quadrature) -> Result<DVector<f64>> {
    solve(spec, quad, None, 1.0, 0.0)
}

/// Population risk minimiser of the regularised loss; the same objective
/// as [`solve_w_star_0`].
pub fn solve_w_star_l(spec: &LogisticProblemSpec, quad: &Quadrature) -> Result<DVector<f64>> {
    solve(spec, quad, None, 1.0, 0.0)
}

/// Minimiser of the `λ`-weighted labeled + pseudo-labeled objective with
/// weights `1/(1+λ)` and `λ/(1+λ)`, pseudo-labels `sgn(xᵀw*₀)`.
pub fn solve_w_star_lambda(
    spec: &LogisticProblemSpec,
    w_star_0: &DVector<f64>,
    quad: &Quadrature,
) -> Result<DVector<f64>> {
    let lam = spec.lambda;
    solve(
        spec,
        quad,
        Some(w_star_0),
        1.0 / (1.0 + lam),
        lam / (1.0 + lam),
    )
}

/// `J(w)` and `I_l(w)` on a quadrature sample.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationMatrices {
    /// `E_X[xxᵀ σ(wᵀx) σ(−wᵀx)]`
    pub j_mat: DMatrix<f64>,
    /// `E_Z[xxᵀ σ(−y wᵀx)²]`
    pub i_l_mat: DMatrix<f64>,
    pub at_w: DVector<f64>,
}

fn check_psd(m: &DMatrix<f64>, name: &'static str) -> Result<()> {
    let tr = m.trace();
    let min = m.clone().symmetric_eigen().eigenvalues.min();
    if min < -1e-8 * tr.abs() {
        return Err(Error::invalid(
            name,
            format!("not positive semidefinite (eigenvalue {min:e})"),
        ));
    }
    Ok(())
}

pub fn compute_matrices(
    spec: &LogisticProblemSpec,
    w: &DVector<f64>,
    quad: &Quadrature,
) -> Result<PopulationMatrices> {
    spec.validate()?;
    let d = quad.dim();
    if quad.is_empty() || w.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: w.len(),
            context: "matrix evaluation point",
        });
    }
    let parts = quad.map_blocks(|range| {
        let mut j = vec![0.0; d * d];
        let mut il = vec![0.0; d * d];
        for i in range {
            let x = quad.x(i);
            let t = dot(w.as_slice(), x);
            let s = sigmoid(t);
            let hj = s * (1.0 - s);
            let r = sigmoid(-quad.y(i) * t);
            let hi = r * r;
            for a in 0..d {
                for b in 0..=a {
                    let xx = x[a] * x[b];
                    j[a * d + b] += hj * xx;
                    il[a * d + b] += hi * xx;
                }
            }
        }
        (j, il)
    });
    let n = quad.len() as f64;
    let mut j_mat = DMatrix::zeros(d, d);
    let mut i_l_mat = DMatrix::zeros(d, d);
    for (j, il) in &parts {
        for a in 0..d {
            for b in 0..=a {
                j_mat[(a, b)] += j[a * d + b];
                i_l_mat[(a, b)] += il[a * d + b];
            }
        }
    }
    for a in 0..d {
        for b in 0..a {
            j_mat[(b, a)] = j_mat[(a, b)];
            i_l_mat[(b, a)] = i_l_mat[(a, b)];
        }
    }
    let sym = |m: DMatrix<f64>| (&m + m.transpose()) / (2.0 * n);
    let out = PopulationMatrices {
        j_mat: sym(j_mat),
        i_l_mat: sym(i_l_mat),
        at_w: w.clone(),
    };
    check_psd(&out.j_mat, "J")?;
    check_psd(&out.i_l_mat, "I_l")?;
    Ok(out)
}

fn regularised_cholesky(
    spec: &LogisticProblemSpec,
    j: &DMatrix<f64>,
) -> Result<nalgebra::Cholesky<f64, nalgebra::Dyn>> {
    let d = j.nrows();
    (j + DMatrix::identity(d, d) * spec.nu)
        .cholesky()
        .ok_or_else(|| Error::invalid("J + νI", "not positive definite"))
}

/// `n · gen = tr((J + νI)⁻¹ I_l) / (1 + λ)` with both matrices at `w*_λ`.
pub fn asymptotic_gen(
    spec: &LogisticProblemSpec,
    at_w_star_lambda: &PopulationMatrices,
) -> Result<f64> {
    let ch = regularised_cholesky(spec, &at_w_star_lambda.j_mat)?;
    Ok(ch.solve(&at_w_star_lambda.i_l_mat).trace() / (1.0 + spec.lambda))
}

/// Bias and `n`-scaled variance of the excess risk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExcessRisk {
    /// `½ (w*_λ − w*_l)ᵀ J_l(w*_l) (w*_λ − w*_l)`
    pub bias: f64,
    /// `n` times `tr(J_l(w*_l) A⁻¹ I_l(w*_λ) A⁻¹) / (2(1+λ)(n+m))`, `A = J(w*_λ) + νI`.
    pub variance_times_n: f64,
}

impl ExcessRisk {
    pub fn variance(&self, n: usize) -> f64 {
        self.variance_times_n / n as f64
    }

    pub fn total(&self, n: usize) -> f64 {
        self.bias + self.variance(n)
    }
}

pub fn excess_risk(
    spec: &LogisticProblemSpec,
    at_w_star_l: &PopulationMatrices,
    at_w_star_lambda: &PopulationMatrices,
) -> Result<ExcessRisk> {
    let diff = &at_w_star_lambda.at_w - &at_w_star_l.at_w;
    let j_l = &at_w_star_l.j_mat;
    let bias = 0.5 * diff.dot(&(j_l * &diff));
    let ch = regularised_cholesky(spec, &at_w_star_lambda.j_mat)?;
    // A⁻¹ I_l A⁻¹ = A⁻¹ (A⁻¹ I_l)ᵀ since both are symmetric.
    let left = ch.solve(&at_w_star_lambda.i_l_mat);
    let sandwich = ch.solve(&left.transpose());
    let onep = 1.0 + spec.lambda;
    Ok(ExcessRisk {
        bias,
        variance_times_n: (j_l * sandwich).trace() / (2.0 * onep * onep),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticReport {
    pub lambda: f64,
    pub w_star_0: DVector<f64>,
    pub w_star_lambda: DVector<f64>,
    pub w_star_l: DVector<f64>,
    pub n_times_gen: f64,
    pub excess_bias: f64,
    pub excess_variance_times_n: f64,
}

impl AsymptoticReport {
    pub fn excess_total(&self, n: usize) -> f64 {
        self.excess_bias + self.excess_variance_times_n / n as f64
    }
}

/// Solve every population quantity over a λ grid on one shared quadrature.
pub fn asymptotic_sweep(
    spec: &LogisticProblemSpec,
    lambdas: &[f64],
    stream: &RngStream,
) -> Result<Vec<AsymptoticReport>> {
    let quad = draw_quadrature(spec, stream)?;
    let w0 = solve_w_star_0(spec, &quad)?;
    let wl = solve_w_star_l(spec, &quad)?;
    let at_wl = compute_matrices(spec, &wl, &quad)?;
    lambdas
        .iter()
        .map(|&lam| {
            let s = spec.with_lambda(lam);
            s.validate()?;
            let wlam = solve_w_star_lambda(&s, &w0, &quad)?;
            let mats = compute_matrices(&s, &wlam, &quad)?;
            let ex = excess_risk(&s, &at_wl, &mats)?;
            Ok(AsymptoticReport {
                lambda: lam,
                w_star_0: w0.clone(),
                w_star_lambda: wlam,
                w_star_l: wl.clone(),
                n_times_gen: asymptotic_gen(&s, &mats)?,
                excess_bias: ex.bias,
                excess_variance_times_n: ex.variance_times_n,
            })
        })
        .collect()
}
