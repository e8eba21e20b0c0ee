use nalgebra::{DMatrix, DVector};

use super::{EmpiricalRisk, RiskMetadata};
use crate::error::{Error, Result};
use crate::newton::{self, Evaluation, NewtonOptions, NewtonSolution};
use crate::special::{log1p_exp_neg, sigmoid};
use crate::synthdata::{LabeledSet, PseudoLabel, PseudoLabeledSet};

/// `(1/(1+η)) [ (1/n) Σ‖z_i − w‖² + (η/m) Σ‖ẑ_j − w‖² ]` with `η = m/n`,
/// where `z = y x` and `ẑ = ŷ x`.
#[derive(Debug, Clone)]
pub struct QuadraticMixedRisk {
    labeled: DMatrix<f64>,
    pseudo: DMatrix<f64>,
    meta: RiskMetadata,
}

pub fn make_mean_est_risk(
    labeled: &LabeledSet,
    pseudo: &PseudoLabeledSet,
) -> Result<QuadraticMixedRisk> {
    if labeled.is_empty() {
        return Err(Error::invalid("labeled", "empty labeled set"));
    }
    if !pseudo.is_empty() && pseudo.features().ncols() != labeled.dim() {
        return Err(Error::DimensionMismatch {
            expected: labeled.dim(),
            found: pseudo.features().ncols(),
            context: "pseudo-labeled vs labeled feature dimension",
        });
    }
    let (n, m) = (labeled.len(), pseudo.len());
    Ok(QuadraticMixedRisk {
        labeled: labeled.signed_features(),
        pseudo: pseudo.signed_features(),
        meta: RiskMetadata {
            n,
            m,
            eta: m as f64 / n as f64,
        },
    })
}

impl QuadraticMixedRisk {
    /// The minimiser, i.e. the Gibbs posterior mean.
    pub fn minimizer(&self) -> DVector<f64> {
        let total = (self.meta.n + self.meta.m) as f64;
        let mut s = self.labeled.row_sum();
        if self.meta.m > 0 {
            s += self.pseudo.row_sum();
        }
        (s / total).transpose()
    }
}

fn mean_sq_dist(rows: &DMatrix<f64>, w: &DVector<f64>) -> f64 {
    let total: f64 = rows
        .row_iter()
        .map(|r| {
            r.iter()
                .zip(w.iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
        })
        .sum();
    total / rows.nrows() as f64
}

impl EmpiricalRisk for QuadraticMixedRisk {
    fn dim(&self) -> usize {
        self.labeled.ncols()
    }

    fn metadata(&self) -> RiskMetadata {
        self.meta
    }

    fn value(&self, w: &DVector<f64>) -> f64 {
        let eta = self.meta.eta;
        let mut v = mean_sq_dist(&self.labeled, w);
        if self.meta.m > 0 {
            v += eta * mean_sq_dist(&self.pseudo, w);
        }
        v / (1.0 + eta)
    }

    fn gradient(&self, w: &DVector<f64>) -> DVector<f64> {
        (w - self.minimizer()) * 2.0
    }
}

/// Mixed regularised logistic risk
/// `(1/(1+η)) [ (1/n) Σ ℓ(y_i wᵀx_i) + (η/m') Σ ℓ(ŷ_j wᵀx_j) ] + (ν/2)‖w‖²`
/// with `ℓ(t) = log(1 + e^{−t})`. Abstained pseudo-labels are dropped and
/// `m'` counts the remaining ones; `η = m'/n`.
#[derive(Debug, Clone)]
pub struct LogisticMixedRisk {
    labeled: DMatrix<f64>,
    pseudo: DMatrix<f64>,
    nu: f64,
    meta: RiskMetadata,
}

pub fn make_logistic_risk(
    labeled: &LabeledSet,
    pseudo: &PseudoLabeledSet,
    nu: f64,
) -> Result<LogisticMixedRisk> {
    if !(nu >= 0.0 && nu.is_finite()) {
        return Err(Error::invalid(
            "nu",
            format!("must be finite and nonnegative, got {nu}"),
        ));
    }
    if labeled.is_empty() {
        return Err(Error::invalid("labeled", "empty labeled set"));
    }
    let d = labeled.dim();
    if !pseudo.is_empty() && pseudo.features().ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: pseudo.features().ncols(),
            context: "pseudo-labeled vs labeled feature dimension",
        });
    }
    let kept: Vec<usize> = (0..pseudo.len())
        .filter(|&j| pseudo.pseudo_labels()[j] != PseudoLabel::Abstain)
        .collect();
    let signed = pseudo.signed_features();
    let rows = DMatrix::from_fn(kept.len(), d, |r, c| signed[(kept[r], c)]);
    Ok(LogisticMixedRisk::from_signed(
        labeled.signed_features(),
        rows,
        nu,
    ))
}

impl LogisticMixedRisk {
    /// Build from rows already multiplied by their (pseudo-)labels.
    pub fn from_signed(labeled: DMatrix<f64>, pseudo: DMatrix<f64>, nu: f64) -> Self {
        let (n, m) = (labeled.nrows(), pseudo.nrows());
        LogisticMixedRisk {
            labeled,
            pseudo,
            nu,
            meta: RiskMetadata {
                n,
                m,
                eta: m as f64 / n as f64,
            },
        }
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// Value, gradient and Hessian in one pass.
    pub fn evaluate(&self, w: &DVector<f64>) -> Evaluation {
        let d = w.len();
        let eta = self.meta.eta;
        let mut value = 0.0;
        let mut gradient = DVector::zeros(d);
        let mut hessian = DMatrix::zeros(d, d);
        let mut add = |rows: &DMatrix<f64>, weight: f64| {
            if rows.nrows() == 0 {
                return;
            }
            let c = weight / rows.nrows() as f64;
            for r in rows.row_iter() {
                let t = r.iter().zip(w.iter()).map(|(a, b)| a * b).sum::<f64>();
                value += c * log1p_exp_neg(t);
                let s = sigmoid(-t);
                let h = s * (1.0 - s);
                for i in 0..d {
                    gradient[i] -= c * s * r[i];
                    for j in 0..=i {
                        hessian[(i, j)] += c * h * r[i] * r[j];
                    }
                }
            }
        };
        add(&self.labeled, 1.0 / (1.0 + eta));
        add(&self.pseudo, eta / (1.0 + eta));
        for i in 0..d {
            for j in 0..i {
                hessian[(j, i)] = hessian[(i, j)];
            }
            hessian[(i, i)] += self.nu;
        }
        value += 0.5 * self.nu * w.norm_squared();
        gradient += w * self.nu;
        Evaluation {
            value,
            gradient,
            hessian,
        }
    }

    /// Empirical risk minimiser by damped Newton from the origin.
    pub fn fit(&self, opts: &NewtonOptions) -> Result<NewtonSolution> {
        newton::minimize(DVector::zeros(self.labeled.ncols()), opts, |w| {
            self.evaluate(w)
        })
    }
}

impl EmpiricalRisk for LogisticMixedRisk {
    fn dim(&self) -> usize {
        self.labeled.ncols()
    }

    fn metadata(&self) -> RiskMetadata {
        self.meta
    }

    fn value(&self, w: &DVector<f64>) -> f64 {
        self.evaluate(w).value
    }

    fn gradient(&self, w: &DVector<f64>) -> DVector<f64> {
        self.evaluate(w).gradient
    }
}
