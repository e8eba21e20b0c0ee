use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gibbs_sgld::LogisticMixedRisk;
use crate::newton::NewtonOptions;
use crate::rng::RngStream;
use crate::special::log1p_exp_neg;
use crate::stats::{Accumulator, Estimate};
use crate::synthdata::{sign_label, GaussianMixtureSpec, LabeledSet};

/// Where the samples of each repetition come from.
#[derive(Debug, Clone)]
pub enum DataSource {
    Synthetic(GaussianMixtureSpec),
    /// A fixed dataset, split at random each repetition into labeled,
    /// unlabeled and test parts (labels of the unlabeled part are unused).
    Dataset(LabeledSet),
}

impl DataSource {
    fn dim(&self) -> usize {
        match self {
            DataSource::Synthetic(s) => s.dim,
            DataSource::Dataset(d) => d.dim(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalOptions {
    pub n: usize,
    pub lambda_grid: Vec<f64>,
    pub repetitions: usize,
    pub test_size: usize,
    pub nu: f64,
}

/// Mean gen-error over repetitions at one λ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalCell {
    pub lambda: f64,
    pub m: usize,
    pub gen: Estimate,
    pub failures: usize,
    pub repetitions: usize,
    /// False when more than 10% of the repetitions failed to fit.
    pub valid: bool,
}

struct Split {
    /// `y x` rows of `S_l`.
    labeled: DMatrix<f64>,
    /// Features of the unlabeled pool.
    pool: DMatrix<f64>,
    /// `y x` rows of the test sample.
    test: DMatrix<f64>,
}

fn synthetic_rows(
    spec: &GaussianMixtureSpec,
    count: usize,
    stream: RngStream,
    signed: bool,
) -> DMatrix<f64> {
    let mut rng = stream.rng();
    let mut row = vec![0.0; spec.dim];
    let mut out = DMatrix::zeros(count, spec.dim);
    for i in 0..count {
        let y = spec.draw_into(&mut rng, &mut row).sign();
        let s = if signed { y } else { 1.0 };
        for j in 0..spec.dim {
            out[(i, j)] = s * row[j];
        }
    }
    out
}

fn split(source: &DataSource, opts: &EmpiricalOptions, max_m: usize, stream: RngStream) -> Split {
    match source {
        DataSource::Synthetic(spec) => Split {
            labeled: synthetic_rows(spec, opts.n, stream.child(0), true),
            pool: synthetic_rows(spec, max_m, stream.child(1), false),
            test: synthetic_rows(spec, opts.test_size, stream.child(2), true),
        },
        DataSource::Dataset(data) => {
            let mut idx: Vec<usize> = (0..data.len()).collect();
            idx.shuffle(&mut stream.rng());
            let signed = data.signed_features();
            let pick = |ids: &[usize], rows: &DMatrix<f64>| {
                DMatrix::from_fn(ids.len(), rows.ncols(), |r, c| rows[(ids[r], c)])
            };
            let test_end = (opts.n + max_m + opts.test_size).min(idx.len());
            Split {
                labeled: pick(&idx[..opts.n], &signed),
                pool: pick(&idx[opts.n..opts.n + max_m], data.features()),
                test: pick(&idx[opts.n + max_m..test_end], &signed),
            }
        }
    }
}

fn mean_loss(rows: &DMatrix<f64>, w: &DVector<f64>) -> f64 {
    let total: f64 = rows
        .row_iter()
        .map(|r| log1p_exp_neg(r.iter().zip(w.iter()).map(|(a, b)| a * b).sum()))
        .sum();
    total / rows.nrows() as f64
}

fn repetition(
    source: &DataSource,
    opts: &EmpiricalOptions,
    ms: &[usize],
    stream: RngStream,
) -> Vec<Option<f64>> {
    let max_m = ms.iter().copied().max().unwrap_or(0);
    let data = split(source, opts, max_m, stream);
    let newton = NewtonOptions::default();
    let empty = DMatrix::zeros(0, data.labeled.ncols());
    let w0 = match LogisticMixedRisk::from_signed(data.labeled.clone(), empty, opts.nu).fit(&newton)
    {
        Ok(sol) => sol.w,
        Err(_) => return vec![None; ms.len()],
    };
    let mut pseudo = data.pool.clone();
    for mut r in pseudo.row_iter_mut() {
        let score = r.iter().zip(w0.iter()).map(|(a, b)| a * b).sum::<f64>();
        r *= sign_label(score).sign();
    }
    let train = mean_loss(&data.labeled, &w0);
    ms.iter()
        .map(|&m| {
            let w = if m == 0 {
                w0.clone()
            } else {
                let rows = pseudo.rows(0, m).into_owned();
                LogisticMixedRisk::from_signed(data.labeled.clone(), rows, opts.nu)
                    .fit(&newton)
                    .ok()?
                    .w
            };
            let train = if m == 0 {
                train
            } else {
                mean_loss(&data.labeled, &w)
            };
            Some(mean_loss(&data.test, &w) - train)
        })
        .collect()
}

/// Empirical gen-error of regularised logistic SS-MLE over a λ grid.
///
/// Each repetition draws one `S_l`, one unlabeled pool and one test sample
/// and reuses them for every λ (the first `m = round(λn)` pool points), so
/// differences across λ are not swamped by sampling noise. The gen-error of
/// a fit `w` is the test-sample risk minus the risk on `S_l`.
pub fn empirical_gen_experiment(
    source: &DataSource,
    opts: &EmpiricalOptions,
    root: &RngStream,
) -> Result<Vec<EmpiricalCell>> {
    if opts.repetitions < 2 {
        return Err(Error::invalid(
            "repetitions",
            format!("need at least 2, got {}", opts.repetitions),
        ));
    }
    if opts.n == 0 {
        return Err(Error::invalid(
            "n",
            "labeled sample size must be at least 1",
        ));
    }
    if opts.test_size == 0 {
        return Err(Error::invalid("test_size", "must be at least 1"));
    }
    if !(opts.nu > 0.0 && opts.nu.is_finite()) {
        return Err(Error::invalid(
            "nu",
            format!("must be positive, got {}", opts.nu),
        ));
    }
    if opts
        .lambda_grid
        .iter()
        .any(|l| !(*l >= 0.0 && l.is_finite()))
    {
        return Err(Error::invalid(
            "lambda_grid",
            "values must be finite and nonnegative",
        ));
    }
    if source.dim() == 0 {
        return Err(Error::invalid("dim", "must be at least 1"));
    }
    if let DataSource::Synthetic(spec) = source {
        spec.validate()?;
    }
    let ms: Vec<usize> = opts
        .lambda_grid
        .iter()
        .map(|l| (l * opts.n as f64).round() as usize)
        .collect();
    if let DataSource::Dataset(data) = source {
        let need = opts.n + ms.iter().copied().max().unwrap_or(0) + 1;
        if data.len() < need {
            return Err(Error::invalid(
                "dataset",
                format!(
                    "{} rows cannot cover n + max m + 1 test row = {need}",
                    data.len()
                ),
            ));
        }
    }
    let per_rep: Vec<Vec<Option<f64>>> = (0..opts.repetitions as u64)
        .into_par_iter()
        .map(|r| repetition(source, opts, &ms, root.trial(r)))
        .collect();
    Ok(ms
        .iter()
        .enumerate()
        .map(|(k, &m)| {
            let acc: Accumulator = per_rep.iter().filter_map(|rep| rep[k]).collect();
            let failures = opts.repetitions - acc.count() as usize;
            EmpiricalCell {
                lambda: opts.lambda_grid[k],
                m,
                gen: acc.estimate(),
                failures,
                repetitions: opts.repetitions,
                valid: failures * 10 <= opts.repetitions,
            }
        })
        .collect())
}
