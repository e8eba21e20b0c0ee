use nalgebra::DVector;
use rand::Rng;

use super::config::{
    LogisticEmpiricalParams, LogisticTheoryParams, MeanGenSweepParams, OraclesParams, SgldParams,
    Theorem1Params, ThresholdSweepParams,
};
use super::sweep::{Quantity, SweepResult, SweepRow};
use super::{select_threshold, InvalidCell, Outcome};
use crate::error::Result;
use crate::gibbs_sgld::{
    chain_moments, check_gradient, make_logistic_risk, make_mean_est_risk, random_probes, run_sgld,
    SgldConfig,
};
use crate::mean_estimation::{
    cross_cov_mc, e_n_mc, fit_w0, gen_error_definition_mc, gen_error_sl, gen_error_ssl,
    gibbs_posterior, theorem1_assembly, GapEvaluation,
};
use crate::rng::RngStream;
use crate::ssmle_logistic::{
    asymptotic_sweep, empirical_gen_experiment, AsymptoticReport, DataSource, EmpiricalOptions,
    LogisticProblemSpec,
};
use crate::stats::{batch_means, Estimate};
use crate::synthdata::{
    ingest_csv_dataset, sample_labeled, sample_unlabeled, GaussianMixtureSpec, LabelColumn, Labeler,
};

/// Largest acceptable relative residual of the information-term assembly.
pub const ASSEMBLY_TOLERANCE: f64 = 1e-10;
/// Largest acceptable relative error of a gradient check.
pub const GRADIENT_TOLERANCE: f64 = 1e-5;

fn row(
    x: f64,
    quantity: Quantity,
    value: f64,
    std_err: Option<f64>,
    n: Option<usize>,
    m: Option<usize>,
) -> SweepRow {
    SweepRow {
        sweep_variable: x,
        quantity,
        value,
        std_err,
        n,
        m,
    }
}

fn mc_row(x: f64, quantity: Quantity, e: Estimate, n: Option<usize>, m: Option<usize>) -> SweepRow {
    row(x, quantity, e.value, Some(e.std_err), n, m)
}

fn m_of(lambda: f64, n: usize) -> usize {
    (lambda * n as f64).round() as usize
}

fn labeler(threshold: Option<f64>) -> Labeler {
    threshold.map_or(Labeler::Sign, Labeler::Threshold)
}

pub(super) fn mean_gen_sweep(p: &MeanGenSweepParams, root: &RngStream) -> Result<Outcome> {
    let spec = GaussianMixtureSpec::unit_axis(p.dim, p.sigma)?;
    // The cross-covariance does not depend on m, so one estimate serves the
    // whole grid.
    let cc = cross_cov_mc(&spec, p.n, &labeler(p.threshold), p.trials, root)?;
    let mut out = SweepResult::new("lambda");
    for &lambda in &p.lambda_grid {
        let m = m_of(lambda, p.n);
        let (n, mm) = (Some(p.n), Some(m));
        let weight = if m == 0 {
            0.0
        } else {
            2.0 * m as f64 / (p.n + m) as f64
        };
        out.push(mc_row(lambda, Quantity::CrossCov, cc, n, mm));
        out.push(row(
            lambda,
            Quantity::GenSsl,
            gen_error_ssl(&spec, p.n, m, cc.value)?,
            Some(weight * cc.std_err),
            n,
            mm,
        ));
        out.push(row(
            lambda,
            Quantity::GenSlN,
            gen_error_sl(&spec, p.n)?,
            None,
            n,
            mm,
        ));
        out.push(row(
            lambda,
            Quantity::GenSlNm,
            gen_error_sl(&spec, p.n + m)?,
            None,
            n,
            mm,
        ));
    }
    Ok(Outcome::new(out))
}

pub(super) fn threshold_sweep(p: &ThresholdSweepParams, root: &RngStream) -> Result<Outcome> {
    let spec = GaussianMixtureSpec::unit_axis(p.dim, p.sigma)?;
    let mut out = SweepResult::new("threshold");
    for (k, &t) in p.threshold_grid.iter().enumerate() {
        let cc = cross_cov_mc(
            &spec,
            p.n,
            &Labeler::Threshold(t),
            p.trials,
            &root.child(k as u64),
        )?;
        out.push(mc_row(t, Quantity::CrossCov, cc, Some(p.n), None));
    }
    let selected = select_threshold(&out)?;
    out.push(row(
        selected,
        Quantity::SelectedThreshold,
        selected,
        None,
        Some(p.n),
        None,
    ));
    Ok(Outcome::new(out))
}

pub(super) fn verify_theorem1(p: &Theorem1Params, root: &RngStream) -> Result<Outcome> {
    let mut rng = root.rng();
    let mut out = SweepResult::new("draw");
    let mut invalid = Vec::new();
    for k in 0..p.draws {
        let n: usize = rng.random_range(1..=1000);
        let m: usize = rng.random_range(0..=10 * n);
        let sigma: f64 = rng.random_range(0.05..5.0);
        let d: usize = rng.random_range(1..=50);
        let alpha = 10f64.powf(rng.random_range(-2.0..2.0));
        let cross_cov = sigma * sigma * rng.random_range(-1.0..1.0);
        let spec = GaussianMixtureSpec::unit_axis(d, sigma)?;
        let terms = theorem1_assembly(&spec, n, m, alpha, cross_cov)?;
        let direct = gen_error_ssl(&spec, n, m, cross_cov)?;
        let residual = (terms.assembled_gen - direct).abs() / direct.abs().max(f64::MIN_POSITIVE);
        let x = k as f64;
        let (nn, mm) = (Some(n), Some(m));
        out.push(row(x, Quantity::SklDiff, terms.skl_diff, None, nn, mm));
        out.push(row(
            x,
            Quantity::LogLambdaTerm,
            terms.log_lambda_term,
            None,
            nn,
            mm,
        ));
        out.push(row(
            x,
            Quantity::AssembledGen,
            terms.assembled_gen,
            None,
            nn,
            mm,
        ));
        out.push(row(x, Quantity::GenSsl, direct, None, nn, mm));
        out.push(row(x, Quantity::AssemblyResidual, residual, None, nn, mm));
        if residual.is_nan() || residual > ASSEMBLY_TOLERANCE {
            invalid.push(InvalidCell {
                sweep_variable: x,
                reason: format!("assembly residual {residual:e} exceeds {ASSEMBLY_TOLERANCE:e}"),
            });
        }
    }
    Ok(Outcome {
        result: out,
        invalid,
    })
}

pub(super) fn verify_oracles(p: &OraclesParams, root: &RngStream) -> Result<Outcome> {
    let spec = GaussianMixtureSpec::unit_axis(p.dim, p.sigma)?;
    let lab = labeler(p.threshold);
    let (n, m) = (Some(p.n), Some(p.m));
    let cc = cross_cov_mc(&spec, p.n, &lab, p.trials, &root.child(0))?;
    let en = e_n_mc(&spec, p.n, p.trials, &root.child(1))?;
    let def = gen_error_definition_mc(
        &spec,
        p.n,
        p.m,
        p.alpha,
        &lab,
        GapEvaluation::ClosedForm,
        p.trials,
        &root.child(2),
    )?;
    let weight = 2.0 * p.m as f64 / (p.n + p.m) as f64;
    // Invert the gen-error formula for the cross-covariance it implies.
    let floor = gen_error_sl(&spec, p.n + p.m)?;
    let backsolved = Estimate {
        value: (def.value - floor) / weight,
        std_err: def.std_err / weight,
        count: def.count,
    };
    let a = p.alpha;
    let mut out = SweepResult::new("alpha");
    out.push(mc_row(a, Quantity::CrossCov, cc, n, m));
    out.push(mc_row(a, Quantity::EN, en, n, m));
    out.push(row(
        a,
        Quantity::GenSsl,
        gen_error_ssl(&spec, p.n, p.m, cc.value)?,
        Some(weight * cc.std_err),
        n,
        m,
    ));
    out.push(mc_row(a, Quantity::GenDefinition, def, n, m));
    out.push(mc_row(a, Quantity::CrossCovBacksolved, backsolved, n, m));
    for (k, &alpha) in p.alpha_grid.iter().enumerate() {
        let draw = gen_error_definition_mc(
            &spec,
            p.n,
            p.m,
            alpha,
            &lab,
            GapEvaluation::PosteriorDraw,
            p.trials,
            &root.child(3 + k as u64),
        )?;
        out.push(mc_row(alpha, Quantity::GenDefinitionDraw, draw, n, m));
    }
    Ok(Outcome::new(out))
}

pub(super) fn sgld_check(p: &SgldParams, root: &RngStream) -> Result<Outcome> {
    let spec = GaussianMixtureSpec::unit_axis(p.dim, p.sigma)?;
    let labeled = sample_labeled(&spec, p.n, &root.child(0))?;
    let pool = sample_unlabeled(&spec, p.m, &root.child(1))?;
    let w0 = fit_w0(&labeled)?;
    let pseudo = Labeler::Sign.apply(&w0, pool.features(), &root.child(2))?;
    let posterior = gibbs_posterior(&labeled, &pseudo, p.alpha)?;
    let quad = make_mean_est_risk(&labeled, &pseudo)?;
    let logistic = make_logistic_risk(&labeled, &pseudo, p.nu)?;

    let mut cfg = SgldConfig::for_alpha(p.alpha);
    if let Some(b) = p.step_size {
        cfg.step_size = b;
    }
    cfg.iterations = p.iterations;
    cfg.burn_in = p.burn_in;
    cfg.thin = p.thin;
    let samples = run_sgld(&quad, &cfg, &DVector::zeros(p.dim), &root.child(3))?;
    let moments = chain_moments(&samples, p.batches);

    let (n, m) = (Some(p.n), Some(p.m));
    let mut out = SweepResult::new("coordinate");
    for (j, mom) in moments.iter().enumerate() {
        let x = j as f64;
        let sq: Vec<f64> = samples
            .column(j)
            .iter()
            .map(|v| (v - mom.mean.value).powi(2))
            .collect();
        let var = Estimate {
            value: mom.variance,
            ..batch_means(&sq, p.batches)
        };
        out.push(mc_row(x, Quantity::SgldMean, mom.mean, n, m));
        out.push(row(
            x,
            Quantity::PosteriorMean,
            posterior.mean[j],
            None,
            n,
            m,
        ));
        out.push(mc_row(x, Quantity::SgldVariance, var, n, m));
        out.push(row(
            x,
            Quantity::PosteriorVariance,
            posterior.variance,
            None,
            n,
            m,
        ));
    }
    let probes = random_probes(p.dim, p.probes, 2.0, &root.child(4));
    let mut invalid = Vec::new();
    for (q, err) in [
        (Quantity::GradCheckQuadratic, check_gradient(&quad, &probes)),
        (
            Quantity::GradCheckLogistic,
            check_gradient(&logistic, &probes),
        ),
    ] {
        out.push(row(0.0, q, err, None, n, m));
        if err.is_nan() || err > GRADIENT_TOLERANCE {
            invalid.push(InvalidCell {
                sweep_variable: 0.0,
                reason: format!("{q} relative error {err:e} exceeds {GRADIENT_TOLERANCE:e}"),
            });
        }
    }
    Ok(Outcome {
        result: out,
        invalid,
    })
}

fn theory_reports(p: &LogisticTheoryParams, root: &RngStream) -> Result<Vec<AsymptoticReport>> {
    let spec = LogisticProblemSpec::new(p.dim, p.mu, p.nu, p.quadrature_size)?;
    asymptotic_sweep(&spec, &p.lambda_grid, root)
}

pub(super) fn logistic_theory_sweep(p: &LogisticTheoryParams, root: &RngStream) -> Result<Outcome> {
    let mut out = SweepResult::new("lambda");
    for r in theory_reports(p, root)? {
        out.push(row(
            r.lambda,
            Quantity::NTimesGen,
            r.n_times_gen,
            None,
            None,
            None,
        ));
        out.push(row(
            r.lambda,
            Quantity::WStarLambdaNorm,
            r.w_star_lambda.norm(),
            None,
            None,
            None,
        ));
    }
    Ok(Outcome::new(out))
}

pub(super) fn logistic_excess_risk(p: &LogisticTheoryParams, root: &RngStream) -> Result<Outcome> {
    let mut out = SweepResult::new("lambda");
    for r in theory_reports(p, root)? {
        let (n, m) = (Some(p.n), Some(m_of(r.lambda, p.n)));
        let variance = r.excess_variance_times_n / p.n as f64;
        out.push(row(
            r.lambda,
            Quantity::ExcessBias,
            r.excess_bias,
            None,
            n,
            m,
        ));
        out.push(row(
            r.lambda,
            Quantity::ExcessVariance,
            variance,
            None,
            n,
            m,
        ));
        out.push(row(
            r.lambda,
            Quantity::ExcessTotal,
            r.excess_total(p.n),
            None,
            n,
            m,
        ));
    }
    Ok(Outcome::new(out))
}

pub(super) fn logistic_empirical(p: &LogisticEmpiricalParams, root: &RngStream) -> Result<Outcome> {
    let source = match &p.data_path {
        Some(path) => {
            let col = match &p.label_column {
                Some(c) => LabelColumn::from(c.as_str()),
                None => LabelColumn::Name("label".into()),
            };
            DataSource::Dataset(ingest_csv_dataset(path, &col)?)
        }
        None => DataSource::Synthetic(GaussianMixtureSpec::ones_direction(p.dim, p.mu)?),
    };
    let opts = EmpiricalOptions {
        n: p.n,
        lambda_grid: p.lambda_grid.clone(),
        repetitions: p.repetitions,
        test_size: p.test_size,
        nu: p.nu,
    };
    let cells = empirical_gen_experiment(&source, &opts, root)?;
    let mut out = SweepResult::new("lambda");
    let mut invalid = Vec::new();
    for c in cells {
        let (n, m) = (Some(p.n), Some(c.m));
        out.push(mc_row(c.lambda, Quantity::EmpiricalGen, c.gen, n, m));
        out.push(mc_row(
            c.lambda,
            Quantity::NTimesEmpiricalGen,
            c.gen.scaled(p.n as f64),
            n,
            m,
        ));
        out.push(row(
            c.lambda,
            Quantity::FitFailures,
            c.failures as f64,
            None,
            n,
            m,
        ));
        if !c.valid {
            invalid.push(InvalidCell {
                sweep_variable: c.lambda,
                reason: format!("{} of {} fits failed", c.failures, c.repetitions),
            });
        }
    }
    Ok(Outcome {
        result: out,
        invalid,
    })
}
