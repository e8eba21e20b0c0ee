use nalgebra::DVector;
use ssl_gibbs_lab::ssmle_logistic::{
    asymptotic_gen, asymptotic_sweep, compute_matrices, draw_quadrature, solve_w_star_0,
    LogisticProblemSpec,
};
use ssl_gibbs_lab::RngStream;

const GRID: [f64; 7] = [0.0, 0.5, 1.0, 3.0, 10.0, 30.0, 100.0];

fn bayes(dim: usize, mu: f64) -> DVector<f64> {
    DVector::from_element(dim, 2.0 * mu)
}

fn relative_spread(w: &DVector<f64>) -> f64 {
    (w.max() - w.min()) / w.amax()
}

#[test]
fn information_equality_at_bayes_coefficient() {
    // tr(J⁻¹ I_l) = d at the true parameter of a well-specified model. The
    // single-quadrature estimate is noisy (rare misclassified points carry
    // the I_l mass), so average independent quadratures.
    let spec = LogisticProblemSpec::new(2, 2.0, 1e-12, 4_000_000).unwrap();
    let w = bayes(2, 2.0);
    let reps = 16;
    let mean: f64 = (0..reps)
        .map(|k| {
            let q = draw_quadrature(&spec, &RngStream::new(k, 7)).unwrap();
            asymptotic_gen(&spec, &compute_matrices(&spec, &w, &q).unwrap()).unwrap()
        })
        .sum::<f64>()
        / reps as f64;
    assert!((mean - 2.0).abs() <= 0.02 * 2.0, "mean trace {mean}");
}

#[test]
fn vanishing_regularisation_recovers_bayes_coefficient() {
    let spec = LogisticProblemSpec::new(2, 2.0, 1e-8, 1_000_000).unwrap();
    let q = draw_quadrature(&spec, &RngStream::new(3, 0)).unwrap();
    let w = solve_w_star_0(&spec, &q).unwrap();
    let target = bayes(2, 2.0);
    assert!(relative_spread(&w) <= 1e-6);
    assert!(
        (w.norm() - target.norm()).abs() <= 0.05 * target.norm(),
        "{w}"
    );
}

#[test]
#[ignore = "at nu = 1e-3 the penalty shrinks w*_0 to norm 3.3 against 5.66 for the Bayes coefficient"]
fn default_regularisation_matches_bayes_coefficient() {
    let spec = LogisticProblemSpec::new(2, 2.0, 1e-3, 1_000_000).unwrap();
    let q = draw_quadrature(&spec, &RngStream::new(3, 0)).unwrap();
    let w = solve_w_star_0(&spec, &q).unwrap();
    let target = bayes(2, 2.0);
    assert!(
        (w.norm() - target.norm()).abs() <= 0.05 * target.norm(),
        "{w}"
    );
}

#[test]
fn asymptotic_gen_falls_with_lambda() {
    let spec = LogisticProblemSpec::new(2, 2.0, 1e-3, 200_000).unwrap();
    let mut grid = GRID.to_vec();
    grid.push(1000.0);
    let reports = asymptotic_sweep(&spec, &grid, &RngStream::new(4, 0)).unwrap();
    let gens: Vec<f64> = reports.iter().map(|r| r.n_times_gen).collect();
    assert!(gens.windows(2).all(|w| w[1] < w[0]), "{gens:?}");
    assert!(gens[gens.len() - 1] <= gens[0] / 500.0);
    for r in &reports {
        assert!(relative_spread(&r.w_star_lambda) <= 1e-6);
        assert!(r.excess_bias >= 0.0);
    }
    let bias: Vec<f64> = reports.iter().map(|r| r.excess_bias).collect();
    assert!(bias.windows(2).all(|w| w[1] >= w[0]), "{bias:?}");
}
