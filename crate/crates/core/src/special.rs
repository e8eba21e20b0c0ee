//! Standard normal tail and density.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Gaussian tail `Q(x) = P(G > x)` for `G ~ N(0, 1)`.
pub fn gaussian_tail(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

pub fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// `log(1 + e^{-t})` without overflow.
pub fn log1p_exp_neg(t: f64) -> f64 {
    if t > 0.0 {
        (-t).exp().ln_1p()
    } else {
        -t + t.exp().ln_1p()
    }
}

/// Logistic function `1 / (1 + e^{-t})`.
pub fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values computed with mpmath at 40 digits.
    #[allow(clippy::excessive_precision)]
    const TABLE: [(f64, f64); 10] = [
        (-8.0, 0.999_999_999_999_999_377_9),
        (-3.5, 0.999_767_370_920_964_474_96),
        (-1.0, 0.841_344_746_068_542_948_59),
        (0.0, 0.5),
        (0.5, 0.308_537_538_725_986_896_36),
        (1.0, 0.158_655_253_931_457_051_41),
        (2.5, 0.006_209_665_325_776_135_167),
        (4.0, 3.167_124_183_311_992_125_4e-5),
        (6.0, 9.865_876_450_376_981_407e-10),
        (8.0, 6.220_960_574_271_784_123_5e-16),
    ];

    #[test]
    fn tail_relative_accuracy() {
        for (x, q) in TABLE {
            let rel = (gaussian_tail(x) - q).abs() / q;
            assert!(rel <= 1e-12, "Q({x}) rel err {rel:e}");
        }
    }

    #[test]
    fn logistic_helpers_are_stable() {
        assert!((log1p_exp_neg(0.0) - std::f64::consts::LN_2).abs() < 1e-16);
        assert_eq!(log1p_exp_neg(800.0), 0.0);
        assert!((log1p_exp_neg(-800.0) - 800.0).abs() < 1e-12);
        assert_eq!(sigmoid(-800.0), 0.0);
        assert_eq!(sigmoid(800.0), 1.0);
        for t in [-3.0, -0.5, 0.1, 2.0, 30.0] {
            assert!((sigmoid(t) + sigmoid(-t) - 1.0).abs() < 1e-15);
            assert!((log1p_exp_neg(t) - (1.0 + (-t).exp()).ln()).abs() < 1e-14);
        }
    }

    #[test]
    fn tail_symmetry() {
        for i in 0..=80 {
            let x = -8.0 + 0.2 * i as f64;
            assert!((gaussian_tail(x) + gaussian_tail(-x) - 1.0).abs() < 1e-15);
        }
    }
}
