//! Monte-Carlo bookkeeping: streaming moments, estimates with standard
//! errors, and a block-parallel trial driver whose output is bit-identical
//! to sequential execution.

use rayon::prelude::*;

use crate::rng::RngStream;

/// Trials per work unit. Fixed so the merge tree never depends on the
/// worker count.
pub const BLOCK_SIZE: u64 = 4096;

/// A point estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_err: f64,
    pub count: u64,
}

impl Estimate {
    /// A value with no sampling error (closed forms).
    pub fn exact(value: f64) -> Self {
        Estimate {
            value,
            std_err: 0.0,
            count: 0,
        }
    }

    pub fn combined_std_err(&self, other: &Estimate) -> f64 {
        self.std_err.hypot(other.std_err)
    }

    /// Difference in units of the combined standard error.
    pub fn z_score(&self, other: &Estimate) -> f64 {
        let se = self.combined_std_err(other);
        let diff = self.value - other.value;
        if se == 0.0 {
            if diff == 0.0 {
                0.0
            } else {
                f64::INFINITY * diff.signum()
            }
        } else {
            diff / se
        }
    }

    /// `|a - b| <= k * sqrt(se_a^2 + se_b^2)`.
    pub fn agrees_with(&self, other: &Estimate, k: f64) -> bool {
        (self.value - other.value).abs() <= k * self.combined_std_err(other)
    }

    pub fn scaled(&self, factor: f64) -> Estimate {
        Estimate {
            value: self.value * factor,
            std_err: self.std_err * factor.abs(),
            count: self.count,
        }
    }
}

/// Streaming mean/variance (Welford), mergeable with Chan's update.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Accumulator {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Accumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Accumulator) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n_a = self.count as f64;
        let n_b = other.count as f64;
        let total = n_a + n_b;
        let delta = other.mean - self.mean;
        self.mean += delta * n_b / total;
        self.m2 += other.m2 + delta * delta * n_a * n_b / total;
        self.count += other.count;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance; zero with fewer than two samples.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn estimate(&self) -> Estimate {
        let std_err = if self.count < 2 {
            f64::NAN
        } else {
            (self.variance() / self.count as f64).sqrt()
        };
        Estimate {
            value: self.mean,
            std_err,
            count: self.count,
        }
    }
}

impl FromIterator<f64> for Accumulator {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Accumulator::new();
        for x in iter {
            acc.push(x);
        }
        acc
    }
}

/// Run `trials` independent evaluations of `kernel`, trial `t` receiving
/// `root.trial(t)`, and average them.
///
/// Blocks of [`BLOCK_SIZE`] trials are accumulated sequentially and merged in
/// block order, so the result is the same for any rayon pool size.
pub fn monte_carlo<F>(trials: u64, root: &RngStream, kernel: F) -> Estimate
where
    F: Fn(RngStream) -> f64 + Sync,
{
    let blocks = trials.div_ceil(BLOCK_SIZE);
    let partials: Vec<Accumulator> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let start = b * BLOCK_SIZE;
            let end = (start + BLOCK_SIZE).min(trials);
            (start..end).map(|t| kernel(root.trial(t))).collect()
        })
        .collect();
    let mut total = Accumulator::new();
    for p in &partials {
        total.merge(p);
    }
    total.estimate()
}

/// Mean of an autocorrelated series with a batch-means standard error.
pub fn batch_means(series: &[f64], batches: usize) -> Estimate {
    let batches = batches.max(2).min(series.len().max(2));
    let len = series.len() / batches;
    if len == 0 {
        return series.iter().copied().collect::<Accumulator>().estimate();
    }
    let acc: Accumulator = series
        .chunks_exact(len)
        .take(batches)
        .map(|c| c.iter().sum::<f64>() / len as f64)
        .collect();
    acc.estimate()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    #[test]
    fn accumulator_matches_two_pass() {
        let xs = [1.0, 4.0, -2.5, 3.25, 0.0, 7.0];
        let acc: Accumulator = xs.iter().copied().collect();
        let mean = xs.iter().sum::<f64>() / 6.0;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 5.0;
        assert!((acc.mean() - mean).abs() < 1e-14);
        assert!((acc.variance() - var).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn merge_equals_single_pass(xs in proptest::collection::vec(-1e3f64..1e3, 2..200), split in 0usize..200) {
            let split = split.min(xs.len());
            let whole: Accumulator = xs.iter().copied().collect();
            let mut left: Accumulator = xs[..split].iter().copied().collect();
            let right: Accumulator = xs[split..].iter().copied().collect();
            left.merge(&right);
            prop_assert_eq!(left.count(), whole.count());
            prop_assert!((left.mean() - whole.mean()).abs() < 1e-9);
            prop_assert!((left.variance() - whole.variance()).abs() < 1e-6 * (1.0 + whole.variance()));
        }
    }

    #[test]
    fn monte_carlo_is_pool_size_independent() {
        let root = RngStream::new(3, 9);
        let kernel = |s: RngStream| s.rng().random::<f64>();
        let seq = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| monte_carlo(10_000, &root, kernel));
        let par = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| monte_carlo(10_000, &root, kernel));
        assert_eq!(seq, par);
        assert!((seq.value - 0.5).abs() < 4.0 * seq.std_err);
    }

    #[test]
    fn agreement_band() {
        let a = Estimate {
            value: 1.0,
            std_err: 0.3,
            count: 10,
        };
        let b = Estimate {
            value: 2.0,
            std_err: 0.4,
            count: 10,
        };
        assert!((a.combined_std_err(&b) - 0.5).abs() < 1e-15);
        assert!(a.agrees_with(&b, 2.0));
        assert!(!a.agrees_with(&b, 1.9));
        assert_eq!(Estimate::exact(1.0).z_score(&Estimate::exact(1.0)), 0.0);
    }
}
