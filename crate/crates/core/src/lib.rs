//! Numerical lab for pseudo-labeling semi-supervised learning under the
//! Gibbs algorithm.

pub mod error;
pub mod gibbs_sgld;
pub mod harness;
pub mod mean_estimation;
pub mod newton;
pub mod rng;
pub mod special;
pub mod ssmle_logistic;
pub mod stats;
pub mod synthdata;

pub use error::{Error, Result};
pub use rng::RngStream;
pub use stats::Estimate;
