//! Complexity measures of signal sets and parameters of quantizers.
//!
//! Monte Carlo estimators split their samples into fixed-size chunks, each
//! driven by its own random stream `(seed, chunk_index)`. Chunk statistics are
//! merged in chunk order, so a given seed yields the same estimate whether
//! the chunks run sequentially or on a worker pool.

mod conic;
mod montecarlo;
mod quantizer;
mod width;

use serde::{Deserialize, Serialize};

pub use conic::{conic_effdim_l1, l1_descent_cone_objective};
pub use montecarlo::{mc_estimate, McStats, MC_CHUNK};
pub use quantizer::{
    check_c2, check_c2_with, hinge_risk_along_truth, lambda_monte_carlo, lambda_of, model_params, mu_of, C2Report,
    LambdaMethod, ModelParams,
};
pub use width::{effective_dim, gaussian_width, gaussian_width_with, local_width, local_width_with, LocalWidthConfig};

/// Monte Carlo estimate of a (local) Gaussian width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WidthEstimate {
    pub mean: f64,
    /// Sample standard deviation over `√samples`.
    pub std_error: f64,
    pub samples: usize,
    /// Set when the inner supremum is only approximated from below.
    pub lower_bound: bool,
}

/// A scalar parameter together with how it was obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamEstimate {
    pub value: f64,
    /// Zero for deterministic methods.
    pub std_error: f64,
    pub method: String,
    pub seed: Option<u64>,
}
