//! Likelihood assembly, Newton–Raphson fitting and asymptotic inference.

mod eval;
mod fit;
mod lrt;
pub mod report;

use serde::{Deserialize, Serialize};

use crate::models::GtsParams;

pub use eval::{evaluate, hessian, log_likelihood, score, Evaluation, DENSITY_FLOOR};
pub use fit::{auto_init, fit, fit_normal, FitConfig, FitResult, Init, ParamInference, MIN_SAMPLE};
pub use lrt::{likelihood_ratio_test, lrt_p_value, LrtResult, LRT_SLACK};

/// One Newton–Raphson iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iteration: usize,
    /// Free coordinates in the family's order.
    pub values: Vec<f64>,
    /// GTS embedding of `values` (absent for the Normal family).
    pub params: Option<GtsParams>,
    pub loglik: f64,
    pub grad_norm: f64,
    pub max_eigenvalue: f64,
}
