//! Lévy-measure diagnostics and the time-scaling rule.

use serde::{Deserialize, Serialize};

use super::params::GtsParams;
use crate::error::{domain, Result};
use crate::special::{gamma, lower_incomplete_gamma};

/// Lévy density ν(x) of the GTS measure.
pub fn levy_density(params: &GtsParams, x: f64) -> Result<f64> {
    if x == 0.0 {
        return Err(domain("the Lévy density is singular at x = 0"));
    }
    let (a, b, l) = if x > 0.0 {
        (params.alpha_plus, params.beta_plus, params.lambda_plus)
    } else {
        (params.alpha_minus, params.beta_minus, params.lambda_minus)
    };
    let ax = x.abs();
    Ok(a * (-l * ax).exp() / ax.powf(1.0 + b))
}

/// ∫_{−1}^{1} |x| ν(dx), finite for every β± in [0, 1).
pub fn variation_integral(params: &GtsParams) -> Result<f64> {
    params.validate()?;
    let side = |a: f64, b: f64, l: f64| a * l.powf(b - 1.0) * lower_incomplete_gamma(1.0 - b, l);
    Ok(side(params.alpha_minus, params.beta_minus, params.lambda_minus)
        + side(params.alpha_plus, params.beta_plus, params.lambda_plus))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Activity {
    InfiniteActivity,
    /// Total mass ν(ℝ) of the Lévy measure.
    FiniteActivity(f64),
}

/// Classifies the jump activity. Negative stability indexes are accepted here
/// so that the finite-activity regime can be reported.
pub fn activity_classification(params: &GtsParams) -> Activity {
    if params.beta_plus >= 0.0 || params.beta_minus >= 0.0 {
        return Activity::InfiniteActivity;
    }
    let side = |a: f64, b: f64, l: f64| a * l.powf(b) * gamma(-b);
    Activity::FiniteActivity(
        side(params.alpha_plus, params.beta_plus, params.lambda_plus)
            + side(params.alpha_minus, params.beta_minus, params.lambda_minus),
    )
}

/// Law of the process at time `t` given its law at time 1.
pub fn scale_time(params: &GtsParams, t: f64) -> Result<GtsParams> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(domain(format!("time scale must be positive, got {t}")));
    }
    params.validate()?;
    Ok(GtsParams {
        mu: t * params.mu,
        alpha_plus: t * params.alpha_plus,
        alpha_minus: t * params.alpha_minus,
        ..*params
    })
}
