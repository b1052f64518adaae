use serde::{Deserialize, Serialize};

use super::fit::FitResult;
use crate::error::{domain, Error, Result};
use crate::special::chi2_sf;

/// Slack allowed when the restricted fit appears better than the full one.
pub const LRT_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LrtResult {
    pub chi2: f64,
    pub df: usize,
    pub p_value: f64,
}

/// Upper-tail probability of the likelihood-ratio statistic, with df = 0
/// treated as a point mass at zero.
pub fn lrt_p_value(chi2: f64, df: usize) -> f64 {
    if df == 0 {
        return if chi2 > 0.0 { 0.0 } else { 1.0 };
    }
    chi2_sf(chi2, df)
}

/// 2Δl against the χ² law with the difference in free parameters as df.
pub fn likelihood_ratio_test(full: &FitResult, restricted: &FitResult) -> Result<LrtResult> {
    if !full.family().nests(restricted.family()) {
        return Err(Error::NotNested(format!("{} does not contain {}", full.family(), restricted.family())));
    }
    if full.sample_size != restricted.sample_size {
        return Err(domain("the two fits use samples of different sizes"));
    }
    if full.loglik < restricted.loglik - LRT_SLACK * restricted.loglik.abs().max(1.0) {
        return Err(domain(format!(
            "restricted log-likelihood {} exceeds the full one {}; the full fit has not reached its maximum",
            restricted.loglik, full.loglik
        )));
    }
    let chi2 = (2.0 * (full.loglik - restricted.loglik)).max(0.0);
    let df = full.free_count() - restricted.free_count();
    Ok(LrtResult { chi2, df, p_value: lrt_p_value(chi2, df) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printed_p_values() {
        for (chi2, df, p) in [(0.1525, 1, 0.696), (2.0810, 2, 0.3533), (8.1828, 2, 0.0167), (10.9234, 2, 0.0042)] {
            assert!((lrt_p_value(chi2, df) - p).abs() < 5e-4);
        }
        assert_eq!(lrt_p_value(0.0, 0), 1.0);
    }
}
