use serde::{Deserialize, Serialize};

use super::params::GtsParams;
use crate::error::{domain, Result};
use crate::special::gamma;

/// Highest cumulant order used by the moment report.
pub const K_MAX: usize = 7;

/// Cumulants κ₁..κ_K; `kappa[k - 1]` holds κ_k.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cumulants {
    pub kappa: Vec<f64>,
}

impl Cumulants {
    pub fn get(&self, k: usize) -> f64 {
        self.kappa[k - 1]
    }

    pub fn std_dev(&self) -> f64 {
        self.get(2).sqrt()
    }

    pub fn skewness(&self) -> f64 {
        self.get(3) / self.get(2).powf(1.5)
    }

    pub fn kurtosis(&self) -> f64 {
        3.0 + self.get(4) / (self.get(2) * self.get(2))
    }
}

fn tail(alpha: f64, beta: f64, lambda: f64, k: usize) -> f64 {
    let kf = k as f64;
    alpha * gamma(kf - beta) / lambda.powf(kf - beta)
}

/// κ_k of the GTS law.
pub fn cumulant(params: &GtsParams, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(domain("cumulant order must be at least 1"));
    }
    params.validate()?;
    let plus = tail(params.alpha_plus, params.beta_plus, params.lambda_plus, k);
    let minus = tail(params.alpha_minus, params.beta_minus, params.lambda_minus, k);
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let base = if k == 1 { params.mu } else { 0.0 };
    Ok(base + plus + sign * minus)
}

pub fn cumulants(params: &GtsParams, k_max: usize) -> Result<Cumulants> {
    let kappa = (1..=k_max).map(|k| cumulant(params, k)).collect::<Result<_>>()?;
    Ok(Cumulants { kappa })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn odd_cumulants_vanish_when_symmetric() {
        let p = GtsParams::new(0.0, 0.4, 0.4, 1.1, 1.1, 0.7, 0.7).unwrap();
        for k in [1, 3, 5, 7] {
            assert!(cumulant(&p, k).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn bilateral_gamma_variance() {
        let p = GtsParams::new(0.3, 0.0, 0.0, 1.5, 0.5, 2.0, 0.8).unwrap();
        let k2 = cumulant(&p, 2).unwrap();
        assert!((k2 - (1.5 / 4.0 + 0.5 / 0.64)).abs() < 1e-14);
    }

    #[test]
    fn zero_order_rejected() {
        let p = GtsParams::new(0.0, 0.4, 0.4, 1.1, 1.1, 0.7, 0.7).unwrap();
        assert!(cumulant(&p, 0).is_err());
    }
}
