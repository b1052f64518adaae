use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Smallest admissible intensity or tempering rate.
pub const POSITIVE_FLOOR: f64 = 1e-12;
/// Largest admissible stability index.
pub const BETA_CEILING: f64 = 1.0 - 1e-9;
/// Below this stability index the exponent uses the Bilateral Gamma log form.
pub const BG_SWITCH: f64 = 1e-8;

/// Coordinate names in canonical order.
pub const GTS_NAMES: [&str; 7] =
    ["mu", "beta_plus", "beta_minus", "alpha_plus", "alpha_minus", "lambda_plus", "lambda_minus"];

/// The seven GTS parameters. Fields are public so that out-of-domain values
/// can be constructed for diagnostics; [`GtsParams::validate`] enforces the
/// supported region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GtsParams {
    pub mu: f64,
    pub beta_plus: f64,
    pub beta_minus: f64,
    pub alpha_plus: f64,
    pub alpha_minus: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
}

impl GtsParams {
    pub fn new(
        mu: f64,
        beta_plus: f64,
        beta_minus: f64,
        alpha_plus: f64,
        alpha_minus: f64,
        lambda_plus: f64,
        lambda_minus: f64,
    ) -> Result<Self> {
        let p = Self { mu, beta_plus, beta_minus, alpha_plus, alpha_minus, lambda_plus, lambda_minus };
        p.validate()?;
        Ok(p)
    }

    pub fn from_array(v: [f64; 7]) -> Result<Self> {
        Self::new(v[0], v[1], v[2], v[3], v[4], v[5], v[6])
    }

    pub fn to_array(&self) -> [f64; 7] {
        [
            self.mu,
            self.beta_plus,
            self.beta_minus,
            self.alpha_plus,
            self.alpha_minus,
            self.lambda_plus,
            self.lambda_minus,
        ]
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.to_array();
        if let Some(i) = v.iter().position(|x| !x.is_finite()) {
            return Err(domain(format!("{} is not finite", GTS_NAMES[i])));
        }
        for (name, b) in [("beta_plus", self.beta_plus), ("beta_minus", self.beta_minus)] {
            if !(0.0..=BETA_CEILING).contains(&b) {
                return Err(domain(format!("{name} = {b} outside [0, 1)")));
            }
        }
        for (i, x) in v.iter().enumerate().skip(3) {
            if *x < POSITIVE_FLOOR {
                return Err(domain(format!("{} = {x} must be positive", GTS_NAMES[i])));
            }
        }
        Ok(())
    }

    /// Clamps every coordinate into the admissible box.
    pub fn clamp_to_domain(&self) -> Self {
        let b = |x: f64| x.clamp(0.0, BETA_CEILING);
        let p = |x: f64| x.max(POSITIVE_FLOOR);
        Self {
            mu: self.mu,
            beta_plus: b(self.beta_plus),
            beta_minus: b(self.beta_minus),
            alpha_plus: p(self.alpha_plus),
            alpha_minus: p(self.alpha_minus),
            lambda_plus: p(self.lambda_plus),
            lambda_minus: p(self.lambda_minus),
        }
    }

    /// Mirror image under x → −x.
    pub fn mirrored(&self) -> Self {
        Self {
            mu: -self.mu,
            beta_plus: self.beta_minus,
            beta_minus: self.beta_plus,
            alpha_plus: self.alpha_minus,
            alpha_minus: self.alpha_plus,
            lambda_plus: self.lambda_minus,
            lambda_minus: self.lambda_plus,
        }
    }
}
