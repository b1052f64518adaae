use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use super::{sorted, Cdf, GofReport, GofTest};
use crate::error::Result;
use crate::frft::{DensityTable, GridSpec};
use crate::models::ModelSpec;

const SERIES_TOL: f64 = 1e-14;

/// The two one-sided suprema whose maximum is D_m.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsComponents {
    /// max_j |F(x_(j)) − j/m|
    pub right: f64,
    /// max_j |F(x_(j)) − (j−1)/m|
    pub left: f64,
}

impl KsComponents {
    pub fn statistic(&self) -> f64 {
        self.right.max(self.left)
    }
}

pub fn ks_components(cdf: &impl Cdf, sample: &[f64]) -> Result<KsComponents> {
    let s = sorted(sample)?;
    let m = s.len() as f64;
    let mut c = KsComponents { right: 0.0, left: 0.0 };
    for (j, &x) in s.iter().enumerate() {
        let f = cdf.cdf(x)?;
        c.right = c.right.max((f - (j + 1) as f64 / m).abs());
        c.left = c.left.max((f - j as f64 / m).abs());
    }
    Ok(c)
}

pub fn ks_statistic_with(cdf: &impl Cdf, sample: &[f64]) -> Result<f64> {
    Ok(ks_components(cdf, sample)?.statistic())
}

pub fn ks_statistic(model: &ModelSpec, sample: &[f64], grid: &GridSpec) -> Result<f64> {
    ks_statistic_with(&DensityTable::new(model, grid)?, sample)
}

/// 1 − 2 Σ (−1)^{k−1} e^{−2k²x²}.
pub fn kolmogorov_cdf_series(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let mut sum = 0.0;
    for k in 1.. {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * x * x).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < SERIES_TOL {
            break;
        }
    }
    1.0 - 2.0 * sum
}

/// (√(2π)/x) Σ e^{−(2k−1)²π²/(8x²)}.
pub fn kolmogorov_cdf_theta(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let mut sum = 0.0;
    for k in 1.. {
        let a = (2 * k - 1) as f64;
        let term = (-a * a * PI * PI / (8.0 * x * x)).exp();
        sum += term;
        if term < SERIES_TOL {
            break;
        }
    }
    (2.0 * PI).sqrt() / x * sum
}

/// Limiting distribution of √m·D_m; 0 for x ≤ 0.
pub fn kolmogorov_cdf(x: f64) -> f64 {
    let v = if x >= 1.0 { kolmogorov_cdf_series(x) } else { kolmogorov_cdf_theta(x) };
    v.clamp(0.0, 1.0)
}

/// Mean and standard deviation of the Kolmogorov distribution.
pub fn kolmogorov_moments() -> (f64, f64) {
    let mean = (PI / 2.0).sqrt() * LN_2;
    (mean, (PI * PI / 12.0 - mean * mean).sqrt())
}

pub fn ks_test_with(cdf: &impl Cdf, sample: &[f64]) -> Result<GofReport> {
    let d = ks_statistic_with(cdf, sample)?;
    let m = sample.len();
    let t = (m as f64).sqrt() * d;
    Ok(GofReport {
        test: GofTest::Ks,
        statistic: d,
        transformed: t,
        df: None,
        p_value: 1.0 - kolmogorov_cdf(t),
        m,
        bins: None,
    })
}

pub fn ks_test(model: &ModelSpec, sample: &[f64], grid: &GridSpec) -> Result<GofReport> {
    ks_test_with(&DensityTable::new(model, grid)?, sample)
}

/// Two-sample statistic sup|F_a − F_b| and its asymptotic p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<(f64, f64)> {
    let (a, b) = (sorted(a)?, sorted(b)?);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let t = (na * nb / (na + nb)).sqrt() * d;
    Ok((d, 1.0 - kolmogorov_cdf(t)))
}
