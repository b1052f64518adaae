use std::f64::consts::PI;

use super::{sorted, Cdf, GofReport, GofTest};
use crate::error::Result;
use crate::frft::{DensityTable, GridSpec};
use crate::models::ModelSpec;
use crate::quad::integrate;
use crate::special::ln_gamma;

/// Distribution-function values are kept within [CDF_CLAMP, 1 − CDF_CLAMP] before logs.
pub const CDF_CLAMP: f64 = 1e-15;

const TERM_TOL: f64 = 1e-10;
const INNER_UPPER: f64 = 8.0;
/// Beyond this the limiting distribution equals 1 to double precision.
const SATURATION: f64 = 150.0;

/// A²_m = −m − (1/m) Σ (2j−1)[ln F(x_(j)) + ln(1 − F(x_(m+1−j)))].
pub fn ad_statistic_with(cdf: &impl Cdf, sample: &[f64]) -> Result<f64> {
    let s = sorted(sample)?;
    let f = s.iter().map(|&x| Ok(cdf.cdf(x)?.clamp(CDF_CLAMP, 1.0 - CDF_CLAMP))).collect::<Result<Vec<f64>>>()?;
    let m = f.len();
    let sum: f64 = (0..m).map(|j| (2 * j + 1) as f64 * (f[j].ln() + (1.0 - f[m - 1 - j]).ln())).sum();
    Ok(-(m as f64) - sum / m as f64)
}

pub fn ad_statistic(model: &ModelSpec, sample: &[f64], grid: &GridSpec) -> Result<f64> {
    ad_statistic_with(&DensityTable::new(model, grid)?, sample)
}

/// Limiting distribution of A²_m; 0 for x ≤ 0.
///
/// G(x) = Σ_j a_j (x b_j)^{−1/2} e^{−b_j/x} ∫₀^∞ exp(x b_j / (8(y²x + b_j))) e^{−y²} dy
/// with a_j = (−1)^j √2 (4j+1) Γ(j+½)/j! and b_j = (4j+1)²π²/8.
pub fn ad_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= SATURATION {
        return 1.0;
    }
    let mut sum = 0.0;
    for j in 0..200 {
        let jf = j as f64;
        let c = 4.0 * jf + 1.0;
        let b = c * c * PI * PI / 8.0;
        let a = 2f64.sqrt() * c * (ln_gamma(jf + 0.5) - ln_gamma(jf + 1.0)).exp();
        let a = if j % 2 == 0 { a } else { -a };
        let inner = integrate(|y| (x * b / (8.0 * (y * y * x + b)) - y * y).exp(), 0.0, INNER_UPPER, 1e-12, 1e-12).0;
        let term = a * (x * b).powf(-0.5) * (-b / x).exp() * inner;
        sum += term;
        if term.abs() < TERM_TOL {
            break;
        }
    }
    sum.clamp(0.0, 1.0)
}

pub fn ad_test_with(cdf: &impl Cdf, sample: &[f64]) -> Result<GofReport> {
    let a2 = ad_statistic_with(cdf, sample)?;
    Ok(GofReport {
        test: GofTest::Ad,
        statistic: a2,
        transformed: a2,
        df: None,
        p_value: 1.0 - ad_cdf(a2),
        m: sample.len(),
        bins: None,
    })
}

pub fn ad_test(model: &ModelSpec, sample: &[f64], grid: &GridSpec) -> Result<GofReport> {
    ad_test_with(&DensityTable::new(model, grid)?, sample)
}
