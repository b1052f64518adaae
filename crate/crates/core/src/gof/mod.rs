//! Kolmogorov–Smirnov, Anderson–Darling and Pearson chi-squared tests.

mod ad;
mod ks;
mod pearson;

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::frft::{DensityTable, GridSpec};
use crate::models::ModelSpec;

pub use ad::{ad_cdf, ad_statistic, ad_statistic_with, ad_test, ad_test_with, CDF_CLAMP};
pub use ks::{
    kolmogorov_cdf, kolmogorov_cdf_series, kolmogorov_cdf_theta, kolmogorov_moments, ks_components, ks_statistic,
    ks_statistic_with, ks_test, ks_test_with, ks_two_sample, KsComponents,
};
pub use pearson::{
    pearson_bins, pearson_bins_with, pearson_test, pearson_test_with, write_bins_csv, PearsonBin, PearsonConfig,
};

/// A distribution function evaluated at sample points.
pub trait Cdf: Sync {
    fn cdf(&self, x: f64) -> Result<f64>;
}

impl Cdf for DensityTable {
    fn cdf(&self, x: f64) -> Result<f64> {
        self.cdf_at(x)
    }
}

/// Adapter for closed-form distribution functions.
pub struct FnCdf<F>(pub F);

impl<F: Fn(f64) -> f64 + Sync> Cdf for FnCdf<F> {
    fn cdf(&self, x: f64) -> Result<f64> {
        Ok((self.0)(x))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GofTest {
    Ks,
    Ad,
    Pearson,
}

impl std::fmt::Display for GofTest {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            GofTest::Ks => "Kolmogorov-Smirnov",
            GofTest::Ad => "Anderson-Darling",
            GofTest::Pearson => "Pearson chi-squared",
        })
    }
}

impl std::str::FromStr for GofTest {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ks" | "kolmogorov" => Ok(GofTest::Ks),
            "ad" | "anderson" => Ok(GofTest::Ad),
            "pearson" | "chi2" => Ok(GofTest::Pearson),
            other => Err(crate::error::domain(format!("unknown test '{other}'; expected ks, ad or pearson"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GofReport {
    pub test: GofTest,
    /// D_m, A²_m or χ².
    pub statistic: f64,
    /// √m·D_m for KS; the statistic itself otherwise.
    pub transformed: f64,
    /// Degrees of freedom (Pearson only).
    pub df: Option<usize>,
    pub p_value: f64,
    pub m: usize,
    pub bins: Option<Vec<PearsonBin>>,
}

impl GofReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} test (m = {})", self.test, self.m);
        match self.test {
            GofTest::Ks => {
                let _ = writeln!(s, "  D_m            {:.5}", self.statistic);
                let _ = writeln!(s, "  sqrt(m)*D_m    {:.3}", self.transformed);
            }
            GofTest::Ad => {
                let _ = writeln!(s, "  A^2_m          {:.4}", self.statistic);
            }
            GofTest::Pearson => {
                let bins = self.bins.as_ref().map_or(0, Vec::len);
                let _ = writeln!(s, "  chi^2          {:.3}", self.statistic);
                let _ = writeln!(s, "  classes K      {bins}");
                let _ = writeln!(s, "  df             {}", self.df.unwrap_or(0));
            }
        }
        let _ = writeln!(s, "  p-value        {:.4}", self.p_value);
        s
    }
}

/// Runs the requested tests against one model, sharing a single grid table.
pub fn run_tests(
    model: &ModelSpec,
    sample: &[f64],
    grid: &GridSpec,
    tests: &[GofTest],
    pearson: &PearsonConfig,
) -> Result<Vec<GofReport>> {
    let table = DensityTable::new(model, grid)?;
    let estimated = pearson.estimated_params.unwrap_or(model.free_count());
    let config = PearsonConfig { estimated_params: Some(estimated), ..pearson.clone() };
    tests
        .iter()
        .map(|t| match t {
            GofTest::Ks => ks_test_with(&table, sample),
            GofTest::Ad => ad_test_with(&table, sample),
            GofTest::Pearson => pearson_test_with(&table, sample, &config),
        })
        .collect()
}

pub(crate) fn sorted(sample: &[f64]) -> Result<Vec<f64>> {
    if sample.is_empty() {
        return Err(crate::Error::Data("empty sample".into()));
    }
    if let Some(x) = sample.iter().find(|x| !x.is_finite()) {
        return Err(crate::Error::Data(format!("sample value {x} is not finite")));
    }
    let mut s = sample.to_vec();
    s.sort_by(f64::total_cmp);
    Ok(s)
}
