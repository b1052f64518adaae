use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{sorted, Cdf, GofReport, GofTest};
use crate::error::{Error, Result};
use crate::frft::{DensityTable, GridSpec};
use crate::models::ModelSpec;
use crate::special::chi2_sf;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PearsonConfig {
    /// Number of equal-width classes spanning [min, max] of the sample before merging.
    pub classes: usize,
    /// Class width; overrides `classes` when set. Classes start at the sample minimum.
    pub bin_width: Option<f64>,
    /// Smallest admissible expected count per class.
    pub min_expected: f64,
    /// Parameters subtracted from the degrees of freedom; defaults to the model's free count.
    pub estimated_params: Option<usize>,
}

impl Default for PearsonConfig {
    fn default() -> Self {
        Self { classes: 30, bin_width: None, min_expected: 5.0, estimated_params: None }
    }
}

/// One class (x_{j−1}, x_j]; the first and last classes are half-lines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PearsonBin {
    /// Right edge; `None` for the last class.
    pub x_right: Option<f64>,
    pub expected: f64,
    pub observed: usize,
}

fn cuts(lo: f64, hi: f64, config: &PearsonConfig) -> Result<Vec<f64>> {
    if !(hi > lo) {
        return Err(Error::Data("sample has a single distinct value".into()));
    }
    let (width, count) = match config.bin_width {
        Some(w) if w > 0.0 => (w, ((hi - lo) / w).ceil() as usize),
        Some(w) => return Err(crate::error::domain(format!("bin width {w} must be positive"))),
        None if config.classes >= 2 => ((hi - lo) / config.classes as f64, config.classes),
        None => return Err(crate::error::domain("at least two classes are needed")),
    };
    Ok((1..count).map(|k| lo + k as f64 * width).filter(|&c| c < hi).collect())
}

/// Classes with expected counts m·Π_j, merged until each reaches the configured floor.
pub fn pearson_bins_with(cdf: &impl Cdf, sample: &[f64], config: &PearsonConfig) -> Result<Vec<PearsonBin>> {
    let s = sorted(sample)?;
    let m = s.len() as f64;
    let mut edges = cuts(s[0], s[s.len() - 1], config)?;
    let mut f = edges.iter().map(|&c| cdf.cdf(c)).collect::<Result<Vec<f64>>>()?;
    let expected = |f: &[f64], j: usize| {
        let hi = if j < f.len() { f[j] } else { 1.0 };
        let lo = if j > 0 { f[j - 1] } else { 0.0 };
        m * (hi - lo)
    };
    // classes are j = 0..=edges.len(); removing edge j merges classes j and j+1
    while !edges.is_empty() && expected(&f, 0) < config.min_expected {
        edges.remove(0);
        f.remove(0);
    }
    while !edges.is_empty() && expected(&f, edges.len()) < config.min_expected {
        edges.pop();
        f.pop();
    }
    loop {
        let k = edges.len() + 1;
        let low = (1..k - 1)
            .filter(|&j| expected(&f, j) < config.min_expected)
            .min_by(|&a, &b| expected(&f, a).total_cmp(&expected(&f, b)));
        let Some(j) = low else { break };
        // merge with the smaller neighbour
        let edge = if expected(&f, j - 1) <= expected(&f, j + 1) { j - 1 } else { j };
        edges.remove(edge);
        f.remove(edge);
    }
    let mut observed = vec![0usize; edges.len() + 1];
    let mut j = 0;
    for &x in &s {
        while j < edges.len() && x > edges[j] {
            j += 1;
        }
        observed[j] += 1;
    }
    Ok((0..=edges.len())
        .map(|j| PearsonBin { x_right: edges.get(j).copied(), expected: expected(&f, j), observed: observed[j] })
        .collect())
}

pub fn pearson_bins(
    model: &ModelSpec,
    sample: &[f64],
    grid: &GridSpec,
    config: &PearsonConfig,
) -> Result<Vec<PearsonBin>> {
    pearson_bins_with(&DensityTable::new(model, grid)?, sample, config)
}

/// χ² = Σ (N_j − m·Π_j)² / (m·Π_j) with K − 1 − p degrees of freedom;
/// p is `estimated_params`, taken as 0 when unset.
pub fn pearson_test_with(cdf: &impl Cdf, sample: &[f64], config: &PearsonConfig) -> Result<GofReport> {
    let p = config.estimated_params.unwrap_or(0);
    let bins = pearson_bins_with(cdf, sample, config)?;
    if bins.len() < p + 2 {
        return Err(Error::Data(format!(
            "only {} classes remain after merging; at least {} are needed for {p} estimated parameters",
            bins.len(),
            p + 2
        )));
    }
    let df = bins.len() - 1 - p;
    let chi2: f64 = bins.iter().map(|b| (b.observed as f64 - b.expected).powi(2) / b.expected).sum();
    Ok(GofReport {
        test: GofTest::Pearson,
        statistic: chi2,
        transformed: chi2,
        df: Some(df),
        p_value: chi2_sf(chi2, df),
        m: sample.len(),
        bins: Some(bins),
    })
}

/// Pearson test with the model's free-parameter count as the default adjustment.
pub fn pearson_test(model: &ModelSpec, sample: &[f64], grid: &GridSpec, config: &PearsonConfig) -> Result<GofReport> {
    let config = PearsonConfig {
        estimated_params: Some(config.estimated_params.unwrap_or(model.free_count())),
        ..config.clone()
    };
    pearson_test_with(&DensityTable::new(model, grid)?, sample, &config)
}

/// Class table as CSV: k, x_right, expected, observed.
pub fn write_bins_csv<W: Write>(bins: &[PearsonBin], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["k", "x_right", "expected", "observed"])?;
    for (k, b) in bins.iter().enumerate() {
        w.write_record([
            (k + 1).to_string(),
            b.x_right.map_or(String::new(), |x| format!("{x:.3}")),
            format!("{:.3}", b.expected),
            b.observed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
