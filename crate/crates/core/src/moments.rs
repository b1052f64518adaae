//! Raw moments from cumulants and the empirical-against-theoretical report.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::data::summary;
use crate::error::{Error, Result};
use crate::models::{Cumulants, ModelSpec, K_MAX};

/// Raw moments (1/m) Σ x^k for k = 1..=k_max.
pub fn empirical_moments(sample: &[f64], k_max: usize) -> Vec<f64> {
    let m = sample.len() as f64;
    let mut sums = vec![0.0; k_max];
    for &x in sample {
        let mut p = 1.0;
        for s in sums.iter_mut() {
            p *= x;
            *s += p;
        }
    }
    sums.into_iter().map(|s| s / m).collect()
}

/// Raw moments from cumulants: m_k = Σ_{j=1}^{k} C(k−1, j−1) κ_j m_{k−j}, m₀ = 1.
pub fn cumulants_to_moments(kappa: &Cumulants) -> Vec<f64> {
    let k_max = kappa.kappa.len();
    let mut m = vec![1.0; k_max + 1];
    for k in 1..=k_max {
        let mut binom = 1.0;
        let mut acc = 0.0;
        for j in 1..=k {
            acc += binom * kappa.get(j) * m[k - j];
            binom = binom * (k - j) as f64 / j as f64;
        }
        m[k] = acc;
    }
    m.remove(0);
    m
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentRow {
    pub label: String,
    pub empirical: f64,
    pub theoretical: f64,
    /// (empirical − theoretical)/theoretical; `None` when the theoretical value is 0.
    pub relative_error: Option<f64>,
}

impl MomentRow {
    fn new(label: impl Into<String>, empirical: f64, theoretical: f64) -> Self {
        let relative_error = (theoretical != 0.0).then(|| (empirical - theoretical) / theoretical);
        Self { label: label.into(), empirical, theoretical, relative_error }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub family: String,
    pub sample_size: usize,
    /// Raw moments k = 1..=7.
    pub moments: Vec<MomentRow>,
    /// Standard deviation, skewness and kurtosis.
    pub shape: Vec<MomentRow>,
}

pub fn moment_report(model: &ModelSpec, sample: &[f64]) -> Result<MomentReport> {
    if sample.is_empty() {
        return Err(Error::Data("empty sample".into()));
    }
    let kappa = model.cumulants(K_MAX)?;
    let theo = cumulants_to_moments(&kappa);
    let emp = empirical_moments(sample, K_MAX);
    let moments = (0..K_MAX).map(|k| MomentRow::new(format!("m{}", k + 1), emp[k], theo[k])).collect();
    let s = summary(sample)?;
    let shape = vec![
        MomentRow::new("sigma", s.sd, kappa.std_dev()),
        MomentRow::new("skewness", s.skewness, kappa.skewness()),
        MomentRow::new("kurtosis", s.kurtosis, kappa.kurtosis()),
    ];
    Ok(MomentReport { family: model.family().to_string(), sample_size: sample.len(), moments, shape })
}

fn fmt_value(v: f64) -> String {
    if v == 0.0 || (v.abs() >= 1e-3 && v.abs() < 1e9) {
        format!("{v:.3}")
    } else {
        format!("{v:.4e}")
    }
}

impl MomentReport {
    /// Empirical, theoretical and relative-error columns.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "Evaluation of the moment method: {} (sample size {})", self.family, self.sample_size);
        let _ = writeln!(s, "{:<10}{:>20}{:>20}{:>14}", "", "Empirical(1)", "Theoretical(2)", "(1-2)/2");
        for row in self.moments.iter().chain(&self.shape) {
            let rel = row.relative_error.map_or("n/a".to_string(), |r| format!("{:.1}%", 100.0 * r));
            let _ = writeln!(
                s,
                "{:<10}{:>20}{:>20}{:>14}",
                row.label,
                fmt_value(row.empirical),
                fmt_value(row.theoretical),
                rel
            );
        }
        s
    }
}
