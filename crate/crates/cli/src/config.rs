//! Config-file defaults merged with command-line flags.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use chrono::NaiveDate;
use gts_core::data::{FilterRule, LoadOptions};
use gts_core::frft::GridSpec;
use gts_core::gof::{GofTest, PearsonConfig};
use gts_core::likelihood::FitConfig;
use serde::{Deserialize, Serialize};

use crate::args::{Cli, Command, Format, GridPreset};

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub format: Option<Format>,
    pub seed: Option<u64>,
    pub grid: GridFile,
    pub data: DataFile,
    pub fit: FitFile,
    pub gof: GofFile,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridFile {
    pub preset: Option<GridPreset>,
    pub n: Option<usize>,
    pub xi_max: Option<f64>,
    pub x_range: Option<[f64; 2]>,
    pub quad_order: Option<usize>,
    pub m_out: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataFile {
    pub date_column: Option<String>,
    pub price_column: Option<String>,
    pub date_format: Option<String>,
    pub scale: Option<f64>,
    pub filter: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitFile {
    pub max_iter: Option<usize>,
    pub grad_tol: Option<f64>,
    pub confidence: Option<f64>,
    pub hess_check: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GofFile {
    pub tests: Option<Vec<GofTest>>,
    pub classes: Option<usize>,
    pub bin_width: Option<f64>,
    pub min_expected: Option<f64>,
    pub estimated_params: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DataSettings {
    pub load: LoadOptions,
    pub scale: f64,
    pub filter: FilterRule,
}

#[derive(Debug, Clone, Serialize)]
pub struct GofSettings {
    pub tests: Vec<GofTest>,
    pub pearson: PearsonConfig,
}

/// Everything a run depends on, echoed into its report.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub version: &'static str,
    pub format: Format,
    pub seed: u64,
    pub grid: GridSpec,
    pub data: DataSettings,
    pub fit: FitConfig,
    pub gof: GofSettings,
    pub command: serde_json::Value,
}

pub const DEFAULT_SEED: u64 = 1;

impl RunConfig {
    pub fn resolve(cli: &Cli) -> Result<Self> {
        let file = match &cli.global.config {
            Some(path) => load_file(path)?,
            None => FileConfig::default(),
        };
        let g = &cli.global;

        let preset = g.grid.or(file.grid.preset).unwrap_or_default();
        let mut grid = match preset {
            GridPreset::Crypto => GridSpec::crypto(),
            GridPreset::Equity => GridSpec::equity(),
        };
        if let Some(n) = g.grid_n.or(file.grid.n) {
            grid.n = n;
        }
        if let Some(x) = g.xi_max.or(file.grid.xi_max) {
            grid.xi_max = x;
        }
        if let Some(r) = g.x_range.map(|r| [r.0, r.1]).or(file.grid.x_range) {
            (grid.x_min, grid.x_max) = (r[0], r[1]);
        }
        if let Some(q) = g.quad_order.or(file.grid.quad_order) {
            grid.quad_order = q;
        }
        if let Some(m) = g.m_out.or(file.grid.m_out) {
            grid.m_out = m;
        }

        let mut data = DataSettings {
            load: LoadOptions {
                date_column: file.data.date_column.unwrap_or_else(|| LoadOptions::default().date_column),
                price_column: file.data.price_column,
                date_format: file.data.date_format,
                ..LoadOptions::default()
            },
            scale: file.data.scale.unwrap_or(100.0),
            filter: file.data.filter.as_deref().map(parse_filter).transpose()?.unwrap_or_default(),
        };

        let defaults = FitConfig::default();
        let mut fit = FitConfig {
            max_iter: file.fit.max_iter.unwrap_or(defaults.max_iter),
            grad_tol: file.fit.grad_tol.unwrap_or(defaults.grad_tol),
            confidence: file.fit.confidence.unwrap_or(defaults.confidence),
            hess_check: file.fit.hess_check.unwrap_or(defaults.hess_check),
            ..defaults
        };

        let base = PearsonConfig::default();
        let mut gof = GofSettings {
            tests: file.gof.tests.unwrap_or_else(|| vec![GofTest::Ks, GofTest::Ad, GofTest::Pearson]),
            pearson: PearsonConfig {
                classes: file.gof.classes.unwrap_or(base.classes),
                bin_width: file.gof.bin_width.or(base.bin_width),
                min_expected: file.gof.min_expected.unwrap_or(base.min_expected),
                estimated_params: file.gof.estimated_params.or(base.estimated_params),
            },
        };

        match &cli.command {
            Command::Returns(a) => {
                if let Some(c) = &a.date_column {
                    data.load.date_column = c.clone();
                }
                if a.price_column.is_some() {
                    data.load.price_column = a.price_column.clone();
                }
                if a.date_format.is_some() {
                    data.load.date_format = a.date_format.clone();
                }
                if let Some(s) = a.scale {
                    data.scale = s;
                }
                if let Some(f) = &a.filter {
                    data.filter = parse_filter(f)?;
                }
            }
            Command::Fit(a) => {
                if let Some(m) = a.max_iter {
                    fit.max_iter = m;
                }
                if let Some(t) = a.grad_tol {
                    fit.grad_tol = t;
                }
            }
            Command::Gof(a) => {
                if let Some(t) = &a.tests {
                    gof.tests = t.clone();
                }
                if let Some(c) = a.classes {
                    gof.pearson.classes = c;
                }
                if a.bin_width.is_some() {
                    gof.pearson.bin_width = a.bin_width;
                }
                if a.estimated_params.is_some() {
                    gof.pearson.estimated_params = a.estimated_params;
                }
            }
            _ => {}
        }

        grid.validate()?;
        fit.validate()?;
        if !(data.scale > 0.0) {
            bail!("scale must be positive");
        }
        Ok(RunConfig {
            version: env!("CARGO_PKG_VERSION"),
            format: g.format.or(file.format).unwrap_or_default(),
            seed: g.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            grid,
            data,
            fit,
            gof,
            command: serde_json::to_value(&cli.command)?,
        })
    }
}

fn load_file(path: &Path) -> Result<FileConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
}

/// `none`, `threshold:C`, `robust-z:K` or `exclude:DATE[;DATE...]`.
pub fn parse_filter(s: &str) -> Result<FilterRule> {
    let (kind, arg) = s.split_once(':').unwrap_or((s, ""));
    let number = || arg.trim().parse::<f64>().with_context(|| format!("filter '{s}' needs a number"));
    Ok(match kind.trim().to_ascii_lowercase().as_str() {
        "none" => FilterRule::None,
        "threshold" => FilterRule::Threshold(number()?),
        "robust-z" | "robust_z" => FilterRule::RobustZ(number()?),
        "exclude" => FilterRule::ExcludeDates(
            arg.split(';')
                .map(|d| NaiveDate::parse_from_str(d.trim(), "%Y-%m-%d").with_context(|| format!("date '{d}'")))
                .collect::<Result<_>>()?,
        ),
        _ => bail!("unknown filter '{s}'; expected none, threshold:C, robust-z:K or exclude:DATE[;DATE...]"),
    })
}
