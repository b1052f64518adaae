//! Command-line grammar.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gts_core::gof::GofTest;
use gts_core::models::Family;
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "gtsfit", version, about = "Fit, test and simulate generalized tempered stable return models")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum GridPreset {
    /// x ∈ [−100, 100], ξ_max = 256
    #[default]
    Crypto,
    /// x ∈ [−15, 15], ξ_max = 1024
    Equity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    GammaDifference,
    InverseCdf,
}

/// A closed interval written `lo,hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval(pub f64, pub f64);

impl FromStr for Interval {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let v = parse_list(s)?;
        match v[..] {
            [lo, hi] if lo < hi => Ok(Interval(lo, hi)),
            _ => Err(format!("expected 'lo,hi' with lo < hi, got '{s}'")),
        }
    }
}

/// Comma-separated reals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Values(pub Vec<f64>);

impl FromStr for Values {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        parse_list(s).map(Values)
    }
}

fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(|t| t.trim().parse::<f64>().map_err(|e| format!("'{t}': {e}"))).collect()
}

#[derive(Debug, Args, Serialize)]
pub struct GlobalArgs {
    /// TOML file with defaults; flags take precedence.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Grid preset the other grid flags modify.
    #[arg(long, global = true, value_enum)]
    pub grid: Option<GridPreset>,
    /// Number of frequency intervals.
    #[arg(long = "grid-n", global = true)]
    pub grid_n: Option<usize>,
    #[arg(long, global = true)]
    pub xi_max: Option<f64>,
    /// Abscissa range `lo,hi` (write `--x-range=-15,15`).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub x_range: Option<Interval>,
    /// Points per closed Newton–Cotes block.
    #[arg(long, global = true)]
    pub quad_order: Option<usize>,
    /// Number of output abscissae.
    #[arg(long, global = true)]
    pub m_out: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Turn a price file into percent log returns and summarize them.
    Returns(ReturnsArgs),
    /// Maximum likelihood fit of one family, optionally against a nested one.
    Fit(FitArgs),
    /// Kolmogorov–Smirnov, Anderson–Darling and Pearson tests.
    Gof(GofArgs),
    /// Empirical against model moments.
    Moments(MomentsArgs),
    /// Density and distribution function on a range, with parameter sensitivities.
    Pdf(PdfArgs),
    /// Draw a sample from a model.
    Simulate(SimulateArgs),
    /// Likelihood-ratio test between two saved fits.
    Lrt(LrtArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct ReturnsArgs {
    /// Price CSV with a date column and a price column.
    pub input: PathBuf,
    /// Destination of the one-column return CSV.
    pub output: PathBuf,
    /// Multiplier of log(S_j / S_{j-1}); 100 gives percent.
    #[arg(long)]
    pub scale: Option<f64>,
    /// Outlier rule: none, threshold:C, robust-z:K or exclude:DATE[;DATE...].
    #[arg(long)]
    pub filter: Option<String>,
    #[arg(long)]
    pub date_column: Option<String>,
    #[arg(long)]
    pub price_column: Option<String>,
    /// chrono format string such as %d/%m/%Y.
    #[arg(long)]
    pub date_format: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct FitArgs {
    /// One-column return CSV.
    pub returns: PathBuf,
    #[arg(long)]
    pub family: Family,
    /// Also fit this nested family and report the likelihood-ratio test.
    #[arg(long)]
    pub restrict: Option<Family>,
    /// Print the iteration table.
    #[arg(long)]
    pub trace: bool,
    /// Starting values in the family's free coordinates.
    #[arg(long)]
    pub init: Option<Values>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub grad_tol: Option<f64>,
}

/// A model given either by a saved fit or by explicit parameters.
#[derive(Debug, Args, Serialize)]
pub struct ModelArgs {
    /// JSON report written by `fit --format json`.
    #[arg(long, conflicts_with_all = ["family", "params"])]
    pub fit: Option<PathBuf>,
    #[arg(long, requires = "params")]
    pub family: Option<Family>,
    /// Free coordinates in the family's order, comma-separated.
    #[arg(long, requires = "family", allow_hyphen_values = true)]
    pub params: Option<Values>,
}

#[derive(Debug, Args, Serialize)]
pub struct GofArgs {
    pub returns: PathBuf,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Subset of ks, ad, pearson.
    #[arg(long, value_delimiter = ',')]
    pub tests: Option<Vec<GofTest>>,
    /// Write the Pearson classes as CSV.
    #[arg(long)]
    pub bins_out: Option<PathBuf>,
    /// Number of equal-width Pearson classes before merging.
    #[arg(long)]
    pub classes: Option<usize>,
    /// Pearson class width; overrides --classes.
    #[arg(long)]
    pub bin_width: Option<f64>,
    /// Parameters subtracted from the Pearson degrees of freedom.
    #[arg(long)]
    pub estimated_params: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct MomentsArgs {
    pub returns: PathBuf,
    #[command(flatten)]
    pub model: ModelArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct PdfArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Output range `lo,hi`; defaults to the grid range.
    #[arg(long, allow_hyphen_values = true)]
    pub range: Option<Interval>,
    #[arg(long, default_value_t = 401)]
    pub points: usize,
    /// Add (∂f/∂θ)/f for every free coordinate.
    #[arg(long)]
    pub sensitivities: bool,
    /// Also draw the columns as an SVG figure.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub n: usize,
    /// Defaults to gamma-difference where it applies, inverse-cdf otherwise.
    #[arg(long, value_enum)]
    pub method: Option<Method>,
}

#[derive(Debug, Args, Serialize)]
pub struct LrtArgs {
    /// JSON report of the larger family.
    pub full: PathBuf,
    /// JSON report of the nested family.
    pub restricted: PathBuf,
}
