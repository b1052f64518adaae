//! Random variates for validation: exact Bilateral Gamma draws and inverse
//! distribution-function sampling on the inversion grid.
//!
//! Draw `i` of a run with seed `s` uses ChaCha20 seeded by `s` on stream `i`,
//! so any partition of the index range reproduces the serial sample exactly.

use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::ReturnSeries;
use crate::error::{domain, Error, Result};
use crate::frft::{cdf_on_grid, GridSpec, Pchip};
use crate::models::{Family, GtsParams, ModelSpec, BG_SWITCH};

/// Probability mass allowed outside the abscissa range of an inverse table.
pub const OUTSIDE_MASS_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SimMethod {
    /// μ + Gamma(α₊, 1/λ₊) − Gamma(α₋, 1/λ₋); Bilateral and Variance Gamma only.
    GammaDifference,
    /// Inverse of the grid distribution function; any family.
    #[default]
    InverseCdf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n: usize,
    pub seed: u64,
    pub method: SimMethod,
}

impl SimConfig {
    pub fn new(n: usize, seed: u64, method: SimMethod) -> Self {
        Self { n, seed, method }
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(domain("number of draws must be at least 1"));
        }
        Ok(())
    }
}

fn draw_rng(seed: u64, index: usize) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Uniform on the open interval (0, 1) from the top 53 bits.
fn open_uniform<R: Rng>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) / (1u64 << 53) as f64
}

fn series(values: Vec<f64>, source: String) -> Result<ReturnSeries> {
    ReturnSeries::new(values, source)
}

/// Exact Bilateral Gamma sampler as a reusable object.
#[derive(Debug, Clone, Copy)]
pub struct GammaDifference {
    mu: f64,
    up: Gamma<f64>,
    down: Gamma<f64>,
}

impl GammaDifference {
    pub fn new(params: &GtsParams) -> Result<Self> {
        params.validate()?;
        if params.beta_plus >= BG_SWITCH || params.beta_minus >= BG_SWITCH {
            return Err(domain(format!(
                "gamma-difference sampling needs both stability indices at 0, got {} and {}",
                params.beta_plus, params.beta_minus
            )));
        }
        let gamma = |shape: f64, rate: f64| Gamma::new(shape, 1.0 / rate).map_err(|e| domain(e.to_string()));
        Ok(Self {
            mu: params.mu,
            up: gamma(params.alpha_plus, params.lambda_plus)?,
            down: gamma(params.alpha_minus, params.lambda_minus)?,
        })
    }

    pub fn draw(&self, seed: u64, index: usize) -> f64 {
        let mut rng = draw_rng(seed, index);
        self.mu + self.up.sample(&mut rng) - self.down.sample(&mut rng)
    }

    pub fn draw_range(&self, seed: u64, range: Range<usize>) -> Vec<f64> {
        range.into_par_iter().map(|i| self.draw(seed, i)).collect()
    }
}

fn bilateral_params(model: &ModelSpec) -> Result<GtsParams> {
    match model.family() {
        Family::BilateralGamma | Family::VarianceGamma => Ok(model.to_gts().expect("gamma families embed")),
        Family::Gts | Family::KoBol | Family::Cgmy => {
            let p = model.to_gts().expect("tempered families embed");
            GammaDifference::new(&p)?;
            Ok(p)
        }
        f => Err(domain(format!("gamma-difference sampling is not available for the {f} family"))),
    }
}

pub fn sample_bilateral_gamma(params: &GtsParams, config: &SimConfig) -> Result<ReturnSeries> {
    config.validate()?;
    let sampler = GammaDifference::new(params)?;
    series(sampler.draw_range(config.seed, 0..config.n), format!("gamma-difference draws, seed {}", config.seed))
}

/// Monotone interpolant of the quantile function on the inversion grid.
#[derive(Debug, Clone)]
pub struct InverseCdf {
    quantile: Pchip,
    p_lo: f64,
    p_hi: f64,
    x_lo: f64,
    x_hi: f64,
}

impl InverseCdf {
    /// Builds the table at twice the output resolution of `grid`.
    pub fn new(model: &ModelSpec, grid: &GridSpec) -> Result<Self> {
        let fine = GridSpec { m_out: 2 * grid.m_out - 1, ..*grid };
        let table = cdf_on_grid(model, &fine)?;
        let (first, last) = (table.values[0], table.values[table.values.len() - 1]);
        if first > OUTSIDE_MASS_TOL || 1.0 - last > OUTSIDE_MASS_TOL {
            return Err(Error::Grid(format!(
                "probability mass outside [{}, {}] is {:.2e} below and {:.2e} above; widen the x range",
                fine.x_min,
                fine.x_max,
                first,
                1.0 - last
            )));
        }
        let mut p = Vec::with_capacity(table.x.len());
        let mut x = Vec::with_capacity(table.x.len());
        for (&xi, &fi) in table.x.iter().zip(&table.values) {
            if p.last().is_none_or(|&prev| fi > prev) {
                p.push(fi);
                x.push(xi);
            }
        }
        if p.len() < 2 {
            return Err(Error::Grid("distribution function is flat on the grid".into()));
        }
        let (p_lo, p_hi, x_lo, x_hi) = (p[0], p[p.len() - 1], x[0], x[x.len() - 1]);
        Ok(Self { quantile: Pchip::new(p, x), p_lo, p_hi, x_lo, x_hi })
    }

    /// Quantile at probability `u`, clamped to the grid ends.
    pub fn quantile(&self, u: f64) -> f64 {
        if u <= self.p_lo {
            self.x_lo
        } else if u >= self.p_hi {
            self.x_hi
        } else {
            self.quantile.eval(u)
        }
    }

    pub fn draw(&self, seed: u64, index: usize) -> f64 {
        self.quantile(open_uniform(&mut draw_rng(seed, index)))
    }

    pub fn draw_range(&self, seed: u64, range: Range<usize>) -> Vec<f64> {
        range.into_par_iter().map(|i| self.draw(seed, i)).collect()
    }
}

pub fn sample_gts(model: &ModelSpec, config: &SimConfig, grid: &GridSpec) -> Result<ReturnSeries> {
    config.validate()?;
    let inverse = InverseCdf::new(model, grid)?;
    series(
        inverse.draw_range(config.seed, 0..config.n),
        format!("inverse-cdf draws from {} model, seed {}", model.family(), config.seed),
    )
}

/// Dispatches on `config.method`.
pub fn simulate(model: &ModelSpec, config: &SimConfig, grid: &GridSpec) -> Result<ReturnSeries> {
    match config.method {
        SimMethod::GammaDifference => sample_bilateral_gamma(&bilateral_params(model)?, config),
        SimMethod::InverseCdf => sample_gts(model, config, grid),
    }
}
