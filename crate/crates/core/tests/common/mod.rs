#![allow(dead_code)]

use gts_core::frft::GridSpec;
use gts_core::likelihood::{log_likelihood, score};
use gts_core::models::{GtsParams, ModelSpec};

pub const BTC: [f64; 7] = [-0.121571, 0.315548, 0.406563, 0.747714, 0.544565, 0.246530, 0.174772];
pub const ETH: [f64; 7] = [-0.4854, 0.3904, 0.4045, 0.9582, 0.8005, 0.1667, 0.1708];
pub const SPX: [f64; 7] = [-0.249408, 0.328624, 0.088640, 0.792426, 0.542250, 1.279743, 0.937133];
pub const SPY: [f64; 7] = [-0.260643, 0.340880, 0.022212, 0.787757, 0.597110, 1.288555, 1.014353];
/// Bilateral Gamma reference point: μ, α₊, α₋, λ₊, λ₋.
pub const BG_REF: [f64; 5] = [-0.0315, 1.0928, 0.7018, 1.5397, 1.1108];

pub fn gts(v: [f64; 7]) -> ModelSpec {
    ModelSpec::gts(GtsParams::from_array(v).unwrap()).unwrap()
}

pub fn bg_params() -> GtsParams {
    let [mu, ap, am, lp, lm] = BG_REF;
    GtsParams::new(mu, 0.0, 0.0, ap, am, lp, lm).unwrap()
}

/// Largest entrywise error relative to max(|analytic|, 1e−3·max|analytic|).
pub fn max_relative_error(analytic: &[f64], numeric: &[f64]) -> f64 {
    let scale = analytic.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    analytic.iter().zip(numeric).map(|(a, n)| (a - n).abs() / a.abs().max(1e-3 * scale)).fold(0.0, f64::max)
}

fn step(v: f64) -> f64 {
    1e-5 * v.abs().max(0.1)
}

fn shifted(model: &ModelSpec, j: usize, h: f64) -> ModelSpec {
    let mut v = model.values().to_vec();
    v[j] += h;
    model.with_values(v).unwrap()
}

/// Central differences of the log-likelihood.
pub fn fd_score(model: &ModelSpec, sample: &[f64], grid: &GridSpec) -> Vec<f64> {
    (0..model.free_count())
        .map(|j| {
            let h = step(model.values()[j]);
            let up = log_likelihood(&shifted(model, j, h), sample, grid).unwrap();
            let down = log_likelihood(&shifted(model, j, -h), sample, grid).unwrap();
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// Central differences of the analytic score, symmetrized, row-major.
pub fn fd_hessian(model: &ModelSpec, sample: &[f64], grid: &GridSpec) -> Vec<f64> {
    let k = model.free_count();
    let mut h = vec![0.0; k * k];
    for j in 0..k {
        let d = step(model.values()[j]);
        let up = score(&shifted(model, j, d), sample, grid).unwrap();
        let down = score(&shifted(model, j, -d), sample, grid).unwrap();
        for l in 0..k {
            h[j * k + l] = (up[l] - down[l]) / (2.0 * d);
        }
    }
    let mut sym = h.clone();
    for j in 0..k {
        for l in 0..k {
            sym[j * k + l] = 0.5 * (h[j * k + l] + h[l * k + j]);
        }
    }
    sym
}
