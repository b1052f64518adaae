//! Log-likelihood, score and Hessian assembled from inverted density grids.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::frft::{packed_index, DensityTable, Engine, GridSpec, SensitivityInterp, TailPolicy};
use crate::models::{Family, ModelSpec};

/// Densities below this are floored before taking logarithms.
pub const DENSITY_FLOOR: f64 = 1e-300;

/// Sample points per parallel task. Partial sums are combined in chunk order,
/// so results do not depend on thread scheduling.
const CHUNK: usize = 256;

fn chunked_sum<T: Send>(
    sample: &[f64],
    zero: impl Fn() -> T + Sync,
    add: impl Fn(&mut T, f64) + Sync,
    merge: impl Fn(&mut T, T),
) -> T {
    let parts: Vec<T> = sample
        .par_chunks(CHUNK)
        .map(|c| {
            let mut acc = zero();
            for &x in c {
                add(&mut acc, x);
            }
            acc
        })
        .collect();
    let mut total = zero();
    for p in parts {
        merge(&mut total, p);
    }
    total
}

fn add_into(a: &mut [f64], b: Vec<f64>) {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
}

fn sum_logs(sample: &[f64], f: impl Fn(f64) -> f64 + Sync) -> f64 {
    chunked_sum(sample, || 0.0, |acc, x| *acc += log_density(f(x)), |a, b| *a += b)
}

/// Log-likelihood with its first and second derivatives in the free coordinates.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub loglik: f64,
    pub score: Vec<f64>,
    /// Row-major k×k.
    pub hessian: Vec<f64>,
}

impl Evaluation {
    pub fn score_norm(&self) -> f64 {
        self.score.iter().map(|s| s * s).sum::<f64>().sqrt()
    }
}

pub(crate) fn check_sample(sample: &[f64], grid: &GridSpec) -> Result<()> {
    if let Some(&x) = sample.iter().find(|&&x| !(x >= grid.x_min && x <= grid.x_max)) {
        return Err(Error::OutOfRange { x, min: grid.x_min, max: grid.x_max });
    }
    Ok(())
}

fn log_density(f: f64) -> f64 {
    f.max(DENSITY_FLOOR).ln()
}

/// Closed-form log-likelihood, score and Hessian in (μ, σ²).
fn normal_evaluation(model: &ModelSpec, sample: &[f64]) -> Evaluation {
    let (mu, s2) = (model.values()[0], model.values()[1]);
    let m = sample.len() as f64;
    let (s1, sq) = sample.iter().fold((0.0, 0.0), |(a, b), x| (a + (x - mu), b + (x - mu).powi(2)));
    let loglik = -0.5 * m * (2.0 * std::f64::consts::PI * s2).ln() - sq / (2.0 * s2);
    let score = vec![s1 / s2, -0.5 * m / s2 + sq / (2.0 * s2 * s2)];
    let cross = -s1 / (s2 * s2);
    let hessian = vec![-m / s2, cross, cross, 0.5 * m / (s2 * s2) - sq / (s2 * s2 * s2)];
    Evaluation { loglik, score, hessian }
}

/// Σ log f(x_j) under the model, with f recovered by Fourier inversion
/// (in closed form for the Normal family).
pub fn log_likelihood(model: &ModelSpec, sample: &[f64], grid: &GridSpec) -> Result<f64> {
    check_sample(sample, grid)?;
    if model.family() == Family::Normal {
        return Ok(normal_evaluation(model, sample).loglik);
    }
    let table = DensityTable::new(model, grid)?;
    Ok(loglik_from_table(&table, sample))
}

pub(crate) fn loglik_from_table(table: &DensityTable, sample: &[f64]) -> f64 {
    sum_logs(sample, |x| table.pdf_at(x).expect("checked range"))
}

/// Log-likelihood only, without the range check or truncation enforcement.
pub(crate) fn loglik_relaxed(engine: &Engine, model: &ModelSpec, sample: &[f64]) -> Result<f64> {
    let pdf = engine.pdf(model, TailPolicy::Record)?;
    let spline = crate::frft::NaturalSpline::new(pdf.grid.x_min, pdf.grid.dx(), pdf.values);
    Ok(sum_logs(sample, |x| spline.eval(x)))
}

pub(crate) fn evaluate_with(
    engine: &Engine,
    model: &ModelSpec,
    sample: &[f64],
    policy: TailPolicy,
) -> Result<Evaluation> {
    let interp = SensitivityInterp::new(engine.sensitivities(model, policy)?);
    let k = model.free_count();
    let (loglik, score, mut hessian) = chunked_sum(
        sample,
        || (0.0, vec![0.0; k], vec![0.0; k * k]),
        |(l, s, h), x| {
            let (f, g, hp) = interp.eval(x).expect("checked range");
            let f = f.max(DENSITY_FLOOR);
            *l += f.ln();
            for j in 0..k {
                let gj = g[j] / f;
                s[j] += gj;
                for m in j..k {
                    h[j * k + m] += hp[packed_index(k, j, m)] / f - gj * g[m] / f;
                }
            }
        },
        |(l, s, h), (l2, s2, h2)| {
            *l += l2;
            add_into(s, s2);
            add_into(h, h2);
        },
    );
    for j in 0..k {
        for m in 0..j {
            hessian[j * k + m] = hessian[m * k + j];
        }
    }
    Ok(Evaluation { loglik, score, hessian })
}

/// Log-likelihood, score and Hessian in one pass over the sample.
pub fn evaluate(model: &ModelSpec, sample: &[f64], grid: &GridSpec) -> Result<Evaluation> {
    check_sample(sample, grid)?;
    if model.family() == Family::Normal {
        return Ok(normal_evaluation(model, sample));
    }
    let engine = Engine::new(grid)?;
    evaluate_with(&engine, model, sample, TailPolicy::for_family(model.family()))
}

/// ∂l/∂θ_j = Σ (∂f/∂θ_j)/f, without the second-derivative channels.
pub fn score(model: &ModelSpec, sample: &[f64], grid: &GridSpec) -> Result<Vec<f64>> {
    check_sample(sample, grid)?;
    if model.family() == Family::Normal {
        return Ok(normal_evaluation(model, sample).score);
    }
    let engine = Engine::new(grid)?;
    let table = engine.sensitivities_to_order(model, TailPolicy::for_family(model.family()), false)?;
    let interp = SensitivityInterp::new(table);
    let k = model.free_count();
    Ok(chunked_sum(
        sample,
        || vec![0.0; k],
        |s, x| {
            let (f, g, _) = interp.eval(x).expect("checked range");
            let f = f.max(DENSITY_FLOOR);
            for j in 0..k {
                s[j] += g[j] / f;
            }
        },
        |a, b| add_into(a, b),
    ))
}

/// ∂²l/∂θ_j∂θ_l = Σ [(∂²f/∂θ_j∂θ_l)/f − (∂f/∂θ_j)(∂f/∂θ_l)/f²], as rows.
pub fn hessian(model: &ModelSpec, sample: &[f64], grid: &GridSpec) -> Result<Vec<Vec<f64>>> {
    let e = evaluate(model, sample, grid)?;
    let k = model.free_count();
    Ok(e.hessian.chunks(k).map(|r| r.to_vec()).collect())
}
