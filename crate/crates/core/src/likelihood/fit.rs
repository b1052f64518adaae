//! Safeguarded Newton–Raphson maximum likelihood and asymptotic inference.

use log::debug;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::eval::{check_sample, evaluate_with, loglik_relaxed, Evaluation};
use super::TraceRow;
use crate::error::{domain, Error, Result};
use crate::frft::{Engine, GridSpec, TailPolicy};
use crate::models::{Family, GtsParams, ModelSpec, VgRecord};
use crate::special::{gamma, normal_quantile, normal_two_sided_p};

/// Smallest sample accepted by [`fit`].
pub const MIN_SAMPLE: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Init {
    /// Normal-fit warm start.
    #[default]
    Auto,
    /// Start from a GTS vector projected onto the family.
    Gts(GtsParams),
    /// Start from explicit free coordinates.
    Values(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    pub max_iter: usize,
    pub grad_tol: f64,
    pub hess_check: bool,
    /// Step shrink factor used when backtracking.
    pub damping: f64,
    pub max_halvings: usize,
    pub init: Init,
    /// Confidence level of the reported intervals.
    pub confidence: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            max_iter: 100,
            grad_tol: 1e-6,
            hess_check: true,
            damping: 0.5,
            max_halvings: 30,
            init: Init::Auto,
            confidence: 0.95,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iter < 1 {
            return Err(domain("max_iter must be at least 1"));
        }
        if !(self.grad_tol > 0.0) {
            return Err(domain("grad_tol must be positive"));
        }
        if !(self.damping > 0.0 && self.damping < 1.0) {
            return Err(domain("damping must lie in (0, 1)"));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(domain("confidence must lie in (0, 1)"));
        }
        Ok(())
    }
}

/// Estimate, standard error, Wald statistic and confidence interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamInference {
    pub name: String,
    pub estimate: f64,
    pub std_err: f64,
    pub z: f64,
    pub p_two_sided: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl ParamInference {
    fn new(name: &str, estimate: f64, std_err: f64, zcrit: f64) -> Self {
        let z = estimate / std_err;
        Self {
            name: name.to_string(),
            estimate,
            std_err,
            z,
            p_two_sided: normal_two_sided_p(z),
            ci_low: estimate - zcrit * std_err,
            ci_high: estimate + zcrit * std_err,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub estimates: ModelSpec,
    pub loglik: f64,
    /// Norm of the score over coordinates not held at a bound.
    pub score_norm: f64,
    pub max_eigenvalue: f64,
    /// Coordinates held at a bound of the parameter box, where the score
    /// points out of the box.
    #[serde(default)]
    pub at_bound: Vec<String>,
    pub hessian: Vec<Vec<f64>>,
    pub covariance: Vec<Vec<f64>>,
    pub params: Vec<ParamInference>,
    /// Transformed quantities (σ for the Normal family).
    pub derived: Vec<ParamInference>,
    pub vg: Option<VgRecord>,
    pub aic: f64,
    pub bic: f64,
    pub sample_size: usize,
    pub iterations: usize,
    pub trace: Vec<TraceRow>,
    /// max |e^{Ψ(±ξ_max)}| at the estimate.
    pub tail_modulus: Option<f64>,
}

impl FitResult {
    pub fn family(&self) -> Family {
        self.estimates.family()
    }

    pub fn free_count(&self) -> usize {
        self.estimates.free_count()
    }

    pub fn param(&self, name: &str) -> Option<&ParamInference> {
        self.params.iter().chain(&self.derived).find(|p| p.name == name)
    }
}

fn to_matrix(k: usize, flat: &[f64]) -> DMatrix<f64> {
    DMatrix::from_row_slice(k, k, flat)
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

fn trace_row(iteration: usize, model: &ModelSpec, e: &Evaluation, grad_norm: f64, max_eig: f64) -> TraceRow {
    TraceRow {
        iteration,
        values: model.values().to_vec(),
        params: model.to_gts(),
        loglik: e.loglik,
        grad_norm,
        max_eigenvalue: max_eig,
    }
}

/// Coordinates resting on a bound of the box with the score pointing outward.
fn active_set(model: &ModelSpec, score: &[f64]) -> Vec<bool> {
    model
        .family()
        .bounds()
        .iter()
        .zip(model.values())
        .zip(score)
        .map(|(((lo, hi), v), g)| (*v <= *lo && *g < 0.0) || (*v >= *hi && *g > 0.0))
        .collect()
}

/// Score with the active coordinates zeroed.
fn projected_norm(score: &[f64], active: &[bool]) -> f64 {
    score.iter().zip(active).filter(|(_, a)| !**a).map(|(g, _)| g * g).sum::<f64>().sqrt()
}

/// Hessian restricted to the free coordinates.
fn reduced(h: &DMatrix<f64>, active: &[bool]) -> (Vec<usize>, DMatrix<f64>) {
    let free: Vec<usize> = (0..active.len()).filter(|&j| !active[j]).collect();
    let r = DMatrix::from_fn(free.len(), free.len(), |a, b| h[(free[a], free[b])]);
    (free, r)
}

/// Deterministic warm start: Normal moments split by semivariance.
pub fn auto_init(family: Family, sample: &[f64]) -> Result<Vec<f64>> {
    let m = sample.len() as f64;
    let mean = sample.iter().sum::<f64>() / m;
    let var = sample.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / m;
    if !(var > 0.0) {
        return Err(Error::Data("sample has zero variance".into()));
    }
    if family == Family::Normal {
        return Ok(vec![mean, var]);
    }
    let up = sample.iter().filter(|&&x| x > mean).map(|x| (x - mean).powi(2)).sum::<f64>() / m;
    let share_up = (up / var).clamp(0.05, 0.95);
    let beta = match family {
        Family::BilateralGamma | Family::VarianceGamma => 0.0,
        _ => 0.5,
    };
    let lambda = 2.0 / var.sqrt();
    // κ₂ share of one tail: α Γ(2−β) / λ^{2−β}
    let alpha = |share: f64| share * var * lambda.powf(2.0 - beta) / gamma(2.0 - beta);
    let gts = GtsParams {
        mu: 0.0,
        beta_plus: beta,
        beta_minus: beta,
        alpha_plus: alpha(share_up),
        alpha_minus: alpha(1.0 - share_up),
        lambda_plus: lambda,
        lambda_minus: lambda,
    };
    let mut values = family.project(&gts);
    let spec = ModelSpec::new(family, values.clone())?;
    let drift = spec.cumulants(1)?.get(1);
    values[0] = mean - drift;
    Ok(values)
}

/// Symmetric eigen-decomposition with eigenvalues ascending.
fn eigen(h: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let se = SymmetricEigen::new(h.clone());
    (se.eigenvalues, se.eigenvectors)
}

/// Ascent direction from the Hessian with every eigenvalue forced negative.
fn newton_direction(h: &DMatrix<f64>, score: &[f64]) -> DVector<f64> {
    let (vals, vecs) = eigen(h);
    let scale = vals.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    let floor = 1e-10 * scale;
    let g = DVector::from_column_slice(score);
    let coords = vecs.transpose() * g;
    let scaled =
        DVector::from_iterator(coords.len(), coords.iter().zip(vals.iter()).map(|(c, v)| c / v.abs().max(floor)));
    vecs * scaled
}

/// Maximizes the likelihood of `family` over `sample`.
pub fn fit(family: Family, sample: &[f64], config: &FitConfig, grid: &GridSpec) -> Result<FitResult> {
    config.validate()?;
    if sample.len() < MIN_SAMPLE {
        return Err(Error::Data(format!("fitting needs at least {MIN_SAMPLE} observations, got {}", sample.len())));
    }
    if family == Family::Normal {
        return fit_normal_with(sample, config.confidence);
    }
    check_sample(sample, grid)?;
    let engine = Engine::new(grid)?;

    let init = match &config.init {
        Init::Auto => auto_init(family, sample)?,
        Init::Gts(p) => family.project(p),
        Init::Values(v) => v.clone(),
    };
    let template = ModelSpec::new(family, family.project(&GtsParams::new(0.0, 0.5, 0.5, 1.0, 1.0, 1.0, 1.0)?))?;
    let mut model = template.with_values(template.clamp_values(&init))?;
    let policy = TailPolicy::Record;
    let mut eval = evaluate_with(&engine, &model, sample, policy)?;
    let k = model.free_count();
    let mut trace = Vec::new();

    for iteration in 1..=config.max_iter {
        let h = to_matrix(k, &eval.hessian);
        let active = active_set(&model, &eval.score);
        let (free, hr) = reduced(&h, &active);
        let max_eig = if free.is_empty() { f64::NEG_INFINITY } else { eigen(&hr).0.max() };
        let grad_norm = projected_norm(&eval.score, &active);
        trace.push(trace_row(iteration, &model, &eval, grad_norm, max_eig));
        debug!("iteration {iteration}: loglik {:.6} |score| {grad_norm:.3e} max eigenvalue {max_eig:.3e}", eval.loglik);
        if grad_norm < config.grad_tol && (!config.hess_check || max_eig < 0.0) {
            return finish(model, eval, &active, trace, sample.len(), config.confidence, &engine);
        }

        let gr: Vec<f64> = free.iter().map(|&j| eval.score[j]).collect();
        let dr = newton_direction(&hr, &gr);
        let mut dir = vec![0.0; k];
        for (a, &j) in free.iter().enumerate() {
            dir[j] = dr[a];
        }
        let floor = eval.loglik - 1e-10 * eval.loglik.abs().max(1.0);
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..=config.max_halvings {
            let raw: Vec<f64> = model.values().iter().zip(dir.iter()).map(|(v, d)| v + step * d).collect();
            let candidate = model.with_values(model.clamp_values(&raw))?;
            if candidate.values() != model.values() {
                let l = loglik_relaxed(&engine, &candidate, sample)?;
                if l.is_finite() && l >= floor {
                    accepted = Some(candidate);
                    break;
                }
            }
            step *= config.damping;
        }
        match accepted {
            Some(next) => {
                model = next;
                eval = evaluate_with(&engine, &model, sample, policy)?;
            }
            None => {
                return Err(Error::NonConvergence { iterations: iteration, score_norm: grad_norm, trace });
            }
        }
    }
    let score_norm = trace.last().map_or(f64::NAN, |r| r.grad_norm);
    Err(Error::NonConvergence { iterations: config.max_iter, score_norm, trace })
}

fn finish(
    model: ModelSpec,
    eval: Evaluation,
    active: &[bool],
    trace: Vec<TraceRow>,
    m: usize,
    confidence: f64,
    engine: &Engine,
) -> Result<FitResult> {
    let k = model.free_count();
    let h = to_matrix(k, &eval.hessian);
    let (vals, vecs) = eigen(&h);
    let scale = vals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let (imin, vmin) =
        vals.iter().enumerate().fold(
            (0, f64::INFINITY),
            |acc, (i, v)| {
                if v.abs() < acc.1 {
                    (i, v.abs())
                } else {
                    acc
                }
            },
        );
    if vmin <= 1e-13 * scale {
        return Err(Error::SingularHessian { eigenvector: vecs.column(imin).iter().copied().collect() });
    }
    let cov = (-h.clone())
        .try_inverse()
        .ok_or_else(|| Error::SingularHessian { eigenvector: vecs.column(imin).iter().copied().collect() })?;
    let zcrit = normal_quantile(0.5 + confidence / 2.0);
    let params = model
        .names()
        .iter()
        .zip(model.values())
        .enumerate()
        .map(|(j, (n, v))| ParamInference::new(n, *v, cov[(j, j)].max(0.0).sqrt(), zcrit))
        .collect();
    let kf = k as f64;
    let tail = engine.pdf_tail_modulus(&model);
    Ok(FitResult {
        vg: model.vg_record(),
        loglik: eval.loglik,
        score_norm: projected_norm(&eval.score, active),
        max_eigenvalue: vals.max(),
        at_bound: model.names().iter().zip(active).filter(|(_, a)| **a).map(|(n, _)| n.to_string()).collect(),
        hessian: rows(&h),
        covariance: rows(&cov),
        params,
        derived: Vec::new(),
        aic: 2.0 * kf - 2.0 * eval.loglik,
        bic: kf * (m as f64).ln() - 2.0 * eval.loglik,
        sample_size: m,
        iterations: trace.len(),
        trace,
        tail_modulus: Some(tail),
        estimates: model,
    })
}

/// Closed-form Normal maximum likelihood.
pub fn fit_normal(sample: &[f64]) -> Result<FitResult> {
    fit_normal_with(sample, 0.95)
}

fn fit_normal_with(sample: &[f64], confidence: f64) -> Result<FitResult> {
    if sample.len() < 2 {
        return Err(Error::Data("the Normal fit needs at least two observations".into()));
    }
    let m = sample.len() as f64;
    let mu = sample.iter().sum::<f64>() / m;
    let s2 = sample.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / m;
    if !(s2 > 0.0) {
        return Err(Error::Data("all observations are equal; the variance estimate is zero".into()));
    }
    let loglik = -0.5 * m * (2.0 * std::f64::consts::PI * s2).ln() - 0.5 * m;
    let hessian = vec![vec![-m / s2, 0.0], vec![0.0, -m / (2.0 * s2 * s2)]];
    let covariance = vec![vec![s2 / m, 0.0], vec![0.0, 2.0 * s2 * s2 / m]];
    let zcrit = normal_quantile(0.5 + confidence / 2.0);
    let sigma = s2.sqrt();
    let estimates = ModelSpec::normal(mu, s2)?;
    let row = TraceRow {
        iteration: 1,
        values: vec![mu, s2],
        params: None,
        loglik,
        grad_norm: 0.0,
        max_eigenvalue: -m / s2.max(2.0 * s2 * s2),
    };
    Ok(FitResult {
        loglik,
        score_norm: 0.0,
        max_eigenvalue: row.max_eigenvalue,
        at_bound: Vec::new(),
        params: vec![
            ParamInference::new("mu", mu, (s2 / m).sqrt(), zcrit),
            ParamInference::new("sigma2", s2, (2.0 * s2 * s2 / m).sqrt(), zcrit),
        ],
        derived: vec![ParamInference::new("sigma", sigma, sigma / (2.0 * m).sqrt(), zcrit)],
        vg: None,
        hessian,
        covariance,
        aic: 4.0 - 2.0 * loglik,
        bic: 2.0 * m.ln() - 2.0 * loglik,
        sample_size: sample.len(),
        iterations: 1,
        trace: vec![row],
        tail_modulus: None,
        estimates,
    })
}
