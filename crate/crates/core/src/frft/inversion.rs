//! Density, CDF and density sensitivities by Fourier inversion of e^{Ψ}.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::core::FrftPlan;
use super::grid::GridSpec;
use super::interp::{NaturalSpline, Pchip};
use crate::error::{Error, Result};
use crate::models::{Family, ModelExponent, ModelSpec};

/// Largest admissible |e^{Ψ(±ξ_max)}|.
pub const TRUNCATION_TOL: f64 = 1e-12;
/// Density values below this are treated as a grid failure.
pub const RINGING_TOL: f64 = -1e-10;

/// What to do when the characteristic function has not decayed at ξ_max.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TailPolicy {
    /// Fail with a grid error.
    Enforce,
    /// Record the modulus in the diagnostics only.
    Record,
}

impl TailPolicy {
    /// Bilateral and Variance Gamma characteristic functions decay only
    /// algebraically, so no finite grid meets the tolerance.
    pub fn for_family(family: Family) -> Self {
        match family {
            Family::BilateralGamma | Family::VarianceGamma => TailPolicy::Record,
            _ => TailPolicy::Enforce,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// max |e^{Ψ(±ξ_max)}|
    pub tail_modulus: f64,
    /// Largest imaginary part discarded when taking the real inverse.
    pub imag_residue: f64,
    /// Smallest raw value before clipping or repair.
    pub min_raw: f64,
}

/// Sampled values of one function on the abscissa grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridTable {
    pub x: Vec<f64>,
    pub values: Vec<f64>,
    pub grid: GridSpec,
    pub model: ModelSpec,
    pub diagnostics: Diagnostics,
}

/// Density together with its first and second derivatives in the free
/// coordinates of the model.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SensitivityTable {
    pub x: Vec<f64>,
    pub pdf: Vec<f64>,
    /// `gradient[j][k]` = ∂f/∂θ_j at `x[k]`
    pub gradient: Vec<Vec<f64>>,
    /// `hessian[index(j, l)][k]` = ∂²f/∂θ_j∂θ_l at `x[k]`, upper triangle packed row-major;
    /// empty when only first derivatives were requested
    pub hessian: Vec<Vec<f64>>,
    pub grid: GridSpec,
    pub model: ModelSpec,
    pub diagnostics: Diagnostics,
}

impl SensitivityTable {
    pub fn free_count(&self) -> usize {
        self.gradient.len()
    }

    /// Position of (j, l) in the packed `hessian`.
    pub fn packed_index(&self, j: usize, l: usize) -> usize {
        packed_index(self.free_count(), j, l)
    }
}

pub(crate) fn packed_index(k: usize, j: usize, l: usize) -> usize {
    let (a, b) = if j <= l { (j, l) } else { (l, j) };
    a * k - a * (a + 1) / 2 + b
}

/// Precomputed frequency grid, weights and transform plan.
pub(crate) struct Engine {
    grid: GridSpec,
    xi: Vec<f64>,
    /// w_j e^{−i x_min ξ_j}
    pre: Vec<Complex64>,
    /// e^{i ξ_max x_k}/(2π) relative to x_min
    post: Vec<Complex64>,
    zero_node: usize,
    zero_weight: f64,
    plan: FrftPlan,
}

impl Engine {
    pub(crate) fn new(grid: &GridSpec) -> Result<Self> {
        grid.validate()?;
        let nodes = grid.n + 1;
        let w = grid.weights();
        let xi: Vec<f64> = (0..nodes).map(|j| grid.xi(j)).collect();
        let pre = xi.iter().zip(&w).map(|(&x, &wj)| Complex64::from_polar(wj, -grid.x_min * x)).collect();
        let dx = grid.dx();
        let post =
            (0..grid.m_out).map(|k| Complex64::from_polar(1.0 / (2.0 * PI), grid.xi_max * k as f64 * dx)).collect();
        let delta = grid.h() * dx / (2.0 * PI);
        let zero_node = grid.n / 2;
        Ok(Self {
            grid: *grid,
            zero_weight: w[zero_node],
            xi,
            pre,
            post,
            zero_node,
            plan: FrftPlan::new(nodes, grid.m_out, delta),
        })
    }

    /// (1/2π) Σ_j w_j g_j e^{−i x_k ξ_j} for every output abscissa; returns the
    /// real parts and the largest discarded imaginary part.
    fn invert(&self, integrand: &[Complex64]) -> (Vec<f64>, f64) {
        let seq: Vec<Complex64> = integrand.iter().zip(&self.pre).map(|(g, p)| g * p).collect();
        let out = self.plan.apply(&seq);
        let mut residue: f64 = 0.0;
        let values = out
            .iter()
            .zip(&self.post)
            .map(|(g, p)| {
                let v = g * p;
                residue = residue.max(v.im.abs());
                v.re
            })
            .collect();
        (values, residue)
    }

    fn tail_modulus(&self, e: &ModelExponent) -> f64 {
        let a = self.grid.xi_max;
        e.value(a).re.max(e.value(-a).re).exp()
    }

    pub(crate) fn pdf_tail_modulus(&self, model: &ModelSpec) -> f64 {
        self.tail_modulus(&model.evaluator())
    }

    fn check_tail(&self, model: &ModelSpec, modulus: f64, policy: TailPolicy) -> Result<()> {
        if policy == TailPolicy::Enforce && modulus > TRUNCATION_TOL {
            return Err(Error::Grid(format!(
                "characteristic function of {} has modulus {modulus:.2e} at xi_max = {}; increase --xi-max",
                model.family(),
                self.grid.xi_max
            )));
        }
        Ok(())
    }

    pub(crate) fn pdf(&self, model: &ModelSpec, policy: TailPolicy) -> Result<GridTable> {
        let e = model.evaluator();
        let tail = self.tail_modulus(&e);
        self.check_tail(model, tail, policy)?;
        let phi: Vec<Complex64> = self.xi.par_iter().map(|&x| e.value(x).exp()).collect();
        let (mut values, imag_residue) = self.invert(&phi);
        let min_raw = values.iter().cloned().fold(f64::INFINITY, f64::min);
        if policy == TailPolicy::Enforce && min_raw < RINGING_TOL {
            return Err(Error::Grid(format!(
                "density dips to {min_raw:.2e}; the grid is too coarse or the x range too wide"
            )));
        }
        for v in values.iter_mut() {
            *v = v.max(0.0);
        }
        Ok(GridTable {
            x: self.grid.abscissae(),
            values,
            grid: self.grid,
            model: model.clone(),
            diagnostics: Diagnostics { tail_modulus: tail, imag_residue, min_raw },
        })
    }

    pub(crate) fn cdf(&self, model: &ModelSpec, policy: TailPolicy) -> Result<GridTable> {
        let e = model.evaluator();
        let tail = self.tail_modulus(&e);
        self.check_tail(model, tail, policy)?;
        let zero = self.zero_node;
        let integrand: Vec<Complex64> = self
            .xi
            .par_iter()
            .enumerate()
            .map(|(j, &x)| if j == zero { Complex64::new(0.0, 0.0) } else { e.value(x).exp() / Complex64::new(0.0, x) })
            .collect();
        let (raw, imag_residue) = self.invert(&integrand);
        let kappa1 = model.cumulants(1)?.get(1);
        let x = self.grid.abscissae();
        // the ξ = 0 node carries the finite part of the principal value
        let mut values: Vec<f64> =
            raw.iter().zip(&x).map(|(r, xk)| 0.5 - r - self.zero_weight * (kappa1 - xk) / (2.0 * PI)).collect();
        let min_raw = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let mut running = 0.0f64;
        for v in values.iter_mut() {
            running = running.max(*v);
            *v = running.clamp(0.0, 1.0);
        }
        Ok(GridTable {
            x,
            values,
            grid: self.grid,
            model: model.clone(),
            diagnostics: Diagnostics { tail_modulus: tail, imag_residue, min_raw },
        })
    }

    pub(crate) fn sensitivities(&self, model: &ModelSpec, policy: TailPolicy) -> Result<SensitivityTable> {
        self.sensitivities_to_order(model, policy, true)
    }

    /// Density and gradient channels, plus the Hessian channels when `second` is set.
    pub(crate) fn sensitivities_to_order(
        &self,
        model: &ModelSpec,
        policy: TailPolicy,
        second: bool,
    ) -> Result<SensitivityTable> {
        let e = model.evaluator();
        let tail = self.tail_modulus(&e);
        self.check_tail(model, tail, policy)?;
        let k = model.free_count();
        let packed = if second { k * (k + 1) / 2 } else { 0 };
        let channels = 1 + k + packed;
        let per_node: Vec<Vec<Complex64>> = self
            .xi
            .par_iter()
            .map(|&x| {
                let mut g = vec![Complex64::new(0.0, 0.0); k];
                let mut h = vec![Complex64::new(0.0, 0.0); k * k];
                let psi = if second { e.hessian_into(x, &mut g, &mut h) } else { e.gradient_into(x, &mut g) };
                let phi = psi.exp();
                let mut out = Vec::with_capacity(channels);
                out.push(phi);
                out.extend(g.iter().map(|gj| gj * phi));
                for j in (0..k).filter(|_| second) {
                    for l in j..k {
                        out.push((h[j * k + l] + g[j] * g[l]) * phi);
                    }
                }
                out
            })
            .collect();
        let inverted: Vec<(Vec<f64>, f64)> = (0..channels)
            .into_par_iter()
            .map(|c| {
                let integrand: Vec<Complex64> = per_node.iter().map(|v| v[c]).collect();
                self.invert(&integrand)
            })
            .collect();
        let imag_residue = inverted.iter().map(|(_, r)| *r).fold(0.0, f64::max);
        let mut it = inverted.into_iter().map(|(v, _)| v);
        let mut pdf = it.next().expect("density channel");
        let min_raw = pdf.iter().cloned().fold(f64::INFINITY, f64::min);
        if policy == TailPolicy::Enforce && min_raw < RINGING_TOL {
            return Err(Error::Grid(format!(
                "density dips to {min_raw:.2e}; the grid is too coarse or the x range too wide"
            )));
        }
        for v in pdf.iter_mut() {
            *v = v.max(0.0);
        }
        let gradient: Vec<Vec<f64>> = it.by_ref().take(k).collect();
        let hessian: Vec<Vec<f64>> = it.collect();
        Ok(SensitivityTable {
            x: self.grid.abscissae(),
            pdf,
            gradient,
            hessian,
            grid: self.grid,
            model: model.clone(),
            diagnostics: Diagnostics { tail_modulus: tail, imag_residue, min_raw },
        })
    }
}

/// Density of `model` on the abscissae of `grid`.
pub fn pdf_on_grid(model: &ModelSpec, grid: &GridSpec) -> Result<GridTable> {
    Engine::new(grid)?.pdf(model, TailPolicy::for_family(model.family()))
}

/// Distribution function of `model` on the abscissae of `grid`, made
/// nondecreasing and clamped to [0, 1].
pub fn cdf_on_grid(model: &ModelSpec, grid: &GridSpec) -> Result<GridTable> {
    Engine::new(grid)?.cdf(model, TailPolicy::for_family(model.family()))
}

/// First and second derivatives of the density in the free coordinates.
pub fn pdf_sensitivities_on_grid(model: &ModelSpec, grid: &GridSpec) -> Result<SensitivityTable> {
    Engine::new(grid)?.sensitivities(model, TailPolicy::for_family(model.family()))
}

fn check_range(grid: &GridSpec, x: f64) -> Result<()> {
    if !(x >= grid.x_min && x <= grid.x_max) {
        return Err(Error::OutOfRange { x, min: grid.x_min, max: grid.x_max });
    }
    Ok(())
}

/// Interpolated density and distribution function of one model.
#[derive(Debug, Clone)]
pub struct DensityTable {
    pub pdf: GridTable,
    pub cdf: GridTable,
    pdf_spline: NaturalSpline,
    cdf_interp: Pchip,
}

impl DensityTable {
    pub fn new(model: &ModelSpec, grid: &GridSpec) -> Result<Self> {
        Self::with_policy(model, grid, TailPolicy::for_family(model.family()))
    }

    pub fn with_policy(model: &ModelSpec, grid: &GridSpec, policy: TailPolicy) -> Result<Self> {
        let engine = Engine::new(grid)?;
        let pdf = engine.pdf(model, policy)?;
        let cdf = engine.cdf(model, policy)?;
        Ok(Self::from_tables(pdf, cdf))
    }

    pub(crate) fn from_tables(pdf: GridTable, cdf: GridTable) -> Self {
        let g = pdf.grid;
        let pdf_spline = NaturalSpline::new(g.x_min, g.dx(), pdf.values.clone());
        let cdf_interp = Pchip::new(cdf.x.clone(), cdf.values.clone());
        Self { pdf, cdf, pdf_spline, cdf_interp }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.pdf.grid
    }

    pub fn model(&self) -> &ModelSpec {
        &self.pdf.model
    }

    pub fn pdf_at(&self, x: f64) -> Result<f64> {
        check_range(self.grid(), x)?;
        Ok(self.pdf_spline.eval(x))
    }

    pub fn cdf_at(&self, x: f64) -> Result<f64> {
        check_range(self.grid(), x)?;
        Ok(self.cdf_interp.eval(x).clamp(0.0, 1.0))
    }

    /// Derivative of the interpolated density in x.
    pub fn pdf_slope_at(&self, x: f64) -> Result<f64> {
        check_range(self.grid(), x)?;
        Ok(self.pdf_spline.derivative(x))
    }
}

/// Interpolated density and its parameter derivatives at arbitrary points.
#[derive(Debug, Clone)]
pub struct SensitivityInterp {
    pub table: SensitivityTable,
    pdf: NaturalSpline,
    gradient: Vec<NaturalSpline>,
    hessian: Vec<NaturalSpline>,
}

impl SensitivityInterp {
    pub fn new(table: SensitivityTable) -> Self {
        let g = table.grid;
        let spline = |v: &Vec<f64>| NaturalSpline::new(g.x_min, g.dx(), v.clone());
        Self {
            pdf: spline(&table.pdf),
            gradient: table.gradient.iter().map(spline).collect(),
            hessian: table.hessian.iter().map(spline).collect(),
            table,
        }
    }

    pub fn pdf_at(&self, x: f64) -> Result<f64> {
        check_range(&self.table.grid, x)?;
        Ok(self.pdf.eval(x))
    }

    /// Density, gradient and packed Hessian at `x`.
    pub fn eval(&self, x: f64) -> Result<(f64, Vec<f64>, Vec<f64>)> {
        check_range(&self.table.grid, x)?;
        Ok((
            self.pdf.eval(x),
            self.gradient.iter().map(|s| s.eval(x)).collect(),
            self.hessian.iter().map(|s| s.eval(x)).collect(),
        ))
    }
}

/// Density at one point (builds the full grid; reuse [`DensityTable`] for many points).
pub fn pdf_at(model: &ModelSpec, x: f64, grid: &GridSpec) -> Result<f64> {
    check_range(grid, x)?;
    DensityTable::new(model, grid)?.pdf_at(x)
}

/// Distribution function at one point.
pub fn cdf_at(model: &ModelSpec, x: f64, grid: &GridSpec) -> Result<f64> {
    check_range(grid, x)?;
    DensityTable::new(model, grid)?.cdf_at(x)
}
