//! Model families and their embedding into the seven-parameter GTS space.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::cumulants::{cumulants, Cumulants};
use super::exponent::Exponent;
use super::params::{GtsParams, BETA_CEILING, POSITIVE_FLOOR};
use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Gts,
    #[serde(rename = "kobol")]
    KoBol,
    Cgmy,
    BilateralGamma,
    VarianceGamma,
    Normal,
}

/// For each GTS coordinate, the free coordinate feeding it (`None` = fixed at 0).
type Source = [Option<usize>; 7];

impl Family {
    pub const ALL: [Family; 6] =
        [Family::Gts, Family::KoBol, Family::Cgmy, Family::BilateralGamma, Family::VarianceGamma, Family::Normal];

    pub fn names(self) -> &'static [&'static str] {
        match self {
            Family::Gts => &super::params::GTS_NAMES,
            Family::KoBol => &["mu", "beta", "alpha_plus", "alpha_minus", "lambda_plus", "lambda_minus"],
            Family::Cgmy => &["mu", "beta", "alpha", "lambda_plus", "lambda_minus"],
            Family::BilateralGamma => &["mu", "alpha_plus", "alpha_minus", "lambda_plus", "lambda_minus"],
            Family::VarianceGamma => &["mu", "alpha", "lambda_plus", "lambda_minus"],
            Family::Normal => &["mu", "sigma2"],
        }
    }

    pub fn free_count(self) -> usize {
        self.names().len()
    }

    fn source(self) -> Option<Source> {
        let s = |v: [i8; 7]| {
            let mut out = [None; 7];
            for (o, x) in out.iter_mut().zip(v) {
                *o = (x >= 0).then_some(x as usize);
            }
            out
        };
        match self {
            Family::Gts => Some(s([0, 1, 2, 3, 4, 5, 6])),
            Family::KoBol => Some(s([0, 1, 1, 2, 3, 4, 5])),
            Family::Cgmy => Some(s([0, 1, 1, 2, 2, 3, 4])),
            Family::BilateralGamma => Some(s([0, -1, -1, 1, 2, 3, 4])),
            Family::VarianceGamma => Some(s([0, -1, -1, 1, 1, 2, 3])),
            Family::Normal => None,
        }
    }

    /// (shared β, shared α, β = 0) restrictions relative to GTS.
    fn restrictions(self) -> Option<(bool, bool, bool)> {
        match self {
            Family::Gts => Some((false, false, false)),
            Family::KoBol => Some((true, false, false)),
            Family::Cgmy => Some((true, true, false)),
            Family::BilateralGamma => Some((true, false, true)),
            Family::VarianceGamma => Some((true, true, true)),
            Family::Normal => None,
        }
    }

    /// Whether `other` is a restriction of `self` (every family nests itself).
    pub fn nests(self, other: Family) -> bool {
        if self == other {
            return true;
        }
        match (self.restrictions(), other.restrictions()) {
            (Some((sb, sa, zb)), Some((ob, oa, oz))) => (!sb || ob) && (!sa || oa) && (!zb || oz),
            _ => false,
        }
    }

    /// Free coordinates of the closest member of this family to a GTS vector
    /// (tied coordinates are averaged).
    pub fn project(self, p: &GtsParams) -> Vec<f64> {
        let Some(src) = self.source() else {
            return vec![p.mu, 1.0];
        };
        let gts = p.to_array();
        let mut sum = vec![0.0; self.free_count()];
        let mut cnt = vec![0.0; self.free_count()];
        for (i, s) in src.iter().enumerate() {
            if let Some(j) = s {
                sum[*j] += gts[i];
                cnt[*j] += 1.0;
            }
        }
        sum.iter().zip(&cnt).map(|(s, c)| s / c).collect()
    }

    /// Lower and upper bounds of every free coordinate.
    pub fn bounds(self) -> Vec<(f64, f64)> {
        self.names()
            .iter()
            .map(|n| match *n {
                "mu" => (f64::NEG_INFINITY, f64::INFINITY),
                n if n.starts_with("beta") => (0.0, BETA_CEILING),
                _ => (POSITIVE_FLOOR, f64::INFINITY),
            })
            .collect()
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Gts => "gts",
            Family::KoBol => "kobol",
            Family::Cgmy => "cgmy",
            Family::BilateralGamma => "bilateral_gamma",
            Family::VarianceGamma => "variance_gamma",
            Family::Normal => "normal",
        })
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "gts" => Ok(Family::Gts),
            "kobol" => Ok(Family::KoBol),
            "cgmy" => Ok(Family::Cgmy),
            "bg" | "bilateral_gamma" | "bilateralgamma" => Ok(Family::BilateralGamma),
            "vg" | "variance_gamma" | "variancegamma" => Ok(Family::VarianceGamma),
            "normal" | "gbm" | "gaussian" => Ok(Family::Normal),
            other => Err(domain(format!("unknown family '{other}'"))),
        }
    }
}

/// Variance-Gamma parameters in the (μ, δ, σ, α, θ) form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VgRecord {
    pub mu: f64,
    pub delta: f64,
    pub sigma: f64,
    pub alpha: f64,
    pub theta: f64,
}

impl VgRecord {
    /// Ψ(ξ) = iμξ − α·log(1 − iδθξ + θξ²).
    pub fn exponent(&self, xi: f64) -> Complex64 {
        let inner = Complex64::new(1.0 + self.theta * xi * xi, -self.delta * self.theta * xi);
        Complex64::new(0.0, self.mu * xi) - self.alpha * inner.ln()
    }
}

#[derive(Deserialize)]
struct RawSpec {
    family: Family,
    values: Vec<f64>,
}

/// A model family together with values for its free coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec")]
pub struct ModelSpec {
    family: Family,
    values: Vec<f64>,
}

impl TryFrom<RawSpec> for ModelSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        ModelSpec::new(raw.family, raw.values)
    }
}

impl ModelSpec {
    pub fn new(family: Family, values: Vec<f64>) -> Result<Self> {
        if values.len() != family.free_count() {
            return Err(domain(format!(
                "{family} takes {} parameters ({}), got {}",
                family.free_count(),
                family.names().join(", "),
                values.len()
            )));
        }
        let spec = Self { family, values };
        match spec.family {
            Family::Normal => {
                if !spec.values[0].is_finite() || !(spec.values[1] > 0.0 && spec.values[1].is_finite()) {
                    return Err(domain("normal model needs finite mu and sigma2 > 0"));
                }
            }
            _ => spec.embed_raw().validate()?,
        }
        Ok(spec)
    }

    pub fn gts(params: GtsParams) -> Result<Self> {
        Self::new(Family::Gts, params.to_array().to_vec())
    }

    pub fn normal(mu: f64, sigma2: f64) -> Result<Self> {
        Self::new(Family::Normal, vec![mu, sigma2])
    }

    /// Builds a member of `family` from a full GTS vector, tying coordinates.
    pub fn from_gts(family: Family, params: &GtsParams) -> Result<Self> {
        Self::new(family, family.project(params))
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn names(&self) -> &'static [&'static str] {
        self.family.names()
    }

    pub fn free_count(&self) -> usize {
        self.values.len()
    }

    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(self.family, values)
    }

    pub fn mu(&self) -> f64 {
        self.values[0]
    }

    fn embed_raw(&self) -> GtsParams {
        let src = self.family.source().expect("Lévy family");
        let mut v = [0.0; 7];
        for (o, s) in v.iter_mut().zip(src) {
            if let Some(j) = s {
                *o = self.values[j];
            }
        }
        GtsParams {
            mu: v[0],
            beta_plus: v[1],
            beta_minus: v[2],
            alpha_plus: v[3],
            alpha_minus: v[4],
            lambda_plus: v[5],
            lambda_minus: v[6],
        }
    }

    /// The GTS embedding; `None` for the Normal family.
    pub fn to_gts(&self) -> Option<GtsParams> {
        self.family.source().map(|_| self.embed_raw())
    }

    /// Mean-and-variance form of a Variance-Gamma model.
    pub fn vg_record(&self) -> Option<VgRecord> {
        if self.family != Family::VarianceGamma {
            return None;
        }
        let p = self.embed_raw();
        Some(VgRecord {
            mu: p.mu,
            delta: p.lambda_minus - p.lambda_plus,
            sigma: 1.0,
            alpha: p.alpha_plus,
            theta: 1.0 / (p.lambda_minus * p.lambda_plus),
        })
    }

    pub fn cumulants(&self, k_max: usize) -> Result<Cumulants> {
        match self.to_gts() {
            Some(p) => cumulants(&p, k_max),
            None => {
                let mut kappa = vec![0.0; k_max];
                if k_max >= 1 {
                    kappa[0] = self.values[0];
                }
                if k_max >= 2 {
                    kappa[1] = self.values[1];
                }
                Ok(Cumulants { kappa })
            }
        }
    }

    pub(crate) fn evaluator(&self) -> ModelExponent {
        ModelExponent {
            source: self.family.source(),
            k: self.free_count(),
            normal: (self.family == Family::Normal).then(|| (self.values[0], self.values[1])),
            gts: self.to_gts().map(|p| Exponent::new(&p)),
        }
    }

    /// Ψ(ξ) of the model.
    pub fn exponent(&self, xi: f64) -> Complex64 {
        self.evaluator().value(xi)
    }

    /// ∂Ψ/∂θ over the free coordinates.
    pub fn exponent_gradient(&self, xi: f64) -> Vec<Complex64> {
        let mut g = vec![Complex64::new(0.0, 0.0); self.free_count()];
        self.evaluator().gradient_into(xi, &mut g);
        g
    }

    /// ∂²Ψ/∂θ∂θ over the free coordinates, row-major.
    pub fn exponent_hessian(&self, xi: f64) -> Vec<Complex64> {
        let k = self.free_count();
        let mut g = vec![Complex64::new(0.0, 0.0); k];
        let mut h = vec![Complex64::new(0.0, 0.0); k * k];
        self.evaluator().hessian_into(xi, &mut g, &mut h);
        h
    }

    /// Projects raw coordinates into the admissible box of this family.
    pub fn clamp_values(&self, values: &[f64]) -> Vec<f64> {
        let bounds = self.family.bounds();
        let mut out: Vec<f64> = values.iter().zip(&bounds).map(|(v, (lo, hi))| v.clamp(*lo, *hi)).collect();
        if self.family == Family::Normal {
            out[1] = out[1].max(1e-12);
        }
        out
    }
}

/// Grid-friendly evaluator of Ψ and its free-coordinate derivatives.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ModelExponent {
    source: Option<Source>,
    k: usize,
    normal: Option<(f64, f64)>,
    gts: Option<Exponent>,
}

impl ModelExponent {
    pub(crate) fn value(&self, xi: f64) -> Complex64 {
        match (self.normal, &self.gts) {
            (Some((mu, s2)), _) => Complex64::new(-0.5 * s2 * xi * xi, mu * xi),
            (None, Some(e)) => e.value(xi),
            _ => unreachable!(),
        }
    }

    pub(crate) fn gradient_into(&self, xi: f64, g: &mut [Complex64]) -> Complex64 {
        if let Some((mu, s2)) = self.normal {
            g[0] = Complex64::new(0.0, xi);
            g[1] = Complex64::new(-0.5 * xi * xi, 0.0);
            return Complex64::new(-0.5 * s2 * xi * xi, mu * xi);
        }
        let (v, full) = self.gts.as_ref().expect("Lévy family").gradient(xi);
        g.fill(Complex64::new(0.0, 0.0));
        for (i, s) in self.source.expect("Lévy family").iter().enumerate() {
            if let Some(j) = s {
                g[*j] += full[i];
            }
        }
        v
    }

    /// Fills the gradient and the row-major k×k Hessian; returns Ψ.
    pub(crate) fn hessian_into(&self, xi: f64, g: &mut [Complex64], h: &mut [Complex64]) -> Complex64 {
        let k = self.k;
        h.fill(Complex64::new(0.0, 0.0));
        if self.normal.is_some() {
            return self.gradient_into(xi, g);
        }
        let (v, full_g, full_h) = self.gts.as_ref().expect("Lévy family").hessian(xi);
        let src = self.source.expect("Lévy family");
        g.fill(Complex64::new(0.0, 0.0));
        for (i, si) in src.iter().enumerate() {
            let Some(a) = si else { continue };
            g[*a] += full_g[i];
            for (j, sj) in src.iter().enumerate() {
                if let Some(b) = sj {
                    h[a * k + b] += full_h[i][j];
                }
            }
        }
        v
    }
}
