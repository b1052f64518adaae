//! Characteristic exponent of the GTS law and its parameter derivatives.
//!
//! Each tail contributes `T = αΓ(−β)(z^β − λ^β)` with `z = λ₊ − iξ` on the
//! positive side and `z = λ₋ + iξ` on the negative side. Writing
//! `Γ(−β) = −Γ(1−β)/β` and `(z^β − λ^β)/β = λ^β·d·φ₁(βd)` with
//! `d = log z − log λ` and `φ₁(w) = (eʷ − 1)/w` removes the removable
//! singularity at β = 0, so values and β-derivatives stay accurate all the way
//! into the Bilateral Gamma limit.

use num_complex::Complex64;

use super::params::{GtsParams, BG_SWITCH};
use crate::error::Result;
use crate::special::{digamma, gamma, trigamma};

/// φ₁, φ₁′, φ₁″ for φ₁(w) = (eʷ − 1)/w.
fn phi1(w: Complex64) -> (Complex64, Complex64, Complex64) {
    if w.norm() < 1.0 {
        // Σ wⁿ/(n+1)!, Σ (n+1)wⁿ/(n+2)!, Σ (n+1)(n+2)wⁿ/(n+3)!
        let mut p0 = Complex64::new(0.0, 0.0);
        let mut p1 = p0;
        let mut p2 = p0;
        let mut wn = Complex64::new(1.0, 0.0);
        let mut inv_fact = 1.0; // 1/(n+1)!
        for n in 0..24 {
            let nf = n as f64;
            p0 += wn * inv_fact;
            p1 += wn * (inv_fact * (nf + 1.0) / (nf + 2.0));
            p2 += wn * (inv_fact * (nf + 1.0) / (nf + 3.0));
            wn *= w;
            inv_fact /= nf + 2.0;
        }
        (p0, p1, p2)
    } else {
        let e = w.exp();
        let w2 = w * w;
        ((e - 1.0) / w, (e * (w - 1.0) + 1.0) / w2, (e * (w2 - 2.0 * w + 2.0) - 2.0) / (w2 * w))
    }
}

/// One tail term and its derivatives in (α, β, λ).
#[derive(Debug, Clone, Copy)]
struct Tail {
    t: Complex64,
    t_a: Complex64,
    t_b: Complex64,
    t_l: Complex64,
    t_bb: Complex64,
    t_bl: Complex64,
    t_ll: Complex64,
    t_ab: Complex64,
    t_al: Complex64,
}

/// ξ-independent pieces of one tail.
#[derive(Debug, Clone, Copy)]
struct Side {
    alpha: f64,
    beta: f64,
    lambda: f64,
    ln_lambda: f64,
    /// Γ(1−β) and its first two β-derivatives
    g: [f64; 3],
    lambda_pow_b: f64,
    lambda_pow_b1: f64,
    lambda_pow_b2: f64,
}

impl Side {
    fn new(alpha: f64, beta: f64, lambda: f64) -> Self {
        let s = 1.0 - beta;
        let g = gamma(s);
        let psi = digamma(s);
        Self {
            alpha,
            beta,
            lambda,
            ln_lambda: lambda.ln(),
            g: [g, -g * psi, g * (psi * psi + trigamma(s))],
            lambda_pow_b: lambda.powf(beta),
            lambda_pow_b1: lambda.powf(beta - 1.0),
            lambda_pow_b2: lambda.powf(beta - 2.0),
        }
    }

    /// log(z/λ) without the cancellation of `ln z − ln λ` for small |ξ|.
    fn log_ratio(&self, z: Complex64) -> Complex64 {
        let u = z.im / self.lambda;
        Complex64::new(0.5 * (u * u).ln_1p(), u.atan())
    }

    fn value(&self, z: Complex64) -> Complex64 {
        let d = self.log_ratio(z);
        if self.beta < BG_SWITCH {
            return -self.alpha * d;
        }
        let (p0, _, _) = phi1(self.beta * d);
        -self.alpha * self.g[0] * self.lambda_pow_b * d * p0
    }

    fn full(&self, z: Complex64, second: bool) -> Tail {
        let (alpha, beta) = (self.alpha, self.beta);
        let [g, g1, g2] = self.g;
        let b = self.ln_lambda;
        let d = self.log_ratio(z);
        let a = d + b;
        let (p0, p1, p2) = phi1(beta * d);
        let eb = self.lambda_pow_b;
        let e0 = eb * d * p0;
        let e1 = eb * d * (b * p0 + d * p1);

        let t = if beta < BG_SWITCH { -alpha * d } else { -alpha * g * e0 };
        let t_a = -g * e0;
        let t_b_unit = -(g1 * e0 + g * e1);

        let lb1 = self.lambda_pow_b1;
        let zb1 = lb1 * ((beta - 1.0) * d).exp();
        let t_l_unit = -g * (zb1 - lb1);

        let zero = Complex64::new(0.0, 0.0);
        let (t_bb, t_bl, t_ll) = if second {
            let e2 = eb * d * (b * b * p0 + 2.0 * b * d * p1 + d * d * p2);
            let t_bb = -alpha * (g2 * e0 + 2.0 * g1 * e1 + g * e2);
            let t_bl = -alpha * (g1 * (zb1 - lb1) + g * (a * zb1 - b * lb1));
            let zb2 = self.lambda_pow_b2 * ((beta - 2.0) * d).exp();
            let t_ll = -alpha * g * (beta - 1.0) * (zb2 - self.lambda_pow_b2);
            (t_bb, t_bl, t_ll)
        } else {
            (zero, zero, zero)
        };

        Tail { t, t_a, t_b: alpha * t_b_unit, t_l: alpha * t_l_unit, t_bb, t_bl, t_ll, t_ab: t_b_unit, t_al: t_l_unit }
    }
}

pub(crate) type Hess7 = [[Complex64; 7]; 7];

/// Ψ with its ξ-independent constants evaluated once, for use on grids.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Exponent {
    mu: f64,
    lambda_plus: f64,
    lambda_minus: f64,
    plus: Side,
    minus: Side,
}

impl Exponent {
    pub(crate) fn new(p: &GtsParams) -> Self {
        Self {
            mu: p.mu,
            lambda_plus: p.lambda_plus,
            lambda_minus: p.lambda_minus,
            plus: Side::new(p.alpha_plus, p.beta_plus, p.lambda_plus),
            minus: Side::new(p.alpha_minus, p.beta_minus, p.lambda_minus),
        }
    }

    fn bases(&self, xi: f64) -> (Complex64, Complex64) {
        (Complex64::new(self.lambda_plus, -xi), Complex64::new(self.lambda_minus, xi))
    }

    pub(crate) fn value(&self, xi: f64) -> Complex64 {
        let (zp, zm) = self.bases(xi);
        Complex64::new(0.0, self.mu * xi) + self.plus.value(zp) + self.minus.value(zm)
    }

    /// Ψ(ξ) and ∂Ψ/∂V in the order (μ, β₊, β₋, α₊, α₋, λ₊, λ₋).
    pub(crate) fn gradient(&self, xi: f64) -> (Complex64, [Complex64; 7]) {
        let (zp, zm) = self.bases(xi);
        let tp = self.plus.full(zp, false);
        let tm = self.minus.full(zm, false);
        let mu_d = Complex64::new(0.0, xi);
        (mu_d * self.mu + tp.t + tm.t, [mu_d, tp.t_b, tm.t_b, tp.t_a, tm.t_a, tp.t_l, tm.t_l])
    }

    /// Ψ, its gradient and its Hessian in one pass.
    pub(crate) fn hessian(&self, xi: f64) -> (Complex64, [Complex64; 7], Hess7) {
        let (zp, zm) = self.bases(xi);
        let tp = self.plus.full(zp, true);
        let tm = self.minus.full(zm, true);
        let mu_d = Complex64::new(0.0, xi);
        let grad = [mu_d, tp.t_b, tm.t_b, tp.t_a, tm.t_a, tp.t_l, tm.t_l];
        let mut h = [[Complex64::new(0.0, 0.0); 7]; 7];
        // (β, α, λ) indexes for each side
        for (tail, (ib, ia, il)) in [(tp, (1, 3, 5)), (tm, (2, 4, 6))] {
            h[ib][ib] = tail.t_bb;
            h[ib][ia] = tail.t_ab;
            h[ia][ib] = tail.t_ab;
            h[ib][il] = tail.t_bl;
            h[il][ib] = tail.t_bl;
            h[ia][il] = tail.t_al;
            h[il][ia] = tail.t_al;
            h[il][il] = tail.t_ll;
        }
        (mu_d * self.mu + tp.t + tm.t, grad, h)
    }
}

/// Ψ(ξ), the logarithm of the characteristic function E[e^{iξX}].
pub fn characteristic_exponent(params: &GtsParams, xi: f64) -> Result<Complex64> {
    params.validate()?;
    Ok(Exponent::new(params).value(xi))
}

/// ∂Ψ/∂V_j in the order (μ, β₊, β₋, α₊, α₋, λ₊, λ₋).
pub fn psi_gradient(params: &GtsParams, xi: f64) -> Result<[Complex64; 7]> {
    params.validate()?;
    Ok(Exponent::new(params).gradient(xi).1)
}

/// ∂²Ψ/∂V_k∂V_j, symmetric, with a zero μ row and column.
pub fn psi_hessian(params: &GtsParams, xi: f64) -> Result<[[Complex64; 7]; 7]> {
    params.validate()?;
    Ok(Exponent::new(params).hessian(xi).2)
}
