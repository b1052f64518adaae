use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Frequency and abscissa grids for characteristic-function inversion.
///
/// The frequency grid spans `[−xi_max, xi_max]` with `n` equal intervals,
/// integrated by composite closed Newton–Cotes blocks of `quad_order` points.
/// `n` must be a multiple of `2·(quad_order − 1)` so that ξ = 0 is a node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n: usize,
    pub xi_max: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub m_out: usize,
    pub quad_order: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self::crypto()
    }
}

impl GridSpec {
    /// Heavy-tailed, percent-scale returns (daily crypto-currency moves).
    pub fn crypto() -> Self {
        Self { n: 163_840, xi_max: 256.0, x_min: -100.0, x_max: 100.0, m_out: 8192, quad_order: 11 }
    }

    /// Percent-scale equity-index returns.
    pub fn equity() -> Self {
        Self { n: 81_920, xi_max: 1024.0, x_min: -15.0, x_max: 15.0, m_out: 8192, quad_order: 11 }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Grid(m));
        if self.n < 256 {
            return bad(format!("n = {} must be at least 256", self.n));
        }
        if !(self.quad_order % 2 == 1 && (3..=15).contains(&self.quad_order)) {
            return bad(format!("quad_order = {} must be odd and within [3, 15]", self.quad_order));
        }
        let block = 2 * (self.quad_order - 1);
        if self.n % block != 0 {
            return bad(format!("n = {} must be a multiple of {block} for quad_order {}", self.n, self.quad_order));
        }
        if !(self.xi_max > 0.0 && self.xi_max.is_finite()) {
            return bad(format!("xi_max = {} must be positive", self.xi_max));
        }
        if !(self.x_min < self.x_max && self.x_min.is_finite() && self.x_max.is_finite()) {
            return bad(format!("x range [{}, {}] is empty", self.x_min, self.x_max));
        }
        if self.m_out < 2 {
            return bad(format!("m_out = {} must be at least 2", self.m_out));
        }
        Ok(())
    }

    /// Frequency spacing.
    pub fn h(&self) -> f64 {
        2.0 * self.xi_max / self.n as f64
    }

    /// Abscissa spacing.
    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.m_out - 1) as f64
    }

    pub fn xi(&self, j: usize) -> f64 {
        -self.xi_max + j as f64 * self.h()
    }

    pub fn abscissae(&self) -> Vec<f64> {
        let dx = self.dx();
        (0..self.m_out).map(|k| self.x_min + k as f64 * dx).collect()
    }

    /// Composite Newton–Cotes weights for all `n + 1` frequency nodes.
    pub fn weights(&self) -> Vec<f64> {
        let base = newton_cotes(self.quad_order);
        let q1 = self.quad_order - 1;
        let h = self.h();
        let mut w = vec![0.0; self.n + 1];
        for b in 0..self.n / q1 {
            for (i, wi) in base.iter().enumerate() {
                w[b * q1 + i] += wi * h;
            }
        }
        w
    }
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Closed Newton–Cotes weights on nodes 0..q−1 with unit spacing, from exact
/// rational integration of the Lagrange basis.
pub fn newton_cotes(q: usize) -> Vec<f64> {
    let deg = q - 1;
    let lcm = (1..=q as i128).fold(1i128, |acc, k| acc / gcd(acc, k) * k);
    (0..q)
        .map(|i| {
            // coefficients of Π_{j≠i}(t − j), lowest degree first
            let mut poly = vec![1i128];
            let mut denom = 1i128;
            for j in 0..q {
                if j == i {
                    continue;
                }
                let mut next = vec![0i128; poly.len() + 1];
                for (k, c) in poly.iter().enumerate() {
                    next[k + 1] += c;
                    next[k] -= c * j as i128;
                }
                poly = next;
                denom *= i as i128 - j as i128;
            }
            let mut num = 0i128;
            let mut pw = deg as i128; // deg^(k+1)
            for (k, c) in poly.iter().enumerate() {
                num += c * pw * (lcm / (k as i128 + 1));
                pw *= deg as i128;
            }
            num as f64 / (lcm * denom) as f64
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_and_boole() {
        let s = newton_cotes(3);
        assert_eq!(s, vec![1.0 / 3.0, 4.0 / 3.0, 1.0 / 3.0]);
        let b = newton_cotes(5);
        let want = [7.0, 32.0, 12.0, 32.0, 7.0].map(|v| v * 2.0 / 45.0);
        for (x, y) in b.iter().zip(want) {
            assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn eleven_point_rule_is_exact_for_degree_ten() {
        let w = newton_cotes(11);
        assert!((w.iter().sum::<f64>() - 10.0).abs() < 1e-13);
        assert!((w[0] - 5.0 * 16067.0 / 299376.0).abs() < 1e-15);
        let m10: f64 = w.iter().enumerate().map(|(i, wi)| wi * (i as f64).powi(10)).sum();
        assert!((m10 / (1e11 / 11.0) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn composite_weights_integrate_polynomials() {
        let g = GridSpec { n: 400, xi_max: 2.0, ..GridSpec::crypto() };
        g.validate().unwrap();
        let w = g.weights();
        let integral: f64 = w.iter().enumerate().map(|(j, wj)| wj * g.xi(j).powi(4)).sum();
        assert!((integral - 2.0 * 32.0 / 5.0).abs() < 1e-12);
        assert_eq!(g.xi(200), 0.0);
    }

    #[test]
    fn validation() {
        assert!(GridSpec::crypto().validate().is_ok());
        assert!(GridSpec::equity().validate().is_ok());
        assert!(GridSpec { n: 16384, ..GridSpec::crypto() }.validate().is_err());
        assert!(GridSpec { quad_order: 4, ..GridSpec::crypto() }.validate().is_err());
        assert!(GridSpec { x_min: 1.0, x_max: 1.0, ..GridSpec::crypto() }.validate().is_err());
    }
}
