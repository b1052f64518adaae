//! Interpolation on uniform abscissae.

/// Natural cubic spline through uniformly spaced nodes.
#[derive(Debug, Clone)]
pub struct NaturalSpline {
    x0: f64,
    dx: f64,
    y: Vec<f64>,
    /// Second derivatives at the nodes.
    m: Vec<f64>,
}

impl NaturalSpline {
    pub fn new(x0: f64, dx: f64, y: Vec<f64>) -> Self {
        let n = y.len();
        let mut m = vec![0.0; n];
        if n > 2 {
            // tridiagonal system: m[i-1] + 4 m[i] + m[i+1] = 6 Δ²y / dx²
            let k = n - 2;
            let mut c = vec![0.0; k];
            let mut d = vec![0.0; k];
            let s = 6.0 / (dx * dx);
            for i in 0..k {
                let rhs = s * (y[i] - 2.0 * y[i + 1] + y[i + 2]);
                if i == 0 {
                    c[0] = 0.25;
                    d[0] = rhs / 4.0;
                } else {
                    let den = 4.0 - c[i - 1];
                    c[i] = 1.0 / den;
                    d[i] = (rhs - d[i - 1]) / den;
                }
            }
            for i in (0..k).rev() {
                m[i + 1] = d[i] - if i + 1 < k { c[i] * m[i + 2] } else { 0.0 };
            }
        }
        Self { x0, dx, y, m }
    }

    fn locate(&self, x: f64) -> (usize, f64) {
        let last = self.y.len() - 1;
        let u = ((x - self.x0) / self.dx).clamp(0.0, last as f64);
        let i = (u.floor() as usize).min(last.saturating_sub(1));
        (i, u - i as f64)
    }

    pub fn eval(&self, x: f64) -> f64 {
        if self.y.len() == 1 {
            return self.y[0];
        }
        let (i, t) = self.locate(x);
        if t == 0.0 {
            return self.y[i];
        }
        let a = 1.0 - t;
        let h2 = self.dx * self.dx / 6.0;
        a * self.y[i] + t * self.y[i + 1] + h2 * ((a * a * a - a) * self.m[i] + (t * t * t - t) * self.m[i + 1])
    }

    /// First derivative of the interpolant.
    pub fn derivative(&self, x: f64) -> f64 {
        let (i, t) = self.locate(x);
        let a = 1.0 - t;
        (self.y[i + 1] - self.y[i]) / self.dx
            + self.dx / 6.0 * ((1.0 - 3.0 * a * a) * self.m[i] + (3.0 * t * t - 1.0) * self.m[i + 1])
    }
}

/// Shape-preserving piecewise cubic Hermite interpolant (Fritsch–Carlson).
/// Abscissae need not be uniform but must be strictly increasing.
#[derive(Debug, Clone)]
pub struct Pchip {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl Pchip {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Self {
        let n = x.len();
        assert!(n >= 2 && y.len() == n);
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let s: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
        let mut d = vec![0.0; n];
        if n == 2 {
            d[0] = s[0];
            d[1] = s[0];
        } else {
            for i in 1..n - 1 {
                if s[i - 1] * s[i] > 0.0 {
                    let w1 = 2.0 * h[i] + h[i - 1];
                    let w2 = h[i] + 2.0 * h[i - 1];
                    d[i] = (w1 + w2) / (w1 / s[i - 1] + w2 / s[i]);
                }
            }
            d[0] = end_slope(h[0], h[1], s[0], s[1]);
            d[n - 1] = end_slope(h[n - 2], h[n - 3], s[n - 2], s[n - 3]);
        }
        Self { x, y, d }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.x.len();
        if x <= self.x[0] {
            return self.y[0];
        }
        if x >= self.x[n - 1] {
            return self.y[n - 1];
        }
        let i = self.x.partition_point(|&v| v <= x) - 1;
        let h = self.x[i + 1] - self.x[i];
        let t = (x - self.x[i]) / h;
        if t == 0.0 {
            return self.y[i];
        }
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.y[i] + h10 * h * self.d[i] + h01 * self.y[i + 1] + h11 * h * self.d[i + 1]
    }
}

fn end_slope(h0: f64, h1: f64, s0: f64, s1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * s0 - h0 * s1) / (h0 + h1);
    if d * s0 <= 0.0 {
        0.0
    } else if s0 * s1 <= 0.0 && d.abs() > 3.0 * s0.abs() {
        3.0 * s0
    } else {
        d
    }
}
