//! Thin layer over `statrs` plus the few functions it does not provide.

use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

pub use statrs::function::gamma::{digamma, gamma, ln_gamma};

/// Trigamma ψ₁(x) for x > 0: recurrence up to x ≥ 12, then the asymptotic series.
pub fn trigamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    let mut acc = 0.0;
    let mut z = x;
    while z < 12.0 {
        acc += 1.0 / (z * z);
        z += 1.0;
    }
    let r = 1.0 / z;
    let r2 = r * r;
    // 1/z + 1/2z² + Σ B_2k / z^(2k+1)
    let tail = r
        + 0.5 * r2
        + r * r2
            * (1.0 / 6.0
                - r2 * (1.0 / 30.0 - r2 * (1.0 / 42.0 - r2 * (1.0 / 30.0 - r2 * (5.0 / 66.0 - r2 * 691.0 / 2730.0)))));
    acc + tail
}

/// Lower incomplete gamma γ(s, x) = ∫₀ˣ y^{s−1} e^{−y} dy (unregularized).
pub fn lower_incomplete_gamma(s: f64, x: f64) -> f64 {
    statrs::function::gamma::gamma_li(s, x)
}

pub fn normal_cdf(z: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-z / std::f64::consts::SQRT_2)
}

/// Two-sided tail probability Pr(|Z| > |z|).
pub fn normal_two_sided_p(z: f64) -> f64 {
    statrs::function::erf::erfc(z.abs() / std::f64::consts::SQRT_2)
}

pub fn normal_quantile(p: f64) -> f64 {
    Normal::new(0.0, 1.0).expect("standard normal").inverse_cdf(p)
}

pub fn normal_pdf(x: f64, mean: f64, var: f64) -> f64 {
    let d = x - mean;
    (-(d * d) / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt()
}

/// Upper tail Pr(χ²_df > x).
pub fn chi2_sf(x: f64, df: usize) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let dist = ChiSquared::new(df as f64).expect("df >= 1");
    dist.sf(x).clamp(0.0, 1.0)
}
