//! Fractional DFT G_k = Σ_j x_j e^{−2πi·j·k·δ} by Bluestein's chirp-z identity.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Fractional DFT with as many outputs as inputs.
pub fn frft_core(seq: &[Complex64], delta: f64) -> Vec<Complex64> {
    frft_with_len(seq, delta, seq.len())
}

/// Fractional DFT returning the first `m` outputs.
pub fn frft_with_len(seq: &[Complex64], delta: f64, m: usize) -> Vec<Complex64> {
    if seq.is_empty() || m == 0 {
        return vec![Complex64::new(0.0, 0.0); m];
    }
    FrftPlan::new(seq.len(), m, delta).apply(seq)
}

/// Reusable chirp-z plan for a fixed input length, output length and δ.
pub struct FrftPlan {
    l: usize,
    m: usize,
    size: usize,
    /// e^{−πiδn²} for n < max(l, m)
    chirp: Vec<Complex64>,
    /// transformed convolution kernel
    kernel: Vec<Complex64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl FrftPlan {
    pub fn new(l: usize, m: usize, delta: f64) -> Self {
        assert!(l > 0 && m > 0);
        let size = (l + m - 1).next_power_of_two();
        // jk = (j² + k² − (k−j)²)/2
        let chirp: Vec<Complex64> = (0..l.max(m))
            .map(|n| {
                let nf = n as f64;
                Complex64::from_polar(1.0, -PI * delta * nf * nf)
            })
            .collect();
        let mut kernel = vec![Complex64::new(0.0, 0.0); size];
        for n in 0..m {
            kernel[n] = chirp[n].conj();
        }
        for n in 1..l {
            kernel[size - n] = chirp[n].conj();
        }
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(size);
        let inv = planner.plan_fft_inverse(size);
        fwd.process(&mut kernel);
        Self { l, m, size, chirp, kernel, fwd, inv }
    }

    pub fn apply(&self, seq: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(seq.len(), self.l);
        let mut y = vec![Complex64::new(0.0, 0.0); self.size];
        for ((yj, xj), c) in y.iter_mut().zip(seq).zip(&self.chirp) {
            *yj = xj * c;
        }
        self.fwd.process(&mut y);
        for (a, b) in y.iter_mut().zip(&self.kernel) {
            *a *= b;
        }
        self.inv.process(&mut y);
        let scale = 1.0 / self.size as f64;
        (0..self.m).map(|k| y[k] * self.chirp[k] * scale).collect()
    }
}
