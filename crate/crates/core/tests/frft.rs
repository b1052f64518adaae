use std::f64::consts::PI;

use gts_core::frft::*;
use gts_core::models::*;
use gts_core::quad::integrate_panels;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

fn gts(v: [f64; 7]) -> ModelSpec {
    ModelSpec::gts(GtsParams::from_array(v).unwrap()).unwrap()
}

fn btc() -> ModelSpec {
    gts([-0.121571, 0.315548, 0.406563, 0.747714, 0.544565, 0.246530, 0.174772])
}

fn reference_sets() -> Vec<(ModelSpec, GridSpec)> {
    vec![
        (btc(), GridSpec::crypto()),
        (gts([-0.4854, 0.3904, 0.4045, 0.9582, 0.8005, 0.1667, 0.1708]), GridSpec::crypto()),
        (gts([-0.249408, 0.328624, 0.088640, 0.792426, 0.542250, 1.279743, 0.937133]), GridSpec::equity()),
        (gts([-0.260643, 0.340880, 0.022212, 0.787757, 0.597110, 1.288555, 1.014353]), GridSpec::equity()),
    ]
}

fn quadrature_density(m: &ModelSpec, x: f64, xi_max: f64) -> f64 {
    integrate_panels(
        |xi| (m.exponent(xi).exp() * Complex64::from_polar(1.0, -x * xi)).re,
        0.0,
        xi_max,
        (4.0 * xi_max) as usize,
        1e-12,
    ) / PI
}

fn normal_cdf(x: f64) -> f64 {
    gts_core::special::normal_cdf(x)
}

#[test]
fn frft_matches_naive_summation() {
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    for len in [1usize, 2, 3, 7, 64, 100, 255, 256] {
        let seq: Vec<Complex64> = (0..len).map(|_| Complex64::new(rng.random(), rng.random::<f64>() - 0.5)).collect();
        let delta: f64 = rng.random_range(-0.2..0.2);
        let got = frft_core(&seq, delta);
        for (k, g) in got.iter().enumerate() {
            let want: Complex64 = seq
                .iter()
                .enumerate()
                .map(|(j, s)| s * Complex64::from_polar(1.0, -2.0 * PI * (j * k) as f64 * delta))
                .sum();
            assert!((g - want).norm() < 1e-9 * want.norm().max(1.0), "len={len} k={k}");
        }
    }
}

#[test]
fn normal_density_round_trip() {
    let m = ModelSpec::normal(0.0, 1.0).unwrap();
    let t = pdf_on_grid(&m, &GridSpec::crypto()).unwrap();
    let worst =
        t.x.iter()
            .zip(&t.values)
            .map(|(x, f)| (f - (-x * x / 2.0).exp() / (2.0 * PI).sqrt()).abs())
            .fold(0.0, f64::max);
    assert!(worst < 1e-10, "{worst}");
}

#[test]
fn btc_density_matches_direct_quadrature() {
    let m = btc();
    // Δx = 0.025 puts every probe on a node
    let g = GridSpec { m_out: 8001, ..GridSpec::crypto() };
    let t = pdf_on_grid(&m, &g).unwrap();
    for x in [-10.0, -1.0, 0.0, 1.0, 10.0] {
        let k = ((x - g.x_min) / g.dx()).round() as usize;
        assert!((t.x[k] - x).abs() < 1e-12);
        let f = t.values[k];
        let q = quadrature_density(&m, x, 2.0 * g.xi_max);
        assert!((f - q).abs() < 1e-8, "x={x}: {f} vs {q}");
    }
}

#[test]
fn densities_are_normalized_real_and_converged() {
    for (m, g) in reference_sets() {
        let t = pdf_on_grid(&m, &g).unwrap();
        let mass: f64 = t.values.windows(2).map(|w| 0.5 * (w[0] + w[1]) * g.dx()).sum();
        assert!((mass - 1.0).abs() < 1e-6, "mass {mass}");
        assert!(t.diagnostics.imag_residue < 1e-10);
        assert!(t.diagnostics.tail_modulus <= TRUNCATION_TOL);
        for finer in [GridSpec { n: 2 * g.n, ..g }, GridSpec { n: 2 * g.n, xi_max: 2.0 * g.xi_max, ..g }] {
            let u = pdf_on_grid(&m, &finer).unwrap();
            let worst = t.values.iter().zip(&u.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(worst < 1e-8, "{worst}");
        }
        let c = cdf_on_grid(&m, &g).unwrap();
        assert!(c.values[0] <= 1e-6 && *c.values.last().unwrap() >= 1.0 - 1e-6);
        assert!(c.values.windows(2).all(|w| w[0] <= w[1]));
    }
}

#[test]
fn normal_cdf_values() {
    let m = ModelSpec::normal(0.0, 1.0).unwrap();
    let g = GridSpec { m_out: 8193, ..GridSpec::crypto() };
    let c = cdf_on_grid(&m, &g).unwrap();
    assert!((c.values[4096] - 0.5).abs() < 1e-11);
    let d = DensityTable::new(&m, &GridSpec::crypto()).unwrap();
    assert!((d.cdf_at(1.96).unwrap() - normal_cdf(1.96)).abs() < 1e-6);
    assert!((d.cdf_at(1.96).unwrap() - 0.9750).abs() < 1e-4);
    let worst = c.x.iter().zip(&c.values).map(|(x, v)| (v - normal_cdf(*x)).abs()).fold(0.0, f64::max);
    assert!(worst < 1e-10, "{worst}");
}

#[test]
fn btc_cdf_total_mass_and_integrated_density() {
    let m = btc();
    let g = GridSpec { x_min: -60.0, x_max: 60.0, m_out: 8193, ..GridSpec::crypto() };
    let c = cdf_on_grid(&m, &g).unwrap();
    assert!((c.values.last().unwrap() - 1.0).abs() < 1e-6);
    let p = pdf_on_grid(&m, &g).unwrap();
    // composite Simpson over [−60, 0]; the mass below −60 is ~1e-7 · f-tail and added from the CDF
    let half = &p.values[..=4096];
    let h = g.dx();
    let mut s = half[0] + half[4096];
    for (i, v) in half.iter().enumerate().take(4096).skip(1) {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * v;
    }
    let below = s * h / 3.0 + c.values[0];
    assert!((c.values[4096] - below).abs() < 1e-7, "{} vs {below}", c.values[4096]);
}

#[test]
fn location_sensitivity_is_minus_slope() {
    let m = btc();
    let g = GridSpec::crypto();
    let s = pdf_sensitivities_on_grid(&m, &g).unwrap();
    let spline = NaturalSpline::new(g.x_min, g.dx(), s.pdf.clone());
    for k in (200..8000).step_by(97) {
        let x = s.x[k];
        assert!((s.gradient[0][k] + spline.derivative(x)).abs() < 1e-6, "x={x}");
    }
}

#[test]
fn sensitivities_match_finite_differences() {
    let m = btc();
    let g = GridSpec::crypto();
    let s = pdf_sensitivities_on_grid(&m, &g).unwrap();
    let k = s.x.iter().position(|&x| x >= 1.0).unwrap();
    let x = s.x[k];
    let h = 1e-5;
    let mut grads = Vec::new();
    for j in 0..7 {
        let mut up = m.values().to_vec();
        let mut dn = up.clone();
        up[j] += h;
        dn[j] -= h;
        let fu = pdf_on_grid(&m.with_values(up).unwrap(), &g).unwrap();
        let fd = pdf_on_grid(&m.with_values(dn).unwrap(), &g).unwrap();
        let num = (fu.values[k] - fd.values[k]) / (2.0 * h);
        let rel = (num - s.gradient[j][k]).abs() / s.gradient[j][k].abs();
        assert!(rel < 1e-4, "j={j} at x={x}: {num} vs {}", s.gradient[j][k]);
        grads.push((fu, fd));
    }
    for j in 0..7 {
        for l in j..7 {
            let (fu, fd) = &grads[l];
            let su = pdf_sensitivities_on_grid(&fu.model, &g).unwrap();
            let sd = pdf_sensitivities_on_grid(&fd.model, &g).unwrap();
            let num = (su.gradient[j][k] - sd.gradient[j][k]) / (2.0 * h);
            let an = s.hessian[s.packed_index(j, l)][k];
            assert!((num - an).abs() < 1e-4 * an.abs().max(1e-3), "({j},{l}): {num} vs {an}");
        }
    }
}

#[test]
fn sensitivities_conserve_mass_and_mirror() {
    let p = GtsParams::new(0.0, 0.4, 0.4, 0.9, 0.9, 0.7, 0.7).unwrap();
    let m = ModelSpec::gts(p).unwrap();
    let g = GridSpec::crypto();
    let s = pdf_sensitivities_on_grid(&m, &g).unwrap();
    for ch in s.gradient.iter().chain(&s.hessian) {
        let total: f64 = ch.windows(2).map(|w| 0.5 * (w[0] + w[1]) * g.dx()).sum();
        assert!(total.abs() < 1e-6, "{total}");
    }
    let sym = GridSpec { m_out: 8193, ..g };
    let s = pdf_sensitivities_on_grid(&m, &sym).unwrap();
    assert!((s.gradient[5][4096] - s.gradient[6][4096]).abs() < 1e-12);
}

#[test]
fn interpolation_contract() {
    let m = btc();
    let coarse = DensityTable::new(&m, &GridSpec::crypto()).unwrap();
    let fine = DensityTable::new(&m, &GridSpec { m_out: 2 * 8192 - 1, ..GridSpec::crypto() }).unwrap();
    let x = coarse.pdf.x[4100];
    assert_eq!(coarse.pdf_at(x).unwrap(), coarse.pdf.values[4100]);
    assert_eq!(coarse.cdf_at(x).unwrap(), coarse.cdf.values[4100]);
    let mid = 0.5 * (coarse.pdf.x[4100] + coarse.pdf.x[4101]);
    assert!((coarse.pdf_at(mid).unwrap() - fine.pdf_at(mid).unwrap()).abs() < 1e-6);
    assert!((coarse.cdf_at(mid).unwrap() - fine.cdf_at(mid).unwrap()).abs() < 1e-6);
    match coarse.pdf_at(150.0) {
        Err(gts_core::Error::OutOfRange { .. }) => {}
        other => panic!("{other:?}"),
    }
}

#[test]
fn truncation_policy() {
    let g = GridSpec { xi_max: 8.0, n: 2000, ..GridSpec::crypto() };
    assert!(matches!(pdf_on_grid(&btc(), &g), Err(gts_core::Error::Grid(_))));
    let bg = ModelSpec::new(Family::BilateralGamma, vec![-0.0315, 1.0928, 0.7018, 1.5397, 1.1108]).unwrap();
    let t = pdf_on_grid(&bg, &GridSpec::equity()).unwrap();
    assert!(t.diagnostics.tail_modulus > TRUNCATION_TOL);
}
