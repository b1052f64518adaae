mod common;

use common::*;
use gts_core::frft::GridSpec;
use gts_core::likelihood::*;
use gts_core::models::{Family, ModelSpec};
use gts_core::simulate::{sample_bilateral_gamma, sample_gts, SimConfig, SimMethod};
use gts_core::Error;

fn btc_sample(n: usize, seed: u64) -> Vec<f64> {
    sample_gts(&gts(BTC), &SimConfig::new(n, seed, SimMethod::InverseCdf), &GridSpec::crypto()).unwrap().values
}

fn normal_loglik(sample: &[f64], mu: f64, s2: f64) -> f64 {
    sample.iter().map(|x| -0.5 * (2.0 * std::f64::consts::PI * s2).ln() - (x - mu).powi(2) / (2.0 * s2)).sum()
}

#[test]
fn normal_loglik_matches_closed_form() {
    let model = ModelSpec::normal(0.3, 2.25).unwrap();
    let grid = GridSpec::crypto();
    let sample = sample_gts(&model, &SimConfig::new(400, 3, SimMethod::InverseCdf), &grid).unwrap().values;
    let l = log_likelihood(&model, &sample, &grid).unwrap();
    let exact = normal_loglik(&sample, 0.3, 2.25);
    assert!((l - exact).abs() < 1e-8, "{l} vs {exact}");
    let e = evaluate(&model, &sample, &grid).unwrap();
    let m = sample.len() as f64;
    let s1: f64 = sample.iter().map(|x| x - 0.3).sum();
    let sq: f64 = sample.iter().map(|x| (x - 0.3).powi(2)).sum();
    assert_eq!(e.score[0], s1 / 2.25);
    assert!((e.score[1] - (-m / 4.5 + sq / (2.0 * 2.25 * 2.25))).abs() < 1e-12 * m);
    // the grid density agrees with the closed form as well
    let table = gts_core::frft::DensityTable::new(&model, &grid).unwrap();
    let grid_l: f64 = sample.iter().map(|&x| table.pdf_at(x).unwrap().ln()).sum();
    assert!((grid_l - exact).abs() < 1e-6 * exact.abs());
}

#[test]
fn loglik_is_additive() {
    let grid = GridSpec::crypto();
    let model = gts(BTC);
    let s = btc_sample(300, 5);
    let whole = log_likelihood(&model, &s, &grid).unwrap();
    let parts = log_likelihood(&model, &s[..120], &grid).unwrap() + log_likelihood(&model, &s[120..], &grid).unwrap();
    assert!((whole - parts).abs() < 1e-9 * whole.abs());
}

#[test]
fn evaluation_agrees_with_plain_loglik() {
    let grid = GridSpec::crypto();
    let model = gts(BTC);
    let s = btc_sample(300, 6);
    let e = evaluate(&model, &s, &grid).unwrap();
    let l = log_likelihood(&model, &s, &grid).unwrap();
    assert!((e.loglik - l).abs() < 1e-9 * l.abs());
    let sc = score(&model, &s, &grid).unwrap();
    assert!(sc.iter().zip(&e.score).all(|(a, b)| (a - b).abs() < 1e-9 * b.abs().max(1.0)));
    let rows = hessian(&model, &s, &grid).unwrap();
    assert_eq!(rows.len(), 7);
    assert_eq!(rows[2][5], rows[5][2]);
}

#[test]
fn derivatives_match_finite_differences_across_families() {
    let grid = GridSpec::crypto();
    let s = btc_sample(500, 7);
    let models = [
        gts([-0.05, 0.3, 0.45, 0.8, 0.5, 0.27, 0.2]),
        ModelSpec::from_gts(Family::KoBol, &gts(BTC).to_gts().unwrap()).unwrap(),
        ModelSpec::new(Family::Cgmy, vec![-0.1, 0.4, 0.7, 0.25, 0.18]).unwrap(),
        ModelSpec::new(Family::BilateralGamma, vec![-0.1, 1.2, 1.0, 0.35, 0.3]).unwrap(),
        ModelSpec::new(Family::VarianceGamma, vec![0.1, 1.1, 0.35, 0.3]).unwrap(),
        ModelSpec::normal(0.1, 14.0).unwrap(),
    ];
    for model in models {
        let e = evaluate(&model, &s, &grid).unwrap();
        let gs = max_relative_error(&e.score, &fd_score(&model, &s, &grid));
        let hs = max_relative_error(&e.hessian, &fd_hessian(&model, &s, &grid));
        assert!(gs < 1e-3 && hs < 1e-3, "{}: score {gs:.2e} hessian {hs:.2e}", model.family());
    }
}

#[test]
fn normal_fit_closed_form() {
    let f = fit_normal(&[1.0, 2.0, 3.0]).unwrap();
    assert_eq!(f.param("mu").unwrap().estimate, 2.0);
    assert!((f.param("sigma2").unwrap().estimate - 2.0 / 3.0).abs() < 1e-15);
    assert_eq!(f.free_count(), 2);
    assert!((f.aic - (4.0 - 2.0 * f.loglik)).abs() < 1e-12);
    assert!((f.bic - (2.0 * 3f64.ln() - 2.0 * f.loglik)).abs() < 1e-12);
}

#[test]
fn normal_fit_recovers_large_sample() {
    let grid = GridSpec::crypto();
    let model = ModelSpec::normal(-0.2, 9.0).unwrap();
    let s = sample_gts(&model, &SimConfig::new(100_000, 11, SimMethod::InverseCdf), &grid).unwrap().values;
    let f = fit(Family::Normal, &s, &FitConfig::default(), &grid).unwrap();
    let mu = f.param("mu").unwrap();
    let s2 = f.param("sigma2").unwrap();
    assert!((mu.estimate + 0.2).abs() < 4.0 * mu.std_err);
    assert!((s2.estimate - 9.0).abs() < 4.0 * s2.std_err);
    let sigma = f.param("sigma").unwrap();
    assert!((sigma.estimate - 3.0).abs() < 4.0 * sigma.std_err);
}

#[test]
fn bilateral_gamma_recovery() {
    let s = sample_bilateral_gamma(&bg_params(), &SimConfig::new(20_000, 21, SimMethod::GammaDifference)).unwrap();
    let f = fit(Family::BilateralGamma, &s.values, &FitConfig::default(), &GridSpec::equity()).unwrap();
    assert!(f.score_norm < 1e-6 && f.max_eigenvalue < 0.0);
    for (p, truth) in f.params.iter().zip(BG_REF) {
        assert!(
            (p.estimate - truth).abs() < 3.0 * p.std_err,
            "{}: {} vs {truth} (se {})",
            p.name,
            p.estimate,
            p.std_err
        );
        assert!(p.ci_low < p.estimate && p.estimate < p.ci_high);
    }
    assert_eq!(f.trace.len(), f.iterations);
    assert!(f.trace.windows(2).all(|w| w[1].loglik >= w[0].loglik - 1e-6));
}

#[test]
fn gts_fit_is_location_equivariant() {
    let grid = GridSpec::crypto();
    let s = btc_sample(3000, 31);
    let c = 0.37;
    let shifted: Vec<f64> = s.iter().map(|x| x + c).collect();
    let config = FitConfig::default();
    let a = fit(Family::Gts, &s, &config, &grid).unwrap();
    let b = fit(Family::Gts, &shifted, &config, &grid).unwrap();
    let (va, vb) = (a.estimates.values(), b.estimates.values());
    assert!((vb[0] - va[0] - c).abs() < 1e-4, "mu {} vs {}", va[0], vb[0]);
    for j in 1..7 {
        assert!((va[j] - vb[j]).abs() < 1e-4, "{}: {} vs {}", a.params[j].name, va[j], vb[j]);
    }
}

#[test]
fn nested_fits_and_ratio_test() {
    let grid = GridSpec::crypto();
    let s = btc_sample(3000, 41);
    let config = FitConfig::default();
    let full = fit(Family::Gts, &s, &config, &grid).unwrap();
    let kobol = fit(Family::KoBol, &s, &config, &grid).unwrap();
    let normal = fit(Family::Normal, &s, &config, &grid).unwrap();
    assert!(full.loglik >= kobol.loglik - LRT_SLACK);
    let lrt = likelihood_ratio_test(&full, &kobol).unwrap();
    assert_eq!(lrt.df, 1);
    assert!((0.0..=1.0).contains(&lrt.p_value));
    assert!(full.aic < normal.aic && full.bic < normal.bic);
    let table = report::lrt_table(&full, &kobol, &lrt);
    assert!(table.contains("kobol"));
    assert!(matches!(likelihood_ratio_test(&kobol, &full), Err(Error::NotNested(_))));
}

#[test]
fn lrt_p_values() {
    for (chi2, df, p) in [(0.1525, 1, 0.696), (2.0810, 2, 0.3533), (8.1828, 2, 0.0167), (10.9234, 2, 0.0042)] {
        assert!((lrt_p_value(chi2, df) - p).abs() < 5e-4);
    }
}

#[test]
fn iteration_cap_reports_trace() {
    let s = btc_sample(500, 51);
    let config = FitConfig { max_iter: 1, ..FitConfig::default() };
    match fit(Family::Gts, &s, &config, &GridSpec::crypto()) {
        Err(Error::NonConvergence { iterations, trace, .. }) => {
            assert_eq!(iterations, 1);
            assert_eq!(trace.len(), 1);
            assert!(trace[0].params.is_some());
        }
        other => panic!("expected non-convergence, got {other:?}"),
    }
}

#[test]
fn input_errors() {
    let grid = GridSpec::crypto();
    let short = vec![0.1; 10];
    assert!(matches!(fit(Family::Gts, &short, &FitConfig::default(), &grid), Err(Error::Data(_))));
    let mut s = btc_sample(100, 61);
    s[3] = 250.0;
    assert!(matches!(log_likelihood(&gts(BTC), &s, &grid), Err(Error::OutOfRange { .. })));
    assert!(matches!(fit_normal(&[1.0, 1.0, 1.0]), Err(Error::Data(_))));
}

#[test]
fn report_tables_render() {
    let f = fit_normal(&[1.0, 2.0, 4.0, 8.0]).unwrap();
    let t = report::fit_table(&f);
    assert!(t.contains("sigma2") && t.contains("AIC") && t.contains("BIC"));
    let tr = report::trace_table(f.estimates.names(), &f.trace);
    assert_eq!(tr.lines().count(), 2);
}
