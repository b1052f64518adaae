//! Plain-text renderings of fit results.

use std::fmt::Write;

use super::fit::FitResult;
use super::lrt::LrtResult;
use super::TraceRow;

fn fmt_num(v: f64) -> String {
    if v == 0.0 || (v.abs() >= 1e-4 && v.abs() < 1e7) {
        format!("{v:.6}")
    } else {
        format!("{v:.4e}")
    }
}

fn fmt_p(p: f64) -> String {
    if p < 1e-4 {
        format!("{p:.2e}")
    } else {
        format!("{p:.4}")
    }
}

/// Estimate table followed by the information criteria.
pub fn fit_table(fit: &FitResult) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "Maximum likelihood estimation: {} (m = {})", fit.family(), fit.sample_size);
    let _ = writeln!(
        s,
        "{:<14}{:>14}{:>14}{:>11}{:>12}{:>14}{:>14}",
        "Parameter", "Estimate", "Std.Err", "z", "Pr(Z>|z|)", "CI low", "CI high"
    );
    for p in fit.params.iter().chain(&fit.derived) {
        let _ = writeln!(
            s,
            "{:<14}{:>14}{:>14}{:>11.3}{:>12}{:>14}{:>14}",
            p.name,
            fmt_num(p.estimate),
            fmt_num(p.std_err),
            p.z,
            fmt_p(p.p_two_sided),
            fmt_num(p.ci_low),
            fmt_num(p.ci_high)
        );
    }
    if let Some(vg) = fit.vg {
        let _ = writeln!(
            s,
            "VG form: mu = {}, delta = {}, sigma = {}, alpha = {}, theta = {}",
            fmt_num(vg.mu),
            fmt_num(vg.delta),
            fmt_num(vg.sigma),
            fmt_num(vg.alpha),
            fmt_num(vg.theta)
        );
    }
    let _ = writeln!(s, "{:<14}{:>14.3}", "Log(ML)", fit.loglik);
    let _ = writeln!(s, "{:<14}{:>14.3}", "AIC", fit.aic);
    let _ = writeln!(s, "{:<14}{:>14.3}", "BIC", fit.bic);
    let _ = writeln!(s, "{:<14}{:>14.3e}", "|score|", fit.score_norm);
    let _ = writeln!(s, "{:<14}{:>14.3e}", "max eigenvalue", fit.max_eigenvalue);
    if !fit.at_bound.is_empty() {
        let _ = writeln!(s, "held at bound: {}", fit.at_bound.join(", "));
    }
    s
}

/// Iteration table: parameters, Log(ML), score norm and largest Hessian eigenvalue.
pub fn trace_table(names: &[&str], trace: &[TraceRow]) -> String {
    let mut s = String::new();
    let _ = write!(s, "{:>5}", "iter");
    for n in names {
        let _ = write!(s, "{:>14}", n);
    }
    let _ = writeln!(s, "{:>16}{:>14}{:>16}", "Log(ML)", "|dLog(ML)/dV|", "Max eigenvalue");
    for row in trace {
        let _ = write!(s, "{:>5}", row.iteration);
        for v in &row.values {
            let _ = write!(s, "{:>14.6}", v);
        }
        let _ = writeln!(s, "{:>16.3}{:>14.3e}{:>16.4e}", row.loglik, row.grad_norm, row.max_eigenvalue);
    }
    s
}

/// Likelihood-ratio block comparing a full and a restricted fit.
pub fn lrt_table(full: &FitResult, restricted: &FitResult, lrt: &LrtResult) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "Likelihood ratio test: {} against {}", full.family(), restricted.family());
    let _ = writeln!(s, "{:<22}{:>14.4}", format!("Log(ML) {}", full.family()), full.loglik);
    let _ = writeln!(s, "{:<22}{:>14.4}", format!("Log(ML) {}", restricted.family()), restricted.loglik);
    let _ = writeln!(s, "{:<22}{:>14.4}", "chi2 statistic", lrt.chi2);
    let _ = writeln!(s, "{:<22}{:>14}", "df", lrt.df);
    let _ = writeln!(s, "{:<22}{:>14.4}", "p-value", lrt.p_value);
    s
}
