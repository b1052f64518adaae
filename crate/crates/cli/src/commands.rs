//! Subcommand implementations.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use gts_core::data::{filter_outliers, load_prices, load_returns, log_returns, summary, write_returns, ReturnSeries};
use gts_core::frft::{pdf_sensitivities_on_grid, DensityTable, SensitivityInterp};
use gts_core::gof::{run_tests, write_bins_csv, GofTest};
use gts_core::likelihood::report::{fit_table, lrt_table, trace_table};
use gts_core::likelihood::{fit, likelihood_ratio_test, FitConfig, FitResult, Init};
use gts_core::models::{Family, ModelSpec};
use gts_core::moments::moment_report;
use gts_core::simulate::{simulate, SimConfig, SimMethod};
use gts_core::Error;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::args::{
    Command, FitArgs, Format, GofArgs, LrtArgs, Method, ModelArgs, MomentsArgs, PdfArgs, ReturnsArgs, SimulateArgs,
};
use crate::config::RunConfig;
use crate::plot::svg_panels;

pub fn run(command: &Command, config: &RunConfig, out: Option<&Path>) -> Result<()> {
    let sink = Sink { config, out };
    match command {
        Command::Returns(a) => returns(a, &sink),
        Command::Fit(a) => fit_cmd(a, &sink),
        Command::Gof(a) => gof(a, &sink),
        Command::Moments(a) => moments(a, &sink),
        Command::Pdf(a) => pdf(a, &sink),
        Command::Simulate(a) => simulate_cmd(a, &sink),
        Command::Lrt(a) => lrt(a, &sink),
    }
}

/// Where and how a report is written.
struct Sink<'a> {
    config: &'a RunConfig,
    out: Option<&'a Path>,
}

impl Sink<'_> {
    fn write_raw(&self, body: &str) -> Result<()> {
        match self.out {
            Some(path) => fs::write(path, body).with_context(|| format!("writing {}", path.display())),
            None => {
                let mut stdout = io::stdout().lock();
                stdout.write_all(body.as_bytes())?;
                Ok(stdout.flush()?)
            }
        }
    }

    /// Text, JSON or CSV rendering of one report; text and JSON carry the resolved config.
    fn emit(&self, text: impl FnOnce() -> String, json: Value, csv: impl FnOnce() -> String) -> Result<()> {
        let body = match self.config.format {
            Format::Text => {
                let header = serde_json::to_string(self.config)?;
                format!("gtsfit {}\nconfig: {header}\n\n{}", self.config.version, text())
            }
            Format::Json => {
                let mut v = json;
                v["config"] = serde_json::to_value(self.config)?;
                format!("{}\n", serde_json::to_string_pretty(&v)?)
            }
            Format::Csv => csv(),
        };
        self.write_raw(&body)
    }
}

/// Fit report as written by `fit --format json`.
#[derive(Debug, Serialize, Deserialize)]
struct SavedFit {
    fit: FitResult,
}

fn read_saved_fit(path: &Path) -> Result<FitResult> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let saved: SavedFit =
        serde_json::from_str(&text).map_err(|e| Error::Data(format!("{}: not a fit report ({e})", path.display())))?;
    Ok(saved.fit)
}

fn model_from(args: &ModelArgs) -> Result<ModelSpec> {
    match (&args.fit, args.family, &args.params) {
        (Some(path), _, _) => Ok(read_saved_fit(path)?.estimates),
        (None, Some(family), Some(values)) => Ok(ModelSpec::new(family, values.0.clone())?),
        _ => bail!(Error::Domain("give either --fit REPORT or --family with --params".into())),
    }
}

fn read_sample(path: &PathBuf) -> Result<ReturnSeries> {
    Ok(load_returns(path)?)
}

fn returns(a: &ReturnsArgs, sink: &Sink) -> Result<()> {
    let data = &sink.config.data;
    let prices = load_prices(&a.input, &data.load)?;
    let mut series = log_returns(&prices, data.scale)?;
    series.provenance.source = a.input.display().to_string();
    let series = filter_outliers(&series, &data.filter)?;
    if let Some(w) = &series.provenance.warning {
        eprintln!("warning: {w}");
    }
    let file = File::create(&a.output).with_context(|| format!("creating {}", a.output.display()))?;
    write_returns(&series, BufWriter::new(file))?;

    let s = summary(&series.values)?;
    let p = &series.provenance;
    let rows = [
        ("Mean", s.mean),
        ("Standard deviation", s.sd),
        ("Skewness", s.skewness),
        ("Kurtosis", s.kurtosis),
        ("Min", s.min),
        ("Max", s.max),
    ];
    sink.emit(
        || {
            let mut t = String::new();
            let _ = writeln!(t, "Return series from {} ({} prices)", p.source, prices.len());
            for f in &p.filters {
                let _ = writeln!(t, "  filter {f}: removed {}", p.removed);
            }
            if let Some(w) = &p.warning {
                let _ = writeln!(t, "  warning: {w}");
            }
            let _ = writeln!(t, "{:<20}{:>14}", "Sample size", s.m);
            for (name, v) in rows {
                let _ = writeln!(t, "{name:<20}{v:>14.3}");
            }
            t
        },
        json!({ "provenance": p, "summary": s }),
        || {
            let mut t = format!("statistic,value\nSample size,{}\n", s.m);
            for (name, v) in rows {
                let _ = writeln!(t, "{name},{v}");
            }
            t
        },
    )
}

fn fit_one(family: Family, sample: &[f64], config: &FitConfig, sink: &Sink) -> Result<FitResult> {
    fit(family, sample, config, &sink.config.grid).map_err(|e| {
        if let Error::NonConvergence { trace: rows, .. } = &e {
            eprint!("{}", trace_table(family.names(), rows));
        }
        e.into()
    })
}

fn param_rows(t: &mut String, f: &FitResult) {
    for p in f.params.iter().chain(&f.derived) {
        let _ = writeln!(
            t,
            "{},{},{},{},{},{},{},{}",
            f.family(),
            p.name,
            p.estimate,
            p.std_err,
            p.z,
            p.p_two_sided,
            p.ci_low,
            p.ci_high
        );
    }
}

fn fit_cmd(a: &FitArgs, sink: &Sink) -> Result<()> {
    let sample = read_sample(&a.returns)?;
    let mut config = sink.config.fit.clone();
    if let Some(v) = &a.init {
        config.init = Init::Values(v.0.clone());
    }
    let full = fit_one(a.family, &sample.values, &config, sink)?;
    let nested = match a.restrict {
        Some(r) => {
            if !a.family.nests(r) || r == a.family {
                bail!(Error::NotNested(format!("{} does not strictly contain {r}", a.family)));
            }
            let init = full.estimates.to_gts().map_or(Init::Auto, Init::Gts);
            let restricted = fit_one(r, &sample.values, &FitConfig { init, ..sink.config.fit.clone() }, sink)?;
            let test = likelihood_ratio_test(&full, &restricted)?;
            Some((restricted, test))
        }
        None => None,
    };
    sink.emit(
        || {
            let mut t = fit_table(&full);
            if a.trace {
                let _ = write!(t, "\n{}", trace_table(a.family.names(), &full.trace));
            }
            if let Some((r, test)) = &nested {
                let _ = write!(t, "\n{}", fit_table(r));
                if a.trace {
                    let _ = write!(t, "\n{}", trace_table(r.family().names(), &r.trace));
                }
                let _ = write!(t, "\n{}", lrt_table(&full, r, test));
            }
            t
        },
        json!({
            "fit": full,
            "restricted": nested.as_ref().map(|n| &n.0),
            "lrt": nested.as_ref().map(|n| n.1),
        }),
        || {
            let mut t = String::from("family,parameter,estimate,std_err,z,p_value,ci_low,ci_high\n");
            param_rows(&mut t, &full);
            if let Some((r, _)) = &nested {
                param_rows(&mut t, r);
            }
            t
        },
    )
}

fn gof(a: &GofArgs, sink: &Sink) -> Result<()> {
    let sample = read_sample(&a.returns)?;
    let model = model_from(&a.model)?;
    let settings = &sink.config.gof;
    let reports = run_tests(&model, &sample.values, &sink.config.grid, &settings.tests, &settings.pearson)?;
    if let Some(path) = &a.bins_out {
        let Some(bins) = reports.iter().find_map(|r| r.bins.as_ref()) else {
            bail!("--bins-out needs the pearson test");
        };
        let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
        write_bins_csv(bins, BufWriter::new(file))?;
    }
    sink.emit(
        || {
            let mut t = format!("Model: {} {:?}\n\n", model.family(), model.values());
            for r in &reports {
                let _ = writeln!(t, "{}", r.to_text());
            }
            t
        },
        json!({ "model": model, "tests": reports }),
        || {
            let mut t = String::from("test,statistic,transformed,df,p_value,m\n");
            for r in &reports {
                let name = match r.test {
                    GofTest::Ks => "ks",
                    GofTest::Ad => "ad",
                    GofTest::Pearson => "pearson",
                };
                let df = r.df.map_or(String::new(), |d| d.to_string());
                let _ = writeln!(t, "{name},{},{},{df},{},{}", r.statistic, r.transformed, r.p_value, r.m);
            }
            t
        },
    )
}

fn moments(a: &MomentsArgs, sink: &Sink) -> Result<()> {
    let sample = read_sample(&a.returns)?;
    let model = model_from(&a.model)?;
    let report = moment_report(&model, &sample.values)?;
    sink.emit(
        || report.to_text(),
        json!({ "model": model, "moments": report }),
        || {
            let mut t = String::from("quantity,empirical,theoretical,relative_error\n");
            for r in report.moments.iter().chain(&report.shape) {
                let rel = r.relative_error.map_or(String::new(), |v| v.to_string());
                let _ = writeln!(t, "{},{},{},{rel}", r.label, r.empirical, r.theoretical);
            }
            t
        },
    )
}

fn pdf(a: &PdfArgs, sink: &Sink) -> Result<()> {
    let model = model_from(&a.model)?;
    let grid = &sink.config.grid;
    let (lo, hi) = a.range.map_or((grid.x_min, grid.x_max), |r| (r.0, r.1));
    if a.points < 2 {
        bail!(Error::Domain("--points must be at least 2".into()));
    }
    let x: Vec<f64> = (0..a.points).map(|i| lo + (hi - lo) * i as f64 / (a.points - 1) as f64).collect();
    let table = DensityTable::new(&model, grid)?;
    let mut columns: Vec<(String, Vec<f64>)> = vec![
        ("f".into(), x.iter().map(|&v| table.pdf_at(v)).collect::<gts_core::Result<_>>()?),
        ("F".into(), x.iter().map(|&v| table.cdf_at(v)).collect::<gts_core::Result<_>>()?),
    ];
    if a.sensitivities {
        let interp = SensitivityInterp::new(pdf_sensitivities_on_grid(&model, grid)?);
        let mut ratios = vec![Vec::with_capacity(x.len()); model.free_count()];
        for &v in &x {
            let (f, g, _) = interp.eval(v)?;
            for (r, gj) in ratios.iter_mut().zip(g) {
                r.push(if f > 0.0 { gj / f } else { 0.0 });
            }
        }
        for (name, r) in model.names().iter().zip(ratios) {
            columns.push((format!("dlogf_d{name}"), r));
        }
    }
    if let Some(path) = &a.svg {
        let title = format!("{} {:?}", model.family(), model.values());
        fs::write(path, svg_panels(&title, &x, &columns)).with_context(|| format!("writing {}", path.display()))?;
    }
    let csv = || {
        let mut t = String::from("x");
        for (name, _) in &columns {
            let _ = write!(t, ",{name}");
        }
        t.push('\n');
        for (i, xi) in x.iter().enumerate() {
            let _ = write!(t, "{xi}");
            for (_, c) in &columns {
                let _ = write!(t, ",{}", c[i]);
            }
            t.push('\n');
        }
        t
    };
    let mut json_columns = serde_json::Map::new();
    json_columns.insert("x".into(), json!(x));
    for (name, c) in &columns {
        json_columns.insert(name.clone(), json!(c));
    }
    sink.emit(
        || {
            let mut t = String::new();
            let _ = write!(t, "{:>12}", "x");
            for (name, _) in &columns {
                let _ = write!(t, "{name:>16}");
            }
            t.push('\n');
            for (i, xi) in x.iter().enumerate() {
                let _ = write!(t, "{xi:>12.4}");
                for (_, c) in &columns {
                    let _ = write!(t, "{:>16.6e}", c[i]);
                }
                t.push('\n');
            }
            t
        },
        json!({ "model": model, "columns": json_columns }),
        csv,
    )
}

fn simulate_cmd(a: &SimulateArgs, sink: &Sink) -> Result<()> {
    let model = model_from(&a.model)?;
    let method = match a.method {
        Some(Method::GammaDifference) => SimMethod::GammaDifference,
        Some(Method::InverseCdf) => SimMethod::InverseCdf,
        None if matches!(model.family(), Family::BilateralGamma | Family::VarianceGamma) => SimMethod::GammaDifference,
        None => SimMethod::InverseCdf,
    };
    let sim = SimConfig::new(a.n, sink.config.seed, method);
    let sample = simulate(&model, &sim, &sink.config.grid)?;
    if sink.config.format == Format::Json {
        return sink.emit(String::new, json!({ "model": model, "values": sample.values }), String::new);
    }
    let mut buf = Vec::new();
    write_returns(&sample, &mut buf)?;
    sink.write_raw(std::str::from_utf8(&buf)?)
}

fn lrt(a: &LrtArgs, sink: &Sink) -> Result<()> {
    let full = read_saved_fit(&a.full)?;
    let restricted = read_saved_fit(&a.restricted)?;
    let test = likelihood_ratio_test(&full, &restricted)?;
    sink.emit(
        || lrt_table(&full, &restricted, &test),
        json!({
            "full": { "family": full.family(), "loglik": full.loglik },
            "restricted": { "family": restricted.family(), "loglik": restricted.loglik },
            "lrt": test,
        }),
        || {
            format!(
                "full,restricted,loglik_full,loglik_restricted,chi2,df,p_value\n{},{},{},{},{},{},{}\n",
                full.family(),
                restricted.family(),
                full.loglik,
                restricted.loglik,
                test.chi2,
                test.df,
                test.p_value
            )
        },
    )
}
