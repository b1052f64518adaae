//! Price ingestion, log returns, outlier filters and sample summaries.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Share of removed observations above which a filter is flagged.
pub const FILTER_WARN_SHARE: f64 = 0.05;

const DATE_FORMATS: [&str; 5] = ["%Y-%m-%d", "%Y/%m/%d", "%d/%m/%Y", "%m/%d/%Y", "%b %d, %Y"];
const PRICE_COLUMNS: [&str; 6] = ["adj close", "adj_close", "adjclose", "close", "price", "adjusted"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceSeries {
    pub dates: Vec<NaiveDate>,
    pub prices: Vec<f64>,
}

impl PriceSeries {
    pub fn len(&self) -> usize {
        self.prices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prices.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct Provenance {
    pub source: String,
    pub filters: Vec<String>,
    pub removed: usize,
    pub warning: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReturnSeries {
    pub values: Vec<f64>,
    /// Date of the later price in each pair, when known.
    pub dates: Option<Vec<NaiveDate>>,
    pub provenance: Provenance,
}

impl ReturnSeries {
    pub fn new(values: Vec<f64>, source: impl Into<String>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Data(format!("return {} is not finite", i + 1)));
        }
        Ok(Self { values, dates: None, provenance: Provenance { source: source.into(), ..Default::default() } })
    }

    pub fn m(&self) -> usize {
        self.values.len()
    }
}

/// Column and format choices for [`load_prices`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadOptions {
    pub date_column: String,
    /// `None` picks the first of adj close / close / price present.
    pub price_column: Option<String>,
    /// chrono format string; `None` tries ISO and a few common layouts.
    pub date_format: Option<String>,
    pub delimiter: u8,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self { date_column: "date".into(), price_column: None, date_format: None, delimiter: b',' }
    }
}

fn parse_date(s: &str, format: Option<&str>) -> Option<NaiveDate> {
    let s = s.trim();
    match format {
        Some(f) => NaiveDate::parse_from_str(s, f).ok(),
        None => DATE_FORMATS.iter().find_map(|f| NaiveDate::parse_from_str(s, f).ok()).or_else(|| {
            // timestamps such as 2020-01-01 00:00:00
            s.get(..10).and_then(|d| NaiveDate::parse_from_str(d, "%Y-%m-%d").ok())
        }),
    }
}

fn parse_price(s: &str) -> Option<f64> {
    s.trim().replace([',', '$'], "").parse().ok()
}

pub fn load_prices(path: impl AsRef<Path>, options: &LoadOptions) -> Result<PriceSeries> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::Data(format!("cannot open {}: {e}", path.display())))?;
    read_prices(file, options)
}

/// Parses `date,price` rows; a header is detected when the first field of
/// the first row is not a date.
pub fn read_prices<R: Read>(reader: R, options: &LoadOptions) -> Result<PriceSeries> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .delimiter(options.delimiter)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let fmt = options.date_format.as_deref();
    let mut rows = rdr.records().enumerate().peekable();
    let (date_idx, price_idx) = match rows.peek() {
        None => return Err(Error::Data("price file is empty".into())),
        Some((_, Err(e))) => return Err(Error::Data(format!("line 1: {e}"))),
        Some((_, Ok(first))) if parse_date(first.get(0).unwrap_or(""), fmt).is_some() => (0, 1),
        Some((_, Ok(header))) => {
            let names: Vec<String> = header.iter().map(|h| h.trim().to_ascii_lowercase()).collect();
            let find = |want: &str| names.iter().position(|n| n == &want.to_ascii_lowercase());
            let d = find(&options.date_column)
                .ok_or_else(|| Error::Data(format!("no '{}' column in header {:?}", options.date_column, names)))?;
            let p = match &options.price_column {
                Some(c) => find(c).ok_or_else(|| Error::Data(format!("no '{c}' column in header {names:?}")))?,
                None => PRICE_COLUMNS
                    .iter()
                    .find_map(|c| find(c))
                    .ok_or_else(|| Error::Data(format!("no price column in header {names:?}")))?,
            };
            rows.next();
            (d, p)
        }
    };
    let mut by_date = BTreeMap::new();
    for (i, rec) in rows {
        let line = i + 1;
        let rec = rec.map_err(|e| Error::Data(format!("line {line}: {e}")))?;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        let ds = rec.get(date_idx).unwrap_or("");
        let date = parse_date(ds, fmt).ok_or_else(|| Error::Data(format!("line {line}: cannot parse date '{ds}'")))?;
        let ps = rec.get(price_idx).unwrap_or("");
        let price = parse_price(ps).ok_or_else(|| Error::Data(format!("line {line}: cannot parse price '{ps}'")))?;
        if !(price > 0.0 && price.is_finite()) {
            return Err(Error::Data(format!("line {line}: price {price} is not positive")));
        }
        by_date.insert(date, price);
    }
    let (dates, prices) = by_date.into_iter().unzip();
    Ok(PriceSeries { dates, prices })
}

/// y_j = scale · ln(S_j / S_{j−1}).
pub fn log_returns(prices: &PriceSeries, scale: f64) -> Result<ReturnSeries> {
    if prices.len() < 2 {
        return Err(Error::Data(format!("need at least two prices, got {}", prices.len())));
    }
    let values = prices.prices.windows(2).map(|w| scale * (w[1] / w[0]).ln()).collect();
    Ok(ReturnSeries {
        values,
        dates: Some(prices.dates[1..].to_vec()),
        provenance: Provenance { source: "prices".into(), ..Default::default() },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum FilterRule {
    #[default]
    None,
    /// Drop |y| > c.
    Threshold(f64),
    /// Drop |y − median| / MAD > k (MAD unscaled).
    RobustZ(f64),
    /// Drop returns dated on any listed day.
    ExcludeDates(Vec<NaiveDate>),
}

impl FilterRule {
    fn describe(&self) -> String {
        match self {
            FilterRule::None => "none".into(),
            FilterRule::Threshold(c) => format!("|y| > {c}"),
            FilterRule::RobustZ(k) => format!("|y - median| / MAD > {k}"),
            FilterRule::ExcludeDates(d) => {
                format!("exclude dates [{}]", d.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "))
            }
        }
    }
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

pub fn filter_outliers(returns: &ReturnSeries, rule: &FilterRule) -> Result<ReturnSeries> {
    let keep: Vec<bool> = match rule {
        FilterRule::None => vec![true; returns.m()],
        FilterRule::Threshold(c) => returns.values.iter().map(|y| y.abs() <= *c).collect(),
        FilterRule::RobustZ(k) => {
            let mut s = returns.values.clone();
            s.sort_by(f64::total_cmp);
            let med = median(&s);
            let mut dev: Vec<f64> = s.iter().map(|y| (y - med).abs()).collect();
            dev.sort_by(f64::total_cmp);
            let mad = median(&dev);
            if !(mad > 0.0) {
                return Err(Error::Data("median absolute deviation is zero".into()));
            }
            returns.values.iter().map(|y| (y - med).abs() / mad <= *k).collect()
        }
        FilterRule::ExcludeDates(excluded) => {
            let dates =
                returns.dates.as_ref().ok_or_else(|| Error::Data("date exclusion needs dated returns".into()))?;
            dates.iter().map(|d| !excluded.contains(d)).collect()
        }
    };
    let values: Vec<f64> = returns.values.iter().zip(&keep).filter(|(_, k)| **k).map(|(v, _)| *v).collect();
    let dates = returns.dates.as_ref().map(|d| d.iter().zip(&keep).filter(|(_, k)| **k).map(|(v, _)| *v).collect());
    let removed = returns.m() - values.len();
    let mut provenance = returns.provenance.clone();
    provenance.filters.push(rule.describe());
    provenance.removed += removed;
    if removed as f64 > FILTER_WARN_SHARE * returns.m() as f64 {
        provenance.warning = Some(format!(
            "filter '{}' removed {removed} of {} observations; check the rule",
            rule.describe(),
            returns.m()
        ));
    }
    Ok(ReturnSeries { values, dates, provenance })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub m: usize,
    pub mean: f64,
    pub sd: f64,
    pub skewness: f64,
    pub kurtosis: f64,
    pub min: f64,
    pub max: f64,
}

/// Moment summary with divisor m throughout.
pub fn summary(values: &[f64]) -> Result<Summary> {
    if values.is_empty() {
        return Err(Error::Data("empty sample".into()));
    }
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    let central = |k: i32| values.iter().map(|x| (x - mean).powi(k)).sum::<f64>() / m;
    let (c2, c3, c4) = (central(2), central(3), central(4));
    Ok(Summary {
        m: values.len(),
        mean,
        sd: c2.sqrt(),
        skewness: c3 / c2.powf(1.5),
        kurtosis: c4 / (c2 * c2),
        min: values.iter().cloned().fold(f64::INFINITY, f64::min),
        max: values.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    })
}

/// One-column CSV with a `return` header.
pub fn write_returns<W: Write>(series: &ReturnSeries, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["return"])?;
    for v in &series.values {
        w.write_record([format!("{v}")])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a one-column return file, with or without a header line.
pub fn read_returns<R: Read>(reader: R, source: &str) -> Result<ReturnSeries> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).flexible(true).trim(csv::Trim::All).from_reader(reader);
    let mut values = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Data(format!("line {}: {e}", i + 1)))?;
        let field = rec.iter().last().unwrap_or("");
        if field.is_empty() {
            continue;
        }
        match field.parse::<f64>() {
            Ok(v) => values.push(v),
            Err(_) if i == 0 => continue,
            Err(_) => return Err(Error::Data(format!("line {}: cannot parse return '{field}'", i + 1))),
        }
    }
    ReturnSeries::new(values, source)
}

pub fn load_returns(path: impl AsRef<Path>) -> Result<ReturnSeries> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::Data(format!("cannot open {}: {e}", path.display())))?;
    read_returns(file, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn headerless_two_rows() {
        let p = read_prices("2020-01-01,100\n2020-01-02,110".as_bytes(), &LoadOptions::default()).unwrap();
        assert_eq!(p.len(), 2);
        let r = log_returns(&p, 100.0).unwrap();
        assert!((r.values[0] - 100.0 * 1.1f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn header_and_duplicates() {
        let text = "Date,Open,Close\n2020-01-02,1,110\n2020-01-01,1,100\n2020-01-02,1,120\n";
        let p = read_prices(text.as_bytes(), &LoadOptions::default()).unwrap();
        assert_eq!(p.prices, vec![100.0, 120.0]);
    }

    #[test]
    fn zero_price_names_line() {
        let err =
            read_prices("date,price\n2020-01-01,5\n2020-01-02,0\n".as_bytes(), &LoadOptions::default()).unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn summary_of_three_points() {
        let s = summary(&[-1.0, 0.0, 1.0]).unwrap();
        assert_eq!(s.mean, 0.0);
        assert!((s.sd - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }
}
