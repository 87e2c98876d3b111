//! Verification reports and their CSV/JSON encodings.
//!
//! Reports contain no timestamps or host details unless timing is requested,
//! so the same configuration and seed always serialise to the same bytes.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mc::{ComplexEstimate, Estimate};

pub const SCHEMA_VERSION: u32 = 1;

/// How a row's `score` is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// `|estimate - target| / error_bar`.
    ZScore,
    /// `|estimate - target|`.
    Absolute,
    /// `|estimate - target| / |target|`.
    Relative,
    /// Boolean check encoded as score 0 (pass) or 1 (fail), threshold 0.
    Flag,
    /// A measured quantity compared against a floor or ceiling; see the row name.
    Bound,
}

impl Metric {
    fn as_str(self) -> &'static str {
        match self {
            Metric::ZScore => "z_score",
            Metric::Absolute => "absolute",
            Metric::Relative => "relative",
            Metric::Flag => "flag",
            Metric::Bound => "bound",
        }
    }
}

/// Non-finite floats are written as strings so JSON stays valid.
mod lenient_f64 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_str(&v.to_string())
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// One check: an estimate against a target with an error bar and a verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    pub name: String,
    pub metric: Metric,
    #[serde(with = "lenient_f64")]
    pub estimate: f64,
    #[serde(with = "lenient_f64")]
    pub target: f64,
    #[serde(with = "lenient_f64")]
    pub error_bar: f64,
    #[serde(with = "lenient_f64")]
    pub score: f64,
    #[serde(with = "lenient_f64")]
    pub threshold: f64,
    pub passed: bool,
}

impl CheckRow {
    fn build(
        name: impl Into<String>,
        metric: Metric,
        estimate: f64,
        target: f64,
        error_bar: f64,
        score: f64,
        threshold: f64,
    ) -> Self {
        CheckRow {
            name: name.into(),
            metric,
            estimate,
            target,
            error_bar,
            score,
            threshold,
            passed: score <= threshold,
        }
    }

    /// Statistical check, passing when `|estimate - target| <= threshold * error_bar`.
    pub fn z_score(name: impl Into<String>, estimate: f64, target: f64, error_bar: f64, threshold: f64) -> Self {
        let d = (estimate - target).abs();
        let score = if d == 0.0 {
            0.0
        } else if error_bar == 0.0 {
            f64::INFINITY
        } else {
            d / error_bar
        };
        Self::build(name, Metric::ZScore, estimate, target, error_bar, score, threshold)
    }

    pub fn from_estimate(name: impl Into<String>, e: &Estimate, target: f64, threshold: f64) -> Self {
        Self::z_score(name, e.mean, target, e.stderr, threshold)
    }

    /// Real and imaginary parts as two rows.
    pub fn from_complex_estimate(name: &str, e: &ComplexEstimate, target: Complex64, threshold: f64) -> [Self; 2] {
        [
            Self::z_score(format!("{name}.re"), e.mean.re, target.re, e.stderr_re, threshold),
            Self::z_score(format!("{name}.im"), e.mean.im, target.im, e.stderr_im, threshold),
        ]
    }

    /// Deterministic check with an absolute tolerance; `error_bar` is a known
    /// bound on numerical error in the estimate and is added to the tolerance.
    pub fn absolute(name: impl Into<String>, estimate: f64, target: f64, error_bar: f64, tolerance: f64) -> Self {
        let score = (estimate - target).abs();
        Self::build(name, Metric::Absolute, estimate, target, error_bar, score, tolerance + error_bar)
    }

    pub fn relative(name: impl Into<String>, estimate: f64, target: f64, tolerance: f64) -> Self {
        let score = if estimate == target { 0.0 } else { (estimate - target).abs() / target.abs() };
        Self::build(name, Metric::Relative, estimate, target, 0.0, score, tolerance)
    }

    /// `value <= ceiling`.
    pub fn at_most(name: impl Into<String>, value: f64, ceiling: f64) -> Self {
        Self::build(name, Metric::Bound, value, ceiling, 0.0, value, ceiling)
    }

    /// `value >= floor`, stored with negated score so `passed` stays `score <= threshold`.
    pub fn at_least(name: impl Into<String>, value: f64, floor: f64) -> Self {
        Self::build(name, Metric::Bound, value, floor, 0.0, -value, -floor)
    }

    pub fn flag(name: impl Into<String>, ok: bool) -> Self {
        Self::build(name, Metric::Flag, f64::from(u8::from(ok)), 1.0, 0.0, f64::from(u8::from(!ok)), 0.0)
    }
}

/// Output encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::config("format", format!("expected csv or json, got `{other}`"))),
        }
    }
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReportFormat::Json => "json",
            ReportFormat::Csv => "csv",
        })
    }
}

/// Structured result of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub experiment: String,
    pub version: String,
    pub seed: u64,
    pub inputs: BTreeMap<String, String>,
    pub rows: Vec<CheckRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_clock_seconds: Option<f64>,
}

impl VerificationReport {
    pub fn new(experiment: impl Into<String>, seed: u64) -> Self {
        VerificationReport {
            schema_version: SCHEMA_VERSION,
            experiment: experiment.into(),
            version: crate::VERSION.to_string(),
            seed,
            inputs: BTreeMap::new(),
            rows: Vec::new(),
            wall_clock_seconds: None,
        }
    }

    pub fn input(&mut self, key: &str, value: impl fmt::Display) -> &mut Self {
        self.inputs.insert(key.to_string(), value.to_string());
        self
    }

    pub fn push(&mut self, row: CheckRow) -> &mut Self {
        self.rows.push(row);
        self
    }

    pub fn extend(&mut self, rows: impl IntoIterator<Item = CheckRow>) -> &mut Self {
        self.rows.extend(rows);
        self
    }

    /// True iff every row passed.
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRow> {
        self.rows.iter().filter(|r| !r.passed)
    }

    pub fn row(&self, name: &str) -> Option<&CheckRow> {
        self.rows.iter().find(|r| r.name == name)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Io(e.to_string()))
    }

    /// One row per check; header only when there are no rows.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record([
            "experiment",
            "check",
            "metric",
            "estimate",
            "target",
            "error_bar",
            "score",
            "threshold",
            "passed",
        ])
        .map_err(io)?;
        for r in &self.rows {
            w.write_record([
                self.experiment.clone(),
                r.name.clone(),
                r.metric.as_str().to_string(),
                r.estimate.to_string(),
                r.target.to_string(),
                r.error_bar.to_string(),
                r.score.to_string(),
                r.threshold.to_string(),
                r.passed.to_string(),
            ])
            .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn render(&self, format: ReportFormat) -> Result<String> {
        match format {
            ReportFormat::Json => self.to_json(),
            ReportFormat::Csv => self.to_csv(),
        }
    }

    pub fn emit(&self, format: ReportFormat, path: &Path) -> Result<()> {
        let mut file = std::fs::File::create(path)?;
        file.write_all(self.render(format)?.as_bytes())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> VerificationReport {
        let mut r = VerificationReport::new("demo", 9);
        r.input("s", 1.0).input("n", 64);
        r.push(CheckRow::z_score("a", 1.0, 1.1, 0.05, 4.0));
        r.push(CheckRow::z_score("b", 1.0, 2.0, 0.0, 4.0));
        r.push(CheckRow::flag("c", true));
        r
    }

    #[test]
    fn empty_report_is_header_only_csv() {
        let r = VerificationReport::new("empty", 0);
        let csv = r.to_csv().unwrap();
        assert_eq!(csv.lines().count(), 1);
        assert!(csv.starts_with("experiment,check,"));
        assert!(r.passed());
    }

    #[test]
    fn json_roundtrips_with_infinite_scores() {
        let r = sample();
        assert_eq!(r.rows[1].score, f64::INFINITY);
        let back = VerificationReport::from_json(&r.to_json().unwrap()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn pass_fail_follows_rows() {
        let r = sample();
        assert!(!r.passed());
        assert_eq!(r.failures().count(), 1);
        assert!(r.row("a").unwrap().passed);
        let at_least = CheckRow::at_least("order", 1.2, 1.0);
        assert!(at_least.passed);
        assert!(!CheckRow::at_least("order", 0.8, 1.0).passed);
    }

    #[test]
    fn field_order_is_stable() {
        let json = sample().to_json().unwrap();
        let keys: Vec<usize> = ["schema_version", "experiment", "version", "seed", "inputs", "rows"]
            .iter()
            .map(|k| json.find(&format!("\"{k}\"")).unwrap())
            .collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
    }
}
