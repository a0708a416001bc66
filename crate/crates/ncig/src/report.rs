//! Check-report rows and their JSON-lines / CSV rendering.
//!
//! Floats are always rendered with 17 significant digits so a fixed seed
//! yields byte-identical reports.

use std::fmt::Write as _;

use crate::{Error, Result};

/// One row of a verification report.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub check: String,
    /// Order the check ran at, when it is p-specific.
    pub p: Option<f64>,
    /// α the check ran at, when it is α-specific.
    pub alpha: Option<f64>,
    /// Worst residual observed (inequality violation or identity defect).
    pub residual: f64,
    pub pass: bool,
}

impl CheckRow {
    pub fn new(
        check: impl Into<String>,
        p: Option<f64>,
        alpha: Option<f64>,
        residual: f64,
        tolerance: f64,
    ) -> Self {
        Self { check: check.into(), p, alpha, residual, pass: residual <= tolerance }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::Domain(format!("unknown report format: {other}"))),
        }
    }
}

/// 17-significant-digit decimal rendering of a float.
pub fn fmt_float(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_float).unwrap_or_default()
}

/// Renders rows in the chosen format; JSON is one object per line.
pub fn render_rows(rows: &[CheckRow], format: ReportFormat) -> String {
    let mut out = String::new();
    match format {
        ReportFormat::Json => {
            for r in rows {
                let p = r.p.map(fmt_float).unwrap_or_else(|| "null".into());
                let alpha = r.alpha.map(fmt_float).unwrap_or_else(|| "null".into());
                let _ = writeln!(
                    out,
                    "{{\"check\":\"{}\",\"p\":{},\"alpha\":{},\"residual\":{},\"pass\":{}}}",
                    r.check,
                    p,
                    alpha,
                    fmt_float(r.residual),
                    r.pass
                );
            }
        }
        ReportFormat::Csv => {
            let _ = writeln!(out, "check,p,alpha,residual,pass");
            for r in rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    r.check,
                    fmt_opt(r.p),
                    fmt_opt(r.alpha),
                    fmt_float(r.residual),
                    r.pass
                );
            }
        }
    }
    out
}

/// Sorts rows into the canonical report order: by check name, then order,
/// then α.
pub fn sort_rows(rows: &mut [CheckRow]) {
    rows.sort_by(|a, b| {
        a.check
            .cmp(&b.check)
            .then_with(|| cmp_opt(a.p, b.p))
            .then_with(|| cmp_opt(a.alpha, b.alpha))
    });
}

fn cmp_opt(a: Option<f64>, b: Option<f64>) -> std::cmp::Ordering {
    match (a, b) {
        (None, None) => std::cmp::Ordering::Equal,
        (None, Some(_)) => std::cmp::Ordering::Less,
        (Some(_), None) => std::cmp::Ordering::Greater,
        (Some(x), Some(y)) => x.partial_cmp(&y).unwrap_or(std::cmp::Ordering::Equal),
    }
}
