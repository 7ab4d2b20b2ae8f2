//! Result tables in markdown, CSV and JSON.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use simtom_core::metrics::{columns, diff, format_hundredths, hundredths, Delta, Tally};
use simtom_core::{Benchmark, Metrics, ReportRow, ScoreError};

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("unknown report format {0} (expected markdown, csv or json)")]
    UnknownFormat(String),
    #[error("malformed report: {0}")]
    Malformed(String),
    #[error(transparent)]
    Score(#[from] ScoreError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Markdown,
    Csv,
    Json,
}

impl Format {
    pub fn parse(s: &str) -> Result<Self, ReportError> {
        match s.to_ascii_lowercase().as_str() {
            "markdown" | "md" => Ok(Format::Markdown),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(ReportError::UnknownFormat(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub row: ReportRow,
    pub per_type: BTreeMap<String, Tally>,
    /// Items whose backend call failed; not part of any accuracy.
    pub errored: usize,
}

impl Report {
    pub fn new(label: &str, metrics: &Metrics, errored: usize) -> Self {
        Report { row: metrics.report_row(label), per_type: metrics.per_type.clone(), errored }
    }
}

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |v| format_hundredths(hundredths(v)))
}

pub fn to_markdown(report: &Report) -> String {
    let row = &report.row;
    let names: Vec<&str> = row.columns.iter().map(|(n, _)| n.as_str()).collect();
    let mut out = format!("| method | {} |\n", names.join(" | "));
    out.push_str(&format!("|---|{}\n", "---:|".repeat(names.len())));
    let cells: Vec<String> = row.columns.iter().map(|(_, v)| cell(*v)).collect();
    out.push_str(&format!("| {} | {} |\n", row.label, cells.join(" | ")));
    out.push_str("\n| question type | correct | total | accuracy |\n|---|---:|---:|---:|\n");
    for (qtype, t) in &report.per_type {
        out.push_str(&format!("| {qtype} | {} | {} | {} |\n", t.correct, t.total, cell(t.accuracy())));
    }
    if report.errored > 0 {
        out.push_str(&format!("\n{} errored item(s) excluded.\n", report.errored));
    }
    out
}

pub fn to_csv(row: &ReportRow) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["method".to_string(), "benchmark".to_string()];
    header.extend(row.columns.iter().map(|(n, _)| n.clone()));
    w.write_record(&header).expect("in-memory csv");
    let mut values = vec![row.label.clone(), row.benchmark.as_str().to_string()];
    values.extend(row.columns.iter().map(|(_, v)| v.map(|v| format_hundredths(hundredths(v))).unwrap_or_default()));
    w.write_record(&values).expect("in-memory csv");
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8")
}

pub fn from_csv(text: &str) -> Result<ReportRow, ReportError> {
    let bad = |m: &str| ReportError::Malformed(m.to_string());
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().map_err(|e| bad(&e.to_string()))?.clone();
    let record = r.records().next().ok_or_else(|| bad("no data row"))?.map_err(|e| bad(&e.to_string()))?;
    let benchmark = Benchmark::parse(record.get(1).unwrap_or("")).ok_or_else(|| bad("unknown benchmark"))?;
    let expected = columns(benchmark);
    let names: Vec<&str> = header.iter().skip(2).collect();
    if names != expected {
        return Err(bad("column layout does not match the benchmark"));
    }
    let mut cols = Vec::new();
    for (name, v) in names.iter().zip(record.iter().skip(2)) {
        let value = if v.is_empty() { None } else { Some(v.parse::<f64>().map_err(|e| bad(&e.to_string()))?) };
        cols.push((name.to_string(), value));
    }
    Ok(ReportRow { label: record.get(0).unwrap_or("").to_string(), benchmark, columns: cols })
}

pub fn to_json(report: &Report) -> String {
    serde_json::to_string_pretty(report).expect("reports serialize") + "\n"
}

pub fn from_json(text: &str) -> Result<Report, ReportError> {
    serde_json::from_str(text).map_err(|e| ReportError::Malformed(e.to_string()))
}

pub fn emit(report: &Report, format: Format) -> String {
    match format {
        Format::Markdown => to_markdown(report),
        Format::Csv => to_csv(&report.row),
        Format::Json => to_json(report),
    }
}

/// `b - a` per column, as a markdown table.
pub fn diff_table(a: &ReportRow, b: &ReportRow) -> Result<(Vec<Delta>, String), ReportError> {
    let deltas = diff(a, b)?;
    let mut out = format!("| column | {} | {} | delta |\n|---|---:|---:|---:|\n", a.label, b.label);
    for d in &deltas {
        out.push_str(&format!(
            "| {} | {} | {} | {} |\n",
            d.column,
            cell(a.get(&d.column)),
            cell(b.get(&d.column)),
            d.display
        ));
    }
    Ok((deltas, out))
}
