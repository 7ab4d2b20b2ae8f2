//! Accuracy per question type and the fb / tb / all aggregates.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::corpus::{BeliefKind, Benchmark, BigTomAxis, BigTomQuestion, Order, QuestionType, TomiQuestion};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScoreError {
    #[error("no results to score")]
    Empty,
    #[error("results mix ToMI and BigTOM question types")]
    MixedBenchmarks,
    #[error("cannot compare a {0} report with a {1} report")]
    BenchmarkMismatch(Benchmark, Benchmark),
    #[error("unknown column {0}")]
    UnknownColumn(String),
}

pub const TOMI_COLUMNS: [&str; 8] = ["fb", "all", "tb", "fo-nt", "fo-t", "so-nt", "so-t", "mem-real"];
pub const BIGTOM_COLUMNS: [&str; 7] = ["fb", "all", "tb", "action-fb", "action-tb", "belief-fb", "belief-tb"];

pub fn columns(benchmark: Benchmark) -> &'static [&'static str] {
    match benchmark {
        Benchmark::Tomi => &TOMI_COLUMNS,
        Benchmark::BigTom => &BIGTOM_COLUMNS,
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub correct: u32,
    pub total: u32,
}

impl Tally {
    pub fn accuracy(self) -> Option<f64> {
        (self.total > 0).then(|| f64::from(self.correct) / f64::from(self.total) * 100.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub benchmark: Benchmark,
    /// Keyed by question-type label.
    pub per_type: BTreeMap<String, Tally>,
}

/// One line of a results table: the benchmark's columns in display order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub label: String,
    pub benchmark: Benchmark,
    pub columns: Vec<(String, Option<f64>)>,
}

fn mean(values: &[Option<f64>]) -> Option<f64> {
    let present: Vec<f64> = values.iter().flatten().copied().collect();
    (!present.is_empty()).then(|| present.iter().sum::<f64>() / present.len() as f64)
}

/// Scores `(question type, correct)` outcomes.
pub fn score<I>(outcomes: I) -> Result<Metrics, ScoreError>
where
    I: IntoIterator<Item = (QuestionType, bool)>,
{
    let mut benchmark = None;
    let mut per_type: BTreeMap<String, Tally> = BTreeMap::new();
    for (qtype, correct) in outcomes {
        match benchmark {
            None => benchmark = Some(qtype.benchmark()),
            Some(b) if b != qtype.benchmark() => return Err(ScoreError::MixedBenchmarks),
            _ => {}
        }
        let tally = per_type.entry(qtype.label()).or_default();
        tally.total += 1;
        tally.correct += u32::from(correct);
    }
    let benchmark = benchmark.ok_or(ScoreError::Empty)?;
    Ok(Metrics { benchmark, per_type })
}

impl Metrics {
    pub fn accuracy(&self, qtype: QuestionType) -> Option<f64> {
        self.per_type.get(&qtype.label()).and_then(|t| t.accuracy())
    }

    pub fn total(&self) -> u32 {
        self.per_type.values().map(|t| t.total).sum()
    }

    /// The per-type columns of the results table, before aggregation.
    pub fn base_columns(&self) -> Vec<Option<f64>> {
        let acc = |q| self.accuracy(q);
        match self.benchmark {
            Benchmark::Tomi => {
                let belief = |order, belief, tom| acc(QuestionType::Tomi(TomiQuestion::Belief { order, belief, tom }));
                let (tb, fb) = (BeliefKind::TrueBelief, BeliefKind::FalseBelief);
                let (fo, so) = (Order::First, Order::Second);
                alloc::vec![
                    mean(&[belief(fo, tb, false), belief(fo, fb, false)]),
                    mean(&[belief(fo, tb, true), belief(fo, fb, true)]),
                    mean(&[belief(so, tb, false), belief(so, fb, false)]),
                    mean(&[belief(so, tb, true), belief(so, fb, true)]),
                    mean(&[
                        acc(QuestionType::Tomi(TomiQuestion::Memory)),
                        acc(QuestionType::Tomi(TomiQuestion::Reality)),
                    ]),
                ]
            }
            Benchmark::BigTom => {
                let q = |axis, belief| acc(QuestionType::BigTom(BigTomQuestion { axis, belief }));
                alloc::vec![
                    q(BigTomAxis::ForwardAction, BeliefKind::FalseBelief),
                    q(BigTomAxis::ForwardAction, BeliefKind::TrueBelief),
                    q(BigTomAxis::ForwardBelief, BeliefKind::FalseBelief),
                    q(BigTomAxis::ForwardBelief, BeliefKind::TrueBelief),
                ]
            }
        }
    }

    pub fn report_row(&self, label: &str) -> ReportRow {
        ReportRow::from_base(self.benchmark, label, &self.base_columns())
    }
}

impl ReportRow {
    /// Builds a row from the per-type columns in table order
    /// (`fo-nt, fo-t, so-nt, so-t, mem-real` or
    /// `action-fb, action-tb, belief-fb, belief-tb`).
    ///
    /// For ToMI every base column averages the same number of question
    /// types, so `all` over the columns equals `all` over the ten types.
    pub fn from_base(benchmark: Benchmark, label: &str, base: &[Option<f64>]) -> Self {
        let get = |i: usize| base.get(i).copied().flatten();
        let (fb, tb) = match benchmark {
            Benchmark::Tomi => (mean(&[get(1), get(3)]), mean(&[get(0), get(2)])),
            Benchmark::BigTom => (mean(&[get(0), get(2)]), mean(&[get(1), get(3)])),
        };
        let all = mean(base);
        let names = columns(benchmark);
        let mut values = alloc::vec![fb, all, tb];
        values.extend(base.iter().copied());
        values.resize(names.len(), None);
        ReportRow {
            label: label.to_string(),
            benchmark,
            columns: names.iter().map(|n| n.to_string()).zip(values).collect(),
        }
    }

    pub fn get(&self, column: &str) -> Option<f64> {
        self.columns.iter().find(|(n, _)| n == column).and_then(|(_, v)| *v)
    }

    /// The per-type columns, in the order `from_base` takes them.
    pub fn base(&self) -> Vec<Option<f64>> {
        self.columns.iter().skip(3).map(|(_, v)| *v).collect()
    }
}

/// A value as printed in a report: hundredths, rounded half away from zero.
pub fn hundredths(value: f64) -> i64 {
    libm_round(value * 100.0)
}

fn libm_round(x: f64) -> i64 {
    // `f64::round` lives in std; this is the same rule for the value range
    // accuracies take.
    let t = x as i64;
    let frac = x - t as f64;
    if frac >= 0.5 {
        t + 1
    } else if frac <= -0.5 {
        t - 1
    } else {
        t
    }
}

/// Formats a hundredths count to two decimals.
pub fn format_hundredths(h: i64) -> String {
    let sign = if h < 0 { "-" } else { "" };
    let a = h.unsigned_abs();
    format!("{sign}{}.{:02}", a / 100, a % 100)
}

/// Signed one-decimal rendering of a difference in hundredths, ties to even.
pub fn format_delta(h: i64) -> String {
    let a = h.unsigned_abs();
    let (q, r) = (a / 10, a % 10);
    let tenths = if r > 5 || (r == 5 && q % 2 == 1) { q + 1 } else { q };
    let sign = if h < 0 && tenths > 0 { "-" } else { "+" };
    format!("{sign}{}.{}", tenths / 10, tenths % 10)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Delta {
    pub column: String,
    /// `b - a` in hundredths, from the two-decimal values.
    pub hundredths: Option<i64>,
    pub display: String,
}

/// Cell-wise `b - a` on the values as reported to two decimals.
pub fn diff(a: &ReportRow, b: &ReportRow) -> Result<Vec<Delta>, ScoreError> {
    if a.benchmark != b.benchmark {
        return Err(ScoreError::BenchmarkMismatch(a.benchmark, b.benchmark));
    }
    Ok(columns(a.benchmark)
        .iter()
        .map(|&column| {
            let h = match (a.get(column), b.get(column)) {
                (Some(x), Some(y)) => Some(hundredths(y) - hundredths(x)),
                _ => None,
            };
            Delta {
                column: column.to_string(),
                hundredths: h,
                display: h.map_or_else(|| "n/a".to_string(), format_delta),
            }
        })
        .collect())
}
