//! Report rendering. JSON keys come out sorted because `serde_json::Map`
//! is ordered, and no timestamps are written, so identical inputs give
//! identical bytes.

use anyhow::Result;
use sedf_core::rules::{BatteryReport, Outcome, Verdict};
use serde::Serialize;
use serde_json::Value;

pub fn report_json(report: &BatteryReport) -> Result<Value> {
    Ok(serde_json::to_value(report)?)
}

/// One scan row; the CSV column order is the field order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Row {
    pub v: u64,
    pub m: u64,
    pub k: u64,
    pub lambda: u64,
    pub scope: String,
    pub overall: String,
    pub firing_rules: String,
    pub witness_summary: String,
}

pub const CSV_HEADER: [&str; 8] = [
    "v",
    "m",
    "k",
    "lambda",
    "scope",
    "overall",
    "firing_rules",
    "witness_summary",
];

pub fn row_of(report: &BatteryReport) -> Row {
    let p = report.params;
    Row {
        v: p.v,
        m: p.m,
        k: p.k,
        lambda: p.lambda,
        scope: report.scope.to_string(),
        overall: report.overall.to_string(),
        firing_rules: report
            .firing_rules()
            .iter()
            .map(|r| r.as_str())
            .collect::<Vec<_>>()
            .join(";"),
        witness_summary: witness_summary(report),
    }
}

fn fired(v: &Verdict) -> Option<String> {
    (v.outcome == Outcome::RuledOut)
        .then(|| v.witness.as_ref().map(|w| format!("{}: {w}", v.rule)))
        .flatten()
}

/// The first parameter-level witness, or else a per-group account.
pub fn witness_summary(report: &BatteryReport) -> String {
    if let Some(s) = report.verdicts.iter().find_map(fired) {
        return s;
    }
    let excluded: Vec<String> = report
        .groups
        .iter()
        .filter_map(|g| g.verdicts.iter().find_map(fired).map(|s| format!("[{}] {s}", g.group)))
        .collect();
    if excluded.is_empty() {
        return String::new();
    }
    let total = report.groups.len();
    let first = &excluded[0];
    if excluded.len() == 1 && total == 1 {
        first.clone()
    } else {
        format!("{}/{} groups excluded; first {first}", excluded.len(), total)
    }
}

pub fn rows_to_csv(rows: &[Row]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record(CSV_HEADER)?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn rows_to_json(rows: &[Row]) -> Result<String> {
    let v = serde_json::to_value(rows)?;
    Ok(serde_json::to_string_pretty(&v)? + "\n")
}
