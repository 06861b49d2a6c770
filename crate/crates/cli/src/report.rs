//! Run records and the three report renderings (CSV, JSON, table).
//!
//! The same `RunRecord` values feed every format, and numbers are written
//! with shortest-round-trip formatting, so records parsed back from the CSV
//! and JSON reports of one invocation are value-identical.

use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub instance: String,
    pub algorithm: String,
    pub fit: String,
    pub objective: f64,
    pub runtime_s: f64,
    pub rounds: u32,
    pub exit: String,
}

pub const CSV_HEADER: &str = "instance,algorithm,fit,objective,runtime_s,rounds,exit";

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv_row(r: &RunRecord) -> String {
    format!(
        "{},{},{},{},{},{},{}",
        csv_field(&r.instance),
        csv_field(&r.algorithm),
        csv_field(&r.fit),
        r.objective,
        r.runtime_s,
        r.rounds,
        csv_field(&r.exit)
    )
}

/// CSV report: header, one row per record, then any per-instance errors as
/// trailing `#` comment lines (so the data section stays machine-readable).
pub fn csv_report(records: &[RunRecord], errors: &[String]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&csv_row(r));
        out.push('\n');
    }
    for e in errors {
        out.push_str("# error: ");
        out.push_str(e);
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct JsonReport<'a> {
    records: &'a [RunRecord],
    errors: &'a [String],
}

pub fn json_report(records: &[RunRecord], errors: &[String]) -> String {
    let mut s = serde_json::to_string_pretty(&JsonReport { records, errors })
        .expect("report serialization cannot fail");
    s.push('\n');
    s
}

pub fn json_record(r: &RunRecord) -> String {
    let mut s = serde_json::to_string_pretty(r).expect("record serialization cannot fail");
    s.push('\n');
    s
}

/// Fixed-width listing for terminals, objective and runtime to a readable
/// precision (the CSV/JSON reports carry the exact values).
pub fn table_report(records: &[RunRecord]) -> String {
    let name_w = records.iter().map(|r| r.instance.len()).max().unwrap_or(8).max("instance".len());
    let algo_w = records.iter().map(|r| r.algorithm.len()).max().unwrap_or(4).max("algorithm".len());
    let mut out = format!(
        "{:<name_w$}  {:<algo_w$}  {:<5}  {:>14}  {:>10}  {:>6}  {}\n",
        "instance", "algorithm", "fit", "objective", "runtime_s", "rounds", "exit"
    );
    for r in records {
        out.push_str(&format!(
            "{:<name_w$}  {:<algo_w$}  {:<5}  {:>14.4}  {:>10.3}  {:>6}  {}\n",
            r.instance, r.algorithm, r.fit, r.objective, r.runtime_s, r.rounds, r.exit
        ));
    }
    out
}
