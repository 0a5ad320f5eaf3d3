//! RunRecord emitters. Floats use the shortest round-trip formatting in
//! both CSV and JSON, so the two agree bit for bit after parsing.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use mixprofile::ProfilePoint;
use serde::Serialize;

pub const BUILD_ID: &str = env!("MIXPROFILE_BUILD_ID");
pub const COLUMNS: [&str; 7] = ["c", "t", "exact_tv", "main_term", "error_term", "limit_value", "gap"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format '{other}' (csv or json)")),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Header {
    pub command: String,
    pub params: BTreeMap<String, String>,
    pub build: String,
    pub mode: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub c: f64,
    pub t: u64,
    pub exact_tv: f64,
    pub main_term: f64,
    pub error_term: f64,
    pub limit_value: f64,
    pub gap: f64,
}

impl From<&ProfilePoint> for Row {
    fn from(p: &ProfilePoint) -> Self {
        Row {
            c: p.c,
            t: p.t,
            exact_tv: p.exact_tv,
            main_term: p.main_term,
            error_term: p.error_term,
            limit_value: p.limit_value,
            gap: p.limit_gap(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunRecord<R: Serialize> {
    pub header: Header,
    pub rows: Vec<R>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub footer: Vec<String>,
}

/// RFC-4180 field quoting.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn header_lines(h: &Header) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# command,{}", csv_field(&h.command));
    let _ = writeln!(out, "# build,{}", csv_field(&h.build));
    let _ = writeln!(out, "# mode,{}", csv_field(&h.mode));
    if let Some(s) = h.seed {
        let _ = writeln!(out, "# seed,{s}");
    }
    for (k, v) in &h.params {
        let _ = writeln!(out, "# param,{},{}", csv_field(k), csv_field(v));
    }
    out
}

pub fn profile_csv(rec: &RunRecord<Row>) -> String {
    let mut out = header_lines(&rec.header);
    out.push_str(&COLUMNS.join(","));
    out.push('\n');
    for r in &rec.rows {
        let _ = writeln!(
            out,
            "{:?},{},{:?},{:?},{:?},{:?},{:?}",
            r.c, r.t, r.exact_tv, r.main_term, r.error_term, r.limit_value, r.gap
        );
    }
    for f in &rec.footer {
        let _ = writeln!(out, "# {f}");
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct HistogramRow {
    pub value: usize,
    pub count: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<f64>,
}

pub fn histogram_csv(rec: &RunRecord<HistogramRow>) -> String {
    let mut out = header_lines(&rec.header);
    out.push_str("value,count,expected\n");
    for r in &rec.rows {
        let e = r.expected.map(|v| format!("{v:?}")).unwrap_or_default();
        let _ = writeln!(out, "{},{},{}", r.value, r.count, e);
    }
    for f in &rec.footer {
        let _ = writeln!(out, "# {}", csv_field(f));
    }
    out
}

pub fn to_json<R: Serialize>(rec: &RunRecord<R>) -> String {
    let mut s = serde_json::to_string_pretty(rec).expect("run records serialise");
    s.push('\n');
    s
}
