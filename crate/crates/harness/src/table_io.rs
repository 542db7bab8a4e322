//! Result tables on disk.
//!
//! CSV files carry `# key: value` metadata lines above the header:
//!
//! ```text
//! # scenario: log-0.9-p0.5-stationary
//! # runs: 1000
//! # seed: 1
//! method,alpha,beta,mase,mmr,u2
//! CR,0.1,0.1,0.0186127,1.22887,0.717601
//! ```
//!
//! Values are written with six significant digits. Reading ignores any other
//! `#` line, so the bundled reference tables parse with the same code.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use hesmooth_core::{Method, ResultRow, ResultTable, RowKey};
use serde::Deserialize;

use crate::CliError;

pub const TABLE_HEADER: [&str; 6] = ["method", "alpha", "beta", "mase", "mmr", "u2"];
pub const COMPARISON_HEADER: [&str; 9] = [
    "dist_param",
    "p0",
    "selection",
    "alpha_tsb",
    "beta_tsb",
    "alpha_hes",
    "beta_hes",
    "rgrmse",
    "pb",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Markdown,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Markdown => "md",
        }
    }
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "markdown" | "md" => Ok(Format::Markdown),
            _ => Err(CliError::usage(format!(
                "format `{s}`: expected csv or markdown"
            ))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Markdown => "markdown",
        })
    }
}

/// `x` rounded to six significant digits, without trailing zeros.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    let s = if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    };
    if s == "-0" {
        "0".to_string()
    } else {
        s
    }
}

/// Plain rows under a header, as CSV or a markdown table.
pub fn write_records(header: &[&str], rows: &[Vec<String>], format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Csv => {
            out.push_str(&header.join(","));
            out.push('\n');
            for row in rows {
                out.push_str(&row.join(","));
                out.push('\n');
            }
        }
        Format::Markdown => {
            out.push_str(&format!("| {} |\n", header.join(" | ")));
            out.push_str(&format!("|{}\n", "---|".repeat(header.len())));
            for row in rows {
                out.push_str(&format!("| {} |\n", row.join(" | ")));
            }
        }
    }
    out
}

pub fn write_table(table: &ResultTable, format: Format) -> String {
    let rows: Vec<Vec<String>> = table
        .rows
        .iter()
        .map(|r| {
            vec![
                r.key.method.name().to_string(),
                format!("{}", r.key.alpha),
                format!("{}", r.key.beta),
                sig6(r.mase),
                sig6(r.mmr),
                sig6(r.u2),
            ]
        })
        .collect();
    let mut meta = Vec::new();
    if let Some(id) = &table.scenario_id {
        meta.push(format!("scenario: {id}"));
    }
    if let Some(runs) = table.runs {
        meta.push(format!("runs: {runs}"));
    }
    if let Some(seed) = table.seed {
        meta.push(format!("seed: {seed}"));
    }
    if table.issue_only {
        meta.push("issue_only: true".to_string());
    }
    let mut out = String::new();
    match format {
        Format::Csv => {
            for line in &meta {
                out.push_str(&format!("# {line}\n"));
            }
        }
        Format::Markdown => {
            for line in &meta {
                out.push_str(&format!("- {line}\n"));
            }
            if !meta.is_empty() {
                out.push('\n');
            }
        }
    }
    out.push_str(&write_records(&TABLE_HEADER, &rows, format));
    out
}

#[derive(Debug, Deserialize)]
struct RawRow {
    method: String,
    alpha: f64,
    beta: f64,
    mase: f64,
    mmr: f64,
    u2: f64,
}

fn parse_error(source_name: &str, line: u64, message: impl Into<String>) -> CliError {
    CliError::Parse {
        source_name: source_name.to_string(),
        line,
        message: message.into(),
    }
}

fn csv_error(source_name: &str, err: &csv::Error) -> CliError {
    let line = err.position().map_or(0, csv::Position::line);
    let message = match err.kind() {
        csv::ErrorKind::Deserialize { err, .. } => err.to_string(),
        _ => err.to_string(),
    };
    parse_error(source_name, line, message)
}

/// `key: value` pairs from the leading `#` lines.
fn metadata(text: &str) -> Vec<(u64, String, String)> {
    text.lines()
        .enumerate()
        .filter_map(|(i, line)| {
            let body = line.trim().strip_prefix('#')?;
            let (key, value) = body.split_once(':')?;
            Some((
                i as u64 + 1,
                key.trim().to_string(),
                value.trim().to_string(),
            ))
        })
        .collect()
}

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes())
}

fn check_header(
    source_name: &str,
    rdr: &mut csv::Reader<&[u8]>,
    expected: &[&str],
) -> Result<(), CliError> {
    let header = rdr
        .headers()
        .map_err(|e| csv_error(source_name, &e))?
        .clone();
    let line = header.position().map_or(1, csv::Position::line);
    let found: Vec<&str> = header.iter().collect();
    if found != expected {
        return Err(parse_error(
            source_name,
            line,
            format!(
                "expected header `{}`, found `{}`",
                expected.join(","),
                found.join(",")
            ),
        ));
    }
    Ok(())
}

/// Parses a result or reference table. `source_name` labels errors.
pub fn read_table(text: &str, source_name: &str) -> Result<ResultTable, CliError> {
    let mut table = ResultTable::default();
    for (line, key, value) in metadata(text) {
        let bad = |what: &str| parse_error(source_name, line, format!("bad {what} `{value}`"));
        match key.as_str() {
            "scenario" => table.scenario_id = Some(value.clone()),
            "runs" => table.runs = Some(value.parse().map_err(|_| bad("run count"))?),
            "seed" => table.seed = Some(value.parse().map_err(|_| bad("seed"))?),
            "issue_only" => table.issue_only = value.parse().map_err(|_| bad("flag"))?,
            _ => {}
        }
    }
    let mut rdr = reader(text);
    check_header(source_name, &mut rdr, &TABLE_HEADER)?;
    let header = rdr
        .headers()
        .map_err(|e| csv_error(source_name, &e))?
        .clone();
    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(source_name, &e))?;
        let line = record.position().map_or(0, csv::Position::line);
        let raw: RawRow = record
            .deserialize(Some(&header))
            .map_err(|e| csv_error(source_name, &e))?;
        let method: Method = raw
            .method
            .parse()
            .map_err(|e| parse_error(source_name, line, format!("{e}")))?;
        let key = RowKey::new(method, raw.alpha, raw.beta);
        if table.get(&key).is_some() {
            return Err(parse_error(
                source_name,
                line,
                format!("duplicate row {method} {} {}", raw.alpha, raw.beta),
            ));
        }
        table.rows.push(ResultRow {
            key,
            mase: raw.mase,
            mmr: raw.mmr,
            u2: raw.u2,
            mase_abs: None,
        });
    }
    if table.rows.is_empty() {
        return Err(parse_error(source_name, 0, "no rows"));
    }
    Ok(table)
}

pub fn read_table_file(path: &Path) -> Result<ResultTable, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    read_table(&text, &path.display().to_string())
}

/// One line of a head-to-head comparison table.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct ComparisonRow {
    /// Size-distribution parameter as printed.
    pub dist_param: f64,
    pub p0: f64,
    /// `mmr` or `u2`.
    pub selection: String,
    pub alpha_tsb: f64,
    pub beta_tsb: f64,
    pub alpha_hes: f64,
    pub beta_hes: f64,
    pub rgrmse: f64,
    pub pb: f64,
}

impl ComparisonRow {
    pub fn to_fields(&self) -> Vec<String> {
        vec![
            format!("{}", self.dist_param),
            format!("{}", self.p0),
            self.selection.clone(),
            format!("{}", self.alpha_tsb),
            format!("{}", self.beta_tsb),
            format!("{}", self.alpha_hes),
            format!("{}", self.beta_hes),
            sig6(self.rgrmse),
            sig6(self.pb),
        ]
    }
}

pub fn read_comparison(text: &str, source_name: &str) -> Result<Vec<ComparisonRow>, CliError> {
    let mut rdr = reader(text);
    check_header(source_name, &mut rdr, &COMPARISON_HEADER)?;
    let header = rdr
        .headers()
        .map_err(|e| csv_error(source_name, &e))?
        .clone();
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(source_name, &e))?;
        let row: ComparisonRow = record
            .deserialize(Some(&header))
            .map_err(|e| csv_error(source_name, &e))?;
        if row.selection != "mmr" && row.selection != "u2" {
            return Err(parse_error(
                source_name,
                record.position().map_or(0, csv::Position::line),
                format!("selection `{}`: expected mmr or u2", row.selection),
            ));
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn write_comparison(rows: &[ComparisonRow], format: Format) -> String {
    let fields: Vec<Vec<String>> = rows.iter().map(ComparisonRow::to_fields).collect();
    write_records(&COMPARISON_HEADER, &fields, format)
}
