//! Report bundles rendered as TSV, markdown or JSON.
//!
//! A report is a list of tables. Each table carries the signature of the
//! metric that produced its numbers, and every renderer prints it.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::detect::ErrorRatios;
use crate::error::{Error, Result};
use crate::textio;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Text(String),
    Missing(()),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Num(v as f64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Missing(()), Into::into)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub signature: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, signature: &str, columns: &[&str]) -> Self {
        Table {
            name: name.to_string(),
            signature: signature.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::InvalidArgument(format!(
                "table {}: row has {} cells, expected {}",
                self.name,
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub title: String,
    /// Digest of the configuration that produced the report, when known.
    #[serde(default)]
    pub config_digest: Option<String>,
    pub tables: Vec<Table>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Tsv,
    Markdown,
    Json,
}

impl ReportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Tsv => "tsv",
            ReportFormat::Markdown => "md",
            ReportFormat::Json => "json",
        }
    }
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tsv" => Ok(ReportFormat::Tsv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::InvalidArgument(format!("unknown report format {other:?}"))),
        }
    }
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReportFormat::Tsv => "tsv",
            ReportFormat::Markdown => "markdown",
            ReportFormat::Json => "json",
        })
    }
}

fn cell_text(c: &Cell, decimals: usize) -> String {
    match c {
        Cell::Num(v) if v.fract() == 0.0 && v.abs() < 1e15 => format!("{}", *v as i64),
        Cell::Num(v) => textio::fmt_f64(*v, decimals),
        Cell::Text(s) => s.clone(),
        Cell::Missing(()) => String::new(),
    }
}

pub const DECIMALS: usize = 4;

pub fn render(report: &Report, format: ReportFormat) -> Result<String> {
    Ok(match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(report)?;
            s.push('\n');
            s
        }
        ReportFormat::Tsv => {
            let mut out = format!("# {}\n", report.title);
            if let Some(d) = &report.config_digest {
                out.push_str(&format!("# config sha256 {d}\n"));
            }
            for t in &report.tables {
                out.push_str(&format!("\n# table: {}\n# signature: {}\n", t.name, t.signature));
                out.push_str(&t.columns.join("\t"));
                out.push('\n');
                for r in &t.rows {
                    let cells: Vec<String> = r.iter().map(|c| cell_text(c, DECIMALS)).collect();
                    out.push_str(&cells.join("\t"));
                    out.push('\n');
                }
            }
            out
        }
        ReportFormat::Markdown => {
            let mut out = format!("# {}\n", report.title);
            if let Some(d) = &report.config_digest {
                out.push_str(&format!("\nConfig sha256: `{d}`\n"));
            }
            for t in &report.tables {
                out.push_str(&format!("\n## {}\n\nSignature: `{}`\n\n", t.name, t.signature));
                out.push_str(&format!("| {} |\n", t.columns.join(" | ")));
                out.push_str(&format!("|{}\n", "---|".repeat(t.columns.len())));
                for r in &t.rows {
                    let cells: Vec<String> = r
                        .iter()
                        .map(|c| cell_text(c, DECIMALS).replace('|', "\\|"))
                        .collect();
                    out.push_str(&format!("| {} |\n", cells.join(" | ")));
                }
            }
            out
        }
    })
}

/// Writes `<stem>.<ext>` for each requested format and returns the paths.
pub fn emit_report(report: &Report, formats: &[ReportFormat], dir: &Path, stem: &str) -> Result<Vec<std::path::PathBuf>> {
    formats
        .iter()
        .map(|&f| {
            let path = dir.join(format!("{stem}.{}", f.extension()));
            textio::write_file(&path, render(report, f)?.as_bytes())?;
            Ok(path)
        })
        .collect()
}

/// Plot data for error ratios against training-set breadth.
pub fn error_trend_tsv(points: &[(String, usize, ErrorRatios)]) -> String {
    let mut out = String::from("system\tn_language_pairs\tsc\tot\tou\toh\tany\n");
    for (system, n, r) in points {
        out.push_str(&format!(
            "{system}\t{n}\t{}\t{}\t{}\t{}\t{}\n",
            textio::fmt_f64(r.sc, 4),
            textio::fmt_f64(r.ot, 4),
            textio::fmt_f64(r.ou, 4),
            textio::fmt_f64(r.oh, 4),
            textio::fmt_f64(r.any, 4)
        ));
    }
    out
}
