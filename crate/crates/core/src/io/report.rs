use std::fmt::{self, Write as _};
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportFormat {
    Csv,
    Markdown,
    JsonLines,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            "json-lines" | "jsonl" => Ok(ReportFormat::JsonLines),
            other => Err(Error::InvalidConfig(format!("unknown report format {other:?}"))),
        }
    }
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReportFormat::Csv => "csv",
            ReportFormat::Markdown => "markdown",
            ReportFormat::JsonLines => "json-lines",
        })
    }
}

/// One (metric, segment) line. Missing correlations render as empty/null.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub metric_id: String,
    pub segment: String,
    pub pearson: Option<f64>,
    pub spearman: Option<f64>,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub format: ReportFormat,
    pub rows: Vec<ReportRow>,
}

const HEADER: [&str; 5] = ["metric", "segment", "pearson", "spearman", "n"];

/// Four decimals, ties to even on the exact binary value; never prints `-0.0000`.
pub fn fixed4(value: f64) -> String {
    let s = format!("{value:.4}");
    if s == "-0.0000" {
        "0.0000".into()
    } else {
        s
    }
}

fn cell(value: Option<f64>) -> String {
    value.map(fixed4).unwrap_or_default()
}

impl ReportDocument {
    pub fn new(format: ReportFormat) -> Self {
        Self {
            format,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: ReportRow) {
        self.rows.push(row);
    }

    pub fn render(&self) -> Result<String> {
        match self.format {
            ReportFormat::Csv => self.render_csv(),
            ReportFormat::Markdown => Ok(self.render_markdown()),
            ReportFormat::JsonLines => Ok(self.render_json_lines()),
        }
    }

    fn render_csv(&self) -> Result<String> {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::CRLF)
            .from_writer(Vec::new());
        let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
        writer.write_record(HEADER).map_err(csv_err)?;
        for row in &self.rows {
            writer
                .write_record([
                    row.metric_id.clone(),
                    row.segment.clone(),
                    cell(row.pearson),
                    cell(row.spearman),
                    row.n.to_string(),
                ])
                .map_err(csv_err)?;
        }
        let bytes = writer.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv of UTF-8 fields is UTF-8"))
    }

    fn render_markdown(&self) -> String {
        let escape = |s: &str| s.replace('|', "\\|");
        let mut out = String::new();
        out.push_str("| metric | segment | pearson | spearman | n |\n");
        out.push_str("|---|---|---:|---:|---:|\n");
        for row in &self.rows {
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} | {} |",
                escape(&row.metric_id),
                escape(&row.segment),
                cell(row.pearson),
                cell(row.spearman),
                row.n
            );
        }
        out
    }

    fn render_json_lines(&self) -> String {
        // numbers go through fixed4 so every format shows the same digits
        let number = |v: Option<f64>| match v {
            Some(v) => fixed4(v),
            None => "null".into(),
        };
        let mut out = String::new();
        for row in &self.rows {
            let _ = writeln!(
                out,
                "{{\"metric\":{},\"segment\":{},\"pearson\":{},\"spearman\":{},\"n\":{}}}",
                serde_json::Value::from(row.metric_id.as_str()),
                serde_json::Value::from(row.segment.as_str()),
                number(row.pearson),
                number(row.spearman),
                row.n
            );
        }
        out
    }
}

pub fn emit_report(doc: &ReportDocument, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, doc.render()?)?;
    Ok(())
}
