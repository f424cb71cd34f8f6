//! Rendering of CSV and JSON artifacts with the run configuration echoed.

use std::io::Write;

use anyhow::{Context, Result};
use hypocert::io::fmt_sig;
use serde::Serialize;

use crate::args::{Format, RunConfig};

/// A table of CSV rows with named columns.
#[derive(Clone, Debug, Default)]
pub struct Table {
    /// Column names.
    pub header: Vec<&'static str>,
    /// Rows of already formatted cells.
    pub rows: Vec<Vec<String>>,
}

/// Everything a subcommand produces.
#[derive(Clone, Debug)]
pub struct Artifact {
    /// Scalar results, written as `# key: value` lines in CSV output.
    pub summary: Vec<(&'static str, String)>,
    /// Tabular part of the CSV output.
    pub table: Table,
    /// Structured result for JSON output.
    pub result: serde_json::Value,
}

/// Formats a float for CSV cells.
pub fn num(x: f64) -> String {
    fmt_sig(x)
}

/// Formats an optional float, empty when absent.
pub fn opt_num(x: Option<f64>) -> String {
    x.map(fmt_sig).unwrap_or_default()
}

/// Serializes a value for the JSON `result` member.
pub fn to_value<T: Serialize>(value: &T) -> Result<serde_json::Value> {
    serde_json::to_value(value).context("serializing result")
}

/// Renders an artifact in the configured format.
pub fn render(config: &RunConfig, artifact: &Artifact) -> Result<String> {
    match config.format {
        Format::Json => {
            let doc = serde_json::json!({ "config": config, "result": artifact.result });
            let mut text = serde_json::to_string_pretty(&doc).context("serializing output")?;
            text.push('\n');
            Ok(text)
        }
        Format::Csv => {
            let mut text = format!("# hypocert {}\n", config.subcommand);
            let echo = serde_json::to_string(config).context("serializing config")?;
            text.push_str(&format!("# config: {echo}\n"));
            for (key, value) in &artifact.summary {
                text.push_str(&format!("# {key}: {value}\n"));
            }
            text.push_str(&artifact.table.header.join(","));
            text.push('\n');
            for row in &artifact.table.rows {
                text.push_str(&row.join(","));
                text.push('\n');
            }
            Ok(text)
        }
    }
}

/// Writes the rendered artifact to the configured path or standard output.
pub fn emit(config: &RunConfig, artifact: &Artifact) -> Result<()> {
    let text = render(config, artifact)?;
    match &config.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {path}")),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).context("writing to standard output")?;
            stdout.flush().context("flushing standard output")
        }
    }
}
