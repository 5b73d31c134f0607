//! Rendering of command results as CSV (with a commented config header) or
//! JSON (with a `config` field).

use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(format!("unknown format {other:?} (expected csv or json)")),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub command: &'static str,
    /// Fully resolved settings, seed included.
    pub config: Map<String, Value>,
    pub table: Table,
    /// Results for the JSON rendering.
    pub results: Value,
}

fn config_value(v: &Value) -> String {
    match v {
        Value::Null => "none".into(),
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(config_value).collect::<Vec<_>>().join(","),
        other => other.to_string(),
    }
}

impl Output {
    pub fn render_csv(&self) -> String {
        let mut s = format!("# nngp {}\n", self.command);
        for (k, v) in &self.config {
            s += &format!("# {k} = {}\n", config_value(v));
        }
        s += &self.table.columns.join(",");
        s.push('\n');
        for row in &self.table.rows {
            s += &row.join(",");
            s.push('\n');
        }
        s
    }

    pub fn render_json(&self) -> Result<String> {
        let mut doc = Map::new();
        doc.insert("command".into(), Value::String(self.command.into()));
        doc.insert("config".into(), Value::Object(self.config.clone()));
        doc.insert("results".into(), self.results.clone());
        let mut s = serde_json::to_string_pretty(&Value::Object(doc))?;
        s.push('\n');
        Ok(s)
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => Ok(self.render_csv()),
            Format::Json => self.render_json(),
        }
    }
}

pub fn write_text(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

/// Shortest round-trip form; scientific notation for very small or large
/// magnitudes.
pub fn num(v: f64) -> String {
    let a = v.abs();
    if v != 0.0 && a.is_finite() && !(1e-4..1e15).contains(&a) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}
