use crate::args::Format;
use anyhow::{Context, Result};
use serde_json::{Map, Value};
use std::io::Write;
use std::path::Path;

/// A table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_num(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:.16e}")
    }
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Num(v) => fmt_num(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            // Same digits as the CSV; non-finite values become null.
            Cell::Num(v) if v.is_finite() => fmt_num(*v).parse::<serde_json::Number>().map(Value::Number).unwrap_or(Value::Null),
            Cell::Num(_) => Value::Null,
            Cell::Int(v) => Value::from(*v),
            Cell::Text(s) => Value::from(s.as_str()),
        }
    }
}

/// A table with metadata: every effective setting, the tolerances, the
/// version and the wall time.
#[derive(Debug, Clone)]
pub struct Artifact {
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Artifact {
    pub fn new(command: &str, columns: Vec<&'static str>) -> Self {
        Artifact {
            metadata: vec![
                ("command".into(), command.into()),
                ("version".into(), env!("CARGO_PKG_VERSION").into()),
            ],
            columns,
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.metadata.push((key.into(), value.to_string()));
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> Result<Vec<u8>> {
        match format {
            Format::Csv => self.csv(),
            Format::Json => self.json(),
        }
    }

    fn csv(&self) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        for (k, v) in &self.metadata {
            writeln!(out, "# {k}: {v}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::text))?;
        }
        w.into_inner().context("flushing CSV")
    }

    fn json(&self) -> Result<Vec<u8>> {
        let metadata: Map<String, Value> = self.metadata.iter().map(|(k, v)| (k.clone(), Value::from(v.as_str()))).collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| Value::Object(self.columns.iter().zip(row).map(|(c, v)| (c.to_string(), v.json())).collect()))
            .collect();
        let mut out = serde_json::to_vec_pretty(&serde_json::json!({ "metadata": metadata, "rows": rows }))?;
        out.push(b'\n');
        Ok(out)
    }

    pub fn write(&self, format: Format, path: Option<&Path>) -> Result<()> {
        let bytes = self.render(format)?;
        match path {
            Some(p) => std::fs::write(p, bytes).with_context(|| format!("writing {}", p.display()))?,
            None => std::io::stdout().write_all(&bytes)?,
        }
        Ok(())
    }
}
