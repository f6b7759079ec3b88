use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde_json::Value;

use crate::config::Format;
use crate::error::{CliError, Result};

/// One table cell. Undefined numbers are kept distinct from values.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Missing,
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        if x.is_finite() {
            Cell::Num(x)
        } else {
            Cell::Missing
        }
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Missing, Cell::from)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_owned())
    }
}

/// Long-format table: one header, one sample per row.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                match cell {
                    Cell::Num(x) => write!(out, "{}", format_float(*x)).unwrap(),
                    Cell::Missing => {}
                    Cell::Text(s) => out.push_str(s),
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                Value::Array(
                    r.iter()
                        .map(|c| match c {
                            Cell::Num(x) => Value::from(*x),
                            Cell::Missing => Value::Null,
                            Cell::Text(s) => Value::from(s.as_str()),
                        })
                        .collect(),
                )
            })
            .collect();
        let doc = serde_json::json!({ "columns": self.columns, "rows": rows });
        Ok(serde_json::to_string(&doc)? + "\n")
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => Ok(self.to_csv()),
            Format::Json => self.to_json(),
        }
    }
}

/// Shortest representation that parses back to the same `f64`.
pub fn format_float(x: f64) -> String {
    format!("{x:?}")
}

/// Writes `text` to `path`, or to stdout when `path` is `None`.
pub fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::io(p, e)),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::io("<stdout>", e)),
    }
}
