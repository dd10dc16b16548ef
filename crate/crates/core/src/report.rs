//! Tabular results with a pass/fail verification block, written as CSV or
//! as a JSON document with the same schema.
//!
//! CSV layout:
//!
//! ```text
//! # qrs <version> <command> <config as compact JSON>
//! #check,<name>,PASS|FAIL,<detail>
//! <column>,<column>,...
//! <row>
//! ```
//!
//! Floats use the shortest representation that round-trips.

use std::io::Write;

use serde::Serialize;
use serde_json::{json, Map, Value as Json};

use crate::error::{QrsError, Result};

pub const TOOL: &str = "qrs";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
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

/// Shortest round-trip decimal form; exponent notation outside `[1e-5, 1e16)`.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:?}")
    }
}

impl Cell {
    fn to_csv(&self) -> String {
        match self {
            Cell::Num(v) => format_float(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn to_json(&self) -> Json {
        match self {
            Cell::Num(v) if v.is_finite() => json!(v),
            Cell::Num(_) | Cell::Empty => Json::Null,
            Cell::Int(v) => json!(v),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: String,
    pub config: Json,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Format {
    Csv,
    Json,
}

impl Report {
    pub fn new(command: &str, config: &impl Serialize, columns: &[&str]) -> Self {
        Self {
            command: command.to_owned(),
            config: serde_json::to_value(config).unwrap_or(Json::Null),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(QrsError::InvalidParams(format!(
                "row has {} cells, table has {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.to_owned(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed_checks(&self) -> Vec<String> {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{}: {}", c.name, c.detail))
            .collect()
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# {TOOL} {VERSION} {} {}", self.command, self.config)?;
        let mut out = csv::WriterBuilder::new().flexible(true).from_writer(w);
        for c in &self.checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            out.write_record(["#check", &c.name, status, &c.detail]).map_err(csv_err)?;
        }
        out.write_record(&self.columns).map_err(csv_err)?;
        for row in &self.rows {
            out.write_record(row.iter().map(Cell::to_csv)).map_err(csv_err)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Json {
        let rows: Vec<Json> = self
            .rows
            .iter()
            .map(|r| {
                let mut m = Map::new();
                for (c, v) in self.columns.iter().zip(r) {
                    m.insert(c.clone(), v.to_json());
                }
                Json::Object(m)
            })
            .collect();
        json!({
            "tool": TOOL,
            "version": VERSION,
            "command": self.command,
            "config": self.config,
            "checks": self.checks,
            "columns": self.columns,
            "rows": rows,
        })
    }

    pub fn write_json<W: Write>(&self, mut w: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut w, &self.to_json()).map_err(|e| QrsError::Io(e.to_string()))?;
        writeln!(w)?;
        Ok(())
    }

    pub fn write<W: Write>(&self, w: W, format: Format) -> Result<()> {
        match format {
            Format::Csv => self.write_csv(w),
            Format::Json => self.write_json(w),
        }
    }
}

fn csv_err(e: csv::Error) -> QrsError {
    QrsError::Io(e.to_string())
}
