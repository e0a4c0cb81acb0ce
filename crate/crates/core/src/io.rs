//! Tabular output as CSV or JSON.

use std::fmt::Write as _;

use serde_json::{Map, Number, Value};

use crate::error::{Result, ScatterError};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = ScatterError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(ScatterError::InvalidArgument(format!("unknown format {s}, use csv or json"))),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Table {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    fn check_finite(&self) -> Result<()> {
        for row in &self.rows {
            for (cell, name) in row.iter().zip(&self.columns) {
                if let Cell::Float(v) = cell {
                    if !v.is_finite() {
                        return Err(ScatterError::NonFiniteOutput { column: name.clone() });
                    }
                }
            }
        }
        Ok(())
    }

    /// Header row plus one line per record. Floats use the shortest
    /// representation that round-trips.
    pub fn to_csv(&self) -> Result<String> {
        self.check_finite()?;
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Float(v) => format!("{v:?}"),
                    Cell::Int(i) => i.to_string(),
                })
                .collect();
            let _ = writeln!(out, "{}", line.join(","));
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Result<String> {
        self.check_finite()?;
        let records: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = Map::new();
                for (name, cell) in self.columns.iter().zip(row) {
                    let v = match cell {
                        Cell::Float(v) => Value::Number(Number::from_f64(*v).expect("finite")),
                        Cell::Int(i) => Value::Number((*i).into()),
                    };
                    obj.insert(name.clone(), v);
                }
                Value::Object(obj)
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&Value::Array(records)).map_err(|e| ScatterError::Io(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

/// Render `table` and write it to `path`, or return the text when no path
/// is given.
pub fn emit(table: &Table, format: Format, path: Option<&std::path::Path>) -> Result<Option<String>> {
    let text = table.render(format)?;
    match path {
        Some(p) => {
            std::fs::write(p, &text).map_err(|e| ScatterError::Io(format!("{}: {e}", p.display())))?;
            Ok(None)
        }
        None => Ok(Some(text)),
    }
}
