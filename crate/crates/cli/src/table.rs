//! Tabular output in CSV or JSON.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Float(f64),
}

impl Cell {
    pub fn as_f64(&self) -> f64 {
        match *self {
            Cell::Int(i) => i as f64,
            Cell::Float(x) => x,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Table {
    pub mode: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(mode: impl Into<String>, columns: &[&str]) -> Self {
        Table {
            mode: mode.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Header row plus one line per row. Floats use the shortest decimal
    /// string that parses back to the same value.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                match cell {
                    Cell::Int(v) => write!(out, "{v}"),
                    Cell::Float(v) => write!(out, "{v:?}"),
                }
                .expect("writing to a String");
            }
            out.push('\n');
        }
        out
    }

    /// One row per line so large tables stay diffable.
    pub fn to_json(&self) -> String {
        let mut out = String::from("{\n");
        writeln!(out, "  \"mode\": {},", encode(&self.mode)).unwrap();
        writeln!(out, "  \"columns\": {},", encode(&self.columns)).unwrap();
        out.push_str("  \"rows\": [");
        for (i, row) in self.rows.iter().enumerate() {
            out.push_str(if i == 0 { "\n    " } else { ",\n    " });
            out.push_str(&encode(row));
        }
        out.push_str(if self.rows.is_empty() { "]\n}\n" } else { "\n  ]\n}\n" });
        out
    }
}

// non-finite floats become null, which parse_table_json rejects
fn encode<T: Serialize + ?Sized>(value: &T) -> String {
    serde_json::to_string(value).expect("table cells serialize")
}

/// Reads a table written by [`Table::to_json`].
pub fn parse_table_json(text: &str) -> Result<Table, serde_json::Error> {
    let table: Table = serde_json::from_str(text)?;
    if let Some(bad) = table.rows.iter().position(|r| r.len() != table.columns.len()) {
        return Err(serde::de::Error::custom(format!(
            "row {bad} has {} cells, expected {}",
            table.rows[bad].len(),
            table.columns.len()
        )));
    }
    Ok(table)
}
