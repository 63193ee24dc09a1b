//! Tabular artifacts: a header plus rows of already formatted fields,
//! rendered as CSV or JSON.

use anyhow::{bail, Result};
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => bail!("unknown format '{s}' (csv, json)"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push<I, S>(&mut self, row: I)
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let row: Vec<String> = row.into_iter().map(Into::into).collect();
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.header)?;
                for r in &self.rows {
                    w.write_record(r)?;
                }
                Ok(String::from_utf8(w.into_inner()?)?)
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|r| Value::Array(r.iter().map(|f| json_field(f)).collect()))
                    .collect();
                let mut s = serde_json::to_string_pretty(&json!({ "columns": self.header, "rows": rows }))?;
                s.push('\n');
                Ok(s)
            }
        }
    }
}

/// Integers and finite floats become JSON numbers; everything else, including
/// non-finite values, stays a string.
fn json_field(f: &str) -> Value {
    if let Ok(i) = f.parse::<i64>() {
        return Value::from(i);
    }
    match f.parse::<f64>() {
        Ok(v) if v.is_finite() && f.bytes().all(|b| b.is_ascii_digit() || b"+-.eE".contains(&b)) => {
            serde_json::Number::from_f64(v).map_or_else(|| Value::from(f), Value::Number)
        }
        _ => Value::from(f),
    }
}

/// Shortest decimal that reads back as the same f64.
pub fn num(v: f64) -> String {
    v.to_string()
}
