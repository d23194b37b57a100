//! Tables and their CSV / JSON encodings.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Number, Value as Json};

use crate::error::{Error, Result};
use crate::experiments::fmt_real;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Real(f64),
    Int(i64),
    Uint(u64),
    Text(String),
    Missing,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Real(x) => fmt_real(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Uint(u) => u.to_string(),
            Cell::Text(s) => csv_escape(s),
            Cell::Missing => String::new(),
        }
    }

    fn json(&self) -> Json {
        match self {
            Cell::Real(x) => Number::from_f64(*x).map_or(Json::Null, Json::Number),
            Cell::Int(i) => Json::from(*i),
            Cell::Uint(u) => Json::from(*u),
            Cell::Text(s) => Json::String(s.clone()),
            Cell::Missing => Json::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Real(x)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Uint(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Uint(x as u64)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Missing, Cell::Real)
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Rows sharing one schema.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(columns: &[S]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.as_ref().to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width differs from the schema");
        self.rows.push(row);
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.iter().map(|c| csv_escape(c)).collect::<Vec<_>>().join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.iter().map(Cell::csv).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }

    fn json_rows(&self) -> Vec<Json> {
        self.rows
            .iter()
            .map(|row| {
                let obj: Map<String, Json> = self
                    .columns
                    .iter()
                    .cloned()
                    .zip(row.iter().map(Cell::json))
                    .collect();
                Json::Object(obj)
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::arg(format!("unknown format `{s}`; expected csv or json"))),
        }
    }
}

/// Top-level JSON document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultsDocument {
    pub config: BTreeMap<String, String>,
    pub results: Vec<Json>,
    pub seed: u64,
    pub config_digest: String,
}

pub fn render(table: &Table, format: Format, config: &BTreeMap<String, String>, seed: u64, digest: &str) -> Result<String> {
    Ok(match format {
        Format::Csv => table.to_csv(),
        Format::Json => {
            let doc = ResultsDocument {
                config: config.clone(),
                results: table.json_rows(),
                seed,
                config_digest: digest.to_string(),
            };
            let mut s = serde_json::to_string_pretty(&doc)?;
            s.push('\n');
            s
        }
    })
}

/// Writes `content` to `destination`, or to standard output when absent.
pub fn emit(content: &str, destination: Option<&Path>) -> Result<()> {
    match destination {
        Some(path) => fs::write(path, content)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(content.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

pub fn parse_results_json(text: &str) -> Result<ResultsDocument> {
    Ok(serde_json::from_str(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(&["alpha", "mean", "note", "bound"]);
        t.push(vec![Cell::Real(0.1), Cell::Real(1.0 / 3.0), "a,b".into(), Cell::Missing]);
        t.push(vec![Cell::Real(1e-300), Cell::Real(-2.5e17), "x".into(), Cell::Real(54.0)]);
        t
    }

    #[test]
    fn empty_table_is_header_only() {
        assert_eq!(Table::new(&["n", "alpha"]).to_csv(), "n,alpha\n");
    }

    #[test]
    fn csv_reals_carry_seventeen_digits() {
        let csv = sample().to_csv();
        assert!(csv.contains("3.3333333333333331e-1"));
        assert!(csv.contains("\"a,b\""));
        assert!(!csv.contains('\r'));
        for line in csv.lines().skip(1) {
            let first: f64 = line.split(',').next().unwrap().parse().unwrap();
            assert!(first == 0.1 || first == 1e-300);
        }
    }

    #[test]
    fn json_round_trip_is_exact() {
        let t = sample();
        let mut cfg = BTreeMap::new();
        cfg.insert("alpha".to_string(), "0.1".to_string());
        let s = render(&t, Format::Json, &cfg, 7, "abc").unwrap();
        let doc = parse_results_json(&s).unwrap();
        assert_eq!(doc.seed, 7);
        assert_eq!(doc.results[0]["mean"].as_f64().unwrap().to_bits(), (1.0f64 / 3.0).to_bits());
        assert_eq!(doc.results[1]["alpha"].as_f64().unwrap(), 1e-300);
        assert!(doc.results[0]["bound"].is_null());
    }
}
