//! Experiment reports and their serializations.

use std::io::Write;

use serde::Serialize;
use serde_json::{Map, Value};

use super::config::ExperimentConfig;
use crate::error::Result;

/// One result row: an ordered map of column name to value. Non-finite
/// numbers serialize as `null`.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Row(Map<String, Value>);

impl Row {
    pub fn new() -> Self {
        Self(Map::new())
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.0.insert(key.to_string(), value.into());
        self
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.0.get(key)
    }

    pub fn f64(&self, key: &str) -> Option<f64> {
        self.0.get(key).and_then(Value::as_f64)
    }

    pub fn str(&self, key: &str) -> Option<&str> {
        self.0.get(key).and_then(Value::as_str)
    }

    pub fn columns(&self) -> impl Iterator<Item = &String> {
        self.0.keys()
    }
}

/// A pass/fail assertion made by an experiment.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub version: String,
    pub config: Map<String, Value>,
    pub rows: Vec<Row>,
    pub checks: Vec<Check>,
    pub passed: bool,
    /// Present only when timing was requested, so that reports are
    /// otherwise reproducible byte for byte.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_clock_ms: Option<f64>,
}

impl ExperimentReport {
    pub fn new(config: &ExperimentConfig, rows: Vec<Row>, checks: Vec<Check>) -> Self {
        let echo = config
            .to_pairs()
            .into_iter()
            .map(|(k, v)| (k, Value::String(v)))
            .collect();
        Self {
            experiment: config.experiment.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: echo,
            passed: checks.iter().all(|c| c.passed),
            rows,
            checks,
            wall_clock_ms: None,
        }
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Rows as CSV; the header is the union of all columns in first-seen
    /// order and missing cells are empty.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut columns: Vec<&String> = Vec::new();
        for row in &self.rows {
            for c in row.columns() {
                if !columns.contains(&c) {
                    columns.push(c);
                }
            }
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&columns).map_err(csv_error)?;
        for row in &self.rows {
            let record: Vec<String> = columns.iter().map(|c| cell(row.get(c))).collect();
            w.write_record(&record).map_err(csv_error)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }

    /// Gnuplot data blocks, one per `(quantity, method, d, generator)` series, with
    /// columns `N value std_error`. Blocks are separated by two blank lines
    /// so `index` selects them.
    pub fn to_plot_data(&self) -> String {
        let mut series: Vec<(String, Vec<&Row>)> = Vec::new();
        for row in &self.rows {
            if row.f64("N").is_none() || row.f64("value").is_none() {
                continue;
            }
            let key = format!(
                "{} {} d={} generator={}",
                row.str("quantity").unwrap_or("value"),
                row.str("method").unwrap_or(""),
                row.get("d").map_or_else(String::new, |v| v.to_string()),
                row.str("generator").unwrap_or("")
            );
            match series.iter_mut().find(|(k, _)| *k == key) {
                Some((_, rows)) => rows.push(row),
                None => series.push((key, vec![row])),
            }
        }
        let mut out = String::new();
        for (i, (key, rows)) in series.iter().enumerate() {
            if i > 0 {
                out.push_str("\n\n");
            }
            out.push_str(&format!("# {key}\n# N value std_error\n"));
            for row in rows {
                out.push_str(&format!(
                    "{} {} {}\n",
                    row.f64("N").unwrap(),
                    row.f64("value").unwrap(),
                    row.f64("std_error").unwrap_or(0.0)
                ));
            }
        }
        out
    }
}

fn cell(v: Option<&Value>) -> String {
    match v {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(other) => other.to_string(),
    }
}

fn csv_error(e: csv::Error) -> crate::Error {
    crate::Error::Format(format!("csv: {e}"))
}
