//! Tables, checks and their CSV/JSON serialization.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::config::{Format, RunConfig};

pub const TOOL: &str = concat!("podles ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Debug)]
pub struct Table {
    pub name: &'static str,
    pub version: u32,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &'static str, version: u32, columns: &[&'static str]) -> Self {
        Self { name, version, columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len(), "{}", self.name);
        self.rows.push(row);
    }

    fn schema(&self) -> String {
        format!("{}/{}", self.name, self.version)
    }

    fn to_json(&self) -> Value {
        json!({ "schema": self.schema(), "columns": self.columns, "rows": self.rows })
    }
}

/// An asserted invariant. Any failing check makes the run exit nonzero.
#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub value: String,
    pub limit: String,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, value: impl Into<String>, limit: impl Into<String>, pass: bool) -> Self {
        Self { name: name.into(), value: value.into(), limit: limit.into(), pass }
    }
}

#[derive(Debug, Default)]
pub struct Report {
    pub tables: Vec<Table>,
    pub checks: Vec<Check>,
    /// Set when a failure is a precision problem rather than a falsification.
    pub advisory: Option<String>,
}

impl Report {
    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }

    fn checks_table(&self) -> Table {
        let mut t = Table::new("checks", 1, &["check", "value", "limit", "pass"]);
        for c in &self.checks {
            t.push(vec![c.name.clone(), c.value.clone(), c.limit.clone(), c.pass.to_string()]);
        }
        t
    }

    /// Writes one CSV per table, or a single JSON manifest, and returns the
    /// paths written.
    pub fn write(&self, command: &str, cfg: &RunConfig) -> std::io::Result<Vec<PathBuf>> {
        fs::create_dir_all(&cfg.output_dir)?;
        let mut tables = self.tables.clone();
        tables.push(self.checks_table());
        match cfg.output_format {
            Format::Csv => tables
                .iter()
                .map(|t| {
                    let path = cfg.output_dir.join(format!("{command}_{}.csv", t.name));
                    write_csv(&path, t, cfg)?;
                    Ok(path)
                })
                .collect(),
            Format::Json => {
                let config: serde_json::Map<String, Value> =
                    cfg.echo().into_iter().map(|(k, v)| (k.to_string(), Value::String(v))).collect();
                let doc = json!({
                    "schema": format!("{command}-manifest/1"),
                    "tool": TOOL,
                    "config": config,
                    "tables": tables.iter().map(Table::to_json).collect::<Vec<_>>(),
                });
                let path = cfg.output_dir.join(format!("{command}.json"));
                let mut text = serde_json::to_string_pretty(&doc)?;
                text.push('\n');
                fs::write(&path, text)?;
                Ok(vec![path])
            }
        }
    }
}

fn write_csv(path: &Path, t: &Table, cfg: &RunConfig) -> std::io::Result<()> {
    let mut buf = Vec::new();
    writeln!(buf, "#schema={}", t.schema())?;
    writeln!(buf, "#tool={TOOL}")?;
    for (k, v) in cfg.echo() {
        writeln!(buf, "#{k}={v}")?;
    }
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(&t.columns)?;
        for row in &t.rows {
            w.write_record(row)?;
        }
        w.flush()?;
    }
    fs::write(path, buf)
}
