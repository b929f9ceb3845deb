//! Report envelope and CSV tables.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::config::{Command, ExperimentConfig};
use crate::error::{io, CliError};

pub const TOOL: &str = "stable-flows";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// How a command ended, beyond hard errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// Most classified points were undecided.
    Undecided,
    /// At least one verification criterion failed.
    Failed,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Undecided => 2,
            Status::Failed => 1,
        }
    }
}

/// A CSV table written as `<name>.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self { name: name.into(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        let path = dir.join(format!("{}.csv", self.name));
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush().map_err(io(&path))?;
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub result: Value,
    pub tables: Vec<Table>,
    pub status: Status,
}

#[derive(Serialize)]
struct Envelope<'a> {
    tool: &'static str,
    version: &'static str,
    command: Command,
    seed: u64,
    config: &'a ExperimentConfig,
    result: &'a Value,
}

/// The JSON report. Contains no timings, so equal inputs give equal bytes.
pub fn render(cfg: &ExperimentConfig, outcome: &Outcome) -> Result<String, CliError> {
    let env = Envelope { tool: TOOL, version: VERSION, command: cfg.command, seed: cfg.seed, config: cfg, result: &outcome.result };
    let mut s = serde_json::to_string_pretty(&env)?;
    s.push('\n');
    Ok(s)
}

pub fn emit(cfg: &ExperimentConfig, outcome: &Outcome) -> Result<(), CliError> {
    let text = render(cfg, outcome)?;
    match &cfg.output.json {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent).map_err(io(parent))?;
            }
            fs::write(path, text).map_err(io(path))?;
        }
        None => std::io::stdout().write_all(text.as_bytes()).map_err(io("<stdout>"))?,
    }
    if let Some(dir) = &cfg.output.csv_dir {
        fs::create_dir_all(dir).map_err(io(dir))?;
        for t in &outcome.tables {
            t.write(dir)?;
        }
    }
    Ok(())
}

/// Serde name of a unit enum variant.
pub fn tag<T: Serialize>(v: &T) -> String {
    match serde_json::to_value(v) {
        Ok(Value::String(s)) => s,
        Ok(other) => other.to_string(),
        Err(_) => String::new(),
    }
}

pub fn num(x: f64) -> String {
    format!("{x}")
}
