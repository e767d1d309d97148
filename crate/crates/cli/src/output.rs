//! Tables, CSV/JSON emission and the run manifest.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format!("{x:.16e}"),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => json!(x),
            Cell::Int(n) => json!(n),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&'static str]) -> Self {
        Self {
            name: name.into(),
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> io::Result<Vec<u8>> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv))?;
        }
        w.into_inner().map_err(|e| e.into_error())
    }

    fn to_json(&self) -> Value {
        json!({
            "columns": self.columns,
            "rows": self.rows.iter().map(|r| r.iter().map(Cell::json).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// Everything a command produces: tables plus notes for the manifest.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct RunOutput {
    pub tables: Vec<Table>,
    pub notes: Vec<String>,
}

/// Provenance of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub command: String,
    pub timestamp: String,
    /// Digest of the configuration file, or `none`.
    pub input_digest: String,
    /// Digest of the resolved parameter text.
    pub resolved_digest: String,
    pub parameters: String,
    pub outputs: Vec<(String, String)>,
    pub notes: Vec<String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let d = Sha256::digest(bytes);
    d.iter().map(|b| format!("{b:02x}")).collect()
}

/// Timestamp of the run; honours `SOURCE_DATE_EPOCH` for reproducible builds.
pub fn timestamp() -> String {
    let at = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse::<i64>().ok())
        .and_then(|s| chrono::DateTime::from_timestamp(s, 0))
        .unwrap_or_else(chrono::Utc::now);
    at.to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

impl Manifest {
    /// `key = value` text with provenance as comments, so it can be passed
    /// back with `--config`.
    pub fn to_config_text(&self) -> String {
        let mut s = format!(
            "# omdp-sense {VERSION}\n# command: {}\n# timestamp: {}\n# input_digest: {}\n# resolved_digest: {}\n",
            self.command, self.timestamp, self.input_digest, self.resolved_digest
        );
        for (file, digest) in &self.outputs {
            s.push_str(&format!("# output: {file} sha256:{digest}\n"));
        }
        for n in &self.notes {
            s.push_str(&format!("# note: {}\n", n.replace('\n', " ")));
        }
        s.push_str(&self.parameters);
        s
    }

    fn to_json(&self, config: &RunConfig) -> Value {
        let params: Map<String, Value> = config.values.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
        json!({
            "tool": "omdp-sense",
            "version": VERSION,
            "command": self.command,
            "timestamp": self.timestamp,
            "input_digest": self.input_digest,
            "resolved_digest": self.resolved_digest,
            "parameters": params,
            "notes": self.notes,
        })
    }
}

pub const MANIFEST_FILE: &str = "manifest.cfg";

/// Writes the data files and the manifest into `dir`; returns the paths.
pub fn write_run(
    dir: &Path,
    config: &RunConfig,
    input_digest: String,
    output: &RunOutput,
    format: Format,
) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let parameters = config.to_text();
    let mut manifest = Manifest {
        command: config.command.name().to_string(),
        timestamp: timestamp(),
        input_digest,
        resolved_digest: sha256_hex(parameters.as_bytes()),
        parameters,
        outputs: Vec::new(),
        notes: output.notes.clone(),
    };
    let mut written = Vec::new();
    match format {
        Format::Csv => {
            for t in &output.tables {
                let bytes = t.to_csv()?;
                let name = format!("{}.csv", t.name);
                let path = dir.join(&name);
                fs::write(&path, &bytes)?;
                manifest.outputs.push((name, sha256_hex(&bytes)));
                written.push(path);
            }
        }
        Format::Json => {
            let data: Map<String, Value> = output.tables.iter().map(|t| (t.name.clone(), t.to_json())).collect();
            let data = Value::Object(data);
            let data_text = serde_json::to_string(&data).map_err(io::Error::other)?;
            let name = format!("{}.json", config.command.name());
            manifest.outputs.push((format!("{name}#data"), sha256_hex(data_text.as_bytes())));
            let doc = json!({ "manifest": manifest.to_json(config), "data": data });
            let mut text = serde_json::to_string_pretty(&doc).map_err(io::Error::other)?;
            text.push('\n');
            let path = dir.join(&name);
            fs::write(&path, text)?;
            written.push(path);
        }
    }
    let path = dir.join(MANIFEST_FILE);
    fs::write(&path, manifest.to_config_text())?;
    written.push(path);
    Ok(written)
}
