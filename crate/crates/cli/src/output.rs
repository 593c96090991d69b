//! Run artifacts: metadata-carrying CSV and `{meta, rows}` JSON.
//!
//! Both formats embed the resolved parameter set and a replay line, so an
//! artifact fully describes the run that produced it. CSV floats are
//! printed at 17 significant digits (lossless `f64` round trip); JSON uses
//! shortest-round-trip numbers. Neither format includes timestamps or any
//! other run-environment detail, so identical specs yield identical bytes.

use std::fmt::Write as _;
use std::io::Write as _;

use clap::ValueEnum;
use serde_json::{json, Map, Value};

use crate::CliError;

/// Artifact format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    /// Comma-separated values with a `#`-prefixed metadata preamble.
    Csv,
    /// A single `{meta, rows}` object.
    Json,
}

impl OutputFormat {
    /// Name as written on the command line.
    pub fn name(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

/// A fully resolved run: the command, every parameter that influences the
/// computation (defaults filled in), and where/how to write the artifact.
#[derive(Debug, Clone)]
pub struct RunSpec {
    /// Subcommand name.
    pub command: &'static str,
    /// Resolved parameters in canonical order, as command-line text.
    /// An empty value marks a bare switch.
    pub params: Vec<(&'static str, String)>,
    /// Artifact path, `-` for standard output.
    pub output_path: String,
    /// Artifact format.
    pub format: OutputFormat,
}

impl RunSpec {
    /// Argument vector reproducing this run. The output path is excluded:
    /// the artifact is the same wherever it is written.
    pub fn replay_line(&self) -> String {
        let mut line = self.command.to_string();
        for (key, value) in &self.params {
            if value.is_empty() {
                write!(line, " --{key}").expect("write to string");
            } else {
                write!(line, " --{key} {value}").expect("write to string");
            }
        }
        write!(line, " --format {}", self.format.name()).expect("write to string");
        line
    }
}

/// One output column: name plus the unit printed in the header.
#[derive(Debug, Clone, Copy)]
pub struct Column {
    pub name: &'static str,
    pub unit: &'static str,
}

/// One output value.
#[derive(Debug, Clone, Copy)]
pub enum Cell {
    /// Physical quantity; printed at 17 significant digits in CSV.
    Float(f64),
    /// Exact count or 0/1 flag; printed as an integer.
    Count(u64),
}

impl Cell {
    fn csv(&self) -> String {
        match *self {
            // {:e} renders NaN and +-inf as text, which is what we want.
            Cell::Float(v) => format!("{v:.16e}"),
            Cell::Count(v) => v.to_string(),
        }
    }

    fn json(&self) -> Value {
        match *self {
            // JSON has no NaN/inf; those degrade to null.
            Cell::Float(v) => {
                serde_json::Number::from_f64(v).map(Value::Number).unwrap_or(Value::Null)
            }
            Cell::Count(v) => Value::Number(v.into()),
        }
    }
}

/// Computed rows plus scalar results that apply to the whole run.
#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
    /// Scalar results (a regime label, a shared eigenvalue, ...); emitted
    /// in the metadata rather than duplicated down a column.
    pub notes: Vec<(&'static str, String)>,
}

impl Table {
    /// Renders the artifact text for `spec`.
    pub fn render(&self, spec: &RunSpec) -> String {
        match spec.format {
            OutputFormat::Csv => self.render_csv(spec),
            OutputFormat::Json => self.render_json(spec),
        }
    }

    fn render_csv(&self, spec: &RunSpec) -> String {
        let mut text = String::new();
        let mut line = |s: String| {
            text.push_str(&s);
            text.push('\n');
        };
        line(format!("# command: {}", spec.command));
        for (key, value) in &spec.params {
            if value.is_empty() {
                line(format!("# {key}: true"));
            } else {
                line(format!("# {key}: {value}"));
            }
        }
        for (key, value) in &self.notes {
            line(format!("# {key}: {value}"));
        }
        line(format!("# replay: {}", spec.replay_line()));
        let header: Vec<String> =
            self.columns.iter().map(|c| format!("{} [{}]", c.name, c.unit)).collect();
        line(header.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            line(cells.join(","));
        }
        text
    }

    fn render_json(&self, spec: &RunSpec) -> String {
        let mut params = Map::new();
        for (key, value) in &spec.params {
            let v = if value.is_empty() { Value::Bool(true) } else { Value::String(value.clone()) };
            params.insert((*key).to_string(), v);
        }
        let mut notes = Map::new();
        for (key, value) in &self.notes {
            notes.insert((*key).to_string(), Value::String(value.clone()));
        }
        let columns: Vec<Value> =
            self.columns.iter().map(|c| json!({ "name": c.name, "unit": c.unit })).collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| Value::Array(row.iter().map(Cell::json).collect()))
            .collect();
        let doc = json!({
            "meta": {
                "command": spec.command,
                "params": params,
                "notes": notes,
                "replay": spec.replay_line(),
                "columns": columns,
            },
            "rows": rows,
        });
        let mut text = serde_json::to_string_pretty(&doc).expect("static document structure");
        text.push('\n');
        text
    }
}

/// Writes the rendered artifact to the spec's output path.
pub fn write_artifact(spec: &RunSpec, table: &Table) -> Result<(), CliError> {
    let text = table.render(spec);
    if spec.output_path == "-" {
        std::io::stdout().write_all(text.as_bytes())?;
    } else {
        std::fs::write(&spec.output_path, text)?;
    }
    Ok(())
}
