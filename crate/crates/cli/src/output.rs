//! Deterministic CSV/JSON writers. CSV uses '.' decimals, comma delimiters,
//! a header row, LF endings and 17 significant digits; both formats embed
//! the resolved configuration and the code version.

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug)]
pub enum Cell {
    Text(String),
    Float(f64),
    Int(usize),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Float(v) => format_float(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Empty => String::new(),
        }
    }
}

/// 17 significant digits, enough to reproduce any f64 exactly.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

/// Render a CSV document with the config and version embedded as comment
/// lines above the header.
pub fn render_csv(command: &str, config: &ExperimentConfig, table: &Table) -> String {
    let mut out = String::new();
    out.push_str(&format!("# su2dd {VERSION} {command}\n"));
    out.push_str(&format!(
        "# config {}\n",
        serde_json::to_string(config).expect("config serializes")
    ));
    out.push_str(&table.columns.join(","));
    out.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(Cell::render).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Render a JSON document wrapping serializable payload rows.
pub fn render_json<T: Serialize>(
    command: &str,
    config: &ExperimentConfig,
    payload: &T,
) -> Result<String, CliError> {
    #[derive(Serialize)]
    struct Document<'a, T> {
        version: &'static str,
        command: &'a str,
        config: &'a ExperimentConfig,
        #[serde(flatten)]
        payload: &'a T,
    }
    let doc = Document {
        version: VERSION,
        command,
        config,
        payload,
    };
    let mut text = serde_json::to_string_pretty(&doc)
        .map_err(|e| CliError::validation(format!("serialization failed: {e}")))?;
    text.push('\n');
    Ok(text)
}

/// Write to the configured output path or stdout.
pub fn emit(out: Option<&str>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::validation(format!("cannot write {path}: {e}"))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
