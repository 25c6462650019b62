//! CSV output with `#`-prefixed provenance headers, and the parser the
//! regression harness uses to read it back.
//!
//! ```text
//! # rotorlab fig2-main
//! # --- config ---
//! # <resolved TOML configuration, one line per header line>
//! # --- end config ---
//! # plateau = 5.6107226202358200e-1
//! dk,fstar,F_numeric_N50
//! 0.0000000000000000e0,1.0000000000000000e0,1.0000000000000000e0
//! ```

use std::fmt::Write as _;

use thiserror::Error;

use crate::config::ExperimentConfig;
use crate::error::CliError;

pub const CONFIG_BEGIN: &str = "--- config ---";
pub const CONFIG_END: &str = "--- end config ---";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct TableError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CsvTable {
    /// Header lines without their `# ` prefix.
    pub header: Vec<String>,
    pub columns: Vec<String>,
    /// Columns printed as integers.
    pub integer: Vec<bool>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            header: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            integer: vec![false; columns.len()],
            rows: Vec::new(),
        }
    }

    pub fn integer_column(mut self, index: usize) -> Self {
        self.integer[index] = true;
        self
    }

    pub fn push_row(&mut self, row: Vec<f64>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width differs from column count"
        );
        self.rows.push(row);
    }

    /// Writes the full resolved configuration into the header.
    pub fn set_config(&mut self, config: &ExperimentConfig) {
        let command = config.command.map(|c| c.as_str()).unwrap_or("unknown");
        self.header.push(format!("rotorlab {command}"));
        self.header.push(CONFIG_BEGIN.to_string());
        self.header
            .extend(config.to_toml_string().lines().map(str::to_string));
        self.header.push(CONFIG_END.to_string());
    }

    pub fn annotate(&mut self, key: &str, value: impl std::fmt::Display) {
        self.header.push(format!("{key} = {value}"));
    }

    /// Value of a `key = value` header line outside the configuration block.
    pub fn annotation(&self, key: &str) -> Option<&str> {
        let mut in_config = false;
        for line in &self.header {
            if line == CONFIG_BEGIN {
                in_config = true;
            } else if line == CONFIG_END {
                in_config = false;
            } else if !in_config {
                if let Some((k, v)) = line.split_once('=') {
                    if k.trim() == key {
                        return Some(v.trim());
                    }
                }
            }
        }
        None
    }

    /// Configuration recorded in the header.
    pub fn config(&self) -> Result<ExperimentConfig, CliError> {
        let begin = self.header.iter().position(|l| l == CONFIG_BEGIN);
        let end = self.header.iter().position(|l| l == CONFIG_END);
        match (begin, end) {
            (Some(b), Some(e)) if b < e => {
                ExperimentConfig::from_toml_str(&self.header[b + 1..e].join("\n"))
            }
            _ => Err(CliError::Config(
                "header carries no configuration block".into(),
            )),
        }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let index = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[index]).collect())
    }

    /// Body lines only (column names and data), the part compared when
    /// checking reproducibility.
    pub fn render_body(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            for (i, value) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                if self.integer[i] {
                    let _ = write!(out, "{}", *value as i64);
                } else {
                    let _ = write!(out, "{value:.16e}");
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for line in &self.header {
            if line.is_empty() {
                out.push_str("#\n");
            } else {
                let _ = writeln!(out, "# {line}");
            }
        }
        out.push_str(&self.render_body());
        out
    }

    pub fn parse(text: &str) -> Result<Self, TableError> {
        let mut table = CsvTable::default();
        let mut have_columns = false;
        for (index, raw) in text.lines().enumerate() {
            let line_no = index + 1;
            let err = |message: String| TableError {
                line: line_no,
                message,
            };
            if let Some(rest) = raw.strip_prefix('#') {
                if have_columns {
                    return Err(err("header line after the column names".into()));
                }
                table
                    .header
                    .push(rest.strip_prefix(' ').unwrap_or(rest).to_string());
                continue;
            }
            if raw.trim().is_empty() {
                continue;
            }
            if !have_columns {
                let columns: Vec<String> = raw.split(',').map(|c| c.trim().to_string()).collect();
                if columns.iter().any(String::is_empty) {
                    return Err(err("empty column name".into()));
                }
                if columns[0].starts_with('#') {
                    return Err(err("column name starts with `#`".into()));
                }
                for (i, c) in columns.iter().enumerate() {
                    if columns[..i].contains(c) {
                        return Err(err(format!("duplicate column `{c}`")));
                    }
                }
                table.integer = vec![true; columns.len()];
                table.columns = columns;
                have_columns = true;
                continue;
            }
            let cells: Vec<&str> = raw.split(',').map(str::trim).collect();
            if cells.len() != table.columns.len() {
                return Err(err(format!(
                    "{} cells for {} columns",
                    cells.len(),
                    table.columns.len()
                )));
            }
            let mut row = Vec::with_capacity(cells.len());
            for (i, cell) in cells.iter().enumerate() {
                let value: f64 = cell
                    .parse()
                    .map_err(|_| err(format!("cell `{cell}` is not a number")))?;
                if cell.parse::<i64>().is_err() {
                    table.integer[i] = false;
                }
                row.push(value);
            }
            table.rows.push(row);
        }
        if !have_columns {
            return Err(TableError {
                line: 0,
                message: "no column header".into(),
            });
        }
        Ok(table)
    }
}
