//! Command-line experiments on top of [`rotorlab`].
//!
//! Every run is described by an [`ExperimentConfig`] read from a TOML file,
//! with flag overrides applied on top. The resolved configuration is echoed
//! into the header of the CSV output so that any output file can be parsed
//! back and re-executed (see [`CsvTable::config`]).

pub mod commands;
pub mod config;
pub mod error;
pub mod table;

use std::fs;
use std::io::Write;
use std::path::Path;

pub use commands::execute;
pub use config::{Command, ExperimentConfig, Overrides};
pub use error::CliError;
pub use table::{CsvTable, TableError};

/// Reads the optional configuration file, applies the overrides and
/// resolves the result for `command`.
pub fn load_config(
    path: Option<&Path>,
    overrides: &Overrides,
    command: Command,
) -> Result<ExperimentConfig, CliError> {
    let mut config = match path {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            ExperimentConfig::from_toml_str(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        }
        None => ExperimentConfig::default(),
    };
    config.apply(overrides);
    config.resolve(command)
}

/// Executes on a pool of `run.threads` workers (zero: one per core).
pub fn run(config: &ExperimentConfig) -> Result<CsvTable, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.run.threads)
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    pool.install(|| execute(config))
}

/// Writes the rendered table to `output.path`, or to standard output when
/// the path is empty.
pub fn write_output(config: &ExperimentConfig, table: &CsvTable) -> Result<(), CliError> {
    let text = table.render();
    if config.output.path.is_empty() {
        std::io::stdout().lock().write_all(text.as_bytes())?;
    } else {
        fs::write(&config.output.path, text)?;
    }
    Ok(())
}
