//! CSV and JSON writers. Every file opens with a schema line and the fully
//! resolved configuration.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::{Format, RunConfig};
use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
struct Document<'a, T: Serialize> {
    schema_version: u32,
    kind: &'a str,
    config: &'a RunConfig,
    data: &'a T,
}

fn create(dir: &Path, name: &str) -> Result<(PathBuf, BufWriter<File>), CliError> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let file = File::create(&path).map_err(|e| CliError::Usage(format!("cannot create {}: {e}", path.display())))?;
    Ok((path, BufWriter::new(file)))
}

/// Writes `rows` as CSV after two `#` comment lines carrying the schema
/// version and the configuration as JSON.
pub fn write_csv<T: Serialize>(cfg: &RunConfig, kind: &str, name: &str, rows: &[T]) -> Result<PathBuf, CliError> {
    let (path, mut out) = create(&cfg.output.dir, name)?;
    writeln!(out, "# coulombium {kind} schema_version={SCHEMA_VERSION}")?;
    writeln!(out, "# config {}", serde_json::to_string(cfg).expect("config serializes"))?;
    let mut writer = csv::Writer::from_writer(out);
    for row in rows {
        writer.serialize(row).map_err(|e| CliError::Usage(format!("csv error: {e}")))?;
    }
    writer.flush()?;
    Ok(path)
}

pub fn write_json<T: Serialize>(cfg: &RunConfig, kind: &str, name: &str, data: &T) -> Result<PathBuf, CliError> {
    let (path, mut out) = create(&cfg.output.dir, name)?;
    let doc = Document {
        schema_version: SCHEMA_VERSION,
        kind,
        config: cfg,
        data,
    };
    serde_json::to_writer_pretty(&mut out, &doc).map_err(|e| CliError::Usage(format!("json error: {e}")))?;
    writeln!(out)?;
    out.flush()?;
    Ok(path)
}

pub fn extension(format: Format) -> &'static str {
    match format {
        Format::Csv => "csv",
        Format::Json => "json",
    }
}
