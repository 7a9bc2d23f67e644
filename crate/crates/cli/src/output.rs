//! Output directory handling: CSV tables and the JSON run manifest.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{CliError, CliResult};

/// Formats a float for CSV output: shortest round-trip form, so identical
/// values always produce identical bytes.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-5..1e16).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OutputFile {
    pub name: String,
    pub rows: usize,
}

/// Files written by one command run.
#[derive(Debug)]
pub struct OutputDir {
    dir: PathBuf,
    files: Vec<OutputFile>,
}

impl OutputDir {
    pub fn create(dir: &Path) -> CliResult<Self> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn path(&self) -> &Path {
        &self.dir
    }

    pub fn files(&self) -> &[OutputFile] {
        &self.files
    }

    pub fn write_csv<I>(&mut self, name: &str, header: &[&str], rows: I) -> CliResult<()>
    where
        I: IntoIterator<Item = Vec<String>>,
    {
        let path = self.dir.join(name);
        let file = fs::File::create(&path).map_err(|e| CliError::io(&path, e))?;
        let mut w = csv::Writer::from_writer(std::io::BufWriter::new(file));
        w.write_record(header)?;
        let mut count = 0;
        for row in rows {
            w.write_record(&row)?;
            count += 1;
        }
        w.flush().map_err(|e| CliError::io(&path, e))?;
        self.files.push(OutputFile {
            name: name.to_string(),
            rows: count,
        });
        Ok(())
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> CliResult<()> {
        let path = self.dir.join(name);
        fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        self.files.push(OutputFile {
            name: name.to_string(),
            rows: text.lines().count(),
        });
        Ok(())
    }
}

#[derive(Debug, Serialize)]
pub struct ErrorRecord {
    pub kind: &'static str,
    pub exit_code: i32,
    pub message: String,
}

/// Everything needed to reproduce and audit a run.
#[derive(Debug, Serialize)]
pub struct Manifest {
    pub command: String,
    pub version: &'static str,
    pub seed: Option<u64>,
    pub workers: usize,
    /// Resolved settings; passing this file back with `--config`
    /// reproduces every CSV.
    pub config: Value,
    pub status: &'static str,
    pub error: Option<ErrorRecord>,
    pub outputs: Vec<OutputFile>,
    pub warnings: Vec<String>,
    pub summary: Map<String, Value>,
    pub wall_clock_seconds: f64,
    pub timings: Vec<Value>,
}

impl Manifest {
    pub fn new(command: &str, config: Value, seed: Option<u64>, workers: usize) -> Self {
        Self {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION"),
            seed,
            workers,
            config,
            status: "ok",
            error: None,
            outputs: Vec::new(),
            warnings: Vec::new(),
            summary: Map::new(),
            wall_clock_seconds: 0.0,
            timings: Vec::new(),
        }
    }

    pub fn fail(&mut self, e: &CliError) {
        self.status = "error";
        self.error = Some(ErrorRecord {
            kind: e.kind(),
            exit_code: e.exit_code(),
            message: e.to_string(),
        });
    }

    pub fn file_name(command: &str) -> String {
        format!("{command}-manifest.json")
    }

    pub fn write(&self, dir: &Path) -> CliResult<PathBuf> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let path = dir.join(Self::file_name(&self.command));
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        fs::write(&path, text + "\n").map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn num_round_trips() {
        for x in [0.0, 1.0, 0.1 + 0.2, 1.9721522630525295e-31, -3.5e20, 12345.678] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(2e-31), "2e-31");
        assert_eq!(num(0.25), "0.25");
        assert_eq!(num(f64::NEG_INFINITY), "-inf");
        assert_eq!(num(f64::NAN), "NaN");
    }
}
