//! Output formatting and atomic file writes.

use std::fmt;
use std::fs::{self, File};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use aqt_core::scan::ScanSeries;
use clap::ValueEnum;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Failure to open, write or rename an output file.
#[derive(Debug)]
pub struct OutputError {
    pub path: PathBuf,
    pub source: io::Error,
}

impl fmt::Display for OutputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cannot write output file {}: {}", self.path.display(), self.source)
    }
}

impl std::error::Error for OutputError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.source)
    }
}

/// Positional decimal with 17 significant digits, never scientific notation.
pub fn decimal(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let decimals = if v == 0.0 { 16 } else { (16 - v.abs().log10().floor() as i64).max(0) as usize };
    format!("{v:.decimals$}")
}

/// Writes rows of floats as CSV with a single header line and LF endings.
pub fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(decimal).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Provenance attached to every JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub program: String,
    pub version: String,
    pub command: String,
    /// The scan axis is x = JT/(pi hbar).
    pub axis: String,
}

impl Metadata {
    pub fn new(command: &str) -> Self {
        Metadata {
            program: "aqt".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            axis: "x = J T / (pi hbar)".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesDocument {
    pub metadata: Metadata,
    #[serde(flatten)]
    pub series: ScanSeries,
}

pub fn series_csv(series: &ScanSeries) -> String {
    csv_table(
        &["x", "infidelity", "fidelity"],
        (0..series.len()).map(|i| vec![series.grid[i], series.infidelity[i], series.fidelity[i]]),
    )
}

pub fn series_json(series: &ScanSeries) -> String {
    let doc = SeriesDocument { metadata: Metadata::new("scan"), series: series.clone() };
    to_json(&doc)
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output types serialize");
    s.push('\n');
    s
}

/// Renders a scan series and writes it to `path`, or stdout when `None`.
pub fn write_series(series: &ScanSeries, format: Format, path: Option<&Path>) -> Result<(), OutputError> {
    let text = match format {
        Format::Csv => series_csv(series),
        Format::Json => series_json(series),
    };
    let mut sink = Sink::open(path)?;
    sink.write(&text)?;
    sink.commit()
}

/// Output destination. Files are written to a temporary sibling and renamed
/// into place on commit; an uncommitted temporary is removed on drop.
pub enum Sink {
    Stdout,
    File { tmp: PathBuf, dest: PathBuf, file: Option<File> },
}

impl Sink {
    /// Opens the destination up front so an unwritable path is reported
    /// before any computation runs.
    pub fn open(path: Option<&Path>) -> Result<Sink, OutputError> {
        let Some(dest) = path else { return Ok(Sink::Stdout) };
        let err = |source| OutputError { path: dest.to_path_buf(), source };
        let name = dest
            .file_name()
            .ok_or_else(|| err(io::Error::new(io::ErrorKind::InvalidInput, "path has no file name")))?;
        if dest.is_dir() {
            return Err(err(io::Error::new(io::ErrorKind::InvalidInput, "path is a directory")));
        }
        let mut tmp_name = std::ffi::OsString::from(".");
        tmp_name.push(name);
        tmp_name.push(format!(".{}.tmp", std::process::id()));
        let tmp = dest.with_file_name(tmp_name);
        let file = File::create(&tmp).map_err(err)?;
        Ok(Sink::File { tmp, dest: dest.to_path_buf(), file: Some(file) })
    }

    pub fn write(&mut self, text: &str) -> Result<(), OutputError> {
        match self {
            Sink::Stdout => {
                let mut out = io::stdout().lock();
                out.write_all(text.as_bytes())
                    .and_then(|_| out.flush())
                    .map_err(|source| OutputError { path: PathBuf::from("<stdout>"), source })
            }
            Sink::File { dest, file, .. } => file
                .as_mut()
                .expect("file is open until commit")
                .write_all(text.as_bytes())
                .map_err(|source| OutputError { path: dest.clone(), source }),
        }
    }

    pub fn commit(mut self) -> Result<(), OutputError> {
        if let Sink::File { tmp, dest, file } = &mut self {
            let f = file.take().expect("file is open until commit");
            let err = |source| OutputError { path: dest.clone(), source };
            f.sync_all().map_err(err)?;
            drop(f);
            fs::rename(&*tmp, &*dest).map_err(err)?;
            // Nothing left for Drop to clean up.
            *tmp = PathBuf::new();
        }
        Ok(())
    }
}

impl Drop for Sink {
    fn drop(&mut self) {
        if let Sink::File { tmp, file, .. } = self {
            file.take();
            if !tmp.as_os_str().is_empty() {
                let _ = fs::remove_file(&*tmp);
            }
        }
    }
}
