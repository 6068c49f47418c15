//! CSV and binary file helpers.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use crate::{Error, Result, RunConfig, VERSION};

/// First line of every output file.
pub fn header_line(cfg: &RunConfig) -> String {
    format!("# wavetank {VERSION} config={} seed={}", cfg.hash(), cfg.seed)
}

/// Opens a CSV writer whose first line is the provenance header.
pub fn create_csv(path: &Path, cfg: &RunConfig, columns: &[&str]) -> Result<csv::Writer<File>> {
    let mut f = File::create(path).map_err(|e| Error::io(path, e))?;
    writeln!(f, "{}", header_line(cfg)).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(f);
    w.write_record(columns)?;
    Ok(w)
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::io(path, e))
}

/// Writes the resolved configuration with the provenance header.
pub fn write_resolved_config(dir: &Path, cfg: &RunConfig) -> Result<()> {
    let path = dir.join("resolved_config.toml");
    let text = format!("{}\n{}", header_line(cfg), cfg.to_toml());
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))
}

/// A numeric table read from CSV; `#` lines are skipped.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }
}

pub fn read_table(path: &Path) -> Result<Table> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(f);
    let columns: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for (k, rec) in r.records().enumerate() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::MalformedSeries(format!("row {}: {e}", k + 1)))?;
        if row.len() != columns.len() {
            return Err(Error::MalformedSeries(format!("row {} has {} fields", k + 1, row.len())));
        }
        rows.push(row);
    }
    Ok(Table { columns, rows })
}
