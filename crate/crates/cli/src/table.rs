//! Result tables and their CSV form.

use std::fs;
use std::path::Path;

use crate::config::ExperimentConfig;
use crate::LabError;

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    /// File stem, e.g. `fig1_summary`.
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// Comment lines, written without the leading `# `.
    pub provenance: Vec<String>,
}

impl ResultTable {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            provenance: Vec::new(),
        }
    }

    pub fn with_columns(name: impl Into<String>, columns: Vec<String>) -> Self {
        Self { name: name.into(), columns, rows: Vec::new(), provenance: Vec::new() }
    }

    /// Appends a row, refusing NaN/Inf and width mismatches.
    pub fn push(&mut self, row: Vec<f64>) -> Result<(), LabError> {
        if row.len() != self.columns.len() {
            return Err(LabError::Contract(format!(
                "{}: row has {} values for {} columns",
                self.name,
                row.len(),
                self.columns.len()
            )));
        }
        if let Some((i, v)) = row.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(LabError::NonFinite(format!(
                "{}: row {} column {} is {v}",
                self.name,
                self.rows.len(),
                self.columns[i]
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    /// Standard header: experiment, anchor, version, hash, config echo, plus `notes`.
    pub fn stamp(&mut self, cfg: &ExperimentConfig, notes: &[String]) {
        let mut lines = vec![
            format!("experiment: {}", cfg.experiment.name()),
            format!("anchor: {}", cfg.experiment.anchor()),
            format!("zeno-lab version: {}", env!("CARGO_PKG_VERSION")),
            format!("config hash: sha256:{}", cfg.hash()),
        ];
        lines.extend(cfg.echo().into_iter().map(|(k, v)| format!("config {k} = {v}")));
        lines.extend(notes.iter().cloned());
        self.provenance = lines;
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    /// The CSV bytes: `#` provenance lines, header, `{:.14e}` values, LF newlines.
    pub fn to_csv(&self) -> Result<Vec<u8>, LabError> {
        let mut out = Vec::new();
        for line in &self.provenance {
            if line.contains('\n') {
                return Err(LabError::Contract(format!("{}: provenance line spans lines", self.name)));
            }
            out.extend_from_slice(format!("# {line}\n").as_bytes());
        }
        let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        let csv_err = |e: csv::Error| LabError::Contract(format!("csv encoding: {e}"));
        writer.write_record(&self.columns).map_err(csv_err)?;
        for row in &self.rows {
            if row.iter().any(|v| !v.is_finite()) {
                return Err(LabError::NonFinite(format!("{}: refusing to write a non-finite row", self.name)));
            }
            writer.write_record(row.iter().map(|v| format!("{v:.14e}"))).map_err(csv_err)?;
        }
        writer.into_inner().map_err(|e| LabError::Contract(format!("csv encoding: {e}")))
    }
}

/// Writes `table` to `path`, validating every row first.
pub fn emit_csv(table: &ResultTable, path: &Path) -> Result<(), LabError> {
    let bytes = table.to_csv()?;
    fs::write(path, bytes).map_err(|source| LabError::Io { path: path.to_path_buf(), source })
}
