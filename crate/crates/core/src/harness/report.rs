use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ConeTrace, ExperimentConfig, Outcome, Results, Verdict};
use crate::error::{Error, Result};

/// One (cone, predicate) line of the flat defect table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub cone_id: String,
    pub predicate: String,
    pub defect: f64,
    pub verdict: Verdict,
}

/// Full record of an experiment run. Serializes with the config first, then
/// the outcome and the per-cone results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config: ExperimentConfig,
    pub outcome: Outcome,
    pub results: Results,
    #[serde(skip)]
    pub csv: Vec<CsvRow>,
    #[serde(skip)]
    pub trace: Option<Vec<ConeTrace>>,
}

impl Report {
    pub fn to_json(&self) -> Result<String> {
        let mut text = serde_json::to_string_pretty(self).map_err(|source| Error::Json {
            context: "report".into(),
            source,
        })?;
        text.push('\n');
        Ok(text)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        if self.csv.is_empty() {
            w.write_record(["cone_id", "predicate", "defect", "verdict"])
                .map_err(|e| Error::Precondition(format!("csv encoding failed: {e}")))?;
        }
        for row in &self.csv {
            w.serialize(row)
                .map_err(|e| Error::Precondition(format!("csv encoding failed: {e}")))?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| Error::Precondition(format!("csv encoding failed: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes the JSON report to `path`, plus the CSV table and the search trace
/// when the config names paths for them.
pub fn write_report(report: &Report, path: &Path) -> Result<()> {
    write(path, &report.to_json()?)?;
    if let Some(csv) = &report.config.csv {
        write(csv, &report.to_csv()?)?;
    }
    if let (Some(path), Some(trace)) = (&report.config.trace, &report.trace) {
        let text = serde_json::to_string_pretty(trace).map_err(|source| Error::Json {
            context: "search trace".into(),
            source,
        })?;
        write(path, &(text + "\n"))?;
    }
    Ok(())
}
