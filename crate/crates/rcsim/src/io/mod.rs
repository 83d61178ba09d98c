//! Data ingestion and persistence: Touchstone one-port files for measured
//! reflection coefficients, CSV result tables, and the JSON experiment
//! configuration.

pub mod config;
pub mod csv;
pub mod touchstone;

pub use config::{
    load_config, AntennaConfig, ChamberConfig, ExperimentConfig, ExtractionConfig,
    GeometryConfig, GridConfig, SfsSpec, SweepConfig, TargetConfig,
};
pub use csv::{
    pattern_to_csv, write_pattern_csv, write_shift_summary_csv, write_waveform_csv,
    ShiftSummaryRow,
};
pub use touchstone::{read_touchstone_1port, write_touchstone_1port};

use std::path::Path;

use crate::error::{Error, Result};

/// Read a whole text file, attaching the path to any I/O failure.
pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Write a whole text file, creating parent directories as needed and
/// attaching the path to any I/O failure.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
