//! CSV result tables: pattern files, difference waveforms, and shift-sweep
//! summaries.
//!
//! All numeric cells use Rust's shortest-round-trip float formatting, so the
//! files are byte-deterministic functions of the computed values (a pillar of
//! the cross-parallelism determinism guarantee) while staying human-readable.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::Result;
use crate::metrics::RcsPattern;
use crate::spectra::ComplexSpectrum;

/// One aggregated row of a shift-sweep summary table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftSummaryRow {
    /// Stirrer shift between the loaded and empty measurements, degrees.
    pub shift_deg: f64,
    /// Pattern error vs the shift-0 reference, aggregated over seeds
    /// (+∞ when every seed lost all angles to failed extractions).
    pub mean_rel_error: f64,
    /// Failed-extraction count per pattern, aggregated over seeds.
    pub n_failed_angles: f64,
}

/// Render a pattern as CSV: `angle_deg,sigma_m2,sigma_dbsm,snr_db,failed`.
///
/// dBsm = 10·log₁₀(σ/1 m²); failed rows keep their untrusted σ̂ and carry
/// failed=1. A zero σ̂ renders dBsm as `-inf`.
pub fn pattern_to_csv(pattern: &RcsPattern) -> String {
    let mut out = String::from("angle_deg,sigma_m2,sigma_dbsm,snr_db,failed\n");
    for i in 0..pattern.len() {
        let sigma = pattern.sigma_m2()[i];
        let dbsm = 10.0 * sigma.log10();
        writeln!(
            out,
            "{},{},{},{},{}",
            pattern.angles_deg()[i],
            sigma,
            dbsm,
            pattern.snr_db()[i],
            u8::from(pattern.failed_flags()[i]),
        )
        .expect("string write");
    }
    out
}

/// Write a pattern CSV file (see [`pattern_to_csv`] for the schema).
pub fn write_pattern_csv(pattern: &RcsPattern, path: &Path) -> Result<()> {
    super::write_text(path, &pattern_to_csv(pattern))
}

/// Write the real part of a complex spectrum versus frequency
/// (`frequency_hz,re_diff`) — the oscillatory difference-waveform record.
pub fn write_waveform_csv(spectrum: &ComplexSpectrum, path: &Path) -> Result<()> {
    let mut out = String::from("frequency_hz,re_diff\n");
    for (f, v) in spectrum.iter() {
        writeln!(out, "{},{}", f, v.re).expect("string write");
    }
    super::write_text(path, &out)
}

/// Write a shift-sweep summary table (`shift_deg,mean_rel_error,n_failed_angles`).
pub fn write_shift_summary_csv(rows: &[ShiftSummaryRow], path: &Path) -> Result<()> {
    let mut out = String::from("shift_deg,mean_rel_error,n_failed_angles\n");
    for r in rows {
        writeln!(out, "{},{},{}", r.shift_deg, r.mean_rel_error, r.n_failed_angles)
            .expect("string write");
    }
    super::write_text(path, &out)
}

// ── tests ───────────────────────────────────────────────────────────────────
