//! Pattern-level post-processing: peak normalization and the pattern error
//! metric used by the stirrer-shift study.

use std::ops::RangeInclusive;

use crate::error::{Error, Result};

// ── domain types ────────────────────────────────────────────────────────────

/// A monostatic RCS pattern: σ̂ versus aspect angle at one evaluation
/// frequency, with the per-angle fit diagnostics needed downstream.
#[derive(Debug, Clone, PartialEq)]
pub struct RcsPattern {
    angles_deg: Vec<f64>,
    sigma_m2: Vec<f64>,
    snr_db: Vec<f64>,
    failed_flags: Vec<bool>,
    frequency_hz: f64,
}

impl RcsPattern {
    /// Build a pattern; all sequences must have equal length, angles must be
    /// strictly increasing, σ values finite and ≥ 0.
    pub fn new(
        angles_deg: Vec<f64>,
        sigma_m2: Vec<f64>,
        snr_db: Vec<f64>,
        failed_flags: Vec<bool>,
        frequency_hz: f64,
    ) -> Result<RcsPattern> {
        if angles_deg.is_empty() {
            return Err(Error::data("an RCS pattern needs at least one angle"));
        }
        if sigma_m2.len() != angles_deg.len()
            || snr_db.len() != angles_deg.len()
            || failed_flags.len() != angles_deg.len()
        {
            return Err(Error::data(format!(
                "pattern sequences must run parallel: {} angles vs {} sigma, {} snr, {} flags",
                angles_deg.len(),
                sigma_m2.len(),
                snr_db.len(),
                failed_flags.len()
            )));
        }
        if angles_deg
            .windows(2)
            .any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less))
        {
            return Err(Error::data("pattern angles must be strictly increasing"));
        }
        if let Some(s) = sigma_m2.iter().find(|s| !s.is_finite() || **s < 0.0) {
            return Err(Error::data(format!("pattern sigma values must be finite and >= 0, got {s}")));
        }
        if !frequency_hz.is_finite() || frequency_hz <= 0.0 {
            return Err(Error::data(format!(
                "pattern evaluation frequency must be positive, got {frequency_hz}"
            )));
        }
        Ok(RcsPattern { angles_deg, sigma_m2, snr_db, failed_flags, frequency_hz })
    }

    /// Aspect angles, degrees (strictly increasing).
    pub fn angles_deg(&self) -> &[f64] {
        &self.angles_deg
    }

    /// Estimated RCS per angle, m².
    pub fn sigma_m2(&self) -> &[f64] {
        &self.sigma_m2
    }

    /// Matched-filter SNR per angle, dB.
    pub fn snr_db(&self) -> &[f64] {
        &self.snr_db
    }

    /// Per-angle detection-failure flags.
    pub fn failed_flags(&self) -> &[bool] {
        &self.failed_flags
    }

    /// Evaluation frequency of the pattern, Hz.
    pub fn frequency_hz(&self) -> f64 {
        self.frequency_hz
    }

    /// Number of angles.
    pub fn len(&self) -> usize {
        self.angles_deg.len()
    }

    /// True when the pattern holds no angles (unreachable via `new`).
    pub fn is_empty(&self) -> bool {
        self.angles_deg.is_empty()
    }
}

/// Outcome of a pattern comparison: the mean relative error over compared
/// angles and how many in-range angles the failure flags excluded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorSummary {
    /// Mean of |σ_test − σ_ref|/σ_ref over compared angles.
    pub mean: f64,
    /// In-range angles dropped because either pattern flagged them failed.
    pub n_excluded: usize,
}

// ── operations ──────────────────────────────────────────────────────────────

/// Scale a measured pattern so its maximum equals the theoretical peak RCS.
///
/// All σ values (including failed ones) are multiplied by
/// `sigma_theory_peak / max(non-failed σ)`; the non-failed maximum itself is
/// then assigned `sigma_theory_peak` outright, so the output peak equals the
/// theory value exactly rather than to rounding. Other non-failed entries are
/// capped at the peak (a one-ulp guard for near-ties; real data never hits
/// it). Shape is preserved: σ(θᵢ)/σ(θⱼ) ratios change by at most rounding.
///
/// Errors when every entry is failed or the non-failed maximum is not
/// positive.
pub fn normalize_pattern(pattern: &RcsPattern, sigma_theory_peak: f64) -> Result<RcsPattern> {
    if !sigma_theory_peak.is_finite() || sigma_theory_peak <= 0.0 {
        return Err(Error::config(format!(
            "theory peak must be finite and > 0, got {sigma_theory_peak}"
        )));
    }
    let mut max_val = f64::NEG_INFINITY;
    let mut max_idx = None;
    for (i, (&s, &failed)) in pattern.sigma_m2.iter().zip(&pattern.failed_flags).enumerate() {
        if !failed && s > max_val {
            max_val = s;
            max_idx = Some(i);
        }
    }
    let max_idx = max_idx.ok_or_else(|| {
        Error::data("cannot normalize a pattern whose extractions all failed")
    })?;
    if max_val <= 0.0 {
        return Err(Error::data("cannot normalize a pattern whose maximum RCS is zero"));
    }

    let scale = sigma_theory_peak / max_val;
    let sigma: Vec<f64> = pattern
        .sigma_m2
        .iter()
        .zip(&pattern.failed_flags)
        .enumerate()
        .map(|(i, (&s, &failed))| {
            if i == max_idx {
                sigma_theory_peak
            } else if failed {
                s * scale
            } else {
                (s * scale).min(sigma_theory_peak)
            }
        })
        .collect();

    RcsPattern::new(
        pattern.angles_deg.clone(),
        sigma,
        pattern.snr_db.clone(),
        pattern.failed_flags.clone(),
        pattern.frequency_hz,
    )
}

/// Mean relative error of a test pattern against a reference over an angle
/// range: mean over in-range angles, excluding those flagged failed in either
/// pattern, of |σ_test(θ) − σ_ref(θ)|/σ_ref(θ).
///
/// Deliberately asymmetric — the denominator is always the reference (the
/// same-stirrer-position pattern in the shift study). Angle grids must be
/// identical; errors when no compared angle survives the range and failure
/// filters or when the reference is not positive at a compared angle.
pub fn mean_relative_error(
    test: &RcsPattern,
    reference: &RcsPattern,
    angle_range_deg: RangeInclusive<f64>,
) -> Result<ErrorSummary> {
    if test.angles_deg != reference.angles_deg {
        return Err(Error::data(
            "mean_relative_error requires identical angle grids in test and reference",
        ));
    }
    let mut sum = 0.0;
    let mut n = 0usize;
    let mut n_excluded = 0usize;
    for i in 0..test.len() {
        let angle = test.angles_deg[i];
        if !angle_range_deg.contains(&angle) {
            continue;
        }
        if test.failed_flags[i] || reference.failed_flags[i] {
            n_excluded += 1;
            continue;
        }
        let s_ref = reference.sigma_m2[i];
        if s_ref <= 0.0 {
            return Err(Error::data(format!(
                "reference RCS must be positive at compared angles; got {s_ref} at {angle}°"
            )));
        }
        sum += (test.sigma_m2[i] - s_ref).abs() / s_ref;
        n += 1;
    }
    if n == 0 {
        return Err(Error::data(
            "no overlapping valid angles between test and reference patterns",
        ));
    }
    Ok(ErrorSummary { mean: sum / n as f64, n_excluded })
}

// ── tests ───────────────────────────────────────────────────────────────────
