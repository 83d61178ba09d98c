//! Frequency-domain data model shared by every module.
//!
//! A monostatic measurement is a complex reflection coefficient sampled on a
//! uniform frequency grid. [`FrequencyGrid`] carries the grid, [`ComplexSpectrum`]
//! pairs it with one complex sample per grid point, and [`SPEED_OF_LIGHT`] is the
//! single source of truth for every wavelength and phase computation.
//!
//! All types are immutable value data after construction and can be shared
//! freely across worker threads.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Speed of light in vacuum, m/s (exact by SI definition).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Free-space wavelength λ = c/f in meters.
///
/// Rejects non-positive or non-finite frequencies.
pub fn wavelength(f_hz: f64) -> Result<f64> {
    if !f_hz.is_finite() || f_hz <= 0.0 {
        return Err(Error::config(format!(
            "wavelength requires a finite frequency > 0 Hz, got {f_hz}"
        )));
    }
    Ok(SPEED_OF_LIGHT / f_hz)
}

// ── frequency grid ──────────────────────────────────────────────────────────

/// A uniform frequency grid over `[f_start, f_stop]` with `n_points` samples.
///
/// Sample `k` sits at `f_start + k·(f_stop − f_start)/(n_points − 1)`, computed
/// by the affine formula (never by repeated addition) so endpoints are exact
/// and there is no accumulation drift.
///
/// A degenerate single-point grid (`n_points == 1`, `f_start == f_stop`) exists
/// only to represent one-line Touchstone files; [`make_grid`] itself requires
/// at least two points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyGrid {
    f_start_hz: f64,
    f_stop_hz: f64,
    n_points: usize,
}

/// Build a uniform [`FrequencyGrid`].
///
/// Rejects non-finite or non-positive bounds, inverted bounds, and `n_points < 2`.
pub fn make_grid(f_start_hz: f64, f_stop_hz: f64, n_points: usize) -> Result<FrequencyGrid> {
    if !f_start_hz.is_finite() || !f_stop_hz.is_finite() {
        return Err(Error::config("grid bounds must be finite"));
    }
    if f_start_hz <= 0.0 {
        return Err(Error::config(format!(
            "grid.f_start_hz must be > 0, got {f_start_hz}"
        )));
    }
    if f_start_hz >= f_stop_hz {
        return Err(Error::config(format!(
            "grid requires f_start < f_stop, got {f_start_hz} .. {f_stop_hz}"
        )));
    }
    if n_points < 2 {
        return Err(Error::config(format!(
            "grid.n_points must be >= 2, got {n_points}"
        )));
    }
    Ok(FrequencyGrid { f_start_hz, f_stop_hz, n_points })
}

impl FrequencyGrid {
    /// Degenerate single-sample grid; used by the Touchstone reader for
    /// one-line files, unreachable through [`make_grid`].
    pub(crate) fn single(f_hz: f64) -> FrequencyGrid {
        FrequencyGrid { f_start_hz: f_hz, f_stop_hz: f_hz, n_points: 1 }
    }

    /// First sample frequency in Hz.
    pub fn f_start_hz(&self) -> f64 {
        self.f_start_hz
    }

    /// Last sample frequency in Hz.
    pub fn f_stop_hz(&self) -> f64 {
        self.f_stop_hz
    }

    /// Number of samples.
    pub fn n_points(&self) -> usize {
        self.n_points
    }

    /// Band width `f_stop − f_start` in Hz.
    pub fn bandwidth_hz(&self) -> f64 {
        self.f_stop_hz - self.f_start_hz
    }

    /// Band-center frequency `(f_start + f_stop)/2` in Hz.
    pub fn center_hz(&self) -> f64 {
        0.5 * (self.f_start_hz + self.f_stop_hz)
    }

    /// Grid spacing in Hz (0 for the degenerate single-point grid).
    pub fn step_hz(&self) -> f64 {
        if self.n_points < 2 {
            0.0
        } else {
            (self.f_stop_hz - self.f_start_hz) / (self.n_points - 1) as f64
        }
    }

    /// Frequency of sample `k` by the affine formula, with both endpoints
    /// reproduced exactly (the affine form can be one rounding step off at
    /// the last sample; file round trips rely on exact endpoints).
    pub fn sample_hz(&self, k: usize) -> f64 {
        debug_assert!(k < self.n_points);
        if self.n_points < 2 {
            return self.f_start_hz;
        }
        if k == self.n_points - 1 {
            return self.f_stop_hz;
        }
        self.f_start_hz
            + k as f64 * (self.f_stop_hz - self.f_start_hz) / (self.n_points - 1) as f64
    }

    /// Iterator over all sample frequencies.
    pub fn frequencies(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |k| self.sample_hz(k))
    }
}

// ── complex spectrum ────────────────────────────────────────────────────────

/// A dimensionless complex reflection coefficient sampled on a [`FrequencyGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSpectrum {
    grid: FrequencyGrid,
    values: Vec<Complex64>,
}

impl ComplexSpectrum {
    /// Pair a grid with one complex value per sample.
    ///
    /// Rejects length mismatches and non-finite values.
    pub fn new(grid: FrequencyGrid, values: Vec<Complex64>) -> Result<ComplexSpectrum> {
        if values.len() != grid.n_points() {
            return Err(Error::data(format!(
                "spectrum has {} values for a {}-point grid",
                values.len(),
                grid.n_points()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::data(format!("spectrum contains a non-finite value {v}")));
        }
        Ok(ComplexSpectrum { grid, values })
    }

    /// Constant-valued spectrum on `grid`.
    pub fn constant(grid: FrequencyGrid, value: Complex64) -> Result<ComplexSpectrum> {
        ComplexSpectrum::new(grid, vec![value; grid.n_points()])
    }

    /// The underlying grid.
    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    /// The complex samples, one per grid point.
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Number of samples.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// True when the spectrum has no samples (unreachable via the constructors).
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Iterator over `(frequency, value)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (f64, Complex64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(k, v)| (self.grid.sample_hz(k), *v))
    }
}

/// Check two grids for exact equality, with a descriptive error on mismatch.
pub(crate) fn require_same_grid(a: &FrequencyGrid, b: &FrequencyGrid, context: &str) -> Result<()> {
    if a != b {
        return Err(Error::data(format!(
            "{context}: frequency grids differ \
             ({} .. {} Hz, {} points vs {} .. {} Hz, {} points)",
            a.f_start_hz(),
            a.f_stop_hz(),
            a.n_points(),
            b.f_start_hz(),
            b.f_stop_hz(),
            b.n_points()
        )));
    }
    Ok(())
}

// ── tests ───────────────────────────────────────────────────────────────────
