//! Experiment orchestration: the same-position pattern study, the
//! stirrer-shift sweep, and ingestion of measured Touchstone file pairs.
//!
//! # Reproducibility
//!
//! Every random draw descends from the configured `base_seed` through a pure
//! derivation chain:
//!
//! ```text
//! cell_seed  = mix(mix(base_seed, angle_index), trial_index)
//! field_seed = mix(cell_seed, stream)        stream 0: empty-chamber field F
//!                                            stream 1: target perturbation G
//! mix(s, i)  = splitmix64(s XOR splitmix64(i))
//! ```
//!
//! so any parallel schedule reproduces the same numbers and output files are
//! byte-identical across `--jobs` settings. The derivation rule is recorded in
//! each run's `run-meta.json`.
//!
//! # Common random numbers in the shift sweep
//!
//! For one (angle, trial) cell the loaded measurement (stirrer at 0°) and the
//! underlying empty-chamber field realization F are built once; each stirrer
//! shift only re-evaluates F at its own angle. Shift = 0 therefore reproduces
//! the reference pattern exactly (zero error by construction), and the error
//! growth across shifts is paired rather than masked by independent noise —
//! the variance-reduction trick that makes the monotonicity of the shift
//! study visible at moderate seed counts.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::chamber::{
    derive_seed, empty_values, loaded_values, target_transfer, AntennaModel, ChamberModel,
    HarmonicSpectrum, StirredField, STREAM_EMPTY_FIELD, STREAM_TARGET_FIELD,
};
use crate::error::{Error, Result};
use crate::extract::{difference, estimate_sfs, extract_rcs, ExtractOptions, ExtractionResult};
use crate::io::{
    read_text, read_touchstone_1port, write_pattern_csv, write_shift_summary_csv, write_text,
    write_waveform_csv, ExperimentConfig, SfsSpec, ShiftSummaryRow,
};
use crate::metrics::{mean_relative_error, normalize_pattern, RcsPattern};
use crate::spectra::{make_grid, ComplexSpectrum, FrequencyGrid};
use crate::target::{plate_rcs_pattern, plate_rcs_peak, MeasurementGeometry, PlateTarget};

/// Scattering phase injected into every synthetic target echo. The extraction
/// estimates it blindly; a fixed value keeps runs reproducible.
const TARGET_PHI0_RAD: f64 = 0.0;

/// Stirrer angle of the loaded (target-present) measurement in all studies.
const LOADED_STIRRER_DEG: f64 = 0.0;

/// Textual form of the seed chain, recorded in run metadata.
const SEED_RULE: &str = "cell_seed = mix(mix(base_seed, angle_index), trial_index); \
     field_seed = mix(cell_seed, stream); mix(s, i) = splitmix64(s XOR splitmix64(i))";

// ── model construction ──────────────────────────────────────────────────────

/// Build the antenna model a config describes, with S_FS resampled onto the
/// experiment grid (file-based S_FS may live on its own grid; values are exact
/// at shared samples and linearly interpolated between).
pub fn resolve_antenna(config: &ExperimentConfig, grid: &FrequencyGrid) -> Result<AntennaModel> {
    let gain = config.antenna.gain_dbi;
    let efficiency = config.antenna.efficiency;
    match config.antenna.synthesis_sfs() {
        SfsSpec::Constant { re, im } => {
            AntennaModel::with_constant_sfs(*grid, Complex64::new(re, im), gain, efficiency)
        }
        SfsSpec::File { path } => {
            let text = read_text(Path::new(&path))?;
            let file_sfs = read_touchstone_1port(&text).map_err(|e| e.context(&path))?;
            let probe = AntennaModel::new(file_sfs, gain, efficiency).map_err(|e| e.context(&path))?;
            let values: Vec<Complex64> = grid.frequencies().map(|f| probe.s_fs_at(f)).collect();
            AntennaModel::new(ComplexSpectrum::new(*grid, values)?, gain, efficiency)
        }
    }
}

/// Everything a simulation study needs, resolved once from the config.
struct SimulationContext {
    grid: FrequencyGrid,
    antenna: AntennaModel,
    chamber: ChamberModel,
    harmonics: HarmonicSpectrum,
    plate: PlateTarget,
    distance_m: f64,
    angles_deg: Vec<f64>,
    /// Injected true RCS per aspect angle (physical-optics value at band
    /// center — the extraction estimates a spot-frequency σ).
    sigma_true_m2: Vec<f64>,
    options: ExtractOptions,
    base_seed: u64,
}

impl SimulationContext {
    fn new(config: &ExperimentConfig) -> Result<SimulationContext> {
        let grid = make_grid(config.grid.f_start_hz, config.grid.f_stop_hz, config.grid.n_points)?;
        let antenna = resolve_antenna(config, &grid)?;
        let chamber = ChamberModel::new(
            config.chamber.h_sigma,
            config.chamber.theta_c_deg,
            config.chamber.rho_target,
            config.chamber.freq_correlated,
            config.chamber.coherence_bw_hz,
        )?;
        let harmonics = HarmonicSpectrum::new(chamber.theta_c_deg())?;
        let plate = PlateTarget::new(config.target.width_m, config.target.height_m)?;
        let angles_deg = config.sweep.angles_deg();
        let f_center = grid.center_hz();
        let sigma_true_m2: Vec<f64> = angles_deg
            .iter()
            .map(|&a| plate_rcs_pattern(&plate, f_center, a))
            .collect::<Result<_>>()?;
        Ok(SimulationContext {
            grid,
            antenna,
            chamber,
            harmonics,
            plate,
            distance_m: config.geometry.distance_m,
            angles_deg,
            sigma_true_m2,
            options: ExtractOptions {
                r_window_m: config.extraction.r_window_m,
                snr_threshold_db: config.extraction.snr_threshold_db,
            },
            base_seed: config.sweep.base_seed,
        })
    }

    fn n_angles(&self) -> usize {
        self.angles_deg.len()
    }

    fn cell_seed(&self, angle_idx: usize, trial: usize) -> u64 {
        derive_seed(derive_seed(self.base_seed, angle_idx as u64), trial as u64)
    }

    /// Index of the sweep angle closest to boresight (used for the waveform
    /// record).
    fn boresight_idx(&self) -> usize {
        let mut best = 0;
        for (i, a) in self.angles_deg.iter().enumerate() {
            if a.abs() < self.angles_deg[best].abs() {
                best = i;
            }
        }
        best
    }

    /// Run one (angle, trial) cell against a list of stirrer shifts; the
    /// loaded measurement and empty-chamber field are shared across shifts.
    fn extract_cell(
        &self,
        angle_idx: usize,
        trial: usize,
        shifts_deg: &[f64],
    ) -> Result<Vec<ExtractionResult>> {
        let cell = CellMeasurement::new(self, angle_idx, trial)?;
        let geometry = MeasurementGeometry::new(self.distance_m, self.angles_deg[angle_idx])?;
        shifts_deg
            .iter()
            .map(|&shift| {
                let empty = cell.empty_at(shift)?;
                extract_rcs(&cell.loaded, &empty, &self.antenna, &geometry, &self.options)
            })
            .collect()
    }

    /// Assemble one pattern from per-angle cell results at a fixed shift slot.
    fn assemble_pattern(
        &self,
        cells: &[Vec<ExtractionResult>],
        shift_slot: usize,
        stride: usize,
        trial: usize,
    ) -> Result<RcsPattern> {
        let mut sigma = Vec::with_capacity(self.n_angles());
        let mut snr = Vec::with_capacity(self.n_angles());
        let mut failed = Vec::with_capacity(self.n_angles());
        for i in 0..self.n_angles() {
            let fit = &cells[i * stride + trial][shift_slot];
            sigma.push(fit.sigma_hat_m2);
            snr.push(fit.snr_db);
            failed.push(fit.failed);
        }
        RcsPattern::new(self.angles_deg.clone(), sigma, snr, failed, self.grid.center_hz())
    }
}

/// One cell's synthesized measurements: the loaded spectrum (stirrer at 0°)
/// plus the field realization from which empties at any shift derive.
struct CellMeasurement<'a> {
    ctx: &'a SimulationContext,
    f_field: StirredField,
    loaded: ComplexSpectrum,
}

impl<'a> CellMeasurement<'a> {
    fn new(ctx: &'a SimulationContext, angle_idx: usize, trial: usize) -> Result<Self> {
        let seed = ctx.cell_seed(angle_idx, trial);
        let f_field = StirredField::with_spectrum(
            &ctx.chamber,
            &ctx.grid,
            &ctx.harmonics,
            derive_seed(seed, STREAM_EMPTY_FIELD),
        );
        let g_field = StirredField::with_spectrum(
            &ctx.chamber,
            &ctx.grid,
            &ctx.harmonics,
            derive_seed(seed, STREAM_TARGET_FIELD),
        );
        let h_t = target_transfer(
            &f_field.eval(LOADED_STIRRER_DEG),
            &g_field.eval(LOADED_STIRRER_DEG),
            ctx.chamber.rho_target(),
        );
        let loaded = ComplexSpectrum::new(
            ctx.grid,
            loaded_values(
                &ctx.antenna,
                &ctx.grid,
                &h_t,
                ctx.sigma_true_m2[angle_idx],
                ctx.distance_m,
                TARGET_PHI0_RAD,
            ),
        )?;
        Ok(CellMeasurement { ctx, f_field, loaded })
    }

    fn empty_at(&self, shift_deg: f64) -> Result<ComplexSpectrum> {
        ComplexSpectrum::new(
            self.ctx.grid,
            empty_values(&self.ctx.antenna, &self.f_field.eval(shift_deg)),
        )
    }
}

// ── single-trial simulation API ─────────────────────────────────────────────

/// Simulate one full pattern (same stirrer position for loaded and empty) for
/// a given trial index. Deterministic in `(config, trial)`.
pub fn simulate_pattern(config: &ExperimentConfig, trial: usize) -> Result<RcsPattern> {
    Ok(simulate_shift_patterns(config, trial, &[0.0])?.pop().expect("one shift in, one pattern out"))
}

/// Simulate one pattern per stirrer shift for a given trial, sharing the
/// loaded measurement and the empty-chamber field across shifts (common
/// random numbers).
pub fn simulate_shift_patterns(
    config: &ExperimentConfig,
    trial: usize,
    shifts_deg: &[f64],
) -> Result<Vec<RcsPattern>> {
    let ctx = SimulationContext::new(config)?;
    let cells: Vec<Vec<ExtractionResult>> = (0..ctx.n_angles())
        .map(|i| ctx.extract_cell(i, trial, shifts_deg))
        .collect::<Result<_>>()?;
    (0..shifts_deg.len())
        .map(|slot| ctx.assemble_pattern(&cells, slot, 1, 0))
        .collect()
}

/// The loaded-minus-empty difference spectrum at the aspect angle closest to
/// boresight, same stirrer position, for a given trial — the oscillatory
/// waveform record.
pub fn boresight_waveform(config: &ExperimentConfig, trial: usize) -> Result<ComplexSpectrum> {
    let ctx = SimulationContext::new(config)?;
    let cell = CellMeasurement::new(&ctx, ctx.boresight_idx(), trial)?;
    let empty = cell.empty_at(LOADED_STIRRER_DEG)?;
    Ok(difference(&cell.loaded, &empty)?.spectrum().clone())
}

// ── orchestrated runs ───────────────────────────────────────────────────────

/// Run a closure on a dedicated thread pool when a job count is given, or on
/// the global pool otherwise.
fn with_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::config(format!("cannot build a {n}-thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

#[derive(Serialize)]
struct SeedStreams {
    empty_field: u64,
    target_field: u64,
}

#[derive(Serialize)]
struct SeedDerivation {
    base_seed: u64,
    rule: &'static str,
    streams: SeedStreams,
}

#[derive(Serialize)]
struct RunMeta<'a> {
    command: &'a str,
    config: &'a ExperimentConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed_derivation: Option<SeedDerivation>,
}

/// Write `run-meta.json`: the resolved config plus the seed-derivation rule,
/// making every output directory self-describing and reproducible.
fn write_run_meta(
    out_dir: &Path,
    command: &str,
    config: &ExperimentConfig,
    seeded: bool,
) -> Result<()> {
    let meta = RunMeta {
        command,
        config,
        seed_derivation: seeded.then_some(SeedDerivation {
            base_seed: config.sweep.base_seed,
            rule: SEED_RULE,
            streams: SeedStreams {
                empty_field: STREAM_EMPTY_FIELD,
                target_field: STREAM_TARGET_FIELD,
            },
        }),
    };
    let text = serde_json::to_string_pretty(&meta).expect("metadata serializes") + "\n";
    write_text(&out_dir.join("run-meta.json"), &text)
}

/// Same-position pattern study (trial 0): extract σ̂(θ) over the sweep,
/// normalize to the plate's theoretical peak at band center, and write
/// `pattern.csv`, the boresight `waveform.csv`, and `run-meta.json`.
///
/// Returns the normalized pattern.
pub fn run_pattern_experiment(
    config: &ExperimentConfig,
    out_dir: &Path,
    jobs: Option<usize>,
) -> Result<RcsPattern> {
    let ctx = SimulationContext::new(config)?;
    let cells: Vec<Vec<ExtractionResult>> = with_pool(jobs, || {
        (0..ctx.n_angles())
            .into_par_iter()
            .map(|i| ctx.extract_cell(i, 0, &[LOADED_STIRRER_DEG]))
            .collect::<Result<_>>()
    })??;
    let raw = ctx.assemble_pattern(&cells, 0, 1, 0)?;
    let theory_peak = plate_rcs_peak(&ctx.plate, ctx.grid.center_hz());
    let pattern = normalize_pattern(&raw, theory_peak)?;

    write_pattern_csv(&pattern, &out_dir.join("pattern.csv"))?;
    let waveform = boresight_waveform(config, 0)?;
    write_waveform_csv(&waveform, &out_dir.join("waveform.csv"))?;
    write_run_meta(out_dir, "simulate-pattern", config, true)?;
    Ok(pattern)
}

/// Aggregated outcome of a shift sweep: one row per configured shift, as
/// means and as medians over the trials.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftSweepSummary {
    pub means: Vec<ShiftSummaryRow>,
    pub medians: Vec<ShiftSummaryRow>,
}

/// Median of a sample; +∞ sentinels participate as ordinary upper-tail
/// values. The slice must be non-empty and NaN-free.
fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).expect("no NaN in medians"));
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Stirrer-shift study: loaded measurements fixed at stirrer 0°, empty
/// measurements at each shift of the configured list; per trial, every
/// shifted pattern is scored against that trial's shift-0 pattern with the
/// mean-relative-error metric over the full sweep range.
///
/// Writes `shift-summary.csv` (means over trials), `shift-summary-medians.csv`
/// (medians), and `run-meta.json`; returns both aggregations. A trial whose
/// comparison has no surviving angles (all failed) contributes the +∞
/// sentinel.
pub fn run_shift_sweep(
    config: &ExperimentConfig,
    out_dir: &Path,
    jobs: Option<usize>,
) -> Result<ShiftSweepSummary> {
    let ctx = SimulationContext::new(config)?;
    let shifts = &config.sweep.shift_list_deg;
    // Evaluation list: the configured shifts, with a shift-0 reference
    // prepended when the list lacks one.
    let (eval_shifts, ref_slot, out_offset): (Vec<f64>, usize, usize) =
        match shifts.iter().position(|&s| s == 0.0) {
            Some(p) => (shifts.clone(), p, 0),
            None => (
                std::iter::once(0.0).chain(shifts.iter().copied()).collect(),
                0,
                1,
            ),
        };

    let n_angles = ctx.n_angles();
    let n_trials = config.sweep.n_seeds;
    let cells: Vec<Vec<ExtractionResult>> = with_pool(jobs, || {
        (0..n_angles * n_trials)
            .into_par_iter()
            .map(|idx| ctx.extract_cell(idx / n_trials, idx % n_trials, &eval_shifts))
            .collect::<Result<_>>()
    })??;

    let full_range = *ctx.angles_deg.first().expect("validated sweep")
        ..=*ctx.angles_deg.last().expect("validated sweep");
    let mut mre = vec![vec![0.0_f64; n_trials]; shifts.len()];
    let mut failed_counts = vec![vec![0.0_f64; n_trials]; shifts.len()];
    for trial in 0..n_trials {
        let reference = ctx.assemble_pattern(&cells, ref_slot, n_trials, trial)?;
        for (k, _) in shifts.iter().enumerate() {
            let pattern = ctx.assemble_pattern(&cells, k + out_offset, n_trials, trial)?;
            mre[k][trial] = match mean_relative_error(&pattern, &reference, full_range.clone()) {
                Ok(summary) => summary.mean,
                Err(_) => f64::INFINITY,
            };
            failed_counts[k][trial] =
                pattern.failed_flags().iter().filter(|&&f| f).count() as f64;
        }
    }

    let mut means = Vec::with_capacity(shifts.len());
    let mut medians = Vec::with_capacity(shifts.len());
    for (k, &shift) in shifts.iter().enumerate() {
        let mean_err = mre[k].iter().sum::<f64>() / n_trials as f64;
        let mean_failed = failed_counts[k].iter().sum::<f64>() / n_trials as f64;
        means.push(ShiftSummaryRow {
            shift_deg: shift,
            mean_rel_error: mean_err,
            n_failed_angles: mean_failed,
        });
        medians.push(ShiftSummaryRow {
            shift_deg: shift,
            mean_rel_error: median(&mut mre[k]),
            n_failed_angles: median(&mut failed_counts[k]),
        });
    }

    write_shift_summary_csv(&means, &out_dir.join("shift-summary.csv"))?;
    write_shift_summary_csv(&medians, &out_dir.join("shift-summary-medians.csv"))?;
    write_run_meta(out_dir, "shift-sweep", config, true)?;
    Ok(ShiftSweepSummary { means, medians })
}

// ── measured-file ingestion ─────────────────────────────────────────────────

/// Extract a pattern from measured Touchstone file pairs.
///
/// File order defines the aspect angles via the config sweep (pair count must
/// match the sweep's angle count). S_FS comes from the config when specified;
/// otherwise it is estimated as the mean of all empty-chamber files. The
/// pattern is left unnormalized unless `normalize_theory` is set, in which
/// case it is scaled to the configured plate's theoretical peak at band
/// center. Writes the same artifact set as the pattern study.
pub fn run_from_measurements(
    empty_paths: &[PathBuf],
    loaded_paths: &[PathBuf],
    config: &ExperimentConfig,
    out_dir: &Path,
    normalize_theory: bool,
) -> Result<RcsPattern> {
    if empty_paths.is_empty() {
        return Err(Error::config("at least one empty/loaded file pair is required"));
    }
    if empty_paths.len() != loaded_paths.len() {
        return Err(Error::config(format!(
            "got {} empty files but {} loaded files; the lists must pair up",
            empty_paths.len(),
            loaded_paths.len()
        )));
    }
    let angles = config.sweep.angles_deg();
    if angles.len() != empty_paths.len() {
        return Err(Error::config(format!(
            "the sweep defines {} aspect angles but {} file pairs were given",
            angles.len(),
            empty_paths.len()
        )));
    }

    let read_s1p = |path: &PathBuf| -> Result<ComplexSpectrum> {
        read_touchstone_1port(&read_text(path)?).map_err(|e| e.context(path.display()))
    };
    let empties: Vec<ComplexSpectrum> = empty_paths.iter().map(read_s1p).collect::<Result<_>>()?;
    let loadeds: Vec<ComplexSpectrum> = loaded_paths.iter().map(read_s1p).collect::<Result<_>>()?;

    let grid = *empties[0].grid();
    for (i, spectrum) in empties.iter().enumerate() {
        if spectrum.grid() != &grid {
            return Err(Error::data(format!(
                "grid of '{}' does not match grid of '{}'",
                empty_paths[i].display(),
                empty_paths[0].display()
            )));
        }
    }
    for (i, spectrum) in loadeds.iter().enumerate() {
        if spectrum.grid() != &grid {
            return Err(Error::data(format!(
                "grid of '{}' does not match grid of its empty pair '{}'",
                loaded_paths[i].display(),
                empty_paths[i].display()
            )));
        }
    }

    // Antenna: configured S_FS if present, else the stirred-ensemble estimate
    // from the empty files.
    let antenna = match &config.antenna.s_fs {
        Some(_) => resolve_antenna(config, &grid)?,
        None => {
            let s_fs = estimate_sfs(&empties)?;
            AntennaModel::new(s_fs, config.antenna.gain_dbi, config.antenna.efficiency)?
        }
    };

    let options = ExtractOptions {
        r_window_m: config.extraction.r_window_m,
        snr_threshold_db: config.extraction.snr_threshold_db,
    };
    let mut sigma = Vec::with_capacity(angles.len());
    let mut snr = Vec::with_capacity(angles.len());
    let mut failed = Vec::with_capacity(angles.len());
    for (i, angle) in angles.iter().enumerate() {
        let geometry = MeasurementGeometry::new(config.geometry.distance_m, *angle)?;
        let fit = extract_rcs(&loadeds[i], &empties[i], &antenna, &geometry, &options)
            .map_err(|e| {
                e.context(format!(
                    "pair '{}' / '{}'",
                    loaded_paths[i].display(),
                    empty_paths[i].display()
                ))
            })?;
        sigma.push(fit.sigma_hat_m2);
        snr.push(fit.snr_db);
        failed.push(fit.failed);
    }
    let mut pattern = RcsPattern::new(angles.clone(), sigma, snr, failed, grid.center_hz())?;

    if normalize_theory {
        let plate = PlateTarget::new(config.target.width_m, config.target.height_m)?;
        pattern = normalize_pattern(&pattern, plate_rcs_peak(&plate, grid.center_hz()))?;
    }

    write_pattern_csv(&pattern, &out_dir.join("pattern.csv"))?;
    // Waveform record: the pair closest to boresight.
    let mut wf_idx = 0;
    for (i, a) in angles.iter().enumerate() {
        if a.abs() < angles[wf_idx].abs() {
            wf_idx = i;
        }
    }
    let diff = difference(&loadeds[wf_idx], &empties[wf_idx])?;
    write_waveform_csv(diff.spectrum(), &out_dir.join("waveform.csv"))?;
    write_run_meta(out_dir, "extract-files", config, false)?;
    Ok(pattern)
}

// ── tests ───────────────────────────────────────────────────────────────────
