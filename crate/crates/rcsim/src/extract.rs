//! Measurement processing: difference, normalization, and matched-filter
//! RCS extraction.
//!
//! The two-measurement method subtracts the empty-chamber reflection from the
//! loaded one. For a target of RCS σ at distance R the difference is
//!
//! ```text
//! ΔS(f) = C(f)·√σ + noise,      C(f) = |C(f)|·e^{−j4πfR/c}·e^{jφ₀}
//! ```
//!
//! where the noise collects the residual diffuse-field terms. Dividing by the
//! known deterministic weighting |C(f)| yields the normalized waveform
//!
//! ```text
//! y(f) = ΔS(f)/|C(f)| = √σ·e^{−j4πfR/c}·e^{jφ₀} + noise
//! ```
//!
//! — a single complex exponential in f with known slope −4πR/c, buried in
//! white-ish noise. The least-squares estimator for its amplitude is the
//! matched projection α(r) = (1/N)·Σ_f y(f)·e^{+j4πfr/c}, giving the
//! √N coherent-integration gain that makes the extraction usable even when
//! the per-sample noise dwarfs the echo. σ̂ = |α|², and scanning r over a
//! small window around the nominal distance absorbs path-length uncertainty.

use num_complex::Complex64;

use crate::ballistic::coupling_magnitude;
use crate::chamber::AntennaModel;
use crate::error::{Error, Result};
use crate::spectra::{require_same_grid, ComplexSpectrum, SPEED_OF_LIGHT};
use crate::target::MeasurementGeometry;

/// Default half-width of the candidate-distance scan window, meters. The
/// physical antenna–target path is never known to sub-millimeter precision;
/// ±5 cm covers realistic rig tolerances.
pub const DEFAULT_R_WINDOW_M: f64 = 0.05;

/// Default detection threshold, dB. Calibrated so that (a) pure-noise inputs
/// are flagged failed in well over 95% of trials and (b) at the default
/// chamber noise level the boresight echo of the default plate clears the
/// threshold with margin while fully decorrelated measurements at deep-null
/// aspects fall below it.
pub const DEFAULT_SNR_THRESHOLD_DB: f64 = 16.0;

/// Convergence tolerance of the distance refinement, meters.
const R_REFINE_TOL_M: f64 = 1e-6;

// ── domain types ────────────────────────────────────────────────────────────

/// Result of one matched-filter extraction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtractionResult {
    /// Estimated RCS |α(r̂)|², m² (always ≥ 0; untrusted when `failed`).
    pub sigma_hat_m2: f64,
    /// Estimated scattering phase arg α(r̂), radians in (−π, π].
    pub phi0_hat_rad: f64,
    /// Distance maximizing the matched projection, meters.
    pub r_hat_m: f64,
    /// Matched-filter peak power over residual per-quadrature noise power,
    /// 10·log₁₀(N·σ̂/(2s²)), dB. +∞ for an exact fit.
    pub snr_db: f64,
    /// Root-mean-square of the complex fit residual (same units as y).
    pub residual_rms: f64,
    /// Detection flag: the fit fell below the SNR threshold and σ̂ should not
    /// be trusted.
    pub failed: bool,
}

/// Difference of a loaded and an empty measurement on a shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferenceSpectrum {
    spectrum: ComplexSpectrum,
}

impl DifferenceSpectrum {
    /// The underlying complex spectrum ΔS(f).
    pub fn spectrum(&self) -> &ComplexSpectrum {
        &self.spectrum
    }
}

/// Knobs of the extraction pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtractOptions {
    /// Half-width of the candidate-distance window around the nominal
    /// distance, meters (0 disables the scan).
    pub r_window_m: f64,
    /// Detection threshold on the matched-filter SNR, dB.
    pub snr_threshold_db: f64,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        ExtractOptions {
            r_window_m: DEFAULT_R_WINDOW_M,
            snr_threshold_db: DEFAULT_SNR_THRESHOLD_DB,
        }
    }
}

// ── pipeline stages ─────────────────────────────────────────────────────────

/// Pointwise difference loaded − empty. The grids must match exactly.
pub fn difference(
    loaded: &ComplexSpectrum,
    empty: &ComplexSpectrum,
) -> Result<DifferenceSpectrum> {
    require_same_grid(loaded.grid(), empty.grid(), "difference")?;
    let values: Vec<Complex64> = loaded
        .values()
        .iter()
        .zip(empty.values())
        .map(|(l, e)| l - e)
        .collect();
    Ok(DifferenceSpectrum { spectrum: ComplexSpectrum::new(*loaded.grid(), values)? })
}

/// Pointwise arithmetic mean of an ensemble of spectra on a shared grid.
///
/// Over a stirrer rotation the diffuse field averages toward zero, so the mean
/// of many empty-chamber measurements estimates the free-space reflection
/// S_FS. Note the angular correlation makes nearby stirrer positions
/// redundant: a full 360-draw rotation at θ_c = 15° carries only
/// N_eff = 360/Σ_Δ ρ(Δ) ≈ 9.6 independent samples, so the estimate converges
/// as 1/√N_eff, not 1/√360.
pub fn estimate_sfs(ensemble: &[ComplexSpectrum]) -> Result<ComplexSpectrum> {
    let first = ensemble
        .first()
        .ok_or_else(|| Error::data("estimate_sfs requires at least one spectrum"))?;
    for s in &ensemble[1..] {
        require_same_grid(first.grid(), s.grid(), "estimate_sfs")?;
    }
    let n = ensemble.len() as f64;
    let mut acc = vec![Complex64::new(0.0, 0.0); first.len()];
    for s in ensemble {
        for (a, v) in acc.iter_mut().zip(s.values()) {
            *a += v;
        }
    }
    for a in &mut acc {
        *a /= n;
    }
    ComplexSpectrum::new(*first.grid(), acc)
}

/// Undo the deterministic weighting of the ballistic echo:
/// y(f) = ΔS(f)·(4π)^{3/2}·R²/(G·λ(f)·(1 − |S_FS(f)|²)) = ΔS(f)/|C(f)|.
///
/// For a noise-free difference this makes y(f) = √σ·e^{−j4πfR/c}·e^{jφ₀}
/// exactly. |S_FS| < 1 is guaranteed by the antenna model, so the division is
/// always well-defined.
pub fn normalize_difference(
    diff: &DifferenceSpectrum,
    antenna: &AntennaModel,
    r_m: f64,
) -> Result<ComplexSpectrum> {
    if !r_m.is_finite() || r_m <= 0.0 {
        return Err(Error::config(format!(
            "normalization distance must be finite and > 0, got {r_m}"
        )));
    }
    let grid = diff.spectrum().grid();
    let values: Vec<Complex64> = diff
        .spectrum()
        .iter()
        .map(|(f, v)| v / coupling_magnitude(antenna, f, r_m))
        .collect();
    ComplexSpectrum::new(*grid, values)
}

/// Matched projection α(r) = (1/N)·Σ_k y_k·e^{+j4πf_k·r/c}.
///
/// The per-sample phasor advances by a constant rotation across the uniform
/// grid, so the sum runs as a complex recurrence; both the initial angle and
/// the step are reduced modulo one turn before use to keep precision at
/// hundreds of round-trip turns.
fn matched_projection(y: &ComplexSpectrum, r_m: f64) -> Complex64 {
    let grid = y.grid();
    let two_r_over_c = 2.0 * r_m / SPEED_OF_LIGHT;
    let start_turns = grid.f_start_hz() * two_r_over_c;
    let step_turns = grid.step_hz() * two_r_over_c;
    let w0 = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * start_turns.fract());
    let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * step_turns.fract());
    let mut z = w0;
    let mut acc = Complex64::new(0.0, 0.0);
    for v in y.values() {
        acc += v * z;
        z *= w;
    }
    acc / y.len() as f64
}

/// Fit a single complex exponential of known frequency slope to y and report
/// the recovered RCS.
///
/// Candidate distances cover [r_nominal − r_window, r_nominal + r_window] on a
/// lattice of pitch c/(8B) (a quarter of the c/(2B) distance-resolution cell),
/// endpoints included; the best lattice cell is then refined by golden-section
/// search to 1 µm, well past the ±5 mm the coarse lattice alone could resolve.
/// With `r_window_m` = 0 the projection is evaluated at the nominal distance
/// only.
///
/// Diagnostics: with residual e_k = y_k − α̂·e^{−j4πf_k·r̂/c} and per-quadrature
/// residual variance s² = Σ|e|²/(2N),
///
/// ```text
/// snr_db = 10·log₁₀(N·σ̂/(2s²)),    residual_rms = √(Σ|e|²/N)
/// ```
///
/// `failed` is a flag (snr below threshold), never an error: a failed fit
/// still reports its untrusted σ̂.
pub fn matched_fit(
    y: &ComplexSpectrum,
    r_nominal_m: f64,
    r_window_m: f64,
    snr_threshold_db: f64,
) -> Result<ExtractionResult> {
    if !r_nominal_m.is_finite() || r_nominal_m <= 0.0 {
        return Err(Error::config(format!(
            "nominal distance must be finite and > 0, got {r_nominal_m}"
        )));
    }
    if !r_window_m.is_finite() || r_window_m < 0.0 {
        return Err(Error::config(format!(
            "distance window must be finite and >= 0, got {r_window_m}"
        )));
    }
    if !snr_threshold_db.is_finite() {
        return Err(Error::config("snr threshold must be finite"));
    }
    if y.len() < 2 {
        return Err(Error::data("matched_fit requires at least 2 frequency samples"));
    }

    let r_hat = if r_window_m == 0.0 {
        r_nominal_m
    } else {
        search_r_hat(y, r_nominal_m, r_window_m)
    };

    let alpha = matched_projection(y, r_hat);
    let sigma_hat = alpha.norm_sqr();
    let phi0_hat = alpha.arg();

    // Residual against the fitted exponential, via the same phase recurrence.
    let grid = y.grid();
    let two_r_over_c = 2.0 * r_hat / SPEED_OF_LIGHT;
    let w0 = Complex64::from_polar(
        1.0,
        -2.0 * std::f64::consts::PI * (grid.f_start_hz() * two_r_over_c).fract(),
    );
    let w = Complex64::from_polar(
        1.0,
        -2.0 * std::f64::consts::PI * (grid.step_hz() * two_r_over_c).fract(),
    );
    let mut z = w0;
    let mut sum_sq = 0.0;
    for v in y.values() {
        sum_sq += (v - alpha * z).norm_sqr();
        z *= w;
    }
    let n = y.len() as f64;
    let residual_rms = (sum_sq / n).sqrt();
    let s2 = sum_sq / (2.0 * n);
    let snr_db = if s2 == 0.0 {
        if sigma_hat > 0.0 { f64::INFINITY } else { f64::NEG_INFINITY }
    } else {
        10.0 * (n * sigma_hat / (2.0 * s2)).log10()
    };

    Ok(ExtractionResult {
        sigma_hat_m2: sigma_hat,
        phi0_hat_rad: phi0_hat,
        r_hat_m: r_hat,
        snr_db,
        residual_rms,
        failed: snr_db < snr_threshold_db,
    })
}

/// Locate the distance maximizing |α(r)|²: coarse lattice scan, then
/// golden-section refinement of the winning cell.
fn search_r_hat(y: &ComplexSpectrum, r_nominal_m: f64, r_window_m: f64) -> f64 {
    let lo = r_nominal_m - r_window_m;
    let hi = r_nominal_m + r_window_m;
    let pitch = SPEED_OF_LIGHT / (8.0 * y.grid().bandwidth_hz());

    let power = |r: f64| matched_projection(y, r).norm_sqr();

    let mut best_r = lo;
    let mut best_p = power(lo);
    let mut r = lo + pitch;
    while r < hi {
        let p = power(r);
        if p > best_p {
            best_p = p;
            best_r = r;
        }
        r += pitch;
    }
    let p_hi = power(hi);
    if p_hi > best_p {
        best_r = hi;
    }

    // Golden-section maximization on the winning cell, clipped to the window.
    let golden = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut a = (best_r - pitch).max(lo);
    let mut b = (best_r + pitch).min(hi);
    let mut c = b - golden * (b - a);
    let mut d = a + golden * (b - a);
    let mut pc = power(c);
    let mut pd = power(d);
    while b - a > R_REFINE_TOL_M {
        if pc > pd {
            b = d;
            d = c;
            pd = pc;
            c = b - golden * (b - a);
            pc = power(c);
        } else {
            a = c;
            c = d;
            pc = pd;
            d = a + golden * (b - a);
            pd = power(d);
        }
    }
    0.5 * (a + b)
}

/// Full extraction pipeline: difference → normalization → matched fit.
///
/// The nominal distance of both the normalization and the fit is the
/// measurement geometry's antenna–target distance.
pub fn extract_rcs(
    loaded: &ComplexSpectrum,
    empty: &ComplexSpectrum,
    antenna: &AntennaModel,
    geometry: &MeasurementGeometry,
    options: &ExtractOptions,
) -> Result<ExtractionResult> {
    let diff = difference(loaded, empty)?;
    let y = normalize_difference(&diff, antenna, geometry.distance_m())?;
    matched_fit(&y, geometry.distance_m(), options.r_window_m, options.snr_threshold_db)
}

// ── tests ───────────────────────────────────────────────────────────────────

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ballistic::coupling;
    use crate::chamber::{
        measure_empty, measure_with_target, synth_transfer, ChamberModel, StirrerState,
    };
    use crate::spectra::make_grid;
    use crate::target::{plate_rcs_peak, PlateTarget};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn rel_err(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    fn default_grid() -> crate::spectra::FrequencyGrid {
        make_grid(9.75e9, 10.25e9, 1001).unwrap()
    }

    fn default_antenna() -> AntennaModel {
        AntennaModel::with_constant_sfs(default_grid(), Complex64::new(0.2, 0.0), 15.0, 0.95)
            .unwrap()
    }

    /// Ideal normalized waveform √σ·e^{−j4πfR/c}·e^{jφ₀} on a grid.
    fn ideal_waveform(
        grid: crate::spectra::FrequencyGrid,
        sigma: f64,
        r: f64,
        phi0: f64,
    ) -> ComplexSpectrum {
        let values: Vec<Complex64> = grid
            .frequencies()
            .map(|f| {
                let turns = f * (2.0 * r / SPEED_OF_LIGHT);
                Complex64::from_polar(
                    sigma.sqrt(),
                    phi0 - 2.0 * std::f64::consts::PI * turns.fract(),
                )
            })
            .collect();
        ComplexSpectrum::new(grid, values).unwrap()
    }

    // ── difference ──

    #[test]
    fn difference_of_identical_spectra_is_zero() {
        let grid = default_grid();
        let s = ComplexSpectrum::constant(grid, Complex64::new(0.3, -0.1)).unwrap();
        let d = difference(&s, &s).unwrap();
        assert!(d.spectrum().values().iter().all(|v| v.re == 0.0 && v.im == 0.0));
    }

    #[test]
    fn difference_rejects_mismatched_grids() {
        let a = ComplexSpectrum::constant(default_grid(), Complex64::new(0.0, 0.0)).unwrap();
        let b = ComplexSpectrum::constant(
            make_grid(9.75e9, 10.25e9, 501).unwrap(),
            Complex64::new(0.0, 0.0),
        )
        .unwrap();
        assert!(difference(&a, &b).is_err());
    }

    #[test]
    fn noise_free_difference_is_the_ballistic_echo() {
        let grid = default_grid();
        let antenna = default_antenna();
        let chamber = ChamberModel::new(0.0, 15.0, 0.99, false, 1.0e7).unwrap();
        let geom = MeasurementGeometry::new(2.95, 0.0).unwrap();
        let plate = PlateTarget::new(0.1, 0.1).unwrap();
        let stirrer = StirrerState::new(0.0).unwrap();
        let sigma = 1.25;
        let loaded = measure_with_target(
            &antenna, &chamber, &grid, stirrer, sigma, &geom, &plate, 0.7, 44,
        )
        .unwrap();
        let empty = measure_empty(&antenna, &chamber, &grid, stirrer, 44).unwrap();
        let d = difference(&loaded, &empty).unwrap();
        for (f, v) in d.spectrum().iter() {
            let expected = coupling(&antenna, f, 2.95, 0.7) * sigma.sqrt();
            assert!(
                (v - expected).norm() < 1e-16,
                "difference at {f} Hz: {v} vs {expected}"
            );
        }
    }

    // ── estimate_sfs ──

    #[test]
    fn sfs_estimate_of_identical_spectra_is_that_spectrum() {
        let s = ComplexSpectrum::constant(default_grid(), Complex64::new(0.21, 0.05)).unwrap();
        // Two copies: (v + v)/2 is exact in binary floating point.
        let est = estimate_sfs(&[s.clone(), s.clone()]).unwrap();
        assert_eq!(est.values(), s.values());
        // An odd count accumulates one rounding step at most.
        let est3 = estimate_sfs(&[s.clone(), s.clone(), s.clone()]).unwrap();
        for (a, b) in est3.values().iter().zip(s.values()) {
            assert!((a - b).norm() < 1e-16, "3-way mean drifted: {a} vs {b}");
        }
    }

    #[test]
    fn sfs_estimate_cancels_symmetric_deviations() {
        let grid = default_grid();
        let s_fs = Complex64::new(0.2, 0.0);
        let v = Complex64::new(3.0e-3, -1.0e-3);
        let plus = ComplexSpectrum::constant(grid, s_fs + v).unwrap();
        let minus = ComplexSpectrum::constant(grid, s_fs - v).unwrap();
        let est = estimate_sfs(&[plus, minus]).unwrap();
        for (_, e) in est.iter() {
            assert_eq!(e, s_fs, "symmetric deviations must cancel exactly");
        }
    }

    #[test]
    fn sfs_estimate_rejects_empty_ensembles() {
        assert!(estimate_sfs(&[]).is_err());
    }

    #[test]
    fn sfs_estimate_converges_over_a_stirrer_rotation() {
        // 360 draws at 1° steps are heavily correlated (θ_c = 15°): the
        // effective sample count is N_eff = 360/Σρ ≈ 9.57, so the 4-sigma
        // per-sample bound uses √N_eff, not √360.
        let grid = default_grid();
        let antenna = default_antenna();
        let chamber = ChamberModel::new(1.0e-3, 15.0, 0.99, false, 1.0e7).unwrap();
        let angles: Vec<f64> = (0..360).map(|a| a as f64).collect();
        let hs = synth_transfer(&chamber, &grid, &angles, 2024).unwrap();
        let ensemble: Vec<ComplexSpectrum> = hs
            .iter()
            .map(|h| {
                ComplexSpectrum::new(grid, crate::chamber::empty_values(&antenna, h.values()))
                    .unwrap()
            })
            .collect();
        let est = estimate_sfs(&ensemble).unwrap();

        let sum_rho: f64 = (0..360)
            .map(|d| crate::chamber::angular_correlation(&chamber, d as f64))
            .sum();
        let n_eff = 360.0 / sum_rho;
        assert!(rel_err(n_eff, 9.574_614_729_634_387) < 1e-12, "frozen N_eff");
        let sigma_eff = (1.0 - 0.04) * 0.95 * 1.0e-3 * std::f64::consts::SQRT_2;
        let bound = 4.0 * sigma_eff / n_eff.sqrt();
        for (v, s_fs) in est.values().iter().zip(antenna.s_fs().values()) {
            assert!(
                (v - s_fs).norm() < bound,
                "per-sample deviation {} exceeds 4σ_eff/√N_eff = {bound}",
                (v - s_fs).norm()
            );
        }
    }

    // ── normalize_difference ──

    #[test]
    fn normalization_inverts_the_coupling_weighting() {
        let grid = default_grid();
        let antenna = default_antenna();
        let values: Vec<Complex64> =
            grid.frequencies().map(|f| coupling(&antenna, f, 2.95, 0.3)).collect();
        let diff =
            difference(&ComplexSpectrum::new(grid, values).unwrap(),
                       &ComplexSpectrum::constant(grid, Complex64::new(0.0, 0.0)).unwrap())
                .unwrap();
        let y = normalize_difference(&diff, &antenna, 2.95).unwrap();
        for (f, v) in y.iter() {
            assert!(
                (v.norm() - 1.0).abs() < 1e-14,
                "σ = 1 waveform must have |y| = 1, got {} at {f} Hz",
                v.norm()
            );
        }
    }

    #[test]
    fn normalization_is_linear() {
        let grid = default_grid();
        let antenna = default_antenna();
        let base: Vec<Complex64> = grid
            .frequencies()
            .map(|f| coupling(&antenna, f, 2.95, 0.0) * 0.37)
            .collect();
        let k = 3.25;
        let scaled: Vec<Complex64> = base.iter().map(|v| v * k).collect();
        let zero = ComplexSpectrum::constant(grid, Complex64::new(0.0, 0.0)).unwrap();
        let y1 = normalize_difference(
            &difference(&ComplexSpectrum::new(grid, base).unwrap(), &zero).unwrap(),
            &antenna,
            2.95,
        )
        .unwrap();
        let y2 = normalize_difference(
            &difference(&ComplexSpectrum::new(grid, scaled).unwrap(), &zero).unwrap(),
            &antenna,
            2.95,
        )
        .unwrap();
        for ((_, a), (_, b)) in y1.iter().zip(y2.iter()) {
            assert!((b - a * k).norm() <= 1e-15 * b.norm());
        }
    }

    #[test]
    fn normalized_magnitude_is_the_rcs_square_root() {
        // Default plate at band center: σ_peak = 1.3982 m², so the noise-free
        // normalized waveform has |y| = √σ = 1.1825 at every frequency.
        let grid = default_grid();
        let antenna = default_antenna();
        let plate = PlateTarget::new(0.1, 0.1).unwrap();
        let sigma = plate_rcs_peak(&plate, grid.center_hz());
        let values: Vec<Complex64> = grid
            .frequencies()
            .map(|f| coupling(&antenna, f, 2.95, 0.0) * sigma.sqrt())
            .collect();
        let zero = ComplexSpectrum::constant(grid, Complex64::new(0.0, 0.0)).unwrap();
        let diff = difference(&ComplexSpectrum::new(grid, values).unwrap(), &zero).unwrap();
        let y = normalize_difference(&diff, &antenna, 2.95).unwrap();
        let expected = 1.182_453_930_115_557_9;
        assert!(rel_err(sigma.sqrt(), expected) < 1e-12, "frozen √σ_peak");
        for (_, v) in y.iter() {
            assert!(rel_err(v.norm(), expected) < 1e-12);
        }
    }

    // ── matched_fit ──

    #[test]
    fn noise_free_fit_recovers_amplitude_phase_and_distance() {
        let grid = default_grid();
        let sigma = 1.398_197_296_845_728_6;
        let phi0 = 0.9;
        let y = ideal_waveform(grid, sigma, 2.95, phi0);
        let fit = matched_fit(&y, 2.95, 0.0, DEFAULT_SNR_THRESHOLD_DB).unwrap();
        assert!(rel_err(fit.sigma_hat_m2, sigma) < 1e-9, "σ̂ = {}", fit.sigma_hat_m2);
        assert!((fit.phi0_hat_rad - phi0).abs() < 1e-9, "φ̂₀ = {}", fit.phi0_hat_rad);
        assert_eq!(fit.r_hat_m, 2.95, "window 0 pins r̂ to the nominal distance");
        assert!(fit.residual_rms < 1e-12, "residual_rms = {}", fit.residual_rms);
        assert!(!fit.failed);
        assert!(fit.snr_db > 200.0, "snr of an exact fit is enormous, got {}", fit.snr_db);
    }

    #[test]
    fn distance_scan_locates_the_true_path_length() {
        // Nominal distance off by 5 cm; the scan over ±10 cm must land on the
        // true 2.95 m (refinement reaches ~1 µm on noise-free data).
        let grid = default_grid();
        let y = ideal_waveform(grid, 1.0, 2.95, 0.0);
        let fit = matched_fit(&y, 2.90, 0.10, DEFAULT_SNR_THRESHOLD_DB).unwrap();
        assert!(
            (fit.r_hat_m - 2.95).abs() < 1e-4,
            "r̂ = {} should match the true distance",
            fit.r_hat_m
        );
        assert!(rel_err(fit.sigma_hat_m2, 1.0) < 1e-6);
    }

    #[test]
    fn pure_noise_is_flagged_failed() {
        // σ = 0: y is white complex noise. The matched filter's false-alarm
        // rate at the default threshold must keep ≥ 95% of trials flagged.
        let grid = make_grid(9.75e9, 10.25e9, 251).unwrap();
        let normal = StandardNormal;
        let mut n_failed = 0;
        let n_trials = 1000;
        for seed in 0..n_trials {
            let mut rng = ChaCha8Rng::seed_from_u64(seed as u64);
            let values: Vec<Complex64> = (0..grid.n_points())
                .map(|_| {
                    let re: f64 = normal.sample(&mut rng);
                    let im: f64 = normal.sample(&mut rng);
                    Complex64::new(re, im)
                })
                .collect();
            let y = ComplexSpectrum::new(grid, values).unwrap();
            let fit =
                matched_fit(&y, 2.95, DEFAULT_R_WINDOW_M, DEFAULT_SNR_THRESHOLD_DB).unwrap();
            if fit.failed {
                n_failed += 1;
            }
        }
        assert!(
            n_failed * 100 >= n_trials * 95,
            "only {n_failed}/{n_trials} pure-noise trials failed"
        );
    }

    #[test]
    fn fit_is_stable_across_grid_density() {
        let sigma = 0.7;
        let mut estimates = Vec::new();
        for n in [501usize, 1001, 2001] {
            let grid = make_grid(9.75e9, 10.25e9, n).unwrap();
            let y = ideal_waveform(grid, sigma, 2.95, 0.4);
            let fit = matched_fit(&y, 2.95, DEFAULT_R_WINDOW_M, DEFAULT_SNR_THRESHOLD_DB)
                .unwrap();
            estimates.push(fit.sigma_hat_m2);
        }
        for e in &estimates {
            assert!(rel_err(*e, sigma) < 1e-9, "σ̂ = {e} vs σ = {sigma}");
        }
    }

    #[test]
    fn fit_rejects_bad_preconditions() {
        let y = ideal_waveform(default_grid(), 1.0, 2.95, 0.0);
        assert!(matched_fit(&y, -1.0, 0.05, 6.0).is_err());
        assert!(matched_fit(&y, 2.95, -0.05, 6.0).is_err());
        assert!(matched_fit(&y, 2.95, 0.05, f64::NAN).is_err());
    }

    // ── extract_rcs composition ──

    #[test]
    fn noise_free_extraction_round_trips_the_injected_rcs() {
        let grid = default_grid();
        let antenna = default_antenna();
        let chamber = ChamberModel::new(0.0, 15.0, 0.99, false, 1.0e7).unwrap();
        let geom = MeasurementGeometry::new(2.95, 0.0).unwrap();
        let plate = PlateTarget::new(0.1, 0.1).unwrap();
        let stirrer = StirrerState::new(0.0).unwrap();
        let sigma = plate_rcs_peak(&plate, grid.center_hz());
        let loaded = measure_with_target(
            &antenna, &chamber, &grid, stirrer, sigma, &geom, &plate, 0.25, 5,
        )
        .unwrap();
        let empty = measure_empty(&antenna, &chamber, &grid, stirrer, 5).unwrap();
        let fit =
            extract_rcs(&loaded, &empty, &antenna, &geom, &ExtractOptions::default()).unwrap();
        assert!(rel_err(fit.sigma_hat_m2, sigma) < 1e-9, "σ̂ = {}", fit.sigma_hat_m2);
        assert!((fit.phi0_hat_rad - 0.25).abs() < 1e-6);
        assert!((fit.r_hat_m - 2.95).abs() < 1e-4);
        assert!(!fit.failed);
    }

    #[test]
    fn zero_rcs_extraction_is_flagged_failed() {
        // Same seed, same stirrer angle, σ = 0: the difference holds only the
        // tiny target-perturbation residue — no coherent echo to detect.
        let grid = default_grid();
        let antenna = default_antenna();
        let chamber = ChamberModel::new(1.0e-3, 15.0, 0.99, false, 1.0e7).unwrap();
        let geom = MeasurementGeometry::new(2.95, 0.0).unwrap();
        let plate = PlateTarget::new(0.1, 0.1).unwrap();
        let stirrer = StirrerState::new(0.0).unwrap();
        let mut n_failed = 0;
        for seed in 0..20u64 {
            let loaded = measure_with_target(
                &antenna, &chamber, &grid, stirrer, 0.0, &geom, &plate, 0.0, seed,
            )
            .unwrap();
            let empty = measure_empty(&antenna, &chamber, &grid, stirrer, seed).unwrap();
            let fit = extract_rcs(&loaded, &empty, &antenna, &geom, &ExtractOptions::default())
                .unwrap();
            if fit.failed {
                n_failed += 1;
            }
        }
        assert!(n_failed >= 19, "zero-RCS trials should fail, got {n_failed}/20");
    }

    // ── invariants ──

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(32))]

            /// y → k·y implies σ̂ → k²·σ̂ (matched projection is linear).
            #[test]
            fn scale_equivariance(
                k in 1e-3_f64..1e3,
                sigma in 0.01_f64..10.0,
                phi0 in -3.0_f64..3.0,
            ) {
                let grid = make_grid(9.75e9, 10.25e9, 201).unwrap();
                let y = ideal_waveform(grid, sigma, 2.95, phi0);
                let scaled = ComplexSpectrum::new(
                    grid,
                    y.values().iter().map(|v| v * k).collect(),
                ).unwrap();
                let f1 = matched_fit(&y, 2.95, 0.0, 6.0).unwrap();
                let f2 = matched_fit(&scaled, 2.95, 0.0, 6.0).unwrap();
                prop_assert!(
                    rel_err(f2.sigma_hat_m2, k * k * f1.sigma_hat_m2) < 1e-12
                );
            }

            /// Multiplying y by a unit-modulus constant shifts φ̂₀ only.
            #[test]
            fn phase_invariance(
                gamma in -3.0_f64..3.0,
                sigma in 0.01_f64..10.0,
            ) {
                let grid = make_grid(9.75e9, 10.25e9, 201).unwrap();
                let y = ideal_waveform(grid, sigma, 2.95, 0.0);
                let rotated = ComplexSpectrum::new(
                    grid,
                    y.values()
                        .iter()
                        .map(|v| v * Complex64::from_polar(1.0, gamma))
                        .collect(),
                ).unwrap();
                let f1 = matched_fit(&y, 2.95, 0.0, 6.0).unwrap();
                let f2 = matched_fit(&rotated, 2.95, 0.0, 6.0).unwrap();
                prop_assert!(rel_err(f2.sigma_hat_m2, f1.sigma_hat_m2) < 1e-12);
                let mut dphi = (f2.phi0_hat_rad - f1.phi0_hat_rad - gamma).abs();
                while dphi > std::f64::consts::PI {
                    dphi = (dphi - 2.0 * std::f64::consts::PI).abs();
                }
                prop_assert!(dphi < 1e-9);
            }
        }
    }
}
