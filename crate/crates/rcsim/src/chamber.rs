//! Stochastic reverberation-chamber model.
//!
//! The chamber's backscatter toward the antenna is a transfer function
//! H(f, θ_st): at every frequency sample an independent circular complex
//! Gaussian variable (zero mean, per-quadrature standard deviation `h_sigma`)
//! whose dependence on the stirrer angle θ_st follows a squared-exponential
//! angular correlation law ρ(Δθ) = exp(−Δθ²/(2·θ_c²)) on the wrapped circle.
//!
//! The in-chamber reflection coefficient seen by the antenna is then
//!
//! ```text
//! empty:   S(f, θ_st)   = S_FS(f) + (1 − |S_FS(f)|²)·H(f, θ_st)·η_ant
//! loaded:  S^T(f, θ_st) = S_FS(f) + C(f)·√σ + (1 − |S_FS(f)|²)·H^T(f, θ_st)·η_ant
//! ```
//!
//! with C(f) the deterministic ballistic coupling and σ the target RCS. H^T is
//! the diffuse field perturbed by the target's presence: at the same stirrer
//! angle it correlates with the empty-chamber H at a configurable factor
//! ρ_target (default 0.99), so the two-measurement difference keeps a small
//! noise floor even without a stirrer shift.
//!
//! # Field synthesis
//!
//! Each experiment seed defines one realization of the whole random process —
//! jointly over frequency *and* stirrer angle — so separate measurement calls
//! that share a seed see consistent draws at any combination of angles. That
//! requires a pointwise-evaluable process, built here as a circular-harmonic
//! expansion per quadrature and frequency sample:
//!
//! ```text
//! X(θ) = a₀·ξ₀ + Σ_{m=1..M} a_m·(ξ_m·cos mθ + η_m·sin mθ),   a_m² = Fourier
//! coefficient of ρ on the circle  (a_m ≥ 0 ⇔ ρ positive semi-definite)
//! ```
//!
//! which has cov(X(θ), X(θ')) = ρ(θ − θ') exactly for any angle pair. A
//! correlation law whose harmonic coefficients dip below −1e−9·c₀ is rejected
//! as non-positive-semi-definite (the wrapped squared exponential does so for
//! θ_c ≳ 45°); tiny negative numerical dust above that tolerance is clipped.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::spectra::{require_same_grid, ComplexSpectrum, FrequencyGrid};
use crate::target::{check_far_field, far_field_min_distance, MeasurementGeometry};

// ── seed derivation ─────────────────────────────────────────────────────────

/// SplitMix64 finalizer: a fixed bijective mixer with good avalanche behavior.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive an independent subseed from `(seed, index)`.
///
/// `derive_seed(seed, i) = splitmix64(seed XOR splitmix64(i))`. Sweeps derive
/// per-task seeds by chaining: `derive_seed(derive_seed(base, angle_index),
/// trial_index)`; field synthesis derives per-field streams with index 0 for
/// the empty-chamber field and 1 for the target-perturbation field. The rule
/// is a pure function of its inputs, so any parallel schedule reproduces the
/// same draws.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index))
}

/// Stream index of the empty-chamber diffuse field H.
pub(crate) const STREAM_EMPTY_FIELD: u64 = 0;
/// Stream index of the target-perturbation field used to build H^T.
pub(crate) const STREAM_TARGET_FIELD: u64 = 1;

// ── domain types ────────────────────────────────────────────────────────────

/// Antenna description: free-space reflection coefficient S_FS(f), flat gain,
/// and radiation efficiency η_ant.
#[derive(Debug, Clone, PartialEq)]
pub struct AntennaModel {
    s_fs: ComplexSpectrum,
    gain_dbi: f64,
    efficiency: f64,
}

impl AntennaModel {
    /// Build an antenna model; requires |S_FS(f)| < 1 everywhere and
    /// 0 < efficiency ≤ 1.
    pub fn new(s_fs: ComplexSpectrum, gain_dbi: f64, efficiency: f64) -> Result<AntennaModel> {
        if !gain_dbi.is_finite() {
            return Err(Error::config("antenna.gain_dbi must be finite"));
        }
        if !(efficiency > 0.0 && efficiency <= 1.0) {
            return Err(Error::config(format!(
                "antenna.efficiency must lie in (0, 1], got {efficiency}"
            )));
        }
        if let Some((f, v)) = s_fs.iter().find(|(_, v)| v.norm() >= 1.0) {
            return Err(Error::config(format!(
                "antenna free-space reflection must satisfy |S_FS| < 1; |S_FS({f} Hz)| = {}",
                v.norm()
            )));
        }
        Ok(AntennaModel { s_fs, gain_dbi, efficiency })
    }

    /// Convenience constructor: constant S_FS across the grid.
    pub fn with_constant_sfs(
        grid: FrequencyGrid,
        s_fs: Complex64,
        gain_dbi: f64,
        efficiency: f64,
    ) -> Result<AntennaModel> {
        AntennaModel::new(ComplexSpectrum::constant(grid, s_fs)?, gain_dbi, efficiency)
    }

    /// Free-space reflection coefficient spectrum.
    pub fn s_fs(&self) -> &ComplexSpectrum {
        &self.s_fs
    }

    /// Antenna gain in dBi (flat over the band).
    pub fn gain_dbi(&self) -> f64 {
        self.gain_dbi
    }

    /// Antenna gain in linear scale, 10^(dBi/10).
    pub fn gain_linear(&self) -> f64 {
        10.0_f64.powf(self.gain_dbi / 10.0)
    }

    /// Radiation efficiency η_ant in (0, 1].
    pub fn efficiency(&self) -> f64 {
        self.efficiency
    }

    /// S_FS evaluated at an arbitrary frequency: exact at grid samples,
    /// linearly interpolated between them, clamped to the end samples outside.
    pub fn s_fs_at(&self, f_hz: f64) -> Complex64 {
        let grid = self.s_fs.grid();
        let values = self.s_fs.values();
        if grid.n_points() < 2 {
            return values[0];
        }
        let x = (f_hz - grid.f_start_hz()) / grid.step_hz();
        if x <= 0.0 {
            return values[0];
        }
        if x >= (grid.n_points() - 1) as f64 {
            return values[grid.n_points() - 1];
        }
        let k = x.round();
        if (x - k).abs() < 1e-6 {
            return values[k as usize];
        }
        let lo = x.floor() as usize;
        let t = x - lo as f64;
        values[lo] * (1.0 - t) + values[lo + 1] * t
    }
}

/// Diffuse-field statistics of the chamber.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChamberModel {
    h_sigma: f64,
    theta_c_deg: f64,
    rho_target: f64,
    freq_correlated: bool,
    coherence_bw_hz: f64,
}

impl ChamberModel {
    /// Build a chamber model.
    ///
    /// `h_sigma` ≥ 0 (0 is the noise-free degenerate chamber), `theta_c_deg` > 0,
    /// `rho_target` ∈ [0, 1], and `coherence_bw_hz` > 0 (only used when
    /// `freq_correlated` is set).
    pub fn new(
        h_sigma: f64,
        theta_c_deg: f64,
        rho_target: f64,
        freq_correlated: bool,
        coherence_bw_hz: f64,
    ) -> Result<ChamberModel> {
        if !h_sigma.is_finite() || h_sigma < 0.0 {
            return Err(Error::config(format!(
                "chamber.h_sigma must be finite and >= 0, got {h_sigma}"
            )));
        }
        if !theta_c_deg.is_finite() || theta_c_deg <= 0.0 {
            return Err(Error::config(format!(
                "chamber.theta_c_deg must be finite and > 0, got {theta_c_deg}"
            )));
        }
        if !(0.0..=1.0).contains(&rho_target) {
            return Err(Error::config(format!(
                "chamber.rho_target must lie in [0, 1], got {rho_target}"
            )));
        }
        if !coherence_bw_hz.is_finite() || coherence_bw_hz <= 0.0 {
            return Err(Error::config(format!(
                "chamber.coherence_bw_hz must be finite and > 0, got {coherence_bw_hz}"
            )));
        }
        Ok(ChamberModel { h_sigma, theta_c_deg, rho_target, freq_correlated, coherence_bw_hz })
    }

    /// Per-quadrature standard deviation of H at each frequency sample.
    pub fn h_sigma(&self) -> f64 {
        self.h_sigma
    }

    /// Stirrer decorrelation angle θ_c of the angular-correlation law, degrees.
    pub fn theta_c_deg(&self) -> f64 {
        self.theta_c_deg
    }

    /// Correlation between H^T and H at the same stirrer angle (target
    /// insertion perturbs the cavity slightly).
    pub fn rho_target(&self) -> f64 {
        self.rho_target
    }

    /// Whether H is smoothed across frequency instead of sample-independent.
    pub fn freq_correlated(&self) -> bool {
        self.freq_correlated
    }

    /// Lorentzian smoothing bandwidth for the frequency-correlated mode, Hz.
    pub fn coherence_bw_hz(&self) -> f64 {
        self.coherence_bw_hz
    }

    /// Copy of this chamber with a different `h_sigma` (used by noise-free
    /// overrides).
    pub fn with_h_sigma(mut self, h_sigma: f64) -> Result<ChamberModel> {
        if !h_sigma.is_finite() || h_sigma < 0.0 {
            return Err(Error::config(format!(
                "chamber.h_sigma must be finite and >= 0, got {h_sigma}"
            )));
        }
        self.h_sigma = h_sigma;
        Ok(self)
    }
}

/// Mechanical stirrer position, normalized to [0°, 360°).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StirrerState {
    angle_deg: f64,
}

impl StirrerState {
    /// Build a stirrer state; any finite angle is accepted and wrapped mod 360°.
    pub fn new(angle_deg: f64) -> Result<StirrerState> {
        if !angle_deg.is_finite() {
            return Err(Error::config("stirrer angle must be finite"));
        }
        Ok(StirrerState { angle_deg: angle_deg.rem_euclid(360.0) })
    }

    /// Normalized stirrer angle in [0°, 360°).
    pub fn angle_deg(&self) -> f64 {
        self.angle_deg
    }
}

// ── angular correlation ─────────────────────────────────────────────────────

/// Stirrer angular correlation ρ(Δθ) = exp(−Δθ²/(2·θ_c²)) on the wrapped
/// angular distance min(|Δθ| mod 360°, 360° − |Δθ| mod 360°).
///
/// Total on finite inputs; ρ(0) = 1 and ρ is symmetric and 360°-periodic.
pub fn angular_correlation(chamber: &ChamberModel, delta_theta_deg: f64) -> f64 {
    let w = delta_theta_deg.abs().rem_euclid(360.0);
    let d = w.min(360.0 - w);
    (-d * d / (2.0 * chamber.theta_c_deg * chamber.theta_c_deg)).exp()
}

// ── harmonic spectrum of the correlation law ────────────────────────────────

/// Relative tolerance below which a negative harmonic coefficient means the
/// correlation law is not positive semi-definite on the circle.
const PSD_TOLERANCE: f64 = 1e-9;

/// Relative truncation threshold for the harmonic ladder (coefficients this
/// far below c₀ contribute nothing at f64 precision).
const TRUNCATION_RATIO: f64 = 1e-12;

/// Fourier ladder of the angular-correlation law on the circle, reduced to the
/// per-term amplitudes a_m of the harmonic expansion (unit process variance).
///
/// Building it costs a small numerical integration; sweeps construct it once
/// and synthesize many fields against it.
#[derive(Debug, Clone)]
pub struct HarmonicSpectrum {
    /// Amplitude per coefficient slot, laid out as the expansion rows:
    /// [a₀, a₁, a₁, a₂, a₂, …, a_M, a_M] (cos/sin pairs share an amplitude).
    row_amps: Vec<f64>,
    /// Number of harmonics M (row length is 2M + 1).
    m_count: usize,
}

impl HarmonicSpectrum {
    /// Compute the harmonic ladder for a correlation angle θ_c.
    ///
    /// Coefficients c_m = (1/2π)∮ ρ(θ)·cos(mθ) dθ are evaluated by midpoint
    /// quadrature on a fine circle grid, checked for positive
    /// semi-definiteness (error if any c_m < −1e−9·c₀), clipped of numerical
    /// dust, truncated at c_m < 1e−12·c₀, and renormalized to unit process
    /// variance c₀ + 2·Σ c_m = 1.
    pub fn new(theta_c_deg: f64) -> Result<HarmonicSpectrum> {
        if !theta_c_deg.is_finite() || theta_c_deg <= 0.0 {
            return Err(Error::config(format!(
                "chamber.theta_c_deg must be finite and > 0, got {theta_c_deg}"
            )));
        }
        let tc = theta_c_deg.to_radians();
        // Gaussian decay exp(−m²·θc²/2) falls below 1e−12 near m = 7.5/θc;
        // always inspect at least 64 harmonics so wide-θc spectra (whose
        // negative lobes sit at low m) are fully checked.
        let m_decay = ((7.5 / tc).ceil() as usize + 2).clamp(4, 4096);
        let m_check = m_decay.max(64);
        let k_samples = (8 * (m_check + 1)).max(4096);

        // ρ sampled on the circle (midpoint rule ↔ discrete Fourier analysis).
        let rho: Vec<f64> = (0..k_samples)
            .map(|k| {
                let th = 2.0 * std::f64::consts::PI * k as f64 / k_samples as f64;
                let d = th.min(2.0 * std::f64::consts::PI - th);
                (-d * d / (2.0 * tc * tc)).exp()
            })
            .collect();

        let mut coefs = Vec::with_capacity(m_check + 1);
        for m in 0..=m_check {
            let mut acc = 0.0;
            for (k, r) in rho.iter().enumerate() {
                let ang = 2.0 * std::f64::consts::PI * (m * k % k_samples) as f64
                    / k_samples as f64;
                acc += r * ang.cos();
            }
            coefs.push(acc / k_samples as f64);
        }

        let c0 = coefs[0];
        if c0 <= 0.0 {
            return Err(Error::config(format!(
                "correlation law has non-positive mean power for theta_c = {theta_c_deg}°"
            )));
        }
        if let Some((m, c)) = coefs
            .iter()
            .enumerate()
            .find(|(_, &c)| c < -PSD_TOLERANCE * c0)
        {
            return Err(Error::config(format!(
                "angular correlation with theta_c = {theta_c_deg}° is not positive \
                 semi-definite on the circle (harmonic {m} has coefficient {c:.3e}); \
                 choose a smaller decorrelation angle"
            )));
        }
        for c in &mut coefs {
            if *c < 0.0 {
                *c = 0.0;
            }
        }

        // Truncate the ladder where coefficients stop mattering.
        let mut m_count = coefs.len() - 1;
        while m_count > 1 && coefs[m_count] < TRUNCATION_RATIO * c0 {
            m_count -= 1;
        }
        coefs.truncate(m_count + 1);

        // Renormalize to exact unit variance: c₀ + 2·Σ_{m≥1} c_m = 1.
        let total: f64 = coefs[0] + 2.0 * coefs[1..].iter().sum::<f64>();
        let mut row_amps = Vec::with_capacity(2 * m_count + 1);
        row_amps.push((coefs[0] / total).sqrt());
        for c in &coefs[1..] {
            let a = (2.0 * c / total).sqrt();
            row_amps.push(a);
            row_amps.push(a);
        }
        Ok(HarmonicSpectrum { row_amps, m_count })
    }

    /// Number of harmonics M retained.
    pub fn harmonic_count(&self) -> usize {
        self.m_count
    }
}

// ── stirred field synthesis ─────────────────────────────────────────────────

/// One realization of the chamber transfer function H(f, θ_st): evaluable at
/// any stirrer angle, jointly Gaussian across angles with the chamber's ρ law,
/// independent across frequency samples (unless frequency smoothing is on).
///
/// Coefficients are drawn once at construction from a ChaCha8 stream seeded by
/// the field seed, in a fixed documented order (frequency-major; per
/// frequency: real quadrature then imaginary quadrature; per quadrature:
/// m = 0, then cos/sin pairs for m = 1…M), so a field is a pure value of
/// `(chamber, grid, seed)`.
pub struct StirredField {
    n_freq: usize,
    n_row: usize,
    /// Row-major [frequency][coefficient slot], amplitudes premultiplied
    /// (h_sigma · a_m · ξ): real quadrature.
    coef_re: Vec<f64>,
    /// Same layout for the imaginary quadrature.
    coef_im: Vec<f64>,
}

impl StirredField {
    /// Draw a field realization (computes the harmonic ladder internally).
    pub fn new(chamber: &ChamberModel, grid: &FrequencyGrid, field_seed: u64) -> Result<StirredField> {
        let spectrum = HarmonicSpectrum::new(chamber.theta_c_deg())?;
        Ok(StirredField::with_spectrum(chamber, grid, &spectrum, field_seed))
    }

    /// Draw a field realization against a precomputed harmonic ladder
    /// (`spectrum` must come from this chamber's θ_c).
    pub fn with_spectrum(
        chamber: &ChamberModel,
        grid: &FrequencyGrid,
        spectrum: &HarmonicSpectrum,
        field_seed: u64,
    ) -> StirredField {
        let n_freq = grid.n_points();
        let n_row = spectrum.row_amps.len();
        let h = chamber.h_sigma();
        let mut rng = ChaCha8Rng::seed_from_u64(field_seed);
        let normal = StandardNormal;

        let mut coef_re = vec![0.0_f64; n_freq * n_row];
        let mut coef_im = vec![0.0_f64; n_freq * n_row];
        for k in 0..n_freq {
            let row = k * n_row;
            for (j, amp) in spectrum.row_amps.iter().enumerate() {
                let z: f64 = normal.sample(&mut rng);
                coef_re[row + j] = h * amp * z;
            }
            for (j, amp) in spectrum.row_amps.iter().enumerate() {
                let z: f64 = normal.sample(&mut rng);
                coef_im[row + j] = h * amp * z;
            }
        }

        let mut field = StirredField { n_freq, n_row, coef_re, coef_im };
        if chamber.freq_correlated() {
            field.smooth_across_frequency(grid.step_hz(), chamber.coherence_bw_hz());
        }
        field
    }

    /// Lorentzian smoothing along the frequency axis of every coefficient
    /// stream: kernel w(Δf) = 1/(1 + (2·Δf/B_c)²), renormalized per sample to
    /// Σw² = 1 (edge-aware) so the per-sample variance stays h_sigma² exactly.
    fn smooth_across_frequency(&mut self, step_hz: f64, coherence_bw_hz: f64) {
        if self.n_freq < 2 || step_hz <= 0.0 {
            return;
        }
        // Truncate where the kernel falls below ~1e-3 of its peak.
        let half_width =
            ((coherence_bw_hz / (2.0 * step_hz)) * 31.6).ceil() as usize;
        let w = half_width.min(self.n_freq - 1) as isize;
        let kernel: Vec<f64> = (-w..=w)
            .map(|d| {
                let x = 2.0 * d as f64 * step_hz / coherence_bw_hz;
                1.0 / (1.0 + x * x)
            })
            .collect();

        for coefs in [&mut self.coef_re, &mut self.coef_im] {
            let mut smoothed = vec![0.0_f64; coefs.len()];
            for j in 0..self.n_row {
                for k in 0..self.n_freq as isize {
                    let mut acc = 0.0;
                    let mut norm = 0.0;
                    for (i, &wk) in kernel.iter().enumerate() {
                        let src = k + (i as isize - w);
                        if src >= 0 && src < self.n_freq as isize {
                            acc += wk * coefs[src as usize * self.n_row + j];
                            norm += wk * wk;
                        }
                    }
                    smoothed[k as usize * self.n_row + j] = acc / norm.sqrt();
                }
            }
            coefs.copy_from_slice(&smoothed);
        }
    }

    /// Evaluate H(f, θ) at a stirrer angle: one complex sample per grid point.
    ///
    /// The angle is wrapped to [0°, 360°) first, so θ and θ + 360° evaluate
    /// bit-identically.
    pub fn eval(&self, angle_deg: f64) -> Vec<Complex64> {
        let theta = angle_deg.rem_euclid(360.0).to_radians();
        // Trig row [1, cos θ, sin θ, cos 2θ, sin 2θ, …] by the angle-addition
        // recurrence (M is small; accumulated error is far below f64 noise).
        let mut trig = vec![0.0_f64; self.n_row];
        trig[0] = 1.0;
        let (sin1, cos1) = theta.sin_cos();
        let (mut c_prev, mut s_prev) = (1.0_f64, 0.0_f64);
        let m_count = (self.n_row - 1) / 2;
        for m in 1..=m_count {
            let c = cos1 * c_prev - sin1 * s_prev;
            let s = sin1 * c_prev + cos1 * s_prev;
            trig[2 * m - 1] = c;
            trig[2 * m] = s;
            c_prev = c;
            s_prev = s;
        }

        let mut out = Vec::with_capacity(self.n_freq);
        for k in 0..self.n_freq {
            let row = k * self.n_row;
            let mut re = 0.0;
            let mut im = 0.0;
            for (j, t) in trig.iter().enumerate() {
                re += self.coef_re[row + j] * t;
                im += self.coef_im[row + j] * t;
            }
            out.push(Complex64::new(re, im));
        }
        out
    }
}

// ── measurement synthesis ───────────────────────────────────────────────────

/// Jointly synthesize the chamber transfer function at several stirrer angles.
///
/// Every returned spectrum is H(·, θ_i) of the *same* field realization, so the
/// cross-correlation between entries i and j is ρ(θ_i − θ_j) and repeated
/// angles yield bit-identical spectra. Deterministic in `(seed, grid, angles)`.
pub fn synth_transfer(
    chamber: &ChamberModel,
    grid: &FrequencyGrid,
    angles_deg: &[f64],
    seed: u64,
) -> Result<Vec<ComplexSpectrum>> {
    if angles_deg.is_empty() {
        return Err(Error::data("synth_transfer requires at least one stirrer angle"));
    }
    let field = StirredField::new(chamber, grid, derive_seed(seed, STREAM_EMPTY_FIELD))?;
    angles_deg
        .iter()
        .map(|&a| ComplexSpectrum::new(*grid, field.eval(a)))
        .collect()
}

/// Empty-chamber values S = S_FS + (1 − |S_FS|²)·H·η from a field evaluation.
pub(crate) fn empty_values(antenna: &AntennaModel, h: &[Complex64]) -> Vec<Complex64> {
    let eta = antenna.efficiency();
    antenna
        .s_fs()
        .values()
        .iter()
        .zip(h)
        .map(|(s, hk)| s + (1.0 - s.norm_sqr()) * hk * eta)
        .collect()
}

/// Loaded-chamber values S^T = S_FS + C(f)·√σ + (1 − |S_FS|²)·H^T·η.
pub(crate) fn loaded_values(
    antenna: &AntennaModel,
    grid: &FrequencyGrid,
    h_t: &[Complex64],
    sigma_m2: f64,
    distance_m: f64,
    phi0_rad: f64,
) -> Vec<Complex64> {
    let eta = antenna.efficiency();
    let sqrt_sigma = sigma_m2.sqrt();
    antenna
        .s_fs()
        .values()
        .iter()
        .zip(h_t)
        .enumerate()
        .map(|(k, (s, hk))| {
            let f = grid.sample_hz(k);
            let c = crate::ballistic::coupling(antenna, f, distance_m, phi0_rad);
            s + c * sqrt_sigma + (1.0 - s.norm_sqr()) * hk * eta
        })
        .collect()
}

/// Mix the empty-chamber field F with the independent perturbation field G:
/// H^T = ρ_t·F + √(1 − ρ_t²)·G, preserving per-sample variance.
pub(crate) fn target_transfer(
    f_eval: &[Complex64],
    g_eval: &[Complex64],
    rho_target: f64,
) -> Vec<Complex64> {
    let w = (1.0 - rho_target * rho_target).max(0.0).sqrt();
    f_eval
        .iter()
        .zip(g_eval)
        .map(|(f, g)| f * rho_target + g * w)
        .collect()
}

/// Measure the empty chamber: S(f, θ_st) = S_FS + (1 − |S_FS|²)·H(f, θ_st)·η.
///
/// The H draw is the field realization of `derive_seed(seed, 0)`, shared with
/// [`measure_with_target`] and [`synth_transfer`] at the same seed.
pub fn measure_empty(
    antenna: &AntennaModel,
    chamber: &ChamberModel,
    grid: &FrequencyGrid,
    stirrer: StirrerState,
    seed: u64,
) -> Result<ComplexSpectrum> {
    require_same_grid(antenna.s_fs().grid(), grid, "measure_empty")?;
    let field = StirredField::new(chamber, grid, derive_seed(seed, STREAM_EMPTY_FIELD))?;
    let h = field.eval(stirrer.angle_deg());
    ComplexSpectrum::new(*grid, empty_values(antenna, &h))
}

/// Measure the chamber with the target present:
/// S^T(f, θ_st) = S_FS + C(f)·√σ + (1 − |S_FS|²)·H^T(f, θ_st)·η.
///
/// H^T is drawn jointly with the empty-chamber H of the same `seed`
/// (H^T = ρ_target·F + √(1 − ρ_target²)·G with F the empty-chamber field), so
/// an empty/loaded pair sharing a seed has the full angular correlation
/// structure across its two stirrer angles. The geometry must satisfy the
/// far-field condition R ≥ 2D²/λ_min and `sigma_true_m2` must be ≥ 0.
#[allow(clippy::too_many_arguments)]
pub fn measure_with_target(
    antenna: &AntennaModel,
    chamber: &ChamberModel,
    grid: &FrequencyGrid,
    stirrer: StirrerState,
    sigma_true_m2: f64,
    geometry: &MeasurementGeometry,
    target: &crate::target::PlateTarget,
    phi0_rad: f64,
    seed: u64,
) -> Result<ComplexSpectrum> {
    require_same_grid(antenna.s_fs().grid(), grid, "measure_with_target")?;
    if !sigma_true_m2.is_finite() || sigma_true_m2 < 0.0 {
        return Err(Error::config(format!(
            "target RCS must be finite and >= 0, got {sigma_true_m2}"
        )));
    }
    if !check_far_field(geometry, target, grid) {
        let lambda_min = crate::spectra::SPEED_OF_LIGHT / grid.f_stop_hz();
        return Err(Error::config(format!(
            "far-field violation: R = {} m is below 2D²/λ_min = {:.4} m",
            geometry.distance_m(),
            far_field_min_distance(target, lambda_min)
        )));
    }
    let spectrum = HarmonicSpectrum::new(chamber.theta_c_deg())?;
    let f_field =
        StirredField::with_spectrum(chamber, grid, &spectrum, derive_seed(seed, STREAM_EMPTY_FIELD));
    let g_field =
        StirredField::with_spectrum(chamber, grid, &spectrum, derive_seed(seed, STREAM_TARGET_FIELD));
    let h_t = target_transfer(
        &f_field.eval(stirrer.angle_deg()),
        &g_field.eval(stirrer.angle_deg()),
        chamber.rho_target(),
    );
    ComplexSpectrum::new(
        *grid,
        loaded_values(antenna, grid, &h_t, sigma_true_m2, geometry.distance_m(), phi0_rad),
    )
}

// ── tests ───────────────────────────────────────────────────────────────────
