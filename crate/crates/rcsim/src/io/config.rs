//! Experiment configuration: JSON document with per-section defaults.
//!
//! Every key is optional — an empty document `{}` resolves to the default
//! X-band setup (9.75–10.25 GHz, 1001 points, 0.1 m square plate at
//! R = 2.95 m, ±30° sweep in 1° steps). Unknown keys are rejected so typos
//! cannot silently fall back to defaults. Validation happens at load time
//! against the owning modules' invariants and reports the offending key path.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extract::{DEFAULT_R_WINDOW_M, DEFAULT_SNR_THRESHOLD_DB};
use crate::spectra::SPEED_OF_LIGHT;

// ── resolved configuration ──────────────────────────────────────────────────

/// Frequency sweep of the simulated VNA.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridConfig {
    pub f_start_hz: f64,
    pub f_stop_hz: f64,
    pub n_points: usize,
}

/// Source of the antenna's free-space reflection coefficient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SfsSpec {
    /// Flat S_FS across the band.
    Constant { re: f64, im: f64 },
    /// Read S_FS(f) from a Touchstone one-port file.
    File { path: String },
}

/// Antenna description.
///
/// `s_fs: None` (the default) means "unspecified": synthetic experiments fall
/// back to the flat default S_FS = 0.2 + 0j, while file ingestion estimates
/// S_FS from the empty-chamber measurements instead.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AntennaConfig {
    pub gain_dbi: f64,
    pub efficiency: f64,
    pub s_fs: Option<SfsSpec>,
}

impl AntennaConfig {
    /// The S_FS source used when synthesizing measurements: the configured one
    /// if present, the flat default otherwise.
    pub fn synthesis_sfs(&self) -> SfsSpec {
        self.s_fs.clone().unwrap_or(SfsSpec::Constant { re: 0.2, im: 0.0 })
    }
}

/// Diffuse-field statistics of the chamber.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChamberConfig {
    pub h_sigma: f64,
    pub theta_c_deg: f64,
    pub rho_target: f64,
    pub freq_correlated: bool,
    pub coherence_bw_hz: f64,
}

/// Rectangular plate target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TargetConfig {
    pub width_m: f64,
    pub height_m: f64,
}

/// Antenna–target geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeometryConfig {
    pub distance_m: f64,
}

/// Aspect sweep and Monte Carlo controls.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    pub angle_start_deg: f64,
    pub angle_stop_deg: f64,
    pub angle_step_deg: f64,
    pub shift_list_deg: Vec<f64>,
    pub n_seeds: usize,
    pub base_seed: u64,
}

impl SweepConfig {
    /// The aspect angles of the sweep, inclusive of both ends (a half-step
    /// slack absorbs accumulated rounding at the stop angle).
    pub fn angles_deg(&self) -> Vec<f64> {
        let mut angles = Vec::new();
        let mut k = 0usize;
        loop {
            let angle = self.angle_start_deg + k as f64 * self.angle_step_deg;
            if angle > self.angle_stop_deg + 0.5 * self.angle_step_deg {
                break;
            }
            angles.push(angle);
            k += 1;
        }
        angles
    }
}

/// Extraction pipeline knobs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtractionConfig {
    pub r_window_m: f64,
    pub snr_threshold_db: f64,
}

/// Fully resolved and validated experiment configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub grid: GridConfig,
    pub antenna: AntennaConfig,
    pub chamber: ChamberConfig,
    pub target: TargetConfig,
    pub geometry: GeometryConfig,
    pub sweep: SweepConfig,
    pub extraction: ExtractionConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            grid: GridConfig { f_start_hz: 9.75e9, f_stop_hz: 10.25e9, n_points: 1001 },
            antenna: AntennaConfig { gain_dbi: 15.0, efficiency: 0.95, s_fs: None },
            chamber: ChamberConfig {
                h_sigma: 1.0e-3,
                theta_c_deg: 15.0,
                rho_target: 0.99,
                freq_correlated: false,
                coherence_bw_hz: 1.0e7,
            },
            target: TargetConfig { width_m: 0.1, height_m: 0.1 },
            geometry: GeometryConfig { distance_m: 2.95 },
            sweep: SweepConfig {
                angle_start_deg: -30.0,
                angle_stop_deg: 30.0,
                angle_step_deg: 1.0,
                shift_list_deg: vec![
                    0.0, 3.6, 7.2, 10.8, 14.4, 18.0, 21.6, 25.2, 28.8, 32.4, 36.0,
                ],
                n_seeds: 50,
                base_seed: 12345,
            },
            extraction: ExtractionConfig {
                r_window_m: DEFAULT_R_WINDOW_M,
                snr_threshold_db: DEFAULT_SNR_THRESHOLD_DB,
            },
        }
    }
}

impl ExperimentConfig {
    /// The canonical JSON rendering of this configuration (what
    /// `print-defaults` emits for the default config).
    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes") + "\n"
    }
}

// ── raw (partial) form ──────────────────────────────────────────────────────

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    grid: Option<RawGrid>,
    antenna: Option<RawAntenna>,
    chamber: Option<RawChamber>,
    target: Option<RawTarget>,
    geometry: Option<RawGeometry>,
    sweep: Option<RawSweep>,
    extraction: Option<RawExtraction>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    f_start_hz: Option<f64>,
    f_stop_hz: Option<f64>,
    n_points: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAntenna {
    gain_dbi: Option<f64>,
    efficiency: Option<f64>,
    s_fs: Option<SfsSpec>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChamber {
    h_sigma: Option<f64>,
    theta_c_deg: Option<f64>,
    rho_target: Option<f64>,
    freq_correlated: Option<bool>,
    coherence_bw_hz: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTarget {
    width_m: Option<f64>,
    height_m: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGeometry {
    distance_m: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    angle_start_deg: Option<f64>,
    angle_stop_deg: Option<f64>,
    angle_step_deg: Option<f64>,
    shift_list_deg: Option<Vec<f64>>,
    n_seeds: Option<usize>,
    base_seed: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExtraction {
    r_window_m: Option<f64>,
    snr_threshold_db: Option<f64>,
}

// ── loading ─────────────────────────────────────────────────────────────────

/// Parse and validate a JSON configuration document. Missing keys take the
/// defaults; unknown keys and invariant violations are errors naming the key.
pub fn load_config(text: &str) -> Result<ExperimentConfig> {
    let raw: RawConfig = serde_json::from_str(text)
        .map_err(|e| Error::config(format!("configuration parse error: {e}")))?;
    let d = ExperimentConfig::default();

    let grid = {
        let r = raw.grid.unwrap_or_default();
        GridConfig {
            f_start_hz: r.f_start_hz.unwrap_or(d.grid.f_start_hz),
            f_stop_hz: r.f_stop_hz.unwrap_or(d.grid.f_stop_hz),
            n_points: r.n_points.unwrap_or(d.grid.n_points),
        }
    };
    let antenna = {
        let r = raw.antenna.unwrap_or_default();
        AntennaConfig {
            gain_dbi: r.gain_dbi.unwrap_or(d.antenna.gain_dbi),
            efficiency: r.efficiency.unwrap_or(d.antenna.efficiency),
            s_fs: r.s_fs.or(d.antenna.s_fs),
        }
    };
    let chamber = {
        let r = raw.chamber.unwrap_or_default();
        ChamberConfig {
            h_sigma: r.h_sigma.unwrap_or(d.chamber.h_sigma),
            theta_c_deg: r.theta_c_deg.unwrap_or(d.chamber.theta_c_deg),
            rho_target: r.rho_target.unwrap_or(d.chamber.rho_target),
            freq_correlated: r.freq_correlated.unwrap_or(d.chamber.freq_correlated),
            coherence_bw_hz: r.coherence_bw_hz.unwrap_or(d.chamber.coherence_bw_hz),
        }
    };
    let target = {
        let r = raw.target.unwrap_or_default();
        TargetConfig {
            width_m: r.width_m.unwrap_or(d.target.width_m),
            height_m: r.height_m.unwrap_or(d.target.height_m),
        }
    };
    let geometry = {
        let r = raw.geometry.unwrap_or_default();
        GeometryConfig { distance_m: r.distance_m.unwrap_or(d.geometry.distance_m) }
    };
    let sweep = {
        let r = raw.sweep.unwrap_or_default();
        SweepConfig {
            angle_start_deg: r.angle_start_deg.unwrap_or(d.sweep.angle_start_deg),
            angle_stop_deg: r.angle_stop_deg.unwrap_or(d.sweep.angle_stop_deg),
            angle_step_deg: r.angle_step_deg.unwrap_or(d.sweep.angle_step_deg),
            shift_list_deg: r.shift_list_deg.unwrap_or_else(|| d.sweep.shift_list_deg.clone()),
            n_seeds: r.n_seeds.unwrap_or(d.sweep.n_seeds),
            base_seed: r.base_seed.unwrap_or(d.sweep.base_seed),
        }
    };
    let extraction = {
        let r = raw.extraction.unwrap_or_default();
        ExtractionConfig {
            r_window_m: r.r_window_m.unwrap_or(d.extraction.r_window_m),
            snr_threshold_db: r.snr_threshold_db.unwrap_or(d.extraction.snr_threshold_db),
        }
    };

    let config =
        ExperimentConfig { grid, antenna, chamber, target, geometry, sweep, extraction };
    validate(&config)?;
    Ok(config)
}

fn check(ok: bool, key: &str, detail: String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::config(format!("{key}: {detail}")))
    }
}

/// Validate every section against the owning module's invariants, naming the
/// offending key path.
fn validate(c: &ExperimentConfig) -> Result<()> {
    let g = &c.grid;
    check(g.f_start_hz.is_finite() && g.f_start_hz > 0.0, "grid.f_start_hz",
        format!("must be finite and > 0, got {}", g.f_start_hz))?;
    check(g.f_stop_hz.is_finite() && g.f_stop_hz > g.f_start_hz, "grid.f_stop_hz",
        format!("must exceed f_start_hz, got {}", g.f_stop_hz))?;
    check(g.n_points >= 2, "grid.n_points",
        format!("must be at least 2, got {}", g.n_points))?;

    let a = &c.antenna;
    check(a.gain_dbi.is_finite(), "antenna.gain_dbi",
        format!("must be finite, got {}", a.gain_dbi))?;
    check(a.efficiency > 0.0 && a.efficiency <= 1.0, "antenna.efficiency",
        format!("must lie in (0, 1], got {}", a.efficiency))?;
    match &a.s_fs {
        Some(SfsSpec::Constant { re, im }) => {
            check(re.hypot(*im) < 1.0, "antenna.s_fs",
                format!("|S_FS| must be < 1, got {}", re.hypot(*im)))?;
        }
        Some(SfsSpec::File { path }) => {
            check(!path.is_empty(), "antenna.s_fs.path", "must not be empty".to_string())?;
        }
        None => {}
    }

    let ch = &c.chamber;
    check(ch.h_sigma.is_finite() && ch.h_sigma >= 0.0, "chamber.h_sigma",
        format!("must be finite and >= 0, got {}", ch.h_sigma))?;
    check(ch.theta_c_deg.is_finite() && ch.theta_c_deg > 0.0, "chamber.theta_c_deg",
        format!("must be finite and > 0, got {}", ch.theta_c_deg))?;
    check((0.0..=1.0).contains(&ch.rho_target), "chamber.rho_target",
        format!("must lie in [0, 1], got {}", ch.rho_target))?;
    check(ch.coherence_bw_hz.is_finite() && ch.coherence_bw_hz > 0.0, "chamber.coherence_bw_hz",
        format!("must be finite and > 0, got {}", ch.coherence_bw_hz))?;

    let t = &c.target;
    check(t.width_m.is_finite() && t.width_m > 0.0, "target.width_m",
        format!("must be finite and > 0, got {}", t.width_m))?;
    check(t.height_m.is_finite() && t.height_m > 0.0, "target.height_m",
        format!("must be finite and > 0, got {}", t.height_m))?;

    let geo = &c.geometry;
    check(geo.distance_m.is_finite() && geo.distance_m > 0.0, "geometry.distance_m",
        format!("must be finite and > 0, got {}", geo.distance_m))?;

    // Far-field condition R ≥ 2D²/λ_min: a violating geometry cannot be
    // measured, so it is a configuration error up front.
    let d_max = t.width_m.hypot(t.height_m);
    let lambda_min = SPEED_OF_LIGHT / g.f_stop_hz;
    let r_min = 2.0 * d_max * d_max / lambda_min;
    check(geo.distance_m >= r_min, "geometry.distance_m",
        format!("violates the far-field condition: need >= 2D²/λ_min = {r_min:.4} m, got {}",
            geo.distance_m))?;

    let s = &c.sweep;
    check(s.angle_step_deg.is_finite() && s.angle_step_deg > 0.0, "sweep.angle_step_deg",
        format!("must be finite and > 0, got {}", s.angle_step_deg))?;
    check(s.angle_start_deg.is_finite() && s.angle_start_deg > -90.0, "sweep.angle_start_deg",
        format!("must lie inside (-90, 90), got {}", s.angle_start_deg))?;
    check(
        s.angle_stop_deg.is_finite()
            && s.angle_stop_deg < 90.0
            && s.angle_stop_deg >= s.angle_start_deg,
        "sweep.angle_stop_deg",
        format!("must lie inside (-90, 90) and not precede angle_start_deg, got {}",
            s.angle_stop_deg),
    )?;
    check(s.shift_list_deg.iter().all(|v| v.is_finite()), "sweep.shift_list_deg",
        "entries must be finite".to_string())?;
    check(!s.shift_list_deg.is_empty(), "sweep.shift_list_deg",
        "must hold at least one shift".to_string())?;
    check(s.n_seeds >= 1, "sweep.n_seeds", format!("must be >= 1, got {}", s.n_seeds))?;

    let e = &c.extraction;
    check(e.r_window_m.is_finite() && e.r_window_m >= 0.0, "extraction.r_window_m",
        format!("must be finite and >= 0, got {}", e.r_window_m))?;
    check(e.snr_threshold_db.is_finite(), "extraction.snr_threshold_db",
        format!("must be finite, got {}", e.snr_threshold_db))?;
    Ok(())
}

// ── tests ───────────────────────────────────────────────────────────────────
