//! Deterministic ballistic (line-of-sight) coupling between antenna and target.
//!
//! A target of RCS σ at distance R adds a coherent echo C(f)·√σ to the
//! antenna's reflection coefficient. The monostatic radar equation, folded
//! into one-port reflection form, gives its magnitude
//!
//! ```text
//! |C(f)| = G·λ(f) / ((4π)^{3/2}·R²) · (1 − |S_FS(f)|²)
//! ```
//!
//! with G the linear antenna gain and the mismatch factor (1 − |S_FS|²)
//! accounting for the power reflected straight back at the antenna port. The
//! phase is the electrical round trip plus the target's scattering phase:
//!
//! ```text
//! C(f) = |C(f)| · exp(−j·2π·f·(2R/c)) · exp(+j·φ₀)
//! ```
//!
//! Across a frequency sweep the echo therefore rotates once per c/(2R) of
//! bandwidth — the oscillation the matched-filter extraction locks onto.

use num_complex::Complex64;

use crate::chamber::AntennaModel;
use crate::spectra::SPEED_OF_LIGHT;

/// Magnitude of the ballistic coupling coefficient,
/// G·λ(f)/((4π)^{3/2}·R²)·(1 − |S_FS(f)|²).
///
/// `f_hz` and `r_m` must be positive (debug-asserted); S_FS is taken from the
/// antenna model at `f_hz`.
pub fn coupling_magnitude(antenna: &AntennaModel, f_hz: f64, r_m: f64) -> f64 {
    debug_assert!(f_hz > 0.0, "coupling frequency must be positive");
    debug_assert!(r_m > 0.0, "coupling distance must be positive");
    let lambda = SPEED_OF_LIGHT / f_hz;
    let mismatch = 1.0 - antenna.s_fs_at(f_hz).norm_sqr();
    let four_pi = 4.0 * std::f64::consts::PI;
    antenna.gain_linear() * lambda / (four_pi.powf(1.5) * r_m * r_m) * mismatch
}

/// Complex ballistic coupling coefficient
/// C(f) = |C(f)|·exp(−j·2π·f·2R/c + j·φ₀).
///
/// The round-trip phase is reduced modulo one turn *before* conversion to
/// radians (2R·f/c reaches hundreds of turns at X band; reducing first keeps
/// the result accurate to ~1e−13 rad instead of losing precision in a large
/// angle).
pub fn coupling(antenna: &AntennaModel, f_hz: f64, r_m: f64, phi0_rad: f64) -> Complex64 {
    let magnitude = coupling_magnitude(antenna, f_hz, r_m);
    let turns = f_hz * (2.0 * r_m / SPEED_OF_LIGHT);
    let angle = phi0_rad - 2.0 * std::f64::consts::PI * turns.fract();
    Complex64::from_polar(magnitude, angle)
}

// ── tests ───────────────────────────────────────────────────────────────────
