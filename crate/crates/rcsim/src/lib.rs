//! Monostatic radar-cross-section extraction in a reverberation chamber.
//!
//! A metal plate sits in a mode-stirred cavity at distance R from a single
//! antenna. The one-port reflection coefficient of the empty chamber is the
//! antenna's free-space mismatch plus a diffuse stirred backscatter term;
//! inserting the target adds a deterministic ballistic echo whose magnitude
//! follows the radar equation and whose phase winds as e^(−j4πfR/c) across
//! the frequency sweep. Subtracting an empty-chamber measurement from a
//! loaded one (`extract`) leaves that echo on top of residual stirred noise,
//! and a matched-filter regression over the band recovers the RCS σ̂, the
//! echo phase, and the target range in one shot.
//!
//! The crate covers the full study pipeline:
//!
//! * [`spectra`] — frequency grids and complex one-port spectra;
//! * [`target`] — flat-plate physical-optics RCS and measurement geometry;
//! * [`ballistic`] — the deterministic antenna–target–antenna echo;
//! * [`chamber`] — the stirred diffuse field, correlated across stirrer
//!   angle, and synthetic one-port measurements;
//! * [`extract`] — differencing, normalization, and the matched-filter fit;
//! * [`metrics`] — pattern containers, peak normalization, error scoring;
//! * [`experiment`] — orchestrated studies (same-position pattern,
//!   stirrer-shift sweep, measured-file ingestion) with reproducible seeding;
//! * [`io`] — Touchstone one-port files, CSV tables, JSON configuration.
//!
//! The central experimental question the shift sweep answers: how much does
//! the extraction degrade when the stirrer position of the empty reference
//! differs from that of the loaded measurement by a known shift, relative to
//! the chamber's stirrer decorrelation angle?

pub mod ballistic;
pub mod chamber;
pub mod error;
pub mod experiment;
pub mod extract;
pub mod io;
pub mod metrics;
pub mod spectra;
pub mod target;

pub use error::{Error, Result};
