//! Touchstone v1.1 one-port (.s1p) reading and writing.
//!
//! Grammar handled here:
//!
//! ```text
//! ! comment lines (also allowed inline after data)
//! # <HZ|KHZ|MHZ|GHZ> S <RI|MA|DB> R <resistance>
//! <frequency> <v1> <v2>
//! ```
//!
//! Exactly one option line is required; its tokens are case-insensitive and
//! may appear in any order, with the standard defaults (GHZ, S, MA, R 50) for
//! omitted entries. Only S-parameter reflection data is supported, and the
//! reference resistance is parsed but unused (reflection coefficients are
//! already normalized quantities).
//!
//! Writing always emits `# HZ S RI R 50` with 17-significant-digit scientific
//! notation, the shortest form that round-trips every IEEE-754 double exactly,
//! so read∘write is value-exact.

use num_complex::Complex64;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::spectra::{ComplexSpectrum, FrequencyGrid};

/// Relative tolerance on frequency-step uniformity when rebuilding a grid
/// from file samples.
const GRID_UNIFORMITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
enum ValueFormat {
    RealImaginary,
    MagnitudeAngle,
    DbAngle,
}

/// Sine/cosine of an angle in degrees, exact at the cardinal angles.
///
/// Touchstone MA/DB files routinely carry angles like 90 or 180 written by
/// other tools; converting through radians would turn those into ±6.1e−17
/// residues. Reducing mod 360° and special-casing the four cardinal points
/// keeps `1.0 90` parsing to exactly 0 + j1.
fn cos_sin_deg(angle_deg: f64) -> (f64, f64) {
    let r = angle_deg.rem_euclid(360.0);
    if r == 0.0 {
        (1.0, 0.0)
    } else if r == 90.0 {
        (0.0, 1.0)
    } else if r == 180.0 {
        (-1.0, 0.0)
    } else if r == 270.0 {
        (0.0, -1.0)
    } else {
        let rad = angle_deg.to_radians();
        (rad.cos(), rad.sin())
    }
}

fn convert_value(format: ValueFormat, v1: f64, v2: f64) -> Complex64 {
    match format {
        ValueFormat::RealImaginary => Complex64::new(v1, v2),
        ValueFormat::MagnitudeAngle => {
            let (c, s) = cos_sin_deg(v2);
            Complex64::new(v1 * c, v1 * s)
        }
        ValueFormat::DbAngle => {
            let mag = 10.0_f64.powf(v1 / 20.0);
            let (c, s) = cos_sin_deg(v2);
            Complex64::new(mag * c, mag * s)
        }
    }
}

/// Parse the option line tokens (everything after `#`).
fn parse_option_line(rest: &str) -> Result<(f64, ValueFormat)> {
    let mut unit_hz = 1e9; // GHZ default
    let mut format = ValueFormat::MagnitudeAngle; // MA default
    let mut tokens = rest.split_whitespace().peekable();
    while let Some(tok) = tokens.next() {
        match tok.to_ascii_uppercase().as_str() {
            "HZ" => unit_hz = 1.0,
            "KHZ" => unit_hz = 1e3,
            "MHZ" => unit_hz = 1e6,
            "GHZ" => unit_hz = 1e9,
            "S" => {}
            "Y" | "Z" | "G" | "H" => {
                return Err(Error::data(format!(
                    "only S-parameter Touchstone files are supported, found parameter '{tok}'"
                )));
            }
            "RI" => format = ValueFormat::RealImaginary,
            "MA" => format = ValueFormat::MagnitudeAngle,
            "DB" => format = ValueFormat::DbAngle,
            "R" => {
                // Reference resistance: consumed and ignored.
                let value = tokens.next().ok_or_else(|| {
                    Error::data("option line 'R' must be followed by a resistance value")
                })?;
                value.parse::<f64>().map_err(|_| {
                    Error::data(format!("invalid reference resistance '{value}'"))
                })?;
            }
            other => {
                return Err(Error::data(format!(
                    "unrecognized token '{other}' in Touchstone option line"
                )));
            }
        }
    }
    Ok((unit_hz, format))
}

/// Rebuild a uniform frequency grid from ascending file samples.
fn grid_from_samples(freqs_hz: &[f64]) -> Result<FrequencyGrid> {
    let n = freqs_hz.len();
    if n == 0 {
        return Err(Error::data("Touchstone file contains no data rows"));
    }
    let first = freqs_hz[0];
    if !(first.is_finite() && first > 0.0) {
        return Err(Error::data(format!(
            "Touchstone frequencies must be positive, first is {first} Hz"
        )));
    }
    if n == 1 {
        return Ok(FrequencyGrid::single(first));
    }
    let last = freqs_hz[n - 1];
    let step = (last - first) / (n - 1) as f64;
    for (k, &f) in freqs_hz.iter().enumerate() {
        let expected = first + k as f64 * step;
        if (f - expected).abs() > GRID_UNIFORMITY_TOL * step {
            return Err(Error::data(format!(
                "Touchstone frequency grid is not uniform: row {} has {f} Hz, expected {expected} Hz",
                k + 1
            )));
        }
    }
    crate::spectra::make_grid(first, last, n)
        .map_err(|e| Error::data(format!("invalid Touchstone frequency grid: {e}")))
}

/// Parse Touchstone v1.1 one-port text into a complex spectrum.
///
/// Frequencies must be strictly ascending and uniform (the spectrum lives on
/// an affine grid); the option line is mandatory and unique.
pub fn read_touchstone_1port(text: &str) -> Result<ComplexSpectrum> {
    let mut option: Option<(f64, ValueFormat)> = None;
    let mut freqs: Vec<f64> = Vec::new();
    let mut values: Vec<Complex64> = Vec::new();

    for (line_no, raw_line) in text.lines().enumerate() {
        // Strip inline comments, then whitespace.
        let line = match raw_line.find('!') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if option.is_some() {
                return Err(Error::data(format!(
                    "duplicate Touchstone option line at line {}",
                    line_no + 1
                )));
            }
            option = Some(parse_option_line(rest)?);
            continue;
        }

        let (unit_hz, format) = option.ok_or_else(|| {
            Error::data(format!(
                "data at line {} before the '#' option line (option line missing?)",
                line_no + 1
            ))
        })?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::data(format!(
                "line {}: one-port data rows need exactly 3 fields, found {}",
                line_no + 1,
                fields.len()
            )));
        }
        let mut parsed = [0.0_f64; 3];
        for (slot, field) in parsed.iter_mut().zip(&fields) {
            *slot = field.parse::<f64>().map_err(|_| {
                Error::data(format!("line {}: invalid number '{field}'", line_no + 1))
            })?;
        }
        let f_hz = parsed[0] * unit_hz;
        if let Some(&prev) = freqs.last() {
            if f_hz <= prev {
                return Err(Error::data(format!(
                    "line {}: frequencies must be strictly ascending ({f_hz} Hz after {prev} Hz)",
                    line_no + 1
                )));
            }
        }
        freqs.push(f_hz);
        values.push(convert_value(format, parsed[1], parsed[2]));
    }

    if option.is_none() {
        return Err(Error::data("Touchstone file has no '#' option line"));
    }
    let grid = grid_from_samples(&freqs)?;
    ComplexSpectrum::new(grid, values)
        .map_err(|e| Error::data(format!("invalid Touchstone data: {e}")))
}

/// Serialize a spectrum as Touchstone v1.1 one-port text (`# HZ S RI R 50`,
/// one row per sample, 17-significant-digit scientific notation).
pub fn write_touchstone_1port(spectrum: &ComplexSpectrum) -> Result<String> {
    let mut out = String::new();
    out.push_str("! one-port reflection coefficient\n");
    out.push_str("# HZ S RI R 50\n");
    for (f, v) in spectrum.iter() {
        // 16 digits after the point = 17 significant digits: exact f64
        // decimal round-trip.
        writeln!(out, "{:.16e} {:.16e} {:.16e}", f, v.re, v.im).expect("string write");
    }
    Ok(out)
}

// ── tests ───────────────────────────────────────────────────────────────────

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::make_grid;

    #[test]
    fn parses_real_imaginary_data() {
        let s = read_touchstone_1port("# GHz S RI R 50\n10.0 0.1 -0.2\n").unwrap();
        assert_eq!(s.len(), 1);
        let (f, v) = s.iter().next().unwrap();
        assert_eq!(f, 1.0e10);
        assert_eq!(v, Complex64::new(0.1, -0.2));
    }

    #[test]
    fn parses_magnitude_angle_data() {
        let s = read_touchstone_1port("# MHz S MA R 50\n100 1.0 90\n").unwrap();
        let (f, v) = s.iter().next().unwrap();
        assert_eq!(f, 1.0e8);
        assert_eq!(v, Complex64::new(0.0, 1.0), "quarter turn must be exact");
    }

    #[test]
    fn parses_db_angle_data() {
        let s = read_touchstone_1port("# HZ S DB R 50\n1e9 -6.0205999 0\n").unwrap();
        let (f, v) = s.iter().next().unwrap();
        assert_eq!(f, 1.0e9);
        // 10^(−6.0205999/20) lands a hair above one half.
        assert_eq!(v, Complex64::new(0.500_000_000_764_436_6, 0.0));
    }

    #[test]
    fn option_tokens_are_case_insensitive_and_order_free() {
        let a = read_touchstone_1port("# ghz s ri r 50\n1.0 0.5 0.5\n").unwrap();
        let b = read_touchstone_1port("# S RI GHZ R 50\n1.0 0.5 0.5\n").unwrap();
        assert_eq!(a.values(), b.values());
        assert_eq!(a.grid(), b.grid());
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "! header comment\n\n# HZ S RI R 50\n! mid comment\n1e9 0.1 0.2 ! inline\n2e9 0.3 0.4\n";
        let s = read_touchstone_1port(text).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.values()[1], Complex64::new(0.3, 0.4));
    }

    #[test]
    fn rejects_missing_option_line() {
        let err = read_touchstone_1port("1e9 0.1 0.2\n").unwrap_err();
        assert!(err.to_string().contains("option line"), "got: {err}");
        let err = read_touchstone_1port("! only comments\n").unwrap_err();
        assert!(err.to_string().contains("option line"), "got: {err}");
    }

    #[test]
    fn rejects_duplicate_option_line() {
        let err = read_touchstone_1port("# HZ S RI R 50\n# HZ S RI R 50\n1e9 0 0\n").unwrap_err();
        assert!(err.to_string().contains("duplicate"), "got: {err}");
    }

    #[test]
    fn rejects_non_s_parameters() {
        let err = read_touchstone_1port("# HZ Z RI R 50\n1e9 0 0\n").unwrap_err();
        assert!(err.to_string().contains("S-parameter"), "got: {err}");
    }

    #[test]
    fn rejects_malformed_rows() {
        let err = read_touchstone_1port("# HZ S RI R 50\n1e9 0.1\n").unwrap_err();
        assert!(err.to_string().contains("3 fields"), "got: {err}");
        let err = read_touchstone_1port("# HZ S RI R 50\n1e9 0.1 zero\n").unwrap_err();
        assert!(err.to_string().contains("invalid number"), "got: {err}");
    }

    #[test]
    fn rejects_non_ascending_frequencies() {
        let err =
            read_touchstone_1port("# HZ S RI R 50\n2e9 0 0\n1e9 0 0\n").unwrap_err();
        assert!(err.to_string().contains("ascending"), "got: {err}");
        let err =
            read_touchstone_1port("# HZ S RI R 50\n1e9 0 0\n1e9 0 0\n").unwrap_err();
        assert!(err.to_string().contains("ascending"), "got: {err}");
    }

    #[test]
    fn rejects_non_uniform_grids() {
        let err = read_touchstone_1port("# HZ S RI R 50\n1e9 0 0\n2e9 0 0\n2.5e9 0 0\n")
            .unwrap_err();
        assert!(err.to_string().contains("not uniform"), "got: {err}");
    }

    #[test]
    fn single_sample_round_trips() {
        let text = "# HZ S RI R 50\n1e10 1.0 0.0\n";
        let s = read_touchstone_1port(text).unwrap();
        let written = write_touchstone_1port(&s).unwrap();
        let data_rows: Vec<&str> =
            written.lines().filter(|l| !l.starts_with(['!', '#'])).collect();
        assert_eq!(data_rows.len(), 1, "exactly one data row");
        let again = read_touchstone_1port(&written).unwrap();
        assert_eq!(s.values(), again.values());
        assert_eq!(s.grid(), again.grid());
    }

    #[test]
    fn written_files_round_trip_exactly() {
        let grid = make_grid(9.75e9, 10.25e9, 101).unwrap();
        let values: Vec<Complex64> = (0..101)
            .map(|k| {
                // Awkward, rounding-hostile values.
                let t = k as f64 * 0.137 - 3.0;
                Complex64::new((t * 12.345).sin() / 3.0, (t * 9.876).cos() / 7.0)
            })
            .collect();
        let s = ComplexSpectrum::new(grid, values).unwrap();
        let again = read_touchstone_1port(&write_touchstone_1port(&s).unwrap()).unwrap();
        assert_eq!(s.values(), again.values(), "values must round-trip bit-exactly");
        assert_eq!(s.grid(), again.grid(), "grid must round-trip bit-exactly");
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            /// read∘write is the identity on values and grid for arbitrary
            /// finite spectra.
            #[test]
            fn round_trip_identity(
                f_start in 1e6_f64..1e10,
                span in 1e3_f64..1e9,
                values in proptest::collection::vec(
                    (-1.0_f64..1.0, -1.0_f64..1.0),
                    2..50
                ),
            ) {
                let n = values.len();
                let grid = make_grid(f_start, f_start + span, n).unwrap();
                let vals: Vec<Complex64> =
                    values.iter().map(|(re, im)| Complex64::new(*re, *im)).collect();
                let s = ComplexSpectrum::new(grid, vals).unwrap();
                let again =
                    read_touchstone_1port(&write_touchstone_1port(&s).unwrap()).unwrap();
                prop_assert_eq!(s.values(), again.values());
                prop_assert_eq!(s.grid(), again.grid());
            }
        }
    }
}
