//! Shared helpers for the integration suites: an independent brute-force
//! physical-optics oracle plus small statistics utilities.

#![allow(dead_code)]

use num_complex::Complex64;

/// Speed of light in vacuum (m/s), restated here so the oracle shares no code
/// with the library under test.
pub const C_M_PER_S: f64 = 299_792_458.0;

/// Brute-force physical-optics RCS of a perfectly conducting rectangular
/// plate, by direct 2-D trapezoid quadrature of the induced-current
/// radiation integral (no closed form anywhere):
///
/// ```text
/// σ(θ) = (4π/λ²)·cos²θ·|I|²,   I = ∬_plate exp(j·2k·x·sinθ) dx dy
/// ```
///
/// with the aspect rotation about the plate's vertical (height) edge, so the
/// phase varies along the width only. 801 nodes per edge keep the quadrature
/// error orders of magnitude below the 0.5% comparison tolerance.
pub fn po_integral_oracle(width_m: f64, height_m: f64, f_hz: f64, aspect_deg: f64) -> f64 {
    let lambda = C_M_PER_S / f_hz;
    let k = 2.0 * std::f64::consts::PI / lambda;
    let theta = aspect_deg.to_radians();
    let n = 801_usize;
    let dx = width_m / (n - 1) as f64;
    let dy = height_m / (n - 1) as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for ix in 0..n {
        let x = -0.5 * width_m + ix as f64 * dx;
        let wx = if ix == 0 || ix == n - 1 { 0.5 } else { 1.0 };
        let node = Complex64::from_polar(1.0, 2.0 * k * x * theta.sin());
        for iy in 0..n {
            let wy = if iy == 0 || iy == n - 1 { 0.5 } else { 1.0 };
            acc += node * (wx * wy);
        }
    }
    let integral = acc * (dx * dy);
    4.0 * std::f64::consts::PI * theta.cos().powi(2) * integral.norm_sqr() / (lambda * lambda)
}

/// Relative error |a − b| / |b|.
pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Median of a sample (not in place); +∞ entries sort as upper-tail values.
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("no NaN"));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Average ranks (1-based); ties share the mean of their rank range.
fn ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("no NaN"));
    let mut out = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let shared = (i + j) as f64 / 2.0 + 1.0;
        for &slot in &order[i..=j] {
            out[slot] = shared;
        }
        i = j + 1;
    }
    out
}

/// Pearson correlation coefficient.
pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}

/// Spearman rank correlation with average-rank tie handling. Infinite values
/// participate through their ranks, so a diverging tail still correlates.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    pearson(&ranks(x), &ranks(y))
}

#[cfg(test)]
mod self_checks {
    use super::*;

    #[test]
    fn spearman_handles_ties_and_infinities() {
        assert!((spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]) - 1.0).abs() < 1e-12);
        assert!((spearman(&[1.0, 2.0, 3.0], &[30.0, 20.0, 10.0]) + 1.0).abs() < 1e-12);
        let s = spearman(&[1.0, 2.0, 3.0, 4.0], &[0.1, 0.5, f64::INFINITY, f64::INFINITY]);
        assert!(s > 0.9, "rising series with infinite tail: {s}");
    }

    #[test]
    fn median_of_even_and_odd_samples() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert_eq!(median(&[1.0, f64::INFINITY]), f64::INFINITY);
    }
}
