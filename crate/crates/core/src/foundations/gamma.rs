//! Euler's Gamma function and the fractional Laplacian normalization.

// Published coefficient tables are kept digit for digit.
#![allow(clippy::excessive_precision)]

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::foundations::order::FracOrder;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function on the real line (Lanczos, g = 7, nine terms).
///
/// Arguments below one half go through the reflection formula. Poles return
/// infinity.
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        if x == x.floor() {
            return f64::INFINITY;
        }
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    let x = x - 1.0;
    let mut acc = LANCZOS_COEFFS[0];
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc
}

/// Normalization constant of the fractional Laplacian in dimension `d`:
/// `s 4^s Gamma((d + 2s)/2) / (pi^{d/2} Gamma(1 - s))`.
pub fn gamma_ds(d: usize, s: FracOrder) -> Result<f64> {
    if d == 0 || d > 3 {
        return Err(Error::Domain(format!("dimension must be 1, 2 or 3, got {d}")));
    }
    Ok(gamma_ds_unchecked(d, s.value()))
}

/// [`gamma_ds`] for a raw exponent, used where `s` is not a regime-tagged order
/// (for instance `sigma / 2` in fractional perimeters).
pub fn gamma_ds_unchecked(d: usize, s: f64) -> f64 {
    let d = d as f64;
    s * 4f64.powf(s) * PI.powf(-d / 2.0) * gamma((d + 2.0 * s) / 2.0) / gamma(1.0 - s)
}

/// Surface measure of the unit sphere `S^{k}` in `R^{k+1}`.
pub fn sphere_measure(k: usize) -> f64 {
    let n = (k + 1) as f64;
    2.0 * PI.powf(n / 2.0) / gamma(n / 2.0)
}
