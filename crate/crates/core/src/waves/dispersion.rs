use core::f64::consts::PI;

use crate::math::{cosh, sinh, tanh};
use crate::{Error, Result, GRAVITY};

const K_LO: f64 = 1e-6;
const K_HI: f64 = 1e3;

/// Wavenumber `k` solving `ω² = g k tanh(k d)` by bisection on `[1e-6, 1e3]`.
pub fn solve_dispersion(period: f64, depth: f64) -> Result<f64> {
    if !(period > 0.0 && depth > 0.0) || !period.is_finite() || !depth.is_finite() {
        return Err(Error::invalid("period and depth must be positive"));
    }
    let omega = 2.0 * PI / period;
    let f = |k: f64| GRAVITY * k * tanh(k * depth) - omega * omega;
    let (mut lo, mut hi) = (K_LO, K_HI);
    let (flo, fhi) = (f(lo), f(hi));
    if flo.signum() == fhi.signum() {
        return Err(Error::NoDispersionRoot { period, depth, lo, hi });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Height-to-stroke ratio `S0/H = [sinh(kd)cosh(kd) + kd] / (2 sinh²(kd))`.
pub fn stroke_factor(k: f64, depth: f64) -> f64 {
    let kd = k * depth;
    let s = sinh(kd);
    (s * cosh(kd) + kd) / (2.0 * s * s)
}

/// Piston stroke producing a regular wave of height `height` by linear
/// wavemaker theory.
pub fn regular_stroke(height: f64, period: f64, depth: f64) -> Result<f64> {
    if !(height > 0.0) {
        return Err(Error::invalid("wave height must be positive"));
    }
    let k = solve_dispersion(period, depth)?;
    Ok(height * stroke_factor(k, depth))
}
