//! Welch spectral estimate of a free-surface record.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::{Error, Result};

/// Segment length of the estimator.
pub const SEGMENT: usize = 512;

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub frequencies: Vec<f64>,
    /// One-sided density (m²/Hz).
    pub density: Vec<f64>,
    pub df: f64,
    pub m0: f64,
    /// `4√m0`.
    pub hs: f64,
    /// Inverse of the peak frequency.
    pub tp: f64,
    pub segments: usize,
}

/// Hann-windowed, 50 % overlapped periodogram average of the de-meaned
/// series.
pub fn spectral_analysis(eta: &[f64], dt: f64) -> Result<Spectrum> {
    if eta.len() < SEGMENT {
        return Err(Error::TooShort { have: eta.len(), need: SEGMENT });
    }
    if !(dt > 0.0) || eta.iter().any(|v| !v.is_finite()) {
        return Err(Error::MalformedSeries("non-finite samples or non-positive step".into()));
    }
    let mean = eta.iter().sum::<f64>() / eta.len() as f64;
    let n = SEGMENT;
    let hop = n / 2;
    let w: Vec<f64> =
        (0..n).map(|k| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * k as f64 / n as f64).cos()).collect();
    let wss: f64 = w.iter().map(|x| x * x).sum();
    let fft = FftPlanner::new().plan_fft_forward(n);
    let bins = n / 2 + 1;
    let mut acc = vec![0.0; bins];
    let mut segments = 0;
    let mut buf = vec![Complex::new(0.0, 0.0); n];
    let mut start = 0;
    while start + n <= eta.len() {
        for k in 0..n {
            buf[k] = Complex::new((eta[start + k] - mean) * w[k], 0.0);
        }
        fft.process(&mut buf);
        for k in 0..bins {
            acc[k] += buf[k].norm_sqr();
        }
        segments += 1;
        start += hop;
    }
    let fs = 1.0 / dt;
    let df = fs / n as f64;
    let density: Vec<f64> = acc
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let one_sided = if k == 0 || k == n / 2 { 1.0 } else { 2.0 };
            one_sided * a / (segments as f64 * fs * wss)
        })
        .collect();
    let frequencies: Vec<f64> = (0..bins).map(|k| k as f64 * df).collect();
    let m0: f64 = density.iter().sum::<f64>() * df;
    let peak = (1..bins).max_by(|&a, &b| density[a].total_cmp(&density[b])).unwrap_or(1);
    let tp = 1.0 / frequencies[peak];
    Ok(Spectrum { frequencies, density, df, m0, hs: 4.0 * m0.sqrt(), tp, segments })
}

/// Mean crest and trough heights of a record (zero-upcrossing analysis).
pub fn crest_trough(eta: &[f64]) -> Option<(f64, f64)> {
    let mut crests = Vec::new();
    let mut troughs = Vec::new();
    let mut hi = f64::NEG_INFINITY;
    let mut lo = f64::INFINITY;
    let mut started = false;
    for w in eta.windows(2) {
        if w[0] < 0.0 && w[1] >= 0.0 {
            if started {
                crests.push(hi);
                troughs.push(lo);
            }
            started = true;
            hi = f64::NEG_INFINITY;
            lo = f64::INFINITY;
        }
        hi = hi.max(w[1]);
        lo = lo.min(w[1]);
    }
    if crests.is_empty() {
        return None;
    }
    let n = crests.len() as f64;
    Some((crests.iter().sum::<f64>() / n, -troughs.iter().sum::<f64>() / n))
}
