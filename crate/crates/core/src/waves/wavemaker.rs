use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::dispersion::{solve_dispersion, stroke_factor};
use crate::math::{cos, exp, powf, powi, sin, sqrt};
use crate::{Error, Result};

/// One sinusoidal piston component: `(stroke/2) sin(omega t + phase)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveComponent {
    pub stroke: f64,
    pub omega: f64,
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum WaveMakerSpec {
    Regular {
        height: f64,
        period: f64,
        phase: f64,
        stroke: f64,
        omega: f64,
        depth: f64,
    },
    Irregular {
        components: Vec<WaveComponent>,
        depth: f64,
        /// Peak period; sets the length of the start-up ramp.
        peak_period: f64,
    },
}

impl WaveMakerSpec {
    /// Regular wave with the stroke from linear wavemaker theory.
    pub fn regular(height: f64, period: f64, phase: f64, depth: f64) -> Result<Self> {
        let k = solve_dispersion(period, depth)?;
        if !(height > 0.0) {
            return Err(Error::invalid("wave height must be positive"));
        }
        let spec = WaveMakerSpec::Regular {
            height,
            period,
            phase,
            stroke: height * stroke_factor(k, depth),
            omega: 2.0 * PI / period,
            depth,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn irregular(components: Vec<WaveComponent>, depth: f64, peak_period: f64) -> Result<Self> {
        let spec = WaveMakerSpec::Irregular { components, depth, peak_period };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            WaveMakerSpec::Regular { stroke, omega, period, depth, .. } => {
                if !(*stroke > 0.0) {
                    return Err(Error::invalid("regular stroke must be positive"));
                }
                if (omega - 2.0 * PI / period).abs() > 1e-12 * omega.abs() {
                    return Err(Error::invalid("omega must equal 2π/T"));
                }
                if !(*depth > 0.0) {
                    return Err(Error::invalid("depth must be positive"));
                }
            }
            WaveMakerSpec::Irregular { components, depth, peak_period } => {
                if components.is_empty() {
                    return Err(Error::invalid("irregular wavemaker needs at least one component"));
                }
                for c in components {
                    if !(c.stroke >= 0.0) || !(c.phase >= 0.0 && c.phase < 2.0 * PI) || !(c.omega > 0.0) {
                        return Err(Error::invalid("invalid irregular component"));
                    }
                }
                if !(*depth > 0.0 && *peak_period > 0.0) {
                    return Err(Error::invalid("depth and peak period must be positive"));
                }
            }
        }
        Ok(())
    }

    pub fn depth(&self) -> f64 {
        match self {
            WaveMakerSpec::Regular { depth, .. } | WaveMakerSpec::Irregular { depth, .. } => *depth,
        }
    }

    /// Characteristic period: `T` for regular waves, `Tp` for irregular.
    pub fn period(&self) -> f64 {
        match self {
            WaveMakerSpec::Regular { period, .. } => *period,
            WaveMakerSpec::Irregular { peak_period, .. } => *peak_period,
        }
    }
}

/// Piston displacement and its exact time derivative (no start-up ramp).
pub fn piston_displacement(t: f64, spec: &WaveMakerSpec) -> (f64, f64) {
    match spec {
        WaveMakerSpec::Regular { stroke, omega, phase, .. } => {
            let arg = omega * t + phase;
            (0.5 * stroke * sin(arg), 0.5 * stroke * omega * cos(arg))
        }
        WaveMakerSpec::Irregular { components, .. } => components.iter().fold((0.0, 0.0), |(x, v), c| {
            let arg = c.omega * t + c.phase;
            (x + 0.5 * c.stroke * sin(arg), v + 0.5 * c.stroke * c.omega * cos(arg))
        }),
    }
}

fn piston_acceleration(t: f64, spec: &WaveMakerSpec) -> f64 {
    match spec {
        WaveMakerSpec::Regular { stroke, omega, phase, .. } => -0.5 * stroke * omega * omega * sin(omega * t + phase),
        WaveMakerSpec::Irregular { components, .. } => components
            .iter()
            .map(|c| -0.5 * c.stroke * c.omega * c.omega * sin(c.omega * t + c.phase))
            .sum(),
    }
}

/// Piston motion with a linear start-up ramp `min(t / T_ramp, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveMaker {
    pub spec: WaveMakerSpec,
    pub ramp_time: f64,
}

impl WaveMaker {
    /// Ramp over one characteristic period.
    pub fn new(spec: WaveMakerSpec) -> Self {
        let ramp_time = spec.period();
        WaveMaker { spec, ramp_time }
    }

    /// Displacement, velocity and acceleration of the piston at time `t`.
    pub fn kinematics(&self, t: f64) -> (f64, f64, f64) {
        let (x, v) = piston_displacement(t, &self.spec);
        let a = piston_acceleration(t, &self.spec);
        if self.ramp_time <= 0.0 || t >= self.ramp_time {
            return (x, v, a);
        }
        if t <= 0.0 {
            return (0.0, 0.0, 0.0);
        }
        let r = t / self.ramp_time;
        let dr = 1.0 / self.ramp_time;
        (r * x, r * v + dr * x, r * a + 2.0 * dr * v)
    }
}

/// Unscaled JONSWAP shape `f^-5 exp(-1.25 (fp/f)^4) γ^r`.
pub fn jonswap_shape(f: f64, tp: f64, gamma: f64) -> f64 {
    let fp = 1.0 / tp;
    let sigma = if f <= fp { 0.07 } else { 0.09 };
    let r = exp(-((f - fp) * (f - fp)) / (2.0 * sigma * sigma * fp * fp));
    powi(1.0 / f, 5) * exp(-1.25 * powi(fp / f, 4)) * powf(gamma, r)
}

/// Discretised JONSWAP spectrum and the resulting piston components.
#[derive(Debug, Clone, PartialEq)]
pub struct JonswapDesign {
    pub frequencies: Vec<f64>,
    /// Spectral density `S_η(f_i)` (m²/Hz), scaled so `4 sqrt(Σ S Δf) = Hs`.
    pub densities: Vec<f64>,
    pub df: f64,
    pub components: Vec<WaveComponent>,
}

/// Splits `[f_start, f_stop]` into `n` bins (component at each bin centre),
/// assigns `H_i = 2 sqrt(2 S(f_i) Δf)`, the per-component piston stroke and a
/// uniform random phase from a ChaCha8 stream seeded by `seed`.
#[allow(clippy::too_many_arguments)]
pub fn jonswap_components(
    hs: f64,
    tp: f64,
    gamma: f64,
    n: usize,
    f_start: f64,
    f_stop: f64,
    depth: f64,
    seed: u64,
) -> Result<JonswapDesign> {
    if !(f_start > 0.0 && f_start < f_stop) || !f_stop.is_finite() {
        return Err(Error::invalid("JONSWAP band must satisfy 0 < f_start < f_stop"));
    }
    if n == 0 || !(hs > 0.0 && tp > 0.0 && gamma >= 1.0) {
        return Err(Error::invalid("JONSWAP needs N >= 1, Hs > 0, Tp > 0, gamma >= 1"));
    }
    let df = (f_stop - f_start) / n as f64;
    let frequencies: Vec<f64> = (0..n).map(|i| f_start + (i as f64 + 0.5) * df).collect();
    let raw: Vec<f64> = frequencies.iter().map(|&f| jonswap_shape(f, tp, gamma)).collect();
    let m0_raw: f64 = raw.iter().map(|s| s * df).sum();
    let scale = hs * hs / 16.0 / m0_raw;
    let densities: Vec<f64> = raw.iter().map(|s| s * scale).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut components = Vec::with_capacity(n);
    for (&f, &s) in frequencies.iter().zip(&densities) {
        let h = 2.0 * sqrt(2.0 * s * df);
        let k = solve_dispersion(1.0 / f, depth)?;
        let phase = rng.random_range(0.0..2.0 * PI);
        components.push(WaveComponent { stroke: h * stroke_factor(k, depth), omega: 2.0 * PI * f, phase });
    }
    Ok(JonswapDesign { frequencies, densities, df, components })
}
