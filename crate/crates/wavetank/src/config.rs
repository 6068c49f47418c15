//! Run configuration. Every key has a default; an empty file describes the
//! two-dimensional single-absorber case (12 m tank, 1.1 m depth, 0.5 m
//! cylinder, H = 0.16 m, T = 1.5 s regular waves).

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    pub tank: TankConfig,
    pub waves: WaveConfig,
    pub bodies: BodiesConfig,
    pub rl: RlConfig,
    pub episodes: EpisodesConfig,
    pub simulate: SimulateConfig,
    pub sweep: SweepConfig,
    pub outputs: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 1,
            tank: TankConfig::default(),
            waves: WaveConfig::default(),
            bodies: BodiesConfig::default(),
            rl: RlConfig::default(),
            episodes: EpisodesConfig::default(),
            simulate: SimulateConfig::default(),
            sweep: SweepConfig::default(),
            outputs: OutputConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TankConfig {
    /// 2 or 3.
    pub dim: u32,
    pub dp: f64,
    pub length: f64,
    /// Across-tank width, used in 3-D.
    pub width: f64,
    pub depth: f64,
    /// Defaults to 1.5 × depth.
    pub wall_height: Option<f64>,
    pub layers: usize,
    pub cfl: f64,
    /// Regression mode: constant step, rejected when above the CFL bound.
    pub fixed_dt: Option<f64>,
    /// Defaults to 10·√(g·depth).
    pub sound_speed: Option<f64>,
    pub density_diffusion: f64,
    /// Absorbing zone at the far end.
    pub damping: bool,
    /// Length of the absorbing zone; one wavelength when unset.
    pub damping_length: Option<f64>,
}

impl Default for TankConfig {
    fn default() -> Self {
        TankConfig {
            dim: 2,
            dp: 0.02,
            length: 12.0,
            width: 1.0,
            depth: 1.1,
            wall_height: None,
            layers: 4,
            cfl: 0.2,
            fixed_dt: None,
            sound_speed: None,
            density_diffusion: 0.1,
            damping: true,
            damping_length: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WaveKind {
    None,
    Regular,
    Irregular,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WaveConfig {
    pub kind: WaveKind,
    pub height: f64,
    pub period: f64,
    pub phase: f64,
    pub hs: f64,
    pub tp: f64,
    pub gamma: f64,
    pub components: usize,
    /// Band edges as multiples of the peak frequency.
    pub f_min_ratio: f64,
    pub f_max_ratio: f64,
    /// Phase seed of the irregular sea.
    pub seed: u64,
}

impl Default for WaveConfig {
    fn default() -> Self {
        WaveConfig {
            kind: WaveKind::Regular,
            height: 0.16,
            period: 1.5,
            phase: 0.0,
            hs: 0.16,
            tp: 1.5,
            gamma: 3.3,
            components: 50,
            f_min_ratio: 0.5,
            f_max_ratio: 3.0,
            seed: 1,
        }
    }
}

impl WaveConfig {
    /// Period that sets the wavelength of the absorbing zone.
    pub fn design_period(&self) -> f64 {
        match self.kind {
            WaveKind::Irregular => self.tp,
            _ => self.period,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeName {
    Cylinder,
    Box,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DofName {
    Heave,
    Free,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BodiesConfig {
    pub count: usize,
    pub shape: ShapeName,
    pub diameter: f64,
    pub height: f64,
    pub draft: f64,
    /// Neutrally buoyant at `draft` when unset.
    pub mass: Option<f64>,
    /// Centre of the first absorber, measured from the piston.
    pub first_x: f64,
    /// Centre-to-centre distance between neighbouring absorbers.
    pub spacing: f64,
    pub k_base: f64,
    /// Gap between neighbouring gauges; the nearest gauge sits half a gap
    /// off the hull.
    pub gauge_spacing: f64,
    pub dof: DofName,
    pub initial_offset: f64,
}

impl Default for BodiesConfig {
    fn default() -> Self {
        BodiesConfig {
            count: 1,
            shape: ShapeName::Cylinder,
            diameter: 0.5,
            height: 0.22,
            draft: 0.11,
            mass: None,
            first_x: 3.5,
            spacing: 1.0,
            k_base: 700.0,
            gauge_spacing: 0.1,
            dof: DofName::Heave,
            initial_offset: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntropyName {
    Summed,
    PerAgent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RlConfig {
    pub hidden: Vec<usize>,
    pub gamma: f64,
    pub tau: f64,
    pub lr_actor: f64,
    pub lr_critic: f64,
    pub lr_alpha: f64,
    pub batch_size: usize,
    pub target_entropy: f64,
    pub init_alpha: f64,
    pub buffer_capacity: usize,
    /// Transitions stored before the first update.
    pub n_min: usize,
    pub entropy: EntropyName,
    pub control_interval: f64,
    pub gamma_p: f64,
    pub warmup_episodes: usize,
}

impl Default for RlConfig {
    fn default() -> Self {
        RlConfig {
            hidden: vec![128, 128, 64],
            gamma: 0.99,
            tau: 0.005,
            lr_actor: 3e-3,
            lr_critic: 3e-3,
            lr_alpha: 3e-3,
            batch_size: 128,
            target_entropy: -1.0,
            init_alpha: 0.1,
            buffer_capacity: 100_000,
            n_min: 1000,
            entropy: EntropyName::Summed,
            control_interval: 0.1,
            gamma_p: 0.7,
            warmup_episodes: 10,
        }
    }
}

/// Unset fields take the per-dimension defaults (2-D: 10 s episodes from
/// t = 10 s, 100 of them; 3-D: 20 s, 50).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EpisodesConfig {
    pub duration: Option<f64>,
    pub reset_time: Option<f64>,
    pub count: Option<usize>,
    pub eval_count: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateConfig {
    pub duration: f64,
    /// Constant damping; `k_base` when unset.
    pub kp: Option<f64>,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        SimulateConfig { duration: 20.0, kp: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub kp: Vec<f64>,
    pub duration: f64,
    /// Start of the averaging window (s).
    pub window_start: f64,
    /// Averaging window in wave periods.
    pub window_periods: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            kp: vec![200.0, 450.0, 700.0, 950.0, 1200.0, 1500.0, 1800.0],
            duration: 20.0,
            window_start: 10.0,
            window_periods: 6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: String,
    /// Sampling interval of gauge and body series (s).
    pub sample_interval: f64,
    /// Extra free-surface gauges (x, m).
    pub gauges: Vec<f64>,
    /// Write a checkpoint every this many episodes.
    pub checkpoint_every: usize,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: "out".into(), sample_interval: 0.01, gauges: vec![6.0], checkpoint_every: 10 }
    }
}

fn positive(key: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Config { key: key.into(), msg: format!("must be positive, got {v}") })
    }
}

fn non_negative(key: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Config { key: key.into(), msg: format!("must not be negative, got {v}") })
    }
}

fn check(key: &str, ok: bool, msg: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Config { key: key.into(), msg: msg.into() })
    }
}

impl RunConfig {
    /// Parses TOML text, fills per-dimension defaults and validates.
    pub fn from_toml(text: &str) -> Result<Self> {
        Self::parse_raw(text)?.finish()
    }

    /// Parses without resolving defaults, so command-line overrides can be
    /// applied before [`RunConfig::finish`].
    pub fn parse_raw(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.message().to_string()))
    }

    pub fn finish(mut self) -> Result<Self> {
        self.resolve();
        self.validate()?;
        Ok(self)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration always serialises")
    }

    /// Fills every optional field that has a computable default.
    pub fn resolve(&mut self) {
        let (d, r, n) = if self.tank.dim == 3 { (20.0, 10.0, 50) } else { (10.0, 10.0, 100) };
        let e = &mut self.episodes;
        e.duration.get_or_insert(d);
        e.reset_time.get_or_insert(r);
        e.count.get_or_insert(n);
        e.eval_count.get_or_insert(10);
        let t = &mut self.tank;
        t.wall_height.get_or_insert(1.5 * t.depth);
        t.sound_speed.get_or_insert(wavetank_core::integrate::default_sound_speed(t.depth.max(0.0)));
        self.simulate.kp.get_or_insert(self.bodies.k_base);
    }

    pub fn validate(&self) -> Result<()> {
        let t = &self.tank;
        check("tank.dim", t.dim == 2 || t.dim == 3, "must be 2 or 3")?;
        positive("tank.dp", t.dp)?;
        positive("tank.length", t.length)?;
        positive("tank.width", t.width)?;
        positive("tank.depth", t.depth)?;
        let layers = t.depth / t.dp;
        check("tank.depth", (layers - layers.round()).abs() <= 1e-6 * layers.max(1.0), "must be a whole number of particle spacings")?;
        if let Some(h) = t.wall_height {
            positive("tank.wall_height", h)?;
            check("tank.wall_height", h > t.depth, "must exceed the depth")?;
        }
        check("tank.layers", t.layers >= 1, "must be at least 1")?;
        positive("tank.cfl", t.cfl)?;
        if let Some(v) = t.fixed_dt {
            positive("tank.fixed_dt", v)?;
        }
        if let Some(v) = t.sound_speed {
            positive("tank.sound_speed", v)?;
        }
        non_negative("tank.density_diffusion", t.density_diffusion)?;
        if let Some(v) = t.damping_length {
            positive("tank.damping_length", v)?;
            check("tank.damping_length", v < t.length, "must be shorter than the tank")?;
        }

        let w = &self.waves;
        match w.kind {
            WaveKind::None => {}
            WaveKind::Regular => {
                positive("waves.height", w.height)?;
                positive("waves.period", w.period)?;
            }
            WaveKind::Irregular => {
                positive("waves.hs", w.hs)?;
                positive("waves.tp", w.tp)?;
                check("waves.gamma", w.gamma >= 1.0, "must be at least 1")?;
                check("waves.components", w.components >= 1, "must be at least 1")?;
                positive("waves.f_min_ratio", w.f_min_ratio)?;
                check("waves.f_max_ratio", w.f_max_ratio > w.f_min_ratio, "must exceed waves.f_min_ratio")?;
            }
        }

        let b = &self.bodies;
        if b.count > 0 {
            positive("bodies.diameter", b.diameter)?;
            positive("bodies.height", b.height)?;
            positive("bodies.draft", b.draft)?;
            check("bodies.draft", b.draft < b.height, "must be less than bodies.height")?;
            if let Some(m) = b.mass {
                positive("bodies.mass", m)?;
            }
            positive("bodies.first_x", b.first_x)?;
            positive("bodies.k_base", b.k_base)?;
            positive("bodies.gauge_spacing", b.gauge_spacing)?;
            if b.count > 1 {
                check("bodies.spacing", b.spacing > b.diameter, "must exceed bodies.diameter")?;
            }
            let last = b.first_x + (b.count - 1) as f64 * b.spacing + 0.5 * b.diameter;
            check("bodies.first_x", last < t.length, "absorbers must fit inside the tank")?;
        }

        let r = &self.rl;
        check("rl.hidden", r.hidden.iter().all(|&h| h > 0), "widths must be positive")?;
        check("rl.gamma", (0.0..=1.0).contains(&r.gamma), "must lie in [0, 1]")?;
        check("rl.tau", (0.0..=1.0).contains(&r.tau), "must lie in [0, 1]")?;
        positive("rl.lr_actor", r.lr_actor)?;
        positive("rl.lr_critic", r.lr_critic)?;
        positive("rl.lr_alpha", r.lr_alpha)?;
        check("rl.batch_size", r.batch_size >= 1, "must be at least 1")?;
        positive("rl.init_alpha", r.init_alpha)?;
        check("rl.buffer_capacity", r.buffer_capacity >= r.batch_size, "must hold at least one batch")?;
        positive("rl.control_interval", r.control_interval)?;
        check("rl.gamma_p", (0.0..=1.0).contains(&r.gamma_p), "must lie in [0, 1]")?;

        let e = &self.episodes;
        if let Some(d) = e.duration {
            positive("episodes.duration", d)?;
            let n = d / r.control_interval;
            check("episodes.duration", (n - n.round()).abs() < 1e-9 * n, "must be a multiple of rl.control_interval")?;
        }
        if let Some(v) = e.reset_time {
            non_negative("episodes.reset_time", v)?;
        }

        positive("simulate.duration", self.simulate.duration)?;
        if let Some(k) = self.simulate.kp {
            non_negative("simulate.kp", k)?;
        }
        let s = &self.sweep;
        check("sweep.kp", s.kp.iter().all(|k| *k >= 0.0 && k.is_finite()), "values must not be negative")?;
        positive("sweep.duration", s.duration)?;
        non_negative("sweep.window_start", s.window_start)?;
        check("sweep.window_periods", s.window_periods >= 1, "must be at least 1")?;

        let o = &self.outputs;
        positive("outputs.sample_interval", o.sample_interval)?;
        check("outputs.gauges", o.gauges.iter().all(|&x| x > 0.0 && x < t.length), "must lie inside the tank")?;
        check("outputs.checkpoint_every", o.checkpoint_every >= 1, "must be at least 1")?;
        Ok(())
    }

    /// SHA-256 of the resolved configuration text, hex encoded.
    pub fn hash(&self) -> String {
        let d = Sha256::digest(self.to_toml().as_bytes());
        d.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn episode_config(&self) -> wavetank_core::env::EpisodeConfig {
        let e = &self.episodes;
        wavetank_core::env::EpisodeConfig {
            duration: e.duration.unwrap_or(10.0),
            reset_time: e.reset_time.unwrap_or(10.0),
            episodes: e.count.unwrap_or(100),
            warmup_episodes: self.rl.warmup_episodes,
            eval_episodes: e.eval_count.unwrap_or(10),
            control_interval: self.rl.control_interval,
        }
    }
}

/// Reads and validates a configuration file.
pub fn parse_config(path: &Path) -> Result<RunConfig> {
    RunConfig::from_toml(&read_config_text(path)?)
}

pub fn read_config_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}
