//! Coupling between the tank and the trainer: observations, the
//! action-to-damping map, rewards, the episode loop and an analytic
//! oscillator used to check the learner in isolation.

mod toy;
mod wec;

use alloc::vec;
use alloc::vec::Vec;

use crate::rl::{Masac, RewardScaler, Transition};
use crate::{Error, Result};

pub use toy::{toy_average_power, toy_env_step, toy_optimal_damping, ToyEnv, ToyOscillator, ToyState};
pub use wec::{elevation_rate, extract_observation, TraceRow, WecEnv};

/// Values per agent observation: four gauge elevations, their rates, the
/// previous heave velocity, heave displacement and heave acceleration.
pub const OBS_DIM: usize = 11;

/// Version of the observation layout, stored in checkpoints.
pub const OBS_SCHEMA: u32 = 1;

/// Linear map from a normalised action in `[-1, 1]` to a PTO damping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActionMapping {
    pub k_base: f64,
    pub dk_max: f64,
}

impl ActionMapping {
    pub fn new(k_base: f64) -> Result<Self> {
        if !(k_base > 0.0) || !k_base.is_finite() {
            return Err(Error::invalid("k_base must be positive"));
        }
        Ok(ActionMapping { k_base, dk_max: 0.9 * k_base })
    }

    pub fn kp_range(&self) -> (f64, f64) {
        (self.k_base - self.dk_max, self.k_base + self.dk_max)
    }
}

/// `kp = k_base + o·Δk_max` with `o` clamped to `[-1, 1]`. The second value
/// reports whether clamping happened.
pub fn map_action(o: f64, mapping: &ActionMapping) -> (f64, bool) {
    let c = if o.is_nan() { 0.0 } else { o.clamp(-1.0, 1.0) };
    (mapping.k_base + c * mapping.dk_max, c != o)
}

/// Linear ramp from `kp0` at `t0` to `kp1` at `t1`.
pub fn interpolate_kp(t: f64, kp0: f64, kp1: f64, t0: f64, t1: f64) -> f64 {
    if kp0 == kp1 || t1 <= t0 {
        return kp1;
    }
    let s = ((t - t0) / (t1 - t0)).clamp(0.0, 1.0);
    (1.0 - s) * kp0 + s * kp1
}

/// Weight given to the fleet-average power in each agent's reward.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RewardSpec {
    pub gamma_p: f64,
}

impl Default for RewardSpec {
    fn default() -> Self {
        RewardSpec { gamma_p: 0.7 }
    }
}

impl RewardSpec {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.gamma_p) {
            return Err(Error::invalid("gamma_p must lie in [0, 1]"));
        }
        Ok(())
    }
}

/// `r_i = (1 - γp)·P_i + γp·mean(P)`.
pub fn compute_rewards(power: &[f64], spec: &RewardSpec) -> Vec<f64> {
    if power.is_empty() {
        return Vec::new();
    }
    let mean = power.iter().sum::<f64>() / power.len() as f64;
    power.iter().map(|p| (1.0 - spec.gamma_p) * p + spec.gamma_p * mean).collect()
}

/// Episode timing and counts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpisodeConfig {
    /// Episode duration (s).
    pub duration: f64,
    /// Instant at which every episode starts (s).
    pub reset_time: f64,
    pub episodes: usize,
    /// Leading episodes that act uniformly at random.
    pub warmup_episodes: usize,
    pub eval_episodes: usize,
    /// Time between decisions (s).
    pub control_interval: f64,
}

impl EpisodeConfig {
    pub fn two_d() -> Self {
        EpisodeConfig {
            duration: 10.0,
            reset_time: 10.0,
            episodes: 100,
            warmup_episodes: 10,
            eval_episodes: 10,
            control_interval: 0.1,
        }
    }

    pub fn three_d() -> Self {
        EpisodeConfig { duration: 20.0, episodes: 50, ..Self::two_d() }
    }

    pub fn transitions_per_episode(&self) -> usize {
        libm::round(self.duration / self.control_interval) as usize
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.control_interval > 0.0) {
            return Err(Error::invalid("episodes.control_interval must be positive"));
        }
        if !(self.duration > 0.0) {
            return Err(Error::invalid("episodes.duration must be positive"));
        }
        if !(self.reset_time >= 0.0) {
            return Err(Error::invalid("episodes.reset_time must not be negative"));
        }
        let n = self.duration / self.control_interval;
        if (n - libm::round(n)).abs() > 1e-9 * n {
            return Err(Error::invalid("episodes.duration must be a multiple of the control interval"));
        }
        Ok(())
    }
}

/// Outcome of one control interval.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EnvStep {
    /// Joint observation at the end of the interval.
    pub obs: Vec<f64>,
    /// Interval-averaged absorbed power per agent (W).
    pub power: Vec<f64>,
    /// Damping each agent reached at the end of the interval.
    pub kp: Vec<f64>,
}

/// An environment stepped once per control interval.
pub trait MultiAgentEnv {
    fn n_agents(&self) -> usize;
    fn obs_dim(&self) -> usize;
    fn control_interval(&self) -> f64;
    /// Returns to the episode start and gives the joint observation.
    fn reset(&mut self) -> Result<Vec<f64>>;
    /// Applies one normalised action per agent for one interval.
    fn step(&mut self, actions: &[f64]) -> Result<EnvStep>;
}

/// Per-episode training record.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EpisodeLog {
    pub episode: usize,
    pub warmup: bool,
    /// Sum of unscaled rewards per agent.
    pub returns: Vec<f64>,
    /// Absorbed energy per agent (J).
    pub energy: Vec<f64>,
    pub mean_kp: Vec<f64>,
    pub alpha: Vec<f64>,
    pub critic_loss: Vec<f64>,
    pub policy_loss: Vec<f64>,
    pub transitions: usize,
    pub updates: u64,
    /// Set when a non-finite observation cut the episode short.
    pub aborted: bool,
}

fn all_finite(x: &[f64]) -> bool {
    x.iter().all(|v| v.is_finite())
}

/// Trains `masac` on `env` for `cfg.episodes` episodes. Rewards are scaled
/// by the running standard deviation in `scaler` before entering the replay
/// buffer; the logged returns are unscaled. `on_episode` sees every log as it
/// is produced, together with the trainer and scaler (for checkpoints).
pub fn episode_loop<E, F>(
    env: &mut E,
    masac: &mut Masac,
    scaler: &mut RewardScaler,
    cfg: &EpisodeConfig,
    reward: &RewardSpec,
    mut on_episode: F,
) -> Result<Vec<EpisodeLog>>
where
    E: MultiAgentEnv + ?Sized,
    F: FnMut(&EpisodeLog, &Masac, &RewardScaler) -> Result<()>,
{
    cfg.validate()?;
    reward.validate()?;
    let n = env.n_agents();
    if masac.cfg.n_agents != n || masac.cfg.obs_dim != env.obs_dim() {
        return Err(Error::ShapeMismatch(alloc::format!(
            "trainer expects {} agents × {} observations, environment has {} × {}",
            masac.cfg.n_agents,
            masac.cfg.obs_dim,
            n,
            env.obs_dim()
        )));
    }
    let steps = cfg.transitions_per_episode();
    let mut logs = Vec::with_capacity(cfg.episodes);
    for ep in 0..cfg.episodes {
        let warmup = ep < cfg.warmup_episodes;
        let mut log = EpisodeLog {
            episode: ep,
            warmup,
            returns: vec![0.0; n],
            energy: vec![0.0; n],
            mean_kp: vec![0.0; n],
            ..EpisodeLog::default()
        };
        let mut closs = vec![0.0; n];
        let mut ploss = vec![0.0; n];
        let mut nupd = 0usize;
        let mut obs = env.reset()?;
        for k in 0..steps {
            if !all_finite(&obs) {
                log.aborted = true;
                break;
            }
            let actions = if warmup { masac.random_joint_action() } else { masac.act_joint(&obs, false)? };
            let out = env.step(&actions)?;
            let r = compute_rewards(&out.power, reward);
            let done = k + 1 == steps;
            if !all_finite(&out.obs) || !all_finite(&r) {
                log.aborted = true;
                break;
            }
            for i in 0..n {
                scaler.update(r[i]);
                log.returns[i] += r[i];
                log.energy[i] += out.power[i] * env.control_interval();
                log.mean_kp[i] += out.kp[i];
            }
            let t = Transition {
                obs: core::mem::take(&mut obs),
                actions,
                rewards: r.iter().map(|&x| scaler.scale(x)).collect(),
                next_obs: out.obs.clone(),
                done,
            };
            let d = masac.train_step(&t)?;
            if d.updated {
                nupd += 1;
                for i in 0..n {
                    closs[i] += d.critic_loss[i];
                    ploss[i] += d.policy_loss[i];
                }
            }
            log.transitions += 1;
            obs = out.obs;
        }
        if log.transitions > 0 {
            for v in &mut log.mean_kp {
                *v /= log.transitions as f64;
            }
        }
        if nupd > 0 {
            log.critic_loss = closs.iter().map(|c| c / nupd as f64).collect();
            log.policy_loss = ploss.iter().map(|c| c / nupd as f64).collect();
        }
        log.updates = nupd as u64;
        log.alpha = masac.agents.iter().map(|a| a.alpha()).collect();
        on_episode(&log, masac, scaler)?;
        logs.push(log);
    }
    Ok(logs)
}

/// Energy absorbed in one evaluation episode.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EvalEpisode {
    pub energy: Vec<f64>,
    pub mean_kp: Vec<f64>,
}

/// Runs `episodes` episodes with deterministic actions `tanh(μ)`; without a
/// trainer every agent holds `o = 0`, i.e. the constant `k_base` baseline.
pub fn evaluate<E: MultiAgentEnv + ?Sized>(
    env: &mut E,
    mut masac: Option<&mut Masac>,
    episodes: usize,
    steps: usize,
) -> Result<Vec<EvalEpisode>> {
    let n = env.n_agents();
    let mut out = Vec::with_capacity(episodes);
    for _ in 0..episodes {
        let mut obs = env.reset()?;
        let mut ep = EvalEpisode { energy: vec![0.0; n], mean_kp: vec![0.0; n] };
        for _ in 0..steps {
            let a = match masac.as_deref_mut() {
                Some(m) => m.act_joint(&obs, true)?,
                None => vec![0.0; n],
            };
            let s = env.step(&a)?;
            for i in 0..n {
                ep.energy[i] += s.power[i] * env.control_interval();
                ep.mean_kp[i] += s.kp[i] / steps as f64;
            }
            obs = s.obs;
        }
        out.push(ep);
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
