use alloc::vec;
use alloc::vec::Vec;

use super::{interpolate_kp, map_action, ActionMapping, EnvStep, MultiAgentEnv};
use crate::math::sqrt;
use crate::{Error, Result};

/// Forced mass-spring-damper `m·z'' = F0·sin(ωt) - c_r·z' - k_s·z - kp·z'`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToyOscillator {
    pub m: f64,
    pub k_s: f64,
    pub c_r: f64,
    pub f0: f64,
    pub omega: f64,
}

impl ToyOscillator {
    pub fn validate(&self) -> Result<()> {
        if !(self.m > 0.0 && self.k_s > 0.0 && self.c_r > 0.0 && self.omega > 0.0) {
            return Err(Error::invalid("oscillator m, k_s, c_r and omega must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ToyState {
    pub t: f64,
    pub z: f64,
    pub v: f64,
}

/// One semi-implicit Euler step; returns the new state and `kp·z'²` at the
/// end of the step.
pub fn toy_env_step(p: &ToyOscillator, s: ToyState, kp: f64, dt: f64) -> (ToyState, f64) {
    let f = p.f0 * libm::sin(p.omega * s.t);
    let v = s.v + dt * (f - (p.c_r + kp) * s.v - p.k_s * s.z) / p.m;
    let z = s.z + dt * v;
    (ToyState { t: s.t + dt, z, v }, kp * v * v)
}

/// Damping that maximises absorbed power: the magnitude of the remaining
/// mechanical impedance.
pub fn toy_optimal_damping(m: f64, k_s: f64, c_r: f64, omega: f64) -> f64 {
    let x = (k_s - m * omega * omega) / omega;
    sqrt(c_r * c_r + x * x)
}

/// Steady-state mean absorbed power at constant damping.
pub fn toy_average_power(p: &ToyOscillator, kp: f64) -> f64 {
    let x = (p.k_s - p.m * p.omega * p.omega) / p.omega;
    let r = p.c_r + kp;
    0.5 * kp * p.f0 * p.f0 / (r * r + x * x)
}

/// `n` uncoupled oscillators, each driven by its own agent. Observations are
/// `[z, z', sin ωt, cos ωt]`.
#[derive(Debug, Clone)]
pub struct ToyEnv {
    pub osc: ToyOscillator,
    pub mapping: ActionMapping,
    pub control_interval: f64,
    pub substeps: usize,
    /// Simulated time before the first decision of each episode.
    pub settle_time: f64,
    pub states: Vec<ToyState>,
    kp_now: Vec<f64>,
}

impl ToyEnv {
    pub fn new(osc: ToyOscillator, k_base: f64, n: usize, control_interval: f64, substeps: usize) -> Result<Self> {
        osc.validate()?;
        if n == 0 || substeps == 0 || !(control_interval > 0.0) {
            return Err(Error::invalid("toy environment needs agents, substeps and a positive interval"));
        }
        let mapping = ActionMapping::new(k_base)?;
        Ok(ToyEnv {
            osc,
            mapping,
            control_interval,
            substeps,
            settle_time: 0.0,
            states: vec![ToyState::default(); n],
            kp_now: vec![k_base; n],
        })
    }

    fn obs(&self) -> Vec<f64> {
        let mut o = Vec::with_capacity(4 * self.states.len());
        for s in &self.states {
            let ph = self.osc.omega * s.t;
            o.extend_from_slice(&[s.z, s.v, libm::sin(ph), libm::cos(ph)]);
        }
        o
    }
}

impl MultiAgentEnv for ToyEnv {
    fn n_agents(&self) -> usize {
        self.states.len()
    }

    fn obs_dim(&self) -> usize {
        4
    }

    fn control_interval(&self) -> f64 {
        self.control_interval
    }

    fn reset(&mut self) -> Result<Vec<f64>> {
        let n = self.states.len();
        self.kp_now = vec![self.mapping.k_base; n];
        self.states = vec![ToyState::default(); n];
        let dt = self.control_interval / self.substeps as f64;
        let steps = libm::round(self.settle_time / dt) as usize;
        for s in &mut self.states {
            for _ in 0..steps {
                *s = toy_env_step(&self.osc, *s, self.mapping.k_base, dt).0;
            }
        }
        Ok(self.obs())
    }

    fn step(&mut self, actions: &[f64]) -> Result<EnvStep> {
        if actions.len() != self.states.len() {
            return Err(Error::ShapeMismatch(alloc::format!("{} actions for {} agents", actions.len(), self.states.len())));
        }
        let dt = self.control_interval / self.substeps as f64;
        let mut power = vec![0.0; self.states.len()];
        let mut kp = Vec::with_capacity(self.states.len());
        for (i, s) in self.states.iter_mut().enumerate() {
            let k1 = map_action(actions[i], &self.mapping).0;
            let t0 = s.t;
            let t1 = t0 + self.control_interval;
            for _ in 0..self.substeps {
                let k = interpolate_kp(s.t, self.kp_now[i], k1, t0, t1);
                let (next, p) = toy_env_step(&self.osc, *s, k, dt);
                *s = next;
                power[i] += p / self.substeps as f64;
            }
            self.kp_now[i] = k1;
            kp.push(k1);
        }
        Ok(EnvStep { obs: self.obs(), power, kp })
    }
}
