use alloc::vec;
use alloc::vec::Vec;

use super::{interpolate_kp, map_action, ActionMapping, EnvStep, MultiAgentEnv, OBS_DIM};
use crate::integrate::{SimulationState, Snapshot};
use crate::waves::{gauge_elevation, GaugeSpec};
use crate::{Error, Result};

/// Backward difference of a gauge signal.
pub fn elevation_rate(eta: f64, eta_prev: f64, dt: f64) -> f64 {
    (eta - eta_prev) / dt
}

/// Builds one agent's observation. Also returns the four elevations so the
/// caller can keep them for the next difference.
pub fn extract_observation(
    state: &SimulationState,
    body: usize,
    gauges: &[GaugeSpec; 4],
    eta_prev: &[f64; 4],
    dt_ctrl: f64,
) -> Result<([f64; OBS_DIM], [f64; 4])> {
    let b = state.bodies.get(body).ok_or(Error::UnknownBody(body))?;
    let level = state.params.still_level();
    let mut eta = [0.0; 4];
    for (e, g) in eta.iter_mut().zip(gauges) {
        *e = gauge_elevation(&state.particles, state.kernel(), *g, level)?;
    }
    let mut o = [0.0; OBS_DIM];
    for k in 0..4 {
        o[k] = eta[k];
        o[4 + k] = elevation_rate(eta[k], eta_prev[k], dt_ctrl);
    }
    o[8] = b.v_prev;
    o[9] = b.heave();
    o[10] = b.a_z;
    Ok((o, eta))
}

/// State recorded at each decision instant for evaluation output.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub t: f64,
    pub agent: usize,
    /// Mean of the two upstream gauges.
    pub eta_up: f64,
    /// Mean of the two downstream gauges.
    pub eta_down: f64,
    pub heave: f64,
    pub v_z: f64,
    pub f_pto: f64,
    pub kp: f64,
    /// Power averaged over the interval that just ended.
    pub power: f64,
}

/// The SPH tank as a multi-agent environment, one agent per body.
///
/// Every episode starts from a snapshot taken at the reset instant of a run
/// that used `k_base` throughout.
#[derive(Debug, Clone)]
pub struct WecEnv {
    pub state: SimulationState,
    snapshot: Snapshot,
    gauges: Vec<[GaugeSpec; 4]>,
    reset_eta: Vec<[f64; 4]>,
    eta: Vec<[f64; 4]>,
    pub mapping: ActionMapping,
    control_interval: f64,
    kp_now: Vec<f64>,
    /// Actions that had to be clamped into `[-1, 1]`.
    pub clamped_actions: u64,
    /// Filled while `Some`.
    pub trace: Option<Vec<TraceRow>>,
}

impl WecEnv {
    /// Runs `state` to `reset_time` with constant `k_base` and keeps the
    /// snapshot. Gauge readings one control interval earlier seed the first
    /// elevation rates.
    pub fn new(
        mut state: SimulationState,
        gauges: Vec<[GaugeSpec; 4]>,
        mapping: ActionMapping,
        control_interval: f64,
        reset_time: f64,
    ) -> Result<Self> {
        if gauges.len() != state.bodies.len() || gauges.is_empty() {
            return Err(Error::invalid("need one gauge set per body"));
        }
        if !(control_interval > 0.0) {
            return Err(Error::invalid("control interval must be positive"));
        }
        for b in &mut state.bodies {
            b.kp = mapping.k_base;
        }
        let level = state.params.still_level();
        let read = |s: &SimulationState| -> Result<Vec<[f64; 4]>> {
            gauges
                .iter()
                .map(|gs| {
                    let mut e = [0.0; 4];
                    for (v, g) in e.iter_mut().zip(gs) {
                        *v = gauge_elevation(&s.particles, s.kernel(), *g, level)?;
                    }
                    Ok(e)
                })
                .collect()
        };
        let t_prev = reset_time - control_interval;
        if t_prev > state.time {
            state.advance_to(t_prev, |_, _| Ok(()))?;
        }
        let reset_eta = read(&state)?;
        state.advance_to(reset_time, |_, _| Ok(()))?;
        let snapshot = state.snapshot();
        let n = state.bodies.len();
        Ok(WecEnv {
            state,
            snapshot,
            eta: reset_eta.clone(),
            reset_eta,
            gauges,
            mapping,
            control_interval,
            kp_now: vec![mapping.k_base; n],
            clamped_actions: 0,
            trace: None,
        })
    }

    pub fn snapshot(&self) -> &Snapshot {
        &self.snapshot
    }

    pub fn gauges(&self) -> &[[GaugeSpec; 4]] {
        &self.gauges
    }

    fn observe(&mut self) -> Result<Vec<f64>> {
        let mut joint = Vec::with_capacity(OBS_DIM * self.gauges.len());
        for k in 0..self.gauges.len() {
            let (o, eta) = extract_observation(&self.state, k, &self.gauges[k], &self.eta[k], self.control_interval)?;
            joint.extend_from_slice(&o);
            self.eta[k] = eta;
        }
        Ok(joint)
    }
}

impl MultiAgentEnv for WecEnv {
    fn n_agents(&self) -> usize {
        self.gauges.len()
    }

    fn obs_dim(&self) -> usize {
        OBS_DIM
    }

    fn control_interval(&self) -> f64 {
        self.control_interval
    }

    fn reset(&mut self) -> Result<Vec<f64>> {
        self.state.restore_from(&self.snapshot)?;
        self.eta = self.reset_eta.clone();
        self.kp_now = vec![self.mapping.k_base; self.gauges.len()];
        self.observe()
    }

    fn step(&mut self, actions: &[f64]) -> Result<EnvStep> {
        let n = self.gauges.len();
        if actions.len() != n {
            return Err(Error::ShapeMismatch(alloc::format!("{} actions for {} agents", actions.len(), n)));
        }
        let kp_next: Vec<f64> = actions
            .iter()
            .map(|&o| {
                let (kp, clamped) = map_action(o, &self.mapping);
                self.clamped_actions += clamped as u64;
                kp
            })
            .collect();
        let t0 = self.state.time;
        let t1 = t0 + self.control_interval;
        let tol = 1e-12 * t1.abs().max(1.0);
        let mut energy = vec![0.0; n];
        while t1 - self.state.time > tol {
            let t = self.state.time;
            for (k, b) in self.state.bodies.iter_mut().enumerate() {
                b.kp = interpolate_kp(t, self.kp_now[k], kp_next[k], t0, t1);
            }
            let info = self.state.step(Some(t1 - t))?;
            for (e, b) in energy.iter_mut().zip(&self.state.bodies) {
                *e += b.power * info.dt;
            }
        }
        self.state.time = t1;
        for b in &mut self.state.bodies {
            b.kp = kp_next[b.id as usize];
        }
        self.kp_now = kp_next.clone();
        let power: Vec<f64> = energy.iter().map(|e| e / self.control_interval).collect();
        let obs = self.observe()?;
        if let Some(trace) = &mut self.trace {
            for (k, b) in self.state.bodies.iter().enumerate() {
                let e = &self.eta[k];
                trace.push(TraceRow {
                    t: t1,
                    agent: k,
                    eta_up: 0.5 * (e[0] + e[1]),
                    eta_down: 0.5 * (e[2] + e[3]),
                    heave: b.heave(),
                    v_z: b.heave_velocity(),
                    f_pto: b.pto_force(),
                    kp: b.kp,
                    power: power[k],
                });
            }
        }
        Ok(EnvStep { obs, power, kp: kp_next })
    }
}
