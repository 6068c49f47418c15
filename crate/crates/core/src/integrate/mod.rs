//! Two-stage symplectic time stepping, CFL control, run orchestration and
//! snapshots.

mod snapshot;
mod tank;

use alloc::vec::Vec;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::body::{accumulate_body_forces, RigidBody};
use crate::math::{sqrt, Vec3};
use crate::sph::{EosSpec, FluidModel, KernelSpec, NeighborList, ParticleKind, ParticleSystem, RateBuffers};
use crate::waves::{apply_damping_zone, boundary_pressure_update, DampingZoneSpec, WaveMaker};
use crate::{Error, Result};

pub use snapshot::{Snapshot, SNAPSHOT_VERSION};
pub use tank::{default_sound_speed, BodyShape, BodySpec, TankSpec};

/// Numerical parameters of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimParams {
    pub model: FluidModel,
    /// Courant number of the time-step bound.
    pub cfl: f64,
    /// Fixed time step for regression runs; checked against the CFL bound at
    /// every step.
    pub fixed_dt: Option<f64>,
    pub damping: Option<DampingZoneSpec>,
}

impl SimParams {
    pub fn new(model: FluidModel) -> Self {
        SimParams { model, cfl: 0.2, fixed_dt: None, damping: None }
    }

    pub fn still_level(&self) -> f64 {
        self.model.reference_level
    }
}

/// Piston particles and their rest abscissae.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Piston {
    pub particles: Vec<u32>,
    pub rest_x: Vec<f64>,
}

impl Piston {
    pub fn from_system(sys: &ParticleSystem) -> Self {
        let particles: Vec<u32> =
            (0..sys.len()).filter(|&i| sys.kinds[i] == ParticleKind::Piston).map(|i| i as u32).collect();
        let rest_x = particles.iter().map(|&i| sys.positions[i as usize].x).collect();
        Piston { particles, rest_x }
    }

    fn place(&self, sys: &mut ParticleSystem, x: f64, v: f64) {
        for (&i, &x0) in self.particles.iter().zip(&self.rest_x) {
            sys.positions[i as usize].x = x0 + x;
            sys.velocities[i as usize] = Vec3::new(v, 0.0, 0.0);
        }
    }
}

#[derive(Debug, Clone, Default)]
struct Scratch {
    nl: NeighborList,
    rates: RateBuffers,
    r0: Vec<Vec3>,
    u0: Vec<Vec3>,
    rho0: Vec<f64>,
}

/// Complete state of a tank run at a single time `t`.
#[derive(Debug, Clone)]
pub struct SimulationState {
    pub particles: ParticleSystem,
    pub bodies: Vec<RigidBody>,
    pub wavemaker: Option<WaveMaker>,
    pub piston: Piston,
    pub params: SimParams,
    pub time: f64,
    pub step: u64,
    pub rng: ChaCha8Rng,
    scratch: Scratch,
}

/// What a single step did.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInfo {
    pub dt: f64,
    /// CFL bound at the start of the step.
    pub dt_bound: f64,
}

/// `dt = C · min_i(√(h/|a_i|), h/cf)` over fluid particles.
pub fn cfl_timestep(sys: &ParticleSystem, acc: &[Vec3], kernel: &KernelSpec, eos: &EosSpec, c_cfl: f64) -> Result<f64> {
    let h = kernel.h;
    let mut amax: f64 = 0.0;
    for (i, a) in acc.iter().enumerate() {
        if sys.kinds[i].is_fluid() {
            let n = a.norm();
            if !n.is_finite() {
                return Err(Error::NonFinite { what: "acceleration", index: i });
            }
            amax = amax.max(n);
        }
    }
    let mut bound = h / eos.cf;
    if amax > 0.0 {
        bound = bound.min(sqrt(h / amax));
    }
    let dt = c_cfl * bound;
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::BadTimeStep(dt));
    }
    Ok(dt)
}

impl SimulationState {
    /// Wraps an assembled particle system. Fluid pressures are set from the
    /// EOS and piston/body particles are placed at `t = 0`.
    pub fn new(
        particles: ParticleSystem,
        bodies: Vec<RigidBody>,
        wavemaker: Option<WaveMaker>,
        params: SimParams,
        seed: u64,
    ) -> Result<Self> {
        for (k, b) in bodies.iter().enumerate() {
            if b.id as usize != k {
                return Err(Error::invalid("body ids must be 0..n in order"));
            }
        }
        if let Some(w) = &wavemaker {
            w.spec.validate()?;
        }
        if let Some(z) = &params.damping {
            z.validate()?;
        }
        let piston = Piston::from_system(&particles);
        let mut s = SimulationState {
            particles,
            bodies,
            wavemaker,
            piston,
            params,
            time: 0.0,
            step: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
            scratch: Scratch::default(),
        };
        s.update_fluid_pressure()?;
        s.place_piston(0.0);
        for b in &s.bodies {
            b.place_particles(&mut s.particles);
        }
        Ok(s)
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.params.model.kernel
    }

    fn place_piston(&mut self, t: f64) {
        let (x, v) = match &self.wavemaker {
            Some(w) => {
                let (x, v, _) = w.kinematics(t);
                (x, v)
            }
            None => (0.0, 0.0),
        };
        self.piston.place(&mut self.particles, x, v);
    }

    fn piston_accel(&self, t: f64) -> f64 {
        self.wavemaker.as_ref().map_or(0.0, |w| w.kinematics(t).2)
    }

    fn update_fluid_pressure(&mut self) -> Result<()> {
        let eos = self.params.model.eos;
        let sys = &mut self.particles;
        for i in 0..sys.len() {
            if sys.kinds[i].is_fluid() {
                let rho = sys.densities[i];
                if !(rho > 0.0) {
                    return Err(Error::DensityViolation { index: i, rho, time: self.time });
                }
                sys.pressures[i] = eos.pressure_unchecked(rho);
            }
        }
        Ok(())
    }

    /// Neighbour rebuild, boundary pressure and fluid rates at the current
    /// particle configuration. `t` is the time of that configuration.
    fn interact(&mut self, t: f64) -> Result<()> {
        let model = self.params.model;
        self.scratch.nl.rebuild(&self.particles.positions, &model.kernel)?;
        let a_piston = Vec3::new(self.piston_accel(t), 0.0, 0.0);
        let a_body: Vec<Vec3> = self.bodies.iter().map(|b| b.acceleration()).collect();
        let kinds = self.particles.kinds.clone();
        boundary_pressure_update(
            &mut self.particles,
            &self.scratch.nl,
            &model.kernel,
            &model.eos,
            model.gravity,
            |i| match kinds[i] {
                ParticleKind::Piston => a_piston,
                ParticleKind::Body(id) => a_body[id as usize],
                _ => Vec3::ZERO,
            },
        );
        self.scratch.rates.compute(&model, &self.particles, &self.scratch.nl)
    }

    fn body_loads(&self) -> Result<Vec<(Vec3, Vec3)>> {
        (0..self.bodies.len())
            .map(|k| accumulate_body_forces(&self.particles, &self.scratch.rates.acc, &self.bodies, k))
            .collect()
    }

    /// Fluid accelerations and density rates from the most recent
    /// interaction (for diagnostics).
    pub fn last_rates(&self) -> (&[Vec3], &[f64]) {
        (&self.scratch.rates.acc, &self.scratch.rates.drho)
    }

    /// Advances by one step. `max_dt` caps the step (used to land exactly on
    /// sampling and control instants).
    pub fn step(&mut self, max_dt: Option<f64>) -> Result<StepInfo> {
        let t = self.time;
        let g = self.params.model.gravity;
        self.interact(t)?;
        let bound = cfl_timestep(
            &self.particles,
            &self.scratch.rates.acc,
            &self.params.model.kernel,
            &self.params.model.eos,
            self.params.cfl,
        )?;
        let mut dt = match self.params.fixed_dt {
            Some(f) => {
                if f > bound {
                    return Err(Error::FixedStepTooLarge { fixed: f, bound });
                }
                f
            }
            None => bound,
        };
        if let Some(m) = max_dt {
            if m < dt {
                dt = m;
            }
        }
        if !(dt > 0.0) {
            return Err(Error::BadTimeStep(dt));
        }
        let half = 0.5 * dt;

        // predictor
        let loads = self.body_loads()?;
        {
            let s = &mut self.scratch;
            let p = &mut self.particles;
            s.r0.clone_from(&p.positions);
            s.u0.clone_from(&p.velocities);
            s.rho0.clone_from(&p.densities);
            for i in 0..p.len() {
                if !p.kinds[i].is_fluid() {
                    continue;
                }
                p.positions[i] = s.r0[i] + s.u0[i] * half;
                p.velocities[i] = s.u0[i] + s.rates.acc[i] * half;
                let rho = s.rho0[i] + s.rates.drho[i] * half;
                if !(rho > 0.0) {
                    return Err(Error::DensityViolation { index: i, rho, time: t + half });
                }
                p.densities[i] = rho;
            }
        }
        for (b, &(f, tq)) in self.bodies.iter_mut().zip(&loads) {
            b.predictor(f, tq, g, dt);
            b.place_particles(&mut self.particles);
        }
        self.place_piston(t + half);
        self.update_fluid_pressure()?;

        // corrector
        self.interact(t + half)?;
        let loads = self.body_loads()?;
        {
            let s = &mut self.scratch;
            let p = &mut self.particles;
            for i in 0..p.len() {
                if !p.kinds[i].is_fluid() {
                    continue;
                }
                let u = s.u0[i] + s.rates.acc[i] * dt;
                p.positions[i] = s.r0[i] + (u + s.u0[i]) * half;
                p.velocities[i] = u;
                let eps = -s.rates.drho[i] / p.densities[i] * dt;
                let rho = s.rho0[i] * (2.0 - eps) / (2.0 + eps);
                if !(rho > 0.0) || !rho.is_finite() {
                    return Err(Error::DensityViolation { index: i, rho, time: t + dt });
                }
                p.densities[i] = rho;
            }
        }
        for (b, &(f, tq)) in self.bodies.iter_mut().zip(&loads) {
            b.corrector(f, tq, g, dt);
            b.place_particles(&mut self.particles);
        }
        self.place_piston(t + dt);
        self.time = t + dt;
        self.step += 1;
        self.update_fluid_pressure()?;
        if let Some(zone) = &self.params.damping {
            apply_damping_zone(&mut self.particles, zone, dt);
        }
        Ok(StepInfo { dt, dt_bound: bound })
    }

    /// Steps until `time == t_target` exactly (the last step is shortened),
    /// calling `on_step` after every step.
    pub fn advance_to<F>(&mut self, t_target: f64, mut on_step: F) -> Result<()>
    where
        F: FnMut(&SimulationState, &StepInfo) -> Result<()>,
    {
        while self.time < t_target {
            let remaining = t_target - self.time;
            if remaining <= 1e-12 * t_target.abs().max(1.0) {
                self.time = t_target;
                break;
            }
            let info = self.step(Some(remaining))?;
            if (t_target - self.time).abs() <= 1e-12 * t_target.abs().max(1.0) {
                self.time = t_target;
            }
            on_step(self, &info)?;
        }
        Ok(())
    }

    /// Total kinetic energy of the fluid plus its potential energy relative
    /// to `z = 0`.
    pub fn fluid_energy(&self) -> f64 {
        let g = self.params.model.gravity;
        let p = &self.particles;
        let m = p.masses();
        (0..p.len())
            .filter(|&i| p.kinds[i].is_fluid())
            .map(|i| m[i] * (0.5 * p.velocities[i].norm2() - g.dot(p.positions[i])))
            .sum()
    }
}

/// Something notified while a run advances.
pub trait Observer {
    /// Called at `t = 0` and then at every multiple of the sampling interval.
    fn sample(&mut self, state: &SimulationState) -> Result<()>;

    /// Called after every step.
    fn step(&mut self, _state: &SimulationState, _info: &StepInfo) -> Result<()> {
        Ok(())
    }

    /// Called at every multiple of the control interval before the run
    /// continues; may change body damping.
    fn control(&mut self, _state: &mut SimulationState) -> Result<()> {
        Ok(())
    }
}

/// Summary of a finished run.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunStats {
    pub steps: u64,
    pub min_dt: f64,
    pub max_dt: f64,
}

/// Advances from the current time to `t_end`, sampling every
/// `sample_interval` and invoking the control hook every `control_interval`
/// (if given). Steps are shortened to land exactly on those instants.
pub fn run_simulation<O: Observer>(
    state: &mut SimulationState,
    t_end: f64,
    sample_interval: f64,
    control_interval: Option<f64>,
    observer: &mut O,
) -> Result<RunStats> {
    if !(sample_interval > 0.0) {
        return Err(Error::invalid("sample interval must be positive"));
    }
    let mut stats = RunStats { steps: 0, min_dt: f64::INFINITY, max_dt: 0.0 };
    let t0 = state.time;
    let tol = 1e-9 * sample_interval;
    let first = |iv: f64| libm::floor((t0 + tol) / iv) as u64 + 1;
    observer.sample(state)?;
    if control_interval.is_some() {
        observer.control(state)?;
    }
    let mut ks = first(sample_interval);
    let mut kc = control_interval.map_or(0, first);
    while state.time < t_end - tol {
        let next_sample = ks as f64 * sample_interval;
        let next_control = control_interval.map(|iv| kc as f64 * iv);
        let mut target = next_sample.min(t_end);
        if let Some(c) = next_control {
            target = target.min(c);
        }
        state.advance_to(target, |s, info| {
            stats.steps += 1;
            stats.min_dt = stats.min_dt.min(info.dt);
            stats.max_dt = stats.max_dt.max(info.dt);
            observer.step(s, info)
        })?;
        if (state.time - next_sample).abs() <= tol {
            observer.sample(state)?;
            ks += 1;
        }
        if let Some(c) = next_control {
            if (state.time - c).abs() <= tol {
                if state.time < t_end - tol {
                    observer.control(state)?;
                }
                kc += 1;
            }
        }
    }
    if stats.steps == 0 {
        stats.min_dt = 0.0;
    }
    Ok(stats)
}
