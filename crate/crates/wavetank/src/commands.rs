//! The five subcommands. Each writes its outputs under `out` and returns
//! the numbers it wrote so callers (and tests) need not re-read files.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use wavetank_core::body::{average_power, PowerSeries};
use wavetank_core::env::{
    episode_loop, evaluate, ActionMapping, EnvStep, EpisodeLog, MultiAgentEnv, RewardSpec, WecEnv, OBS_DIM,
    OBS_SCHEMA,
};
use wavetank_core::integrate::{run_simulation, Observer, SimulationState, StepInfo};
use wavetank_core::rl::{load_checkpoint, save_checkpoint, EntropyTerm, Masac, MasacConfig, RewardScaler};
use wavetank_core::waves::{gauge_elevation, GaugeSpec};

use crate::config::{EntropyName, RunConfig};
use crate::io::{create_csv, read_bytes, read_table, write_bytes, write_resolved_config};
use crate::report::{runtime_report, EnergyReport, RuntimeReport};
use crate::setup::build_tank;
use crate::spectrum::{crest_trough, spectral_analysis, Spectrum};
use crate::{Error, Result};

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Samples gauges and bodies and keeps per-step power records.
pub struct Recorder {
    pub gauges: Vec<GaugeSpec>,
    pub gauge_rows: Vec<Vec<f64>>,
    /// `(t, body, Δz, v_z, a_z, kp, F_pto, P, E)`.
    pub body_rows: Vec<[f64; 9]>,
    pub power: Vec<PowerSeries>,
}

impl Recorder {
    pub fn new(gauges: Vec<GaugeSpec>, bodies: usize) -> Self {
        Recorder { gauges, gauge_rows: Vec::new(), body_rows: Vec::new(), power: vec![PowerSeries::default(); bodies] }
    }
}

impl Observer for Recorder {
    fn sample(&mut self, s: &SimulationState) -> wavetank_core::Result<()> {
        let level = s.params.still_level();
        let mut row = vec![s.time];
        for g in &self.gauges {
            row.push(gauge_elevation(&s.particles, s.kernel(), *g, level)?);
        }
        self.gauge_rows.push(row);
        for b in &s.bodies {
            self.body_rows.push([
                s.time,
                b.id as f64,
                b.heave(),
                b.heave_velocity(),
                b.a_z,
                b.kp,
                b.pto_force(),
                b.power,
                b.energy,
            ]);
        }
        Ok(())
    }

    fn step(&mut self, s: &SimulationState, info: &StepInfo) -> wavetank_core::Result<()> {
        for (p, b) in self.power.iter_mut().zip(&s.bodies) {
            p.push(s.time, b.kp, b.heave_velocity(), b.power, info.dt);
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SimulateSummary {
    pub recorder_gauges: Vec<Vec<f64>>,
    pub energy: Vec<f64>,
    pub steps: u64,
    pub runtime: RuntimeReport,
}

/// Runs `simulate.duration` seconds at constant damping and writes
/// `gauges.csv` and `bodies.csv`.
pub fn cmd_simulate(cfg: &RunConfig, out: &Path) -> Result<SimulateSummary> {
    let start = Instant::now();
    ensure_dir(out)?;
    let kp = cfg.simulate.kp.unwrap_or(cfg.bodies.k_base);
    let mut tank = build_tank(cfg, kp)?;
    let mut rec = Recorder::new(tank.gauges.clone(), tank.state.bodies.len());
    let t_sph = Instant::now();
    let stats = run_simulation(&mut tank.state, cfg.simulate.duration, cfg.outputs.sample_interval, None, &mut rec)?;
    let sph = t_sph.elapsed();
    let t_io = Instant::now();
    write_resolved_config(out, cfg)?;
    let mut cols = vec!["t".to_string()];
    cols.extend(tank.gauges.iter().map(|g| format!("eta_x{:.3}", g.x)));
    let colref: Vec<&str> = cols.iter().map(String::as_str).collect();
    let mut w = create_csv(&out.join("gauges.csv"), cfg, &colref)?;
    for r in &rec.gauge_rows {
        w.write_record(r.iter().map(|v| v.to_string()))?;
    }
    w.flush().map_err(|e| Error::io(out, e))?;
    let mut w = create_csv(&out.join("bodies.csv"), cfg, &["t", "body", "dz", "v_z", "a_z", "kp", "f_pto", "power", "energy"])?;
    for r in &rec.body_rows {
        w.write_record(r.iter().map(|v| v.to_string()))?;
    }
    w.flush().map_err(|e| Error::io(out, e))?;
    let io = t_io.elapsed();
    let runtime = runtime_report(sph, io, start.elapsed(), false, tank.state.particles.len());
    Ok(SimulateSummary {
        recorder_gauges: rec.gauge_rows,
        energy: tank.state.bodies.iter().map(|b| b.energy).collect(),
        steps: stats.steps,
        runtime,
    })
}

/// Averaging window `[start, start + n·T]` of the sweep.
pub fn sweep_window(cfg: &RunConfig) -> (f64, f64) {
    (cfg.sweep.window_start, cfg.sweep.window_periods as f64 * cfg.waves.design_period())
}

/// Average absorbed power of every absorber at damping `kp`.
pub fn sweep_point(cfg: &RunConfig, kp: f64) -> Result<Vec<f64>> {
    let mut tank = build_tank(cfg, kp)?;
    let (t0, win) = sweep_window(cfg);
    let t_end = cfg.sweep.duration.max(t0 + win);
    let mut rec = Recorder::new(Vec::new(), tank.state.bodies.len());
    run_simulation(&mut tank.state, t_end, cfg.outputs.sample_interval, None, &mut rec)?;
    rec.power.iter().map(|p| Ok(average_power(p, t0, win)?)).collect()
}

/// Runs [`sweep_point`] for every `sweep.kp` and writes `sweep.csv`.
pub fn cmd_sweep(cfg: &RunConfig, out: &Path) -> Result<Vec<(f64, Vec<f64>)>> {
    ensure_dir(out)?;
    write_resolved_config(out, cfg)?;
    let mut res = Vec::new();
    for &kp in &cfg.sweep.kp {
        res.push((kp, sweep_point(cfg, kp)?));
    }
    let mut w = create_csv(&out.join("sweep.csv"), cfg, &["kp", "body", "mean_power"])?;
    for (kp, p) in &res {
        for (k, v) in p.iter().enumerate() {
            w.write_record([kp.to_string(), k.to_string(), v.to_string()])?;
        }
    }
    w.flush().map_err(|e| Error::io(out, e))?;
    Ok(res)
}

pub fn masac_config(cfg: &RunConfig, n_agents: usize) -> MasacConfig {
    let r = &cfg.rl;
    let mut m = MasacConfig::new(n_agents, OBS_DIM);
    m.hidden = r.hidden.clone();
    m.gamma = r.gamma;
    m.tau = r.tau;
    m.lr_actor = r.lr_actor;
    m.lr_critic = r.lr_critic;
    m.lr_alpha = r.lr_alpha;
    m.batch_size = r.batch_size;
    m.target_entropy = r.target_entropy;
    m.init_alpha = r.init_alpha;
    m.buffer_capacity = r.buffer_capacity;
    m.n_min = r.n_min;
    m.entropy = match r.entropy {
        EntropyName::Summed => EntropyTerm::Summed,
        EntropyName::PerAgent => EntropyTerm::PerAgent,
    };
    m
}

/// Environment wrapper that accumulates the time spent in the tank.
pub struct Timed<E> {
    pub env: E,
    pub elapsed: Duration,
}

impl<E: MultiAgentEnv> MultiAgentEnv for Timed<E> {
    fn n_agents(&self) -> usize {
        self.env.n_agents()
    }
    fn obs_dim(&self) -> usize {
        self.env.obs_dim()
    }
    fn control_interval(&self) -> f64 {
        self.env.control_interval()
    }
    fn reset(&mut self) -> wavetank_core::Result<Vec<f64>> {
        let t = Instant::now();
        let r = self.env.reset();
        self.elapsed += t.elapsed();
        r
    }
    fn step(&mut self, a: &[f64]) -> wavetank_core::Result<EnvStep> {
        let t = Instant::now();
        let r = self.env.step(a);
        self.elapsed += t.elapsed();
        r
    }
}

/// Builds the tank and runs it to the reset instant.
pub fn build_env(cfg: &RunConfig) -> Result<WecEnv> {
    if cfg.bodies.count == 0 {
        return Err(Error::Config { key: "bodies.count".into(), msg: "training needs at least one absorber".into() });
    }
    let tank = build_tank(cfg, cfg.bodies.k_base)?;
    let ec = cfg.episode_config();
    Ok(WecEnv::new(
        tank.state,
        tank.body_gauges,
        ActionMapping::new(cfg.bodies.k_base)?,
        ec.control_interval,
        ec.reset_time,
    )?)
}

#[derive(Debug, Clone)]
pub struct TrainSummary {
    pub logs: Vec<EpisodeLog>,
    pub checkpoint: PathBuf,
    pub runtime: RuntimeReport,
}

/// Trains from scratch; writes `train_log.csv`, `checkpoint.bin` (and a
/// numbered copy every `outputs.checkpoint_every` episodes) and
/// `runtime.csv`.
pub fn cmd_train(cfg: &RunConfig, out: &Path) -> Result<TrainSummary> {
    let start = Instant::now();
    ensure_dir(out)?;
    let mut io = Duration::ZERO;
    let t_io = Instant::now();
    write_resolved_config(out, cfg)?;
    io += t_io.elapsed();
    let t_sph = Instant::now();
    let env = build_env(cfg)?;
    let mut env = Timed { env, elapsed: t_sph.elapsed() };
    let n = env.n_agents();
    let mut masac = Masac::new(masac_config(cfg, n), cfg.seed)?;
    let mut scaler = RewardScaler::default();
    let ec = cfg.episode_config();
    let reward = RewardSpec { gamma_p: cfg.rl.gamma_p };
    let mut log = create_csv(
        &out.join("train_log.csv"),
        cfg,
        &["episode", "agent", "return", "energy", "mean_kp", "alpha", "critic_loss", "policy_loss", "warmup", "aborted"],
    )?;
    let ckpt = out.join("checkpoint.bin");
    let every = cfg.outputs.checkpoint_every;
    let logs = {
        let log = &mut log;
        let io = &mut io;
        episode_loop(&mut env, &mut masac, &mut scaler, &ec, &reward, |l, m, sc| {
            let t = Instant::now();
            let fail = |_| wavetank_core::Error::InvalidInput("cannot write training output".into());
            for i in 0..l.returns.len() {
                let f = |v: &Vec<f64>| v.get(i).copied().unwrap_or(f64::NAN).to_string();
                log.write_record([
                    l.episode.to_string(),
                    i.to_string(),
                    l.returns[i].to_string(),
                    l.energy[i].to_string(),
                    l.mean_kp[i].to_string(),
                    f(&l.alpha),
                    f(&l.critic_loss),
                    f(&l.policy_loss),
                    (l.warmup as u8).to_string(),
                    (l.aborted as u8).to_string(),
                ])
                .map_err(|e| fail(e.to_string()))?;
            }
            if (l.episode + 1) % every == 0 {
                log.flush().map_err(|e| fail(e.to_string()))?;
                let path = out.join(format!("checkpoint_ep{:04}.bin", l.episode + 1));
                std::fs::write(path, save_checkpoint(m, sc, OBS_SCHEMA)).map_err(|e| fail(e.to_string()))?;
            }
            *io += t.elapsed();
            Ok(())
        })?
    };
    let t = Instant::now();
    log.flush().map_err(|e| Error::io(out, e))?;
    write_bytes(&ckpt, &save_checkpoint(&masac, &scaler, OBS_SCHEMA))?;
    io += t.elapsed();
    let runtime = runtime_report(env.elapsed, io, start.elapsed(), true, env.env.state.particles.len());
    write_runtime(out, cfg, &runtime)?;
    Ok(TrainSummary { logs, checkpoint: ckpt, runtime })
}

fn write_runtime(out: &Path, cfg: &RunConfig, r: &RuntimeReport) -> Result<()> {
    let (s, l, i) = r.shares();
    let mut w = create_csv(&out.join("runtime.csv"), cfg, &["sph_s", "rl_s", "io_s", "total_s", "sph_share", "rl_share", "io_share", "particles"])?;
    w.write_record([
        r.sph.as_secs_f64().to_string(),
        r.rl.as_secs_f64().to_string(),
        r.io.as_secs_f64().to_string(),
        r.total.as_secs_f64().to_string(),
        s.to_string(),
        l.to_string(),
        i.to_string(),
        r.particles.to_string(),
    ])?;
    w.flush().map_err(|e| Error::io(out, e))
}

pub fn load_trainer(path: &Path, n_agents: usize) -> Result<Masac> {
    if !path.exists() {
        return Err(Error::MissingCheckpoint(path.to_path_buf()));
    }
    let (m, _) = load_checkpoint(&read_bytes(path)?, OBS_SCHEMA, OBS_DIM)?;
    if m.cfg.n_agents != n_agents {
        return Err(wavetank_core::Error::ShapeMismatch(format!(
            "checkpoint has {} agents, the tank has {}",
            m.cfg.n_agents, n_agents
        ))
        .into());
    }
    Ok(m)
}

/// Evaluates a checkpoint against constant `k_base` on identical episodes
/// and writes `energy_report.csv` and `eval_trace.csv`.
pub fn cmd_eval(cfg: &RunConfig, checkpoint: &Path, out: &Path) -> Result<EnergyReport> {
    let mut env = build_env(cfg)?;
    let mut masac = load_trainer(checkpoint, env.n_agents())?;
    ensure_dir(out)?;
    write_resolved_config(out, cfg)?;
    let ec = cfg.episode_config();
    let steps = ec.transitions_per_episode();
    let episodes = ec.eval_episodes.max(1);

    env.trace = Some(Vec::new());
    let drl = evaluate(&mut env, Some(&mut masac), 1, steps)?;
    let drl_trace = env.trace.take().unwrap_or_default();
    let drl_rest = evaluate(&mut env, Some(&mut masac), episodes - 1, steps)?;
    env.trace = Some(Vec::new());
    let base = evaluate(&mut env, None, 1, steps)?;
    let base_trace = env.trace.take().unwrap_or_default();
    let base_rest = evaluate(&mut env, None, episodes - 1, steps)?;

    let mean = |a: &[wavetank_core::env::EvalEpisode], b: &[wavetank_core::env::EvalEpisode]| {
        let n = env.n_agents();
        let mut e = vec![0.0; n];
        for ep in a.iter().chain(b) {
            for i in 0..n {
                e[i] += ep.energy[i] / episodes as f64;
            }
        }
        e
    };
    let report = EnergyReport::new(&mean(&drl, &drl_rest), &mean(&base, &base_rest));
    write_energy_report(out, cfg, &report)?;
    let mut w = create_csv(
        &out.join("eval_trace.csv"),
        cfg,
        &["mode", "t", "agent", "eta_up", "eta_down", "dz", "v_z", "f_pto", "kp", "power"],
    )?;
    for (mode, rows) in [("drl", &drl_trace), ("baseline", &base_trace)] {
        for r in rows.iter() {
            w.write_record([
                mode.to_string(),
                r.t.to_string(),
                r.agent.to_string(),
                r.eta_up.to_string(),
                r.eta_down.to_string(),
                r.heave.to_string(),
                r.v_z.to_string(),
                r.f_pto.to_string(),
                r.kp.to_string(),
                r.power.to_string(),
            ])?;
        }
    }
    w.flush().map_err(|e| Error::io(out, e))?;
    Ok(report)
}

pub fn write_energy_report(out: &Path, cfg: &RunConfig, r: &EnergyReport) -> Result<()> {
    let mut w = create_csv(&out.join("energy_report.csv"), cfg, &["agent", "e_drl", "e_base", "delta", "improvement_pct"])?;
    for row in r.agents.iter().chain(std::iter::once(&r.total)) {
        w.write_record([
            row.label.clone(),
            row.e_drl.to_string(),
            row.e_base.to_string(),
            row.delta.to_string(),
            row.improvement_pct.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(out, e))
}

/// Spectrum and wave statistics of one column.
#[derive(Debug, Clone)]
pub struct SeriesStats {
    pub name: String,
    pub spectrum: Spectrum,
    pub mean_crest: f64,
    pub mean_trough: f64,
}

/// Reads a CSV with a `t` column and analyses every other column; writes
/// `spectrum.csv` and `stats.csv`.
pub fn cmd_analyze(cfg: &RunConfig, series: &Path, out: &Path) -> Result<Vec<SeriesStats>> {
    let table = read_table(series)?;
    let t = table.column("t").ok_or_else(|| Error::MalformedSeries("missing `t` column".into()))?;
    if t.len() < 2 {
        return Err(Error::TooShort { have: t.len(), need: 2 });
    }
    let dt = (t[t.len() - 1] - t[0]) / (t.len() - 1) as f64;
    if t.windows(2).any(|w| ((w[1] - w[0]) - dt).abs() > 1e-6 * dt.abs().max(1e-12)) {
        return Err(Error::MalformedSeries("samples are not uniformly spaced".into()));
    }
    let mut res = Vec::new();
    for name in table.columns.iter().filter(|c| c.as_str() != "t") {
        let eta = table.column(name).expect("column listed in header");
        let spectrum = spectral_analysis(&eta, dt)?;
        let mean = eta.iter().sum::<f64>() / eta.len() as f64;
        let centred: Vec<f64> = eta.iter().map(|v| v - mean).collect();
        let (c, tr) = crest_trough(&centred).unwrap_or((0.0, 0.0));
        res.push(SeriesStats { name: name.clone(), spectrum, mean_crest: c, mean_trough: tr });
    }
    ensure_dir(out)?;
    let mut cols = vec!["f".to_string()];
    cols.extend(res.iter().map(|s| format!("S_{}", s.name)));
    let colref: Vec<&str> = cols.iter().map(String::as_str).collect();
    let mut w = create_csv(&out.join("spectrum.csv"), cfg, &colref)?;
    if let Some(first) = res.first() {
        for k in 0..first.spectrum.frequencies.len() {
            let mut row = vec![first.spectrum.frequencies[k].to_string()];
            row.extend(res.iter().map(|s| s.spectrum.density[k].to_string()));
            w.write_record(row)?;
        }
    }
    w.flush().map_err(|e| Error::io(out, e))?;
    let mut w = create_csv(&out.join("stats.csv"), cfg, &["series", "hs", "tp", "m0", "mean_crest", "mean_trough"])?;
    for s in &res {
        w.write_record([
            s.name.clone(),
            s.spectrum.hs.to_string(),
            s.spectrum.tp.to_string(),
            s.spectrum.m0.to_string(),
            s.mean_crest.to_string(),
            s.mean_trough.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(out, e))?;
    Ok(res)
}
