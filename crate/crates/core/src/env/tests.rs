use alloc::vec;
use alloc::vec::Vec;

use proptest::prelude::*;

use super::*;
use crate::body::Dof;
use crate::integrate::{default_sound_speed, BodyShape, BodySpec, SimParams, SimulationState, TankSpec};
use crate::math::Vec3;
use crate::rl::MasacConfig;
use crate::sph::{Dim, EosSpec, FluidModel, KernelSpec};
use crate::waves::GaugeSpec;
use crate::GRAVITY;

#[test]
fn action_mapping_endpoints() {
    let m = ActionMapping::new(700.0).unwrap();
    assert_eq!(map_action(0.0, &m), (700.0, false));
    assert!((map_action(1.0, &m).0 - 1330.0).abs() < 1e-9);
    assert!((map_action(-1.0, &m).0 - 70.0).abs() < 1e-9);
    let (kp, clamped) = map_action(1.7, &m);
    assert!(clamped);
    assert!((kp - 1330.0).abs() < 1e-9);
    assert!(ActionMapping::new(0.0).is_err());
}

#[test]
fn interpolation_examples() {
    assert_eq!(interpolate_kp(2.0, 100.0, 300.0, 2.0, 2.1), 100.0);
    assert!((interpolate_kp(2.05, 100.0, 300.0, 2.0, 2.1) - 200.0).abs() < 1e-9);
    assert_eq!(interpolate_kp(2.1, 100.0, 300.0, 2.0, 2.1), 300.0);
    assert_eq!(interpolate_kp(2.07, 150.0, 150.0, 2.0, 2.1), 150.0);
}

#[test]
fn reward_examples() {
    let r = compute_rewards(&[10.0, 0.0], &RewardSpec::default());
    assert!((r[0] - 6.5).abs() < 1e-12 && (r[1] - 3.5).abs() < 1e-12);
    for g in [0.0, 0.3, 1.0] {
        assert_eq!(compute_rewards(&[4.2], &RewardSpec { gamma_p: g }), vec![4.2]);
    }
    assert!(RewardSpec { gamma_p: 1.2 }.validate().is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn rewards_conserve_total_power(
        p in proptest::collection::vec(0.0f64..1e4, 1..=5),
        g in 0.0f64..=1.0,
    ) {
        let r = compute_rewards(&p, &RewardSpec { gamma_p: g });
        let sr: f64 = r.iter().sum();
        let sp: f64 = p.iter().sum();
        prop_assert!((sr - sp).abs() <= 1e-12 * sp.abs().max(1e-300));
    }

    #[test]
    fn damping_schedule_is_continuous_and_bounded(
        acts in proptest::collection::vec(-1.5f64..1.5, 2..20),
        k_base in 1.0f64..2000.0,
    ) {
        let m = ActionMapping::new(k_base).unwrap();
        let dt = 0.1;
        let mut prev = k_base;
        let (lo, hi) = m.kp_range();
        for (k, &o) in acts.iter().enumerate() {
            let next = map_action(o, &m).0;
            let t0 = k as f64 * dt;
            let t1 = t0 + dt;
            // end of the previous interval meets the start of this one
            prop_assert_eq!(interpolate_kp(t0, prev, next, t0, t1), prev);
            for s in 0..=10 {
                let kp = interpolate_kp(t0 + s as f64 * dt / 10.0, prev, next, t0, t1);
                prop_assert!(kp >= lo * (1.0 - 1e-12) && kp <= hi * (1.0 + 1e-12));
            }
            prop_assert_eq!(interpolate_kp(t1, prev, next, t0, t1), next);
            prev = next;
        }
    }
}

#[test]
fn episode_defaults() {
    let c = EpisodeConfig::two_d();
    assert_eq!((c.duration, c.reset_time, c.episodes), (10.0, 10.0, 100));
    assert_eq!(c.transitions_per_episode(), 100);
    let c = EpisodeConfig::three_d();
    assert_eq!((c.duration, c.reset_time, c.episodes), (20.0, 10.0, 50));
    let bad = EpisodeConfig { duration: 1.05, control_interval: 0.1, ..EpisodeConfig::two_d() };
    assert!(bad.validate().is_err());
}

#[test]
fn backward_difference_tracks_a_sinusoid() {
    let period = 1.5;
    let w = 2.0 * core::f64::consts::PI / period;
    let amp = 0.08;
    let dt = 0.1;
    let mut peak: f64 = 0.0;
    let mut t = 0.0;
    while t < 3.0 * period {
        let e = amp * libm::sin(w * (t + dt));
        let e0 = amp * libm::sin(w * t);
        peak = peak.max(elevation_rate(e, e0, dt).abs());
        t += 1e-3;
    }
    let exact = w * amp;
    assert!((peak - exact).abs() / exact < 0.05, "{peak} vs {exact}");
}

#[test]
fn toy_optimum_formula() {
    assert!((toy_optimal_damping(2.0, 8.0, 0.7, 2.0) - 0.7).abs() < 1e-15);
    let k = toy_optimal_damping(1.0, 4.0, 0.5, 1.0);
    assert!((k - libm::sqrt(9.25)).abs() < 1e-12);
    assert!((k - 3.041).abs() < 1e-3);
}

fn simulated_power(osc: &ToyOscillator, kp: f64) -> f64 {
    let dt = 1e-3;
    let mut s = ToyState::default();
    let mut e = 0.0;
    let period = 2.0 * core::f64::consts::PI / osc.omega;
    let settle = libm::round(20.0 * period / dt) as usize;
    let measure = libm::round(10.0 * period / dt) as usize;
    for _ in 0..settle {
        s = toy_env_step(osc, s, kp, dt).0;
    }
    for _ in 0..measure {
        let (n, p) = toy_env_step(osc, s, kp, dt);
        s = n;
        e += p * dt;
    }
    e / (measure as f64 * dt)
}

fn reference_toy() -> ToyOscillator {
    ToyOscillator { m: 1.0, k_s: 4.0, c_r: 0.5, f0: 1.0, omega: 1.0 }
}

#[test]
fn toy_sweep_brackets_the_optimum() {
    let osc = reference_toy();
    let kstar = toy_optimal_damping(osc.m, osc.k_s, osc.c_r, osc.omega);
    let grid: Vec<f64> = (0..50).map(|k| 0.2 + k as f64 * 0.15).collect();
    let p: Vec<f64> = grid.iter().map(|&k| simulated_power(&osc, k)).collect();
    let best = (0..50).max_by(|&a, &b| p[a].total_cmp(&p[b])).unwrap();
    assert!(best > 0 && best < 49);
    assert!(grid[best - 1] <= kstar && kstar <= grid[best + 1], "argmax {} vs {kstar}", grid[best]);
    let ps = simulated_power(&osc, kstar);
    assert!(ps > simulated_power(&osc, 0.5 * kstar));
    assert!(ps > simulated_power(&osc, 2.0 * kstar));
    // the integrator agrees with the steady-state formula
    assert!((ps - toy_average_power(&osc, kstar)).abs() / ps < 0.01);
}

fn toy_env() -> ToyEnv {
    let mut e = ToyEnv::new(reference_toy(), 2.0, 1, 0.1, 10).unwrap();
    e.settle_time = 0.0;
    e
}

fn toy_trainer(seed: u64) -> Masac {
    let mut c = MasacConfig::new(1, 4);
    c.hidden = vec![8, 8];
    c.batch_size = 16;
    c.n_min = 32;
    Masac::new(c, seed).unwrap()
}

#[test]
fn no_episodes_no_training() {
    let mut env = toy_env();
    let mut m = toy_trainer(1);
    let before = m.agents.clone();
    let cfg = EpisodeConfig { episodes: 0, ..EpisodeConfig::two_d() };
    let logs = episode_loop(&mut env, &mut m, &mut RewardScaler::default(), &cfg, &RewardSpec::default(), |_, _, _| Ok(())).unwrap();
    assert!(logs.is_empty());
    assert_eq!(m.agents, before);
    assert_eq!(m.buffer.len(), 0);
}

#[test]
fn episode_loop_counts_and_repeats() {
    let cfg = EpisodeConfig { episodes: 3, warmup_episodes: 1, duration: 10.0, ..EpisodeConfig::two_d() };
    let run = || {
        let mut env = toy_env();
        let mut m = toy_trainer(5);
        let mut seen = 0;
        let logs = episode_loop(&mut env, &mut m, &mut RewardScaler::default(), &cfg, &RewardSpec::default(), |_, _, _| {
            seen += 1;
            Ok(())
        })
        .unwrap();
        assert_eq!(seen, 3);
        (logs, m)
    };
    let (a, ma) = run();
    let (b, mb) = run();
    assert_eq!(a, b);
    assert_eq!(ma.agents, mb.agents);
    for l in &a {
        assert_eq!(l.transitions, 100);
        assert!(!l.aborted);
    }
    assert!(a[0].warmup && !a[1].warmup);
    assert_eq!(ma.buffer.len(), 300);
    assert!(ma.buffer.get(99).unwrap().done && !ma.buffer.get(98).unwrap().done);
}

struct Exploding {
    k: usize,
}

impl MultiAgentEnv for Exploding {
    fn n_agents(&self) -> usize {
        1
    }
    fn obs_dim(&self) -> usize {
        4
    }
    fn control_interval(&self) -> f64 {
        0.1
    }
    fn reset(&mut self) -> Result<Vec<f64>> {
        self.k = 0;
        Ok(vec![0.0; 4])
    }
    fn step(&mut self, _a: &[f64]) -> Result<EnvStep> {
        self.k += 1;
        let v = if self.k == 5 { f64::NAN } else { 0.1 };
        Ok(EnvStep { obs: vec![v; 4], power: vec![1.0], kp: vec![1.0] })
    }
}

#[test]
fn non_finite_observation_aborts_episode() {
    let mut env = Exploding { k: 0 };
    let mut m = toy_trainer(1);
    let cfg = EpisodeConfig { episodes: 2, ..EpisodeConfig::two_d() };
    let logs = episode_loop(&mut env, &mut m, &mut RewardScaler::default(), &cfg, &RewardSpec::default(), |_, _, _| Ok(())).unwrap();
    assert_eq!(logs.len(), 2);
    assert!(logs.iter().all(|l| l.aborted && l.transitions == 4));
}

#[test]
fn baseline_evaluation_holds_k_base() {
    let mut env = toy_env();
    let e = evaluate(&mut env, None, 2, 50).unwrap();
    assert_eq!(e[0], e[1]);
    assert!((e[0].mean_kp[0] - 2.0).abs() < 1e-12);
    assert!(e[0].energy[0] > 0.0);
}

fn wec_state(dp: f64) -> (SimulationState, Vec<[GaugeSpec; 4]>) {
    let depth = 0.5;
    let mut m = FluidModel::new(
        KernelSpec::new(dp, Dim::Two).unwrap(),
        EosSpec::water(default_sound_speed(depth)),
        Vec3::new(0.0, 0.0, -GRAVITY),
    );
    m.reference_level = depth;
    let mut t = TankSpec::new(Dim::Two, dp, 2.0, depth);
    t.piston = false;
    let mut b = BodySpec {
        shape: BodyShape::Cylinder,
        x: 1.0,
        y: 0.0,
        diameter: 0.5,
        height: 0.2,
        draft: 0.1,
        mass: 0.0,
        dof: Dof::HeaveOnly,
        initial_offset: 0.0,
    };
    b.mass = b.neutral_mass(Dim::Two, 1000.0);
    t.bodies.push(b);
    let (sys, bodies) = t.build(&m).unwrap();
    let (xl, xr) = t.body_extent(0).unwrap();
    let s = SimulationState::new(sys, bodies, None, SimParams::new(m), 3).unwrap();
    (s, vec![GaugeSpec::around_body(xl, xr, 0.0, 0.1)])
}

#[test]
fn still_tank_observation_is_zero() {
    let dp = 0.05;
    let (s, g) = wec_state(dp);
    let (o, eta) = extract_observation(&s, 0, &g[0], &[0.0; 4], 0.1).unwrap();
    for k in 0..4 {
        assert!(eta[k].abs() < 0.5 * dp, "gauge {k}: {}", eta[k]);
    }
    let (o2, _) = extract_observation(&s, 0, &g[0], &eta, 0.1).unwrap();
    assert_eq!(&o2[4..], &[0.0; 7]);
    assert_eq!(&o[..4], &o2[..4]);
    assert!(extract_observation(&s, 1, &g[0], &eta, 0.1).is_err());
}

#[test]
fn raised_column_reads_its_offset() {
    let dp = 0.05;
    let delta = 0.13;
    let (mut s, g) = wec_state(dp);
    for i in 0..s.particles.len() {
        if s.particles.kinds[i].is_fluid() {
            s.particles.positions[i].z += delta;
        }
    }
    s.bodies[0].centre.z += delta;
    let (o, _) = extract_observation(&s, 0, &g[0], &[0.0; 4], 0.1).unwrap();
    for k in 0..4 {
        assert!((o[k] - delta).abs() <= 0.5 * dp, "gauge {k}: {}", o[k]);
    }
    assert!((o[9] - delta).abs() < 1e-12);
}

#[test]
fn wec_episodes_restart_bitwise() {
    let (s, g) = wec_state(0.05);
    let mut env = WecEnv::new(s, g, ActionMapping::new(50.0).unwrap(), 0.05, 0.1).unwrap();
    assert!((env.state.time - 0.1).abs() < 1e-12);
    let o1 = env.reset().unwrap();
    assert_eq!(env.state.snapshot(), *env.snapshot());
    let a = env.step(&[0.8]).unwrap();
    let b = env.step(&[-3.0]).unwrap();
    assert_eq!(env.clamped_actions, 1);
    assert!((env.state.time - 0.2).abs() < 1e-12);
    assert_eq!(b.kp, vec![5.0]);
    assert!((env.state.bodies[0].kp - 5.0).abs() < 1e-12);
    let o2 = env.reset().unwrap();
    assert_eq!(env.state.snapshot(), *env.snapshot());
    assert_eq!(o1, o2);
    assert_eq!(env.step(&[0.8]).unwrap(), a);
    assert!(a.power[0] >= 0.0);
    assert_eq!(a.obs.len(), OBS_DIM);
}
