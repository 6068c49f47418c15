use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::masac::{critic_loss_grad, policy_loss_grad};
use super::*;

fn tiny_cfg(n: usize, obs: usize) -> MasacConfig {
    let mut c = MasacConfig::new(n, obs);
    c.hidden = vec![2];
    c.batch_size = 4;
    c.n_min = 4;
    c.buffer_capacity = 64;
    c
}

fn random_batch(m: &Masac, rows: usize, seed: u64) -> Batch {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let n = m.cfg.n_agents;
    let wo = n * m.cfg.obs_dim;
    let mut b = Batch { rows, ..Batch::default() };
    for k in 0..rows {
        b.obs.extend((0..wo).map(|_| r.random_range(-1.0..1.0)));
        b.actions.extend((0..n).map(|_| r.random_range(-1.0..1.0)));
        b.rewards.extend((0..n).map(|_| r.random_range(0.0..2.0)));
        b.next_obs.extend((0..wo).map(|_| r.random_range(-1.0..1.0)));
        b.done.push(if k % 3 == 2 { 1.0 } else { 0.0 });
    }
    b
}

/// Hand evaluation of a one-hidden-layer ReLU network with transposed
/// weight storage.
fn hand_forward(net: &Mlp, x: &[f64]) -> f64 {
    let s = net.sizes();
    let (ni, nh) = (s[0], s[1]);
    let p = net.params();
    let mut out = p[ni * nh + nh + nh];
    for h in 0..nh {
        let mut z = p[ni * nh + h];
        for i in 0..ni {
            z += p[i * nh + h] * x[i];
        }
        out += p[ni * nh + nh + h] * z.max(0.0);
    }
    out
}

fn hand_policy(net: &Mlp, x: &[f64]) -> (f64, f64) {
    let s = net.sizes();
    let (ni, nh) = (s[0], s[1]);
    let p = net.params();
    let base = ni * nh + nh;
    let mut mu = p[base + 2 * nh];
    let mut ls = p[base + 2 * nh + 1];
    for h in 0..nh {
        let mut z = p[ni * nh + h];
        for i in 0..ni {
            z += p[i * nh + h] * x[i];
        }
        let z = z.max(0.0);
        mu += p[base + h * 2] * z;
        ls += p[base + h * 2 + 1] * z;
    }
    (mu, ls.clamp(-20.0, 2.0))
}

#[test]
fn two_agent_critic_target_matches_hand_computation() {
    let mut m = Masac::new(tiny_cfg(2, 2), 11).unwrap();
    m.agents[0].log_alpha = libm::log(0.2);
    m.agents[1].log_alpha = libm::log(0.05);
    let b = random_batch(&m, 1, 4);
    let b = Batch { done: vec![0.0], ..b };
    let mut replay = m.rng.clone();
    let y = m.critic_targets(&b).unwrap();

    let s1 = &b.next_obs;
    let mut a = [0.0; 2];
    let mut logp = [0.0; 2];
    for k in 0..2 {
        let xi: f64 = replay.sample(StandardNormal);
        let (mu, ls) = hand_policy(&m.agents[k].policy.net, &s1[2 * k..2 * k + 2]);
        let act = libm::tanh(mu + libm::exp(ls) * xi);
        a[k] = act;
        logp[k] = -0.5 * xi * xi - ls - 0.5 * libm::log(2.0 * core::f64::consts::PI) - libm::log(1.0 - act * act + 1e-6);
    }
    let x = [s1[0], s1[1], s1[2], s1[3], a[0], a[1]];
    let ent = 0.2 * logp[0] + 0.05 * logp[1];
    for i in 0..2 {
        let q1 = hand_forward(&m.agents[i].q_target[0], &x);
        let q2 = hand_forward(&m.agents[i].q_target[1], &x);
        let expect = b.rewards[i] + 0.99 * (q1.min(q2) - ent);
        assert!((y[i] - expect).abs() < 1e-10, "agent {i}: {} vs {expect}", y[i]);
    }
}

#[test]
fn per_agent_entropy_switch() {
    let mut cfg = tiny_cfg(2, 2);
    cfg.entropy = EntropyTerm::PerAgent;
    let mut m = Masac::new(cfg, 11).unwrap();
    let mut s = m.clone();
    s.cfg.entropy = EntropyTerm::Summed;
    let b = random_batch(&m, 3, 2);
    let yp = m.critic_targets(&b).unwrap();
    let ys = s.critic_targets(&b).unwrap();
    assert_ne!(yp, ys);
}

#[test]
fn terminal_and_undiscounted_targets_equal_rewards() {
    let mut m = Masac::new(tiny_cfg(2, 3), 1).unwrap();
    let mut b = random_batch(&m, 5, 1);
    b.done = vec![1.0; 5];
    assert_eq!(m.critic_targets(&b).unwrap(), b.rewards);
    b.done = vec![0.0; 5];
    m.cfg.gamma = 0.0;
    assert_eq!(m.critic_targets(&b).unwrap(), b.rewards);
}

fn constant_critic(net: &mut Mlp, c: f64) {
    for p in net.params_mut() {
        *p = 0.0;
    }
    let n = net.param_count();
    net.params_mut()[n - 1] = c;
}

#[test]
fn targets_take_the_smaller_target_critic() {
    let mut m = Masac::new(tiny_cfg(1, 2), 1).unwrap();
    m.cfg.gamma = 1.0;
    m.agents[0].log_alpha = f64::NEG_INFINITY;
    constant_critic(&mut m.agents[0].q_target[0], 5.0);
    constant_critic(&mut m.agents[0].q_target[1], 3.0);
    let mut b = random_batch(&m, 4, 3);
    b.done = vec![0.0; 4];
    let y = m.critic_targets(&b).unwrap();
    for r in 0..4 {
        assert!((y[r] - (b.rewards[r] + 3.0)).abs() < 1e-12);
    }
    constant_critic(&mut m.agents[0].q_target[0], -1.0);
    let y = m.critic_targets(&b).unwrap();
    for r in 0..4 {
        assert!((y[r] - (b.rewards[r] - 1.0)).abs() < 1e-12);
    }
}

#[test]
fn critic_gradient_matches_finite_differences_on_three_parameters() {
    let mut cfg = MasacConfig::new(1, 1);
    cfg.hidden = vec![];
    cfg.batch_size = 3;
    let m = Masac::new(cfg, 2).unwrap();
    let net = &m.agents[0].q[0];
    assert_eq!(net.param_count(), 3);
    let x = [0.3, -0.5, 1.2, 0.7, -0.8, 0.1];
    let y = [0.4, -1.0, 2.0];
    let (_, g, _) = critic_loss_grad(net, &x, 3, &y).unwrap();
    let eps = 1e-5;
    for k in 0..3 {
        let mut p = net.clone();
        p.params_mut()[k] += eps;
        let mut q = net.clone();
        q.params_mut()[k] -= eps;
        let fd = (critic_loss_grad(&p, &x, 3, &y).unwrap().0 - critic_loss_grad(&q, &x, 3, &y).unwrap().0) / (2.0 * eps);
        assert!((fd - g[k]).abs() / fd.abs().max(1e-8) < 1e-4, "{k}: {fd} vs {}", g[k]);
    }
}

#[test]
fn critic_gradient_matches_finite_differences_on_deep_critic() {
    let mut cfg = MasacConfig::new(2, 3);
    cfg.hidden = vec![16, 16, 8];
    let m = Masac::new(cfg, 5).unwrap();
    let b = random_batch(&m, 6, 8);
    let x = m.critic_input(&b.obs, &b.actions, 6);
    let net = &m.agents[1].q[1];
    let y: Vec<f64> = (0..6).map(|r| b.rewards[2 * r + 1]).collect();
    let (_, g, _) = critic_loss_grad(net, &x, 6, &y).unwrap();
    let eps = 1e-6;
    let mut worst: f64 = 0.0;
    for k in (0..net.param_count()).step_by(3) {
        let mut p = net.clone();
        p.params_mut()[k] += eps;
        let mut q = net.clone();
        q.params_mut()[k] -= eps;
        let fd = (critic_loss_grad(&p, &x, 6, &y).unwrap().0 - critic_loss_grad(&q, &x, 6, &y).unwrap().0) / (2.0 * eps);
        let scale = fd.abs().max(g[k].abs());
        if scale > 1e-5 {
            worst = worst.max((fd - g[k]).abs() / scale);
        }
    }
    assert!(worst < 1e-4, "worst {worst}");
}

#[test]
fn policy_gradient_matches_finite_differences() {
    let mut cfg = MasacConfig::new(2, 3);
    cfg.hidden = vec![12, 8];
    let mut m = Masac::new(cfg, 9).unwrap();
    m.agents[0].log_alpha = libm::log(0.3);
    // widen the policy output so the tanh and log-std paths are exercised
    for ag in &mut m.agents {
        let off = ag.policy.net.last_layer_offset();
        for p in &mut ag.policy.net.params_mut()[off..] {
            *p *= 80.0;
        }
    }
    let b = random_batch(&m, 5, 3);
    let (samples, joint) = m.sample_all(&b.obs, 5).unwrap();
    let x = m.critic_input(&b.obs, &joint, 5);
    let ag = &m.agents[0];
    let (_, g) = policy_loss_grad(ag, 0, 2, 3, &x, &samples[0]).unwrap();
    let obs0 = m.agent_obs(&b.obs, 5, 0);
    let loss = |pol: &GaussianPolicy| {
        let mut s = PolicySample::default();
        pol.sample_with_noise(&obs0, 5, samples[0].noise.clone(), &mut s).unwrap();
        let mut j = joint.clone();
        for r in 0..5 {
            j[r * 2] = s.actions[r];
        }
        let xx = m.critic_input(&b.obs, &j, 5);
        let mut a = ag.clone();
        a.policy = pol.clone();
        policy_loss_grad(&a, 0, 2, 3, &xx, &s).unwrap().0
    };
    let eps = 1e-6;
    let mut worst: f64 = 0.0;
    for k in 0..ag.policy.net.param_count() {
        let mut p = ag.policy.clone();
        p.net.params_mut()[k] += eps;
        let mut q = ag.policy.clone();
        q.net.params_mut()[k] -= eps;
        let fd = (loss(&p) - loss(&q)) / (2.0 * eps);
        let scale = fd.abs().max(g[k].abs());
        if scale > 1e-5 {
            worst = worst.max((fd - g[k]).abs() / scale);
        }
    }
    assert!(worst < 1e-4, "worst {worst}");
}

#[test]
fn temperature_gradient_matches_finite_differences() {
    let logp = [0.4, -1.3, 2.2];
    let h = -1.0;
    let loss = |la: f64| -libm::exp(la) * logp.iter().map(|l| l + h).sum::<f64>() / 3.0;
    let la = libm::log(0.1);
    let analytic = -0.1 * logp.iter().map(|l| l + h).sum::<f64>() / 3.0;
    let fd = (loss(la + 1e-6) - loss(la - 1e-6)) / 2e-6;
    assert!((fd - analytic).abs() / analytic.abs() < 1e-6);
    // the implementation's step moves log α against that gradient
    let mut m = Masac::new(tiny_cfg(1, 2), 1).unwrap();
    let before = m.agents[0].log_alpha;
    m.temperature_update(&vec![logp.to_vec()]).unwrap();
    let step = m.agents[0].log_alpha - before;
    assert!(step * analytic < 0.0);
    assert!((step.abs() - 3e-3).abs() < 1e-9);
}

#[test]
fn temperature_stationary_at_target_entropy() {
    let mut m = Masac::new(tiny_cfg(1, 2), 1).unwrap();
    let before = m.agents[0].log_alpha;
    m.temperature_update(&vec![vec![1.0, 1.0, 1.0]]).unwrap();
    assert_eq!(m.agents[0].log_alpha, before);
    m.temperature_update(&vec![vec![8.0, 9.0, 7.5]]).unwrap();
    assert!(m.agents[0].log_alpha > before);
}

#[test]
fn temperature_stays_positive() {
    let mut m = Masac::new(tiny_cfg(1, 2), 1).unwrap();
    m.cfg.lr_alpha = 0.1;
    m.agents[0].alpha_opt.lr = 0.1;
    let mut r = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..100_000 {
        let lp: Vec<f64> = (0..4).map(|_| r.random_range(-30.0..10.0)).collect();
        m.temperature_update(&vec![lp]).unwrap();
        assert!(m.agents[0].alpha() > 0.0);
    }
}

#[test]
fn critic_at_its_targets_is_untouched() {
    let mut m = Masac::new(tiny_cfg(1, 2), 3).unwrap();
    let b = random_batch(&m, 4, 1);
    let x = m.critic_input(&b.obs, &b.actions, 4);
    let mut y = Vec::new();
    for r in 0..4 {
        y.push(m.agents[0].q[0].forward(&x[r * 3..(r + 1) * 3]).unwrap()[0]);
    }
    let (loss, g, _) = critic_loss_grad(&m.agents[0].q[0], &x, 4, &y).unwrap();
    assert_eq!(loss, 0.0);
    let before = m.agents[0].q[0].clone();
    let ag = &mut m.agents[0];
    ag.q_opt[0].step(ag.q[0].params_mut(), &g).unwrap();
    assert_eq!(m.agents[0].q[0], before);
}

#[test]
fn critic_overfits_a_fixed_batch() {
    let mut cfg = MasacConfig::new(1, 3);
    cfg.hidden = vec![32, 32];
    let mut m = Masac::new(cfg, 3).unwrap();
    let b = random_batch(&m, 32, 7);
    let x = m.critic_input(&b.obs, &b.actions, 32);
    let y = b.rewards.clone();
    let mut losses = Vec::new();
    for _ in 0..500 {
        let ag = &mut m.agents[0];
        let (l, g, _) = critic_loss_grad(&ag.q[0], &x, 32, &y).unwrap();
        ag.q_opt[0].step(ag.q[0].params_mut(), &g).unwrap();
        losses.push(l);
    }
    let first: f64 = losses[..50].iter().sum::<f64>() / 50.0;
    let last: f64 = losses[450..].iter().sum::<f64>() / 50.0;
    assert!(last < 0.1 * first, "{first} -> {last}");
    assert!(losses.iter().all(|l| l.is_finite()));
}

#[test]
fn flat_critic_and_zero_temperature_leave_policy_alone() {
    let mut m = Masac::new(tiny_cfg(1, 2), 3).unwrap();
    m.agents[0].log_alpha = f64::NEG_INFINITY;
    constant_critic(&mut m.agents[0].q[0], 2.0);
    constant_critic(&mut m.agents[0].q[1], 2.5);
    let before = m.agents[0].policy.clone();
    let b = random_batch(&m, 4, 5);
    let (loss, _) = m.policy_update(&b).unwrap();
    assert_eq!(loss[0], -2.0);
    assert_eq!(m.agents[0].policy, before);
}

#[test]
fn soft_update_fixed_points() {
    let mut m = Masac::new(tiny_cfg(2, 2), 3).unwrap();
    m.agents[0].q[0].params_mut()[0] += 1.0;
    let before: Vec<_> = m.agents.iter().map(|a| a.q_target.clone()).collect();
    m.cfg.tau = 0.0;
    m.soft_update_targets().unwrap();
    for (a, b) in m.agents.iter().zip(&before) {
        assert_eq!(&a.q_target, b);
    }
    m.cfg.tau = 1.0;
    m.soft_update_targets().unwrap();
    for a in &m.agents {
        assert_eq!(a.q_target, a.q);
    }
}

fn transition(n: usize, obs: usize, k: usize) -> Transition {
    let x = k as f64 * 0.01;
    Transition {
        obs: (0..n * obs).map(|j| libm::sin(x + j as f64)).collect(),
        actions: (0..n).map(|j| libm::cos(x * 3.0 + j as f64) * 0.9).collect(),
        rewards: (0..n).map(|j| (j as f64 + 1.0) * libm::sin(x * 2.0).abs()).collect(),
        next_obs: (0..n * obs).map(|j| libm::sin(x + 0.01 + j as f64)).collect(),
        done: k % 50 == 49,
    }
}

#[test]
fn no_updates_below_n_min() {
    let mut cfg = tiny_cfg(2, 3);
    cfg.n_min = 10;
    let mut m = Masac::new(cfg, 3).unwrap();
    let agents = m.agents.clone();
    for k in 0..9 {
        let d = m.train_step(&transition(2, 3, k)).unwrap();
        assert!(!d.updated);
    }
    assert_eq!(m.agents, agents);
    assert!(m.train_step(&transition(2, 3, 9)).unwrap().updated);
    assert_ne!(m.agents, agents);
}

#[test]
fn identical_streams_give_identical_parameters() {
    let run = || {
        let mut m = Masac::new(tiny_cfg(2, 3), 42).unwrap();
        for k in 0..40 {
            m.train_step(&transition(2, 3, k)).unwrap();
        }
        m
    };
    let (a, b) = (run(), run());
    assert_eq!(a.agents, b.agents);
    assert_eq!(save_checkpoint(&a, &RewardScaler::default(), 1), save_checkpoint(&b, &RewardScaler::default(), 1));
}

#[test]
fn target_networks_change_only_through_soft_updates() {
    let mut m = Masac::new(tiny_cfg(1, 3), 4).unwrap();
    m.cfg.tau = 0.0;
    for k in 0..20 {
        m.train_step(&transition(1, 3, k)).unwrap();
    }
    let fresh = Masac::new(tiny_cfg(1, 3), 4).unwrap();
    assert_eq!(m.agents[0].q_target, fresh.agents[0].q_target);
    assert_ne!(m.agents[0].q, fresh.agents[0].q);
}

#[test]
fn deployed_policy_reads_only_its_own_observation() {
    let mut m = Masac::new(MasacConfig::new(3, 11), 8).unwrap();
    for k in 0..5 {
        m.observe(&transition(3, 11, k).obs);
    }
    let base: Vec<f64> = (0..33).map(|k| (k as f64 * 0.13).sin()).collect();
    let a = m.act_joint(&base, true).unwrap();
    let mut other = base.clone();
    for v in &mut other[11..] {
        *v += 3.7;
    }
    let b = m.act_joint(&other, true).unwrap();
    assert_eq!(a[0], b[0]);
    assert_ne!(a[1], b[1]);
}

#[test]
fn checkpoint_round_trip_and_schema_guard() {
    let mut m = Masac::new(tiny_cfg(2, 3), 12).unwrap();
    for k in 0..10 {
        m.train_step(&transition(2, 3, k)).unwrap();
    }
    let mut rs = RewardScaler::default();
    rs.update(3.0);
    rs.update(5.0);
    let bytes = save_checkpoint(&m, &rs, 7);
    let (back, rs2) = load_checkpoint(&bytes, 7, 3).unwrap();
    assert_eq!(save_checkpoint(&back, &rs2, 7), bytes);
    assert_eq!(back.agents, m.agents);
    assert!(load_checkpoint(&bytes, 8, 3).is_err());
    assert!(load_checkpoint(&bytes, 7, 4).is_err());
    let mut bad = bytes.clone();
    bad[8] = 2;
    assert!(load_checkpoint(&bad, 7, 3).is_err());
    // the restored RNG continues the same stream
    let mut a = m.clone();
    let mut b = back;
    assert_eq!(a.random_joint_action(), b.random_joint_action());
}

/// Single-agent SAC written directly from its update equations, sharing
/// only the network primitives with the trainer.
struct RefSac {
    policy: GaussianPolicy,
    popt: Adam,
    q: [Mlp; 2],
    qt: [Mlp; 2],
    qopt: [Adam; 2],
    log_alpha: f64,
    aopt: Adam,
}

impl RefSac {
    fn update(&mut self, b: &Batch, rng: &mut ChaCha8Rng, gamma: f64, tau: f64, h_target: f64) {
        let rows = b.rows;
        let od = self.policy.obs_dim();
        let cat = |s: &[f64], a: &[f64]| {
            let mut x = Vec::new();
            for r in 0..rows {
                x.extend_from_slice(&s[r * od..(r + 1) * od]);
                x.push(a[r]);
            }
            x
        };
        // soft Bellman targets
        let alpha = libm::exp(self.log_alpha);
        let mut next = PolicySample::default();
        self.policy.sample_batch(&b.next_obs, rows, rng, &mut next).unwrap();
        let xn = cat(&b.next_obs, &next.actions);
        let mut t1 = Tape::default();
        let mut t2 = Tape::default();
        self.qt[0].forward_batch(&xn, rows, &mut t1).unwrap();
        self.qt[1].forward_batch(&xn, rows, &mut t2).unwrap();
        let y: Vec<f64> = (0..rows)
            .map(|r| {
                let v = t1.output()[r].min(t2.output()[r]) - alpha * next.log_probs[r];
                b.rewards[r] + gamma * (1.0 - b.done[r]) * v
            })
            .collect();
        let x = cat(&b.obs, &b.actions);
        for j in 0..2 {
            let mut t = Tape::default();
            self.q[j].forward_batch(&x, rows, &mut t).unwrap();
            let dy: Vec<f64> = (0..rows).map(|r| 2.0 * (t.output()[r] - y[r]) / rows as f64).collect();
            let mut g = vec![0.0; self.q[j].param_count()];
            self.q[j].backward_batch(&t, &dy, Some(&mut g), None).unwrap();
            self.qopt[j].step(self.q[j].params_mut(), &g).unwrap();
        }
        // policy
        let mut s = PolicySample::default();
        self.policy.sample_batch(&b.obs, rows, rng, &mut s).unwrap();
        let xa = cat(&b.obs, &s.actions);
        self.q[0].forward_batch(&xa, rows, &mut t1).unwrap();
        self.q[1].forward_batch(&xa, rows, &mut t2).unwrap();
        let first: Vec<f64> = (0..rows).map(|r| if t1.output()[r] <= t2.output()[r] { 1.0 } else { 0.0 }).collect();
        let second: Vec<f64> = first.iter().map(|f| 1.0 - f).collect();
        let mut d1 = Vec::new();
        let mut d2 = Vec::new();
        self.q[0].backward_batch(&t1, &first, None, Some(&mut d1)).unwrap();
        self.q[1].backward_batch(&t2, &second, None, Some(&mut d2)).unwrap();
        let inv = 1.0 / rows as f64;
        let da: Vec<f64> = (0..rows).map(|r| -(d1[r * (od + 1) + od] + d2[r * (od + 1) + od]) * inv).collect();
        let mut g = vec![0.0; self.policy.net.param_count()];
        self.policy.backward(&s, &da, &vec![alpha * inv; rows], &mut g).unwrap();
        self.popt.step(self.policy.net.params_mut(), &g).unwrap();
        // temperature
        let mean = s.log_probs.iter().map(|l| l + h_target).sum::<f64>() / rows as f64;
        let mut la = [self.log_alpha];
        self.aopt.step(&mut la, &[-alpha * mean]).unwrap();
        self.log_alpha = la[0];
        for j in 0..2 {
            for (t, o) in self.qt[j].params_mut().iter_mut().zip(self.q[j].params()) {
                *t = tau * o + (1.0 - tau) * *t;
            }
        }
    }
}

#[test]
fn single_agent_reduces_to_plain_sac_bitwise() {
    let mut cfg = MasacConfig::new(1, 4);
    cfg.hidden = vec![16, 16];
    let mut m = Masac::new(cfg, 21).unwrap();
    for k in 0..30 {
        m.observe(&transition(1, 4, k).obs);
    }
    let a = &m.agents[0];
    let mut r = RefSac {
        policy: a.policy.clone(),
        popt: a.policy_opt.clone(),
        q: a.q.clone(),
        qt: a.q_target.clone(),
        qopt: a.q_opt.clone(),
        log_alpha: a.log_alpha,
        aopt: a.alpha_opt.clone(),
    };
    let mut rrng = m.rng.clone();
    for step in 0..5 {
        let raw = random_batch(&m, 8, 100 + step);
        let b = m.normalise_batch(&raw);
        m.update_on(&raw).unwrap();
        r.update(&b, &mut rrng, 0.99, 0.005, -1.0);
        let a = &m.agents[0];
        assert_eq!(a.policy, r.policy, "policy differs at step {step}");
        assert_eq!(a.q, r.q);
        assert_eq!(a.q_target, r.qt);
        assert_eq!(a.log_alpha.to_bits(), r.log_alpha.to_bits());
    }
}

#[test]
fn bandit_policy_finds_the_optimum() {
    let mut cfg = MasacConfig::new(1, 1);
    cfg.hidden = vec![32, 32];
    cfg.batch_size = 64;
    cfg.n_min = 256;
    cfg.gamma = 0.0;
    let mut m = Masac::new(cfg, 17).unwrap();
    let mut updates = 0;
    let mut k = 0;
    while updates < 2000 {
        let a = if k < 256 { m.random_joint_action() } else { m.act_joint(&[1.0], false).unwrap() };
        let r = -(a[0] - 0.5) * (a[0] - 0.5);
        let d = m.train_step(&Transition {
            obs: vec![1.0],
            actions: a,
            rewards: vec![r],
            next_obs: vec![1.0],
            done: true,
        })
        .unwrap();
        if d.updated {
            updates += 1;
        }
        k += 1;
    }
    let a = m.act_joint(&[1.0], true).unwrap()[0];
    assert!((a - 0.5).abs() < 0.05, "deterministic action {a}");
}
