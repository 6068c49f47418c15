use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::adam::Adam;
use super::mlp::{soft_update, Mlp, Tape};
use super::normalizer::RunningNorm;
use super::policy::{GaussianPolicy, PolicySample};
use super::replay::{Batch, ReplayBuffer, Transition};
use crate::math::{exp, ln};
use crate::{Error, Result};

/// Which agents' entropy enters agent `i`'s critic target.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntropyTerm {
    /// `Σ_k α_k log π_k` over all agents.
    Summed,
    /// `α_i log π_i` only.
    PerAgent,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MasacConfig {
    pub n_agents: usize,
    pub obs_dim: usize,
    pub act_dim: usize,
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
    /// Transitions stored before updates start.
    pub n_min: usize,
    pub entropy: EntropyTerm,
}

impl MasacConfig {
    pub fn new(n_agents: usize, obs_dim: usize) -> Self {
        MasacConfig {
            n_agents,
            obs_dim,
            act_dim: 1,
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
            entropy: EntropyTerm::Summed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_agents == 0 || self.obs_dim == 0 || self.act_dim == 0 || self.batch_size == 0 {
            return Err(Error::invalid("agents, observation width, action width and batch size must be positive"));
        }
        if !(0.0..=1.0).contains(&self.gamma) || !(0.0..=1.0).contains(&self.tau) {
            return Err(Error::invalid("rl.gamma and rl.tau must lie in [0, 1]"));
        }
        if !(self.init_alpha > 0.0) || !(self.lr_actor > 0.0) || !(self.lr_critic > 0.0) || !(self.lr_alpha >= 0.0) {
            return Err(Error::invalid("rl learning rates and initial temperature must be positive"));
        }
        if self.buffer_capacity < self.batch_size {
            return Err(Error::invalid("rl.buffer_capacity must hold at least one batch"));
        }
        Ok(())
    }

    fn critic_sizes(&self) -> Vec<usize> {
        let mut s = vec![self.n_agents * (self.obs_dim + self.act_dim)];
        s.extend_from_slice(&self.hidden);
        s.push(1);
        s
    }
}

/// Networks, optimisers and temperature of one agent.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentNets {
    pub policy: GaussianPolicy,
    pub policy_opt: Adam,
    pub q: [Mlp; 2],
    pub q_target: [Mlp; 2],
    pub q_opt: [Adam; 2],
    pub log_alpha: f64,
    pub alpha_opt: Adam,
}

impl AgentNets {
    pub fn alpha(&self) -> f64 {
        exp(self.log_alpha)
    }
}

/// Losses and statistics of one training step.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainDiagnostics {
    pub updated: bool,
    /// Mean of the two critic losses, per agent.
    pub critic_loss: Vec<f64>,
    pub policy_loss: Vec<f64>,
    pub alpha_loss: Vec<f64>,
    pub alpha: Vec<f64>,
    pub mean_q: Vec<f64>,
}

/// Centralised-critic multi-agent soft actor-critic.
#[derive(Debug, Clone)]
pub struct Masac {
    pub cfg: MasacConfig,
    pub agents: Vec<AgentNets>,
    pub buffer: ReplayBuffer,
    pub obs_norm: RunningNorm,
    pub rng: ChaCha8Rng,
    pub updates: u64,
    batch: Batch,
}

/// Mean squared error of `net(x)` against `y` with its parameter gradient
/// and the mean prediction.
pub fn critic_loss_grad(net: &Mlp, x: &[f64], rows: usize, y: &[f64]) -> Result<(f64, Vec<f64>, f64)> {
    let mut tape = Tape::default();
    net.forward_batch(x, rows, &mut tape)?;
    let q = tape.output();
    let mut loss = 0.0;
    let mut qsum = 0.0;
    let mut dy = vec![0.0; rows];
    for r in 0..rows {
        let e = q[r] - y[r];
        loss += e * e;
        qsum += q[r];
        dy[r] = 2.0 * e / rows as f64;
    }
    loss /= rows as f64;
    if !loss.is_finite() {
        return Err(Error::NonFiniteLoss("critic"));
    }
    let mut g = vec![0.0; net.param_count()];
    net.backward_batch(&tape, &dy, Some(&mut g), None)?;
    Ok((loss, g, qsum / rows as f64))
}

/// Policy loss `mean[α log π_i − min_j Q_j(s, a)]` of agent `i` and its
/// gradient, where `x` is the critic input built from the sampled joint
/// action and `sample` is agent `i`'s part of it.
pub fn policy_loss_grad(
    ag: &AgentNets,
    i: usize,
    n_agents: usize,
    obs_dim: usize,
    x: &[f64],
    sample: &PolicySample,
) -> Result<(f64, Vec<f64>)> {
    let rows = sample.rows;
    let d = ag.policy.act_dim;
    let wo = n_agents * obs_dim;
    let wx = wo + n_agents * d;
    let alpha = ag.alpha();
    let mut t1 = Tape::default();
    let mut t2 = Tape::default();
    ag.q[0].forward_batch(x, rows, &mut t1)?;
    ag.q[1].forward_batch(x, rows, &mut t2)?;
    let mut pick1 = vec![0.0; rows];
    let mut pick2 = vec![0.0; rows];
    let mut loss = 0.0;
    for r in 0..rows {
        let (q1, q2) = (t1.output()[r], t2.output()[r]);
        if q1 <= q2 {
            pick1[r] = 1.0;
        } else {
            pick2[r] = 1.0;
        }
        loss += alpha * sample.log_probs[r] - q1.min(q2);
    }
    loss /= rows as f64;
    if !loss.is_finite() {
        return Err(Error::NonFiniteLoss("policy"));
    }
    let mut dx1 = Vec::new();
    let mut dx2 = Vec::new();
    ag.q[0].backward_batch(&t1, &pick1, None, Some(&mut dx1))?;
    ag.q[1].backward_batch(&t2, &pick2, None, Some(&mut dx2))?;
    let inv = 1.0 / rows as f64;
    let mut d_action = vec![0.0; rows * d];
    for r in 0..rows {
        for k in 0..d {
            let c = r * wx + wo + i * d + k;
            d_action[r * d + k] = -(dx1[c] + dx2[c]) * inv;
        }
    }
    let d_logp = vec![alpha * inv; rows];
    let mut g = vec![0.0; ag.policy.net.param_count()];
    ag.policy.backward(sample, &d_action, &d_logp, &mut g)?;
    Ok((loss, g))
}

/// Per-agent log-probabilities of the fresh actions drawn in a policy update.
pub type FreshLogProbs = Vec<Vec<f64>>;

impl Masac {
    pub fn new(cfg: MasacConfig, seed: u64) -> Result<Self> {
        cfg.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cs = cfg.critic_sizes();
        let mut agents = Vec::with_capacity(cfg.n_agents);
        for _ in 0..cfg.n_agents {
            let policy = GaussianPolicy::new(cfg.obs_dim, cfg.act_dim, &cfg.hidden, &mut rng)?;
            let q1 = Mlp::new(&cs, &mut rng)?;
            let q2 = Mlp::new(&cs, &mut rng)?;
            let np = policy.net.param_count();
            let nq = q1.param_count();
            agents.push(AgentNets {
                policy_opt: Adam::new(np, cfg.lr_actor),
                policy,
                q_target: [q1.clone(), q2.clone()],
                q: [q1, q2],
                q_opt: [Adam::new(nq, cfg.lr_critic), Adam::new(nq, cfg.lr_critic)],
                log_alpha: ln(cfg.init_alpha),
                alpha_opt: Adam::new(1, cfg.lr_alpha),
            });
        }
        let buffer = ReplayBuffer::new(
            cfg.buffer_capacity,
            cfg.n_agents * cfg.obs_dim,
            cfg.n_agents * cfg.act_dim,
            cfg.n_agents,
        );
        let obs_norm = RunningNorm::new(cfg.obs_dim);
        Ok(Masac { cfg, agents, buffer, obs_norm, rng, updates: 0, batch: Batch::default() })
    }

    fn agent_slice<'a>(&self, joint: &'a [f64], i: usize) -> &'a [f64] {
        &joint[i * self.cfg.obs_dim..(i + 1) * self.cfg.obs_dim]
    }

    /// Action of agent `i` from its own raw observation only.
    pub fn act(&mut self, i: usize, obs: &[f64], deterministic: bool) -> Result<Vec<f64>> {
        if obs.len() != self.cfg.obs_dim {
            return Err(Error::ShapeMismatch(alloc::format!(
                "agent observation has {} values, expected {}",
                obs.len(),
                self.cfg.obs_dim
            )));
        }
        let mut x = Vec::new();
        self.obs_norm.apply(obs, &mut x);
        let p = &self.agents[i].policy;
        if deterministic {
            return p.mean_action(&x);
        }
        let mut s = PolicySample::default();
        p.sample_batch(&x, 1, &mut self.rng, &mut s)?;
        Ok(s.actions)
    }

    /// Joint action, agent by agent, each from its own slice of `joint_obs`.
    pub fn act_joint(&mut self, joint_obs: &[f64], deterministic: bool) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(self.cfg.n_agents * self.cfg.act_dim);
        for i in 0..self.cfg.n_agents {
            let o = self.agent_slice(joint_obs, i).to_vec();
            out.extend(self.act(i, &o, deterministic)?);
        }
        Ok(out)
    }

    /// Uniform random joint action on `[-1, 1]`.
    pub fn random_joint_action(&mut self) -> Vec<f64> {
        (0..self.cfg.n_agents * self.cfg.act_dim).map(|_| self.rng.random_range(-1.0..=1.0)).collect()
    }

    /// Folds each agent's slice of a joint observation into the normaliser.
    pub fn observe(&mut self, joint_obs: &[f64]) {
        for i in 0..self.cfg.n_agents {
            let o = self.agent_slice(joint_obs, i).to_vec();
            self.obs_norm.update(&o);
        }
    }

    /// Returns a copy of `b` with both observation blocks standardised.
    pub fn normalise_batch(&self, b: &Batch) -> Batch {
        let mut out = b.clone();
        self.obs_norm.apply(&b.obs, &mut out.obs);
        self.obs_norm.apply(&b.next_obs, &mut out.next_obs);
        out
    }

    pub fn agent_obs(&self, joint: &[f64], rows: usize, i: usize) -> Vec<f64> {
        let w = self.cfg.n_agents * self.cfg.obs_dim;
        let d = self.cfg.obs_dim;
        let mut out = Vec::with_capacity(rows * d);
        for r in 0..rows {
            out.extend_from_slice(&joint[r * w + i * d..r * w + (i + 1) * d]);
        }
        out
    }

    pub fn critic_input(&self, obs: &[f64], actions: &[f64], rows: usize) -> Vec<f64> {
        let wo = self.cfg.n_agents * self.cfg.obs_dim;
        let wa = self.cfg.n_agents * self.cfg.act_dim;
        let mut x = Vec::with_capacity(rows * (wo + wa));
        for r in 0..rows {
            x.extend_from_slice(&obs[r * wo..(r + 1) * wo]);
            x.extend_from_slice(&actions[r * wa..(r + 1) * wa]);
        }
        x
    }

    /// Samples every agent's policy on its slice of `obs`; returns the
    /// samples and the joint action matrix.
    pub fn sample_all(&mut self, obs: &[f64], rows: usize) -> Result<(Vec<PolicySample>, Vec<f64>)> {
        let n = self.cfg.n_agents;
        let d = self.cfg.act_dim;
        let mut samples = Vec::with_capacity(n);
        for i in 0..n {
            let x = self.agent_obs(obs, rows, i);
            let mut s = PolicySample::default();
            self.agents[i].policy.sample_batch(&x, rows, &mut self.rng, &mut s)?;
            samples.push(s);
        }
        let mut joint = vec![0.0; rows * n * d];
        for r in 0..rows {
            for (i, s) in samples.iter().enumerate() {
                joint[r * n * d + i * d..r * n * d + (i + 1) * d].copy_from_slice(&s.actions[r * d..(r + 1) * d]);
            }
        }
        Ok((samples, joint))
    }

    /// Soft Bellman targets `y[r·N + i]` for a (normalised) batch, using
    /// fresh next actions from the current policies and the target critics.
    pub fn critic_targets(&mut self, b: &Batch) -> Result<Vec<f64>> {
        let n = self.cfg.n_agents;
        let rows = b.rows;
        let (samples, a_next) = self.sample_all(&b.next_obs, rows)?;
        let x = self.critic_input(&b.next_obs, &a_next, rows);
        let alphas: Vec<f64> = self.agents.iter().map(|a| a.alpha()).collect();
        let mut y = vec![0.0; rows * n];
        let mut t1 = Tape::default();
        let mut t2 = Tape::default();
        for i in 0..n {
            self.agents[i].q_target[0].forward_batch(&x, rows, &mut t1)?;
            self.agents[i].q_target[1].forward_batch(&x, rows, &mut t2)?;
            for r in 0..rows {
                let q = t1.output()[r].min(t2.output()[r]);
                let ent = match self.cfg.entropy {
                    EntropyTerm::Summed => (0..n).map(|k| alphas[k] * samples[k].log_probs[r]).sum::<f64>(),
                    EntropyTerm::PerAgent => alphas[i] * samples[i].log_probs[r],
                };
                y[r * n + i] = b.rewards[r * n + i] + self.cfg.gamma * (1.0 - b.done[r]) * (q - ent);
            }
        }
        Ok(y)
    }

    /// One Adam step on each critic of each agent towards `y`. Returns the
    /// mean of the two critic losses and the mean online Q, per agent.
    pub fn critic_update(&mut self, b: &Batch, y: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let n = self.cfg.n_agents;
        let rows = b.rows;
        let x = self.critic_input(&b.obs, &b.actions, rows);
        let mut losses = Vec::with_capacity(n);
        let mut mean_q = Vec::with_capacity(n);
        for i in 0..n {
            let mut total = 0.0;
            let mut qsum = 0.0;
            for j in 0..2 {
                let yi: Vec<f64> = (0..rows).map(|r| y[r * n + i]).collect();
                let ag = &mut self.agents[i];
                let (loss, g, qm) = critic_loss_grad(&ag.q[j], &x, rows, &yi)?;
                ag.q_opt[j].step(ag.q[j].params_mut(), &g)?;
                total += loss;
                if j == 0 {
                    qsum = qm;
                }
            }
            losses.push(0.5 * total);
            mean_q.push(qsum);
        }
        Ok((losses, mean_q))
    }

    /// One Adam step on each policy. Every agent's action is re-sampled once
    /// from its current policy; agent `i`'s loss differentiates only through
    /// its own action. Returns the losses and the fresh log-probabilities.
    pub fn policy_update(&mut self, b: &Batch) -> Result<(Vec<f64>, FreshLogProbs)> {
        let n = self.cfg.n_agents;
        let rows = b.rows;
        let (samples, joint) = self.sample_all(&b.obs, rows)?;
        let x = self.critic_input(&b.obs, &joint, rows);
        let mut losses = Vec::with_capacity(n);
        for i in 0..n {
            let ag = &self.agents[i];
            let (loss, g) = policy_loss_grad(ag, i, n, self.cfg.obs_dim, &x, &samples[i])?;
            let ag = &mut self.agents[i];
            ag.policy_opt.step(ag.policy.net.params_mut(), &g)?;
            losses.push(loss);
        }
        let logps = samples.into_iter().map(|s| s.log_probs).collect();
        Ok((losses, logps))
    }

    /// One Adam step on each `log α_i` for the loss
    /// `mean[-α_i (log π_i + H_target)]`. Returns the losses.
    pub fn temperature_update(&mut self, logps: &FreshLogProbs) -> Result<Vec<f64>> {
        let h = self.cfg.target_entropy;
        let mut losses = Vec::with_capacity(self.agents.len());
        for (ag, lp) in self.agents.iter_mut().zip(logps) {
            let alpha = ag.alpha();
            let m = lp.iter().map(|l| l + h).sum::<f64>() / lp.len() as f64;
            let loss = -alpha * m;
            if !loss.is_finite() {
                return Err(Error::NonFiniteLoss("temperature"));
            }
            let mut p = [ag.log_alpha];
            ag.alpha_opt.step(&mut p, &[-alpha * m])?;
            ag.log_alpha = p[0];
            losses.push(loss);
        }
        Ok(losses)
    }

    /// Moves every target critic towards its online critic.
    pub fn soft_update_targets(&mut self) -> Result<()> {
        let tau = self.cfg.tau;
        for ag in &mut self.agents {
            for j in 0..2 {
                soft_update(&ag.q[j], &mut ag.q_target[j], tau)?;
            }
        }
        Ok(())
    }

    /// Critic, policy, temperature and target updates on one batch.
    pub fn update_on(&mut self, raw: &Batch) -> Result<TrainDiagnostics> {
        let b = self.normalise_batch(raw);
        let y = self.critic_targets(&b)?;
        let (critic_loss, mean_q) = self.critic_update(&b, &y)?;
        let (policy_loss, logps) = self.policy_update(&b)?;
        let alpha_loss = self.temperature_update(&logps)?;
        self.soft_update_targets()?;
        self.updates += 1;
        Ok(TrainDiagnostics {
            updated: true,
            critic_loss,
            policy_loss,
            alpha_loss,
            alpha: self.agents.iter().map(|a| a.alpha()).collect(),
            mean_q,
        })
    }

    /// Stores `t` and, once the buffer holds `n_min` transitions (and at
    /// least a batch), performs one update on a uniformly sampled batch.
    pub fn train_step(&mut self, t: &Transition) -> Result<TrainDiagnostics> {
        self.observe(&t.obs);
        self.buffer.push(t)?;
        if self.buffer.len() < self.cfg.n_min.max(self.cfg.batch_size) {
            return Ok(TrainDiagnostics {
                alpha: self.agents.iter().map(|a| a.alpha()).collect(),
                ..TrainDiagnostics::default()
            });
        }
        let mut batch = core::mem::take(&mut self.batch);
        self.buffer.sample(self.cfg.batch_size, &mut self.rng, &mut batch)?;
        let out = self.update_on(&batch);
        self.batch = batch;
        out
    }
}
