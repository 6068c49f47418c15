use alloc::vec::Vec;

use rand::Rng;

use crate::{Error, Result};

/// One joint step of all agents.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    /// Joint observation, agent-major (`N × obs_dim`).
    pub obs: Vec<f64>,
    /// Joint action (`N × act_dim`).
    pub actions: Vec<f64>,
    /// Per-agent reward.
    pub rewards: Vec<f64>,
    pub next_obs: Vec<f64>,
    pub done: bool,
}

/// Fixed-capacity FIFO store of joint transitions with flat storage.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplayBuffer {
    capacity: usize,
    obs_w: usize,
    act_w: usize,
    rew_w: usize,
    obs: Vec<f64>,
    actions: Vec<f64>,
    rewards: Vec<f64>,
    next_obs: Vec<f64>,
    done: Vec<f64>,
    head: usize,
    len: usize,
}

/// A sampled batch laid out row-major.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Batch {
    pub rows: usize,
    pub obs: Vec<f64>,
    pub actions: Vec<f64>,
    pub rewards: Vec<f64>,
    pub next_obs: Vec<f64>,
    pub done: Vec<f64>,
}

impl ReplayBuffer {
    pub fn new(capacity: usize, obs_width: usize, act_width: usize, n_agents: usize) -> Self {
        ReplayBuffer {
            capacity,
            obs_w: obs_width,
            act_w: act_width,
            rew_w: n_agents,
            obs: Vec::new(),
            actions: Vec::new(),
            rewards: Vec::new(),
            next_obs: Vec::new(),
            done: Vec::new(),
            head: 0,
            len: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Appends a transition, evicting the oldest one at capacity.
    pub fn push(&mut self, t: &Transition) -> Result<()> {
        if t.obs.len() != self.obs_w
            || t.next_obs.len() != self.obs_w
            || t.actions.len() != self.act_w
            || t.rewards.len() != self.rew_w
        {
            return Err(Error::ShapeMismatch("transition does not match the replay layout".into()));
        }
        if self.capacity == 0 {
            return Ok(());
        }
        let slot = self.head;
        let put = |v: &mut Vec<f64>, w: usize, x: &[f64]| {
            if v.len() < (slot + 1) * w {
                v.extend_from_slice(x);
            } else {
                v[slot * w..(slot + 1) * w].copy_from_slice(x);
            }
        };
        put(&mut self.obs, self.obs_w, &t.obs);
        put(&mut self.actions, self.act_w, &t.actions);
        put(&mut self.rewards, self.rew_w, &t.rewards);
        put(&mut self.next_obs, self.obs_w, &t.next_obs);
        put(&mut self.done, 1, &[if t.done { 1.0 } else { 0.0 }]);
        self.head = (self.head + 1) % self.capacity;
        self.len = (self.len + 1).min(self.capacity);
        Ok(())
    }

    /// Slot index of the `k`-th oldest stored transition.
    fn slot(&self, k: usize) -> usize {
        if self.len < self.capacity {
            k
        } else {
            (self.head + k) % self.capacity
        }
    }

    pub fn get(&self, k: usize) -> Option<Transition> {
        if k >= self.len {
            return None;
        }
        let s = self.slot(k);
        Some(Transition {
            obs: self.obs[s * self.obs_w..(s + 1) * self.obs_w].to_vec(),
            actions: self.actions[s * self.act_w..(s + 1) * self.act_w].to_vec(),
            rewards: self.rewards[s * self.rew_w..(s + 1) * self.rew_w].to_vec(),
            next_obs: self.next_obs[s * self.obs_w..(s + 1) * self.obs_w].to_vec(),
            done: self.done[s] != 0.0,
        })
    }

    /// Uniform sample of `n` distinct transitions.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R, out: &mut Batch) -> Result<()> {
        if n > self.len {
            return Err(Error::invalid(alloc::format!("cannot sample {n} from {} transitions", self.len)));
        }
        let idx = rand::seq::index::sample(rng, self.len, n);
        self.gather(idx.iter(), out);
        Ok(())
    }

    /// Batch made of the given stored positions (oldest first numbering).
    pub fn gather<I: IntoIterator<Item = usize>>(&self, idx: I, out: &mut Batch) {
        out.rows = 0;
        out.obs.clear();
        out.actions.clear();
        out.rewards.clear();
        out.next_obs.clear();
        out.done.clear();
        for k in idx {
            let s = self.slot(k);
            out.obs.extend_from_slice(&self.obs[s * self.obs_w..(s + 1) * self.obs_w]);
            out.actions.extend_from_slice(&self.actions[s * self.act_w..(s + 1) * self.act_w]);
            out.rewards.extend_from_slice(&self.rewards[s * self.rew_w..(s + 1) * self.rew_w]);
            out.next_obs.extend_from_slice(&self.next_obs[s * self.obs_w..(s + 1) * self.obs_w]);
            out.done.push(self.done[s]);
            out.rows += 1;
        }
    }
}
