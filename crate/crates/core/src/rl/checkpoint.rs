use alloc::vec::Vec;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::adam::Adam;
use super::masac::{EntropyTerm, Masac, MasacConfig};
use super::mlp::Mlp;
use super::normalizer::{RewardScaler, RunningNorm};
use crate::codec::{Reader, Writer};
use crate::{Error, Result};

const MAGIC: &[u8; 8] = b"WTCKPT\0\0";
pub const CHECKPOINT_VERSION: u32 = 1;

fn put_adam(w: &mut Writer, name: &str, a: &Adam) {
    w.f64s(name, &[a.lr, a.beta1, a.beta2, a.eps]).u64(name, a.t).f64s(name, &a.m).f64s(name, &a.v);
}

fn get_adam(r: &mut Reader<'_>, name: &str, n: usize) -> Result<Adam> {
    let h = r.f64s(name)?;
    if h.len() != 4 {
        return Err(Error::Decode(alloc::format!("`{name}` header")));
    }
    let t = r.u64(name)?;
    let m = r.f64s(name)?;
    let v = r.f64s(name)?;
    if m.len() != n || v.len() != n {
        return Err(Error::Decode(alloc::format!("`{name}` moment length")));
    }
    Ok(Adam { lr: h[0], beta1: h[1], beta2: h[2], eps: h[3], m, v, t })
}

fn put_norm(w: &mut Writer, name: &str, n: &RunningNorm) {
    w.u64(name, n.count).f64s(name, &n.mean).f64s(name, &n.m2).u32(name, n.frozen as u32);
}

fn get_norm(r: &mut Reader<'_>, name: &str) -> Result<RunningNorm> {
    let count = r.u64(name)?;
    let mean = r.f64s(name)?;
    let m2 = r.f64s(name)?;
    let frozen = r.u32(name)? == 1;
    if mean.len() != m2.len() {
        return Err(Error::Decode(alloc::format!("`{name}` widths differ")));
    }
    Ok(RunningNorm { count, mean, m2, frozen })
}

/// Serialises networks, optimiser moments, temperatures, normalisers and
/// the RNG state. The replay buffer is not included. `schema` identifies the
/// observation layout the policies were trained on.
pub fn save_checkpoint(m: &Masac, rewards: &RewardScaler, schema: u32) -> Vec<u8> {
    let c = &m.cfg;
    let mut w = Writer::new(MAGIC, CHECKPOINT_VERSION);
    let hidden: Vec<u32> = c.hidden.iter().map(|&h| h as u32).collect();
    w.u32("schema", schema)
        .u32("n_agents", c.n_agents as u32)
        .u32("obs_dim", c.obs_dim as u32)
        .u32("act_dim", c.act_dim as u32)
        .u32s("hidden", &hidden)
        .f64s(
            "hyper",
            &[c.gamma, c.tau, c.lr_actor, c.lr_critic, c.lr_alpha, c.target_entropy, c.init_alpha],
        )
        .u64("batch_size", c.batch_size as u64)
        .u64("buffer_capacity", c.buffer_capacity as u64)
        .u64("n_min", c.n_min as u64)
        .u32("entropy", (c.entropy == EntropyTerm::PerAgent) as u32);
    for a in &m.agents {
        w.f64s("policy", a.policy.net.params());
        put_adam(&mut w, "policy_opt", &a.policy_opt);
        for j in 0..2 {
            w.f64s("q", a.q[j].params()).f64s("q_target", a.q_target[j].params());
            put_adam(&mut w, "q_opt", &a.q_opt[j]);
        }
        w.f64("log_alpha", a.log_alpha);
        put_adam(&mut w, "alpha_opt", &a.alpha_opt);
    }
    put_norm(&mut w, "obs_norm", &m.obs_norm);
    put_norm(&mut w, "reward_norm", &rewards.norm);
    let word = m.rng.get_word_pos();
    w.u64("updates", m.updates)
        .bytes("rng_seed", &m.rng.get_seed())
        .u64("rng_stream", m.rng.get_stream())
        .u64("rng_word_hi", (word >> 64) as u64)
        .u64("rng_word_lo", word as u64);
    w.finish()
}

/// Inverse of [`save_checkpoint`]; refuses checkpoints trained on another
/// observation schema or width.
pub fn load_checkpoint(bytes: &[u8], schema: u32, obs_dim: usize) -> Result<(Masac, RewardScaler)> {
    let mut r = Reader::new(bytes, MAGIC, CHECKPOINT_VERSION)?;
    let found = r.u32("schema")?;
    let n_agents = r.u32("n_agents")? as usize;
    let od = r.u32("obs_dim")? as usize;
    if found != schema || od != obs_dim {
        return Err(Error::ShapeMismatch(alloc::format!(
            "checkpoint observation schema {found} (width {od}) does not match {schema} (width {obs_dim})"
        )));
    }
    let mut cfg = MasacConfig::new(n_agents, od);
    cfg.act_dim = r.u32("act_dim")? as usize;
    cfg.hidden = r.u32s("hidden")?.into_iter().map(|h| h as usize).collect();
    let h = r.f64s("hyper")?;
    if h.len() != 7 {
        return Err(Error::Decode("hyperparameter block".into()));
    }
    cfg.gamma = h[0];
    cfg.tau = h[1];
    cfg.lr_actor = h[2];
    cfg.lr_critic = h[3];
    cfg.lr_alpha = h[4];
    cfg.target_entropy = h[5];
    cfg.init_alpha = h[6];
    cfg.batch_size = r.u64("batch_size")? as usize;
    cfg.buffer_capacity = r.u64("buffer_capacity")? as usize;
    cfg.n_min = r.u64("n_min")? as usize;
    cfg.entropy = if r.u32("entropy")? == 1 { EntropyTerm::PerAgent } else { EntropyTerm::Summed };
    let mut m = Masac::new(cfg, 0)?;
    for a in &mut m.agents {
        let sizes = a.policy.net.sizes().to_vec();
        a.policy.net = Mlp::from_params(&sizes, r.f64s("policy")?)?;
        a.policy_opt = get_adam(&mut r, "policy_opt", a.policy.net.param_count())?;
        for j in 0..2 {
            let sizes = a.q[j].sizes().to_vec();
            a.q[j] = Mlp::from_params(&sizes, r.f64s("q")?)?;
            a.q_target[j] = Mlp::from_params(&sizes, r.f64s("q_target")?)?;
            a.q_opt[j] = get_adam(&mut r, "q_opt", a.q[j].param_count())?;
        }
        a.log_alpha = r.f64("log_alpha")?;
        a.alpha_opt = get_adam(&mut r, "alpha_opt", 1)?;
    }
    m.obs_norm = get_norm(&mut r, "obs_norm")?;
    if m.obs_norm.width() != od {
        return Err(Error::Decode("observation normaliser width".into()));
    }
    let rewards = RewardScaler { norm: get_norm(&mut r, "reward_norm")? };
    m.updates = r.u64("updates")?;
    let seed: [u8; 32] =
        r.bytes("rng_seed")?.try_into().map_err(|_| Error::Decode("rng seed must be 32 bytes".into()))?;
    let stream = r.u64("rng_stream")?;
    let hi = r.u64("rng_word_hi")?;
    let lo = r.u64("rng_word_lo")?;
    r.finish()?;
    let mut rng = ChaCha8Rng::from_seed(seed);
    rng.set_stream(stream);
    rng.set_word_pos(((hi as u128) << 64) | lo as u128);
    m.rng = rng;
    Ok((m, rewards))
}
