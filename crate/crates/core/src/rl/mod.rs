//! Small neural-network stack and the centralised-critic multi-agent soft
//! actor-critic trainer.

mod adam;
mod checkpoint;
mod masac;
mod mlp;
mod normalizer;
mod policy;
mod replay;

pub use adam::{adam_step, Adam};
pub use checkpoint::{load_checkpoint, save_checkpoint, CHECKPOINT_VERSION};
pub use masac::{critic_loss_grad, policy_loss_grad, AgentNets, EntropyTerm, FreshLogProbs, Masac, MasacConfig, TrainDiagnostics};
pub use mlp::{soft_update, Mlp, Tape};
pub use normalizer::{RewardScaler, RunningNorm};
pub use policy::{GaussianPolicy, PolicySample, LOG_STD_MAX, LOG_STD_MIN, SQUASH_EPS};
pub use replay::{Batch, ReplayBuffer, Transition};

#[cfg(test)]
mod tests;
