//! Weakly-compressible SPH wave tank coupled to a multi-agent soft actor-critic
//! trainer for adaptive power-take-off damping of floating point absorbers.
//!
//! The crate is `no_std` with `alloc`. Everything here is a pure function of
//! in-memory state: file formats, configuration and the command line live in
//! the companion `wavetank` crate.
//!
//! Layout:
//!
//! - [`sph`]: particle storage, Wendland kernel, equation of state, cell-list
//!   neighbour search and the continuity/momentum right-hand sides.
//! - [`waves`]: dummy-particle boundary pressure, piston wavemaker (regular and
//!   JONSWAP), damping zone and free-surface gauges.
//! - [`body`]: heaving point absorbers with a linear PTO damper and power
//!   bookkeeping.
//! - [`integrate`]: symplectic stepping, CFL control, tank construction and
//!   snapshots.
//! - [`rl`]: a small MLP stack with Adam, tanh-Gaussian policies, twin critics
//!   and the centralised-critic SAC trainer.
//! - [`env`]: observation extraction, action-to-damping mapping, rewards,
//!   the episode loop and an analytic surrogate oscillator.
#![no_std]

extern crate alloc;
#[cfg(any(test, feature = "parallel"))]
extern crate std;

pub mod body;
pub mod codec;
pub mod env;
mod error;
pub mod integrate;
pub mod math;
pub mod rl;
pub mod sph;
pub mod waves;

pub use error::{Error, Result};
pub use math::Vec3;

/// Standard gravitational acceleration (m/s²).
pub const GRAVITY: f64 = 9.81;
