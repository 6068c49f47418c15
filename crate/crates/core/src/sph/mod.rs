//! Weakly-compressible SPH core: particles, kernel, equation of state,
//! neighbour search and the fluid right-hand sides.

mod eos;
mod kernel;
mod neighbors;
mod particles;
mod rates;

pub use eos::EosSpec;
pub use kernel::{KernelSpec, wendland_1d};
pub use neighbors::NeighborList;
pub use particles::{Dim, ParticleKind, ParticleSystem};
pub use rates::{
    continuity_rate, hydrostatic_density, momentum_rate, riemann_interface_pressure, FluidModel,
    RateBuffers,
};

/// Fills `out[i] = f(i)` for every index, in parallel when the `parallel`
/// feature is on. Each slot is written by exactly one call, so the result is
/// independent of the worker count.
#[inline]
pub(crate) fn fill_indexed<T, F>(out: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        out.par_iter_mut().enumerate().for_each(|(i, o)| *o = f(i));
    }
    #[cfg(not(feature = "parallel"))]
    {
        for (i, o) in out.iter_mut().enumerate() {
            *o = f(i);
        }
    }
}
