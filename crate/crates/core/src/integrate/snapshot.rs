use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;

use super::{Piston, Scratch, SimParams, SimulationState};
use crate::body::RigidBody;
use crate::codec::{Reader, Writer};
use crate::math::Vec3;
use crate::sph::{Dim, EosSpec, FluidModel, KernelSpec, ParticleKind, ParticleSystem};
use crate::waves::{DampingZoneSpec, WaveComponent, WaveMaker, WaveMakerSpec};
use crate::{Error, Result};

const MAGIC: &[u8; 8] = b"WTSNAP\0\0";
pub const SNAPSHOT_VERSION: u32 = 1;

/// Byte-exact serialisation of a [`SimulationState`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snapshot {
    bytes: Vec<u8>,
}

fn flat(v: &[Vec3]) -> Vec<f64> {
    v.iter().flat_map(|p| [p.x, p.y, p.z]).collect()
}

fn unflat(v: &[f64], n: usize, what: &str) -> Result<Vec<Vec3>> {
    if v.len() != 3 * n {
        return Err(Error::Decode(alloc::format!("`{what}` has the wrong length")));
    }
    Ok(v.chunks(3).map(|c| Vec3::new(c[0], c[1], c[2])).collect())
}

fn opt(w: &mut Writer, name: &str, v: Option<f64>) {
    w.u32(name, v.is_some() as u32).f64(name, v.unwrap_or(0.0));
}

fn get_opt(r: &mut Reader<'_>, name: &str) -> Result<Option<f64>> {
    let some = r.u32(name)? == 1;
    let v = r.f64(name)?;
    Ok(some.then_some(v))
}

impl Snapshot {
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    /// Wraps raw bytes after checking the header; the payload is decoded by
    /// [`Snapshot::restore`].
    pub fn from_bytes(bytes: Vec<u8>) -> Result<Self> {
        Reader::new(&bytes, MAGIC, SNAPSHOT_VERSION)?;
        Ok(Snapshot { bytes })
    }

    /// Rebuilds the full state.
    pub fn restore(&self) -> Result<SimulationState> {
        let mut r = Reader::new(&self.bytes, MAGIC, SNAPSHOT_VERSION)?;
        let dim = Dim::from_u32(r.u32("dim")?)?;
        let kinds = r
            .u32s("kinds")?
            .into_iter()
            .map(ParticleKind::from_code)
            .collect::<Result<Vec<_>>>()?;
        let n = kinds.len();
        let masses = r.f64s("masses")?;
        let positions = unflat(&r.f64s("positions")?, n, "positions")?;
        let velocities = unflat(&r.f64s("velocities")?, n, "velocities")?;
        let densities = r.f64s("densities")?;
        let pressures = r.f64s("pressures")?;
        let particles = ParticleSystem::from_parts(dim, positions, velocities, densities, pressures, masses, kinds)?;

        let nb = r.u32("bodies")? as usize;
        let mut bodies = Vec::with_capacity(nb);
        for _ in 0..nb {
            bodies.push(RigidBody::decode(&mut r)?);
        }

        let wavemaker = match r.u32("wavemaker")? {
            0 => None,
            1 => {
                let v = r.f64s("regular")?;
                if v.len() != 6 {
                    return Err(Error::Decode("regular wavemaker record".into()));
                }
                let spec = WaveMakerSpec::Regular {
                    height: v[0],
                    period: v[1],
                    phase: v[2],
                    stroke: v[3],
                    omega: v[4],
                    depth: v[5],
                };
                Some(WaveMaker { spec, ramp_time: r.f64("ramp_time")? })
            }
            2 => {
                let c = r.f64s("components")?;
                if c.len() % 3 != 0 {
                    return Err(Error::Decode("irregular wavemaker record".into()));
                }
                let components =
                    c.chunks(3).map(|c| WaveComponent { stroke: c[0], omega: c[1], phase: c[2] }).collect();
                let depth = r.f64("depth")?;
                let peak_period = r.f64("peak_period")?;
                let spec = WaveMakerSpec::Irregular { components, depth, peak_period };
                Some(WaveMaker { spec, ramp_time: r.f64("ramp_time")? })
            }
            k => return Err(Error::Decode(alloc::format!("unknown wavemaker kind {k}"))),
        };
        let piston = Piston { particles: r.u32s("piston")?, rest_x: r.f64s("piston_rest_x")? };

        let dp = r.f64("dp")?;
        let kernel = KernelSpec::new(dp, dim)?;
        let eos = EosSpec::new(r.f64("rho0")?, r.f64("cf")?, r.f64("beta")?)?;
        let g = unflat(&r.f64s("gravity")?, 1, "gravity")?[0];
        let mut model = FluidModel::new(kernel, eos, g);
        model.delta_dd = r.f64("delta_dd")?;
        model.eta_lim = r.f64("eta_lim")?;
        model.reference_level = r.f64("reference_level")?;
        let mut params = SimParams::new(model);
        params.cfl = r.f64("cfl")?;
        params.fixed_dt = get_opt(&mut r, "fixed_dt")?;
        params.damping = match r.u32("damping")? {
            0 => None,
            _ => {
                let v = r.f64s("damping_zone")?;
                if v.len() != 4 {
                    return Err(Error::Decode("damping zone record".into()));
                }
                Some(DampingZoneSpec { x_start: v[0], x_end: v[1], ramp: v[2], beta: v[3] })
            }
        };

        let time = r.f64("time")?;
        let step = r.u64("step")?;
        let seed: [u8; 32] = r
            .bytes("rng_seed")?
            .try_into()
            .map_err(|_| Error::Decode("rng seed must be 32 bytes".into()))?;
        let stream = r.u64("rng_stream")?;
        let hi = r.u64("rng_word_hi")?;
        let lo = r.u64("rng_word_lo")?;
        r.finish()?;
        let mut rng = <ChaCha8Rng as rand_chacha::rand_core::SeedableRng>::from_seed(seed);
        rng.set_stream(stream);
        rng.set_word_pos(((hi as u128) << 64) | lo as u128);

        Ok(SimulationState {
            particles,
            bodies,
            wavemaker,
            piston,
            params,
            time,
            step,
            rng,
            scratch: Scratch::default(),
        })
    }
}

impl SimulationState {
    pub fn snapshot(&self) -> Snapshot {
        let mut w = Writer::new(MAGIC, SNAPSHOT_VERSION);
        let p = &self.particles;
        let kinds: Vec<u32> = p.kinds.iter().map(|k| k.code()).collect();
        w.u32("dim", p.dim.as_u32())
            .u32s("kinds", &kinds)
            .f64s("masses", p.masses())
            .f64s("positions", &flat(&p.positions))
            .f64s("velocities", &flat(&p.velocities))
            .f64s("densities", &p.densities)
            .f64s("pressures", &p.pressures)
            .u32("bodies", self.bodies.len() as u32);
        for b in &self.bodies {
            b.encode(&mut w);
        }
        match &self.wavemaker {
            None => {
                w.u32("wavemaker", 0);
            }
            Some(m) => {
                match &m.spec {
                    WaveMakerSpec::Regular { height, period, phase, stroke, omega, depth } => {
                        w.u32("wavemaker", 1).f64s("regular", &[*height, *period, *phase, *stroke, *omega, *depth]);
                    }
                    WaveMakerSpec::Irregular { components, depth, peak_period } => {
                        let c: Vec<f64> = components.iter().flat_map(|c| [c.stroke, c.omega, c.phase]).collect();
                        w.u32("wavemaker", 2)
                            .f64s("components", &c)
                            .f64("depth", *depth)
                            .f64("peak_period", *peak_period);
                    }
                }
                w.f64("ramp_time", m.ramp_time);
            }
        }
        w.u32s("piston", &self.piston.particles).f64s("piston_rest_x", &self.piston.rest_x);
        let m = &self.params.model;
        w.f64("dp", m.kernel.dp)
            .f64("rho0", m.eos.rho0)
            .f64("cf", m.eos.cf)
            .f64("beta", m.eos.beta)
            .f64s("gravity", &flat(&[m.gravity]))
            .f64("delta_dd", m.delta_dd)
            .f64("eta_lim", m.eta_lim)
            .f64("reference_level", m.reference_level)
            .f64("cfl", self.params.cfl);
        opt(&mut w, "fixed_dt", self.params.fixed_dt);
        match &self.params.damping {
            None => {
                w.u32("damping", 0);
            }
            Some(z) => {
                w.u32("damping", 1).f64s("damping_zone", &[z.x_start, z.x_end, z.ramp, z.beta]);
            }
        }
        let word = self.rng.get_word_pos();
        w.f64("time", self.time)
            .u64("step", self.step)
            .bytes("rng_seed", &self.rng.get_seed())
            .u64("rng_stream", self.rng.get_stream())
            .u64("rng_word_hi", (word >> 64) as u64)
            .u64("rng_word_lo", word as u64);
        Snapshot { bytes: w.finish() }
    }

    /// Restores `snapshot` into this state, refusing snapshots of a
    /// differently built tank.
    pub fn restore_from(&mut self, snapshot: &Snapshot) -> Result<()> {
        let s = snapshot.restore()?;
        if s.particles.len() != self.particles.len()
            || s.particles.kinds != self.particles.kinds
            || s.bodies.len() != self.bodies.len()
        {
            return Err(Error::ShapeMismatch(alloc::format!(
                "snapshot has {} particles and {} bodies, state has {} and {}",
                s.particles.len(),
                s.bodies.len(),
                self.particles.len(),
                self.bodies.len()
            )));
        }
        let scratch = core::mem::take(&mut self.scratch);
        *self = s;
        self.scratch = scratch;
        Ok(())
    }
}
