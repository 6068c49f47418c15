use alloc::vec::Vec;

use super::{fill_indexed, EosSpec, KernelSpec, NeighborList, ParticleKind, ParticleSystem};
use crate::math::{powf, sqrt, Vec3};
use crate::{Error, Result};

/// Constants shared by the fluid right-hand sides.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluidModel {
    pub kernel: KernelSpec,
    pub eos: EosSpec,
    pub gravity: Vec3,
    /// Density-diffusion coefficient.
    pub delta_dd: f64,
    /// Riemann dissipation limiter coefficient.
    pub eta_lim: f64,
    /// Still-water level used for the hydrostatic part of the density.
    pub reference_level: f64,
}

impl FluidModel {
    pub fn new(kernel: KernelSpec, eos: EosSpec, gravity: Vec3) -> Self {
        FluidModel { kernel, eos, gravity, delta_dd: 0.1, eta_lim: 3.0, reference_level: 0.0 }
    }
}

/// Density of a fluid column at rest at height `z`, consistent with the EOS.
pub fn hydrostatic_density(model: &FluidModel, z: f64) -> f64 {
    let g = model.gravity.norm();
    if g == 0.0 {
        return model.eos.rho0;
    }
    let b = model.eos.stiffness();
    let x = 1.0 + model.eos.rho0 * g * (model.reference_level - z) / b;
    model.eos.rho0 * powf(x.max(1e-12), 1.0 / model.eos.beta)
}

/// Interface pressure from a linearised acoustic Riemann solver with a
/// one-sided dissipation limiter. The left state sits on the `j` side and the
/// right state on the `i` side; `u_l - u_r > 0` means the pair is closing.
#[inline]
pub fn riemann_interface_pressure(
    p_l: f64,
    p_r: f64,
    rho_l: f64,
    rho_r: f64,
    u_l: f64,
    u_r: f64,
    cf: f64,
    eta_lim: f64,
) -> f64 {
    let du = u_l - u_r;
    let lambda = (eta_lim * du.max(0.0) / cf).min(1.0);
    0.5 * (p_l + p_r) + 0.5 * lambda * 0.5 * (rho_l + rho_r) * cf * du
}

/// Output buffers of a rate evaluation, reused across steps.
#[derive(Debug, Clone, Default)]
pub struct RateBuffers {
    /// Density rate; zero for boundary particles.
    pub drho: Vec<f64>,
    /// Fluid: full acceleration. Body particles: fluid force per unit mass
    /// (no gravity). Walls and piston: zero.
    pub acc: Vec<Vec3>,
    rho_dyn: Vec<f64>,
    out: Vec<(f64, Vec3)>,
}

impl RateBuffers {
    /// Evaluates the continuity and momentum right-hand sides for every
    /// particle by gathering over its (sorted) neighbour list.
    pub fn compute(&mut self, model: &FluidModel, sys: &ParticleSystem, nl: &NeighborList) -> Result<()> {
        let n = sys.len();
        if nl.len() != n {
            return Err(Error::ShapeMismatch("neighbour list is stale".into()));
        }
        self.rho_dyn.resize(n, 0.0);
        {
            let rho = &sys.densities;
            let pos = &sys.positions;
            let kinds = &sys.kinds;
            fill_indexed(&mut self.rho_dyn, |i| {
                if kinds[i].is_fluid() {
                    rho[i] - hydrostatic_density(model, pos[i].z)
                } else {
                    0.0
                }
            });
        }
        self.out.resize(n, (0.0, Vec3::ZERO));
        let rho_dyn = &self.rho_dyn;
        fill_indexed(&mut self.out, |i| match sys.kinds[i] {
            ParticleKind::Fluid => fluid_rates(model, sys, nl, rho_dyn, i),
            ParticleKind::Body(_) => (0.0, body_force(model, sys, nl, i)),
            _ => (0.0, Vec3::ZERO),
        });
        self.drho.resize(n, 0.0);
        self.acc.resize(n, Vec3::ZERO);
        for (i, &(d, a)) in self.out.iter().enumerate() {
            if !d.is_finite() {
                return Err(Error::NonFinite { what: "density rate", index: i });
            }
            if !a.is_finite() {
                return Err(Error::NonFinite { what: "acceleration", index: i });
            }
            self.drho[i] = d;
            self.acc[i] = a;
        }
        Ok(())
    }
}

#[inline]
fn fluid_rates(
    model: &FluidModel,
    sys: &ParticleSystem,
    nl: &NeighborList,
    rho_dyn: &[f64],
    i: usize,
) -> (f64, Vec3) {
    let k = &model.kernel;
    let cf = model.eos.cf;
    let pos = &sys.positions;
    let vel = &sys.velocities;
    let rho = &sys.densities;
    let p = &sys.pressures;
    let m = sys.masses();
    let (ri, ui, rhoi, pi) = (pos[i], vel[i], rho[i], p[i]);

    let mut closing = 0.0;
    let mut diff = 0.0;
    let mut acc = Vec3::ZERO;
    for &j in nl.of(i) {
        let j = j as usize;
        let rij = ri - pos[j];
        let r2 = rij.norm2();
        if r2 == 0.0 {
            continue;
        }
        let r = sqrt(r2);
        let f = k.grad_factor(r);
        let grad = rij * f;
        let rhoj = rho[j];
        let vj = m[j] / rhoj;
        let uj = vel[j];
        closing += (ui - uj).dot(grad) * vj;
        if sys.kinds[j].is_fluid() {
            // psi_ij . gradW = 2 (rho_j - rho_i) (r_j - r_i) . (F r_ij) / r² = -2 (rho_j - rho_i) F
            diff += -2.0 * (rho_dyn[j] - rho_dyn[i]) * f * vj;
        }
        let e = rij / r;
        let pstar = riemann_interface_pressure(p[j], pi, rhoj, rhoi, uj.dot(e), ui.dot(e), cf, model.eta_lim);
        acc += grad * (-2.0 * m[j] * pstar / (rhoi * rhoj));
    }
    // gradient taken with respect to r_i, so closing pairs give closing > 0
    let drho = rhoi * closing + model.delta_dd * k.h * cf * diff;
    (drho, acc + model.gravity)
}

/// Fluid force per unit mass on a body particle (pair terms with fluid only).
#[inline]
fn body_force(model: &FluidModel, sys: &ParticleSystem, nl: &NeighborList, b: usize) -> Vec3 {
    let k = &model.kernel;
    let pos = &sys.positions;
    let vel = &sys.velocities;
    let rho = &sys.densities;
    let p = &sys.pressures;
    let m = sys.masses();
    let (rb, ub, rhob, pb) = (pos[b], vel[b], rho[b], p[b]);
    let mut acc = Vec3::ZERO;
    for &j in nl.of(b) {
        let j = j as usize;
        if !sys.kinds[j].is_fluid() {
            continue;
        }
        let rbj = rb - pos[j];
        let r2 = rbj.norm2();
        if r2 == 0.0 {
            continue;
        }
        let r = sqrt(r2);
        let grad = rbj * k.grad_factor(r);
        let e = rbj / r;
        let pstar =
            riemann_interface_pressure(p[j], pb, rho[j], rhob, vel[j].dot(e), ub.dot(e), model.eos.cf, model.eta_lim);
        acc += grad * (-2.0 * m[j] * pstar / (rhob * rho[j]));
    }
    acc
}

/// Density rate `Dρ/Dt` for every particle (zero on boundaries).
pub fn continuity_rate(sys: &ParticleSystem, nl: &NeighborList, model: &FluidModel) -> Result<Vec<f64>> {
    let mut b = RateBuffers::default();
    b.compute(model, sys, nl)?;
    Ok(b.drho)
}

/// Acceleration `Du/Dt` of every fluid particle; body particles carry the
/// fluid force per unit mass, walls and piston zero.
pub fn momentum_rate(sys: &ParticleSystem, nl: &NeighborList, model: &FluidModel) -> Result<Vec<Vec3>> {
    let mut b = RateBuffers::default();
    b.compute(model, sys, nl)?;
    Ok(b.acc)
}
