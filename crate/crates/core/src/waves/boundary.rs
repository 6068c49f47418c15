use alloc::vec::Vec;

use crate::math::{sqrt, Vec3};
use crate::sph::{fill_indexed, EosSpec, KernelSpec, NeighborList, ParticleSystem};

/// Sets pressure and density of every boundary particle by Shepard
/// interpolation from its fluid neighbours, including the hydrostatic and
/// boundary-acceleration correction
/// `p_i = [Σ p_j W_ij + (g - a_i) · Σ ρ_j r_ij W_ij] / Σ W_ij`.
///
/// `accel(i)` returns the prescribed acceleration of boundary particle `i`.
/// Boundary particles without fluid neighbours get `p = 0`, `ρ = ρ0`.
pub fn boundary_pressure_update<F>(
    sys: &mut ParticleSystem,
    nl: &NeighborList,
    kernel: &KernelSpec,
    eos: &EosSpec,
    gravity: Vec3,
    accel: F,
) where
    F: Fn(usize) -> Vec3 + Sync + Send,
{
    let mut out: Vec<Option<(f64, f64)>> = alloc::vec![None; sys.len()];
    {
        let s = &*sys;
        fill_indexed(&mut out, |i| {
            if s.kinds[i].is_fluid() {
                return None;
            }
            let ri = s.positions[i];
            let mut sw = 0.0;
            let mut spw = 0.0;
            let mut srw = Vec3::ZERO;
            for &j in nl.of(i) {
                let j = j as usize;
                if !s.kinds[j].is_fluid() {
                    continue;
                }
                let rij = ri - s.positions[j];
                let w = kernel.w(sqrt(rij.norm2()));
                sw += w;
                spw += s.pressures[j] * w;
                srw += rij * (s.densities[j] * w);
            }
            if sw == 0.0 {
                return Some((0.0, eos.rho0));
            }
            let p = (spw + (gravity - accel(i)).dot(srw)) / sw;
            Some((p, eos.density(p)))
        });
    }
    for (i, o) in out.into_iter().enumerate() {
        if let Some((p, rho)) = o {
            sys.pressures[i] = p;
            sys.densities[i] = rho;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sph::{Dim, ParticleKind};

    #[test]
    fn no_fluid_neighbours_falls_back_to_reference() {
        let k = KernelSpec::new(0.02, Dim::Two).unwrap();
        let eos = EosSpec::water(30.0);
        let mut s = ParticleSystem::new(Dim::Two);
        s.push(ParticleKind::Wall, Vec3::ZERO, Vec3::ZERO, 1234.0, 0.4);
        s.pressures[0] = 77.0;
        let nl = NeighborList::build(&s, &k).unwrap();
        boundary_pressure_update(&mut s, &nl, &k, &eos, Vec3::xz(0.0, -9.81), |_| Vec3::ZERO);
        assert_eq!((s.pressures[0], s.densities[0]), (0.0, 1000.0));
    }

    #[test]
    fn shepard_reproduces_constant_pressure() {
        let k = KernelSpec::new(0.02, Dim::Two).unwrap();
        let eos = EosSpec::water(30.0);
        let mut s = ParticleSystem::new(Dim::Two);
        let pbar = 2500.0;
        let rho = eos.density(pbar);
        // symmetric neighbourhood about the wall particle at the origin
        for i in -4..=4 {
            for j in 1..=4 {
                let idx = s.push(ParticleKind::Fluid, Vec3::xz(i as f64 * 0.02, j as f64 * 0.02), Vec3::ZERO, rho, 0.4);
                s.pressures[idx] = pbar;
            }
        }
        let w = s.push(ParticleKind::Wall, Vec3::ZERO, Vec3::ZERO, 1000.0, 0.4);
        let nl = NeighborList::build(&s, &k).unwrap();
        // zero gravity: only the Shepard average remains
        boundary_pressure_update(&mut s, &nl, &k, &eos, Vec3::ZERO, |_| Vec3::ZERO);
        assert!((s.pressures[w] - pbar).abs() <= 1e-6 * pbar);
        assert!((s.densities[w] - rho).abs() < 1e-9);
    }

    #[test]
    fn accelerating_wall_behaves_like_extra_gravity() {
        let k = KernelSpec::new(0.02, Dim::Two).unwrap();
        let eos = EosSpec::water(30.0);
        let mut s = ParticleSystem::new(Dim::Two);
        for i in -4..=4 {
            for j in 1..=4 {
                s.push(ParticleKind::Fluid, Vec3::xz(i as f64 * 0.02, j as f64 * 0.02), Vec3::ZERO, 1000.0, 0.4);
            }
        }
        let w = s.push(ParticleKind::Piston, Vec3::ZERO, Vec3::ZERO, 1000.0, 0.4);
        let nl = NeighborList::build(&s, &k).unwrap();
        boundary_pressure_update(&mut s, &nl, &k, &eos, Vec3::xz(0.0, -9.81), |_| Vec3::ZERO);
        let p_static = s.pressures[w];
        boundary_pressure_update(&mut s, &nl, &k, &eos, Vec3::xz(0.0, -9.81), |_| Vec3::xz(0.0, 9.81));
        assert!((s.pressures[w] - 2.0 * p_static).abs() < 1e-9 * p_static);
        assert!(p_static > 0.0);
    }
}
