use alloc::vec;
use alloc::vec::Vec;

use super::{KernelSpec, ParticleSystem};
use crate::math::{floor, Vec3};
use crate::{Error, Result};

/// Compressed per-particle neighbour lists built from a uniform cell grid
/// with cell size equal to the kernel support radius.
///
/// Each list holds the indices `j != i` with `|r_i - r_j| < 2h`, sorted
/// ascending, so every per-particle reduction visits neighbours in a fixed
/// order.
#[derive(Debug, Clone, Default)]
pub struct NeighborList {
    offsets: Vec<usize>,
    indices: Vec<u32>,
    cell_size: f64,
    // grid scratch, reused between rebuilds
    cell_of: Vec<u32>,
    cell_start: Vec<u32>,
    sorted: Vec<u32>,
}

impl NeighborList {
    pub fn build(system: &ParticleSystem, spec: &KernelSpec) -> Result<Self> {
        let mut nl = NeighborList::default();
        nl.rebuild(&system.positions, spec)?;
        Ok(nl)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.offsets.len().saturating_sub(1)
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    #[inline]
    pub fn of(&self, i: usize) -> &[u32] {
        &self.indices[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn pair_count(&self) -> usize {
        self.indices.len()
    }

    pub fn rebuild(&mut self, positions: &[Vec3], spec: &KernelSpec) -> Result<()> {
        let n = positions.len();
        let cs = spec.support_radius();
        self.cell_size = cs;
        self.offsets.clear();
        self.indices.clear();
        self.offsets.push(0);
        if n == 0 {
            return Ok(());
        }
        let mut lo = positions[0];
        let mut hi = positions[0];
        for (i, p) in positions.iter().enumerate() {
            if !p.is_finite() {
                return Err(Error::NonFinite { what: "position", index: i });
            }
            lo = Vec3::new(lo.x.min(p.x), lo.y.min(p.y), lo.z.min(p.z));
            hi = Vec3::new(hi.x.max(p.x), hi.y.max(p.y), hi.z.max(p.z));
        }
        let dims = [
            (floor((hi.x - lo.x) / cs) as usize) + 1,
            (floor((hi.y - lo.y) / cs) as usize) + 1,
            (floor((hi.z - lo.z) / cs) as usize) + 1,
        ];
        let ncell = dims[0]
            .checked_mul(dims[1])
            .and_then(|v| v.checked_mul(dims[2]))
            .filter(|&v| v < u32::MAX as usize)
            .ok_or_else(|| Error::invalid("particle cloud too large for the cell grid"))?;
        let coord = |p: Vec3| -> [usize; 3] {
            [
                (floor((p.x - lo.x) / cs) as usize).min(dims[0] - 1),
                (floor((p.y - lo.y) / cs) as usize).min(dims[1] - 1),
                (floor((p.z - lo.z) / cs) as usize).min(dims[2] - 1),
            ]
        };
        let flat = |c: [usize; 3]| (c[2] * dims[1] + c[1]) * dims[0] + c[0];

        // counting sort into cells (stable: each cell lists indices ascending)
        self.cell_of.clear();
        self.cell_of.extend(positions.iter().map(|&p| flat(coord(p)) as u32));
        self.cell_start.clear();
        self.cell_start.resize(ncell + 1, 0);
        for &c in &self.cell_of {
            self.cell_start[c as usize + 1] += 1;
        }
        for c in 0..ncell {
            self.cell_start[c + 1] += self.cell_start[c];
        }
        self.sorted.clear();
        self.sorted.resize(n, 0);
        let mut fill = self.cell_start.clone();
        for (i, &c) in self.cell_of.iter().enumerate() {
            let slot = &mut fill[c as usize];
            self.sorted[*slot as usize] = i as u32;
            *slot += 1;
        }

        let r2max = cs * cs;
        let mut buf: Vec<u32> = Vec::with_capacity(128);
        for i in 0..n {
            let pi = positions[i];
            let c = coord(pi);
            buf.clear();
            let range = |k: usize, d: usize| k.saturating_sub(1)..=(k + 1).min(d - 1);
            for cz in range(c[2], dims[2]) {
                for cy in range(c[1], dims[1]) {
                    for cx in range(c[0], dims[0]) {
                        let cell = flat([cx, cy, cz]);
                        let (s, e) = (self.cell_start[cell] as usize, self.cell_start[cell + 1] as usize);
                        for &j in &self.sorted[s..e] {
                            if j as usize != i && (pi - positions[j as usize]).norm2() < r2max {
                                buf.push(j);
                            }
                        }
                    }
                }
            }
            buf.sort_unstable();
            self.indices.extend_from_slice(&buf);
            self.offsets.push(self.indices.len());
        }
        Ok(())
    }

    /// O(N²) reference search, used to check the cell-list builder.
    pub fn brute_force(positions: &[Vec3], spec: &KernelSpec) -> Vec<Vec<u32>> {
        let r2max = spec.support_radius() * spec.support_radius();
        let mut out = vec![Vec::new(); positions.len()];
        for (i, list) in out.iter_mut().enumerate() {
            for (j, pj) in positions.iter().enumerate() {
                if i != j && (positions[i] - *pj).norm2() < r2max {
                    list.push(j as u32);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sph::{Dim, ParticleKind};
    use rand::{Rng, SeedableRng};

    fn system(points: &[Vec3]) -> ParticleSystem {
        let mut s = ParticleSystem::new(Dim::Two);
        for &p in points {
            s.push(ParticleKind::Fluid, p, Vec3::ZERO, 1000.0, 1.0);
        }
        s
    }

    #[test]
    fn pair_inside_and_outside_support() {
        let k = KernelSpec::new(0.01, Dim::Two).unwrap();
        let s = system(&[Vec3::ZERO, Vec3::xz(1.9 * k.h, 0.0)]);
        let nl = NeighborList::build(&s, &k).unwrap();
        assert_eq!(nl.of(0), &[1]);
        assert_eq!(nl.of(1), &[0]);
        let s = system(&[Vec3::ZERO, Vec3::xz(2.1 * k.h, 0.0)]);
        let nl = NeighborList::build(&s, &k).unwrap();
        assert!(nl.of(0).is_empty() && nl.of(1).is_empty());
    }

    #[test]
    fn lattice_matches_brute_force() {
        let k = KernelSpec::new(0.01, Dim::Two).unwrap();
        let mut pts = Vec::new();
        for i in 0..10 {
            for j in 0..10 {
                pts.push(Vec3::xz(i as f64 * k.dp, j as f64 * k.dp));
            }
        }
        let nl = NeighborList::build(&system(&pts), &k).unwrap();
        let bf = NeighborList::brute_force(&pts, &k);
        for i in 0..pts.len() {
            assert_eq!(nl.of(i), bf[i].as_slice(), "particle {i}");
        }
    }

    #[test]
    fn random_3d_cloud_matches_brute_force_and_is_symmetric() {
        let k = KernelSpec::new(0.05, Dim::Three).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let pts: Vec<Vec3> = (0..400)
            .map(|_| Vec3::new(rng.random_range(0.0..1.0), rng.random_range(0.0..0.5), rng.random_range(-0.3..0.3)))
            .collect();
        let mut s = ParticleSystem::new(Dim::Three);
        for &p in &pts {
            s.push(ParticleKind::Fluid, p, Vec3::ZERO, 1000.0, 1.0);
        }
        let nl = NeighborList::build(&s, &k).unwrap();
        let bf = NeighborList::brute_force(&pts, &k);
        for i in 0..pts.len() {
            assert_eq!(nl.of(i), bf[i].as_slice());
            for &j in nl.of(i) {
                assert!(nl.of(j as usize).contains(&(i as u32)));
                assert!((pts[i] - pts[j as usize]).norm() < k.support_radius());
            }
        }
    }

    #[test]
    fn non_finite_position_is_rejected() {
        let k = KernelSpec::new(0.01, Dim::Two).unwrap();
        let s = system(&[Vec3::ZERO, Vec3::xz(f64::INFINITY, 0.0)]);
        assert!(matches!(NeighborList::build(&s, &k), Err(Error::NonFinite { index: 1, .. })));
    }
}
