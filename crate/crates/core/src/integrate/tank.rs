use alloc::vec::Vec;

use crate::body::{Dof, RigidBody};
use crate::math::{powi, Mat3, Vec3};
use crate::sph::{hydrostatic_density, Dim, FluidModel, ParticleKind, ParticleSystem};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BodyShape {
    /// Rectangular block; in 3-D its width along `y` equals `diameter`.
    Box,
    /// Vertical-axis cylinder. In 2-D it is a rectangle of the same width.
    Cylinder,
}

/// Geometry and dynamics of one floating body.
#[derive(Debug, Clone, PartialEq)]
pub struct BodySpec {
    pub shape: BodyShape,
    /// Centre abscissa (m).
    pub x: f64,
    /// Centre ordinate across the tank (3-D only).
    pub y: f64,
    pub diameter: f64,
    pub height: f64,
    /// Submerged depth at rest (m).
    pub draft: f64,
    /// Mass (kg, or kg/m in 2-D).
    pub mass: f64,
    pub dof: Dof,
    /// Initial heave displacement from the resting position (decay tests).
    pub initial_offset: f64,
}

impl BodySpec {
    /// Mass that floats the body at its draft in fresh water of density `rho0`.
    pub fn neutral_mass(&self, dim: Dim, rho0: f64) -> f64 {
        match (dim, self.shape) {
            (Dim::Two, _) => rho0 * self.diameter * self.draft,
            (Dim::Three, BodyShape::Box) => rho0 * self.diameter * self.diameter * self.draft,
            (Dim::Three, BodyShape::Cylinder) => {
                rho0 * core::f64::consts::PI * 0.25 * self.diameter * self.diameter * self.draft
            }
        }
    }

    fn inertia(&self, dim: Dim) -> Mat3 {
        let m = self.mass;
        let (d, h) = (self.diameter, self.height);
        match (dim, self.shape) {
            (Dim::Three, BodyShape::Cylinder) => {
                let r2 = 0.25 * d * d;
                let ixx = m * (3.0 * r2 + h * h) / 12.0;
                Mat3::diag(ixx, ixx, 0.5 * m * r2)
            }
            _ => Mat3::diag(m * (d * d + h * h) / 12.0, m * (d * d + h * h) / 12.0, m * d * d / 6.0),
        }
    }
}

/// Rectangular tank with a piston wavemaker at `x = 0`, a vertical wall at
/// `x = length` and dummy-particle layers below and around.
#[derive(Debug, Clone, PartialEq)]
pub struct TankSpec {
    pub dim: Dim,
    pub dp: f64,
    pub length: f64,
    /// Tank width (3-D only).
    pub width: f64,
    pub depth: f64,
    pub wall_height: f64,
    pub layers: usize,
    /// Extra bottom length behind the piston so it never runs off the floor.
    pub piston_travel: f64,
    /// Whether the left wall is a moving piston (otherwise a fixed wall).
    pub piston: bool,
    pub bodies: Vec<BodySpec>,
}

impl TankSpec {
    pub fn new(dim: Dim, dp: f64, length: f64, depth: f64) -> Self {
        TankSpec {
            dim,
            dp,
            length,
            width: 1.0,
            depth,
            wall_height: depth * 1.5,
            layers: 4,
            piston_travel: 0.0,
            piston: true,
            bodies: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64, what: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(alloc::format!("{what} must be positive")))
            }
        };
        pos(self.dp, "tank.dp")?;
        pos(self.length, "tank.length")?;
        pos(self.depth, "tank.depth")?;
        // the lattice fills whole layers, so any remainder would shift the still level
        let layers = self.depth / self.dp;
        if (layers - libm::round(layers)).abs() > 1e-6 * layers.max(1.0) {
            return Err(Error::invalid("tank.depth must be a whole number of particle spacings"));
        }
        if self.dim == Dim::Three {
            pos(self.width, "tank.width")?;
        }
        if self.wall_height < self.depth {
            return Err(Error::invalid("tank.wall_height must not be below the water depth"));
        }
        if self.layers == 0 || !(self.piston_travel >= 0.0) {
            return Err(Error::invalid("tank.layers must be >= 1 and piston travel >= 0"));
        }
        for b in &self.bodies {
            pos(b.diameter, "body.diameter")?;
            pos(b.height, "body.height")?;
            pos(b.mass, "body.mass")?;
            if !(b.draft > 0.0 && b.draft < b.height && b.draft < self.depth) {
                return Err(Error::invalid("body.draft must lie in (0, min(height, depth))"));
            }
            if b.x - 0.5 * b.diameter <= 0.0 || b.x + 0.5 * b.diameter >= self.length {
                return Err(Error::invalid("body must lie inside the tank"));
            }
        }
        Ok(())
    }

    fn snap(&self, v: f64) -> f64 {
        libm::round(v / self.dp) * self.dp
    }

    fn count(&self, v: f64) -> usize {
        libm::round(v / self.dp).max(0.0) as usize
    }

    /// Cross-section lattice in `y`: a single `y = 0` row in 2-D.
    fn ys(&self, lo: f64, n: usize) -> Vec<f64> {
        match self.dim {
            Dim::Two => alloc::vec![0.0],
            Dim::Three => (0..n).map(|j| lo + (j as f64 + 0.5) * self.dp).collect(),
        }
    }

    /// Builds the particle system and bodies. Fluid starts in hydrostatic
    /// balance with `model.reference_level` as the free surface.
    pub fn build(&self, model: &FluidModel) -> Result<(ParticleSystem, Vec<RigidBody>)> {
        self.validate()?;
        if model.kernel.dim != self.dim || (model.kernel.dp - self.dp).abs() > 1e-12 * self.dp {
            return Err(Error::invalid("fluid model resolution does not match the tank"));
        }
        let dp = self.dp;
        let rho0 = model.eos.rho0;
        let vol = powi(dp, self.dim.as_u32());
        let lay = self.layers as f64 * dp;
        let mut sys = ParticleSystem::new(self.dim);

        // body particles first so fluid removal can test against them
        let mut body_pts: Vec<(u16, Vec<Vec3>, Vec3, f64)> = Vec::new();
        for (k, b) in self.bodies.iter().enumerate() {
            let x_left = self.snap(b.x - 0.5 * b.diameter);
            let nx = self.count(b.diameter).max(1);
            let z_bot = self.snap(self.depth - b.draft);
            let nz = self.count(b.height).max(1);
            let (y_lo, ny) = match self.dim {
                Dim::Two => (0.0, 1),
                Dim::Three => (self.snap(b.y - 0.5 * b.diameter), nx),
            };
            let xc = x_left + 0.5 * nx as f64 * dp;
            let yc = if self.dim == Dim::Three { y_lo + 0.5 * ny as f64 * dp } else { 0.0 };
            let zc = z_bot + 0.5 * nz as f64 * dp;
            let r2 = 0.25 * (nx as f64 * dp) * (nx as f64 * dp);
            let mut pts = Vec::new();
            for i in 0..nx {
                let x = x_left + (i as f64 + 0.5) * dp;
                for y in self.ys(y_lo, ny) {
                    if self.dim == Dim::Three
                        && b.shape == BodyShape::Cylinder
                        && (x - xc) * (x - xc) + (y - yc) * (y - yc) > r2
                    {
                        continue;
                    }
                    for kz in 0..nz {
                        let z = z_bot + (kz as f64 + 0.5) * dp + b.initial_offset;
                        pts.push(Vec3::new(x, y, z));
                    }
                }
            }
            body_pts.push((k as u16, pts, Vec3::new(xc, yc, zc), b.initial_offset));
        }

        // fluid
        let nxf = self.count(self.length);
        let nzf = self.count(self.depth);
        let nyf = self.count(self.width);
        let boxes: Vec<(Vec3, Vec3)> = body_pts
            .iter()
            .map(|(_, pts, _, _)| {
                let (lo, hi) = pts
                    .iter()
                    .fold((Vec3::splat(f64::INFINITY), Vec3::splat(f64::NEG_INFINITY)), |(lo, hi), q| {
                        (lo.min(*q), hi.max(*q))
                    });
                (lo - Vec3::splat(dp), hi + Vec3::splat(dp))
            })
            .collect();
        let too_close = |p: Vec3| {
            body_pts.iter().zip(&boxes).any(|((_, pts, _, _), (lo, hi))| {
                p.x > lo.x
                    && p.x < hi.x
                    && p.y > lo.y
                    && p.y < hi.y
                    && p.z > lo.z
                    && p.z < hi.z
                    && pts.iter().any(|q| (p - *q).norm2() < 0.999 * dp * dp)
            })
        };
        for i in 0..nxf {
            let x = (i as f64 + 0.5) * dp;
            for y in self.ys(0.0, nyf) {
                for k in 0..nzf {
                    let z = (k as f64 + 0.5) * dp;
                    let p = Vec3::new(x, y, z);
                    if too_close(p) {
                        continue;
                    }
                    let rho = hydrostatic_density(model, z);
                    sys.push(ParticleKind::Fluid, p, Vec3::ZERO, rho, rho * vol);
                }
            }
        }

        // walls
        let mb = rho0 * vol;
        let x_min = -lay - self.piston_travel;
        let x_max = self.length + lay;
        let nxw = self.count(x_max - x_min);
        let (y_lo, y_n) = (-lay, self.count(self.width + 2.0 * lay));
        for l in 0..self.layers {
            let z = -(l as f64 + 0.5) * dp;
            for i in 0..nxw {
                let x = x_min + (i as f64 + 0.5) * dp;
                for y in self.ys(y_lo, y_n) {
                    sys.push(ParticleKind::Wall, Vec3::new(x, y, z), Vec3::ZERO, rho0, mb);
                }
            }
        }
        let nzw = self.count(self.wall_height);
        let left = if self.piston { ParticleKind::Piston } else { ParticleKind::Wall };
        for l in 0..self.layers {
            let off = (l as f64 + 0.5) * dp;
            for k in 0..nzw {
                let z = (k as f64 + 0.5) * dp;
                for y in self.ys(0.0, nyf) {
                    sys.push(left, Vec3::new(-off, y, z), Vec3::ZERO, rho0, mb);
                    sys.push(ParticleKind::Wall, Vec3::new(self.length + off, y, z), Vec3::ZERO, rho0, mb);
                }
            }
        }
        if self.dim == Dim::Three {
            for l in 0..self.layers {
                let off = (l as f64 + 0.5) * dp;
                for i in 0..nxw {
                    let x = x_min + (i as f64 + 0.5) * dp;
                    for k in 0..nzw {
                        let z = (k as f64 + 0.5) * dp;
                        sys.push(ParticleKind::Wall, Vec3::new(x, -off, z), Vec3::ZERO, rho0, mb);
                        sys.push(ParticleKind::Wall, Vec3::new(x, self.width + off, z), Vec3::ZERO, rho0, mb);
                    }
                }
            }
        }

        let mut bodies = Vec::new();
        for ((id, pts, c, off), spec) in body_pts.into_iter().zip(&self.bodies) {
            for p in pts {
                sys.push(ParticleKind::Body(id), p, Vec3::ZERO, rho0, mb);
            }
            let centre = c + Vec3::new(0.0, 0.0, off);
            let mut b = RigidBody::new(id, spec.mass, spec.inertia(self.dim), centre, spec.dof, &sys)?;
            b.z0 = c.z;
            bodies.push(b);
        }
        Ok((sys, bodies))
    }

    /// Hull extents `(x_left, x_right)` of body `k` as built.
    pub fn body_extent(&self, k: usize) -> Option<(f64, f64)> {
        let b = self.bodies.get(k)?;
        let x_left = self.snap(b.x - 0.5 * b.diameter);
        Some((x_left, x_left + self.count(b.diameter).max(1) as f64 * self.dp))
    }
}

/// Default numerical sound speed: ten times the shallow-water wave speed.
pub fn default_sound_speed(depth: f64) -> f64 {
    10.0 * crate::math::sqrt(crate::GRAVITY * depth)
}
