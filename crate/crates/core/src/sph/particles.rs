use alloc::vec::Vec;

use crate::math::Vec3;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dim {
    Two,
    Three,
}

impl Dim {
    pub fn from_u32(d: u32) -> Result<Dim> {
        match d {
            2 => Ok(Dim::Two),
            3 => Ok(Dim::Three),
            _ => Err(Error::invalid(alloc::format!("dimension must be 2 or 3, got {d}"))),
        }
    }

    pub fn as_u32(self) -> u32 {
        match self {
            Dim::Two => 2,
            Dim::Three => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParticleKind {
    Fluid,
    Wall,
    Piston,
    Body(u16),
}

impl ParticleKind {
    #[inline]
    pub fn is_fluid(self) -> bool {
        matches!(self, ParticleKind::Fluid)
    }

    #[inline]
    pub fn is_boundary(self) -> bool {
        !self.is_fluid()
    }

    pub(crate) fn code(self) -> u32 {
        match self {
            ParticleKind::Fluid => 0,
            ParticleKind::Wall => 1,
            ParticleKind::Piston => 2,
            ParticleKind::Body(id) => 3 + id as u32,
        }
    }

    pub(crate) fn from_code(c: u32) -> Result<Self> {
        Ok(match c {
            0 => ParticleKind::Fluid,
            1 => ParticleKind::Wall,
            2 => ParticleKind::Piston,
            c if c - 3 <= u16::MAX as u32 => ParticleKind::Body((c - 3) as u16),
            _ => return Err(Error::Decode(alloc::format!("bad particle kind code {c}"))),
        })
    }
}

/// Structure-of-arrays particle storage.
///
/// Masses are fixed at construction: there is no public way to change them,
/// which makes total mass conservation exact.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleSystem {
    pub dim: Dim,
    pub positions: Vec<Vec3>,
    pub velocities: Vec<Vec3>,
    pub densities: Vec<f64>,
    pub pressures: Vec<f64>,
    masses: Vec<f64>,
    pub kinds: Vec<ParticleKind>,
}

impl ParticleSystem {
    pub fn new(dim: Dim) -> Self {
        ParticleSystem {
            dim,
            positions: Vec::new(),
            velocities: Vec::new(),
            densities: Vec::new(),
            pressures: Vec::new(),
            masses: Vec::new(),
            kinds: Vec::new(),
        }
    }

    /// Appends a particle; returns its index.
    pub fn push(&mut self, kind: ParticleKind, pos: Vec3, vel: Vec3, rho: f64, mass: f64) -> usize {
        self.positions.push(pos);
        self.velocities.push(vel);
        self.densities.push(rho);
        self.pressures.push(0.0);
        self.masses.push(mass);
        self.kinds.push(kind);
        self.positions.len() - 1
    }

    pub(crate) fn from_parts(
        dim: Dim,
        positions: Vec<Vec3>,
        velocities: Vec<Vec3>,
        densities: Vec<f64>,
        pressures: Vec<f64>,
        masses: Vec<f64>,
        kinds: Vec<ParticleKind>,
    ) -> Result<Self> {
        let n = positions.len();
        if [velocities.len(), densities.len(), pressures.len(), masses.len(), kinds.len()]
            .iter()
            .any(|&l| l != n)
        {
            return Err(Error::ShapeMismatch("particle arrays differ in length".into()));
        }
        Ok(ParticleSystem { dim, positions, velocities, densities, pressures, masses, kinds })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    #[inline]
    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    pub fn fluid_count(&self) -> usize {
        self.kinds.iter().filter(|k| k.is_fluid()).count()
    }

    pub fn indices_of(&self, kind: ParticleKind) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.kinds[i] == kind).collect()
    }

    /// Total linear momentum of the fluid particles.
    pub fn fluid_momentum(&self) -> Vec3 {
        let mut m = Vec3::ZERO;
        for i in 0..self.len() {
            if self.kinds[i].is_fluid() {
                m += self.velocities[i] * self.masses[i];
            }
        }
        m
    }
}
