use crate::math::powf;
use crate::sph::ParticleSystem;
use crate::{Error, Result};

/// Passive absorption zone: fluid velocities are relaxed towards zero with a
/// strength growing as `((x - x_start)/(x_end - x_start))^ramp`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DampingZoneSpec {
    pub x_start: f64,
    pub x_end: f64,
    pub ramp: f64,
    /// Relaxation rate at the zone end (1/s).
    pub beta: f64,
}

impl DampingZoneSpec {
    pub fn new(x_start: f64, x_end: f64) -> Result<Self> {
        let z = DampingZoneSpec { x_start, x_end, ramp: 2.0, beta: 10.0 };
        z.validate()?;
        Ok(z)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x_start < self.x_end) || !(self.ramp > 0.0) || !(self.beta >= 0.0) {
            return Err(Error::invalid("damping zone needs x_start < x_end, ramp > 0, beta >= 0"));
        }
        Ok(())
    }

    /// Velocity multiplier in `[0, 1]` for a particle at `x` over a step `dt`.
    pub fn factor(&self, x: f64, dt: f64) -> f64 {
        if x < self.x_start || x > self.x_end {
            return 1.0;
        }
        let s = (x - self.x_start) / (self.x_end - self.x_start);
        (1.0 - self.beta * dt * powf(s, self.ramp)).clamp(0.0, 1.0)
    }
}

pub fn apply_damping_zone(sys: &mut ParticleSystem, zone: &DampingZoneSpec, dt: f64) {
    for i in 0..sys.len() {
        if !sys.kinds[i].is_fluid() {
            continue;
        }
        let f = zone.factor(sys.positions[i].x, dt);
        if f != 1.0 {
            sys.velocities[i] = sys.velocities[i] * f;
        }
    }
}
