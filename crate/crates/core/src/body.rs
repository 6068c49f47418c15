//! Floating point absorbers: fluid force aggregation, heave dynamics with a
//! linear PTO damper, and absorbed-power bookkeeping.

use alloc::vec::Vec;

use crate::codec::{Reader, Writer};
use crate::math::{Mat3, Vec3};
use crate::sph::{ParticleKind, ParticleSystem};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dof {
    /// Vertical translation only; the body never moves sideways or rotates.
    HeaveOnly,
    /// Full rigid-body motion (translation plus rotation).
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Stage {
    centre: Vec3,
    velocity: Vec3,
    omega: Vec3,
    orientation: Mat3,
    accel: Vec3,
    ang_accel: Vec3,
}

/// Rigid floating body made of boundary particles.
#[derive(Debug, Clone, PartialEq)]
pub struct RigidBody {
    pub id: u16,
    pub mass: f64,
    /// Body-frame inertia tensor about the centre of mass.
    pub inertia: Mat3,
    pub centre: Vec3,
    pub velocity: Vec3,
    pub omega: Vec3,
    pub orientation: Mat3,
    /// Initial heave position of the centre of mass.
    pub z0: f64,
    /// Heave velocity at the previous step.
    pub v_prev: f64,
    /// Latest heave acceleration.
    pub a_z: f64,
    /// Current PTO damping coefficient (N·s/m).
    pub kp: f64,
    /// Power absorbed over the last step (W).
    pub power: f64,
    pub dof: Dof,
    /// Absorbed PTO energy since construction (J).
    pub energy: f64,
    pub particles: Vec<u32>,
    /// Body-frame particle offsets from the centre of mass.
    pub offsets: Vec<Vec3>,
    stage: Option<Stage>,
}

impl RigidBody {
    pub fn new(
        id: u16,
        mass: f64,
        inertia: Mat3,
        centre: Vec3,
        dof: Dof,
        sys: &ParticleSystem,
    ) -> Result<Self> {
        if !(mass > 0.0) {
            return Err(Error::invalid("body mass must be positive"));
        }
        let particles: Vec<u32> = (0..sys.len())
            .filter(|&i| sys.kinds[i] == ParticleKind::Body(id))
            .map(|i| i as u32)
            .collect();
        if particles.is_empty() {
            return Err(Error::UnknownBody(id as usize));
        }
        let offsets = particles.iter().map(|&i| sys.positions[i as usize] - centre).collect();
        Ok(RigidBody {
            id,
            mass,
            inertia,
            centre,
            velocity: Vec3::ZERO,
            omega: Vec3::ZERO,
            orientation: Mat3::IDENTITY,
            z0: centre.z,
            v_prev: 0.0,
            a_z: 0.0,
            kp: 0.0,
            power: 0.0,
            dof,
            energy: 0.0,
            particles,
            offsets,
            stage: None,
        })
    }

    /// Heave displacement from the initial position.
    pub fn heave(&self) -> f64 {
        self.centre.z - self.z0
    }

    pub fn heave_velocity(&self) -> f64 {
        self.velocity.z
    }

    /// Current PTO force (vertical).
    pub fn pto_force(&self) -> f64 {
        pto_force(self.kp, self.velocity.z)
    }

    fn constrain(&self, v: Vec3) -> Vec3 {
        match self.dof {
            Dof::HeaveOnly => Vec3::new(0.0, 0.0, v.z),
            Dof::Free => v,
        }
    }

    fn accelerations(&self, force: Vec3, torque: Vec3, gravity: Vec3, velocity: Vec3, omega: Vec3) -> (Vec3, Vec3) {
        let pto = Vec3::new(0.0, 0.0, pto_force(self.kp, velocity.z));
        let lin = self.constrain((force + pto) / self.mass + gravity);
        let ang = match self.dof {
            Dof::HeaveOnly => Vec3::ZERO,
            Dof::Free => {
                let r = &self.orientation;
                let i_world = r.mul(&self.inertia).mul(&r.transpose());
                let inv = i_world.inverse().unwrap_or(Mat3::diag(0.0, 0.0, 0.0));
                inv.mul_vec(torque - omega.cross(i_world.mul_vec(omega)))
            }
        };
        (lin, ang)
    }

    /// First half of the symplectic step: moves the body to `t + dt/2` using
    /// the forces evaluated at `t`.
    pub fn predictor(&mut self, force: Vec3, torque: Vec3, gravity: Vec3, dt: f64) {
        let (acc, ang) = self.accelerations(force, torque, gravity, self.velocity, self.omega);
        let s = Stage {
            centre: self.centre,
            velocity: self.velocity,
            omega: self.omega,
            orientation: self.orientation,
            accel: acc,
            ang_accel: ang,
        };
        self.centre = s.centre + s.velocity * (0.5 * dt);
        self.velocity = s.velocity + acc * (0.5 * dt);
        if self.dof == Dof::Free {
            self.omega = s.omega + ang * (0.5 * dt);
            self.orientation = Mat3::rotation(s.omega * (0.5 * dt)).mul(&s.orientation);
        }
        self.stage = Some(s);
    }

    /// Second half: completes the step from `t` to `t + dt` with the forces
    /// evaluated at the half step. Updates `a_z`, `v_prev` and the energy.
    pub fn corrector(&mut self, force: Vec3, torque: Vec3, gravity: Vec3, dt: f64) {
        let s = self.stage.take().expect("corrector called without predictor");
        let (acc, ang) = self.accelerations(force, torque, gravity, self.velocity, self.omega);
        let v_new = s.velocity + acc * dt;
        self.centre = s.centre + (v_new + s.velocity) * (0.5 * dt);
        if self.dof == Dof::Free {
            let w_new = s.omega + ang * dt;
            self.orientation = Mat3::rotation((w_new + s.omega) * (0.5 * dt)).mul(&s.orientation);
            self.omega = w_new;
        }
        let p = instantaneous_power(self.kp, v_new.z, s.velocity.z);
        self.power = p;
        self.energy += p * dt;
        self.velocity = v_new;
        self.v_prev = s.velocity.z;
        self.a_z = acc.z;
    }

    /// Writes the rigid-body pose into the body's particles.
    pub fn place_particles(&self, sys: &mut ParticleSystem) {
        for (&i, &off) in self.particles.iter().zip(&self.offsets) {
            let r = self.orientation.mul_vec(off);
            sys.positions[i as usize] = self.centre + r;
            sys.velocities[i as usize] = self.velocity + self.omega.cross(r);
        }
    }

    /// Linear acceleration used by the boundary pressure correction.
    pub fn acceleration(&self) -> Vec3 {
        match self.stage {
            Some(s) => s.accel,
            None => Vec3::new(0.0, 0.0, self.a_z),
        }
    }
}

fn put_vec(w: &mut Writer, name: &str, v: Vec3) {
    w.f64s(name, &[v.x, v.y, v.z]);
}

fn get_vec(r: &mut Reader<'_>, name: &str) -> Result<Vec3> {
    let v = r.f64s(name)?;
    if v.len() != 3 {
        return Err(Error::Decode(alloc::format!("`{name}` is not a 3-vector")));
    }
    Ok(Vec3::new(v[0], v[1], v[2]))
}

fn put_mat(w: &mut Writer, name: &str, m: &Mat3) {
    let a: Vec<f64> = m.0.iter().flatten().copied().collect();
    w.f64s(name, &a);
}

fn get_mat(r: &mut Reader<'_>, name: &str) -> Result<Mat3> {
    let v = r.f64s(name)?;
    if v.len() != 9 {
        return Err(Error::Decode(alloc::format!("`{name}` is not a 3x3 matrix")));
    }
    Ok(Mat3([[v[0], v[1], v[2]], [v[3], v[4], v[5]], [v[6], v[7], v[8]]]))
}

impl RigidBody {
    pub(crate) fn encode(&self, w: &mut Writer) {
        w.u32("body.id", self.id as u32).f64("body.mass", self.mass);
        put_mat(w, "body.inertia", &self.inertia);
        put_vec(w, "body.centre", self.centre);
        put_vec(w, "body.velocity", self.velocity);
        put_vec(w, "body.omega", self.omega);
        put_mat(w, "body.orientation", &self.orientation);
        w.f64("body.z0", self.z0)
            .f64("body.v_prev", self.v_prev)
            .f64("body.a_z", self.a_z)
            .f64("body.kp", self.kp)
            .f64("body.power", self.power)
            .u32("body.dof", matches!(self.dof, Dof::Free) as u32)
            .f64("body.energy", self.energy)
            .u32s("body.particles", &self.particles);
        let off: Vec<f64> = self.offsets.iter().flat_map(|o| [o.x, o.y, o.z]).collect();
        w.f64s("body.offsets", &off);
    }

    pub(crate) fn decode(r: &mut Reader<'_>) -> Result<Self> {
        let id = r.u32("body.id")? as u16;
        let mass = r.f64("body.mass")?;
        let inertia = get_mat(r, "body.inertia")?;
        let centre = get_vec(r, "body.centre")?;
        let velocity = get_vec(r, "body.velocity")?;
        let omega = get_vec(r, "body.omega")?;
        let orientation = get_mat(r, "body.orientation")?;
        let z0 = r.f64("body.z0")?;
        let v_prev = r.f64("body.v_prev")?;
        let a_z = r.f64("body.a_z")?;
        let kp = r.f64("body.kp")?;
        let power = r.f64("body.power")?;
        let dof = if r.u32("body.dof")? == 1 { Dof::Free } else { Dof::HeaveOnly };
        let energy = r.f64("body.energy")?;
        let particles = r.u32s("body.particles")?;
        let off = r.f64s("body.offsets")?;
        if off.len() != 3 * particles.len() {
            return Err(Error::Decode("body offsets do not match particle count".into()));
        }
        let offsets = off.chunks(3).map(|c| Vec3::new(c[0], c[1], c[2])).collect();
        Ok(RigidBody {
            id,
            mass,
            inertia,
            centre,
            velocity,
            omega,
            orientation,
            z0,
            v_prev,
            a_z,
            kp,
            power,
            dof,
            energy,
            particles,
            offsets,
            stage: None,
        })
    }
}

/// Sums the fluid force `Σ m_j f_j` and torque `Σ m_j (r_j - R0) × f_j` on a
/// body, where `fluid_acc[j]` is the fluid force per unit mass on body
/// particle `j`. Gravity is not included.
pub fn accumulate_body_forces(
    sys: &ParticleSystem,
    fluid_acc: &[Vec3],
    bodies: &[RigidBody],
    body_id: usize,
) -> Result<(Vec3, Vec3)> {
    let body = bodies.iter().find(|b| b.id as usize == body_id).ok_or(Error::UnknownBody(body_id))?;
    let m = sys.masses();
    let mut f = Vec3::ZERO;
    let mut t = Vec3::ZERO;
    for &j in &body.particles {
        let j = j as usize;
        let fj = fluid_acc[j] * m[j];
        f += fj;
        t += (sys.positions[j] - body.centre).cross(fj);
    }
    Ok((f, t))
}

/// Linear PTO damping force `-kp v` (vertical).
#[inline]
pub fn pto_force(kp: f64, v: f64) -> f64 {
    -kp * v
}

/// Power absorbed over a step, `kp ((v_n + v_prev)/2)²`.
#[inline]
pub fn instantaneous_power(kp: f64, v_n: f64, v_prev: f64) -> f64 {
    let v = 0.5 * (v_n + v_prev);
    kp * v * v
}

/// Advances a body by one step with the fluid force held fixed over the step.
pub fn advance_body(body: &mut RigidBody, force: Vec3, torque: Vec3, gravity: Vec3, dt: f64) {
    body.predictor(force, torque, gravity, dt);
    body.corrector(force, torque, gravity, dt);
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerRecord {
    pub t: f64,
    pub kp: f64,
    pub v_z: f64,
    pub power: f64,
}

/// Per-step power log of one body and its accumulated energy.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PowerSeries {
    pub records: Vec<PowerRecord>,
    pub energy: f64,
}

impl PowerSeries {
    /// Appends a record; `dt` is the step that produced it.
    pub fn push(&mut self, t: f64, kp: f64, v_z: f64, power: f64, dt: f64) {
        self.records.push(PowerRecord { t, kp, v_z, power });
        self.energy += power * dt;
    }
}

/// Time average of `P` over `[t0, t0 + window]` by the trapezoidal rule,
/// interpolating linearly at the window edges.
pub fn average_power(series: &PowerSeries, t0: f64, window: f64) -> Result<f64> {
    let r = &series.records;
    let t1 = t0 + window;
    if !(window > 0.0) || r.len() < 2 || r[0].t > t0 + 1e-12 || r[r.len() - 1].t < t1 - 1e-12 {
        return Err(Error::WindowNotCovered { start: t0, end: t1 });
    }
    let mut integral = 0.0;
    for w in r.windows(2) {
        let (a, b) = (w[0], w[1]);
        let lo = a.t.max(t0);
        let hi = b.t.min(t1);
        if hi <= lo || b.t == a.t {
            continue;
        }
        let at = |t: f64| a.power + (b.power - a.power) * (t - a.t) / (b.t - a.t);
        integral += 0.5 * (at(lo) + at(hi)) * (hi - lo);
    }
    Ok(integral / window)
}
