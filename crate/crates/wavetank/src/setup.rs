//! Turns a [`RunConfig`] into a ready-to-run tank.

use wavetank_core::body::Dof;
use wavetank_core::integrate::{BodyShape, BodySpec, SimParams, SimulationState, TankSpec};
use wavetank_core::math::Vec3;
use wavetank_core::sph::{Dim, EosSpec, FluidModel, KernelSpec};
use wavetank_core::waves::{
    jonswap_components, solve_dispersion, DampingZoneSpec, GaugeSpec, JonswapDesign, WaveMaker, WaveMakerSpec,
};
use wavetank_core::GRAVITY;

use crate::config::{DofName, RunConfig, ShapeName, WaveKind};
use crate::Result;

/// A built tank plus the gauges that go with it.
#[derive(Debug, Clone)]
pub struct Tank {
    pub state: SimulationState,
    pub spec: TankSpec,
    /// Four gauges per absorber, upstream first.
    pub body_gauges: Vec<[GaugeSpec; 4]>,
    /// Free-standing gauges from `outputs.gauges`.
    pub gauges: Vec<GaugeSpec>,
    pub jonswap: Option<JonswapDesign>,
}

pub fn fluid_model(cfg: &RunConfig) -> Result<FluidModel> {
    let t = &cfg.tank;
    let dim = Dim::from_u32(t.dim)?;
    let cf = t.sound_speed.unwrap_or_else(|| wavetank_core::integrate::default_sound_speed(t.depth));
    let mut m = FluidModel::new(KernelSpec::new(t.dp, dim)?, EosSpec::water(cf), Vec3::new(0.0, 0.0, -GRAVITY));
    m.delta_dd = t.density_diffusion;
    m.reference_level = t.depth;
    Ok(m)
}

pub fn wavemaker_spec(cfg: &RunConfig) -> Result<(Option<WaveMakerSpec>, Option<JonswapDesign>)> {
    let w = &cfg.waves;
    let d = cfg.tank.depth;
    Ok(match w.kind {
        WaveKind::None => (None, None),
        WaveKind::Regular => (Some(WaveMakerSpec::regular(w.height, w.period, w.phase, d)?), None),
        WaveKind::Irregular => {
            let fp = 1.0 / w.tp;
            let design =
                jonswap_components(w.hs, w.tp, w.gamma, w.components, w.f_min_ratio * fp, w.f_max_ratio * fp, d, w.seed)?;
            (Some(WaveMakerSpec::irregular(design.components.clone(), d, w.tp)?), Some(design))
        }
    })
}

/// Upper bound on the piston excursion.
fn half_stroke(spec: &WaveMakerSpec) -> f64 {
    match spec {
        WaveMakerSpec::Regular { stroke, .. } => 0.5 * stroke,
        WaveMakerSpec::Irregular { components, .. } => components.iter().map(|c| 0.5 * c.stroke).sum(),
    }
}

pub fn tank_spec(cfg: &RunConfig, model: &FluidModel, wave: Option<&WaveMakerSpec>) -> Result<TankSpec> {
    let t = &cfg.tank;
    let dim = Dim::from_u32(t.dim)?;
    let mut spec = TankSpec::new(dim, t.dp, t.length, t.depth);
    spec.width = t.width;
    spec.wall_height = t.wall_height.unwrap_or(1.5 * t.depth);
    spec.layers = t.layers;
    spec.piston = wave.is_some();
    spec.piston_travel = wave.map_or(0.0, |w| half_stroke(w) + 2.0 * t.dp);
    let b = &cfg.bodies;
    for k in 0..b.count {
        let mut body = BodySpec {
            shape: match b.shape {
                ShapeName::Cylinder => BodyShape::Cylinder,
                ShapeName::Box => BodyShape::Box,
            },
            x: b.first_x + k as f64 * b.spacing,
            y: 0.5 * t.width,
            diameter: b.diameter,
            height: b.height,
            draft: b.draft,
            mass: 0.0,
            dof: match b.dof {
                DofName::Heave => Dof::HeaveOnly,
                DofName::Free => Dof::Free,
            },
            initial_offset: b.initial_offset,
        };
        body.mass = b.mass.unwrap_or_else(|| body.neutral_mass(dim, model.eos.rho0));
        spec.bodies.push(body);
    }
    spec.validate()?;
    Ok(spec)
}

/// Wavelength at the design period, used for the absorbing zone.
pub fn design_wavelength(cfg: &RunConfig) -> Result<f64> {
    let k = solve_dispersion(cfg.waves.design_period(), cfg.tank.depth)?;
    Ok(2.0 * std::f64::consts::PI / k)
}

/// Builds the tank with every absorber at damping `kp`.
pub fn build_tank(cfg: &RunConfig, kp: f64) -> Result<Tank> {
    let model = fluid_model(cfg)?;
    let (wave, jonswap) = wavemaker_spec(cfg)?;
    let spec = tank_spec(cfg, &model, wave.as_ref())?;
    let (sys, mut bodies) = spec.build(&model)?;
    for b in &mut bodies {
        b.kp = kp;
    }
    let mut params = SimParams::new(model);
    params.cfl = cfg.tank.cfl;
    params.fixed_dt = cfg.tank.fixed_dt;
    if cfg.tank.damping {
        let len = match cfg.tank.damping_length {
            Some(l) => l,
            None => design_wavelength(cfg)?.min(0.5 * cfg.tank.length),
        };
        params.damping = Some(DampingZoneSpec::new(cfg.tank.length - len, cfg.tank.length)?);
    }
    let y = 0.5 * cfg.tank.width;
    let body_gauges = (0..spec.bodies.len())
        .map(|k| {
            let (xl, xr) = spec.body_extent(k).expect("body index in range");
            GaugeSpec::around_body(xl, xr, y, cfg.bodies.gauge_spacing)
        })
        .collect();
    let gauges = cfg.outputs.gauges.iter().map(|&x| GaugeSpec { x, y }).collect();
    let state = SimulationState::new(sys, bodies, wave.map(WaveMaker::new), params, cfg.seed)?;
    Ok(Tank { state, spec, body_gauges, gauges, jonswap })
}
