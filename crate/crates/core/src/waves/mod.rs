//! Wave generation and absorption, wall pressure and free-surface gauges.

mod boundary;
mod damping;
mod dispersion;
mod gauge;
mod wavemaker;

pub use boundary::boundary_pressure_update;
pub use damping::{apply_damping_zone, DampingZoneSpec};
pub use dispersion::{regular_stroke, solve_dispersion, stroke_factor};
pub use gauge::{gauge_elevation, GaugeSpec};
pub use wavemaker::{
    jonswap_components, jonswap_shape, piston_displacement, JonswapDesign, WaveComponent, WaveMaker,
    WaveMakerSpec,
};
