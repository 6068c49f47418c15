use alloc::vec::Vec;

use crate::math::Vec3;
use crate::sph::{wendland_1d, Dim, KernelSpec, ParticleSystem};
use crate::{Error, Result};

/// Gauge location. `y` is ignored in two dimensions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaugeSpec {
    pub x: f64,
    pub y: f64,
}

impl GaugeSpec {
    pub fn at(x: f64) -> Self {
        GaugeSpec { x, y: 0.0 }
    }

    /// Two gauges upstream and two downstream of a body spanning
    /// `[x_left, x_right]`: the nearest at `spacing / 2` from the hull, the
    /// next one `spacing` further out.
    pub fn around_body(x_left: f64, x_right: f64, y: f64, spacing: f64) -> [GaugeSpec; 4] {
        let h = 0.5 * spacing;
        [
            GaugeSpec { x: x_left - h - spacing, y },
            GaugeSpec { x: x_left - h, y },
            GaugeSpec { x: x_right + h, y },
            GaugeSpec { x: x_right + h + spacing, y },
        ]
    }
}

/// Free-surface elevation above `still_level` at a gauge.
///
/// Fluid particles inside a strip of half-width `dp` around the gauge are
/// weighted by a hat function in the horizontal (a partition of unity on the
/// initial lattice) and smoothed vertically with a 1-D Wendland kernel of
/// length `h`. This gives a fluid indicator that is 1 in the bulk and 0 in air;
/// the surface is the highest level where it crosses 0.5.
pub fn gauge_elevation(sys: &ParticleSystem, kernel: &KernelSpec, gauge: GaugeSpec, still_level: f64) -> Result<f64> {
    let dp = kernel.dp;
    let vol_ref = kernel.particle_volume();
    let three_d = sys.dim == Dim::Three;
    let mut pts: Vec<(f64, f64)> = Vec::new();
    let mut zmax = f64::NEG_INFINITY;
    let mut zmin = f64::INFINITY;
    for i in 0..sys.len() {
        if !sys.kinds[i].is_fluid() {
            continue;
        }
        let p: Vec3 = sys.positions[i];
        let dx = (p.x - gauge.x).abs();
        if dx >= dp {
            continue;
        }
        let mut w = 1.0 - dx / dp;
        if three_d {
            let dy = (p.y - gauge.y).abs();
            if dy >= dp {
                continue;
            }
            w *= 1.0 - dy / dp;
        }
        let vol = sys.masses()[i] / sys.densities[i];
        pts.push((p.z, w * vol / vol_ref * dp));
        zmax = zmax.max(p.z);
        zmin = zmin.min(p.z);
    }
    if pts.is_empty() {
        return Err(Error::EmptyGauge { x: gauge.x });
    }
    let h = kernel.h;
    let indicator = |z: f64| -> f64 { pts.iter().map(|&(zj, w)| w * wendland_1d(z - zj, h)).sum() };

    let step = 0.25 * dp;
    let mut hi = zmax + 2.0 * h;
    let mut lo = hi - step;
    loop {
        if indicator(lo) >= 0.5 {
            break;
        }
        if lo < zmin - 2.0 * h {
            // too thin to ever reach one half; report the top particle
            return Ok(zmax + 0.5 * dp - still_level);
        }
        hi = lo;
        lo -= step;
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if indicator(mid) >= 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi) - still_level)
}
