use core::f64::consts::PI;

use super::Dim;
use crate::math::{powi, Vec3};
use crate::{Error, Result};

/// Wendland C2 (quintic) kernel with `h = 2 dp` and support `2h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    pub h: f64,
    pub dp: f64,
    pub dim: Dim,
    norm: f64,
}

impl KernelSpec {
    pub fn new(dp: f64, dim: Dim) -> Result<Self> {
        if !(dp > 0.0 && dp.is_finite()) {
            return Err(Error::invalid("particle spacing must be positive"));
        }
        let h = 2.0 * dp;
        let norm = match dim {
            Dim::Two => 7.0 / (4.0 * PI * h * h),
            Dim::Three => 21.0 / (16.0 * PI * h * h * h),
        };
        Ok(KernelSpec { h, dp, dim, norm })
    }

    #[inline]
    pub fn support_radius(&self) -> f64 {
        2.0 * self.h
    }

    /// Normalisation constant of the kernel for this dimension.
    #[inline]
    pub fn alpha(&self) -> f64 {
        self.norm
    }

    /// Reference particle volume `dp^dim`.
    pub fn particle_volume(&self) -> f64 {
        match self.dim {
            Dim::Two => self.dp * self.dp,
            Dim::Three => self.dp * self.dp * self.dp,
        }
    }

    /// Kernel value at distance `r`.
    #[inline]
    pub fn w(&self, r: f64) -> f64 {
        let q = r / self.h;
        if q >= 2.0 {
            return 0.0;
        }
        let t = 1.0 - 0.5 * q;
        self.norm * powi(t, 4) * (2.0 * q + 1.0)
    }

    /// `F(r)` such that `∇W(r_vec) = F(r) · r_vec`. Non-positive; zero at and beyond `2h`.
    #[inline]
    pub fn grad_factor(&self, r: f64) -> f64 {
        let q = r / self.h;
        if q >= 2.0 {
            return 0.0;
        }
        let t = 1.0 - 0.5 * q;
        -5.0 * self.norm / (self.h * self.h) * t * t * t
    }

    /// Value and gradient (with respect to the first particle) for displacement `r_ij`.
    pub fn eval(&self, r_ij: Vec3) -> Result<(f64, Vec3)> {
        if !r_ij.is_finite() {
            return Err(Error::NonFinite { what: "kernel displacement", index: 0 });
        }
        let r = r_ij.norm();
        Ok((self.w(r), r_ij * self.grad_factor(r)))
    }
}

/// One-dimensional Wendland C2 kernel with smoothing length `h`, unit integral.
#[inline]
pub fn wendland_1d(r: f64, h: f64) -> f64 {
    let q = r.abs() / h;
    if q >= 2.0 {
        return 0.0;
    }
    let t = 1.0 - 0.5 * q;
    5.0 / (8.0 * h) * t * t * t * (1.5 * q + 1.0)
}
