use crate::math::{powf, powi};
use crate::{Error, Result};

/// Tait-type weakly compressible equation of state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EosSpec {
    pub rho0: f64,
    pub cf: f64,
    pub beta: f64,
}

impl EosSpec {
    pub fn new(rho0: f64, cf: f64, beta: f64) -> Result<Self> {
        if !(rho0 > 0.0 && cf > 0.0 && beta > 0.0) {
            return Err(Error::invalid("rho0, cf and beta must be positive"));
        }
        Ok(EosSpec { rho0, cf, beta })
    }

    /// Water at 1000 kg/m³ with `beta = 7`.
    pub fn water(cf: f64) -> Self {
        EosSpec { rho0: 1000.0, cf, beta: 7.0 }
    }

    /// Stiffness `B = cf² rho0 / beta`.
    #[inline]
    pub fn stiffness(&self) -> f64 {
        self.cf * self.cf * self.rho0 / self.beta
    }

    #[inline]
    fn ratio_pow(&self, x: f64) -> f64 {
        if self.beta == 7.0 {
            powi(x, 7)
        } else {
            powf(x, self.beta)
        }
    }

    /// Pressure for density `rho`. Strictly increasing in `rho`.
    pub fn pressure(&self, rho: f64) -> Result<f64> {
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::invalid(alloc::format!("EOS evaluated at density {rho}")));
        }
        Ok(self.pressure_unchecked(rho))
    }

    #[inline]
    pub(crate) fn pressure_unchecked(&self, rho: f64) -> f64 {
        self.stiffness() * (self.ratio_pow(rho / self.rho0) - 1.0)
    }

    /// Inverse of [`pressure`](Self::pressure); `p` must exceed `-B`.
    pub fn density(&self, p: f64) -> f64 {
        let x = (1.0 + p / self.stiffness()).max(1e-12);
        self.rho0 * powf(x, 1.0 / self.beta)
    }

    /// Checks the Mach-number constraint `cf >= 10 u_max`.
    pub fn check_mach(&self, max_speed: f64) -> Result<()> {
        if self.cf < 10.0 * max_speed {
            return Err(Error::invalid(alloc::format!(
                "speed of sound {} is below 10 x the expected maximum speed {}",
                self.cf, max_speed
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn reference_density_gives_zero_pressure() {
        let e = EosSpec::water(40.0);
        assert_eq!(e.pressure(1000.0).unwrap(), 0.0);
    }

    #[test]
    fn one_percent_compression() {
        // (1.6e6 / 7) * (1.01^7 - 1) evaluated in 30-digit arithmetic.
        let oracle = 16_488.080_481_602_285_7_f64;
        let p = EosSpec::water(40.0).pressure(1010.0).unwrap();
        assert!((p - oracle).abs() < 1e-6, "{p} vs {oracle}");
        assert!((p - 16490.0).abs() < 5.0);
    }

    #[test]
    fn strictly_monotone() {
        let e = EosSpec::water(40.0);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let a: f64 = rng.random_range(900.0..1100.0);
            let b: f64 = rng.random_range(900.0..1100.0);
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            if lo == hi {
                continue;
            }
            assert!(e.pressure(lo).unwrap() < e.pressure(hi).unwrap());
        }
    }

    #[test]
    fn inverse_roundtrip() {
        let e = EosSpec::water(33.0);
        for &rho in &[950.0, 999.0, 1000.0, 1003.7, 1040.0] {
            let back = e.density(e.pressure(rho).unwrap());
            assert!(((back - rho) / rho).abs() < 1e-10);
        }
    }

    #[test]
    fn non_positive_density_is_an_error() {
        let e = EosSpec::water(40.0);
        assert!(e.pressure(0.0).is_err());
        assert!(e.pressure(-1.0).is_err());
    }

    #[test]
    fn mach_constraint() {
        let e = EosSpec::water(40.0);
        assert!(e.check_mach(3.9).is_ok());
        assert!(e.check_mach(4.1).is_err());
    }
}
