use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use super::mlp::{Mlp, Tape};
use crate::math::{exp, ln, tanh};
use crate::Result;

pub const LOG_STD_MIN: f64 = -20.0;
pub const LOG_STD_MAX: f64 = 2.0;
/// Stabiliser inside the tanh log-Jacobian `log(1 - a² + ε)`.
pub const SQUASH_EPS: f64 = 1e-6;
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_7;

/// Tanh-squashed diagonal Gaussian policy. The network outputs the means
/// followed by the log standard deviations.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianPolicy {
    pub net: Mlp,
    pub act_dim: usize,
}

/// Everything about a batch of reparameterised samples needed to
/// back-propagate a loss through them.
#[derive(Debug, Clone, Default)]
pub struct PolicySample {
    pub tape: Tape,
    pub rows: usize,
    pub actions: Vec<f64>,
    pub log_probs: Vec<f64>,
    /// Standard normal noise used for each component.
    pub noise: Vec<f64>,
    /// Clamped log standard deviations.
    pub log_std: Vec<f64>,
    /// Whether the raw log-std lay inside the clamp range.
    pub unclamped: Vec<bool>,
}

impl GaussianPolicy {
    /// Network `hidden` layers between `obs_dim` and `2·act_dim`, with the
    /// output layer scaled by `1e-2` so initial means sit near zero.
    pub fn new<R: Rng + ?Sized>(obs_dim: usize, act_dim: usize, hidden: &[usize], rng: &mut R) -> Result<Self> {
        let mut sizes = Vec::with_capacity(hidden.len() + 2);
        sizes.push(obs_dim);
        sizes.extend_from_slice(hidden);
        sizes.push(2 * act_dim);
        let mut net = Mlp::new(&sizes, rng)?;
        let off = net.last_layer_offset();
        for p in &mut net.params_mut()[off..] {
            *p *= 1e-2;
        }
        Ok(GaussianPolicy { net, act_dim })
    }

    pub fn obs_dim(&self) -> usize {
        self.net.input_dim()
    }

    /// Deterministic action `tanh(μ)` for one observation.
    pub fn mean_action(&self, obs: &[f64]) -> Result<Vec<f64>> {
        let y = self.net.forward(obs)?;
        Ok(y[..self.act_dim].iter().map(|&m| tanh(m)).collect())
    }

    /// Draws one reparameterised sample per row of `obs`. The noise is drawn
    /// row by row, action component by component.
    pub fn sample_batch<R: Rng + ?Sized>(&self, obs: &[f64], rows: usize, rng: &mut R, out: &mut PolicySample) -> Result<()> {
        let noise: Vec<f64> = (0..rows * self.act_dim).map(|_| rng.sample(StandardNormal)).collect();
        self.sample_with_noise(obs, rows, noise, out)
    }

    /// As [`GaussianPolicy::sample_batch`] with caller-supplied noise.
    pub fn sample_with_noise(&self, obs: &[f64], rows: usize, noise: Vec<f64>, out: &mut PolicySample) -> Result<()> {
        let d = self.act_dim;
        self.net.forward_batch(obs, rows, &mut out.tape)?;
        let y = out.tape.output();
        out.rows = rows;
        out.actions.clear();
        out.log_probs.clear();
        out.log_std.clear();
        out.unclamped.clear();
        for r in 0..rows {
            let mut lp = 0.0;
            for k in 0..d {
                let mu = y[r * 2 * d + k];
                let raw = y[r * 2 * d + d + k];
                let ls = raw.clamp(LOG_STD_MIN, LOG_STD_MAX);
                let xi = noise[r * d + k];
                let a = tanh(mu + exp(ls) * xi);
                lp += -0.5 * xi * xi - ls - HALF_LN_2PI - ln(1.0 - a * a + SQUASH_EPS);
                out.actions.push(a);
                out.log_std.push(ls);
                out.unclamped.push((LOG_STD_MIN..=LOG_STD_MAX).contains(&raw));
            }
            out.log_probs.push(lp);
        }
        out.noise = noise;
        Ok(())
    }

    /// Back-propagates `dL/da` (`rows × act_dim`) and `dL/dlogπ` (`rows`)
    /// through a recorded sample into `grad` (accumulated).
    pub fn backward(&self, s: &PolicySample, d_action: &[f64], d_logp: &[f64], grad: &mut [f64]) -> Result<()> {
        let d = self.act_dim;
        let mut dy = alloc::vec![0.0; s.rows * 2 * d];
        for r in 0..s.rows {
            for k in 0..d {
                let i = r * d + k;
                let a = s.actions[i];
                let one = 1.0 - a * a;
                let du = d_logp[r] * 2.0 * a * one / (one + SQUASH_EPS) + d_action[i] * one;
                dy[r * 2 * d + k] = du;
                if s.unclamped[i] {
                    dy[r * 2 * d + d + k] = du * exp(s.log_std[i]) * s.noise[i] - d_logp[r];
                }
            }
        }
        self.net.backward_batch(&s.tape, &dy, Some(grad), None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn policy(seed: u64) -> GaussianPolicy {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let mut p = GaussianPolicy::new(3, 2, &[16, 16], &mut r).unwrap();
        // widen the output layer so the test policy is far from the init regime
        let off = p.net.last_layer_offset();
        for q in &mut p.net.params_mut()[off..] {
            *q *= 60.0;
        }
        p
    }

    #[test]
    fn deterministic_action_is_tanh_mean() {
        let p = policy(1);
        let obs = [0.2, -0.4, 1.0];
        let y = p.net.forward(&obs).unwrap();
        let a = p.mean_action(&obs).unwrap();
        assert_eq!(a, alloc::vec![libm::tanh(y[0]), libm::tanh(y[1])]);
        // noise-free sample coincides
        let mut s = PolicySample::default();
        p.sample_with_noise(&obs, 1, alloc::vec![0.0, 0.0], &mut s).unwrap();
        assert_eq!(s.actions, a);
    }

    #[test]
    fn samples_stay_strictly_inside() {
        let p = policy(2);
        let mut r = ChaCha8Rng::seed_from_u64(9);
        let obs: Vec<f64> = (0..3 * 10_000).map(|k| ((k % 17) as f64 - 8.0) * 0.3).collect();
        let mut s = PolicySample::default();
        p.sample_batch(&obs, 10_000, &mut r, &mut s).unwrap();
        assert!(s.actions.iter().all(|a| a.abs() < 1.0));
        assert!(s.log_probs.iter().all(|l| l.is_finite()));
    }

    /// Entropy of a tanh-squashed 1-D Gaussian by quadrature over the
    /// pre-squash variable: H = H_gauss + E[log(1 - tanh(u)²)].
    fn squashed_entropy(mu: f64, sigma: f64) -> f64 {
        let n = 200_000;
        let (lo, hi) = (-12.0, 12.0);
        let h = (hi - lo) / n as f64;
        let mut e = 0.0;
        for k in 0..n {
            let z = lo + (k as f64 + 0.5) * h;
            let pdf = libm::exp(-0.5 * z * z) / libm::sqrt(2.0 * core::f64::consts::PI);
            let a = libm::tanh(mu + sigma * z);
            e += pdf * libm::log(1.0 - a * a + SQUASH_EPS) * h;
        }
        0.5 * libm::log(2.0 * core::f64::consts::PI * core::f64::consts::E * sigma * sigma) + e
    }

    #[test]
    fn monte_carlo_entropy_matches_quadrature() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = GaussianPolicy::new(2, 1, &[8], &mut rng).unwrap();
        let mut q = p.clone();
        // fixed mean 0.3 and log-std -0.5 through the output biases only
        let off = q.net.last_layer_offset();
        let n_out = 2;
        let n_w = q.net.param_count() - off - n_out;
        for v in &mut q.net.params_mut()[off..off + n_w] {
            *v = 0.0;
        }
        q.net.params_mut()[off + n_w] = 0.3;
        q.net.params_mut()[off + n_w + 1] = -0.5;
        let rows = 100_000;
        let obs = alloc::vec![0.1; 2 * rows];
        let mut s = PolicySample::default();
        q.sample_batch(&obs, rows, &mut rng, &mut s).unwrap();
        let mc = -s.log_probs.iter().sum::<f64>() / rows as f64;
        let exact = squashed_entropy(0.3, libm::exp(-0.5));
        assert!((mc - exact).abs() < 0.02 * exact.abs(), "mc {mc} vs {exact}");
    }

    #[test]
    fn reparameterised_gradient_matches_finite_differences() {
        let p = policy(4);
        let obs = [0.3, -0.2, 0.8, -1.0, 0.1, 0.4];
        let noise = alloc::vec![0.7, -1.2, 0.3, 0.9];
        let wa = [0.4, -0.9, 1.3, 0.2];
        let wl = [0.6, -0.35];
        let loss = |q: &GaussianPolicy| {
            let mut s = PolicySample::default();
            q.sample_with_noise(&obs, 2, noise.clone(), &mut s).unwrap();
            s.actions.iter().zip(&wa).map(|(a, w)| a * w).sum::<f64>()
                + s.log_probs.iter().zip(&wl).map(|(l, w)| l * w).sum::<f64>()
        };
        let mut s = PolicySample::default();
        p.sample_with_noise(&obs, 2, noise.clone(), &mut s).unwrap();
        let mut g = alloc::vec![0.0; p.net.param_count()];
        p.backward(&s, &wa, &wl, &mut g).unwrap();
        let eps = 1e-6;
        let mut worst: f64 = 0.0;
        for k in 0..p.net.param_count() {
            let mut a = p.clone();
            a.net.params_mut()[k] += eps;
            let mut b = p.clone();
            b.net.params_mut()[k] -= eps;
            let fd = (loss(&a) - loss(&b)) / (2.0 * eps);
            let scale = fd.abs().max(g[k].abs());
            if scale > 1e-6 {
                worst = worst.max((fd - g[k]).abs() / scale);
            }
        }
        assert!(worst < 1e-4, "worst relative error {worst}");
    }
}
