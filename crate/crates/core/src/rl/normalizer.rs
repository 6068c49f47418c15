use alloc::vec;
use alloc::vec::Vec;

use crate::math::sqrt;

/// Per-feature running mean and variance (Welford), used to standardise
/// observations. Frozen normalisers keep their statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct RunningNorm {
    pub count: u64,
    pub mean: Vec<f64>,
    /// Sum of squared deviations.
    pub m2: Vec<f64>,
    pub frozen: bool,
}

const MIN_STD: f64 = 1e-6;
const CLIP: f64 = 10.0;

impl RunningNorm {
    pub fn new(width: usize) -> Self {
        RunningNorm { count: 0, mean: vec![0.0; width], m2: vec![0.0; width], frozen: false }
    }

    pub fn width(&self) -> usize {
        self.mean.len()
    }

    pub fn update(&mut self, x: &[f64]) {
        if self.frozen {
            return;
        }
        self.count += 1;
        let n = self.count as f64;
        for (k, &v) in x.iter().enumerate().take(self.mean.len()) {
            let d = v - self.mean[k];
            self.mean[k] += d / n;
            self.m2[k] += d * (v - self.mean[k]);
        }
    }

    pub fn std(&self, k: usize) -> f64 {
        if self.count < 2 {
            return 1.0;
        }
        sqrt(self.m2[k] / (self.count - 1) as f64).max(MIN_STD)
    }

    /// Standardises `x` feature by feature, clipped to ±10.
    pub fn apply(&self, x: &[f64], out: &mut Vec<f64>) {
        out.clear();
        for (k, &v) in x.iter().enumerate() {
            let k = k % self.mean.len();
            out.push(((v - self.mean[k]) / self.std(k)).clamp(-CLIP, CLIP));
        }
    }
}

/// Running standard deviation of a scalar stream; rewards are divided by it.
#[derive(Debug, Clone, PartialEq)]
pub struct RewardScaler {
    pub norm: RunningNorm,
}

impl Default for RewardScaler {
    fn default() -> Self {
        RewardScaler { norm: RunningNorm::new(1) }
    }
}

impl RewardScaler {
    pub fn update(&mut self, r: f64) {
        self.norm.update(&[r]);
    }

    pub fn scale(&self, r: f64) -> f64 {
        if self.norm.count < 2 {
            return r;
        }
        r / self.norm.std(0)
    }
}
