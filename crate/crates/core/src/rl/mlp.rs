use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::math::sqrt;
use crate::{Error, Result};

/// Fully connected network with ReLU hidden layers and a linear output.
///
/// Parameters live in one flat vector. Layer `l` stores its weights
/// transposed (`in × out`, row-major) followed by its `out` biases, so the
/// forward pass is a sequence of contiguous axpy updates.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    sizes: Vec<usize>,
    params: Vec<f64>,
}

/// Per-layer activations recorded by [`Mlp::forward_batch`] for the
/// backward pass.
#[derive(Debug, Clone, Default)]
pub struct Tape {
    rows: usize,
    acts: Vec<Vec<f64>>,
}

impl Tape {
    /// Network output of the recorded batch (`rows × out`, row-major).
    pub fn output(&self) -> &[f64] {
        self.acts.last().map_or(&[], |v| v.as_slice())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    let mut acc = [0.0f64; 4];
    let chunks = n / 4;
    for c in 0..chunks {
        let k = 4 * c;
        acc[0] += a[k] * b[k];
        acc[1] += a[k + 1] * b[k + 1];
        acc[2] += a[k + 2] * b[k + 2];
        acc[3] += a[k + 3] * b[k + 3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for k in 4 * chunks..n {
        s += a[k] * b[k];
    }
    s
}

#[inline]
fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

impl Mlp {
    fn count(sizes: &[usize]) -> usize {
        sizes.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
    }

    /// Uniform fan-in initialisation `U(-1/√in, 1/√in)` for weights and biases.
    pub fn new<R: Rng + ?Sized>(sizes: &[usize], rng: &mut R) -> Result<Self> {
        let mut net = Mlp::zeros(sizes)?;
        let mut off = 0;
        for w in sizes.windows(2) {
            let bound = 1.0 / sqrt(w[0] as f64);
            for p in &mut net.params[off..off + w[0] * w[1] + w[1]] {
                *p = rng.random_range(-bound..bound);
            }
            off += w[0] * w[1] + w[1];
        }
        Ok(net)
    }

    pub fn zeros(sizes: &[usize]) -> Result<Self> {
        if sizes.len() < 2 || sizes.contains(&0) {
            return Err(Error::invalid("an MLP needs at least two non-empty layers"));
        }
        Ok(Mlp { sizes: sizes.to_vec(), params: vec![0.0; Mlp::count(sizes)] })
    }

    pub fn from_params(sizes: &[usize], params: Vec<f64>) -> Result<Self> {
        let net = Mlp::zeros(sizes)?;
        if params.len() != net.params.len() {
            return Err(Error::ShapeMismatch(alloc::format!(
                "expected {} parameters, got {}",
                net.params.len(),
                params.len()
            )));
        }
        Ok(Mlp { sizes: sizes.to_vec(), params })
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn input_dim(&self) -> usize {
        self.sizes[0]
    }

    pub fn output_dim(&self) -> usize {
        self.sizes[self.sizes.len() - 1]
    }

    pub fn param_count(&self) -> usize {
        self.params.len()
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    /// Offset of the last layer's block (transposed weights then biases).
    pub fn last_layer_offset(&self) -> usize {
        let n = self.sizes.len();
        self.params.len() - (self.sizes[n - 2] * self.sizes[n - 1] + self.sizes[n - 1])
    }

    /// Single-sample forward pass.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut tape = Tape::default();
        self.forward_batch(x, 1, &mut tape)?;
        Ok(tape.output().to_vec())
    }

    /// Forward pass over `rows` samples stored row-major in `x`.
    pub fn forward_batch(&self, x: &[f64], rows: usize, tape: &mut Tape) -> Result<()> {
        let n_in = self.input_dim();
        if x.len() != rows * n_in {
            return Err(Error::ShapeMismatch(alloc::format!(
                "network input width is {n_in}, got {} values for {rows} rows",
                x.len()
            )));
        }
        let layers = self.sizes.len() - 1;
        tape.rows = rows;
        tape.acts.resize(layers + 1, Vec::new());
        tape.acts[0].clear();
        tape.acts[0].extend_from_slice(x);
        let mut off = 0;
        for l in 0..layers {
            let (ni, no) = (self.sizes[l], self.sizes[l + 1]);
            let wt = &self.params[off..off + ni * no];
            let b = &self.params[off + ni * no..off + ni * no + no];
            let (prev, rest) = tape.acts.split_at_mut(l + 1);
            let input = &prev[l];
            let out = &mut rest[0];
            out.clear();
            out.resize(rows * no, 0.0);
            for r in 0..rows {
                let y = &mut out[r * no..(r + 1) * no];
                y.copy_from_slice(b);
                for (i, &xi) in input[r * ni..(r + 1) * ni].iter().enumerate() {
                    if xi != 0.0 {
                        axpy(y, xi, &wt[i * no..(i + 1) * no]);
                    }
                }
                if l + 1 < layers {
                    for v in y.iter_mut() {
                        if *v < 0.0 {
                            *v = 0.0;
                        }
                    }
                }
            }
            off += ni * no + no;
        }
        Ok(())
    }

    /// Back-propagates `dy` (`rows × out`) through the recorded batch.
    /// Parameter gradients are accumulated into `grad` when given; the input
    /// gradient (`rows × in`) is written to `dx` when given.
    pub fn backward_batch(&self, tape: &Tape, dy: &[f64], grad: Option<&mut [f64]>, dx: Option<&mut Vec<f64>>) -> Result<()> {
        let rows = tape.rows;
        let layers = self.sizes.len() - 1;
        if dy.len() != rows * self.output_dim() || tape.acts.len() != layers + 1 {
            return Err(Error::ShapeMismatch("output gradient does not match the recorded batch".into()));
        }
        let mut grad = grad;
        if let Some(g) = grad.as_deref() {
            if g.len() != self.params.len() {
                return Err(Error::ShapeMismatch("gradient buffer size".into()));
            }
        }
        let want_dx = dx.is_some();
        let mut delta = dy.to_vec();
        let mut off = self.params.len();
        let mut next = Vec::new();
        for l in (0..layers).rev() {
            let (ni, no) = (self.sizes[l], self.sizes[l + 1]);
            off -= ni * no + no;
            let wt = &self.params[off..off + ni * no];
            let input = &tape.acts[l];
            if let Some(g) = grad.as_deref_mut() {
                let (gw, gb) = g[off..off + ni * no + no].split_at_mut(ni * no);
                for r in 0..rows {
                    let d = &delta[r * no..(r + 1) * no];
                    axpy(gb, 1.0, d);
                    for (i, &xi) in input[r * ni..(r + 1) * ni].iter().enumerate() {
                        if xi != 0.0 {
                            axpy(&mut gw[i * no..(i + 1) * no], xi, d);
                        }
                    }
                }
            }
            if l == 0 && !want_dx {
                break;
            }
            next.clear();
            next.resize(rows * ni, 0.0);
            for r in 0..rows {
                let d = &delta[r * no..(r + 1) * no];
                let x = &input[r * ni..(r + 1) * ni];
                let out = &mut next[r * ni..(r + 1) * ni];
                for i in 0..ni {
                    // ReLU mask of the previous layer's output; the network input is unmasked
                    if l > 0 && x[i] <= 0.0 {
                        continue;
                    }
                    out[i] = dot(&wt[i * no..(i + 1) * no], d);
                }
            }
            core::mem::swap(&mut delta, &mut next);
        }
        if let Some(dx) = dx {
            dx.clear();
            dx.extend_from_slice(&delta);
        }
        Ok(())
    }
}

/// `target ← τ·online + (1 − τ)·target`, elementwise.
pub fn soft_update(online: &Mlp, target: &mut Mlp, tau: f64) -> Result<()> {
    if online.sizes != target.sizes {
        return Err(Error::ShapeMismatch("soft update between differently shaped networks".into()));
    }
    if tau == 1.0 {
        target.params.copy_from_slice(&online.params);
        return Ok(());
    }
    if tau == 0.0 {
        return Ok(());
    }
    for (t, &o) in target.params.iter_mut().zip(&online.params) {
        *t = tau * o + (1.0 - tau) * *t;
    }
    Ok(())
}
