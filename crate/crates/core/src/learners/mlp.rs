//! Single-hidden-layer perceptron with logistic units.
//!
//! Inputs are standardized with statistics from the training data, the loss
//! is mean binary cross-entropy and training is plain full-batch gradient
//! descent from weights drawn uniformly in [-0.5, 0.5].

use rand::Rng;
use rand_distr::{Distribution, Uniform};
use serde::{Deserialize, Serialize};

use crate::dataset::generators::rng_from;
use crate::error::{Error, Result};
use crate::learners::logistic::sigmoid;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MlpParams {
    pub hidden_units: usize,
    pub learning_rate: f64,
    pub epochs: usize,
}

impl Default for MlpParams {
    fn default() -> Self {
        Self {
            hidden_units: 8,
            learning_rate: 0.1,
            epochs: 500,
        }
    }
}

impl MlpParams {
    pub fn validate(&self) -> Result<()> {
        if self.hidden_units == 0 {
            return Err(Error::param("mlp hidden_units must be at least 1"));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::param(format!(
                "mlp learning_rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if self.epochs == 0 {
            return Err(Error::param("mlp epochs must be at least 1"));
        }
        Ok(())
    }
}

/// Network parameters. Hidden weights are stored row-major
/// (`hidden × inputs`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Network {
    pub inputs: usize,
    pub hidden: usize,
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: f64,
}

impl Network {
    pub fn zeros(inputs: usize, hidden: usize) -> Self {
        Self {
            inputs,
            hidden,
            w1: vec![0.0; hidden * inputs],
            b1: vec![0.0; hidden],
            w2: vec![0.0; hidden],
            b2: 0.0,
        }
    }

    pub fn random<R: Rng>(inputs: usize, hidden: usize, rng: &mut R) -> Self {
        let u = Uniform::new_inclusive(-0.5, 0.5).expect("valid range");
        let mut net = Self::zeros(inputs, hidden);
        for w in net
            .w1
            .iter_mut()
            .chain(net.b1.iter_mut())
            .chain(net.w2.iter_mut())
            .chain(std::iter::once(&mut net.b2))
        {
            *w = u.sample(rng);
        }
        net
    }

    pub fn n_params(&self) -> usize {
        self.hidden * self.inputs + 2 * self.hidden + 1
    }

    /// Flat parameter vector: `w1`, `b1`, `w2`, `b2`.
    pub fn params(&self) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.n_params());
        p.extend_from_slice(&self.w1);
        p.extend_from_slice(&self.b1);
        p.extend_from_slice(&self.w2);
        p.push(self.b2);
        p
    }

    pub fn set_params(&mut self, p: &[f64]) {
        assert_eq!(p.len(), self.n_params(), "parameter vector length");
        let (w1, rest) = p.split_at(self.hidden * self.inputs);
        let (b1, rest) = rest.split_at(self.hidden);
        let (w2, b2) = rest.split_at(self.hidden);
        self.w1.copy_from_slice(w1);
        self.b1.copy_from_slice(b1);
        self.w2.copy_from_slice(w2);
        self.b2 = b2[0];
    }

    fn hidden_activations(&self, x: &[f64], out: &mut [f64]) {
        for (h, o) in out.iter_mut().enumerate() {
            let row = &self.w1[h * self.inputs..(h + 1) * self.inputs];
            let z: f64 = row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.b1[h];
            *o = sigmoid(z);
        }
    }

    fn output_logit(&self, hidden: &[f64]) -> f64 {
        self.w2.iter().zip(hidden).map(|(w, h)| w * h).sum::<f64>() + self.b2
    }

    pub fn forward(&self, x: &[f64]) -> f64 {
        let mut h = vec![0.0; self.hidden];
        self.hidden_activations(x, &mut h);
        sigmoid(self.output_logit(&h))
    }

    /// Mean binary cross-entropy over the rows.
    pub fn loss(&self, x: &[Vec<f64>], y: &[u8]) -> f64 {
        let mut h = vec![0.0; self.hidden];
        let total: f64 = x
            .iter()
            .zip(y)
            .map(|(row, &label)| {
                self.hidden_activations(row, &mut h);
                let z = self.output_logit(&h);
                // ln(1 + e^z) − y z
                let sp = if z > 0.0 {
                    z + (-z).exp().ln_1p()
                } else {
                    z.exp().ln_1p()
                };
                sp - label as f64 * z
            })
            .sum();
        total / x.len() as f64
    }

    /// Backpropagated gradient of [`Network::loss`], in [`Network::params`]
    /// layout.
    pub fn gradient(&self, x: &[Vec<f64>], y: &[u8]) -> Vec<f64> {
        let n = x.len() as f64;
        let (nh, ni) = (self.hidden, self.inputs);
        let mut g = vec![0.0; self.n_params()];
        let mut h = vec![0.0; nh];
        for (row, &label) in x.iter().zip(y) {
            self.hidden_activations(row, &mut h);
            let delta_out = sigmoid(self.output_logit(&h)) - label as f64;
            for k in 0..nh {
                g[nh * ni + nh + k] += delta_out * h[k];
                let delta_h = delta_out * self.w2[k] * h[k] * (1.0 - h[k]);
                for (j, v) in row.iter().enumerate() {
                    g[k * ni + j] += delta_h * v;
                }
                g[nh * ni + k] += delta_h;
            }
            g[nh * ni + 2 * nh] += delta_out;
        }
        for v in &mut g {
            *v /= n;
        }
        g
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpState {
    pub network: Network,
    pub input_mean: Vec<f64>,
    pub input_scale: Vec<f64>,
}

impl MlpState {
    fn standardize(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.input_mean)
            .zip(&self.input_scale)
            .map(|((v, m), s)| (v - m) / s)
            .collect()
    }

    pub fn probability(&self, x: &[f64]) -> f64 {
        self.network.forward(&self.standardize(x))
    }
}

pub(crate) fn fit(x: &[Vec<f64>], labels: &[u8], params: &MlpParams, seed: u64) -> Result<MlpState> {
    params.validate()?;
    let n = x.len() as f64;
    let dim = x.first().map_or(0, Vec::len);
    let mut input_mean = vec![0.0; dim];
    let mut input_scale = vec![1.0; dim];
    for j in 0..dim {
        let mean = x.iter().map(|r| r[j]).sum::<f64>() / n;
        let sd = (x.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / n).sqrt();
        input_mean[j] = mean;
        input_scale[j] = if sd > 0.0 { sd } else { 1.0 };
    }
    let mut state = MlpState {
        network: Network::random(dim, params.hidden_units, &mut rng_from(seed)),
        input_mean,
        input_scale,
    };
    let xs: Vec<Vec<f64>> = x.iter().map(|r| state.standardize(r)).collect();
    let mut theta = state.network.params();
    for _ in 0..params.epochs {
        let g = state.network.gradient(&xs, labels);
        for (t, gi) in theta.iter_mut().zip(&g) {
            *t -= params.learning_rate * gi;
        }
        state.network.set_params(&theta);
    }
    Ok(state)
}
