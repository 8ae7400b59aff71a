use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{exec, Error, Predictor, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Tanh,
    Relu,
}

impl Activation {
    fn apply(self, z: f64) -> f64 {
        match self {
            Self::Tanh => z.tanh(),
            Self::Relu => z.max(0.0),
        }
    }

    /// Derivative expressed through the activation output `a`.
    fn derivative(self, a: f64) -> f64 {
        match self {
            Self::Tanh => 1.0 - a * a,
            Self::Relu => {
                if a > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// Fully connected network; hidden layers use `activation`, the output
/// layer is linear. `weights[l]` is row-major `sizes[l+1] × sizes[l]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    pub sizes: Vec<usize>,
    pub activation: Activation,
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

impl MlpModel {
    pub fn validate(&self) -> Result<()> {
        let l = self.sizes.len();
        if l < 2 || self.sizes.contains(&0) {
            return Err(Error::InvalidConfig(format!(
                "layer sizes need at least two non-zero layers, got {:?}",
                self.sizes
            )));
        }
        if self.weights.len() != l - 1 || self.biases.len() != l - 1 {
            return Err(Error::InvalidModel(
                "weight/bias layer count does not match sizes".into(),
            ));
        }
        for k in 0..l - 1 {
            if self.weights[k].len() != self.sizes[k] * self.sizes[k + 1] || self.biases[k].len() != self.sizes[k + 1] {
                return Err(Error::InvalidModel(format!("layer {k} has inconsistent shapes")));
            }
        }
        Ok(())
    }

    pub fn input_dim(&self) -> usize {
        self.sizes[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.sizes.last().expect("validated")
    }

    pub fn layers(&self) -> usize {
        self.weights.len()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let m: Self = serde_json::from_str(s)?;
        m.validate()?;
        Ok(m)
    }

    /// Output vector only.
    pub fn run(&self, x: &[f64]) -> Result<Vec<f64>> {
        mlp_forward(self, x).map(|(y, _)| y)
    }
}

impl Predictor for MlpModel {
    /// First output unit. Panics on a dimension mismatch.
    fn predict(&self, x: &[f64]) -> f64 {
        self.run(x).expect("input dimension matches model")[0]
    }
}

/// Glorot-uniform weights, zero biases.
pub fn mlp_init(sizes: &[usize], activation: Activation, seed: u64) -> Result<MlpModel> {
    if sizes.len() < 2 || sizes.contains(&0) {
        return Err(Error::InvalidConfig(format!(
            "layer sizes need an input and an output layer, got {sizes:?}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut weights = Vec::with_capacity(sizes.len() - 1);
    let mut biases = Vec::with_capacity(sizes.len() - 1);
    for pair in sizes.windows(2) {
        let (fan_in, fan_out) = (pair[0], pair[1]);
        let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
        weights.push((0..fan_in * fan_out).map(|_| rng.random_range(-limit..limit)).collect());
        biases.push(vec![0.0; fan_out]);
    }
    Ok(MlpModel {
        sizes: sizes.to_vec(),
        activation,
        weights,
        biases,
    })
}

/// Activations of every layer, input first and output last.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardCache {
    pub activations: Vec<Vec<f64>>,
}

pub fn mlp_forward(model: &MlpModel, x: &[f64]) -> Result<(Vec<f64>, ForwardCache)> {
    if x.len() != model.input_dim() {
        return Err(Error::DimensionMismatch {
            expected: model.input_dim(),
            got: x.len(),
        });
    }
    let last = model.layers() - 1;
    let mut acts = Vec::with_capacity(model.layers() + 1);
    acts.push(x.to_vec());
    for (l, (w, b)) in model.weights.iter().zip(&model.biases).enumerate() {
        let input = &acts[l];
        let out: Vec<f64> = b
            .iter()
            .enumerate()
            .map(|(i, bi)| {
                let row = &w[i * input.len()..(i + 1) * input.len()];
                let z = row.iter().zip(input).fold(*bi, |acc, (wij, xj)| acc + wij * xj);
                if l == last {
                    z
                } else {
                    model.activation.apply(z)
                }
            })
            .collect();
        acts.push(out);
    }
    let y = acts.last().expect("at least one layer").clone();
    Ok((y, ForwardCache { activations: acts }))
}

/// Gradients shaped like the model's weights and biases.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpGradients {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

impl MlpGradients {
    fn zeros(model: &MlpModel) -> Self {
        Self {
            weights: model.weights.iter().map(|w| vec![0.0; w.len()]).collect(),
            biases: model.biases.iter().map(|b| vec![0.0; b.len()]).collect(),
        }
    }

    fn add(&mut self, other: &Self) {
        for (a, b) in self.weights.iter_mut().zip(&other.weights) {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        }
        for (a, b) in self.biases.iter_mut().zip(&other.biases) {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        }
    }

    fn scale(&mut self, s: f64) {
        self.weights.iter_mut().flatten().for_each(|x| *x *= s);
        self.biases.iter_mut().flatten().for_each(|x| *x *= s);
    }
}

fn sample_gradient(model: &MlpModel, x: &[f64], t: &[f64]) -> Result<(f64, MlpGradients)> {
    let (y, cache) = mlp_forward(model, x)?;
    if t.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: y.len(),
            got: t.len(),
        });
    }
    let mut g = MlpGradients::zeros(model);
    let mut delta: Vec<f64> = y.iter().zip(t).map(|(yi, ti)| 2.0 * (yi - ti)).collect();
    let loss = y.iter().zip(t).map(|(yi, ti)| (yi - ti) * (yi - ti)).sum();
    for l in (0..model.layers()).rev() {
        let input = &cache.activations[l];
        let n_in = input.len();
        for (i, d) in delta.iter().enumerate() {
            g.biases[l][i] = *d;
            for (j, xj) in input.iter().enumerate() {
                g.weights[l][i * n_in + j] = d * xj;
            }
        }
        if l > 0 {
            let w = &model.weights[l];
            delta = (0..n_in)
                .map(|j| {
                    let back: f64 = delta.iter().enumerate().map(|(i, d)| d * w[i * n_in + j]).sum();
                    back * model.activation.derivative(input[j])
                })
                .collect();
        }
    }
    Ok((loss, g))
}

/// Loss `(1/B)·Σ_samples ‖ŷ − t‖²` and its exact gradient. Per-sample
/// gradients are computed independently and summed in batch order.
pub fn mlp_backward(model: &MlpModel, inputs: &[Vec<f64>], targets: &[Vec<f64>]) -> Result<(f64, MlpGradients)> {
    if inputs.len() != targets.len() || inputs.is_empty() {
        return Err(Error::InvalidData(format!(
            "batch needs matching non-empty inputs/targets, got {} and {}",
            inputs.len(),
            targets.len()
        )));
    }
    let idx: Vec<usize> = (0..inputs.len()).collect();
    let per_sample = exec::map(&idx, |&k| sample_gradient(model, &inputs[k], &targets[k]));
    let mut total = MlpGradients::zeros(model);
    let mut loss = 0.0;
    for r in per_sample {
        let (l, g) = r?;
        loss += l;
        total.add(&g);
    }
    let inv = 1.0 / inputs.len() as f64;
    total.scale(inv);
    Ok((loss * inv, total))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn init_is_deterministic_with_zero_bias() {
        let a = mlp_init(&[2, 1], Activation::Tanh, 42).unwrap();
        let b = mlp_init(&[2, 1], Activation::Tanh, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.biases, vec![vec![0.0]]);
        let limit = (6.0f64 / 3.0).sqrt();
        assert!(a.weights[0].iter().all(|w| w.abs() < limit));
        assert_ne!(a, mlp_init(&[2, 1], Activation::Tanh, 43).unwrap());
    }

    #[test]
    fn init_needs_two_layers() {
        assert!(mlp_init(&[3], Activation::Tanh, 0).is_err());
        assert!(mlp_init(&[3, 0, 1], Activation::Tanh, 0).is_err());
    }

    #[test]
    fn zero_network_outputs_zero() {
        let mut m = mlp_init(&[3, 4, 1], Activation::Relu, 1).unwrap();
        m.weights.iter_mut().flatten().for_each(|w| *w = 0.0);
        assert_eq!(m.run(&[1.0, -2.0, 3.0]).unwrap(), vec![0.0]);
    }

    #[test]
    fn single_linear_layer() {
        let m = MlpModel {
            sizes: vec![2, 2],
            activation: Activation::Tanh,
            weights: vec![vec![1.0, 2.0, -3.0, 0.5]],
            biases: vec![vec![0.1, -0.2]],
        };
        assert_eq!(m.run(&[2.0, 4.0]).unwrap(), vec![0.1 + 2.0 + 8.0, -0.2 - 6.0 + 2.0]);
        assert!(m.run(&[1.0]).is_err());
    }

    #[test]
    fn single_neuron_gradient_closed_form() {
        let m = MlpModel {
            sizes: vec![2, 1],
            activation: Activation::Tanh,
            weights: vec![vec![0.5, -1.0]],
            biases: vec![vec![0.25]],
        };
        let x = vec![2.0, 3.0];
        let t = 1.0;
        let yhat = 0.25 + 1.0 - 3.0;
        let (loss, g) = mlp_backward(&m, std::slice::from_ref(&x), &[vec![t]]).unwrap();
        assert_eq!(loss, (yhat - t) * (yhat - t));
        assert_eq!(g.weights[0], vec![2.0 * (yhat - t) * x[0], 2.0 * (yhat - t) * x[1]]);
        assert_eq!(g.biases[0], vec![2.0 * (yhat - t)]);
    }

    #[test]
    fn zero_residual_zero_gradient() {
        let m = mlp_init(&[2, 3, 1], Activation::Tanh, 7).unwrap();
        let xs = vec![vec![0.1, 0.2], vec![-0.4, 0.9]];
        let ts: Vec<Vec<f64>> = xs.iter().map(|x| m.run(x).unwrap()).collect();
        let (loss, g) = mlp_backward(&m, &xs, &ts).unwrap();
        assert_eq!(loss, 0.0);
        assert!(g
            .weights
            .iter()
            .flatten()
            .chain(g.biases.iter().flatten())
            .all(|v| *v == 0.0));
    }

    #[test]
    fn json_round_trip_and_validation() {
        let m = mlp_init(&[3, 2, 1], Activation::Relu, 3).unwrap();
        let s = m.to_json().unwrap();
        assert!(s.contains("\"activation\": \"relu\""));
        assert_eq!(MlpModel::from_json(&s).unwrap(), m);
        let mut bad = m.clone();
        bad.biases[0].pop();
        assert!(MlpModel::from_json(&bad.to_json().unwrap()).is_err());
    }
}
