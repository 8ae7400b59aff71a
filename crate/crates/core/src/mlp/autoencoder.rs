use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::model::{mlp_forward, mlp_init, Activation, MlpModel};
use super::sgd::{sgd_train, SgdConfig};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AeConfig {
    /// Training epochs for each hidden layer's autoencoder.
    pub epochs: usize,
    /// Masking-noise probability, in `[0, 1)`.
    pub corruption: f64,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for AeConfig {
    fn default() -> Self {
        Self {
            epochs: 50,
            corruption: 0.1,
            learning_rate: 0.05,
            batch_size: 16,
            seed: 0,
        }
    }
}

impl AeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.corruption) {
            return Err(Error::InvalidConfig(format!(
                "corruption probability must lie in [0, 1), got {}",
                self.corruption
            )));
        }
        if !(self.learning_rate >= 0.0) || self.batch_size == 0 {
            return Err(Error::InvalidConfig(
                "autoencoder needs learning_rate >= 0 and batch_size >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// Greedy layerwise pretraining.
///
/// Starts from `mlp_init(sizes, activation, seed)`. Each hidden layer is
/// trained as the encoder of a `[d, h, d]` denoising autoencoder on the
/// codes produced by the layers below it, and its encoder weights replace
/// the initial ones. The output layer keeps its initial weights.
pub fn pretrain_stacked_autoencoders(
    sizes: &[usize],
    activation: Activation,
    inputs: &[Vec<f64>],
    cfg: &AeConfig,
    seed: u64,
) -> Result<MlpModel> {
    cfg.validate()?;
    if sizes.len() < 3 {
        return Err(Error::InvalidConfig(
            "pretraining needs at least one hidden layer".into(),
        ));
    }
    let mut model = mlp_init(sizes, activation, seed)?;
    if cfg.epochs == 0 || inputs.is_empty() {
        return Ok(model);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut codes: Vec<Vec<f64>> = inputs.to_vec();
    for layer in 0..sizes.len() - 2 {
        let (d, h) = (sizes[layer], sizes[layer + 1]);
        let mut ae = mlp_init(&[d, h, d], activation, rng.random())?;
        ae.weights[0] = model.weights[layer].clone();
        ae.biases[0] = model.biases[layer].clone();
        let layer_cfg = AeConfig {
            seed: rng.random(),
            ..cfg.clone()
        };
        let trained = train_autoencoder(&ae, &codes, &layer_cfg)?;
        model.weights[layer] = trained.weights[0].clone();
        model.biases[layer] = trained.biases[0].clone();
        let encoder = MlpModel {
            sizes: vec![d, h],
            activation,
            weights: vec![trained.weights[0].clone()],
            biases: vec![trained.biases[0].clone()],
        };
        codes = codes
            .iter()
            .map(|x| mlp_forward(&encoder, x).map(|(z, _)| z.into_iter().map(|v| apply(activation, v)).collect()))
            .collect::<Result<_>>()?;
    }
    Ok(model)
}

/// Trains a `[d, h, d]` network to reconstruct `inputs` from copies with
/// each entry zeroed with probability `cfg.corruption`.
pub fn train_autoencoder(init: &MlpModel, inputs: &[Vec<f64>], cfg: &AeConfig) -> Result<MlpModel> {
    cfg.validate()?;
    let d = init.input_dim();
    if init.layers() != 2 || init.output_dim() != d {
        return Err(Error::InvalidConfig(format!(
            "autoencoder must have shape [d, h, d], got {:?}",
            init.sizes
        )));
    }
    if cfg.epochs == 0 || inputs.is_empty() {
        return Ok(init.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let corrupted: Vec<Vec<f64>> = inputs
        .iter()
        .map(|x| {
            x.iter()
                .map(|&v| {
                    if cfg.corruption > 0.0 && rng.random::<f64>() < cfg.corruption {
                        0.0
                    } else {
                        v
                    }
                })
                .collect()
        })
        .collect();
    let sgd = SgdConfig {
        learning_rate: cfg.learning_rate,
        momentum: 0.9,
        batch_size: cfg.batch_size,
        epochs: cfg.epochs,
        seed: rng.random(),
    };
    Ok(sgd_train(init, &corrupted, inputs, &sgd)?.0)
}

fn apply(a: Activation, z: f64) -> f64 {
    match a {
        Activation::Tanh => z.tanh(),
        Activation::Relu => z.max(0.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_epochs_is_plain_init() {
        let xs = vec![vec![0.1, 0.2, 0.3]; 5];
        let cfg = AeConfig {
            epochs: 0,
            corruption: 0.0,
            ..Default::default()
        };
        let m = pretrain_stacked_autoencoders(&[3, 4, 2, 1], Activation::Tanh, &xs, &cfg, 9).unwrap();
        assert_eq!(m, mlp_init(&[3, 4, 2, 1], Activation::Tanh, 9).unwrap());
    }

    #[test]
    fn corruption_one_rejected() {
        let cfg = AeConfig {
            corruption: 1.0,
            ..Default::default()
        };
        assert!(pretrain_stacked_autoencoders(&[2, 2, 1], Activation::Tanh, &[vec![0.0, 1.0]], &cfg, 0).is_err());
    }

    #[test]
    fn needs_hidden_layer() {
        assert!(
            pretrain_stacked_autoencoders(&[2, 1], Activation::Tanh, &[vec![0.0, 1.0]], &AeConfig::default(), 0)
                .is_err()
        );
    }
}
