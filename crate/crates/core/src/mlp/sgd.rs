use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::model::{mlp_backward, MlpModel};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SgdConfig {
    pub learning_rate: f64,
    pub momentum: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for SgdConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.05,
            momentum: 0.9,
            batch_size: 16,
            epochs: 200,
            seed: 0,
        }
    }
}

impl SgdConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidConfig("learning_rate must be finite and >= 0".into()));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::InvalidConfig("momentum must lie in [0, 1)".into()));
        }
        if self.batch_size == 0 || self.epochs == 0 {
            return Err(Error::InvalidConfig("batch_size and epochs must be >= 1".into()));
        }
        Ok(())
    }
}

/// Mini-batch SGD with classical momentum on `(1/B)·Σ‖ŷ − t‖²`.
///
/// Rows are reshuffled every epoch with a generator seeded from
/// `cfg.seed`. The returned history holds the full-dataset loss at the end
/// of each epoch.
pub fn sgd_train(
    model: &MlpModel,
    inputs: &[Vec<f64>],
    targets: &[Vec<f64>],
    cfg: &SgdConfig,
) -> Result<(MlpModel, Vec<f64>)> {
    cfg.validate()?;
    model.validate()?;
    if inputs.is_empty() || inputs.len() != targets.len() {
        return Err(Error::InvalidData(
            "training set must be non-empty with one target per row".into(),
        ));
    }
    let mut m = model.clone();
    let mut vel_w: Vec<Vec<f64>> = m.weights.iter().map(|w| vec![0.0; w.len()]).collect();
    let mut vel_b: Vec<Vec<f64>> = m.biases.iter().map(|b| vec![0.0; b.len()]).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..inputs.len()).collect();
    let mut history = Vec::with_capacity(cfg.epochs);
    let mut bx = Vec::with_capacity(cfg.batch_size);
    let mut bt = Vec::with_capacity(cfg.batch_size);

    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        for chunk in order.chunks(cfg.batch_size) {
            bx.clear();
            bt.clear();
            for &i in chunk {
                bx.push(inputs[i].clone());
                bt.push(targets[i].clone());
            }
            let (_, g) = mlp_backward(&m, &bx, &bt)?;
            for ((w, v), gw) in m.weights.iter_mut().zip(&mut vel_w).zip(&g.weights) {
                for ((wi, vi), gi) in w.iter_mut().zip(v.iter_mut()).zip(gw) {
                    *vi = cfg.momentum * *vi - cfg.learning_rate * gi;
                    *wi += *vi;
                }
            }
            for ((b, v), gb) in m.biases.iter_mut().zip(&mut vel_b).zip(&g.biases) {
                for ((bi, vi), gi) in b.iter_mut().zip(v.iter_mut()).zip(gb) {
                    *vi = cfg.momentum * *vi - cfg.learning_rate * gi;
                    *bi += *vi;
                }
            }
        }
        history.push(mlp_backward(&m, inputs, targets)?.0);
    }
    Ok((m, history))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mlp::{mlp_init, Activation};

    fn line() -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let xs: Vec<Vec<f64>> = (0..8).map(|i| vec![i as f64 / 8.0]).collect();
        let ts = xs.iter().map(|x| vec![0.5 * x[0] - 0.1]).collect();
        (xs, ts)
    }

    #[test]
    fn zero_learning_rate_leaves_model() {
        let (xs, ts) = line();
        let m = mlp_init(&[1, 4, 1], Activation::Tanh, 2).unwrap();
        let cfg = SgdConfig {
            learning_rate: 0.0,
            epochs: 3,
            ..Default::default()
        };
        let (out, hist) = sgd_train(&m, &xs, &ts, &cfg).unwrap();
        assert_eq!(out, m);
        assert_eq!(hist.len(), 3);
    }

    #[test]
    fn full_batch_single_step() {
        let (xs, ts) = line();
        let m = mlp_init(&[1, 1], Activation::Tanh, 2).unwrap();
        let cfg = SgdConfig {
            learning_rate: 0.1,
            momentum: 0.0,
            batch_size: xs.len(),
            epochs: 1,
            seed: 0,
        };
        let (out, _) = sgd_train(&m, &xs, &ts, &cfg).unwrap();
        // Shuffling does not matter for a single full batch up to summation order.
        let (_, g) = mlp_backward(&m, &xs, &ts).unwrap();
        for (a, (w, gw)) in out.weights[0].iter().zip(m.weights[0].iter().zip(&g.weights[0])) {
            assert!((a - (w - 0.1 * gw)).abs() < 1e-12);
        }
        assert!((out.biases[0][0] - (0.0 - 0.1 * g.biases[0][0])).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_config() {
        assert!(SgdConfig {
            momentum: 1.0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(SgdConfig {
            batch_size: 0,
            ..Default::default()
        }
        .validate()
        .is_err());
    }
}
