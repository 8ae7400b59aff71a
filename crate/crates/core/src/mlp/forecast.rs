use serde::{Deserialize, Serialize};

use super::model::MlpModel;
use crate::data::NormalizationParams;
use crate::{Error, Predictor, Result};

/// A one-step MLP forecaster over a window of lags, with the normalization
/// it was trained under (if any).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpForecaster {
    pub model: MlpModel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalization: Option<NormalizationParams>,
}

impl MlpForecaster {
    pub fn lags(&self) -> usize {
        self.model.input_dim()
    }

    /// One-step forecast from lags in series units.
    pub fn predict_next(&self, lags: &[f64]) -> Result<f64> {
        let x: Vec<f64> = match &self.normalization {
            Some(n) => lags.iter().map(|&v| n.apply(v)).collect(),
            None => lags.to_vec(),
        };
        let y = self.model.run(&x)?[0];
        Ok(match &self.normalization {
            Some(n) => n.invert(y),
            None => y,
        })
    }
}

impl Predictor for MlpForecaster {
    fn predict(&self, x: &[f64]) -> f64 {
        self.predict_next(x).expect("input dimension matches model")
    }
}

/// Recursive multi-step forecast: predict one step from the last `p`
/// values, append the prediction, repeat `horizon` times.
pub fn forecast_series(forecaster: &MlpForecaster, series: &[f64], horizon: usize) -> Result<Vec<f64>> {
    let p = forecaster.lags();
    if series.len() < p {
        return Err(Error::SeriesTooShort {
            needed: p,
            got: series.len(),
        });
    }
    if horizon == 0 {
        return Err(Error::InvalidConfig("horizon must be >= 1".into()));
    }
    let mut window: Vec<f64> = series[series.len() - p..].to_vec();
    let mut out = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        let y = forecaster.predict_next(&window)?;
        out.push(y);
        window.remove(0);
        window.push(y);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mlp::{mlp_init, Activation};

    #[test]
    fn recursion_prefix() {
        let f = MlpForecaster {
            model: mlp_init(&[3, 5, 1], Activation::Tanh, 1).unwrap(),
            normalization: Some(NormalizationParams::MinMax { min: -1.0, max: 2.0 }),
        };
        let s = [0.1, 0.5, 0.9, 1.3, 0.2];
        let one = forecast_series(&f, &s, 1).unwrap();
        let three = forecast_series(&f, &s, 3).unwrap();
        assert_eq!(one[0], three[0]);
        assert_eq!(three.len(), 3);
    }

    #[test]
    fn too_short() {
        let f = MlpForecaster {
            model: mlp_init(&[3, 1], Activation::Tanh, 1).unwrap(),
            normalization: None,
        };
        assert!(matches!(
            forecast_series(&f, &[1.0, 2.0], 1),
            Err(Error::SeriesTooShort { .. })
        ));
    }
}
