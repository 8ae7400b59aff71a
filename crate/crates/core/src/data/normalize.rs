use serde::{Deserialize, Serialize};

use super::metrics::population_std;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormalizationKind {
    MinMax,
    ZScore,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum NormalizationParams {
    MinMax { min: f64, max: f64 },
    ZScore { mean: f64, std: f64 },
}

impl NormalizationParams {
    pub fn fit(values: &[f64], kind: NormalizationKind) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyDataset);
        }
        match kind {
            NormalizationKind::MinMax => {
                let (min, max) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                    (lo.min(v), hi.max(v))
                });
                if max <= min {
                    return Err(Error::InvalidData("min-max normalization of a constant series".into()));
                }
                Ok(Self::MinMax { min, max })
            }
            NormalizationKind::ZScore => {
                let mean = values.iter().sum::<f64>() / values.len() as f64;
                let std = population_std(values);
                if std <= 0.0 {
                    return Err(Error::InvalidData(
                        "z-score normalization of a zero-variance series".into(),
                    ));
                }
                Ok(Self::ZScore { mean, std })
            }
        }
    }

    pub fn apply(&self, v: f64) -> f64 {
        match *self {
            Self::MinMax { min, max } => (v - min) / (max - min),
            Self::ZScore { mean, std } => (v - mean) / std,
        }
    }

    pub fn invert(&self, v: f64) -> f64 {
        match *self {
            Self::MinMax { min, max } => v * (max - min) + min,
            Self::ZScore { mean, std } => v * std + mean,
        }
    }
}

pub fn normalize(values: &[f64], kind: NormalizationKind) -> Result<(Vec<f64>, NormalizationParams)> {
    let params = NormalizationParams::fit(values, kind)?;
    Ok((values.iter().map(|&v| params.apply(v)).collect(), params))
}

pub fn denormalize(values: &[f64], params: &NormalizationParams) -> Vec<f64> {
    values.iter().map(|&v| params.invert(v)).collect()
}
