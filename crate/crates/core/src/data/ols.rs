use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::linalg::NormalEquations;
use crate::{Error, Predictor, Result};

const OLS_RIDGE: f64 = 1e-10;

/// Linear regression of the target on `[1, inputs…]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OlsModel {
    /// Intercept first.
    pub coefficients: Vec<f64>,
}

pub fn ols_baseline(train: &Dataset) -> Result<OlsModel> {
    let p = train.input_dim() + 1;
    if train.len() <= p {
        return Err(Error::InsufficientData(format!(
            "OLS with {} inputs needs more than {p} rows, got {}",
            p - 1,
            train.len()
        )));
    }
    let mut ne = NormalEquations::new(p);
    let mut row = vec![1.0; p];
    for (x, t) in train.rows() {
        row[1..].copy_from_slice(x);
        ne.add_row(&row, t);
    }
    Ok(OlsModel {
        coefficients: ne.solve(OLS_RIDGE).coeffs,
    })
}

impl OlsModel {
    pub fn predict_all(&self, inputs: &[Vec<f64>]) -> Vec<f64> {
        inputs.iter().map(|x| self.predict(x)).collect()
    }
}

impl Predictor for OlsModel {
    fn predict(&self, x: &[f64]) -> f64 {
        self.coefficients[1..]
            .iter()
            .zip(x)
            .fold(self.coefficients[0], |acc, (c, v)| acc + c * v)
    }
}
