use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub rmse: f64,
    pub mae: f64,
    /// Percent; `None` when any actual value is zero.
    pub mape: Option<f64>,
}

impl MetricsReport {
    pub fn mape_omitted(&self) -> bool {
        self.mape.is_none()
    }
}

pub fn metrics(predicted: &[f64], actual: &[f64]) -> Result<MetricsReport> {
    if predicted.len() != actual.len() {
        return Err(Error::DimensionMismatch {
            expected: actual.len(),
            got: predicted.len(),
        });
    }
    if actual.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let n = actual.len() as f64;
    let mut sq = 0.0;
    let mut abs = 0.0;
    let mut pct = 0.0;
    let mut has_zero = false;
    for (&p, &a) in predicted.iter().zip(actual) {
        let e = p - a;
        sq += e * e;
        abs += e.abs();
        if a == 0.0 {
            has_zero = true;
        } else {
            pct += e.abs() / a.abs();
        }
    }
    Ok(MetricsReport {
        rmse: (sq / n).sqrt(),
        mae: abs / n,
        mape: (!has_zero).then(|| pct / n * 100.0),
    })
}

/// Standard deviation with the population (1/n) convention used throughout
/// the crate.
pub fn population_std(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hand_values() {
        let m = metrics(&[1.0, 2.0], &[1.0, 2.0]).unwrap();
        assert_eq!((m.rmse, m.mae), (0.0, 0.0));
        let m = metrics(&[0.0, 0.0], &[3.0, 4.0]).unwrap();
        assert!((m.rmse - 12.5f64.sqrt()).abs() < 1e-15);
        assert!((m.rmse - 3.535534).abs() < 1e-6);
        assert_eq!(m.mae, 3.5);
        assert_eq!(m.mape, Some(100.0));
    }

    #[test]
    fn mape_omitted_on_zero_actual() {
        let m = metrics(&[1.0, 1.0], &[0.0, 2.0]).unwrap();
        assert!(m.mape_omitted());
    }

    #[test]
    fn errors() {
        assert!(metrics(&[1.0], &[1.0, 2.0]).is_err());
        assert!(metrics(&[], &[]).is_err());
    }

    proptest! {
        #[test]
        fn agrees_with_naive(pairs in proptest::collection::vec((-100.0..100.0f64, 0.5..100.0f64), 1..60)) {
            let (p, a): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            let m = metrics(&p, &a).unwrap();
            let n = a.len() as f64;
            let mut rmse = 0.0;
            for i in 0..a.len() { rmse += (p[i] - a[i]).powi(2) / n; }
            let rmse = rmse.sqrt();
            let mae = (0..a.len()).map(|i| (p[i] - a[i]).abs()).sum::<f64>() / n;
            prop_assert!((m.rmse - rmse).abs() <= 1e-12 * rmse.max(1.0));
            prop_assert!((m.mae - mae).abs() <= 1e-12 * mae.max(1.0));
            prop_assert!(m.rmse >= 0.0 && m.mae >= 0.0 && m.mape.unwrap() >= 0.0);
        }
    }
}
