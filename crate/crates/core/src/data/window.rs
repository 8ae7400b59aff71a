use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::{Error, Result};

/// Lag window length and forecast horizon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub lags: usize,
    pub horizon: usize,
}

impl WindowSpec {
    pub fn new(lags: usize, horizon: usize) -> Result<Self> {
        let s = Self { lags, horizon };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.lags == 0 || self.horizon == 0 {
            return Err(Error::InvalidConfig(format!(
                "window needs lags >= 1 and horizon >= 1, got {self:?}"
            )));
        }
        Ok(())
    }

    /// Number of supervised rows a series of length `n` yields.
    pub fn row_count(&self, n: usize) -> usize {
        (n + 1).saturating_sub(self.lags + self.horizon)
    }
}

/// Rows `([v[t−p+1], …, v[t]], v[t+h])` for every valid `t`.
pub fn make_windows(values: &[f64], spec: WindowSpec) -> Result<Dataset> {
    spec.validate()?;
    let rows = spec.row_count(values.len());
    if rows == 0 {
        return Err(Error::SeriesTooShort {
            needed: spec.lags + spec.horizon,
            got: values.len(),
        });
    }
    let (inputs, targets) = (0..rows)
        .map(|s| {
            let end = s + spec.lags;
            (values[s..end].to_vec(), values[end + spec.horizon - 1])
        })
        .unzip();
    Dataset::new(inputs, targets)
}
