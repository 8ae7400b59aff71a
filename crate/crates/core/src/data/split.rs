use super::Dataset;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub train: Dataset,
    pub validation: Dataset,
    pub test: Dataset,
}

/// Contiguous chronological split. Validation and test sizes are floored;
/// the remainder goes to train.
pub fn split_chrono(data: &Dataset, fractions: (f64, f64, f64)) -> Result<Split> {
    let (tr, va, te) = fractions;
    if !(tr > 0.0 && va > 0.0 && te > 0.0) || ((tr + va + te) - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidConfig(format!(
            "split fractions must be positive and sum to 1, got {fractions:?}"
        )));
    }
    let n = data.len();
    let n_val = (va * n as f64).floor() as usize;
    let n_test = (te * n as f64).floor() as usize;
    let n_train = n - n_val - n_test;
    if n_train == 0 || n_val == 0 || n_test == 0 {
        return Err(Error::InsufficientData(format!(
            "{n} rows give an empty split ({n_train}/{n_val}/{n_test})"
        )));
    }
    Ok(Split {
        train: data.slice(0..n_train)?,
        validation: data.slice(n_train..n_train + n_val)?,
        test: data.slice(n_train + n_val..n)?,
    })
}
