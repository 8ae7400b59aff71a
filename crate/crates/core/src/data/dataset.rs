use crate::{Error, Result};

/// Supervised rows of `(input vector, scalar target)` with a common input
/// dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    inputs: Vec<Vec<f64>>,
    targets: Vec<f64>,
}

impl Dataset {
    pub fn new(inputs: Vec<Vec<f64>>, targets: Vec<f64>) -> Result<Self> {
        if inputs.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if inputs.len() != targets.len() {
            return Err(Error::InvalidData(format!(
                "{} input rows but {} targets",
                inputs.len(),
                targets.len()
            )));
        }
        let dim = inputs[0].len();
        if dim == 0 {
            return Err(Error::InvalidData("input rows are empty".into()));
        }
        if let Some(i) = inputs.iter().position(|r| r.len() != dim) {
            return Err(Error::InvalidData(format!(
                "row {i} has {} inputs, expected {dim}",
                inputs[i].len()
            )));
        }
        Ok(Self { inputs, targets })
    }

    pub fn inputs(&self) -> &[Vec<f64>] {
        &self.inputs
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn input_dim(&self) -> usize {
        self.inputs[0].len()
    }

    pub fn rows(&self) -> impl Iterator<Item = (&[f64], f64)> {
        self.inputs.iter().map(Vec::as_slice).zip(self.targets.iter().copied())
    }

    /// Contiguous sub-range of rows; errors when empty.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Result<Self> {
        Self::new(self.inputs[range.clone()].to_vec(), self.targets[range].to_vec())
    }

    /// Applies `f` to every input value and `g` to every target.
    pub fn map_values(&self, f: impl Fn(f64) -> f64, g: impl Fn(f64) -> f64) -> Self {
        Self {
            inputs: self.inputs.iter().map(|r| r.iter().map(|&v| f(v)).collect()).collect(),
            targets: self.targets.iter().map(|&t| g(t)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(matches!(Dataset::new(vec![], vec![]), Err(Error::EmptyDataset)));
        assert!(Dataset::new(vec![vec![1.0], vec![1.0, 2.0]], vec![0.0, 0.0]).is_err());
        assert!(Dataset::new(vec![vec![1.0]], vec![0.0, 0.0]).is_err());
        let d = Dataset::new(vec![vec![1.0, 2.0]], vec![3.0]).unwrap();
        assert_eq!(d.input_dim(), 2);
        assert_eq!(d.rows().next(), Some((&[1.0, 2.0][..], 3.0)));
    }
}
