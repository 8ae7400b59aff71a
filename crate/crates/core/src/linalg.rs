use nalgebra::{DMatrix, DVector};

pub(crate) struct RidgeSolution {
    pub coeffs: Vec<f64>,
    /// Cholesky pivots that are negligible relative to the largest Gram
    /// diagonal entry; a proxy for rank deficiency of the design matrix.
    pub weak_pivots: usize,
}

/// Solves `min ‖A θ − t‖² + λ‖θ‖²` through the regularised normal equations.
///
/// `gram` is AᵀA and `rhs` is Aᵀt, both already accumulated by the caller.
pub(crate) fn ridge_solve(mut gram: DMatrix<f64>, rhs: DVector<f64>, lambda: f64) -> RidgeSolution {
    let n = gram.nrows();
    let max_diag = (0..n).map(|i| gram[(i, i)]).fold(0.0_f64, f64::max);
    for i in 0..n {
        gram[(i, i)] += lambda;
    }
    let chol = match gram.clone().cholesky() {
        Some(c) => c,
        None => {
            // Only reachable with non-finite input or λ = 0; fall back to LU.
            let coeffs = gram
                .lu()
                .solve(&rhs)
                .map(|v| v.iter().copied().collect())
                .unwrap_or_else(|| vec![0.0; n]);
            return RidgeSolution { coeffs, weak_pivots: n };
        }
    };
    // A dependent column leaves a pivot of roughly λ after regularisation.
    let tol = 2.0 * lambda + 1e-10 * max_diag.max(1.0);
    let weak_pivots = (0..n)
        .filter(|&i| {
            let l = chol.l_dirty()[(i, i)];
            l * l <= tol
        })
        .count();
    let coeffs = chol.solve(&rhs).iter().copied().collect();
    RidgeSolution { coeffs, weak_pivots }
}

/// Accumulates AᵀA and Aᵀt row by row.
pub(crate) struct NormalEquations {
    pub gram: DMatrix<f64>,
    pub rhs: DVector<f64>,
}

impl NormalEquations {
    pub fn new(dim: usize) -> Self {
        Self {
            gram: DMatrix::zeros(dim, dim),
            rhs: DVector::zeros(dim),
        }
    }

    pub fn add_row(&mut self, row: &[f64], target: f64) {
        let n = row.len();
        for i in 0..n {
            let ri = row[i];
            if ri == 0.0 {
                continue;
            }
            self.rhs[i] += ri * target;
            for j in i..n {
                self.gram[(i, j)] += ri * row[j];
            }
        }
    }

    pub fn solve(mut self, lambda: f64) -> RidgeSolution {
        let n = self.gram.nrows();
        for i in 0..n {
            for j in 0..i {
                self.gram[(i, j)] = self.gram[(j, i)];
            }
        }
        ridge_solve(self.gram, self.rhs, lambda)
    }
}
