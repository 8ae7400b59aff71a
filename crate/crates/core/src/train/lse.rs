use crate::data::Dataset;
use crate::fuzzy::AnfisModel;
use crate::linalg::NormalEquations;

/// Ridge term added to the normal equations of the consequent solve.
pub const LSE_RIDGE: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct LseFit {
    pub model: AnfisModel,
    /// Near-zero Cholesky pivots; non-zero means the design matrix was
    /// (numerically) rank deficient and the ridge term picked the solution.
    pub rank_warnings: usize,
}

/// Layer-4 design row for one sample: `w̄_i · [1, x]` for each rule, rule
/// major.
pub(crate) fn design_row(model: &AnfisModel, x: &[f64], row: &mut [f64]) {
    let (_, _, normalized, _) = model
        .normalized_firing(x)
        .expect("dataset dimension checked against model");
    let k = x.len() + 1;
    for (chunk, wn) in row.chunks_mut(k).zip(normalized) {
        chunk[0] = wn;
        for (c, xi) in chunk[1..].iter_mut().zip(x) {
            *c = wn * xi;
        }
    }
}

/// Replaces every consequent with the least-squares optimum for the current
/// antecedents. Antecedents are untouched.
///
/// Panics if the dataset's input dimension differs from the model's.
pub fn lse_consequents(model: &AnfisModel, data: &Dataset) -> LseFit {
    assert_eq!(data.input_dim(), model.input_dim(), "dataset/model input dimension");
    let p = model.consequent_len();
    let mut ne = NormalEquations::new(p);
    let mut row = vec![0.0; p];
    for (x, t) in data.rows() {
        design_row(model, x, &mut row);
        ne.add_row(&row, t);
    }
    let sol = ne.solve(LSE_RIDGE);
    LseFit {
        model: model
            .with_consequents(&sol.coeffs)
            .expect("solution length equals consequent count"),
        rank_warnings: sol.weak_pivots,
    }
}

/// Training mean squared error.
pub fn mse(model: &AnfisModel, data: &Dataset) -> f64 {
    let sq: f64 = data
        .rows()
        .map(|(x, t)| {
            let e = model.try_predict(x).expect("dataset dimension checked against model") - t;
            e * e
        })
        .sum();
    sq / data.len() as f64
}
