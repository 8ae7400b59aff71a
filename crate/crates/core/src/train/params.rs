use crate::data::Dataset;
use crate::fuzzy::{AnfisModel, MembershipFunction};

use super::lse::{lse_consequents, mse, LseFit};

/// Antecedent parameters, variable-major then term-major, each term
/// contributing its [`MembershipFunction::params`].
pub fn antecedent_params(model: &AnfisModel) -> Vec<f64> {
    model
        .variables()
        .iter()
        .flat_map(|v| v.terms.iter().flat_map(|t| t.params()))
        .collect()
}

/// Copy of `model` with new antecedent parameters, repaired into their
/// valid domains (positive widths, ordered triangle feet).
///
/// Panics when `params` is shorter than the model's parameter count.
pub fn with_antecedent_params(model: &AnfisModel, params: &[f64]) -> AnfisModel {
    let mut out = model.clone();
    let mut k = 0;
    for v in out.variables_mut() {
        for t in v.terms.iter_mut() {
            let n = t.param_count();
            *t = t.with_params(&params[k..k + n]).repaired();
            k += n;
        }
    }
    out
}

/// Box constraints for metaheuristic search over antecedent parameters.
///
/// Positions (centres, bell `c`, triangle vertices) may range over the
/// variable's range widened to 1.5×; widths (gaussian σ, bell `a`) over
/// `[1e-3·range, range]`; the bell slope over `[0.5, 4]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamBounds {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl ParamBounds {
    pub fn for_model(model: &AnfisModel) -> Self {
        let mut lo = Vec::new();
        let mut hi = Vec::new();
        for v in model.variables() {
            let r = v.width();
            let pos = (v.range[0] - 0.25 * r, v.range[1] + 0.25 * r);
            let width = (1e-3 * r, r);
            for t in &v.terms {
                let kinds: &[(f64, f64)] = match t {
                    MembershipFunction::Gaussian { .. } => &[pos, width],
                    MembershipFunction::Bell { .. } => &[width, (0.5, 4.0), pos],
                    MembershipFunction::Triangular { .. } => &[pos, pos, pos],
                };
                for &(l, h) in kinds {
                    lo.push(l);
                    hi.push(h);
                }
            }
        }
        Self { lo, hi }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn clamp(&self, x: &mut [f64]) {
        for ((v, l), h) in x.iter_mut().zip(&self.lo).zip(&self.hi) {
            *v = v.clamp(*l, *h);
        }
    }

    pub fn widths(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(l, h)| h - l).collect()
    }

    pub(crate) fn sample(&self, rng: &mut impl rand::Rng) -> Vec<f64> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(&l, &h)| if h > l { rng.random_range(l..h) } else { l })
            .collect()
    }
}

/// Instantiates a candidate, solves its consequents and scores it by
/// training RMSE. Non-finite scores map to +∞ so they never win.
pub fn lse_fitness(template: &AnfisModel, params: &[f64], data: &Dataset) -> (f64, LseFit) {
    let fit = lse_consequents(&with_antecedent_params(template, params), data);
    let rmse = mse(&fit.model, data).sqrt();
    (if rmse.is_finite() { rmse } else { f64::INFINITY }, fit)
}
