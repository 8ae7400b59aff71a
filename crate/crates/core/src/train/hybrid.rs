use crate::data::Dataset;
use crate::fuzzy::AnfisModel;
use crate::Result;

use super::config::{StageMse, StopReason, TrainConfig, TrainReport};
use super::gradient::loss_and_gradients;
use super::lse::{lse_consequents, mse};
use super::params::{antecedent_params, with_antecedent_params};

/// Improvement smaller than this does not reset the stall counter.
const STALL_TOLERANCE: f64 = 1e-9;
const STALL_EPOCHS: usize = 10;

#[derive(Debug, Clone)]
pub struct EpochOutcome {
    /// Model after both stages.
    pub model: AnfisModel,
    /// Model after the least-squares stage, before the gradient step. Its
    /// RMSE is [`EpochOutcome::rmse`].
    pub post_lse: AnfisModel,
    pub rmse: f64,
    pub stage_mse: StageMse,
    pub rank_warnings: usize,
}

/// One two-stage pass: least squares on the consequents, then one gradient
/// step `θ ← θ − lr·∇MSE` on the antecedent parameters. If the least-squares
/// solution fits worse than the incoming consequents (possible only through
/// the ridge term), the incoming ones are kept.
pub fn hybrid_epoch(model: &AnfisModel, data: &Dataset, learning_rate: f64) -> EpochOutcome {
    let before = mse(model, data);
    let mut fit = lse_consequents(model, data);
    let mut after = mse(&fit.model, data);
    // The ridge term can cost up to O(λ) in training error; never let the
    // consequent stage make the fit worse than what it started from.
    if !(after <= before) && before.is_finite() {
        fit.model = model.clone();
        after = before;
    }
    let next = if learning_rate == 0.0 {
        fit.model.clone()
    } else {
        let (_, grad) = loss_and_gradients(&fit.model, data);
        let mut theta = antecedent_params(&fit.model);
        for (p, g) in theta.iter_mut().zip(&grad) {
            *p -= learning_rate * g;
        }
        with_antecedent_params(&fit.model, &theta)
    };
    EpochOutcome {
        model: next,
        post_lse: fit.model,
        rmse: after.sqrt(),
        stage_mse: StageMse { before, after },
        rank_warnings: fit.rank_warnings,
    }
}

/// Repeats [`hybrid_epoch`] until the target RMSE, the epoch budget, or
/// ten epochs without an improvement of at least 1e-9. Returns the best
/// post-LSE model seen, not the last one.
pub fn train_hybrid(model: &AnfisModel, data: &Dataset, cfg: &TrainConfig) -> Result<(AnfisModel, TrainReport)> {
    cfg.validate()?;
    let mut current = model.clone();
    let mut best: Option<(f64, AnfisModel)> = None;
    let mut history = Vec::new();
    let mut stage_mse = Vec::new();
    let mut rank_warnings = 0;
    let mut since_improvement = 0;
    let mut lr = cfg.learning_rate;
    let mut stop_reason = StopReason::EpochBudget;

    for _ in 0..cfg.max_epochs {
        let out = hybrid_epoch(&current, data, lr);
        history.push(out.rmse);
        stage_mse.push(out.stage_mse);
        rank_warnings += out.rank_warnings;

        let prev_best = best.as_ref().map_or(f64::INFINITY, |b| b.0);
        if prev_best - out.rmse >= STALL_TOLERANCE || prev_best.is_infinite() {
            since_improvement = 0;
        } else {
            since_improvement += 1;
        }
        if out.rmse < prev_best || best.is_none() {
            best = Some((out.rmse, out.post_lse.clone()));
        }
        if out.rmse <= cfg.target_rmse {
            stop_reason = StopReason::TargetReached;
            break;
        }
        if since_improvement >= STALL_EPOCHS {
            stop_reason = StopReason::Stalled;
            break;
        }
        current = out.model;
        lr *= cfg.lr_decay;
    }

    let (best_rmse, best_model) = best.expect("max_epochs >= 1");
    Ok((
        best_model,
        TrainReport {
            history,
            best_rmse,
            stop_reason,
            stage_mse,
            rank_warnings,
        },
    ))
}
