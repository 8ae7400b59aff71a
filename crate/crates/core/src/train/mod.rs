//! ANFIS training.
//!
//! The hybrid trainer alternates a least-squares solve for the rule
//! consequents with a gradient step on the membership parameters. PSO-LSE
//! and clonal selection search the membership parameters directly, scoring
//! each candidate by its RMSE after the same least-squares solve.

mod clonal;
mod config;
mod gradient;
mod hybrid;
mod lse;
mod params;
mod pso;

pub use crate::data::Dataset;
pub use clonal::{affinity, train_clonal};
pub use config::{ClonalConfig, PsoConfig, StageMse, StopReason, TrainConfig, TrainReport};
pub use gradient::loss_and_gradients;
pub use hybrid::{hybrid_epoch, train_hybrid, EpochOutcome};
pub use lse::{lse_consequents, mse, LseFit, LSE_RIDGE};
pub use params::{antecedent_params, lse_fitness, with_antecedent_params, ParamBounds};
pub use pso::train_pso_lse;
