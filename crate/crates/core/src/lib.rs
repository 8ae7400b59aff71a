//! Hybrid neuro-fuzzy time-series forecasting.
//!
//! The crate is organised around the pieces of a modular forecaster:
//!
//! * [`fuzzy`] — a five-layer Sugeno ANFIS with an explicit per-layer trace.
//! * [`train`] — hybrid least-squares / gradient training plus PSO-LSE and
//!   clonal-selection trainers.
//! * [`fcm`] — fuzzy cognitive map dynamics, consonance and GA weight learning.
//! * [`mlp`] — a compact feedforward forecaster with stacked autoencoder
//!   pretraining.
//! * [`pipeline`] — the quantitative and qualitative branches joined by an
//!   ANFIS aggregator, with graceful degradation.
//! * [`data`] — series ingestion, windowing, normalization, metrics,
//!   baselines, synthetic benchmarks and the comparison harness.
//!
//! Population-level fitness evaluation runs on rayon when the `parallel`
//! feature is enabled (the default) and sequentially otherwise; results are
//! bit-identical either way.

pub mod data;
pub mod error;
pub mod exec;
pub mod fcm;
pub mod fuzzy;
pub(crate) mod linalg;
pub mod mlp;
pub mod pipeline;
pub mod train;

pub use error::{Error, Result};

/// Anything that maps an input vector to a scalar forecast.
pub trait Predictor {
    fn predict(&self, x: &[f64]) -> f64;
}
