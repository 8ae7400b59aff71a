//! Series ingestion, windowing, normalization, metrics, baselines and
//! synthetic benchmarks.

mod compare;
mod dataset;
mod metrics;
mod normalize;
mod ols;
mod series;
mod split;
mod synth;
mod window;

pub use compare::{compare, format_table, rows_to_csv, CompareConfig, CompareRow, ModelSpec};
pub use dataset::Dataset;
pub use metrics::{metrics, population_std, MetricsReport};
pub use normalize::{denormalize, normalize, NormalizationKind, NormalizationParams};
pub use ols::{ols_baseline, OlsModel};
pub use series::{load_csv, TimeSeries, Timestamp};
pub use split::{split_chrono, Split};
pub use synth::{synth_mackey_glass, synth_sine_noise};
pub use window::{make_windows, WindowSpec};
