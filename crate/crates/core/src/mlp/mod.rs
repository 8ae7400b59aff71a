//! Quantitative branch: a compact feedforward network trained by
//! backpropagation, optional greedy denoising-autoencoder pretraining, and
//! recursive windowed forecasting.

mod autoencoder;
mod forecast;
mod model;
mod sgd;

pub use autoencoder::{pretrain_stacked_autoencoders, train_autoencoder, AeConfig};
pub use forecast::{forecast_series, MlpForecaster};
pub use model::{mlp_backward, mlp_forward, mlp_init, Activation, ForwardCache, MlpGradients, MlpModel};
pub use sgd::{sgd_train, SgdConfig};
