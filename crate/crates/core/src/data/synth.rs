use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::TimeSeries;
use crate::{Error, Result};

const MIN_LEN: usize = 100;
const MG_TAU: usize = 17;
const MG_DISCARD: usize = 200;
const MG_HISTORY: f64 = 1.2;

fn mg_rate(x: f64, delayed: f64) -> f64 {
    0.2 * delayed / (1.0 + delayed.powi(10)) - 0.1 * x
}

/// Mackey–Glass series (τ = 17) integrated with classic RK4 at unit step.
///
/// The delayed term at the half step is the mean of its two neighbouring
/// samples; the history before t = 0 is held at 1.2. The first 200 samples
/// are discarded. The system is deterministic, so `seed` has no effect; it
/// is accepted to keep the generator signatures uniform.
pub fn synth_mackey_glass(n: usize, _seed: u64) -> Result<TimeSeries> {
    if n < MIN_LEN {
        return Err(Error::InvalidConfig(format!("need n >= {MIN_LEN}, got {n}")));
    }
    let total = n + MG_DISCARD;
    let mut x = Vec::with_capacity(total);
    x.push(MG_HISTORY);
    let delayed = |x: &[f64], t: usize| if t >= MG_TAU { x[t - MG_TAU] } else { MG_HISTORY };
    for t in 0..total - 1 {
        let xt = x[t];
        let d0 = delayed(&x, t);
        let d1 = delayed(&x, t + 1);
        let dh = 0.5 * (d0 + d1);
        let k1 = mg_rate(xt, d0);
        let k2 = mg_rate(xt + 0.5 * k1, dh);
        let k3 = mg_rate(xt + 0.5 * k2, dh);
        let k4 = mg_rate(xt + k3, d1);
        x.push(xt + (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0);
    }
    TimeSeries::from_values(x.split_off(MG_DISCARD))
}

/// `sin(2πt/50)` plus i.i.d. gaussian noise of standard deviation
/// `noise_sigma`.
pub fn synth_sine_noise(n: usize, noise_sigma: f64, seed: u64) -> Result<TimeSeries> {
    if n < MIN_LEN {
        return Err(Error::InvalidConfig(format!("need n >= {MIN_LEN}, got {n}")));
    }
    if !(noise_sigma >= 0.0 && noise_sigma.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "noise sigma must be >= 0, got {noise_sigma}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, noise_sigma).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let values = (0..n)
        .map(|t| {
            let phase = (t % 50) as f64 / 50.0;
            (2.0 * std::f64::consts::PI * phase).sin() + if noise_sigma > 0.0 { noise.sample(&mut rng) } else { 0.0 }
        })
        .collect();
    TimeSeries::from_values(values)
}
