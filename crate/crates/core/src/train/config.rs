use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub max_epochs: usize,
    /// Stop once the post-LSE training RMSE is at or below this value.
    pub target_rmse: f64,
    pub learning_rate: f64,
    /// Multiplies the learning rate after every epoch.
    pub lr_decay: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            max_epochs: 100,
            target_rmse: 0.0,
            learning_rate: 0.01,
            lr_decay: 1.0,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_epochs == 0 {
            return Err(Error::InvalidConfig("max_epochs must be >= 1".into()));
        }
        if !(self.target_rmse >= 0.0) {
            return Err(Error::InvalidConfig("target_rmse must be >= 0".into()));
        }
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidConfig("learning_rate must be finite and >= 0".into()));
        }
        if !(self.lr_decay > 0.0 && self.lr_decay <= 1.0) {
            return Err(Error::InvalidConfig("lr_decay must lie in (0, 1]".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PsoConfig {
    pub swarm_size: usize,
    pub max_iters: usize,
    pub w_min: f64,
    pub w_max: f64,
    pub c1: f64,
    pub c2: f64,
    /// Mean distance to the centroid, in bound-normalised coordinates,
    /// below which the swarm is re-diversified.
    pub diversity_threshold: f64,
    pub seed: u64,
}

impl Default for PsoConfig {
    fn default() -> Self {
        Self {
            swarm_size: 20,
            max_iters: 60,
            w_min: 0.4,
            w_max: 0.9,
            c1: 1.5,
            c2: 1.5,
            diversity_threshold: 0.01,
            seed: 0,
        }
    }
}

impl PsoConfig {
    pub fn validate(&self) -> Result<()> {
        if self.swarm_size < 2 {
            return Err(Error::InvalidConfig("swarm_size must be >= 2".into()));
        }
        if !(self.w_min <= self.w_max) {
            return Err(Error::InvalidConfig("w_min must be <= w_max".into()));
        }
        if !(self.c1 >= 0.0 && self.c2 >= 0.0) {
            return Err(Error::InvalidConfig("c1 and c2 must be >= 0".into()));
        }
        if !(self.diversity_threshold >= 0.0) {
            return Err(Error::InvalidConfig("diversity_threshold must be >= 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClonalConfig {
    pub population_size: usize,
    pub generations: usize,
    /// β in `clones = ⌈β·population / rank⌉`.
    pub clone_factor: f64,
    pub selection_count: usize,
    /// Hypermutation standard deviation as a fraction of each parameter's
    /// bound width.
    pub mutation_scale: f64,
    /// Lower limit on `1 − normalised affinity` so the best lineage keeps
    /// exploring.
    pub mutation_floor: f64,
    pub replacement_fraction: f64,
    pub seed: u64,
}

impl Default for ClonalConfig {
    fn default() -> Self {
        Self {
            population_size: 20,
            generations: 60,
            clone_factor: 0.5,
            selection_count: 8,
            mutation_scale: 0.2,
            mutation_floor: 0.1,
            replacement_fraction: 0.2,
            seed: 0,
        }
    }
}

impl ClonalConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population_size == 0 {
            return Err(Error::InvalidConfig("population_size must be >= 1".into()));
        }
        if self.selection_count == 0 || self.selection_count > self.population_size {
            return Err(Error::InvalidConfig(
                "selection_count must lie in 1..=population_size".into(),
            ));
        }
        if !(self.clone_factor > 0.0) {
            return Err(Error::InvalidConfig("clone_factor must be > 0".into()));
        }
        if !(self.mutation_scale > 0.0) {
            return Err(Error::InvalidConfig("mutation_scale must be > 0".into()));
        }
        if !(0.0..=1.0).contains(&self.mutation_floor) {
            return Err(Error::InvalidConfig("mutation_floor must lie in [0, 1]".into()));
        }
        if !(0.0..1.0).contains(&self.replacement_fraction) {
            return Err(Error::InvalidConfig("replacement_fraction must lie in [0, 1)".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    TargetReached,
    EpochBudget,
    Stalled,
}

/// Training MSE on either side of a least-squares stage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StageMse {
    pub before: f64,
    pub after: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    /// Training RMSE per epoch (hybrid: measured after the LSE stage;
    /// metaheuristics: global best after each iteration, starting with the
    /// initial population).
    pub history: Vec<f64>,
    pub best_rmse: f64,
    pub stop_reason: StopReason,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub stage_mse: Vec<StageMse>,
    /// Weak pivots seen across all least-squares solves.
    #[serde(default)]
    pub rank_warnings: usize,
}

#[derive(Serialize)]
struct Summary<'a> {
    best_rmse: f64,
    epochs: usize,
    stop_reason: &'a StopReason,
}

impl TrainReport {
    pub fn epochs(&self) -> usize {
        self.history.len()
    }

    /// `{best_rmse, epochs, stop_reason}`.
    pub fn summary_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&Summary {
            best_rmse: self.best_rmse,
            epochs: self.epochs(),
            stop_reason: &self.stop_reason,
        })?)
    }

    /// Two columns, `epoch,rmse`, epochs numbered from 1.
    pub fn write_history_csv(&self, writer: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["epoch", "rmse"])?;
        for (i, r) in self.history.iter().enumerate() {
            w.write_record([(i + 1).to_string(), r.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}
