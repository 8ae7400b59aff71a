//! The modular forecaster: a quantitative MLP branch with adequacy
//! verification and a qualitative FCM branch with consonance, joined by an
//! ANFIS aggregator (or a consonance-weighted blend).
//!
//! Branches run independently. A failing branch is recorded in the report
//! and the surviving branch still produces a final forecast; only when
//! every branch fails does the run return an error.

use serde::{Deserialize, Serialize};

use crate::data::{make_windows, metrics, population_std, Dataset, NormalizationKind, NormalizationParams, WindowSpec};
use crate::fcm::{consonance, event_encode, run, ConceptMap, Event, FcmForecast};
use crate::fuzzy::{init_from_data, AnfisModel};
use crate::mlp::{
    forecast_series, mlp_init, pretrain_stacked_autoencoders, sgd_train, Activation, AeConfig, MlpForecaster, SgdConfig,
};
use crate::train::{train_hybrid, TrainConfig};
use crate::{exec, Error, Predictor, Result};

/// Smallest history accepted by [`build_aggregator`].
pub const MIN_AGGREGATOR_HISTORY: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AggregatorMode {
    Anfis,
    FallbackBlend,
}

/// One past observation used to fit the aggregator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistoryRow {
    pub dl: f64,
    pub fcm_activation: f64,
    pub consonance: f64,
    pub actual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    /// Largest acceptable validation RMSE relative to the validation
    /// target standard deviation.
    pub adequacy_threshold: f64,
    pub enable_dl: bool,
    pub enable_fcm: bool,
    pub aggregator_mode: AggregatorMode,
    /// Drop an inadequate DL forecast from aggregation instead of only
    /// flagging it.
    pub suppress_inadequate: bool,
    pub window: WindowSpec,
    pub validation_fraction: f64,
    pub mlp_hidden: Vec<usize>,
    pub mlp_activation: Activation,
    pub sgd: SgdConfig,
    pub pretrain: Option<AeConfig>,
    pub concept_map: Option<ConceptMap>,
    pub fcm_target: String,
    pub fcm_max_iters: usize,
    pub fcm_eps: f64,
    pub aggregator_history: Vec<HistoryRow>,
    pub aggregator_training: TrainConfig,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            adequacy_threshold: 0.5,
            enable_dl: true,
            enable_fcm: true,
            aggregator_mode: AggregatorMode::FallbackBlend,
            suppress_inadequate: false,
            window: WindowSpec { lags: 4, horizon: 1 },
            validation_fraction: 0.2,
            mlp_hidden: vec![8],
            mlp_activation: Activation::Tanh,
            sgd: SgdConfig::default(),
            pretrain: None,
            concept_map: None,
            fcm_target: String::new(),
            fcm_max_iters: 100,
            fcm_eps: 1e-6,
            aggregator_history: Vec::new(),
            aggregator_training: TrainConfig {
                max_epochs: 50,
                ..TrainConfig::default()
            },
            seed: 0,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.adequacy_threshold > 0.0) {
            return Err(Error::InvalidConfig("adequacy_threshold must be > 0".into()));
        }
        if !(self.validation_fraction > 0.0 && self.validation_fraction < 1.0) {
            return Err(Error::InvalidConfig("validation_fraction must lie in (0, 1)".into()));
        }
        self.window.validate()
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(s)?;
        c.validate()?;
        Ok(c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdequacyVerdict {
    pub pass: bool,
    pub relative_rmse: f64,
    pub threshold: f64,
}

/// One-step validation RMSE divided by the (population) standard deviation
/// of the validation targets; passes when at or below `threshold`.
pub fn verify_forecast<P: Predictor + ?Sized>(
    model: &P,
    validation: &Dataset,
    threshold: f64,
) -> Result<AdequacyVerdict> {
    let spread = population_std(validation.targets());
    if !(spread > 0.0) {
        return Err(Error::InvalidData("validation targets have zero variance".into()));
    }
    let preds: Vec<f64> = validation.inputs().iter().map(|x| model.predict(x)).collect();
    let relative_rmse = metrics(&preds, validation.targets())?.rmse / spread;
    Ok(AdequacyVerdict {
        pass: relative_rmse <= threshold,
        relative_rmse,
        threshold,
    })
}

/// ANFIS over `(dl forecast, fcm activation, consonance)` with inputs
/// min-max scaled to the history's range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregator {
    pub model: AnfisModel,
    pub input_scaling: Vec<NormalizationParams>,
}

impl Aggregator {
    pub fn predict_from(&self, dl: f64, fcm: &FcmForecast) -> f64 {
        self.predict(&[dl, fcm.activation, fcm.consonance])
    }
}

impl Predictor for Aggregator {
    fn predict(&self, x: &[f64]) -> f64 {
        let scaled: Vec<f64> = x.iter().zip(&self.input_scaling).map(|(v, n)| n.apply(*v)).collect();
        self.model.predict(&scaled)
    }
}

/// Fits the aggregator: three inputs, two gaussian terms each, full grid,
/// hybrid training towards the actual values. Rows are put in a canonical
/// order first, so the result does not depend on how the history is
/// ordered.
pub fn build_aggregator(history: &[HistoryRow], training: &TrainConfig) -> Result<Aggregator> {
    if history.len() < MIN_AGGREGATOR_HISTORY {
        return Err(Error::InsufficientData(format!(
            "aggregator needs at least {MIN_AGGREGATOR_HISTORY} history rows, got {}",
            history.len()
        )));
    }
    let mut rows = history.to_vec();
    rows.sort_by(|a, b| {
        a.dl.total_cmp(&b.dl)
            .then(a.fcm_activation.total_cmp(&b.fcm_activation))
            .then(a.consonance.total_cmp(&b.consonance))
            .then(a.actual.total_cmp(&b.actual))
    });
    let columns: [Vec<f64>; 3] = [
        rows.iter().map(|r| r.dl).collect(),
        rows.iter().map(|r| r.fcm_activation).collect(),
        rows.iter().map(|r| r.consonance).collect(),
    ];
    let input_scaling = columns
        .iter()
        .enumerate()
        .map(|(j, c)| {
            NormalizationParams::fit(c, NormalizationKind::MinMax).map_err(|_| Error::ConstantColumn { column: j })
        })
        .collect::<Result<Vec<_>>>()?;
    let inputs = (0..rows.len())
        .map(|k| (0..3).map(|j| input_scaling[j].apply(columns[j][k])).collect())
        .collect();
    let data = Dataset::new(inputs, rows.iter().map(|r| r.actual).collect())?;
    let template = init_from_data(&data, &[2, 2, 2])?;
    let (model, _) = train_hybrid(&template, &data, training)?;
    Ok(Aggregator { model, input_scaling })
}

/// Final forecast from whichever branch values survived.
///
/// Both values and an aggregator → aggregator output. Both values, no
/// aggregator → `(1 − c)·dl + c·fcm_level` with `c` the consonance and
/// `fcm_level` the activation mapped linearly onto `level_range`. A single
/// value passes through.
pub fn aggregate(
    dl: Option<f64>,
    fcm: Option<&FcmForecast>,
    aggregator: Option<&Aggregator>,
    level_range: (f64, f64),
) -> Result<f64> {
    match (dl, fcm) {
        (Some(d), Some(f)) => Ok(match aggregator {
            Some(a) => a.predict_from(d, f),
            None => {
                let level = fcm_level(f.activation, level_range);
                let c = f.consonance;
                (1.0 - c) * d + c * level
            }
        }),
        (Some(d), None) => Ok(d),
        (None, Some(f)) => Ok(fcm_level(f.activation, level_range)),
        (None, None) => Err(Error::InsufficientData("no branch value to aggregate".into())),
    }
}

/// Maps an activation in `[0, 1]` onto `[min, max]` in series units.
pub fn fcm_level(activation: f64, (min, max): (f64, f64)) -> f64 {
    min + activation * (max - min)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModuleStatus {
    Ok,
    Failed,
    Skipped,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatusBoard {
    pub dl: ModuleStatus,
    pub verify: ModuleStatus,
    pub fcm: ModuleStatus,
    pub aggregate: ModuleStatus,
}

impl StatusBoard {
    fn any_failed(&self) -> bool {
        [self.dl, self.verify, self.fcm, self.aggregate].contains(&ModuleStatus::Failed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastReport {
    pub quantitative: Option<f64>,
    pub adequacy: Option<AdequacyVerdict>,
    pub fcm: Option<FcmForecast>,
    #[serde(rename = "final")]
    pub final_forecast: f64,
    pub status: StatusBoard,
    pub degraded: bool,
    /// Error text per failed module; not part of the JSON report.
    #[serde(skip)]
    pub errors: Vec<(String, String)>,
}

impl ForecastReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

struct DlOutcome {
    forecast: f64,
    verdict: Result<AdequacyVerdict>,
}

fn training_span(len: usize, validation_fraction: f64) -> usize {
    let v = (validation_fraction * len as f64).floor() as usize;
    len.saturating_sub(v).max(1)
}

fn run_dl(values: &[f64], cfg: &PipelineConfig) -> Result<DlOutcome> {
    let one_step = WindowSpec {
        lags: cfg.window.lags,
        horizon: 1,
    };
    let windows = make_windows(values, one_step)?;
    let n_val = (cfg.validation_fraction * windows.len() as f64).floor() as usize;
    if n_val == 0 || n_val >= windows.len() {
        return Err(Error::InsufficientData(format!(
            "{} windows leave no room for a train/validation split",
            windows.len()
        )));
    }
    let n_train = windows.len() - n_val;
    let norm = NormalizationParams::fit(&values[..n_train + cfg.window.lags], NormalizationKind::MinMax)?;
    let train = windows
        .slice(0..n_train)?
        .map_values(|v| norm.apply(v), |v| norm.apply(v));
    let validation = windows.slice(n_train..windows.len())?;

    let mut sizes = vec![cfg.window.lags];
    sizes.extend(&cfg.mlp_hidden);
    sizes.push(1);
    let init = match &cfg.pretrain {
        Some(ae) if sizes.len() > 2 => {
            pretrain_stacked_autoencoders(&sizes, cfg.mlp_activation, train.inputs(), ae, cfg.seed)?
        }
        _ => mlp_init(&sizes, cfg.mlp_activation, cfg.seed)?,
    };
    let targets: Vec<Vec<f64>> = train.targets().iter().map(|&t| vec![t]).collect();
    let sgd = SgdConfig {
        seed: cfg.sgd.seed ^ cfg.seed,
        ..cfg.sgd.clone()
    };
    let (model, _) = sgd_train(&init, train.inputs(), &targets, &sgd)?;
    let forecaster = MlpForecaster {
        model,
        normalization: Some(norm),
    };
    let verdict = verify_forecast(&forecaster, &validation, cfg.adequacy_threshold);
    let path = forecast_series(&forecaster, values, cfg.window.horizon)?;
    let forecast = *path.last().expect("horizon >= 1");
    if !forecast.is_finite() {
        return Err(Error::InvalidData("DL forecast is not finite".into()));
    }
    Ok(DlOutcome { forecast, verdict })
}

/// `Ok(None)` when no concept map is configured: the branch has nothing to
/// run. Event errors fail the branch regardless.
fn run_fcm(events: Result<Vec<Event>>, cfg: &PipelineConfig) -> Result<Option<FcmForecast>> {
    let events = events?;
    let Some(map) = cfg.concept_map.as_ref() else {
        return Ok(None);
    };
    let target = map.index_of(&cfg.fcm_target)?;
    let initial = event_encode(map, &events)?;
    let result = run(map, &initial, cfg.fcm_max_iters, cfg.fcm_eps)?;
    Ok(Some(FcmForecast {
        activation: result.terminal().activations()[target],
        consonance: consonance(map, &result, &cfg.fcm_target)?,
    }))
}

/// Runs both branches on `values` and assembles the report.
///
/// `events` carries the qualitative input; an `Err` (for example an
/// unreadable events file) fails only the FCM branch.
pub fn run_pipeline(values: &[f64], events: Result<Vec<Event>>, cfg: &PipelineConfig) -> Result<ForecastReport> {
    cfg.validate()?;
    let (dl, fcm) = exec::join(
        || cfg.enable_dl.then(|| run_dl(values, cfg)),
        || cfg.enable_fcm.then(|| run_fcm(events, cfg)),
    );

    let mut errors = Vec::new();
    let mut status = StatusBoard {
        dl: ModuleStatus::Skipped,
        verify: ModuleStatus::Skipped,
        fcm: ModuleStatus::Skipped,
        aggregate: ModuleStatus::Skipped,
    };
    let mut quantitative = None;
    let mut adequacy = None;
    let mut dl_for_aggregation = None;
    match dl {
        Some(Ok(out)) => {
            status.dl = ModuleStatus::Ok;
            quantitative = Some(out.forecast);
            let adequate = match out.verdict {
                Ok(v) => {
                    status.verify = if v.pass { ModuleStatus::Ok } else { ModuleStatus::Failed };
                    if !v.pass {
                        errors.push((
                            "verify".into(),
                            format!("relative RMSE {} above {}", v.relative_rmse, v.threshold),
                        ));
                    }
                    adequacy = Some(v);
                    v.pass
                }
                Err(e) => {
                    status.verify = ModuleStatus::Failed;
                    errors.push(("verify".into(), e.to_string()));
                    false
                }
            };
            if adequate || !cfg.suppress_inadequate {
                dl_for_aggregation = Some(out.forecast);
            }
        }
        Some(Err(e)) => {
            status.dl = ModuleStatus::Failed;
            errors.push(("dl".into(), e.to_string()));
        }
        None => {}
    }
    let fcm_forecast = match fcm {
        Some(Ok(Some(f))) => {
            status.fcm = ModuleStatus::Ok;
            Some(f)
        }
        Some(Ok(None)) => None,
        Some(Err(e)) => {
            status.fcm = ModuleStatus::Failed;
            errors.push(("fcm".into(), e.to_string()));
            None
        }
        None => None,
    };

    if quantitative.is_none() && fcm_forecast.is_none() {
        let msg = |m: &str| {
            errors
                .iter()
                .find(|(k, _)| k == m)
                .map_or_else(|| "disabled".to_string(), |(_, e)| e.clone())
        };
        return Err(Error::AllBranchesFailed {
            dl: msg("dl"),
            fcm: msg("fcm"),
        });
    }

    let level_range = {
        let span = &values[..training_span(values.len(), cfg.validation_fraction).min(values.len())];
        span.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        })
    };
    let aggregator = match (cfg.aggregator_mode, dl_for_aggregation, &fcm_forecast) {
        (AggregatorMode::Anfis, Some(_), Some(_)) => {
            match build_aggregator(&cfg.aggregator_history, &cfg.aggregator_training) {
                Ok(a) => Some(a),
                Err(e) => {
                    errors.push(("aggregate".into(), format!("{e}; used the consonance blend")));
                    None
                }
            }
        }
        _ => None,
    };
    // An inadequate, suppressed DL forecast with no FCM value leaves only
    // the flagged DL forecast to report.
    let dl_value = dl_for_aggregation.or(if fcm_forecast.is_none() { quantitative } else { None });
    let final_forecast = aggregate(dl_value, fcm_forecast.as_ref(), aggregator.as_ref(), level_range)?;
    status.aggregate = if errors.iter().any(|(k, _)| k == "aggregate") {
        ModuleStatus::Failed
    } else {
        ModuleStatus::Ok
    };

    Ok(ForecastReport {
        quantitative,
        adequacy,
        fcm: fcm_forecast,
        final_forecast,
        degraded: status.any_failed(),
        status,
        errors,
    })
}

/// Process exit code for a pipeline outcome: 0 for any report (degraded
/// included), 3 when every branch failed, 2 for configuration or data
/// errors caught before the branches ran.
pub fn exit_code(outcome: &Result<ForecastReport>) -> i32 {
    match outcome {
        Ok(_) => 0,
        Err(Error::AllBranchesFailed { .. }) => 3,
        Err(_) => 2,
    }
}
