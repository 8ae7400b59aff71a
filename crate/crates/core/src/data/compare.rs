use std::fmt::Write as _;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{metrics, ols_baseline, Dataset, NormalizationKind, NormalizationParams, Split};
use crate::fuzzy::init_from_data;
use crate::mlp::{mlp_init, sgd_train, Activation, MlpForecaster, SgdConfig};
use crate::train::{train_clonal, train_hybrid, train_pso_lse, ClonalConfig, PsoConfig, TrainConfig};
use crate::{exec, Error, Predictor, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelSpec {
    Ols,
    Mlp,
    AnfisHybrid,
    AnfisPso,
    AnfisClonal,
}

impl ModelSpec {
    pub const ALL: [ModelSpec; 5] = [
        Self::Ols,
        Self::Mlp,
        Self::AnfisHybrid,
        Self::AnfisPso,
        Self::AnfisClonal,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Ols => "ols",
            Self::Mlp => "mlp",
            Self::AnfisHybrid => "anfis-hybrid",
            Self::AnfisPso => "anfis-pso",
            Self::AnfisClonal => "anfis-clonal",
        }
    }
}

impl FromStr for ModelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s.trim())
            .ok_or_else(|| Error::InvalidConfig(format!("unknown model `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CompareConfig {
    pub terms_per_input: usize,
    pub hybrid: TrainConfig,
    pub pso: PsoConfig,
    pub clonal: ClonalConfig,
    pub mlp_hidden: Vec<usize>,
    pub mlp_activation: Activation,
    pub mlp_sgd: SgdConfig,
    pub seed: u64,
}

impl Default for CompareConfig {
    fn default() -> Self {
        Self {
            terms_per_input: 2,
            hybrid: TrainConfig::default(),
            pso: PsoConfig::default(),
            clonal: ClonalConfig::default(),
            mlp_hidden: vec![8],
            mlp_activation: Activation::Tanh,
            mlp_sgd: SgdConfig::default(),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub model: String,
    /// `None` for models without a rule base.
    pub rules: Option<usize>,
    pub iterations: usize,
    /// Test RMSE; `None` when the model failed.
    pub rmse: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CompareRow {
    pub fn failed(&self) -> bool {
        self.rmse.is_none()
    }
}

struct Trained {
    predictor: Box<dyn Predictor + Send + Sync>,
    rules: Option<usize>,
    iterations: usize,
}

fn fit(spec: ModelSpec, train: &Dataset, cfg: &CompareConfig) -> Result<Trained> {
    let anfis_template = || init_from_data(train, &vec![cfg.terms_per_input; train.input_dim()]);
    Ok(match spec {
        ModelSpec::Ols => Trained {
            predictor: Box::new(ols_baseline(train)?),
            rules: None,
            iterations: 1,
        },
        ModelSpec::Mlp => {
            let all: Vec<f64> = train
                .inputs()
                .iter()
                .flatten()
                .chain(train.targets())
                .copied()
                .collect();
            let norm = NormalizationParams::fit(&all, NormalizationKind::MinMax)?;
            let scaled = train.map_values(|v| norm.apply(v), |v| norm.apply(v));
            let mut sizes = vec![train.input_dim()];
            sizes.extend(&cfg.mlp_hidden);
            sizes.push(1);
            let init = mlp_init(&sizes, cfg.mlp_activation, cfg.seed)?;
            let targets: Vec<Vec<f64>> = scaled.targets().iter().map(|&t| vec![t]).collect();
            let (model, _) = sgd_train(&init, scaled.inputs(), &targets, &cfg.mlp_sgd)?;
            Trained {
                predictor: Box::new(MlpForecaster {
                    model,
                    normalization: Some(norm),
                }),
                rules: None,
                iterations: cfg.mlp_sgd.epochs,
            }
        }
        ModelSpec::AnfisHybrid => {
            let (model, report) = train_hybrid(&anfis_template()?, train, &cfg.hybrid)?;
            Trained {
                rules: Some(model.rule_count()),
                iterations: report.epochs(),
                predictor: Box::new(model),
            }
        }
        ModelSpec::AnfisPso => {
            let (model, _) = train_pso_lse(&anfis_template()?, train, &cfg.pso)?;
            Trained {
                rules: Some(model.rule_count()),
                iterations: cfg.pso.max_iters,
                predictor: Box::new(model),
            }
        }
        ModelSpec::AnfisClonal => {
            let (model, _) = train_clonal(&anfis_template()?, train, &cfg.clonal)?;
            Trained {
                rules: Some(model.rule_count()),
                iterations: cfg.clonal.generations,
                predictor: Box::new(model),
            }
        }
    })
}

fn evaluate(spec: ModelSpec, split: &Split, cfg: &CompareConfig) -> Result<(Trained, f64)> {
    let trained = fit(spec, &split.train, cfg)?;
    let preds: Vec<f64> = split
        .test
        .inputs()
        .iter()
        .map(|x| trained.predictor.predict(x))
        .collect();
    let rmse = metrics(&preds, split.test.targets())?.rmse;
    if !rmse.is_finite() {
        return Err(Error::InvalidData("test RMSE is not finite".into()));
    }
    Ok((trained, rmse))
}

/// Trains each spec on the training split and scores it on the test split.
/// A failing model (error or panic) yields a failed row; the others are
/// unaffected.
pub fn compare(split: &Split, specs: &[ModelSpec], cfg: &CompareConfig) -> Result<Vec<CompareRow>> {
    if specs.is_empty() {
        return Err(Error::InvalidConfig("no models to compare".into()));
    }
    Ok(exec::map(specs, |&spec| {
        let outcome = catch_unwind(AssertUnwindSafe(|| evaluate(spec, split, cfg)))
            .unwrap_or_else(|_| Err(Error::InvalidData("training panicked".into())));
        match outcome {
            Ok((t, rmse)) => CompareRow {
                model: spec.name().to_string(),
                rules: t.rules,
                iterations: t.iterations,
                rmse: Some(rmse),
                error: None,
            },
            Err(e) => CompareRow {
                model: spec.name().to_string(),
                rules: None,
                iterations: 0,
                rmse: None,
                error: Some(e.to_string()),
            },
        }
    }))
}

const HEADER: [&str; 4] = ["MODEL", "RULES", "ITERATIONS", "RMSE"];

fn cells(row: &CompareRow, rmse: impl Fn(f64) -> String) -> [String; 4] {
    [
        row.model.clone(),
        row.rules.map_or("-".to_string(), |r| r.to_string()),
        row.iterations.to_string(),
        row.rmse.map_or("FAILED".to_string(), rmse),
    ]
}

/// Left-aligned text table with columns MODEL, RULES, ITERATIONS, RMSE.
pub fn format_table(rows: &[CompareRow]) -> String {
    let body: Vec<[String; 4]> = rows.iter().map(|r| cells(r, |v| format!("{v:.6}"))).collect();
    let mut widths = HEADER.map(str::len);
    for r in &body {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.len());
        }
    }
    let mut out = String::new();
    let mut line = |cols: [&str; 4]| {
        let text: Vec<String> = cols.iter().zip(widths).map(|(c, w)| format!("{c:<w$}")).collect();
        let _ = writeln!(out, "{}", text.join("  ").trim_end());
    };
    line(HEADER);
    for r in &body {
        line([&r[0], &r[1], &r[2], &r[3]]);
    }
    out
}

pub fn rows_to_csv(rows: &[CompareRow], writer: impl std::io::Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(HEADER)?;
    for r in rows {
        w.write_record(cells(r, |v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}
