//! `nfcast` — benchmark generation, model training, FCM learning and the
//! modular forecasting pipeline from the command line.
//!
//! Exit codes: 0 success (degraded pipeline runs included), 1 usage error,
//! 2 data or validation error, 3 every pipeline branch failed or training
//! produced no usable model.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use neurofuzzy::data::{
    compare, format_table, load_csv, make_windows, metrics, rows_to_csv, split_chrono, synth_mackey_glass,
    synth_sine_noise, CompareConfig, Dataset, ModelSpec, NormalizationKind, NormalizationParams, TimeSeries,
    WindowSpec,
};
use neurofuzzy::fcm::{ga_learn, Event, GaConfig, TransitionData};
use neurofuzzy::fuzzy::{init_from_data, AnfisModel};
use neurofuzzy::mlp::{
    mlp_init, pretrain_stacked_autoencoders, sgd_train, Activation, AeConfig, MlpForecaster, SgdConfig,
};
use neurofuzzy::pipeline::{exit_code, run_pipeline, PipelineConfig};
use neurofuzzy::train::{train_clonal, train_hybrid, train_pso_lse, ClonalConfig, PsoConfig, TrainConfig, TrainReport};
use neurofuzzy::{Error, Predictor};
use serde_json::json;

const SPLIT: (f64, f64, f64) = (0.6, 0.2, 0.2);

#[derive(Parser)]
#[command(name = "nfcast", version, about = "Neuro-fuzzy time-series forecasting toolkit")]
struct Cli {
    /// Seed for every randomised step (overrides config files).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Suppress informational output on stdout.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct SeriesArgs {
    /// Input CSV with a header row.
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value = "t")]
    time_col: String,
    #[arg(long, default_value = "value")]
    value_col: String,
    /// Window length (number of lags).
    #[arg(long, default_value_t = 4)]
    lags: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum SynthKind {
    MackeyGlass,
    Sine,
}

#[derive(Clone, Copy, ValueEnum)]
enum Trainer {
    Hybrid,
    Pso,
    Clonal,
}

#[derive(Clone, Copy, ValueEnum)]
enum ActivationArg {
    Tanh,
    Relu,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a benchmark series as CSV (columns `t,value`).
    Synth {
        #[arg(long, value_enum)]
        kind: SynthKind,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        /// Noise standard deviation for the sine benchmark.
        #[arg(long, default_value_t = 0.1)]
        noise: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train an ANFIS one-step forecaster on a 0.6/0.2/0.2 split.
    TrainAnfis {
        #[command(flatten)]
        series: SeriesArgs,
        /// Gaussian terms per input.
        #[arg(long, default_value_t = 2)]
        terms: usize,
        #[arg(long, value_enum, default_value = "hybrid")]
        trainer: Trainer,
        /// Epochs (hybrid), iterations (pso) or generations (clonal).
        #[arg(long, default_value_t = 100)]
        epochs: usize,
        #[arg(long, default_value_t = 0.01)]
        learning_rate: f64,
        /// Model JSON output.
        #[arg(long)]
        out: PathBuf,
        /// Optional per-epoch RMSE history CSV.
        #[arg(long)]
        history: Option<PathBuf>,
    },
    /// Train an MLP one-step forecaster (min-max normalised).
    TrainMlp {
        #[command(flatten)]
        series: SeriesArgs,
        /// Hidden layer sizes, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "8")]
        hidden: Vec<usize>,
        #[arg(long, value_enum, default_value = "tanh")]
        activation: ActivationArg,
        #[arg(long, default_value_t = 200)]
        epochs: usize,
        #[arg(long, default_value_t = 0.05)]
        learning_rate: f64,
        /// Denoising-autoencoder pretraining epochs per hidden layer (0 = off).
        #[arg(long, default_value_t = 0)]
        pretrain_epochs: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Learn FCM weights from observed state transitions with a GA.
    FcmLearn {
        /// CSV with one column per concept, one state per row.
        #[arg(long)]
        transitions: PathBuf,
        /// Concept columns to use, comma separated (default: all).
        #[arg(long, value_delimiter = ',')]
        concepts: Option<Vec<String>>,
        #[arg(long, default_value_t = 60)]
        population: usize,
        #[arg(long, default_value_t = 150)]
        generations: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the modular forecasting pipeline and write its report.
    PipelineRun {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "t")]
        time_col: String,
        #[arg(long, default_value = "value")]
        value_col: String,
        /// JSON array of `{"concept": .., "intensity": ..}`.
        #[arg(long)]
        events: Option<PathBuf>,
        /// JSON pipeline configuration.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train several models on one split and tabulate test RMSE.
    Compare {
        #[command(flatten)]
        series: SeriesArgs,
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "ols,mlp,anfis-hybrid,anfis-pso,anfis-clonal"
        )]
        models: Vec<String>,
        /// CSV output of the table.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score a saved model (ANFIS or MLP JSON) on every window of a series.
    Evaluate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "t")]
        time_col: String,
        #[arg(long, default_value = "value")]
        value_col: String,
    },
}

/// A failure with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self {
            code: 2,
            message: e.to_string(),
        }
    }
}

fn io_context(path: &Path) -> impl Fn(std::io::Error) -> Failure + '_ {
    move |e| Failure {
        code: 2,
        message: format!("{}: {e}", path.display()),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(io_context(path))
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), Failure> {
    fs::write(path, contents).map_err(io_context(path))
}

fn with_newline(mut s: String) -> String {
    s.push('\n');
    s
}

struct Out {
    quiet: bool,
}

impl Out {
    fn say(&self, msg: impl std::fmt::Display) {
        if !self.quiet {
            println!("{msg}");
        }
    }
}

fn load_series(args: &SeriesArgs) -> Result<TimeSeries, Failure> {
    Ok(load_csv(&args.data, &args.time_col, &args.value_col)?)
}

fn windows(series: &TimeSeries, lags: usize) -> Result<Dataset, Failure> {
    Ok(make_windows(series.values(), WindowSpec::new(lags, 1)?)?)
}

fn test_rmse(model: &impl Predictor, test: &Dataset) -> Result<f64, Failure> {
    let preds: Vec<f64> = test.inputs().iter().map(|x| model.predict(x)).collect();
    Ok(metrics(&preds, test.targets())?.rmse)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let out = Out { quiet: cli.quiet };
    let seed = cli.seed.unwrap_or(0);
    match cli.command {
        Command::Synth {
            kind,
            n,
            noise,
            out: path,
        } => {
            let series = match kind {
                SynthKind::MackeyGlass => synth_mackey_glass(n, seed)?,
                SynthKind::Sine => synth_sine_noise(n, noise, seed)?,
            };
            let mut buf = Vec::new();
            series.write_csv(&mut buf, "t", "value")?;
            write(&path, buf)?;
            out.say(format_args!("wrote {n} samples to {}", path.display()));
        }
        Command::TrainAnfis {
            series,
            terms,
            trainer,
            epochs,
            learning_rate,
            out: path,
            history,
        } => {
            let split = split_chrono(&windows(&load_series(&series)?, series.lags)?, SPLIT)?;
            let template = init_from_data(&split.train, &vec![terms; series.lags])?;
            let (model, report): (AnfisModel, TrainReport) = match trainer {
                Trainer::Hybrid => train_hybrid(
                    &template,
                    &split.train,
                    &TrainConfig {
                        max_epochs: epochs,
                        learning_rate,
                        seed,
                        ..TrainConfig::default()
                    },
                )?,
                Trainer::Pso => train_pso_lse(
                    &template,
                    &split.train,
                    &PsoConfig {
                        max_iters: epochs,
                        seed,
                        ..PsoConfig::default()
                    },
                )?,
                Trainer::Clonal => train_clonal(
                    &template,
                    &split.train,
                    &ClonalConfig {
                        generations: epochs,
                        seed,
                        ..ClonalConfig::default()
                    },
                )?,
            };
            if !report.best_rmse.is_finite() {
                return Err(Failure {
                    code: 3,
                    message: "training produced no model with finite error".into(),
                });
            }
            write(&path, with_newline(model.to_json()?))?;
            if let Some(h) = history {
                let mut buf = Vec::new();
                report.write_history_csv(&mut buf)?;
                write(&h, buf)?;
            }
            let summary = json!({
                "rules": model.rule_count(),
                "epochs": report.epochs(),
                "stop_reason": report.stop_reason,
                "train_rmse": report.best_rmse,
                "test_rmse": test_rmse(&model, &split.test)?,
            });
            out.say(serde_json::to_string_pretty(&summary).map_err(Error::from)?);
        }
        Command::TrainMlp {
            series,
            hidden,
            activation,
            epochs,
            learning_rate,
            pretrain_epochs,
            out: path,
        } => {
            let ts = load_series(&series)?;
            let split = split_chrono(&windows(&ts, series.lags)?, SPLIT)?;
            let train_span = &ts.values()[..split.train.len() + series.lags];
            let norm = NormalizationParams::fit(train_span, NormalizationKind::MinMax)?;
            let train = split.train.map_values(|v| norm.apply(v), |v| norm.apply(v));
            let activation = match activation {
                ActivationArg::Tanh => Activation::Tanh,
                ActivationArg::Relu => Activation::Relu,
            };
            let mut sizes = vec![series.lags];
            sizes.extend(&hidden);
            sizes.push(1);
            let init = if pretrain_epochs > 0 {
                let ae = AeConfig {
                    epochs: pretrain_epochs,
                    seed,
                    ..AeConfig::default()
                };
                pretrain_stacked_autoencoders(&sizes, activation, train.inputs(), &ae, seed)?
            } else {
                mlp_init(&sizes, activation, seed)?
            };
            let targets: Vec<Vec<f64>> = train.targets().iter().map(|&t| vec![t]).collect();
            let sgd = SgdConfig {
                epochs,
                learning_rate,
                seed,
                ..SgdConfig::default()
            };
            let (model, losses) = sgd_train(&init, train.inputs(), &targets, &sgd)?;
            let forecaster = MlpForecaster {
                model,
                normalization: Some(norm),
            };
            let text = serde_json::to_string_pretty(&forecaster).map_err(Error::from)?;
            write(&path, with_newline(text))?;
            let summary = json!({
                "epochs": losses.len(),
                "final_train_mse": losses.last(),
                "test_rmse": test_rmse(&forecaster, &split.test)?,
            });
            out.say(serde_json::to_string_pretty(&summary).map_err(Error::from)?);
        }
        Command::FcmLearn {
            transitions,
            concepts,
            population,
            generations,
            out: path,
        } => {
            let file = fs::File::open(&transitions).map_err(io_context(&transitions))?;
            let data = TransitionData::from_csv(file, concepts.as_deref())?;
            let cfg = GaConfig {
                population_size: population,
                generations,
                seed,
                ..GaConfig::default()
            };
            let outcome = ga_learn(&data, &cfg)?;
            write(&path, with_newline(outcome.map.to_json()?))?;
            out.say(format_args!(
                "learned {} concepts from {} transitions; one-step MSE {:.6e}",
                data.concepts().len(),
                data.pair_count(),
                -outcome.best_fitness.last().copied().unwrap_or(f64::NAN)
            ));
        }
        Command::PipelineRun {
            data,
            time_col,
            value_col,
            events,
            config,
            out: path,
        } => {
            let mut cfg = match &config {
                Some(p) => PipelineConfig::from_json(&read(p)?)?,
                None => PipelineConfig::default(),
            };
            if let Some(s) = cli.seed {
                cfg.seed = s;
            }
            let series = load_csv(&data, &time_col, &value_col)?;
            // An unreadable events file is a qualitative-branch failure,
            // not a reason to abort the run.
            let events = match &events {
                Some(p) => fs::read_to_string(p)
                    .map_err(|e| Error::InvalidData(format!("{}: {e}", p.display())))
                    .and_then(|s| serde_json::from_str::<Vec<Event>>(&s).map_err(Error::from)),
                None => Ok(Vec::new()),
            };
            let outcome = run_pipeline(series.values(), events, &cfg);
            let code = exit_code(&outcome);
            let report = outcome.map_err(|e| Failure {
                code: code as u8,
                message: e.to_string(),
            })?;
            let text = with_newline(report.to_json()?);
            write(&path, &text)?;
            for (module, err) in &report.errors {
                eprintln!("warning: {module}: {err}");
            }
            out.say(text.trim_end());
        }
        Command::Compare {
            series,
            models,
            out: path,
        } => {
            let specs = models
                .iter()
                .map(|m| m.parse::<ModelSpec>())
                .collect::<Result<Vec<_>, _>>()?;
            let split = split_chrono(&windows(&load_series(&series)?, series.lags)?, SPLIT)?;
            let cfg = CompareConfig {
                seed,
                ..CompareConfig::default()
            };
            let rows = compare(&split, &specs, &cfg)?;
            if let Some(p) = path {
                let mut buf = Vec::new();
                rows_to_csv(&rows, &mut buf)?;
                write(&p, buf)?;
            }
            out.say(format_table(&rows).trim_end());
            for row in rows.iter().filter(|r| r.failed()) {
                eprintln!(
                    "warning: {} failed: {}",
                    row.model,
                    row.error.as_deref().unwrap_or("unknown error")
                );
            }
        }
        Command::Evaluate {
            model,
            data,
            time_col,
            value_col,
        } => {
            let text = read(&model)?;
            let predictor: Box<dyn Predictor> = match AnfisModel::from_json(&text) {
                Ok(m) => Box::new(m),
                Err(anfis_err) => match serde_json::from_str::<MlpForecaster>(&text) {
                    Ok(f) => {
                        f.model.validate()?;
                        Box::new(f)
                    }
                    Err(_) => {
                        return Err(Failure {
                            code: 2,
                            message: format!("{}: not an ANFIS or MLP model ({anfis_err})", model.display()),
                        })
                    }
                },
            };
            let lags = input_dim(&text)?;
            let series = load_csv(&data, &time_col, &value_col)?;
            let windows = windows(&series, lags)?;
            let preds: Vec<f64> = windows.inputs().iter().map(|x| predictor.predict(x)).collect();
            let report = metrics(&preds, windows.targets())?;
            let summary = json!({"rows": windows.len(), "rmse": report.rmse, "mae": report.mae, "mape": report.mape});
            // Evaluation output is the result itself, so --quiet does not hide it.
            println!("{}", serde_json::to_string_pretty(&summary).map_err(Error::from)?);
        }
    }
    Ok(())
}

fn input_dim(model_json: &str) -> Result<usize, Failure> {
    if let Ok(m) = AnfisModel::from_json(model_json) {
        return Ok(m.input_dim());
    }
    let f: MlpForecaster = serde_json::from_str(model_json).map_err(Error::from)?;
    Ok(f.lags())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let informational = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = e.print();
            return ExitCode::from(if informational { 0 } else { 1 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
