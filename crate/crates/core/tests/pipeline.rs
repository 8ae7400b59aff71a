mod common;

use common::*;
use neurofuzzy::data::synth_mackey_glass;
use neurofuzzy::fcm::{Event, FcmForecast};
use neurofuzzy::pipeline::*;
use neurofuzzy::train::TrainConfig;
use neurofuzzy::{Error, Predictor};
use proptest::prelude::*;
use rand::Rng;

fn config() -> PipelineConfig {
    PipelineConfig {
        concept_map: Some(planted_map()),
        fcm_target: "d".into(),
        seed: 5,
        ..PipelineConfig::default()
    }
}

fn series() -> Vec<f64> {
    synth_mackey_glass(400, 7).unwrap().values().to_vec()
}

fn events() -> Vec<Event> {
    vec![Event::new("a", 0.9), Event::new("c", 0.2)]
}

#[test]
fn healthy_run_reports_every_module_ok() {
    let report = run_pipeline(&series(), Ok(events()), &config()).unwrap();
    let ok = ModuleStatus::Ok;
    assert_eq!(
        report.status,
        StatusBoard {
            dl: ok,
            verify: ok,
            fcm: ok,
            aggregate: ok
        }
    );
    assert!(!report.degraded);
    let adequacy = report.adequacy.unwrap();
    assert!(adequacy.pass && adequacy.relative_rmse <= 0.5);
    assert!(report.quantitative.is_some() && report.fcm.is_some());
}

#[test]
fn unknown_event_concept_degrades_to_dl() {
    let report = run_pipeline(&series(), Ok(vec![Event::new("nope", 0.5)]), &config()).unwrap();
    assert_eq!(report.status.fcm, ModuleStatus::Failed);
    assert!(report.degraded);
    assert_eq!(report.final_forecast.to_bits(), report.quantitative.unwrap().to_bits());
    assert_eq!(exit_code(&Ok(report)), 0);
}

#[test]
fn branch_faults_do_not_leak() {
    let healthy = run_pipeline(&series(), Ok(events()), &config()).unwrap();

    let fcm_fault = run_pipeline(&series(), Err(Error::InvalidData("broken".into())), &config()).unwrap();
    assert_eq!(
        fcm_fault.quantitative.unwrap().to_bits(),
        healthy.quantitative.unwrap().to_bits()
    );
    assert_eq!(fcm_fault.adequacy, healthy.adequacy);

    let dl_fault = run_pipeline(&series()[..6], Ok(events()), &config()).unwrap();
    assert_eq!(dl_fault.status.dl, ModuleStatus::Failed);
    assert_eq!(dl_fault.fcm, healthy.fcm);
}

#[test]
fn dual_failure_is_an_error_with_both_causes() {
    let out = run_pipeline(&series()[..3], Err(Error::InvalidData("no events".into())), &config());
    assert_eq!(exit_code(&out), 3);
    let msg = out.unwrap_err().to_string();
    assert!(msg.contains("no events"), "{msg}");
}

#[test]
fn disabled_branch_is_skipped_not_failed() {
    let cfg = PipelineConfig {
        enable_fcm: false,
        ..config()
    };
    let report = run_pipeline(&series(), Ok(events()), &cfg).unwrap();
    assert_eq!(report.status.fcm, ModuleStatus::Skipped);
    assert!(!report.degraded);
    assert_eq!(report.final_forecast, report.quantitative.unwrap());
}

#[test]
fn inadequate_forecast_is_flagged_or_suppressed() {
    let strict = PipelineConfig {
        adequacy_threshold: 1e-9,
        ..config()
    };
    let flagged = run_pipeline(&series(), Ok(events()), &strict).unwrap();
    assert_eq!(flagged.status.verify, ModuleStatus::Failed);
    assert!(flagged.degraded && flagged.quantitative.is_some());

    let suppress = PipelineConfig {
        suppress_inadequate: true,
        ..strict
    };
    let suppressed = run_pipeline(&series(), Ok(events()), &suppress).unwrap();
    let values = series();
    let n_train = values.len() - (0.2 * values.len() as f64) as usize;
    let (lo, hi) = values[..n_train]
        .iter()
        .fold((f64::MAX, f64::MIN), |(l, h), v| (l.min(*v), h.max(*v)));
    assert_eq!(
        suppressed.final_forecast,
        fcm_level(suppressed.fcm.unwrap().activation, (lo, hi))
    );
}

#[test]
fn seeded_runs_are_bit_identical() {
    let a = run_pipeline(&series(), Ok(events()), &config())
        .unwrap()
        .to_json()
        .unwrap();
    let b = run_pipeline(&series(), Ok(events()), &config())
        .unwrap()
        .to_json()
        .unwrap();
    assert_eq!(a, b);
}

fn history(seed: u64) -> Vec<HistoryRow> {
    let mut r = rng(seed);
    (0..40)
        .map(|_| {
            let dl = r.random_range(0.3..1.3);
            HistoryRow {
                dl,
                fcm_activation: r.random_range(0.0..1.0),
                consonance: r.random_range(0.0..1.0),
                actual: dl,
            }
        })
        .collect()
}

#[test]
fn aggregator_learns_identity_and_ignores_row_order() {
    let rows = history(2);
    let agg = build_aggregator(&rows, &TrainConfig::default()).unwrap();
    let preds: Vec<f64> = rows
        .iter()
        .map(|h| agg.predict(&[h.dl, h.fcm_activation, h.consonance]))
        .collect();
    let actual: Vec<f64> = rows.iter().map(|h| h.actual).collect();
    let rmse = neurofuzzy::data::metrics(&preds, &actual).unwrap().rmse;
    let rel = rmse / neurofuzzy::data::population_std(&actual);
    assert!(rel < 0.05, "relative RMSE {rel}");

    let mut shuffled = rows.clone();
    shuffled.reverse();
    shuffled.swap(3, 17);
    assert_eq!(build_aggregator(&shuffled, &TrainConfig::default()).unwrap(), agg);
}

#[test]
fn anfis_mode_uses_history_when_available() {
    let cfg = PipelineConfig {
        aggregator_mode: AggregatorMode::Anfis,
        aggregator_history: history(4),
        ..config()
    };
    let report = run_pipeline(&series(), Ok(events()), &cfg).unwrap();
    assert_eq!(report.status.aggregate, ModuleStatus::Ok);
    let agg = build_aggregator(&cfg.aggregator_history, &cfg.aggregator_training).unwrap();
    assert_eq!(
        report.final_forecast,
        agg.predict_from(report.quantitative.unwrap(), report.fcm.as_ref().unwrap())
    );

    let short = PipelineConfig {
        aggregator_history: history(4)[..5].to_vec(),
        ..cfg
    };
    let fallback = run_pipeline(&series(), Ok(events()), &short).unwrap();
    assert_eq!(fallback.status.aggregate, ModuleStatus::Failed);
    assert!(fallback.degraded);
}

#[test]
fn config_round_trips_through_json() {
    let cfg = config();
    let text = serde_json::to_string(&cfg).unwrap();
    assert_eq!(PipelineConfig::from_json(&text).unwrap(), cfg);
    assert!(PipelineConfig::from_json(r#"{"adequacy_threshold": 0}"#).is_err());
    assert_eq!(PipelineConfig::from_json("{}").unwrap(), PipelineConfig::default());
}

proptest! {
    #[test]
    fn blend_is_convex(dl in -5.0..5.0f64, act in 0.0..=1.0f64, c in 0.0..=1.0f64, lo in -3.0..0.0f64, span in 0.1..5.0f64) {
        let range = (lo, lo + span);
        let f = FcmForecast { activation: act, consonance: c };
        let out = aggregate(Some(dl), Some(&f), None, range).unwrap();
        let level = fcm_level(act, range);
        prop_assert!(out >= dl.min(level) - 1e-12 && out <= dl.max(level) + 1e-12);
    }
}

#[test]
fn missing_concept_map_skips_the_qualitative_branch() {
    let cfg = PipelineConfig {
        concept_map: None,
        ..config()
    };
    let report = run_pipeline(&series(), Ok(events()), &cfg).unwrap();
    assert_eq!(report.status.fcm, ModuleStatus::Skipped);
    assert!(!report.degraded);

    let broken = run_pipeline(&series(), Err(Error::InvalidData("unreadable".into())), &cfg).unwrap();
    assert_eq!(broken.status.fcm, ModuleStatus::Failed);
    assert!(broken.degraded);
}
