#![allow(dead_code)]

use neurofuzzy::data::{make_windows, split_chrono, synth_mackey_glass, Split, WindowSpec};
use neurofuzzy::fcm::{step, ConceptMap, FcmState, TransitionData};
use neurofuzzy::fuzzy::{build_grid_model, AnfisModel, FuzzyVariable, MembershipFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Mackey-Glass, 1000 samples, seed 7, four lags, one step ahead,
/// 0.6/0.2/0.2 chronological split.
pub fn mackey_glass_split() -> Split {
    let series = synth_mackey_glass(1000, 7).unwrap();
    let data = make_windows(series.values(), WindowSpec::new(4, 1).unwrap()).unwrap();
    split_chrono(&data, (0.6, 0.2, 0.2)).unwrap()
}

/// A random membership function over roughly `[-1, 1]`; gaussian or bell
/// unless `allow_triangular`.
pub fn random_term(r: &mut impl Rng, allow_triangular: bool) -> MembershipFunction {
    let kinds = if allow_triangular { 3 } else { 2 };
    match r.random_range(0..kinds) {
        0 => MembershipFunction::gaussian(r.random_range(-1.0..1.0), r.random_range(0.3..1.0)).unwrap(),
        1 => MembershipFunction::bell(
            r.random_range(0.3..1.0),
            r.random_range(1.0..3.0),
            r.random_range(-1.0..1.0),
        )
        .unwrap(),
        _ => {
            let b: f64 = r.random_range(-1.0..1.0);
            MembershipFunction::triangular(b - r.random_range(0.5..2.0), b, b + r.random_range(0.5..2.0)).unwrap()
        }
    }
}

/// Grid model with random terms and random consequents.
pub fn random_model(r: &mut impl Rng, inputs: usize, terms: usize, allow_triangular: bool) -> AnfisModel {
    let vars = (0..inputs)
        .map(|i| {
            let ts = (0..terms).map(|_| random_term(r, allow_triangular)).collect();
            FuzzyVariable::new(format!("x{}", i + 1), [-1.0, 1.0], ts).unwrap()
        })
        .collect();
    let m = build_grid_model(vars, None).unwrap();
    let c: Vec<f64> = (0..m.consequent_len()).map(|_| r.random_range(-2.0..2.0)).collect();
    m.with_consequents(&c).unwrap()
}

pub fn random_point(r: &mut impl Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| r.random_range(-1.0..1.0)).collect()
}

/// The planted 4-concept map used for learning fixtures.
pub fn planted_map() -> ConceptMap {
    let w = vec![
        vec![0.0, 0.6, -0.4, 0.0],
        vec![-0.5, 0.0, 0.7, 0.3],
        vec![0.2, -0.6, 0.0, 0.8],
        vec![0.5, 0.0, -0.3, 0.0],
    ];
    ConceptMap::with_defaults(vec!["a".into(), "b".into(), "c".into(), "d".into()], w).unwrap()
}

/// 50 episodes of five states each (200 transition pairs) simulated from
/// the planted map, starting from seeded random states.
pub fn planted_transitions(map: &ConceptMap, seed: u64) -> TransitionData {
    let mut r = rng(seed);
    let episodes = (0..50)
        .map(|_| {
            let mut s = FcmState::new((0..map.len()).map(|_| r.random_range(0.0..1.0)).collect()).unwrap();
            let mut ep = vec![s.clone()];
            for _ in 0..4 {
                s = step(map, &s).unwrap();
                ep.push(s.clone());
            }
            ep
        })
        .collect();
    TransitionData::from_episodes(map.concepts().to_vec(), episodes).unwrap()
}

/// Relative difference of two gradient vectors in the Euclidean norm.
pub fn relative_error(analytic: &[f64], numeric: &[f64]) -> f64 {
    let diff: f64 = analytic
        .iter()
        .zip(numeric)
        .map(|(a, n)| (a - n) * (a - n))
        .sum::<f64>()
        .sqrt();
    let scale = analytic
        .iter()
        .map(|a| a * a)
        .sum::<f64>()
        .sqrt()
        .max(numeric.iter().map(|n| n * n).sum::<f64>().sqrt());
    if scale < 1e-12 {
        diff
    } else {
        diff / scale
    }
}
