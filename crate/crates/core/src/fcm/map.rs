use serde::{Deserialize, Serialize};

use crate::{Error, Result};

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Signed weighted concept graph. `weights[j][i]` is the influence of
/// concept `j` on concept `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MapRepr")]
pub struct ConceptMap {
    concepts: Vec<String>,
    weights: Vec<Vec<f64>>,
    lambda: f64,
    k_self: f64,
}

#[derive(Deserialize)]
struct MapRepr {
    concepts: Vec<String>,
    weights: Vec<Vec<f64>>,
    lambda: f64,
    k_self: f64,
}

impl TryFrom<MapRepr> for ConceptMap {
    type Error = Error;

    fn try_from(r: MapRepr) -> Result<Self> {
        Self::new(r.concepts, r.weights, r.lambda, r.k_self)
    }
}

impl ConceptMap {
    pub const DEFAULT_LAMBDA: f64 = 1.0;
    pub const DEFAULT_K_SELF: f64 = 1.0;

    pub fn new(concepts: Vec<String>, weights: Vec<Vec<f64>>, lambda: f64, k_self: f64) -> Result<Self> {
        let n = concepts.len();
        if n < 2 {
            return Err(Error::InvalidModel("a concept map needs at least two concepts".into()));
        }
        for (i, c) in concepts.iter().enumerate() {
            if concepts[..i].contains(c) {
                return Err(Error::InvalidModel(format!("duplicate concept `{c}`")));
            }
        }
        if weights.len() != n || weights.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidModel(format!("weights must be {n}x{n}")));
        }
        for (j, row) in weights.iter().enumerate() {
            for (i, &w) in row.iter().enumerate() {
                if !(w.abs() <= 1.0) {
                    return Err(Error::InvalidModel(format!("weight [{j}][{i}] = {w} outside [-1, 1]")));
                }
                if i == j && w != 0.0 {
                    return Err(Error::InvalidModel(format!("diagonal weight [{j}][{j}] must be 0")));
                }
            }
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidModel(format!("lambda must be > 0, got {lambda}")));
        }
        if !(0.0..=1.0).contains(&k_self) {
            return Err(Error::InvalidModel(format!("k_self must lie in [0, 1], got {k_self}")));
        }
        Ok(Self {
            concepts,
            weights,
            lambda,
            k_self,
        })
    }

    /// Map with default steepness and self-memory.
    pub fn with_defaults(concepts: Vec<String>, weights: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(concepts, weights, Self::DEFAULT_LAMBDA, Self::DEFAULT_K_SELF)
    }

    pub fn concepts(&self) -> &[String] {
        &self.concepts
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn k_self(&self) -> f64 {
        self.k_self
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    pub fn index_of(&self, concept: &str) -> Result<usize> {
        self.concepts
            .iter()
            .position(|c| c == concept)
            .ok_or_else(|| Error::UnknownConcept(concept.to_string()))
    }

    /// Off-diagonal weights, row-major (source-major).
    pub fn off_diagonal(&self) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .flat_map(|j| (0..n).filter(move |&i| i != j).map(move |i| (j, i)))
            .map(|(j, i)| self.weights[j][i])
            .collect()
    }

    /// Rebuilds a weight matrix from [`Self::off_diagonal`] order, clipping
    /// to `[-1, 1]`.
    pub(crate) fn weights_from_off_diagonal(n: usize, genes: &[f64]) -> Vec<Vec<f64>> {
        let mut w = vec![vec![0.0; n]; n];
        let mut k = 0;
        for (j, row) in w.iter_mut().enumerate() {
            for (i, cell) in row.iter_mut().enumerate() {
                if i != j {
                    *cell = genes[k].clamp(-1.0, 1.0);
                    k += 1;
                }
            }
        }
        w
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Concept activations, each in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FcmState(Vec<f64>);

impl FcmState {
    pub fn new(activations: Vec<f64>) -> Result<Self> {
        if let Some(i) = activations.iter().position(|a| !(0.0..=1.0).contains(a)) {
            return Err(Error::InvalidData(format!(
                "activation {i} = {} outside [0, 1]",
                activations[i]
            )));
        }
        Ok(Self(activations))
    }

    pub fn activations(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// One synchronous update:
/// `A_i' = σ(λ·(Σ_{j≠i} w_ji·A_j + k_self·A_i))`.
pub fn step(map: &ConceptMap, state: &FcmState) -> Result<FcmState> {
    let n = map.len();
    if state.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: state.len(),
        });
    }
    Ok(step_unchecked(
        map.weights(),
        map.lambda,
        map.k_self,
        state.activations(),
    ))
}

pub(crate) fn step_unchecked(weights: &[Vec<f64>], lambda: f64, k_self: f64, a: &[f64]) -> FcmState {
    let n = a.len();
    let next = (0..n)
        .map(|i| {
            let incoming: f64 = (0..n).filter(|&j| j != i).map(|j| weights[j][i] * a[j]).sum();
            sigmoid(lambda * (incoming + k_self * a[i]))
        })
        .collect();
    FcmState(next)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunClass {
    FixedPoint,
    LimitCycle,
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FcmRunResult {
    /// Initial state followed by every computed state.
    pub trajectory: Vec<FcmState>,
    pub class: RunClass,
    /// Period of the detected cycle; 0 unless `class` is `LimitCycle`.
    pub cycle_length: usize,
}

impl FcmRunResult {
    pub fn terminal(&self) -> &FcmState {
        self.trajectory.last().expect("trajectory is never empty")
    }

    /// Number of updates performed.
    pub fn iterations(&self) -> usize {
        self.trajectory.len() - 1
    }
}

/// Iterates [`step`] until two consecutive states agree within `eps`
/// (sup-norm), a state revisits an earlier one within `eps`, or
/// `max_iters` updates have been made.
pub fn run(map: &ConceptMap, initial: &FcmState, max_iters: usize, eps: f64) -> Result<FcmRunResult> {
    if max_iters == 0 {
        return Err(Error::InvalidConfig("max_iters must be >= 1".into()));
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidConfig("eps must be > 0".into()));
    }
    let mut trajectory = vec![initial.clone()];
    for _ in 0..max_iters {
        let prev = trajectory.last().expect("non-empty");
        let next = step(map, prev)?;
        if next.max_abs_diff(prev) < eps {
            trajectory.push(next);
            return Ok(FcmRunResult {
                trajectory,
                class: RunClass::FixedPoint,
                cycle_length: 0,
            });
        }
        let t = trajectory.len();
        let earlier = trajectory[..t - 1].iter().rposition(|s| s.max_abs_diff(&next) < eps);
        trajectory.push(next);
        if let Some(idx) = earlier {
            return Ok(FcmRunResult {
                trajectory,
                class: RunClass::LimitCycle,
                cycle_length: t - idx,
            });
        }
    }
    Ok(FcmRunResult {
        trajectory,
        class: RunClass::BudgetExhausted,
        cycle_length: 0,
    })
}

/// Evidence balance for `target` at the run's terminal state.
///
/// With `P = Σ_{w_jt > 0} w_jt·A_j` and `N = Σ_{w_jt < 0} |w_jt|·A_j`,
/// consonance is `|P − N| / (P + N)`, and 0 when there is no incoming
/// evidence at all.
pub fn consonance(map: &ConceptMap, result: &FcmRunResult, target: &str) -> Result<f64> {
    let t = map.index_of(target)?;
    let a = result.terminal().activations();
    let (mut pos, mut neg) = (0.0, 0.0);
    for (j, row) in map.weights().iter().enumerate() {
        let w = row[t];
        if j == t || w == 0.0 {
            continue;
        }
        if w > 0.0 {
            pos += w * a[j];
        } else {
            neg += -w * a[j];
        }
    }
    let total = pos + neg;
    Ok(if total > 0.0 {
        ((pos - neg).abs() / total).min(1.0)
    } else {
        0.0
    })
}

/// External evidence about one concept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub concept: String,
    pub intensity: f64,
}

impl Event {
    pub fn new(concept: impl Into<String>, intensity: f64) -> Self {
        Self {
            concept: concept.into(),
            intensity,
        }
    }
}

/// Initial state from events: named concepts take their intensity, the
/// rest sit at the neutral 0.5.
pub fn event_encode(map: &ConceptMap, events: &[Event]) -> Result<FcmState> {
    let mut a = vec![0.5; map.len()];
    for e in events {
        let i = map.index_of(&e.concept)?;
        if !(0.0..=1.0).contains(&e.intensity) {
            return Err(Error::IntensityOutOfRange {
                concept: e.concept.clone(),
                intensity: e.intensity,
            });
        }
        a[i] = e.intensity;
    }
    Ok(FcmState(a))
}

/// Qualitative branch output for one target concept.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FcmForecast {
    pub activation: f64,
    pub consonance: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("c{i}")).collect()
    }

    fn zero_map(n: usize, k_self: f64) -> ConceptMap {
        ConceptMap::new(names(n), vec![vec![0.0; n]; n], 1.0, k_self).unwrap()
    }

    #[test]
    fn zero_map_goes_to_half() {
        let m = zero_map(3, 0.0);
        let s = step(&m, &FcmState::new(vec![0.1, 0.9, 0.3]).unwrap()).unwrap();
        assert_eq!(s.activations(), &[0.5, 0.5, 0.5]);
    }

    #[test]
    fn single_edge_sigmoid() {
        let mut w = vec![vec![0.0; 2]; 2];
        w[0][1] = 1.0;
        let m = ConceptMap::new(names(2), w, 1.0, 0.0).unwrap();
        let s = step(&m, &FcmState::new(vec![1.0, 0.2]).unwrap()).unwrap();
        assert!((s.activations()[1] - 0.731059).abs() < 1e-6);
        assert_eq!(s.activations()[1], 1.0 / (1.0 + (-1.0f64).exp()));
    }

    #[test]
    fn step_dimension_mismatch() {
        assert!(step(&zero_map(3, 0.0), &FcmState::new(vec![0.5; 2]).unwrap()).is_err());
    }

    #[test]
    fn fixed_point_at_iteration_two() {
        let r = run(
            &zero_map(4, 0.0),
            &FcmState::new(vec![0.0, 1.0, 0.2, 0.7]).unwrap(),
            50,
            1e-9,
        )
        .unwrap();
        assert_eq!(r.class, RunClass::FixedPoint);
        assert_eq!(r.iterations(), 2);
        assert_eq!(r.terminal().activations(), &[0.5; 4]);
        assert_eq!(r.cycle_length, 0);
    }

    #[test]
    fn budget_exhausted() {
        let mut w = vec![vec![0.0; 2]; 2];
        w[0][1] = 0.8;
        w[1][0] = -0.6;
        let m = ConceptMap::with_defaults(names(2), w).unwrap();
        let r = run(&m, &FcmState::new(vec![1.0, 0.0]).unwrap(), 1, 1e-9).unwrap();
        assert_eq!(r.class, RunClass::BudgetExhausted);
        assert_eq!(r.trajectory.len(), 2);
    }

    #[test]
    fn run_rejects_bad_params() {
        let m = zero_map(2, 0.0);
        let s = FcmState::new(vec![0.5, 0.5]).unwrap();
        assert!(run(&m, &s, 0, 1e-6).is_err());
        assert!(run(&m, &s, 5, 0.0).is_err());
    }

    fn into_target(ws: &[f64]) -> ConceptMap {
        // Concepts c1..c{k} feed c{k+1}.
        let n = ws.len() + 1;
        let mut w = vec![vec![0.0; n]; n];
        for (j, &x) in ws.iter().enumerate() {
            w[j][n - 1] = x;
        }
        ConceptMap::with_defaults(names(n), w).unwrap()
    }

    fn at(state: Vec<f64>) -> FcmRunResult {
        FcmRunResult {
            trajectory: vec![FcmState::new(state).unwrap()],
            class: RunClass::FixedPoint,
            cycle_length: 0,
        }
    }

    #[test]
    fn consonance_cases() {
        let m = into_target(&[0.5, 0.7]);
        assert_eq!(consonance(&m, &at(vec![1.0, 0.8, 0.3]), "c3").unwrap(), 1.0);
        let m = into_target(&[0.5, -0.5]);
        assert_eq!(consonance(&m, &at(vec![0.6, 0.6, 0.3]), "c3").unwrap(), 0.0);
        // P = 0.6, N = 0.2
        let m = into_target(&[0.6, -0.4]);
        let c = consonance(&m, &at(vec![1.0, 0.5, 0.3]), "c3").unwrap();
        assert!((c - 0.5).abs() < 1e-12, "{c}");
        // no incoming evidence
        let m = into_target(&[0.0, 0.0]);
        assert_eq!(consonance(&m, &at(vec![1.0, 1.0, 0.3]), "c3").unwrap(), 0.0);
        assert!(matches!(
            consonance(&m, &at(vec![1.0, 1.0, 0.3]), "zz"),
            Err(Error::UnknownConcept(_))
        ));
    }

    #[test]
    fn events() {
        let m = zero_map(4, 1.0);
        assert_eq!(event_encode(&m, &[]).unwrap().activations(), &[0.5; 4]);
        let s = event_encode(&m, &[Event::new("c3", 1.0)]).unwrap();
        assert_eq!(s.activations(), &[0.5, 0.5, 1.0, 0.5]);
        assert!(matches!(
            event_encode(&m, &[Event::new("c3", 1.2)]),
            Err(Error::IntensityOutOfRange { .. })
        ));
        assert!(matches!(
            event_encode(&m, &[Event::new("nope", 0.2)]),
            Err(Error::UnknownConcept(_))
        ));
    }

    #[test]
    fn map_validation_and_json() {
        assert!(ConceptMap::with_defaults(names(1), vec![vec![0.0]]).is_err());
        assert!(ConceptMap::with_defaults(names(2), vec![vec![0.1, 0.0], vec![0.0, 0.0]]).is_err());
        assert!(ConceptMap::with_defaults(names(2), vec![vec![0.0, 1.5], vec![0.0, 0.0]]).is_err());
        assert!(ConceptMap::new(names(2), vec![vec![0.0; 2]; 2], 0.0, 1.0).is_err());
        assert!(ConceptMap::new(names(2), vec![vec![0.0; 2]; 2], 1.0, 1.5).is_err());
        assert!(ConceptMap::with_defaults(vec!["a".into(), "a".into()], vec![vec![0.0; 2]; 2]).is_err());
        let m = into_target(&[0.25, -0.75]);
        let v: serde_json::Value = serde_json::from_str(&m.to_json().unwrap()).unwrap();
        assert_eq!(v["concepts"], serde_json::json!(["c1", "c2", "c3"]));
        assert_eq!(v["lambda"], 1.0);
        assert_eq!(v["k_self"], 1.0);
        assert_eq!(ConceptMap::from_json(&m.to_json().unwrap()).unwrap(), m);
    }
}
