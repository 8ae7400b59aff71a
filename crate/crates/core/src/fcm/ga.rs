use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::map::step_unchecked;
use super::{ConceptMap, TransitionData};
use crate::{exec, Error, Result};

/// Blend-crossover extension on each side of the parents' interval.
const BLEND_ALPHA: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaConfig {
    pub population_size: usize,
    pub generations: usize,
    pub tournament_size: usize,
    pub crossover_rate: f64,
    pub mutation_sigma: f64,
    /// Per-gene mutation probability; `None` means `1 / genes`.
    pub mutation_rate: Option<f64>,
    pub elitism_count: usize,
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population_size: 60,
            generations: 150,
            tournament_size: 3,
            crossover_rate: 0.9,
            mutation_sigma: 0.1,
            mutation_rate: None,
            elitism_count: 2,
            seed: 0,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::InvalidConfig("population_size must be >= 2".into()));
        }
        if self.elitism_count == 0 || self.elitism_count >= self.population_size {
            return Err(Error::InvalidConfig(
                "elitism_count must lie in 1..population_size".into(),
            ));
        }
        if self.tournament_size == 0 {
            return Err(Error::InvalidConfig("tournament_size must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) {
            return Err(Error::InvalidConfig("crossover_rate must lie in [0, 1]".into()));
        }
        if !(self.mutation_sigma > 0.0) {
            return Err(Error::InvalidConfig("mutation_sigma must be > 0".into()));
        }
        if let Some(r) = self.mutation_rate {
            if !(0.0..=1.0).contains(&r) {
                return Err(Error::InvalidConfig("mutation_rate must lie in [0, 1]".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaOutcome {
    pub map: ConceptMap,
    /// Best fitness (negated mean squared one-step error) after
    /// initialisation and after each generation.
    pub best_fitness: Vec<f64>,
}

/// Negated mean over transition pairs of `‖step(map, A(t)) − A(t+1)‖²`.
fn fitness(n: usize, genes: &[f64], data: &TransitionData) -> f64 {
    let w = ConceptMap::weights_from_off_diagonal(n, genes);
    let mut total = 0.0;
    for (a, b) in data.pairs() {
        let pred = step_unchecked(
            &w,
            ConceptMap::DEFAULT_LAMBDA,
            ConceptMap::DEFAULT_K_SELF,
            a.activations(),
        );
        total += pred
            .activations()
            .iter()
            .zip(b.activations())
            .map(|(p, q)| (p - q) * (p - q))
            .sum::<f64>();
    }
    -(total / data.pair_count() as f64)
}

fn tournament<'a>(rng: &mut impl Rng, pop: &'a [(Vec<f64>, f64)], size: usize) -> &'a [f64] {
    let mut best = rng.random_range(0..pop.len());
    for _ in 1..size {
        let c = rng.random_range(0..pop.len());
        if pop[c].1 > pop[best].1 {
            best = c;
        }
    }
    &pop[best].0
}

/// Learns the off-diagonal weights of a map over `data`'s concepts with a
/// real-coded GA (tournament selection, BLX-0.1 crossover, gaussian
/// mutation, elitism). The learned map uses the default steepness and
/// self-memory.
pub fn ga_learn(data: &TransitionData, cfg: &GaConfig) -> Result<GaOutcome> {
    cfg.validate()?;
    let n = data.concepts().len();
    if n < 2 {
        return Err(Error::InvalidModel("a concept map needs at least two concepts".into()));
    }
    let genes = n * (n - 1);
    let mut_rate = cfg.mutation_rate.unwrap_or(1.0 / genes as f64);
    let noise = Normal::new(0.0, cfg.mutation_sigma).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let chromosomes: Vec<Vec<f64>> = (0..cfg.population_size)
        .map(|_| (0..genes).map(|_| rng.random_range(-1.0..=1.0)).collect())
        .collect();
    let scores = exec::map(&chromosomes, |c| fitness(n, c, data));
    let mut pop: Vec<(Vec<f64>, f64)> = chromosomes.into_iter().zip(scores).collect();
    sort_desc(&mut pop);
    let mut best_fitness = vec![pop[0].1];

    for _ in 0..cfg.generations {
        let mut children: Vec<Vec<f64>> = Vec::with_capacity(cfg.population_size - cfg.elitism_count);
        while children.len() < cfg.population_size - cfg.elitism_count {
            let a = tournament(&mut rng, &pop, cfg.tournament_size);
            let b = tournament(&mut rng, &pop, cfg.tournament_size);
            let mut child: Vec<f64> = if rng.random::<f64>() < cfg.crossover_rate {
                a.iter()
                    .zip(b)
                    .map(|(&x, &y)| {
                        let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
                        let ext = BLEND_ALPHA * (hi - lo);
                        let (lo, hi) = (lo - ext, hi + ext);
                        let g = if hi > lo { rng.random_range(lo..=hi) } else { lo };
                        g.clamp(-1.0, 1.0)
                    })
                    .collect()
            } else {
                a.to_vec()
            };
            for g in child.iter_mut() {
                if rng.random::<f64>() < mut_rate {
                    *g = (*g + noise.sample(&mut rng)).clamp(-1.0, 1.0);
                }
            }
            children.push(child);
        }
        let scores = exec::map(&children, |c| fitness(n, c, data));
        pop.truncate(cfg.elitism_count);
        pop.extend(children.into_iter().zip(scores));
        sort_desc(&mut pop);
        best_fitness.push(pop[0].1);
    }

    let weights = ConceptMap::weights_from_off_diagonal(n, &pop[0].0);
    Ok(GaOutcome {
        map: ConceptMap::with_defaults(data.concepts().to_vec(), weights)?,
        best_fitness,
    })
}

/// Fittest first; stable so equal scores keep insertion order.
fn sort_desc(pop: &mut [(Vec<f64>, f64)]) {
    pop.sort_by(|a, b| b.1.total_cmp(&a.1));
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fcm::FcmState;

    fn tiny_data() -> TransitionData {
        let s = |a: f64, b: f64| FcmState::new(vec![a, b]).unwrap();
        TransitionData::new(
            vec!["a".into(), "b".into()],
            vec![s(0.1, 0.9), s(0.6, 0.7), s(0.8, 0.7)],
        )
        .unwrap()
    }

    #[test]
    fn zero_generations_returns_best_initial() {
        let cfg = GaConfig {
            generations: 0,
            population_size: 10,
            seed: 5,
            ..Default::default()
        };
        let out = ga_learn(&tiny_data(), &cfg).unwrap();
        assert_eq!(out.best_fitness.len(), 1);
        let genes = out.map.off_diagonal();
        assert_eq!(fitness(2, &genes, &tiny_data()), out.best_fitness[0]);
    }

    #[test]
    fn elitism_keeps_best_monotone() {
        let cfg = GaConfig {
            generations: 30,
            population_size: 12,
            seed: 9,
            ..Default::default()
        };
        let out = ga_learn(&tiny_data(), &cfg).unwrap();
        assert!(out.best_fitness.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn config_validation() {
        assert!(GaConfig {
            elitism_count: 0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(GaConfig {
            elitism_count: 60,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(GaConfig {
            crossover_rate: 1.5,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(GaConfig {
            mutation_sigma: 0.0,
            ..Default::default()
        }
        .validate()
        .is_err());
    }
}
