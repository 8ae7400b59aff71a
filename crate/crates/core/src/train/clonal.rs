use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::data::Dataset;
use crate::exec;
use crate::fuzzy::AnfisModel;
use crate::Result;

use super::config::{ClonalConfig, StopReason, TrainReport};
use super::params::{antecedent_params, lse_fitness, ParamBounds};

/// Antibody affinity: `1 / (1 + RMSE)`.
pub fn affinity(rmse: f64) -> f64 {
    1.0 / (1.0 + rmse)
}

#[derive(Clone)]
struct Antibody {
    params: Vec<f64>,
    rmse: f64,
}

/// Clonal selection over antecedent parameter vectors (antibodies) against
/// the training data (antigen).
///
/// Each generation ranks the population by affinity, clones the top
/// `selection_count` antibodies `⌈β·N/rank⌉` times, hypermutates the clones
/// with gaussian noise whose scale shrinks as normalised affinity grows,
/// keeps the best member of each lineage and replaces the worst
/// `replacement_fraction` of the population with fresh random antibodies.
/// The global best is never replaced.
pub fn train_clonal(template: &AnfisModel, data: &Dataset, cfg: &ClonalConfig) -> Result<(AnfisModel, TrainReport)> {
    cfg.validate()?;
    let bounds = ParamBounds::for_model(template);
    let widths = bounds.widths();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let score = |ps: &[Vec<f64>]| exec::map(ps, |p| lse_fitness(template, p, data).0);

    let mut initial = Vec::with_capacity(cfg.population_size);
    let mut seed_params = antecedent_params(template);
    bounds.clamp(&mut seed_params);
    initial.push(seed_params);
    while initial.len() < cfg.population_size {
        initial.push(bounds.sample(&mut rng));
    }
    let rmses = score(&initial);
    let mut pop: Vec<Antibody> = initial
        .into_iter()
        .zip(rmses)
        .map(|(params, rmse)| Antibody { params, rmse })
        .collect();
    sort_by_affinity(&mut pop);
    let mut history = vec![pop[0].rmse];
    let n = cfg.population_size;

    for _ in 0..cfg.generations {
        let best_aff = affinity(pop[0].rmse);
        let worst_aff = affinity(pop[n - 1].rmse);
        let spread = best_aff - worst_aff;

        // Clone and hypermutate the selected antibodies.
        let mut clones = Vec::new();
        let mut lineage = Vec::new();
        for (rank0, parent) in pop.iter().take(cfg.selection_count).enumerate() {
            let count = (cfg.clone_factor * n as f64 / (rank0 + 1) as f64).ceil() as usize;
            let norm_aff = if spread > 0.0 {
                (affinity(parent.rmse) - worst_aff) / spread
            } else {
                0.0
            };
            let scale = cfg.mutation_scale * (1.0 - norm_aff).max(cfg.mutation_floor);
            for _ in 0..count {
                let mut child: Vec<f64> = parent
                    .params
                    .iter()
                    .zip(&widths)
                    .map(|(p, w)| {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        p + scale * w * z
                    })
                    .collect();
                bounds.clamp(&mut child);
                clones.push(child);
                lineage.push(rank0);
            }
        }
        let clone_rmse = score(&clones);
        for ((child, rmse), parent) in clones.into_iter().zip(clone_rmse).zip(lineage) {
            if rmse < pop[parent].rmse {
                pop[parent] = Antibody { params: child, rmse };
            }
        }
        sort_by_affinity(&mut pop);

        // Receptor editing: fresh antibodies replace the worst, never the best.
        let replace = ((cfg.replacement_fraction * n as f64).floor() as usize).min(n.saturating_sub(1));
        if replace > 0 {
            let fresh: Vec<Vec<f64>> = (0..replace).map(|_| bounds.sample(&mut rng)).collect();
            let fresh_rmse = score(&fresh);
            for (k, (params, rmse)) in fresh.into_iter().zip(fresh_rmse).enumerate() {
                pop[n - 1 - k] = Antibody { params, rmse };
            }
            sort_by_affinity(&mut pop);
        }
        history.push(pop[0].rmse);
    }

    let (best_rmse, fit) = lse_fitness(template, &pop[0].params, data);
    debug_assert_eq!(best_rmse, pop[0].rmse);
    Ok((
        fit.model,
        TrainReport {
            history,
            best_rmse: pop[0].rmse,
            stop_reason: StopReason::EpochBudget,
            stage_mse: Vec::new(),
            rank_warnings: fit.rank_warnings,
        },
    ))
}

/// Highest affinity (lowest RMSE) first; stable, so ties keep their order.
fn sort_by_affinity(pop: &mut [Antibody]) {
    pop.sort_by(|a, b| affinity(b.rmse).total_cmp(&affinity(a.rmse)));
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuzzy::init_from_data;

    #[test]
    fn affinity_is_inverse_to_rmse() {
        let rmses = [0.0, 0.3, 0.01, 5.0, 1.2];
        for a in rmses {
            for b in rmses {
                assert_eq!(a < b, affinity(a) > affinity(b));
            }
        }
        assert_eq!(affinity(0.0), 1.0);
    }

    #[test]
    fn zero_generations_returns_best_initial() {
        let xs: Vec<f64> = (0..40).map(|i| i as f64 / 39.0).collect();
        let data = Dataset::new(
            xs.iter().map(|&x| vec![x]).collect(),
            xs.iter().map(|x| x.powi(3)).collect(),
        )
        .unwrap();
        let m = init_from_data(&data, &[2]).unwrap();
        let cfg = ClonalConfig {
            generations: 0,
            population_size: 5,
            selection_count: 2,
            seed: 4,
            ..Default::default()
        };
        let (_, r) = train_clonal(&m, &data, &cfg).unwrap();
        assert_eq!(r.history.len(), 1);
        assert!(r.best_rmse <= lse_fitness(&m, &antecedent_params(&m), &data).0);
    }
}
