use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::Dataset;
use crate::exec;
use crate::fuzzy::AnfisModel;
use crate::Result;

use super::config::{PsoConfig, StopReason, TrainReport};
use super::params::{antecedent_params, lse_fitness, ParamBounds};

/// Velocity limit as a fraction of each parameter's bound width.
const VMAX_FRACTION: f64 = 0.2;
/// Share of the swarm re-seeded when diversity collapses.
const RESEED_FRACTION: f64 = 0.1;

struct Particle {
    x: Vec<f64>,
    v: Vec<f64>,
    fitness: f64,
    best_x: Vec<f64>,
    best_fitness: f64,
}

/// Mean Euclidean distance to the swarm centroid with every coordinate
/// scaled by its bound width.
fn diversity(particles: &[Particle], widths: &[f64]) -> f64 {
    let d = widths.len();
    let n = particles.len() as f64;
    let mut centroid = vec![0.0; d];
    for p in particles {
        for (c, x) in centroid.iter_mut().zip(&p.x) {
            *c += x / n;
        }
    }
    particles
        .iter()
        .map(|p| {
            p.x.iter()
                .zip(&centroid)
                .zip(widths)
                .map(|((x, c), w)| if *w > 0.0 { ((x - c) / w).powi(2) } else { 0.0 })
                .sum::<f64>()
                .sqrt()
        })
        .sum::<f64>()
        / n
}

/// Particle swarm over antecedent parameters, every candidate scored by its
/// RMSE after a least-squares consequent solve.
///
/// The first particle starts at the template's own parameters (clamped to
/// the search box); the rest are uniform in the box. Inertia decreases
/// linearly from `w_max` to `w_min`. Whenever the swarm's normalised
/// diversity drops below `diversity_threshold`, the inertia schedule
/// restarts at `w_max` and the worst ⌈10%⌉ of particles are re-seeded
/// uniformly.
pub fn train_pso_lse(template: &AnfisModel, data: &Dataset, cfg: &PsoConfig) -> Result<(AnfisModel, TrainReport)> {
    cfg.validate()?;
    let bounds = ParamBounds::for_model(template);
    let widths = bounds.widths();
    let vmax: Vec<f64> = widths.iter().map(|w| VMAX_FRACTION * w).collect();
    let dim = bounds.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut positions = Vec::with_capacity(cfg.swarm_size);
    let mut seed_x = antecedent_params(template);
    bounds.clamp(&mut seed_x);
    positions.push(seed_x);
    while positions.len() < cfg.swarm_size {
        positions.push(bounds.sample(&mut rng));
    }
    let fitness = exec::map(&positions, |x| lse_fitness(template, x, data).0);
    let mut swarm: Vec<Particle> = positions
        .into_iter()
        .zip(fitness)
        .map(|(x, f)| {
            let v = vmax
                .iter()
                .map(|&m| if m > 0.0 { rng.random_range(-m..m) } else { 0.0 })
                .collect();
            Particle {
                best_x: x.clone(),
                x,
                v,
                fitness: f,
                best_fitness: f,
            }
        })
        .collect();

    let mut g = best_index(&swarm);
    let mut gbest_x = swarm[g].best_x.clone();
    let mut gbest_f = swarm[g].best_fitness;
    let mut history = vec![gbest_f];
    let mut schedule_start = 0usize;

    for iter in 0..cfg.max_iters {
        let span = (cfg.max_iters - schedule_start).max(1) as f64;
        let progress = ((iter - schedule_start) as f64 / span).min(1.0);
        let w = cfg.w_max - (cfg.w_max - cfg.w_min) * progress;

        for p in swarm.iter_mut() {
            for d in 0..dim {
                let r1: f64 = rng.random();
                let r2: f64 = rng.random();
                let mut v = w * p.v[d] + cfg.c1 * r1 * (p.best_x[d] - p.x[d]) + cfg.c2 * r2 * (gbest_x[d] - p.x[d]);
                v = v.clamp(-vmax[d], vmax[d]);
                let mut x = p.x[d] + v;
                if x < bounds.lo[d] || x > bounds.hi[d] {
                    x = x.clamp(bounds.lo[d], bounds.hi[d]);
                    v = 0.0;
                }
                p.v[d] = v;
                p.x[d] = x;
            }
        }

        let xs: Vec<&Vec<f64>> = swarm.iter().map(|p| &p.x).collect();
        let fitness = exec::map(&xs, |x| lse_fitness(template, x, data).0);
        for (p, f) in swarm.iter_mut().zip(fitness) {
            p.fitness = f;
            if f < p.best_fitness {
                p.best_fitness = f;
                p.best_x = p.x.clone();
            }
        }
        g = best_index(&swarm);
        if swarm[g].best_fitness < gbest_f {
            gbest_f = swarm[g].best_fitness;
            gbest_x = swarm[g].best_x.clone();
        }
        history.push(gbest_f);

        if diversity(&swarm, &widths) < cfg.diversity_threshold {
            schedule_start = iter + 1;
            let reseed = ((RESEED_FRACTION * swarm.len() as f64).ceil() as usize).max(1);
            let mut order: Vec<usize> = (0..swarm.len()).collect();
            order.sort_by(|&a, &b| swarm[b].fitness.total_cmp(&swarm[a].fitness));
            for &i in order.iter().take(reseed) {
                swarm[i].x = bounds.sample(&mut rng);
                swarm[i].v.iter_mut().for_each(|v| *v = 0.0);
            }
        }
    }

    let (best_rmse, fit) = lse_fitness(template, &gbest_x, data);
    debug_assert_eq!(best_rmse, gbest_f);
    Ok((
        fit.model,
        TrainReport {
            history,
            best_rmse: gbest_f,
            stop_reason: StopReason::EpochBudget,
            stage_mse: Vec::new(),
            rank_warnings: fit.rank_warnings,
        },
    ))
}

fn best_index(swarm: &[Particle]) -> usize {
    let mut g = 0;
    for (i, p) in swarm.iter().enumerate() {
        if p.best_fitness < swarm[g].best_fitness {
            g = i;
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuzzy::init_from_data;

    fn fixture() -> (AnfisModel, Dataset) {
        let xs: Vec<f64> = (0..60).map(|i| -1.0 + 2.0 * i as f64 / 59.0).collect();
        let data = Dataset::new(
            xs.iter().map(|&x| vec![x]).collect(),
            xs.iter().map(|x| (3.0 * x).sin()).collect(),
        )
        .unwrap();
        (init_from_data(&data, &[3]).unwrap(), data)
    }

    #[test]
    fn zero_iterations_returns_best_initial_particle() {
        let (m, data) = fixture();
        let cfg = PsoConfig {
            max_iters: 0,
            swarm_size: 6,
            seed: 3,
            ..Default::default()
        };
        let (model, r) = train_pso_lse(&m, &data, &cfg).unwrap();
        assert_eq!(r.history.len(), 1);
        assert_eq!(r.best_rmse, r.history[0]);
        let template_rmse = lse_fitness(&m, &antecedent_params(&m), &data).0;
        assert!(r.best_rmse <= template_rmse);
        assert_eq!(crate::train::mse(&model, &data).sqrt(), r.best_rmse);
    }

    #[test]
    fn global_best_is_monotone_and_deterministic() {
        let (m, data) = fixture();
        let cfg = PsoConfig {
            max_iters: 15,
            swarm_size: 8,
            seed: 11,
            diversity_threshold: 0.05,
            ..Default::default()
        };
        let (a, ra) = train_pso_lse(&m, &data, &cfg).unwrap();
        assert!(ra.history.windows(2).all(|w| w[1] <= w[0]));
        assert!(ra.best_rmse <= ra.history[0]);
        let (b, rb) = train_pso_lse(&m, &data, &cfg).unwrap();
        assert_eq!(ra, rb);
        assert_eq!(a, b);
    }
}
