use rand::Rng;

use super::config::NeatConfig;
use super::genome::Genome;
use super::innovation::InnovationRegistry;
use super::species::SpeciesSet;
use crate::rng;

/// Next generation plus the number of mutation events applied to it.
#[derive(Debug, Clone)]
pub struct Offspring {
    pub population: Vec<Genome>,
    pub mutations: usize,
}

/// Updates each species' best fitness and drops species stagnant for more
/// than `max_stagnation` generations, sparing the `species_elitism` best.
pub fn remove_stagnant(set: &mut SpeciesSet, population: &[Genome], generation: usize, config: &NeatConfig) {
    let func = config.stagnation.species_fitness_func;
    let mut ranked: Vec<(usize, f64)> = set
        .species
        .iter_mut()
        .enumerate()
        .map(|(k, s)| {
            let fitnesses: Vec<f64> = s.members.iter().map(|&i| population[i].score()).collect();
            let f = func.reduce(&fitnesses);
            if f > s.best_fitness_ever {
                s.best_fitness_ever = f;
                s.last_improved = generation;
            }
            (k, f)
        })
        .collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let protected: Vec<usize> = ranked.iter().take(config.stagnation.species_elitism).map(|r| r.0).collect();
    let max = config.stagnation.max_stagnation;
    let mut k = 0;
    set.species.retain(|s| {
        let keep = protected.contains(&k) || s.generations_since_improvement(generation) <= max;
        k += 1;
        keep
    });
}

/// Splits `total` slots across species in proportion to `weights`: one slot
/// each first (when there is room), the rest by largest remainder.
pub fn apportion(weights: &[f64], total: usize) -> Vec<usize> {
    let n = weights.len();
    let mut quota = vec![0usize; n];
    if n == 0 {
        return quota;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(a.cmp(&b)));
    if total < n {
        for &k in order.iter().take(total) {
            quota[k] = 1;
        }
        return quota;
    }
    quota.iter_mut().for_each(|q| *q = 1);
    let rest = total - n;
    let sum: f64 = weights.iter().sum();
    let shares: Vec<f64> = if sum > 0.0 {
        weights.iter().map(|w| w / sum * rest as f64).collect()
    } else {
        vec![rest as f64 / n as f64; n]
    };
    let mut given = 0;
    for (q, s) in quota.iter_mut().zip(&shares) {
        let whole = s.floor() as usize;
        *q += whole;
        given += whole;
    }
    let mut by_remainder: Vec<usize> = (0..n).collect();
    by_remainder.sort_by(|&a, &b| {
        let (ra, rb) = (shares[a] - shares[a].floor(), shares[b] - shares[b].floor());
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &k in by_remainder.iter().take(rest - given) {
        quota[k] += 1;
    }
    quota
}

/// Size of a species' mating pool.
pub fn pool_size(members: usize, survival_threshold: f64) -> usize {
    ((survival_threshold * members as f64).ceil() as usize).clamp(1, members.max(1))
}

/// Breeds the next population from speciated, evaluated `population`.
/// Returns `None` when every species went extinct.
#[allow(clippy::too_many_arguments)]
pub fn reproduce(
    set: &mut SpeciesSet,
    population: &[Genome],
    generation: usize,
    config: &NeatConfig,
    registry: &mut InnovationRegistry,
    seed: u64,
    next_key: &mut u64,
) -> Option<Offspring> {
    remove_stagnant(set, population, generation, config);
    if set.is_empty() {
        return None;
    }

    let members: Vec<f64> =
        set.species.iter().flat_map(|s| s.members.iter().map(|&i| population[i].score())).collect();
    let min = members.iter().copied().fold(f64::INFINITY, f64::min);
    let max = members.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let range = (max - min).max(1.0);
    let adjusted: Vec<f64> = set
        .species
        .iter()
        .map(|s| {
            let mean = s.members.iter().map(|&i| population[i].score()).sum::<f64>() / s.members.len() as f64;
            (mean - min) / range
        })
        .collect();
    let quotas = apportion(&adjusted, config.neat.pop_size);

    registry.new_generation();
    let mut next = Vec::with_capacity(config.neat.pop_size);
    let mut mutations = 0;
    let mut slot = 0u64;
    for (species, &quota) in set.species.iter().zip(&quotas) {
        let mut ranked = species.members.clone();
        ranked.sort_by(|&a, &b| {
            population[b].score().total_cmp(&population[a].score()).then(population[a].key.cmp(&population[b].key))
        });
        let elites = config.reproduction.elitism.min(quota).min(ranked.len());
        next.extend(ranked[..elites].iter().map(|&i| population[i].clone()));
        let pool = &ranked[..pool_size(ranked.len(), config.reproduction.survival_threshold)];
        for _ in elites..quota {
            let mut rng = rng::stream(seed, generation as u64 + 1, slot);
            slot += 1;
            let key = *next_key;
            *next_key += 1;
            let mut child = if pool.len() == 1 {
                let mut c = population[pool[0]].clone();
                c.key = key;
                c
            } else {
                let a = &population[pool[rng.gen_range(0..pool.len())]];
                let b = &population[pool[rng.gen_range(0..pool.len())]];
                Genome::crossover(a, b, key, &mut rng)
            };
            child.fitness = None;
            child.summary = None;
            mutations += child.mutate(&config.genome, registry, &mut rng);
            next.push(child);
        }
    }
    Some(Offspring { population: next, mutations })
}
