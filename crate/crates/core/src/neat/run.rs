use super::config::NeatConfig;
use super::genome::Genome;
use super::innovation::InnovationRegistry;
use super::network::{decode, Network};
use super::reproduction::reproduce;
use super::species::SpeciesSet;
use super::NeatError;
use crate::env::{run_episode, EpisodeLimits, LevelSpec, ObservationConfig, ObservingSource, Replay, ReplayHeader};
use crate::fitness::{compute_fitness, is_solution, ConstraintSpec, FitnessParams};
use crate::rng::{self, INIT_SLOT};
use crate::stats::{GenerationStats, RunClock, RunControl};

/// Episode and loop settings that are not part of the NEAT sections.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeatSettings {
    /// Generations evaluated, the first (random) population included; zero
    /// behaves like one.
    pub max_generations: usize,
    pub move_budget: usize,
    pub moves_to_check: usize,
    pub observation: ObservationConfig,
    pub seed: u64,
}

impl Default for NeatSettings {
    fn default() -> Self {
        NeatSettings {
            max_generations: 300,
            move_budget: 5000,
            moves_to_check: 30,
            observation: ObservationConfig::default(),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NeatRun {
    pub best: Genome,
    pub history: Vec<GenerationStats>,
    pub replay: Replay,
    pub solved: bool,
    pub evaluations: usize,
    pub mutations_performed: usize,
    pub time_to_best: f64,
    pub registry: InnovationRegistry,
    /// Number of species after each generation's speciation.
    pub species_counts: Vec<usize>,
    /// Population size entering each evaluated generation.
    pub population_sizes: Vec<usize>,
}

/// Plays one episode with the genome's network choosing actions, stores the
/// fitness and summary on the genome and returns the action trace.
pub fn evaluate_genome(
    genome: &mut Genome,
    level: &LevelSpec,
    params: &FitnessParams,
    settings: &NeatSettings,
    feed_forward: bool,
) -> Replay {
    let mut net = Network::new(genome, feed_forward);
    let mut source = ObservingSource::new(settings.observation, |obs: &[f64]| {
        decode(&net.activate(obs).expect("input count validated against the observation"))
    });
    let limits = EpisodeLimits { move_budget: settings.move_budget, stagnation_window: settings.moves_to_check };
    let outcome = run_episode(level, params, limits, &mut source);
    let fitness = compute_fitness(&outcome.summary, &params.with_max_time(level.max_time()));
    genome.fitness = Some(fitness);
    let summary = outcome.summary;
    let mut replay = outcome.replay;
    replay.header = Some(ReplayHeader {
        fitness,
        coins: summary.collected_coins,
        distance: summary.distance,
        flag_get: summary.flag_get,
        moves: summary.moves_used,
    });
    genome.summary = Some(summary);
    replay
}

/// Evaluates every genome without a fitness; returns their replays by index.
fn evaluate_pending(
    population: &mut [Genome],
    level: &LevelSpec,
    params: &FitnessParams,
    settings: &NeatSettings,
    feed_forward: bool,
) -> Vec<Option<Replay>> {
    let run = |g: &mut Genome| {
        g.fitness.is_none().then(|| evaluate_genome(g, level, params, settings, feed_forward))
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        population.par_iter_mut().map(run).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        population.iter_mut().map(run).collect()
    }
}

fn fresh_population(
    config: &NeatConfig,
    registry: &mut InnovationRegistry,
    seed: u64,
    generation: u64,
    next_key: &mut u64,
) -> Vec<Genome> {
    let mut rng = rng::stream(seed, generation, INIT_SLOT);
    (0..config.neat.pop_size)
        .map(|_| {
            *next_key += 1;
            Genome::initial(*next_key - 1, &config.genome, registry, &mut rng)
        })
        .collect()
}

/// Evolves networks until `max_generations` populations have been
/// evaluated, the fitness criterion reaches `fitness_threshold`, the best
/// genome is a solution, or the wall-clock budget runs out.
pub fn run_neat(
    level: &LevelSpec,
    params: &FitnessParams,
    config: &NeatConfig,
    settings: &NeatSettings,
    constraints: &ConstraintSpec,
    control: RunControl,
    observer: &mut dyn FnMut(&GenerationStats),
) -> Result<NeatRun, NeatError> {
    config.validate()?;
    let expected = settings.observation.len();
    if config.genome.num_inputs != expected {
        return Err(NeatError::InputMismatch { configured: config.genome.num_inputs, observation: expected });
    }
    if settings.move_budget < 1 || settings.moves_to_check < 1 {
        return Err(NeatError::InvalidConfig("move_budget and moves_to_check must be at least 1".into()));
    }

    let clock = RunClock::start(control);
    let first_hidden = (config.genome.num_outputs + config.genome.num_hidden) as i64;
    let mut registry = InnovationRegistry::new(first_hidden);
    let mut next_key = 0u64;
    let mut population = fresh_population(config, &mut registry, settings.seed, 0, &mut next_key);
    let mut species = SpeciesSet::new();
    let feed_forward = config.genome.feed_forward;

    let mut best: Option<(Genome, Replay)> = None;
    let mut history = Vec::new();
    let mut species_counts = Vec::new();
    let mut population_sizes = Vec::new();
    let mut evaluations = 0;
    let mut mutations = 0;
    let mut time_to_best = 0.0;
    let mut solved = false;

    let max_generations = settings.max_generations.max(1);
    let mut stuck = 0;
    for generation in 0..max_generations {
        population_sizes.push(population.len());
        let previous_best = best.as_ref().map_or(f64::NEG_INFINITY, |(b, _)| b.score());
        let replays = evaluate_pending(&mut population, level, params, settings, feed_forward);
        evaluations += replays.iter().filter(|r| r.is_some()).count();
        for (genome, replay) in population.iter().zip(replays) {
            if let Some(replay) = replay {
                if best.as_ref().is_none_or(|(b, _)| genome.score() > b.score()) {
                    best = Some((genome.clone(), replay));
                    time_to_best = clock.elapsed();
                }
            }
        }
        let best_genome = &best.as_ref().expect("population is never empty").0;
        solved = best_genome.summary.as_ref().is_some_and(|s| is_solution(s, constraints));
        let fitnesses: Vec<f64> = population.iter().map(Genome::score).collect();
        if generation > 0 && best_genome.score() <= previous_best {
            stuck += 1;
        }
        let stats = GenerationStats::from_fitnesses(generation, &fitnesses, stuck, solved, clock.elapsed());
        observer(&stats);
        history.push(stats);

        let threshold_met = config.neat.fitness_criterion.reduce(&fitnesses) >= config.neat.fitness_threshold;
        if solved || threshold_met || generation + 1 >= max_generations || clock.budget_exceeded() {
            break;
        }

        species.speciate(&population, generation, config);
        species_counts.push(species.len());
        match reproduce(&mut species, &population, generation, config, &mut registry, settings.seed, &mut next_key) {
            Some(offspring) => {
                mutations += offspring.mutations;
                population = offspring.population;
            }
            None if config.neat.reset_on_extinction => {
                species = SpeciesSet::new();
                population =
                    fresh_population(config, &mut registry, settings.seed, generation as u64 + 1, &mut next_key);
            }
            None => return Err(NeatError::Extinction),
        }
    }

    let (best, replay) = best.expect("at least one generation is evaluated");
    Ok(NeatRun {
        best,
        history,
        replay,
        solved,
        evaluations,
        mutations_performed: mutations,
        time_to_best,
        registry,
        species_counts,
        population_sizes,
    })
}
