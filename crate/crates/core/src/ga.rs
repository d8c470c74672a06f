//! Evolution of fixed-length action sequences.
//!
//! Each generation keeps the `elitism_count` best genomes unchanged and fills
//! the rest of the population with mutated one-point-crossover children of
//! tournament winners. The per-gene mutation rate adapts: it rises by
//! `mutation_step` after every generation without a new best and falls by the
//! same step after an improvement.

use rand::seq::index::sample;
use rand::Rng;
use thiserror::Error;

use crate::env::{
    run_episode, Action, EpisodeLimits, LevelSpec, Replay, ReplayHeader, SequenceSource,
};
use crate::fitness::{compute_fitness, is_solution, ConstraintSpec, EpisodeSummary, FitnessParams};
use crate::rng::{self, INIT_SLOT};
use crate::stats::{GenerationStats, RunClock, RunControl};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GaError {
    #[error("parents differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("replay has {replay} actions but genomes hold {moves_amount}")]
    ReplayTooLong { replay: usize, moves_amount: usize },
    #[error("invalid GA config: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaConfig {
    pub population_size: usize,
    pub generation_amount: usize,
    pub moves_amount: usize,
    pub moves_to_check: usize,
    pub moves_mutable: f64,
    pub base_mutation_rate: f64,
    pub mutation_step: f64,
    pub mutation_rate_max: f64,
    pub elitism_count: usize,
    pub offspring_per_pair: usize,
    pub tournament_size: usize,
    pub crossover_point_fraction: f64,
    pub rng_seed: u64,
    /// Actions genes are drawn from.
    pub alphabet: Vec<Action>,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population_size: 20,
            generation_amount: 1000,
            moves_amount: 5000,
            moves_to_check: 30,
            moves_mutable: 0.8,
            base_mutation_rate: 0.01,
            mutation_step: 0.005,
            mutation_rate_max: 0.8,
            elitism_count: 1,
            offspring_per_pair: 2,
            tournament_size: 3,
            crossover_point_fraction: 0.5,
            rng_seed: 0,
            alphabet: Action::ALL.to_vec(),
        }
    }
}

ini_section!(GaConfig {
    population_size,
    generation_amount,
    moves_amount,
    moves_to_check,
    moves_mutable,
    base_mutation_rate,
    mutation_step,
    mutation_rate_max,
    elitism_count,
    offspring_per_pair,
    tournament_size,
    crossover_point_fraction,
    rng_seed,
    alphabet,
});

impl GaConfig {
    pub fn validate(&self) -> Result<(), GaError> {
        let fail = |m: &str| Err(GaError::InvalidConfig(m.to_string()));
        if self.population_size < 2 {
            return fail("population_size must be at least 2");
        }
        if self.elitism_count < 1 || self.elitism_count >= self.population_size {
            return fail("elitism_count must satisfy 1 <= elitism_count < population_size");
        }
        if !(self.moves_mutable > 0.0 && self.moves_mutable <= 1.0) {
            return fail("moves_mutable must lie in (0, 1]");
        }
        if self.tournament_size < 1 || self.tournament_size > self.population_size {
            return fail("tournament_size must lie in [1, population_size]");
        }
        if !(self.crossover_point_fraction > 0.0 && self.crossover_point_fraction < 1.0) {
            return fail("crossover_point_fraction must lie in (0, 1)");
        }
        if self.moves_amount < 1 || self.moves_to_check < 1 {
            return fail("moves_amount and moves_to_check must be at least 1");
        }
        if !(1..=2).contains(&self.offspring_per_pair) {
            return fail("offspring_per_pair must be 1 or 2");
        }
        let rates = [self.base_mutation_rate, self.mutation_step, self.mutation_rate_max];
        if rates.iter().any(|r| !(0.0..=1.0).contains(r)) || self.mutation_step > self.mutation_rate_max {
            return fail("mutation rates must lie in [0, 1] with mutation_step <= mutation_rate_max");
        }
        if self.alphabet.is_empty() {
            return fail("alphabet must not be empty");
        }
        Ok(())
    }

    fn limits(&self) -> EpisodeLimits {
        EpisodeLimits { move_budget: self.moves_amount, stagnation_window: self.moves_to_check }
    }
}

/// A genome: one action per frame.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentGenome {
    pub moves: Vec<Action>,
    pub fitness: Option<f64>,
    pub moves_used: usize,
    pub summary: Option<EpisodeSummary>,
}

impl AgentGenome {
    pub fn new(moves: Vec<Action>) -> Self {
        AgentGenome { moves, fitness: None, moves_used: 0, summary: None }
    }

    /// Fitness, or `-inf` before evaluation.
    pub fn score(&self) -> f64 {
        self.fitness.unwrap_or(f64::NEG_INFINITY)
    }

    /// The actions actually played in the last evaluation.
    pub fn played(&self) -> &[Action] {
        &self.moves[..self.moves_used.min(self.moves.len())]
    }
}

fn random_action<R: Rng + ?Sized>(alphabet: &[Action], rng: &mut R) -> Action {
    alphabet[rng.gen_range(0..alphabet.len())]
}

pub fn create_population<R: Rng + ?Sized>(config: &GaConfig, rng: &mut R) -> Vec<AgentGenome> {
    (0..config.population_size)
        .map(|_| {
            AgentGenome::new(
                (0..config.moves_amount).map(|_| random_action(&config.alphabet, rng)).collect(),
            )
        })
        .collect()
}

/// Plays the genome by index and stores fitness, summary and moves used.
pub fn evaluate(
    genome: &mut AgentGenome,
    level: &LevelSpec,
    params: &FitnessParams,
    config: &GaConfig,
) -> f64 {
    let outcome = run_episode(level, params, config.limits(), &mut SequenceSource(&genome.moves));
    let fitness = compute_fitness(&outcome.summary, &params.with_max_time(level.max_time()));
    genome.fitness = Some(fitness);
    genome.moves_used = outcome.summary.moves_used;
    genome.summary = Some(outcome.summary);
    fitness
}

fn evaluate_all(
    genomes: &mut [AgentGenome],
    level: &LevelSpec,
    params: &FitnessParams,
    config: &GaConfig,
) {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        genomes.par_iter_mut().for_each(|g| {
            evaluate(g, level, params, config);
        });
    }
    #[cfg(not(feature = "parallel"))]
    for g in genomes.iter_mut() {
        evaluate(g, level, params, config);
    }
}

/// Index of the fittest of `size` distinct uniformly drawn candidates; ties
/// go to the lowest population index.
pub fn tournament_select<R: Rng + ?Sized>(
    population: &[AgentGenome],
    size: usize,
    rng: &mut R,
) -> usize {
    let size = size.clamp(1, population.len());
    sample(rng, population.len(), size)
        .into_iter()
        .fold(None, |best: Option<usize>, i| match best {
            None => Some(i),
            Some(b) => {
                let (fi, fb) = (population[i].score(), population[b].score());
                if fi > fb || (fi == fb && i < b) {
                    Some(i)
                } else {
                    Some(b)
                }
            }
        })
        .expect("tournament draws at least one candidate")
}

/// Cut index used by [`one_point_crossover`] for a genome of length `len`.
pub fn crossover_cut(len: usize, fraction: f64) -> usize {
    if len < 2 {
        return len;
    }
    ((fraction * len as f64).floor() as usize).clamp(1, len - 1)
}

pub fn one_point_crossover(
    parent1: &AgentGenome,
    parent2: &AgentGenome,
    fraction: f64,
) -> Result<(AgentGenome, AgentGenome), GaError> {
    let (a, b) = (&parent1.moves, &parent2.moves);
    if a.len() != b.len() {
        return Err(GaError::LengthMismatch(a.len(), b.len()));
    }
    let cut = crossover_cut(a.len(), fraction);
    let child1 = a[..cut].iter().chain(&b[cut..]).copied().collect();
    let child2 = b[..cut].iter().chain(&a[cut..]).copied().collect();
    Ok((AgentGenome::new(child1), AgentGenome::new(child2)))
}

/// First index the mutation operator may touch.
pub fn mutable_start(len: usize, moves_mutable: f64) -> usize {
    // 1 - 0.8 is slightly below 0.2 in binary; nudge so floor(5 * 0.2) is 1.
    ((len as f64 * (1.0 - moves_mutable) + 1e-9).floor() as usize).min(len)
}

/// Resamples each gene of the mutable tail with probability `rate`. Returns
/// the number of resampled genes (a resample may draw the same action).
pub fn mutate_moves<R: Rng + ?Sized>(
    genome: &mut AgentGenome,
    rate: f64,
    moves_mutable: f64,
    alphabet: &[Action],
    rng: &mut R,
) -> usize {
    let start = mutable_start(genome.moves.len(), moves_mutable);
    let mut count = 0;
    for gene in &mut genome.moves[start..] {
        if rng.gen_bool(rate.clamp(0.0, 1.0)) {
            *gene = random_action(alphabet, rng);
            count += 1;
        }
    }
    if count > 0 {
        genome.fitness = None;
        genome.summary = None;
    }
    count
}

/// Seeds a genome with a recorded trace, padding with random actions.
pub fn custom_starting_agent<R: Rng + ?Sized>(
    replay: &Replay,
    config: &GaConfig,
    rng: &mut R,
) -> Result<AgentGenome, GaError> {
    if replay.len() > config.moves_amount {
        return Err(GaError::ReplayTooLong {
            replay: replay.len(),
            moves_amount: config.moves_amount,
        });
    }
    let mut moves = replay.actions.clone();
    moves.extend((replay.len()..config.moves_amount).map(|_| random_action(&config.alphabet, rng)));
    Ok(AgentGenome::new(moves))
}

/// Mutable state of a GA run between generations.
#[derive(Debug, Clone)]
pub struct RunState {
    pub generation_index: usize,
    pub current_population: Vec<AgentGenome>,
    pub best_ever: AgentGenome,
    pub stagnant_generations: usize,
    pub current_mutation_rate: f64,
    pub stuck_events: usize,
    pub mutations_performed: usize,
    /// Number of episodes played so far.
    pub evaluations: usize,
}

fn best_index(population: &[AgentGenome]) -> usize {
    (0..population.len())
        .reduce(|b, i| if population[i].score() > population[b].score() { i } else { b })
        .expect("non-empty population")
}

impl RunState {
    /// Evaluates a starting population (random unless `seeded` is given).
    pub fn initial(
        level: &LevelSpec,
        params: &FitnessParams,
        config: &GaConfig,
        seeded: Option<Vec<AgentGenome>>,
    ) -> Self {
        let mut population = seeded.unwrap_or_else(|| {
            create_population(config, &mut rng::stream(config.rng_seed, 0, INIT_SLOT))
        });
        evaluate_all(&mut population, level, params, config);
        let best_ever = population[best_index(&population)].clone();
        let rate = config.base_mutation_rate.clamp(config.mutation_step, config.mutation_rate_max);
        RunState {
            generation_index: 0,
            evaluations: population.len(),
            current_population: population,
            best_ever,
            stagnant_generations: 0,
            current_mutation_rate: rate,
            stuck_events: 0,
            mutations_performed: 0,
        }
    }

    pub fn fitnesses(&self) -> Vec<f64> {
        self.current_population.iter().map(AgentGenome::score).collect()
    }
}

/// Breeds, evaluates and adapts one generation. Returns whether the best-ever
/// fitness improved.
pub fn play_generation(
    state: &mut RunState,
    level: &LevelSpec,
    params: &FitnessParams,
    config: &GaConfig,
) -> bool {
    let population = &state.current_population;
    let n = population.len();
    let generation = state.generation_index as u64 + 1;

    let mut order: Vec<usize> = (0..n).collect();
    // Stable sort keeps lower indices first among equal fitness.
    order.sort_by(|&a, &b| population[b].score().total_cmp(&population[a].score()));
    let mut next: Vec<AgentGenome> =
        order[..config.elitism_count].iter().map(|&i| population[i].clone()).collect();

    let mut pair = 0u64;
    let mut mutations = 0;
    while next.len() < n {
        let mut rng = rng::stream(config.rng_seed, generation, pair);
        let p1 = tournament_select(population, config.tournament_size, &mut rng);
        let p2 = tournament_select(population, config.tournament_size, &mut rng);
        let (mut c1, mut c2) =
            one_point_crossover(&population[p1], &population[p2], config.crossover_point_fraction)
                .expect("population genomes share one length");
        for child in [&mut c1, &mut c2] {
            mutations += mutate_moves(
                child,
                state.current_mutation_rate,
                config.moves_mutable,
                &config.alphabet,
                &mut rng,
            );
        }
        next.push(c1);
        if next.len() < n && config.offspring_per_pair >= 2 {
            next.push(c2);
        }
        pair += 1;
    }

    // Elites keep their (deterministic) evaluation.
    evaluate_all(&mut next[config.elitism_count..], level, params, config);
    state.evaluations += n - config.elitism_count;
    state.mutations_performed += mutations;

    let best = best_index(&next);
    let improved = next[best].score() > state.best_ever.score();
    if improved {
        state.best_ever = next[best].clone();
        state.stagnant_generations = 0;
        state.current_mutation_rate =
            (state.current_mutation_rate - config.mutation_step).max(config.mutation_step);
    } else {
        state.stuck_events += 1;
        state.stagnant_generations += 1;
        state.current_mutation_rate =
            (state.current_mutation_rate + config.mutation_step).min(config.mutation_rate_max);
    }
    state.current_population = next;
    state.generation_index += 1;
    improved
}

/// Result of [`run_ga`].
#[derive(Debug, Clone)]
pub struct GaRun {
    pub best: AgentGenome,
    pub history: Vec<GenerationStats>,
    pub replay: Replay,
    pub solved: bool,
    pub mutations_performed: usize,
    pub evaluations: usize,
    /// Seconds into the run when the final best was found (zero without timing).
    pub time_to_best: f64,
}

impl GaRun {
    pub fn best_summary(&self) -> &EpisodeSummary {
        self.best.summary.as_ref().expect("best genome is evaluated")
    }
}

fn replay_of(genome: &AgentGenome) -> Replay {
    let summary = genome.summary.as_ref().expect("evaluated genome");
    Replay {
        level: String::new(),
        actions: genome.played().to_vec(),
        header: Some(ReplayHeader {
            fitness: genome.score(),
            coins: summary.collected_coins,
            distance: summary.distance,
            flag_get: summary.flag_get,
            moves: genome.moves_used,
        }),
    }
}

/// Runs generations until `generation_amount`, a solution, or the wall-clock
/// budget. `observer` sees every generation's stats as they are produced.
pub fn run_ga(
    level: &LevelSpec,
    params: &FitnessParams,
    config: &GaConfig,
    constraints: &ConstraintSpec,
    control: RunControl,
    observer: &mut dyn FnMut(&GenerationStats),
) -> Result<GaRun, GaError> {
    run_ga_from(level, params, config, constraints, control, None, observer)
}

/// Like [`run_ga`], optionally starting from a given population.
pub fn run_ga_from(
    level: &LevelSpec,
    params: &FitnessParams,
    config: &GaConfig,
    constraints: &ConstraintSpec,
    control: RunControl,
    seeded: Option<Vec<AgentGenome>>,
    observer: &mut dyn FnMut(&GenerationStats),
) -> Result<GaRun, GaError> {
    config.validate()?;
    if let Some(pop) = &seeded {
        if pop.len() != config.population_size
            || pop.iter().any(|g| g.moves.len() != config.moves_amount)
        {
            return Err(GaError::InvalidConfig("seeded population does not match config".into()));
        }
    }
    let clock = RunClock::start(control);
    let mut state = RunState::initial(level, params, config, seeded);
    let solved_by = |g: &AgentGenome| g.summary.as_ref().is_some_and(|s| is_solution(s, constraints));
    let mut solved = solved_by(&state.best_ever);
    let mut time_to_best = clock.elapsed();
    let mut history = vec![GenerationStats::from_fitnesses(
        0,
        &state.fitnesses(),
        0,
        solved,
        clock.elapsed(),
    )];
    observer(&history[0]);

    while !solved && state.generation_index < config.generation_amount && !clock.budget_exceeded() {
        if play_generation(&mut state, level, params, config) {
            time_to_best = clock.elapsed();
        }
        solved = solved_by(&state.best_ever);
        let stats = GenerationStats::from_fitnesses(
            state.generation_index,
            &state.fitnesses(),
            state.stuck_events,
            solved,
            clock.elapsed(),
        );
        observer(&stats);
        history.push(stats);
    }

    Ok(GaRun {
        replay: replay_of(&state.best_ever),
        best: state.best_ever,
        history,
        solved,
        mutations_performed: state.mutations_performed,
        evaluations: state.evaluations,
        time_to_best,
    })
}
