//! Repeated seeded runs of either engine and everything derived from them:
//! per-generation aggregates, success rates, gameplay statistics, runtime
//! scaling and the written artifacts.

mod output;
mod scaling;

use thiserror::Error;

pub use crate::config::{Algorithm, ExperimentConfig};
pub use output::{emit_outputs, fitness_svg, run_csv, stats_csv, summary_csv, write_atomic, CompareRow};
pub use scaling::{fit_exponent, measure_scaling, ScalingAxis, ScalingPoint, ScalingReport};

use crate::env::{reset, Action, EnvError, LevelSpec, Replay};
use crate::fitness::{compute_fitness, EpisodeSummary, FitnessParams};
use crate::ga::{run_ga, GaConfig, GaError};
use crate::neat::{run_neat, NeatError, NeatSettings};
use crate::stats::GenerationStats;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Ga(#[from] GaError),
    #[error(transparent)]
    Neat(#[from] NeatError),
    #[error("replay diverged from its recorded result: {0}")]
    ReplayMismatch(String),
    #[error("replay stepped past the end of the episode: {0}")]
    Env(#[from] EnvError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Outcome of one fold.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub history: Vec<GenerationStats>,
    /// Best agent's actions with its recorded totals in the header.
    pub replay: Replay,
    pub summary: EpisodeSummary,
    pub fitness: f64,
    pub solved: bool,
    pub mutations_performed: usize,
    pub evaluations: usize,
    pub time_to_best: f64,
}

impl RunRecord {
    /// Generations bred after the initial population.
    pub fn generations_executed(&self) -> usize {
        self.history.len().saturating_sub(1)
    }
}

/// Counters of the best agent's play, recomputed from its replay.
#[derive(Debug, Clone, PartialEq)]
pub struct GameplayStats {
    pub distance: u32,
    /// Clock ticks over all lives.
    pub time_taken: u32,
    pub coins: u32,
    pub deaths: u32,
    /// Jump launches.
    pub jumps: usize,
    /// Rightward moves that did not launch a jump.
    pub right_moves: usize,
    pub left_moves: usize,
    pub moves_used: usize,
    pub mutations_performed: usize,
    pub time_to_best: f64,
}

fn neat_settings(config: &ExperimentConfig, seed: u64) -> NeatSettings {
    NeatSettings {
        max_generations: config.run.ne_max_generations,
        move_budget: config.run.ne_move_budget,
        moves_to_check: config.run.ne_moves_to_check,
        observation: config.run.observation(),
        seed,
    }
}

/// Runs one fold with the given seed.
pub fn run_fold(
    config: &ExperimentConfig,
    level: &LevelSpec,
    seed: u64,
    observer: &mut dyn FnMut(&GenerationStats),
) -> Result<RunRecord, HarnessError> {
    let control = config.run.control();
    let mut record = match config.run.algorithm {
        Algorithm::Ga => {
            let ga = GaConfig { rng_seed: seed, ..config.ga.clone() };
            let run = run_ga(level, &config.fitness, &ga, &config.constraints, control, observer)?;
            RunRecord {
                algorithm: Algorithm::Ga,
                seed,
                summary: run.best_summary().clone(),
                fitness: run.best.score(),
                history: run.history,
                replay: run.replay,
                solved: run.solved,
                mutations_performed: run.mutations_performed,
                evaluations: run.evaluations,
                time_to_best: run.time_to_best,
            }
        }
        Algorithm::Ne => {
            let settings = neat_settings(config, seed);
            let run = run_neat(level, &config.fitness, &config.neat, &settings, &config.constraints, control, observer)?;
            RunRecord {
                algorithm: Algorithm::Ne,
                seed,
                summary: run.best.summary.clone().expect("best genome is evaluated"),
                fitness: run.best.score(),
                history: run.history,
                replay: run.replay,
                solved: run.solved,
                mutations_performed: run.mutations_performed,
                evaluations: run.evaluations,
                time_to_best: run.time_to_best,
            }
        }
    };
    record.replay.level = config.run.level.clone();
    Ok(record)
}

/// Runs every fold in seed order. `observer` receives `(seed, stats)` for
/// each generation as it completes.
pub fn run_experiment(
    config: &ExperimentConfig,
    level: &LevelSpec,
    observer: &mut dyn FnMut(u64, &GenerationStats),
) -> Result<Vec<RunRecord>, HarnessError> {
    config.run.seeds.iter().map(|&seed| run_fold(config, level, seed, &mut |s| observer(seed, s))).collect()
}

/// Per-generation means over folds.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub generation: usize,
    pub best: f64,
    pub mean: f64,
    pub worst: f64,
}

/// Element-wise means of best/mean/worst, truncated to the shortest history.
pub fn aggregate(records: &[RunRecord]) -> Vec<AggregateRow> {
    let len = records.iter().map(|r| r.history.len()).min().unwrap_or(0);
    let k = records.len() as f64;
    (0..len)
        .map(|g| {
            let sum = |f: fn(&GenerationStats) -> f64| records.iter().map(|r| f(&r.history[g])).sum::<f64>() / k;
            AggregateRow {
                generation: g,
                best: sum(|s| s.best_fitness),
                mean: sum(|s| s.mean_fitness),
                worst: sum(|s| s.worst_fitness),
            }
        })
        .collect()
}

pub fn success_rate(records: &[RunRecord]) -> f64 {
    if records.is_empty() {
        return 0.0;
    }
    records.iter().filter(|r| r.solved).count() as f64 / records.len() as f64
}

/// Replays `actions` on a fresh state and counts what happened. Returns the
/// counters and the recomputed summary.
pub fn replay_counters(level: &LevelSpec, actions: &[Action]) -> Result<(GameplayStats, EpisodeSummary), HarnessError> {
    let mut state = reset(level);
    let mut stats = GameplayStats {
        distance: 0,
        time_taken: 0,
        coins: 0,
        deaths: 0,
        jumps: 0,
        right_moves: 0,
        left_moves: 0,
        moves_used: 0,
        mutations_performed: 0,
        time_to_best: 0.0,
    };
    let mut life_elapsed = Vec::new();
    for &action in actions {
        let events = state.step(level, action)?;
        stats.moves_used += 1;
        if events.jumped {
            stats.jumps += 1;
        } else if action.horizontal_speed() > 0 {
            stats.right_moves += 1;
        } else if action.horizontal_speed() < 0 {
            stats.left_moves += 1;
        }
        if events.died {
            life_elapsed.push(events.life_ticks);
        }
        if state.is_over() {
            break;
        }
    }
    let start = level.start_x() as i32 * crate::env::SUBTILE;
    let summary = EpisodeSummary {
        collected_coins: state.coins,
        distance: (state.max_x_reached - start).max(0) as u32,
        time_left: state.time,
        elapsed: level.max_time() - state.time,
        flag_get: state.flag_get,
        deaths: life_elapsed.len() as u32,
        moves_used: stats.moves_used,
        truncation_reason: crate::fitness::TruncationReason::Budget,
        life_elapsed,
    };
    stats.distance = summary.distance;
    stats.coins = summary.collected_coins;
    stats.deaths = summary.deaths;
    stats.time_taken = summary.life_elapsed.iter().sum::<u32>() + summary.elapsed;
    Ok((stats, summary))
}

/// Recomputes the best agent's counters by replay and checks them against
/// the record.
pub fn gameplay_stats(
    record: &RunRecord,
    level: &LevelSpec,
    params: &FitnessParams,
) -> Result<GameplayStats, HarnessError> {
    let (mut stats, summary) = replay_counters(level, &record.replay.actions)?;
    let fitness = compute_fitness(&summary, &params.with_max_time(level.max_time()));
    let recorded = &record.summary;
    let same = fitness == record.fitness
        && summary.collected_coins == recorded.collected_coins
        && summary.distance == recorded.distance
        && summary.time_left == recorded.time_left
        && summary.flag_get == recorded.flag_get
        && summary.deaths == recorded.deaths
        && summary.moves_used == recorded.moves_used;
    if !same {
        return Err(HarnessError::ReplayMismatch(format!(
            "seed {}: recorded fitness {} over {} moves, replay gives {} over {}",
            record.seed, record.fitness, recorded.moves_used, fitness, summary.moves_used
        )));
    }
    stats.mutations_performed = record.mutations_performed;
    stats.time_to_best = record.time_to_best;
    Ok(stats)
}
