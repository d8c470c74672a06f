use super::level::LevelSpec;
use super::observe::{observe_into, Observation, ObservationConfig};
use super::replay::Replay;
use super::state::{reset, Action, GameState, SUBTILE};
use crate::fitness::{compute_fitness, EpisodeSummary, FitnessParams, TruncationReason};

/// Supplies the next action given the live state.
pub trait ActionSource {
    fn next_action(&mut self, state: &GameState, level: &LevelSpec, move_index: usize) -> Action;
}

/// Plays a fixed action sequence by index, ignoring observations. Runs of
/// the sequence past its end yield `Noop`.
pub struct SequenceSource<'a>(pub &'a [Action]);

impl ActionSource for SequenceSource<'_> {
    fn next_action(&mut self, _: &GameState, _: &LevelSpec, move_index: usize) -> Action {
        self.0.get(move_index).copied().unwrap_or(Action::Noop)
    }
}

/// Adapts an observation callback into an [`ActionSource`].
pub struct ObservingSource<F> {
    config: ObservationConfig,
    buffer: Vec<f64>,
    policy: F,
}

impl<F: FnMut(&[f64]) -> Action> ObservingSource<F> {
    pub fn new(config: ObservationConfig, policy: F) -> Self {
        ObservingSource { config, buffer: Vec::with_capacity(config.len()), policy }
    }
}

impl<F: FnMut(&[f64]) -> Action> ActionSource for ObservingSource<F> {
    fn next_action(&mut self, state: &GameState, level: &LevelSpec, _: usize) -> Action {
        observe_into(state, level, &self.config, &mut self.buffer);
        (self.policy)(&self.buffer)
    }
}

/// Convenience for closures taking a full [`Observation`].
pub fn observing<F: FnMut(&Observation) -> Action>(
    config: ObservationConfig,
    mut policy: F,
) -> ObservingSource<impl FnMut(&[f64]) -> Action> {
    ObservingSource::new(config, move |values: &[f64]| {
        policy(&Observation::from_vec(values.to_vec()))
    })
}

/// Episode truncation bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EpisodeLimits {
    pub move_budget: usize,
    /// Consecutive moves without a new best running fitness before cutting off.
    pub stagnation_window: usize,
}

impl EpisodeLimits {
    /// Plays exactly `moves` actions unless the flag or game over intervenes.
    pub fn replay(moves: usize) -> Self {
        EpisodeLimits { move_budget: moves, stagnation_window: usize::MAX }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeOutcome {
    pub summary: EpisodeSummary,
    pub replay: Replay,
    pub final_state: GameState,
}

impl EpisodeOutcome {
    pub fn fitness(&self, params: &FitnessParams) -> f64 {
        compute_fitness(&self.summary, params)
    }
}

fn summarize(
    state: &GameState,
    level: &LevelSpec,
    moves: usize,
    life_elapsed: &[u32],
    reason: TruncationReason,
) -> EpisodeSummary {
    let start = level.start_x() as i32 * SUBTILE;
    EpisodeSummary {
        collected_coins: state.coins,
        distance: (state.max_x_reached - start).max(0) as u32,
        time_left: state.time,
        elapsed: level.max_time() - state.time,
        flag_get: state.flag_get,
        deaths: life_elapsed.len() as u32,
        moves_used: moves,
        truncation_reason: reason,
        life_elapsed: life_elapsed.to_vec(),
    }
}

/// Drives one episode until the flag, game over, the move budget, or a
/// stagnation cut-off. Running fitness is evaluated after every move with
/// `params.max_time` replaced by the level's clock budget.
pub fn run_episode(
    level: &LevelSpec,
    params: &FitnessParams,
    limits: EpisodeLimits,
    source: &mut dyn ActionSource,
) -> EpisodeOutcome {
    let params = params.with_max_time(level.max_time());
    let mut state = reset(level);
    let mut actions = Vec::new();
    let mut life_elapsed = Vec::new();
    let mut best = compute_fitness(&EpisodeSummary::empty(level.max_time()), &params);
    let mut idle = 0usize;

    let reason = loop {
        if actions.len() >= limits.move_budget {
            break TruncationReason::Budget;
        }
        let action = source.next_action(&state, level, actions.len());
        let events = state
            .step(level, action)
            .expect("episode loop never steps a finished state");
        actions.push(action);
        if events.died {
            life_elapsed.push(events.life_ticks);
        }
        if events.reached_flag {
            break TruncationReason::Flag;
        }
        if state.life == 0 {
            break TruncationReason::Death;
        }
        let running = compute_fitness(
            // Deaths do not enter the fitness, so the per-life log is skipped here.
            &summarize(&state, level, actions.len(), &[], TruncationReason::Budget),
            &params,
        );
        if running > best {
            best = running;
            idle = 0;
        } else {
            idle += 1;
            if idle >= limits.stagnation_window {
                break TruncationReason::Stagnation;
            }
        }
    };

    let summary = summarize(&state, level, actions.len(), &life_elapsed, reason);
    EpisodeOutcome { summary, replay: Replay::new(actions), final_state: state }
}
