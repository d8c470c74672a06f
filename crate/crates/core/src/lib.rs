//! Evolutionary agents for a deterministic tile platformer.
//!
//! The crate bundles four pieces that are meant to be used together:
//!
//! - [`env`]: an integer-physics side-scroller with `reset`/`step`/`observe`
//!   semantics, level files and replays.
//! - [`fitness`]: the scalar fitness shared by both engines plus the
//!   constraint-violation measure that decides whether a run is a solution.
//! - [`ga`]: evolution of fixed-length action sequences.
//! - [`neat`]: neuroevolution of augmenting topologies driving the agent from
//!   tile-window observations.
//!
//! [`harness`] runs repeated seeded folds of either engine and writes CSV,
//! SVG and replay artifacts; [`config`] reads and writes the INI run files.

#[macro_use]
mod macros;

pub mod config;
pub mod env;
pub mod fitness;
pub mod ga;
pub mod harness;
pub mod levelgen;
pub mod neat;
pub mod rng;
pub mod stats;

pub use env::{
    load_level, observe, reset, run_episode, Action, EnvError, EpisodeLimits, GameState,
    LevelError, LevelSpec, Observation, ObservationConfig, Replay, StepEvents, Tile,
};
pub use fitness::{
    compute_fitness, constraint_violation, is_solution, ConstraintSpec, EpisodeSummary,
    FitnessParams, TruncationReason,
};
pub use stats::{GenerationStats, RunControl};
