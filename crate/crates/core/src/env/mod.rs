//! Deterministic tile platformer.
//!
//! All physics is integer arithmetic in sub-tile units (16 per tile), one
//! call to [`GameState::step`] per frame. The level clock ticks once every
//! [`LevelSpec::frames_per_clock`] frames.

mod episode;
mod level;
mod observe;
mod replay;
mod state;

pub use episode::{
    observing, run_episode, ActionSource, EpisodeLimits, EpisodeOutcome, ObservingSource,
    SequenceSource,
};
pub use level::{load_level, LevelError, LevelParts, LevelSpec, Tile, DEFAULT_FRAMES_PER_CLOCK};
pub use observe::{observe, observe_into, Observation, ObservationConfig, SCALAR_FEATURES};
pub use replay::{Replay, ReplayError, ReplayHeader};
pub use state::{
    reset, Action, EnvError, GameState, PowerState, StepEvents, GRAVITY, JUMP_IMPULSE, RUN_SPEED,
    START_LIVES, SUBTILE, TERMINAL_FALL, WALK_SPEED,
};
