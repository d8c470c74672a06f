use super::level::{LevelSpec, Tile};
use super::state::{GameState, SUBTILE};

/// Size of the tile window fed to controllers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ObservationConfig {
    pub window_width: usize,
    pub window_height: usize,
}

impl Default for ObservationConfig {
    fn default() -> Self {
        ObservationConfig { window_width: 8, window_height: 8 }
    }
}

/// Number of scalar features appended after the tile window.
pub const SCALAR_FEATURES: usize = 4;

impl ObservationConfig {
    pub fn len(&self) -> usize {
        self.window_width * self.window_height + SCALAR_FEATURES
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Tile codes of the window around the agent (row-major, top row first),
/// followed by `[x_vel, y_vel, time / max_time, on_ground]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation(Vec<f64>);

impl Observation {
    pub(crate) fn from_vec(values: Vec<f64>) -> Self {
        Observation(values)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

pub fn observe(state: &GameState, level: &LevelSpec, config: &ObservationConfig) -> Observation {
    let mut values = Vec::with_capacity(config.len());
    observe_into(state, level, config, &mut values);
    Observation(values)
}

/// Same as [`observe`] but reuses `out`'s allocation.
pub fn observe_into(
    state: &GameState,
    level: &LevelSpec,
    config: &ObservationConfig,
    out: &mut Vec<f64>,
) {
    out.clear();
    let cx = (state.x_pos + SUBTILE / 2).div_euclid(SUBTILE);
    let cy = (state.y_pos + SUBTILE / 2).div_euclid(SUBTILE);
    let left = cx - (config.window_width / 2) as i32;
    let top = cy + (config.window_height / 2) as i32 - 1;
    for dy in 0..config.window_height as i32 {
        for dx in 0..config.window_width as i32 {
            let tile = state.tile_at(level, left + dx, top - dy).unwrap_or(Tile::Hazard);
            out.push(f64::from(tile.code()));
        }
    }
    out.push(f64::from(state.x_vel));
    out.push(f64::from(state.y_vel));
    out.push(f64::from(state.time) / f64::from(level.max_time()));
    out.push(if state.on_ground(level) { 1.0 } else { 0.0 });
}
