//! Browser bindings: step a GA run generation by generation, play back its
//! best agent on a canvas, explore the fitness formula and generate levels.

use evoplat_core::ga::{play_generation, GaConfig, RunState};
use evoplat_core::levelgen;
use evoplat_core::{compute_fitness, load_level, reset, Action, EpisodeSummary, FitnessParams, GameState, LevelSpec};
use wasm_bindgen::prelude::*;

const SUBTILE: f64 = evoplat_core::env::SUBTILE as f64;

fn parse_level(text: &str) -> Result<LevelSpec, String> {
    load_level(text).map_err(|e| e.to_string())
}

/// A GA run advanced on demand.
#[wasm_bindgen]
pub struct GaSession {
    level: LevelSpec,
    params: FitnessParams,
    config: GaConfig,
    state: RunState,
}

impl GaSession {
    fn create(level_text: &str, seed: u32, population: usize, moves: usize) -> Result<GaSession, String> {
        let level = parse_level(level_text)?;
        let config = GaConfig {
            population_size: population,
            moves_amount: moves,
            rng_seed: seed as u64,
            ..GaConfig::default()
        };
        config.validate().map_err(|e| e.to_string())?;
        let params = FitnessParams::default();
        let state = RunState::initial(&level, &params, &config, None);
        Ok(GaSession { level, params, config, state })
    }
}

#[wasm_bindgen]
impl GaSession {
    #[wasm_bindgen(constructor)]
    pub fn new(level_text: &str, seed: u32, population: usize, moves: usize) -> Result<GaSession, JsError> {
        Self::create(level_text, seed, population, moves).map_err(|e| JsError::new(&e))
    }

    /// Breeds `generations` more generations and returns the best fitness.
    pub fn step(&mut self, generations: usize) -> f64 {
        for _ in 0..generations {
            play_generation(&mut self.state, &self.level, &self.params, &self.config);
        }
        self.best_fitness()
    }

    pub fn generation(&self) -> usize {
        self.state.generation_index
    }

    #[wasm_bindgen(js_name = bestFitness)]
    pub fn best_fitness(&self) -> f64 {
        self.state.best_ever.score()
    }

    #[wasm_bindgen(js_name = meanFitness)]
    pub fn mean_fitness(&self) -> f64 {
        let f = self.state.fitnesses();
        f.iter().sum::<f64>() / f.len() as f64
    }

    #[wasm_bindgen(js_name = bestReachedFlag)]
    pub fn best_reached_flag(&self) -> bool {
        self.state.best_ever.summary.as_ref().is_some_and(|s| s.flag_get)
    }

    /// A fresh playback of the best agent so far.
    pub fn playback(&self) -> Playback {
        Playback::new(self.level.clone(), self.state.best_ever.played().to_vec())
    }
}

/// Frame-by-frame replay of an action trace.
#[wasm_bindgen]
pub struct Playback {
    level: LevelSpec,
    actions: Vec<Action>,
    state: GameState,
    index: usize,
}

impl Playback {
    fn new(level: LevelSpec, actions: Vec<Action>) -> Self {
        let state = reset(&level);
        Playback { level, actions, state, index: 0 }
    }
}

#[wasm_bindgen]
impl Playback {
    pub fn width(&self) -> usize {
        self.level.width()
    }

    pub fn height(&self) -> usize {
        self.level.height()
    }

    /// Advances one frame; false once the trace or the episode has ended.
    pub fn advance(&mut self) -> bool {
        if self.state.is_over() || self.index >= self.actions.len() {
            return false;
        }
        let _ = self.state.step(&self.level, self.actions[self.index]);
        self.index += 1;
        true
    }

    pub fn frame(&self) -> usize {
        self.index
    }

    pub fn frames(&self) -> usize {
        self.actions.len()
    }

    /// Tile codes row by row, top row first, with taken coins cleared.
    pub fn tiles(&self) -> Vec<u8> {
        let (w, h) = (self.level.width() as i32, self.level.height() as i32);
        (0..h)
            .rev()
            .flat_map(|y| (0..w).map(move |x| (x, y)))
            .map(|(x, y)| self.state.tile_at(&self.level, x, y).map_or(0, |t| t.code()))
            .collect()
    }

    /// Agent's left edge in tiles.
    #[wasm_bindgen(js_name = agentX)]
    pub fn agent_x(&self) -> f64 {
        self.state.x_pos as f64 / SUBTILE
    }

    /// Agent's bottom edge in tiles above the bottom of the level.
    #[wasm_bindgen(js_name = agentY)]
    pub fn agent_y(&self) -> f64 {
        self.state.y_pos as f64 / SUBTILE
    }

    pub fn coins(&self) -> u32 {
        self.state.coins
    }

    pub fn time(&self) -> u32 {
        self.state.time
    }

    pub fn lives(&self) -> u8 {
        self.state.life
    }

    #[wasm_bindgen(js_name = flagGet)]
    pub fn flag_get(&self) -> bool {
        self.state.flag_get
    }

    pub fn render(&self) -> String {
        self.state.render(&self.level)
    }
}

/// Fitness of an episode with the given totals and weights; `distance` is
/// in tiles.
#[wasm_bindgen]
pub fn fitness(
    coins: u32,
    distance: f64,
    time_left: u32,
    coin_reward: f64,
    distance_reward: f64,
    time_penalty: f64,
    max_time: u32,
) -> f64 {
    let time_left = time_left.min(max_time);
    let summary = EpisodeSummary {
        collected_coins: coins,
        distance: (distance.max(0.0) * SUBTILE).round() as u32,
        time_left,
        elapsed: max_time - time_left,
        ..EpisodeSummary::empty(max_time)
    };
    let params = FitnessParams { coin_reward, distance_reward, time_penalty, max_time };
    compute_fitness(&summary, &params)
}

fn generate(width: usize, coins: usize, pipes: usize, seed: u32) -> Result<String, String> {
    levelgen::make_level(width, coins, pipes, seed as u64).map(|l| l.to_text()).map_err(|e| e.to_string())
}

/// A generated level in the level file format.
#[wasm_bindgen(js_name = makeLevel)]
pub fn make_level(width: usize, coins: usize, pipes: usize, seed: u32) -> Result<String, JsError> {
    generate(width, coins, pipes, seed).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn session_improves_and_plays_back() {
        let level = generate(20, 1, 1, 3).unwrap();
        let mut session = GaSession::create(&level, 1, 10, 200).unwrap();
        let first = session.best_fitness();
        assert!(session.step(5) >= first);
        assert_eq!(session.generation(), 5);
        let mut playback = session.playback();
        assert_eq!(playback.tiles().len(), playback.width() * playback.height());
        while playback.advance() {}
        assert!(playback.frame() <= playback.frames());
        assert_eq!(playback.flag_get(), session.best_reached_flag());
    }

    #[test]
    fn fitness_explorer_matches_the_hand_value() {
        // 10*5 + 0.1*100 - 0.8*(400-300), with 100 sub-tile units = 6.25 tiles.
        assert_eq!(fitness(5, 6.25, 300, 10.0, 0.1, 0.8, 400), -20.0);
    }

    #[test]
    fn bad_inputs_are_reported() {
        assert!(GaSession::create("not a level", 1, 10, 10).is_err());
        assert!(generate(5, 0, 0, 1).is_err());
    }
}
