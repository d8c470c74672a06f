//! Seeded generator for flat test levels with coins and pipe obstacles.

use rand::seq::index::sample;
use rand::Rng;
use thiserror::Error;

use crate::env::{LevelParts, LevelSpec, Tile, DEFAULT_FRAMES_PER_CLOCK};
use crate::rng;

pub const GENERATED_HEIGHT: usize = 8;
pub const GENERATED_TIME: u32 = 400;
pub const PIPE_WIDTH: usize = 2;
pub const PIPE_HEIGHT: usize = 2;
/// Minimum empty columns between two pipes.
pub const PIPE_GAP: usize = 4;
/// Columns `0..FIRST_OBSTACLE` are kept free around the start cell.
pub const FIRST_OBSTACLE: usize = 4;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LevelGenError {
    #[error("width must be at least 10, got {0}")]
    TooNarrow(usize),
    #[error("cannot fit {requested} {what} into a level {width} tiles wide")]
    Infeasible { what: &'static str, requested: usize, width: usize },
}

/// A flat level `width` tiles wide: ground row, start at column 1, flag on
/// the rightmost column, `pipes` two-by-two pipes and `coins` coins at row 1
/// or 3, all at seeded positions. The same arguments always give the same
/// level.
pub fn make_level(width: usize, coins: usize, pipes: usize, seed: u64) -> Result<LevelSpec, LevelGenError> {
    if width < 10 {
        return Err(LevelGenError::TooNarrow(width));
    }
    let mut rng = rng::stream(seed, 0, 0);
    let mut rows = vec![vec![Tile::Empty; width]; GENERATED_HEIGHT];
    rows[0] = vec![Tile::Ground; width];
    rows[1][width - 1] = Tile::Flag;

    // Pipes fill columns FIRST_OBSTACLE..=last + 1, keeping two columns before
    // the flag clear. Spare columns are spread at random between the pipes.
    let last = width - PIPE_WIDTH - 3;
    let span = last + PIPE_WIDTH - FIRST_OBSTACLE;
    let needed = (pipes * (PIPE_WIDTH + PIPE_GAP)).saturating_sub(PIPE_GAP);
    if needed > span {
        return Err(LevelGenError::Infeasible { what: "pipes", requested: pipes, width });
    }
    let mut offsets: Vec<usize> = (0..pipes).map(|_| rng.gen_range(0..=span - needed)).collect();
    offsets.sort_unstable();
    let mut pipe_columns = Vec::new();
    for (k, offset) in offsets.into_iter().enumerate() {
        let left = FIRST_OBSTACLE + k * (PIPE_WIDTH + PIPE_GAP) + offset;
        for x in left..left + PIPE_WIDTH {
            pipe_columns.push(x);
            for row in rows.iter_mut().skip(1).take(PIPE_HEIGHT) {
                row[x] = Tile::Pipe;
            }
        }
    }

    let coin_columns: Vec<usize> = (3..width - 2).filter(|c| !pipe_columns.contains(c)).collect();
    if coins > coin_columns.len() {
        return Err(LevelGenError::Infeasible { what: "coins", requested: coins, width });
    }
    let mut picked: Vec<usize> = sample(&mut rng, coin_columns.len(), coins).into_iter().map(|i| coin_columns[i]).collect();
    picked.sort_unstable();
    for x in picked {
        let y = if rng.gen_bool(0.5) { 1 } else { 3 };
        rows[y][x] = Tile::Coin;
    }

    let level = LevelSpec::new(LevelParts {
        rows,
        start_x: 1,
        start_y: 1,
        max_time: GENERATED_TIME,
        frames_per_clock: DEFAULT_FRAMES_PER_CLOCK,
        world: 1,
        stage: 1,
    })
    .expect("generated levels satisfy the level invariants");
    Ok(level)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::load_level;

    fn count(level: &LevelSpec, tile: Tile) -> usize {
        (0..level.height() as i32)
            .flat_map(|y| (0..level.width() as i32).map(move |x| (x, y)))
            .filter(|&(x, y)| level.get(x, y) == Some(tile))
            .count()
    }

    #[test]
    fn requested_objects_are_placed() {
        let level = make_level(60, 3, 2, 7).unwrap();
        assert_eq!(level.width(), 60);
        assert_eq!(level.coin_count(), 3);
        assert_eq!(count(&level, Tile::Pipe), 2 * PIPE_WIDTH * PIPE_HEIGHT);
        assert_eq!(level.flag(), (59, 1));
        assert_eq!(load_level(&level.to_text()).unwrap(), level);
    }

    #[test]
    fn empty_request_is_a_runway() {
        let level = make_level(12, 0, 0, 1).unwrap();
        assert_eq!(count(&level, Tile::Ground), 12);
        assert_eq!(count(&level, Tile::Empty), 12 * 8 - 12 - 1);
    }

    #[test]
    fn same_arguments_same_level() {
        assert_eq!(make_level(40, 4, 3, 9).unwrap().to_text(), make_level(40, 4, 3, 9).unwrap().to_text());
        assert_ne!(make_level(40, 4, 3, 9).unwrap().to_text(), make_level(40, 4, 3, 10).unwrap().to_text());
    }

    #[test]
    fn infeasible_requests_fail() {
        assert_eq!(make_level(9, 0, 0, 0), Err(LevelGenError::TooNarrow(9)));
        assert!(matches!(make_level(10, 0, 3, 0), Err(LevelGenError::Infeasible { what: "pipes", .. })));
        assert!(matches!(make_level(10, 50, 0, 0), Err(LevelGenError::Infeasible { what: "coins", .. })));
    }

    #[test]
    fn many_seeds_stay_valid() {
        for seed in 0..200 {
            let level = make_level(30, 5, 3, seed).unwrap();
            assert_eq!(level.coin_count(), 5);
            assert_eq!(count(&level, Tile::Pipe), 3 * PIPE_WIDTH * PIPE_HEIGHT);
        }
    }
}
