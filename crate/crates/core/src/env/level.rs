use std::fmt;

use thiserror::Error;

/// One cell of the level grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tile {
    Empty,
    Ground,
    Pipe,
    Coin,
    Flag,
    Hazard,
}

impl Tile {
    /// Numeric code used in observations.
    pub fn code(self) -> u8 {
        match self {
            Tile::Empty => 0,
            Tile::Ground => 1,
            Tile::Pipe => 2,
            Tile::Coin => 3,
            Tile::Flag => 4,
            Tile::Hazard => 5,
        }
    }

    pub fn is_solid(self) -> bool {
        matches!(self, Tile::Ground | Tile::Pipe)
    }

    pub fn glyph(self) -> char {
        match self {
            Tile::Empty => '.',
            Tile::Ground => '#',
            Tile::Pipe => '|',
            Tile::Coin => 'o',
            Tile::Flag => 'F',
            Tile::Hazard => '^',
        }
    }

    fn from_glyph(c: char) -> Option<Tile> {
        Some(match c {
            '.' | 'M' => Tile::Empty,
            '#' => Tile::Ground,
            '|' => Tile::Pipe,
            'o' => Tile::Coin,
            'F' => Tile::Flag,
            '^' => Tile::Hazard,
            _ => return None,
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LevelError {
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid level: {0}")]
    Validation(String),
}

/// Frames per clock tick when a level file does not say otherwise.
pub const DEFAULT_FRAMES_PER_CLOCK: u32 = 24;

/// A validated level. Rows are indexed from the bottom (`y = 0` is the lowest row).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelSpec {
    width: usize,
    height: usize,
    grid: Vec<Tile>,
    start_x: usize,
    start_y: usize,
    max_time: u32,
    frames_per_clock: u32,
    world: u32,
    stage: u32,
    flag: (usize, usize),
}

/// Builder-side description of a level, validated by [`LevelSpec::new`].
#[derive(Debug, Clone)]
pub struct LevelParts {
    /// Rows bottom-first, each of length `width`.
    pub rows: Vec<Vec<Tile>>,
    pub start_x: usize,
    pub start_y: usize,
    pub max_time: u32,
    pub frames_per_clock: u32,
    pub world: u32,
    pub stage: u32,
}

impl LevelSpec {
    pub fn new(parts: LevelParts) -> Result<Self, LevelError> {
        let invalid = |msg: String| Err(LevelError::Validation(msg));
        let height = parts.rows.len();
        let width = parts.rows.first().map_or(0, Vec::len);
        if width < 4 || height < 3 {
            return invalid(format!("level must be at least 4x3 tiles, got {width}x{height}"));
        }
        if parts.rows.iter().any(|r| r.len() != width) {
            return invalid("grid rows have unequal widths".into());
        }
        if parts.max_time < 1 {
            return invalid("time must be at least 1".into());
        }
        if parts.frames_per_clock < 1 {
            return invalid("clock must be at least 1".into());
        }
        let grid: Vec<Tile> = parts.rows.into_iter().flatten().collect();
        let flags: Vec<usize> = (0..grid.len()).filter(|&i| grid[i] == Tile::Flag).collect();
        if flags.len() != 1 {
            return invalid(format!("expected exactly one flag, found {}", flags.len()));
        }
        let flag = (flags[0] % width, flags[0] / width);
        let (sx, sy) = (parts.start_x, parts.start_y);
        if sx >= width || sy >= height || sy == 0 {
            return invalid(format!("start ({sx},{sy}) is outside the playable grid"));
        }
        if grid[sy * width + sx] != Tile::Empty {
            return invalid("start cell must be empty".into());
        }
        if !grid[(sy - 1) * width + sx].is_solid() {
            return invalid("start cell must stand on ground or a pipe".into());
        }
        Ok(LevelSpec {
            width,
            height,
            grid,
            start_x: sx,
            start_y: sy,
            max_time: parts.max_time,
            frames_per_clock: parts.frames_per_clock,
            world: parts.world,
            stage: parts.stage,
            flag,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }
    pub fn height(&self) -> usize {
        self.height
    }
    pub fn start_x(&self) -> usize {
        self.start_x
    }
    pub fn start_y(&self) -> usize {
        self.start_y
    }
    /// Clock ticks per life (MT).
    pub fn max_time(&self) -> u32 {
        self.max_time
    }
    /// Physics frames (moves) per clock tick.
    pub fn frames_per_clock(&self) -> u32 {
        self.frames_per_clock
    }
    pub fn world(&self) -> u32 {
        self.world
    }
    pub fn stage(&self) -> u32 {
        self.stage
    }
    /// Tile coordinates of the flag.
    pub fn flag(&self) -> (usize, usize) {
        self.flag
    }

    /// Tile at `(x, y)`, or `None` outside the grid.
    pub fn get(&self, x: i32, y: i32) -> Option<Tile> {
        if x < 0 || y < 0 || x as usize >= self.width || y as usize >= self.height {
            return None;
        }
        Some(self.grid[y as usize * self.width + x as usize])
    }

    pub(crate) fn cell_index(&self, x: i32, y: i32) -> u32 {
        (y as usize * self.width + x as usize) as u32
    }

    pub fn coin_count(&self) -> usize {
        self.grid.iter().filter(|t| **t == Tile::Coin).count()
    }

    /// Serialises to the level file format. `load_level(&l.to_text()) == Ok(l)`.
    pub fn to_text(&self) -> String {
        let mut out = format!("time={}\n", self.max_time);
        if self.frames_per_clock != DEFAULT_FRAMES_PER_CLOCK {
            out.push_str(&format!("clock={}\n", self.frames_per_clock));
        }
        if self.world != 1 || self.stage != 1 {
            out.push_str(&format!("world={}\nstage={}\n", self.world, self.stage));
        }
        for y in (0..self.height).rev() {
            for x in 0..self.width {
                if (x, y) == (self.start_x, self.start_y) {
                    out.push('M');
                } else {
                    out.push(self.grid[y * self.width + x].glyph());
                }
            }
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for LevelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Parses a level file: `key=value` header lines (`time` required; `clock`,
/// `world`, `stage` optional) followed by the grid, top row first.
pub fn load_level(text: &str) -> Result<LevelSpec, LevelError> {
    let parse_err = |line: usize, msg: String| LevelError::Parse { line, msg };
    let mut max_time = None;
    let mut frames_per_clock = DEFAULT_FRAMES_PER_CLOCK;
    let mut world = 1;
    let mut stage = 1;
    let mut grid_lines: Vec<(usize, &str)> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim_end_matches('\r');
        if grid_lines.is_empty() {
            if line.trim().is_empty() {
                continue;
            }
            if let Some((key, value)) = line.split_once('=') {
                let value: u32 = value
                    .trim()
                    .parse()
                    .map_err(|_| parse_err(lineno, format!("bad integer for `{}`", key.trim())))?;
                match key.trim() {
                    "time" => max_time = Some(value),
                    "clock" => frames_per_clock = value,
                    "world" => world = value,
                    "stage" => stage = value,
                    other => return Err(parse_err(lineno, format!("unknown header `{other}`"))),
                }
                continue;
            }
        }
        grid_lines.push((lineno, line));
    }
    while grid_lines.last().is_some_and(|(_, l)| l.trim().is_empty()) {
        grid_lines.pop();
    }
    let max_time = max_time.ok_or_else(|| parse_err(1, "missing `time=<int>` header".into()))?;
    if grid_lines.is_empty() {
        return Err(parse_err(1, "empty grid".into()));
    }

    let width = grid_lines[0].1.chars().count();
    let height = grid_lines.len();
    let mut rows = vec![Vec::new(); height];
    let mut start = None;
    for (row_from_top, (lineno, line)) in grid_lines.iter().enumerate() {
        if line.chars().count() != width {
            return Err(parse_err(*lineno, format!("ragged row: expected {width} columns")));
        }
        let y = height - 1 - row_from_top;
        for (x, c) in line.chars().enumerate() {
            let tile = Tile::from_glyph(c)
                .ok_or_else(|| parse_err(*lineno, format!("unknown glyph `{c}`")))?;
            if c == 'M' {
                if start.is_some() {
                    return Err(LevelError::Validation("more than one start marker".into()));
                }
                start = Some((x, y));
            }
            rows[y].push(tile);
        }
    }
    let (start_x, start_y) =
        start.ok_or_else(|| LevelError::Validation("missing start marker `M`".into()))?;
    LevelSpec::new(LevelParts {
        rows,
        start_x,
        start_y,
        max_time,
        frames_per_clock,
        world,
        stage,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "time=10\n....\n.M.F\n####\n";

    #[test]
    fn minimal_level_parses() {
        let level = load_level(MINIMAL).unwrap();
        assert_eq!(level.width(), 4);
        assert_eq!(level.height(), 3);
        assert_eq!((level.start_x(), level.start_y()), (1, 1));
        assert_eq!(level.flag(), (3, 1));
        assert_eq!(level.max_time(), 10);
        assert_eq!(level.frames_per_clock(), DEFAULT_FRAMES_PER_CLOCK);
        assert_eq!(level.get(0, 0), Some(Tile::Ground));
        assert_eq!(level.get(-1, 0), None);
    }

    #[test]
    fn flag_count_is_validated() {
        let none = "time=10\n....\n.M..\n####\n";
        assert!(matches!(load_level(none), Err(LevelError::Validation(_))));
        let two = "time=10\n...F\n.M.F\n####\n";
        assert!(matches!(load_level(two), Err(LevelError::Validation(_))));
    }

    #[test]
    fn parse_errors() {
        let glyph = "time=10\n....\n.M?F\n####\n";
        assert!(matches!(load_level(glyph), Err(LevelError::Parse { line: 3, .. })));
        let ragged = "time=10\n.....\n.M.F\n####\n";
        assert!(matches!(load_level(ragged), Err(LevelError::Parse { line: 3, .. })));
        let no_time = "....\n.M.F\n####\n";
        assert!(matches!(load_level(no_time), Err(LevelError::Parse { .. })));
        let header = "time=10\nspeed=3\n....\n.M.F\n####\n";
        assert!(matches!(load_level(header), Err(LevelError::Parse { line: 2, .. })));
    }

    #[test]
    fn start_must_stand_on_solid_ground() {
        let floating = "time=10\n.M..\n...F\n####\n";
        assert!(matches!(load_level(floating), Err(LevelError::Validation(_))));
        let zero_time = "time=0\n....\n.M.F\n####\n";
        assert!(matches!(load_level(zero_time), Err(LevelError::Validation(_))));
    }

    #[test]
    fn text_round_trip() {
        let text = "time=50\nclock=1\n..o...\n.M.|.F\n######\n";
        let level = load_level(text).unwrap();
        assert_eq!(level.to_text(), text);
        assert_eq!(load_level(&level.to_text()).unwrap(), level);
    }
}
