use thiserror::Error;

use super::level::{LevelSpec, Tile};

/// Sub-tile units per tile. Positions and velocities are integers in these units.
pub const SUBTILE: i32 = 16;
pub const WALK_SPEED: i32 = 2;
pub const RUN_SPEED: i32 = 4;
pub const GRAVITY: i32 = 1;
pub const JUMP_IMPULSE: i32 = 10;
pub const TERMINAL_FALL: i32 = 8;
pub const START_LIVES: u8 = 3;
pub const COIN_SCORE: u32 = 100;

/// The seven composite controller inputs. The discriminant is the stable
/// serialisation code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum Action {
    Noop = 0,
    Right = 1,
    RightJump = 2,
    RightRun = 3,
    RightJumpRun = 4,
    Jump = 5,
    Left = 6,
}

impl Action {
    pub const ALL: [Action; 7] = [
        Action::Noop,
        Action::Right,
        Action::RightJump,
        Action::RightRun,
        Action::RightJumpRun,
        Action::Jump,
        Action::Left,
    ];

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<Action> {
        Action::ALL.get(code as usize).copied()
    }

    pub fn horizontal_speed(self) -> i32 {
        match self {
            Action::Noop | Action::Jump => 0,
            Action::Right | Action::RightJump => WALK_SPEED,
            Action::RightRun | Action::RightJumpRun => RUN_SPEED,
            Action::Left => -WALK_SPEED,
        }
    }

    pub fn wants_jump(self) -> bool {
        matches!(self, Action::RightJump | Action::RightJumpRun | Action::Jump)
    }
}

/// Power-up state. Only the small form exists in this simulator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum PowerState {
    #[default]
    Small,
}

impl PowerState {
    pub fn label(self) -> &'static str {
        "small"
    }
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum EnvError {
    #[error("episode is over (flag reached or no lives left)")]
    EpisodeOver,
}

/// What happened during one step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StepEvents {
    pub coin_collected: bool,
    pub died: bool,
    pub reached_flag: bool,
    /// The horizontal move ran into a solid tile or the level edge.
    pub blocked: bool,
    /// A jump was launched this step.
    pub jumped: bool,
    /// Clock ticks spent in the life that just ended; zero unless `died`.
    pub life_ticks: u32,
}

/// Live simulation state. Positions are the bottom-left corner of the
/// one-tile agent box, in sub-tile units, `y` measured from the bottom.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GameState {
    pub coins: u32,
    pub flag_get: bool,
    pub life: u8,
    pub score: u32,
    pub stage: u32,
    pub status: PowerState,
    /// Clock ticks left in the current life.
    pub time: u32,
    pub world: u32,
    pub x_pos: i32,
    pub y_pos: i32,
    pub x_vel: i32,
    pub y_vel: i32,
    pub max_x_reached: i32,
    /// Frames elapsed since the clock last ticked.
    pub frame: u32,
    /// Grid indices of coins already taken this episode, sorted.
    taken: Vec<u32>,
}

/// Fresh state at the level's start cell.
pub fn reset(level: &LevelSpec) -> GameState {
    let x = level.start_x() as i32 * SUBTILE;
    GameState {
        coins: 0,
        flag_get: false,
        life: START_LIVES,
        score: 0,
        stage: level.stage(),
        status: PowerState::Small,
        time: level.max_time(),
        world: level.world(),
        x_pos: x,
        y_pos: level.start_y() as i32 * SUBTILE,
        x_vel: 0,
        y_vel: 0,
        max_x_reached: x,
        frame: 0,
        taken: Vec::new(),
    }
}

fn span(pos: i32) -> std::ops::RangeInclusive<i32> {
    pos.div_euclid(SUBTILE)..=(pos + SUBTILE - 1).div_euclid(SUBTILE)
}

/// Solid for collision purposes. The left and right level edges act as walls;
/// above and below the grid is open.
fn solid_at(level: &LevelSpec, col: i32, row: i32) -> bool {
    if col < 0 || col >= level.width() as i32 {
        return true;
    }
    level.get(col, row).is_some_and(Tile::is_solid)
}

impl GameState {
    pub fn is_over(&self) -> bool {
        self.flag_get || self.life == 0
    }

    /// Whether the coin at grid cell `(x, y)` has been collected.
    pub fn coin_taken(&self, level: &LevelSpec, x: i32, y: i32) -> bool {
        self.taken.binary_search(&level.cell_index(x, y)).is_ok()
    }

    /// Tile at `(x, y)` as the agent currently sees it (taken coins are empty).
    pub fn tile_at(&self, level: &LevelSpec, x: i32, y: i32) -> Option<Tile> {
        match level.get(x, y)? {
            Tile::Coin if self.coin_taken(level, x, y) => Some(Tile::Empty),
            t => Some(t),
        }
    }

    /// The level as text with taken coins cleared and the agent drawn as `M`
    /// (or `X` once every life is spent), top row first.
    pub fn render(&self, level: &LevelSpec) -> String {
        let ax = (self.x_pos + SUBTILE / 2).div_euclid(SUBTILE);
        let ay = (self.y_pos + SUBTILE / 2).div_euclid(SUBTILE);
        let mut out = String::with_capacity((level.width() + 1) * level.height());
        for y in (0..level.height() as i32).rev() {
            for x in 0..level.width() as i32 {
                if (x, y) == (ax, ay) {
                    out.push(if self.life == 0 { 'X' } else { 'M' });
                } else {
                    out.push(self.tile_at(level, x, y).map_or(' ', Tile::glyph));
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn on_ground(&self, level: &LevelSpec) -> bool {
        self.y_pos.rem_euclid(SUBTILE) == 0
            && span(self.x_pos).any(|c| {
                let row = self.y_pos.div_euclid(SUBTILE) - 1;
                level.get(c, row).is_some_and(Tile::is_solid)
            })
    }

    /// Advances one frame.
    pub fn step(&mut self, level: &LevelSpec, action: Action) -> Result<StepEvents, EnvError> {
        if self.is_over() {
            return Err(EnvError::EpisodeOver);
        }
        let mut events = StepEvents::default();
        let grounded = self.on_ground(level);

        // Horizontal.
        let vx = action.horizontal_speed();
        self.x_vel = vx;
        if vx != 0 {
            let target = self.x_pos + vx;
            let lead = if vx > 0 {
                (target + SUBTILE - 1).div_euclid(SUBTILE)
            } else {
                target.div_euclid(SUBTILE)
            };
            if span(self.y_pos).any(|row| solid_at(level, lead, row)) {
                self.x_pos = if vx > 0 { (lead - 1) * SUBTILE } else { (lead + 1) * SUBTILE };
                events.blocked = true;
            } else {
                self.x_pos = target;
            }
        }

        // Vertical.
        self.y_vel = (self.y_vel - GRAVITY).max(-TERMINAL_FALL);
        if action.wants_jump() && grounded {
            self.y_vel = JUMP_IMPULSE;
            events.jumped = true;
        }
        let vy = self.y_vel;
        let target = self.y_pos + vy;
        if vy < 0 {
            let lead = target.div_euclid(SUBTILE);
            if span(self.x_pos).any(|col| level.get(col, lead).is_some_and(Tile::is_solid)) {
                self.y_pos = (lead + 1) * SUBTILE;
                self.y_vel = 0;
            } else {
                self.y_pos = target;
            }
        } else if vy > 0 {
            let lead = (target + SUBTILE - 1).div_euclid(SUBTILE);
            if span(self.x_pos).any(|col| level.get(col, lead).is_some_and(Tile::is_solid)) {
                self.y_pos = (lead - 1) * SUBTILE;
                self.y_vel = 0;
            } else {
                self.y_pos = target;
            }
        }

        // Contacts.
        let mut hazard = false;
        for row in span(self.y_pos) {
            for col in span(self.x_pos) {
                match level.get(col, row) {
                    Some(Tile::Coin) => {
                        let idx = level.cell_index(col, row);
                        if let Err(pos) = self.taken.binary_search(&idx) {
                            self.taken.insert(pos, idx);
                            self.coins += 1;
                            self.score += COIN_SCORE;
                            events.coin_collected = true;
                        }
                    }
                    Some(Tile::Hazard) => hazard = true,
                    _ => {}
                }
            }
        }
        let flag_col = level.flag().0 as i32;
        if self.y_pos < 0 || hazard {
            events.died = true;
        } else if span(self.x_pos).any(|c| c >= flag_col) {
            self.x_pos = flag_col * SUBTILE;
            self.flag_get = true;
            events.reached_flag = true;
        }
        self.max_x_reached = self.max_x_reached.max(self.x_pos);

        // Clock.
        self.frame += 1;
        if self.frame >= level.frames_per_clock() {
            self.frame = 0;
            self.time = self.time.saturating_sub(1);
        }
        if self.time == 0 && !events.reached_flag {
            events.died = true;
        }

        if events.died {
            events.life_ticks = level.max_time() - self.time;
            self.life -= 1;
            if self.life >= 1 {
                self.respawn(level);
            }
        }
        Ok(events)
    }

    fn respawn(&mut self, level: &LevelSpec) {
        self.x_pos = level.start_x() as i32 * SUBTILE;
        self.y_pos = level.start_y() as i32 * SUBTILE;
        self.x_vel = 0;
        self.y_vel = 0;
        self.time = level.max_time();
        self.frame = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::level::load_level;

    fn level(text: &str) -> LevelSpec {
        load_level(text).unwrap()
    }

    #[test]
    fn action_codes_are_stable() {
        for (i, a) in Action::ALL.iter().enumerate() {
            assert_eq!(a.code() as usize, i);
            assert_eq!(Action::from_code(i as u8), Some(*a));
        }
        assert_eq!(Action::from_code(7), None);
    }

    #[test]
    fn reset_matches_level() {
        let l = level("time=77\n......\n.M...F\n######\n");
        let s = reset(&l);
        assert_eq!(s.time, 77);
        assert_eq!(s.life, 3);
        assert_eq!((s.x_pos, s.y_pos), (16, 16));
        assert_eq!((s.x_vel, s.y_vel, s.coins), (0, 0, 0));
        assert!(!s.flag_get);
        assert_eq!(s.status.label(), "small");
        assert_eq!(reset(&l), s);
    }

    #[test]
    fn noop_on_flat_ground_only_spends_time() {
        let l = level("time=50\nclock=1\n......\n.M...F\n######\n");
        let mut s = reset(&l);
        let ev = s.step(&l, Action::Noop).unwrap();
        assert_eq!(ev, StepEvents::default());
        assert_eq!((s.x_pos, s.y_pos, s.y_vel), (16, 16, 0));
        assert_eq!(s.time, 49);
    }

    #[test]
    fn clock_ticks_once_per_frames_per_clock() {
        let l = level("time=50\nclock=3\n......\n.M...F\n######\n");
        let mut s = reset(&l);
        let times: Vec<u32> = (0..6)
            .map(|_| {
                s.step(&l, Action::Noop).unwrap();
                s.time
            })
            .collect();
        assert_eq!(times, vec![50, 50, 49, 49, 49, 48]);
    }

    #[test]
    fn pipe_blocks_walking() {
        let l = level("time=50\n........\n.M|....F\n########\n");
        let mut s = reset(&l);
        let ev = s.step(&l, Action::Right).unwrap();
        assert!(ev.blocked);
        assert_eq!(s.x_pos, 16);
        let ev = s.step(&l, Action::RightRun).unwrap();
        assert!(ev.blocked);
        assert_eq!(s.x_pos, 16);
    }

    #[test]
    fn left_edge_is_a_wall() {
        let l = level("time=50\n......\nM....F\n######\n");
        let mut s = reset(&l);
        let ev = s.step(&l, Action::Left).unwrap();
        assert!(ev.blocked);
        assert_eq!(s.x_pos, 0);
    }

    #[test]
    fn jump_arc_is_symmetric_and_lands() {
        let l = level("time=50\n......\n......\n......\n......\n.M...F\n######\n");
        let mut s = reset(&l);
        let ev = s.step(&l, Action::Jump).unwrap();
        assert!(ev.jumped);
        assert_eq!(s.y_pos, 16 + 10);
        let mut peak = s.y_pos;
        let mut frames = 1;
        while s.y_pos > 16 {
            let ev = s.step(&l, Action::Jump).unwrap();
            assert!(!ev.jumped, "no double jump");
            peak = peak.max(s.y_pos);
            frames += 1;
        }
        assert_eq!(peak, 16 + 55);
        assert_eq!(s.y_pos, 16);
        assert_eq!(s.y_vel, 0);
        assert!(frames >= 20);
    }

    #[test]
    fn coins_are_one_shot() {
        let l = level("time=50\n.......\n.Mo...F\n#######\n");
        let mut s = reset(&l);
        let mut collected = 0;
        for _ in 0..8 {
            if s.step(&l, Action::Right).unwrap().coin_collected {
                collected += 1;
            }
        }
        assert_eq!(collected, 1);
        assert_eq!(s.coins, 1);
        assert_eq!(s.score, 100);
        assert!(s.coin_taken(&l, 2, 1));
        assert_eq!(s.tile_at(&l, 2, 1), Some(Tile::Empty));
    }

    #[test]
    fn pit_kills_and_respawns() {
        let l = level("time=50\n.......\n.M....F\n###.###\n");
        let mut s = reset(&l);
        let mut died = None;
        for i in 0..60 {
            let ev = s.step(&l, Action::Right).unwrap();
            if ev.died {
                died = Some(i);
                break;
            }
        }
        assert!(died.is_some());
        assert_eq!(s.life, 2);
        assert_eq!((s.x_pos, s.y_pos), (16, 16));
        assert_eq!(s.time, 50);
        assert!(s.max_x_reached > 32);
    }

    #[test]
    fn hazard_contact_kills() {
        let l = level("time=50\n.......\n.M^...F\n#######\n");
        let mut s = reset(&l);
        let mut ev = StepEvents::default();
        for _ in 0..3 {
            ev = s.step(&l, Action::Right).unwrap();
        }
        assert!(ev.died);
        assert!(!ev.reached_flag);
    }

    #[test]
    fn timer_expiry_kills_and_refills() {
        let l = level("time=2\nclock=1\n......\n.M...F\n######\n");
        let mut s = reset(&l);
        assert!(!s.step(&l, Action::Noop).unwrap().died);
        let ev = s.step(&l, Action::Noop).unwrap();
        assert!(ev.died);
        assert_eq!(ev.life_ticks, 2);
        assert_eq!(s.time, 2);
        assert_eq!(s.life, 2);
    }

    #[test]
    fn game_over_and_flag_end_the_episode() {
        let l = level("time=1\nclock=1\n......\n.M...F\n######\n");
        let mut s = reset(&l);
        for _ in 0..3 {
            assert!(s.step(&l, Action::Noop).unwrap().died);
        }
        assert_eq!(s.life, 0);
        assert_eq!(s.step(&l, Action::Noop), Err(EnvError::EpisodeOver));

        let l = level("time=50\n....\n.MF.\n####\n");
        let mut s = reset(&l);
        let mut ev = StepEvents::default();
        while !ev.reached_flag {
            ev = s.step(&l, Action::Right).unwrap();
        }
        assert!(s.flag_get);
        assert_eq!(s.x_pos, 32);
        assert_eq!(s.step(&l, Action::Right), Err(EnvError::EpisodeOver));
    }

    #[test]
    fn jumping_onto_a_pipe() {
        let l = level("time=50\n..........\n..........\n..........\n...||.....\n.M.||....F\n##########\n");
        let mut s = reset(&l);
        for _ in 0..40 {
            if s.is_over() {
                break;
            }
            s.step(&l, Action::RightJumpRun).unwrap();
        }
        assert!(s.x_pos > 5 * SUBTILE, "cleared the pipe, x={}", s.x_pos);
        assert!(s.flag_get);
    }
}
