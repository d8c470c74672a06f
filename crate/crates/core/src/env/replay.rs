use std::fmt::Write as _;

use thiserror::Error;

use super::state::Action;

/// Recorded totals stored in a replay header so playback can detect divergence.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplayHeader {
    pub fitness: f64,
    pub coins: u32,
    pub distance: u32,
    pub flag_get: bool,
    pub moves: usize,
}

/// A deterministic action trace.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Replay {
    /// Level path written on the first line of the file.
    pub level: String,
    pub actions: Vec<Action>,
    pub header: Option<ReplayHeader>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReplayError {
    #[error("replay parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("replay is truncated: header records {expected} moves, file holds {found}")]
    Truncated { expected: usize, found: usize },
}

impl Replay {
    pub fn new(actions: Vec<Action>) -> Self {
        Replay { level: String::new(), actions, header: None }
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    /// File form: `level=<path>`, an optional `# key=value ...` header line,
    /// then one action code per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("level={}\n", self.level);
        if let Some(h) = &self.header {
            let _ = writeln!(
                out,
                "# fitness={} coins={} distance={} flag_get={} moves={}",
                h.fitness, h.coins, h.distance, h.flag_get, h.moves
            );
        }
        for a in &self.actions {
            let _ = writeln!(out, "{}", a.code());
        }
        out
    }

    pub fn parse(text: &str) -> Result<Replay, ReplayError> {
        let err = |line: usize, msg: &str| ReplayError::Parse { line, msg: msg.to_string() };
        let mut lines = text.lines().enumerate();
        let level = match lines.next() {
            Some((_, l)) => l
                .trim_end_matches('\r')
                .strip_prefix("level=")
                .ok_or_else(|| err(1, "first line must be `level=<path>`"))?
                .to_string(),
            None => return Err(err(1, "empty replay file")),
        };
        let mut header = None;
        let mut actions = Vec::new();
        for (i, raw) in lines {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                header = Some(parse_header(rest).map_err(|m| err(i + 1, &m))?);
                continue;
            }
            let code: u8 = line.parse().map_err(|_| err(i + 1, "expected an action code 0..6"))?;
            actions.push(Action::from_code(code).ok_or_else(|| err(i + 1, "action code out of range"))?);
        }
        if let Some(h) = &header {
            if h.moves != actions.len() {
                return Err(ReplayError::Truncated { expected: h.moves, found: actions.len() });
            }
        }
        Ok(Replay { level, actions, header })
    }
}

fn parse_header(text: &str) -> Result<ReplayHeader, String> {
    let mut fitness = None;
    let mut coins = None;
    let mut distance = None;
    let mut flag_get = None;
    let mut moves = None;
    for field in text.split_whitespace() {
        let (k, v) = field.split_once('=').ok_or(format!("malformed header field `{field}`"))?;
        let bad = || format!("bad value for `{k}`");
        match k {
            "fitness" => fitness = Some(v.parse::<f64>().map_err(|_| bad())?),
            "coins" => coins = Some(v.parse().map_err(|_| bad())?),
            "distance" => distance = Some(v.parse().map_err(|_| bad())?),
            "flag_get" => flag_get = Some(v.parse().map_err(|_| bad())?),
            "moves" => moves = Some(v.parse().map_err(|_| bad())?),
            _ => return Err(format!("unknown header field `{k}`")),
        }
    }
    Ok(ReplayHeader {
        fitness: fitness.ok_or("header lacks fitness")?,
        coins: coins.ok_or("header lacks coins")?,
        distance: distance.ok_or("header lacks distance")?,
        flag_get: flag_get.ok_or("header lacks flag_get")?,
        moves: moves.ok_or("header lacks moves")?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn truncated_and_malformed_files_are_rejected() {
        let full = Replay {
            level: "levels/w1l1.txt".into(),
            actions: vec![Action::Right, Action::Jump, Action::Left],
            header: Some(ReplayHeader { fitness: -1.5, coins: 0, distance: 4, flag_get: false, moves: 3 }),
        };
        let text = full.to_text();
        let cut: String = text.lines().take(3).map(|l| format!("{l}\n")).collect();
        assert!(matches!(Replay::parse(&cut), Err(ReplayError::Truncated { expected: 3, found: 1 })));
        assert!(matches!(Replay::parse(""), Err(ReplayError::Parse { line: 1, .. })));
        assert!(matches!(Replay::parse("lvl=x\n1\n"), Err(ReplayError::Parse { line: 1, .. })));
        assert!(matches!(Replay::parse("level=x\n9\n"), Err(ReplayError::Parse { line: 2, .. })));
        assert!(matches!(Replay::parse("level=x\nright\n"), Err(ReplayError::Parse { line: 2, .. })));
    }

    #[test]
    fn headerless_file_uses_plain_format() {
        let r = Replay::parse("level=a.txt\n0\n6\n").unwrap();
        assert_eq!(r.level, "a.txt");
        assert_eq!(r.actions, vec![Action::Noop, Action::Left]);
        assert_eq!(r.header, None);
    }

    proptest! {
        #[test]
        fn text_round_trip(codes in proptest::collection::vec(0u8..7, 0..200), fitness in -1e6f64..1e6, with_header: bool) {
            let actions: Vec<Action> = codes.iter().map(|c| Action::from_code(*c).unwrap()).collect();
            let header = with_header.then_some(ReplayHeader { fitness, coins: 2, distance: 77, flag_get: true, moves: actions.len() });
            let r = Replay { level: "x/y.txt".into(), actions, header };
            prop_assert_eq!(Replay::parse(&r.to_text()).unwrap(), r);
        }
    }
}
