#![allow(dead_code)]

use evoplat_core::{load_level, Action, LevelSpec};

pub fn bundled(name: &str) -> LevelSpec {
    let path = format!("{}/levels/{name}", env!("CARGO_MANIFEST_DIR"));
    load_level(&std::fs::read_to_string(&path).unwrap()).unwrap()
}

/// Runs right at full speed, hopping continuously. Clears every obstacle on
/// `w1l1.txt`.
pub fn hop_trace(len: usize) -> Vec<Action> {
    vec![Action::RightJumpRun; len]
}
