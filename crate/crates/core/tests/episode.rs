mod common;

use common::{bundled, hop_trace};
use evoplat_core::env::{SequenceSource, SUBTILE};
use evoplat_core::{
    compute_fitness, reset, run_episode, Action, EpisodeLimits, FitnessParams, TruncationReason,
};

#[test]
fn noop_agent_stagnates_after_thirty_moves() {
    let level = bundled("w1l1.txt");
    let noop = [Action::Noop; 500];
    let limits = EpisodeLimits { move_budget: 500, stagnation_window: 30 };
    let out = run_episode(&level, &FitnessParams::default(), limits, &mut SequenceSource(&noop));
    assert_eq!(out.replay.len(), 30);
    assert_eq!(out.summary.truncation_reason, TruncationReason::Stagnation);
}

#[test]
fn budget_of_one_plays_one_action() {
    let level = bundled("w1l1.txt");
    let limits = EpisodeLimits { move_budget: 1, stagnation_window: 30 };
    let out = run_episode(&level, &FitnessParams::default(), limits, &mut SequenceSource(&[Action::Right; 5]));
    assert_eq!(out.replay.actions, vec![Action::Right]);
    assert_eq!(out.summary.truncation_reason, TruncationReason::Budget);
}

// The first coin of w1l1 sits at column 10, row 1. Starting at x = 16 and
// moving 4 units per frame, the agent's right edge (x + 15) first reaches
// column 10 (x >= 145) on move 33; at walking speed (2 units) on move 65.
#[test]
fn first_coin_is_collected_on_the_hand_traced_move() {
    let level = bundled("w1l1.txt");
    for (action, expected) in [(Action::RightRun, 33), (Action::Right, 65)] {
        let mut state = reset(&level);
        let mut collected_at = None;
        for n in 1..=80 {
            if state.step(&level, action).unwrap().coin_collected {
                collected_at = Some(n);
                break;
            }
        }
        assert_eq!(collected_at, Some(expected), "{action:?}");
        assert_eq!(state.coins, 1);
    }
}

// Flag at column 59, start at column 1: distance is 58 tiles.
#[test]
fn hopping_completes_w1l1() {
    let level = bundled("w1l1.txt");
    let trace = hop_trace(400);
    let params = FitnessParams::default();
    let out = run_episode(&level, &params, EpisodeLimits::replay(trace.len()), &mut SequenceSource(&trace));
    assert!(out.summary.flag_get);
    assert_eq!(out.summary.truncation_reason, TruncationReason::Flag);
    assert_eq!(out.summary.distance as i32, (59 - 1) * SUBTILE);
    assert_eq!(out.summary.deaths, 0);

    // Replaying the recorded actions reproduces everything bit for bit.
    let again = run_episode(&level, &params, EpisodeLimits::replay(out.replay.len()), &mut SequenceSource(&out.replay.actions));
    assert_eq!(again, out);
    assert_eq!(
        compute_fitness(&again.summary, &params.with_max_time(level.max_time())),
        compute_fitness(&out.summary, &params.with_max_time(level.max_time()))
    );
}

#[test]
fn render_marks_agent_and_taken_coins() {
    let level = bundled("w1l1.txt");
    let mut state = reset(&level);
    let frame = state.render(&level);
    assert_eq!(frame.lines().count(), level.height());
    assert_eq!(frame.matches('M').count(), 1);
    assert_eq!(frame.matches('o').count(), 3);
    for _ in 0..40 {
        state.step(&level, Action::RightRun).unwrap();
    }
    assert_eq!(state.render(&level).matches('o').count(), 2);
}
