//! Scalar fitness and the constraint model shared by both engines.
//!
//! Fitness is `CR·CC + DR·D − TP·(MT − TL)`: coins collected, distance
//! travelled (sub-tile units past the start) and clock ticks spent in the
//! final life. A run counts as a solution only when it reaches the flag and
//! the summed constraint violation is zero.

/// Weights of the three fitness terms plus the per-life clock budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitnessParams {
    pub coin_reward: f64,
    pub distance_reward: f64,
    pub time_penalty: f64,
    /// Clock ticks per life (MT).
    pub max_time: u32,
}

impl Default for FitnessParams {
    fn default() -> Self {
        FitnessParams { coin_reward: 10.0, distance_reward: 0.1, time_penalty: 0.8, max_time: 400 }
    }
}

impl FitnessParams {
    pub fn with_max_time(self, max_time: u32) -> Self {
        FitnessParams { max_time, ..self }
    }

    pub fn validate(&self) -> Result<(), String> {
        let weights = [self.coin_reward, self.distance_reward, self.time_penalty];
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err("fitness weights must be finite and non-negative".into());
        }
        if self.max_time < 1 {
            return Err("max_time must be at least 1".into());
        }
        Ok(())
    }
}

/// Why an episode stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TruncationReason {
    Flag,
    Death,
    Budget,
    Stagnation,
}

impl TruncationReason {
    pub fn as_str(self) -> &'static str {
        match self {
            TruncationReason::Flag => "flag",
            TruncationReason::Death => "death",
            TruncationReason::Budget => "budget",
            TruncationReason::Stagnation => "stagnation",
        }
    }
}

/// Measured totals of one episode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpisodeSummary {
    pub collected_coins: u32,
    /// `max_x_reached − start_x`, in sub-tile units.
    pub distance: u32,
    /// Clock ticks left in the final life when the episode ended.
    pub time_left: u32,
    /// Ticks spent in the final life (`MT − TL`).
    pub elapsed: u32,
    pub flag_get: bool,
    pub deaths: u32,
    pub moves_used: usize,
    pub truncation_reason: TruncationReason,
    /// Ticks spent in each life that ended in death.
    pub life_elapsed: Vec<u32>,
}

impl EpisodeSummary {
    /// Summary of an episode that has not moved yet.
    pub fn empty(max_time: u32) -> Self {
        EpisodeSummary {
            collected_coins: 0,
            distance: 0,
            time_left: max_time,
            elapsed: 0,
            flag_get: false,
            deaths: 0,
            moves_used: 0,
            truncation_reason: TruncationReason::Budget,
            life_elapsed: Vec::new(),
        }
    }
}

pub fn compute_fitness(summary: &EpisodeSummary, params: &FitnessParams) -> f64 {
    let spent = f64::from(params.max_time) - f64::from(summary.time_left);
    params.coin_reward * f64::from(summary.collected_coins)
        + params.distance_reward * f64::from(summary.distance)
        - params.time_penalty * spent
}

/// Upper bounds (and the coin floor) a solution has to respect.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConstraintSpec {
    pub max_moves: usize,
    pub max_deaths: u32,
    pub max_time: u32,
    pub min_coins: u32,
}

impl Default for ConstraintSpec {
    fn default() -> Self {
        ConstraintSpec { max_moves: 5000, max_deaths: 2, max_time: 400, min_coins: 0 }
    }
}

fn excess(value: f64, bound: f64) -> f64 {
    (value - bound).max(0.0)
}

/// Sum of positive excesses over every bound; zero iff all constraints hold.
pub fn constraint_violation(summary: &EpisodeSummary, constraints: &ConstraintSpec) -> f64 {
    excess(summary.moves_used as f64, constraints.max_moves as f64)
        + excess(f64::from(summary.deaths), f64::from(constraints.max_deaths))
        + excess(f64::from(summary.elapsed), f64::from(constraints.max_time))
        + excess(f64::from(constraints.min_coins), f64::from(summary.collected_coins))
}

pub fn is_solution(summary: &EpisodeSummary, constraints: &ConstraintSpec) -> bool {
    summary.flag_get && constraint_violation(summary, constraints) == 0.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn summary(cc: u32, d: u32, tl: u32, mt: u32) -> EpisodeSummary {
        EpisodeSummary {
            collected_coins: cc,
            distance: d,
            time_left: tl,
            elapsed: mt - tl,
            ..EpisodeSummary::empty(mt)
        }
    }

    #[test]
    fn untouched_episode_scores_zero() {
        let p = FitnessParams::default();
        assert_eq!(compute_fitness(&summary(0, 0, 400, 400), &p), 0.0);
    }

    #[test]
    fn default_weights_hand_value() {
        let p = FitnessParams::default().with_max_time(400);
        assert_eq!(compute_fitness(&summary(5, 100, 300, 400), &p), -20.0);
    }

    #[test]
    fn constraint_violation_examples() {
        let constraints = ConstraintSpec { max_moves: 100, max_deaths: 3, max_time: 400, min_coins: 0 };
        let mut s = summary(2, 10, 350, 400);
        s.moves_used = 50;
        assert_eq!(constraint_violation(&s, &constraints), 0.0);

        s.moves_used = 107;
        assert_eq!(constraint_violation(&s, &constraints), 7.0);

        let constraints = ConstraintSpec { min_coins: 3, ..constraints };
        let mut s = summary(1, 10, 350, 400);
        s.moves_used = 50;
        s.deaths = 5;
        assert_eq!(constraint_violation(&s, &constraints), 4.0);
    }

    #[test]
    fn solution_needs_flag_and_feasibility() {
        let limits = ConstraintSpec { max_moves: 100, max_deaths: 3, max_time: 400, min_coins: 3 };
        let mut s = summary(3, 10, 350, 400);
        s.flag_get = true;
        assert!(is_solution(&s, &limits));
        s.collected_coins = 1;
        s.deaths = 5;
        assert!(!is_solution(&s, &limits));
        let mut s = summary(3, 10, 350, 400);
        s.flag_get = false;
        assert!(!is_solution(&s, &limits));
    }

    fn arb_summary() -> impl Strategy<Value = EpisodeSummary> {
        (0u32..50, 0u32..5000, 1u32..1000, 0u32..1000, 0u32..4, 0usize..6000).prop_map(
            |(cc, d, mt, tl, deaths, moves)| {
                let tl = tl % (mt + 1);
                EpisodeSummary {
                    deaths,
                    moves_used: moves,
                    ..summary(cc, d, tl, mt)
                }
            },
        )
    }

    proptest! {
        #[test]
        fn fitness_is_linear(s in arb_summary(), cr in 0.0f64..50.0, dr in 0.0f64..2.0, tp in 0.0f64..5.0) {
            let mt = s.time_left + s.elapsed;
            let p = FitnessParams { coin_reward: cr, distance_reward: dr, time_penalty: tp, max_time: mt };
            let f = compute_fitness(&s, &p);
            let expected = cr * f64::from(s.collected_coins) + dr * f64::from(s.distance)
                - tp * f64::from(s.elapsed);
            prop_assert!((f - expected).abs() <= 1e-9 * (1.0 + expected.abs()));
            let doubled = FitnessParams { coin_reward: 2.0 * cr, distance_reward: 2.0 * dr, time_penalty: 2.0 * tp, max_time: mt };
            prop_assert!((compute_fitness(&s, &doubled) - 2.0 * f).abs() <= 1e-9 * (1.0 + f.abs()));
        }

        #[test]
        fn fitness_is_monotone(s in arb_summary()) {
            let mt = s.time_left + s.elapsed;
            let p = FitnessParams::default().with_max_time(mt);
            let f = compute_fitness(&s, &p);
            let more_coins = EpisodeSummary { collected_coins: s.collected_coins + 1, ..s.clone() };
            prop_assert!(compute_fitness(&more_coins, &p) > f);
            let further = EpisodeSummary { distance: s.distance + 1, ..s.clone() };
            prop_assert!(compute_fitness(&further, &p) > f);
            if s.time_left > 0 {
                let slower = EpisodeSummary { time_left: s.time_left - 1, elapsed: s.elapsed + 1, ..s.clone() };
                prop_assert!(compute_fitness(&slower, &p) < f);
            }
        }

        #[test]
        fn violation_is_nonnegative_and_monotone(s in arb_summary(), max_moves in 0usize..6000, max_deaths in 0u32..4, max_time in 0u32..1000, min_coins in 0u32..50) {
            let limits = ConstraintSpec { max_moves, max_deaths, max_time, min_coins };
            let g = constraint_violation(&s, &limits);
            prop_assert!(g >= 0.0);
            let feasible = s.moves_used <= max_moves && s.deaths <= max_deaths
                && s.elapsed <= max_time && s.collected_coins >= min_coins;
            prop_assert_eq!(g == 0.0, feasible);
            let worse = EpisodeSummary { moves_used: s.moves_used + 1, deaths: s.deaths + 1, ..s.clone() };
            prop_assert!(constraint_violation(&worse, &limits) >= g);
        }
    }
}
