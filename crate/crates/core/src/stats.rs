//! Per-generation bookkeeping shared by both engines.

use std::time::Instant;

#[derive(Debug, Clone, PartialEq)]
pub struct GenerationStats {
    pub generation: usize,
    pub best_fitness: f64,
    pub mean_fitness: f64,
    pub worst_fitness: f64,
    /// Generations so far in which the best-ever fitness did not improve.
    pub stuck_events_cumulative: usize,
    pub solved: bool,
    /// Seconds since the run started; zero when timing is not recorded.
    pub elapsed_wall: f64,
}

impl GenerationStats {
    /// Aggregates a non-empty slice of fitness values.
    pub fn from_fitnesses(
        generation: usize,
        fitnesses: &[f64],
        stuck_events_cumulative: usize,
        solved: bool,
        elapsed_wall: f64,
    ) -> Self {
        assert!(!fitnesses.is_empty(), "generation without individuals");
        let best = fitnesses.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let worst = fitnesses.iter().copied().fold(f64::INFINITY, f64::min);
        let mean = fitnesses.iter().sum::<f64>() / fitnesses.len() as f64;
        GenerationStats {
            generation,
            best_fitness: best,
            // Rounding in the sum can push the mean a hair outside [worst, best].
            mean_fitness: mean.clamp(worst, best),
            worst_fitness: worst,
            stuck_events_cumulative,
            solved,
            elapsed_wall,
        }
    }
}

/// Wall-clock options of a run. Both default to off so that runs are
/// bit-reproducible and never touch the system clock.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RunControl {
    pub record_timing: bool,
    /// Seconds; checked between generations only.
    pub wall_clock_budget: Option<f64>,
}

pub(crate) struct RunClock {
    start: Option<Instant>,
    control: RunControl,
}

impl RunClock {
    pub(crate) fn start(control: RunControl) -> Self {
        let needs_clock = control.record_timing || control.wall_clock_budget.is_some();
        RunClock { start: needs_clock.then(Instant::now), control }
    }

    fn seconds(&self) -> f64 {
        self.start.map_or(0.0, |s| s.elapsed().as_secs_f64())
    }

    /// Elapsed seconds for reporting (zero unless timing is recorded).
    pub(crate) fn elapsed(&self) -> f64 {
        if self.control.record_timing {
            self.seconds()
        } else {
            0.0
        }
    }

    pub(crate) fn budget_exceeded(&self) -> bool {
        self.control.wall_clock_budget.is_some_and(|b| self.seconds() >= b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_holds_for_constant_values() {
        let s = GenerationStats::from_fitnesses(0, &[0.1, 0.1, 0.1], 0, false, 0.0);
        assert!(s.worst_fitness <= s.mean_fitness && s.mean_fitness <= s.best_fitness);
        let s = GenerationStats::from_fitnesses(3, &[-2.0, 4.0, 1.0], 2, true, 0.0);
        assert_eq!((s.best_fitness, s.mean_fitness, s.worst_fitness), (4.0, 1.0, -2.0));
    }

    #[test]
    fn disabled_clock_reports_zero() {
        let clock = RunClock::start(RunControl::default());
        assert_eq!(clock.elapsed(), 0.0);
        assert!(!clock.budget_exceeded());
        let clock = RunClock::start(RunControl { record_timing: false, wall_clock_budget: Some(0.0) });
        assert!(clock.budget_exceeded());
    }
}
