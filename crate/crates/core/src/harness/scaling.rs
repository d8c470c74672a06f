use std::time::Instant;

use crate::config::Algorithm;
use crate::env::LevelSpec;
use crate::fitness::{ConstraintSpec, FitnessParams};
use crate::ga::{run_ga, GaConfig};
use crate::neat::{run_neat, NeatConfig, NeatSettings};
use crate::stats::RunControl;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalingAxis {
    Population,
    /// GA genome length or NEAT episode move budget.
    Moves,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingPoint {
    pub axis: ScalingAxis,
    pub population: usize,
    pub moves: usize,
    /// Fastest of the repeats, in seconds.
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingReport {
    pub points: Vec<ScalingPoint>,
    /// Least-squares slope of log time against log population.
    pub population_exponent: f64,
    pub moves_exponent: f64,
}

impl ScalingReport {
    /// Time ratios between consecutive points of one axis.
    pub fn ratios(&self, axis: ScalingAxis) -> Vec<f64> {
        let times: Vec<f64> = self.points.iter().filter(|p| p.axis == axis).map(|p| p.seconds).collect();
        times.windows(2).map(|w| w[1] / w[0]).collect()
    }
}

/// Slope of the least-squares line through `(ln x, ln y)`.
pub fn fit_exponent(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let cov: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}

/// Times fixed-generation runs over a grid. The population axis uses the
/// base move count and vice versa. Stagnation cut-offs are disabled and the
/// constraints made unsatisfiable so every run plays every move of every
/// generation; `level` should be long enough that the flag is out of reach.
#[allow(clippy::too_many_arguments)]
pub fn measure_scaling(
    algorithm: Algorithm,
    level: &LevelSpec,
    params: &FitnessParams,
    base_population: usize,
    base_moves: usize,
    populations: &[usize],
    moves: &[usize],
    generations: usize,
    repeats: usize,
) -> ScalingReport {
    let never = ConstraintSpec { min_coins: u32::MAX, ..ConstraintSpec::default() };
    let time_point = |population: usize, moves: usize| -> f64 {
        (0..repeats.max(1))
            .map(|_| {
                let start = Instant::now();
                match algorithm {
                    Algorithm::Ga => {
                        let cfg = GaConfig {
                            population_size: population,
                            moves_amount: moves,
                            moves_to_check: moves,
                            generation_amount: generations,
                            rng_seed: 1,
                            ..GaConfig::default()
                        };
                        run_ga(level, params, &cfg, &never, RunControl::default(), &mut |_| {})
                            .expect("valid scaling config");
                    }
                    Algorithm::Ne => {
                        let mut cfg = NeatConfig::default();
                        cfg.neat.pop_size = population;
                        let settings = NeatSettings {
                            max_generations: generations + 1,
                            move_budget: moves,
                            moves_to_check: moves,
                            seed: 1,
                            ..NeatSettings::default()
                        };
                        cfg.neat.fitness_threshold = f64::INFINITY;
                        run_neat(level, params, &cfg, &settings, &never, RunControl::default(), &mut |_| {})
                            .expect("valid scaling config");
                    }
                }
                start.elapsed().as_secs_f64()
            })
            .fold(f64::INFINITY, f64::min)
    };

    let mut points = Vec::new();
    for &p in populations {
        points.push(ScalingPoint { axis: ScalingAxis::Population, population: p, moves: base_moves, seconds: time_point(p, base_moves) });
    }
    for &m in moves {
        points.push(ScalingPoint { axis: ScalingAxis::Moves, population: base_population, moves: m, seconds: time_point(base_population, m) });
    }
    let exponent = |axis: ScalingAxis, value: fn(&ScalingPoint) -> usize| {
        let (xs, ys): (Vec<f64>, Vec<f64>) =
            points.iter().filter(|p| p.axis == axis).map(|p| (value(p) as f64, p.seconds)).unzip();
        fit_exponent(&xs, &ys)
    };
    ScalingReport {
        population_exponent: exponent(ScalingAxis::Population, |p| p.population),
        moves_exponent: exponent(ScalingAxis::Moves, |p| p.moves),
        points,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_of_power_law() {
        let xs = [10.0, 20.0, 40.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(1.5)).collect();
        assert!((fit_exponent(&xs, &ys) - 1.5).abs() < 1e-12);
    }
}
