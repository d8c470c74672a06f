mod common;

use common::bundled;
use evoplat_core::config::{Algorithm, ExperimentConfig};
use evoplat_core::harness::{
    aggregate, emit_outputs, gameplay_stats, measure_scaling, run_experiment, success_rate, HarnessError,
};
use evoplat_core::levelgen::make_level;
use evoplat_core::FitnessParams;

fn config(algorithm: Algorithm) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::default();
    cfg.run.algorithm = algorithm;
    cfg.run.level = "w1l1.txt".into();
    cfg.ga.moves_amount = 500;
    cfg.ga.generation_amount = 200;
    cfg.neat.neat.pop_size = 30;
    cfg.run.ne_move_budget = 500;
    cfg.run.ne_max_generations = 30;
    cfg
}

#[test]
fn experiments_are_reproducible_and_replays_verify() {
    let level = bundled("w1l1.txt");
    for algorithm in [Algorithm::Ga, Algorithm::Ne] {
        let cfg = config(algorithm);
        let mut lines = 0;
        let a = run_experiment(&cfg, &level, &mut |_, _| lines += 1).unwrap();
        let b = run_experiment(&cfg, &level, &mut |_, _| {}).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 5);
        assert_eq!(lines, a.iter().map(|r| r.history.len()).sum::<usize>());
        for r in &a {
            let stats = gameplay_stats(r, &level, &cfg.fitness).unwrap();
            assert_eq!(stats.coins, r.summary.collected_coins);
            assert!(stats.jumps + stats.right_moves + stats.left_moves <= stats.moves_used);
        }
    }
}

#[test]
fn tampered_record_is_a_mismatch() {
    let level = bundled("w1l1.txt");
    let cfg = config(Algorithm::Ga);
    let mut records = run_experiment(&cfg, &level, &mut |_, _| {}).unwrap();
    records[0].fitness += 1.0;
    assert!(matches!(gameplay_stats(&records[0], &level, &cfg.fitness), Err(HarnessError::ReplayMismatch(_))));
}

#[test]
fn outputs_inventory_and_byte_identity() {
    let level = bundled("w1l1.txt");
    let cfg = config(Algorithm::Ga);
    let records = run_experiment(&cfg, &level, &mut |_, _| {}).unwrap();
    let stats: Vec<_> = records.iter().map(|r| gameplay_stats(r, &level, &cfg.fitness).unwrap()).collect();
    let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let written = emit_outputs(&records, &stats, d1.path(), "GA").unwrap();
    emit_outputs(&records, &stats, d2.path(), "GA").unwrap();

    let count = |prefix: &str, suffix: &str| {
        written
            .iter()
            .filter(|p| {
                let n = p.file_name().unwrap().to_str().unwrap();
                n.starts_with(prefix) && n.ends_with(suffix)
            })
            .count()
    };
    assert_eq!((count("run_", ".csv"), count("best_", ".replay")), (5, 5));
    assert_eq!((count("summary", ".csv"), count("stats", ".csv"), count("", ".svg")), (1, 1, 1));
    assert_eq!(std::fs::read_dir(d1.path()).unwrap().count(), written.len());

    for path in &written {
        let name = path.file_name().unwrap();
        assert_eq!(std::fs::read(path).unwrap(), std::fs::read(d2.path().join(name)).unwrap());
    }
    for r in &records {
        let csv = std::fs::read_to_string(d1.path().join(format!("run_{}.csv", r.seed))).unwrap();
        assert_eq!(csv.lines().count(), r.generations_executed() + 2);
    }
}

#[test]
fn aggregation_ignores_record_order() {
    let level = bundled("w1l2.txt");
    let mut cfg = config(Algorithm::Ga);
    cfg.ga.generation_amount = 15;
    let records = run_experiment(&cfg, &level, &mut |_, _| {}).unwrap();
    let mut reversed = records.clone();
    reversed.reverse();
    let (a, b) = (aggregate(&records), aggregate(&reversed));
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert!((x.best - y.best).abs() < 1e-9 && (x.mean - y.mean).abs() < 1e-9 && (x.worst - y.worst).abs() < 1e-9);
        assert!(x.worst <= x.mean && x.mean <= x.best);
    }
    let rate = success_rate(&records) * records.len() as f64;
    assert_eq!(rate, rate.round());
}

#[test]
fn one_generation_scaling_points_have_positive_times() {
    let level = make_level(200, 0, 0, 1).unwrap();
    let report = measure_scaling(Algorithm::Ga, &level, &FitnessParams::default(), 10, 100, &[5, 10, 20], &[50, 100, 200], 1, 1);
    assert_eq!(report.points.len(), 6);
    assert!(report.points.iter().all(|p| p.seconds > 0.0));
    assert!(report.population_exponent.is_finite() && report.moves_exponent.is_finite());
}
