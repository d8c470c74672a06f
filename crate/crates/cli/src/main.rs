use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use evoplat_core::config::{Algorithm, ConfigError, ExperimentConfig};
use evoplat_core::env::{run_episode, EpisodeLimits, Replay, SequenceSource};
use evoplat_core::harness::{self, emit_outputs, write_atomic, CompareRow, HarnessError, RunRecord};
use evoplat_core::levelgen::make_level;
use evoplat_core::{compute_fitness, load_level, FitnessParams, LevelSpec};

#[derive(Parser)]
#[command(name = "evoplat", version, about = "Evolve platformer agents with a GA or NEAT")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every fold of one experiment and write its artifacts.
    Train {
        #[arg(long)]
        config: PathBuf,
        /// Output directory, overriding `output_dir` from the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Added to every fold seed.
        #[arg(long, default_value_t = 0)]
        seed_offset: u64,
        /// Print the effective config and exit.
        #[arg(long)]
        print_config: bool,
    },
    /// Re-simulate a stored replay and print its summary and final frame.
    Replay {
        replay: PathBuf,
        /// Level file; defaults to the `level=` line of the replay, relative
        /// to the replay's directory.
        #[arg(long)]
        level: Option<PathBuf>,
        /// Config whose `[fitness]` section scores the replay.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Run a GA and an NE experiment on the same level and tabulate them.
    Compare {
        /// Give twice: the two experiment configs, typically one GA and one NE.
        #[arg(long, required = true)]
        config: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed_offset: u64,
    },
    /// Generate a flat level with seeded coins and pipes.
    MakeLevel {
        #[arg(long)]
        width: usize,
        #[arg(long, default_value_t = 0)]
        coins: usize,
        #[arg(long, default_value_t = 0)]
        pipes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Level file to write; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// A failure mapped to its exit code.
#[derive(Debug)]
enum Failure {
    /// Bad config, level or replay input.
    Input(String),
    Runtime(String),
    Divergence(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Runtime(_) => 3,
            Failure::Divergence(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Runtime(m) | Failure::Divergence(m) => m,
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::ReplayMismatch(_) => Failure::Divergence(e.to_string()),
            e => Failure::Runtime(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let result = match cli.command {
        Command::Train { config, out, seed_offset, print_config } => {
            train(&config, out.as_deref(), seed_offset, print_config)
        }
        Command::Replay { replay, level, config } => replay_cmd(&replay, level.as_deref(), config.as_deref()),
        Command::Compare { config, out, seed_offset } => compare(&config, out.as_deref(), seed_offset),
        Command::MakeLevel { width, coins, pipes, seed, out } => make_level_cmd(width, coins, pipes, seed, out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

/// Honours `EVOPLAT_THREADS` by sizing the global evaluation pool.
fn configure_threads() -> Result<(), String> {
    let Ok(value) = std::env::var("EVOPLAT_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| format!("EVOPLAT_THREADS must be a positive integer, got {value:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| format!("cannot size the thread pool: {e}"))
}

/// A loaded config with its level resolved and read.
struct Experiment {
    config: ExperimentConfig,
    level: LevelSpec,
}

fn load_experiment(path: &Path, seed_offset: u64) -> Result<Experiment, Failure> {
    let mut config = ExperimentConfig::load(path)?;
    config.offset_seeds(seed_offset);
    if config.run.level.is_empty() {
        return Err(Failure::Input(format!("{}: [run] level is not set", path.display())));
    }
    let base = path.parent().unwrap_or(Path::new("."));
    let level_path = base.join(&config.run.level);
    let text = std::fs::read_to_string(&level_path)
        .map_err(|e| Failure::Input(format!("cannot read level {}: {e}", level_path.display())))?;
    let level = load_level(&text).map_err(|e| Failure::Input(format!("{}: {e}", level_path.display())))?;
    // Replays record this path, so make it independent of the working directory.
    let level_path = std::fs::canonicalize(&level_path).unwrap_or(level_path);
    config.run.level = level_path.to_string_lossy().into_owned();
    if config.run.algorithm == Algorithm::Ne {
        let expected = config.run.observation().len();
        let configured = config.neat.genome.num_inputs;
        if configured != expected {
            return Err(Failure::Input(format!(
                "num_inputs = {configured} but a {}x{} window gives {expected} observation values",
                config.run.window_width, config.run.window_height
            )));
        }
    }
    Ok(Experiment { config, level })
}

fn output_dir(config: &ExperimentConfig, out: Option<&Path>) -> PathBuf {
    out.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from(&config.run.output_dir))
}

/// Runs all folds, printing one line per generation, then writes artifacts.
fn run_and_emit(exp: &Experiment, dir: &Path) -> Result<Vec<RunRecord>, Failure> {
    let label = exp.config.run.algorithm.label();
    let records = harness::run_experiment(&exp.config, &exp.level, &mut |seed, s| {
        println!("{label} seed {seed} generation {} best {}", s.generation, s.best_fitness);
    })?;
    let stats = records
        .iter()
        .map(|r| harness::gameplay_stats(r, &exp.level, &exp.config.fitness))
        .collect::<Result<Vec<_>, _>>()?;
    let title = format!("{label} fitness over {} folds", records.len());
    emit_outputs(&records, &stats, dir, &title)
        .map_err(|e| Failure::Runtime(format!("cannot write outputs to {}: {e}", dir.display())))?;
    Ok(records)
}

fn train(config: &Path, out: Option<&Path>, seed_offset: u64, print_config: bool) -> Result<(), Failure> {
    let exp = load_experiment(config, seed_offset)?;
    if print_config {
        print!("{}", exp.config.to_ini());
        return Ok(());
    }
    let dir = output_dir(&exp.config, out);
    let records = run_and_emit(&exp, &dir)?;
    let solved = records.iter().filter(|r| r.solved).count();
    println!("solved {solved}/{} folds, outputs in {}", records.len(), dir.display());
    Ok(())
}

fn replay_cmd(path: &Path, level: Option<&Path>, config: Option<&Path>) -> Result<(), Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read replay {}: {e}", path.display())))?;
    let replay = Replay::parse(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let level_path = match level {
        Some(p) => p.to_path_buf(),
        None => path.parent().unwrap_or(Path::new(".")).join(&replay.level),
    };
    let level_text = std::fs::read_to_string(&level_path)
        .map_err(|e| Failure::Input(format!("cannot read level {}: {e}", level_path.display())))?;
    let level = load_level(&level_text).map_err(|e| Failure::Input(format!("{}: {e}", level_path.display())))?;
    let params = match config {
        Some(p) => ExperimentConfig::load(p)?.fitness,
        None => FitnessParams::default(),
    };

    let outcome = run_episode(
        &level,
        &params,
        EpisodeLimits::replay(replay.actions.len()),
        &mut SequenceSource(&replay.actions),
    );
    let fitness = compute_fitness(&outcome.summary, &params.with_max_time(level.max_time()));
    let s = &outcome.summary;
    println!("fitness {fitness}");
    println!("coins {}", s.collected_coins);
    println!("distance {}", s.distance);
    println!("time_left {}", s.time_left);
    println!("flag_get {}", s.flag_get);
    println!("deaths {}", s.deaths);
    println!("moves {} of {}", s.moves_used, replay.actions.len());
    println!();
    print!("{}", outcome.final_state.render(&level));

    if let Some(h) = &replay.header {
        let mut diffs = String::new();
        let mut check = |name: &str, recorded: String, now: String| {
            if recorded != now {
                let _ = write!(diffs, " {name} {recorded} -> {now};");
            }
        };
        check("fitness", h.fitness.to_string(), fitness.to_string());
        check("coins", h.coins.to_string(), s.collected_coins.to_string());
        check("distance", h.distance.to_string(), s.distance.to_string());
        check("flag_get", h.flag_get.to_string(), s.flag_get.to_string());
        check("moves", h.moves.to_string(), s.moves_used.to_string());
        if !diffs.is_empty() {
            return Err(Failure::Divergence(format!("replay diverged from its header:{diffs}")));
        }
    }
    Ok(())
}

fn compare(configs: &[PathBuf], out: Option<&Path>, seed_offset: u64) -> Result<(), Failure> {
    if configs.len() != 2 {
        return Err(Failure::Input(format!("compare takes exactly two --config files, got {}", configs.len())));
    }
    let experiments =
        configs.iter().map(|c| load_experiment(c, seed_offset)).collect::<Result<Vec<_>, _>>()?;
    let (a, b) = (&experiments[0].config.run, &experiments[1].config.run);
    if experiments[0].level != experiments[1].level {
        return Err(Failure::Input("compared configs must use the same level".into()));
    }
    if a.wall_clock_budget != b.wall_clock_budget {
        return Err(Failure::Input("compared configs must share wall_clock_budget".into()));
    }
    let dir = output_dir(&experiments[0].config, out);
    let mut rows = Vec::new();
    for exp in &experiments {
        let label = exp.config.run.algorithm.label();
        let start = Instant::now();
        let records = run_and_emit(exp, &dir.join(label))?;
        rows.push(CompareRow::from_records(label, &records, start.elapsed().as_secs_f64()));
    }

    println!();
    println!("{:<10} {:>12} {:>18} {:>12} {:>10}", "algorithm", "success_rate", "mean_best_fitness", "generations", "wall_s");
    for r in &rows {
        println!(
            "{:<10} {:>12.2} {:>18.3} {:>12.1} {:>10.1}",
            r.algorithm, r.success_rate, r.mean_best_fitness, r.generations, r.wall_seconds
        );
    }
    let path = dir.join("compare.csv");
    write_atomic(&path, &CompareRow::csv(&rows))
        .map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}

fn make_level_cmd(width: usize, coins: usize, pipes: usize, seed: u64, out: Option<&Path>) -> Result<(), Failure> {
    let level = make_level(width, coins, pipes, seed).map_err(|e| Failure::Input(e.to_string()))?;
    match out {
        Some(path) => write_atomic(path, &level.to_text())
            .map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{}", level.to_text()),
    }
    Ok(())
}
