//! INI run files.
//!
//! One file drives a whole experiment: `[run]`, `[fitness]`, `[constraints]`,
//! `[GA]` and the five NEAT sections. Section and key names are matched
//! exactly; anything unknown is rejected so that typos never fall back to a
//! default silently.

use std::fmt::Write as _;
use std::path::Path;

use ini::Ini;
use thiserror::Error;

use crate::env::{Action, ObservationConfig};
use crate::fitness::{ConstraintSpec, FitnessParams};
use crate::ga::GaConfig;
use crate::neat::NeatConfig;
use crate::stats::RunControl;

/// A scalar or list that can appear on the right of `key = value`.
pub trait IniValue: Sized {
    fn parse_ini(text: &str) -> Result<Self, String>;
    fn to_ini(&self) -> String;
}

/// A struct mapped onto one INI section. Implemented through `ini_section!`.
pub trait IniSection {
    fn keys() -> &'static [&'static str];
    /// `None` when the key does not belong to this section.
    fn set(&mut self, key: &str, value: &str) -> Option<Result<(), String>>;
    fn entries(&self) -> Vec<(&'static str, String)>;
}

macro_rules! ini_from_str {
    ($($t:ty),*) => {$(
        impl IniValue for $t {
            fn parse_ini(text: &str) -> Result<Self, String> {
                text.trim().parse().map_err(|e| format!("{e}: {text:?}"))
            }
            fn to_ini(&self) -> String {
                self.to_string()
            }
        }
    )*};
}

ini_from_str!(usize, u64, u32, i64);

impl IniValue for f64 {
    fn parse_ini(text: &str) -> Result<Self, String> {
        let t = text.trim();
        let v: f64 = match t.to_ascii_lowercase().as_str() {
            "inf" | "+inf" | "infinity" => f64::INFINITY,
            "-inf" | "-infinity" => f64::NEG_INFINITY,
            _ => t.parse().map_err(|e| format!("{e}: {text:?}"))?,
        };
        if v.is_nan() {
            return Err("NaN is not a valid value".into());
        }
        Ok(v)
    }
    fn to_ini(&self) -> String {
        // `Display` for f64 is the shortest string that parses back exactly.
        self.to_string()
    }
}

impl IniValue for bool {
    fn parse_ini(text: &str) -> Result<Self, String> {
        match text.trim().to_ascii_lowercase().as_str() {
            "true" | "yes" | "on" | "1" => Ok(true),
            "false" | "no" | "off" | "0" => Ok(false),
            _ => Err(format!("expected True or False, got {text:?}")),
        }
    }
    fn to_ini(&self) -> String {
        if *self { "True" } else { "False" }.to_string()
    }
}

impl IniValue for String {
    fn parse_ini(text: &str) -> Result<Self, String> {
        Ok(text.trim().to_string())
    }
    fn to_ini(&self) -> String {
        self.clone()
    }
}

impl IniValue for Option<f64> {
    fn parse_ini(text: &str) -> Result<Self, String> {
        let t = text.trim();
        if t.is_empty() || t.eq_ignore_ascii_case("none") {
            Ok(None)
        } else {
            f64::parse_ini(t).map(Some)
        }
    }
    fn to_ini(&self) -> String {
        self.map_or_else(|| "none".to_string(), |v| v.to_ini())
    }
}

/// Lists are separated by whitespace or commas.
impl<T: IniValue> IniValue for Vec<T> {
    fn parse_ini(text: &str) -> Result<Self, String> {
        text.split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .map(T::parse_ini)
            .collect()
    }
    fn to_ini(&self) -> String {
        self.iter().map(T::to_ini).collect::<Vec<_>>().join(" ")
    }
}

impl IniValue for Action {
    fn parse_ini(text: &str) -> Result<Self, String> {
        let code: u8 = text.trim().parse().map_err(|_| format!("bad action code {text:?}"))?;
        Action::from_code(code).ok_or_else(|| format!("action code {code} outside 0..6"))
    }
    fn to_ini(&self) -> String {
        self.code().to_string()
    }
}

/// Which engine an experiment runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Ga,
    Ne,
}

impl Algorithm {
    pub fn label(self) -> &'static str {
        match self {
            Algorithm::Ga => "GA",
            Algorithm::Ne => "NE",
        }
    }
}

impl IniValue for Algorithm {
    fn parse_ini(text: &str) -> Result<Self, String> {
        match text.trim().to_ascii_uppercase().as_str() {
            "GA" => Ok(Algorithm::Ga),
            "NE" | "NEAT" => Ok(Algorithm::Ne),
            _ => Err(format!("algorithm must be GA or NE, got {text:?}")),
        }
    }
    fn to_ini(&self) -> String {
        self.label().to_string()
    }
}

ini_section!(FitnessParams { coin_reward, distance_reward, time_penalty });
ini_section!(ConstraintSpec { max_moves, max_deaths, max_time, min_coins });

/// The `[run]` section.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSection {
    pub algorithm: Algorithm,
    /// Level file, relative paths resolve against the config file's directory.
    pub level: String,
    pub repeats: usize,
    pub seeds: Vec<u64>,
    pub output_dir: String,
    /// Seconds per fold; `none` for no limit.
    pub wall_clock_budget: Option<f64>,
    /// Record wall-clock times in the outputs (makes them non-reproducible).
    pub record_timing: bool,
    /// Generations evaluated by a NEAT run (including the first).
    pub ne_max_generations: usize,
    pub ne_move_budget: usize,
    pub ne_moves_to_check: usize,
    pub window_width: usize,
    pub window_height: usize,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            algorithm: Algorithm::Ga,
            level: String::new(),
            repeats: 5,
            seeds: vec![1, 2, 3, 4, 5],
            output_dir: "out".into(),
            wall_clock_budget: None,
            record_timing: false,
            ne_max_generations: 300,
            ne_move_budget: 5000,
            ne_moves_to_check: 30,
            window_width: 8,
            window_height: 8,
        }
    }
}

ini_section!(RunSection {
    algorithm,
    level,
    repeats,
    seeds,
    output_dir,
    wall_clock_budget,
    record_timing,
    ne_max_generations,
    ne_move_budget,
    ne_moves_to_check,
    window_width,
    window_height,
});

impl RunSection {
    pub fn control(&self) -> RunControl {
        RunControl { record_timing: self.record_timing, wall_clock_budget: self.wall_clock_budget }
    }

    pub fn observation(&self) -> ObservationConfig {
        ObservationConfig { window_width: self.window_width, window_height: self.window_height }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("cannot read config: {0}")]
    Io(String),
    #[error("malformed config: {0}")]
    Syntax(String),
    #[error("unknown section [{0}]")]
    UnknownSection(String),
    #[error("unknown key `{key}` in section [{section}]")]
    UnknownKey { section: String, key: String },
    #[error("bad value for `{key}` in [{section}]: {msg}")]
    BadValue { section: String, key: String, msg: String },
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// Everything one experiment needs.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExperimentConfig {
    pub run: RunSection,
    pub fitness: FitnessParams,
    pub constraints: ConstraintSpec,
    pub ga: GaConfig,
    pub neat: NeatConfig,
}

pub const SECTIONS: [&str; 9] = [
    "run",
    "fitness",
    "constraints",
    "GA",
    "NEAT",
    "DefaultGenome",
    "DefaultSpeciesSet",
    "DefaultStagnation",
    "DefaultReproduction",
];

pub(crate) fn apply<S: IniSection>(
    target: &mut S,
    section: &str,
    props: &ini::Properties,
) -> Result<(), ConfigError> {
    for (key, value) in props.iter() {
        match target.set(key, value) {
            None => {
                return Err(ConfigError::UnknownKey { section: section.into(), key: key.into() })
            }
            Some(Err(msg)) => {
                return Err(ConfigError::BadValue { section: section.into(), key: key.into(), msg })
            }
            Some(Ok(())) => {}
        }
    }
    Ok(())
}

pub(crate) fn write_section<S: IniSection>(out: &mut String, name: &str, section: &S) {
    let _ = writeln!(out, "[{name}]");
    for (key, value) in section.entries() {
        let _ = writeln!(out, "{key} = {value}");
    }
    out.push('\n');
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let doc = Ini::load_from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
        let mut cfg = ExperimentConfig::default();
        let mut seeds_given = false;
        for (section, props) in doc.iter() {
            let Some(name) = section else {
                if let Some((key, _)) = props.iter().next() {
                    return Err(ConfigError::UnknownKey { section: String::new(), key: key.into() });
                }
                continue;
            };
            match name {
                "run" => {
                    seeds_given |= props.contains_key("seeds");
                    apply(&mut cfg.run, name, props)?
                }
                "fitness" => apply(&mut cfg.fitness, name, props)?,
                "constraints" => apply(&mut cfg.constraints, name, props)?,
                "GA" => apply(&mut cfg.ga, name, props)?,
                _ if !cfg.neat.apply_section(name, props)? => {
                    return Err(ConfigError::UnknownSection(name.into()))
                }
                _ => {}
            }
        }
        if !seeds_given {
            cfg.run.seeds = (1..=cfg.run.repeats as u64).collect();
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: String| Err(ConfigError::Invalid(m));
        let run = &self.run;
        if run.repeats < 1 {
            return invalid("repeats must be at least 1".into());
        }
        if run.seeds.len() != run.repeats {
            return invalid(format!("{} seeds given for {} repeats", run.seeds.len(), run.repeats));
        }
        let mut sorted = run.seeds.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return invalid("seeds must be pairwise distinct".into());
        }
        if run.wall_clock_budget.is_some_and(|b| b < 0.0) {
            return invalid("wall_clock_budget must be non-negative".into());
        }
        if run.ne_move_budget < 1 || run.ne_moves_to_check < 1 {
            return invalid("ne_move_budget and ne_moves_to_check must be at least 1".into());
        }
        if run.window_width < 1 || run.window_height < 1 {
            return invalid("observation window must be at least 1x1".into());
        }
        self.fitness.validate().map_err(ConfigError::Invalid)?;
        self.ga.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.neat.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(())
    }

    /// The effective config as INI text; parsing it back gives an equal value.
    pub fn to_ini(&self) -> String {
        let mut out = String::new();
        write_section(&mut out, "run", &self.run);
        write_section(&mut out, "fitness", &self.fitness);
        write_section(&mut out, "constraints", &self.constraints);
        write_section(&mut out, "GA", &self.ga);
        self.neat.write_sections(&mut out);
        out
    }

    /// Shifts every fold seed by `offset`.
    pub fn offset_seeds(&mut self, offset: u64) {
        for seed in &mut self.run.seeds {
            *seed = seed.wrapping_add(offset);
        }
    }
}
