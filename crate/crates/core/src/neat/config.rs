use std::fmt::Write as _;

use crate::config::{apply, write_section, ConfigError, IniValue};

use super::NeatError;

/// Node transfer functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Activation {
    Sigmoid,
    Gauss,
    Tanh,
    Relu,
    Identity,
}

impl Activation {
    pub fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Sigmoid => 1.0 / (1.0 + (-z.clamp(-60.0, 60.0)).exp()),
            Activation::Gauss => {
                let z = z.clamp(-3.4, 3.4);
                (-5.0 * z * z).exp()
            }
            Activation::Tanh => z.tanh(),
            Activation::Relu => z.max(0.0),
            Activation::Identity => z,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Activation::Sigmoid => "sigmoid",
            Activation::Gauss => "gauss",
            Activation::Tanh => "tanh",
            Activation::Relu => "relu",
            Activation::Identity => "identity",
        }
    }
}

impl IniValue for Activation {
    fn parse_ini(text: &str) -> Result<Self, String> {
        match text.trim() {
            "sigmoid" => Ok(Activation::Sigmoid),
            "gauss" => Ok(Activation::Gauss),
            "tanh" => Ok(Activation::Tanh),
            "relu" => Ok(Activation::Relu),
            "identity" => Ok(Activation::Identity),
            other => Err(format!("unknown activation {other:?}")),
        }
    }
    fn to_ini(&self) -> String {
        self.name().into()
    }
}

/// How incoming weighted values are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Aggregation {
    Sum,
    Product,
    Max,
    Min,
    Mean,
}

impl Aggregation {
    pub fn apply(self, values: impl Iterator<Item = f64>) -> f64 {
        match self {
            Aggregation::Sum => values.sum(),
            Aggregation::Product => values.product(),
            Aggregation::Max => values.fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v)))).unwrap_or(0.0),
            Aggregation::Min => values.fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.min(v)))).unwrap_or(0.0),
            Aggregation::Mean => {
                let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
                if n == 0 { 0.0 } else { sum / n as f64 }
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Aggregation::Sum => "sum",
            Aggregation::Product => "product",
            Aggregation::Max => "max",
            Aggregation::Min => "min",
            Aggregation::Mean => "mean",
        }
    }
}

impl IniValue for Aggregation {
    fn parse_ini(text: &str) -> Result<Self, String> {
        match text.trim() {
            "sum" => Ok(Aggregation::Sum),
            "product" => Ok(Aggregation::Product),
            "max" => Ok(Aggregation::Max),
            "min" => Ok(Aggregation::Min),
            "mean" => Ok(Aggregation::Mean),
            other => Err(format!("unknown aggregation {other:?}")),
        }
    }
    fn to_ini(&self) -> String {
        self.name().into()
    }
}

/// A default that is either fixed or drawn uniformly from the options.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Choice<T> {
    Random,
    Fixed(T),
}

impl<T: IniValue> IniValue for Choice<T> {
    fn parse_ini(text: &str) -> Result<Self, String> {
        if text.trim() == "random" {
            Ok(Choice::Random)
        } else {
            T::parse_ini(text).map(Choice::Fixed)
        }
    }
    fn to_ini(&self) -> String {
        match self {
            Choice::Random => "random".into(),
            Choice::Fixed(v) => v.to_ini(),
        }
    }
}

/// Reduction of a set of fitness values to one number.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    Max,
    Min,
    Mean,
}

impl Criterion {
    pub fn reduce(self, values: &[f64]) -> f64 {
        match self {
            Criterion::Max => values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            Criterion::Min => values.iter().copied().fold(f64::INFINITY, f64::min),
            Criterion::Mean => values.iter().sum::<f64>() / values.len().max(1) as f64,
        }
    }
}

impl IniValue for Criterion {
    fn parse_ini(text: &str) -> Result<Self, String> {
        match text.trim() {
            "max" => Ok(Criterion::Max),
            "min" => Ok(Criterion::Min),
            "mean" => Ok(Criterion::Mean),
            other => Err(format!("unknown criterion {other:?}")),
        }
    }
    fn to_ini(&self) -> String {
        match self {
            Criterion::Max => "max",
            Criterion::Min => "min",
            Criterion::Mean => "mean",
        }
        .into()
    }
}

/// Which connections a fresh genome may start with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialConnection {
    Unconnected,
    /// Inputs to hidden and hidden to outputs; inputs to outputs when there
    /// are no hidden nodes.
    Full,
    FullDirect,
    /// Like `Full`, keeping each connection with the given probability.
    Partial(f64),
    PartialDirect(f64),
}

impl IniValue for InitialConnection {
    fn parse_ini(text: &str) -> Result<Self, String> {
        let mut parts = text.split_whitespace();
        let kind = parts.next().unwrap_or("");
        let prob = || -> Result<f64, String> {
            let p = text
                .split_whitespace()
                .nth(1)
                .ok_or_else(|| format!("{kind} needs a probability"))
                .and_then(f64::parse_ini)?;
            if (0.0..=1.0).contains(&p) {
                Ok(p)
            } else {
                Err(format!("connection probability {p} outside [0, 1]"))
            }
        };
        let value = match kind {
            "unconnected" => InitialConnection::Unconnected,
            "full" | "full_nodirect" => InitialConnection::Full,
            "full_direct" => InitialConnection::FullDirect,
            "partial" | "partial_nodirect" => InitialConnection::Partial(prob()?),
            "partial_direct" => InitialConnection::PartialDirect(prob()?),
            _ => return Err(format!("unknown initial_connection {text:?}")),
        };
        let expected = if matches!(value, InitialConnection::Partial(_) | InitialConnection::PartialDirect(_)) { 2 } else { 1 };
        if text.split_whitespace().count() != expected {
            return Err(format!("malformed initial_connection {text:?}"));
        }
        Ok(value)
    }
    fn to_ini(&self) -> String {
        match self {
            InitialConnection::Unconnected => "unconnected".into(),
            InitialConnection::Full => "full".into(),
            InitialConnection::FullDirect => "full_direct".into(),
            InitialConnection::Partial(p) => format!("partial {}", p.to_ini()),
            InitialConnection::PartialDirect(p) => format!("partial_direct {}", p.to_ini()),
        }
    }
}

/// `[NEAT]`
#[derive(Debug, Clone, PartialEq)]
pub struct NeatSection {
    pub fitness_criterion: Criterion,
    pub fitness_threshold: f64,
    pub pop_size: usize,
    pub reset_on_extinction: bool,
}

ini_section!(NeatSection { fitness_criterion, fitness_threshold, pop_size, reset_on_extinction });

/// `[DefaultGenome]`
#[derive(Debug, Clone, PartialEq)]
pub struct GenomeConfig {
    pub activation_default: Choice<Activation>,
    pub activation_mutate_rate: f64,
    pub activation_options: Vec<Activation>,
    pub aggregation_default: Choice<Aggregation>,
    pub aggregation_mutate_rate: f64,
    pub aggregation_options: Vec<Aggregation>,
    pub bias_init_mean: f64,
    pub bias_init_stdev: f64,
    pub bias_max_value: f64,
    pub bias_min_value: f64,
    pub bias_mutate_power: f64,
    pub bias_mutate_rate: f64,
    pub bias_replace_rate: f64,
    pub compatibility_disjoint_coefficient: f64,
    pub compatibility_weight_coefficient: f64,
    pub conn_add_prob: f64,
    pub conn_delete_prob: f64,
    pub enabled_default: bool,
    pub enabled_mutate_rate: f64,
    pub feed_forward: bool,
    pub initial_connection: InitialConnection,
    pub node_add_prob: f64,
    pub node_delete_prob: f64,
    pub num_hidden: usize,
    pub num_inputs: usize,
    pub num_outputs: usize,
    pub response_init_mean: f64,
    pub response_init_stdev: f64,
    pub response_max_value: f64,
    pub response_min_value: f64,
    pub response_mutate_power: f64,
    pub response_mutate_rate: f64,
    pub response_replace_rate: f64,
    pub weight_init_mean: f64,
    pub weight_init_stdev: f64,
    pub weight_max_value: f64,
    pub weight_min_value: f64,
    pub weight_mutate_power: f64,
    pub weight_mutate_rate: f64,
    pub weight_replace_rate: f64,
}

ini_section!(GenomeConfig {
    activation_default,
    activation_mutate_rate,
    activation_options,
    aggregation_default,
    aggregation_mutate_rate,
    aggregation_options,
    bias_init_mean,
    bias_init_stdev,
    bias_max_value,
    bias_min_value,
    bias_mutate_power,
    bias_mutate_rate,
    bias_replace_rate,
    compatibility_disjoint_coefficient,
    compatibility_weight_coefficient,
    conn_add_prob,
    conn_delete_prob,
    enabled_default,
    enabled_mutate_rate,
    feed_forward,
    initial_connection,
    node_add_prob,
    node_delete_prob,
    num_hidden,
    num_inputs,
    num_outputs,
    response_init_mean,
    response_init_stdev,
    response_max_value,
    response_min_value,
    response_mutate_power,
    response_mutate_rate,
    response_replace_rate,
    weight_init_mean,
    weight_init_stdev,
    weight_max_value,
    weight_min_value,
    weight_mutate_power,
    weight_mutate_rate,
    weight_replace_rate,
});

/// `[DefaultSpeciesSet]`
#[derive(Debug, Clone, PartialEq)]
pub struct SpeciesSetConfig {
    pub compatibility_threshold: f64,
}

ini_section!(SpeciesSetConfig { compatibility_threshold });

/// `[DefaultStagnation]`
#[derive(Debug, Clone, PartialEq)]
pub struct StagnationConfig {
    pub species_fitness_func: Criterion,
    pub max_stagnation: usize,
    pub species_elitism: usize,
}

ini_section!(StagnationConfig { species_fitness_func, max_stagnation, species_elitism });

/// `[DefaultReproduction]`
#[derive(Debug, Clone, PartialEq)]
pub struct ReproductionConfig {
    pub elitism: usize,
    pub survival_threshold: f64,
}

ini_section!(ReproductionConfig { elitism, survival_threshold });

/// All five NEAT sections. Defaults follow the reference configuration,
/// except `num_inputs`, which matches the default 8x8 observation (68).
#[derive(Debug, Clone, PartialEq)]
pub struct NeatConfig {
    pub neat: NeatSection,
    pub genome: GenomeConfig,
    pub species_set: SpeciesSetConfig,
    pub stagnation: StagnationConfig,
    pub reproduction: ReproductionConfig,
}

impl Default for NeatConfig {
    fn default() -> Self {
        NeatConfig {
            neat: NeatSection {
                fitness_criterion: Criterion::Max,
                fitness_threshold: 500_000.0,
                pop_size: 150,
                reset_on_extinction: true,
            },
            genome: GenomeConfig {
                activation_default: Choice::Fixed(Activation::Sigmoid),
                activation_mutate_rate: 0.05,
                activation_options: vec![Activation::Sigmoid, Activation::Gauss],
                aggregation_default: Choice::Random,
                aggregation_mutate_rate: 0.05,
                aggregation_options: vec![Aggregation::Sum],
                bias_init_mean: 0.05,
                bias_init_stdev: 1.0,
                bias_max_value: 30.0,
                bias_min_value: -30.0,
                bias_mutate_power: 0.5,
                bias_mutate_rate: 0.7,
                bias_replace_rate: 0.1,
                compatibility_disjoint_coefficient: 1.0,
                compatibility_weight_coefficient: 0.5,
                conn_add_prob: 0.5,
                conn_delete_prob: 0.5,
                enabled_default: true,
                enabled_mutate_rate: 0.5,
                feed_forward: false,
                initial_connection: InitialConnection::Partial(0.5),
                node_add_prob: 0.5,
                node_delete_prob: 0.2,
                num_hidden: 0,
                num_inputs: 68,
                num_outputs: 7,
                response_init_mean: 1.0,
                response_init_stdev: 0.05,
                response_max_value: 30.0,
                response_min_value: -30.0,
                response_mutate_power: 0.1,
                response_mutate_rate: 0.75,
                response_replace_rate: 0.1,
                weight_init_mean: 0.1,
                weight_init_stdev: 1.0,
                weight_max_value: 30.0,
                weight_min_value: -30.0,
                weight_mutate_power: 0.5,
                weight_mutate_rate: 0.8,
                weight_replace_rate: 0.1,
            },
            species_set: SpeciesSetConfig { compatibility_threshold: 2.5 },
            stagnation: StagnationConfig {
                species_fitness_func: Criterion::Max,
                max_stagnation: 50,
                species_elitism: 2,
            },
            reproduction: ReproductionConfig { elitism: 3, survival_threshold: 0.3 },
        }
    }
}

impl NeatConfig {
    /// Applies one INI section; `Ok(false)` when the name is not a NEAT section.
    pub fn apply_section(&mut self, name: &str, props: &ini::Properties) -> Result<bool, ConfigError> {
        match name {
            "NEAT" => apply(&mut self.neat, name, props)?,
            "DefaultGenome" => apply(&mut self.genome, name, props)?,
            "DefaultSpeciesSet" => apply(&mut self.species_set, name, props)?,
            "DefaultStagnation" => apply(&mut self.stagnation, name, props)?,
            "DefaultReproduction" => apply(&mut self.reproduction, name, props)?,
            _ => return Ok(false),
        }
        Ok(true)
    }

    pub fn write_sections(&self, out: &mut String) {
        write_section(out, "NEAT", &self.neat);
        write_section(out, "DefaultGenome", &self.genome);
        write_section(out, "DefaultSpeciesSet", &self.species_set);
        write_section(out, "DefaultStagnation", &self.stagnation);
        write_section(out, "DefaultReproduction", &self.reproduction);
    }

    /// Parses a file holding only NEAT sections.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let doc = ini::Ini::load_from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
        let mut cfg = NeatConfig::default();
        for (section, props) in doc.iter() {
            match section {
                Some(name) => {
                    if !cfg.apply_section(name, props)? {
                        return Err(ConfigError::UnknownSection(name.into()));
                    }
                }
                None => {
                    if let Some((key, _)) = props.iter().next() {
                        return Err(ConfigError::UnknownKey { section: String::new(), key: key.into() });
                    }
                }
            }
        }
        cfg.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(cfg)
    }

    pub fn to_ini(&self) -> String {
        let mut out = String::new();
        self.write_sections(&mut out);
        out
    }

    pub fn validate(&self) -> Result<(), NeatError> {
        let g = &self.genome;
        let mut problems = String::new();
        let probabilities = [
            ("activation_mutate_rate", g.activation_mutate_rate),
            ("aggregation_mutate_rate", g.aggregation_mutate_rate),
            ("bias_mutate_rate", g.bias_mutate_rate),
            ("bias_replace_rate", g.bias_replace_rate),
            ("conn_add_prob", g.conn_add_prob),
            ("conn_delete_prob", g.conn_delete_prob),
            ("enabled_mutate_rate", g.enabled_mutate_rate),
            ("node_add_prob", g.node_add_prob),
            ("node_delete_prob", g.node_delete_prob),
            ("response_mutate_rate", g.response_mutate_rate),
            ("response_replace_rate", g.response_replace_rate),
            ("weight_mutate_rate", g.weight_mutate_rate),
            ("weight_replace_rate", g.weight_replace_rate),
            ("survival_threshold", self.reproduction.survival_threshold),
        ];
        for (name, p) in probabilities {
            if !(0.0..=1.0).contains(&p) {
                let _ = write!(problems, "{name} = {p} is not a probability; ");
            }
        }
        let ranges = [
            ("bias", g.bias_min_value, g.bias_max_value),
            ("response", g.response_min_value, g.response_max_value),
            ("weight", g.weight_min_value, g.weight_max_value),
        ];
        for (name, lo, hi) in ranges {
            if lo.is_nan() || hi.is_nan() || lo > hi {
                let _ = write!(problems, "{name}_min_value exceeds {name}_max_value; ");
            }
        }
        let stdevs = [g.bias_init_stdev, g.response_init_stdev, g.weight_init_stdev];
        let powers = [g.bias_mutate_power, g.response_mutate_power, g.weight_mutate_power];
        if stdevs.iter().chain(&powers).any(|s| !s.is_finite() || *s < 0.0) {
            problems.push_str("standard deviations and mutate powers must be finite and >= 0; ");
        }
        if self.neat.pop_size < 2 {
            problems.push_str("pop_size must be at least 2; ");
        }
        if g.num_inputs < 1 || g.num_outputs < 1 {
            problems.push_str("num_inputs and num_outputs must be at least 1; ");
        }
        if g.activation_options.is_empty() || g.aggregation_options.is_empty() {
            problems.push_str("activation_options and aggregation_options must not be empty; ");
        }
        if let Choice::Fixed(a) = g.activation_default {
            if !g.activation_options.contains(&a) {
                problems.push_str("activation_default is not among activation_options; ");
            }
        }
        if let Choice::Fixed(a) = g.aggregation_default {
            if !g.aggregation_options.contains(&a) {
                problems.push_str("aggregation_default is not among aggregation_options; ");
            }
        }
        if self.species_set.compatibility_threshold.is_nan() {
            problems.push_str("compatibility_threshold must be a number; ");
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(NeatError::InvalidConfig(problems.trim_end_matches("; ").to_string()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn activations_at_known_points() {
        assert_eq!(Activation::Sigmoid.apply(0.0), 0.5);
        assert_eq!(Activation::Gauss.apply(0.0), 1.0);
        assert_eq!(Activation::Gauss.apply(10.0), Activation::Gauss.apply(3.4));
        assert!((Activation::Gauss.apply(1.0) - (-5.0f64).exp()).abs() < 1e-15);
        assert!(Activation::Sigmoid.apply(1e6).is_finite());
    }

    #[test]
    fn aggregations() {
        let v = [1.0, -2.0, 4.0];
        assert_eq!(Aggregation::Sum.apply(v.iter().copied()), 3.0);
        assert_eq!(Aggregation::Product.apply(v.iter().copied()), -8.0);
        assert_eq!(Aggregation::Max.apply(v.iter().copied()), 4.0);
        assert_eq!(Aggregation::Min.apply(v.iter().copied()), -2.0);
        assert_eq!(Aggregation::Mean.apply(v.iter().copied()), 1.0);
        assert_eq!(Aggregation::Max.apply(std::iter::empty()), 0.0);
    }

    #[test]
    fn initial_connection_text() {
        assert_eq!(InitialConnection::parse_ini("partial 0.5"), Ok(InitialConnection::Partial(0.5)));
        assert_eq!(InitialConnection::parse_ini("full"), Ok(InitialConnection::Full));
        assert!(InitialConnection::parse_ini("partial").is_err());
        assert!(InitialConnection::parse_ini("partial 2").is_err());
        assert!(InitialConnection::parse_ini("full 0.5").is_err());
        let p = InitialConnection::PartialDirect(0.25);
        assert_eq!(InitialConnection::parse_ini(&p.to_ini()), Ok(p));
    }

    #[test]
    fn default_round_trips() {
        let cfg = NeatConfig::default();
        assert!(cfg.validate().is_ok());
        assert_eq!(NeatConfig::parse(&cfg.to_ini()).unwrap(), cfg);
    }

    #[test]
    fn invalid_probability_rejected() {
        let mut cfg = NeatConfig::default();
        cfg.genome.conn_add_prob = 1.5;
        let err = cfg.validate().unwrap_err().to_string();
        assert!(err.contains("conn_add_prob"), "{err}");
    }
}
