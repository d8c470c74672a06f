//! Neuroevolution of augmenting topologies.
//!
//! Genomes carry node and connection genes; connections get innovation
//! numbers from a run-wide [`InnovationRegistry`] so that crossover can align
//! genes. Genomes are grouped into species by compatibility distance, stagnant
//! species are culled and each surviving species breeds a share of the next
//! population proportional to its adjusted fitness. Networks are evaluated as
//! recurrent nets with node state persisting across the steps of an episode.

mod config;
mod genome;
mod innovation;
mod network;
mod reproduction;
mod run;
mod species;

use thiserror::Error;

pub use config::{
    Activation, Aggregation, Choice, Criterion, GenomeConfig, InitialConnection, NeatConfig,
    NeatSection, ReproductionConfig, SpeciesSetConfig, StagnationConfig,
};
pub use genome::{ConnectionGene, Genome, NodeGene, NodeId, NodeKind};
pub use innovation::InnovationRegistry;
pub use network::{decode, Network};
pub use reproduction::{apportion, pool_size, remove_stagnant, reproduce, Offspring};
pub use run::{evaluate_genome, run_neat, NeatRun, NeatSettings};
pub use species::{Species, SpeciesSet};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NeatError {
    #[error("invalid NEAT config: {0}")]
    InvalidConfig(String),
    #[error("num_inputs is {configured} but the observation has {observation} values")]
    InputMismatch { configured: usize, observation: usize },
    #[error("network expects {expected} inputs, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("every species went extinct and reset_on_extinction is off")]
    Extinction,
}
