use super::config::{GenomeConfig, NeatConfig};
use super::genome::Genome;

#[derive(Debug, Clone)]
pub struct Species {
    pub id: u64,
    pub representative: Genome,
    /// Indices into the population last passed to [`SpeciesSet::speciate`].
    pub members: Vec<usize>,
    pub best_fitness_ever: f64,
    pub last_improved: usize,
}

impl Species {
    pub fn generations_since_improvement(&self, generation: usize) -> usize {
        generation.saturating_sub(self.last_improved)
    }
}

/// Species in creation order.
#[derive(Debug, Clone, Default)]
pub struct SpeciesSet {
    pub species: Vec<Species>,
    next_id: u64,
}

impl SpeciesSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.species.len()
    }

    pub fn is_empty(&self) -> bool {
        self.species.is_empty()
    }

    /// Assigns each genome to the first species whose representative lies
    /// strictly within the compatibility threshold, founding a new species
    /// otherwise. Empty species are dropped and surviving species take the
    /// member closest to their old representative as the new one.
    pub fn speciate(&mut self, population: &[Genome], generation: usize, config: &NeatConfig) {
        let threshold = config.species_set.compatibility_threshold;
        let genome_cfg: &GenomeConfig = &config.genome;
        for s in &mut self.species {
            s.members.clear();
        }
        for (index, genome) in population.iter().enumerate() {
            let home = self
                .species
                .iter()
                .position(|s| genome.distance(&s.representative, genome_cfg) < threshold);
            match home {
                Some(k) => self.species[k].members.push(index),
                None => {
                    self.species.push(Species {
                        id: self.next_id,
                        representative: genome.clone(),
                        members: vec![index],
                        best_fitness_ever: f64::NEG_INFINITY,
                        last_improved: generation,
                    });
                    self.next_id += 1;
                }
            }
        }
        self.species.retain(|s| !s.members.is_empty());
        for s in &mut self.species {
            let old = &s.representative;
            let closest = s
                .members
                .iter()
                .copied()
                .map(|i| (i, population[i].distance(old, genome_cfg)))
                .fold(None, |best: Option<(usize, f64)>, (i, d)| match best {
                    Some((_, bd)) if bd <= d => best,
                    _ => Some((i, d)),
                })
                .expect("non-empty species")
                .0;
            s.representative = population[closest].clone();
        }
    }
}
