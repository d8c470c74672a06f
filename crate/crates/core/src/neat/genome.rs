use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::config::{Activation, Aggregation, Choice, GenomeConfig, InitialConnection};
use super::innovation::InnovationRegistry;
use crate::fitness::EpisodeSummary;

/// Inputs are `-1..=-num_inputs`, outputs `0..num_outputs`, hidden nodes above.
pub type NodeId = i64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Input,
    Hidden,
    Output,
}

/// Input nodes pass their value through; their bias, response and
/// activation are ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeGene {
    pub id: NodeId,
    pub kind: NodeKind,
    pub activation: Activation,
    pub aggregation: Aggregation,
    pub bias: f64,
    pub response: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionGene {
    pub in_node: NodeId,
    pub out_node: NodeId,
    pub weight: f64,
    pub enabled: bool,
    pub innovation: u64,
}

/// Node and connection genes. Connections are keyed by `(in, out)`, which the
/// registry maps one-to-one onto innovation numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct Genome {
    pub key: u64,
    pub nodes: BTreeMap<NodeId, NodeGene>,
    pub connections: BTreeMap<(NodeId, NodeId), ConnectionGene>,
    pub fitness: Option<f64>,
    pub summary: Option<EpisodeSummary>,
}

fn gaussian<R: Rng + ?Sized>(mean: f64, stdev: f64, rng: &mut R) -> f64 {
    Normal::new(mean, stdev).expect("validated standard deviation").sample(rng)
}

fn pick<T: Copy, R: Rng + ?Sized>(options: &[T], rng: &mut R) -> T {
    options[rng.gen_range(0..options.len())]
}

fn choose<T: Copy, R: Rng + ?Sized>(default: Choice<T>, options: &[T], rng: &mut R) -> T {
    match default {
        Choice::Fixed(v) => v,
        Choice::Random => pick(options, rng),
    }
}

/// Init, perturbation and clamping rules of one real-valued attribute.
struct Attribute {
    init_mean: f64,
    init_stdev: f64,
    min: f64,
    max: f64,
    mutate_power: f64,
    mutate_rate: f64,
    replace_rate: f64,
}

impl Attribute {
    fn weight(c: &GenomeConfig) -> Self {
        Attribute {
            init_mean: c.weight_init_mean,
            init_stdev: c.weight_init_stdev,
            min: c.weight_min_value,
            max: c.weight_max_value,
            mutate_power: c.weight_mutate_power,
            mutate_rate: c.weight_mutate_rate,
            replace_rate: c.weight_replace_rate,
        }
    }

    fn bias(c: &GenomeConfig) -> Self {
        Attribute {
            init_mean: c.bias_init_mean,
            init_stdev: c.bias_init_stdev,
            min: c.bias_min_value,
            max: c.bias_max_value,
            mutate_power: c.bias_mutate_power,
            mutate_rate: c.bias_mutate_rate,
            replace_rate: c.bias_replace_rate,
        }
    }

    fn response(c: &GenomeConfig) -> Self {
        Attribute {
            init_mean: c.response_init_mean,
            init_stdev: c.response_init_stdev,
            min: c.response_min_value,
            max: c.response_max_value,
            mutate_power: c.response_mutate_power,
            mutate_rate: c.response_mutate_rate,
            replace_rate: c.response_replace_rate,
        }
    }

    fn init<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        gaussian(self.init_mean, self.init_stdev, rng).clamp(self.min, self.max)
    }

    /// Returns whether the value changed.
    fn mutate<R: Rng + ?Sized>(&self, value: &mut f64, rng: &mut R) -> bool {
        let r: f64 = rng.gen();
        if r < self.mutate_rate {
            *value = (*value + gaussian(0.0, self.mutate_power, rng)).clamp(self.min, self.max);
            true
        } else if r < self.mutate_rate + self.replace_rate {
            *value = self.init(rng);
            true
        } else {
            false
        }
    }

    fn contains(&self, v: f64) -> bool {
        (self.min..=self.max).contains(&v)
    }
}

impl NodeGene {
    fn input(id: NodeId) -> Self {
        NodeGene {
            id,
            kind: NodeKind::Input,
            activation: Activation::Identity,
            aggregation: Aggregation::Sum,
            bias: 0.0,
            response: 1.0,
        }
    }

    fn new<R: Rng + ?Sized>(id: NodeId, kind: NodeKind, config: &GenomeConfig, rng: &mut R) -> Self {
        NodeGene {
            id,
            kind,
            activation: choose(config.activation_default, &config.activation_options, rng),
            aggregation: choose(config.aggregation_default, &config.aggregation_options, rng),
            bias: Attribute::bias(config).init(rng),
            response: Attribute::response(config).init(rng),
        }
    }
}

impl Genome {
    /// A genome with only the given node genes and no connections.
    pub fn bare(key: u64, nodes: impl IntoIterator<Item = NodeGene>) -> Self {
        Genome {
            key,
            nodes: nodes.into_iter().map(|n| (n.id, n)).collect(),
            connections: BTreeMap::new(),
            fitness: None,
            summary: None,
        }
    }

    /// A fresh random genome per `initial_connection`.
    pub fn initial<R: Rng + ?Sized>(
        key: u64,
        config: &GenomeConfig,
        registry: &mut InnovationRegistry,
        rng: &mut R,
    ) -> Self {
        let inputs: Vec<NodeId> = (1..=config.num_inputs as NodeId).map(|i| -i).collect();
        let outputs: Vec<NodeId> = (0..config.num_outputs as NodeId).collect();
        let hidden: Vec<NodeId> = (0..config.num_hidden as NodeId)
            .map(|i| config.num_outputs as NodeId + i)
            .collect();
        let mut genome = Genome::bare(key, inputs.iter().map(|&id| NodeGene::input(id)));
        for &id in &outputs {
            genome.nodes.insert(id, NodeGene::new(id, NodeKind::Output, config, rng));
        }
        for &id in &hidden {
            genome.nodes.insert(id, NodeGene::new(id, NodeKind::Hidden, config, rng));
        }

        let (direct, prob) = match config.initial_connection {
            InitialConnection::Unconnected => return genome,
            InitialConnection::Full => (false, 1.0),
            InitialConnection::FullDirect => (true, 1.0),
            InitialConnection::Partial(p) => (false, p),
            InitialConnection::PartialDirect(p) => (true, p),
        };
        let mut pairs = Vec::new();
        for &h in &hidden {
            pairs.extend(inputs.iter().map(|&i| (i, h)));
            pairs.extend(outputs.iter().map(|&o| (h, o)));
        }
        if direct || hidden.is_empty() {
            for &i in &inputs {
                pairs.extend(outputs.iter().map(|&o| (i, o)));
            }
        }
        let weight = Attribute::weight(config);
        for (i, o) in pairs {
            if rng.gen::<f64>() < prob {
                let gene = ConnectionGene {
                    in_node: i,
                    out_node: o,
                    weight: weight.init(rng),
                    enabled: config.enabled_default,
                    innovation: registry.connection(i, o),
                };
                genome.connections.insert((i, o), gene);
            }
        }
        genome
    }

    pub fn score(&self) -> f64 {
        self.fitness.unwrap_or(f64::NEG_INFINITY)
    }

    pub fn hidden_count(&self) -> usize {
        self.nodes.values().filter(|n| n.kind == NodeKind::Hidden).count()
    }

    /// Genes that take part in distance and size measures (inputs excluded).
    fn gene_count(&self) -> usize {
        self.nodes.values().filter(|n| n.kind != NodeKind::Input).count() + self.connections.len()
    }

    /// Whether `from -> to` can be reached through enabled or disabled edges.
    fn reaches(&self, from: NodeId, to: NodeId) -> bool {
        let mut seen = BTreeSet::new();
        let mut stack = vec![from];
        while let Some(n) = stack.pop() {
            if n == to {
                return true;
            }
            if seen.insert(n) {
                stack.extend(self.connections.keys().filter(|(i, _)| *i == n).map(|(_, o)| *o));
            }
        }
        false
    }

    /// Applies the structural then parametric mutations once. Returns the
    /// number of genes changed or added/removed.
    pub fn mutate<R: Rng + ?Sized>(
        &mut self,
        config: &GenomeConfig,
        registry: &mut InnovationRegistry,
        rng: &mut R,
    ) -> usize {
        let mut changes = 0;
        if rng.gen::<f64>() < config.conn_add_prob && self.add_connection(config, registry, rng) {
            changes += 1;
        }
        if rng.gen::<f64>() < config.conn_delete_prob && !self.connections.is_empty() {
            let key = *self.connections.keys().nth(rng.gen_range(0..self.connections.len())).unwrap();
            self.connections.remove(&key);
            changes += 1;
        }
        if rng.gen::<f64>() < config.node_add_prob && self.add_node(config, registry, rng) {
            changes += 1;
        }
        if rng.gen::<f64>() < config.node_delete_prob {
            let hidden: Vec<NodeId> =
                self.nodes.values().filter(|n| n.kind == NodeKind::Hidden).map(|n| n.id).collect();
            if !hidden.is_empty() {
                let id = pick(&hidden, rng);
                self.nodes.remove(&id);
                self.connections.retain(|&(i, o), _| i != id && o != id);
                changes += 1;
            }
        }

        let weight = Attribute::weight(config);
        for gene in self.connections.values_mut() {
            changes += usize::from(weight.mutate(&mut gene.weight, rng));
        }
        let (bias, response) = (Attribute::bias(config), Attribute::response(config));
        for node in self.nodes.values_mut().filter(|n| n.kind != NodeKind::Input) {
            changes += usize::from(bias.mutate(&mut node.bias, rng));
            changes += usize::from(response.mutate(&mut node.response, rng));
            if rng.gen::<f64>() < config.activation_mutate_rate {
                node.activation = pick(&config.activation_options, rng);
                changes += 1;
            }
            if rng.gen::<f64>() < config.aggregation_mutate_rate {
                node.aggregation = pick(&config.aggregation_options, rng);
                changes += 1;
            }
        }
        for gene in self.connections.values_mut() {
            if rng.gen::<f64>() < config.enabled_mutate_rate {
                gene.enabled = !gene.enabled;
                changes += 1;
            }
        }
        if changes > 0 {
            self.fitness = None;
            self.summary = None;
        }
        changes
    }

    fn add_connection<R: Rng + ?Sized>(
        &mut self,
        config: &GenomeConfig,
        registry: &mut InnovationRegistry,
        rng: &mut R,
    ) -> bool {
        let targets: Vec<NodeId> =
            self.nodes.values().filter(|n| n.kind != NodeKind::Input).map(|n| n.id).collect();
        let mut candidates = Vec::new();
        for &i in self.nodes.keys() {
            for &o in &targets {
                if self.connections.contains_key(&(i, o)) {
                    continue;
                }
                if config.feed_forward && (i == o || self.reaches(o, i)) {
                    continue;
                }
                candidates.push((i, o));
            }
        }
        if candidates.is_empty() {
            return false;
        }
        let (i, o) = pick(&candidates, rng);
        let gene = ConnectionGene {
            in_node: i,
            out_node: o,
            weight: Attribute::weight(config).init(rng),
            enabled: true,
            innovation: registry.connection(i, o),
        };
        self.connections.insert((i, o), gene);
        true
    }

    fn add_node<R: Rng + ?Sized>(
        &mut self,
        config: &GenomeConfig,
        registry: &mut InnovationRegistry,
        rng: &mut R,
    ) -> bool {
        let enabled: Vec<(NodeId, NodeId)> =
            self.connections.values().filter(|c| c.enabled).map(|c| (c.in_node, c.out_node)).collect();
        if enabled.is_empty() {
            return false;
        }
        let (i, o) = pick(&enabled, rng);
        let mut id = registry.split_node(i, o);
        if self.nodes.contains_key(&id) {
            id = registry.fresh_node();
        }
        let old = self.connections.get_mut(&(i, o)).expect("chosen connection exists");
        old.enabled = false;
        let old_weight = old.weight;
        self.nodes.insert(id, NodeGene::new(id, NodeKind::Hidden, config, rng));
        for (a, b, w) in [(i, id, 1.0), (id, o, old_weight)] {
            let gene = ConnectionGene {
                in_node: a,
                out_node: b,
                weight: w,
                enabled: true,
                innovation: registry.connection(a, b),
            };
            self.connections.insert((a, b), gene);
        }
        true
    }

    /// Child of two evaluated parents. The fitter parent (lower key on a tie)
    /// contributes all disjoint and excess genes; matching genes come from
    /// either parent with equal probability.
    pub fn crossover<R: Rng + ?Sized>(a: &Genome, b: &Genome, key: u64, rng: &mut R) -> Genome {
        let a_first = a.score() > b.score() || (a.score() == b.score() && a.key <= b.key);
        let (fit, other) = if a_first { (a, b) } else { (b, a) };

        let mut child = Genome::bare(key, []);
        for (id, node) in &fit.nodes {
            let gene = match other.nodes.get(id) {
                Some(o) if node.kind != NodeKind::Input && rng.gen_bool(0.5) => o.clone(),
                _ => node.clone(),
            };
            child.nodes.insert(*id, gene);
        }
        for (pair, conn) in &fit.connections {
            let mut gene = match other.connections.get(pair) {
                Some(o) => {
                    let mut g = if rng.gen_bool(0.5) { conn.clone() } else { o.clone() };
                    if !conn.enabled || !o.enabled {
                        g.enabled = !rng.gen_bool(0.5);
                    }
                    g
                }
                None => {
                    let mut g = conn.clone();
                    if !conn.enabled {
                        g.enabled = !rng.gen_bool(0.5);
                    }
                    g
                }
            };
            gene.innovation = conn.innovation;
            child.connections.insert(*pair, gene);
        }
        child
    }

    /// Compatibility distance δ. Input nodes are ignored.
    pub fn distance(&self, other: &Genome, config: &GenomeConfig) -> f64 {
        let mut disjoint = 0usize;
        let (mut bias_diff, mut matching_nodes) = (0.0, 0usize);
        for (id, n) in self.nodes.iter().filter(|(_, n)| n.kind != NodeKind::Input) {
            match other.nodes.get(id) {
                Some(m) => {
                    bias_diff += (n.bias - m.bias).abs();
                    matching_nodes += 1;
                }
                None => disjoint += 1,
            }
        }
        disjoint += other
            .nodes
            .iter()
            .filter(|(id, n)| n.kind != NodeKind::Input && !self.nodes.contains_key(id))
            .count();

        let (mut weight_diff, mut matching_conns) = (0.0, 0usize);
        for (pair, c) in &self.connections {
            match other.connections.get(pair) {
                Some(d) => {
                    weight_diff += (c.weight - d.weight).abs();
                    matching_conns += 1;
                }
                None => disjoint += 1,
            }
        }
        disjoint += other.connections.keys().filter(|p| !self.connections.contains_key(p)).count();

        let mean = |sum: f64, n: usize| if n == 0 { 0.0 } else { sum / n as f64 };
        let size = self.gene_count().max(other.gene_count()).max(1) as f64;
        config.compatibility_disjoint_coefficient * disjoint as f64 / size
            + config.compatibility_weight_coefficient
                * (mean(weight_diff, matching_conns) + mean(bias_diff, matching_nodes))
    }

    /// Whether every weight, bias and response lies within its bounds.
    pub fn within_bounds(&self, config: &GenomeConfig) -> bool {
        let (w, b, r) = (Attribute::weight(config), Attribute::bias(config), Attribute::response(config));
        self.connections.values().all(|c| w.contains(c.weight))
            && self
                .nodes
                .values()
                .filter(|n| n.kind != NodeKind::Input)
                .all(|n| b.contains(n.bias) && r.contains(n.response))
    }

    /// Structural well-formedness: node counts, endpoint existence, keys.
    pub fn is_consistent(&self, config: &GenomeConfig) -> bool {
        let count = |k| self.nodes.values().filter(|n| n.kind == k).count();
        count(NodeKind::Input) == config.num_inputs
            && count(NodeKind::Output) == config.num_outputs
            && self.nodes.iter().all(|(id, n)| *id == n.id)
            && self.connections.iter().all(|(&(i, o), c)| {
                (i, o) == (c.in_node, c.out_node)
                    && self.nodes.contains_key(&i)
                    && self.nodes.get(&o).is_some_and(|n| n.kind != NodeKind::Input)
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neat::config::NeatConfig;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn small_config(inputs: usize, outputs: usize) -> GenomeConfig {
        let mut c = NeatConfig::default().genome;
        c.num_inputs = inputs;
        c.num_outputs = outputs;
        c
    }

    fn still(mut c: GenomeConfig) -> GenomeConfig {
        c.conn_add_prob = 0.0;
        c.conn_delete_prob = 0.0;
        c.node_add_prob = 0.0;
        c.node_delete_prob = 0.0;
        c.weight_mutate_rate = 0.0;
        c.weight_replace_rate = 0.0;
        c.bias_mutate_rate = 0.0;
        c.bias_replace_rate = 0.0;
        c.response_mutate_rate = 0.0;
        c.response_replace_rate = 0.0;
        c.enabled_mutate_rate = 0.0;
        c.activation_mutate_rate = 0.0;
        c.aggregation_mutate_rate = 0.0;
        c
    }

    #[test]
    fn initial_structure() {
        let c = small_config(2, 1);
        let mut reg = InnovationRegistry::new(1);
        for seed in 0..50 {
            let g = Genome::initial(0, &c, &mut reg, &mut ChaCha8Rng::seed_from_u64(seed));
            assert_eq!(g.nodes.len(), 3);
            assert_eq!(g.hidden_count(), 0);
            assert!(g.connections.len() <= 2);
            assert!(g.is_consistent(&c) && g.within_bounds(&c));
        }
        let a = Genome::initial(0, &c, &mut reg, &mut ChaCha8Rng::seed_from_u64(3));
        let b = Genome::initial(0, &c, &mut reg, &mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(a, b);
    }

    #[test]
    fn zero_probabilities_leave_genome_alone() {
        let c = still(small_config(4, 3));
        let mut reg = InnovationRegistry::new(3);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut g = Genome::initial(0, &c, &mut reg, &mut rng);
        let before = g.clone();
        for _ in 0..100 {
            assert_eq!(g.mutate(&c, &mut reg, &mut rng), 0);
        }
        assert_eq!(g, before);
    }

    #[test]
    fn add_node_splits_connection() {
        let mut c = still(small_config(1, 1));
        c.node_add_prob = 1.0;
        let mut reg = InnovationRegistry::new(1);
        let mut g = Genome::bare(0, [NodeGene::input(-1)]);
        g.nodes.insert(0, NodeGene::new(0, NodeKind::Output, &c, &mut ChaCha8Rng::seed_from_u64(0)));
        g.connections.insert(
            (-1, 0),
            ConnectionGene { in_node: -1, out_node: 0, weight: 2.5, enabled: true, innovation: reg.connection(-1, 0) },
        );
        g.mutate(&c, &mut reg, &mut ChaCha8Rng::seed_from_u64(2));
        assert!(!g.connections[&(-1, 0)].enabled);
        assert_eq!(g.connections[&(-1, 1)].weight, 1.0);
        assert_eq!(g.connections[&(1, 0)].weight, 2.5);
        assert_eq!(g.hidden_count(), 1);
    }

    #[test]
    fn same_new_connection_shares_innovation() {
        let mut c = still(small_config(3, 2));
        c.initial_connection = InitialConnection::Unconnected;
        c.conn_add_prob = 1.0;
        let mut reg = InnovationRegistry::new(2);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut found = false;
        for _ in 0..200 {
            let mut a = Genome::initial(0, &c, &mut reg, &mut rng);
            let mut b = Genome::initial(1, &c, &mut reg, &mut rng);
            a.mutate(&c, &mut reg, &mut rng);
            b.mutate(&c, &mut reg, &mut rng);
            let (pa, ga) = a.connections.iter().next().unwrap();
            let (pb, gb) = b.connections.iter().next().unwrap();
            if pa == pb {
                assert_eq!(ga.innovation, gb.innovation);
                found = true;
            } else {
                assert_ne!(ga.innovation, gb.innovation);
            }
        }
        assert!(found);
    }

    #[test]
    fn distance_examples() {
        let c = small_config(2, 1);
        let mut reg = InnovationRegistry::new(1);
        let mut g = Genome::bare(0, [NodeGene::input(-1), NodeGene::input(-2)]);
        g.nodes.insert(0, NodeGene::new(0, NodeKind::Output, &c, &mut ChaCha8Rng::seed_from_u64(0)));
        let conn = |i, w, reg: &mut InnovationRegistry| ConnectionGene {
            in_node: i,
            out_node: 0,
            weight: w,
            enabled: true,
            innovation: reg.connection(i, 0),
        };
        g.connections.insert((-1, 0), conn(-1, 1.0, &mut reg));
        assert_eq!(g.distance(&g, &c), 0.0);

        let mut h = g.clone();
        h.connections.insert((-2, 0), conn(-2, 0.3, &mut reg));
        // Genes counted: output node + connections, so N = 3 for h.
        assert!((g.distance(&h, &c) - 1.0 / 3.0).abs() < 1e-12);

        let mut k = g.clone();
        k.connections.get_mut(&(-1, 0)).unwrap().weight = -1.0;
        assert!((g.distance(&k, &c) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn crossover_clone_and_excess() {
        let c = small_config(3, 2);
        let mut reg = InnovationRegistry::new(2);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut p = Genome::initial(0, &c, &mut reg, &mut rng);
        p.fitness = Some(1.0);
        let child = Genome::crossover(&p, &p, 9, &mut rng);
        assert_eq!(child.nodes, p.nodes);
        assert_eq!(child.connections.keys().collect::<Vec<_>>(), p.connections.keys().collect::<Vec<_>>());

        let mut fitter = p.clone();
        fitter.key = 1;
        fitter.fitness = Some(5.0);
        fitter.connections.retain(|_, _| false);
        fitter.connections.insert(
            (-1, 1),
            ConnectionGene { in_node: -1, out_node: 1, weight: 0.7, enabled: true, innovation: reg.connection(-1, 1) },
        );
        let child = Genome::crossover(&p, &fitter, 10, &mut rng);
        assert!(child.connections.contains_key(&(-1, 1)));
        assert_eq!(child.connections.len(), 1);
    }
}
