use std::collections::HashMap;

use super::config::{Activation, Aggregation};
use super::genome::{Genome, NodeId, NodeKind};
use super::NeatError;
use crate::env::Action;

struct NodeEval {
    slot: usize,
    activation: Activation,
    aggregation: Aggregation,
    bias: f64,
    response: f64,
    incoming: Vec<(usize, f64)>,
}

/// Phenotype of a genome with per-episode node memory.
///
/// In recurrent mode every non-input node reads the previous step's values of
/// its sources while inputs are always current, so a direct input-to-output
/// connection responds immediately and each hidden node adds one step of
/// delay. In feed-forward mode nodes are evaluated in topological order on
/// the current step's values.
pub struct Network {
    num_inputs: usize,
    evals: Vec<NodeEval>,
    outputs: Vec<usize>,
    values: Vec<f64>,
    next: Vec<f64>,
    feed_forward: bool,
}

impl Network {
    pub fn new(genome: &Genome, feed_forward: bool) -> Self {
        let inputs: Vec<NodeId> = genome.nodes.values().filter(|n| n.kind == NodeKind::Input).map(|n| n.id).collect();
        let num_inputs = inputs.len();
        let mut slot_of = HashMap::new();
        for id in &inputs {
            slot_of.insert(*id, (-id - 1) as usize);
        }
        let others: Vec<_> = genome.nodes.values().filter(|n| n.kind != NodeKind::Input).collect();
        for (k, node) in others.iter().enumerate() {
            slot_of.insert(node.id, num_inputs + k);
        }
        let mut evals: Vec<NodeEval> = others
            .iter()
            .map(|n| NodeEval {
                slot: slot_of[&n.id],
                activation: n.activation,
                aggregation: n.aggregation,
                bias: n.bias,
                response: n.response,
                incoming: Vec::new(),
            })
            .collect();
        for c in genome.connections.values().filter(|c| c.enabled) {
            let target = slot_of[&c.out_node] - num_inputs;
            evals[target].incoming.push((slot_of[&c.in_node], c.weight));
        }
        let outputs = others.iter().filter(|n| n.kind == NodeKind::Output).map(|n| slot_of[&n.id]).collect();

        let feed_forward = feed_forward && topological_sort(&mut evals, num_inputs);
        let size = num_inputs + others.len();
        Network { num_inputs, evals, outputs, values: vec![0.0; size], next: vec![0.0; size], feed_forward }
    }

    /// Clears node memory, as at the start of an episode.
    pub fn reset(&mut self) {
        self.values.iter_mut().for_each(|v| *v = 0.0);
        self.next.iter_mut().for_each(|v| *v = 0.0);
    }

    /// One propagation step; returns the output scores in output-id order.
    pub fn activate(&mut self, inputs: &[f64]) -> Result<Vec<f64>, NeatError> {
        if inputs.len() != self.num_inputs {
            return Err(NeatError::DimensionMismatch { expected: self.num_inputs, found: inputs.len() });
        }
        self.values[..self.num_inputs].copy_from_slice(inputs);
        if self.feed_forward {
            for e in &self.evals {
                let s = e.aggregation.apply(e.incoming.iter().map(|&(src, w)| self.values[src] * w));
                self.values[e.slot] = e.activation.apply(e.bias + e.response * s);
            }
        } else {
            self.next[..self.num_inputs].copy_from_slice(inputs);
            for e in &self.evals {
                let s = e.aggregation.apply(e.incoming.iter().map(|&(src, w)| self.values[src] * w));
                self.next[e.slot] = e.activation.apply(e.bias + e.response * s);
            }
            std::mem::swap(&mut self.values, &mut self.next);
        }
        Ok(self.outputs.iter().map(|&s| self.values[s]).collect())
    }
}

/// Orders `evals` so that every source precedes its target. Returns false
/// (leaving the order untouched) when the enabled graph has a cycle.
fn topological_sort(evals: &mut Vec<NodeEval>, num_inputs: usize) -> bool {
    let n = evals.len();
    let index_of = |slot: usize| slot.checked_sub(num_inputs);
    let mut indegree = vec![0usize; n];
    let mut dependents = vec![Vec::new(); n];
    for (k, e) in evals.iter().enumerate() {
        for &(src, _) in &e.incoming {
            if let Some(s) = index_of(src) {
                indegree[k] += 1;
                dependents[s].push(k);
            }
        }
    }
    let mut ready: Vec<usize> = (0..n).filter(|&k| indegree[k] == 0).rev().collect();
    let mut order = Vec::with_capacity(n);
    while let Some(k) = ready.pop() {
        order.push(k);
        for &d in &dependents[k] {
            indegree[d] -= 1;
            if indegree[d] == 0 {
                ready.push(d);
            }
        }
    }
    if order.len() != n {
        return false;
    }
    let mut taken: Vec<Option<NodeEval>> = evals.drain(..).map(Some).collect();
    evals.extend(order.into_iter().map(|k| taken[k].take().expect("each index once")));
    true
}

/// Index of the highest score; ties go to the lowest action code.
pub fn decode(scores: &[f64]) -> Action {
    let mut best = 0;
    for (i, s) in scores.iter().enumerate().take(Action::ALL.len()) {
        if *s > scores[best] {
            best = i;
        }
    }
    Action::ALL[best]
}
