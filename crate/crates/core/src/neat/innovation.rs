use std::collections::HashMap;

use super::genome::NodeId;

/// Hands out innovation numbers and hidden-node ids.
///
/// A connection's innovation number is a function of its `(in, out)` pair for
/// the whole run, so equal numbers always mean equal endpoints. Splitting the
/// same connection more than once within a generation yields the same node id.
#[derive(Debug, Clone)]
pub struct InnovationRegistry {
    next_innovation: u64,
    next_node: NodeId,
    connections: HashMap<(NodeId, NodeId), u64>,
    splits: HashMap<(NodeId, NodeId), NodeId>,
}

impl InnovationRegistry {
    /// `first_hidden` is the first id not used by output or initial hidden nodes.
    pub fn new(first_hidden: NodeId) -> Self {
        InnovationRegistry {
            next_innovation: 0,
            next_node: first_hidden,
            connections: HashMap::new(),
            splits: HashMap::new(),
        }
    }

    pub fn connection(&mut self, in_node: NodeId, out_node: NodeId) -> u64 {
        let next = &mut self.next_innovation;
        *self.connections.entry((in_node, out_node)).or_insert_with(|| {
            *next += 1;
            *next - 1
        })
    }

    /// Id of the node that splits `in_node -> out_node` this generation.
    pub fn split_node(&mut self, in_node: NodeId, out_node: NodeId) -> NodeId {
        let next = &mut self.next_node;
        *self.splits.entry((in_node, out_node)).or_insert_with(|| {
            *next += 1;
            *next - 1
        })
    }

    pub fn fresh_node(&mut self) -> NodeId {
        self.next_node += 1;
        self.next_node - 1
    }

    /// Forgets this generation's node splits.
    pub fn new_generation(&mut self) {
        self.splits.clear();
    }

    /// Every `(in, out) -> innovation` assignment made so far.
    pub fn assignments(&self) -> impl Iterator<Item = (&(NodeId, NodeId), &u64)> {
        self.connections.iter()
    }

    pub fn innovation_count(&self) -> u64 {
        self.next_innovation
    }
}
