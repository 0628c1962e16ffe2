//! Training instances: a prepared graph, node features, and a target.

use std::sync::Arc;

use ndarray::Array2;

use crate::graph::{build_shift, Graph, ShiftPermutation};

/// A graph together with its shift permutation, shareable across the
/// many instances that reuse one graph.
#[derive(Debug, Clone)]
pub struct PreparedGraph {
    pub graph: Graph,
    pub shift: ShiftPermutation,
}

impl PreparedGraph {
    pub fn new(graph: Graph) -> Self {
        let shift = build_shift(&graph);
        Self { graph, shift }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    /// Per-node regression targets, n_nodes x out_features.
    Nodes(Array2<f64>),
    /// Graph-level class id.
    Class(usize),
    /// Graph-level scalar.
    Scalar(f64),
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub graph: Arc<PreparedGraph>,
    /// n_nodes x n_features.
    pub x: Array2<f64>,
    pub target: Target,
    /// Real-node mask; padded nodes are excluded from pooling and loss.
    pub mask: Option<Vec<bool>>,
}

impl Instance {
    pub fn new(graph: Arc<PreparedGraph>, x: Array2<f64>, target: Target) -> Self {
        Self { graph, x, target, mask: None }
    }

    pub fn n_real_nodes(&self) -> usize {
        match &self.mask {
            Some(m) => m.iter().filter(|&&b| b).count(),
            None => self.graph.graph.n_nodes(),
        }
    }
}
