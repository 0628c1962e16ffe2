//! Undirected graphs with per-node *ordered* neighbor lists.
//!
//! The position of a neighbor in a node's list is semantic: a walker at
//! node `v` holds one amplitude per slot, and slot `i` is the spin
//! direction along the edge to `v`'s `i`-th neighbor. Regularization
//! appends self-loop slots after the real edges so every node exposes
//! the same slot count `d`.

mod ordering;
mod shift;

pub use ordering::{betweenness_centrality, order_edges, random_walk_similarity, EdgeOrderingStrategy};
pub use shift::{build_shift, ShiftPermutation};

use crate::{CoreError, Result};

/// Undirected graph; slot `i` of node `v` points at `neighbors[v][i]`.
///
/// Self-loop padding slots (from [`Graph::regularized`]) sit after the
/// real slots and are tracked only by count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    neighbors: Vec<Vec<usize>>,
    self_loops: Vec<usize>,
    d_max: usize,
}

impl Graph {
    /// Build from an edge list. Neighbor order is the order in which
    /// edges mention each endpoint.
    pub fn from_edge_list(edges: &[(usize, usize)], n_nodes: usize) -> Result<Self> {
        let mut neighbors = vec![Vec::new(); n_nodes];
        let mut seen = std::collections::HashSet::new();
        for &(u, v) in edges {
            if u >= n_nodes || v >= n_nodes {
                return Err(CoreError::InvalidGraph(format!(
                    "edge ({u}, {v}) out of range for {n_nodes} nodes"
                )));
            }
            if u == v {
                return Err(CoreError::InvalidGraph(format!("self-loop on node {u}")));
            }
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                return Err(CoreError::InvalidGraph(format!("duplicate edge ({u}, {v})")));
            }
            neighbors[u].push(v);
            neighbors[v].push(u);
        }
        let d_max = neighbors.iter().map(Vec::len).max().unwrap_or(0);
        Ok(Self { neighbors, self_loops: vec![0; n_nodes], d_max })
    }

    /// Build from explicit per-node ordered neighbor lists.
    pub fn from_neighbor_lists(lists: Vec<Vec<usize>>) -> Result<Self> {
        let n = lists.len();
        for (v, lst) in lists.iter().enumerate() {
            let mut seen = std::collections::HashSet::new();
            for &u in lst {
                if u >= n {
                    return Err(CoreError::InvalidGraph(format!(
                        "node {v} lists out-of-range neighbor {u}"
                    )));
                }
                if u == v {
                    return Err(CoreError::InvalidGraph(format!("self-loop on node {v}")));
                }
                if !seen.insert(u) {
                    return Err(CoreError::InvalidGraph(format!(
                        "node {v} lists neighbor {u} twice"
                    )));
                }
                if !lists[u].contains(&v) {
                    return Err(CoreError::InvalidGraph(format!(
                        "edge ({v}, {u}) is not symmetric"
                    )));
                }
            }
        }
        let d_max = lists.iter().map(Vec::len).max().unwrap_or(0);
        Ok(Self { neighbors: lists, self_loops: vec![0; n], d_max })
    }

    pub(crate) fn with_padding(neighbors: Vec<Vec<usize>>, self_loops: Vec<usize>, d_max: usize) -> Self {
        Self { neighbors, self_loops, d_max }
    }

    pub fn n_nodes(&self) -> usize {
        self.neighbors.len()
    }

    /// Number of real (non-padding) edges.
    pub fn n_edges(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Real degree of `v`, excluding self-loop padding.
    pub fn degree(&self, v: usize) -> usize {
        self.neighbors[v].len()
    }

    /// Self-loop padding slots at `v`.
    pub fn self_loop_slots(&self, v: usize) -> usize {
        self.self_loops[v]
    }

    /// Total slots at `v` (real + padding).
    pub fn slot_count(&self, v: usize) -> usize {
        self.neighbors[v].len() + self.self_loops[v]
    }

    /// Slot-space dimension `d`: the maximum slot count over nodes.
    pub fn d_max(&self) -> usize {
        self.d_max
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    /// Slot index of `u` in `v`'s list, if adjacent.
    pub fn slot_of(&self, v: usize, u: usize) -> Option<usize> {
        self.neighbors[v].iter().position(|&x| x == u)
    }

    /// Real edges as (min, max) pairs, each once.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.n_edges());
        for (v, lst) in self.neighbors.iter().enumerate() {
            for &u in lst {
                if v < u {
                    out.push((v, u));
                }
            }
        }
        out
    }

    /// True when every node has exactly `d_max` slots.
    pub fn is_regular(&self) -> bool {
        (0..self.n_nodes()).all(|v| self.slot_count(v) == self.d_max)
    }

    /// Pad every node to `d_max` slots with self-loops.
    pub fn regularized(&self) -> Self {
        self.regularized_to(self.d_max).expect("d_max fits itself")
    }

    /// Pad every node to exactly `d` slots with self-loops.
    pub fn regularized_to(&self, d: usize) -> Result<Self> {
        let max_slots = (0..self.n_nodes()).map(|v| self.slot_count(v)).max().unwrap_or(0);
        if d < max_slots {
            return Err(CoreError::InvalidGraph(format!(
                "cannot regularize to {d} slots: a node already has {max_slots}"
            )));
        }
        let self_loops = (0..self.n_nodes()).map(|v| d - self.degree(v)).collect();
        Ok(Self { neighbors: self.neighbors.clone(), self_loops, d_max: d })
    }

    /// Component id per node (0-based, in first-seen order).
    pub fn connected_components(&self) -> Vec<usize> {
        let n = self.n_nodes();
        let mut comp = vec![usize::MAX; n];
        let mut next = 0;
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            let mut stack = vec![start];
            comp[start] = next;
            while let Some(v) = stack.pop() {
                for &u in &self.neighbors[v] {
                    if comp[u] == usize::MAX {
                        comp[u] = next;
                        stack.push(u);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    pub fn is_connected(&self) -> bool {
        self.n_nodes() <= 1 || self.connected_components().iter().all(|&c| c == 0)
    }
}

/// Path 0-1-...-(n-1).
pub fn path_graph(n: usize) -> Graph {
    let edges: Vec<_> = (0..n.saturating_sub(1)).map(|v| (v, v + 1)).collect();
    Graph::from_edge_list(&edges, n).expect("valid path")
}

/// Cycle with orientation-consistent slots: slot 0 of every node points
/// at its successor, slot 1 at its predecessor, so a single permutation
/// coin can tour the cycle.
pub fn cycle_graph(n: usize) -> Graph {
    assert!(n >= 3, "cycle needs at least 3 nodes");
    let lists = (0..n).map(|v| vec![(v + 1) % n, (v + n - 1) % n]).collect();
    Graph::from_neighbor_lists(lists).expect("valid cycle")
}

/// rows x cols lattice; node r*cols + c.
pub fn grid_graph(rows: usize, cols: usize) -> Graph {
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let v = r * cols + c;
            if c + 1 < cols {
                edges.push((v, v + 1));
            }
            if r + 1 < rows {
                edges.push((v, v + cols));
            }
        }
    }
    Graph::from_edge_list(&edges, rows * cols).expect("valid grid")
}

pub fn complete_graph(n: usize) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            edges.push((u, v));
        }
    }
    Graph::from_edge_list(&edges, n).expect("valid complete graph")
}

/// Star with node 0 at the center.
pub fn star_graph(leaves: usize) -> Graph {
    let edges: Vec<_> = (1..=leaves).map(|v| (0, v)).collect();
    Graph::from_edge_list(&edges, leaves + 1).expect("valid star")
}

/// Parse the edge-list text format: one `u v` pair per line, 0-indexed,
/// `#` starts a comment. Node count is the largest id + 1.
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut edges = Vec::new();
    let mut n_nodes = 0usize;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let parse = |tok: Option<&str>| -> Result<usize> {
            tok.ok_or_else(|| CoreError::Data(format!("edge list line {}: expected `u v`", lineno + 1)))?
                .parse()
                .map_err(|_| CoreError::Data(format!("edge list line {}: bad node id", lineno + 1)))
        };
        let u = parse(it.next())?;
        let v = parse(it.next())?;
        if it.next().is_some() {
            return Err(CoreError::Data(format!(
                "edge list line {}: trailing tokens",
                lineno + 1
            )));
        }
        n_nodes = n_nodes.max(u + 1).max(v + 1);
        edges.push((u, v));
    }
    Graph::from_edge_list(&edges, n_nodes)
}

/// Serialize to the edge-list text format (one `u v` per line, u < v).
pub fn to_edge_list_string(g: &Graph) -> String {
    let mut s = String::new();
    for (u, v) in g.edges() {
        s.push_str(&format!("{u} {v}\n"));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge() {
        let g = Graph::from_edge_list(&[(0, 1)], 2).unwrap();
        assert_eq!(g.d_max(), 1);
        assert_eq!(g.neighbors(0), &[1]);
        assert_eq!(g.slot_of(0, 1), Some(0));
    }

    #[test]
    fn three_cycle() {
        let g = Graph::from_edge_list(&[(0, 1), (1, 2), (2, 0)], 3).unwrap();
        assert_eq!(g.d_max(), 2);
        assert_eq!(g.n_edges(), 3);
    }

    #[test]
    fn rejects_duplicate_edge() {
        assert!(Graph::from_edge_list(&[(0, 1), (0, 1)], 2).is_err());
        assert!(Graph::from_edge_list(&[(0, 1), (1, 0)], 2).is_err());
    }

    #[test]
    fn rejects_self_loop_and_out_of_range() {
        assert!(Graph::from_edge_list(&[(0, 0)], 1).is_err());
        assert!(Graph::from_edge_list(&[(0, 3)], 2).is_err());
    }

    #[test]
    fn regularize_path() {
        let g = path_graph(3).regularized();
        assert!(g.is_regular());
        assert_eq!(g.self_loop_slots(0), 1);
        assert_eq!(g.self_loop_slots(1), 0);
        assert_eq!(g.self_loop_slots(2), 1);
    }

    #[test]
    fn regularize_identity_on_regular() {
        let g = Graph::from_edge_list(&[(0, 1), (1, 2), (2, 0)], 3).unwrap();
        assert_eq!(g.regularized(), g);
    }

    #[test]
    fn regularize_star() {
        let g = star_graph(5).regularized();
        assert_eq!(g.d_max(), 5);
        for leaf in 1..=5 {
            assert_eq!(g.self_loop_slots(leaf), 4);
        }
        assert_eq!(g.self_loop_slots(0), 0);
    }

    #[test]
    fn neighbor_lists_validate_symmetry() {
        assert!(Graph::from_neighbor_lists(vec![vec![1], vec![]]).is_err());
        let g = Graph::from_neighbor_lists(vec![vec![1, 2], vec![2, 0], vec![0, 1]]).unwrap();
        assert_eq!(g.neighbors(1), &[2, 0]);
    }

    #[test]
    fn components() {
        let g = Graph::from_edge_list(&[(0, 1), (2, 3)], 5).unwrap();
        let comp = g.connected_components();
        assert_eq!(comp[0], comp[1]);
        assert_eq!(comp[2], comp[3]);
        assert_ne!(comp[0], comp[2]);
        assert_ne!(comp[4], comp[0]);
        assert!(!g.is_connected());
        assert!(path_graph(4).is_connected());
    }

    #[test]
    fn edge_list_text_round_trip() {
        let text = "# demo\n0 1\n1 2 # inline\n\n2 3\n";
        let g = parse_edge_list(text).unwrap();
        assert_eq!(g.n_nodes(), 4);
        assert_eq!(to_edge_list_string(&g), "0 1\n1 2\n2 3\n");
        assert!(parse_edge_list("0 1 2\n").is_err());
        assert!(parse_edge_list("0 x\n").is_err());
    }

    #[test]
    fn grid_shape() {
        let g = grid_graph(3, 4);
        assert_eq!(g.n_nodes(), 12);
        assert_eq!(g.n_edges(), 3 * 3 + 2 * 4);
        assert_eq!(g.d_max(), 4);
    }
}
