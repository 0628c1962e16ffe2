//! Edge-ordering heuristics.
//!
//! When a coin operator is shared across nodes, slot indices carry
//! meaning, so neighbor lists are ranked either by a global betweenness
//! ordering or by a local random-walk similarity score.

use std::collections::VecDeque;

use ndarray::Array2;

use super::Graph;
use crate::{CoreError, Result};

/// How to assign slot indices to each node's edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeOrderingStrategy {
    /// Keep input order.
    AsGiven,
    /// Global rank by descending betweenness centrality.
    Centrality,
    /// Per-node rank by descending random-walk similarity, using the
    /// k-th power of the classical walk matrix.
    Similarity { walk_power: usize },
}

/// Betweenness centrality over unordered node pairs.
///
/// Brandes accumulation counts each (source, target) pair in both
/// directions on an undirected graph, so scores are halved at the end.
/// Pairs in different components contribute nothing.
pub fn betweenness_centrality(g: &Graph) -> Vec<f64> {
    let n = g.n_nodes();
    let mut centrality = vec![0.0; n];
    for s in 0..n {
        let mut stack = Vec::with_capacity(n);
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut sigma = vec![0.0f64; n];
        let mut dist = vec![-1i64; n];
        sigma[s] = 1.0;
        dist[s] = 0;
        let mut queue = VecDeque::new();
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            stack.push(v);
            for &w in g.neighbors(v) {
                if dist[w] < 0 {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                    preds[w].push(v);
                }
            }
        }
        let mut delta = vec![0.0f64; n];
        while let Some(w) = stack.pop() {
            for &v in &preds[w] {
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            }
            if w != s {
                centrality[w] += delta[w];
            }
        }
    }
    for c in &mut centrality {
        *c /= 2.0;
    }
    centrality
}

/// S(i, j) = inner product of rows i and j of (D^-1 A)^k.
pub fn random_walk_similarity(g: &Graph, walk_power: usize) -> Result<Array2<f64>> {
    if walk_power < 1 {
        return Err(CoreError::InvalidConfig(
            "similarity walk power must be >= 1".into(),
        ));
    }
    let wk = walk_matrix_power(g, walk_power)?;
    Ok(wk.dot(&wk.t()))
}

/// (D^-1 A)^k over real edges only; errors on degree-0 nodes.
pub(crate) fn walk_matrix_power(g: &Graph, k: usize) -> Result<Array2<f64>> {
    let n = g.n_nodes();
    let mut w = Array2::<f64>::zeros((n, n));
    for v in 0..n {
        let deg = g.degree(v);
        if deg == 0 {
            return Err(CoreError::InvalidGraph(format!(
                "classical walk matrix undefined: node {v} is isolated"
            )));
        }
        for &u in g.neighbors(v) {
            w[[v, u]] = 1.0 / deg as f64;
        }
    }
    let mut acc = w.clone();
    for _ in 1..k {
        acc = acc.dot(&w);
    }
    Ok(acc)
}

/// Reassign slot indices per the strategy. Self-loop padding counts are
/// preserved and stay behind the real slots, so heuristics never rank
/// padding above structure. Ties break by ascending node id.
pub fn order_edges(g: &Graph, strategy: EdgeOrderingStrategy) -> Result<Graph> {
    let n = g.n_nodes();
    let lists: Vec<Vec<usize>> = match strategy {
        EdgeOrderingStrategy::AsGiven => return Ok(g.clone()),
        EdgeOrderingStrategy::Centrality => {
            let scores = betweenness_centrality(g);
            // Global rank: higher score first, then lower id.
            let mut by_rank: Vec<usize> = (0..n).collect();
            by_rank.sort_by(|&a, &b| {
                scores[b].partial_cmp(&scores[a]).unwrap().then(a.cmp(&b))
            });
            let mut rank = vec![0usize; n];
            for (r, &v) in by_rank.iter().enumerate() {
                rank[v] = r;
            }
            (0..n)
                .map(|v| {
                    let mut lst = g.neighbors(v).to_vec();
                    lst.sort_by_key(|&u| rank[u]);
                    lst
                })
                .collect()
        }
        EdgeOrderingStrategy::Similarity { walk_power } => {
            let s = random_walk_similarity(g, walk_power)?;
            (0..n)
                .map(|v| {
                    let mut lst = g.neighbors(v).to_vec();
                    lst.sort_by(|&a, &b| {
                        s[[v, b]].partial_cmp(&s[[v, a]]).unwrap().then(a.cmp(&b))
                    });
                    lst
                })
                .collect()
        }
    };
    let self_loops: Vec<usize> = (0..n).map(|v| g.self_loop_slots(v)).collect();
    Ok(Graph::with_padding(lists, self_loops, g.d_max()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{cycle_graph, path_graph, star_graph, Graph};

    #[test]
    fn betweenness_path() {
        let g = path_graph(3);
        let b = betweenness_centrality(&g);
        assert_eq!(b, vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn betweenness_cycle_is_zero() {
        let b = betweenness_centrality(&cycle_graph(3));
        assert!(b.iter().all(|&x| x.abs() < 1e-12));
    }

    #[test]
    fn betweenness_star() {
        let b = betweenness_centrality(&star_graph(3));
        assert_eq!(b[0], 3.0);
        assert!(b[1..].iter().all(|&x| x == 0.0));
    }

    #[test]
    fn betweenness_disconnected_per_component() {
        // Two 3-paths: only the middles score, and only within their component.
        let g = Graph::from_edge_list(&[(0, 1), (1, 2), (3, 4), (4, 5)], 6).unwrap();
        let b = betweenness_centrality(&g);
        assert_eq!(b, vec![0.0, 1.0, 0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn similarity_k2() {
        let g = Graph::from_edge_list(&[(0, 1)], 2).unwrap();
        let s = random_walk_similarity(&g, 1).unwrap();
        assert_eq!(s[[0, 1]], 0.0);
        assert_eq!(s[[0, 0]], 1.0);
    }

    #[test]
    fn similarity_three_cycle() {
        let s = random_walk_similarity(&cycle_graph(3), 1).unwrap();
        assert!((s[[0, 1]] - 0.25).abs() < 1e-15);
        assert!(s[[0, 0]] > 0.0);
    }

    #[test]
    fn similarity_symmetric() {
        let g = Graph::from_edge_list(&[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)], 4).unwrap();
        let s = random_walk_similarity(&g, 3).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!((s[[i, j]] - s[[j, i]]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn similarity_rejects_isolated_node() {
        let g = Graph::from_edge_list(&[(0, 1)], 3).unwrap();
        assert!(random_walk_similarity(&g, 1).is_err());
        assert!(random_walk_similarity(&cycle_graph(3), 0).is_err());
    }

    #[test]
    fn order_edges_path_centrality() {
        // Middle node ties its two leaves (both score 0) -> ascending id.
        let g = Graph::from_edge_list(&[(1, 2), (0, 1)], 3).unwrap();
        assert_eq!(g.neighbors(1), &[2, 0]);
        let ordered = order_edges(&g, EdgeOrderingStrategy::Centrality).unwrap();
        assert_eq!(ordered.neighbors(0), &[1]);
        assert_eq!(ordered.neighbors(1), &[0, 2]);
    }

    #[test]
    fn order_edges_as_given_is_identity() {
        let g = Graph::from_edge_list(&[(2, 0), (0, 1), (1, 2)], 3).unwrap();
        let ordered = order_edges(&g, EdgeOrderingStrategy::AsGiven).unwrap();
        assert_eq!(g, ordered);
    }

    #[test]
    fn order_edges_star_centrality() {
        let g = Graph::from_edge_list(&[(0, 3), (0, 1), (0, 2)], 4).unwrap();
        let ordered = order_edges(&g, EdgeOrderingStrategy::Centrality).unwrap();
        for leaf in 1..4 {
            assert_eq!(ordered.neighbors(leaf), &[0]);
        }
        // Leaves all tie at 0 -> center's slots sort by id.
        assert_eq!(ordered.neighbors(0), &[1, 2, 3]);
    }

    #[test]
    fn order_edges_preserves_edge_set_and_padding() {
        let g = Graph::from_edge_list(&[(0, 1), (1, 2), (2, 3), (1, 3)], 4)
            .unwrap()
            .regularized();
        let ordered = order_edges(&g, EdgeOrderingStrategy::Similarity { walk_power: 2 }).unwrap();
        let mut before = g.edges();
        let mut after = ordered.edges();
        before.sort_unstable();
        after.sort_unstable();
        assert_eq!(before, after);
        for v in 0..4 {
            assert_eq!(g.self_loop_slots(v), ordered.self_loop_slots(v));
        }
    }
}
