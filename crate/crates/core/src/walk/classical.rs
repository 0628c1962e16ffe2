//! Classical random-walk baseline: powers of the transition matrix
//! D^-1 A applied to a start distribution.

use crate::graph::Graph;
use crate::{CoreError, Result};

/// Evolve `start` for `steps` applications of D^-1 A over real edges.
pub fn classical_walk_distribution(g: &Graph, start: &[f64], steps: usize) -> Result<Vec<f64>> {
    let n = g.n_nodes();
    if start.len() != n {
        return Err(CoreError::ShapeMismatch(format!(
            "start distribution has {} entries for {} nodes",
            start.len(),
            n
        )));
    }
    let total: f64 = start.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(CoreError::InvalidConfig(format!(
            "start distribution sums to {total}, expected 1"
        )));
    }
    for v in 0..n {
        if g.degree(v) == 0 {
            return Err(CoreError::InvalidGraph(format!(
                "classical walk undefined: node {v} is isolated"
            )));
        }
    }
    let mut p = start.to_vec();
    let mut next = vec![0.0; n];
    for _ in 0..steps {
        next.iter_mut().for_each(|x| *x = 0.0);
        for (v, &mass) in p.iter().enumerate() {
            let share = mass / g.degree(v) as f64;
            for &u in g.neighbors(v) {
                next[u] += share;
            }
        }
        std::mem::swap(&mut p, &mut next);
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{cycle_graph, Graph};

    #[test]
    fn zero_steps_is_identity() {
        let g = cycle_graph(3);
        let start = vec![0.2, 0.5, 0.3];
        assert_eq!(classical_walk_distribution(&g, &start, 0).unwrap(), start);
    }

    #[test]
    fn k2_swaps_in_one_step() {
        let g = Graph::from_edge_list(&[(0, 1)], 2).unwrap();
        let p = classical_walk_distribution(&g, &[1.0, 0.0], 1).unwrap();
        assert_eq!(p, vec![0.0, 1.0]);
    }

    #[test]
    fn three_cycle_two_steps() {
        let g = cycle_graph(3);
        let p = classical_walk_distribution(&g, &[1.0, 0.0, 0.0], 2).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-15);
        assert!((p[1] - 0.25).abs() < 1e-15);
        assert!((p[2] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_inputs() {
        let g = cycle_graph(3);
        assert!(classical_walk_distribution(&g, &[1.0, 0.0], 1).is_err());
        assert!(classical_walk_distribution(&g, &[0.7, 0.0, 0.0], 1).is_err());
        let isolated = Graph::from_edge_list(&[(0, 1)], 3).unwrap();
        assert!(classical_walk_distribution(&isolated, &[1.0, 0.0, 0.0], 1).is_err());
    }
}
