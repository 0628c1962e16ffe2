//! Walk inspection: per-step node-probability marginals for a single
//! walker, side by side with the classical walk, plus CSV dumps.

use std::io::Write;

use ndarray::Array2;

use super::{
    apply_coin_mats, apply_shift, classical_walk_distribution, diffusion_matrix,
    localized_superposition, CoinSet,
};
use crate::graph::{build_shift, Graph};
use crate::Result;

/// Node distributions per step (index 0 = start) for a quantum walker
/// and the classical walk started at the same node.
pub struct WalkInspection {
    pub quantum: Vec<Vec<f64>>,
    pub classical: Vec<Vec<f64>>,
}

/// Evolve one walker from `start_node` (equal spin on its real edges)
/// and record both distributions after every step.
pub fn inspect_walk(g: &Graph, coins: &CoinSet, start_node: usize, steps: usize) -> Result<WalkInspection> {
    let n = g.n_nodes();
    let d = g.d_max();
    let deg = g.degree(start_node);
    let amp = if deg > 0 { 1.0 / (deg as f64).sqrt() } else { 1.0 };
    let spin: Vec<f64> = (0..d)
        .map(|i| if (deg > 0 && i < deg) || (deg == 0 && i == 0) { amp } else { 0.0 })
        .collect();
    let mut s = localized_superposition(n, d, start_node, &spin, None);
    if coins.is_complex() {
        s.ensure_complex();
    }
    let shift = build_shift(g);
    let mats = coins.materialize(g)?;

    let mut quantum = Vec::with_capacity(steps + 1);
    quantum.push(diffusion_matrix(&s).row(0).to_vec());
    for t in 0..steps {
        s = apply_shift(&apply_coin_mats(&s, &mats, coins.placement, t)?, &shift);
        quantum.push(diffusion_matrix(&s).row(0).to_vec());
    }

    let mut start = vec![0.0; n];
    start[start_node] = 1.0;
    let classical = (0..=steps)
        .map(|t| classical_walk_distribution(g, &start, t))
        .collect::<Result<Vec<_>>>()?;

    Ok(WalkInspection { quantum, classical })
}

/// CSV rows `step,kind,node,probability`.
pub fn write_step_csv(insp: &WalkInspection, out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "step,kind,node,probability")?;
    for (kind, series) in [("quantum", &insp.quantum), ("classical", &insp.classical)] {
        for (step, dist) in series.iter().enumerate() {
            for (node, p) in dist.iter().enumerate() {
                writeln!(out, "{step},{kind},{node},{p}")?;
            }
        }
    }
    Ok(())
}

/// CSV rows `walker,node,value` for a diffusion matrix.
pub fn write_diffusion_csv(p: &Array2<f64>, out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "walker,node,value")?;
    for ((w, v), val) in p.indexed_iter() {
        writeln!(out, "{w},{v},{val}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::cycle_graph;
    use crate::walk::CoinPlacement;

    #[test]
    fn zero_steps_matches_start() {
        let g = cycle_graph(5);
        let coins = CoinSet::fixed_grover(CoinPlacement::Temporal, 2, 1);
        let insp = inspect_walk(&g, &coins, 2, 0).unwrap();
        assert_eq!(insp.quantum.len(), 1);
        assert!((insp.quantum[0][2] - 1.0).abs() < 1e-12);
        for v in 0..5 {
            assert!((insp.classical[0][v] - insp.quantum[0][v]).abs() < 1e-12);
        }
    }

    #[test]
    fn csv_shape() {
        let g = cycle_graph(4);
        let coins = CoinSet::fixed_grover(CoinPlacement::Temporal, 2, 3);
        let insp = inspect_walk(&g, &coins, 0, 3).unwrap();
        let mut buf = Vec::new();
        write_step_csv(&insp, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        // header + 2 kinds * 4 steps * 4 nodes
        assert_eq!(text.lines().count(), 1 + 2 * 4 * 4);
        assert!(text.starts_with("step,kind,node,probability"));
    }
}
