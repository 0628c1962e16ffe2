//! Classical diffusion baselines: DCNN hop stacks over powers of the
//! transition matrix, and the GCNN symmetric-normalized adjacency
//! layer. Both plug into the same heads and training loop as the
//! quantum stage so comparisons differ only in the diffusion operator.

use ndarray::{Array1, Array2, Array3, Axis};

use crate::graph::Graph;
use crate::nn::Activation;
use crate::{CoreError, Result};

/// DCNN layer: Y = h(W (elementwise) P* X) with P* the stack of
/// transition-matrix powers 0..=hops and W one weight per (hop,
/// feature) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct DcnnParams {
    pub hops: usize,
    /// (hops + 1) x n_features.
    pub weights: Array2<f64>,
}

/// GCNN layer: Y = h(D~^-1/2 A~ D~^-1/2 X W + b).
#[derive(Debug, Clone, PartialEq)]
pub struct GcnnParams {
    /// n_features x out_features.
    pub weights: Array2<f64>,
    pub bias: Option<Array1<f64>>,
}

/// Row-stochastic transition matrix D^-1 A over real edges.
pub fn transition_matrix(g: &Graph) -> Result<Array2<f64>> {
    let n = g.n_nodes();
    let mut w = Array2::zeros((n, n));
    for v in 0..n {
        let deg = g.degree(v);
        if deg == 0 {
            return Err(CoreError::InvalidGraph(format!(
                "transition matrix undefined: node {v} is isolated"
            )));
        }
        for &u in g.neighbors(v) {
            w[[v, u]] = 1.0 / deg as f64;
        }
    }
    Ok(w)
}

/// P^k X for k = 0..=hops.
pub fn diffusion_power_stack(g: &Graph, x: &Array2<f64>, hops: usize) -> Result<Vec<Array2<f64>>> {
    let p = transition_matrix(g)?;
    let mut stack = Vec::with_capacity(hops + 1);
    stack.push(x.clone());
    for _ in 0..hops {
        let next = p.dot(stack.last().unwrap());
        stack.push(next);
    }
    Ok(stack)
}

/// Symmetric-normalized augmented adjacency D~^-1/2 (A + I) D~^-1/2.
/// The added self-loops guarantee positive degrees.
pub fn normalized_adjacency(g: &Graph) -> Array2<f64> {
    let n = g.n_nodes();
    let mut a = Array2::eye(n);
    for v in 0..n {
        for &u in g.neighbors(v) {
            a[[v, u]] = 1.0;
        }
    }
    let inv_sqrt: Vec<f64> = (0..n)
        .map(|v| 1.0 / ((g.degree(v) + 1) as f64).sqrt())
        .collect();
    for ((i, j), val) in a.indexed_iter_mut() {
        *val *= inv_sqrt[i] * inv_sqrt[j];
    }
    a
}

/// Full DCNN layer output, shape (n_nodes, hops + 1, n_features).
pub fn dcnn_forward(g: &Graph, x: &Array2<f64>, p: &DcnnParams, h: &Activation) -> Result<Array3<f64>> {
    let (n, f) = x.dim();
    if p.weights.dim() != (p.hops + 1, f) {
        return Err(CoreError::ShapeMismatch(format!(
            "dcnn weights {:?} do not match (hops+1, features) = ({}, {})",
            p.weights.dim(),
            p.hops + 1,
            f
        )));
    }
    let stack = diffusion_power_stack(g, x, p.hops)?;
    let mut out = Array3::zeros((n, p.hops + 1, f));
    for (k, px) in stack.iter().enumerate() {
        for i in 0..n {
            for j in 0..f {
                out[[i, k, j]] = p.weights[[k, j]] * px[[i, j]];
            }
        }
    }
    for mut lane in out.axis_iter_mut(Axis(1)) {
        let activated = h.apply(&lane.to_owned());
        lane.assign(&activated);
    }
    Ok(out)
}

/// GCNN layer output, shape (n_nodes, out_features).
pub fn gcnn_forward(g: &Graph, x: &Array2<f64>, p: &GcnnParams, h: &Activation) -> Result<Array2<f64>> {
    let (_, f) = x.dim();
    if p.weights.nrows() != f {
        return Err(CoreError::ShapeMismatch(format!(
            "gcnn weights expect {} input features, got {f}",
            p.weights.nrows()
        )));
    }
    let mut pre = normalized_adjacency(g).dot(x).dot(&p.weights);
    if let Some(b) = &p.bias {
        pre += &b.view().insert_axis(Axis(0));
    }
    Ok(h.apply(&pre))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use ndarray::array;

    #[test]
    fn dcnn_hop_zero_is_input() {
        let g = Graph::from_edge_list(&[(0, 1)], 2).unwrap();
        let x = array![[1.0, 2.0], [3.0, 4.0]];
        let p = DcnnParams { hops: 0, weights: Array2::ones((1, 2)) };
        let y = dcnn_forward(&g, &x, &p, &Activation::Identity).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(y[[i, 0, j]], x[[i, j]]);
            }
        }
    }

    #[test]
    fn dcnn_hop_one_swaps_k2() {
        let g = Graph::from_edge_list(&[(0, 1)], 2).unwrap();
        let x = array![[1.0], [5.0]];
        let p = DcnnParams { hops: 1, weights: Array2::ones((2, 1)) };
        let y = dcnn_forward(&g, &x, &p, &Activation::Identity).unwrap();
        assert_eq!(y[[0, 1, 0]], 5.0);
        assert_eq!(y[[1, 1, 0]], 1.0);
    }

    #[test]
    fn dcnn_zero_weights_zero_output() {
        let g = crate::graph::cycle_graph(3);
        let x = array![[1.0], [2.0], [3.0]];
        let p = DcnnParams { hops: 2, weights: Array2::zeros((3, 1)) };
        let y = dcnn_forward(&g, &x, &p, &Activation::Identity).unwrap();
        assert!(y.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn dcnn_rejects_isolated_node() {
        let g = Graph::from_edge_list(&[(0, 1)], 3).unwrap();
        let x = Array2::zeros((3, 1));
        let p = DcnnParams { hops: 1, weights: Array2::ones((2, 1)) };
        assert!(dcnn_forward(&g, &x, &p, &Activation::Identity).is_err());
    }

    #[test]
    fn gcnn_single_node_is_dense() {
        let g = Graph::from_edge_list(&[], 1).unwrap();
        let x = array![[2.0, 3.0]];
        let p = GcnnParams { weights: array![[1.0], [1.0]], bias: None };
        let y = gcnn_forward(&g, &x, &p, &Activation::Identity).unwrap();
        assert_eq!(y, array![[5.0]]);
    }

    #[test]
    fn gcnn_k2_averages_rows() {
        let g = Graph::from_edge_list(&[(0, 1)], 2).unwrap();
        let x = array![[2.0], [4.0]];
        let p = GcnnParams { weights: Array2::eye(1), bias: None };
        let y = gcnn_forward(&g, &x, &p, &Activation::Identity).unwrap();
        assert!((y[[0, 0]] - 3.0).abs() < 1e-12);
        assert!((y[[1, 0]] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn normalized_adjacency_symmetric_bounded() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let n = rng.random_range(2..12);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in (u + 1)..n {
                    if rng.random_bool(0.4) {
                        edges.push((u, v));
                    }
                }
            }
            let g = Graph::from_edge_list(&edges, n).unwrap();
            let a = normalized_adjacency(&g);
            for i in 0..n {
                for j in 0..n {
                    assert!((a[[i, j]] - a[[j, i]]).abs() < 1e-12);
                }
            }
            // Spectral radius <= 1: power iteration norm never grows.
            let v0 = Array1::from_elem(n, 1.0 / (n as f64).sqrt());
            let mut v = v0.clone();
            for _ in 0..50 {
                v = a.dot(&v);
            }
            let norm = v.dot(&v).sqrt();
            assert!(norm <= 1.0 + 1e-9, "spectral radius above 1: {norm}");
        }
    }
}
