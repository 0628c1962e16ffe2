//! Coin operators: one per node (spatial) or one per step (temporal),
//! in one of three modes.
//!
//! Spatial coins at a node whose degree k is below the slot dimension d
//! act on the leading k x k block and as identity on the padding slots,
//! so no amplitude leaks into slots the initializer left empty and
//! unitary modes stay norm-preserving on irregular graphs. Temporal
//! coins act on the full slot space; the self-loop slots added by
//! regularization then behave as stay-in-place moves.

use ndarray::Array2;

use super::unitary::UnitaryParams;
use crate::graph::Graph;
use crate::{CoreError, Result};

/// Grover diffusion coin (2/d) J - I: the real symmetric unitary that
/// treats all slots identically.
pub fn grover_coin(d: usize) -> Array2<f64> {
    assert!(d >= 1, "grover coin needs dimension >= 1");
    let off = 2.0 / d as f64;
    Array2::from_shape_fn((d, d), |(i, j)| if i == j { off - 1.0 } else { off })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoinPlacement {
    /// One coin per node, shared across steps.
    Spatial,
    /// One coin per step, shared across nodes.
    Temporal,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CoinParams {
    /// Grover coin everywhere; no trainable parameters.
    FixedGrover,
    /// Raw real matrices, one per node or step.
    Unconstrained(Vec<Array2<f64>>),
    /// Angle-parametrized unitaries; `complex` enables phases.
    Unitary { params: Vec<UnitaryParams>, complex: bool },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoinSet {
    pub placement: CoinPlacement,
    dim: usize,
    count: usize,
    pub params: CoinParams,
}

impl CoinSet {
    pub fn fixed_grover(placement: CoinPlacement, dim: usize, count: usize) -> Self {
        Self { placement, dim, count, params: CoinParams::FixedGrover }
    }

    pub fn unconstrained(placement: CoinPlacement, mats: Vec<Array2<f64>>) -> Result<Self> {
        let dim = mats.first().map(|m| m.nrows()).unwrap_or(0);
        for m in &mats {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(CoreError::ShapeMismatch(
                    "all coins in a set must be square with one dimension".into(),
                ));
            }
        }
        Ok(Self { placement, dim, count: mats.len(), params: CoinParams::Unconstrained(mats) })
    }

    pub fn unitary(placement: CoinPlacement, params: Vec<UnitaryParams>, complex: bool) -> Result<Self> {
        let dim = params.first().map(|p| p.dim()).unwrap_or(0);
        for p in &params {
            p.validate()?;
            if p.dim() != dim {
                return Err(CoreError::ShapeMismatch("mixed coin dimensions in a set".into()));
            }
        }
        Ok(Self { placement, dim, count: params.len(), params: CoinParams::Unitary { params, complex } })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of coins: node count (spatial) or walk length (temporal).
    pub fn count(&self) -> usize {
        self.count
    }

    pub fn is_complex(&self) -> bool {
        matches!(self.params, CoinParams::Unitary { complex: true, .. })
    }

    /// True when every materialized coin is unitary by construction.
    pub fn is_unitary_mode(&self) -> bool {
        !matches!(self.params, CoinParams::Unconstrained(_))
    }

    /// Materialize the effective coin matrices for a graph: per node for
    /// spatial placement, per step for temporal.
    pub fn materialize(&self, g: &Graph) -> Result<CoinMatrices> {
        if self.dim != g.d_max() {
            return Err(CoreError::ShapeMismatch(format!(
                "coin dimension {} does not match graph slot dimension {}",
                self.dim,
                g.d_max()
            )));
        }
        if self.placement == CoinPlacement::Spatial && self.count != g.n_nodes() {
            return Err(CoreError::ShapeMismatch(format!(
                "spatial coin set holds {} coins for a {}-node graph",
                self.count,
                g.n_nodes()
            )));
        }
        let d = self.dim;
        let n = match self.placement {
            CoinPlacement::Spatial => g.n_nodes(),
            CoinPlacement::Temporal => self.count,
        };
        let mut re = Vec::with_capacity(n);
        let mut im: Option<Vec<Array2<f64>>> = self.is_complex().then(Vec::new);
        for idx in 0..n {
            // Spatial coins shrink to the node's real degree.
            let eff = match self.placement {
                CoinPlacement::Spatial => g.degree(idx).min(d),
                CoinPlacement::Temporal => d,
            };
            let (m_re, m_im) = match &self.params {
                CoinParams::FixedGrover => (embed_block(&grover_coin(eff.max(1)), d), None),
                CoinParams::Unconstrained(mats) => (embed_block_of(&mats[idx], eff, d), None),
                CoinParams::Unitary { params, complex } => params[idx].build_effective(eff, *complex),
            };
            re.push(m_re);
            if let Some(ims) = im.as_mut() {
                ims.push(m_im.unwrap_or_else(|| Array2::zeros((d, d))));
            }
        }
        Ok(CoinMatrices { re, im })
    }
}

/// Materialized effective coins, indexed by node or step.
#[derive(Debug, Clone)]
pub struct CoinMatrices {
    pub re: Vec<Array2<f64>>,
    pub im: Option<Vec<Array2<f64>>>,
}

impl CoinMatrices {
    pub fn len(&self) -> usize {
        self.re.len()
    }

    pub fn is_empty(&self) -> bool {
        self.re.is_empty()
    }
}

/// Copy `block` into the top-left corner of a d x d identity.
fn embed_block(block: &Array2<f64>, d: usize) -> Array2<f64> {
    let k = block.nrows();
    let mut m = Array2::eye(d);
    for i in 0..k.min(d) {
        for j in 0..k.min(d) {
            m[[i, j]] = block[[i, j]];
        }
    }
    m
}

/// Top-left eff x eff block of `mat` embedded in a d x d identity.
fn embed_block_of(mat: &Array2<f64>, eff: usize, d: usize) -> Array2<f64> {
    let mut m = Array2::eye(d);
    for i in 0..eff {
        for j in 0..eff {
            m[[i, j]] = mat[[i, j]];
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grover_small_dims() {
        assert_eq!(grover_coin(1), Array2::from_shape_vec((1, 1), vec![1.0]).unwrap());
        let g2 = grover_coin(2);
        assert_eq!(g2[[0, 0]], 0.0);
        assert_eq!(g2[[0, 1]], 1.0);
        let g3 = grover_coin(3);
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { -1.0 / 3.0 } else { 2.0 / 3.0 };
                assert!((g3[[i, j]] - expect).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn grover_is_unitary_and_permutation_invariant() {
        use itertools::Itertools;
        for d in 1..=6 {
            let g = grover_coin(d);
            let gram = g.t().dot(&g);
            for i in 0..d {
                for j in 0..d {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((gram[[i, j]] - expect).abs() < 1e-12);
                }
            }
            // P G P^T = G for every permutation P.
            for perm in (0..d).permutations(d) {
                for i in 0..d {
                    for j in 0..d {
                        assert!((g[[perm[i], perm[j]]] - g[[i, j]]).abs() < 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn spatial_grover_embeds_identity_padding() {
        let g = crate::graph::star_graph(3).regularized();
        let coins = CoinSet::fixed_grover(CoinPlacement::Spatial, g.d_max(), g.n_nodes());
        let mats = coins.materialize(&g).unwrap();
        // Leaf 1 has degree 1: Grover(1) = [1], padding identity.
        assert_eq!(mats.re[1], Array2::eye(3));
        // Center has degree 3: full Grover.
        assert_eq!(mats.re[0], grover_coin(3));
    }

    #[test]
    fn materialize_validates_shapes() {
        let g = crate::graph::cycle_graph(4);
        let coins = CoinSet::fixed_grover(CoinPlacement::Spatial, 2, 3);
        assert!(coins.materialize(&g).is_err());
        let coins = CoinSet::fixed_grover(CoinPlacement::Temporal, 3, 2);
        assert!(coins.materialize(&g).is_err());
    }
}
