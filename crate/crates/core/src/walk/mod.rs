//! The coined quantum walk engine.
//!
//! One step is a coin applied to every node's slot vector followed by
//! the shift permutation; `walk` alternates the two, and
//! `diffusion_matrix` collapses the final superposition into per-walker
//! node probabilities.

mod classical;
mod coin;
pub mod inspect;
mod superposition;
mod unitary;

pub use classical::classical_walk_distribution;
pub use coin::{grover_coin, CoinMatrices, CoinParams, CoinPlacement, CoinSet};
pub use superposition::{init_uniform_superposition, localized_superposition, Superposition};
pub use unitary::{n_rotations, rotation_index, unitary_backward, UnitaryGrads, UnitaryParams};

use ndarray::s;

use crate::graph::{Graph, ShiftPermutation};
use crate::{CoreError, Result};

/// Default cap on full-walker-set graphs; a walker per node costs
/// O(N^2 d) amplitudes, which thrashes well before it overflows.
pub const DEFAULT_NODE_BUDGET: usize = 2000;

/// Multiply each node's slot vector by that node's (spatial) or this
/// step's (temporal) coin.
pub fn apply_coin(s: &Superposition, coins: &CoinSet, g: &Graph, step: usize) -> Result<Superposition> {
    let mats = coins.materialize(g)?;
    apply_coin_mats(s, &mats, coins.placement, step)
}

pub(crate) fn apply_coin_mats(
    s: &Superposition,
    mats: &CoinMatrices,
    placement: CoinPlacement,
    step: usize,
) -> Result<Superposition> {
    let (w, n, d) = s.shape();
    if placement == CoinPlacement::Temporal && step >= mats.len() {
        return Err(CoreError::InvalidConfig(format!(
            "step {} out of range for {} temporal coins",
            step,
            mats.len()
        )));
    }
    let complex = s.is_complex() || mats.im.is_some();
    let mut out = Superposition::zeros(w, n, d, complex);
    let zero = ndarray::Array3::<f64>::zeros((w, n, d));
    let s_im = s.im().unwrap_or(&zero);
    for v in 0..n {
        let idx = match placement {
            CoinPlacement::Spatial => v,
            CoinPlacement::Temporal => step,
        };
        let m_re = &mats.re[idx];
        let in_re = s.re().slice(s![.., v, ..]);
        let mut acc_re = in_re.dot(m_re);
        if let Some(ims) = &mats.im {
            let m_im = &ims[idx];
            let in_im = s_im.slice(s![.., v, ..]);
            acc_re = acc_re - in_im.dot(m_im);
            let acc_im = in_re.dot(m_im) + in_im.dot(m_re);
            out.im_mut().unwrap().slice_mut(s![.., v, ..]).assign(&acc_im);
        } else if s.is_complex() {
            let in_im = s_im.slice(s![.., v, ..]);
            out.im_mut().unwrap().slice_mut(s![.., v, ..]).assign(&in_im.dot(m_re));
        }
        out.re_mut().slice_mut(s![.., v, ..]).assign(&acc_re);
    }
    Ok(out)
}

/// Permute amplitudes along the shift; self-loop and padding slots stay
/// put, so the norm is preserved exactly.
pub fn apply_shift(s: &Superposition, shift: &ShiftPermutation) -> Superposition {
    let (w, n, d) = s.shape();
    assert_eq!(
        (n, d),
        (shift.n_nodes(), shift.n_slots()),
        "shift domain must match the superposition"
    );
    let perm = shift.flat();
    let mut out = Superposition::zeros(w, n, d, s.is_complex());
    permute_walkers(s.re(), out.re_mut(), perm);
    if let (Some(src), Some(dst)) = (s.im(), out.im_mut()) {
        permute_walkers(src, dst, perm);
    }
    out
}

fn permute_walkers(src: &ndarray::Array3<f64>, dst: &mut ndarray::Array3<f64>, perm: &[usize]) {
    let len = perm.len();
    let src_flat = src.as_slice().expect("standard layout");
    let dst_flat = dst.as_slice_mut().expect("standard layout");
    for (w_idx, chunk) in src_flat.chunks_exact(len).enumerate() {
        let base = w_idx * len;
        for (p, &val) in chunk.iter().enumerate() {
            dst_flat[base + perm[p]] = val;
        }
    }
}

/// Run `steps` coin+shift alternations.
pub fn walk(
    s0: &Superposition,
    coins: &CoinSet,
    g: &Graph,
    shift: &ShiftPermutation,
    steps: usize,
) -> Result<Superposition> {
    let mats = coins.materialize(g)?;
    let mut s = s0.clone();
    if coins.is_complex() {
        s.ensure_complex();
    }
    for t in 0..steps {
        s = apply_coin_mats(&s, &mats, coins.placement, t)?;
        s = apply_shift(&s, shift);
    }
    Ok(s)
}

/// Like [`walk`], but keeps the superposition after every step (index 0
/// is the input) together with the materialized coins, for reverse-mode
/// differentiation.
pub(crate) fn walk_recorded(
    s0: &Superposition,
    coins: &CoinSet,
    g: &Graph,
    shift: &ShiftPermutation,
    steps: usize,
) -> Result<(Vec<Superposition>, CoinMatrices)> {
    let mats = coins.materialize(g)?;
    let mut states = Vec::with_capacity(steps + 1);
    let mut s = s0.clone();
    if coins.is_complex() {
        s.ensure_complex();
    }
    states.push(s);
    for t in 0..steps {
        let coined = apply_coin_mats(states.last().unwrap(), &mats, coins.placement, t)?;
        states.push(apply_shift(&coined, shift));
    }
    Ok((states, mats))
}

/// Collapse a superposition into per-walker node probabilities:
/// P[w][v] = sum_i |amp(w, v, i)|^2. No normalization is applied, so
/// non-unitary coins yield rows that need not sum to one.
pub fn diffusion_matrix(s: &Superposition) -> ndarray::Array2<f64> {
    let (w, n, _) = s.shape();
    let mut p = ndarray::Array2::zeros((w, n));
    for ((wi, vi, _), &a) in s.re().indexed_iter() {
        p[[wi, vi]] += a * a;
    }
    if let Some(im) = s.im() {
        for ((wi, vi, _), &a) in im.indexed_iter() {
            p[[wi, vi]] += a * a;
        }
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_shift, cycle_graph, Graph};
    use ndarray::array;

    #[test]
    fn identity_coin_is_noop() {
        let g = cycle_graph(3);
        let coins = CoinSet::unconstrained(
            CoinPlacement::Temporal,
            vec![ndarray::Array2::eye(2)],
        )
        .unwrap();
        let s = init_uniform_superposition(&g);
        let out = apply_coin(&s, &coins, &g, 0).unwrap();
        assert_eq!(s.re(), out.re());
    }

    #[test]
    fn grover_d1_is_identity_on_k2() {
        let g = Graph::from_edge_list(&[(0, 1)], 2).unwrap();
        let coins = CoinSet::fixed_grover(CoinPlacement::Spatial, 1, 2);
        let s = init_uniform_superposition(&g);
        let out = apply_coin(&s, &coins, &g, 0).unwrap();
        assert_eq!(s.re(), out.re());
    }

    #[test]
    fn permutation_coin_swaps_slots() {
        let g = cycle_graph(3);
        let swap = array![[0.0, 1.0], [1.0, 0.0]];
        let coins = CoinSet::unconstrained(CoinPlacement::Temporal, vec![swap]).unwrap();
        let mut s = Superposition::zeros(1, 3, 2, false);
        s.re_mut()[[0, 1, 0]] = 0.8;
        s.re_mut()[[0, 1, 1]] = 0.6;
        let out = apply_coin(&s, &coins, &g, 0).unwrap();
        assert_eq!(out.re()[[0, 1, 0]], 0.6);
        assert_eq!(out.re()[[0, 1, 1]], 0.8);
    }

    #[test]
    fn temporal_step_out_of_range_errors() {
        let g = cycle_graph(3);
        let coins = CoinSet::fixed_grover(CoinPlacement::Temporal, 2, 2);
        let s = init_uniform_superposition(&g);
        assert!(apply_coin(&s, &coins, &g, 2).is_err());
        assert!(apply_coin(&s, &coins, &g, 1).is_ok());
    }

    #[test]
    fn shift_moves_k2_walker() {
        let g = Graph::from_edge_list(&[(0, 1)], 2).unwrap();
        let shift = build_shift(&g);
        let s = init_uniform_superposition(&g);
        let out = apply_shift(&s, &shift);
        assert_eq!(out.re()[[0, 1, 0]], 1.0);
        assert_eq!(out.re()[[0, 0, 0]], 0.0);
    }

    #[test]
    fn shift_twice_is_identity() {
        let g = crate::graph::star_graph(4).regularized();
        let shift = build_shift(&g);
        let mut s = init_uniform_superposition(&g);
        // Put some mass on padding slots too.
        s.re_mut()[[2, 2, 3]] = 0.5;
        let back = apply_shift(&apply_shift(&s, &shift), &shift);
        assert_eq!(s.re(), back.re());
    }

    #[test]
    fn tour_coin_rotates_cycle() {
        // Walker with spin concentrated on slot 1 tours forward one node
        // per step under the swap coin.
        let g = cycle_graph(3);
        let shift = build_shift(&g);
        let coins = CoinSet::unconstrained(
            CoinPlacement::Temporal,
            vec![array![[0.0, 1.0], [1.0, 0.0]]; 3],
        )
        .unwrap();
        let s0 = localized_superposition(3, 2, 0, &[0.0, 1.0], None);
        let mut expected_node = 0usize;
        let mut s = s0.clone();
        for t in 0..3 {
            s = walk(&s0, &coins, &g, &shift, t + 1).unwrap();
            expected_node = (expected_node + 1) % 3;
            let p = diffusion_matrix(&s);
            assert!((p[[0, expected_node]] - 1.0).abs() < 1e-12, "step {t}");
        }
        let _ = s;
    }

    #[test]
    fn walk_zero_steps_is_identity() {
        let g = cycle_graph(4);
        let shift = build_shift(&g);
        let coins = CoinSet::fixed_grover(CoinPlacement::Spatial, 2, 4);
        let s = init_uniform_superposition(&g);
        let out = walk(&s, &coins, &g, &shift, 0).unwrap();
        assert_eq!(s.re(), out.re());
    }

    #[test]
    fn diffusion_at_t0_is_identity() {
        let g = cycle_graph(5);
        let p = diffusion_matrix(&init_uniform_superposition(&g));
        for w in 0..5 {
            for v in 0..5 {
                let expect = if w == v { 1.0 } else { 0.0 };
                assert!((p[[w, v]] - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn k2_one_grover_step_swaps() {
        let g = Graph::from_edge_list(&[(0, 1)], 2).unwrap();
        let shift = build_shift(&g);
        let coins = CoinSet::fixed_grover(CoinPlacement::Spatial, 1, 2);
        let s = walk(&init_uniform_superposition(&g), &coins, &g, &shift, 1).unwrap();
        let p = diffusion_matrix(&s);
        assert_eq!(p[[0, 0]], 0.0);
        assert_eq!(p[[0, 1]], 1.0);
        assert_eq!(p[[1, 0]], 1.0);
        assert_eq!(p[[1, 1]], 0.0);
    }

    #[test]
    fn unconstrained_rows_need_not_be_stochastic() {
        let g = Graph::from_edge_list(&[(0, 1)], 2).unwrap();
        let shift = build_shift(&g);
        let coins =
            CoinSet::unconstrained(CoinPlacement::Temporal, vec![array![[2.0]]]).unwrap();
        let s = walk(&init_uniform_superposition(&g), &coins, &g, &shift, 1).unwrap();
        let p = diffusion_matrix(&s);
        assert!((p.row(0).sum() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn determinism_bitwise() {
        let g = crate::graph::grid_graph(3, 3).regularized();
        let shift = build_shift(&g);
        let params = vec![UnitaryParams::identity(4); 5]
            .into_iter()
            .enumerate()
            .map(|(i, mut p)| {
                p.thetas.iter_mut().enumerate().for_each(|(j, t)| *t = (i + j) as f64 * 0.37);
                p
            })
            .collect();
        let coins = CoinSet::unitary(CoinPlacement::Temporal, params, false).unwrap();
        let s0 = init_uniform_superposition(&g);
        let a = diffusion_matrix(&walk(&s0, &coins, &g, &shift, 5).unwrap());
        let b = diffusion_matrix(&walk(&s0, &coins, &g, &shift, 5).unwrap());
        assert_eq!(a, b);
    }
}
