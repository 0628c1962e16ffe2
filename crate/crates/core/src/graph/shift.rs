//! The shift permutation: slot (v, i) swaps with slot (u, j) when u is
//! the i-th neighbor of v and v is the j-th neighbor of u. Self-loop
//! padding slots are fixed points, so the permutation is an involution
//! on the full n_nodes x d slot space.

use super::Graph;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftPermutation {
    n_nodes: usize,
    n_slots: usize,
    perm: Vec<usize>,
}

impl ShiftPermutation {
    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    /// Slot-space dimension d of the domain.
    pub fn n_slots(&self) -> usize {
        self.n_slots
    }

    /// Where slot (v, i) goes.
    pub fn map(&self, v: usize, i: usize) -> (usize, usize) {
        let t = self.perm[v * self.n_slots + i];
        (t / self.n_slots, t % self.n_slots)
    }

    /// Flat permutation over v * d + i indices.
    pub(crate) fn flat(&self) -> &[usize] {
        &self.perm
    }

    /// Swapped pairs, each listed once; fixed points omitted.
    pub fn pairs(&self) -> Vec<((usize, usize), (usize, usize))> {
        let d = self.n_slots;
        self.perm
            .iter()
            .enumerate()
            .filter(|&(src, &dst)| src < dst)
            .map(|(src, &dst)| ((src / d, src % d), (dst / d, dst % d)))
            .collect()
    }

    pub fn is_involution(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &t)| self.perm[t] == i)
    }
}

/// Build the shift from a graph's neighbor lists. Works on raw or
/// regularized graphs; any slot not backed by a real edge stays fixed.
pub fn build_shift(g: &Graph) -> ShiftPermutation {
    let n = g.n_nodes();
    let d = g.d_max();
    let mut perm: Vec<usize> = (0..n * d).collect();
    for v in 0..n {
        for (i, &u) in g.neighbors(v).iter().enumerate() {
            let j = g.slot_of(u, v).expect("symmetric neighbor lists");
            perm[v * d + i] = u * d + j;
        }
    }
    ShiftPermutation { n_nodes: n, n_slots: d, perm }
}
