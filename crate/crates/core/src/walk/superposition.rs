//! Walker superpositions: a (walker, node, slot) amplitude tensor.
//!
//! Amplitudes are complex-capable; the imaginary part is allocated only
//! when a walk actually uses complex coins or amplitudes, so the common
//! real-valued configurations pay for one tensor.

use ndarray::Array3;

use crate::graph::Graph;

#[derive(Debug, Clone, PartialEq)]
pub struct Superposition {
    re: Array3<f64>,
    im: Option<Array3<f64>>,
}

impl Superposition {
    pub fn zeros(n_walkers: usize, n_nodes: usize, n_slots: usize, complex: bool) -> Self {
        Self {
            re: Array3::zeros((n_walkers, n_nodes, n_slots)),
            im: complex.then(|| Array3::zeros((n_walkers, n_nodes, n_slots))),
        }
    }

    /// (walkers, nodes, slots).
    pub fn shape(&self) -> (usize, usize, usize) {
        let s = self.re.dim();
        (s.0, s.1, s.2)
    }

    pub fn is_complex(&self) -> bool {
        self.im.is_some()
    }

    pub fn re(&self) -> &Array3<f64> {
        &self.re
    }

    pub fn im(&self) -> Option<&Array3<f64>> {
        self.im.as_ref()
    }

    pub fn re_mut(&mut self) -> &mut Array3<f64> {
        &mut self.re
    }

    pub fn im_mut(&mut self) -> Option<&mut Array3<f64>> {
        self.im.as_mut()
    }

    /// Allocate the imaginary part if absent.
    pub fn ensure_complex(&mut self) {
        if self.im.is_none() {
            self.im = Some(Array3::zeros(self.re.dim()));
        }
    }

    /// Squared-modulus sum per walker.
    pub fn walker_norms_sq(&self) -> Vec<f64> {
        let (w, _, _) = self.shape();
        let mut out = vec![0.0; w];
        for (idx, row) in self.re.outer_iter().enumerate() {
            out[idx] = row.iter().map(|a| a * a).sum();
        }
        if let Some(im) = &self.im {
            for (idx, row) in im.outer_iter().enumerate() {
                out[idx] += row.iter().map(|a| a * a).sum::<f64>();
            }
        }
        out
    }
}

/// One walker per node with equal spin along each real incident edge
/// (amplitude 1/sqrt(deg) on the real slots, zero on padding). A node
/// with no real edges keeps its walker parked on slot 0.
pub fn init_uniform_superposition(g: &Graph) -> Superposition {
    let n = g.n_nodes();
    let d = g.d_max();
    let mut s = Superposition::zeros(n, n, d, false);
    for w in 0..n {
        let deg = g.degree(w);
        if deg == 0 {
            if d > 0 {
                s.re[[w, w, 0]] = 1.0;
            }
            continue;
        }
        let amp = 1.0 / (deg as f64).sqrt();
        for i in 0..deg {
            s.re[[w, w, i]] = amp;
        }
    }
    s
}

/// A single walker with the given spin amplitudes at one node.
pub fn localized_superposition(
    n_nodes: usize,
    n_slots: usize,
    node: usize,
    spin_re: &[f64],
    spin_im: Option<&[f64]>,
) -> Superposition {
    assert!(node < n_nodes && spin_re.len() <= n_slots);
    let mut s = Superposition::zeros(1, n_nodes, n_slots, spin_im.is_some());
    for (i, &a) in spin_re.iter().enumerate() {
        s.re[[0, node, i]] = a;
    }
    if let (Some(vals), Some(im)) = (spin_im, s.im.as_mut()) {
        for (i, &a) in vals.iter().enumerate() {
            im[[0, node, i]] = a;
        }
    }
    s
}
