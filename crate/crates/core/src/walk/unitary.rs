//! Unitary coin parametrization: a product of two-plane rotations and a
//! diagonal phase matrix, U = D * R(2,1) * R(3,1) * R(3,2) * ...
//! (rotation index k ascending outer, l ascending inner, D applied
//! last). Each rotation touches the {l, k} plane:
//!
//!   M[k][k] = e^{i phi} cos(theta)    M[k][l] = -e^{i phi} sin(theta)
//!   M[l][k] = sin(theta)              M[l][l] = cos(theta)
//!
//! With all phases zero the product is real orthogonal, so real-mode
//! walks stay in real arithmetic. Gradient updates move the angles, not
//! the matrix entries, so the materialized coin is unitary by
//! construction after every optimizer step.

use ndarray::{Array1, Array2};

use crate::{CoreError, Result};

/// Rotation angles and diagonal phases for one coin.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryParams {
    dim: usize,
    pub thetas: Array1<f64>,
    pub phis: Array1<f64>,
    pub diag: Array1<f64>,
}

/// Gradients matching [`UnitaryParams`] shapes.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryGrads {
    pub thetas: Array1<f64>,
    pub phis: Array1<f64>,
    pub diag: Array1<f64>,
}

impl UnitaryParams {
    pub fn identity(dim: usize) -> Self {
        let n = n_rotations(dim);
        Self {
            dim,
            thetas: Array1::zeros(n),
            phis: Array1::zeros(n),
            diag: Array1::zeros(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn validate(&self) -> Result<()> {
        let n = n_rotations(self.dim);
        if self.thetas.len() != n || self.phis.len() != n || self.diag.len() != self.dim {
            return Err(CoreError::ShapeMismatch(format!(
                "unitary params for dim {} need {} rotation angles and {} phases",
                self.dim,
                n,
                self.dim
            )));
        }
        Ok(())
    }

    /// Materialize the full-dimension coin.
    pub fn build(&self, complex: bool) -> (Array2<f64>, Option<Array2<f64>>) {
        self.build_effective(self.dim, complex)
    }

    /// Materialize using only the rotations and phases inside the
    /// leading `eff` x `eff` block; the remaining dimensions stay
    /// identity. This is how a shared-shape parameter block acts at a
    /// node whose degree is below the slot dimension.
    pub fn build_effective(&self, eff: usize, complex: bool) -> (Array2<f64>, Option<Array2<f64>>) {
        let mut acc = CMat::identity(self.dim);
        for f in self.factors(eff, complex) {
            acc = acc.mul(&f.materialize(self.dim));
        }
        if complex {
            (acc.re, Some(acc.im))
        } else {
            (acc.re, None)
        }
    }

    fn factors(&self, eff: usize, complex: bool) -> Vec<Factor> {
        let mut out = Vec::with_capacity(1 + n_rotations(eff));
        if complex {
            out.push(Factor::Diag { eff, phases: self.diag.to_vec() });
        }
        for k in 1..eff {
            for l in 0..k {
                let p = rotation_index(k, l);
                let phi = if complex { self.phis[p] } else { 0.0 };
                out.push(Factor::Rotation { k, l, index: p, theta: self.thetas[p], phi });
            }
        }
        out
    }
}

/// Number of rotation planes for a `dim`-dimensional unitary.
pub fn n_rotations(dim: usize) -> usize {
    dim * dim.saturating_sub(1) / 2
}

/// Flat index of the (k, l) rotation, k > l, in product order.
pub fn rotation_index(k: usize, l: usize) -> usize {
    debug_assert!(l < k);
    k * (k - 1) / 2 + l
}

/// Reverse-mode gradients of a scalar loss through `build_effective`,
/// given the loss gradient with respect to the materialized matrix.
pub fn unitary_backward(
    params: &UnitaryParams,
    eff: usize,
    complex: bool,
    g_re: &Array2<f64>,
    g_im: Option<&Array2<f64>>,
) -> UnitaryGrads {
    let dim = params.dim;
    let factors = params.factors(eff, complex);
    let mats: Vec<CMat> = factors.iter().map(|f| f.materialize(dim)).collect();

    // prefix[j] = F_0 ... F_{j-1}, suffix[j] = F_{j+1} ... F_m
    let m = mats.len();
    let mut prefix = Vec::with_capacity(m + 1);
    prefix.push(CMat::identity(dim));
    for f in &mats {
        let last = prefix.last().unwrap().mul(f);
        prefix.push(last);
    }
    let mut suffix = vec![CMat::identity(dim); m + 1];
    for j in (0..m).rev() {
        suffix[j] = mats[j].mul(&suffix[j + 1]);
    }

    let g_u = CMat {
        re: g_re.clone(),
        im: g_im.cloned().unwrap_or_else(|| Array2::zeros((dim, dim))),
    };

    let mut grads = UnitaryGrads {
        thetas: Array1::zeros(params.thetas.len()),
        phis: Array1::zeros(params.phis.len()),
        diag: Array1::zeros(params.diag.len()),
    };

    for (j, factor) in factors.iter().enumerate() {
        // U = L * F_j * S with L = prefix[j], S = suffix[j + 1].
        let l = &prefix[j];
        let s = &suffix[j + 1];
        let g_h = l.transpose_mul_left(&g_u); // gradient of H = F_j * S
        let g_f = s.mul_transpose_right(&g_h); // gradient of F_j
        match *factor {
            Factor::Rotation { k, l: lo, index, theta, phi } => {
                let (st, ct) = theta.sin_cos();
                let (sp, cp) = phi.sin_cos();
                // d/dtheta of the four live entries.
                let mut gt = g_f.re[[lo, lo]] * (-st) + g_f.re[[lo, k]] * ct;
                gt += g_f.re[[k, lo]] * (-cp * ct) + g_f.im[[k, lo]] * (-sp * ct);
                gt += g_f.re[[k, k]] * (-cp * st) + g_f.im[[k, k]] * (-sp * st);
                grads.thetas[index] += gt;
                if complex {
                    let mut gp = g_f.re[[k, lo]] * (sp * st) + g_f.im[[k, lo]] * (-cp * st);
                    gp += g_f.re[[k, k]] * (-sp * ct) + g_f.im[[k, k]] * (cp * ct);
                    grads.phis[index] += gp;
                }
            }
            Factor::Diag { eff, ref phases } => {
                for (idx, &delta) in phases.iter().enumerate().take(eff) {
                    let (sd, cd) = delta.sin_cos();
                    grads.diag[idx] += g_f.re[[idx, idx]] * (-sd) + g_f.im[[idx, idx]] * cd;
                }
            }
        }
    }
    grads
}

enum Factor {
    Diag { eff: usize, phases: Vec<f64> },
    Rotation { k: usize, l: usize, index: usize, theta: f64, phi: f64 },
}

impl Factor {
    fn materialize(&self, dim: usize) -> CMat {
        let mut m = CMat::identity(dim);
        match *self {
            Factor::Diag { eff, ref phases } => {
                for (idx, &delta) in phases.iter().enumerate().take(eff) {
                    let (sd, cd) = delta.sin_cos();
                    m.re[[idx, idx]] = cd;
                    m.im[[idx, idx]] = sd;
                }
            }
            Factor::Rotation { k, l, theta, phi, .. } => {
                let (st, ct) = theta.sin_cos();
                let (sp, cp) = phi.sin_cos();
                m.re[[l, l]] = ct;
                m.re[[l, k]] = st;
                m.re[[k, l]] = -cp * st;
                m.im[[k, l]] = -sp * st;
                m.re[[k, k]] = cp * ct;
                m.im[[k, k]] = sp * ct;
            }
        }
        m
    }
}

/// Dense complex matrix as a real/imaginary pair.
#[derive(Clone)]
struct CMat {
    re: Array2<f64>,
    im: Array2<f64>,
}

impl CMat {
    fn identity(dim: usize) -> Self {
        Self { re: Array2::eye(dim), im: Array2::zeros((dim, dim)) }
    }

    fn mul(&self, other: &CMat) -> CMat {
        CMat {
            re: self.re.dot(&other.re) - self.im.dot(&other.im),
            im: self.re.dot(&other.im) + self.im.dot(&other.re),
        }
    }

    /// Gradient of B in Z = self * B, given gradient of Z.
    fn transpose_mul_left(&self, g_z: &CMat) -> CMat {
        CMat {
            re: self.re.t().dot(&g_z.re) + self.im.t().dot(&g_z.im),
            im: self.re.t().dot(&g_z.im) - self.im.t().dot(&g_z.re),
        }
    }

    /// Gradient of A in Z = A * self, given gradient of Z.
    fn mul_transpose_right(&self, g_z: &CMat) -> CMat {
        CMat {
            re: g_z.re.dot(&self.re.t()) + g_z.im.dot(&self.im.t()),
            im: g_z.im.dot(&self.re.t()) - g_z.re.dot(&self.im.t()),
        }
    }
}
