//! Elementwise activations with their derivatives.

use ndarray::Array2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Activation {
    Identity,
    Relu,
    Sigmoid,
    /// Sigmoid rescaled to [lo, hi]; the bounds come from training-split
    /// target statistics and are not trainable.
    ScaledSigmoid { lo: f64, hi: f64 },
}

impl Activation {
    pub fn apply(&self, pre: &Array2<f64>) -> Array2<f64> {
        match *self {
            Activation::Identity => pre.clone(),
            Activation::Relu => pre.mapv(|x| x.max(0.0)),
            Activation::Sigmoid => pre.mapv(sigmoid),
            Activation::ScaledSigmoid { lo, hi } => pre.mapv(|x| lo + (hi - lo) * sigmoid(x)),
        }
    }

    /// Chain `g_out` through the activation evaluated at `pre`.
    pub fn backward(&self, pre: &Array2<f64>, g_out: &Array2<f64>) -> Array2<f64> {
        match *self {
            Activation::Identity => g_out.clone(),
            Activation::Relu => {
                let mut g = g_out.clone();
                g.zip_mut_with(pre, |gv, &p| {
                    if p <= 0.0 {
                        *gv = 0.0;
                    }
                });
                g
            }
            Activation::Sigmoid => {
                let mut g = g_out.clone();
                g.zip_mut_with(pre, |gv, &p| {
                    let s = sigmoid(p);
                    *gv *= s * (1.0 - s);
                });
                g
            }
            Activation::ScaledSigmoid { lo, hi } => {
                let scale = hi - lo;
                let mut g = g_out.clone();
                g.zip_mut_with(pre, |gv, &p| {
                    let s = sigmoid(p);
                    *gv *= scale * s * (1.0 - s);
                });
                g
            }
        }
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}
