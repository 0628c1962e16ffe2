//! Learned discrete-time quantum walks on graphs.
//!
//! A coined quantum walk evolves a superposition over (node, edge-slot)
//! pairs by alternating a coin operator on each node's slot space with a
//! shift that swaps amplitude across edges. Collapsing the final
//! superposition gives a diffusion matrix that mixes node features, and
//! both the coins and the initial superposition can be trained by
//! gradient descent. This crate provides:
//!
//! - [`graph`]: graphs with semantically ordered neighbor slots, edge
//!   ordering heuristics, and the shift permutation.
//! - [`walk`]: superposition evolution, coin operators (Grover, unitary
//!   parametrized, unconstrained), and diffusion/classical distributions.
//! - [`nn`]: fixed-vocabulary reverse-mode differentiation through the
//!   walk, dense heads, losses, optimizers, and the training loop.
//! - [`baselines`]: DCNN and GCNN diffusion layers under the same
//!   training harness.
//! - [`data`]: geographic k-NN graphs, TU-format classification corpora,
//!   Coulomb-matrix molecule graphs, padding and splitting.

pub mod baselines;
pub mod data;
pub mod error;
pub mod graph;
pub mod nn;
pub mod walk;

pub use error::CoreError;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, CoreError>;
