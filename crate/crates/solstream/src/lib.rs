//! Streaming sparse linear classification.
//!
//! Online learners that train in one pass over a labeled stream and produce
//! sparse linear classifiers via L1 soft-thresholding of a dual-averaged
//! subgradient sum. The family covers a first-order learner, second-order
//! learners (full-matrix and diagonal) that rescale by an inverse
//! second-moment proxy, and cost-sensitive variants for imbalanced streams,
//! alongside seven classic online baselines for comparison.
//!
//! The crate is organized around small composable pieces:
//!
//! - [`sparse`]: sparse examples, dense weights, soft-thresholding.
//! - [`data`]: LIBSVM IO, seeded permutations, a synthetic stream generator,
//!   imbalanced subsampling.
//! - [`learner`]: the sparse online learner family behind [`learner::OnlineModel`].
//! - [`baselines`]: truncated-gradient, forward-backward, adaptive, and
//!   passive-aggressive style comparison algorithms.
//! - [`eval`]: online/offline evaluation, regret traces, sparsity sweeps.
//! - [`bench`]: the experiment runner behind the `solstream` binary.
//!
//! See the `examples/` directory for runnable entry points covering each
//! capability.

pub mod baselines;
pub mod bench;
pub mod data;
pub mod error;
pub mod eval;
pub mod learner;
pub mod sparse;

pub use data::{Label, SparseExample};
pub use error::{Error, Result};
pub use learner::{AlgoKind, LearnerConfig, OnlineModel};
pub use sparse::{DenseWeights, SparseVector};
