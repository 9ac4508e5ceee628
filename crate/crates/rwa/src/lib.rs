//! Random-walk adaptation (RWA) for unsupervised domain adaptation.
//!
//! Given a linear hypothesis trained on a labeled source domain and an
//! unlabeled target dataset, RWA performs a random walk over candidate
//! target labelings: each step draws a class-balanced bootstrap sample of
//! the pseudo-labeled target, retrains a linear SVM on it, combines the
//! result with the source hypothesis, and relabels the target. The
//! majority vote over visited labelings is the final prediction.
//!
//! The crate is organized around that loop:
//!
//! - [`data`] — sparse datasets, svmlight/CSV ingestion, preprocessing
//!   recipes, and synthetic two-domain generators.
//! - [`linsvm`] — a from-scratch L1-hinge linear SVM trained by dual
//!   coordinate descent, one-versus-all multiclass, and C selection by
//!   cross-validation.
//! - [`adapt`] — the random walk itself: balanced bootstrap, iteration
//!   loop, diagnostics trace, and majority vote.
//! - [`chain`] — the stability theory made executable: labeling-state
//!   enumeration on 1-D instances, transition-matrix estimation,
//!   stationary distributions, and the closed-form bounds.
//! - [`cli`] — reproducible experiment commands used by the `rwa` binary.
//!
//! Every randomized operation takes an explicit seed and is deterministic
//! given its arguments. See the `examples/` directory for one runnable
//! program per capability.

pub mod adapt;
pub mod chain;
pub mod cli;
pub mod data;
mod error;
pub mod linsvm;
pub mod report;

pub use error::{Error, Result};
