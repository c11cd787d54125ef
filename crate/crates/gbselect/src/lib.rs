//! Toolkit for deciding when Groebner-basis preconditioning pays off.
//!
//! Cylindrical algebraic decomposition (CAD) of a semi-algebraic problem is
//! often cheaper when the equational constraints are first replaced by their
//! Groebner basis, but not always: sometimes the basis inflates the
//! decomposition instead. This crate implements the full pipeline for
//! predicting, ahead of time, which of the two outcomes to expect:
//!
//! * exact sparse polynomial arithmetic over arbitrary-precision rationals
//!   ([`polynomial`]),
//! * reduced Groebner bases under the pure lexicographic order induced by the
//!   CAD variable order ([`groebner`]),
//! * structural features of a problem before and after preconditioning,
//!   together with the classic "total number of indeterminates" baseline
//!   heuristic ([`features`]),
//! * a from-scratch soft-margin RBF support vector machine trained by
//!   sequential minimal optimization ([`svm`]),
//! * standardization, stratified splitting, cross-validation and grid search
//!   ([`model_selection`]),
//! * filter and wrapper feature selection ([`feature_selection`]),
//! * random problem generation and file formats ([`dataset`]),
//! * and a command-line front end ([`cli`]).

pub mod cli;
pub mod dataset;
pub mod feature_selection;
pub mod features;
pub mod groebner;
pub mod model_selection;
pub mod polynomial;
pub mod svm;

/// All randomness flows from one user-facing seed. Each randomized stage
/// draws from its own ChaCha stream of that seed, so stages stay independent
/// and reproducible no matter which subset of them runs.
pub const GENERATION_STREAM: u64 = 1;
/// Stream for train/test splitting; see [`GENERATION_STREAM`].
pub const SPLIT_STREAM: u64 = 2;
/// Stream for cross-validation fold assignment; see [`GENERATION_STREAM`].
pub const FOLDS_STREAM: u64 = 3;
