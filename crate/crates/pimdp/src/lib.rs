//! Qualitative possibilistic sequential decision making.
//!
//! This crate models uncertainty on a finite ordered scale instead of with
//! probabilities: transition, observation and belief values rank how
//! plausible outcomes are, and a policy is good when some trajectory is both
//! entirely plausible and satisfactory (the optimistic max-min criterion).
//! That makes the models usable when observation functions or initial
//! beliefs are too imprecisely known to elicit probabilities.
//!
//! Three model classes are covered:
//!
//! - [`mdp`]: fully observable models, finite- and infinite-horizon solvers,
//!   plus an independent widest-path optimality oracle;
//! - [`pomdp`]: flat partially observable models, qualitative belief
//!   revision, belief-space enumeration and the flattening translations;
//! - [`momdp`]: mixed-observable models whose state factors into a visible
//!   and a hidden part, solved over the exponentially smaller
//!   visible-state x hidden-belief space.
//!
//! [`grid`] builds the target-recognition benchmark: a robot on a grid must
//! identify and reach the good one of two known target locations under an
//! imprecise observation model, with a discounted probabilistic baseline and
//! a seeded simulator for comparing the two agents under mis-specification.
//! [`modelfile`] reads and writes models as JSON documents.
//!
//! The `pimdp` binary exposes all of it as `solve`, `enumerate`, `bench`,
//! `gen-grid` and `simulate` subcommands; the `examples/` directory walks
//! through each capability.

pub mod beliefs;
pub mod error;
pub mod grid;
pub mod mdp;
pub mod modelfile;
pub mod momdp;
pub mod pomdp;
pub mod random;
pub mod scale;

pub use error::{Error, Result};
pub use scale::{
    make_scale, order_reverse, sugeno_optimistic, Level, PossibilityDistribution, PossibilityRow,
    QualitativeScale,
};

/// Default cap used by trajectory and belief-space enumerations.
pub const DEFAULT_ENUMERATION_CAP: u64 = 10_000_000;
