//! Simulation and verification toolkit for device-independent quantum key
//! distribution built on synchronous correlations with three measurement
//! bases and binary outcomes.
//!
//! - [`hilbert`]: dense operators, projection-valued measures, Schmidt decomposition
//! - [`correlations`]: correlation tables, bias form, structural predicates
//! - [`bell`]: synchronous Bell functionals and classification
//! - [`protocol`]: seeded Monte Carlo runs of the two key-distribution protocols
//! - [`adversary`]: the basis-guessing adversary and its feasibility thresholds
//! - [`rigidity`]: two-projection canonical forms and the perturbation bounds
//! - [`cli`]: the `syncqkd` command-line surface

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod adversary;
pub mod bell;
pub mod cli;
pub mod correlations;
pub mod error;
pub mod hilbert;
pub mod json;
pub mod protocol;
pub mod rigidity;

pub use error::{Error, Result};

/// Number of measurement bases `|X|`.
pub const INPUTS: usize = 3;
/// Number of outcomes `|Y|`.
pub const OUTPUTS: usize = 2;
