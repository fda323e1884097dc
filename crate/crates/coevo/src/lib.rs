//! Subjective-preference game analysis for populations in which cognitive
//! sophistication buys the ability to deceive.
//!
//! The crate models a symmetric fitness game played by a population of types,
//! where each type couples a subjective utility function with a costly
//! cognitive level. Higher levels deceive lower levels with some probability;
//! non-deceived pairs play Nash equilibria of their subjective games, while
//! deception matches resolve to the deceiver's favourite profile among the
//! victim's undominated actions. On top of that sit:
//!
//! - equilibrium machinery: best replies, undominated strategies (via an
//!   exact dominance LP), Nash enumeration, deception equilibria and their
//!   fitness-maximising refinement ([`prefs`]);
//! - population accounting: configurations, match and expected fitness,
//!   balance ([`population`]);
//! - stability analysis: type games, neutral/evolutionary stability of
//!   strategies, certification of pure stable configurations, constructive
//!   mutant refutations, and closed-form heterogeneous constructions for
//!   Rock-Paper-Scissors ([`stability`]) and Hawk-Dove ([`interdependent`]);
//! - replicator dynamics with an adaptive integrator for empirical stability
//!   probes ([`dynamics`]).
//!
//! Arithmetic is exact (arbitrary-precision rationals) whenever inputs are
//! given as integer, decimal, or `p/q` literals; the stability
//! characterisations are knife-edge equalities, and exactness keeps the
//! certify/refute boundary honest. See the `examples/` directory for one
//! runnable walkthrough per capability, and the `coevo` binary for the
//! `analyze` / `certify` / `refute` / `construct` / `simulate` verbs.

pub mod dynamics;
pub mod env;
pub mod error;
pub mod game;
pub mod interdependent;
pub mod io;
pub mod linalg;
pub mod lp;
pub mod population;
pub mod prefs;
pub mod report;
pub mod scalar;
pub mod stability;

pub use error::{Error, Result};
pub use scalar::Scalar;
