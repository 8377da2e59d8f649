//! Exact verification and synthesis of randomized voting rules.
//!
//! A social decision scheme maps a profile of strict preferences to a
//! lottery over alternatives. This crate evaluates such rules, checks
//! fairness and decisiveness axioms by exhaustive sweeps, decides
//! strategyproofness against restricted sets of utility functions, and
//! synthesizes rules (or refutes their existence) by exact linear
//! programming. All arithmetic is over arbitrary-precision rationals.

pub mod axioms;
pub mod error;
pub mod lottery;
pub mod manip;
pub mod profile;
pub mod rational;
pub mod rules;
pub mod synth;
pub mod utility;

pub use error::{Error, Result};
pub use lottery::Lottery;
pub use profile::{Alternative, Preference, Profile, RankMatrix};
pub use rational::Rational;
pub use rules::{parse_rule, Rule, SocialDecisionScheme, Symmetries};
pub use utility::{expected_utility, Polytope, Preset, UtilitySet, UtilityVector};
