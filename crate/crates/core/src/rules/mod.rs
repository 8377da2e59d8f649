//! Social decision schemes: maps from profiles to lotteries.

mod basic;
mod combinators;
mod registry;
mod special;
mod table;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::lottery::Lottery;
use crate::profile::Profile;

pub use basic::{Cond, Constant, Dictator, OmniStar, Rd, RdK, Uniform};
pub use combinators::{Mix, SubsetLift};
pub use registry::{parse_rule, RULE_NAMES};
pub use special::{F1, F2, F3};
pub use table::{ClassMode, TableDoc, TableEntry, TableRule};

/// Symmetry claims a rule makes about itself. They are metadata: the
/// axiom checkers verify them, sweeps may rely on them.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Symmetries {
    pub anonymous: bool,
    pub neutral: bool,
    pub rank_based: bool,
    /// The outcome depends only on the voters' top choices.
    pub tops_only: bool,
}

impl Symmetries {
    pub const ALL: Symmetries = Symmetries {
        anonymous: true,
        neutral: true,
        rank_based: true,
        tops_only: true,
    };

    pub const NONE: Symmetries = Symmetries {
        anonymous: false,
        neutral: false,
        rank_based: false,
        tops_only: false,
    };

    pub fn intersect(self, other: Symmetries) -> Symmetries {
        Symmetries {
            anonymous: self.anonymous && other.anonymous,
            neutral: self.neutral && other.neutral,
            rank_based: self.rank_based && other.rank_based,
            tops_only: self.tops_only && other.tops_only,
        }
    }
}

pub trait SocialDecisionScheme: Send + Sync + fmt::Debug {
    fn name(&self) -> String;

    /// Errors unless the rule is defined for `m` alternatives and `n` voters.
    fn check_domain(&self, m: usize, n: usize) -> Result<()>;

    fn symmetries(&self) -> Symmetries;

    /// Voter count the rule is tied to, if any.
    fn fixed_n(&self) -> Option<usize> {
        None
    }

    /// Evaluates a profile already known to be in the domain.
    fn evaluate_unchecked(&self, profile: &Profile) -> Result<Lottery>;

    fn evaluate(&self, profile: &Profile) -> Result<Lottery> {
        self.check_domain(profile.m(), profile.n())?;
        self.evaluate_unchecked(profile)
    }
}

pub type Rule = Arc<dyn SocialDecisionScheme>;

#[cfg(test)]
mod tests;
