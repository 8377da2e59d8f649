//! Enumeration of deviation instances, optionally reduced by the rule's symmetries.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::{
    all_preferences, anonymous_profile_count, binomial, full_profile_at, full_profile_count,
    multisets, profile_from_indices, Preference, Profile,
};
use crate::rules::SocialDecisionScheme;

/// Profile spaces up to this size are swept in full under `Reduction::Auto`.
pub const AUTO_FULL_LIMIT: u128 = 100_000;

/// Which profiles a strategyproofness sweep must visit.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reduction {
    /// Full when small, else the strongest reduction the rule's symmetries allow.
    #[default]
    Auto,
    /// Every profile and every voter.
    Full,
    /// One profile per preference multiset; one voter per distinct preference.
    /// Needs an anonymous rule.
    Anonymous,
    /// The deviator's preference times the multiset of the other voters'
    /// favorites; misreports that change the deviator's favorite. Needs an
    /// anonymous, tops-only rule. Neutral rules fix the deviator's preference.
    TopsOnly,
}

impl Reduction {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Reduction::Auto),
            "full" => Ok(Reduction::Full),
            "anonymous" => Ok(Reduction::Anonymous),
            "tops_only" => Ok(Reduction::TopsOnly),
            other => Err(Error::parse(format!(
                "unknown reduction `{other}`; valid: auto, full, anonymous, tops_only"
            ))),
        }
    }
}

/// A profile together with the voters to try and their misreports.
pub(crate) struct Unit {
    pub profile: Profile,
    pub seats: Vec<(usize, Vec<Preference>)>,
}

pub(crate) struct Plan {
    pub reduction: Reduction,
    m: usize,
    n: usize,
    prefs: Vec<Preference>,
    pub units: u64,
    digits: Vec<Vec<usize>>,
    deviator_prefs: Vec<usize>,
}

fn refuse(what: &str, needed: u128, cap: u128) -> Error {
    Error::Refused {
        what: what.to_string(),
        needed: needed.to_string(),
        cap,
    }
}

impl Plan {
    pub fn new(
        f: &dyn SocialDecisionScheme,
        m: usize,
        n: usize,
        requested: Reduction,
        cap: u128,
    ) -> Result<Plan> {
        f.check_domain(m, n)?;
        let sym = f.symmetries();
        let reduction = match requested {
            Reduction::Auto if full_profile_count(m, n) <= AUTO_FULL_LIMIT => Reduction::Full,
            Reduction::Auto if sym.anonymous && sym.tops_only => Reduction::TopsOnly,
            Reduction::Auto if sym.anonymous => Reduction::Anonymous,
            Reduction::Auto => Reduction::Full,
            Reduction::Anonymous if !sym.anonymous => {
                return Err(Error::domain(format!(
                    "rule {} does not declare anonymity",
                    f.name()
                )))
            }
            Reduction::TopsOnly if !(sym.anonymous && sym.tops_only) => {
                return Err(Error::domain(format!(
                    "rule {} is not declared anonymous and tops-only",
                    f.name()
                )))
            }
            other => other,
        };
        let prefs = all_preferences(m);
        let mut plan = Plan {
            reduction,
            m,
            n,
            prefs,
            units: 0,
            digits: Vec::new(),
            deviator_prefs: Vec::new(),
        };
        match reduction {
            Reduction::Full => {
                let count = full_profile_count(m, n);
                if count > cap {
                    return Err(refuse("strategyproofness sweep over all profiles", count, cap));
                }
                plan.units = count as u64;
            }
            Reduction::Anonymous => {
                let count = anonymous_profile_count(m, n);
                if count > cap {
                    return Err(refuse("strategyproofness sweep over anonymous profiles", count, cap));
                }
                plan.digits = multisets(plan.prefs.len(), n);
                plan.units = count as u64;
            }
            Reduction::TopsOnly => {
                plan.deviator_prefs = if sym.neutral {
                    vec![0]
                } else {
                    (0..plan.prefs.len()).collect()
                };
                let others = binomial((m + n - 2) as u128, (n - 1) as u128);
                let count = others.saturating_mul(plan.deviator_prefs.len() as u128);
                if count > cap {
                    return Err(refuse("strategyproofness sweep over favorites", count, cap));
                }
                plan.digits = multisets(m, n - 1);
                plan.units = count as u64;
            }
            Reduction::Auto => unreachable!(),
        }
        Ok(plan)
    }

    fn others(&self, pref: &Preference) -> Vec<Preference> {
        self.prefs.iter().filter(|q| *q != pref).cloned().collect()
    }

    pub fn unit(&self, i: u64) -> Unit {
        match self.reduction {
            Reduction::Full => {
                let profile = full_profile_at(&self.prefs, self.n, i as u128);
                let seats = (0..self.n).map(|v| (v, self.others(profile.pref(v)))).collect();
                Unit { profile, seats }
            }
            Reduction::Anonymous => {
                let digits = &self.digits[i as usize];
                let profile = profile_from_indices(&self.prefs, digits);
                let seats = (0..self.n)
                    .filter(|&v| v == 0 || digits[v] != digits[v - 1])
                    .map(|v| (v, self.others(profile.pref(v))))
                    .collect();
                Unit { profile, seats }
            }
            Reduction::TopsOnly => {
                let per = self.digits.len() as u64;
                let own = self.prefs[self.deviator_prefs[(i / per) as usize]].clone();
                let tops = &self.digits[(i % per) as usize];
                let top = own.top();
                let mut prefs = Vec::with_capacity(self.n);
                prefs.push(own);
                prefs.extend(tops.iter().map(|&t| Preference::with_top(self.m, t)));
                let misreports = (0..self.m)
                    .filter(|&t| t != top)
                    .map(|t| Preference::with_top(self.m, t))
                    .collect();
                Unit {
                    profile: Profile::new(prefs).expect("well-formed preferences"),
                    seats: vec![(0, misreports)],
                }
            }
            Reduction::Auto => unreachable!(),
        }
    }
}
