use num_traits::Signed;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lottery::Lottery;
use crate::profile::{all_preferences, factorial, full_profile_at, full_profile_count, Preference, Profile};
use crate::rational::{self, Rational};
use crate::rules::SocialDecisionScheme;
use crate::utility::{dot, rank_coefficients, UtilitySet, UtilityVector};

use super::{Oracle, DEFAULT_CAP};

/// Coalition sweep limits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GroupOptions {
    /// Largest coalition tried.
    pub max_coalition: usize,
    /// Limit on profiles.
    pub cap: u128,
    /// Limit on joint misreports across the sweep.
    pub budget: u128,
}

impl GroupOptions {
    pub fn new(n: usize) -> Self {
        GroupOptions {
            max_coalition: n,
            cap: DEFAULT_CAP,
            budget: 100_000_000,
        }
    }
}

/// Voters sharing one true preference who all gain from a joint misreport.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupWitness {
    pub profile: Profile,
    pub coalition: Vec<usize>,
    pub misreports: Vec<Preference>,
    pub utility: UtilityVector,
    #[serde(with = "rational::serde_str")]
    pub gain: Rational,
    pub truthful: Lottery,
    pub deviated: Lottery,
}

impl GroupWitness {
    pub fn deviated_profile(&self) -> Profile {
        let mut p = self.profile.clone();
        for (&v, q) in self.coalition.iter().zip(&self.misreports) {
            p = p.with_voter(v, q.clone());
        }
        p
    }

    pub fn replays(&self, f: &dyn SocialDecisionScheme) -> Result<bool> {
        let Some(&first) = self.coalition.first() else {
            return Ok(false);
        };
        let pref = self.profile.pref(first);
        if self.coalition.iter().any(|&v| self.profile.pref(v) != pref)
            || self.misreports.len() != self.coalition.len()
            || self.misreports.iter().any(|q| q == pref)
        {
            return Ok(false);
        }
        let before = f.evaluate(&self.profile)?;
        let after = f.evaluate(&self.deviated_profile())?;
        let g = dot(&rank_coefficients(&before, &after, pref), self.utility.values());
        Ok(before == self.truthful && after == self.deviated && g == self.gain && g.is_positive())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum GroupVerdict {
    Pass,
    Witness(GroupWitness),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupReport {
    pub rule: String,
    pub m: usize,
    pub n: usize,
    pub profiles_visited: u64,
    pub verdict: GroupVerdict,
}

impl GroupReport {
    pub fn passed(&self) -> bool {
        matches!(self.verdict, GroupVerdict::Pass)
    }

    pub fn witness(&self) -> Option<&GroupWitness> {
        match &self.verdict {
            GroupVerdict::Witness(w) => Some(w),
            GroupVerdict::Pass => None,
        }
    }
}

/// Groups of voters by preference index, in order of first appearance.
fn groups(profile: &Profile) -> Vec<Vec<usize>> {
    let idx = profile.pref_indices();
    let mut out: Vec<(usize, Vec<usize>)> = Vec::new();
    for (v, &p) in idx.iter().enumerate() {
        match out.iter_mut().find(|(q, _)| *q == p) {
            Some((_, g)) => g.push(v),
            None => out.push((p, vec![v])),
        }
    }
    out.into_iter().map(|(_, g)| g).collect()
}

/// Joint misreports of coalitions of size `1..=max` drawn from a group of `c`.
fn joint_count(c: usize, max: usize, k: u128) -> u128 {
    let mut total: u128 = 0;
    let mut choose: u128 = 1;
    for s in 1..=c.min(max) {
        choose = choose * (c - s + 1) as u128 / s as u128;
        total = total.saturating_add(choose.saturating_mul((k - 1).saturating_pow(s as u32)));
    }
    total
}

/// Subsets of `members` with `1..=max` elements, smallest first.
fn coalitions(members: &[usize], max: usize) -> Vec<Vec<usize>> {
    let c = members.len();
    let mut out = Vec::new();
    for size in 1..=c.min(max) {
        for mask in 0u32..(1u32 << c) {
            if mask.count_ones() as usize == size {
                out.push((0..c).filter(|i| mask >> i & 1 == 1).map(|i| members[i]).collect());
            }
        }
    }
    out
}

pub fn check_group_sp(f: &dyn SocialDecisionScheme, set: &UtilitySet, m: usize, n: usize) -> Result<GroupReport> {
    check_group_sp_with(f, set, m, n, &GroupOptions::new(n))
}

/// Sweeps all profiles and every coalition of voters with one common true
/// preference, each member reporting some other preference.
pub fn check_group_sp_with(
    f: &dyn SocialDecisionScheme,
    set: &UtilitySet,
    m: usize,
    n: usize,
    opts: &GroupOptions,
) -> Result<GroupReport> {
    f.check_domain(m, n)?;
    let oracle = Oracle::new(set, m)?;
    let count = full_profile_count(m, n);
    if count > opts.cap {
        return Err(Error::Refused {
            what: "coalition sweep over all profiles".into(),
            needed: count.to_string(),
            cap: opts.cap,
        });
    }
    let prefs = all_preferences(m);
    let k = factorial(m) as u128;
    let joint: u128 = (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let p = full_profile_at(&prefs, n, i as u128);
            groups(&p)
                .iter()
                .map(|g| joint_count(g.len(), opts.max_coalition, k))
                .fold(0u128, u128::saturating_add)
        })
        .reduce(|| 0, u128::saturating_add);
    if joint > opts.budget {
        return Err(Error::Refused {
            what: "joint misreports of coalitions".into(),
            needed: joint.to_string(),
            cap: opts.budget,
        });
    }
    let found = (0..count as u64).into_par_iter().find_map_first(|i| {
        let run = || -> Result<Option<GroupWitness>> {
            let profile = full_profile_at(&prefs, n, i as u128);
            let truthful = f.evaluate_unchecked(&profile)?;
            for group in groups(&profile) {
                let pref = profile.pref(group[0]).clone();
                let others: Vec<&Preference> = prefs.iter().filter(|q| **q != pref).collect();
                for coalition in coalitions(&group, opts.max_coalition) {
                    let s = coalition.len();
                    let mut digits = vec![0usize; s];
                    loop {
                        let mut deviated_profile = profile.clone();
                        for (&v, &d) in coalition.iter().zip(&digits) {
                            deviated_profile = deviated_profile.with_voter(v, others[d].clone());
                        }
                        let deviated = f.evaluate_unchecked(&deviated_profile)?;
                        if deviated != truthful {
                            let coeffs = rank_coefficients(&truthful, &deviated, &pref);
                            if let Some(u) = oracle.best(&coeffs)? {
                                let gain = dot(&coeffs, &u);
                                return Ok(Some(GroupWitness {
                                    profile: profile.clone(),
                                    coalition: coalition.clone(),
                                    misreports: digits.iter().map(|&d| others[d].clone()).collect(),
                                    utility: UtilityVector::new(u)?,
                                    gain,
                                    truthful,
                                    deviated,
                                }));
                            }
                        }
                        let mut pos = s;
                        loop {
                            if pos == 0 {
                                break;
                            }
                            pos -= 1;
                            digits[pos] += 1;
                            if digits[pos] < others.len() {
                                break;
                            }
                            digits[pos] = 0;
                        }
                        if digits.iter().all(|&d| d == 0) {
                            break;
                        }
                    }
                }
            }
            Ok(None)
        };
        match run() {
            Ok(None) => None,
            Ok(Some(w)) => Some(Ok((i, w))),
            Err(e) => Some(Err(e)),
        }
    });
    let (profiles_visited, verdict) = match found {
        None => (count as u64, GroupVerdict::Pass),
        Some(Ok((i, w))) => (i + 1, GroupVerdict::Witness(w)),
        Some(Err(e)) => return Err(e),
    };
    Ok(GroupReport {
        rule: f.name(),
        m,
        n,
        profiles_visited,
        verdict,
    })
}
