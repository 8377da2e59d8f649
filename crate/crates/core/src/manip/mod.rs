//! `U`-strategyproofness: exact gains, manipulating utilities over utility
//! regions, exhaustive sweeps, coalitions and thresholds.

mod boundary;
mod group;
mod plan;

use std::collections::HashMap;
use std::sync::Mutex;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lottery::Lottery;
use crate::profile::{Preference, Profile};
use crate::rational::{self, int, ratio, Rational};
use crate::rules::SocialDecisionScheme;
use crate::utility::{dot, expected_utility, rank_coefficients, Polytope, UtilitySet, UtilityVector};

pub use boundary::{sp_boundary, sp_boundary_with, SpBoundary};
pub use group::{check_group_sp, check_group_sp_with, GroupOptions, GroupReport, GroupVerdict, GroupWitness};
pub use plan::{Reduction, AUTO_FULL_LIMIT};

use plan::Plan;

/// Default limit on the number of sweep units (profiles or reduced classes).
pub const DEFAULT_CAP: u128 = 10_000_000;

/// One voter replacing their preference while everyone else stays put.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Deviation {
    pub profile: Profile,
    pub voter: usize,
    pub misreport: Preference,
}

impl Deviation {
    pub fn new(profile: Profile, voter: usize, misreport: Preference) -> Result<Self> {
        let d = Deviation {
            profile,
            voter,
            misreport,
        };
        d.validate()?;
        Ok(d)
    }

    fn validate(&self) -> Result<()> {
        if self.voter >= self.profile.n() {
            return Err(Error::domain(format!(
                "voter {} out of range for {} voters",
                self.voter,
                self.profile.n()
            )));
        }
        if self.misreport.m() != self.profile.m() {
            return Err(Error::domain("misreport has the wrong number of alternatives"));
        }
        if &self.misreport == self.profile.pref(self.voter) {
            return Err(Error::domain("misreport equals the voter's true preference"));
        }
        Ok(())
    }

    pub fn true_preference(&self) -> &Preference {
        self.profile.pref(self.voter)
    }

    pub fn deviated(&self) -> Profile {
        self.profile.with_voter(self.voter, self.misreport.clone())
    }

    /// Truthful and deviated lotteries.
    pub fn lotteries(&self, f: &dyn SocialDecisionScheme) -> Result<(Lottery, Lottery)> {
        self.validate()?;
        Ok((f.evaluate(&self.profile)?, f.evaluate(&self.deviated())?))
    }

    /// Gain coefficients: entry `r - 1` is the probability change of the
    /// deviator's rank-`r` alternative.
    pub fn coefficients(&self, f: &dyn SocialDecisionScheme) -> Result<Vec<Rational>> {
        let (before, after) = self.lotteries(f)?;
        Ok(rank_coefficients(&before, &after, self.true_preference()))
    }
}

/// A deviation, a utility consistent with the deviator's true preference,
/// and the strictly positive expected-utility gain it yields.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManipulationWitness {
    pub deviation: Deviation,
    pub utility: UtilityVector,
    #[serde(with = "rational::serde_str")]
    pub gain: Rational,
    pub truthful: Lottery,
    pub deviated: Lottery,
}

impl ManipulationWitness {
    /// Recomputes the lotteries and the gain from `f`.
    pub fn replays(&self, f: &dyn SocialDecisionScheme) -> Result<bool> {
        let (before, after) = self.deviation.lotteries(f)?;
        let g = gain(f, &self.deviation, &self.utility)?;
        Ok(before == self.truthful && after == self.deviated && g == self.gain && g.is_positive())
    }

    /// `replays` plus membership of the utility in `set`.
    pub fn replays_in(&self, f: &dyn SocialDecisionScheme, set: &UtilitySet) -> Result<bool> {
        Ok(self.replays(f)? && set.contains(&self.utility)?)
    }
}

/// Expected-utility change for the deviator, measured through their true ranks.
pub fn gain(f: &dyn SocialDecisionScheme, dev: &Deviation, u: &UtilityVector) -> Result<Rational> {
    let (before, after) = dev.lotteries(f)?;
    let pref = dev.true_preference();
    Ok(expected_utility(&after, u, pref)? - expected_utility(&before, u, pref)?)
}

/// Moves a weakly decreasing maximizer with positive gain toward the strict
/// interior point far enough to be strict, but not so far the gain vanishes.
fn strict_maximizer(coeffs: &[Rational], best: &[Rational], gain: &Rational, interior: &[Rational]) -> Vec<Rational> {
    let g_int = dot(coeffs, interior);
    let t = if !g_int.is_negative() {
        ratio(1, 2)
    } else {
        gain / (int(2) * (gain - &g_int))
    };
    let keep = Rational::one() - &t;
    best.iter()
        .zip(interior)
        .map(|(b, i)| &keep * b + &t * i)
        .collect()
}

/// Best utility for the deviator within the closed region, made strict.
/// `None` when no utility in the region gains.
fn polytope_best(poly: &Polytope, coeffs: &[Rational]) -> Result<Option<Vec<Rational>>> {
    if coeffs.iter().all(Zero::is_zero) {
        return Ok(None);
    }
    let (value, point) = poly.maximize(coeffs)?;
    if !value.is_positive() {
        return Ok(None);
    }
    Ok(Some(strict_maximizer(coeffs, &point, &value, poly.interior_point())))
}

/// Best gaining utility among listed vectors (a hull attains its maximum at one).
fn listed_best(vectors: &[UtilityVector], coeffs: &[Rational]) -> Option<Vec<Rational>> {
    let mut best: Option<(Rational, &UtilityVector)> = None;
    for u in vectors {
        let g = dot(coeffs, u.values());
        if g.is_positive() && best.as_ref().map_or(true, |(b, _)| &g > b) {
            best = Some((g, u));
        }
    }
    best.map(|(_, u)| u.values().to_vec())
}

/// Answers "which utility in `U` gains most for these coefficients", with a
/// cache for the linear programs.
pub(crate) struct Oracle<'a> {
    set: &'a UtilitySet,
    cache: Mutex<HashMap<Vec<Rational>, Option<Vec<Rational>>>>,
}

impl<'a> Oracle<'a> {
    pub fn new(set: &'a UtilitySet, m: usize) -> Result<Self> {
        if set.m() != m {
            return Err(Error::domain(format!(
                "utility set has {} ranks but there are {m} alternatives",
                set.m()
            )));
        }
        Ok(Oracle {
            set,
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn best(&self, coeffs: &[Rational]) -> Result<Option<Vec<Rational>>> {
        match self.set {
            UtilitySet::Finite(v) | UtilitySet::Vertices(v) => Ok(listed_best(v, coeffs)),
            UtilitySet::Polytope(p) => {
                if let Some(hit) = self.cache.lock().unwrap().get(coeffs) {
                    return Ok(hit.clone());
                }
                let found = polytope_best(p, coeffs)?;
                self.cache
                    .lock()
                    .unwrap()
                    .insert(coeffs.to_vec(), found.clone());
                Ok(found)
            }
        }
    }
}

fn witness(
    deviation: Deviation,
    utility: Vec<Rational>,
    coeffs: &[Rational],
    truthful: Lottery,
    deviated: Lottery,
) -> Result<ManipulationWitness> {
    let gain = dot(coeffs, &utility);
    Ok(ManipulationWitness {
        deviation,
        utility: UtilityVector::new(utility)?,
        gain,
        truthful,
        deviated,
    })
}

/// The most profitable utility in `set` for this deviation, if any gains.
/// Over regions the maximum is taken on the closure and then nudged to a
/// strictly decreasing utility that still gains.
pub fn best_manipulation_utility(
    f: &dyn SocialDecisionScheme,
    dev: &Deviation,
    set: &UtilitySet,
) -> Result<Option<ManipulationWitness>> {
    let (before, after) = dev.lotteries(f)?;
    let coeffs = rank_coefficients(&before, &after, dev.true_preference());
    let oracle = Oracle::new(set, dev.profile.m())?;
    match oracle.best(&coeffs)? {
        Some(u) => Ok(Some(witness(dev.clone(), u, &coeffs, before, after)?)),
        None => Ok(None),
    }
}

/// Sweep configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpOptions {
    pub reduction: Reduction,
    pub cap: u128,
}

impl Default for SpOptions {
    fn default() -> Self {
        SpOptions {
            reduction: Reduction::Auto,
            cap: DEFAULT_CAP,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SpVerdict {
    Pass,
    Witness(ManipulationWitness),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpReport {
    pub rule: String,
    pub m: usize,
    pub n: usize,
    /// Reduction actually used.
    pub reduction: Reduction,
    /// Sweep units examined up to and including a witness.
    pub units_visited: u64,
    pub verdict: SpVerdict,
}

impl SpReport {
    pub fn passed(&self) -> bool {
        matches!(self.verdict, SpVerdict::Pass)
    }

    pub fn witness(&self) -> Option<&ManipulationWitness> {
        match &self.verdict {
            SpVerdict::Witness(w) => Some(w),
            SpVerdict::Pass => None,
        }
    }
}

/// Every gain-coefficient vector the sweep produces, one per deviation, in
/// enumeration order (first witness = first gaining vector).
pub(crate) fn sweep<T, F>(
    f: &dyn SocialDecisionScheme,
    m: usize,
    n: usize,
    opts: &SpOptions,
    visit: F,
) -> Result<(Reduction, u64, Option<T>)>
where
    T: Send,
    F: Fn(&Deviation, &Lottery, &Lottery, &[Rational]) -> Result<Option<T>> + Sync,
{
    let plan = Plan::new(f, m, n, opts.reduction, opts.cap)?;
    let found = (0..plan.units).into_par_iter().find_map_first(|i| {
        let run = || -> Result<Option<T>> {
            let unit = plan.unit(i);
            let truthful = f.evaluate_unchecked(&unit.profile)?;
            for (voter, misreports) in unit.seats {
                let pref = unit.profile.pref(voter).clone();
                for misreport in misreports {
                    let dev = Deviation {
                        profile: unit.profile.clone(),
                        voter,
                        misreport,
                    };
                    let deviated = f.evaluate_unchecked(&dev.deviated())?;
                    if deviated == truthful {
                        continue;
                    }
                    let coeffs = rank_coefficients(&truthful, &deviated, &pref);
                    if let Some(t) = visit(&dev, &truthful, &deviated, &coeffs)? {
                        return Ok(Some(t));
                    }
                }
            }
            Ok(None)
        };
        match run() {
            Ok(None) => None,
            Ok(Some(t)) => Some(Ok((i, t))),
            Err(e) => Some(Err(e)),
        }
    });
    match found {
        None => Ok((plan.reduction, plan.units, None)),
        Some(Ok((i, t))) => Ok((plan.reduction, i + 1, Some(t))),
        Some(Err(e)) => Err(e),
    }
}

/// Exhaustive `U`-strategyproofness check with explicit options.
pub fn check_u_sp_with(
    f: &dyn SocialDecisionScheme,
    set: &UtilitySet,
    m: usize,
    n: usize,
    opts: &SpOptions,
) -> Result<SpReport> {
    let oracle = Oracle::new(set, m)?;
    let (reduction, units_visited, found) = sweep(f, m, n, opts, |dev, before, after, coeffs| {
        match oracle.best(coeffs)? {
            Some(u) => Ok(Some(witness(
                dev.clone(),
                u,
                coeffs,
                before.clone(),
                after.clone(),
            )?)),
            None => Ok(None),
        }
    })?;
    Ok(SpReport {
        rule: f.name(),
        m,
        n,
        reduction,
        units_visited,
        verdict: match found {
            Some(w) => SpVerdict::Witness(w),
            None => SpVerdict::Pass,
        },
    })
}

/// Exhaustive `U`-strategyproofness check.
pub fn check_u_sp(f: &dyn SocialDecisionScheme, set: &UtilitySet, m: usize, n: usize) -> Result<SpReport> {
    check_u_sp_with(f, set, m, n, &SpOptions::default())
}

/// Strategyproofness for the single vector `u` read through every voter's ranks.
pub fn check_u_pi_sp(f: &dyn SocialDecisionScheme, u: &UtilityVector, m: usize, n: usize) -> Result<SpReport> {
    check_u_sp(f, &UtilitySet::single(u.clone()), m, n)
}

pub fn check_u_pi_sp_with(
    f: &dyn SocialDecisionScheme,
    u: &UtilityVector,
    m: usize,
    n: usize,
    opts: &SpOptions,
) -> Result<SpReport> {
    check_u_sp_with(f, &UtilitySet::single(u.clone()), m, n, opts)
}
