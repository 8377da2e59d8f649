//! Exhaustive axiom checkers. Each returns `Pass` after a completed sweep or
//! a concrete counterexample that replays against the rule.

use std::collections::HashMap;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lottery::Lottery;
use crate::profile::{all_preferences, full_profile_at, full_profile_count, Alternative, Profile};
use crate::rational::{self, Rational};
use crate::rules::SocialDecisionScheme;

/// Largest number of profiles a sweep visits before refusing.
pub const DEFAULT_CAP: u128 = 10_000_000;

/// Profiles to sweep: the full space for `(m, n)` or an explicit list.
#[derive(Clone, Debug)]
pub struct SweepDomain {
    pub m: usize,
    pub n: usize,
    pub profiles: Option<Vec<Profile>>,
    pub cap: u128,
}

impl SweepDomain {
    pub fn full(m: usize, n: usize) -> Self {
        SweepDomain {
            m,
            n,
            profiles: None,
            cap: DEFAULT_CAP,
        }
    }

    pub fn list(profiles: Vec<Profile>) -> Result<Self> {
        let first = profiles
            .first()
            .ok_or_else(|| Error::domain("empty profile list"))?;
        let (m, n) = (first.m(), first.n());
        if profiles.iter().any(|p| p.m() != m || p.n() != n) {
            return Err(Error::domain("listed profiles differ in m or n"));
        }
        Ok(SweepDomain {
            m,
            n,
            profiles: Some(profiles),
            cap: DEFAULT_CAP,
        })
    }

    pub fn with_cap(mut self, cap: u128) -> Self {
        self.cap = cap;
        self
    }

    pub fn size(&self) -> u128 {
        match &self.profiles {
            Some(list) => list.len() as u128,
            None => full_profile_count(self.m, self.n),
        }
    }

    fn guard(&self, what: &str) -> Result<u64> {
        let size = self.size();
        if size > self.cap {
            return Err(Error::Refused {
                what: what.to_string(),
                needed: size.to_string(),
                cap: self.cap,
            });
        }
        Ok(size as u64)
    }

    /// First `Some` produced by `visit` in enumeration order, with its position.
    fn find_first<T, F>(&self, what: &str, visit: F) -> Result<(u64, Option<(u64, T)>)>
    where
        T: Send,
        F: Fn(&Profile) -> Result<Option<T>> + Sync,
    {
        let size = self.guard(what)?;
        let prefs = all_preferences(self.m);
        let found = (0..size).into_par_iter().find_map_first(|i| {
            let owned;
            let profile = match &self.profiles {
                Some(list) => &list[i as usize],
                None => {
                    owned = full_profile_at(&prefs, self.n, i as u128);
                    &owned
                }
            };
            match visit(profile) {
                Ok(None) => None,
                Ok(Some(t)) => Some(Ok((i, t))),
                Err(e) => Some(Err(e)),
            }
        });
        match found {
            None => Ok((size, None)),
            Some(Ok((i, t))) => Ok((i + 1, Some((i, t)))),
            Some(Err(e)) => Err(e),
        }
    }

    /// Visits every profile in order, sequentially.
    fn for_each<F>(&self, what: &str, mut visit: F) -> Result<u64>
    where
        F: FnMut(&Profile) -> Result<bool>,
    {
        let size = self.guard(what)?;
        let prefs = all_preferences(self.m);
        for i in 0..size {
            let owned;
            let profile = match &self.profiles {
                Some(list) => &list[i as usize],
                None => {
                    owned = full_profile_at(&prefs, self.n, i as u128);
                    &owned
                }
            };
            if !visit(profile)? {
                return Ok(i + 1);
            }
        }
        Ok(size)
    }
}

/// What a probability-type axiom demanded of one alternative.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "requirement", rename_all = "snake_case")]
pub enum Requirement {
    One,
    Zero,
    AtLeast {
        #[serde(with = "rational::serde_str")]
        alpha: Rational,
    },
}

impl Requirement {
    fn holds(&self, p: &Rational) -> bool {
        match self {
            Requirement::One => p.is_one(),
            Requirement::Zero => p.is_zero(),
            Requirement::AtLeast { alpha } => p >= alpha,
        }
    }
}

/// A replayable axiom violation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// Swapping two voters changed the outcome.
    VoterSwap {
        profile: Profile,
        swapped: Profile,
        voters: (usize, usize),
        lottery: Lottery,
        swapped_lottery: Lottery,
    },
    /// Swapping two alternatives did not swap their probabilities.
    AlternativeSwap {
        profile: Profile,
        swapped: Profile,
        alternatives: (Alternative, Alternative),
        lottery: Lottery,
        swapped_lottery: Lottery,
    },
    /// Two profiles that the axiom treats as equivalent got different outcomes.
    SameClass {
        class: String,
        profile: Profile,
        other: Profile,
        lottery: Lottery,
        other_lottery: Lottery,
    },
    /// An alternative's probability missed its required value.
    Probability {
        profile: Profile,
        alternative: Alternative,
        lottery: Lottery,
        #[serde(flatten)]
        requirement: Requirement,
    },
}

impl Violation {
    /// Re-evaluates `f` on the stored profiles; true iff the stored outcomes
    /// are reproduced exactly and still violate the axiom.
    pub fn replays(&self, f: &dyn SocialDecisionScheme) -> Result<bool> {
        Ok(match self {
            Violation::VoterSwap {
                profile,
                swapped,
                lottery,
                swapped_lottery,
                ..
            }
            | Violation::SameClass {
                profile,
                other: swapped,
                lottery,
                other_lottery: swapped_lottery,
                ..
            } => {
                let a = f.evaluate(profile)?;
                let b = f.evaluate(swapped)?;
                &a == lottery && &b == swapped_lottery && a != b
            }
            Violation::AlternativeSwap {
                profile,
                swapped,
                alternatives: (x, y),
                lottery,
                swapped_lottery,
            } => {
                let a = f.evaluate(profile)?;
                let b = f.evaluate(swapped)?;
                let tau = transposition(profile.m(), *x, *y);
                &a == lottery && &b == swapped_lottery && a.relabel(&tau) != b
            }
            Violation::Probability {
                profile,
                alternative,
                lottery,
                requirement,
            } => {
                let a = f.evaluate(profile)?;
                &a == lottery && !requirement.holds(a.prob(*alternative))
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum AxiomStatus {
    Pass,
    Counterexample(Violation),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub axiom: String,
    pub rule: String,
    pub m: usize,
    pub n: usize,
    /// Profiles examined, in enumeration order, up to and including any counterexample.
    pub profiles_visited: u64,
    pub status: AxiomStatus,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        matches!(self.status, AxiomStatus::Pass)
    }

    pub fn violation(&self) -> Option<&Violation> {
        match &self.status {
            AxiomStatus::Counterexample(v) => Some(v),
            AxiomStatus::Pass => None,
        }
    }
}

fn transposition(size: usize, a: usize, b: usize) -> Vec<usize> {
    let mut t: Vec<usize> = (0..size).collect();
    t.swap(a, b);
    t
}

fn report(
    axiom: impl Into<String>,
    f: &dyn SocialDecisionScheme,
    domain: &SweepDomain,
    visited: u64,
    violation: Option<Violation>,
) -> AxiomReport {
    AxiomReport {
        axiom: axiom.into(),
        rule: f.name(),
        m: domain.m,
        n: domain.n,
        profiles_visited: visited,
        status: match violation {
            Some(v) => AxiomStatus::Counterexample(v),
            None => AxiomStatus::Pass,
        },
    }
}

/// `f(R) = f(π(R))` for every voter permutation, checked on adjacent transpositions.
pub fn check_anonymity_in(f: &dyn SocialDecisionScheme, domain: &SweepDomain) -> Result<AxiomReport> {
    f.check_domain(domain.m, domain.n)?;
    let (visited, found) = domain.find_first("anonymity sweep", |r| {
        let lottery = f.evaluate_unchecked(r)?;
        for i in 0..r.n().saturating_sub(1) {
            if r.pref(i) == r.pref(i + 1) {
                continue;
            }
            let swapped = r.swap_voters(i, i + 1);
            let swapped_lottery = f.evaluate_unchecked(&swapped)?;
            if swapped_lottery != lottery {
                return Ok(Some(Violation::VoterSwap {
                    profile: r.clone(),
                    swapped,
                    voters: (i, i + 1),
                    lottery,
                    swapped_lottery,
                }));
            }
        }
        Ok(None)
    })?;
    Ok(report("anonymity", f, domain, visited, found.map(|(_, v)| v)))
}

/// `f(τ(R), τ(x)) = f(R, x)` for every relabeling, checked on adjacent transpositions.
pub fn check_neutrality_in(f: &dyn SocialDecisionScheme, domain: &SweepDomain) -> Result<AxiomReport> {
    f.check_domain(domain.m, domain.n)?;
    let (visited, found) = domain.find_first("neutrality sweep", |r| {
        let lottery = f.evaluate_unchecked(r)?;
        for x in 0..r.m().saturating_sub(1) {
            let tau = transposition(r.m(), x, x + 1);
            let swapped = r.relabel(&tau);
            let swapped_lottery = f.evaluate_unchecked(&swapped)?;
            if lottery.relabel(&tau) != swapped_lottery {
                return Ok(Some(Violation::AlternativeSwap {
                    profile: r.clone(),
                    swapped,
                    alternatives: (x, x + 1),
                    lottery,
                    swapped_lottery,
                }));
            }
        }
        Ok(None)
    })?;
    Ok(report("neutrality", f, domain, visited, found.map(|(_, v)| v)))
}

/// Groups profiles by `key` and requires one outcome per group.
fn check_constant_on_classes<K, F>(
    axiom: &str,
    class: &str,
    f: &dyn SocialDecisionScheme,
    domain: &SweepDomain,
    key: F,
) -> Result<AxiomReport>
where
    K: std::hash::Hash + Eq,
    F: Fn(&Profile) -> K,
{
    f.check_domain(domain.m, domain.n)?;
    let mut seen: HashMap<K, (Profile, Lottery)> = HashMap::new();
    let mut violation = None;
    let visited = domain.for_each(axiom, |r| {
        let lottery = f.evaluate_unchecked(r)?;
        match seen.get(&key(r)) {
            Some((first, first_lottery)) => {
                if first_lottery != &lottery {
                    violation = Some(Violation::SameClass {
                        class: class.to_string(),
                        profile: first.clone(),
                        other: r.clone(),
                        lottery: first_lottery.clone(),
                        other_lottery: lottery,
                    });
                    return Ok(false);
                }
            }
            None => {
                seen.insert(key(r), (r.clone(), lottery));
            }
        }
        Ok(true)
    })?;
    Ok(report(axiom, f, domain, visited, violation))
}

/// `f` is constant on profiles sharing a rank matrix.
pub fn check_rank_basedness_in(
    f: &dyn SocialDecisionScheme,
    domain: &SweepDomain,
) -> Result<AxiomReport> {
    check_constant_on_classes("rank_basedness", "rank matrix", f, domain, Profile::rank_matrix)
}

/// `f` is constant on profiles in which every voter has the same favorite.
pub fn check_tops_only_in(f: &dyn SocialDecisionScheme, domain: &SweepDomain) -> Result<AxiomReport> {
    check_constant_on_classes("tops_only", "voter favorites", f, domain, Profile::tops)
}

/// First alternative of `r` violating `requirement`, among `candidates`.
fn probability_violation(
    r: &Profile,
    lottery: Lottery,
    candidates: impl IntoIterator<Item = Alternative>,
    requirement: &Requirement,
) -> Option<Violation> {
    for x in candidates {
        if !requirement.holds(lottery.prob(x)) {
            return Some(Violation::Probability {
                profile: r.clone(),
                alternative: x,
                lottery,
                requirement: requirement.clone(),
            });
        }
    }
    None
}

/// Probability 1 for any alternative ranked first by at least `n - k` voters.
pub fn check_k_unanimity_in(
    f: &dyn SocialDecisionScheme,
    k: usize,
    domain: &SweepDomain,
) -> Result<AxiomReport> {
    if 2 * k >= domain.n {
        return Err(Error::domain(format!(
            "k-unanimity is only satisfiable for k < n/2; got k = {k}, n = {}",
            domain.n
        )));
    }
    f.check_domain(domain.m, domain.n)?;
    let threshold = domain.n - k;
    let (visited, found) = domain.find_first("k-unanimity sweep", |r| {
        let counts = r.top_counts();
        let hit: Vec<Alternative> = (0..r.m()).filter(|&x| counts[x] >= threshold).collect();
        if hit.is_empty() {
            return Ok(None);
        }
        let lottery = f.evaluate_unchecked(r)?;
        Ok(probability_violation(r, lottery, hit, &Requirement::One))
    })?;
    Ok(report(
        format!("k_unanimity:k={k}"),
        f,
        domain,
        visited,
        found.map(|(_, v)| v),
    ))
}

/// Probability at least `alpha` for any alternative ranked first by at least `n - k` voters.
pub fn check_k_alpha_unanimity_in(
    f: &dyn SocialDecisionScheme,
    k: usize,
    alpha: &Rational,
    domain: &SweepDomain,
) -> Result<AxiomReport> {
    if alpha.is_negative() || alpha > &Rational::one() || k > domain.n {
        return Err(Error::domain(format!(
            "(k, alpha)-unanimity needs 0 <= alpha <= 1 and k <= n; got k = {k}, alpha = {alpha}"
        )));
    }
    f.check_domain(domain.m, domain.n)?;
    let threshold = domain.n - k;
    let requirement = Requirement::AtLeast {
        alpha: alpha.clone(),
    };
    let (visited, found) = domain.find_first("(k, alpha)-unanimity sweep", |r| {
        let counts = r.top_counts();
        let hit: Vec<Alternative> = (0..r.m()).filter(|&x| counts[x] >= threshold).collect();
        if hit.is_empty() {
            return Ok(None);
        }
        let lottery = f.evaluate_unchecked(r)?;
        Ok(probability_violation(r, lottery, hit, &requirement))
    })?;
    Ok(report(
        format!("k_alpha_unanimity:k={k},alpha={alpha}"),
        f,
        domain,
        visited,
        found.map(|(_, v)| v),
    ))
}

/// Probability 1 for the Condorcet winner whenever one exists.
pub fn check_condorcet_consistency_in(
    f: &dyn SocialDecisionScheme,
    domain: &SweepDomain,
) -> Result<AxiomReport> {
    f.check_domain(domain.m, domain.n)?;
    let (visited, found) = domain.find_first("Condorcet sweep", |r| {
        let Some(w) = r.condorcet_winner() else {
            return Ok(None);
        };
        let lottery = f.evaluate_unchecked(r)?;
        Ok(probability_violation(r, lottery, [w], &Requirement::One))
    })?;
    Ok(report("condorcet", f, domain, visited, found.map(|(_, v)| v)))
}

/// Probability 0 for every Pareto-dominated alternative.
pub fn check_ex_post_efficiency_in(
    f: &dyn SocialDecisionScheme,
    domain: &SweepDomain,
) -> Result<AxiomReport> {
    f.check_domain(domain.m, domain.n)?;
    let (visited, found) = domain.find_first("ex post sweep", |r| {
        let optimal = r.pareto_optimal_set();
        let dominated: Vec<Alternative> = (0..r.m()).filter(|x| !optimal.contains(x)).collect();
        if dominated.is_empty() {
            return Ok(None);
        }
        let lottery = f.evaluate_unchecked(r)?;
        Ok(probability_violation(r, lottery, dominated, &Requirement::Zero))
    })?;
    Ok(report("ex_post", f, domain, visited, found.map(|(_, v)| v)))
}

pub fn check_anonymity(f: &dyn SocialDecisionScheme, m: usize, n: usize) -> Result<AxiomReport> {
    check_anonymity_in(f, &SweepDomain::full(m, n))
}

pub fn check_neutrality(f: &dyn SocialDecisionScheme, m: usize, n: usize) -> Result<AxiomReport> {
    check_neutrality_in(f, &SweepDomain::full(m, n))
}

pub fn check_rank_basedness(f: &dyn SocialDecisionScheme, m: usize, n: usize) -> Result<AxiomReport> {
    check_rank_basedness_in(f, &SweepDomain::full(m, n))
}

pub fn check_tops_only(f: &dyn SocialDecisionScheme, m: usize, n: usize) -> Result<AxiomReport> {
    check_tops_only_in(f, &SweepDomain::full(m, n))
}

pub fn check_k_unanimity(
    f: &dyn SocialDecisionScheme,
    k: usize,
    m: usize,
    n: usize,
) -> Result<AxiomReport> {
    check_k_unanimity_in(f, k, &SweepDomain::full(m, n))
}

pub fn check_k_alpha_unanimity(
    f: &dyn SocialDecisionScheme,
    k: usize,
    alpha: &Rational,
    m: usize,
    n: usize,
) -> Result<AxiomReport> {
    check_k_alpha_unanimity_in(f, k, alpha, &SweepDomain::full(m, n))
}

pub fn check_condorcet_consistency(
    f: &dyn SocialDecisionScheme,
    m: usize,
    n: usize,
) -> Result<AxiomReport> {
    check_condorcet_consistency_in(f, &SweepDomain::full(m, n))
}

pub fn check_ex_post_efficiency(
    f: &dyn SocialDecisionScheme,
    m: usize,
    n: usize,
) -> Result<AxiomReport> {
    check_ex_post_efficiency_in(f, &SweepDomain::full(m, n))
}

/// Axioms addressable by name.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Axiom {
    Anonymity,
    Neutrality,
    RankBasedness,
    TopsOnly,
    KUnanimity {
        k: usize,
    },
    KAlphaUnanimity {
        k: usize,
        #[serde(with = "rational::serde_str")]
        alpha: Rational,
    },
    Condorcet,
    ExPost,
}

pub const AXIOM_NAMES: &str =
    "anonymity, neutrality, rank_basedness, tops_only, k_unanimity, k_alpha_unanimity, condorcet, ex_post";

impl Axiom {
    /// Parses an axiom name; `k` and `alpha` feed the parameterized ones.
    pub fn parse(name: &str, k: Option<usize>, alpha: Option<Rational>) -> Result<Self> {
        let need_k = || k.ok_or_else(|| Error::parse(format!("axiom `{name}` needs --k")));
        Ok(match name {
            "anonymity" => Axiom::Anonymity,
            "neutrality" => Axiom::Neutrality,
            "rank_basedness" => Axiom::RankBasedness,
            "tops_only" => Axiom::TopsOnly,
            "k_unanimity" => Axiom::KUnanimity { k: need_k()? },
            "k_alpha_unanimity" => Axiom::KAlphaUnanimity {
                k: need_k()?,
                alpha: alpha.ok_or_else(|| Error::parse("axiom `k_alpha_unanimity` needs --alpha"))?,
            },
            "condorcet" => Axiom::Condorcet,
            "ex_post" => Axiom::ExPost,
            other => {
                return Err(Error::parse(format!(
                    "unknown axiom `{other}`; valid axioms: {AXIOM_NAMES}"
                )))
            }
        })
    }

    pub fn check(&self, f: &dyn SocialDecisionScheme, domain: &SweepDomain) -> Result<AxiomReport> {
        match self {
            Axiom::Anonymity => check_anonymity_in(f, domain),
            Axiom::Neutrality => check_neutrality_in(f, domain),
            Axiom::RankBasedness => check_rank_basedness_in(f, domain),
            Axiom::TopsOnly => check_tops_only_in(f, domain),
            Axiom::KUnanimity { k } => check_k_unanimity_in(f, *k, domain),
            Axiom::KAlphaUnanimity { k, alpha } => check_k_alpha_unanimity_in(f, *k, alpha, domain),
            Axiom::Condorcet => check_condorcet_consistency_in(f, domain),
            Axiom::ExPost => check_ex_post_efficiency_in(f, domain),
        }
    }
}
