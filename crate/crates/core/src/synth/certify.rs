//! Impossibility certificates on small instances.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::axioms::Axiom;
use crate::error::{Error, Result};
use crate::profile::{Alternative, Preference, Profile};
use crate::rational::{int, ratio, Rational};
use crate::rules::ClassMode;
use crate::utility::{UtilitySet, UtilityVector};

use super::{synthesize, SynthesisOutcome, SynthesisProblem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GadgetCase {
    /// Three voters; used when `u(1) - u(2) < u(2) - u(m)`.
    One,
    /// Five voters; used when `u(1) - u(m-1) > u(m-1) - u(m)`.
    Two,
}

/// The four gadget profiles, the Condorcet winners of the last three, and
/// the synthesis outcome restricted to them.
#[derive(Clone, Debug)]
pub struct CondorcetCertificate {
    pub case: GadgetCase,
    pub profiles: Vec<Profile>,
    pub winners: Vec<Option<Alternative>>,
    pub outcome: SynthesisOutcome,
}

/// Builds an order from the named alternatives, with `W` standing for
/// alternatives `3..m` in index order.
fn order(m: usize, pattern: &str) -> Preference {
    let mut out = Vec::with_capacity(m);
    for c in pattern.chars() {
        match c {
            'x' => out.push(0),
            'y' => out.push(1),
            'z' => out.push(2),
            'W' => out.extend(3..m),
            _ => unreachable!("gadget pattern"),
        }
    }
    Preference::new(out).expect("gadget order")
}

fn profile(m: usize, patterns: &[&str]) -> Profile {
    Profile::new(patterns.iter().map(|p| order(m, p)).collect()).expect("gadget profile")
}

/// Gadget profiles `R1..R4` and the winners the construction promises for
/// `R2, R3, R4` (x, y, z are alternatives a, b, c).
pub fn condorcet_gadget(m: usize, case: GadgetCase) -> Result<(Vec<Profile>, [Alternative; 3])> {
    if m < 4 {
        return Err(Error::domain(format!("the Condorcet gadgets need m >= 4; got m = {m}")));
    }
    let (base, changes, winners): (Vec<&str>, [(usize, &str); 3], [Alternative; 3]) = match case {
        GadgetCase::One => (
            vec!["xyWz", "yzWx", "zxWy"],
            [(0, "yxWz"), (1, "zyWx"), (2, "xzWy")],
            [1, 2, 0],
        ),
        GadgetCase::Two => (
            vec!["xWyz", "zWxy", "yWzx", "xyzW", "zyxW"],
            [(0, "xWzy"), (1, "zWyx"), (2, "yWxz")],
            [2, 1, 0],
        ),
    };
    let r1 = profile(m, &base);
    let mut out = vec![r1.clone()];
    for (voter, pattern) in changes {
        out.push(r1.with_voter(voter, order(m, pattern)));
    }
    Ok((out, winners))
}

/// Runs the gadget of `case` for the single utility `u` (read through each
/// voter's ranks) with Condorcet consistency.
pub fn certify_condorcet_gadget(
    m: usize,
    u: &UtilityVector,
    case: GadgetCase,
) -> Result<CondorcetCertificate> {
    if u.m() != m {
        return Err(Error::domain("utility vector length differs from m"));
    }
    let (profiles, expected) = condorcet_gadget(m, case)?;
    let winners: Vec<Option<Alternative>> = profiles.iter().map(Profile::condorcet_winner).collect();
    if winners[0].is_some() || winners[1..] != expected.map(Some) {
        return Err(Error::Internal(format!(
            "gadget winners {winners:?} differ from the construction {expected:?}"
        )));
    }
    let n = profiles[0].n();
    let mut problem = SynthesisProblem::new(
        m,
        n,
        ClassMode::Full,
        vec![Axiom::Condorcet],
        UtilitySet::single(u.clone()),
    );
    problem.profiles = Some(profiles.clone());
    let outcome = synthesize(&problem)?;
    Ok(CondorcetCertificate {
        case,
        profiles,
        winners,
        outcome,
    })
}

/// Picks the gadget matching `u` and certifies that no Condorcet-consistent
/// rule is strategyproof for it.
pub fn certify_condorcet_impossibility(m: usize, u: &UtilityVector) -> Result<CondorcetCertificate> {
    if m < 4 || u.m() != m {
        return Err(Error::domain(format!(
            "need m >= 4 and a utility vector of length m; got m = {m}, length {}",
            u.m()
        )));
    }
    let v = |r: usize| u.at_rank(r);
    let case = if v(1) - v(2) < v(2) - v(m) {
        GadgetCase::One
    } else if v(1) - v(m - 1) > v(m - 1) - v(m) {
        GadgetCase::Two
    } else {
        return Err(Error::Internal(format!("{u} falls in neither gadget case")));
    };
    certify_condorcet_gadget(m, u, case)
}

/// Rank-based, k-unanimous, strategyproof for `u`.
pub fn rank_based_problem(m: usize, n: usize, k: usize, u: &UtilityVector) -> SynthesisProblem {
    SynthesisProblem::new(
        m,
        n,
        ClassMode::RankBased,
        vec![Axiom::KUnanimity { k }],
        UtilitySet::single(u.clone()),
    )
}

/// `Σ_{i = max(3, m-k+1)}^{m} (u(2) - u(i))`: rank-based k-unanimous rules
/// cannot be strategyproof when `u(1) - u(2)` falls below this.
pub fn rank_based_bound(u: &UtilityVector, k: usize) -> Rational {
    let m = u.m();
    let start = 3.max((m + 1).saturating_sub(k));
    (start..=m).map(|i| u.at_rank(2) - u.at_rank(i)).sum()
}

pub fn certify_rank_based_impossibility(
    m: usize,
    n: usize,
    k: usize,
    u: &UtilityVector,
) -> Result<SynthesisOutcome> {
    if m < 3 || n < 3 || u.m() != m || k < 1 || k > (n - 1) / 2 {
        return Err(Error::domain(format!(
            "need m >= 3, n >= 3, 1 <= k <= floor((n-1)/2) and a length-m utility; got m = {m}, n = {n}, k = {k}"
        )));
    }
    let gap = u.at_rank(1) - u.at_rank(2);
    let bound = rank_based_bound(u, k);
    if gap >= bound {
        return Err(Error::domain(format!(
            "hypothesis fails: u(1) - u(2) = {gap} is not below {bound}"
        )));
    }
    synthesize(&rank_based_problem(m, n, k, u))
}

/// Ex post efficient, (k, alpha)-unanimous, strategyproof for `u`, anonymous classes.
pub fn expost_problem(m: usize, n: usize, k: usize, alpha: Rational, u: &UtilityVector) -> SynthesisProblem {
    SynthesisProblem::new(
        m,
        n,
        ClassMode::Anonymous,
        vec![Axiom::ExPost, Axiom::KAlphaUnanimity { k, alpha }],
        UtilitySet::single(u.clone()),
    )
}

/// Certifies that no ex post efficient strategyproof rule gives at least
/// `(n-k)/n + eps` to alternatives ranked first by `n - k` voters, when
/// `u(1) - u(2) <= (eps/2)(u(2) - u(3))`.
pub fn certify_expost_impossibility(
    m: usize,
    n: usize,
    k: usize,
    eps: &Rational,
    u: &UtilityVector,
) -> Result<SynthesisOutcome> {
    if m < 3 || n < 3 || u.m() != m || k > n {
        return Err(Error::domain(format!(
            "need m >= 3, n >= 3, k <= n and a length-m utility; got m = {m}, n = {n}, k = {k}"
        )));
    }
    let alpha = ratio((n - k) as i64, n as i64) + eps;
    if alpha > int(1) || eps <= &Rational::zero() {
        return Err(Error::domain(format!(
            "need eps > 0 and (n-k)/n + eps <= 1; got alpha = {alpha}"
        )));
    }
    let gap = u.at_rank(1) - u.at_rank(2);
    let allowed = eps / int(2) * (u.at_rank(2) - u.at_rank(3));
    if gap > allowed {
        return Err(Error::domain(format!(
            "hypothesis fails: u(1) - u(2) = {gap} exceeds (eps/2)(u(2) - u(3)) = {allowed}"
        )));
    }
    synthesize(&expost_problem(m, n, k, alpha, u))
}
