use std::collections::BTreeSet;
use std::sync::Mutex;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, ratio, Rational};
use crate::rules::SocialDecisionScheme;
use crate::utility::{is_strictly_decreasing, UtilityVector};

use super::{check_u_pi_sp_with, sweep, SpOptions};

/// Least top utility for which a rule is strategyproof given the rest of the vector.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpBoundary {
    #[serde(with = "rational::serde_str")]
    pub threshold: Rational,
    /// False when every `u(1) > u(2)` passes, so the threshold is `u(2)`
    /// itself and not reached.
    pub attained: bool,
}

pub fn sp_boundary(
    f: &dyn SocialDecisionScheme,
    tail: &[Rational],
    m: usize,
    n: usize,
) -> Result<SpBoundary> {
    sp_boundary_with(f, tail, m, n, &SpOptions::default())
}

/// Each deviation with coefficients `c` gains iff `c_1 u(1) + Σ_{r>=2} c_r u(r) > 0`,
/// so the set of passing `u(1)` is an up-ray whose end is the largest
/// `b / -c_1` over deviations with `c_1 < 0`. The result is then checked by
/// two sweeps: pass at the threshold, a witness just below it.
pub fn sp_boundary_with(
    f: &dyn SocialDecisionScheme,
    tail: &[Rational],
    m: usize,
    n: usize,
    opts: &SpOptions,
) -> Result<SpBoundary> {
    if tail.len() + 1 != m || !is_strictly_decreasing(tail) {
        return Err(Error::domain(format!(
            "tail must be {} strictly decreasing values u(2..m)",
            m.saturating_sub(1)
        )));
    }
    let seen: Mutex<BTreeSet<Vec<Rational>>> = Mutex::new(BTreeSet::new());
    let (_, _, undefined) = sweep(f, m, n, opts, |dev, _, _, coeffs| {
        let a = &coeffs[0];
        let b: Rational = coeffs[1..].iter().zip(tail).map(|(c, u)| c * u).sum();
        if a.is_positive() || (a.is_zero() && b.is_positive()) {
            return Ok(Some(dev.clone()));
        }
        seen.lock().unwrap().insert(coeffs.to_vec());
        Ok(None)
    })?;
    if let Some(dev) = undefined {
        return Err(Error::domain(format!(
            "boundary undefined for this rule: voter {} at {} gains by reporting {} for every large u(1)",
            dev.voter, dev.profile, dev.misreport
        )));
    }
    let u2 = &tail[0];
    let mut bound: Option<Rational> = None;
    for coeffs in seen.into_inner().unwrap() {
        let a = &coeffs[0];
        if a.is_negative() {
            let b: Rational = coeffs[1..].iter().zip(tail).map(|(c, u)| c * u).sum();
            let t = b / -a;
            if bound.as_ref().map_or(true, |x| &t > x) {
                bound = Some(t);
            }
        }
    }
    let result = match bound {
        Some(b) if &b > u2 => SpBoundary {
            threshold: b,
            attained: true,
        },
        _ => SpBoundary {
            threshold: u2.clone(),
            attained: false,
        },
    };
    let with_top = |top: Rational| {
        let mut v = vec![top];
        v.extend_from_slice(tail);
        UtilityVector::new(v)
    };
    if result.attained {
        let at = with_top(result.threshold.clone())?;
        if !check_u_pi_sp_with(f, &at, m, n, opts)?.passed() {
            return Err(Error::Internal(format!("no pass at computed threshold {}", result.threshold)));
        }
        let below = &result.threshold - ratio(1, 1000);
        if &below > u2 && check_u_pi_sp_with(f, &with_top(below.clone())?, m, n, opts)?.passed() {
            return Err(Error::Internal(format!("pass below computed threshold at {below}")));
        }
    } else {
        let probe = u2 + ratio(1, 1000);
        if !check_u_pi_sp_with(f, &with_top(probe.clone())?, m, n, opts)?.passed() {
            return Err(Error::Internal(format!("witness at {probe} despite empty bound")));
        }
    }
    Ok(result)
}
