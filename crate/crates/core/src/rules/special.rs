use crate::error::{Error, Result};
use crate::lottery::Lottery;
use crate::profile::Profile;
use crate::rational::ratio;

use super::basic::{cond, omni_star};
use super::{SocialDecisionScheme, Symmetries};

/// Five voters: random dictatorship when at least four alternatives are
/// ranked first by someone, the omni-majority rule otherwise.
#[derive(Debug, Clone, Copy)]
pub struct F1;

impl SocialDecisionScheme for F1 {
    fn name(&self) -> String {
        "f1".into()
    }

    fn check_domain(&self, m: usize, n: usize) -> Result<()> {
        if n != 5 || m < 4 {
            return Err(Error::domain(format!(
                "f1 is defined for n = 5, m >= 4; got m = {m}, n = {n}"
            )));
        }
        Ok(())
    }

    fn symmetries(&self) -> Symmetries {
        Symmetries::ALL
    }

    fn fixed_n(&self) -> Option<usize> {
        Some(5)
    }

    fn evaluate_unchecked(&self, profile: &Profile) -> Result<Lottery> {
        let counts = profile.top_counts();
        let distinct = counts.iter().filter(|&&c| c > 0).count();
        Ok(if distinct >= 4 {
            Lottery::from_counts(&counts)
        } else {
            omni_star(profile)
        })
    }
}

/// Three alternatives, four voters. A favorite of three or more voters
/// wins; a 2/2 split of favorites is a coin flip; when `x` is the favorite
/// of two voters and the other two favor `y` and `z`, the outcome depends on
/// where those two place `x`.
#[derive(Debug, Clone, Copy)]
pub struct F2;

impl SocialDecisionScheme for F2 {
    fn name(&self) -> String {
        "f2".into()
    }

    fn check_domain(&self, m: usize, n: usize) -> Result<()> {
        if m != 3 || n != 4 {
            return Err(Error::domain(format!(
                "f2 is defined for m = 3, n = 4; got m = {m}, n = {n}"
            )));
        }
        Ok(())
    }

    fn symmetries(&self) -> Symmetries {
        Symmetries {
            anonymous: true,
            neutral: true,
            rank_based: false,
            tops_only: false,
        }
    }

    fn fixed_n(&self) -> Option<usize> {
        Some(4)
    }

    fn evaluate_unchecked(&self, profile: &Profile) -> Result<Lottery> {
        let counts = profile.top_counts();
        if let Some(x) = counts.iter().position(|&c| c >= 3) {
            return Ok(Lottery::point(3, x));
        }
        let pairs: Vec<usize> = (0..3).filter(|&a| counts[a] == 2).collect();
        if pairs.len() == 2 {
            return Ok(Lottery::uniform_over(3, &pairs));
        }
        let x = match pairs.as_slice() {
            [x] => *x,
            _ => {
                return Err(Error::Internal(format!(
                    "top counts {counts:?} escape the case analysis"
                )))
            }
        };
        // The two remaining voters, each favoring one of the other alternatives.
        let others: Vec<_> = profile.prefs().iter().filter(|p| p.top() != x).collect();
        let second: Vec<_> = others.iter().filter(|p| p.rank_of(x) == 2).collect();
        let mut probs = vec![ratio(0, 1); 3];
        match second.len() {
            2 => return Ok(Lottery::point(3, x)),
            0 => {
                probs[x] = ratio(1, 2);
                for p in &others {
                    probs[p.top()] = ratio(1, 4);
                }
            }
            _ => {
                // The voter placing x second favors y; the other one ranks
                // both y and z above x and favors z.
                let y = second[0].top();
                let z = 3 - x - y;
                probs[x] = ratio(4, 7);
                probs[y] = ratio(2, 7);
                probs[z] = ratio(1, 7);
            }
        }
        Lottery::new(probs)
    }
}

/// Three alternatives, even `n`: a coin flip when two alternatives are
/// each the favorite of exactly half the voters, the Condorcet rule otherwise.
#[derive(Debug, Clone, Copy)]
pub struct F3;

impl SocialDecisionScheme for F3 {
    fn name(&self) -> String {
        "f3".into()
    }

    fn check_domain(&self, m: usize, n: usize) -> Result<()> {
        if m != 3 || n == 0 || n % 2 != 0 {
            return Err(Error::domain(format!(
                "f3 is defined for m = 3 and even n; got m = {m}, n = {n}"
            )));
        }
        Ok(())
    }

    fn symmetries(&self) -> Symmetries {
        Symmetries {
            anonymous: true,
            neutral: true,
            rank_based: false,
            tops_only: false,
        }
    }

    fn evaluate_unchecked(&self, profile: &Profile) -> Result<Lottery> {
        let half = profile.n() / 2;
        let counts = profile.top_counts();
        let halves: Vec<usize> = (0..3).filter(|&x| counts[x] == half).collect();
        Ok(if halves.len() == 2 {
            Lottery::uniform_over(3, &halves)
        } else {
            cond(profile)
        })
    }
}
