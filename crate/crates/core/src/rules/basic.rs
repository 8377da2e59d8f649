use crate::error::{Error, Result};
use crate::lottery::Lottery;
use crate::profile::{Alternative, Profile};

use super::{SocialDecisionScheme, Symmetries};

fn need_alternatives(m: usize) -> Result<()> {
    if m == 0 {
        Err(Error::domain("no alternatives"))
    } else {
        Ok(())
    }
}

/// Random dictatorship: each voter's favorite with probability `1/n`.
#[derive(Debug, Clone, Copy)]
pub struct Rd;

impl SocialDecisionScheme for Rd {
    fn name(&self) -> String {
        "rd".into()
    }

    fn check_domain(&self, m: usize, _n: usize) -> Result<()> {
        need_alternatives(m)
    }

    fn symmetries(&self) -> Symmetries {
        Symmetries::ALL
    }

    fn evaluate_unchecked(&self, profile: &Profile) -> Result<Lottery> {
        Ok(Lottery::from_counts(&profile.top_counts()))
    }
}

/// Random dictatorship that commits to `x` once `n - k` voters rank it first.
#[derive(Debug, Clone, Copy)]
pub struct RdK {
    pub k: usize,
}

impl SocialDecisionScheme for RdK {
    fn name(&self) -> String {
        format!("rd_k:k={}", self.k)
    }

    fn check_domain(&self, m: usize, n: usize) -> Result<()> {
        need_alternatives(m)?;
        if self.k == 0 || n == 0 || self.k > (n - 1) / 2 {
            return Err(Error::domain(format!(
                "rd_k needs 1 <= k <= floor((n-1)/2); got k = {}, n = {n}",
                self.k
            )));
        }
        Ok(())
    }

    fn symmetries(&self) -> Symmetries {
        Symmetries::ALL
    }

    fn evaluate_unchecked(&self, profile: &Profile) -> Result<Lottery> {
        let counts = profile.top_counts();
        let threshold = profile.n() - self.k;
        Ok(match counts.iter().position(|&c| c >= threshold) {
            Some(x) => Lottery::point(profile.m(), x),
            None => Lottery::from_counts(&counts),
        })
    }
}

/// Majority favorite if one exists, otherwise uniform over all top choices.
#[derive(Debug, Clone, Copy)]
pub struct OmniStar;

impl SocialDecisionScheme for OmniStar {
    fn name(&self) -> String {
        "omni_star".into()
    }

    fn check_domain(&self, m: usize, _n: usize) -> Result<()> {
        need_alternatives(m)
    }

    fn symmetries(&self) -> Symmetries {
        Symmetries::ALL
    }

    fn evaluate_unchecked(&self, profile: &Profile) -> Result<Lottery> {
        Ok(omni_star(profile))
    }
}

pub(crate) fn omni_star(profile: &Profile) -> Lottery {
    let counts = profile.top_counts();
    let n = profile.n();
    if let Some(x) = counts.iter().position(|&c| 2 * c > n) {
        return Lottery::point(profile.m(), x);
    }
    let tops: Vec<Alternative> = (0..profile.m()).filter(|&x| counts[x] > 0).collect();
    Lottery::uniform_over(profile.m(), &tops)
}

/// Condorcet winner if one exists, otherwise uniform over all alternatives.
#[derive(Debug, Clone, Copy)]
pub struct Cond;

impl SocialDecisionScheme for Cond {
    fn name(&self) -> String {
        "cond".into()
    }

    fn check_domain(&self, m: usize, _n: usize) -> Result<()> {
        need_alternatives(m)
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
        Ok(cond(profile))
    }
}

pub(crate) fn cond(profile: &Profile) -> Lottery {
    match profile.condorcet_winner() {
        Some(w) => Lottery::point(profile.m(), w),
        None => Lottery::uniform(profile.m()),
    }
}

/// Voter `voter` always gets their favorite.
#[derive(Debug, Clone, Copy)]
pub struct Dictator {
    pub voter: usize,
}

impl SocialDecisionScheme for Dictator {
    fn name(&self) -> String {
        format!("dictator:i={}", self.voter)
    }

    fn check_domain(&self, m: usize, n: usize) -> Result<()> {
        need_alternatives(m)?;
        if self.voter >= n {
            return Err(Error::domain(format!(
                "dictator {} needs more than {n} voters",
                self.voter
            )));
        }
        Ok(())
    }

    fn symmetries(&self) -> Symmetries {
        Symmetries {
            anonymous: false,
            neutral: true,
            rank_based: false,
            tops_only: true,
        }
    }

    fn evaluate_unchecked(&self, profile: &Profile) -> Result<Lottery> {
        Ok(Lottery::point(profile.m(), profile.pref(self.voter).top()))
    }
}

/// The uniform lottery regardless of the profile.
#[derive(Debug, Clone, Copy)]
pub struct Uniform;

impl SocialDecisionScheme for Uniform {
    fn name(&self) -> String {
        "uniform".into()
    }

    fn check_domain(&self, m: usize, _n: usize) -> Result<()> {
        need_alternatives(m)
    }

    fn symmetries(&self) -> Symmetries {
        Symmetries::ALL
    }

    fn evaluate_unchecked(&self, profile: &Profile) -> Result<Lottery> {
        Ok(Lottery::uniform(profile.m()))
    }
}

/// Always alternative `x`.
#[derive(Debug, Clone, Copy)]
pub struct Constant {
    pub x: Alternative,
}

impl SocialDecisionScheme for Constant {
    fn name(&self) -> String {
        format!("constant:x={}", self.x)
    }

    fn check_domain(&self, m: usize, _n: usize) -> Result<()> {
        if self.x >= m {
            return Err(Error::domain(format!(
                "constant alternative {} out of range for m = {m}",
                self.x
            )));
        }
        Ok(())
    }

    fn symmetries(&self) -> Symmetries {
        Symmetries {
            anonymous: true,
            neutral: false,
            rank_based: true,
            tops_only: true,
        }
    }

    fn evaluate_unchecked(&self, profile: &Profile) -> Result<Lottery> {
        Ok(Lottery::point(profile.m(), self.x))
    }
}
