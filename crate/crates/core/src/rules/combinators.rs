use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::lottery::Lottery;
use crate::profile::{binomial, Profile};
use crate::rational::Rational;

use super::{Rule, SocialDecisionScheme, Symmetries};

/// Pointwise `lambda * f + (1 - lambda) * g`.
#[derive(Debug, Clone)]
pub struct Mix {
    f: Rule,
    g: Rule,
    lambda: Rational,
}

impl Mix {
    pub fn new(f: Rule, g: Rule, lambda: Rational) -> Result<Self> {
        if lambda.is_negative() || lambda > Rational::one() {
            return Err(Error::domain(format!("mixing weight {lambda} outside [0, 1]")));
        }
        Ok(Mix { f, g, lambda })
    }
}

impl SocialDecisionScheme for Mix {
    fn name(&self) -> String {
        format!(
            "mix:f=[{}],g=[{}],lambda={}",
            self.f.name(),
            self.g.name(),
            self.lambda
        )
    }

    fn check_domain(&self, m: usize, n: usize) -> Result<()> {
        self.f.check_domain(m, n)?;
        self.g.check_domain(m, n)
    }

    fn symmetries(&self) -> Symmetries {
        self.f.symmetries().intersect(self.g.symmetries())
    }

    fn fixed_n(&self) -> Option<usize> {
        self.f.fixed_n().or(self.g.fixed_n())
    }

    fn evaluate_unchecked(&self, profile: &Profile) -> Result<Lottery> {
        let a = self.f.evaluate_unchecked(profile)?;
        let b = self.g.evaluate_unchecked(profile)?;
        Ok(Lottery::mix(&a, &b, &self.lambda))
    }
}

/// Extends an anonymous rule for `from` voters to `to` voters by averaging
/// it over every `from`-subset of the electorate.
#[derive(Debug, Clone)]
pub struct SubsetLift {
    base: Rule,
    from: usize,
    to: usize,
}

impl SubsetLift {
    /// The base rule must declare anonymity; [`crate::axioms::check_anonymity`]
    /// verifies the claim at a concrete size.
    pub fn new(base: Rule, from: usize, to: usize) -> Result<Self> {
        if to <= from || from == 0 {
            return Err(Error::domain(format!(
                "lift needs 0 < from < to; got from = {from}, to = {to}"
            )));
        }
        if !base.symmetries().anonymous {
            return Err(Error::domain(format!(
                "lift needs an anonymous base rule; {} is not declared anonymous",
                base.name()
            )));
        }
        if binomial(to as u128, from as u128) > 1_000_000 {
            return Err(Error::domain("lift would average over more than 10^6 subsets"));
        }
        Ok(SubsetLift { base, from, to })
    }

    pub fn base(&self) -> &Rule {
        &self.base
    }

    pub fn from(&self) -> usize {
        self.from
    }
}

impl SocialDecisionScheme for SubsetLift {
    fn name(&self) -> String {
        format!("lift:base=[{}],from={},n={}", self.base.name(), self.from, self.to)
    }

    fn check_domain(&self, m: usize, n: usize) -> Result<()> {
        if n != self.to {
            return Err(Error::domain(format!(
                "lifted rule is defined for n = {}, got {n}",
                self.to
            )));
        }
        self.base.check_domain(m, self.from)
    }

    fn symmetries(&self) -> Symmetries {
        let b = self.base.symmetries();
        Symmetries {
            anonymous: true,
            neutral: b.neutral,
            rank_based: false,
            tops_only: b.tops_only,
        }
    }

    fn fixed_n(&self) -> Option<usize> {
        Some(self.to)
    }

    fn evaluate_unchecked(&self, profile: &Profile) -> Result<Lottery> {
        let mut parts = Vec::new();
        let mut subset: Vec<usize> = (0..self.from).collect();
        loop {
            let prefs = subset.iter().map(|&i| profile.pref(i).clone()).collect();
            parts.push(self.base.evaluate_unchecked(&Profile::new(prefs)?)?);
            // Next combination in lexicographic order.
            let k = self.from;
            let Some(pos) = (0..k).rev().find(|&i| subset[i] < self.to - k + i) else {
                break;
            };
            subset[pos] += 1;
            for i in pos + 1..k {
                subset[i] = subset[i - 1] + 1;
            }
        }
        Ok(Lottery::average(&parts))
    }
}
