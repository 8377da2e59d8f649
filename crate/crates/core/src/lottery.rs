use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::Alternative;
use crate::rational::{int, Rational};

/// Exact probability distribution over `m` alternatives.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Lottery {
    probs: Vec<Rational>,
}

impl Lottery {
    /// Rejects negative entries and any vector whose sum is not exactly one.
    pub fn new(probs: Vec<Rational>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::domain("lottery over zero alternatives"));
        }
        if let Some(p) = probs.iter().find(|p| p.is_negative()) {
            return Err(Error::domain(format!("negative probability {p}")));
        }
        let total: Rational = probs.iter().sum();
        if !total.is_one() {
            return Err(Error::domain(format!("probabilities sum to {total}, not 1")));
        }
        Ok(Lottery { probs })
    }

    pub fn point(m: usize, x: Alternative) -> Self {
        let mut probs = vec![Rational::zero(); m];
        probs[x] = Rational::one();
        Lottery { probs }
    }

    /// Uniform over `support`, which must be non-empty and duplicate-free.
    pub fn uniform_over(m: usize, support: &[Alternative]) -> Self {
        let share = Rational::new(1.into(), (support.len() as i64).into());
        let mut probs = vec![Rational::zero(); m];
        for &x in support {
            probs[x] = share.clone();
        }
        Lottery { probs }
    }

    pub fn uniform(m: usize) -> Self {
        Lottery::uniform_over(m, &(0..m).collect::<Vec<_>>())
    }

    /// `counts[x] / total` for each `x`.
    pub fn from_counts(counts: &[usize]) -> Self {
        let total: usize = counts.iter().sum();
        let den = int(total as i64);
        Lottery {
            probs: counts.iter().map(|&c| int(c as i64) / &den).collect(),
        }
    }

    /// `lambda * a + (1 - lambda) * b`.
    pub fn mix(a: &Lottery, b: &Lottery, lambda: &Rational) -> Self {
        let rest = Rational::one() - lambda;
        Lottery {
            probs: a
                .probs
                .iter()
                .zip(&b.probs)
                .map(|(p, q)| lambda * p + &rest * q)
                .collect(),
        }
    }

    /// Average of a non-empty list of lotteries.
    pub fn average(parts: &[Lottery]) -> Self {
        let m = parts[0].m();
        let mut probs = vec![Rational::zero(); m];
        for l in parts {
            for (acc, p) in probs.iter_mut().zip(&l.probs) {
                *acc += p;
            }
        }
        let den = int(parts.len() as i64);
        Lottery {
            probs: probs.into_iter().map(|p| p / &den).collect(),
        }
    }

    pub fn m(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[Rational] {
        &self.probs
    }

    pub fn prob(&self, x: Alternative) -> &Rational {
        &self.probs[x]
    }

    pub fn support(&self) -> Vec<Alternative> {
        (0..self.m()).filter(|&x| !self.probs[x].is_zero()).collect()
    }

    /// The lottery seen through a relabeling: mass on `x` moves to `tau[x]`.
    pub fn relabel(&self, tau: &[Alternative]) -> Self {
        let mut probs = vec![Rational::zero(); self.m()];
        for (x, p) in self.probs.iter().enumerate() {
            probs[tau[x]] = p.clone();
        }
        Lottery { probs }
    }
}

impl fmt::Display for Lottery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.probs.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl fmt::Debug for Lottery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Lottery{self}")
    }
}

impl Serialize for Lottery {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        crate::rational::serde_vec::serialize(&self.probs, s)
    }
}

impl<'de> Deserialize<'de> for Lottery {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let probs = crate::rational::serde_vec::deserialize(d)?;
        Lottery::new(probs).map_err(serde::de::Error::custom)
    }
}
