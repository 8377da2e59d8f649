use std::sync::Arc;

use serde::{Deserialize, Serialize};
use usp_core::manip::{sp_boundary_with, SpOptions};
use usp_core::rational::{self, int};
use usp_core::rules::{OmniStar, Rd, RdK};
use usp_core::synth::rank_based_bound;
use usp_core::{Error, Rational, Result, Rule, UtilityVector};

/// One rule's strategyproofness threshold for `u(1)`, next to the least
/// `u(1)` any rank-based rule with the same unanimity level could manage.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdRow {
    pub rule: String,
    /// The rule is `k`-unanimous.
    pub k: usize,
    #[serde(with = "rational::serde_str")]
    pub boundary: Rational,
    /// False when the rule passes for every `u(1) > u(2)`.
    pub attained: bool,
    /// `Σ_{i = max(3, m-k+1)}^{m} (u(2) - u(i)) + u(2)`.
    #[serde(with = "rational::serde_str")]
    pub rank_based_bound: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdTable {
    pub m: usize,
    pub n: usize,
    #[serde(with = "rational::serde_vec")]
    pub tail: Vec<Rational>,
    pub rows: Vec<ThresholdRow>,
}

/// Rows: `rd`, `rd_k` for `k = 1..=min((n-1)/2, max_rd_k)`, `omni_star`.
pub fn threshold_table(
    m: usize,
    tail: &[Rational],
    n: usize,
    max_rd_k: usize,
    opts: &SpOptions,
) -> Result<ThresholdTable> {
    if tail.len() + 1 != m {
        return Err(Error::domain(format!(
            "tail has {} values; m = {m} needs {}",
            tail.len(),
            m.saturating_sub(1)
        )));
    }
    let mut full = vec![&tail[0] + int(1)];
    full.extend_from_slice(tail);
    let probe = UtilityVector::new(full)?;
    let majority = n.saturating_sub(1) / 2;
    let mut rules: Vec<(Rule, usize)> = vec![(Arc::new(Rd), 0)];
    for k in 1..=majority.min(max_rd_k) {
        rules.push((Arc::new(RdK { k }), k));
    }
    rules.push((Arc::new(OmniStar), majority));
    let rows = rules
        .into_iter()
        .map(|(rule, k)| {
            let b = sp_boundary_with(rule.as_ref(), tail, m, n, opts)?;
            Ok(ThresholdRow {
                rule: rule.name(),
                k,
                boundary: b.threshold,
                attained: b.attained,
                rank_based_bound: rank_based_bound(&probe, k) + &tail[0],
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ThresholdTable {
        m,
        n,
        tail: tail.to_vec(),
        rows,
    })
}

impl ThresholdTable {
    /// Plain-text rendering, one row per rule.
    pub fn render(&self) -> String {
        let mut out = format!("{:<12} {:>3} {:>10} {:>12}\n", "rule", "k", "boundary", "rank bound");
        for r in &self.rows {
            let b = if r.attained {
                r.boundary.to_string()
            } else {
                format!("{}+", r.boundary)
            };
            out.push_str(&format!(
                "{:<12} {:>3} {:>10} {:>12}\n",
                r.rule, r.k, b, r.rank_based_bound
            ));
        }
        out
    }
}
