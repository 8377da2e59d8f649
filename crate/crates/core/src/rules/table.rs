use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lottery::Lottery;
use crate::profile::Profile;

use super::{SocialDecisionScheme, Symmetries};

/// How profiles are grouped into classes that share one lottery.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassMode {
    /// Every profile is its own class.
    Full,
    /// Profiles with the same multiset of preferences.
    Anonymous,
    /// Profiles with the same rank matrix.
    RankBased,
}

impl ClassMode {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(ClassMode::Full),
            "anonymous" => Ok(ClassMode::Anonymous),
            "rank_based" => Ok(ClassMode::RankBased),
            other => Err(Error::parse(format!(
                "unknown symmetry mode `{other}`; valid modes: full, anonymous, rank_based"
            ))),
        }
    }

    /// Key identifying the class of `profile`.
    pub fn key(self, profile: &Profile) -> Vec<u16> {
        match self {
            ClassMode::Full => profile.pref_indices().into_iter().map(|i| i as u16).collect(),
            ClassMode::Anonymous => {
                let mut idx: Vec<u16> =
                    profile.pref_indices().into_iter().map(|i| i as u16).collect();
                idx.sort_unstable();
                idx
            }
            ClassMode::RankBased => profile
                .rank_matrix()
                .key()
                .into_iter()
                .map(u16::from)
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableEntry {
    pub profile: Profile,
    pub lottery: Lottery,
}

/// File form of a tabulated rule: one representative profile per class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableDoc {
    pub m: usize,
    pub n: usize,
    pub mode: ClassMode,
    pub entries: Vec<TableEntry>,
}

/// A rule given by a finite table, e.g. the output of synthesis.
#[derive(Debug, Clone)]
pub struct TableRule {
    doc: TableDoc,
    index: HashMap<Vec<u16>, usize>,
    label: String,
}

impl TableRule {
    pub fn new(doc: TableDoc) -> Result<Self> {
        let mut index: HashMap<Vec<u16>, usize> = HashMap::with_capacity(doc.entries.len());
        for (i, entry) in doc.entries.iter().enumerate() {
            let p = &entry.profile;
            if p.m() != doc.m || p.n() != doc.n || entry.lottery.m() != doc.m {
                return Err(Error::domain(format!(
                    "table entry {i} does not match m = {}, n = {}",
                    doc.m, doc.n
                )));
            }
            let key = doc.mode.key(p);
            if let Some(&j) = index.get(&key) {
                if doc.entries[j].lottery != entry.lottery {
                    return Err(Error::domain(format!(
                        "table entries {j} and {i} share a class but differ"
                    )));
                }
            } else {
                index.insert(key, i);
            }
        }
        Ok(TableRule {
            doc,
            index,
            label: "table".into(),
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: TableDoc =
            serde_json::from_str(text).map_err(|e| Error::parse(format!("table: {e}")))?;
        TableRule::new(doc)
    }

    pub fn doc(&self) -> &TableDoc {
        &self.doc
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }
}

impl SocialDecisionScheme for TableRule {
    fn name(&self) -> String {
        self.label.clone()
    }

    fn check_domain(&self, m: usize, n: usize) -> Result<()> {
        if m != self.doc.m || n != self.doc.n {
            return Err(Error::domain(format!(
                "table is defined for m = {}, n = {}; got m = {m}, n = {n}",
                self.doc.m, self.doc.n
            )));
        }
        Ok(())
    }

    fn symmetries(&self) -> Symmetries {
        match self.doc.mode {
            ClassMode::Full => Symmetries::NONE,
            ClassMode::Anonymous => Symmetries {
                anonymous: true,
                ..Symmetries::NONE
            },
            ClassMode::RankBased => Symmetries {
                anonymous: true,
                rank_based: true,
                ..Symmetries::NONE
            },
        }
    }

    fn fixed_n(&self) -> Option<usize> {
        Some(self.doc.n)
    }

    fn evaluate_unchecked(&self, profile: &Profile) -> Result<Lottery> {
        let key = self.doc.mode.key(profile);
        self.index
            .get(&key)
            .map(|&i| self.doc.entries[i].lottery.clone())
            .ok_or_else(|| Error::domain(format!("profile {profile} is not covered by the table")))
    }
}
