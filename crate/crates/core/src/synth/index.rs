//! Profile classes for synthesis and the deviation edges between them.

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::{
    all_preferences, anonymous_profile_count, full_profile_at, full_profile_count, multisets,
    orbit_size, profile_from_indices, Preference, Profile,
};
use crate::rules::ClassMode;

/// Largest base enumeration `enumerate_profiles` accepts.
pub const DEFAULT_CAP: u128 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileClass {
    pub representative: Profile,
    /// Number of profiles in the class.
    pub size: u128,
    /// Voter-sorted profiles in the class whose deviations generate edges.
    pub members: Vec<Profile>,
}

/// A voter with true preference `true_pref` in some member of class `from`
/// can move the profile into class `to`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DeviationEdge {
    pub from: usize,
    pub to: usize,
    /// Index of the deviator's true preference.
    pub true_pref: usize,
}

#[derive(Clone, Debug)]
pub struct ProfileClassIndex {
    pub mode: ClassMode,
    pub m: usize,
    pub n: usize,
    pub classes: Vec<ProfileClass>,
    pub edges: Vec<DeviationEdge>,
    /// Whether the classes are an explicit list instead of the whole space.
    pub partial: bool,
    keys: HashMap<Vec<u16>, usize>,
}

impl ProfileClassIndex {
    pub fn class_of(&self, profile: &Profile) -> Option<usize> {
        self.keys.get(&self.key(profile)).copied()
    }

    fn key(&self, profile: &Profile) -> Vec<u16> {
        if self.partial {
            ClassMode::Full.key(profile)
        } else {
            self.mode.key(profile)
        }
    }

    pub fn total_size(&self) -> u128 {
        self.classes.iter().map(|c| c.size).sum()
    }

    pub fn preference(&self, index: usize) -> Preference {
        Preference::from_index(self.m, index)
    }

    /// Singleton classes for `profiles`, with edges between listed profiles
    /// that differ in exactly one voter.
    pub fn from_profiles(profiles: Vec<Profile>) -> Result<Self> {
        let first = profiles
            .first()
            .ok_or_else(|| Error::domain("empty profile list"))?;
        let (m, n) = (first.m(), first.n());
        if profiles.iter().any(|p| p.m() != m || p.n() != n) {
            return Err(Error::domain("listed profiles differ in m or n"));
        }
        let mut keys = HashMap::new();
        let mut classes = Vec::new();
        for p in profiles {
            let key = ClassMode::Full.key(&p);
            if keys.contains_key(&key) {
                continue;
            }
            keys.insert(key, classes.len());
            classes.push(ProfileClass {
                representative: p.clone(),
                size: 1,
                members: vec![p],
            });
        }
        let mut edges = Vec::new();
        for (i, a) in classes.iter().enumerate() {
            for (j, b) in classes.iter().enumerate() {
                let a = &a.representative;
                let b = &b.representative;
                let differing: Vec<usize> = (0..n).filter(|&v| a.pref(v) != b.pref(v)).collect();
                if let [v] = differing[..] {
                    edges.push(DeviationEdge {
                        from: i,
                        to: j,
                        true_pref: a.pref(v).index(),
                    });
                }
            }
        }
        Ok(ProfileClassIndex {
            mode: ClassMode::Full,
            m,
            n,
            classes,
            edges,
            partial: true,
            keys,
        })
    }
}

fn refuse(what: &str, needed: u128, cap: u128) -> Error {
    Error::Refused {
        what: what.to_string(),
        needed: needed.to_string(),
        cap,
    }
}

pub fn enumerate_profiles(m: usize, n: usize, mode: ClassMode) -> Result<ProfileClassIndex> {
    enumerate_profiles_capped(m, n, mode, DEFAULT_CAP)
}

/// All profile classes for `(m, n)` under `mode`, with every deviation edge.
pub fn enumerate_profiles_capped(
    m: usize,
    n: usize,
    mode: ClassMode,
    cap: u128,
) -> Result<ProfileClassIndex> {
    if m == 0 || n == 0 {
        return Err(Error::domain("need m >= 1 and n >= 1"));
    }
    let prefs = all_preferences(m);
    let mut keys: HashMap<Vec<u16>, usize> = HashMap::new();
    let mut classes: Vec<ProfileClass> = Vec::new();
    match mode {
        ClassMode::Full => {
            let count = full_profile_count(m, n);
            if count > cap {
                return Err(refuse("enumeration of all profiles", count, cap));
            }
            for idx in 0..count {
                let p = full_profile_at(&prefs, n, idx);
                keys.insert(mode.key(&p), classes.len());
                classes.push(ProfileClass {
                    representative: p.clone(),
                    size: 1,
                    members: vec![p],
                });
            }
        }
        ClassMode::Anonymous | ClassMode::RankBased => {
            let count = anonymous_profile_count(m, n);
            if count > cap {
                return Err(refuse("enumeration of anonymous profiles", count, cap));
            }
            for digits in multisets(prefs.len(), n) {
                let p = profile_from_indices(&prefs, &digits);
                let size = orbit_size(&digits);
                let key = mode.key(&p);
                match keys.get(&key) {
                    Some(&c) => {
                        classes[c].size += size;
                        classes[c].members.push(p);
                    }
                    None => {
                        keys.insert(key, classes.len());
                        classes.push(ProfileClass {
                            representative: p.clone(),
                            size,
                            members: vec![p],
                        });
                    }
                }
            }
        }
    }
    let voters_to_try = |p: &Profile| -> Vec<usize> {
        match mode {
            ClassMode::Full => (0..n).collect(),
            _ => (0..n)
                .filter(|&v| v == 0 || p.pref(v) != p.pref(v - 1))
                .collect(),
        }
    };
    let raw: Vec<Vec<DeviationEdge>> = classes
        .par_iter()
        .enumerate()
        .map(|(from, class)| {
            let mut seen = HashSet::new();
            let mut out = Vec::new();
            for member in &class.members {
                for v in voters_to_try(member) {
                    let own = member.pref(v);
                    for q in &prefs {
                        if q == own {
                            continue;
                        }
                        let to = keys[&mode.key(&member.with_voter(v, q.clone()))];
                        let edge = DeviationEdge {
                            from,
                            to,
                            true_pref: own.index(),
                        };
                        if to != from && seen.insert(edge) {
                            out.push(edge);
                        }
                    }
                }
            }
            out
        })
        .collect();
    Ok(ProfileClassIndex {
        mode,
        m,
        n,
        classes,
        edges: raw.into_iter().flatten().collect(),
        partial: false,
        keys,
    })
}
