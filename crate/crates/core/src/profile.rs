//! Strict preferences, profiles and the profile algebra built on them.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Alternatives are indices in `0..m`.
pub type Alternative = usize;

/// Default display name of alternative `x`: `a`, `b`, ... then `x26`, ...
pub fn alternative_name(x: Alternative) -> String {
    if x < 26 {
        ((b'a' + x as u8) as char).to_string()
    } else {
        format!("x{x}")
    }
}

fn parse_alternative_name(name: &str) -> Option<Alternative> {
    let name = name.trim();
    let bytes = name.as_bytes();
    if bytes.len() == 1 && bytes[0].is_ascii_lowercase() {
        return Some((bytes[0] - b'a') as usize);
    }
    name.strip_prefix('x')?.parse().ok()
}

/// A strict total order over `m` alternatives, best first.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Preference {
    order: Vec<u8>,
}

impl Preference {
    pub fn new(order: Vec<Alternative>) -> Result<Self> {
        let m = order.len();
        if m == 0 || m > 255 {
            return Err(Error::domain(format!("preference over {m} alternatives")));
        }
        let mut seen = vec![false; m];
        for &x in &order {
            if x >= m || seen[x] {
                return Err(Error::domain(format!(
                    "{order:?} is not a permutation of 0..{m}"
                )));
            }
            seen[x] = true;
        }
        Ok(Preference {
            order: order.into_iter().map(|x| x as u8).collect(),
        })
    }

    pub fn identity(m: usize) -> Self {
        Preference {
            order: (0..m as u8).collect(),
        }
    }

    /// A preference with `top` first and the rest in index order.
    pub fn with_top(m: usize, top: Alternative) -> Self {
        let mut order = vec![top as u8];
        order.extend((0..m as u8).filter(|&x| x as usize != top));
        Preference { order }
    }

    /// Parses `a > b > c` (or `a,b,c`, `abc`) with default alternative names.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = if s.contains('>') {
            s.split('>').collect()
        } else if s.contains(',') {
            s.split(',').collect()
        } else {
            s.trim()
                .char_indices()
                .map(|(i, c)| &s.trim()[i..i + c.len_utf8()])
                .collect()
        };
        let order = parts
            .iter()
            .map(|p| {
                parse_alternative_name(p)
                    .ok_or_else(|| Error::parse(format!("unknown alternative `{}`", p.trim())))
            })
            .collect::<Result<Vec<_>>>()?;
        Preference::new(order)
    }

    pub fn m(&self) -> usize {
        self.order.len()
    }

    pub fn order(&self) -> impl ExactSizeIterator<Item = Alternative> + '_ {
        self.order.iter().map(|&x| x as usize)
    }

    pub fn top(&self) -> Alternative {
        self.order[0] as usize
    }

    /// Alternative at rank `r` (1-based).
    pub fn at_rank(&self, r: usize) -> Alternative {
        self.order[r - 1] as usize
    }

    /// 1-based rank: one plus the number of alternatives strictly preferred to `x`.
    pub fn rank(&self, x: Alternative) -> Result<usize> {
        self.order
            .iter()
            .position(|&y| y as usize == x)
            .map(|p| p + 1)
            .ok_or_else(|| {
                Error::domain(format!(
                    "alternative {x} out of range for m = {}",
                    self.m()
                ))
            })
    }

    /// Rank without range checking; panics if `x >= m`.
    pub(crate) fn rank_of(&self, x: Alternative) -> usize {
        self.order.iter().position(|&y| y as usize == x).unwrap() + 1
    }

    /// `rank_vector()[x]` is the rank of `x`.
    pub fn rank_vector(&self) -> Vec<usize> {
        let mut ranks = vec![0; self.m()];
        for (p, &x) in self.order.iter().enumerate() {
            ranks[x as usize] = p + 1;
        }
        ranks
    }

    pub fn prefers(&self, x: Alternative, y: Alternative) -> bool {
        self.rank_of(x) < self.rank_of(y)
    }

    /// Position of this preference in the lexicographic list of all `m!` orders.
    pub fn index(&self) -> usize {
        let m = self.m();
        let mut used = vec![false; m];
        let mut idx = 0;
        for (p, &x) in self.order.iter().enumerate() {
            let smaller = (0..x as usize).filter(|&y| !used[y]).count();
            idx += smaller * factorial(m - 1 - p);
            used[x as usize] = true;
        }
        idx
    }

    /// Inverse of [`Preference::index`].
    pub fn from_index(m: usize, mut idx: usize) -> Self {
        let mut pool: Vec<u8> = (0..m as u8).collect();
        let mut order = Vec::with_capacity(m);
        for p in 0..m {
            let f = factorial(m - 1 - p);
            order.push(pool.remove(idx / f));
            idx %= f;
        }
        Preference { order }
    }

    /// Relabels alternatives: `x` becomes `tau[x]`.
    pub fn relabel(&self, tau: &[Alternative]) -> Self {
        Preference {
            order: self.order.iter().map(|&x| tau[x as usize] as u8).collect(),
        }
    }

    pub fn display_with(&self, names: &[String]) -> String {
        self.order()
            .map(|x| names[x].clone())
            .collect::<Vec<_>>()
            .join(">")
    }
}

impl fmt::Display for Preference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.order().map(alternative_name).collect();
        write!(f, "{}", names.join(">"))
    }
}

impl fmt::Debug for Preference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Preference {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Preference {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Preference::parse(&s).map_err(serde::de::Error::custom)
    }
}

pub fn factorial(k: usize) -> usize {
    (1..=k).product()
}

/// All `m!` preferences in lexicographic order.
pub fn all_preferences(m: usize) -> Vec<Preference> {
    (0..factorial(m))
        .map(|i| Preference::from_index(m, i))
        .collect()
}

/// One preference per voter, all over the same `m` alternatives.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Profile {
    m: usize,
    prefs: Vec<Preference>,
}

impl Profile {
    pub fn new(prefs: Vec<Preference>) -> Result<Self> {
        let first = prefs
            .first()
            .ok_or_else(|| Error::domain("a profile needs at least one voter"))?;
        let m = first.m();
        if let Some(p) = prefs.iter().find(|p| p.m() != m) {
            return Err(Error::domain(format!(
                "preference {p} is over {} alternatives, expected {m}",
                p.m()
            )));
        }
        Ok(Profile { m, prefs })
    }

    /// Builds a profile from explicit orders, e.g. `&[&[0, 1, 2], &[2, 1, 0]]`.
    pub fn from_orders(orders: &[&[Alternative]]) -> Result<Self> {
        let prefs = orders
            .iter()
            .map(|o| Preference::new(o.to_vec()))
            .collect::<Result<Vec<_>>>()?;
        Profile::new(prefs)
    }

    /// Parses `a>b>c; b>c>a; ...` with default alternative names.
    pub fn parse_compact(s: &str) -> Result<Self> {
        let prefs = s
            .split(';')
            .filter(|p| !p.trim().is_empty())
            .map(Preference::parse)
            .collect::<Result<Vec<_>>>()?;
        Profile::new(prefs)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.prefs.len()
    }

    pub fn prefs(&self) -> &[Preference] {
        &self.prefs
    }

    pub fn pref(&self, voter: usize) -> &Preference {
        &self.prefs[voter]
    }

    pub fn tops(&self) -> Vec<Alternative> {
        self.prefs.iter().map(Preference::top).collect()
    }

    /// `counts[x]` is the number of voters ranking `x` first.
    pub fn top_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.m];
        for p in &self.prefs {
            counts[p.top()] += 1;
        }
        counts
    }

    /// Copy of the profile with `voter` reporting `pref` instead.
    pub fn with_voter(&self, voter: usize, pref: Preference) -> Self {
        let mut prefs = self.prefs.clone();
        prefs[voter] = pref;
        Profile { m: self.m, prefs }
    }

    /// The same multiset of preferences in canonical (sorted) voter order.
    pub fn sorted(&self) -> Self {
        let mut prefs = self.prefs.clone();
        prefs.sort();
        Profile { m: self.m, prefs }
    }

    pub fn pref_indices(&self) -> Vec<usize> {
        self.prefs.iter().map(Preference::index).collect()
    }

    /// `#{i : x ≻_i y} − #{i : y ≻_i x}`.
    pub fn majority_margin(&self, x: Alternative, y: Alternative) -> Result<i64> {
        if x == y {
            return Err(Error::domain("majority margin of an alternative with itself"));
        }
        if x >= self.m || y >= self.m {
            return Err(Error::domain(format!(
                "alternative out of range for m = {}",
                self.m
            )));
        }
        Ok(self.margin(x, y))
    }

    pub(crate) fn margin(&self, x: Alternative, y: Alternative) -> i64 {
        self.prefs
            .iter()
            .map(|p| if p.prefers(x, y) { 1 } else { -1 })
            .sum()
    }

    /// Full margin matrix; `matrix[x][y] = n_xy`.
    pub fn margin_matrix(&self) -> Vec<Vec<i64>> {
        let m = self.m;
        let mut mat = vec![vec![0i64; m]; m];
        for p in &self.prefs {
            let ranks = p.rank_vector();
            for x in 0..m {
                for y in 0..m {
                    if x != y {
                        mat[x][y] += if ranks[x] < ranks[y] { 1 } else { -1 };
                    }
                }
            }
        }
        mat
    }

    /// The alternative with a positive margin against every other one.
    pub fn condorcet_winner(&self) -> Option<Alternative> {
        let mat = self.margin_matrix();
        (0..self.m).find(|&x| (0..self.m).all(|y| y == x || mat[x][y] > 0))
    }

    /// Whether every voter prefers `y` to `x`.
    pub fn pareto_dominates(&self, y: Alternative, x: Alternative) -> bool {
        x != y && self.prefs.iter().all(|p| p.prefers(y, x))
    }

    /// Alternatives not Pareto-dominated by any other, in index order.
    pub fn pareto_optimal_set(&self) -> Vec<Alternative> {
        (0..self.m)
            .filter(|&x| !(0..self.m).any(|y| self.pareto_dominates(y, x)))
            .collect()
    }

    /// `R'` with `R'_{pi[i]} = R_i`.
    pub fn permute_voters(&self, pi: &[usize]) -> Result<Self> {
        check_bijection(pi, self.n(), "voter permutation")?;
        let mut prefs = self.prefs.clone();
        for (i, p) in self.prefs.iter().enumerate() {
            prefs[pi[i]] = p.clone();
        }
        Ok(Profile { m: self.m, prefs })
    }

    /// Relabels alternatives so that `tau[x] ≻' tau[y]` iff `x ≻ y`.
    pub fn permute_alternatives(&self, tau: &[Alternative]) -> Result<Self> {
        check_bijection(tau, self.m, "alternative permutation")?;
        Ok(self.relabel(tau))
    }

    pub(crate) fn relabel(&self, tau: &[Alternative]) -> Self {
        Profile {
            m: self.m,
            prefs: self.prefs.iter().map(|p| p.relabel(tau)).collect(),
        }
    }

    pub(crate) fn swap_voters(&self, i: usize, j: usize) -> Self {
        let mut prefs = self.prefs.clone();
        prefs.swap(i, j);
        Profile { m: self.m, prefs }
    }

    pub fn rank_matrix(&self) -> RankMatrix {
        let (m, n) = (self.m, self.n());
        let mut rows = vec![0u8; m * n];
        let mut per_alt: Vec<Vec<u8>> = vec![Vec::with_capacity(n); m];
        for p in &self.prefs {
            for (pos, x) in p.order().enumerate() {
                per_alt[x].push(pos as u8 + 1);
            }
        }
        for (x, mut ranks) in per_alt.into_iter().enumerate() {
            ranks.sort_unstable();
            rows[x * n..(x + 1) * n].copy_from_slice(&ranks);
        }
        RankMatrix { m, n, rows }
    }

    /// Renders the profile in the text format, grouping consecutive equal voters.
    pub fn to_text(&self, names: Option<&[String]>) -> String {
        let default: Vec<String> = (0..self.m).map(alternative_name).collect();
        let names = names.unwrap_or(&default);
        let mut out = format!("alternatives: {}\n", names.join(" "));
        let mut i = 0;
        while i < self.n() {
            let mut j = i;
            while j < self.n() && self.prefs[j] == self.prefs[i] {
                j += 1;
            }
            let order: Vec<&str> = self.prefs[i].order().map(|x| names[x].as_str()).collect();
            out.push_str(&format!("{}: {}\n", j - i, order.join(" > ")));
            i = j;
        }
        out
    }

    /// Parses the profile text format:
    ///
    /// ```text
    /// alternatives: a b c
    /// # comment
    /// 2: a > b > c
    /// 1: c > a > b
    /// ```
    pub fn parse_text(text: &str) -> Result<(Vec<String>, Profile)> {
        let mut names: Option<Vec<String>> = None;
        let mut prefs = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: &str| Error::parse(format!("line {}: {msg}", lineno + 1));
            let (head, rest) = line
                .split_once(':')
                .ok_or_else(|| err("expected `<count>: a > b > ...`"))?;
            match &names {
                None => {
                    if head.trim() != "alternatives" {
                        return Err(err("first line must be `alternatives: ...`"));
                    }
                    let list: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
                    let mut seen = std::collections::HashSet::new();
                    if list.is_empty() || !list.iter().all(|s| seen.insert(s.clone())) {
                        return Err(err("alternative names must be non-empty and distinct"));
                    }
                    names = Some(list);
                }
                Some(list) => {
                    let count: usize = head
                        .trim()
                        .parse()
                        .map_err(|_| err("voter count must be a non-negative integer"))?;
                    let index: HashMap<&str, usize> =
                        list.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
                    let order = rest
                        .split('>')
                        .map(|s| {
                            index
                                .get(s.trim())
                                .copied()
                                .ok_or_else(|| err(&format!("unknown alternative `{}`", s.trim())))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    if order.len() != list.len() {
                        return Err(err("preference must rank every alternative"));
                    }
                    let pref = Preference::new(order).map_err(|e| err(&e.to_string()))?;
                    prefs.extend(std::iter::repeat_n(pref, count));
                }
            }
        }
        let names = names.ok_or_else(|| Error::parse("missing `alternatives:` line"))?;
        Ok((names, Profile::new(prefs)?))
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.prefs.iter().map(|p| p.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Profile({self})")
    }
}

impl Serialize for Profile {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Profile {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Profile::parse_compact(&s).map_err(serde::de::Error::custom)
    }
}

fn check_bijection(perm: &[usize], size: usize, what: &str) -> Result<()> {
    let mut seen = vec![false; size];
    if perm.len() != size {
        return Err(Error::domain(format!(
            "{what} has length {}, expected {size}",
            perm.len()
        )));
    }
    for &v in perm {
        if v >= size || seen[v] {
            return Err(Error::domain(format!("{what} {perm:?} is not a bijection")));
        }
        seen[v] = true;
    }
    Ok(())
}

/// Per-alternative sorted rank vectors.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct RankMatrix {
    m: usize,
    n: usize,
    rows: Vec<u8>,
}

impl RankMatrix {
    pub fn row(&self, x: Alternative) -> Vec<usize> {
        self.rows[x * self.n..(x + 1) * self.n]
            .iter()
            .map(|&r| r as usize)
            .collect()
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        (0..self.m).map(|x| self.row(x)).collect()
    }

    pub(crate) fn key(&self) -> Vec<u8> {
        self.rows.clone()
    }
}

/// Binomial coefficient as `u128`, saturating on overflow.
pub fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// `(m!)^n`, saturating.
pub fn full_profile_count(m: usize, n: usize) -> u128 {
    (factorial(m) as u128).checked_pow(n as u32).unwrap_or(u128::MAX)
}

/// Number of multisets of `n` preferences over `m` alternatives.
pub fn anonymous_profile_count(m: usize, n: usize) -> u128 {
    let k = factorial(m) as u128;
    binomial(k + n as u128 - 1, n as u128)
}

/// Profile with voter `i` holding preference number `digits[i]`.
pub fn profile_from_indices(prefs: &[Preference], digits: &[usize]) -> Profile {
    Profile {
        m: prefs[0].m(),
        prefs: digits.iter().map(|&d| prefs[d].clone()).collect(),
    }
}

/// The `idx`-th profile in the full lexicographic enumeration (voter 0 most significant).
pub fn full_profile_at(prefs: &[Preference], n: usize, mut idx: u128) -> Profile {
    let k = prefs.len() as u128;
    let mut digits = vec![0usize; n];
    for slot in digits.iter_mut().rev() {
        *slot = (idx % k) as usize;
        idx /= k;
    }
    profile_from_indices(prefs, &digits)
}

/// All non-decreasing index sequences of length `n` over `0..k`, in lexicographic order.
pub fn multisets(k: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; n];
    if k == 0 {
        return out;
    }
    loop {
        out.push(cur.clone());
        let mut pos = n;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if cur[pos] + 1 < k {
                let v = cur[pos] + 1;
                for slot in cur[pos..].iter_mut() {
                    *slot = v;
                }
                break;
            }
        }
    }
}

/// Multiplicity of a multiset's orbit: `n! / prod(count!)`.
pub fn orbit_size(digits: &[usize]) -> u128 {
    let mut counts: BTreeMap<usize, u128> = BTreeMap::new();
    for &d in digits {
        *counts.entry(d).or_default() += 1;
    }
    let mut size: u128 = (1..=digits.len() as u128).product();
    for &c in counts.values() {
        size /= (1..=c).product::<u128>();
    }
    size
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Preference {
        Preference::parse(s).unwrap()
    }

    fn ex1_r1() -> Profile {
        Profile::parse_compact("a>b>c; b>c>a; c>a>b").unwrap()
    }

    fn ex1_r2() -> Profile {
        Profile::parse_compact("b>a>c; b>c>a; c>a>b").unwrap()
    }

    #[test]
    fn ranks_are_one_based() {
        assert_eq!(p("a>b>c").rank(0).unwrap(), 1);
        assert_eq!(p("a>b>c").rank(2).unwrap(), 3);
        assert_eq!(p("b>c>a").rank(2).unwrap(), 2);
        assert!(p("a>b>c").rank(3).is_err());
    }

    #[test]
    fn ranks_form_a_bijection() {
        for m in 1..=4 {
            for pref in all_preferences(m) {
                let mut ranks = pref.rank_vector();
                ranks.sort();
                assert_eq!(ranks, (1..=m).collect::<Vec<_>>());
            }
        }
    }

    #[test]
    fn preference_index_round_trips() {
        for m in 1..=4 {
            for (i, pref) in all_preferences(m).iter().enumerate() {
                assert_eq!(pref.index(), i);
            }
        }
        assert_eq!(Preference::from_index(3, 0), p("a>b>c"));
        assert_eq!(Preference::from_index(3, 5), p("c>b>a"));
    }

    #[test]
    fn rejects_non_permutations() {
        assert!(Preference::new(vec![0, 0, 1]).is_err());
        assert!(Preference::new(vec![0, 3, 1]).is_err());
        assert!(Profile::new(vec![p("a>b"), p("a>b>c")]).is_err());
        assert!(Profile::new(vec![]).is_err());
    }

    #[test]
    fn margins_of_the_cyclic_profile() {
        let r1 = ex1_r1();
        assert_eq!(r1.majority_margin(0, 1).unwrap(), 1);
        assert_eq!(r1.majority_margin(1, 0).unwrap(), -1);
        assert!(r1.majority_margin(1, 1).is_err());
        let inverse = Profile::parse_compact("a>b>c; c>b>a").unwrap();
        for x in 0..3 {
            for y in 0..3 {
                if x != y {
                    assert_eq!(inverse.majority_margin(x, y).unwrap(), 0);
                }
            }
        }
    }

    #[test]
    fn margins_are_antisymmetric_on_small_spaces() {
        for m in 2..=4 {
            let prefs = all_preferences(m);
            for n in 1..=3 {
                for idx in 0..full_profile_count(m, n) {
                    let r = full_profile_at(&prefs, n, idx);
                    let mat = r.margin_matrix();
                    for x in 0..m {
                        for y in 0..m {
                            assert_eq!(mat[x][y], -mat[y][x]);
                            if x != y {
                                assert_eq!(mat[x][y], r.majority_margin(x, y).unwrap());
                            }
                        }
                    }
                    let winners = (0..m)
                        .filter(|&x| (0..m).all(|y| y == x || mat[x][y] > 0))
                        .count();
                    assert!(winners <= 1);
                }
            }
        }
    }

    #[test]
    fn condorcet_winners() {
        assert_eq!(ex1_r2().condorcet_winner(), Some(1));
        assert_eq!(ex1_r1().condorcet_winner(), None);
        let unanimous = Profile::parse_compact("a>b>c; a>b>c; a>b>c").unwrap();
        assert_eq!(unanimous.condorcet_winner(), Some(0));
    }

    #[test]
    fn pareto_sets() {
        let unanimous = Profile::parse_compact("a>b>c; a>b>c").unwrap();
        assert_eq!(unanimous.pareto_optimal_set(), vec![0]);
        assert_eq!(ex1_r1().pareto_optimal_set(), vec![0, 1, 2]);
        let single = Profile::parse_compact("a>b>c").unwrap();
        assert_eq!(single.pareto_optimal_set(), vec![0]);
    }

    #[test]
    fn voter_permutations() {
        let r = Profile::parse_compact("a>b; b>a").unwrap();
        assert_eq!(r.permute_voters(&[0, 1]).unwrap(), r);
        assert_eq!(
            r.permute_voters(&[1, 0]).unwrap(),
            Profile::parse_compact("b>a; a>b").unwrap()
        );
        let r1 = ex1_r1();
        let pi = [2, 0, 1];
        let inv = [1, 2, 0];
        assert_eq!(r1.permute_voters(&pi).unwrap().permute_voters(&inv).unwrap(), r1);
        assert!(r.permute_voters(&[0, 0]).is_err());
    }

    #[test]
    fn alternative_permutations() {
        let r = Profile::parse_compact("a>b>c").unwrap();
        assert_eq!(r.permute_alternatives(&[0, 1, 2]).unwrap(), r);
        let swapped = r.permute_alternatives(&[1, 0, 2]).unwrap();
        assert_eq!(swapped, Profile::parse_compact("b>a>c").unwrap());
        assert_eq!(swapped.permute_alternatives(&[1, 0, 2]).unwrap(), r);
        assert!(r.permute_alternatives(&[1, 1, 2]).is_err());
    }

    #[test]
    fn rank_matrices() {
        let unanimous = Profile::parse_compact("a>b>c; a>b>c; a>b>c").unwrap();
        assert_eq!(
            unanimous.rank_matrix().rows(),
            vec![vec![1, 1, 1], vec![2, 2, 2], vec![3, 3, 3]]
        );
        assert_eq!(ex1_r1().rank_matrix().rows(), vec![vec![1, 2, 3]; 3]);
    }

    #[test]
    fn rank_matrix_ignores_voter_order() {
        let prefs = all_preferences(3);
        let perms: [[usize; 3]; 6] = [
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        for idx in 0..full_profile_count(3, 3) {
            let r = full_profile_at(&prefs, 3, idx);
            for pi in &perms {
                assert_eq!(r.permute_voters(pi).unwrap().rank_matrix(), r.rank_matrix());
            }
        }
    }

    #[test]
    fn text_format_round_trip() {
        let text = "alternatives: a b c\n# three voters\n1: a > b > c\n1: b > c > a\n1: c > a > b\n";
        let (names, r) = Profile::parse_text(text).unwrap();
        assert_eq!(names, vec!["a", "b", "c"]);
        assert_eq!(r, ex1_r1());
        let (_, again) = Profile::parse_text(&r.to_text(None)).unwrap();
        assert_eq!(again, r);

        let named = "alternatives: x y\n2: y > x\n";
        let (names, r) = Profile::parse_text(named).unwrap();
        assert_eq!(names, vec!["x", "y"]);
        assert_eq!(r.n(), 2);
        assert_eq!(r.tops(), vec![1, 1]);

        assert!(Profile::parse_text("1: a > b\n").is_err());
        assert!(Profile::parse_text("alternatives: a b\n1: a > c\n").is_err());
        assert!(Profile::parse_text("alternatives: a b c\n1: a > b\n").is_err());
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(full_profile_count(3, 3), 216);
        assert_eq!(anonymous_profile_count(3, 3), 56);
        assert_eq!(multisets(6, 3).len(), 56);
        let total: u128 = multisets(6, 3).iter().map(|d| orbit_size(d)).sum();
        assert_eq!(total, 216);
        assert_eq!(anonymous_profile_count(4, 5), 98_280);
        assert_eq!(binomial(10, 3), 120);
    }
}
