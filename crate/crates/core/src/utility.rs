//! Rank-indexed utility vectors and the utility sets used as the `U` in
//! `U`-strategyproofness.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use usp_lp::{Constraint, LinearProgram, LpOutcome, Relation};

use crate::error::{Error, Result};
use crate::lottery::Lottery;
use crate::profile::Preference;
use crate::rational::{self, int, Rational};

/// `values[r - 1]` is the utility of the alternative at rank `r`. Strictly decreasing.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct UtilityVector {
    values: Vec<Rational>,
}

impl UtilityVector {
    pub fn new(values: Vec<Rational>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("empty utility vector"));
        }
        if !is_strictly_decreasing(&values) {
            return Err(Error::domain(format!(
                "utility vector ({}) is not strictly decreasing",
                rational::format_list(&values)
            )));
        }
        Ok(UtilityVector { values })
    }

    /// Parses `"3,2,0"`.
    pub fn parse(s: &str) -> Result<Self> {
        UtilityVector::new(rational::parse_list(s)?)
    }

    pub fn from_ints(values: &[i64]) -> Result<Self> {
        UtilityVector::new(values.iter().map(|&v| int(v)).collect())
    }

    pub fn m(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    /// Utility of rank `r` (1-based).
    pub fn at_rank(&self, r: usize) -> &Rational {
        &self.values[r - 1]
    }

    /// `(u - u(m)) / (u(1) - u(m))`: the representative with `u(1) = 1`, `u(m) = 0`.
    pub fn normalized(&self) -> Vec<Rational> {
        let last = self.values.last().unwrap();
        let span = &self.values[0] - last;
        if span.is_zero() {
            return self.values.clone();
        }
        self.values.iter().map(|v| (v - last) / &span).collect()
    }
}

impl fmt::Display for UtilityVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", rational::format_list(&self.values))
    }
}

impl fmt::Debug for UtilityVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "u{self}")
    }
}

impl Serialize for UtilityVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        rational::serde_vec::serialize(&self.values, s)
    }
}

impl<'de> Deserialize<'de> for UtilityVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let values = rational::serde_vec::deserialize(d)?;
        UtilityVector::new(values).map_err(serde::de::Error::custom)
    }
}

pub fn is_strictly_decreasing(values: &[Rational]) -> bool {
    values.windows(2).all(|w| w[0] > w[1])
}

pub fn is_weakly_decreasing(values: &[Rational]) -> bool {
    values.windows(2).all(|w| w[0] >= w[1])
}

/// `Σ_x p(x) · u(rank(pref, x))`.
pub fn expected_utility(p: &Lottery, u: &UtilityVector, pref: &Preference) -> Result<Rational> {
    if p.m() != u.m() || pref.m() != u.m() {
        return Err(Error::domain(format!(
            "dimension mismatch: lottery {}, utility {}, preference {}",
            p.m(),
            u.m(),
            pref.m()
        )));
    }
    Ok(expected_utility_of(p, u.values(), pref))
}

/// Unchecked variant over raw rank-indexed values.
pub fn expected_utility_of(p: &Lottery, values: &[Rational], pref: &Preference) -> Rational {
    pref.order()
        .zip(values)
        .map(|(x, v)| p.prob(x) * v)
        .sum()
}

/// Rank coefficients of `after - before` seen through `pref`: entry `r - 1`
/// is the probability change of the alternative at rank `r`. The utility
/// gain for a vector `u` is the dot product with `u`.
pub fn rank_coefficients(before: &Lottery, after: &Lottery, pref: &Preference) -> Vec<Rational> {
    pref.order()
        .map(|x| after.prob(x) - before.prob(x))
        .collect()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Named utility regions, each a single homogeneous condition on utility differences.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Preset {
    /// Every strictly decreasing utility.
    Sd,
    /// `u(1) - u(2) >= k (u(2) - u(m))`.
    Rdk {
        #[serde(with = "rational::serde_str")]
        k: Rational,
    },
    /// `u(1) - u(2) >= Σ_{i>=3} (u(2) - u(i))`.
    Omni,
    /// `u(1) - u(2) = u(2) - u(3)`.
    Equidistant,
    /// `u(1) - u(2) <= (eps/2) (u(2) - u(3))`.
    EpsIndiff {
        #[serde(with = "rational::serde_str")]
        epsilon: Rational,
    },
}

impl Preset {
    /// Parses `SD`, `RDK:k=1`, `OMNI`, `EQUIDISTANT`, `EPS_INDIFF:eps=1/4`.
    pub fn parse(s: &str) -> Result<Self> {
        let (name, params) = s.split_once(':').unwrap_or((s, ""));
        let param = |key: &str| -> Result<Rational> {
            params
                .split(',')
                .filter_map(|kv| kv.split_once('='))
                .find(|(k, _)| k.trim() == key)
                .map(|(_, v)| rational::parse(v))
                .unwrap_or_else(|| Err(Error::parse(format!("preset {name} needs `{key}=`"))))
        };
        match name.trim().to_ascii_uppercase().as_str() {
            "SD" => Ok(Preset::Sd),
            "RDK" => Ok(Preset::Rdk { k: param("k")? }),
            "OMNI" => Ok(Preset::Omni),
            "EQUIDISTANT" => Ok(Preset::Equidistant),
            "EPS_INDIFF" => Ok(Preset::EpsIndiff {
                epsilon: param("eps").or_else(|_| param("epsilon"))?,
            }),
            other => Err(Error::parse(format!(
                "unknown preset `{other}`; valid presets: SD, RDK:k=<k>, OMNI, EQUIDISTANT, EPS_INDIFF:eps=<eps>"
            ))),
        }
    }

    /// The defining condition as `coeffs · u (relation) 0`.
    fn condition(&self, m: usize) -> Result<Option<LinearForm>> {
        let mut coeffs = vec![Rational::zero(); m];
        let need = |min: usize| {
            if m < min {
                Err(Error::domain(format!("preset {self:?} needs m >= {min}")))
            } else {
                Ok(())
            }
        };
        let relation = match self {
            Preset::Sd => {
                need(2)?;
                return Ok(None);
            }
            Preset::Rdk { k } => {
                need(2)?;
                if k.is_negative() {
                    return Err(Error::domain("RDK parameter must be non-negative"));
                }
                coeffs[0] += int(1);
                coeffs[1] -= int(1) + k;
                coeffs[m - 1] += k;
                Relation::Ge
            }
            Preset::Omni => {
                need(2)?;
                for c in coeffs.iter_mut() {
                    *c = int(1);
                }
                coeffs[1] -= int(m as i64);
                Relation::Ge
            }
            Preset::Equidistant => {
                need(3)?;
                coeffs[0] = int(1);
                coeffs[1] = int(-2);
                coeffs[2] = int(1);
                Relation::Eq
            }
            Preset::EpsIndiff { epsilon } => {
                need(3)?;
                if !epsilon.is_positive() {
                    return Err(Error::domain("EPS_INDIFF parameter must be positive"));
                }
                let half = epsilon / int(2);
                coeffs[0] = int(-1);
                coeffs[1] = int(1) + &half;
                coeffs[2] = -half;
                Relation::Ge
            }
        };
        Ok(Some(LinearForm {
            coeffs,
            relation,
            rhs: Rational::zero(),
        }))
    }
}

/// `coeffs · u (relation) rhs` over rank-indexed utilities.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearForm {
    #[serde(with = "rational::serde_vec")]
    pub coeffs: Vec<Rational>,
    #[serde(with = "relation_serde")]
    pub relation: Relation,
    #[serde(with = "rational::serde_str")]
    pub rhs: Rational,
}

impl LinearForm {
    fn holds(&self, u: &[Rational]) -> bool {
        let lhs = dot(&self.coeffs, u);
        match self.relation {
            Relation::Le => lhs <= self.rhs,
            Relation::Eq => lhs == self.rhs,
            Relation::Ge => lhs >= self.rhs,
        }
    }

    /// Unchanged under `u -> a u + b` for every `a > 0`.
    fn is_affine_invariant(&self) -> bool {
        self.rhs.is_zero() && self.coeffs.iter().sum::<Rational>().is_zero()
    }
}

mod relation_serde {
    use serde::{Deserialize, Deserializer, Serializer};
    use usp_lp::Relation;

    pub fn serialize<S: Serializer>(r: &Relation, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(match r {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        })
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Relation, D::Error> {
        match String::deserialize(d)?.as_str() {
            "<=" => Ok(Relation::Le),
            "=" | "==" => Ok(Relation::Eq),
            ">=" => Ok(Relation::Ge),
            other => Err(serde::de::Error::custom(format!("unknown relation `{other}`"))),
        }
    }
}

/// Closed region of normalized utilities (`u(1) = 1`, `u(m) = 0`, weakly
/// decreasing) cut by extra linear conditions, validated to contain a
/// strictly decreasing point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polytope {
    m: usize,
    constraints: Vec<LinearForm>,
    preset: Option<Preset>,
    interior: Vec<Rational>,
    vertices: Option<Vec<Vec<Rational>>>,
}

impl Polytope {
    pub fn from_preset(preset: Preset, m: usize) -> Result<Self> {
        let condition = preset.condition(m)?;
        if let Some(c) = &condition {
            if !c.is_affine_invariant() {
                return Err(Error::Internal(format!(
                    "preset {preset:?} is not invariant under positive affine maps"
                )));
            }
        }
        let vertices = closed_form_vertices(m, condition.as_ref());
        let mut poly = Polytope::build(m, condition.into_iter().collect())?;
        poly.preset = Some(preset);
        poly.vertices = Some(vertices);
        Ok(poly)
    }

    /// A region given by explicit conditions over normalized utilities.
    pub fn from_constraints(m: usize, constraints: Vec<LinearForm>) -> Result<Self> {
        Polytope::build(m, constraints)
    }

    fn build(m: usize, constraints: Vec<LinearForm>) -> Result<Self> {
        if m < 2 {
            return Err(Error::domain("utility polytopes need m >= 2"));
        }
        if let Some(c) = constraints.iter().find(|c| c.coeffs.len() != m) {
            return Err(Error::domain(format!(
                "constraint has {} coefficients, expected {m}",
                c.coeffs.len()
            )));
        }
        let interior = strict_point(m, &constraints)?.ok_or_else(|| {
            Error::domain("utility region contains no strictly decreasing point")
        })?;
        Ok(Polytope {
            m,
            constraints,
            preset: None,
            interior,
            vertices: None,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn preset(&self) -> Option<&Preset> {
        self.preset.as_ref()
    }

    pub fn constraints(&self) -> &[LinearForm] {
        &self.constraints
    }

    /// A strictly decreasing member, found at construction.
    pub fn interior_point(&self) -> &[Rational] {
        &self.interior
    }

    /// Vertices of the closed region, when known in closed form. They may be
    /// only weakly decreasing.
    pub fn vertices(&self) -> Option<&[Vec<Rational>]> {
        self.vertices.as_deref()
    }

    /// Closed-region membership of an already normalized vector.
    pub fn contains_normalized(&self, u: &[Rational]) -> bool {
        u.len() == self.m
            && u[0].is_one()
            && u[self.m - 1].is_zero()
            && is_weakly_decreasing(u)
            && self.constraints.iter().all(|c| c.holds(u))
    }

    /// Whether the strictly decreasing `u` (up to positive affine maps) lies in the region.
    pub fn contains(&self, u: &UtilityVector) -> bool {
        self.contains_normalized(&u.normalized())
    }

    /// The closed region as a linear program over `u(1..m)`.
    pub fn program(&self) -> LinearProgram {
        let m = self.m;
        let mut lp = LinearProgram::new(m);
        lp.set_lower(0, int(1));
        lp.set_upper(0, int(1));
        lp.set_lower(m - 1, int(0));
        lp.set_upper(m - 1, int(0));
        for r in 0..m - 1 {
            lp.add(Constraint::new(
                vec![(r, int(1)), (r + 1, int(-1))],
                Relation::Ge,
                int(0),
            ));
        }
        for c in &self.constraints {
            lp.add(Constraint::dense(&c.coeffs, c.relation, c.rhs.clone()));
        }
        lp
    }

    /// Maximum of `coeffs · u` over the closed region, with a maximizer.
    pub fn maximize(&self, coeffs: &[Rational]) -> Result<(Rational, Vec<Rational>)> {
        let mut lp = self.program();
        lp.maximize(coeffs.to_vec());
        match usp_lp::solve(&lp)? {
            LpOutcome::Optimal { value, point } => Ok((value, point)),
            other => Err(Error::Internal(format!(
                "bounded utility region gave {other:?}"
            ))),
        }
    }
}

/// Maximizes `t` subject to `u(r) - u(r+1) >= t`; returns the point if `t > 0`.
fn strict_point(m: usize, constraints: &[LinearForm]) -> Result<Option<Vec<Rational>>> {
    let t = m;
    let mut lp = LinearProgram::new(m + 1);
    lp.set_lower(0, int(1));
    lp.set_upper(0, int(1));
    lp.set_lower(m - 1, int(0));
    lp.set_upper(m - 1, int(0));
    lp.set_upper(t, int(1));
    for r in 0..m - 1 {
        lp.add(Constraint::new(
            vec![(r, int(1)), (r + 1, int(-1)), (t, int(-1))],
            Relation::Ge,
            int(0),
        ));
    }
    for c in constraints {
        lp.add(Constraint::dense(&c.coeffs, c.relation, c.rhs.clone()));
    }
    let mut objective = vec![Rational::zero(); m + 1];
    objective[t] = int(1);
    lp.maximize(objective);
    match usp_lp::solve(&lp)? {
        LpOutcome::Optimal { value, mut point } if value.is_positive() => {
            point.truncate(m);
            Ok(Some(point))
        }
        LpOutcome::Optimal { .. } | LpOutcome::Infeasible(_) => Ok(None),
        LpOutcome::Unbounded { .. } => Err(Error::Internal("strictness program unbounded".into())),
    }
}

/// Vertices of `{d >= 0, Σ d = 1, g · d (rel) 0}` in difference coordinates
/// `d_i = u(i) - u(i+1)`, mapped back to utilities.
fn closed_form_vertices(m: usize, condition: Option<&LinearForm>) -> Vec<Vec<Rational>> {
    let dims = m - 1;
    let unit = |j: usize| {
        let mut d = vec![Rational::zero(); dims];
        d[j] = int(1);
        d
    };
    let mut diffs: Vec<Vec<Rational>> = Vec::new();
    match condition {
        None => diffs.extend((0..dims).map(unit)),
        Some(c) => {
            // u(r) = Σ_{i>=r} d_i, so coefficient of d_i is Σ_{r<=i} c_r.
            let mut g = Vec::with_capacity(dims);
            let mut acc = Rational::zero();
            for c_r in &c.coeffs[..dims] {
                acc += c_r;
                g.push(acc.clone());
            }
            let keep = |gj: &Rational| match c.relation {
                Relation::Ge => !gj.is_negative(),
                Relation::Le => !gj.is_positive(),
                Relation::Eq => gj.is_zero(),
            };
            for j in 0..dims {
                if keep(&g[j]) {
                    diffs.push(unit(j));
                }
            }
            for i in 0..dims {
                for j in 0..dims {
                    if g[i].is_positive() && g[j].is_negative() {
                        let den = &g[i] - &g[j];
                        let mut d = vec![Rational::zero(); dims];
                        d[i] = -&g[j] / &den;
                        d[j] = &g[i] / &den;
                        diffs.push(d);
                    }
                }
            }
        }
    }
    let mut vertices: Vec<Vec<Rational>> = diffs
        .into_iter()
        .map(|d| {
            let mut u = vec![Rational::zero(); m];
            for r in (0..dims).rev() {
                u[r] = &u[r + 1] + &d[r];
            }
            u
        })
        .collect();
    vertices.sort();
    vertices.dedup();
    vertices
}

/// The set `U` of admissible utilities, always read through each voter's
/// own ranks (so a single vector stands for all its relabelings).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UtilitySet {
    Finite(Vec<UtilityVector>),
    /// Convex hull of strictly decreasing vectors.
    Vertices(Vec<UtilityVector>),
    Polytope(Polytope),
}

impl UtilitySet {
    pub fn single(u: UtilityVector) -> Self {
        UtilitySet::Finite(vec![u])
    }

    pub fn preset(preset: Preset, m: usize) -> Result<Self> {
        Ok(UtilitySet::Polytope(Polytope::from_preset(preset, m)?))
    }

    pub fn finite(vectors: Vec<UtilityVector>) -> Result<Self> {
        check_same_m(&vectors)?;
        Ok(UtilitySet::Finite(vectors))
    }

    pub fn vertices(vectors: Vec<UtilityVector>) -> Result<Self> {
        check_same_m(&vectors)?;
        Ok(UtilitySet::Vertices(vectors))
    }

    pub fn m(&self) -> usize {
        match self {
            UtilitySet::Finite(v) | UtilitySet::Vertices(v) => v[0].m(),
            UtilitySet::Polytope(p) => p.m(),
        }
    }

    /// Vectors whose constraints, imposed for every deviation, are
    /// equivalent to strategyproofness for the whole set. Polytopes qualify
    /// when their vertices are known in closed form.
    pub fn generators(&self) -> Result<Vec<Vec<Rational>>> {
        match self {
            UtilitySet::Finite(v) | UtilitySet::Vertices(v) => {
                Ok(v.iter().map(|u| u.values().to_vec()).collect())
            }
            UtilitySet::Polytope(p) => p.vertices().map(<[_]>::to_vec).ok_or_else(|| {
                Error::domain(
                    "this utility polytope has no closed-form vertices; give it as a `vertices` set",
                )
            }),
        }
    }

    /// Membership of a strictly decreasing vector.
    pub fn contains(&self, u: &UtilityVector) -> Result<bool> {
        if u.m() != self.m() {
            return Ok(false);
        }
        match self {
            UtilitySet::Finite(v) => Ok(v.contains(u)),
            UtilitySet::Polytope(p) => Ok(p.contains(u)),
            UtilitySet::Vertices(v) => {
                // u = Σ λ_j v_j with λ in the simplex.
                let k = v.len();
                let mut lp = LinearProgram::new(k);
                for j in 0..k {
                    lp.set_lower(j, int(0));
                }
                lp.add(Constraint::dense(&vec![int(1); k], Relation::Eq, int(1)));
                for r in 0..u.m() {
                    let row: Vec<Rational> = v.iter().map(|w| w.values()[r].clone()).collect();
                    lp.add(Constraint::dense(&row, Relation::Eq, u.values()[r].clone()));
                }
                Ok(usp_lp::check_feasible(&lp)?.is_optimal())
            }
        }
    }
}

fn check_same_m(vectors: &[UtilityVector]) -> Result<()> {
    let first = vectors
        .first()
        .ok_or_else(|| Error::domain("utility set needs at least one vector"))?;
    if vectors.iter().any(|u| u.m() != first.m()) {
        return Err(Error::domain("utility vectors differ in length"));
    }
    Ok(())
}

/// File form of a utility set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum UtilitySetDoc {
    Finite {
        vectors: Vec<UtilityVector>,
    },
    Vertices {
        vectors: Vec<UtilityVector>,
    },
    Preset {
        m: usize,
        preset: Preset,
    },
    Polytope {
        m: usize,
        constraints: Vec<LinearForm>,
    },
}

impl UtilitySetDoc {
    pub fn build(self) -> Result<UtilitySet> {
        match self {
            UtilitySetDoc::Finite { vectors } => UtilitySet::finite(vectors),
            UtilitySetDoc::Vertices { vectors } => UtilitySet::vertices(vectors),
            UtilitySetDoc::Preset { m, preset } => UtilitySet::preset(preset, m),
            UtilitySetDoc::Polytope { m, constraints } => Ok(UtilitySet::Polytope(
                Polytope::from_constraints(m, constraints)?,
            )),
        }
    }

    pub fn from_set(set: &UtilitySet) -> Self {
        match set {
            UtilitySet::Finite(v) => UtilitySetDoc::Finite { vectors: v.clone() },
            UtilitySet::Vertices(v) => UtilitySetDoc::Vertices { vectors: v.clone() },
            UtilitySet::Polytope(p) => match p.preset() {
                Some(preset) => UtilitySetDoc::Preset {
                    m: p.m(),
                    preset: preset.clone(),
                },
                None => UtilitySetDoc::Polytope {
                    m: p.m(),
                    constraints: p.constraints().to_vec(),
                },
            },
        }
    }
}
