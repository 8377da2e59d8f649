//! Synthesis of rules by exact linear programming: one lottery variable
//! block per profile class, axioms as pins and bounds, strategyproofness as
//! one inequality per deviation edge and utility generator. Infeasible
//! programs come back with a verified Farkas certificate and the meaning of
//! every row it uses.

mod certify;
mod index;

use std::collections::{BTreeMap, HashSet};

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use usp_lp::{solve_lazy, solve_lazy_seeded, Constraint, FarkasCertificate, LinearProgram, LpOutcome, Relation};

use crate::axioms::{Axiom, SweepDomain};
use crate::error::{Error, Result};
use crate::lottery::Lottery;
use crate::manip::{check_u_sp_with, Reduction, SpOptions};
use crate::profile::{Alternative, Preference, Profile};
use crate::rational::{self, int, Rational};
use crate::rules::{ClassMode, TableDoc, TableEntry, TableRule};
use crate::utility::{UtilitySet, UtilitySetDoc};

pub use certify::{
    certify_condorcet_gadget, certify_condorcet_impossibility, certify_expost_impossibility,
    certify_rank_based_impossibility, condorcet_gadget, expost_problem, rank_based_problem,
    rank_based_bound, CondorcetCertificate, GadgetCase,
};
pub use index::{
    enumerate_profiles, enumerate_profiles_capped, DeviationEdge, ProfileClass, ProfileClassIndex,
};

/// What to synthesize: a rule for `(m, n)` constant on the classes of
/// `mode`, satisfying `axioms` and `U`-strategyproofness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ProblemDoc", into = "ProblemDoc")]
pub struct SynthesisProblem {
    pub m: usize,
    pub n: usize,
    pub mode: ClassMode,
    pub axioms: Vec<Axiom>,
    pub utility: UtilitySet,
    /// Restricts the program to these profiles (each its own class).
    pub profiles: Option<Vec<Profile>>,
}

fn anonymous() -> ClassMode {
    ClassMode::Anonymous
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct ProblemDoc {
    m: usize,
    n: usize,
    #[serde(default = "anonymous")]
    symmetry: ClassMode,
    #[serde(default)]
    axioms: Vec<Axiom>,
    utility: UtilitySetDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    profiles: Option<Vec<Profile>>,
}

impl TryFrom<ProblemDoc> for SynthesisProblem {
    type Error = Error;

    fn try_from(d: ProblemDoc) -> Result<Self> {
        Ok(SynthesisProblem {
            m: d.m,
            n: d.n,
            mode: d.symmetry,
            axioms: d.axioms,
            utility: d.utility.build()?,
            profiles: d.profiles,
        })
    }
}

impl From<SynthesisProblem> for ProblemDoc {
    fn from(p: SynthesisProblem) -> Self {
        ProblemDoc {
            m: p.m,
            n: p.n,
            symmetry: p.mode,
            axioms: p.axioms,
            utility: UtilitySetDoc::from_set(&p.utility),
            profiles: p.profiles,
        }
    }
}

impl SynthesisProblem {
    pub fn new(m: usize, n: usize, mode: ClassMode, axioms: Vec<Axiom>, utility: UtilitySet) -> Self {
        SynthesisProblem {
            m,
            n,
            mode,
            axioms,
            utility,
            profiles: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::parse(format!("synthesis problem: {e}")))
    }

    fn validate(&self) -> Result<()> {
        if self.utility.m() != self.m {
            return Err(Error::domain(format!(
                "utility set has {} ranks but m = {}",
                self.utility.m(),
                self.m
            )));
        }
        for a in &self.axioms {
            match a {
                Axiom::KUnanimity { k } if 2 * k >= self.n => {
                    return Err(Error::domain(format!(
                        "k-unanimity needs k < n/2; got k = {k}, n = {}",
                        self.n
                    )))
                }
                Axiom::KAlphaUnanimity { k, alpha }
                    if *k > self.n || alpha.is_negative() || alpha > &int(1) =>
                {
                    return Err(Error::domain(format!(
                        "(k, alpha)-unanimity needs 0 <= alpha <= 1 and k <= n; got k = {k}, alpha = {alpha}"
                    )))
                }
                Axiom::KUnanimity { .. }
                | Axiom::KAlphaUnanimity { .. }
                | Axiom::Condorcet
                | Axiom::ExPost => {}
                other => {
                    return Err(Error::domain(format!(
                        "{other:?} is not a synthesis axiom; use the symmetry mode instead"
                    )))
                }
            }
        }
        Ok(())
    }
}

/// Meaning of a row (or bound) of the synthesis program.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RowOrigin {
    /// Probabilities of a class sum to one.
    Simplex { class: usize },
    /// A probability is non-negative.
    NonNegative { class: usize, alternative: Alternative },
    /// An axiom's requirement at one profile of a class.
    Axiom {
        axiom: String,
        class: usize,
        profile: Profile,
        alternative: Alternative,
    },
    /// A voter with `true_pref` must not gain by moving class `from` to class `to`.
    Strategyproofness {
        from: usize,
        to: usize,
        true_pref: Preference,
        #[serde(with = "rational::serde_vec")]
        utility: Vec<Rational>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportEntry {
    pub origin: RowOrigin,
    #[serde(with = "rational::serde_str")]
    pub multiplier: Rational,
}

/// A proof that no rule meets the problem: the certificate combines rows of
/// `program` into `0 <= negative`.
#[derive(Clone, Debug)]
pub struct Infeasibility {
    pub certificate: FarkasCertificate,
    pub program: LinearProgram,
    pub origins: Vec<RowOrigin>,
    m: usize,
}

impl Infeasibility {
    /// Re-checks the certificate by pure arithmetic.
    pub fn verify(&self) -> Result<()> {
        self.certificate
            .verify(&self.program)
            .map_err(|e| Error::Internal(format!("certificate does not verify: {e}")))
    }

    /// Rows and bounds with non-zero multipliers, with their meaning.
    pub fn support(&self) -> Vec<SupportEntry> {
        let mut out: Vec<SupportEntry> = self
            .certificate
            .rows
            .iter()
            .zip(&self.origins)
            .filter(|(y, _)| !y.is_zero())
            .map(|(y, o)| SupportEntry {
                origin: o.clone(),
                multiplier: y.clone(),
            })
            .collect();
        for (v, l) in self.certificate.lower.iter().enumerate() {
            if !l.is_zero() {
                out.push(SupportEntry {
                    origin: RowOrigin::NonNegative {
                        class: v / self.m,
                        alternative: v % self.m,
                    },
                    multiplier: -l.clone(),
                });
            }
        }
        out
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynthesisStats {
    pub classes: usize,
    pub edges: usize,
    pub variables: usize,
    pub free_variables: usize,
    pub axiom_rows: usize,
    pub sp_rows: usize,
    pub active_sp_rows: usize,
    pub rounds: usize,
}

#[derive(Clone, Debug)]
pub enum SynthesisStatus {
    Feasible(TableDoc),
    Infeasible(Box<Infeasibility>),
}

#[derive(Clone, Debug)]
pub struct SynthesisOutcome {
    pub status: SynthesisStatus,
    pub stats: SynthesisStats,
}

impl SynthesisOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self.status, SynthesisStatus::Feasible(_))
    }

    pub fn table(&self) -> Option<&TableDoc> {
        match &self.status {
            SynthesisStatus::Feasible(t) => Some(t),
            SynthesisStatus::Infeasible(_) => None,
        }
    }

    pub fn infeasibility(&self) -> Option<&Infeasibility> {
        match &self.status {
            SynthesisStatus::Infeasible(i) => Some(i),
            SynthesisStatus::Feasible(_) => None,
        }
    }
}

/// The full program, with base rows (simplex, axioms) and strategyproofness
/// rows kept apart so the latter can be added lazily.
struct Model {
    m: usize,
    index: ProfileClassIndex,
    base: LinearProgram,
    base_origins: Vec<RowOrigin>,
    lazy: Vec<Constraint>,
    lazy_origins: Vec<RowOrigin>,
}

fn axiom_rows(axiom: &Axiom, profile: &Profile, m: usize) -> Vec<(Alternative, Relation, Rational)> {
    let n = profile.n();
    let counts = || profile.top_counts();
    match axiom {
        Axiom::KUnanimity { k } => {
            let c = counts();
            (0..m)
                .filter(|&x| c[x] >= n - k)
                .map(|x| (x, Relation::Eq, int(1)))
                .collect()
        }
        Axiom::KAlphaUnanimity { k, alpha } => {
            let c = counts();
            (0..m)
                .filter(|&x| c[x] >= n - k)
                .map(|x| (x, Relation::Ge, alpha.clone()))
                .collect()
        }
        Axiom::Condorcet => profile
            .condorcet_winner()
            .map(|w| vec![(w, Relation::Eq, int(1))])
            .unwrap_or_default(),
        Axiom::ExPost => {
            let optimal = profile.pareto_optimal_set();
            (0..m)
                .filter(|x| !optimal.contains(x))
                .map(|x| (x, Relation::Eq, int(0)))
                .collect()
        }
        _ => Vec::new(),
    }
}

fn axiom_label(a: &Axiom) -> String {
    match a {
        Axiom::KUnanimity { k } => format!("k_unanimity:k={k}"),
        Axiom::KAlphaUnanimity { k, alpha } => format!("k_alpha_unanimity:k={k},alpha={alpha}"),
        Axiom::Condorcet => "condorcet".into(),
        Axiom::ExPost => "ex_post".into(),
        other => format!("{other:?}"),
    }
}

impl Model {
    fn build(p: &SynthesisProblem) -> Result<Model> {
        p.validate()?;
        let generators = p.utility.generators()?;
        let index = match &p.profiles {
            Some(list) => {
                let index = ProfileClassIndex::from_profiles(list.clone())?;
                if index.m != p.m || index.n != p.n {
                    return Err(Error::domain("listed profiles do not match m and n"));
                }
                index
            }
            None => enumerate_profiles(p.m, p.n, p.mode)?,
        };
        let m = p.m;
        let classes = index.classes.len();
        let mut base = LinearProgram::new(classes * m);
        let mut base_origins = Vec::new();
        for v in 0..classes * m {
            base.set_lower(v, int(0));
        }
        for c in 0..classes {
            base.add(Constraint::new(
                (0..m).map(|x| (c * m + x, int(1))).collect(),
                Relation::Eq,
                int(1),
            ));
            base_origins.push(RowOrigin::Simplex { class: c });
        }
        let mut seen = HashSet::new();
        for axiom in &p.axioms {
            let label = axiom_label(axiom);
            for (c, class) in index.classes.iter().enumerate() {
                for member in &class.members {
                    for (x, rel, rhs) in axiom_rows(axiom, member, m) {
                        let row = Constraint::new(vec![(c * m + x, int(1))], rel, rhs);
                        if seen.insert(row.clone()) {
                            base.add(row);
                            base_origins.push(RowOrigin::Axiom {
                                axiom: label.clone(),
                                class: c,
                                profile: member.clone(),
                                alternative: x,
                            });
                        }
                    }
                }
            }
        }
        let rows: Vec<(Constraint, RowOrigin)> = index
            .edges
            .par_iter()
            .flat_map_iter(|e| {
                let pref = index.preference(e.true_pref);
                generators
                    .iter()
                    .map(|u| {
                        let mut terms = Vec::with_capacity(2 * m);
                        for (r, x) in pref.order().enumerate() {
                            terms.push((e.to * m + x, u[r].clone()));
                            terms.push((e.from * m + x, -u[r].clone()));
                        }
                        (
                            Constraint::new(terms, Relation::Le, int(0)),
                            RowOrigin::Strategyproofness {
                                from: e.from,
                                to: e.to,
                                true_pref: pref.clone(),
                                utility: u.clone(),
                            },
                        )
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
        let mut lazy = Vec::new();
        let mut lazy_origins = Vec::new();
        let mut seen = HashSet::new();
        for (row, origin) in rows {
            if row.terms.is_empty() || !seen.insert(row.clone()) {
                continue;
            }
            lazy.push(row);
            lazy_origins.push(origin);
        }
        Ok(Model {
            m,
            index,
            base,
            base_origins,
            lazy,
            lazy_origins,
        })
    }

    fn full_program(&self) -> LinearProgram {
        let mut full = self.base.clone();
        for c in &self.lazy {
            full.add(c.clone());
        }
        full
    }
}

/// The program after substituting single-variable equalities.
struct Reduced {
    base: LinearProgram,
    base_map: Vec<usize>,
    lazy: Vec<Constraint>,
    lazy_map: Vec<usize>,
    /// Full variable -> (value, defining base row).
    pins: BTreeMap<usize, (Rational, usize)>,
    /// Full variable -> reduced variable.
    var_map: Vec<Option<usize>>,
    free: Vec<usize>,
}

impl Reduced {
    fn new(model: &Model) -> Reduced {
        let num_vars = model.base.num_vars();
        let mut pins: BTreeMap<usize, (Rational, usize)> = BTreeMap::new();
        for (i, row) in model.base.constraints.iter().enumerate() {
            if let (Relation::Eq, [(v, a)]) = (row.relation, &row.terms[..]) {
                let value = &row.rhs / a;
                if !value.is_negative() && !pins.contains_key(v) {
                    pins.insert(*v, (value, i));
                }
            }
        }
        let mut var_map = vec![None; num_vars];
        let mut free = Vec::new();
        for (v, slot) in var_map.iter_mut().enumerate() {
            if !pins.contains_key(&v) {
                *slot = Some(free.len());
                free.push(v);
            }
        }
        let defining: HashSet<usize> = pins.values().map(|(_, i)| *i).collect();
        let substitute = |row: &Constraint| -> Option<Constraint> {
            let mut rhs = row.rhs.clone();
            let mut terms = Vec::with_capacity(row.terms.len());
            for (v, a) in &row.terms {
                match var_map[*v] {
                    Some(r) => terms.push((r, a.clone())),
                    None => rhs -= a * &pins[v].0,
                }
            }
            let out = Constraint::new(terms, row.relation, rhs);
            if out.terms.is_empty() && out.is_satisfied_by(&[]) {
                None
            } else {
                Some(out)
            }
        };
        let mut base = LinearProgram::new(free.len());
        for (r, &v) in free.iter().enumerate() {
            if let Some(l) = model.base.lower(v) {
                base.set_lower(r, l.clone());
            }
        }
        let mut base_map = Vec::new();
        for (i, row) in model.base.constraints.iter().enumerate() {
            if defining.contains(&i) {
                continue;
            }
            if let Some(c) = substitute(row) {
                base.add(c);
                base_map.push(i);
            }
        }
        let mut lazy = Vec::new();
        let mut lazy_map = Vec::new();
        for (i, row) in model.lazy.iter().enumerate() {
            if let Some(c) = substitute(row) {
                lazy.push(c);
                lazy_map.push(i);
            }
        }
        Reduced {
            base,
            base_map,
            lazy,
            lazy_map,
            pins,
            var_map,
            free,
        }
    }

    fn full_point(&self, point: &[Rational], num_vars: usize) -> Vec<Rational> {
        let mut full = vec![Rational::zero(); num_vars];
        for (v, (value, _)) in &self.pins {
            full[*v] = value.clone();
        }
        for (r, &v) in self.free.iter().enumerate() {
            full[v] = point[r].clone();
        }
        full
    }

    /// Lifts a certificate of the reduced program to the full one.
    fn lift(&self, model: &Model, cert: &FarkasCertificate) -> FarkasCertificate {
        let base_rows = model.base.constraints.len();
        let num_vars = model.base.num_vars();
        let mut rows = vec![Rational::zero(); base_rows + model.lazy.len()];
        let reduced_base = self.base_map.len();
        for (k, y) in cert.rows.iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            let full = if k < reduced_base {
                self.base_map[k]
            } else {
                base_rows + self.lazy_map[k - reduced_base]
            };
            rows[full] = y.clone();
        }
        let mut pinned_sum: BTreeMap<usize, Rational> = BTreeMap::new();
        for (i, y) in rows.iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            let row = if i < base_rows {
                &model.base.constraints[i]
            } else {
                &model.lazy[i - base_rows]
            };
            for (v, a) in &row.terms {
                if self.pins.contains_key(v) {
                    *pinned_sum.entry(*v).or_insert_with(Rational::zero) += y * a;
                }
            }
        }
        for (v, s) in pinned_sum {
            rows[self.pins[&v].1] = -s;
        }
        let mut lower = vec![Rational::zero(); num_vars];
        let mut upper = vec![Rational::zero(); num_vars];
        for (r, &v) in self.free.iter().enumerate() {
            lower[v] = cert.lower[r].clone();
            upper[v] = cert.upper[r].clone();
        }
        FarkasCertificate { rows, lower, upper }
    }
}

fn infeasibility(model: &Model, reduced: &Reduced, cert: &FarkasCertificate) -> Result<Infeasibility> {
    let mut origins = model.base_origins.clone();
    origins.extend(model.lazy_origins.iter().cloned());
    let inf = Infeasibility {
        certificate: reduced.lift(model, cert),
        program: model.full_program(),
        origins,
        m: model.m,
    };
    inf.verify()?;
    Ok(inf)
}

fn stats(model: &Model, reduced: &Reduced) -> SynthesisStats {
    SynthesisStats {
        classes: model.index.classes.len(),
        edges: model.index.edges.len(),
        variables: model.base.num_vars(),
        free_variables: reduced.free.len(),
        axiom_rows: model.base.constraints.len() - model.index.classes.len(),
        sp_rows: model.lazy.len(),
        active_sp_rows: 0,
        rounds: 0,
    }
}

/// Solves the synthesis program. Feasible tables over small full spaces are
/// replayed through the axiom and strategyproofness checkers before return.
pub fn synthesize(p: &SynthesisProblem) -> Result<SynthesisOutcome> {
    let model = Model::build(p)?;
    let reduced = Reduced::new(&model);
    let mut st = stats(&model, &reduced);
    let (outcome, lazy_stats) = solve_lazy(&reduced.base, &reduced.lazy)?;
    st.rounds = lazy_stats.rounds;
    st.active_sp_rows = lazy_stats.active_rows;
    let status = match outcome {
        LpOutcome::Optimal { point, .. } => {
            let point = reduced.full_point(&point, model.base.num_vars());
            let full = model.full_program();
            full.check_point(&point)
                .map_err(|e| Error::Internal(format!("lifted point infeasible: {e}")))?;
            let table = table_from_point(&model, &point)?;
            if !model.index.partial && p.m <= 3 && p.n <= 4 {
                replay(p, &table)?;
            }
            SynthesisStatus::Feasible(table)
        }
        LpOutcome::Infeasible(cert) => {
            SynthesisStatus::Infeasible(Box::new(infeasibility(&model, &reduced, &cert)?))
        }
        LpOutcome::Unbounded { .. } => {
            return Err(Error::Internal("feasibility program reported unbounded".into()))
        }
    };
    Ok(SynthesisOutcome { status, stats: st })
}

fn table_from_point(model: &Model, point: &[Rational]) -> Result<TableDoc> {
    let m = model.m;
    let entries = model
        .index
        .classes
        .iter()
        .enumerate()
        .map(|(c, class)| {
            Ok(TableEntry {
                profile: class.representative.clone(),
                lottery: Lottery::new(point[c * m..(c + 1) * m].to_vec())?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TableDoc {
        m,
        n: model.index.n,
        mode: if model.index.partial {
            ClassMode::Full
        } else {
            model.index.mode
        },
        entries,
    })
}

/// Re-checks a synthesized table with the exhaustive checkers.
pub fn replay(p: &SynthesisProblem, table: &TableDoc) -> Result<()> {
    let rule = TableRule::new(table.clone())?;
    let domain = SweepDomain::full(p.m, p.n);
    for axiom in &p.axioms {
        let report = axiom.check(&rule, &domain)?;
        if !report.passed() {
            return Err(Error::Internal(format!(
                "synthesized table fails {}: {:?}",
                report.axiom, report.status
            )));
        }
    }
    let opts = SpOptions {
        reduction: Reduction::Full,
        ..SpOptions::default()
    };
    let sp = check_u_sp_with(&rule, &p.utility, p.m, p.n, &opts)?;
    if let Some(w) = sp.witness() {
        return Err(Error::Internal(format!("synthesized table is manipulable: {w:?}")));
    }
    Ok(())
}

/// Range of one probability over all rules meeting the problem.
#[derive(Clone, Debug)]
pub enum ProbabilityBounds {
    Range { min: Rational, max: Rational },
    Infeasible(Box<Infeasibility>),
}

impl ProbabilityBounds {
    pub fn range(&self) -> Option<(&Rational, &Rational)> {
        match self {
            ProbabilityBounds::Range { min, max } => Some((min, max)),
            ProbabilityBounds::Infeasible(_) => None,
        }
    }
}

/// A problem prepared once for many bound queries.
pub struct BoundSolver {
    model: Model,
    reduced: Reduced,
    /// Lazy rows active at the feasibility solve.
    seed: Vec<usize>,
}

impl BoundSolver {
    /// Builds the program; returns the certificate if it is infeasible.
    pub fn new(p: &SynthesisProblem) -> Result<std::result::Result<BoundSolver, Box<Infeasibility>>> {
        let model = Model::build(p)?;
        let reduced = Reduced::new(&model);
        let (outcome, stats) = solve_lazy(&reduced.base, &reduced.lazy)?;
        if let LpOutcome::Infeasible(cert) = outcome {
            return Ok(Err(Box::new(infeasibility(&model, &reduced, &cert)?)));
        }
        Ok(Ok(BoundSolver {
            model,
            reduced,
            seed: stats.active,
        }))
    }

    pub fn index(&self) -> &ProfileClassIndex {
        &self.model.index
    }

    /// `(min, max)` of the probability of `x` in `class`.
    pub fn bounds(&self, class: usize, x: Alternative) -> Result<(Rational, Rational)> {
        let m = self.model.m;
        if class >= self.model.index.classes.len() || x >= m {
            return Err(Error::domain(format!("no variable for class {class}, alternative {x}")));
        }
        let v = class * m + x;
        let Some(r) = self.reduced.var_map[v] else {
            let value = self.reduced.pins[&v].0.clone();
            return Ok((value.clone(), value));
        };
        let mut objective = vec![Rational::zero(); self.reduced.free.len()];
        objective[r] = int(1);
        let solve = |minimize: bool| -> Result<Rational> {
            let mut lp = self.reduced.base.clone();
            if minimize {
                lp.minimize(objective.clone());
            } else {
                lp.maximize(objective.clone());
            }
            match solve_lazy_seeded(&lp, &self.reduced.lazy, &self.seed)?.0 {
                LpOutcome::Optimal { value, .. } => Ok(value),
                other => Err(Error::Internal(format!("bound program gave {other:?}"))),
            }
        };
        Ok((solve(true)?, solve(false)?))
    }

    /// Bounds for every class and alternative, in class-major order.
    pub fn all_bounds(&self) -> Result<Vec<(Rational, Rational)>> {
        let m = self.model.m;
        (0..self.model.index.classes.len() * m)
            .into_par_iter()
            .map(|v| self.bounds(v / m, v % m))
            .collect()
    }
}

/// Minimum and maximum of the probability of `x` at `class` over all
/// feasible rules.
pub fn bound_probability(p: &SynthesisProblem, class: usize, x: Alternative) -> Result<ProbabilityBounds> {
    match BoundSolver::new(p)? {
        Ok(solver) => {
            let (min, max) = solver.bounds(class, x)?;
            Ok(ProbabilityBounds::Range { min, max })
        }
        Err(inf) => Ok(ProbabilityBounds::Infeasible(inf)),
    }
}

#[cfg(test)]
mod tests;
