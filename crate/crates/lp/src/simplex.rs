//! Dense two-phase tableau simplex.
//!
//! The program is first rewritten over non-negative columns (lower bounds are
//! shifted out, upper-only variables are reflected, free variables are split),
//! every row gets a non-negative right-hand side, and `<=` rows start with
//! their slack in the basis while `>=` / `=` rows start with an artificial.
//!
//! Pricing is largest-coefficient until a run of degenerate pivots is seen,
//! then Bland's smallest-index rule until the objective moves again. Bland's
//! rule cannot cycle, and every non-degenerate pivot strictly improves the
//! objective, so the method terminates.

use num_traits::{One, Signed, ToPrimitive, Zero};

use std::collections::BTreeMap;

use crate::guide::{guide, Guide};
use crate::sparse::solve_rows;

use crate::{Direction, FarkasCertificate, LinearProgram, LpError, LpOutcome, Rational, Relation};

const DEGENERATE_STREAK_LIMIT: usize = 32;

#[derive(Debug, Clone)]
enum VarMap {
    /// `x = lower + col`, optionally with an explicit upper row.
    Shift {
        col: usize,
        lower: Rational,
        upper_row: Option<usize>,
    },
    /// `x = upper - col`.
    Flip { col: usize, upper: Rational },
    /// `x = pos - neg`.
    Split { pos: usize, neg: usize },
}

#[derive(Debug, Clone, Copy)]
enum RowOrigin {
    User(usize),
    Upper(usize),
}

struct StdRow {
    terms: Vec<(usize, Rational)>,
    relation: Relation,
    rhs: Rational,
    negated: bool,
    origin: RowOrigin,
}

#[derive(Clone)]
struct Tableau {
    rows: Vec<Vec<Rational>>,
    obj: Vec<Rational>,
    basis: Vec<usize>,
    /// Index of the right-hand-side entry in each row.
    rhs: usize,
}

enum Status {
    Optimal,
    Unbounded(usize),
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        let mut prow: Vec<(usize, Rational)> = Vec::new();
        for (j, a) in self.rows[r].iter_mut().enumerate() {
            if !a.is_zero() {
                *a *= &inv;
                prow.push((j, a.clone()));
            }
        }
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c].clone();
            if f.is_zero() {
                continue;
            }
            for (j, a) in &prow {
                row[*j] -= &f * a;
            }
        }
        let f = self.obj.get(c).cloned().unwrap_or_default();
        if !f.is_zero() {
            for (j, a) in &prow {
                self.obj[*j] -= &f * a;
            }
        }
        self.basis[r] = c;
    }

    fn set_costs(&mut self, costs: &[Rational]) {
        let mut obj = costs.to_vec();
        obj.push(Rational::zero());
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = &costs[b];
            if cb.is_zero() {
                continue;
            }
            for (j, a) in self.rows[r].iter().enumerate() {
                if !a.is_zero() {
                    obj[j] -= cb * a;
                }
            }
        }
        self.obj = obj;
    }

    fn run(&mut self, allowed: &[bool]) -> Result<Status, LpError> {
        let mut streak = 0usize;
        let mut iterations = 0usize;
        loop {
            iterations += 1;
            if iterations > 5_000_000 {
                return Err(LpError::Internal("simplex iteration limit exceeded".into()));
            }
            let bland = streak >= DEGENERATE_STREAK_LIMIT;
            let mut entering: Option<usize> = None;
            for j in 0..self.rhs {
                if !allowed[j] || !self.obj[j].is_negative() {
                    continue;
                }
                match entering {
                    None => {
                        entering = Some(j);
                        if bland {
                            break;
                        }
                    }
                    Some(e) => {
                        if self.obj[j] < self.obj[e] {
                            entering = Some(j);
                        }
                    }
                }
            }
            let Some(c) = entering else {
                return Ok(Status::Optimal);
            };
            let mut leaving: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                let a = &row[c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &row[self.rhs] / a;
                let better = match &leaving {
                    None => true,
                    Some((li, lr)) => {
                        ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                    }
                };
                if better {
                    leaving = Some((i, ratio));
                }
            }
            let Some((r, ratio)) = leaving else {
                return Ok(Status::Unbounded(c));
            };
            if ratio.is_zero() {
                streak += 1;
            } else {
                streak = 0;
            }
            self.pivot(r, c);
        }
    }

    /// Pivots `target` into the basis of a copy. Fails if some column cannot
    /// enter or the resulting basic solution is not feasible.
    fn install(&self, target: &[usize]) -> Option<Tableau> {
        let mut tab = self.clone();
        let mut wanted = vec![false; tab.rhs];
        for &c in target {
            wanted[c] = true;
        }
        let mut locked: Vec<bool> = tab.basis.iter().map(|&b| wanted[b]).collect();
        for &c in target {
            if tab.basis.contains(&c) {
                continue;
            }
            // A column that cannot enter is left out; the exact run repairs it.
            if let Some(r) = (0..tab.rows.len()).find(|&r| !locked[r] && !tab.rows[r][c].is_zero()) {
                tab.pivot(r, c);
                locked[r] = true;
            }
        }
        if tab.rows.iter().any(|row| row[tab.rhs].is_negative()) {
            return None;
        }
        Some(tab)
    }

    fn float_rows(&self) -> Vec<Vec<f64>> {
        self.rows
            .iter()
            .map(|row| row.iter().map(|a| a.to_f64().unwrap_or(0.0)).collect())
            .collect()
    }

    fn column_values(&self, width: usize) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); width];
        for (r, &b) in self.basis.iter().enumerate() {
            x[b] = self.rows[r][self.rhs].clone();
        }
        x
    }
}

pub(crate) fn solve_validated(lp: &LinearProgram) -> Result<LpOutcome, LpError> {
    solve_with(lp, true)
}

/// Exact pivoting only, without the floating-point guide.
#[cfg(test)]
pub(crate) fn solve_cold(lp: &LinearProgram) -> Result<LpOutcome, LpError> {
    solve_with(lp, false)
}

fn solve_with(lp: &LinearProgram, guided: bool) -> Result<LpOutcome, LpError> {
    let n = lp.num_vars();

    // Column layout for structural variables.
    let mut maps = Vec::with_capacity(n);
    let mut ncols = 0usize;
    for v in 0..n {
        let map = match (lp.lower(v), lp.upper(v)) {
            (Some(l), _) => {
                ncols += 1;
                VarMap::Shift {
                    col: ncols - 1,
                    lower: l.clone(),
                    upper_row: None,
                }
            }
            (None, Some(u)) => {
                ncols += 1;
                VarMap::Flip {
                    col: ncols - 1,
                    upper: u.clone(),
                }
            }
            (None, None) => {
                ncols += 2;
                VarMap::Split {
                    pos: ncols - 2,
                    neg: ncols - 1,
                }
            }
        };
        maps.push(map);
    }

    let mut std_rows: Vec<StdRow> = Vec::with_capacity(lp.constraints.len());
    for (i, c) in lp.constraints.iter().enumerate() {
        let mut terms = Vec::with_capacity(c.terms.len());
        let mut rhs = c.rhs.clone();
        for (v, a) in &c.terms {
            match &maps[*v] {
                VarMap::Shift { col, lower, .. } => {
                    terms.push((*col, a.clone()));
                    rhs -= a * lower;
                }
                VarMap::Flip { col, upper } => {
                    terms.push((*col, -a.clone()));
                    rhs -= a * upper;
                }
                VarMap::Split { pos, neg } => {
                    terms.push((*pos, a.clone()));
                    terms.push((*neg, -a.clone()));
                }
            }
        }
        std_rows.push(StdRow {
            terms,
            relation: c.relation,
            rhs,
            negated: false,
            origin: RowOrigin::User(i),
        });
    }
    for v in 0..n {
        if let (VarMap::Shift { col, lower, .. }, Some(u)) = (&maps[v], lp.upper(v)) {
            let col = *col;
            let rhs = u - lower;
            std_rows.push(StdRow {
                terms: vec![(col, Rational::one())],
                relation: Relation::Le,
                rhs,
                negated: false,
                origin: RowOrigin::Upper(v),
            });
            if let VarMap::Shift { upper_row, .. } = &mut maps[v] {
                *upper_row = Some(std_rows.len() - 1);
            }
        }
    }
    for row in &mut std_rows {
        if row.rhs.is_negative() {
            row.negated = true;
            row.rhs = -row.rhs.clone();
            for (_, a) in &mut row.terms {
                *a = -a.clone();
            }
            row.relation = match row.relation {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
    }

    // Slack / surplus / artificial columns.
    let m = std_rows.len();
    let mut slack_col = vec![None; m];
    let mut art_col = vec![None; m];
    let mut width = ncols;
    for (i, row) in std_rows.iter().enumerate() {
        if row.relation != Relation::Eq {
            slack_col[i] = Some(width);
            width += 1;
        }
    }
    let first_art = width;
    for (i, row) in std_rows.iter().enumerate() {
        if row.relation != Relation::Le {
            art_col[i] = Some(width);
            width += 1;
        }
    }

    let mut tab = Tableau {
        rows: Vec::with_capacity(m),
        obj: Vec::new(),
        basis: Vec::with_capacity(m),
        rhs: width,
    };
    for (i, row) in std_rows.iter().enumerate() {
        let mut dense = vec![Rational::zero(); width + 1];
        for (col, a) in &row.terms {
            dense[*col] += a;
        }
        match row.relation {
            Relation::Le => {
                dense[slack_col[i].unwrap()] = Rational::one();
                tab.basis.push(slack_col[i].unwrap());
            }
            Relation::Ge => {
                dense[slack_col[i].unwrap()] = -Rational::one();
                dense[art_col[i].unwrap()] = Rational::one();
                tab.basis.push(art_col[i].unwrap());
            }
            Relation::Eq => {
                dense[art_col[i].unwrap()] = Rational::one();
                tab.basis.push(art_col[i].unwrap());
            }
        }
        dense[width] = row.rhs.clone();
        tab.rows.push(dense);
    }

    // Phase 2 minimises, so a maximisation objective is negated.
    let costs: Option<Vec<Rational>> = lp.objective().map(|objective| {
        let mut costs = vec![Rational::zero(); width];
        for (v, c) in objective.coeffs.iter().enumerate() {
            let c = match objective.direction {
                Direction::Minimize => c.clone(),
                Direction::Maximize => -c.clone(),
            };
            match &maps[v] {
                VarMap::Shift { col, .. } => costs[*col] += &c,
                VarMap::Flip { col, .. } => costs[*col] -= &c,
                VarMap::Split { pos, neg } => {
                    costs[*pos] += &c;
                    costs[*neg] -= &c;
                }
            }
        }
        costs
    });
    let float_costs: Option<Vec<f64>> = costs
        .as_ref()
        .map(|c| c.iter().map(|a| a.to_f64().unwrap_or(0.0)).collect());
    let guided = if guided {
        guide(tab.float_rows(), tab.basis.clone(), first_art, float_costs.as_deref())
    } else {
        None
    };
    if let Some(g) = &guided {
        let basic = BasisCheck {
            lp,
            maps: &maps,
            std_rows: &std_rows,
            tab: &tab,
            first_art,
        };
        if let Some(outcome) = basic.confirm(g, costs.as_deref()) {
            return Ok(outcome);
        }
    }
    let mut feasible_start = false;
    match &guided {
        Some(Guide::Infeasible(basis)) => {
            if let Some(t) = tab.install(basis) {
                tab = t;
            }
        }
        Some(Guide::Feasible(basis)) => {
            if let Some(t) = tab.install(basis) {
                let clean = t
                    .basis
                    .iter()
                    .zip(&t.rows)
                    .all(|(&b, row)| b < first_art || row[t.rhs].is_zero());
                if clean {
                    tab = t;
                    feasible_start = true;
                }
            }
        }
        None => {}
    }

    // Phase 1.
    if first_art < width {
        let mut costs = vec![Rational::zero(); width];
        for c in costs.iter_mut().skip(first_art) {
            *c = Rational::one();
        }
        if !feasible_start {
            tab.set_costs(&costs);
            let allowed = vec![true; width];
            match tab.run(&allowed)? {
                Status::Optimal => {}
                Status::Unbounded(_) => {
                    return Err(LpError::Internal("phase one reported unbounded".into()));
                }
            }
            let infeasibility = -tab.obj[width].clone();
            if infeasibility.is_positive() {
                return Ok(LpOutcome::Infeasible(farkas_from_phase_one(
                    lp, &maps, &std_rows, &slack_col, &art_col, &tab,
                )?));
            }
        }
        // Drive remaining artificials out of the basis or drop redundant rows.
        let mut r = 0;
        while r < tab.rows.len() {
            if tab.basis[r] >= first_art {
                let replacement = (0..first_art).find(|&j| !tab.rows[r][j].is_zero());
                match replacement {
                    Some(j) => {
                        tab.pivot(r, j);
                        r += 1;
                    }
                    None => {
                        tab.rows.remove(r);
                        tab.basis.remove(r);
                    }
                }
            } else {
                r += 1;
            }
        }
    }

    let allowed: Vec<bool> = (0..width).map(|j| j < first_art).collect();

    let Some(costs) = costs else {
        let x = tab.column_values(width);
        return Ok(LpOutcome::Optimal {
            value: Rational::zero(),
            point: structural_point(&maps, &x, lp),
        });
    };

    tab.set_costs(&costs);
    match tab.run(&allowed)? {
        Status::Optimal => {
            let x = tab.column_values(width);
            let point = structural_point(&maps, &x, lp);
            let value = lp.objective_value(&point);
            Ok(LpOutcome::Optimal { value, point })
        }
        Status::Unbounded(c) => {
            let x = tab.column_values(width);
            let point = structural_point(&maps, &x, lp);
            let mut d = vec![Rational::zero(); width];
            d[c] = Rational::one();
            for (r, &b) in tab.basis.iter().enumerate() {
                d[b] = -tab.rows[r][c].clone();
            }
            let ray = structural_direction(&maps, &d);
            Ok(LpOutcome::Unbounded { point, ray })
        }
    }
}

fn structural_point(maps: &[VarMap], x: &[Rational], _lp: &LinearProgram) -> Vec<Rational> {
    maps.iter()
        .map(|m| match m {
            VarMap::Shift { col, lower, .. } => lower + &x[*col],
            VarMap::Flip { col, upper } => upper - &x[*col],
            VarMap::Split { pos, neg } => &x[*pos] - &x[*neg],
        })
        .collect()
}

fn structural_direction(maps: &[VarMap], d: &[Rational]) -> Vec<Rational> {
    maps.iter()
        .map(|m| match m {
            VarMap::Shift { col, .. } => d[*col].clone(),
            VarMap::Flip { col, .. } => -d[*col].clone(),
            VarMap::Split { pos, neg } => &d[*pos] - &d[*neg],
        })
        .collect()
}

/// Reads the phase-one duals off the final reduced costs and maps them back
/// to multipliers on the caller's rows and bounds.
fn farkas_from_phase_one(
    lp: &LinearProgram,
    maps: &[VarMap],
    std_rows: &[StdRow],
    slack_col: &[Option<usize>],
    art_col: &[Option<usize>],
    tab: &Tableau,
) -> Result<FarkasCertificate, LpError> {
    let mut duals = Vec::with_capacity(std_rows.len());
    for (i, row) in std_rows.iter().enumerate() {
        let y = match (row.relation, slack_col[i], art_col[i]) {
            (Relation::Le, Some(s), _) => -tab.obj[s].clone(),
            (_, _, Some(a)) => Rational::one() - &tab.obj[a],
            _ => return Err(LpError::Internal("row without basis column".into())),
        };
        duals.push(y);
    }
    Ok(farkas_from_duals(lp, maps, std_rows, &duals))
}

/// Certificate from phase-one duals `y` on the normalised rows.
fn farkas_from_duals(
    lp: &LinearProgram,
    maps: &[VarMap],
    std_rows: &[StdRow],
    duals: &[Rational],
) -> FarkasCertificate {
    let n = lp.num_vars();
    let mut rows = vec![Rational::zero(); lp.constraints.len()];
    let mut upper_mult = vec![Rational::zero(); n];
    for (row, y) in std_rows.iter().zip(duals) {
        // The certificate uses w = -y on the normalised row.
        let mut w = -y.clone();
        if row.negated {
            w = -w;
        }
        match row.origin {
            RowOrigin::User(k) => rows[k] = w,
            RowOrigin::Upper(v) => upper_mult[v] = w,
        }
    }
    let mut s = vec![Rational::zero(); n];
    for (y, c) in rows.iter().zip(&lp.constraints) {
        if y.is_zero() {
            continue;
        }
        for (v, a) in &c.terms {
            s[*v] += y * a;
        }
    }
    let mut lower = vec![Rational::zero(); n];
    let mut upper = vec![Rational::zero(); n];
    for v in 0..n {
        match &maps[v] {
            VarMap::Shift { upper_row, .. } => {
                let mu = if upper_row.is_some() {
                    upper_mult[v].clone()
                } else {
                    Rational::zero()
                };
                lower[v] = &s[v] + &mu;
                upper[v] = mu;
            }
            VarMap::Flip { .. } => {
                upper[v] = -s[v].clone();
            }
            VarMap::Split { .. } => {}
        }
    }
    FarkasCertificate {
        rows,
        lower,
        upper,
    }
}

/// Confirms a proposed final basis by exact sparse solves against the
/// starting tableau, without forming the pivoted tableau.
struct BasisCheck<'a> {
    lp: &'a LinearProgram,
    maps: &'a [VarMap],
    std_rows: &'a [StdRow],
    tab: &'a Tableau,
    first_art: usize,
}

impl BasisCheck<'_> {
    fn confirm(&self, guide: &Guide, costs: Option<&[Rational]>) -> Option<LpOutcome> {
        match guide {
            Guide::Infeasible(basis) => {
                let phase_one: Vec<Rational> = basis
                    .iter()
                    .map(|&b| {
                        if b >= self.first_art {
                            Rational::one()
                        } else {
                            Rational::zero()
                        }
                    })
                    .collect();
                let y = self.duals(basis, phase_one)?;
                let cert = farkas_from_duals(self.lp, self.maps, self.std_rows, &y);
                cert.verify(self.lp).ok()?;
                Some(LpOutcome::Infeasible(cert))
            }
            Guide::Feasible(basis) => {
                let x = self.primal(basis)?;
                let point = structural_point(self.maps, &x, self.lp);
                self.lp.check_point(&point).ok()?;
                let Some(costs) = costs else {
                    return Some(LpOutcome::Optimal {
                        value: Rational::zero(),
                        point,
                    });
                };
                let cb: Vec<Rational> = basis
                    .iter()
                    .map(|&b| costs.get(b).cloned().unwrap_or_default())
                    .collect();
                let y = self.duals(basis, cb)?;
                for j in 0..self.first_art {
                    let mut d = costs[j].clone();
                    for (i, row) in self.tab.rows.iter().enumerate() {
                        if !row[j].is_zero() && !y[i].is_zero() {
                            d -= &y[i] * &row[j];
                        }
                    }
                    if d.is_negative() {
                        return None;
                    }
                }
                let value = self.lp.objective_value(&point);
                Some(LpOutcome::Optimal { value, point })
            }
        }
    }

    /// Basic solution, with artificials required to be zero.
    fn primal(&self, basis: &[usize]) -> Option<Vec<Rational>> {
        let m = self.tab.rows.len();
        if basis.len() != m {
            return None;
        }
        let rows: Vec<BTreeMap<usize, Rational>> = self
            .tab
            .rows
            .iter()
            .map(|row| {
                basis
                    .iter()
                    .enumerate()
                    .filter(|(_, &b)| !row[b].is_zero())
                    .map(|(k, &b)| (k, row[b].clone()))
                    .collect()
            })
            .collect();
        let rhs: Vec<Rational> = self.tab.rows.iter().map(|r| r[self.tab.rhs].clone()).collect();
        let xb = solve_rows(rows, rhs)?;
        let mut x = vec![Rational::zero(); self.tab.rhs];
        for (k, &b) in basis.iter().enumerate() {
            if xb[k].is_negative() || (b >= self.first_art && !xb[k].is_zero()) {
                return None;
            }
            x[b] = xb[k].clone();
        }
        Some(x)
    }

    /// Simplex multipliers `y` with `y B = c_B`.
    fn duals(&self, basis: &[usize], cb: Vec<Rational>) -> Option<Vec<Rational>> {
        if basis.len() != self.tab.rows.len() {
            return None;
        }
        let rows: Vec<BTreeMap<usize, Rational>> = basis
            .iter()
            .map(|&b| {
                self.tab
                    .rows
                    .iter()
                    .enumerate()
                    .filter(|(_, row)| !row[b].is_zero())
                    .map(|(i, row)| (i, row[b].clone()))
                    .collect()
            })
            .collect();
        solve_rows(rows, cb)
    }
}
