//! Floating-point pass over the initial tableau that proposes a final basis.
//!
//! Nothing computed here is trusted: the exact solver pivots the proposed
//! columns into its own tableau, checks feasibility, and continues with
//! exact pivots from there.

const EPS: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-7;
const REFACTOR_EVERY: usize = 1000;
const PERTURBATION: f64 = 1e-6;
const ITERATION_LIMIT: usize = 200_000;
const DEGENERATE_STREAK_LIMIT: usize = 32;

pub(crate) enum Guide {
    /// Phase one ends with positive infeasibility at this basis.
    Infeasible(Vec<usize>),
    /// Basis believed optimal for phase two (or feasible if no objective).
    Feasible(Vec<usize>),
}

struct FloatTableau {
    original: Vec<Vec<f64>>,
    rows: Vec<Vec<f64>>,
    costs: Vec<f64>,
    obj: Vec<f64>,
    basis: Vec<usize>,
    rhs: usize,
}

impl FloatTableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = 1.0 / self.rows[r][c];
        let mut prow: Vec<(usize, f64)> = Vec::new();
        for (j, a) in self.rows[r].iter_mut().enumerate() {
            if *a != 0.0 {
                *a *= inv;
                prow.push((j, *a));
            }
        }
        self.rows[r][c] = 1.0;
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f == 0.0 {
                continue;
            }
            for &(j, a) in &prow {
                let v = row[j] - f * a;
                row[j] = if v.abs() < EPS * 1e-3 { 0.0 } else { v };
            }
            row[c] = 0.0;
        }
        let f = self.obj.get(c).copied().unwrap_or(0.0);
        if f != 0.0 {
            for &(j, a) in &prow {
                self.obj[j] -= f * a;
            }
            self.obj[c] = 0.0;
        }
        self.basis[r] = c;
    }

    /// Rebuilds the rows from the starting tableau for the current basis,
    /// using partial pivoting, to shed accumulated rounding error.
    fn refactor(&mut self) -> bool {
        let keep = std::mem::take(&mut self.basis);
        self.rows = self.original.clone();
        self.basis = vec![usize::MAX; self.rows.len()];
        self.obj.clear();
        let mut used = vec![false; self.rows.len()];
        for &c in &keep {
            let best = (0..self.rows.len())
                .filter(|&r| !used[r])
                .max_by(|&a, &b| self.rows[a][c].abs().total_cmp(&self.rows[b][c].abs()));
            let Some(r) = best else {
                return false;
            };
            if self.rows[r][c].abs() <= PIVOT_TOL {
                return false;
            }
            self.pivot(r, c);
            used[r] = true;
        }
        let costs = std::mem::take(&mut self.costs);
        self.set_costs(&costs);
        true
    }

    fn set_costs(&mut self, costs: &[f64]) {
        self.costs = costs.to_vec();
        let mut obj = costs.to_vec();
        obj.push(0.0);
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = costs[b];
            if cb == 0.0 {
                continue;
            }
            for (j, a) in self.rows[r].iter().enumerate() {
                if *a != 0.0 {
                    obj[j] -= cb * a;
                }
            }
        }
        self.obj = obj;
    }

    /// Runs on a copy of the data with slightly loosened right-hand sides,
    /// which breaks ties between degenerate vertices, then restores the data
    /// and finishes from the basis reached.
    fn run_perturbed(&mut self, allowed: &[bool]) -> bool {
        let exact = self.original.clone();
        for (i, row) in self.original.iter_mut().enumerate() {
            let spread = ((i as f64) * 0.618_033_988_75).fract();
            row[self.rhs] += PERTURBATION * (1.0 + spread);
        }
        let ok = self.refactor() && self.run(allowed);
        self.original = exact;
        ok && self.refactor() && self.run(allowed)
    }

    /// Returns `false` if the iteration limit is hit or the run is unbounded.
    fn run(&mut self, allowed: &[bool]) -> bool {
        let mut streak = 0usize;
        let mut fresh = false;
        for it in 0..ITERATION_LIMIT {
            if it > 0 && it % REFACTOR_EVERY == 0 {
                if !self.refactor() {
                    return false;
                }
                fresh = true;
            }
            let bland = streak >= DEGENERATE_STREAK_LIMIT;
            let mut entering: Option<usize> = None;
            for j in 0..self.rhs {
                if !allowed[j] || self.obj[j] >= -EPS {
                    continue;
                }
                match entering {
                    None => {
                        entering = Some(j);
                        if bland {
                            break;
                        }
                    }
                    Some(e) if self.obj[j] < self.obj[e] => entering = Some(j),
                    Some(_) => {}
                }
            }
            let Some(c) = entering else {
                if fresh {
                    return true;
                }
                if !self.refactor() {
                    return false;
                }
                fresh = true;
                continue;
            };
            fresh = false;
            // Smallest ratio first, then among near-ties the largest pivot.
            let mut min_ratio = f64::INFINITY;
            for row in &self.rows {
                if row[c] > PIVOT_TOL {
                    min_ratio = min_ratio.min(row[self.rhs].max(0.0) / row[c]);
                }
            }
            let mut leaving: Option<(usize, f64)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                let a = row[c];
                if a <= PIVOT_TOL {
                    continue;
                }
                let ratio = row[self.rhs].max(0.0) / a;
                if ratio > min_ratio + EPS {
                    continue;
                }
                if leaving.is_none_or(|(li, _)| a > self.rows[li][c]) {
                    leaving = Some((i, ratio));
                }
            }
            let Some((r, ratio)) = leaving else {
                return false;
            };
            if ratio <= EPS {
                streak += 1;
            } else {
                streak = 0;
            }
            self.pivot(r, c);
        }
        false
    }
}

/// Runs both phases in `f64` on a copy of the starting tableau. `None` means
/// the float run gave up; the caller then solves cold.
pub(crate) fn guide(
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    first_art: usize,
    costs: Option<&[f64]>,
) -> Option<Guide> {
    let width = rows.first().map(|r| r.len() - 1)?;
    let mut tab = FloatTableau {
        original: rows.clone(),
        rows,
        costs: Vec::new(),
        obj: Vec::new(),
        basis,
        rhs: width,
    };
    if first_art < width {
        let mut phase_one = vec![0.0; width];
        for c in phase_one.iter_mut().skip(first_art) {
            *c = 1.0;
        }
        tab.set_costs(&phase_one);
        if !tab.run_perturbed(&vec![true; width]) {
            return None;
        }
        if -tab.obj[width] > 1e-7 {
            return Some(Guide::Infeasible(tab.basis));
        }
        // Artificials left in redundant rows stay basic at zero; those rows
        // have no allowed column, so phase two never touches them.
        for r in 0..tab.rows.len() {
            if tab.basis[r] >= first_art {
                let best = (0..first_art)
                    .filter(|&j| tab.rows[r][j].abs() > PIVOT_TOL)
                    .max_by(|&a, &b| tab.rows[r][a].abs().total_cmp(&tab.rows[r][b].abs()));
                if let Some(j) = best {
                    tab.pivot(r, j);
                }
            }
        }
    }
    if let Some(costs) = costs {
        tab.set_costs(costs);
        let allowed: Vec<bool> = (0..width).map(|j| j < first_art).collect();
        if !tab.run_perturbed(&allowed) {
            return None;
        }
    }
    Some(Guide::Feasible(tab.basis))
}
