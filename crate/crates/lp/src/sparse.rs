//! Exact solves with a sparse square basis matrix.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use crate::Rational;

type SparseRow = BTreeMap<usize, Rational>;

/// Solves `M z = rhs`, where row `i` of `M` is `rows[i]` (column index to
/// coefficient). Returns `None` if `M` is singular.
///
/// Pivots follow a Markowitz-style order: the column with the fewest active
/// entries, then its shortest row.
pub(crate) fn solve_rows(mut rows: Vec<SparseRow>, mut rhs: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = rows.len();
    let mut col_rows: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for (i, row) in rows.iter().enumerate() {
        for &v in row.keys() {
            if v >= n {
                return None;
            }
            col_rows[v].insert(i);
        }
    }
    let mut var_done = vec![false; n];
    let mut pivots: Vec<(usize, usize)> = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| !var_done[v])
            .min_by_key(|&v| col_rows[v].len())?;
        let r = *col_rows[v].iter().min_by_key(|&&r| rows[r].len())?;
        let prow: Vec<(usize, Rational)> = rows[r].iter().map(|(k, a)| (*k, a.clone())).collect();
        let pivot = rows[r][&v].clone();
        let prhs = rhs[r].clone();
        let targets: Vec<usize> = col_rows[v].iter().copied().filter(|&i| i != r).collect();
        for i in targets {
            let f = &rows[i][&v] / &pivot;
            for (k, a) in &prow {
                let entry = rows[i].entry(*k).or_insert_with(Rational::zero);
                *entry -= &f * a;
                if entry.is_zero() {
                    rows[i].remove(k);
                    col_rows[*k].remove(&i);
                } else {
                    col_rows[*k].insert(i);
                }
            }
            rhs[i] -= &f * &prhs;
        }
        for k in rows[r].keys() {
            col_rows[*k].remove(&r);
        }
        var_done[v] = true;
        pivots.push((r, v));
    }
    let mut z = vec![Rational::zero(); n];
    for &(r, v) in pivots.iter().rev() {
        let mut acc = rhs[r].clone();
        for (k, a) in &rows[r] {
            if *k != v {
                acc -= a * &z[*k];
            }
        }
        z[v] = acc / &rows[r][&v];
    }
    Some(z)
}
