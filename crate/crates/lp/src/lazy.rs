use std::collections::BTreeSet;

use num_traits::Zero;

use crate::{solve, verify_outcome, FarkasCertificate, LinearProgram, LpError, LpOutcome, Rational};

/// Bookkeeping for [`solve_lazy`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LazyStats {
    /// Number of LP solves performed.
    pub rounds: usize,
    /// Lazy rows present in the final restricted program.
    pub active_rows: usize,
    /// Indices of those rows, usable as a seed for a related solve.
    pub active: Vec<usize>,
}

/// Solves `base` extended by the rows in `lazy`, adding lazy rows only when
/// the current optimum violates them.
///
/// The outcome refers to the full program `base + lazy` (lazy rows appended
/// after the base rows, in order), and has been verified against it.
pub fn solve_lazy(
    base: &LinearProgram,
    lazy: &[crate::Constraint],
) -> Result<(LpOutcome, LazyStats), LpError> {
    solve_lazy_seeded(base, lazy, &[])
}

/// [`solve_lazy`] starting with the lazy rows in `seed` already active.
pub fn solve_lazy_seeded(
    base: &LinearProgram,
    lazy: &[crate::Constraint],
    seed: &[usize],
) -> Result<(LpOutcome, LazyStats), LpError> {
    let mut active: BTreeSet<usize> = seed.iter().copied().filter(|&i| i < lazy.len()).collect();
    let mut stats = LazyStats::default();
    loop {
        let mut restricted = base.clone();
        let order: Vec<usize> = active.iter().copied().collect();
        for &i in &order {
            restricted.add(lazy[i].clone());
        }
        stats.rounds += 1;
        stats.active_rows = order.len();
        stats.active = order.clone();
        let outcome = solve(&restricted)?;
        let lifted = match outcome {
            LpOutcome::Optimal { ref point, .. } => {
                let violated: Vec<usize> = (0..lazy.len())
                    .filter(|i| !active.contains(i) && !lazy[*i].is_satisfied_by(point))
                    .collect();
                if !violated.is_empty() {
                    active.extend(violated);
                    continue;
                }
                outcome
            }
            LpOutcome::Infeasible(cert) => {
                let base_rows = base.constraints.len();
                let mut rows = cert.rows[..base_rows].to_vec();
                rows.extend(std::iter::repeat_n(Rational::zero(), lazy.len()));
                for (k, &i) in order.iter().enumerate() {
                    rows[base_rows + i] = cert.rows[base_rows + k].clone();
                }
                LpOutcome::Infeasible(FarkasCertificate {
                    rows,
                    lower: cert.lower,
                    upper: cert.upper,
                })
            }
            LpOutcome::Unbounded { .. } => {
                if active.len() == lazy.len() {
                    outcome
                } else {
                    active.extend(0..lazy.len());
                    continue;
                }
            }
        };
        let mut full = base.clone();
        for c in lazy {
            full.add(c.clone());
        }
        verify_outcome(&full, &lifted)?;
        return Ok((lifted, stats));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Constraint, Relation};

    fn r(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn lazy_rows_cut_the_optimum() {
        // max x + y over the unit box, cut by x + 2y <= 2 and 2x + y <= 2.
        let mut base = LinearProgram::new(2);
        base.maximize(vec![r(1), r(1)]);
        for v in 0..2 {
            base.set_lower(v, r(0));
            base.set_upper(v, r(1));
        }
        let lazy = vec![
            Constraint::dense(&[r(1), r(2)], Relation::Le, r(2)),
            Constraint::dense(&[r(2), r(1)], Relation::Le, r(2)),
        ];
        let (out, stats) = solve_lazy(&base, &lazy).unwrap();
        match out {
            LpOutcome::Optimal { value, .. } => {
                assert_eq!(value, Rational::new(4.into(), 3.into()))
            }
            other => panic!("{other:?}"),
        }
        assert!(stats.rounds >= 2);
    }

    #[test]
    fn lazy_infeasibility_certificate_covers_full_program() {
        let mut base = LinearProgram::new(1);
        base.set_lower(0, r(0));
        base.set_upper(0, r(5));
        let lazy = vec![
            Constraint::dense(&[r(1)], Relation::Le, r(4)),
            Constraint::dense(&[r(1)], Relation::Ge, r(6)),
        ];
        let (out, _) = solve_lazy(&base, &lazy).unwrap();
        let cert = out.certificate().unwrap();
        assert_eq!(cert.rows.len(), 2);
    }
}
