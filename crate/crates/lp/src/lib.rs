//! Exact linear programming over arbitrary-precision rationals.
//!
//! Every outcome returned by [`solve`] carries evidence that is re-checked by
//! plain arithmetic before it leaves the solver:
//!
//! - `Optimal`: the point satisfies every constraint and bound exactly, and
//!   the reported value is the objective at that point.
//! - `Infeasible`: a Farkas certificate whose multipliers combine the
//!   constraints into `0 <= negative`.
//! - `Unbounded`: a recession direction that keeps every constraint and
//!   strictly improves the objective.
//!
//! The engine is a dense two-phase tableau simplex with Bland's rule as the
//! anti-cycling safeguard. A floating-point run of the same method proposes
//! a final basis first; that basis is accepted only after exact sparse solves
//! confirm it, and the exact pivoting path takes over otherwise.

mod certificate;
mod guide;
mod lazy;
mod problem;
mod simplex;
mod sparse;

pub use certificate::FarkasCertificate;
pub use lazy::{solve_lazy, solve_lazy_seeded, LazyStats};
pub use problem::{Constraint, Direction, LinearProgram, Objective, Relation};

use num_rational::BigRational;
use thiserror::Error;

/// Arbitrary-precision rational used throughout.
pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LpError {
    #[error("constraint {row} references variable {var}, but the program has {num_vars} variables")]
    VariableOutOfRange {
        row: usize,
        var: usize,
        num_vars: usize,
    },
    #[error("objective has {got} coefficients, expected {expected}")]
    ObjectiveLength { got: usize, expected: usize },
    #[error("bound vectors have length {got}, expected {expected}")]
    BoundLength { got: usize, expected: usize },
    /// The solver produced evidence that failed its own post-hoc check.
    /// This indicates a bug, never a property of the input.
    #[error("internal solver error: {0}")]
    Internal(String),
}

/// Result of solving a [`LinearProgram`].
#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { value: Rational, point: Vec<Rational> },
    Infeasible(FarkasCertificate),
    /// A feasible point together with an improving recession direction.
    Unbounded {
        point: Vec<Rational>,
        ray: Vec<Rational>,
    },
}

impl LpOutcome {
    pub fn is_optimal(&self) -> bool {
        matches!(self, LpOutcome::Optimal { .. })
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self, LpOutcome::Infeasible(_))
    }

    pub fn certificate(&self) -> Option<&FarkasCertificate> {
        match self {
            LpOutcome::Infeasible(cert) => Some(cert),
            _ => None,
        }
    }

    pub fn point(&self) -> Option<&[Rational]> {
        match self {
            LpOutcome::Optimal { point, .. } => Some(point),
            _ => None,
        }
    }
}

/// Solves `lp` exactly. The returned evidence has already been verified
/// against `lp`.
pub fn solve(lp: &LinearProgram) -> Result<LpOutcome, LpError> {
    lp.validate()?;
    let outcome = simplex::solve_validated(lp)?;
    verify_outcome(lp, &outcome)?;
    Ok(outcome)
}

/// Feasibility check: solves `lp` with its objective dropped. A feasible
/// program yields `Optimal { value: 0, point }`.
pub fn check_feasible(lp: &LinearProgram) -> Result<LpOutcome, LpError> {
    let mut plain = lp.clone();
    plain.clear_objective();
    solve(&plain)
}

/// Re-checks the evidence in `outcome` against `lp`.
pub fn verify_outcome(lp: &LinearProgram, outcome: &LpOutcome) -> Result<(), LpError> {
    match outcome {
        LpOutcome::Optimal { value, point } => {
            lp.check_point(point).map_err(LpError::Internal)?;
            let actual = lp.objective_value(point);
            if &actual != value {
                return Err(LpError::Internal(format!(
                    "reported objective {value} but point evaluates to {actual}"
                )));
            }
            Ok(())
        }
        LpOutcome::Infeasible(cert) => cert.verify(lp).map_err(LpError::Internal),
        LpOutcome::Unbounded { point, ray } => {
            lp.check_point(point).map_err(LpError::Internal)?;
            lp.check_ray(ray).map_err(LpError::Internal)
        }
    }
}


#[cfg(test)]
mod route_tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn relation(k: u8) -> Relation {
        match k % 3 {
            0 => Relation::Le,
            1 => Relation::Ge,
            _ => Relation::Eq,
        }
    }

    fn program(rows: &[(Vec<i64>, u8, i64)], obj: &[i64], maximize: bool, lower: &[bool]) -> LinearProgram {
        let n = obj.len();
        let mut lp = LinearProgram::new(n);
        for (coeffs, rel, rhs) in rows {
            let dense: Vec<Rational> = coeffs.iter().map(|&a| r(a)).collect();
            lp.add(Constraint::dense(&dense, relation(*rel), r(*rhs)));
        }
        for (v, &l) in lower.iter().enumerate() {
            if l {
                lp.set_lower(v, r(0));
            }
        }
        let c: Vec<Rational> = obj.iter().map(|&a| r(a)).collect();
        if maximize {
            lp.maximize(c);
        } else {
            lp.minimize(c);
        }
        lp
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        #[test]
        fn guided_and_cold_routes_agree(
            rows in prop::collection::vec(
                (prop::collection::vec(-3i64..=3, 3), 0u8..3, -4i64..=4), 1..6),
            obj in prop::collection::vec(-3i64..=3, 3),
            maximize in any::<bool>(),
            lower in prop::collection::vec(any::<bool>(), 3),
        ) {
            let lp = program(&rows, &obj, maximize, &lower);
            let guided = simplex::solve_validated(&lp).unwrap();
            let cold = simplex::solve_cold(&lp).unwrap();
            verify_outcome(&lp, &guided).unwrap();
            verify_outcome(&lp, &cold).unwrap();
            match (&guided, &cold) {
                (LpOutcome::Optimal { value: a, .. }, LpOutcome::Optimal { value: b, .. }) => {
                    prop_assert_eq!(a, b)
                }
                (LpOutcome::Infeasible(_), LpOutcome::Infeasible(_))
                | (LpOutcome::Unbounded { .. }, LpOutcome::Unbounded { .. }) => {}
                other => prop_assert!(false, "routes disagree: {:?}", other),
            }
        }
    }

    #[test]
    fn cold_route_handles_degenerate_cycling_example() {
        let q = |a: i64, b: i64| Rational::new(a.into(), b.into());
        let mut lp = LinearProgram::new(4);
        lp.minimize(vec![q(-3, 4), r(150), q(-1, 50), r(6)]);
        lp.add(Constraint::dense(&[q(1, 4), r(-60), q(-1, 25), r(9)], Relation::Le, r(0)));
        lp.add(Constraint::dense(&[q(1, 2), r(-90), q(-1, 50), r(3)], Relation::Le, r(0)));
        lp.add(Constraint::dense(&[r(0), r(0), r(1), r(0)], Relation::Le, r(1)));
        for v in 0..4 {
            lp.set_lower(v, r(0));
        }
        match simplex::solve_cold(&lp).unwrap() {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, q(-1, 20)),
            other => panic!("expected optimal, got {other:?}"),
        }
    }
}
