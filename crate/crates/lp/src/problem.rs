use std::fmt;

use num_traits::{Signed, Zero};

use crate::{LpError, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        })
    }
}

/// A single linear constraint `sum(coeff * x[var]) <relation> rhs`.
///
/// Terms are kept sorted by variable with duplicates merged and zero
/// coefficients removed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub terms: Vec<(usize, Rational)>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn new(terms: Vec<(usize, Rational)>, relation: Relation, rhs: Rational) -> Self {
        let mut terms = terms;
        terms.sort_by_key(|(v, _)| *v);
        let mut merged: Vec<(usize, Rational)> = Vec::with_capacity(terms.len());
        for (var, coeff) in terms {
            match merged.last_mut() {
                Some((last, acc)) if *last == var => *acc += coeff,
                _ => merged.push((var, coeff)),
            }
        }
        merged.retain(|(_, c)| !c.is_zero());
        Constraint {
            terms: merged,
            relation,
            rhs,
        }
    }

    /// Builds a constraint from a dense coefficient vector.
    pub fn dense(coeffs: &[Rational], relation: Relation, rhs: Rational) -> Self {
        Self::new(
            coeffs.iter().cloned().enumerate().collect(),
            relation,
            rhs,
        )
    }

    pub fn lhs(&self, point: &[Rational]) -> Rational {
        self.terms
            .iter()
            .fold(Rational::zero(), |acc, (v, c)| acc + c * &point[*v])
    }

    pub fn is_satisfied_by(&self, point: &[Rational]) -> bool {
        let lhs = self.lhs(point);
        match self.relation {
            Relation::Le => lhs <= self.rhs,
            Relation::Eq => lhs == self.rhs,
            Relation::Ge => lhs >= self.rhs,
        }
    }

    /// Amount by which `point` violates the constraint (zero if satisfied).
    pub fn violation(&self, point: &[Rational]) -> Rational {
        let lhs = self.lhs(point);
        let diff = &lhs - &self.rhs;
        match self.relation {
            Relation::Le if diff.is_positive() => diff,
            Relation::Ge if diff.is_negative() => -diff,
            Relation::Eq => diff.abs(),
            _ => Rational::zero(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Objective {
    pub direction: Direction,
    pub coeffs: Vec<Rational>,
}

/// A linear program over `num_vars` real variables.
///
/// Variables are free unless a lower or upper bound is set.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    num_vars: usize,
    objective: Option<Objective>,
    pub constraints: Vec<Constraint>,
    lower: Vec<Option<Rational>>,
    upper: Vec<Option<Rational>>,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            num_vars,
            objective: None,
            constraints: Vec::new(),
            lower: vec![None; num_vars],
            upper: vec![None; num_vars],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn objective(&self) -> Option<&Objective> {
        self.objective.as_ref()
    }

    pub fn maximize(&mut self, coeffs: Vec<Rational>) {
        self.objective = Some(Objective {
            direction: Direction::Maximize,
            coeffs,
        });
    }

    pub fn minimize(&mut self, coeffs: Vec<Rational>) {
        self.objective = Some(Objective {
            direction: Direction::Minimize,
            coeffs,
        });
    }

    pub fn clear_objective(&mut self) {
        self.objective = None;
    }

    pub fn add(&mut self, constraint: Constraint) -> usize {
        self.constraints.push(constraint);
        self.constraints.len() - 1
    }

    pub fn set_lower(&mut self, var: usize, bound: Rational) {
        self.lower[var] = Some(bound);
    }

    pub fn set_upper(&mut self, var: usize, bound: Rational) {
        self.upper[var] = Some(bound);
    }

    pub fn lower(&self, var: usize) -> Option<&Rational> {
        self.lower[var].as_ref()
    }

    pub fn upper(&self, var: usize) -> Option<&Rational> {
        self.upper[var].as_ref()
    }

    pub(crate) fn validate(&self) -> Result<(), LpError> {
        if let Some(obj) = &self.objective {
            if obj.coeffs.len() != self.num_vars {
                return Err(LpError::ObjectiveLength {
                    got: obj.coeffs.len(),
                    expected: self.num_vars,
                });
            }
        }
        if self.lower.len() != self.num_vars || self.upper.len() != self.num_vars {
            return Err(LpError::BoundLength {
                got: self.lower.len().min(self.upper.len()),
                expected: self.num_vars,
            });
        }
        for (row, c) in self.constraints.iter().enumerate() {
            if let Some((var, _)) = c.terms.iter().find(|(v, _)| *v >= self.num_vars) {
                return Err(LpError::VariableOutOfRange {
                    row,
                    var: *var,
                    num_vars: self.num_vars,
                });
            }
        }
        Ok(())
    }

    /// Objective value at `point` in the program's own direction; zero when
    /// no objective is set.
    pub fn objective_value(&self, point: &[Rational]) -> Rational {
        match &self.objective {
            None => Rational::zero(),
            Some(obj) => obj
                .coeffs
                .iter()
                .zip(point)
                .fold(Rational::zero(), |acc, (c, x)| acc + c * x),
        }
    }

    /// Exact feasibility check of a candidate point.
    pub fn check_point(&self, point: &[Rational]) -> Result<(), String> {
        if point.len() != self.num_vars {
            return Err(format!(
                "point has {} entries, expected {}",
                point.len(),
                self.num_vars
            ));
        }
        for (v, x) in point.iter().enumerate() {
            if let Some(l) = &self.lower[v] {
                if x < l {
                    return Err(format!("variable {v} = {x} below lower bound {l}"));
                }
            }
            if let Some(u) = &self.upper[v] {
                if x > u {
                    return Err(format!("variable {v} = {x} above upper bound {u}"));
                }
            }
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if !c.is_satisfied_by(point) {
                return Err(format!(
                    "constraint {i} violated: lhs {} {} {}",
                    c.lhs(point),
                    c.relation,
                    c.rhs
                ));
            }
        }
        Ok(())
    }

    /// Checks that `ray` is a recession direction of the feasible region that
    /// strictly improves the objective.
    pub fn check_ray(&self, ray: &[Rational]) -> Result<(), String> {
        if ray.len() != self.num_vars {
            return Err(format!("ray has {} entries", ray.len()));
        }
        for (v, d) in ray.iter().enumerate() {
            if self.lower[v].is_some() && d.is_negative() {
                return Err(format!("ray decreases lower-bounded variable {v}"));
            }
            if self.upper[v].is_some() && d.is_positive() {
                return Err(format!("ray increases upper-bounded variable {v}"));
            }
        }
        for (i, c) in self.constraints.iter().enumerate() {
            let lhs = c.lhs(ray);
            let ok = match c.relation {
                Relation::Le => !lhs.is_positive(),
                Relation::Ge => !lhs.is_negative(),
                Relation::Eq => lhs.is_zero(),
            };
            if !ok {
                return Err(format!("ray leaves constraint {i}"));
            }
        }
        let gain = self.objective_value(ray);
        let improves = match self.objective.as_ref().map(|o| o.direction) {
            Some(Direction::Maximize) => gain.is_positive(),
            Some(Direction::Minimize) => gain.is_negative(),
            None => false,
        };
        if !improves {
            return Err("ray does not improve the objective".into());
        }
        Ok(())
    }
}
