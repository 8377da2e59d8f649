use num_traits::{Signed, Zero};

use crate::{LinearProgram, Rational, Relation};

/// Farkas certificate of infeasibility.
///
/// With `y = rows`, `lambda = lower`, `mu = upper` the certificate asserts
///
/// ```text
/// sum_i y_i a_i - lambda + mu = 0
/// sum_i y_i b_i - lambda . l + mu . u < 0
/// ```
///
/// where `y_i >= 0` on `<=` rows, `y_i <= 0` on `>=` rows, `y_i` is free on
/// equalities, and `lambda, mu >= 0` are only non-zero on variables that carry
/// the corresponding bound. Summing the scaled constraints then yields
/// `0 <= negative`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FarkasCertificate {
    pub rows: Vec<Rational>,
    pub lower: Vec<Rational>,
    pub upper: Vec<Rational>,
}

impl FarkasCertificate {
    /// The right-hand side of the combined inequality; negative for a valid
    /// certificate.
    pub fn combined_rhs(&self, lp: &LinearProgram) -> Rational {
        let mut total = Rational::zero();
        for (y, c) in self.rows.iter().zip(&lp.constraints) {
            if !y.is_zero() {
                total += y * &c.rhs;
            }
        }
        for v in 0..lp.num_vars() {
            if let Some(l) = lp.lower(v) {
                total -= &self.lower[v] * l;
            }
            if let Some(u) = lp.upper(v) {
                total += &self.upper[v] * u;
            }
        }
        total
    }

    /// Pure-arithmetic check of the Farkas conditions against `lp`.
    pub fn verify(&self, lp: &LinearProgram) -> Result<(), String> {
        let n = lp.num_vars();
        if self.rows.len() != lp.constraints.len() {
            return Err(format!(
                "certificate has {} row multipliers for {} constraints",
                self.rows.len(),
                lp.constraints.len()
            ));
        }
        if self.lower.len() != n || self.upper.len() != n {
            return Err("certificate bound multipliers have wrong length".into());
        }
        let mut combo = vec![Rational::zero(); n];
        for (i, (y, c)) in self.rows.iter().zip(&lp.constraints).enumerate() {
            let sign_ok = match c.relation {
                Relation::Le => !y.is_negative(),
                Relation::Ge => !y.is_positive(),
                Relation::Eq => true,
            };
            if !sign_ok {
                return Err(format!("multiplier {y} on row {i} has the wrong sign"));
            }
            if y.is_zero() {
                continue;
            }
            for (v, a) in &c.terms {
                combo[*v] += y * a;
            }
        }
        for v in 0..n {
            let (lam, mu) = (&self.lower[v], &self.upper[v]);
            if lam.is_negative() || mu.is_negative() {
                return Err(format!("negative bound multiplier on variable {v}"));
            }
            if lp.lower(v).is_none() && !lam.is_zero() {
                return Err(format!("lower multiplier on unbounded variable {v}"));
            }
            if lp.upper(v).is_none() && !mu.is_zero() {
                return Err(format!("upper multiplier on unbounded variable {v}"));
            }
            let total = &combo[v] - lam + mu;
            if !total.is_zero() {
                return Err(format!("combined coefficient of variable {v} is {total}"));
            }
        }
        let rhs = self.combined_rhs(lp);
        if !rhs.is_negative() {
            return Err(format!("combined right-hand side {rhs} is not negative"));
        }
        Ok(())
    }

    /// Indices of constraints with a non-zero multiplier.
    pub fn support(&self) -> Vec<usize> {
        self.rows
            .iter()
            .enumerate()
            .filter(|(_, y)| !y.is_zero())
            .map(|(i, _)| i)
            .collect()
    }
}
