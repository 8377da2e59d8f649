//! JSON forms of certificates and programs, so an infeasible report can be
//! re-checked without this tool's solver.

use serde_json::{json, Value};
use usp_core::rational;
use usp_core::synth::Infeasibility;
use usp_core::{Error, Rational, Result};
use usp_lp::{Constraint, FarkasCertificate, LinearProgram, Relation};

fn q(r: &Rational) -> Value {
    Value::String(r.to_string())
}

fn qs(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(q).collect())
}

fn relation_name(r: Relation) -> &'static str {
    match r {
        Relation::Le => "le",
        Relation::Ge => "ge",
        Relation::Eq => "eq",
    }
}

pub fn program_json(lp: &LinearProgram) -> Value {
    let constraints: Vec<Value> = lp
        .constraints
        .iter()
        .map(|c| {
            json!({
                "terms": c.terms.iter().map(|(v, a)| json!([v, q(a)])).collect::<Vec<_>>(),
                "relation": relation_name(c.relation),
                "rhs": q(&c.rhs),
            })
        })
        .collect();
    let bound = |b: Option<&Rational>| b.map(q).unwrap_or(Value::Null);
    json!({
        "num_vars": lp.num_vars(),
        "constraints": constraints,
        "lower": (0..lp.num_vars()).map(|v| bound(lp.lower(v))).collect::<Vec<_>>(),
        "upper": (0..lp.num_vars()).map(|v| bound(lp.upper(v))).collect::<Vec<_>>(),
    })
}

pub fn certificate_json(cert: &FarkasCertificate) -> Value {
    json!({
        "rows": qs(&cert.rows),
        "lower": qs(&cert.lower),
        "upper": qs(&cert.upper),
    })
}

/// Certificate, the program it refers to, and the meaning of its support.
pub fn infeasibility_json(inf: &Infeasibility) -> Value {
    json!({
        "verified": inf.verify().is_ok(),
        "support": serde_json::to_value(inf.support()).expect("support serializes"),
        "certificate": certificate_json(&inf.certificate),
        "program": program_json(&inf.program),
    })
}

fn bad(what: &str) -> Error {
    Error::parse(format!("certificate payload: {what}"))
}

fn rat(v: &Value) -> Result<Rational> {
    rational::parse(v.as_str().ok_or_else(|| bad("expected a rational string"))?)
}

fn rats(v: &Value) -> Result<Vec<Rational>> {
    v.as_array().ok_or_else(|| bad("expected an array"))?.iter().map(rat).collect()
}

pub fn program_from_json(v: &Value) -> Result<LinearProgram> {
    let n = v["num_vars"].as_u64().ok_or_else(|| bad("num_vars"))? as usize;
    let mut lp = LinearProgram::new(n);
    for c in v["constraints"].as_array().ok_or_else(|| bad("constraints"))? {
        let terms = c["terms"]
            .as_array()
            .ok_or_else(|| bad("terms"))?
            .iter()
            .map(|t| {
                let var = t[0].as_u64().ok_or_else(|| bad("term variable"))? as usize;
                Ok((var, rat(&t[1])?))
            })
            .collect::<Result<Vec<_>>>()?;
        let relation = match c["relation"].as_str() {
            Some("le") => Relation::Le,
            Some("ge") => Relation::Ge,
            Some("eq") => Relation::Eq,
            _ => return Err(bad("relation")),
        };
        lp.add(Constraint::new(terms, relation, rat(&c["rhs"])?));
    }
    for (key, upper) in [("lower", false), ("upper", true)] {
        if let Some(list) = v[key].as_array() {
            for (var, b) in list.iter().enumerate() {
                if b.is_null() {
                    continue;
                }
                if upper {
                    lp.set_upper(var, rat(b)?);
                } else {
                    lp.set_lower(var, rat(b)?);
                }
            }
        }
    }
    Ok(lp)
}

/// Re-checks an `infeasibility_json` payload by arithmetic alone.
pub fn replay_infeasibility(v: &Value) -> Result<()> {
    let lp = program_from_json(&v["program"])?;
    let c = &v["certificate"];
    let cert = FarkasCertificate {
        rows: rats(&c["rows"])?,
        lower: rats(&c["lower"])?,
        upper: rats(&c["upper"])?,
    };
    cert.verify(&lp).map_err(|e| Error::Internal(format!("certificate does not verify: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use usp_core::rational::int;

    #[test]
    fn program_round_trips() {
        let mut lp = LinearProgram::new(2);
        lp.add(Constraint::new(vec![(0, int(1)), (1, rational::ratio(1, 3))], Relation::Ge, int(2)));
        lp.set_lower(0, int(0));
        lp.set_upper(1, int(1));
        let back = program_from_json(&program_json(&lp)).unwrap();
        assert_eq!(program_json(&back), program_json(&lp));
    }

    #[test]
    fn tampered_certificate_is_rejected() {
        // x >= 1 and x <= 0.
        let mut lp = LinearProgram::new(1);
        lp.add(Constraint::new(vec![(0, int(1))], Relation::Ge, int(1)));
        lp.add(Constraint::new(vec![(0, int(1))], Relation::Le, int(0)));
        let cert = usp_lp::solve(&lp).unwrap().certificate().unwrap().clone();
        let mut v = json!({"program": program_json(&lp), "certificate": certificate_json(&cert)});
        replay_infeasibility(&v).unwrap();
        v["certificate"]["rows"][0] = json!("0");
        assert!(replay_infeasibility(&v).is_err());
    }
}
