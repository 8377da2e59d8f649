use std::sync::Arc;

use crate::error::{Error, Result};
use crate::rational;

use super::{
    Cond, Constant, Dictator, Mix, OmniStar, Rd, RdK, Rule, SubsetLift, TableRule, Uniform, F1,
    F2, F3,
};

pub const RULE_NAMES: &str = "rd, rd_k:k=<k>, omni_star, cond, f1, f2, f3, \
    mix:f=[<rule>],g=[<rule>],lambda=<q>, lift:base=<rule>,n=<n>[,from=<n>], \
    dictator:i=<voter>, uniform, constant:x=<alternative>, table:<file>";

/// Splits `a=1,b=[x:y=1,z=2],c=3` at top-level commas.
fn split_params(s: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    let bytes = s.as_bytes();
    for i in 0..=bytes.len() {
        let at_end = i == bytes.len();
        if !at_end {
            match bytes[i] {
                b'[' => depth += 1,
                b']' => depth -= 1,
                _ => {}
            }
            if depth < 0 {
                return Err(Error::parse(format!("unbalanced brackets in `{s}`")));
            }
        }
        if at_end || (bytes[i] == b',' && depth == 0) {
            let part = s[start..i].trim();
            if !part.is_empty() {
                let (k, v) = part
                    .split_once('=')
                    .ok_or_else(|| Error::parse(format!("expected key=value, got `{part}`")))?;
                let v = v.trim();
                let v = v
                    .strip_prefix('[')
                    .and_then(|v| v.strip_suffix(']'))
                    .unwrap_or(v);
                out.push((k.trim().to_string(), v.to_string()));
            }
            start = i + 1;
        }
    }
    if depth != 0 {
        return Err(Error::parse(format!("unbalanced brackets in `{s}`")));
    }
    Ok(out)
}

fn get<'a>(params: &'a [(String, String)], key: &str, rule: &str) -> Result<&'a str> {
    params
        .iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v.as_str())
        .ok_or_else(|| Error::parse(format!("rule `{rule}` needs parameter `{key}`")))
}

fn get_usize(params: &[(String, String)], key: &str, rule: &str) -> Result<usize> {
    get(params, key, rule)?
        .parse()
        .map_err(|_| Error::parse(format!("parameter `{key}` of `{rule}` must be a non-negative integer")))
}

/// Builds a rule from its textual name, e.g. `rd_k:k=2` or
/// `mix:f=[rd],g=[cond],lambda=1/2`.
pub fn parse_rule(spec: &str) -> Result<Rule> {
    let spec = spec.trim();
    let (name, rest) = spec.split_once(':').unwrap_or((spec, ""));
    if name == "table" {
        let text = std::fs::read_to_string(rest)
            .map_err(|e| Error::parse(format!("cannot read table `{rest}`: {e}")))?;
        return Ok(Arc::new(
            TableRule::from_json(&text)?.with_label(format!("table:{rest}")),
        ));
    }
    let params = split_params(rest)?;
    let rule: Rule = match name {
        "rd" => Arc::new(Rd),
        "rd_k" => Arc::new(RdK {
            k: get_usize(&params, "k", name)?,
        }),
        "omni_star" => Arc::new(OmniStar),
        "cond" => Arc::new(Cond),
        "f1" => Arc::new(F1),
        "f2" => Arc::new(F2),
        "f3" => Arc::new(F3),
        "uniform" => Arc::new(Uniform),
        "dictator" => Arc::new(Dictator {
            voter: get_usize(&params, "i", name)?,
        }),
        "constant" => {
            let raw = get(&params, "x", name)?;
            let x = match raw.parse::<usize>() {
                Ok(x) => x,
                Err(_) => match raw.as_bytes() {
                    [c] if c.is_ascii_lowercase() => (c - b'a') as usize,
                    _ => return Err(Error::parse(format!("bad alternative `{raw}`"))),
                },
            };
            Arc::new(Constant { x })
        }
        "mix" => {
            let f = parse_rule(get(&params, "f", name)?)?;
            let g = parse_rule(get(&params, "g", name)?)?;
            let lambda = rational::parse(get(&params, "lambda", name)?)?;
            Arc::new(Mix::new(f, g, lambda)?)
        }
        "lift" => {
            let base = parse_rule(get(&params, "base", name)?)?;
            let to = get_usize(&params, "n", name)?;
            let from = match params.iter().find(|(k, _)| k == "from") {
                Some(_) => get_usize(&params, "from", name)?,
                None => base.fixed_n().ok_or_else(|| {
                    Error::parse(format!(
                        "lift of `{}` needs `from=<voters>`",
                        base.name()
                    ))
                })?,
            };
            Arc::new(SubsetLift::new(base, from, to)?)
        }
        other => {
            return Err(Error::parse(format!(
                "unknown rule `{other}`; valid rules: {RULE_NAMES}"
            )))
        }
    };
    Ok(rule)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_nested_names() {
        assert_eq!(parse_rule("rd").unwrap().name(), "rd");
        assert_eq!(parse_rule("rd_k:k=2").unwrap().name(), "rd_k:k=2");
        let mix = parse_rule("mix:f=[rd],g=[mix:f=[cond],g=[rd_k:k=1],lambda=1/3],lambda=1/2")
            .unwrap();
        assert_eq!(
            mix.name(),
            "mix:f=[rd],g=[mix:f=[cond],g=[rd_k:k=1],lambda=1/3],lambda=1/2"
        );
        let lift = parse_rule("lift:base=f1,n=7").unwrap();
        assert_eq!(lift.fixed_n(), Some(7));
        assert!(parse_rule("lift:base=rd,n=5").is_err());
        assert!(parse_rule("lift:base=rd,from=3,n=5").is_ok());
        assert!(parse_rule("lift:base=dictator:i=0,from=2,n=3").is_err());
        assert_eq!(parse_rule("constant:x=b").unwrap().name(), "constant:x=1");
    }

    #[test]
    fn reports_valid_names() {
        let err = parse_rule("borda").unwrap_err().to_string();
        assert!(err.contains("omni_star"), "{err}");
        assert!(parse_rule("rd_k").is_err());
        assert!(parse_rule("mix:f=[rd],g=[cond],lambda=3/2").is_err());
        assert!(parse_rule("mix:f=[rd,g=[cond],lambda=1").is_err());
    }
}
