//! Acceptance battery. Prints one line per criterion and exits non-zero if
//! any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::Instant;

use serde_json::Value;
use usp_cli::payload::{certificate_json, program_json, replay_infeasibility};
use usp_cli::threshold_table;
use usp_core::axioms::{
    check_anonymity, check_ex_post_efficiency, check_k_alpha_unanimity, check_k_unanimity,
    check_neutrality, check_rank_basedness, Axiom,
};
use usp_core::manip::{check_u_pi_sp, check_u_sp, gain, sp_boundary, Deviation, SpOptions};
use usp_core::profile::all_preferences;
use usp_core::rational::{int, parse, ratio};
use usp_core::rules::{ClassMode, Cond, Mix, OmniStar, Rd, RdK, SubsetLift, TableRule, Uniform, F1, F2, F3};
use usp_core::synth::{
    certify_condorcet_impossibility, certify_expost_impossibility, certify_rank_based_impossibility,
    expost_problem, rank_based_problem, synthesize, BoundSolver, GadgetCase, Infeasibility,
    SynthesisOutcome, SynthesisProblem,
};
use usp_core::{
    expected_utility, Lottery, Preference, Preset, Profile, Rational, Rule, SocialDecisionScheme,
    UtilitySet, UtilityVector,
};
use usp_lp::{LinearProgram, Relation};

type Check = fn() -> Result<String, String>;

fn u(s: &str) -> UtilityVector {
    UtilityVector::parse(s).unwrap()
}

fn q(s: &str) -> Rational {
    parse(s).unwrap()
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn ok<T, E: std::fmt::Display>(r: std::result::Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

/// Every profile of `n` voters over `m` alternatives, in mixed-radix order,
/// keeping every `stride`-th one.
fn profiles(m: usize, n: usize, stride: usize) -> Vec<Profile> {
    let prefs = all_preferences(m);
    let total = prefs.len().pow(n as u32);
    (0..total)
        .step_by(stride)
        .map(|mut idx| {
            let mut voters = Vec::with_capacity(n);
            for _ in 0..n {
                voters.push(prefs[idx % prefs.len()].clone());
                idx /= prefs.len();
            }
            Profile::new(voters).unwrap()
        })
        .collect()
}

/// Pairwise-majority winner computed from scratch.
fn majority_winner(p: &Profile) -> Option<usize> {
    let m = p.m();
    (0..m).find(|&x| {
        (0..m).filter(|&y| y != x).all(|y| {
            let wins = p.prefs().iter().filter(|r| r.prefers(x, y)).count();
            2 * wins > p.n()
        })
    })
}

/// Infeasibility check that never reads the bound multipliers: the row
/// combination `c.x <= d` must be violated by every point of the box.
fn box_refutes(lp: &LinearProgram, rows: &[Rational]) -> Result<(), String> {
    let zero = int(0);
    let mut c = vec![int(0); lp.num_vars()];
    let mut d = int(0);
    for (y, row) in rows.iter().zip(&lp.constraints) {
        let sign_ok = match row.relation {
            Relation::Le => *y >= zero,
            Relation::Ge => *y <= zero,
            Relation::Eq => true,
        };
        ensure(sign_ok, "row multiplier with the wrong sign")?;
        for (v, a) in &row.terms {
            c[*v] += y * a;
        }
        d += y * &row.rhs;
    }
    let mut least = int(0);
    for (v, cv) in c.iter().enumerate() {
        if *cv > zero {
            least += cv * lp.lower(v).ok_or("unbounded below")?;
        } else if *cv < zero {
            least += cv * lp.upper(v).ok_or("unbounded above")?;
        }
    }
    ensure(least > d, format!("box minimum {least} does not exceed {d}"))
}

fn certified(out: &SynthesisOutcome) -> Result<&Infeasibility, String> {
    let inf = out.infeasibility().ok_or("expected an infeasible outcome")?;
    ok(inf.verify())?;
    box_refutes(&inf.program, &inf.certificate.rows)?;
    let doc = serde_json::json!({
        "program": program_json(&inf.program),
        "certificate": certificate_json(&inf.certificate),
    });
    let text = doc.to_string();
    ok(replay_infeasibility(&ok(serde_json::from_str::<Value>(&text))?))?;
    Ok(inf)
}

fn c1_expected_utilities() -> Result<String, String> {
    let r1 = ok(Profile::parse_compact("a>b>c; b>c>a; c>a>b"))?;
    let r2 = ok(Profile::parse_compact("b>a>c; b>c>a; c>a>b"))?;
    let at_r1 = ok(Rd.evaluate(&r1))?;
    let at_r2 = ok(Cond.evaluate(&r2))?;
    ensure(at_r1 == Lottery::uniform(3), "rd is not uniform on R1")?;
    ensure(at_r2 == Lottery::point(3, 1), "cond does not pick b on R2")?;
    let pref = ok(Preference::parse("a>b>c"))?;
    let eu = |l: &Lottery, v: &str| expected_utility(l, &u(v), &pref).unwrap();
    let got = [
        eu(&at_r1, "2,1,0"),
        eu(&at_r2, "2,1,0"),
        eu(&at_r1, "3,1,0"),
        eu(&at_r2, "3,1,0"),
        eu(&at_r1, "3,2,0"),
        eu(&at_r2, "3,2,0"),
    ];
    let want = [int(1), int(1), ratio(4, 3), int(1), ratio(5, 3), int(2)];
    ensure(got == want, format!("expected utilities {got:?}"))?;
    Ok("u1: 1 = 1, u2: 4/3 > 1, u3: 5/3 < 2".into())
}

fn c2_rd_k_boundary() -> Result<String, String> {
    let mut notes = Vec::new();
    for (m, n, k) in [(3, 3, 1), (3, 5, 1), (3, 5, 2), (4, 5, 1), (5, 5, 2)] {
        let tail: Vec<Rational> = (0..m - 1).rev().map(|i| int(i as i64)).collect();
        let u2 = tail[0].clone();
        let boundary = &u2 + int(k as i64) * &u2;
        let with_top = |top: Rational| {
            let mut v = vec![top];
            v.extend(tail.iter().cloned());
            UtilityVector::new(v).unwrap()
        };
        let f = RdK { k };
        let at = ok(check_u_pi_sp(&f, &with_top(boundary.clone()), m, n))?;
        ensure(at.passed(), format!("rd_k({k}) fails at {boundary} for m={m} n={n}"))?;
        let below = &boundary - ratio(1, 10);
        let under = ok(check_u_pi_sp(&f, &with_top(below.clone()), m, n))?;
        let w = under
            .witness()
            .ok_or(format!("rd_k({k}) passes below {boundary} for m={m} n={n}"))?;
        ensure(ok(w.replays(&f))?, "witness does not replay")?;
        notes.push(format!("({m},{n},{k})@{boundary}"));
    }
    let r = ok(check_u_pi_sp(&RdK { k: 1 }, &u("19/10,1,0"), 3, 3))?;
    let w = r.witness().ok_or("no witness at 19/10")?;
    let g = ok(gain(&RdK { k: 1 }, &w.deviation, &u("19/10,1,0")))?;
    ensure(g == ratio(1, 30), format!("gain {g}"))?;
    Ok(format!("{}; gain at 19/10 is 1/30", notes.join(" ")))
}

fn c3_omni_star() -> Result<String, String> {
    ensure(ok(check_u_pi_sp(&OmniStar, &u("9,3,2,1,0"), 5, 5))?.passed(), "fails at 9")?;
    let r = ok(check_u_pi_sp(&OmniStar, &u("89/10,3,2,1,0"), 5, 5))?;
    ensure(!r.passed(), "passes at 89/10")?;
    let b = ok(sp_boundary(&OmniStar, &[int(3), int(2), int(1), int(0)], 5, 5))?;
    ensure(b.threshold == int(9) && b.attained, format!("boundary {}", b.threshold))?;
    Ok("pass at 9, witness at 89/10, boundary 9".into())
}

fn c4_threshold_table() -> Result<String, String> {
    let tail = [int(3), int(2), int(1), int(0)];
    let t = ok(threshold_table(5, &tail, 11, 3, &SpOptions::default()))?;
    let get = |name: &str| {
        t.rows
            .iter()
            .find(|r| r.rule == name)
            .map(|r| r.boundary.clone())
            .ok_or(format!("missing row {name}"))
    };
    let (a, b, c) = (get("rd_k:k=1")?, get("rd_k:k=2")?, get("omni_star")?);
    ensure(a == int(6) && b == int(9) && c == int(9), format!("{a} {b} {c}"))?;
    Ok(format!("RD1 {a}, RD2 {b}, OMNI* {c}"))
}

fn c5_rank_based() -> Result<String, String> {
    let out = ok(certify_rank_based_impossibility(3, 3, 1, &u("3/2,1,0")))?;
    let inf = certified(&out)?;
    let control = ok(synthesize(&rank_based_problem(3, 3, 1, &u("2,1,0"))))?;
    ensure(control.is_feasible(), "control is infeasible")?;
    let f = RdK { k: 1 };
    ensure(ok(check_u_pi_sp(&f, &u("2,1,0"), 3, 3))?.passed(), "rd_k(1) not admissible")?;
    ensure(ok(check_k_unanimity(&f, 1, 3, 3))?.passed(), "rd_k(1) not 1-unanimous")?;
    ensure(ok(check_rank_basedness(&f, 3, 3))?.passed(), "rd_k(1) not rank-based")?;
    Ok(format!(
        "infeasible, certificate on {} rows; control feasible",
        inf.certificate.support().len()
    ))
}

fn c6_gadgets() -> Result<String, String> {
    let mut notes = Vec::new();
    for (v, case, winners) in [
        ("3,2,1,0", GadgetCase::One, [None, Some(1), Some(2), Some(0)]),
        ("10,2,1,0", GadgetCase::Two, [None, Some(2), Some(1), Some(0)]),
    ] {
        let cert = ok(certify_condorcet_impossibility(4, &u(v)))?;
        ensure(cert.case == case, format!("({v}) used {:?}", cert.case))?;
        let recomputed: Vec<Option<usize>> = cert.profiles.iter().map(majority_winner).collect();
        ensure(recomputed == winners, format!("winners {recomputed:?}"))?;
        ensure(cert.winners == winners, format!("reported winners {:?}", cert.winners))?;
        certified(&cert.outcome)?;
        notes.push(format!("({v}) {:?}", cert.case));
    }
    Ok(notes.join(", "))
}

fn c7_cond_equidistant() -> Result<String, String> {
    let set = ok(UtilitySet::preset(Preset::Equidistant, 3))?;
    for n in [3, 4, 5] {
        ensure(ok(check_u_sp(&Cond, &set, 3, n))?.passed(), format!("fails at n={n}"))?;
    }
    Ok("n = 3, 4, 5".into())
}

fn c8_condorcet_bounds() -> Result<String, String> {
    let p = SynthesisProblem::new(
        3,
        3,
        ClassMode::Full,
        vec![Axiom::Condorcet],
        ok(UtilitySet::preset(Preset::Equidistant, 3))?,
    );
    let solver = ok(BoundSolver::new(&p))?.map_err(|_| "infeasible".to_string())?;
    let bounds = ok(solver.all_bounds())?;
    let (mut cycles, mut pinned) = (0, 0);
    for (c, class) in solver.index().classes.iter().enumerate() {
        let r = &class.representative;
        let winner = majority_winner(r);
        for x in 0..3 {
            let want = match winner {
                None => ratio(1, 3),
                Some(w) if w == x => int(1),
                Some(_) => int(0),
            };
            let (lo, hi) = &bounds[c * 3 + x];
            ensure(*lo == want && *hi == want, format!("{r} x={x}: [{lo}, {hi}]"))?;
        }
        if winner.is_some() {
            pinned += 1;
        } else {
            cycles += 1;
        }
    }
    Ok(format!("{cycles} cycle classes at 1/3, {pinned} classes pinned to the winner"))
}

fn c9_expost() -> Result<String, String> {
    let v = u("9/8,1,0");
    certified(&ok(certify_expost_impossibility(3, 3, 1, &q("1/4"), &v))?)?;
    let relaxed = ok(synthesize(&expost_problem(3, 3, 1, ratio(2, 3), &v)))?;
    ensure(relaxed.is_feasible(), "alpha = 2/3 is infeasible")?;
    ensure(ok(check_ex_post_efficiency(&Rd, 3, 3))?.passed(), "rd not ex post")?;
    ensure(ok(check_k_alpha_unanimity(&Rd, 1, &ratio(2, 3), 3, 3))?.passed(), "rd not (1, 2/3)")?;
    ensure(ok(check_u_pi_sp(&Rd, &v, 3, 3))?.passed(), "rd manipulable")?;
    Ok("infeasible at 1/4, feasible at 2/3".into())
}

fn c10_four_voters() -> Result<String, String> {
    let set = ok(UtilitySet::vertices(vec![u("3/2,1,0"), u("3,1,0")]))?;
    ensure(ok(check_u_sp(&F2, &set, 3, 4))?.passed(), "f2 manipulable")?;
    ensure(ok(check_k_unanimity(&F2, 1, 3, 4))?.passed(), "f2 not 1-unanimous")?;
    let p = SynthesisProblem::new(3, 4, ClassMode::Anonymous, vec![Axiom::KUnanimity { k: 1 }], set.clone());
    let out = ok(synthesize(&p))?;
    let table = out.table().ok_or("synthesis is infeasible")?.clone();
    let rule = ok(TableRule::new(table))?;
    ensure(ok(check_u_sp(&rule, &set, 3, 4))?.passed(), "table manipulable")?;
    ensure(ok(check_k_unanimity(&rule, 1, 3, 4))?.passed(), "table not 1-unanimous")?;
    Ok("f2 and the synthesized table pass".into())
}

fn lottery_ok(l: &Lottery, m: usize) -> bool {
    let zero = int(0);
    l.m() == m && l.probs().iter().all(|p| *p >= zero) && l.probs().iter().sum::<Rational>() == int(1)
}

fn c11_properties() -> Result<String, String> {
    let rules: Vec<(Rule, usize, usize, usize)> = vec![
        (Arc::new(Rd), 3, 3, 1),
        (Arc::new(RdK { k: 1 }), 3, 3, 1),
        (Arc::new(OmniStar), 3, 3, 1),
        (Arc::new(Cond), 3, 3, 1),
        (Arc::new(Uniform), 3, 3, 1),
        (Arc::new(F2), 3, 4, 1),
        (Arc::new(F3), 3, 4, 1),
        (Arc::new(F1), 4, 5, 997),
    ];
    for (f, m, n, stride) in &rules {
        for p in profiles(*m, *n, *stride) {
            ensure(lottery_ok(&ok(f.evaluate(&p))?, *m), format!("{} at {p}", f.name()))?;
        }
    }
    let symmetric: Vec<Rule> = vec![Arc::new(Rd), Arc::new(RdK { k: 1 }), Arc::new(OmniStar), Arc::new(Cond)];
    for f in &symmetric {
        ensure(ok(check_anonymity(f.as_ref(), 3, 3))?.passed(), format!("{} anonymity", f.name()))?;
        ensure(ok(check_neutrality(f.as_ref(), 3, 3))?.passed(), format!("{} neutrality", f.name()))?;
    }
    for f in [&symmetric[0], &symmetric[1]] {
        ensure(ok(check_rank_basedness(f.as_ref(), 3, 3))?.passed(), format!("{} rank", f.name()))?;
    }
    // Symmetric closure on a neutral rule.
    let v = u("2,1,0");
    let finite = ok(check_u_sp(&Cond, &ok(UtilitySet::finite(vec![v.clone()]))?, 3, 3))?.passed();
    ensure(finite == ok(check_u_pi_sp(&Cond, &v, 3, 3))?.passed(), "closure")?;
    // Convexity in the utility.
    let f = RdK { k: 1 };
    let (a, b) = (u("2,1,0"), u("3,1,0"));
    if ok(check_u_pi_sp(&f, &a, 3, 3))?.passed() && ok(check_u_pi_sp(&f, &b, 3, 3))?.passed() {
        ensure(ok(check_u_pi_sp(&f, &u("5/2,1,0"), 3, 3))?.passed(), "midpoint fails")?;
    } else {
        return Err("convexity premise fails".into());
    }
    // Mixtures.
    let rdk_set = ok(UtilitySet::preset(Preset::Rdk { k: int(1) }, 3))?;
    for lambda in ["0", "1/3", "1/2", "2/3", "1"] {
        let h = ok(Mix::new(Arc::new(Rd), Arc::new(RdK { k: 1 }), q(lambda)))?;
        ensure(ok(check_u_sp(&h, &rdk_set, 3, 3))?.passed(), format!("mix {lambda}"))?;
    }
    // SD-strategyproof rules are strategyproof for every set.
    ensure(ok(check_u_sp(&Rd, &ok(UtilitySet::preset(Preset::Sd, 3))?, 3, 3))?.passed(), "rd SD")?;
    ensure(ok(check_u_pi_sp(&Rd, &u("101/100,1,0"), 3, 3))?.passed(), "rd near-indifferent")?;
    // Lifting random dictatorship.
    let lift = ok(SubsetLift::new(Arc::new(Rd), 3, 5))?;
    for p in profiles(3, 5, 7) {
        ensure(ok(lift.evaluate(&p))? == ok(Rd.evaluate(&p))?, format!("lift at {p}"))?;
    }
    // Gain signs survive positive affine maps.
    let dev = ok(Deviation::new(
        ok(Profile::parse_compact("a>b>c; b>a>c; c>a>b"))?,
        0,
        ok(Preference::parse("b>a>c"))?,
    ))?;
    for (v, scale, shift) in [("19/10,1,0", 3, 7), ("2,1,0", 5, -2), ("3,1,0", 1, 100)] {
        let base = u(v);
        let mapped = ok(UtilityVector::new(
            base.values().iter().map(|x| x * int(scale) + int(shift)).collect(),
        ))?;
        let g0 = ok(gain(&f, &dev, &base))?;
        let g1 = ok(gain(&f, &dev, &mapped))?;
        ensure(g1 == &g0 * int(scale), format!("affine gain {g0} vs {g1}"))?;
    }
    Ok("lotteries, symmetry, rank-basedness, closure, convexity, mixtures, SD, lift, affine".into())
}

fn main() {
    let criteria: [(&str, Check); 11] = [
        ("expected utilities on two profiles", c1_expected_utilities),
        ("rd_k boundary", c2_rd_k_boundary),
        ("omni_star boundary", c3_omni_star),
        ("threshold table", c4_threshold_table),
        ("rank-based impossibility", c5_rank_based),
        ("condorcet gadgets", c6_gadgets),
        ("cond under equidistant utilities", c7_cond_equidistant),
        ("condorcet probability bounds", c8_condorcet_bounds),
        ("ex post impossibility", c9_expost),
        ("four-voter 1-unanimous rule", c10_four_voters),
        ("property suites", c11_properties),
    ];
    let only: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        if !only.is_empty() && !only.iter().any(|o| name.contains(o.as_str())) {
            continue;
        }
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail} ({secs:.1}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {why} ({secs:.1}s)", i + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
