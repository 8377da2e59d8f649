use usp_core::axioms::{check_condorcet_consistency, check_k_unanimity};
use usp_core::manip::{check_u_pi_sp, check_u_sp, sp_boundary};
use usp_core::rational::{int, ratio};
use usp_core::rules::TableRule;
use usp_core::synth::{synthesize, SynthesisProblem};
use usp_core::{parse_rule, Profile, UtilitySet, UtilityVector};

fn u(s: &str) -> UtilityVector {
    UtilityVector::parse(s).unwrap()
}

#[test]
fn rules_from_names() {
    let (_, p) = Profile::parse_text("alternatives: x y z\n2: x > y > z\n1: z > y > x\n").unwrap();
    let rd = parse_rule("rd").unwrap();
    assert_eq!(rd.evaluate(&p).unwrap().probs(), &[ratio(2, 3), int(0), ratio(1, 3)]);
    let omni = parse_rule("omni_star").unwrap();
    assert_eq!(omni.evaluate(&p).unwrap().probs(), &[int(1), int(0), int(0)]);
    let mix = parse_rule("mix:f=[rd],g=[omni_star],lambda=1/2").unwrap();
    assert_eq!(mix.evaluate(&p).unwrap().probs(), &[ratio(5, 6), int(0), ratio(1, 6)]);
    assert!(parse_rule("borda").is_err());
}

#[test]
fn condorcet_rule_end_to_end() {
    let cond = parse_rule("cond").unwrap();
    assert!(check_condorcet_consistency(cond.as_ref(), 3, 3).unwrap().passed());
    let equidistant = UtilitySet::preset(usp_core::Preset::Equidistant, 3).unwrap();
    assert!(check_u_sp(cond.as_ref(), &equidistant, 3, 3).unwrap().passed());
}

#[test]
fn witnesses_and_boundaries_agree() {
    let f = parse_rule("rd_k:k=1").unwrap();
    let b = sp_boundary(f.as_ref(), &[int(1), int(0)], 3, 3).unwrap();
    assert_eq!(b.threshold, int(2));
    assert!(check_u_pi_sp(f.as_ref(), &u("2,1,0"), 3, 3).unwrap().passed());
    let r = check_u_pi_sp(f.as_ref(), &u("39/20,1,0"), 3, 3).unwrap();
    let w = r.witness().expect("witness below the boundary");
    assert!(w.replays(f.as_ref()).unwrap());
    assert!(w.gain > int(0));
}

#[test]
fn problem_files_synthesize_to_rules() {
    let text = r#"{"m":3,"n":3,"symmetry":"anonymous",
        "axioms":[{"name":"k_unanimity","k":1}],
        "utility":{"kind":"finite","vectors":[["5/2","1","0"]]}}"#;
    let p = SynthesisProblem::from_json(text).unwrap();
    let out = synthesize(&p).unwrap();
    let table = out.table().expect("feasible").clone();
    let rule = TableRule::new(table).unwrap();
    assert!(check_k_unanimity(&rule, 1, 3, 3).unwrap().passed());
    assert!(check_u_pi_sp(&rule, &u("5/2,1,0"), 3, 3).unwrap().passed());

    let tight = text.replace("5/2", "3/2");
    let p = SynthesisProblem::from_json(&tight).unwrap();
    let out = synthesize(&p).unwrap();
    out.infeasibility().expect("infeasible").verify().unwrap();
}
