
use super::*;
use crate::axioms::{check_condorcet_consistency, check_k_unanimity};
use crate::manip::check_u_sp;
use crate::rational::ratio;
use crate::rules::{Cond, SocialDecisionScheme, F2};
use crate::utility::{Preset, UtilityVector};

fn u(s: &str) -> UtilityVector {
    UtilityVector::parse(s).unwrap()
}

fn q(s: &str) -> Rational {
    rational::parse(s).unwrap()
}

fn must_certify(outcome: &SynthesisOutcome) -> &Infeasibility {
    let inf = outcome.infeasibility().expect("infeasible");
    inf.verify().unwrap();
    assert!(!inf.support().is_empty());
    inf
}

#[test]
fn class_counts() {
    let full = enumerate_profiles(3, 3, ClassMode::Full).unwrap();
    assert_eq!(full.classes.len(), 216);
    let anon = enumerate_profiles(3, 3, ClassMode::Anonymous).unwrap();
    assert_eq!(anon.classes.len(), 56);
    assert_eq!(enumerate_profiles(2, 2, ClassMode::Full).unwrap().classes.len(), 4);
    for (m, n) in [(3, 3), (3, 4), (2, 5), (4, 3)] {
        for mode in [ClassMode::Full, ClassMode::Anonymous, ClassMode::RankBased] {
            let index = enumerate_profiles(m, n, mode).unwrap();
            assert_eq!(index.total_size(), crate::profile::full_profile_count(m, n));
            for e in &index.edges {
                assert!(e.from < index.classes.len() && e.to < index.classes.len());
            }
        }
    }
    assert!(matches!(
        enumerate_profiles_capped(3, 4, ClassMode::Full, 1000),
        Err(Error::Refused { .. })
    ));
}

#[test]
fn rank_based_classes_share_rank_matrices() {
    let index = enumerate_profiles(3, 3, ClassMode::RankBased).unwrap();
    for class in &index.classes {
        let key = class.representative.rank_matrix();
        assert!(class.members.iter().all(|p| p.rank_matrix() == key));
    }
    assert!(index.classes.len() < 56);
}

#[test]
fn simplex_only_leaves_probabilities_free() {
    let p = SynthesisProblem::new(
        3,
        2,
        ClassMode::Anonymous,
        vec![],
        UtilitySet::finite(vec![u("2,1,0")]).unwrap(),
    );
    let solver = BoundSolver::new(&p).unwrap().unwrap();
    // Without axioms a constant rule is feasible, so any coordinate can be 0 or 1.
    let unanimous = solver
        .index()
        .class_of(&Profile::parse_compact("a>b>c; a>b>c").unwrap())
        .unwrap();
    let (lo, hi) = solver.bounds(unanimous, 2).unwrap();
    assert_eq!((lo, hi), (q("0"), q("1")));
}

#[test]
fn condorcet_rule_is_found_for_two_one_zero() {
    let p = SynthesisProblem::new(
        3,
        3,
        ClassMode::Full,
        vec![Axiom::Condorcet],
        UtilitySet::single(u("2,1,0")),
    );
    let out = synthesize(&p).unwrap();
    assert!(out.is_feasible());
    let rule = TableRule::new(out.table().unwrap().clone()).unwrap();
    assert!(check_condorcet_consistency(&rule, 3, 3).unwrap().passed());
}

#[test]
fn rank_based_impossibility_small() {
    let out = certify_rank_based_impossibility(3, 3, 1, &u("3/2,1,0")).unwrap();
    let inf = must_certify(&out);
    assert!(inf
        .support()
        .iter()
        .any(|e| matches!(e.origin, RowOrigin::Strategyproofness { .. })));
    assert!(certify_rank_based_impossibility(3, 5, 1, &u("2,1,0")).is_err());
    let control = synthesize(&rank_based_problem(3, 3, 1, &u("2,1,0"))).unwrap();
    assert!(control.is_feasible());
    let control5 = synthesize(&rank_based_problem(3, 5, 1, &u("2,1,0"))).unwrap();
    assert!(control5.is_feasible());
}

#[test]
fn rank_based_bound_values() {
    let v = u("9,3,2,1,0");
    assert_eq!(rank_based_bound(&v, 1), q("3"));
    assert_eq!(rank_based_bound(&v, 2), q("5"));
    assert_eq!(rank_based_bound(&v, 3), q("6"));
    assert_eq!(rank_based_bound(&v, 4), q("6"));
}

#[test]
fn condorcet_gadgets() {
    for m in [4, 5] {
        for case in [GadgetCase::One, GadgetCase::Two] {
            let (profiles, winners) = condorcet_gadget(m, case).unwrap();
            assert_eq!(profiles[0].condorcet_winner(), None);
            for j in 0..3 {
                assert_eq!(profiles[j + 1].condorcet_winner(), Some(winners[j]));
            }
        }
    }
    let c1 = certify_condorcet_impossibility(4, &u("3,2,1,0")).unwrap();
    assert_eq!(c1.case, GadgetCase::One);
    assert_eq!(c1.winners, vec![None, Some(1), Some(2), Some(0)]);
    must_certify(&c1.outcome);
    let c2 = certify_condorcet_impossibility(4, &u("10,2,1,0")).unwrap();
    assert_eq!(c2.case, GadgetCase::Two);
    assert_eq!(c2.winners, vec![None, Some(2), Some(1), Some(0)]);
    must_certify(&c2.outcome);
    let forced = certify_condorcet_gadget(4, &u("5,2,1,0"), GadgetCase::One).unwrap();
    assert!(forced.outcome.is_feasible());
    assert!(certify_condorcet_impossibility(3, &u("2,1,0")).is_err());
    let c5 = certify_condorcet_impossibility(5, &u("4,3,2,1,0")).unwrap();
    must_certify(&c5.outcome);
}

#[test]
fn forced_case_one_admits_the_uniform_point() {
    // Uniform on x, y, z gives each gadget voter (u1 + u2 + u4) / 3 = 7/3 >= 2.
    let (profiles, _) = condorcet_gadget(4, GadgetCase::One).unwrap();
    let uniform = Lottery::uniform_over(4, &[0, 1, 2]);
    let v = u("5,2,1,0");
    for voter in 0..3 {
        let eu = crate::utility::expected_utility(&uniform, &v, profiles[0].pref(voter)).unwrap();
        assert_eq!(eu, q("7/3"));
    }
}

#[test]
fn expost_impossibility_small() {
    let v = u("9/8,1,0");
    let out = certify_expost_impossibility(3, 3, 1, &q("1/4"), &v).unwrap();
    must_certify(&out);
    let relaxed = synthesize(&expost_problem(3, 3, 1, ratio(2, 3), &v)).unwrap();
    assert!(relaxed.is_feasible());
    assert!(certify_expost_impossibility(3, 3, 1, &q("1/4"), &u("2,1,0")).is_err());
    let out = certify_expost_impossibility(3, 4, 1, &q("1/5"), &u("21/20,1,0")).unwrap();
    must_certify(&out);
}

#[test]
fn two_unanimity_table_for_four_voters() {
    let set = UtilitySet::vertices(vec![u("3/2,1,0"), u("3,1,0")]).unwrap();
    let p = SynthesisProblem::new(
        3,
        4,
        ClassMode::Anonymous,
        vec![Axiom::KUnanimity { k: 1 }],
        set.clone(),
    );
    let out = synthesize(&p).unwrap();
    let table = out.table().expect("feasible").clone();
    let rule = TableRule::new(table).unwrap();
    assert!(check_k_unanimity(&rule, 1, 3, 4).unwrap().passed());
    assert!(check_u_sp(&rule, &set, 3, 4).unwrap().passed());
    assert!(check_u_sp(&F2, &set, 3, 4).unwrap().passed());
    assert!(check_k_unanimity(&F2, 1, 3, 4).unwrap().passed());
}

#[test]
fn condorcet_coordinates_are_pinned_by_equidistant_strategyproofness() {
    let p = SynthesisProblem::new(
        3,
        3,
        ClassMode::Full,
        vec![Axiom::Condorcet],
        UtilitySet::preset(Preset::Equidistant, 3).unwrap(),
    );
    let solver = BoundSolver::new(&p).unwrap().unwrap();
    let bounds = solver.all_bounds().unwrap();
    let index = solver.index();
    for (c, class) in index.classes.iter().enumerate() {
        let r = &class.representative;
        let expected = Cond.evaluate(r).unwrap();
        for x in 0..3 {
            let (lo, hi) = &bounds[c * 3 + x];
            assert_eq!(lo, expected.prob(x), "{r} {x}");
            assert_eq!(hi, expected.prob(x), "{r} {x}");
        }
    }
}

#[test]
fn conflicting_pins_are_certified() {
    // Condorcet consistency and ex post efficiency agree; Condorcet
    // consistency and a constant requirement on a dominated alternative do not.
    let list = vec![Profile::parse_compact("a>b>c; a>c>b; b>a>c").unwrap()];
    let mut p = SynthesisProblem::new(
        3,
        3,
        ClassMode::Full,
        vec![Axiom::Condorcet, Axiom::KAlphaUnanimity { k: 3, alpha: q("1/2") }],
        UtilitySet::single(u("2,1,0")),
    );
    p.profiles = Some(list);
    let out = synthesize(&p).unwrap();
    must_certify(&out);
}

#[test]
fn problems_round_trip() {
    let p = expost_problem(3, 3, 1, q("11/12"), &u("9/8,1,0"));
    let json = serde_json::to_string(&p).unwrap();
    assert_eq!(SynthesisProblem::from_json(&json).unwrap(), p);
    let bad = r#"{"m":3,"n":3,"axioms":[{"name":"anonymity"}],"utility":{"kind":"finite","vectors":[["2","1","0"]]}}"#;
    let p = SynthesisProblem::from_json(bad).unwrap();
    assert!(synthesize(&p).is_err());
}
