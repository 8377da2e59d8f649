use std::sync::Arc;

use super::*;
use crate::profile::{all_preferences, full_profile_at, full_profile_count, Preference};
use crate::rational::{int, ratio, Rational};

fn prof(s: &str) -> Profile {
    Profile::parse_compact(s).unwrap()
}

fn probs(l: &Lottery) -> Vec<Rational> {
    l.probs().to_vec()
}

fn q(pairs: &[(i64, i64)]) -> Vec<Rational> {
    pairs.iter().map(|&(a, b)| ratio(a, b)).collect()
}

/// Profile whose voters have the given favorites; the rest of each order is
/// in index order.
fn tops(m: usize, favorites: &[usize]) -> Profile {
    Profile::new(
        favorites
            .iter()
            .map(|&t| Preference::with_top(m, t))
            .collect(),
    )
    .unwrap()
}

#[test]
fn random_dictatorship() {
    let r1 = prof("a>b>c; b>c>a; c>a>b");
    assert_eq!(probs(&Rd.evaluate(&r1).unwrap()), q(&[(1, 3), (1, 3), (1, 3)]));
    let unanimous = prof("a>b>c; a>c>b");
    assert_eq!(probs(&Rd.evaluate(&unanimous).unwrap()), q(&[(1, 1), (0, 1), (0, 1)]));
    let r = tops(3, &[0, 0, 1, 2, 2]);
    assert_eq!(probs(&Rd.evaluate(&r).unwrap()), q(&[(2, 5), (1, 5), (2, 5)]));
}

#[test]
fn k_unanimous_random_dictatorship() {
    let rdk2 = RdK { k: 2 };
    let r = tops(3, &[0, 0, 0, 1, 2]);
    assert_eq!(rdk2.evaluate(&r).unwrap(), Lottery::point(3, 0));
    // x = a, y = b, z = c.
    let before = prof("a>b>c; c>a>b; b>a>c");
    let rdk1 = RdK { k: 1 };
    assert_eq!(rdk1.evaluate(&before).unwrap(), Lottery::uniform(3));
    let after = before.with_voter(2, Preference::parse("a>b>c").unwrap());
    assert_eq!(rdk1.evaluate(&after).unwrap(), Lottery::point(3, 0));
    assert!(RdK { k: 2 }.evaluate(&tops(3, &[0, 1, 2])).is_err());
    assert!(RdK { k: 0 }.check_domain(3, 5).is_err());
    assert!(RdK { k: 2 }.check_domain(3, 5).is_ok());
}

#[test]
fn omni_majority_rule() {
    assert_eq!(
        OmniStar.evaluate(&tops(3, &[0, 0, 0, 1, 2])).unwrap(),
        Lottery::point(3, 0)
    );
    assert_eq!(
        OmniStar.evaluate(&tops(3, &[0, 0, 1, 1, 2])).unwrap(),
        Lottery::uniform(3)
    );
    assert_eq!(
        probs(&OmniStar.evaluate(&tops(3, &[0, 0, 1, 1])).unwrap()),
        q(&[(1, 2), (1, 2), (0, 1)])
    );
}

#[test]
fn condorcet_rule() {
    assert_eq!(
        Cond.evaluate(&prof("b>a>c; b>c>a; c>a>b")).unwrap(),
        Lottery::point(3, 1)
    );
    assert_eq!(Cond.evaluate(&prof("a>b>c; b>c>a; c>a>b")).unwrap(), Lottery::uniform(3));
    assert_eq!(Cond.evaluate(&prof("a>b>c; c>b>a")).unwrap(), Lottery::uniform(3));
}

#[test]
fn five_voter_hybrid() {
    assert_eq!(
        probs(&F1.evaluate(&tops(4, &[0, 1, 2, 3, 0])).unwrap()),
        q(&[(2, 5), (1, 5), (1, 5), (1, 5)])
    );
    assert_eq!(F1.evaluate(&tops(4, &[0, 0, 0, 1, 1])).unwrap(), Lottery::point(4, 0));
    assert_eq!(
        probs(&F1.evaluate(&tops(4, &[0, 0, 1, 1, 2])).unwrap()),
        q(&[(1, 3), (1, 3), (1, 3), (0, 1)])
    );
    assert!(F1.evaluate(&tops(4, &[0, 1, 2])).is_err());
    assert!(F1.check_domain(3, 5).is_err());
}

#[test]
fn four_voter_rule_cases() {
    // x = a, y = b, z = c.
    let split = prof("a>b>c; a>b>c; b>a>c; c>b>a");
    assert_eq!(probs(&F2.evaluate(&split).unwrap()), q(&[(4, 7), (2, 7), (1, 7)]));
    let second = prof("a>b>c; a>c>b; b>a>c; c>a>b");
    assert_eq!(F2.evaluate(&second).unwrap(), Lottery::point(3, 0));
    let last = prof("a>b>c; a>b>c; b>c>a; c>b>a");
    assert_eq!(probs(&F2.evaluate(&last).unwrap()), q(&[(1, 2), (1, 4), (1, 4)]));
    assert!(F2.check_domain(3, 5).is_err());
}

#[test]
fn four_voter_rule_cases_are_exhaustive() {
    let prefs = all_preferences(3);
    for idx in 0..full_profile_count(3, 4) {
        let r = full_profile_at(&prefs, 4, idx);
        F2.evaluate(&r).unwrap();
    }
}

#[test]
fn half_split_variant() {
    assert_eq!(
        probs(&F3.evaluate(&tops(3, &[0, 0, 1, 1])).unwrap()),
        q(&[(1, 2), (1, 2), (0, 1)])
    );
    assert_eq!(F3.evaluate(&tops(3, &[0, 0, 0, 1])).unwrap(), Lottery::point(3, 0));
    let no_winner = prof("a>b>c; b>c>a; c>a>b; c>b>a");
    assert_eq!(no_winner.condorcet_winner(), None);
    assert_eq!(F3.evaluate(&no_winner).unwrap(), Lottery::uniform(3));
    assert!(F3.check_domain(3, 3).is_err());
}

#[test]
fn mixtures() {
    let r2 = prof("b>a>c; b>c>a; c>a>b");
    let half = Mix::new(Arc::new(Rd), Arc::new(Cond), ratio(1, 2)).unwrap();
    assert_eq!(probs(&half.evaluate(&r2).unwrap()), q(&[(0, 1), (5, 6), (1, 6)]));
    let all_f = Mix::new(Arc::new(Rd), Arc::new(Cond), int(1)).unwrap();
    assert_eq!(all_f.evaluate(&r2).unwrap(), Rd.evaluate(&r2).unwrap());
    let same = Mix::new(Arc::new(Cond), Arc::new(Cond), ratio(2, 7)).unwrap();
    assert_eq!(same.evaluate(&r2).unwrap(), Cond.evaluate(&r2).unwrap());
    assert!(Mix::new(Arc::new(Rd), Arc::new(Cond), ratio(-1, 2)).is_err());
}

#[test]
fn lifting_random_dictatorship_gives_random_dictatorship() {
    let lift = SubsetLift::new(Arc::new(Rd), 3, 5).unwrap();
    let prefs = all_preferences(3);
    for idx in 0..full_profile_count(3, 5) {
        let r = full_profile_at(&prefs, 5, idx);
        assert_eq!(lift.evaluate(&r).unwrap(), Rd.evaluate(&r).unwrap());
    }
    assert!(SubsetLift::new(Arc::new(Rd), 3, 3).is_err());
}

#[test]
fn lifted_hybrid_keeps_majorities() {
    let lift = SubsetLift::new(Arc::new(F1), 5, 7).unwrap();
    let unanimous = tops(4, &[2; 7]);
    assert_eq!(lift.evaluate(&unanimous).unwrap(), Lottery::point(4, 2));
    // Any five of these seven voters include at least three who favor a.
    let r = tops(4, &[0, 1, 0, 2, 0, 0, 0]);
    assert_eq!(lift.evaluate(&r).unwrap(), Lottery::point(4, 0));
}

#[test]
fn dictatorship_average_is_random_dictatorship() {
    // Averaging the voter-1 dictatorship over all relabelings of voters is
    // the same as mixing the three dictators with equal weight.
    let d = |i| -> Rule { Arc::new(Dictator { voter: i }) };
    let inner = Mix::new(d(1), d(2), ratio(1, 2)).unwrap();
    let avg = Mix::new(d(0), Arc::new(inner), ratio(1, 3)).unwrap();
    let prefs = all_preferences(3);
    for idx in 0..full_profile_count(3, 3) {
        let r = full_profile_at(&prefs, 3, idx);
        assert_eq!(avg.evaluate(&r).unwrap(), Rd.evaluate(&r).unwrap());
    }
}

#[test]
fn rd_k_agrees_with_rd_below_threshold() {
    let prefs = all_preferences(3);
    for k in [1, 2] {
        let rule = RdK { k };
        for idx in 0..full_profile_count(3, 5) {
            let r = full_profile_at(&prefs, 5, idx);
            if r.top_counts().iter().all(|&c| c < 5 - k) {
                assert_eq!(rule.evaluate(&r).unwrap(), Rd.evaluate(&r).unwrap());
            }
        }
    }
}

#[test]
fn tables_answer_by_class() {
    let doc = TableDoc {
        m: 2,
        n: 2,
        mode: ClassMode::Anonymous,
        entries: vec![TableEntry {
            profile: prof("a>b; b>a"),
            lottery: Lottery::uniform(2),
        }],
    };
    let t = TableRule::new(doc.clone()).unwrap();
    assert_eq!(t.evaluate(&prof("b>a; a>b")).unwrap(), Lottery::uniform(2));
    assert!(t.evaluate(&prof("a>b; a>b")).is_err());
    let json = serde_json::to_string(&doc).unwrap();
    assert_eq!(TableRule::from_json(&json).unwrap().doc(), &doc);
}
