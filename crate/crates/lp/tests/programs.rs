use num_bigint::BigInt;
use usp_lp::{
    solve, solve_lazy, solve_lazy_seeded, verify_outcome, Constraint, LinearProgram, LpOutcome, Rational,
    Relation,
};

fn q(a: i64, b: i64) -> Rational {
    Rational::new(BigInt::from(a), BigInt::from(b))
}

fn row(coeffs: &[i64], relation: Relation, rhs: i64) -> Constraint {
    let c: Vec<Rational> = coeffs.iter().map(|&a| q(a, 1)).collect();
    Constraint::dense(&c, relation, q(rhs, 1))
}

fn nonnegative(n: usize) -> LinearProgram {
    let mut lp = LinearProgram::new(n);
    for v in 0..n {
        lp.set_lower(v, q(0, 1));
    }
    lp
}

#[test]
fn textbook_maximum() {
    let mut lp = nonnegative(2);
    lp.add(row(&[1, 0], Relation::Le, 4));
    lp.add(row(&[0, 2], Relation::Le, 12));
    lp.add(row(&[3, 2], Relation::Le, 18));
    lp.maximize(vec![q(3, 1), q(5, 1)]);
    match solve(&lp).unwrap() {
        LpOutcome::Optimal { value, point } => {
            assert_eq!(value, q(36, 1));
            assert_eq!(point, vec![q(2, 1), q(6, 1)]);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn fractional_vertex() {
    let mut lp = nonnegative(2);
    lp.add(row(&[3, 1], Relation::Le, 1));
    lp.add(row(&[1, 3], Relation::Le, 1));
    lp.maximize(vec![q(1, 1), q(1, 1)]);
    let out = solve(&lp).unwrap();
    verify_outcome(&lp, &out).unwrap();
    assert_eq!(out.point().unwrap(), &[q(1, 4), q(1, 4)]);
}

#[test]
fn infeasible_simplex_slice() {
    // A lottery over three alternatives with each probability at least 2/5.
    let mut lp = nonnegative(3);
    lp.add(row(&[1, 1, 1], Relation::Eq, 1));
    for v in 0..3 {
        lp.add(Constraint::new(vec![(v, q(1, 1))], Relation::Ge, q(2, 5)));
    }
    let out = solve(&lp).unwrap();
    let cert = out.certificate().expect("infeasible");
    cert.verify(&lp).unwrap();
    assert!(cert.combined_rhs(&lp) < q(0, 1));
}

#[test]
fn unbounded_direction() {
    let mut lp = nonnegative(2);
    lp.add(row(&[1, -1], Relation::Le, 1));
    lp.maximize(vec![q(1, 1), q(0, 1)]);
    match solve(&lp).unwrap() {
        LpOutcome::Unbounded { point, ray } => {
            lp.check_point(&point).unwrap();
            lp.check_ray(&ray).unwrap();
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn lazy_rows_reach_the_full_optimum() {
    let mut base = nonnegative(3);
    base.add(row(&[1, 1, 1], Relation::Le, 10));
    base.maximize(vec![q(2, 1), q(3, 1), q(1, 1)]);
    let lazy = vec![
        row(&[0, 1, 0], Relation::Le, 3),
        row(&[1, 0, 0], Relation::Le, 4),
        row(&[1, 1, 0], Relation::Le, 6),
        row(&[0, 0, 1], Relation::Le, 100),
    ];
    let mut full = base.clone();
    for c in &lazy {
        full.add(c.clone());
    }
    let value = |o: &LpOutcome| match o {
        LpOutcome::Optimal { value, .. } => value.clone(),
        other => panic!("{other:?}"),
    };
    let direct = value(&solve(&full).unwrap());
    let (lazy_out, stats) = solve_lazy(&base, &lazy).unwrap();
    assert_eq!(value(&lazy_out), direct);
    assert_eq!(direct, q(19, 1));
    assert!(stats.active_rows < lazy.len());
    let (seeded, _) = solve_lazy_seeded(&base, &lazy, &stats.active).unwrap();
    assert_eq!(value(&seeded), direct);
}
