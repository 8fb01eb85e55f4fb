use proptest::prelude::*;

use super::*;
use crate::testing::q;
use crate::Rational;

type Frac = (i64, i64);

fn problem(n: usize, objective: &[Frac], geq: &[(&[Frac], Frac)]) -> LpProblem<Rational> {
    let mut p = LpProblem::new(n);
    p.objective = objective.iter().map(|&(a, b)| q(a, b)).collect();
    for (a, (b0, b1)) in geq {
        p.add_geq(a.iter().map(|&(x, y)| q(x, y)).collect(), q(*b0, *b1));
    }
    p
}

/// Minimum of `c·v` over the vertices of a bounded 2-d polygon given by
/// `a·v >= b` rows: intersect every pair of boundary lines and keep the
/// feasible points.
fn vertex_min(c: &[Rational], rows: &[(Vec<Rational>, Rational)]) -> Option<Rational> {
    let mut best: Option<Rational> = None;
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            let (a, b) = (&rows[i], &rows[j]);
            let det = a.0[0].clone() * b.0[1].clone() - a.0[1].clone() * b.0[0].clone();
            if det == q(0, 1) {
                continue;
            }
            let x = (a.1.clone() * b.0[1].clone() - a.0[1].clone() * b.1.clone()) / det.clone();
            let y = (a.0[0].clone() * b.1.clone() - a.1.clone() * b.0[0].clone()) / det;
            let ok = rows
                .iter()
                .all(|(r, rhs)| r[0].clone() * x.clone() + r[1].clone() * y.clone() >= *rhs);
            if ok {
                let v = c[0].clone() * x + c[1].clone() * y;
                if best.as_ref().is_none_or(|b| v < *b) {
                    best = Some(v);
                }
            }
        }
    }
    best
}

#[test]
fn single_lower_bound() {
    let p = problem(1, &[(1, 1)], &[(&[(1, 1)], (3, 1))]);
    let r = solve_lp_exact(&p);
    assert_eq!(r.status, LpStatus::Optimal);
    assert_eq!(r.value, q(3, 1));
    assert_eq!(r.witness, vec![q(3, 1)]);
}

#[test]
fn two_variable_example_matches_vertices() {
    let p = problem(
        2,
        &[(1, 1), (1, 1)],
        &[
            (&[(1, 1), (0, 1)], (1, 1)),
            (&[(0, 1), (1, 1)], (1, 1)),
            (&[(1, 1), (1, 1)], (5, 2)),
        ],
    );
    let r = solve_lp_exact(&p);
    assert_eq!(r.status, LpStatus::Optimal);
    assert!(p.is_feasible(&r.witness));
    // the region is unbounded above, so close it with a box for the oracle
    let mut rows = p.geq_constraints.clone();
    rows.push((vec![q(-1, 1), q(0, 1)], q(-10, 1)));
    rows.push((vec![q(0, 1), q(-1, 1)], q(-10, 1)));
    assert_eq!(vertex_min(&p.objective, &rows), Some(q(5, 2)));
    assert_eq!(r.value, q(5, 2));
}

#[test]
fn unbounded_and_infeasible() {
    let mut p = problem(1, &[(-1, 1)], &[(&[(1, 1)], (0, 1))]);
    assert_eq!(solve_lp_exact(&p).status, LpStatus::Unbounded);
    p.add_geq(vec![q(-1, 1)], q(1, 1));
    let r = solve_lp_exact(&p);
    assert_eq!(r.status, LpStatus::Infeasible);
    assert!(r.witness.is_empty());
    let mut e = LpProblem::<Rational>::new(2);
    e.add_eq(vec![q(1, 1), q(1, 1)], q(1, 1));
    e.add_eq(vec![q(1, 1), q(1, 1)], q(2, 1));
    assert_eq!(solve_lp_exact(&e).status, LpStatus::Infeasible);
}

#[test]
fn equalities_and_sign_flags() {
    // minimise v1 - v2 with v1 + v2 = 1, v2 <= 3/2, v1 >= 0
    let mut p = LpProblem::<Rational>::new(2);
    p.objective = vec![q(1, 1), q(-1, 1)];
    p.nonneg[0] = true;
    p.add_eq(vec![q(1, 1), q(1, 1)], q(1, 1));
    p.add_leq(vec![q(0, 1), q(1, 1)], q(3, 2));
    let r = solve_lp_exact(&p);
    assert_eq!(r.value, q(-1, 1));
    assert_eq!(r.witness, vec![q(0, 1), q(1, 1)]);
    // a redundant equality row is dropped rather than reported infeasible
    p.add_eq(vec![q(2, 1), q(2, 1)], q(2, 1));
    assert_eq!(solve_lp_exact(&p).value, q(-1, 1));
}

#[test]
fn degenerate_problem_terminates() {
    // a classic cycling instance for the largest-coefficient rule
    let mut p = LpProblem::<Rational>::new(4);
    p.nonneg = vec![true; 4];
    p.objective = vec![q(-3, 4), q(20, 1), q(-1, 2), q(6, 1)];
    p.add_leq(vec![q(1, 4), q(-8, 1), q(-1, 1), q(9, 1)], q(0, 1));
    p.add_leq(vec![q(1, 2), q(-12, 1), q(-1, 2), q(3, 1)], q(0, 1));
    p.add_leq(vec![q(0, 1), q(0, 1), q(1, 1), q(0, 1)], q(1, 1));
    let r = solve_lp_exact(&p);
    assert_eq!(r.status, LpStatus::Optimal);
    assert_eq!(r.value, q(-5, 4));
    assert!(p.is_feasible(&r.witness));
}

#[test]
fn shared_phase_one() {
    let p = problem(
        2,
        &[(0, 1), (0, 1)],
        &[(&[(1, 1), (0, 1)], (1, 1)), (&[(0, 1), (1, 1)], (2, 1))],
    );
    let rs = solve_many(
        &p,
        &[
            vec![q(1, 1), q(0, 1)],
            vec![q(0, 1), q(1, 1)],
            vec![q(1, 1), q(0, 1)],
        ],
    );
    let values: Vec<Rational> = rs.iter().map(|r| r.value.clone()).collect();
    assert_eq!(values, vec![q(1, 1), q(2, 1), q(1, 1)]);
}

#[test]
fn dump_lists_one_constraint_per_line() {
    let mut p = problem(2, &[(1, 2), (0, 1)], &[(&[(1, 1), (-2, 3)], (5, 2))]);
    p.nonneg[1] = true;
    let text = p.to_string();
    assert_eq!(
        text,
        "minimize 1/2 v1\n  1 v1 + -2/3 v2 >= 5/2\n  v2 >= 0\n"
    );
}

fn bounded_2d() -> impl Strategy<Value = (Vec<Rational>, Vec<(Vec<Rational>, Rational)>)> {
    let row =
        (-4i64..5, -4i64..5, -6i64..6).prop_map(|(a, b, c)| (vec![q(a, 1), q(b, 1)], q(c, 2)));
    (
        (-3i64..4, -3i64..4).prop_map(|(a, b)| vec![q(a, 1), q(b, 1)]),
        prop::collection::vec(row, 0..5),
    )
        .prop_map(|(c, mut rows)| {
            for (a, b) in [(1, 0), (0, 1), (-1, 0), (0, -1)] {
                rows.push((vec![q(a, 1), q(b, 1)], q(-5, 1)));
            }
            (c, rows)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn simplex_agrees_with_vertex_enumeration((c, rows) in bounded_2d()) {
        let mut p = LpProblem::new(2);
        p.objective = c.clone();
        for (a, b) in &rows {
            p.add_geq(a.clone(), b.clone());
        }
        let r = solve_lp_exact(&p);
        match vertex_min(&c, &rows) {
            Some(v) => {
                prop_assert_eq!(r.status, LpStatus::Optimal);
                prop_assert!(p.is_feasible(&r.witness));
                prop_assert_eq!(r.value, v);
            }
            None => prop_assert_eq!(r.status, LpStatus::Infeasible),
        }
    }

    #[test]
    fn solving_is_deterministic((c, rows) in bounded_2d()) {
        let mut p = LpProblem::new(2);
        p.objective = c;
        for (a, b) in rows {
            p.add_geq(a, b);
        }
        prop_assert_eq!(solve_lp_exact(&p), solve_lp_exact(&p.clone()));
    }
}
