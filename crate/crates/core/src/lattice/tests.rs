use proptest::prelude::*;

use super::*;
use crate::families::*;
use crate::lp::LpProblem;
use crate::testing::{block_average, ints, nested_instance, q};
use crate::{Rational, Seq};

type F = Filtration<Rational>;
type M = Martingale<Rational>;

fn seqs(rows: &[&[i64]]) -> Vec<Seq> {
    rows.iter().map(|r| Seq::finite(ints(r))).collect()
}

/// Minimum of `c·v` over a pointed polyhedron in `R^d`, by trying every
/// `d` constraints as equalities. Slow but independent of the simplex code.
fn vertex_min(p: &LpProblem<Rational>, c: &[Rational]) -> Option<Rational> {
    let d = p.num_vars;
    let rows: Vec<&(Vec<Rational>, Rational)> =
        p.eq_constraints.iter().chain(&p.geq_constraints).collect();
    let mut best: Option<Rational> = None;
    let mut pick = vec![0usize; d];
    fn next(pick: &mut [usize], n: usize) -> bool {
        let d = pick.len();
        for i in (0..d).rev() {
            if pick[i] < n - d + i {
                pick[i] += 1;
                for j in i + 1..d {
                    pick[j] = pick[j - 1] + 1;
                }
                return true;
            }
        }
        false
    }
    if rows.len() < d {
        return None;
    }
    for (i, slot) in pick.iter_mut().enumerate() {
        *slot = i;
    }
    loop {
        if let Some(v) = solve_square(&pick.iter().map(|&i| rows[i].clone()).collect::<Vec<_>>()) {
            if p.is_feasible(&v) {
                let val = c
                    .iter()
                    .zip(&v)
                    .fold(q(0, 1), |s, (a, b)| s + a.clone() * b.clone());
                if best.as_ref().is_none_or(|b| val < *b) {
                    best = Some(val);
                }
            }
        }
        if !next(&mut pick, rows.len()) {
            return best;
        }
    }
}

/// Gauss-Jordan on a square system; `None` when singular.
fn solve_square(rows: &[(Vec<Rational>, Rational)]) -> Option<Vec<Rational>> {
    let d = rows.len();
    let mut a: Vec<Vec<Rational>> = rows
        .iter()
        .map(|(r, b)| r.iter().cloned().chain([b.clone()]).collect())
        .collect();
    for col in 0..d {
        let piv = (col..d).find(|&r| a[r][col] != q(0, 1))?;
        a.swap(col, piv);
        let inv = q(1, 1) / a[col][col].clone();
        for x in a[col].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for r in 0..d {
            if r != col && a[r][col] != q(0, 1) {
                let f = a[r][col].clone();
                let pivot_row = a[col].clone();
                for (x, v) in a[r].iter_mut().zip(pivot_row) {
                    *x = x.clone() - f.clone() * v;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[d].clone()).collect())
}

#[test]
fn halves_modulus_is_the_constant_unit() {
    for space in [SpaceKind::SeqAll, SpaceKind::Linf] {
        let f: F = halves_filtration(space);
        let x: M = halves_martingale(5);
        let m = krickeberg_modulus(&x, &f, DEFAULT_PROBE_HORIZON).unwrap();
        assert_eq!(m.method, ModulusMethod::Krickeberg);
        assert!(m.stabilized && m.mismatch.is_none(), "{:?}", m.mismatch);
        assert!(m.modulus.terms().iter().all(|t| *t == Seq::one()));
    }
}

#[test]
fn modulus_of_a_positive_martingale_is_itself() {
    let f: F = halves_filtration(SpaceKind::Linf);
    let y = f
        .martingale_from(&Seq::periodic(vec![], ints(&[3, 1])), 4)
        .unwrap();
    let m = krickeberg_modulus(&y, &f, DEFAULT_PROBE_HORIZON).unwrap();
    assert!(m.stabilized);
    assert_eq!(m.modulus, y);
    let l1: M = l1_martingale(5);
    let m = krickeberg_modulus(&l1, &l1_filtration(), DEFAULT_PROBE_HORIZON).unwrap();
    assert!(m.stabilized);
    assert_eq!(m.modulus.terms(), l1.terms());
}

#[test]
fn lattice_hom_levels_take_the_fast_path() {
    let f = Filtration::new(0, vec![Operator::identity(); 3], SpaceKind::FiniteDim(3));
    let x = Martingale::new(0, vec![Seq::finite(ints(&[1, -2, 0])); 3]);
    let m = krickeberg_modulus(&x, &f, DEFAULT_PROBE_HORIZON).unwrap();
    assert_eq!(m.method, ModulusMethod::LatticeHomFastpath);
    assert_eq!(m.modulus, x.abs());
}

#[test]
fn modulus_settles_symbolically_on_a_sign_changing_head() {
    // head pairs (-1, 3), averaged pairs (1, 1) beyond the cut
    let f: F = halves_filtration(SpaceKind::Linf);
    let rule = crate::mart::TermRule {
        head: Seq::periodic(vec![], ints(&[-1, 3])),
        rest: Seq::one(),
        slope: 2,
        offset: 0,
    };
    let x = Martingale::with_rule(0, vec![], rule, 4).unwrap();
    assert!(check_martingale(&x, &f).unwrap().passed());
    let m = krickeberg_modulus(&x, &f, DEFAULT_PROBE_HORIZON).unwrap();
    assert!(m.stabilized, "{:?}", m.unsettled);
    // oracle: E_n|x_m| = (1,3)^n then (2,2) up to the cut, then 1
    for n in 0..=4 {
        let mut want = Vec::new();
        for k in 0..8 {
            want.extend(if k < n {
                [q(1, 1), q(3, 1)]
            } else {
                [q(2, 1), q(2, 1)]
            });
        }
        assert_eq!(m.modulus.term(n).coords(16), want);
    }
}

#[test]
fn unsettled_probes_are_reported() {
    // the remainder beyond the cut shrinks with m, so no two probes align
    let f: F = halves_filtration(SpaceKind::Linf);
    let rule = crate::mart::TermRule {
        head: Seq::geometric(vec![], q(1, 2), ints(&[-1, 3])),
        rest: Seq::geometric(vec![], q(1, 2), ints(&[1, 1])),
        slope: 2,
        offset: 0,
    };
    let x = Martingale::with_rule(0, vec![], rule, 3).unwrap();
    assert!(check_martingale(&x, &f).unwrap().passed());
    let m = krickeberg_modulus(&x, &f, 6).unwrap();
    assert!(!m.stabilized && m.certified().is_none());
    let u = m.unsettled.unwrap();
    assert_eq!(u.n, 0);
    assert!(u.previous.leq(&u.last) && u.previous != u.last);
}

#[test]
fn banach_example_records_a_mismatch() {
    let f: F = banach_filtration();
    let x: M = banach_martingale(4);
    let m = krickeberg_modulus(&x, &f, DEFAULT_PROBE_HORIZON).unwrap();
    assert!(m.stabilized);
    let note = m.mismatch.expect("the formula gives 0 at the first level");
    assert!(note.starts_with("Krickeberg term 0 is "), "{note}");
    assert!(m.modulus.terms().iter().all(|t| *t == Seq::one()));
    assert!(dominates(&m.modulus, &x).unwrap());
}

#[test]
fn triple_example_has_no_modulus_in_c() {
    let f: F = triple_filtration();
    let x: M = triple_martingale(4);
    let m = krickeberg_modulus(&x, &f, DEFAULT_PROBE_HORIZON).unwrap();
    assert!(m.certified().is_none());
    assert!(m.mismatch.unwrap().contains("terms in space"));
    // the probe limit is the periodic (1, 1, 0) pattern, outside c
    assert_eq!(m.modulus.term(1), &Seq::periodic(vec![], ints(&[1, 1, 0])));
}

fn two_point() -> (F, M) {
    let avg = block_average(&ints(&[1, 1]), &[false]);
    let f = Filtration::new(0, vec![avg, Operator::identity()], SpaceKind::FiniteDim(2));
    (f, Martingale::new(0, seqs(&[&[0, 0], &[1, -1]])))
}

#[test]
fn least_dominating_two_point_example() {
    let (f, x) = two_point();
    let z = lp_least_dominating(&x, &f).unwrap();
    let z = z.least().unwrap();
    // oracle: vertex enumeration of each coordinate minimum over y in R^2
    let levels = dense_levels(&x, &f, 2).unwrap();
    let neg = x.neg();
    let p = domination_problem(&levels, &[&x, &neg], 2, 0);
    for (k, rows) in levels.iter().enumerate() {
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(Some(z.term(k).coord(i + 1)), vertex_min(&p, row));
        }
    }
    assert_eq!(z.terms(), &seqs(&[&[1, 1], &[1, 1]])[..]);
}

#[test]
fn least_dominating_of_a_positive_martingale_is_itself() {
    let (f, _) = two_point();
    let x = f.martingale_from(&Seq::finite(ints(&[3, 1])), 1).unwrap();
    assert_eq!(
        lp_least_dominating(&x, &f).unwrap(),
        LeastDominating::Least(x.clone())
    );
    assert_eq!(
        martingale_sup(std::slice::from_ref(&x), &f).unwrap(),
        LeastDominating::Least(x)
    );
}

#[test]
fn lp_routes_need_finite_dimension() {
    let f: F = halves_filtration(SpaceKind::Linf);
    let x: M = halves_martingale(2);
    assert!(matches!(
        lp_least_dominating(&x, &f),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn limsup_example_regular_norm() {
    let f: F = halves_filtration(SpaceKind::Linf);
    let x: M = halves_martingale(5);
    assert_eq!(
        martingale_norm(&x, NormKind::SupPlusLimsup).value,
        NormValue::Finite(q(1, 1))
    );
    let r = regular_norm(&x, &f, NormKind::SupPlusLimsup, DEFAULT_PROBE_HORIZON).unwrap();
    assert_eq!(
        r,
        RegularNorm::Value {
            value: NormValue::Finite(q(2, 1)),
            route: RegularNormRoute::Modulus
        }
    );
}

#[test]
fn triple_example_is_not_regular() {
    let f: F = triple_filtration();
    let r = regular_norm(
        &triple_martingale(3),
        &f,
        NormKind::Sup,
        DEFAULT_PROBE_HORIZON,
    )
    .unwrap();
    assert_eq!(r, RegularNorm::NotRegular { horizon: 3 });
}

#[test]
fn weighted_average_breaks_l1_coincidence() {
    // E_1 averages with weights (1, 3), E_2 = I, x_2 = (-1/2, 1)
    let e1 = block_average(&ints(&[1, 3]), &[false]);
    let f = Filtration::new(1, vec![e1, Operator::identity()], SpaceKind::FiniteDim(2));
    let x = f
        .martingale_from(&Seq::finite(vec![q(-1, 2), q(1, 1)]), 2)
        .unwrap();
    assert_eq!(x.term(1), &Seq::finite(vec![q(5, 8), q(5, 8)]));
    assert_eq!(
        f.level_norms(2, NormKind::L1).unwrap(),
        vec![q(3, 2), q(1, 1)]
    );
    // |X|_1 = E_1 (1/2, 1) = (7/8, 7/8)
    let l1 = regular_norm(&x, &f, NormKind::L1, 0).unwrap();
    assert_eq!(
        martingale_norm(&x, NormKind::L1).value,
        NormValue::Finite(q(3, 2))
    );
    assert_eq!(l1.value(), Some(&NormValue::Finite(q(7, 4))));
    // rows still sum to one, so the sup norms agree
    let sup = regular_norm(&x, &f, NormKind::Sup, 0).unwrap();
    assert_eq!(sup.value(), Some(&NormValue::Finite(q(1, 1))));
}

#[test]
fn shrinking_the_unit_martingale() {
    let f: F = triple_filtration();
    let x: M = triple_martingale(4);
    let y = constant_martingale(1, 4, Seq::one());
    let Shrunk::Smaller { z, coordinate } = shrink_dominating(&y, &x, &f).unwrap() else {
        panic!("the unit martingale can be lowered");
    };
    assert_eq!(coordinate, 3);
    assert_eq!(z.term(2).coords(7), ints(&[1, 1, 0, 1, 1, 1, 1]));
    let Shrunk::Smaller { z, coordinate } = shrink_dominating(&z, &x, &f).unwrap() else {
        panic!("and lowered again");
    };
    assert_eq!(coordinate, 6);
    assert!(z.term(1).coord(6) == q(0, 1) && z.term(1).coord(9) == q(1, 1));
}

#[test]
fn shrinking_stops_outside_c() {
    let f: F = triple_filtration();
    let x: M = triple_martingale(4);
    let y = constant_martingale(1, 4, Seq::periodic(vec![], ints(&[1, 1, 0])));
    match shrink_dominating(&y, &x, &f).unwrap() {
        Shrunk::NoCandidate { certificate } => assert!(certificate.ends_with("hence not in c")),
        other => panic!("{other:?}"),
    }
    // a Y below some u_n is rejected up front
    let low = constant_martingale(1, 4, Seq::finite(ints(&[1, 1, 1])));
    assert!(matches!(
        shrink_dominating(&low, &x, &f),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn unit_domination() {
    let f: F = halves_filtration(SpaceKind::Linf);
    let x: M = halves_martingale(4);
    let e = Seq::new(vec![q(1, 1), q(1, 2)], crate::Tail::Const(q(1, 2))).unwrap();
    let u = dominate_via_unit(&x, &f, &e, NormKind::Sup).unwrap();
    assert_eq!(u.c, q(2, 1));
    assert!(u.dominating);
    let zero = dominate_via_unit(&M::zero(0, 3), &f, &e, NormKind::Sup).unwrap();
    assert_eq!(zero.c, q(0, 1));
    let bad = Seq::new(vec![q(1, 1)], crate::Tail::Periodic(vec![q(1, 1), q(0, 1)])).unwrap();
    let err = dominate_via_unit(&x, &f, &bad, NormKind::Sup).unwrap_err();
    assert_eq!(
        err,
        Error::Precondition("not a strong unit: coordinate 3 is 0".into())
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn modulus_oracles_agree((f, x) in nested_instance()) {
        let k = krickeberg_modulus(&x, &f, DEFAULT_PROBE_HORIZON).unwrap();
        prop_assert!(k.stabilized);
        let lp = lp_least_dominating(&x, &f).unwrap();
        prop_assert_eq!(lp.least(), Some(&k.modulus));
        let sup = martingale_sup(&[x.clone(), x.neg()], &f).unwrap();
        prop_assert_eq!(sup.least(), Some(&k.modulus));
    }

    #[test]
    fn lp_minima_match_vertex_enumeration((f, x) in nested_instance()) {
        let d = match f.space() { SpaceKind::FiniteDim(d) => d, _ => unreachable!() };
        prop_assume!(d <= 3);
        let z = lp_least_dominating(&x, &f).unwrap();
        let z = z.least().unwrap();
        let levels = dense_levels(&x, &f, d).unwrap();
        let neg = x.neg();
        let p = domination_problem(&levels, &[&x, &neg], d, 0);
        for (k, rows) in levels.iter().enumerate() {
            for (i, row) in rows.iter().enumerate() {
                prop_assert_eq!(Some(z.term(k).coord(i + 1)), vertex_min(&p, row));
            }
        }
    }

    #[test]
    fn modulus_is_below_every_dominating_martingale(
        (f, x) in nested_instance(),
        ws in prop::collection::vec(prop::collection::vec(0i64..9, 5), 8),
    ) {
        let z = krickeberg_modulus(&x, &f, DEFAULT_PROBE_HORIZON).unwrap().modulus;
        let d = match f.space() { SpaceKind::FiniteDim(d) => d, _ => unreachable!() };
        for w in ws {
            let w = f.martingale_from(&Seq::finite(ints(&w[..d])), x.horizon()).unwrap();
            if dominates(&w, &x).unwrap() {
                prop_assert!(z.leq(&w).unwrap());
            }
        }
    }

    #[test]
    fn sup_of_two_positive_martingales_is_above_their_join(
        (f, x) in nested_instance(),
        w in prop::collection::vec(0i64..5, 5),
    ) {
        let d = x.term(x.horizon()).prefix().len().max(2);
        let a = x.abs();
        let a = f.martingale_from(a.term(a.horizon()), x.horizon()).unwrap();
        let b = f.martingale_from(&Seq::finite(ints(&w[..d.min(5)])), x.horizon()).unwrap();
        let s = martingale_sup(&[a.clone(), b.clone()], &f).unwrap();
        let s = s.least().unwrap();
        for n in s.indices() {
            prop_assert!(a.term(n).join(b.term(n)).leq(s.term(n)));
        }
        prop_assert!(check_martingale(s, &f).unwrap().passed());
    }

    #[test]
    fn regular_norm_axioms(
        (f, x) in nested_instance(),
        other in prop::collection::vec(-4i64..5, 5),
        alpha in -3i64..4,
    ) {
        let d = match f.space() { SpaceKind::FiniteDim(d) => d, _ => unreachable!() };
        let y = f.martingale_from(&Seq::finite(ints(&other[..d])), x.horizon()).unwrap();
        for kind in [NormKind::Sup, NormKind::L1] {
            let r = |m: &M| regular_norm(m, &f, kind, 0).unwrap().value().unwrap().clone().expect_finite();
            let plain = martingale_norm(&x, kind).value.expect_finite();
            let (rx, ry) = (r(&x), r(&y));
            prop_assert!(plain <= rx.clone());
            prop_assert!(plain <= rx.clone() * q(2, 1));
            prop_assert!(r(&x.linear(&y, &q(1, 1), &q(1, 1)).unwrap()) <= rx.clone() + ry);
            prop_assert_eq!(r(&x.scale(&q(alpha, 1))), rx.clone() * q(alpha.abs(), 1));
            let modulus = lp_least_dominating(&x, &f).unwrap();
            let modulus = modulus.least().unwrap();
            prop_assert_eq!(martingale_norm(modulus, kind).value.expect_finite(), rx);
        }
    }

    #[test]
    fn contractive_levels_give_equal_norms((f, x) in nested_instance()) {
        // conditional expectations always have unit row sums
        let r = regular_norm(&x, &f, NormKind::Sup, 0).unwrap();
        prop_assert_eq!(r.value(), Some(&martingale_norm(&x, NormKind::Sup).value));
        let contractive = f.level_norms(x.horizon(), NormKind::L1).unwrap().iter().all(|v| *v <= q(1, 1));
        if contractive {
            let r = regular_norm(&x, &f, NormKind::L1, 0).unwrap();
            prop_assert_eq!(r.value(), Some(&martingale_norm(&x, NormKind::L1).value));
        }
    }

    #[test]
    fn norm_is_monotone_on_the_positive_cone((f, x) in nested_instance(), cut in prop::collection::vec(0i64..3, 5)) {
        // 0 <= Y <= |X|: shrink |X|'s last term coordinatewise, condition down
        let a = x.abs();
        let top = a.term(a.horizon());
        let d = match f.space() { SpaceKind::FiniteDim(d) => d, _ => unreachable!() };
        let lowered: Vec<Rational> = (1..=d).map(|i| top.coord(i) * q(cut[i - 1], 2)).collect();
        let y = f.martingale_from(&Seq::finite(lowered), x.horizon()).unwrap();
        let big = f.martingale_from(top, x.horizon()).unwrap();
        prop_assert!(y.is_nonneg() && y.leq(&big).unwrap() || !y.leq(&big).unwrap());
        if y.leq(&big).unwrap() {
            for kind in [NormKind::Sup, NormKind::L1] {
                prop_assert!(martingale_norm(&y, kind).value.le(&martingale_norm(&big, kind).value));
            }
        }
    }
}

#[test]
fn unit_domination_in_finite_dimension() {
    let f = Filtration::new(
        0,
        vec![
            block_average(&ints(&[1, 2, 1, 1]), &[false, true, false]),
            Operator::identity(),
        ],
        SpaceKind::FiniteDim(4),
    );
    let x = f
        .martingale_from(&Seq::finite(ints(&[2, -3, 1, 0])), 1)
        .unwrap();
    let u = dominate_via_unit(&x, &f, &Seq::one(), NormKind::Sup).unwrap();
    assert_eq!(u.c, q(1, 1));
    assert!(u.dominating);
}
