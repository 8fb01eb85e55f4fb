use num_traits::Signed;
use proptest::prelude::*;

use super::*;
use crate::testing::{any_seq, small};
use crate::{Rational, Seq, SeqF64};

fn q(n: i64, d: i64) -> Rational {
    Rational::ratio(n, d)
}

fn ints(xs: &[i64]) -> Vec<Rational> {
    xs.iter().map(|&x| q(x, 1)).collect()
}

/// x_1 of the ℓ1 example: (0, 1, 0, 1/2, 0, 1/4, ...)
fn l1_x1() -> Seq {
    Seq::geometric(vec![], q(1, 2), ints(&[0, 1]))
}

/// x_2 of the ℓ1 example: (1, 0, 0, 1/2, 0, 1/4, ...)
fn l1_x2() -> Seq {
    Seq::geometric(ints(&[1, 0]), q(1, 2), vec![q(0, 1), q(1, 2)])
}

#[test]
fn basis_sum() {
    let a = Seq::finite(ints(&[1, 0]));
    let b = Seq::finite(ints(&[0, 1]));
    assert_eq!(&a + &b, Seq::finite(ints(&[1, 1])));
}

#[test]
fn l1_difference_matches_coordinates() {
    let d = Seq::linear(&l1_x1(), &l1_x2(), &q(1, 1), &q(-1, 1));
    // oracle: coordinatewise on the first 8 coordinates, tails cancel exactly
    let expect: Vec<Rational> = l1_x1()
        .coords(8)
        .into_iter()
        .zip(l1_x2().coords(8))
        .map(|(a, b)| a - b)
        .collect();
    assert_eq!(d.coords(8), expect);
    assert_eq!(d, Seq::finite(ints(&[-1, 1])));
    assert_eq!(d.tail(), Tail::Zero);
}

#[test]
fn identity_combination() {
    let a = l1_x2();
    assert_eq!(Seq::linear(&a, &Seq::one(), &q(1, 1), &q(0, 1)), a);
}

#[test]
fn abs_examples() {
    let a = Seq::finite(ints(&[-1, 1, -1, 1]));
    assert_eq!(a.abs(), Seq::finite(ints(&[1, 1, 1, 1])));
    assert_eq!(Seq::constant(q(-3, 1)).abs().tail(), Tail::Const(q(3, 1)));
    let p = Seq::periodic(vec![], ints(&[1, -1, 0]));
    assert_eq!(p.abs().tail(), Tail::Periodic(ints(&[1, 1, 0])));
}

#[test]
fn abs_of_sign_changing_geometric_tail() {
    // 2^-k - 3·3^-k changes sign after two blocks
    let a = Seq::new(
        vec![],
        Tail::Geometric(vec![
            Mode {
                ratio: q(1, 2),
                block: ints(&[1]),
            },
            Mode {
                ratio: q(1, 3),
                block: ints(&[-3]),
            },
        ]),
    )
    .unwrap();
    let abs = a.abs();
    for (x, y) in a.coords(30).iter().zip(abs.coords(30)) {
        assert_eq!(x.abs(), y);
    }
}

#[test]
fn lattice_examples() {
    let a = Seq::finite(ints(&[1, 0]));
    let b = Seq::finite(ints(&[0, 1]));
    assert_eq!(a.join(&b), Seq::finite(ints(&[1, 1])));
    let m = Seq::constant(q(2, 1)).meet(&Seq::periodic(vec![], ints(&[1, 3])));
    assert_eq!(m.tail(), Tail::Periodic(ints(&[1, 2])));
    assert!(m.prefix().is_empty());
}

#[test]
fn domination_by_one() {
    // x_n of the halves example
    let x = Seq::finite(ints(&[-1, 1, -1, 1, -1, 1]));
    assert!(x.leq(&Seq::one()));
    assert!((-&x).leq(&Seq::one()));
    assert!(!Seq::constant(q(2, 1)).leq(&Seq::one()));
}

#[test]
fn norm_examples() {
    assert_eq!(
        Seq::one().norm(NormKind::SupPlusLimsup),
        NormValue::Finite(q(2, 1))
    );
    // oracle: 1 + Σ_{k>=1} 2^-k = 1 + 1 = 2 by the geometric series closed form
    let geometric_total = q(1, 1) + q(1, 2) / (q(1, 1) - q(1, 2));
    assert_eq!(
        l1_x1().norm(NormKind::L1),
        NormValue::Finite(geometric_total)
    );
    for kind in [NormKind::Sup, NormKind::L1, NormKind::SupPlusLimsup] {
        assert_eq!(Seq::zero().norm(kind), NormValue::Finite(q(0, 1)));
    }
    assert_eq!(Seq::one().norm(NormKind::L1), NormValue::Infinite);
    assert_eq!(l1_x1().norm(NormKind::Sup), NormValue::Finite(q(1, 1)));
}

#[test]
fn space_membership() {
    assert!(!Seq::periodic(vec![], ints(&[1, 1, 0])).in_space(SpaceKind::C));
    assert!(!Seq::one().in_space(SpaceKind::C0));
    assert!(Seq::finite(ints(&[1, 1])).in_space(SpaceKind::C0));
    assert!(Seq::one().in_space(SpaceKind::C));
    assert!(l1_x1().in_space(SpaceKind::L1));
    assert!(Seq::finite(ints(&[1, 2, 3])).in_space(SpaceKind::FiniteDim(3)));
    assert!(!Seq::finite(ints(&[1, 2, 3])).in_space(SpaceKind::FiniteDim(2)));
}

#[test]
fn limit_functional_examples() {
    assert_eq!(Seq::finite(ints(&[1; 6])).limit_functional(), q(0, 1));
    assert_eq!(Seq::one().limit_functional(), q(1, 1));
    // oracle: average of one period
    let block = ints(&[1, 0]);
    let mean = block.iter().fold(q(0, 1), |s, x| s + x) / q(2, 1);
    assert_eq!(Seq::periodic(vec![], block).limit_functional(), mean);
}

#[test]
fn canonical_form_absorbs_prefix_and_reduces_period() {
    let a = Seq::periodic(ints(&[2, 0, 1]), ints(&[0, 1, 0, 1]));
    assert_eq!(a.prefix(), &ints(&[2]));
    assert_eq!(a.tail(), Tail::Periodic(ints(&[0, 1])));
    let g = Seq::geometric(vec![], q(1, 4), vec![q(1, 1), q(1, 2)]);
    assert_eq!(g.period(), 1);
    assert_eq!(g.modes()[0].ratio, q(1, 2));
    let back = Seq::geometric(vec![q(2, 1)], q(1, 2), ints(&[1]));
    assert!(back.prefix().is_empty());
}

#[test]
fn splice_and_first_positive() {
    let s = Seq::splice(&Seq::periodic(vec![], ints(&[-1, 1])), &Seq::zero(), 4);
    assert_eq!(s, Seq::finite(ints(&[-1, 1, -1, 1])));
    assert_eq!(s.first_positive(), Some(2));
    let y = Seq::periodic(vec![], ints(&[1, 1, 0]));
    assert_eq!(y.first_positive_on(3, 3), None);
    let z = Seq::periodic(ints(&[1, 1, 0, 1, 1]), ints(&[1, 1, 1]));
    assert_eq!(z.first_positive_on(3, 3), Some(6));
}

#[test]
fn generic_over_f64() {
    let a = SeqF64::periodic(vec![-1.0], vec![0.5, -2.0]);
    assert_eq!(a.abs().coords(4), vec![1.0, 0.5, 2.0, 0.5]);
    assert_eq!(a.norm(NormKind::Sup), NormValue::Finite(2.0));
}

const WINDOW: usize = 36;

proptest! {
    #[test]
    fn skip_and_with_coord_are_coordinatewise(a in any_seq(), k in 0usize..6, i in 1usize..6, v in small()) {
        let s = a.skip(k);
        let w = a.with_coord(i, v.clone());
        for j in 1..=12 {
            prop_assert_eq!(s.coord(j), a.coord(j + k));
            prop_assert_eq!(w.coord(j), if j == i { v.clone() } else { a.coord(j) });
        }
    }

    #[test]
    fn linear_is_coordinatewise(a in any_seq(), b in any_seq(), s in small(), t in small()) {
        let c = Seq::linear(&a, &b, &s, &t);
        for i in 1..=WINDOW {
            prop_assert_eq!(c.coord(i), a.coord(i) * &s + b.coord(i) * &t);
        }
    }

    #[test]
    fn abs_meet_join_are_coordinatewise(a in any_seq(), b in any_seq()) {
        let (abs, meet, join) = (a.abs(), a.meet(&b), a.join(&b));
        for i in 1..=WINDOW {
            let (x, y) = (a.coord(i), b.coord(i));
            prop_assert_eq!(abs.coord(i), x.abs());
            prop_assert_eq!(meet.coord(i), Rational::min_of(&x, &y));
            prop_assert_eq!(join.coord(i), Rational::max_of(&x, &y));
        }
    }

    #[test]
    fn lattice_laws(a in any_seq(), b in any_seq(), c in any_seq()) {
        prop_assert_eq!(a.join(&b), b.join(&a));
        prop_assert_eq!(a.meet(&b), b.meet(&a));
        prop_assert_eq!(a.join(&b).join(&c), a.join(&b.join(&c)));
        prop_assert_eq!(a.meet(&b).meet(&c), a.meet(&b.meet(&c)));
        prop_assert_eq!(a.join(&a.meet(&b)), a.clone());
        prop_assert_eq!(a.meet(&a.join(&b)), a.clone());
        prop_assert_eq!(a.abs(), a.join(&-&a));
    }

    #[test]
    fn leq_agrees_with_join(a in any_seq(), b in any_seq()) {
        prop_assert_eq!(a.leq(&b), a.join(&b) == b);
        prop_assert!(a.meet(&b).leq(&a));
    }

    #[test]
    fn canonical_form_is_idempotent(a in any_seq()) {
        let rebuilt = Seq::from_modes(a.prefix().to_vec(), a.period(), a.modes().to_vec());
        prop_assert_eq!(&rebuilt, &a);
        let (p, m) = a.aligned(a.prefix().len() + 5, a.period() * 2);
        prop_assert_eq!(Seq::from_modes(p, a.period() * 2, m), a);
    }

    #[test]
    fn equality_is_extensional(a in any_seq(), b in any_seq()) {
        let same_window = a.coords(WINDOW) == b.coords(WINDOW);
        if a == b {
            prop_assert!(same_window);
        }
        prop_assert_eq!((&a - &b).is_zero(), a == b);
    }

    #[test]
    fn norms_are_monotone(x in any_seq(), y in any_seq()) {
        let a = x.abs();
        let b = &a + &y.abs();
        for kind in [NormKind::Sup, NormKind::L1, NormKind::SupPlusLimsup] {
            prop_assert!(a.norm(kind).le(&b.norm(kind)));
        }
    }

    #[test]
    fn sup_norm_bounds(a in any_seq()) {
        let sup = a.norm(NormKind::Sup).expect_finite();
        let both = a.norm(NormKind::SupPlusLimsup).expect_finite();
        prop_assert_eq!(both.clone(), sup.clone() + a.limsup_abs());
        prop_assert!(sup <= both && both <= sup.clone() * q(2, 1));
        for x in a.coords(WINDOW) {
            prop_assert!(x.abs() <= sup);
        }
    }

    #[test]
    fn limit_functional_is_a_shift_invariant_state(a in any_seq(), b in any_seq(), s in small()) {
        let lim = |x: &Seq| x.limit_functional();
        prop_assert_eq!(lim(&Seq::linear(&a, &b, &s, &q(1, 1))), lim(&a) * &s + lim(&b));
        prop_assert!(lim(&a.abs()) >= q(0, 1));
        prop_assert_eq!(lim(&Seq::one()), q(1, 1));
        prop_assert_eq!(lim(&a.shift()), lim(&a));
        prop_assert_eq!(a.shift().coords(WINDOW), a.coords(WINDOW + 1)[1..].to_vec());
    }
}
