//! The concrete filtrations and martingales behind the built-in scenarios.
//!
//! Index conventions follow the examples they come from: the pair-averaging
//! family starts at 0, the triple and ℓ₁ families at 1.

use crate::mart::{Filtration, LevelRule, Martingale, TermRule};
use crate::op::{BlockOp, Functional, Matrix, OpMode, Operator};
use crate::scalar::Scalar;
use crate::seq::{ExtSeq, SpaceKind};

fn r<T: Scalar>(n: i64, d: i64) -> T {
    T::ratio(n, d)
}

fn rows<T: Scalar>(entries: &[&[(i64, i64)]]) -> Matrix<T> {
    Matrix::from_rows(
        entries
            .iter()
            .map(|row| row.iter().map(|&(n, d)| r(n, d)).collect())
            .collect(),
    )
}

/// Averages coordinates in consecutive pairs `(1,2), (3,4), ...`.
pub fn pair_average<T: Scalar>() -> BlockOp<T> {
    BlockOp::new(
        Matrix::zeros(0, 0),
        rows(&[&[(1, 2), (1, 2)], &[(1, 2), (1, 2)]]),
    )
    .expect("valid block")
}

/// On each triple: average the first two coordinates, keep the third.
pub fn triple_average<T: Scalar>() -> BlockOp<T> {
    BlockOp::new(
        Matrix::zeros(0, 0),
        rows(&[
            &[(1, 2), (1, 2), (0, 1)],
            &[(1, 2), (1, 2), (0, 1)],
            &[(0, 1), (0, 1), (1, 1)],
        ]),
    )
    .expect("valid block")
}

/// `[[0, 0], [2^-(k-1), 1]]` on pair `k`.
pub fn halving_pairs<T: Scalar>() -> BlockOp<T> {
    BlockOp::with_modes(
        Matrix::zeros(0, 0),
        2,
        vec![
            OpMode {
                ratio: T::one(),
                block: rows(&[&[(0, 1), (0, 1)], &[(0, 1), (1, 1)]]),
            },
            OpMode {
                ratio: r(1, 2),
                block: rows(&[&[(0, 1), (0, 1)], &[(1, 1), (0, 1)]]),
            },
        ],
    )
    .expect("valid block")
}

/// `[[0, 0], [alpha, 1]]` on `R^2`.
pub fn p_alpha<T: Scalar>(alpha: T) -> Operator<T> {
    let m = Matrix::from_rows(vec![vec![T::zero(), T::zero()], vec![alpha, T::one()]]);
    Operator::Block(BlockOp::finite(m).expect("square"))
}

/// `φ ⊗ 𝟙` with φ the period mean.
pub fn banach_projection<T: Scalar>() -> Operator<T> {
    Operator::rank_one(Functional::period_mean(1), ExtSeq::one())
}

/// `E_n` = identity on `1..=2n`, pair averages after; `n >= 0`.
pub fn halves_filtration<T: Scalar>(space: SpaceKind) -> Filtration<T> {
    Filtration::new(0, Vec::new(), space).with_rule(LevelRule {
        base: pair_average(),
        slope: 2,
        offset: 0,
    })
}

/// `x_n = (-1, 1, ..., -1, 1, 0, ...)` with `2n` leading entries.
pub fn halves_martingale<T: Scalar>(horizon: usize) -> Martingale<T> {
    let rule = TermRule {
        head: ExtSeq::periodic(Vec::new(), vec![-T::one(), T::one()]),
        rest: ExtSeq::zero(),
        slope: 2,
        offset: 0,
    };
    Martingale::with_rule(0, Vec::new(), rule, horizon).expect("rule covers the horizon")
}

/// `E_n` = identity on `1..=3n`, triple averages after; `n >= 1`.
pub fn triple_filtration<T: Scalar>() -> Filtration<T> {
    Filtration::new(1, Vec::new(), SpaceKind::C).with_rule(LevelRule {
        base: triple_average(),
        slope: 3,
        offset: 0,
    })
}

/// `x_n = (1, -1, 0, ..., 1, -1, 0, 0, ...)` with `3n` leading entries.
pub fn triple_martingale<T: Scalar>(horizon: usize) -> Martingale<T> {
    let rule = TermRule {
        head: ExtSeq::periodic(Vec::new(), vec![T::one(), -T::one(), T::zero()]),
        rest: ExtSeq::zero(),
        slope: 3,
        offset: 0,
    };
    Martingale::with_rule(1, Vec::new(), rule, horizon).expect("rule covers the horizon")
}

/// `u_n = (1, 1, 0, ..., 1, 1, 0, 0, ...)` with `3n` leading entries.
pub fn triple_lower_bound<T: Scalar>(n: usize) -> ExtSeq<T> {
    let head = ExtSeq::periodic(Vec::new(), vec![T::one(), T::one(), T::zero()]);
    ExtSeq::splice(&head, &ExtSeq::zero(), 3 * n)
}

/// `E_n` = identity on `1..=2(n-1)`, halving pairs after; `n >= 1`.
pub fn l1_filtration<T: Scalar>() -> Filtration<T> {
    Filtration::new(1, Vec::new(), SpaceKind::L1).with_rule(LevelRule {
        base: halving_pairs(),
        slope: 2,
        offset: -2,
    })
}

/// `x_n = (1, 0)^(n-1)` followed by `(0, 2^-(k-1))` on pair `k >= n`.
pub fn l1_martingale<T: Scalar>(horizon: usize) -> Martingale<T> {
    let rule = TermRule {
        head: ExtSeq::periodic(Vec::new(), vec![T::one(), T::zero()]),
        rest: ExtSeq::geometric(Vec::new(), r(1, 2), vec![T::zero(), T::one()]),
        slope: 2,
        offset: -2,
    };
    Martingale::with_rule(1, Vec::new(), rule, horizon).expect("rule covers the horizon")
}

/// `(P E_0, E_0, E_1, ...)` indexed from 0 on ℓ∞.
pub fn banach_filtration<T: Scalar>() -> Filtration<T> {
    let e0 = Operator::Block(pair_average());
    let pe0 = banach_projection()
        .compose(&e0)
        .expect("rank-one composites always exist");
    Filtration::new(0, vec![pe0], SpaceKind::Linf).with_rule(LevelRule {
        base: pair_average(),
        slope: 2,
        offset: -2,
    })
}

/// `(x_0, x_0, x_1, x_2, ...)` for the pair-averaging `x_n`, indexed from 0.
pub fn banach_martingale<T: Scalar>(horizon: usize) -> Martingale<T> {
    let rule = TermRule {
        head: ExtSeq::periodic(Vec::new(), vec![-T::one(), T::one()]),
        rest: ExtSeq::zero(),
        slope: 2,
        offset: -2,
    };
    Martingale::with_rule(0, vec![ExtSeq::zero()], rule, horizon).expect("rule covers the horizon")
}

/// The martingale with every term equal to `c`.
pub fn constant_martingale<T: Scalar>(start: usize, horizon: usize, c: ExtSeq<T>) -> Martingale<T> {
    let mut m = Martingale::new(start, vec![c; horizon + 1 - start]);
    m.certificate = Some(crate::mart::NormCertificate::EventuallyConstant { from: start });
    m
}
