//! Proptest strategies shared by the unit tests.

use proptest::prelude::*;

use crate::mart::{Filtration, Martingale};
use crate::op::{BlockOp, Functional, Matrix, OpMode, Operator};
use crate::seq::{Mode, SpaceKind};
use crate::{Rational, Scalar, Seq};

pub fn q(n: i64, d: i64) -> Rational {
    Rational::ratio(n, d)
}

pub fn ints(xs: &[i64]) -> Vec<Rational> {
    xs.iter().map(|&x| q(x, 1)).collect()
}

pub fn small() -> impl Strategy<Value = Rational> {
    (-4i64..=4, prop::sample::select(vec![1i64, 2, 3])).prop_map(|(n, d)| q(n, d))
}

pub fn small_nonneg() -> impl Strategy<Value = Rational> {
    (0i64..=4, prop::sample::select(vec![1i64, 2, 3])).prop_map(|(n, d)| q(n, d))
}

pub fn ratio() -> impl Strategy<Value = Rational> {
    prop::sample::select(vec![q(1, 1), q(1, 2), q(1, 3), q(2, 3)])
}

prop_compose! {
    pub fn any_seq()(
        prefix in prop::collection::vec(small(), 0..4),
        period in 1usize..4,
        modes in prop::collection::vec((ratio(), prop::collection::vec(small(), 3)), 0..3),
    ) -> Seq {
        let modes = modes
            .into_iter()
            .map(|(ratio, block)| Mode { ratio, block: block[..period].to_vec() })
            .collect();
        Seq::from_modes(prefix, period, modes)
    }
}

fn square(n: usize, entries: &[Rational]) -> Matrix<Rational> {
    Matrix::from_rows(
        (0..n)
            .map(|i| entries[i * n..(i + 1) * n].to_vec())
            .collect(),
    )
}

fn block_from(
    h: usize,
    p: usize,
    head: Vec<Rational>,
    modes: Vec<(Rational, Vec<Rational>)>,
) -> BlockOp<Rational> {
    let modes = modes
        .into_iter()
        .map(|(ratio, entries)| OpMode {
            ratio,
            block: square(p, &entries),
        })
        .collect();
    BlockOp::with_modes(square(h, &head), p, modes).unwrap()
}

prop_compose! {
    pub fn any_block()(
        h in 0usize..3,
        p in 1usize..3,
        head in prop::collection::vec(small(), 4),
        modes in prop::collection::vec((ratio(), prop::collection::vec(small(), 4)), 0..3),
    ) -> BlockOp<Rational> {
        block_from(h, p, head, modes)
    }
}

prop_compose! {
    pub fn nonneg_block()(
        h in 0usize..3,
        p in 1usize..3,
        head in prop::collection::vec(small_nonneg(), 4),
        modes in prop::collection::vec((ratio(), prop::collection::vec(small_nonneg(), 4)), 0..3),
    ) -> BlockOp<Rational> {
        block_from(h, p, head, modes)
    }
}

prop_compose! {
    /// Each output coordinate copies a scaled input coordinate of its block.
    pub fn hom_block()(
        h in 0usize..3,
        p in 1usize..3,
        picks in prop::collection::vec((0usize..2, small_nonneg()), 4),
        ratios in prop::collection::vec(ratio(), 2),
    ) -> BlockOp<Rational> {
        let pick = |n: usize, offset: usize| {
            let mut m = Matrix::zeros(n, n);
            for i in 0..n {
                let (j, w) = &picks[offset + i];
                m[(i, j % n)] = w.clone();
            }
            m
        };
        let block = pick(p, 2);
        let modes = vec![OpMode { ratio: ratios[0].clone(), block }];
        BlockOp::with_modes(pick(h, 0), p, modes).unwrap()
    }
}

pub fn any_operator() -> impl Strategy<Value = Operator<Rational>> {
    prop_oneof![
        3 => any_block().prop_map(Operator::Block),
        1 => (
            prop::collection::vec(small(), 0..3),
            prop::collection::vec(small(), 1..3),
            any_seq(),
        )
            .prop_map(|(w, r, out)| Operator::rank_one(Functional::new(w, r), out)),
    ]
}

/// Weighted averages over contiguous blocks of `R^d`; `cuts[j]` splits
/// between coordinates `j` and `j + 1`.
pub fn block_average(weights: &[Rational], cuts: &[bool]) -> Operator<Rational> {
    let d = weights.len();
    let mut m = Matrix::zeros(d, d);
    let mut lo = 0;
    for hi in 1..=d {
        if hi == d || cuts[hi - 1] {
            let total = weights[lo..hi].iter().fold(q(0, 1), |s, w| s + w.clone());
            for i in lo..hi {
                for j in lo..hi {
                    m[(i, j)] = weights[j].clone() / total.clone();
                }
            }
            lo = hi;
        }
    }
    Operator::Block(BlockOp::finite(m).unwrap())
}

prop_compose! {
    /// Conditional expectations on nested contiguous partitions of `R^d`
    /// with positive weights, indexed from 0, and the martingale they
    /// generate from a random last term.
    pub fn nested_instance()(
        d in 2usize..6,
        levels in 1usize..4,
        weights in prop::collection::vec(1i64..5, 5),
        last in prop::collection::vec(-4i64..5, 5),
        bits in prop::collection::vec(prop::bool::weighted(0.35), 12),
    ) -> (Filtration<Rational>, Martingale<Rational>) {
        let w = ints(&weights[..d]);
        let mut cuts = vec![false; d - 1];
        let mut ops = Vec::new();
        for l in 0..levels {
            for (j, c) in cuts.iter_mut().enumerate() {
                *c |= bits[(l * 4 + j) % bits.len()];
            }
            ops.push(block_average(&w, &cuts));
        }
        let f = Filtration::new(0, ops, SpaceKind::FiniteDim(d));
        let x = f.martingale_from(&Seq::finite(ints(&last[..d])), levels - 1).unwrap();
        (f, x)
    }
}
