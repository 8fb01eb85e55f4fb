//! Positive operators in closed form: block-periodic matrices and rank-one
//! operators `a ↦ φ(a)·u` built from a [`Functional`].
//!
//! Order continuity is not checked at runtime. Every block operator reads
//! each output coordinate from finitely many input coordinates, so with
//! nonnegative entries it is order continuous by construction.

mod block;
mod functional;
mod matrix;


use std::fmt;

pub use block::{BlockOp, OpMode};
pub use functional::Functional;
pub use matrix::Matrix;

pub(crate) use block::fit_head;

use crate::error::{Error, Result};
use crate::scalar::{lcm, Scalar};
use crate::seq::{ExtSeq, NormKind};

/// `a ↦ functional(a) · out`.
#[derive(Clone, Debug, PartialEq)]
pub struct RankOne<T> {
    pub functional: Functional<T>,
    pub out: ExtSeq<T>,
}

impl<T: Scalar> RankOne<T> {
    pub fn is_zero(&self) -> bool {
        self.functional.is_zero() || self.out.is_zero()
    }
}

#[derive(Clone, Debug)]
pub enum Operator<T> {
    Block(BlockOp<T>),
    RankOne(RankOne<T>),
}

impl<T: Scalar> From<BlockOp<T>> for Operator<T> {
    fn from(b: BlockOp<T>) -> Self {
        Operator::Block(b)
    }
}

impl<T: Scalar> Operator<T> {
    pub fn identity() -> Self {
        Operator::Block(BlockOp::identity())
    }

    pub fn rank_one(functional: Functional<T>, out: ExtSeq<T>) -> Self {
        Operator::RankOne(RankOne { functional, out })
    }

    pub fn as_block(&self) -> Option<&BlockOp<T>> {
        match self {
            Operator::Block(b) => Some(b),
            Operator::RankOne(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Operator::Block(b) => b.head().is_zero() && b.modes().is_empty(),
            Operator::RankOne(r) => r.is_zero(),
        }
    }

    pub fn apply(&self, a: &ExtSeq<T>) -> ExtSeq<T> {
        match self {
            Operator::Block(b) => b.apply(a),
            Operator::RankOne(r) => r.out.scale(&r.functional.eval(a)),
        }
    }

    /// Image of the `j`-th unit vector (1-indexed).
    pub fn column(&self, j: usize) -> ExtSeq<T> {
        let mut e = vec![T::zero(); j];
        e[j - 1] = T::one();
        self.apply(&ExtSeq::finite(e))
    }

    /// `self ∘ other`. Two block operators whose blocks never line up have
    /// no block-periodic composite; that case is an `IncompatibleShape` error.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        Ok(match (self, other) {
            (Operator::Block(a), Operator::Block(b)) => Operator::Block(a.compose(b)?),
            (_, Operator::RankOne(r)) => {
                Operator::rank_one(r.functional.clone(), self.apply(&r.out))
            }
            (Operator::RankOne(r), Operator::Block(b)) => {
                Operator::rank_one(pull_back(&r.functional, b), r.out.clone())
            }
        })
    }

    /// Equality as maps on the sequence class.
    pub fn same_as(&self, other: &Self) -> bool {
        match (self, other) {
            (Operator::Block(a), Operator::Block(b)) => match a.same_as(b) {
                Some(eq) => eq,
                None => {
                    let q = lcm(a.period(), b.period());
                    let reach = a.head_dim().max(b.head_dim())
                        + q * (a.modes().len() + b.modes().len() + 2);
                    self.columns_agree(other, reach)
                }
            },
            (Operator::RankOne(r), Operator::RankOne(s)) => rank_one_eq(r, s),
            (Operator::Block(b), Operator::RankOne(r))
            | (Operator::RankOne(r), Operator::Block(b)) => {
                if r.is_zero() {
                    return other.is_zero() && self.is_zero();
                }
                // a nonzero residue weight sees arbitrarily late coordinates,
                // which no block operator does
                if r.functional.residue_weights().iter().any(|w| !w.is_zero()) {
                    return false;
                }
                let reach = b.head_dim().max(r.functional.head_weights().len())
                    + b.period() * (b.modes().len() + 2);
                self.columns_agree(other, reach)
            }
        }
    }

    fn columns_agree(&self, other: &Self, reach: usize) -> bool {
        (1..=reach).all(|j| self.column(j) == other.column(j))
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Operator::Block(b) => b.is_positive(),
            Operator::RankOne(r) => {
                r.is_zero()
                    || (r.functional.is_nonneg() && r.out.is_nonneg())
                    || (r.functional.is_nonpos() && (-&r.out).is_nonneg())
            }
        }
    }

    pub fn is_projection(&self) -> bool {
        self.compose(self)
            .map(|sq| sq.same_as(self))
            .unwrap_or(false)
    }

    pub fn is_lattice_hom(&self) -> Result<bool> {
        match self {
            Operator::Block(b) => Ok(b.is_lattice_hom()),
            Operator::RankOne(_) => Err(Error::Unsupported(
                "lattice-homomorphism test for rank-one operators".into(),
            )),
        }
    }

    /// Operator norm on ℓ∞ (`Sup`) or ℓ₁ (`L1`) for a positive block operator.
    pub fn norm(&self, kind: NormKind) -> Result<T> {
        let b = match self {
            Operator::Block(b) => b,
            Operator::RankOne(_) => {
                return Err(Error::Unsupported(
                    "operator norm of a rank-one operator".into(),
                ))
            }
        };
        if !b.is_positive() {
            return Err(Error::Precondition(
                "operator norm needs nonnegative entries".into(),
            ));
        }
        let sums = match kind {
            NormKind::Sup => b.row_sum_seq(),
            NormKind::L1 => b.col_sum_seq(),
            NormKind::SupPlusLimsup => {
                return Err(Error::Unsupported(
                    "operator norm under the sup-plus-limsup norm".into(),
                ))
            }
        };
        Ok(sums.norm(NormKind::Sup).expect_finite())
    }
}

impl<T: Scalar> PartialEq for Operator<T> {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}

/// `a ↦ f(b a)` as a functional.
fn pull_back<T: Scalar>(f: &Functional<T>, b: &BlockOp<T>) -> Functional<T> {
    let period = lcm(f.period(), b.period());
    let head = fit_head(b.head_dim(), b.period(), f.head_weights().len());
    let f = f.with_shape(head, period);
    let b = b.with_shape(head, period);
    let head_weights = b.head().transpose().mul_vec(f.head_weights());
    let residue_weights = b.periodic_block().transpose().mul_vec(f.residue_weights());
    Functional::new(head_weights, residue_weights)
}

fn rank_one_eq<T: Scalar>(r: &RankOne<T>, s: &RankOne<T>) -> bool {
    if r.is_zero() || s.is_zero() {
        return r.is_zero() && s.is_zero();
    }
    let i = r.out.first_nonzero().expect("nonzero output");
    let lambda = s.out.coord(i) / r.out.coord(i);
    !lambda.is_zero()
        && s.out == r.out.scale(&lambda)
        && r.functional.same_as(&s.functional.scale(&lambda))
}

impl<T: Scalar> fmt::Display for Operator<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operator::Block(b) => {
                write!(f, "block(head {}, period {}", b.head_dim(), b.period())?;
                for m in b.modes() {
                    write!(f, ", {}^k {}", m.ratio.to_text(), m.block)?;
                }
                write!(f, ")")
            }
            Operator::RankOne(r) => write!(
                f,
                "rank-one(head weights {:?}, residue weights {:?}) -> {}",
                r.functional
                    .head_weights()
                    .iter()
                    .map(|x| x.to_text())
                    .collect::<Vec<_>>(),
                r.functional
                    .residue_weights()
                    .iter()
                    .map(|x| x.to_text())
                    .collect::<Vec<_>>(),
                r.out
            ),
        }
    }
}
