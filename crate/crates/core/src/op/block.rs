//! Block-periodic operators.
//!
//! A head matrix acts on coordinates `1..=head_dim`; tail block `k` (0-based)
//! maps the `period` coordinates it covers by `Σ ratio^k * M` over the modes.
//! A single ratio-1 mode is the classical repeating `tail_block`.

use super::matrix::Matrix;
use crate::error::{Error, Result};
use crate::scalar::{lcm, pow, Scalar};
use crate::seq::{dominance, ExtSeq, Mode};

#[derive(Clone, Debug, PartialEq)]
pub struct OpMode<T> {
    pub ratio: T,
    pub block: Matrix<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlockOp<T> {
    head: Matrix<T>,
    period: usize,
    // sorted by ratio, largest first; ratios distinct; blocks nonzero
    modes: Vec<OpMode<T>>,
}

impl<T: Scalar> BlockOp<T> {
    /// Head matrix plus one repeating tail block.
    pub fn new(head: Matrix<T>, tail_block: Matrix<T>) -> Result<Self> {
        let period = tail_block.rows();
        Self::with_modes(
            head,
            period,
            vec![OpMode {
                ratio: T::one(),
                block: tail_block,
            }],
        )
    }

    pub fn with_modes(head: Matrix<T>, period: usize, modes: Vec<OpMode<T>>) -> Result<Self> {
        if !head.is_square() {
            return Err(Error::invalid("head matrix must be square"));
        }
        if period == 0 {
            return Err(Error::invalid("period must be at least 1"));
        }
        for m in &modes {
            if m.block.rows() != period || m.block.cols() != period {
                return Err(Error::invalid(format!(
                    "tail blocks must be {period}x{period}"
                )));
            }
            if !(m.ratio > T::zero() && m.ratio <= T::one()) {
                return Err(Error::invalid(format!(
                    "mode ratio {} outside (0, 1]",
                    m.ratio
                )));
            }
        }
        Ok(Self::build(head, period, modes))
    }

    pub fn identity() -> Self {
        Self::build(
            Matrix::zeros(0, 0),
            1,
            vec![OpMode {
                ratio: T::one(),
                block: Matrix::identity(1),
            }],
        )
    }

    /// An operator on `R^d`: everything past coordinate `d` is sent to zero.
    pub fn finite(m: Matrix<T>) -> Result<Self> {
        Self::with_modes(m, 1, Vec::new())
    }

    /// Identity on coordinates `1..=cut`, `base` on every later coordinate.
    /// `cut` must fall on a block boundary of `base`.
    pub fn splice_identity(base: &Self, cut: usize) -> Result<Self> {
        let h = base.head_dim();
        if cut < h || !(cut - h).is_multiple_of(base.period) {
            return Err(Error::IncompatibleShape(format!(
                "cut {cut} is not a block boundary of an operator with head {h} and period {}",
                base.period
            )));
        }
        let mut op = base.with_shape(cut, base.period);
        op.head = Matrix::identity(cut);
        Ok(op)
    }

    pub(crate) fn build(head: Matrix<T>, period: usize, modes: Vec<OpMode<T>>) -> Self {
        Self {
            head,
            period,
            modes: merge_op_modes(modes),
        }
    }

    pub fn head(&self) -> &Matrix<T> {
        &self.head
    }

    pub fn head_dim(&self) -> usize {
        self.head.rows()
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn modes(&self) -> &[OpMode<T>] {
        &self.modes
    }

    /// The repeating part of the tail (the ratio-1 mode), zero if absent.
    pub fn periodic_block(&self) -> Matrix<T> {
        self.modes
            .iter()
            .find(|m| m.ratio.is_one())
            .map(|m| m.block.clone())
            .unwrap_or_else(|| Matrix::zeros(self.period, self.period))
    }

    /// Matrix acting on tail block `k`.
    pub fn tail_block(&self, k: usize) -> Matrix<T> {
        self.modes
            .iter()
            .fold(Matrix::zeros(self.period, self.period), |acc, m| {
                acc.add(&m.block.scale(&pow(&m.ratio, k)))
            })
    }

    /// Same action with a longer head (`head_dim + k·period`) and a period
    /// multiplied by an integer factor.
    pub fn with_shape(&self, head_dim: usize, period: usize) -> Self {
        let h = self.head_dim();
        assert!(head_dim >= h && (head_dim - h).is_multiple_of(self.period));
        assert!(period.is_multiple_of(self.period));
        let absorbed = (head_dim - h) / self.period;
        let mut blocks = vec![self.head.clone()];
        blocks.extend((0..absorbed).map(|k| self.tail_block(k)));
        let head = Matrix::block_diag(&blocks);
        let modes: Vec<OpMode<T>> = self
            .modes
            .iter()
            .map(|m| OpMode {
                ratio: m.ratio.clone(),
                block: m.block.scale(&pow(&m.ratio, absorbed)),
            })
            .collect();
        let d = period / self.period;
        let modes = if d == 1 {
            modes
        } else {
            modes
                .into_iter()
                .map(|m| {
                    let parts: Vec<Matrix<T>> =
                        (0..d).map(|s| m.block.scale(&pow(&m.ratio, s))).collect();
                    OpMode {
                        ratio: pow(&m.ratio, d),
                        block: Matrix::block_diag(&parts),
                    }
                })
                .collect()
        };
        Self {
            head,
            period,
            modes,
        }
    }

    pub fn apply(&self, a: &ExtSeq<T>) -> ExtSeq<T> {
        let period = lcm(self.period, a.period());
        let head_dim = fit_head(self.head_dim(), self.period, a.prefix().len());
        let op = self.with_shape(head_dim, period);
        let (prefix, seq_modes) = a.aligned(head_dim, period);
        let out_prefix = op.head.mul_vec(&prefix);
        let mut modes = Vec::with_capacity(op.modes.len() * seq_modes.len());
        for om in &op.modes {
            for sm in &seq_modes {
                modes.push(Mode {
                    ratio: om.ratio.clone() * sm.ratio.clone(),
                    block: om.block.mul_vec(&sm.block),
                });
            }
        }
        ExtSeq::from_modes(out_prefix, period, modes)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        let (h, q) = common_shape(
            (self.head_dim(), self.period),
            (other.head_dim(), other.period),
        )
        .ok_or_else(|| {
            Error::IncompatibleShape(format!(
                "blocks of (head {}, period {}) and (head {}, period {}) never align",
                self.head_dim(),
                self.period,
                other.head_dim(),
                other.period
            ))
        })?;
        let a = self.with_shape(h, q);
        let b = other.with_shape(h, q);
        let mut modes = Vec::new();
        for ma in &a.modes {
            for mb in &b.modes {
                modes.push(OpMode {
                    ratio: ma.ratio.clone() * mb.ratio.clone(),
                    block: ma.block.mul(&mb.block),
                });
            }
        }
        Ok(Self::build(a.head.mul(&b.head), q, modes))
    }

    /// Representational equality after normalising to a common shape, or
    /// `None` when no common shape exists.
    pub(crate) fn same_as(&self, other: &Self) -> Option<bool> {
        let (h, q) = common_shape(
            (self.head_dim(), self.period),
            (other.head_dim(), other.period),
        )?;
        let a = self.with_shape(h, q);
        let b = other.with_shape(h, q);
        Some(a.head == b.head && merge_op_modes(a.modes) == merge_op_modes(b.modes))
    }

    /// Entry `(i, j)` of every tail block as an exponential sum, largest
    /// ratio first.
    pub(crate) fn entry_terms(&self, i: usize, j: usize) -> Vec<(T, T)> {
        self.modes
            .iter()
            .map(|m| (m.ratio.clone(), m.block[(i, j)].clone()))
            .collect()
    }

    pub fn is_positive(&self) -> bool {
        let head_ok =
            (0..self.head_dim()).all(|i| self.head.row(i).iter().all(|x| *x >= T::zero()));
        head_ok
            && (0..self.period)
                .all(|i| (0..self.period).all(|j| terms_nonneg(&self.entry_terms(i, j))))
    }

    /// Exact test: every output coordinate reads at most one input
    /// coordinate, with a nonnegative weight.
    pub fn is_lattice_hom(&self) -> bool {
        let head_ok = (0..self.head_dim()).all(|i| {
            let row = self.head.row(i);
            row.iter().all(|x| *x >= T::zero()) && row.iter().filter(|x| !x.is_zero()).count() <= 1
        });
        // An exponential sum that is not identically zero vanishes at finitely
        // many k, so two live entries in one row overlap for some block.
        head_ok
            && (0..self.period).all(|i| {
                let live: Vec<Vec<(T, T)>> = (0..self.period)
                    .map(|j| self.entry_terms(i, j))
                    .filter(|t| t.iter().any(|(_, c)| !c.is_zero()))
                    .collect();
                live.len() <= 1 && live.iter().all(|t| terms_nonneg(t))
            })
    }

    /// Row sums as a sequence (the image of the constant-one sequence).
    pub fn row_sum_seq(&self) -> ExtSeq<T> {
        self.apply(&ExtSeq::one())
    }

    /// Column sums as a sequence.
    pub fn col_sum_seq(&self) -> ExtSeq<T> {
        let modes = self
            .modes
            .iter()
            .map(|m| Mode {
                ratio: m.ratio.clone(),
                block: m.block.col_sums(),
            })
            .collect();
        ExtSeq::from_modes(self.head.col_sums(), self.period, modes)
    }
}

/// Smallest head length `>= min_len` reachable from `head` in steps of `period`.
pub(crate) fn fit_head(head: usize, period: usize, min_len: usize) -> usize {
    if min_len <= head {
        head
    } else {
        head + (min_len - head).div_ceil(period) * period
    }
}

/// Smallest common `(head, period)` both shapes normalise to.
pub(crate) fn common_shape(a: (usize, usize), b: (usize, usize)) -> Option<(usize, usize)> {
    let q = lcm(a.1, b.1);
    let start = a.0.max(b.0);
    (start..start + q)
        .find(|h| (h - a.0).is_multiple_of(a.1) && (h - b.0).is_multiple_of(b.1))
        .map(|h| (h, q))
}

/// `Σ c ρ^k >= 0` for every `k >= 0`.
pub(crate) fn terms_nonneg<T: Scalar>(terms: &[(T, T)]) -> bool {
    match dominance(terms) {
        None => true,
        Some((settle, sign)) => {
            sign > T::zero() && (0..settle).all(|k| crate::seq::eval_terms(terms, k) >= T::zero())
        }
    }
}

fn merge_op_modes<T: Scalar>(mut modes: Vec<OpMode<T>>) -> Vec<OpMode<T>> {
    modes.sort_by(|a, b| b.ratio.partial_cmp(&a.ratio).expect("comparable ratios"));
    let mut out: Vec<OpMode<T>> = Vec::with_capacity(modes.len());
    for m in modes {
        match out.last_mut() {
            Some(last) if last.ratio == m.ratio => last.block = last.block.add(&m.block),
            _ => out.push(m),
        }
    }
    out.retain(|m| !m.block.is_zero());
    out
}
