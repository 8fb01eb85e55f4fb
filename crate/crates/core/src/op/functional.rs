use crate::scalar::{lcm, Scalar};
use crate::seq::ExtSeq;

/// A linear functional that reads finitely many coordinates plus the
/// repeating pattern a sequence settles into.
///
/// With the pattern aligned to start right after the head, the value is
/// `Σ head_weights[i]·a_{i+1} + Σ residue_weights[j]·pattern[j]`. Decaying
/// parts of a tail contribute nothing, so on eventually periodic sequences the
/// uniform residue weights `1/q` give the value every Banach limit takes.
#[derive(Clone, Debug, PartialEq)]
pub struct Functional<T> {
    head_weights: Vec<T>,
    residue_weights: Vec<T>,
}

impl<T: Scalar> Functional<T> {
    pub fn new(head_weights: Vec<T>, residue_weights: Vec<T>) -> Self {
        assert!(
            !residue_weights.is_empty(),
            "need at least one residue weight"
        );
        Self {
            head_weights,
            residue_weights,
        }
    }

    /// The period mean: limit of Cesàro averages.
    pub fn period_mean(period: usize) -> Self {
        let w = T::one() / T::of_usize(period);
        Self::new(Vec::new(), vec![w; period])
    }

    pub fn head_weights(&self) -> &[T] {
        &self.head_weights
    }

    pub fn residue_weights(&self) -> &[T] {
        &self.residue_weights
    }

    pub fn period(&self) -> usize {
        self.residue_weights.len()
    }

    pub fn is_zero(&self) -> bool {
        self.head_weights
            .iter()
            .chain(&self.residue_weights)
            .all(|x| x.is_zero())
    }

    pub fn is_nonneg(&self) -> bool {
        self.head_weights
            .iter()
            .chain(&self.residue_weights)
            .all(|x| *x >= T::zero())
    }

    pub fn is_nonpos(&self) -> bool {
        self.head_weights
            .iter()
            .chain(&self.residue_weights)
            .all(|x| *x <= T::zero())
    }

    pub fn scale(&self, s: &T) -> Self {
        Self {
            head_weights: self
                .head_weights
                .iter()
                .map(|x| x.clone() * s.clone())
                .collect(),
            residue_weights: self
                .residue_weights
                .iter()
                .map(|x| x.clone() * s.clone())
                .collect(),
        }
    }

    /// Same functional with head length `head_len` and a period that is a
    /// multiple of the current one.
    pub fn with_shape(&self, head_len: usize, period: usize) -> Self {
        assert!(head_len >= self.head_weights.len());
        assert!(period.is_multiple_of(self.period()));
        let mut head = self.head_weights.clone();
        let mut residues = self.residue_weights.clone();
        while head.len() < head_len {
            // the coordinate moves out of the pattern into the head, where it
            // carries no weight; the pattern now starts one step later
            head.push(T::zero());
            residues.rotate_left(1);
        }
        let d = period / self.period();
        let d_t = T::of_usize(d);
        let residues = (0..period)
            .map(|j| residues[j % residues.len()].clone() / d_t.clone())
            .collect();
        Self {
            head_weights: head,
            residue_weights: residues,
        }
    }

    pub fn eval(&self, a: &ExtSeq<T>) -> T {
        let head_len = self.head_weights.len().max(a.prefix().len());
        let period = lcm(self.period(), a.period());
        let f = self.with_shape(head_len, period);
        let (prefix, modes) = a.aligned(head_len, period);
        let head = f
            .head_weights
            .iter()
            .zip(&prefix)
            .fold(T::zero(), |s, (w, x)| s + w.clone() * x.clone());
        let pattern = modes.iter().find(|m| m.ratio.is_one());
        match pattern {
            None => head,
            Some(m) => f
                .residue_weights
                .iter()
                .zip(&m.block)
                .fold(head, |s, (w, x)| s + w.clone() * x.clone()),
        }
    }

    /// Extensional equality.
    pub fn same_as(&self, other: &Self) -> bool {
        let h = self.head_weights.len().max(other.head_weights.len());
        let q = lcm(self.period(), other.period());
        self.with_shape(h, q) == other.with_shape(h, q)
    }
}
