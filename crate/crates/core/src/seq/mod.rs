//! Exact sequences with a finite prefix and a symbolic tail.
//!
//! A tail is a finite sum of *geometric modes*: with period `p`, tail block `k`
//! (0-based) contributes `ratio^k * block` to the coordinates it covers. Ratios
//! live in `(0, 1]`; a single ratio-1 mode is an ordinary periodic tail. The
//! class is closed under linear combinations, coordinatewise lattice
//! operations and the block operators of [`crate::op`].
//!
//! Values are kept in a canonical form (minimal period, then minimal prefix),
//! so structural equality is sequence equality.

mod expsum;
mod norm;

use std::fmt;
use std::ops::{Add, Neg, Sub};

pub use norm::{NormKind, NormValue, SpaceKind};

pub(crate) use expsum::{dominance, eval as eval_terms, sup_nonneg};

use crate::error::{Error, Result};
use crate::scalar::{lcm, pow, Scalar};

/// One geometric component of a tail.
#[derive(Clone, Debug, PartialEq)]
pub struct Mode<T> {
    pub ratio: T,
    pub block: Vec<T>,
}

/// Public view of a tail.
#[derive(Clone, Debug, PartialEq)]
pub enum Tail<T> {
    Zero,
    Const(T),
    Periodic(Vec<T>),
    /// Several modes, or a single mode with ratio below one. All blocks share
    /// one length.
    Geometric(Vec<Mode<T>>),
}

/// An exact sequence `(a_1, a_2, ...)`, 1-indexed.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtSeq<T> {
    prefix: Vec<T>,
    period: usize,
    // sorted by ratio, largest first; ratios distinct; blocks nonzero, len == period
    modes: Vec<Mode<T>>,
}

impl<T: Scalar> ExtSeq<T> {
    pub fn new(prefix: Vec<T>, tail: Tail<T>) -> Result<Self> {
        let (period, modes) = match tail {
            Tail::Zero => (1, Vec::new()),
            Tail::Const(c) => (
                1,
                vec![Mode {
                    ratio: T::one(),
                    block: vec![c],
                }],
            ),
            Tail::Periodic(block) => {
                if block.is_empty() {
                    return Err(Error::invalid("periodic block must be nonempty"));
                }
                (
                    block.len(),
                    vec![Mode {
                        ratio: T::one(),
                        block,
                    }],
                )
            }
            Tail::Geometric(modes) => {
                let period = modes.first().map(|m| m.block.len()).unwrap_or(1);
                for m in &modes {
                    if m.block.is_empty() || m.block.len() != period {
                        return Err(Error::invalid(
                            "geometric modes need nonempty blocks of one common length",
                        ));
                    }
                    if !(m.ratio > T::zero() && m.ratio <= T::one()) {
                        return Err(Error::invalid(format!(
                            "mode ratio {} outside (0, 1]",
                            m.ratio
                        )));
                    }
                }
                (period, modes)
            }
        };
        Ok(Self::build(prefix, period, modes))
    }

    pub fn zero() -> Self {
        Self {
            prefix: Vec::new(),
            period: 1,
            modes: Vec::new(),
        }
    }

    pub fn constant(c: T) -> Self {
        Self::build(
            Vec::new(),
            1,
            vec![Mode {
                ratio: T::one(),
                block: vec![c],
            }],
        )
    }

    pub fn one() -> Self {
        Self::constant(T::one())
    }

    /// Finitely supported sequence.
    pub fn finite(prefix: Vec<T>) -> Self {
        Self::build(prefix, 1, Vec::new())
    }

    pub fn periodic(prefix: Vec<T>, block: Vec<T>) -> Self {
        assert!(!block.is_empty(), "periodic block must be nonempty");
        let period = block.len();
        Self::build(
            prefix,
            period,
            vec![Mode {
                ratio: T::one(),
                block,
            }],
        )
    }

    /// Prefix followed by `ratio^k * block` on tail block `k`.
    pub fn geometric(prefix: Vec<T>, ratio: T, block: Vec<T>) -> Self {
        Self::new(prefix, Tail::Geometric(vec![Mode { ratio, block }]))
            .expect("valid geometric tail")
    }

    pub(crate) fn from_modes(prefix: Vec<T>, period: usize, modes: Vec<Mode<T>>) -> Self {
        Self::build(prefix, period, modes)
    }

    pub fn prefix(&self) -> &[T] {
        &self.prefix
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn modes(&self) -> &[Mode<T>] {
        &self.modes
    }

    pub fn tail(&self) -> Tail<T> {
        match self.modes.as_slice() {
            [] => Tail::Zero,
            [m] if m.ratio.is_one() => {
                if m.block.len() == 1 {
                    Tail::Const(m.block[0].clone())
                } else {
                    Tail::Periodic(m.block.clone())
                }
            }
            _ => Tail::Geometric(self.modes.clone()),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.prefix.is_empty() && self.modes.is_empty()
    }

    /// The ratio-1 part of the tail, if any.
    pub fn periodic_mode(&self) -> Option<&[T]> {
        self.modes
            .iter()
            .find(|m| m.ratio.is_one())
            .map(|m| m.block.as_slice())
    }

    /// Coordinate `i >= 1`.
    pub fn coord(&self, i: usize) -> T {
        assert!(i >= 1, "coordinates are 1-indexed");
        if i <= self.prefix.len() {
            return self.prefix[i - 1].clone();
        }
        tail_value(&self.modes, self.period, i - self.prefix.len() - 1)
    }

    pub fn coords(&self, n: usize) -> Vec<T> {
        (1..=n).map(|i| self.coord(i)).collect()
    }

    /// Prefix of length `len >= prefix().len()` and the tail that follows it,
    /// re-expressed with period `period` (a multiple of the current period).
    pub(crate) fn aligned(&self, len: usize, period: usize) -> (Vec<T>, Vec<Mode<T>>) {
        assert!(len >= self.prefix.len());
        assert!(period.is_multiple_of(self.period));
        let mut prefix = self.prefix.clone();
        for t in 0..len - self.prefix.len() {
            prefix.push(tail_value(&self.modes, self.period, t));
        }
        let shifted = shift_modes(&self.modes, self.period, len - self.prefix.len());
        (prefix, reperiod_modes(&shifted, self.period, period))
    }

    pub fn scale(&self, alpha: &T) -> Self {
        if alpha.is_zero() {
            return Self::zero();
        }
        Self::build(
            self.prefix
                .iter()
                .map(|x| x.clone() * alpha.clone())
                .collect(),
            self.period,
            self.modes
                .iter()
                .map(|m| Mode {
                    ratio: m.ratio.clone(),
                    block: m.block.iter().map(|x| x.clone() * alpha.clone()).collect(),
                })
                .collect(),
        )
    }

    /// `alpha * a + beta * b`.
    pub fn linear(a: &Self, b: &Self, alpha: &T, beta: &T) -> Self {
        let len = a.prefix.len().max(b.prefix.len());
        let period = lcm(a.period, b.period);
        let (pa, ma) = a.aligned(len, period);
        let (pb, mb) = b.aligned(len, period);
        let prefix = pa
            .into_iter()
            .zip(pb)
            .map(|(x, y)| x * alpha.clone() + y * beta.clone())
            .collect();
        let mut modes = scale_modes(ma, alpha);
        modes.extend(scale_modes(mb, beta));
        Self::build(prefix, period, modes)
    }

    /// Coordinatewise absolute value.
    pub fn abs(&self) -> Self {
        let st = self.stabilized();
        let prefix = st.prefix.into_iter().map(|x| x.abs()).collect();
        let modes = st
            .modes
            .into_iter()
            .map(|m| Mode {
                ratio: m.ratio,
                block: m
                    .block
                    .into_iter()
                    .zip(&st.signs)
                    .map(|(x, s)| x * s.clone())
                    .collect(),
            })
            .collect();
        Self::build(prefix, st.period, modes)
    }

    pub fn join(&self, other: &Self) -> Self {
        let sum = self + other;
        let gap = (self - other).abs();
        Self::linear(&sum, &gap, &crate::scalar::half(), &crate::scalar::half())
    }

    pub fn meet(&self, other: &Self) -> Self {
        let sum = self + other;
        let gap = (self - other).abs();
        Self::linear(
            &sum,
            &gap,
            &crate::scalar::half(),
            &-crate::scalar::half::<T>(),
        )
    }

    pub fn is_nonneg(&self) -> bool {
        let st = self.stabilized();
        st.prefix.iter().all(|x| *x >= T::zero()) && st.signs.iter().all(|s| *s >= T::zero())
    }

    /// `self <= other` coordinatewise.
    pub fn leq(&self, other: &Self) -> bool {
        (other - self).is_nonneg()
    }

    /// Drops the first coordinate.
    pub fn shift(&self) -> Self {
        if !self.prefix.is_empty() {
            return Self::build(self.prefix[1..].to_vec(), self.period, self.modes.clone());
        }
        let modes = shift_modes(&self.modes, self.period, 1);
        Self::build(Vec::new(), self.period, modes)
    }

    /// Drops the first `k` coordinates.
    pub fn skip(&self, k: usize) -> Self {
        let len = k.max(self.prefix.len());
        let (prefix, modes) = self.aligned(len, self.period);
        Self::build(prefix[k..].to_vec(), self.period, modes)
    }

    /// Copy with coordinate `i` (1-indexed) replaced by `v`.
    pub fn with_coord(&self, i: usize, v: T) -> Self {
        let mut bump = vec![T::zero(); i];
        bump[i - 1] = v - self.coord(i);
        self + &Self::finite(bump)
    }

    /// Coordinates `1..=cut` from `head`, the rest from `rest`.
    pub fn splice(head: &Self, rest: &Self, cut: usize) -> Self {
        let len = cut.max(rest.prefix.len());
        let (mut prefix, modes) = rest.aligned(len, rest.period);
        for (i, slot) in prefix.iter_mut().enumerate().take(cut) {
            *slot = head.coord(i + 1);
        }
        Self::build(prefix, rest.period, modes)
    }

    /// Index of the first nonzero coordinate.
    pub fn first_nonzero(&self) -> Option<usize> {
        if self.is_zero() {
            return None;
        }
        if let Some(i) = self.prefix.iter().position(|x| !x.is_zero()) {
            return Some(i + 1);
        }
        // a nonzero residue sum of m modes vanishes at most m - 1 times
        let blocks = self.modes.len() + 1;
        (0..blocks * self.period)
            .find(|&t| !tail_value(&self.modes, self.period, t).is_zero())
            .map(|t| self.prefix.len() + t + 1)
    }

    /// Index of the first strictly positive coordinate.
    pub fn first_positive(&self) -> Option<usize> {
        self.first_positive_on(1, 1)
    }

    /// First index `start + step * k` (k >= 0) holding a strictly positive
    /// coordinate, or `None` when the whole progression is `<= 0`.
    pub fn first_positive_on(&self, start: usize, step: usize) -> Option<usize> {
        assert!(start >= 1 && step >= 1);
        let st = self.stabilized();
        let len = st.prefix.len();
        let mut pos = start;
        while pos <= len {
            if st.prefix[pos - 1] > T::zero() {
                return Some(pos);
            }
            pos += step;
        }
        // past the stabilized prefix every coordinate has its residue's sign,
        // and the progression visits all of its residues within lcm(step, period)
        let horizon = pos + lcm(step, st.period) + step;
        while pos <= horizon {
            let j = (pos - len - 1) % st.period;
            if st.signs[j] > T::zero() {
                return Some(pos);
            }
            pos += step;
        }
        None
    }

    fn build(prefix: Vec<T>, period: usize, modes: Vec<Mode<T>>) -> Self {
        let modes = merge_modes(modes);
        let (period, modes) = if modes.is_empty() {
            (1, modes)
        } else {
            reduce_period(period, modes)
        };
        let mut out = Self {
            prefix,
            period,
            modes,
        };
        out.absorb_prefix();
        out
    }

    fn absorb_prefix(&mut self) {
        let p = self.period;
        while let Some(last) = self.prefix.last() {
            let before = self.modes.iter().fold(T::zero(), |acc, m| {
                acc + m.block[p - 1].clone() / m.ratio.clone()
            });
            if *last != before {
                break;
            }
            self.prefix.pop();
            for m in &mut self.modes {
                let wrapped = m.block[p - 1].clone() / m.ratio.clone();
                m.block.rotate_right(1);
                m.block[0] = wrapped;
            }
        }
    }

    /// Unrolls the tail until every residue has a fixed strict sign.
    fn stabilized(&self) -> Stabilized<T> {
        let p = self.period;
        let mut settle = 0;
        let mut signs = vec![T::zero(); p];
        for (j, slot) in signs.iter_mut().enumerate() {
            let terms: Vec<(T, T)> = self
                .modes
                .iter()
                .map(|m| (m.ratio.clone(), m.block[j].clone()))
                .collect();
            if let Some((k, s)) = dominance(&terms) {
                settle = settle.max(k);
                *slot = s;
            }
        }
        let (prefix, modes) = self.aligned(self.prefix.len() + settle * p, p);
        Stabilized {
            prefix,
            period: p,
            modes,
            signs,
        }
    }
}

struct Stabilized<T> {
    prefix: Vec<T>,
    period: usize,
    modes: Vec<Mode<T>>,
    signs: Vec<T>,
}

pub(crate) fn tail_value<T: Scalar>(modes: &[Mode<T>], period: usize, t: usize) -> T {
    let (k, j) = (t / period, t % period);
    modes.iter().fold(T::zero(), |acc, m| {
        acc + pow(&m.ratio, k) * m.block[j].clone()
    })
}

/// Moves the start of the tail `s` coordinates to the right.
pub(crate) fn shift_modes<T: Scalar>(modes: &[Mode<T>], period: usize, s: usize) -> Vec<Mode<T>> {
    let (whole, r) = (s / period, s % period);
    modes
        .iter()
        .map(|m| {
            let scale = pow(&m.ratio, whole);
            let block = (0..period)
                .map(|j| {
                    let v = if j + r < period {
                        m.block[j + r].clone()
                    } else {
                        m.ratio.clone() * m.block[j + r - period].clone()
                    };
                    v * scale.clone()
                })
                .collect();
            Mode {
                ratio: m.ratio.clone(),
                block,
            }
        })
        .collect()
}

pub(crate) fn reperiod_modes<T: Scalar>(
    modes: &[Mode<T>],
    period: usize,
    new_period: usize,
) -> Vec<Mode<T>> {
    assert!(new_period.is_multiple_of(period));
    let d = new_period / period;
    if d == 1 {
        return modes.to_vec();
    }
    modes
        .iter()
        .map(|m| {
            let mut block = Vec::with_capacity(new_period);
            let mut factor = T::one();
            for _ in 0..d {
                block.extend(m.block.iter().map(|x| x.clone() * factor.clone()));
                factor = factor * m.ratio.clone();
            }
            Mode {
                ratio: factor,
                block,
            }
        })
        .collect()
}

fn scale_modes<T: Scalar>(modes: Vec<Mode<T>>, s: &T) -> Vec<Mode<T>> {
    modes
        .into_iter()
        .map(|m| Mode {
            ratio: m.ratio,
            block: m.block.into_iter().map(|x| x * s.clone()).collect(),
        })
        .collect()
}

fn merge_modes<T: Scalar>(mut modes: Vec<Mode<T>>) -> Vec<Mode<T>> {
    modes.sort_by(|a, b| b.ratio.partial_cmp(&a.ratio).expect("comparable ratios"));
    let mut out: Vec<Mode<T>> = Vec::with_capacity(modes.len());
    for m in modes {
        match out.last_mut() {
            Some(last) if last.ratio == m.ratio => {
                for (x, y) in last.block.iter_mut().zip(m.block) {
                    *x = x.clone() + y;
                }
            }
            _ => out.push(m),
        }
    }
    out.retain(|m| m.block.iter().any(|x| !x.is_zero()));
    out
}

fn reduce_period<T: Scalar>(period: usize, modes: Vec<Mode<T>>) -> (usize, Vec<Mode<T>>) {
    for q in (1..period).filter(|q| period.is_multiple_of(*q)) {
        let reduced: Option<Vec<Mode<T>>> =
            modes.iter().map(|m| reduce_mode(m, period, q)).collect();
        if let Some(reduced) = reduced {
            return (q, reduced);
        }
    }
    (period, modes)
}

/// Re-expresses one mode with the shorter period `q`, if possible.
fn reduce_mode<T: Scalar>(m: &Mode<T>, period: usize, q: usize) -> Option<Mode<T>> {
    let d = period / q;
    let b = &m.block;
    let i = (0..(d - 1) * q).find(|&i| !b[i].is_zero())?;
    let sigma = b[i + q].clone() / b[i].clone();
    if sigma <= T::zero() {
        return None;
    }
    for s in 0..d - 1 {
        for j in 0..q {
            if b[(s + 1) * q + j] != sigma.clone() * b[s * q + j].clone() {
                return None;
            }
        }
    }
    if pow(&sigma, d) != m.ratio {
        return None;
    }
    Some(Mode {
        ratio: sigma,
        block: b[..q].to_vec(),
    })
}

impl<T: Scalar> Add for &ExtSeq<T> {
    type Output = ExtSeq<T>;
    fn add(self, rhs: Self) -> ExtSeq<T> {
        ExtSeq::linear(self, rhs, &T::one(), &T::one())
    }
}

impl<T: Scalar> Sub for &ExtSeq<T> {
    type Output = ExtSeq<T>;
    fn sub(self, rhs: Self) -> ExtSeq<T> {
        ExtSeq::linear(self, rhs, &T::one(), &-T::one())
    }
}

impl<T: Scalar> Neg for &ExtSeq<T> {
    type Output = ExtSeq<T>;
    fn neg(self) -> ExtSeq<T> {
        self.scale(&-T::one())
    }
}

fn join_list<T: Scalar>(xs: &[T]) -> String {
    xs.iter()
        .map(|x| x.to_text())
        .collect::<Vec<_>>()
        .join(", ")
}

impl<T: Scalar> fmt::Display for ExtSeq<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}; ", join_list(&self.prefix))?;
        match self.tail() {
            Tail::Zero => write!(f, "zero)"),
            Tail::Const(c) => write!(f, "const {})", c.to_text()),
            Tail::Periodic(b) => write!(f, "periodic [{}])", join_list(&b)),
            Tail::Geometric(modes) => {
                let parts: Vec<String> = modes
                    .iter()
                    .map(|m| format!("{}^k [{}]", m.ratio.to_text(), join_list(&m.block)))
                    .collect();
                write!(f, "{})", parts.join(" + "))
            }
        }
    }
}

#[cfg(test)]
mod tests;
