use std::fmt;

use super::{sup_nonneg, ExtSeq};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NormKind {
    /// `sup |a_i|`
    Sup,
    /// `Σ |a_i|`
    L1,
    /// `sup |a_i| + limsup |a_i|`, an equivalent lattice norm on ℓ∞.
    SupPlusLimsup,
}

impl NormKind {
    pub fn name(self) -> &'static str {
        match self {
            NormKind::Sup => "sup",
            NormKind::L1 => "l1",
            NormKind::SupPlusLimsup => "sup-limsup",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "sup" => Some(NormKind::Sup),
            "l1" => Some(NormKind::L1),
            "sup-limsup" | "sup_limsup" => Some(NormKind::SupPlusLimsup),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum NormValue<T> {
    Finite(T),
    Infinite,
}

impl<T: Scalar> NormValue<T> {
    pub fn finite(&self) -> Option<&T> {
        match self {
            NormValue::Finite(v) => Some(v),
            NormValue::Infinite => None,
        }
    }

    pub fn expect_finite(self) -> T {
        match self {
            NormValue::Finite(v) => v,
            NormValue::Infinite => panic!("norm is infinite"),
        }
    }

    /// Total order with `Infinite` on top.
    pub fn le(&self, other: &Self) -> bool {
        match (self, other) {
            (_, NormValue::Infinite) => true,
            (NormValue::Infinite, NormValue::Finite(_)) => false,
            (NormValue::Finite(a), NormValue::Finite(b)) => a <= b,
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self.le(&other) {
            other
        } else {
            self
        }
    }
}

impl<T: Scalar> fmt::Display for NormValue<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormValue::Finite(v) => write!(f, "{}", v.to_text()),
            NormValue::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SpaceKind {
    FiniteDim(usize),
    /// ℝ^ℕ
    SeqAll,
    /// convergent sequences
    C,
    /// null sequences
    C0,
    L1,
    Linf,
}

impl SpaceKind {
    pub fn name(self) -> String {
        match self {
            SpaceKind::FiniteDim(d) => format!("R^{d}"),
            SpaceKind::SeqAll => "R^N".into(),
            SpaceKind::C => "c".into(),
            SpaceKind::C0 => "c0".into(),
            SpaceKind::L1 => "l1".into(),
            SpaceKind::Linf => "linf".into(),
        }
    }
}

impl<T: Scalar> ExtSeq<T> {
    pub fn norm(&self, kind: NormKind) -> NormValue<T> {
        match kind {
            NormKind::Sup => NormValue::Finite(self.abs().sup_of_nonneg()),
            NormKind::L1 => {
                if self.periodic_mode().is_some() {
                    return NormValue::Infinite;
                }
                let a = self.abs();
                let head = a.prefix.iter().fold(T::zero(), |acc, x| acc + x.clone());
                let tail = a.modes.iter().fold(T::zero(), |acc, m| {
                    let block = m.block.iter().fold(T::zero(), |s, x| s + x.clone());
                    acc + block / (T::one() - m.ratio.clone())
                });
                NormValue::Finite(head + tail)
            }
            NormKind::SupPlusLimsup => {
                let a = self.abs();
                NormValue::Finite(a.sup_of_nonneg() + a.limsup_of_nonneg())
            }
        }
    }

    /// `limsup |a_i|`.
    pub fn limsup_abs(&self) -> T {
        self.abs().limsup_of_nonneg()
    }

    fn limsup_of_nonneg(&self) -> T {
        self.periodic_mode()
            .map(|b| b.iter().fold(T::zero(), |m, x| T::max_of(&m, x)))
            .unwrap_or_else(T::zero)
    }

    fn sup_of_nonneg(&self) -> T {
        let head = self.prefix.iter().fold(T::zero(), |m, x| T::max_of(&m, x));
        (0..self.period).fold(head, |m, j| {
            let terms: Vec<(T, T)> = self
                .modes
                .iter()
                .map(|md| (md.ratio.clone(), md.block[j].clone()))
                .collect();
            T::max_of(&m, &sup_nonneg(&terms))
        })
    }

    pub fn in_space(&self, space: SpaceKind) -> bool {
        match space {
            SpaceKind::FiniteDim(d) => self.modes.is_empty() && self.prefix.len() <= d,
            SpaceKind::SeqAll | SpaceKind::Linf => true,
            SpaceKind::C => match self.periodic_mode() {
                None => true,
                Some(b) => b.iter().all(|x| *x == b[0]),
            },
            SpaceKind::C0 | SpaceKind::L1 => self.periodic_mode().is_none(),
        }
    }

    /// The value every Banach limit takes on this sequence: the mean of the
    /// periodic part of the tail. Decaying modes contribute nothing.
    pub fn limit_functional(&self) -> T {
        match self.periodic_mode() {
            None => T::zero(),
            Some(b) => b.iter().fold(T::zero(), |s, x| s + x.clone()) / T::of_usize(b.len()),
        }
    }
}
