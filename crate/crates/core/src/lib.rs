//! Exact computation with filtrations and abstract martingales on concrete
//! vector lattices of sequences.
//!
//! The numeric core ([`seq`], [`op`], [`mart`], [`lp`], [`lattice`]) is generic
//! over [`Scalar`]; the aliases below fix it to exact rationals, which is what
//! the scenario runner, the built-in corpus and the property suites use.

pub mod corpus;
pub mod error;
pub mod families;
pub mod lattice;
pub mod lp;
pub mod mart;
pub mod op;
pub mod scalar;
pub mod seq;

#[cfg(test)]
mod testing;

pub use error::{Error, Result};
pub use mart::{
    check_filtration, check_martingale, check_supermartingale, dominates, martingale_norm,
    martingale_norm_in, Filtration, Martingale, NormEstimate, ValidationReport,
};
pub use op::{BlockOp, Functional, Matrix, OpMode, Operator, RankOne};
pub use scalar::Scalar;
pub use seq::{ExtSeq, Mode, NormKind, NormValue, SpaceKind, Tail};

pub type Rational = num_rational::BigRational;
pub type Seq = ExtSeq<Rational>;
pub type SeqF64 = ExtSeq<f64>;
pub type Op = Operator<Rational>;
