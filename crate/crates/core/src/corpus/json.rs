//! Serialized shapes of sequences, operators, filtrations and martingales,
//! with conversions both ways.

use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::mart::{Filtration, LevelRule, Martingale, NormCertificate, TermRule};
use crate::op::{BlockOp, Functional, Matrix, OpMode, Operator};
use crate::seq::{ExtSeq, Mode, NormKind, SpaceKind, Tail};
use num_traits::One;

use crate::{Rational, Scalar};

/// A rational written as `"p/q"`, an integer string, or a JSON integer.
#[derive(Clone, Debug, PartialEq)]
pub struct Q(pub Rational);

impl Serialize for Q {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_text())
    }
}

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Q;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a rational as \"p/q\" or an integer")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Q, E> {
                Ok(Q(Rational::from_integer(v.into())))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Q, E> {
                Ok(Q(Rational::from_integer(v.into())))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Q, E> {
                Rational::parse_scalar(v)
                    .map(Q)
                    .ok_or_else(|| E::custom(format!("not a rational: {v:?}")))
            }
        }
        d.deserialize_any(V)
    }
}

fn qs(v: &[Rational]) -> Vec<Q> {
    v.iter().cloned().map(Q).collect()
}

fn unq(v: &[Q]) -> Vec<Rational> {
    v.iter().map(|q| q.0.clone()).collect()
}

fn schema(path: &str, message: impl fmt::Display) -> Error {
    Error::Schema {
        path: path.to_string(),
        message: message.to_string(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeJson {
    pub ratio: Q,
    pub block: Vec<Q>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TailJson {
    Zero,
    Const {
        value: Q,
    },
    Periodic {
        block: Vec<Q>,
    },
    /// Sum of `ratio^k · block` over the tail periods `k = 0, 1, ...`.
    Geometric {
        modes: Vec<ModeJson>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeqJson {
    #[serde(default)]
    pub prefix: Vec<Q>,
    #[serde(default = "zero_tail")]
    pub tail: TailJson,
}

fn zero_tail() -> TailJson {
    TailJson::Zero
}

impl SeqJson {
    pub fn build(&self, path: &str) -> Result<ExtSeq<Rational>> {
        let tail = match &self.tail {
            TailJson::Zero => Tail::Zero,
            TailJson::Const { value } => Tail::Const(value.0.clone()),
            TailJson::Periodic { block } => Tail::Periodic(unq(block)),
            TailJson::Geometric { modes } => Tail::Geometric(
                modes
                    .iter()
                    .map(|m| Mode {
                        ratio: m.ratio.0.clone(),
                        block: unq(&m.block),
                    })
                    .collect(),
            ),
        };
        ExtSeq::new(unq(&self.prefix), tail).map_err(|e| schema(path, e))
    }

    pub fn of(s: &ExtSeq<Rational>) -> Self {
        let tail = match s.tail() {
            Tail::Zero => TailJson::Zero,
            Tail::Const(c) => TailJson::Const { value: Q(c) },
            Tail::Periodic(b) => TailJson::Periodic { block: qs(&b) },
            Tail::Geometric(modes) => TailJson::Geometric {
                modes: modes
                    .iter()
                    .map(|m| ModeJson {
                        ratio: Q(m.ratio.clone()),
                        block: qs(&m.block),
                    })
                    .collect(),
            },
        };
        Self {
            prefix: qs(s.prefix()),
            tail,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpModeJson {
    pub ratio: Q,
    pub block: Vec<Vec<Q>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionalJson {
    #[serde(default)]
    pub head_weights: Vec<Q>,
    pub residue_weights: Vec<Q>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OpJson {
    Block {
        #[serde(default)]
        head: Vec<Vec<Q>>,
        period: usize,
        /// The block repeated on every tail period; omitted means zero.
        #[serde(default)]
        tail_block: Vec<Vec<Q>>,
        /// Further blocks scaled by `ratio^k` on tail period `k`.
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        tail_modes: Vec<OpModeJson>,
    },
    RankOne {
        functional: FunctionalJson,
        out: SeqJson,
    },
}

fn matrix(rows: &[Vec<Q>], n: usize, path: &str) -> Result<Matrix<Rational>> {
    if rows.is_empty() {
        return Ok(Matrix::zeros(n, n));
    }
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(schema(path, format!("expected a {n}x{n} matrix")));
    }
    Ok(Matrix::from_rows(rows.iter().map(|r| unq(r)).collect()))
}

fn rows_of(m: &Matrix<Rational>) -> Vec<Vec<Q>> {
    m.to_rows().iter().map(|r| qs(r)).collect()
}

impl OpJson {
    pub fn build_block(&self, path: &str) -> Result<BlockOp<Rational>> {
        match self {
            OpJson::Block {
                head,
                period,
                tail_block,
                tail_modes,
            } => {
                if *period == 0 {
                    return Err(schema(&format!("{path}.period"), "period must be positive"));
                }
                let head = matrix(head, head.len(), &format!("{path}.head"))?;
                let mut modes = vec![OpMode {
                    ratio: Rational::one(),
                    block: matrix(tail_block, *period, &format!("{path}.tail_block"))?,
                }];
                for (i, m) in tail_modes.iter().enumerate() {
                    modes.push(OpMode {
                        ratio: m.ratio.0.clone(),
                        block: matrix(&m.block, *period, &format!("{path}.tail_modes[{i}]"))?,
                    });
                }
                BlockOp::with_modes(head, *period, modes).map_err(|e| schema(path, e))
            }
            OpJson::RankOne { .. } => Err(schema(path, "expected a block operator")),
        }
    }

    pub fn build(&self, path: &str) -> Result<Operator<Rational>> {
        match self {
            OpJson::Block { .. } => self.build_block(path).map(Operator::Block),
            OpJson::RankOne { functional, out } => {
                if functional.residue_weights.is_empty() {
                    return Err(schema(
                        &format!("{path}.functional.residue_weights"),
                        "must be nonempty",
                    ));
                }
                let f = Functional::new(
                    unq(&functional.head_weights),
                    unq(&functional.residue_weights),
                );
                Ok(Operator::rank_one(f, out.build(&format!("{path}.out"))?))
            }
        }
    }

    pub fn of_block(b: &BlockOp<Rational>) -> Self {
        let p = b.period();
        let mut tail_block = Vec::new();
        let mut tail_modes = Vec::new();
        for m in b.modes() {
            if m.ratio == Rational::one() {
                tail_block = rows_of(&m.block);
            } else {
                tail_modes.push(OpModeJson {
                    ratio: Q(m.ratio.clone()),
                    block: rows_of(&m.block),
                });
            }
        }
        if tail_block.is_empty() {
            tail_block = rows_of(&Matrix::zeros(p, p));
        }
        OpJson::Block {
            head: rows_of(b.head()),
            period: p,
            tail_block,
            tail_modes,
        }
    }

    pub fn of(op: &Operator<Rational>) -> Self {
        match op {
            Operator::Block(b) => Self::of_block(b),
            Operator::RankOne(r) => OpJson::RankOne {
                functional: FunctionalJson {
                    head_weights: qs(r.functional.head_weights()),
                    residue_weights: qs(r.functional.residue_weights()),
                },
                out: SeqJson::of(&r.out),
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceJson {
    FiniteDim(usize),
    SeqAll,
    C,
    C0,
    L1,
    Linf,
}

impl From<SpaceJson> for SpaceKind {
    fn from(s: SpaceJson) -> Self {
        match s {
            SpaceJson::FiniteDim(d) => SpaceKind::FiniteDim(d),
            SpaceJson::SeqAll => SpaceKind::SeqAll,
            SpaceJson::C => SpaceKind::C,
            SpaceJson::C0 => SpaceKind::C0,
            SpaceJson::L1 => SpaceKind::L1,
            SpaceJson::Linf => SpaceKind::Linf,
        }
    }
}

impl From<SpaceKind> for SpaceJson {
    fn from(s: SpaceKind) -> Self {
        match s {
            SpaceKind::FiniteDim(d) => SpaceJson::FiniteDim(d),
            SpaceKind::SeqAll => SpaceJson::SeqAll,
            SpaceKind::C => SpaceJson::C,
            SpaceKind::C0 => SpaceJson::C0,
            SpaceKind::L1 => SpaceJson::L1,
            SpaceKind::Linf => SpaceJson::Linf,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormJson {
    #[serde(rename = "sup")]
    Sup,
    #[serde(rename = "l1")]
    L1,
    #[serde(rename = "sup-limsup", alias = "sup_limsup")]
    SupPlusLimsup,
}

impl From<NormJson> for NormKind {
    fn from(n: NormJson) -> Self {
        match n {
            NormJson::Sup => NormKind::Sup,
            NormJson::L1 => NormKind::L1,
            NormJson::SupPlusLimsup => NormKind::SupPlusLimsup,
        }
    }
}

impl From<NormKind> for NormJson {
    fn from(n: NormKind) -> Self {
        match n {
            NormKind::Sup => NormJson::Sup,
            NormKind::L1 => NormJson::L1,
            NormKind::SupPlusLimsup => NormJson::SupPlusLimsup,
        }
    }
}

/// Level `n` is `base` with the identity spliced over the first
/// `slope·n + offset` coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelRuleJson {
    pub base: OpJson,
    pub slope: usize,
    #[serde(default)]
    pub offset: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiltrationJson {
    #[serde(default)]
    pub start: usize,
    #[serde(default)]
    pub levels: Vec<OpJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<LevelRuleJson>,
}

impl FiltrationJson {
    pub fn build(&self, space: SpaceKind, path: &str) -> Result<Filtration<Rational>> {
        let levels = self
            .levels
            .iter()
            .enumerate()
            .map(|(i, op)| op.build(&format!("{path}.levels[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        if levels.is_empty() && self.rule.is_none() {
            return Err(schema(path, "a filtration needs levels or a rule"));
        }
        let mut f = Filtration::new(self.start, levels, space);
        if let Some(rule) = &self.rule {
            f = f.with_rule(LevelRule {
                base: rule.base.build_block(&format!("{path}.rule.base"))?,
                slope: rule.slope,
                offset: rule.offset,
            });
        }
        Ok(f)
    }

    pub fn of(f: &Filtration<Rational>) -> Self {
        Self {
            start: f.start(),
            levels: f.explicit_levels().iter().map(OpJson::of).collect(),
            rule: f.rule().map(|r| LevelRuleJson {
                base: OpJson::of_block(&r.base),
                slope: r.slope,
                offset: r.offset,
            }),
        }
    }
}

/// Term `n` takes its first `slope·n + offset` coordinates from `head`,
/// the rest from `rest`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermRuleJson {
    pub head: SeqJson,
    pub rest: SeqJson,
    pub slope: usize,
    #[serde(default)]
    pub offset: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CertificateJson {
    EventuallyConstant { from: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MartingaleJson {
    /// Defaults to the filtration's start.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<usize>,
    #[serde(default)]
    pub terms: Vec<SeqJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<TermRuleJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateJson>,
}

impl MartingaleJson {
    pub fn build(
        &self,
        default_start: usize,
        horizon: usize,
        path: &str,
    ) -> Result<Martingale<Rational>> {
        let start = self.start.unwrap_or(default_start);
        let terms = self
            .terms
            .iter()
            .enumerate()
            .map(|(i, t)| t.build(&format!("{path}.terms[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        let mut m = match &self.rule {
            None if terms.is_empty() => {
                return Err(schema(path, "a martingale needs terms or a rule"))
            }
            None => Martingale::new(start, terms),
            Some(r) => {
                let rule = TermRule {
                    head: r.head.build(&format!("{path}.rule.head"))?,
                    rest: r.rest.build(&format!("{path}.rule.rest"))?,
                    slope: r.slope,
                    offset: r.offset,
                };
                Martingale::with_rule(start, terms, rule, horizon).map_err(|e| schema(path, e))?
            }
        };
        m.certificate = self
            .certificate
            .map(|CertificateJson::EventuallyConstant { from }| {
                NormCertificate::EventuallyConstant { from }
            });
        Ok(m)
    }

    pub fn of(m: &Martingale<Rational>) -> Self {
        let terms = match m.rule() {
            Some(_) => m.explicit_terms(),
            None => m.terms(),
        };
        Self {
            start: Some(m.start()),
            terms: terms.iter().map(SeqJson::of).collect(),
            rule: m.rule().map(|r| TermRuleJson {
                head: SeqJson::of(&r.head),
                rest: SeqJson::of(&r.rest),
                slope: r.slope,
                offset: r.offset,
            }),
            certificate: m
                .certificate
                .map(|NormCertificate::EventuallyConstant { from }| {
                    CertificateJson::EventuallyConstant { from }
                }),
        }
    }
}
