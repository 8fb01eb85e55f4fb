//! Filtrations and martingales over a finite horizon, with law checks.
//!
//! Both can carry a rule that produces further levels or terms on demand, so
//! every check quantifies up to whatever horizon the caller asks for.

mod report;


use std::fmt;

pub use report::{LawCheck, ValidationReport, Witness};

use crate::error::{Error, Result};
use crate::op::{BlockOp, Operator};
use crate::scalar::Scalar;
use crate::seq::{ExtSeq, NormKind, NormValue, SpaceKind};

/// Level `n` is the identity on the first `slope·n + offset` coordinates and
/// `base` from there on.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelRule<T> {
    pub base: BlockOp<T>,
    pub slope: usize,
    pub offset: i64,
}

impl<T: Scalar> LevelRule<T> {
    pub fn level(&self, n: usize) -> Result<Operator<T>> {
        let cut = affine(self.slope, self.offset, n)?;
        Ok(Operator::Block(BlockOp::splice_identity(&self.base, cut)?))
    }
}

fn affine(slope: usize, offset: i64, n: usize) -> Result<usize> {
    let cut = (slope * n) as i64 + offset;
    usize::try_from(cut).map_err(|_| Error::IndexRange {
        index: n,
        detail: format!("rule gives negative cut {cut}"),
    })
}

#[derive(Clone, Debug)]
pub struct Filtration<T> {
    start: usize,
    levels: Vec<Operator<T>>,
    space: SpaceKind,
    rule: Option<LevelRule<T>>,
}

impl<T: Scalar> Filtration<T> {
    pub fn new(start: usize, levels: Vec<Operator<T>>, space: SpaceKind) -> Self {
        Self {
            start,
            levels,
            space,
            rule: None,
        }
    }

    /// Explicit levels first, then `rule` for every later index.
    pub fn with_rule(mut self, rule: LevelRule<T>) -> Self {
        self.rule = Some(rule);
        self
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn space(&self) -> SpaceKind {
        self.space
    }

    pub fn rule(&self) -> Option<&LevelRule<T>> {
        self.rule.as_ref()
    }

    pub fn explicit_levels(&self) -> &[Operator<T>] {
        &self.levels
    }

    /// Last available index, `None` when a rule extends the family forever.
    pub fn last_index(&self) -> Option<usize> {
        match self.rule {
            Some(_) => None,
            None => (self.start + self.levels.len()).checked_sub(1),
        }
    }

    pub fn level(&self, n: usize) -> Result<Operator<T>> {
        if n < self.start {
            return Err(Error::IndexRange {
                index: n,
                detail: format!("filtration starts at {}", self.start),
            });
        }
        let i = n - self.start;
        if let Some(op) = self.levels.get(i) {
            return Ok(op.clone());
        }
        match &self.rule {
            Some(rule) => rule.level(n),
            None => Err(Error::IndexRange {
                index: n,
                detail: format!(
                    "filtration has levels {}..={} and no rule to extend them",
                    self.start,
                    self.start + self.levels.len() - 1
                ),
            }),
        }
    }

    /// Levels `start..=upto`.
    pub fn levels_upto(&self, upto: usize) -> Result<Vec<Operator<T>>> {
        (self.start..=upto).map(|n| self.level(n)).collect()
    }

    /// All filtration laws on levels `start..=upto`.
    pub fn check(&self, upto: usize) -> Result<ValidationReport> {
        let levels = self.levels_upto(upto)?;
        let mut report = check_levels(self.start, &levels, self.space);
        let kind = match self.space {
            SpaceKind::L1 => Some(NormKind::L1),
            SpaceKind::C | SpaceKind::C0 | SpaceKind::Linf => Some(NormKind::Sup),
            _ => None,
        };
        let norms: Option<Vec<T>> =
            kind.and_then(|k| levels.iter().map(|e| e.norm(k).ok()).collect());
        if let (Some(kind), Some(norms)) = (kind, norms) {
            let top = norms.iter().fold(T::zero(), |m, x| T::max_of(&m, x));
            let text = if norms.iter().all(|x| *x == top) {
                format!("{} norm of every level = {}", kind.name(), top.to_text())
            } else {
                format!(
                    "largest {} norm of a level = {}",
                    kind.name(),
                    top.to_text()
                )
            };
            report.note("operator norm", text);
        }
        Ok(report)
    }

    /// Operator norm of every level up to `upto`.
    pub fn level_norms(&self, upto: usize, kind: NormKind) -> Result<Vec<T>> {
        self.levels_upto(upto)?
            .iter()
            .map(|e| e.norm(kind))
            .collect()
    }

    /// `(E_n x)` for `n = start..=horizon`.
    pub fn martingale_from(&self, last: &ExtSeq<T>, horizon: usize) -> Result<Martingale<T>> {
        let terms = self
            .levels_upto(horizon)?
            .iter()
            .map(|e| e.apply(last))
            .collect();
        Ok(Martingale::new(self.start, terms))
    }
}

/// Positivity, idempotence, `E_n E_m = E_m E_n = E_{min(n,m)}` for every
/// pair, and space preservation on probe vectors.
pub fn check_filtration<T: Scalar>(ops: &[Operator<T>], space: SpaceKind) -> ValidationReport {
    check_levels(0, ops, space)
}

fn check_levels<T: Scalar>(
    start: usize,
    ops: &[Operator<T>],
    space: SpaceKind,
) -> ValidationReport {
    let mut report = ValidationReport::default();
    let at = |i: usize| start + i;
    let bad = ops.iter().position(|e| !e.is_positive());
    report.record("positive", bad.map(|i| Witness::Level { n: at(i) }));
    let bad = ops.iter().position(|e| !e.is_projection());
    report.record("projection", bad.map(|i| Witness::Level { n: at(i) }));
    let mut pair = None;
    'outer: for i in 0..ops.len() {
        for j in i + 1..ops.len() {
            let ok = |c: Result<Operator<T>>| c.map(|c| c.same_as(&ops[i])).unwrap_or(false);
            if !ok(ops[i].compose(&ops[j])) || !ok(ops[j].compose(&ops[i])) {
                pair = Some(Witness::Pair { n: at(i), m: at(j) });
                break 'outer;
            }
        }
    }
    report.record("semigroup", pair);
    let probe_fail = ops.iter().enumerate().find_map(|(i, e)| {
        space_probes(e, space)
            .into_iter()
            .find(|(_, p)| !e.apply(p).in_space(space))
            .map(|(name, _)| Witness::Probe {
                n: at(i),
                probe: name,
            })
    });
    report.record("preserves space", probe_fail);
    report
}

fn space_probes<T: Scalar>(e: &Operator<T>, space: SpaceKind) -> Vec<(String, ExtSeq<T>)> {
    let reach = match (space, e) {
        (SpaceKind::FiniteDim(d), _) => d,
        (_, Operator::Block(b)) => b.head_dim() + 2 * b.period(),
        (_, Operator::RankOne(r)) => r.functional.head_weights().len() + 1,
    };
    let mut probes: Vec<(String, ExtSeq<T>)> = (1..=reach)
        .map(|j| {
            let mut v = vec![T::zero(); j];
            v[j - 1] = T::one();
            (format!("e_{j}"), ExtSeq::finite(v))
        })
        .collect();
    let one = ExtSeq::one();
    if one.in_space(space) {
        probes.push(("constant one".into(), one));
    }
    let decay = ExtSeq::geometric(Vec::new(), T::ratio(1, 2), vec![T::one()]);
    if decay.in_space(space) {
        probes.push(("2^-k".into(), decay));
    }
    probes
}

/// `term(n)` takes coordinates `1..=slope·n + offset` from `head` and the
/// rest from `rest`.
#[derive(Clone, Debug, PartialEq)]
pub struct TermRule<T> {
    pub head: ExtSeq<T>,
    pub rest: ExtSeq<T>,
    pub slope: usize,
    pub offset: i64,
}

impl<T: Scalar> TermRule<T> {
    /// Number of coordinates `term(n)` takes from `head`.
    pub fn cut(&self, n: usize) -> Result<usize> {
        affine(self.slope, self.offset, n)
    }

    pub fn term(&self, n: usize) -> Result<ExtSeq<T>> {
        let cut = self.cut(n)?;
        Ok(ExtSeq::splice(&self.head, &self.rest, cut))
    }
}

/// A declared fact about the terms beyond the horizon.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormCertificate {
    /// `‖x_n‖` is the same for every `n >= from`.
    EventuallyConstant { from: usize },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Flags {
    pub validated_martingale: bool,
    pub validated_supermartingale: bool,
    pub positive: bool,
    pub bounded_claim: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Martingale<T> {
    start: usize,
    terms: Vec<ExtSeq<T>>,
    explicit: usize,
    rule: Option<TermRule<T>>,
    pub flags: Flags,
    pub certificate: Option<NormCertificate>,
}

impl<T: Scalar> Martingale<T> {
    /// Terms indexed `start, start+1, ...`. Panics on an empty list.
    pub fn new(start: usize, terms: Vec<ExtSeq<T>>) -> Self {
        assert!(!terms.is_empty(), "a martingale needs at least one term");
        let explicit = terms.len();
        Self {
            start,
            terms,
            explicit,
            rule: None,
            flags: Flags::default(),
            certificate: None,
        }
    }

    /// Explicit terms first, then `rule`, up to `horizon`.
    pub fn with_rule(
        start: usize,
        explicit: Vec<ExtSeq<T>>,
        rule: TermRule<T>,
        horizon: usize,
    ) -> Result<Self> {
        let mut out = Self {
            start,
            explicit: explicit.len(),
            terms: explicit,
            rule: Some(rule),
            flags: Flags::default(),
            certificate: None,
        };
        out.extend_to(horizon)?;
        if out.terms.is_empty() {
            return Err(Error::invalid("martingale horizon precedes its start"));
        }
        Ok(out)
    }

    pub fn zero(start: usize, horizon: usize) -> Self {
        let mut z = Self::new(start, vec![ExtSeq::zero(); horizon + 1 - start]);
        z.certificate = Some(NormCertificate::EventuallyConstant { from: start });
        z
    }

    fn extend_to(&mut self, horizon: usize) -> Result<()> {
        while self.start + self.terms.len() <= horizon {
            let n = self.start + self.terms.len();
            let rule = self.rule.as_ref().ok_or_else(|| Error::IndexRange {
                index: n,
                detail: "no term rule to extend the martingale".into(),
            })?;
            self.terms.push(rule.term(n)?);
        }
        Ok(())
    }

    /// Same martingale cut or extended to `horizon`. Validation flags are reset.
    pub fn with_horizon(&self, horizon: usize) -> Result<Self> {
        let mut out = self.clone();
        out.flags = Flags::default();
        if horizon < self.start {
            return Err(Error::IndexRange {
                index: horizon,
                detail: format!("martingale starts at {}", self.start),
            });
        }
        out.terms.truncate(horizon + 1 - self.start);
        out.extend_to(horizon)?;
        Ok(out)
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn horizon(&self) -> usize {
        self.start + self.terms.len() - 1
    }

    pub fn indices(&self) -> std::ops::RangeInclusive<usize> {
        self.start..=self.horizon()
    }

    pub fn term(&self, n: usize) -> &ExtSeq<T> {
        &self.terms[n - self.start]
    }

    pub fn terms(&self) -> &[ExtSeq<T>] {
        &self.terms
    }

    pub fn rule(&self) -> Option<&TermRule<T>> {
        self.rule.as_ref()
    }

    pub fn explicit_terms(&self) -> &[ExtSeq<T>] {
        &self.terms[..self.explicit.min(self.terms.len())]
    }

    fn map(&self, f: impl Fn(&ExtSeq<T>) -> ExtSeq<T>) -> Self {
        let mut out = Self::new(self.start, self.terms.iter().map(f).collect());
        out.certificate = self.certificate;
        out
    }

    pub fn abs(&self) -> Self {
        self.map(ExtSeq::abs)
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|x| x.scale(s))
    }

    pub fn neg(&self) -> Self {
        self.scale(&-T::one())
    }

    /// Termwise `alpha * self + beta * other`.
    pub fn linear(&self, other: &Self, alpha: &T, beta: &T) -> Result<Self> {
        self.same_range(other)?;
        let terms = self
            .terms
            .iter()
            .zip(&other.terms)
            .map(|(a, b)| ExtSeq::linear(a, b, alpha, beta))
            .collect();
        Ok(Self::new(self.start, terms))
    }

    /// `self <= other` in every term.
    pub fn leq(&self, other: &Self) -> Result<bool> {
        self.same_range(other)?;
        Ok(self.terms.iter().zip(&other.terms).all(|(a, b)| a.leq(b)))
    }

    pub fn is_nonneg(&self) -> bool {
        self.terms.iter().all(ExtSeq::is_nonneg)
    }

    fn same_range(&self, other: &Self) -> Result<()> {
        if self.start != other.start || self.horizon() != other.horizon() {
            return Err(Error::HorizonMismatch(self.horizon(), other.horizon()));
        }
        Ok(())
    }

    /// Runs the martingale and supermartingale checks and records the outcome
    /// in [`Martingale::flags`].
    pub fn validate(mut self, f: &Filtration<T>) -> Result<(Self, ValidationReport)> {
        let report = check_martingale(&self, f)?;
        let sup = check_supermartingale(&self, f)?;
        self.flags.validated_martingale = report.passed();
        self.flags.validated_supermartingale = sup.passed();
        self.flags.positive = self.is_nonneg();
        Ok((self, report))
    }
}

fn in_space_check<T: Scalar>(x: &Martingale<T>, f: &Filtration<T>, report: &mut ValidationReport) {
    let bad = x
        .indices()
        .find(|&n| !x.term(n).in_space(f.space()))
        .map(|n| Witness::Term { n });
    report.record("terms in space", bad);
}

/// `E_n x_m = x_n` for all `n <= m <= horizon`.
pub fn check_martingale<T: Scalar>(
    x: &Martingale<T>,
    f: &Filtration<T>,
) -> Result<ValidationReport> {
    let levels = levels_for(x, f)?;
    let mut report = ValidationReport::default();
    in_space_check(x, f, &mut report);
    let mut witness = None;
    'outer: for n in x.indices() {
        let e = &levels[n - x.start()];
        for m in n..=x.horizon() {
            let gap = &e.apply(x.term(m)) - x.term(n);
            if let Some(coordinate) = gap.first_nonzero() {
                witness = Some(Witness::Coordinate { n, m, coordinate });
                break 'outer;
            }
        }
    }
    report.record("martingale", witness);
    Ok(report)
}

/// `E_n x_m <= x_n` for all `n <= m <= horizon`, including `m = n`.
pub fn check_supermartingale<T: Scalar>(
    x: &Martingale<T>,
    f: &Filtration<T>,
) -> Result<ValidationReport> {
    let levels = levels_for(x, f)?;
    let mut report = ValidationReport::default();
    in_space_check(x, f, &mut report);
    let mut witness = None;
    'outer: for n in x.indices() {
        let e = &levels[n - x.start()];
        for m in n..=x.horizon() {
            let gap = &e.apply(x.term(m)) - x.term(n);
            if let Some(coordinate) = gap.first_positive() {
                witness = Some(Witness::Coordinate { n, m, coordinate });
                break 'outer;
            }
        }
    }
    report.record("supermartingale", witness);
    Ok(report)
}

fn levels_for<T: Scalar>(x: &Martingale<T>, f: &Filtration<T>) -> Result<Vec<Operator<T>>> {
    if x.start() < f.start() {
        return Err(Error::IndexRange {
            index: x.start(),
            detail: format!("filtration starts at {}", f.start()),
        });
    }
    x.indices().map(|n| f.level(n)).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormEstimate<T> {
    pub value: NormValue<T>,
    /// `true` when a certificate pins down every term beyond the horizon;
    /// otherwise `value` is a lower bound for the full martingale.
    pub exact: bool,
}

impl<T: Scalar> fmt::Display for NormEstimate<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.exact { "exact" } else { "lower bound" };
        write!(f, "{} ({tag})", self.value)
    }
}

/// `sup_n ‖x_n‖` over the horizon.
pub fn martingale_norm<T: Scalar>(x: &Martingale<T>, kind: NormKind) -> NormEstimate<T> {
    let norms: Vec<NormValue<T>> = x.terms().iter().map(|t| t.norm(kind)).collect();
    let value = norms
        .iter()
        .cloned()
        .reduce(NormValue::max)
        .expect("nonempty martingale");
    let exact = match x.certificate {
        Some(NormCertificate::EventuallyConstant { from }) => {
            from <= x.horizon() && {
                let i = from.max(x.start()) - x.start();
                norms[i..].iter().all(|v| *v == norms[i])
            }
        }
        None => false,
    };
    NormEstimate { value, exact }
}

/// [`martingale_norm`], also exact when `x` reaches the last level of a
/// filtration that has one.
pub fn martingale_norm_in<T: Scalar>(
    x: &Martingale<T>,
    f: &Filtration<T>,
    kind: NormKind,
) -> NormEstimate<T> {
    let mut est = martingale_norm(x, kind);
    est.exact |= f.last_index() == Some(x.horizon());
    est
}

/// `±x_n <= y_n` for every `n`.
pub fn dominates<T: Scalar>(y: &Martingale<T>, x: &Martingale<T>) -> Result<bool> {
    y.same_range(x)?;
    Ok(x.indices().all(|n| {
        let (xn, yn) = (x.term(n), y.term(n));
        xn.leq(yn) && (-xn).leq(yn)
    }))
}
