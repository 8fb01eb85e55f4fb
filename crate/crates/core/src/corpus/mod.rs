//! Scenarios: a filtration, named martingales and assertions about them,
//! stored as JSON and evaluated into a [`Report`].

use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{
    dominate_via_unit, krickeberg_modulus, regular_norm, shrink_dominating, Shrunk,
    DEFAULT_PROBE_HORIZON,
};
use crate::mart::{check_martingale, dominates, martingale_norm_in, Filtration, Martingale};
use crate::seq::{ExtSeq, NormKind, NormValue, SpaceKind};
use crate::{Rational, Scalar, Seq};

mod builtin;
pub mod json;
mod random;
mod suites;

pub use builtin::{builtin, builtin_ids};
pub use json::{FiltrationJson, MartingaleJson, NormJson, OpJson, SeqJson, SpaceJson, Q};
pub use random::{conditional_expectation, generate_random_instance};
pub use suites::{run_property_suite, ControlOutcome, SuiteFailure, SuiteName, SuiteReport};

pub const SCHEMA_VERSION: u32 = 1;

/// A sequence named inside a scenario.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SeqExpr {
    Seq(SeqJson),
    Term {
        martingale: String,
        n: usize,
    },
    /// `|x_start| ∨ ... ∨ |x_upto|`
    JoinAbs {
        martingale: String,
        upto: usize,
    },
    /// Coordinatewise limit of `JoinAbs` as `upto` grows, for rule-generated
    /// martingales whose joins follow the rule's head.
    JoinLimit {
        martingale: String,
    },
}

/// What a modulus should equal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Expected {
    /// Every term equals this sequence.
    Constant(SeqJson),
    Martingale(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Assertion {
    FiltrationValid {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        upto: Option<usize>,
    },
    MartingaleValid {
        martingale: String,
    },
    /// `‖X‖`, or `‖x_term‖` when `term` is given.
    NormEquals {
        martingale: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        term: Option<usize>,
        value: Q,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        norm: Option<NormJson>,
    },
    /// `‖x_n‖ > slope·n + offset` for every index.
    NormGreater {
        martingale: String,
        slope: i64,
        offset: i64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        norm: Option<NormJson>,
    },
    /// Every level up to `upto` has operator norm `value`.
    LevelNorms {
        value: Q,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        upto: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        norm: Option<NormJson>,
    },
    ModulusEquals {
        martingale: String,
        expected: Expected,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        probe_horizon: Option<usize>,
    },
    /// The Krickeberg value at `term` differs from the verified modulus.
    KrickebergMismatch {
        martingale: String,
        term: usize,
        krickeberg: SeqJson,
        verified: SeqJson,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        probe_horizon: Option<usize>,
    },
    /// Repeated shrinking of `start` zeroes `coordinates` in order; the
    /// `rejected` candidate admits no shrinking step.
    ShrinkChain {
        start: String,
        target: String,
        coordinates: Vec<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rejected: Option<String>,
    },
    NotInSpace {
        value: SeqExpr,
        space: SpaceJson,
    },
    /// `dominating` is a positive martingale with `±martingale <= dominating`.
    Domination {
        dominating: String,
        martingale: String,
    },
    RegularNormEquals {
        martingale: String,
        value: Q,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        norm: Option<NormJson>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        probe_horizon: Option<usize>,
    },
    SeqEquals {
        value: SeqExpr,
        expected: SeqJson,
    },
    SeqNormEquals {
        value: SeqExpr,
        norm: NormJson,
        expected: Q,
    },
    /// Least `C` with `|x_n| <= C‖X‖e`, and `C‖X‖(E_n e)` dominates `±X`.
    UnitDomination {
        martingale: String,
        unit: SeqJson,
        c: Q,
    },
    /// `E_n|x_m| = |x_m|` for `from <= n <= m` up to the probe horizon.
    ModulusChain {
        martingale: String,
        from: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        probe_horizon: Option<usize>,
    },
    /// Random dominating martingales `(E_n w)` all stay above `bound`.
    SampledLowerBound {
        martingale: String,
        bound: SeqJson,
        samples: usize,
        seed: u64,
    },
}

impl Assertion {
    pub fn kind(&self) -> &'static str {
        match self {
            Assertion::FiltrationValid { .. } => "filtration_valid",
            Assertion::MartingaleValid { .. } => "martingale_valid",
            Assertion::NormEquals { .. } => "norm_equals",
            Assertion::NormGreater { .. } => "norm_greater",
            Assertion::LevelNorms { .. } => "level_norms",
            Assertion::ModulusEquals { .. } => "modulus_equals",
            Assertion::KrickebergMismatch { .. } => "krickeberg_mismatch",
            Assertion::ShrinkChain { .. } => "shrink_chain",
            Assertion::NotInSpace { .. } => "not_in_space",
            Assertion::Domination { .. } => "domination",
            Assertion::RegularNormEquals { .. } => "regular_norm_equals",
            Assertion::SeqEquals { .. } => "seq_equals",
            Assertion::SeqNormEquals { .. } => "seq_norm_equals",
            Assertion::UnitDomination { .. } => "unit_domination",
            Assertion::ModulusChain { .. } => "modulus_chain",
            Assertion::SampledLowerBound { .. } => "sampled_lower_bound",
        }
    }

    fn names(&self) -> Vec<&str> {
        match self {
            Assertion::FiltrationValid { .. } | Assertion::LevelNorms { .. } => vec![],
            Assertion::MartingaleValid { martingale }
            | Assertion::NormEquals { martingale, .. }
            | Assertion::NormGreater { martingale, .. }
            | Assertion::KrickebergMismatch { martingale, .. }
            | Assertion::RegularNormEquals { martingale, .. }
            | Assertion::UnitDomination { martingale, .. }
            | Assertion::ModulusChain { martingale, .. }
            | Assertion::SampledLowerBound { martingale, .. } => vec![martingale],
            Assertion::ModulusEquals {
                martingale,
                expected,
                ..
            } => match expected {
                Expected::Martingale(m) => vec![martingale, m],
                Expected::Constant(_) => vec![martingale],
            },
            Assertion::ShrinkChain {
                start,
                target,
                rejected,
                ..
            } => {
                let mut v = vec![start.as_str(), target.as_str()];
                v.extend(rejected.as_deref());
                v
            }
            Assertion::Domination {
                dominating,
                martingale,
            } => vec![dominating, martingale],
            Assertion::NotInSpace { value, .. }
            | Assertion::SeqEquals { value, .. }
            | Assertion::SeqNormEquals { value, .. } => match value {
                SeqExpr::Seq(_) => vec![],
                SeqExpr::Term { martingale, .. }
                | SeqExpr::JoinAbs { martingale, .. }
                | SeqExpr::JoinLimit { martingale } => vec![martingale],
            },
        }
    }
}

/// The on-disk form of a scenario.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDoc {
    pub martlat_schema: u32,
    pub id: String,
    /// Which construction the scenario reproduces.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub citation: Option<String>,
    pub space: SpaceJson,
    pub norm: NormJson,
    pub horizon: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub filtration: FiltrationJson,
    #[serde(default)]
    pub martingales: BTreeMap<String, MartingaleJson>,
    #[serde(default)]
    pub assertions: Vec<Assertion>,
}

/// A parsed and built scenario.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub doc: ScenarioDoc,
    pub filtration: Filtration<Rational>,
    pub martingales: BTreeMap<String, Martingale<Rational>>,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let doc: ScenarioDoc = serde_path_to_error::deserialize(de).map_err(|e| Error::Schema {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })?;
        Self::build(doc)
    }

    pub fn build(doc: ScenarioDoc) -> Result<Self> {
        if doc.martlat_schema != SCHEMA_VERSION {
            return Err(Error::Schema {
                path: "martlat_schema".into(),
                message: format!(
                    "unsupported version {}, expected {SCHEMA_VERSION}",
                    doc.martlat_schema
                ),
            });
        }
        let space = SpaceKind::from(doc.space);
        let filtration = doc.filtration.build(space, "filtration")?;
        let mut martingales = BTreeMap::new();
        for (name, m) in &doc.martingales {
            let built = m.build(
                filtration.start(),
                doc.horizon,
                &format!("martingales.{name}"),
            )?;
            martingales.insert(name.clone(), built);
        }
        for (i, a) in doc.assertions.iter().enumerate() {
            if let Some(missing) = a
                .names()
                .into_iter()
                .find(|n| !martingales.contains_key(*n))
            {
                return Err(Error::Schema {
                    path: format!("assertions[{i}]"),
                    message: format!("unknown martingale {missing:?}"),
                });
            }
        }
        Ok(Self {
            doc,
            filtration,
            martingales,
        })
    }

    /// Rebuilds with a different horizon; rule-generated martingales are
    /// extended or cut, explicit ones keep their terms.
    pub fn with_horizon(&self, horizon: usize) -> Result<Self> {
        let mut doc = self.doc.clone();
        doc.horizon = horizon;
        Self::build(doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.doc).expect("scenario documents always serialize")
    }

    pub fn id(&self) -> &str {
        &self.doc.id
    }

    pub fn norm(&self) -> NormKind {
        self.doc.norm.into()
    }

    pub fn martingale(&self, name: &str) -> Result<&Martingale<Rational>> {
        self.martingales
            .get(name)
            .ok_or_else(|| Error::invalid(format!("unknown martingale {name:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Outcome {
    pub kind: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub scenario: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub citation: Option<String>,
    pub tool_version: String,
    pub outcomes: Vec<Outcome>,
    pub elapsed_ms: u128,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    /// 0 when every assertion holds, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    /// Everything except timing, for reproducibility comparisons.
    pub fn content(&self) -> (String, Option<String>, &[Outcome]) {
        (self.scenario.clone(), self.citation.clone(), &self.outcomes)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "scenario {} (martlat {})",
            self.scenario, self.tool_version
        )?;
        if let Some(c) = &self.citation {
            writeln!(f, "  reproduces: {c}")?;
        }
        for o in &self.outcomes {
            write!(f, "  {} {}", if o.passed { "pass" } else { "FAIL" }, o.kind)?;
            if let Some(w) = &o.witness {
                write!(f, " [{w}]")?;
            }
            if let Some(d) = &o.detail {
                write!(f, ": {d}")?;
            }
            writeln!(f)?;
        }
        let total = self.outcomes.len();
        let ok = self.outcomes.iter().filter(|o| o.passed).count();
        write!(
            f,
            "  {ok}/{total} assertions passed in {} ms",
            self.elapsed_ms
        )
    }
}

struct Check {
    passed: bool,
    witness: Option<String>,
    detail: Option<String>,
}

impl Check {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self {
            passed,
            witness: None,
            detail: Some(detail.into()),
        }
    }

    fn witness(mut self, w: Option<String>) -> Self {
        self.witness = w;
        self
    }
}

pub fn run_scenario(s: &Scenario) -> Report {
    let started = Instant::now();
    let outcomes = s
        .doc
        .assertions
        .iter()
        .map(|a| {
            let check = evaluate(s, a).unwrap_or_else(|e| Check {
                passed: false,
                witness: None,
                detail: Some(format!("error: {e}")),
            });
            Outcome {
                kind: a.kind().to_string(),
                passed: check.passed,
                witness: check.witness,
                detail: check.detail,
            }
        })
        .collect();
    Report {
        scenario: s.doc.id.clone(),
        citation: s.doc.citation.clone(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        outcomes,
        elapsed_ms: started.elapsed().as_millis(),
    }
}

fn norm_or(s: &Scenario, n: &Option<NormJson>) -> NormKind {
    n.map(NormKind::from).unwrap_or_else(|| s.norm())
}

fn finite(v: &NormValue<Rational>) -> String {
    v.to_string()
}

fn evaluate(s: &Scenario, a: &Assertion) -> Result<Check> {
    let f = &s.filtration;
    Ok(match a {
        Assertion::FiltrationValid { upto } => {
            let mut u = upto.unwrap_or(s.doc.horizon);
            if let (Some(last), None) = (f.last_index(), f.rule()) {
                u = u.min(last);
            }
            let r = f.check(u)?;
            let notes: Vec<String> = r
                .checks
                .iter()
                .filter_map(|c| c.note.as_ref().map(|n| format!("{}: {n}", c.law)))
                .collect();
            let witness = r.failures().next().map(|c| match &c.witness {
                Some(w) => format!("{} at {w}", c.law),
                None => c.law.clone(),
            });
            let detail = if notes.is_empty() {
                format!("levels {}..={u}", f.start())
            } else {
                format!("levels {}..={u}; {}", f.start(), notes.join("; "))
            };
            Check::new(r.passed(), detail).witness(witness)
        }
        Assertion::MartingaleValid { martingale } => {
            let x = s.martingale(martingale)?;
            let r = check_martingale(x, f)?;
            let witness = r.failures().next().map(|c| match &c.witness {
                Some(w) => format!("{} at {w}", c.law),
                None => c.law.clone(),
            });
            Check::new(
                r.passed(),
                format!("{martingale} over indices {}..={}", x.start(), x.horizon()),
            )
            .witness(witness)
        }
        Assertion::NormEquals {
            martingale,
            term,
            value,
            norm,
        } => {
            let x = s.martingale(martingale)?;
            let kind = norm_or(s, norm);
            let want = NormValue::Finite(value.0.clone());
            match term {
                Some(n) => {
                    in_range(x, *n)?;
                    let got = x.term(*n).norm(kind);
                    Check::new(
                        got == want,
                        format!("‖{martingale}_{n}‖ = {}", finite(&got)),
                    )
                }
                None => {
                    let est = martingale_norm_in(x, f, kind);
                    Check::new(est.value == want, format!("‖{martingale}‖ = {est}"))
                }
            }
        }
        Assertion::NormGreater {
            martingale,
            slope,
            offset,
            norm,
        } => {
            let x = s.martingale(martingale)?;
            let kind = norm_or(s, norm);
            let bad = x.indices().find(|&n| {
                let bound = Rational::from_integer((slope * n as i64 + offset).into());
                match x.term(n).norm(kind) {
                    NormValue::Finite(v) => v <= bound,
                    NormValue::Infinite => false,
                }
            });
            Check::new(
                bad.is_none(),
                format!(
                    "‖x_n‖ > {slope}·n + {offset} for n in {}..={}",
                    x.start(),
                    x.horizon()
                ),
            )
            .witness(bad.map(|n| format!("n = {n}")))
        }
        Assertion::LevelNorms { value, upto, norm } => {
            let kind = norm_or(s, norm);
            let u = upto.unwrap_or(s.doc.horizon);
            let norms = f.level_norms(u, kind)?;
            let bad = norms.iter().position(|v| *v != value.0);
            Check::new(
                bad.is_none(),
                format!("{} norm of levels {}..={u}", kind.name(), f.start()),
            )
            .witness(
                bad.map(|i| format!("level {} has norm {}", f.start() + i, norms[i].to_text())),
            )
        }
        Assertion::ModulusEquals {
            martingale,
            expected,
            probe_horizon,
        } => {
            let x = s.martingale(martingale)?;
            let m = krickeberg_modulus(x, f, probe_horizon.unwrap_or(DEFAULT_PROBE_HORIZON))?;
            let want: Vec<Seq> = match expected {
                Expected::Constant(c) => vec![c.build("expected")?; x.terms().len()],
                Expected::Martingale(name) => s.martingale(name)?.terms().to_vec(),
            };
            let bad = x
                .indices()
                .find(|&n| want.get(n - x.start()) != Some(m.modulus.term(n)));
            let detail = format!(
                "method {:?}, stabilized {}{}",
                m.method,
                m.stabilized,
                m.mismatch
                    .as_ref()
                    .map(|s| format!(", mismatch: {s}"))
                    .unwrap_or_default()
            );
            Check::new(
                m.stabilized && m.mismatch.is_none() && bad.is_none(),
                detail,
            )
            .witness(bad.map(|n| format!("term {n} is {}", m.modulus.term(n))))
        }
        Assertion::KrickebergMismatch {
            martingale,
            term,
            krickeberg,
            verified,
            probe_horizon,
        } => {
            let x = s.martingale(martingale)?;
            in_range(x, *term)?;
            let m = krickeberg_modulus(x, f, probe_horizon.unwrap_or(DEFAULT_PROBE_HORIZON))?;
            let (k, v) = (m.limits.term(*term), m.modulus.term(*term));
            let ok = m.stabilized
                && m.mismatch.is_some()
                && *k == krickeberg.build("krickeberg")?
                && *v == verified.build("verified")?;
            Check::new(
                ok,
                format!(
                    "Krickeberg term {term} = {k}, verified modulus term {term} = {v}; {}",
                    m.mismatch.as_deref().unwrap_or("no mismatch flagged")
                ),
            )
        }
        Assertion::ShrinkChain {
            start,
            target,
            coordinates,
            rejected,
        } => {
            let x = s.martingale(target)?;
            let mut y = s.martingale(start)?.clone();
            let mut zeroed = Vec::new();
            let mut witness = None;
            for &want in coordinates {
                match shrink_dominating(&y, x, f)? {
                    Shrunk::Smaller { z, coordinate } if coordinate == want => {
                        zeroed.push(coordinate);
                        y = z;
                    }
                    Shrunk::Smaller { coordinate, .. } => {
                        witness = Some(format!("zeroed coordinate {coordinate}, expected {want}"));
                        break;
                    }
                    Shrunk::NoCandidate { certificate } => {
                        witness = Some(format!("stopped before coordinate {want}: {certificate}"));
                        break;
                    }
                }
            }
            let mut detail = format!("strictly smaller dominating martingales zeroing {zeroed:?}");
            if let (None, Some(name)) = (&witness, rejected) {
                match shrink_dominating(s.martingale(name)?, x, f)? {
                    Shrunk::NoCandidate { certificate } if certificate.ends_with("not in c") => {
                        detail.push_str(&format!("; {name} rejected: {certificate}"));
                    }
                    Shrunk::NoCandidate { certificate } => {
                        witness = Some(format!(
                            "{name} rejected without the c certificate: {certificate}"
                        ));
                    }
                    Shrunk::Smaller { coordinate, .. } => {
                        witness = Some(format!("{name} still shrinks at coordinate {coordinate}"));
                    }
                }
            }
            Check::new(witness.is_none(), detail).witness(witness)
        }
        Assertion::NotInSpace { value, space } => {
            let v = seq_expr(s, value)?;
            let space = SpaceKind::from(*space);
            Check::new(
                !v.in_space(space),
                format!(
                    "{v} is {}in {}",
                    if v.in_space(space) { "" } else { "not " },
                    space.name()
                ),
            )
        }
        Assertion::Domination {
            dominating,
            martingale,
        } => {
            let (y, x) = (s.martingale(dominating)?, s.martingale(martingale)?);
            let law = check_martingale(y, f)?.passed();
            let ok = law && y.is_nonneg() && dominates(y, x)?;
            Check::new(
                ok,
                format!(
                    "{dominating} martingale: {law}, positive: {}, dominates ±{martingale}",
                    y.is_nonneg()
                ),
            )
        }
        Assertion::RegularNormEquals {
            martingale,
            value,
            norm,
            probe_horizon,
        } => {
            let x = s.martingale(martingale)?;
            let kind = norm_or(s, norm);
            let r = regular_norm(x, f, kind, probe_horizon.unwrap_or(DEFAULT_PROBE_HORIZON))?;
            let ok = r.value() == Some(&NormValue::Finite(value.0.clone()));
            Check::new(ok, format!("‖{martingale}‖_r = {r}"))
        }
        Assertion::SeqEquals { value, expected } => {
            let v = seq_expr(s, value)?;
            let want = expected.build("expected")?;
            Check::new(v == want, format!("value {v}")).witness(
                (&v - &want)
                    .first_nonzero()
                    .map(|i| format!("coordinate {i}")),
            )
        }
        Assertion::SeqNormEquals {
            value,
            norm,
            expected,
        } => {
            let v = seq_expr(s, value)?;
            let got = v.norm((*norm).into());
            Check::new(
                got == NormValue::Finite(expected.0.clone()),
                format!("norm {got}"),
            )
        }
        Assertion::UnitDomination {
            martingale,
            unit,
            c,
        } => {
            let x = s.martingale(martingale)?;
            let u = dominate_via_unit(x, f, &unit.build("unit")?, s.norm())?;
            Check::new(
                u.c == c.0 && u.dominating,
                format!("C = {}, dominating: {}", u.c.to_text(), u.dominating),
            )
        }
        Assertion::ModulusChain {
            martingale,
            from,
            probe_horizon,
        } => {
            let x = s.martingale(martingale)?;
            let h = probe_horizon
                .unwrap_or(DEFAULT_PROBE_HORIZON)
                .max(x.horizon());
            let ext = x.with_horizon(h)?;
            let mut witness = None;
            'outer: for n in *from..=h {
                let e = f.level(n)?;
                for m in n.max(x.start())..=h {
                    let a = ext.term(m).abs();
                    if let Some(i) = (&e.apply(&a) - &a).first_nonzero() {
                        witness = Some(format!("(n={n}, m={m}) at coordinate {i}"));
                        break 'outer;
                    }
                }
            }
            Check::new(
                witness.is_none(),
                format!("E_n|x_m| = |x_m| for {from} <= n <= m <= {h}; chain-verified"),
            )
            .witness(witness)
        }
        Assertion::SampledLowerBound {
            martingale,
            bound,
            samples,
            seed,
        } => {
            let x = s.martingale(martingale)?;
            let bound = bound.build("bound")?;
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let (mut used, mut witness) = (0, None);
            for k in 0..*samples {
                let w = random_above_one(&mut rng);
                let y = f.martingale_from(&w, x.horizon())?;
                let y = Martingale::new(x.start(), y.terms()[x.start() - f.start()..].to_vec());
                if !dominates(&y, x)? {
                    continue;
                }
                used += 1;
                if let Some(n) = y.indices().find(|&n| !bound.leq(y.term(n))) {
                    witness = Some(format!("sample {k}, term {n}"));
                    break;
                }
            }
            Check::new(
                witness.is_none() && used > 0,
                format!("{used} sampled dominating martingales stay above {bound}; chain-verified, not exhaustive"),
            )
            .witness(witness)
        }
    })
}

fn in_range(x: &Martingale<Rational>, n: usize) -> Result<()> {
    if x.indices().contains(&n) {
        Ok(())
    } else {
        Err(Error::IndexRange {
            index: n,
            detail: format!("martingale covers {}..={}", x.start(), x.horizon()),
        })
    }
}

/// `𝟙` plus a random nonnegative prefix and periodic part.
fn random_above_one(rng: &mut ChaCha8Rng) -> Seq {
    fn small(rng: &mut ChaCha8Rng, n: usize) -> Vec<Rational> {
        (0..n)
            .map(|_| Rational::ratio(rng.gen_range(0..4), rng.gen_range(1..3)))
            .collect()
    }
    let prefix_len = rng.gen_range(0..4);
    let prefix = small(rng, prefix_len);
    let period = rng.gen_range(1..4);
    let block = small(rng, period);
    &Seq::one() + &ExtSeq::periodic(prefix, block)
}

fn seq_expr(s: &Scenario, e: &SeqExpr) -> Result<Seq> {
    Ok(match e {
        SeqExpr::Seq(j) => j.build("value")?,
        SeqExpr::Term { martingale, n } => {
            let x = s.martingale(martingale)?;
            in_range(x, *n)?;
            x.term(*n).clone()
        }
        SeqExpr::JoinAbs { martingale, upto } => {
            let x = s.martingale(martingale)?.with_horizon(*upto)?;
            x.terms()
                .iter()
                .map(ExtSeq::abs)
                .reduce(|a, b| a.join(&b))
                .expect("nonempty")
        }
        SeqExpr::JoinLimit { martingale } => {
            let x = s.martingale(martingale)?;
            let rule = x
                .rule()
                .ok_or_else(|| Error::Precondition(format!("{martingale} has no term rule")))?;
            let h = DEFAULT_PROBE_HORIZON.max(x.horizon() + 1);
            let ext = x.with_horizon(h)?;
            let head = rule.head.abs();
            let join = |upto: usize| {
                ext.terms()[..=upto - x.start()]
                    .iter()
                    .map(ExtSeq::abs)
                    .reduce(|a, b| a.join(&b))
                    .expect("nonempty")
            };
            let (j1, j2) = (join(h - 1), join(h));
            let (c1, c2) = (rule.cut(h - 1)?, rule.cut(h)?);
            let certified = j1.coords(c1) == head.coords(c1)
                && j2.coords(c2) == head.coords(c2)
                && j1.skip(c1) == j2.skip(c2);
            if !certified {
                return Err(Error::Precondition(format!(
                    "joins of |{martingale}| do not follow the rule head up to {h}"
                )));
            }
            head
        }
    })
}
