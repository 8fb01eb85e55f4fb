//! Property suites over random nested-partition instances. Each suite also
//! runs deliberately broken controls that must fail, so a pass is never
//! vacuous.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::random::{draw_instance, instance_scenario, random_vector, Instance};
use crate::error::{Error, Result};
use crate::lattice::{
    krickeberg_modulus, lp_least_dominating, martingale_sup, regular_norm, LeastDominating,
    DEFAULT_PROBE_HORIZON,
};
use crate::mart::{check_martingale, dominates, martingale_norm, Filtration, Martingale};
use crate::op::{BlockOp, Matrix, Operator};
use crate::seq::{NormKind, NormValue, SpaceKind};
use crate::{Rational, Scalar, Seq};

/// Largest dimension and level count drawn by the suites.
pub const MAX_DIM: usize = 8;
pub const MAX_LEVELS: usize = 4;
/// Random dominating martingales compared against each modulus.
pub const DOMINATING_SAMPLES: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteName {
    OracleEquivalence,
    RegnormAxioms,
    Fatou,
    Ideal,
    LatticeAxioms,
}

impl SuiteName {
    pub const ALL: [SuiteName; 5] = [
        SuiteName::OracleEquivalence,
        SuiteName::RegnormAxioms,
        SuiteName::Fatou,
        SuiteName::Ideal,
        SuiteName::LatticeAxioms,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SuiteName::OracleEquivalence => "oracle_equivalence",
            SuiteName::RegnormAxioms => "regnorm_axioms",
            SuiteName::Fatou => "fatou",
            SuiteName::Ideal => "ideal",
            SuiteName::LatticeAxioms => "lattice_axioms",
        }
    }

    /// The statement the suite exercises.
    pub fn claim(self) -> &'static str {
        match self {
            SuiteName::OracleEquivalence => {
                "Krickeberg's formula gives the lattice operations when each level is order continuous"
            }
            SuiteName::RegnormAxioms => "the regular norm is a norm with ‖X‖ <= 2‖X‖_r",
            SuiteName::Fatou => "contractive levels in a Fatou norm give ‖X‖ = ‖X‖_r",
            SuiteName::Ideal => "bounded martingales form an ideal of the regular ones",
            SuiteName::LatticeAxioms => "regular martingales form an order complete vector lattice",
        }
    }
}

impl FromStr for SuiteName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SuiteName::ALL
            .into_iter()
            .find(|n| n.name() == s || n.name().replace('_', "-") == s)
            .ok_or_else(|| Error::invalid(format!("unknown suite {s:?}")))
    }
}

impl fmt::Display for SuiteName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteFailure {
    pub index: usize,
    pub reason: String,
    /// The reproducing scenario as JSON.
    pub scenario: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ControlOutcome {
    pub label: String,
    /// The control behaved as a broken instance should.
    pub as_expected: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: SuiteName,
    pub claim: String,
    pub count: usize,
    pub seed: u64,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    /// Individual checks skipped because their hypothesis failed.
    pub gated_checks: usize,
    pub controls: Vec<ControlOutcome>,
    pub failures: Vec<SuiteFailure>,
    pub tool_version: String,
    pub elapsed_ms: u128,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0 && self.controls.iter().all(|c| c.as_expected)
    }

    pub fn exit_code(&self) -> i32 {
        if self.all_passed() {
            0
        } else {
            1
        }
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "suite {} (martlat {}), seed {}",
            self.suite, self.tool_version, self.seed
        )?;
        writeln!(f, "  claim: {}", self.claim)?;
        writeln!(
            f,
            "  {} instances: {} passed, {} failed, {} skipped ({} checks gated by their hypothesis)",
            self.count, self.passed, self.failed, self.skipped, self.gated_checks
        )?;
        for c in &self.controls {
            let status = if c.as_expected { "ok" } else { "UNEXPECTED" };
            writeln!(f, "  control {status} {}: {}", c.label, c.detail)?;
        }
        for fail in &self.failures {
            writeln!(f, "  FAIL instance {}: {}", fail.index, fail.reason)?;
            writeln!(f, "{}", fail.scenario)?;
        }
        write!(
            f,
            "  {} in {} ms",
            if self.all_passed() { "pass" } else { "FAIL" },
            self.elapsed_ms
        )
    }
}

enum Verdict {
    Pass {
        gated: usize,
    },
    Fail(String),
    /// Every check's hypothesis failed.
    Skip(String),
}

struct Case {
    instance: Instance,
    /// A second martingale on the same filtration, when the suite needs one.
    other: Option<Martingale<Rational>>,
    seed: u64,
}

fn draw_case(suite: SuiteName, index: usize, rng: &mut ChaCha8Rng) -> Case {
    let seed: u64 = rng.gen();
    let mut local = ChaCha8Rng::seed_from_u64(seed);
    let d = local.gen_range(2..=MAX_DIM);
    let levels = local.gen_range(1..=MAX_LEVELS);
    let horizon = levels + local.gen_range(0..=1);
    // half the Fatou instances use uniform weights, which keeps L1 contractive
    let uniform = suite == SuiteName::Fatou && index % 2 == 1;
    let mut instance = draw_instance(&mut local, d, levels, horizon, uniform);
    let other = match suite {
        SuiteName::Ideal => {
            // 0 <= Y <= X from 0 <= y_N <= x_N
            let top = random_vector(&mut local, d, true);
            let cut = Seq::finite(
                (1..=d)
                    .map(|i| top.coord(i) * Rational::ratio(local.gen_range(0..=4), 4))
                    .collect(),
            );
            instance.x = instance
                .filtration
                .martingale_from(&top, horizon)
                .expect("covered");
            Some(
                instance
                    .filtration
                    .martingale_from(&cut, horizon)
                    .expect("covered"),
            )
        }
        SuiteName::RegnormAxioms | SuiteName::LatticeAxioms => Some(
            instance
                .filtration
                .martingale_from(&random_vector(&mut local, d, false), horizon)
                .expect("covered"),
        ),
        _ => None,
    };
    Case {
        instance,
        other,
        seed,
    }
}

pub fn run_property_suite(suite: SuiteName, count: usize, seed: u64) -> SuiteReport {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut passed, mut failed, mut skipped, mut gated_checks) = (0, 0, 0, 0);
    let mut failures = Vec::new();
    for index in 0..count {
        let case = draw_case(suite, index, &mut rng);
        let verdict =
            check_case(suite, &case).unwrap_or_else(|e| Verdict::Fail(format!("error: {e}")));
        match verdict {
            Verdict::Pass { gated } => {
                passed += 1;
                gated_checks += gated;
            }
            Verdict::Skip(_) => skipped += 1,
            Verdict::Fail(reason) => {
                failed += 1;
                let mut named = vec![("x", &case.instance.x)];
                if let Some(y) = &case.other {
                    named.push(("y", y));
                }
                let scenario = instance_scenario(
                    format!("{}-{index}", suite.name()),
                    case.seed,
                    &case.instance.filtration,
                    &named,
                    Vec::new(),
                );
                failures.push(SuiteFailure {
                    index,
                    reason,
                    scenario: scenario.to_json(),
                });
            }
        }
    }
    SuiteReport {
        suite,
        claim: suite.claim().to_string(),
        count,
        seed,
        passed,
        failed,
        skipped,
        gated_checks,
        controls: controls(suite),
        failures,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        elapsed_ms: started.elapsed().as_millis(),
    }
}

fn least(r: LeastDominating<Rational>, what: &str) -> Result<Martingale<Rational>> {
    r.least()
        .cloned()
        .ok_or_else(|| Error::Precondition(format!("{what}: no least dominating martingale")))
}

fn finite_norm(x: &Martingale<Rational>, kind: NormKind) -> Rational {
    martingale_norm(x, kind).value.expect_finite()
}

fn regnorm(x: &Martingale<Rational>, f: &Filtration<Rational>, kind: NormKind) -> Result<Rational> {
    match regular_norm(x, f, kind, DEFAULT_PROBE_HORIZON)?.value() {
        Some(NormValue::Finite(v)) => Ok(v.clone()),
        _ => Err(Error::Precondition("X is not regular".into())),
    }
}

fn ensure(ok: bool, reason: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(reason())
    }
}

fn check_case(suite: SuiteName, case: &Case) -> Result<Verdict> {
    let (f, x) = (&case.instance.filtration, &case.instance.x);
    let outcome = match suite {
        SuiteName::OracleEquivalence => oracle_equivalence(f, x, case.seed)?,
        SuiteName::RegnormAxioms => {
            regnorm_axioms(f, x, case.other.as_ref().expect("drawn"), case.seed)?
        }
        SuiteName::Fatou => return fatou(f, x),
        SuiteName::Ideal => ideal(x, case.other.as_ref().expect("drawn")),
        SuiteName::LatticeAxioms => lattice_axioms(f, x, case.other.as_ref().expect("drawn"))?,
    };
    Ok(match outcome {
        Ok(()) => Verdict::Pass { gated: 0 },
        Err(reason) => Verdict::Fail(reason),
    })
}

fn oracle_equivalence(
    f: &Filtration<Rational>,
    x: &Martingale<Rational>,
    seed: u64,
) -> Result<Result<(), String>> {
    let k = krickeberg_modulus(x, f, DEFAULT_PROBE_HORIZON)?;
    let Some(modulus) = k.certified() else {
        return Ok(Err(format!(
            "Krickeberg modulus not certified: {:?}",
            k.mismatch
        )));
    };
    let lp = least(lp_least_dominating(x, f)?, "LP")?;
    let sup = least(martingale_sup(&[x.clone(), x.neg()], f)?, "sup{X, -X}")?;
    if *modulus != lp {
        return Ok(Err(
            "Krickeberg modulus differs from the LP least dominating martingale".into(),
        ));
    }
    if lp != sup {
        return Ok(Err(
            "LP least dominating martingale differs from sup{X, -X}".into(),
        ));
    }
    // w = |x_N| + v with v >= 0 generates a martingale above ±X
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let top = x.term(x.horizon()).abs();
    let d = match f.space() {
        SpaceKind::FiniteDim(d) => d,
        _ => unreachable!("random instances are finite dimensional"),
    };
    for s in 0..DOMINATING_SAMPLES {
        let w = &top + &random_vector(&mut rng, d, true);
        let y = f.martingale_from(&w, x.horizon())?;
        if !dominates(&y, x)? {
            continue;
        }
        if !modulus.leq(&y)? {
            return Ok(Err(format!(
                "modulus exceeds sampled dominating martingale {s}"
            )));
        }
    }
    Ok(Ok(()))
}

fn regnorm_axioms(
    f: &Filtration<Rational>,
    x: &Martingale<Rational>,
    y: &Martingale<Rational>,
    seed: u64,
) -> Result<Result<(), String>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xa11);
    let a = Rational::ratio(rng.gen_range(-3..=3), rng.gen_range(1..=2));
    let modulus = least(lp_least_dominating(x, f)?, "|X|")?;
    for kind in [NormKind::Sup, NormKind::L1] {
        let (nx, rx) = (finite_norm(x, kind), regnorm(x, f, kind)?);
        let ry = regnorm(y, f, kind)?;
        let rsum = regnorm(
            &x.linear(y, &Rational::ratio(1, 1), &Rational::ratio(1, 1))?,
            f,
            kind,
        )?;
        let rscaled = regnorm(&x.scale(&a), f, kind)?;
        let name = kind.name();
        let checks = [
            (nx <= rx, "‖X‖ <= ‖X‖_r"),
            (nx <= rx.clone() * Rational::ratio(2, 1), "‖X‖ <= 2‖X‖_r"),
            (rsum <= rx.clone() + ry, "triangle inequality"),
            (rscaled == a.abs() * rx.clone(), "homogeneity"),
            (rx == finite_norm(&modulus, kind), "‖X‖_r = ‖|X|‖"),
            (
                !rx.is_zero() || x.terms().iter().all(Seq::is_zero),
                "‖X‖_r = 0 only for X = 0",
            ),
        ];
        if let Some((_, law)) = checks.iter().find(|(ok, _)| !ok) {
            return Ok(Err(format!("{law} fails in the {name} norm")));
        }
    }
    Ok(Ok(()))
}

/// Norms whose level operators are contractions; the others are gated.
fn contractive_kinds(f: &Filtration<Rational>, upto: usize) -> Result<(Vec<NormKind>, usize)> {
    let mut kinds = Vec::new();
    let mut gated = 0;
    for kind in [NormKind::Sup, NormKind::L1] {
        if f.level_norms(upto, kind)?
            .iter()
            .all(|v| *v <= Rational::ratio(1, 1))
        {
            kinds.push(kind);
        } else {
            gated += 1;
        }
    }
    Ok((kinds, gated))
}

fn fatou_equality(
    f: &Filtration<Rational>,
    x: &Martingale<Rational>,
    kind: NormKind,
) -> Result<Result<(), String>> {
    let (n, r) = (finite_norm(x, kind), regnorm(x, f, kind)?);
    Ok(ensure(n == r, || {
        format!(
            "‖X‖ = {} but ‖X‖_r = {} in the {} norm",
            n.to_text(),
            r.to_text(),
            kind.name()
        )
    }))
}

fn fatou(f: &Filtration<Rational>, x: &Martingale<Rational>) -> Result<Verdict> {
    let (kinds, gated) = contractive_kinds(f, x.horizon())?;
    if kinds.is_empty() {
        return Ok(Verdict::Skip("hypothesis violated, skipped".into()));
    }
    for kind in kinds {
        if let Err(reason) = fatou_equality(f, x, kind)? {
            return Ok(Verdict::Fail(reason));
        }
    }
    Ok(Verdict::Pass { gated })
}

fn ideal(x: &Martingale<Rational>, y: &Martingale<Rational>) -> Result<(), String> {
    ensure(y.is_nonneg() && y.leq(x).unwrap_or(false), || {
        "instance is not 0 <= Y <= X".into()
    })?;
    norm_monotone(x, y)
}

fn norm_monotone(x: &Martingale<Rational>, y: &Martingale<Rational>) -> Result<(), String> {
    for kind in [NormKind::Sup, NormKind::L1] {
        let (nx, ny) = (finite_norm(x, kind), finite_norm(y, kind));
        ensure(ny <= nx, || {
            format!(
                "‖Y‖ = {} exceeds ‖X‖ = {} in the {} norm",
                ny.to_text(),
                nx.to_text(),
                kind.name()
            )
        })?;
    }
    Ok(())
}

fn lattice_axioms(
    f: &Filtration<Rational>,
    x: &Martingale<Rational>,
    y: &Martingale<Rational>,
) -> Result<Result<(), String>> {
    let one = Rational::ratio(1, 1);
    let zero = Martingale::new(x.start(), vec![Seq::zero(); x.terms().len()]);
    let join = least(martingale_sup(&[x.clone(), y.clone()], f)?, "X ∨ Y")?;
    let join_rev = least(martingale_sup(&[y.clone(), x.clone()], f)?, "Y ∨ X")?;
    let meet = least(martingale_sup(&[x.neg(), y.neg()], f)?, "-X ∨ -Y")?.neg();
    let abs = least(martingale_sup(&[x.clone(), x.neg()], f)?, "X ∨ -X")?;
    let pos = least(martingale_sup(&[x.clone(), zero.clone()], f)?, "X⁺")?;
    let negp = least(martingale_sup(&[x.neg(), zero], f)?, "X⁻")?;
    let modulus = krickeberg_modulus(x, f, DEFAULT_PROBE_HORIZON)?;
    let checks = [
        (
            check_martingale(&join, f)?.passed(),
            "X ∨ Y is a martingale",
        ),
        (x.leq(&join)? && y.leq(&join)?, "X ∨ Y is an upper bound"),
        (join == join_rev, "X ∨ Y = Y ∨ X"),
        (meet.leq(x)? && meet.leq(y)?, "X ∧ Y is a lower bound"),
        (
            join.linear(&meet, &one, &one)? == x.linear(y, &one, &one)?,
            "X ∨ Y + X ∧ Y = X + Y",
        ),
        (modulus.certified() == Some(&abs), "|X| = X ∨ -X"),
        (pos.linear(&negp, &one, &one)? == abs, "|X| = X⁺ + X⁻"),
        (pos.linear(&negp, &one, &-one.clone())? == *x, "X = X⁺ - X⁻"),
    ];
    Ok(match checks.iter().find(|(ok, _)| !ok) {
        Some((_, law)) => Err(format!("{law} fails")),
        None => Ok(()),
    })
}

/// `E_1` averages both coordinates with the given weights, `E_2 = I`.
fn two_point(
    weights: [i64; 2],
    last: [(i64, i64); 2],
) -> (Filtration<Rational>, Martingale<Rational>) {
    let (a, b) = (
        Rational::ratio(weights[0], 1),
        Rational::ratio(weights[1], 1),
    );
    let total = a.clone() + b.clone();
    let row = vec![a / total.clone(), b / total];
    let avg = Operator::Block(
        BlockOp::finite(Matrix::from_rows(vec![row.clone(), row])).expect("square"),
    );
    let f = Filtration::new(1, vec![avg, Operator::identity()], SpaceKind::FiniteDim(2));
    let last = Seq::finite(last.iter().map(|&(n, d)| Rational::ratio(n, d)).collect());
    let x = f.martingale_from(&last, 2).expect("two levels");
    (f, x)
}

fn control(label: &str, broken: Result<Result<(), String>>, expect: &str) -> ControlOutcome {
    match broken {
        Ok(Err(reason)) => ControlOutcome {
            label: label.into(),
            as_expected: true,
            detail: format!("failed as expected: {reason}"),
        },
        Ok(Ok(())) => ControlOutcome {
            label: label.into(),
            as_expected: false,
            detail: format!("passed, but {expect}"),
        },
        Err(e) => ControlOutcome {
            label: label.into(),
            as_expected: false,
            detail: format!("error: {e}"),
        },
    }
}

fn controls(suite: SuiteName) -> Vec<ControlOutcome> {
    // X = ((0,0), (1,-1)) under equal weights: |X| = ((1,1), (1,1))
    let (f, x) = two_point([1, 1], [(1, 1), (-1, 1)]);
    match suite {
        SuiteName::OracleEquivalence => {
            let naive = x.abs();
            let broken = lp_least_dominating(&x, &f).and_then(|r| least(r, "LP"));
            vec![control(
                "termwise |x_n| as the modulus",
                broken.map(|lp| {
                    ensure(naive == lp, || {
                        "termwise |x_n| is not the least dominating martingale".into()
                    })
                }),
                "termwise absolute values are not a martingale",
            )]
        }
        SuiteName::RegnormAxioms => {
            // dominating only +X: X⁺ = sup{X, 0}
            let zero = Martingale::new(x.start(), vec![Seq::zero(); 2]);
            let broken = martingale_sup(&[x.clone(), zero], &f)
                .and_then(|r| least(r, "X⁺"))
                .and_then(|pos| {
                    let r = regnorm(&x, &f, NormKind::L1)?;
                    let one_sided = finite_norm(&pos, NormKind::L1);
                    Ok(ensure(r == one_sided, || {
                        format!(
                            "one-sided bound gives {} but ‖X‖_r = {}",
                            one_sided.to_text(),
                            r.to_text()
                        )
                    }))
                });
            vec![control(
                "one-sided domination as the regular norm",
                broken,
                "‖X‖_r needs both ±X",
            )]
        }
        SuiteName::Fatou => {
            let doubled = Filtration::new(
                1,
                vec![scaled_average(), Operator::identity()],
                SpaceKind::FiniteDim(2),
            );
            let gate = match fatou(&doubled, &x) {
                Ok(Verdict::Skip(reason)) => ControlOutcome {
                    label: "scaled level".into(),
                    as_expected: true,
                    detail: reason,
                },
                Ok(Verdict::Pass { .. }) | Ok(Verdict::Fail(_)) => ControlOutcome {
                    label: "scaled level".into(),
                    as_expected: false,
                    detail: "gate did not skip a non-contractive filtration".into(),
                },
                Err(e) => ControlOutcome {
                    label: "scaled level".into(),
                    as_expected: false,
                    detail: format!("error: {e}"),
                },
            };
            // weights (1, 3): ‖X‖_1 = 3/2 but ‖X‖_r = 7/4; the gate is bypassed
            let (wf, wx) = two_point([1, 3], [(-1, 2), (1, 1)]);
            vec![
                gate,
                control(
                    "weighted L1 levels with the gate bypassed",
                    fatou_equality(&wf, &wx, NormKind::L1),
                    "the equality needs contractive levels",
                ),
            ]
        }
        SuiteName::Ideal => {
            let (_, px) = two_point([1, 1], [(1, 1), (3, 1)]);
            let doubled = px.scale(&Rational::ratio(2, 1));
            vec![control(
                "Y = 2X",
                Ok(norm_monotone(&px, &doubled)),
                "Y <= X fails for Y = 2X",
            )]
        }
        SuiteName::LatticeAxioms => {
            let neg = x.neg();
            let termwise = Martingale::new(
                x.start(),
                x.indices().map(|n| x.term(n).join(neg.term(n))).collect(),
            );
            let broken = check_martingale(&termwise, &f).map(|r| {
                ensure(r.passed(), || match r.failures().next() {
                    Some(c) => format!(
                        "termwise join breaks the {} law{}",
                        c.law,
                        c.witness
                            .as_ref()
                            .map(|w| format!(" at {w}"))
                            .unwrap_or_default()
                    ),
                    None => "termwise join is rejected".into(),
                })
            });
            vec![control(
                "termwise join of X and -X",
                broken,
                "termwise joins are not martingales",
            )]
        }
    }
}

/// Twice the equal-weight average: a positive operator of norm 2.
fn scaled_average() -> Operator<Rational> {
    let h = Rational::ratio(1, 1);
    Operator::Block(
        BlockOp::finite(Matrix::from_rows(vec![
            vec![h.clone(), h.clone()],
            vec![h.clone(), h],
        ]))
        .expect("square"),
    )
}
