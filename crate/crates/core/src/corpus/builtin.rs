//! The built-in scenarios, one per worked example.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::json::{FiltrationJson, MartingaleJson, NormJson, SeqJson, SpaceJson, Q};
use super::random::draw_instance;
use super::{Assertion, Expected, Scenario, ScenarioDoc, SeqExpr, SCHEMA_VERSION};
use crate::error::{Error, Result};
use crate::families::{
    banach_filtration, banach_martingale, constant_martingale, halves_filtration,
    halves_martingale, l1_filtration, l1_martingale, triple_filtration, triple_martingale,
};
use crate::mart::{Filtration, Martingale};
use crate::seq::{NormKind, SpaceKind};
use crate::{Rational, Scalar, Seq};

const IDS: [&str; 7] = [
    "example-c-no-modulus",
    "example-halves",
    "example-banach-limit",
    "example-l1-unbounded",
    "example-limsup-norm",
    "prop-strong-unit",
    "kb-c0-failure",
];

pub fn builtin_ids() -> &'static [&'static str] {
    &IDS
}

pub fn builtin(id: &str) -> Result<Scenario> {
    let doc = match id {
        "example-c-no-modulus" => no_modulus_in_c(),
        "example-halves" => halves(),
        "example-banach-limit" => banach_limit(),
        "example-l1-unbounded" => l1_unbounded(),
        "example-limsup-norm" => limsup_norm(),
        "prop-strong-unit" => strong_unit(),
        "kb-c0-failure" => kb_failure(),
        _ => {
            return Err(Error::invalid(format!(
                "unknown scenario {id:?}; built-in ids are {}",
                IDS.join(", ")
            )))
        }
    };
    Scenario::build(doc)
}

fn q(n: i64, d: i64) -> Q {
    Q(Rational::ratio(n, d))
}

fn seq(s: Seq) -> SeqJson {
    SeqJson::of(&s)
}

fn doc(
    id: &str,
    citation: &str,
    norm: NormKind,
    horizon: usize,
    f: &Filtration<Rational>,
    martingales: &[(&str, Martingale<Rational>)],
    assertions: Vec<Assertion>,
) -> ScenarioDoc {
    ScenarioDoc {
        martlat_schema: SCHEMA_VERSION,
        id: id.into(),
        citation: Some(citation.into()),
        space: SpaceJson::from(f.space()),
        norm: NormJson::from(norm),
        horizon,
        seed: None,
        filtration: FiltrationJson::of(f),
        martingales: martingales
            .iter()
            .map(|(name, m)| (name.to_string(), MartingaleJson::of(m)))
            .collect::<BTreeMap<_, _>>(),
        assertions,
    }
}

fn valid(names: &[&str]) -> Vec<Assertion> {
    let mut v = vec![Assertion::FiltrationValid { upto: None }];
    v.extend(names.iter().map(|n| Assertion::MartingaleValid {
        martingale: n.to_string(),
    }));
    v
}

fn no_modulus_in_c() -> ScenarioDoc {
    let horizon = 5;
    let f = triple_filtration();
    // ones at residues 1 and 2 mod 3, zero at residue 0
    let residue = Seq::periodic(vec![], vec![q(1, 1).0, q(1, 1).0, q(0, 1).0]);
    let mut a = valid(&["x", "one"]);
    a.extend([
        Assertion::Domination {
            dominating: "one".into(),
            martingale: "x".into(),
        },
        Assertion::ShrinkChain {
            start: "one".into(),
            target: "x".into(),
            coordinates: vec![3, 6, 9, 12, 15],
            rejected: Some("residue".into()),
        },
        Assertion::NotInSpace {
            value: SeqExpr::Seq(seq(residue.clone())),
            space: SpaceJson::C,
        },
    ]);
    doc(
        "example-c-no-modulus",
        "a regular martingale in c whose dominating martingales can always be lowered, so it has no modulus",
        NormKind::Sup,
        horizon,
        &f,
        &[
            ("x", triple_martingale(horizon)),
            ("one", constant_martingale(1, horizon, Seq::one())),
            ("residue", Martingale::new(1, vec![residue; horizon])),
        ],
        a,
    )
}

fn halves() -> ScenarioDoc {
    let horizon = 6;
    let f = halves_filtration(SpaceKind::Linf);
    let mut a = valid(&["x"]);
    a.push(Assertion::ModulusEquals {
        martingale: "x".into(),
        expected: Expected::Constant(seq(Seq::one())),
        probe_horizon: Some(10),
    });
    doc(
        "example-halves",
        "pair averages with the alternating martingale: the modulus is the constant martingale",
        NormKind::Sup,
        horizon,
        &f,
        &[("x", halves_martingale(horizon))],
        a,
    )
}

fn banach_limit() -> ScenarioDoc {
    let horizon = 6;
    let f = banach_filtration();
    let mut a = valid(&["x", "one"]);
    a.extend([
        Assertion::KrickebergMismatch {
            martingale: "x".into(),
            term: 0,
            krickeberg: seq(Seq::zero()),
            verified: seq(Seq::one()),
            probe_horizon: None,
        },
        Assertion::Domination {
            dominating: "one".into(),
            martingale: "x".into(),
        },
        Assertion::ModulusChain {
            martingale: "x".into(),
            from: 1,
            probe_horizon: None,
        },
        Assertion::SampledLowerBound {
            martingale: "x".into(),
            bound: seq(Seq::one()),
            samples: 40,
            seed: 7,
        },
    ]);
    doc(
        "example-banach-limit",
        "a Banach limit prepended to the pair averages: Krickeberg's formula fails",
        NormKind::Sup,
        horizon,
        &f,
        &[
            ("x", banach_martingale(horizon)),
            ("one", constant_martingale(0, horizon, Seq::one())),
        ],
        a,
    )
}

fn l1_unbounded() -> ScenarioDoc {
    let horizon = 20;
    let f = l1_filtration();
    let mut a = valid(&["x"]);
    a.push(Assertion::LevelNorms {
        value: q(1, 1),
        upto: None,
        norm: None,
    });
    a.push(Assertion::NormGreater {
        martingale: "x".into(),
        slope: 1,
        offset: -1,
        norm: None,
    });
    for n in 1..=horizon {
        // (n - 1) + 2^(2-n)
        let tail = if n <= 2 {
            q(1 << (2 - n), 1)
        } else {
            q(1, 1 << (n - 2))
        };
        a.push(Assertion::NormEquals {
            martingale: "x".into(),
            term: Some(n),
            value: Q(Rational::ratio(n as i64 - 1, 1) + tail.0),
            norm: None,
        });
    }
    doc(
        "example-l1-unbounded",
        "an L1 martingale over contractive levels whose norms grow without bound",
        NormKind::L1,
        horizon,
        &f,
        &[("x", l1_martingale(horizon))],
        a,
    )
}

fn limsup_norm() -> ScenarioDoc {
    let horizon = 6;
    let f = halves_filtration(SpaceKind::Linf);
    let mut a = valid(&["x"]);
    a.push(Assertion::NormEquals {
        martingale: "x".into(),
        term: None,
        value: q(1, 1),
        norm: None,
    });
    a.push(Assertion::RegularNormEquals {
        martingale: "x".into(),
        value: q(2, 1),
        norm: None,
        probe_horizon: None,
    });
    doc(
        "example-limsup-norm",
        "sup plus limsup norm on l-infinity: the modulus has larger norm than the martingale",
        NormKind::SupPlusLimsup,
        horizon,
        &f,
        &[("x", halves_martingale(horizon))],
        a,
    )
}

fn strong_unit() -> ScenarioDoc {
    let (d, levels, horizon) = (4, 2, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let inst = draw_instance(&mut rng, d, levels, horizon, false);
    let mut a = valid(&["x"]);
    a.push(Assertion::UnitDomination {
        martingale: "x".into(),
        unit: seq(Seq::one()),
        c: q(1, 1),
    });
    let mut out = doc(
        "prop-strong-unit",
        "with a strong unit every bounded martingale is regular",
        NormKind::Sup,
        horizon,
        &inst.filtration,
        &[("x", inst.x)],
        a,
    );
    out.seed = Some(1);
    out
}

fn kb_failure() -> ScenarioDoc {
    let horizon = 20;
    let f = halves_filtration(SpaceKind::C0);
    let mut a = valid(&["x"]);
    a.extend([
        Assertion::SeqEquals {
            value: SeqExpr::JoinAbs {
                martingale: "x".into(),
                upto: horizon,
            },
            expected: seq(Seq::finite(vec![Rational::ratio(1, 1); 2 * horizon])),
        },
        Assertion::SeqNormEquals {
            value: SeqExpr::JoinAbs {
                martingale: "x".into(),
                upto: horizon,
            },
            norm: NormJson::Sup,
            expected: q(1, 1),
        },
        Assertion::NotInSpace {
            value: SeqExpr::JoinLimit {
                martingale: "x".into(),
            },
            space: SpaceJson::C0,
        },
    ]);
    doc(
        "kb-c0-failure",
        "in c0 the increasing joins of |x_n| stay norm bounded but their limit leaves the space",
        NormKind::Sup,
        horizon,
        &f,
        &[("x", halves_martingale(horizon))],
        a,
    )
}
