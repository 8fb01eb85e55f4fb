//! Random nested-partition instances: weighted conditional expectations on
//! `R^d` whose partitions refine as the index grows.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::json::{FiltrationJson, MartingaleJson, NormJson, SpaceJson};
use super::{Assertion, Scenario, ScenarioDoc, SCHEMA_VERSION};
use crate::mart::{Filtration, Martingale};
use crate::op::{BlockOp, Matrix, Operator};
use crate::seq::SpaceKind;
use crate::{Rational, Scalar, Seq};

/// Weighted conditional expectation for the partition given by `labels`:
/// coordinates sharing a label form one block.
pub fn conditional_expectation(weights: &[Rational], labels: &[u64]) -> Operator<Rational> {
    let d = weights.len();
    let mut m = Matrix::zeros(d, d);
    for i in 0..d {
        let block: Vec<usize> = (0..d).filter(|&j| labels[j] == labels[i]).collect();
        let total = block
            .iter()
            .fold(Rational::ratio(0, 1), |s, &j| s + weights[j].clone());
        for &j in &block {
            m[(i, j)] = weights[j].clone() / total.clone();
        }
    }
    Operator::Block(BlockOp::finite(m).expect("square matrix"))
}

pub(crate) struct Instance {
    pub filtration: Filtration<Rational>,
    pub x: Martingale<Rational>,
}

/// Draws an instance from `rng`; with `uniform` every weight is 1, which
/// makes each level an L1 contraction as well.
pub(crate) fn draw_instance(
    rng: &mut ChaCha8Rng,
    d: usize,
    levels: usize,
    horizon: usize,
    uniform: bool,
) -> Instance {
    let weights: Vec<Rational> = (0..d)
        .map(|_| {
            if uniform {
                Rational::ratio(1, 1)
            } else {
                Rational::ratio(rng.gen_range(1..=4), rng.gen_range(1..=3))
            }
        })
        .collect();
    // refine by appending one random bit per coordinate per level
    let mut labels = vec![0u64; d];
    let mut partitions = Vec::with_capacity(levels);
    for _ in 0..levels {
        let before = labels.clone();
        for l in labels.iter_mut() {
            *l = *l * 2 + u64::from(rng.gen_bool(0.5));
        }
        if block_count(&labels) == block_count(&before) {
            // no block split: split the block of some coordinate sharing a label
            let shared: Vec<usize> = (0..d)
                .filter(|&i| before.iter().filter(|&&l| l == before[i]).count() > 1)
                .collect();
            if !shared.is_empty() {
                let i = shared[rng.gen_range(0..shared.len())];
                labels[i] ^= 1;
            }
        }
        partitions.push(conditional_expectation(&weights, &labels));
    }
    // index n in 1..=horizon uses partition floor((n-1)·levels/horizon)
    let ops = (1..=horizon)
        .map(|n| partitions[(n - 1) * levels / horizon].clone())
        .collect();
    let filtration = Filtration::new(1, ops, SpaceKind::FiniteDim(d));
    let x = filtration
        .martingale_from(&random_vector(rng, d, false), horizon)
        .expect("levels cover the horizon");
    Instance { filtration, x }
}

fn block_count(labels: &[u64]) -> usize {
    let mut distinct = labels.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    distinct.len()
}

/// A vector of small rationals; nonnegative when `nonneg`.
pub(crate) fn random_vector(rng: &mut ChaCha8Rng, d: usize, nonneg: bool) -> Seq {
    let lo = if nonneg { 0 } else { -4 };
    Seq::finite(
        (0..d)
            .map(|_| Rational::ratio(rng.gen_range(lo..=4), rng.gen_range(1..=3)))
            .collect(),
    )
}

pub(crate) fn instance_scenario(
    id: String,
    seed: u64,
    filtration: &Filtration<Rational>,
    martingales: &[(&str, &Martingale<Rational>)],
    assertions: Vec<Assertion>,
) -> Scenario {
    let horizon = martingales
        .iter()
        .map(|(_, m)| m.horizon())
        .max()
        .unwrap_or(filtration.start());
    let doc = ScenarioDoc {
        martlat_schema: SCHEMA_VERSION,
        id,
        citation: None,
        space: SpaceJson::from(filtration.space()),
        norm: NormJson::Sup,
        horizon,
        seed: Some(seed),
        filtration: FiltrationJson::of(filtration),
        martingales: martingales
            .iter()
            .map(|(name, m)| (name.to_string(), MartingaleJson::of(m)))
            .collect::<BTreeMap<_, _>>(),
        assertions,
    };
    Scenario::build(doc).expect("generated scenarios are well formed")
}

/// A random instance as a scenario with martingale `x` and validity
/// assertions. Panics unless `1 <= levels <= horizon` and `d >= 2`.
pub fn generate_random_instance(seed: u64, d: usize, levels: usize, horizon: usize) -> Scenario {
    assert!(
        d >= 2 && levels >= 1 && levels <= horizon,
        "need d >= 2 and 1 <= levels <= horizon"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inst = draw_instance(&mut rng, d, levels, horizon, false);
    instance_scenario(
        format!("random-s{seed}-d{d}-l{levels}-h{horizon}"),
        seed,
        &inst.filtration,
        &[("x", &inst.x)],
        vec![
            Assertion::FiltrationValid { upto: None },
            Assertion::MartingaleValid {
                martingale: "x".into(),
            },
        ],
    )
}
