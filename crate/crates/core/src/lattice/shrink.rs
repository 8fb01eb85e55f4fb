//! The shrinking argument for the period-3 averaging family on `c`: any
//! dominating martingale can be lowered at a coordinate `3k` that every
//! level fixes, so no least one exists.

use crate::error::{Error, Result};
use crate::families::{triple_filtration, triple_lower_bound};
use crate::mart::{check_martingale, dominates, Filtration, Martingale};
use crate::scalar::Scalar;
use crate::seq::SpaceKind;

#[derive(Clone, Debug, PartialEq)]
pub enum Shrunk<T> {
    /// `z` equals `y` except at `coordinate`, which is zero in every term.
    Smaller { z: Martingale<T>, coordinate: usize },
    /// No coordinate `3k` of `y_1` is positive.
    NoCandidate { certificate: String },
}

pub fn shrink_dominating<T: Scalar>(
    y: &Martingale<T>,
    x: &Martingale<T>,
    f: &Filtration<T>,
) -> Result<Shrunk<T>> {
    let family = triple_filtration::<T>();
    if f.space() != SpaceKind::C || f.start() != family.start() {
        return Err(Error::Precondition(
            "expects the period-3 averaging family on c".into(),
        ));
    }
    for n in y.indices() {
        if f.level(n)? != family.level(n)? {
            return Err(Error::Precondition(format!(
                "level {n} is not the period-3 average"
            )));
        }
    }
    if !dominates(y, x)? {
        return Err(Error::Precondition("Y does not dominate ±X".into()));
    }
    // membership in c is not required here: its failure is the certificate
    let law = check_martingale(y, f)?;
    if !law.law("martingale").is_some_and(|l| l.passed) {
        return Err(Error::Precondition(format!(
            "Y: {}",
            law.to_string().trim_end()
        )));
    }
    let y1 = y.term(f.start());
    for n in x.indices() {
        let gap = &triple_lower_bound::<T>(n) - y1;
        if let Some(i) = gap.first_positive() {
            return Err(Error::Precondition(format!(
                "y_1 is below u_{n} at coordinate {i}"
            )));
        }
    }
    let Some(k) = y1.first_positive_on(3, 3) else {
        let certificate = if y1.in_space(SpaceKind::C) {
            "no coordinate 3k of y_1 is positive, but y_1 is in c".to_string()
        } else {
            "y_1 has unit entries at residues 1,2 and zero at residue 0, hence not in c".to_string()
        };
        return Ok(Shrunk::NoCandidate { certificate });
    };
    let z = Martingale::new(
        y.start(),
        y.terms()
            .iter()
            .map(|t| t.with_coord(k, T::zero()))
            .collect(),
    );
    let valid = check_martingale(&z, f)?.passed() && dominates(&z, x)? && z.leq(y)? && z != *y;
    if !valid {
        return Err(Error::Precondition(format!(
            "zeroing coordinate {k} does not give a smaller dominating martingale"
        )));
    }
    Ok(Shrunk::Smaller { z, coordinate: k })
}
