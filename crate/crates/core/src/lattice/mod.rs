//! Lattice operations on martingales: moduli, suprema and regular norms.
//!
//! Two independent routes compute a modulus. [`krickeberg_modulus`] works
//! symbolically with the increasing probes `E_n|x_m|`; in finite dimension
//! [`lp_least_dominating`] finds the least dominating martingale by linear
//! programming. Each serves as the other's oracle.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lp::{solve_many, LpProblem, LpStatus};
use crate::mart::{check_martingale, dominates, martingale_norm, Filtration, Martingale, Witness};
use crate::op::Operator;
use crate::scalar::{lcm, Scalar};
use crate::seq::{ExtSeq, Mode, NormKind, NormValue, SpaceKind};

mod shrink;

pub use shrink::{shrink_dominating, Shrunk};

/// Default number of probe terms for [`krickeberg_modulus`].
pub const DEFAULT_PROBE_HORIZON: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModulusMethod {
    Krickeberg,
    LatticeHomFastpath,
    LpOracle,
}

/// The last two probes of a level whose probes did not settle.
#[derive(Clone, Debug, PartialEq)]
pub struct Unsettled<T> {
    pub n: usize,
    pub previous: ExtSeq<T>,
    pub last: ExtSeq<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModulusResult<T> {
    pub modulus: Martingale<T>,
    /// The probe limits themselves, before any repair.
    pub limits: Martingale<T>,
    pub method: ModulusMethod,
    pub stabilized: bool,
    /// Set when the probe limits are not themselves a dominating martingale.
    pub mismatch: Option<String>,
    pub unsettled: Option<Unsettled<T>>,
}

impl<T: Scalar> ModulusResult<T> {
    /// The modulus when it was certified, `None` otherwise.
    pub fn certified(&self) -> Option<&Martingale<T>> {
        self.stabilized.then_some(&self.modulus)
    }
}

fn is_dominating<T: Scalar>(
    z: &Martingale<T>,
    x: &Martingale<T>,
    f: &Filtration<T>,
) -> Result<bool> {
    Ok(check_martingale(z, f)?.passed() && dominates(z, x)?)
}

/// `|X|_n = sup_{m >= n} E_n|x_m|`, certified symbolically.
///
/// With a finite list of terms the supremum sits at the last one. A
/// rule-generated martingale is probed at `m = H-1, H` where
/// `H = max(probe_horizon, horizon + 1)`; a level settles when both probes
/// are equal, or when both agree with `E_n|head|` up to their cuts and have
/// the same remainder beyond it. Unsettled levels are reported (in finite
/// dimension the LP oracle takes over) rather than extrapolated.
pub fn krickeberg_modulus<T: Scalar>(
    x: &Martingale<T>,
    f: &Filtration<T>,
    probe_horizon: usize,
) -> Result<ModulusResult<T>> {
    let levels: Vec<Operator<T>> = x.indices().map(|n| f.level(n)).collect::<Result<_>>()?;
    let all_homs = levels
        .iter()
        .all(|e| matches!(e.is_lattice_hom(), Ok(true)));
    if all_homs {
        let modulus = x.abs();
        let ok = is_dominating(&modulus, x, f)?;
        return Ok(ModulusResult {
            limits: modulus.clone(),
            modulus,
            method: ModulusMethod::LatticeHomFastpath,
            stabilized: ok,
            mismatch: (!ok).then(|| "|x_n| is not a dominating martingale".to_string()),
            unsettled: None,
        });
    }

    let mut terms = Vec::with_capacity(levels.len());
    let mut unsettled = None;
    match x.rule() {
        None => {
            let last = x.term(x.horizon()).abs();
            terms.extend(levels.iter().map(|e| e.apply(&last)));
        }
        Some(rule) => {
            let h = probe_horizon.max(x.horizon() + 1);
            let ext = x.with_horizon(h)?;
            let (c1, c2) = (rule.cut(h - 1)?, rule.cut(h)?);
            let head = rule.head.abs();
            let (a1, a2) = (ext.term(h - 1).abs(), ext.term(h).abs());
            for (n, e) in x.indices().zip(&levels) {
                let (p1, p2) = (e.apply(&a1), e.apply(&a2));
                if p1 == p2 {
                    terms.push(p2);
                    continue;
                }
                let limit = e.apply(&head);
                let symbolic = p1.coords(c1) == limit.coords(c1)
                    && p2.coords(c2) == limit.coords(c2)
                    && p1.skip(c1) == p2.skip(c2);
                if symbolic && fixed_by_later(f, n, h, &limit)? {
                    terms.push(limit);
                } else {
                    if unsettled.is_none() {
                        unsettled = Some(Unsettled {
                            n,
                            previous: p1,
                            last: p2.clone(),
                        });
                    }
                    terms.push(p2);
                }
            }
        }
    }
    let candidate = Martingale::new(x.start(), terms);

    if unsettled.is_some() {
        if let SpaceKind::FiniteDim(_) = f.space() {
            if let LeastDominating::Least(z) = lp_least_dominating(x, f)? {
                return Ok(ModulusResult {
                    modulus: z,
                    limits: candidate,
                    method: ModulusMethod::LpOracle,
                    stabilized: false,
                    mismatch: None,
                    unsettled,
                });
            }
        }
        return Ok(ModulusResult {
            modulus: candidate.clone(),
            limits: candidate,
            method: ModulusMethod::Krickeberg,
            stabilized: false,
            mismatch: None,
            unsettled,
        });
    }

    if is_dominating(&candidate, x, f)? {
        return Ok(ModulusResult {
            modulus: candidate.clone(),
            limits: candidate,
            method: ModulusMethod::Krickeberg,
            stabilized: true,
            mismatch: None,
            unsettled: None,
        });
    }
    // the probe limits are not a martingale: rebuild from the last term
    let top = candidate.term(candidate.horizon()).clone();
    let repaired = Martingale::new(x.start(), levels.iter().map(|e| e.apply(&top)).collect());
    let ok = is_dominating(&repaired, x, f)?;
    let mismatch = if ok {
        let n = x
            .indices()
            .find(|&n| candidate.term(n) != repaired.term(n))
            .expect("candidate failed verification, so some term differs");
        format!(
            "Krickeberg term {n} is {} but the verified modulus has {}",
            candidate.term(n),
            repaired.term(n)
        )
    } else {
        let why = check_martingale(&candidate, f)?;
        format!(
            "no dominating martingale among the probe limits: {}",
            why.to_string().trim_end()
        )
    };
    Ok(ModulusResult {
        modulus: if ok { repaired } else { candidate.clone() },
        limits: candidate,
        method: ModulusMethod::Krickeberg,
        stabilized: ok,
        mismatch: Some(mismatch),
        unsettled: None,
    })
}

fn fixed_by_later<T: Scalar>(f: &Filtration<T>, n: usize, h: usize, z: &ExtSeq<T>) -> Result<bool> {
    for k in n..=h {
        if f.level(k)?.apply(z) != *z {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Outcome of a least-dominating-martingale computation.
#[derive(Clone, Debug, PartialEq)]
pub enum LeastDominating<T> {
    Least(Martingale<T>),
    /// No martingale dominates the family at this horizon.
    Infeasible,
    /// The coordinatewise minima do not form a dominating martingale.
    AssemblyFailed(Witness),
}

impl<T: Scalar> LeastDominating<T> {
    pub fn least(&self) -> Option<&Martingale<T>> {
        match self {
            LeastDominating::Least(z) => Some(z),
            _ => None,
        }
    }
}

fn finite_dim<T: Scalar>(f: &Filtration<T>) -> Result<usize> {
    match f.space() {
        SpaceKind::FiniteDim(d) => Ok(d),
        other => Err(Error::Precondition(format!(
            "linear programming needs a finite-dimensional space, not {}",
            other.name()
        ))),
    }
}

/// Rows of `E_n` on `R^d` for every index of `x`.
fn dense_levels<T: Scalar>(
    x: &Martingale<T>,
    f: &Filtration<T>,
    d: usize,
) -> Result<Vec<Vec<Vec<T>>>> {
    x.indices()
        .map(|n| {
            let e = f.level(n)?;
            let cols: Vec<Vec<T>> = (1..=d).map(|j| e.column(j).coords(d)).collect();
            Ok((0..d)
                .map(|i| cols.iter().map(|c| c[i].clone()).collect())
                .collect())
        })
        .collect()
}

/// The terminal term `y = y_N` determines a martingale through
/// `y_n = E_n y`; this sets up `E_N y = y` and `E_n y >= a_n` for every
/// `a` in `family`, padded with `extra` trailing variables.
fn domination_problem<T: Scalar>(
    levels: &[Vec<Vec<T>>],
    family: &[&Martingale<T>],
    d: usize,
    extra: usize,
) -> LpProblem<T> {
    let pad = |row: &[T]| -> Vec<T> {
        row.iter()
            .cloned()
            .chain(std::iter::repeat_n(T::zero(), extra))
            .collect()
    };
    let mut p = LpProblem::new(d + extra);
    let top = levels.last().expect("nonempty horizon");
    for (i, row) in top.iter().enumerate() {
        let mut r = pad(row);
        r[i] = r[i].clone() - T::one();
        p.add_eq(r, T::zero());
    }
    for a in family {
        for (k, rows) in levels.iter().enumerate() {
            let an = a.term(a.start() + k);
            for (i, row) in rows.iter().enumerate() {
                p.add_geq(pad(row), an.coord(i + 1));
            }
        }
    }
    p
}

fn least_over<T: Scalar>(
    family: &[&Martingale<T>],
    f: &Filtration<T>,
) -> Result<LeastDominating<T>> {
    let first = family
        .first()
        .ok_or_else(|| Error::Precondition("empty family".into()))?;
    for a in family {
        if a.start() != first.start() || a.horizon() != first.horizon() {
            return Err(Error::HorizonMismatch(first.horizon(), a.horizon()));
        }
    }
    let d = finite_dim(f)?;
    let levels = dense_levels(first, f, d)?;
    let p = domination_problem(&levels, family, d, 0);
    let objectives: Vec<Vec<T>> = levels.iter().flatten().cloned().collect();
    let results = solve_many(&p, &objectives);
    if results.iter().any(|r| r.status != LpStatus::Optimal) {
        return Ok(LeastDominating::Infeasible);
    }
    let mut values = results.into_iter().map(|r| r.value);
    let terms: Vec<ExtSeq<T>> = levels
        .iter()
        .map(|_| ExtSeq::finite(values.by_ref().take(d).collect()))
        .collect();
    let z = Martingale::new(first.start(), terms);
    // tripwire: the coordinatewise minima must come from one feasible point
    let top = z.term(z.horizon()).coords(d);
    if !p.is_feasible(&top) {
        return Ok(LeastDominating::AssemblyFailed(Witness::Term {
            n: z.horizon(),
        }));
    }
    for (k, rows) in levels.iter().enumerate() {
        let n = z.start() + k;
        let image: Vec<T> = rows
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&top)
                    .fold(T::zero(), |s, (a, b)| s + a.clone() * b.clone())
            })
            .collect();
        if let Some(i) = (0..d).find(|&i| image[i] != z.term(n).coord(i + 1)) {
            return Ok(LeastDominating::AssemblyFailed(Witness::Coordinate {
                n,
                m: z.horizon(),
                coordinate: i + 1,
            }));
        }
    }
    Ok(LeastDominating::Least(z))
}

/// The least martingale `Z` with `Z >= ±X`, by minimising every coordinate
/// of every term over the dominating martingales.
pub fn lp_least_dominating<T: Scalar>(
    x: &Martingale<T>,
    f: &Filtration<T>,
) -> Result<LeastDominating<T>> {
    finite_dim(f)?;
    let law = check_martingale(x, f)?;
    if !law.passed() {
        return Err(Error::Precondition(format!(
            "not a martingale: {}",
            law.to_string().trim_end()
        )));
    }
    let neg = x.neg();
    least_over(&[x, &neg], f)
}

/// The least martingale dominating every member of `family`.
pub fn martingale_sup<T: Scalar>(
    family: &[Martingale<T>],
    f: &Filtration<T>,
) -> Result<LeastDominating<T>> {
    let refs: Vec<&Martingale<T>> = family.iter().collect();
    least_over(&refs, f)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RegularNormRoute {
    Lp,
    Modulus,
}

#[derive(Clone, Debug, PartialEq)]
pub enum RegularNorm<T> {
    Value {
        value: NormValue<T>,
        route: RegularNormRoute,
    },
    /// No positive martingale dominates `±X` up to `horizon`.
    NotRegular { horizon: usize },
}

impl<T: Scalar> RegularNorm<T> {
    pub fn value(&self) -> Option<&NormValue<T>> {
        match self {
            RegularNorm::Value { value, .. } => Some(value),
            RegularNorm::NotRegular { .. } => None,
        }
    }
}

impl<T: Scalar> fmt::Display for RegularNorm<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegularNorm::Value { value, .. } => write!(f, "{value}"),
            RegularNorm::NotRegular { horizon } => write!(f, "not regular at horizon {horizon}"),
        }
    }
}

/// `‖X‖_r = inf { ‖Y‖ : Y >= ±X }`.
///
/// In finite dimension this is one LP: minimise `t` over the dominating
/// martingales with every term's norm at most `t`. Elsewhere it is the norm
/// of the certified modulus, since `‖X‖_r = ‖|X|‖`.
pub fn regular_norm<T: Scalar>(
    x: &Martingale<T>,
    f: &Filtration<T>,
    kind: NormKind,
    probe_horizon: usize,
) -> Result<RegularNorm<T>> {
    if let SpaceKind::FiniteDim(d) = f.space() {
        let levels = dense_levels(x, f, d)?;
        let neg = x.neg();
        let mut p = domination_problem(&levels, &[x, &neg], d, 1);
        p.nonneg[d] = true;
        let t_minus = |row: &[T]| -> Vec<T> {
            row.iter()
                .map(|a| -a.clone())
                .chain(std::iter::once(T::one()))
                .collect()
        };
        for rows in &levels {
            match kind {
                NormKind::Sup | NormKind::SupPlusLimsup => {
                    for row in rows {
                        p.add_geq(t_minus(row), T::zero());
                    }
                }
                NormKind::L1 => {
                    let total: Vec<T> = (0..d)
                        .map(|j| rows.iter().fold(T::zero(), |s, r| s + r[j].clone()))
                        .collect();
                    p.add_geq(t_minus(&total), T::zero());
                }
            }
        }
        let mut objective = vec![T::zero(); d + 1];
        objective[d] = T::one();
        let r = solve_many(&p, &[objective]).pop().expect("one objective");
        return Ok(match r.status {
            LpStatus::Optimal => RegularNorm::Value {
                value: NormValue::Finite(r.value),
                route: RegularNormRoute::Lp,
            },
            _ => RegularNorm::NotRegular {
                horizon: x.horizon(),
            },
        });
    }
    let m = krickeberg_modulus(x, f, probe_horizon)?;
    Ok(match m.certified() {
        Some(z) => RegularNorm::Value {
            value: martingale_norm(z, kind).value,
            route: RegularNormRoute::Modulus,
        },
        None => RegularNorm::NotRegular {
            horizon: x.horizon(),
        },
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct UnitDomination<T> {
    /// Least `C` with `|x_n| <= C ‖X‖ e` over the horizon.
    pub c: T,
    /// `(E_n e)_n`.
    pub y: Martingale<T>,
    /// Whether `C ‖X‖ Y` dominates `±X`.
    pub dominating: bool,
}

/// Dominates `X` by a multiple of the martingale generated by a strong unit.
pub fn dominate_via_unit<T: Scalar>(
    x: &Martingale<T>,
    f: &Filtration<T>,
    e: &ExtSeq<T>,
    kind: NormKind,
) -> Result<UnitDomination<T>> {
    let dim = match f.space() {
        SpaceKind::FiniteDim(d) => Some(d),
        _ => None,
    };
    check_strong_unit(e, dim)?;
    let y = Martingale::new(
        x.start(),
        x.indices()
            .map(|n| Ok(f.level(n)?.apply(e)))
            .collect::<Result<_>>()?,
    );
    let norm = match martingale_norm(x, kind).value {
        NormValue::Finite(v) => v,
        NormValue::Infinite => return Err(Error::Precondition("X is unbounded".into())),
    };
    if norm.is_zero() {
        return Ok(UnitDomination {
            c: T::zero(),
            dominating: dominates(&y.scale(&T::zero()), x)?,
            y,
        });
    }
    let mut worst = T::zero();
    for t in x.terms() {
        let ratio = match dim {
            Some(d) => (1..=d).fold(T::zero(), |m, i| {
                T::max_of(&m, &(t.coord(i).abs() / e.coord(i)))
            }),
            None => divide_by_unit(&t.abs(), e)
                .norm(NormKind::Sup)
                .expect_finite(),
        };
        worst = T::max_of(&worst, &ratio);
    }
    let c = worst / norm.clone();
    let dominating = dominates(&y.scale(&(c.clone() * norm)), x)?;
    Ok(UnitDomination { c, y, dominating })
}

fn check_strong_unit<T: Scalar>(e: &ExtSeq<T>, dim: Option<usize>) -> Result<()> {
    let fail = |i: usize| {
        Err(Error::Precondition(format!(
            "not a strong unit: coordinate {i} is {}",
            e.coord(i).to_text()
        )))
    };
    let len = dim.unwrap_or(e.prefix().len());
    if let Some(i) = (1..=len).find(|&i| e.coord(i) <= T::zero()) {
        return fail(i);
    }
    if dim.is_some() {
        return Ok(());
    }
    match e.periodic_mode() {
        Some(block) if e.modes().len() == 1 => match block.iter().position(|v| *v <= T::zero()) {
            Some(j) => fail(len + j + 1),
            None => Ok(()),
        },
        _ => Err(Error::Precondition(
            "not a strong unit: the tail must be periodic with positive entries".into(),
        )),
    }
}

/// Coordinatewise `a / e` for a strong unit `e` with periodic tail.
fn divide_by_unit<T: Scalar>(a: &ExtSeq<T>, e: &ExtSeq<T>) -> ExtSeq<T> {
    let len = a.prefix().len().max(e.prefix().len());
    let period = lcm(a.period(), e.period());
    let (ap, am) = a.aligned(len, period);
    let (ep, em) = e.aligned(len, period);
    let unit = &em[0].block;
    let prefix = ap
        .iter()
        .zip(&ep)
        .map(|(x, y)| x.clone() / y.clone())
        .collect();
    let modes = am
        .into_iter()
        .map(|m| Mode {
            ratio: m.ratio,
            block: m
                .block
                .iter()
                .zip(unit)
                .map(|(x, y)| x.clone() / y.clone())
                .collect(),
        })
        .collect();
    ExtSeq::from_modes(prefix, period, modes)
}

#[cfg(test)]
mod tests;
