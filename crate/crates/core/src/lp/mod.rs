//! Exact dense two-phase simplex.
//!
//! Pivoting follows Bland's rule throughout (smallest eligible entering
//! column, ties in the ratio test broken by smallest basic column), which
//! rules out cycling and makes every run deterministic. Identical constraint
//! rows are merged before solving, and several objectives over one feasible
//! region share a single phase 1.

use std::fmt;

use serde::Serialize;

use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct LpProblem<T> {
    pub num_vars: usize,
    /// Variables flagged here are constrained `>= 0`; all others are free.
    pub nonneg: Vec<bool>,
    /// Minimise `objective · v`.
    pub objective: Vec<T>,
    pub eq_constraints: Vec<(Vec<T>, T)>,
    pub geq_constraints: Vec<(Vec<T>, T)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpResult<T> {
    pub status: LpStatus,
    /// Optimal value; zero unless `status` is `Optimal`.
    pub value: T,
    /// An optimal point; empty unless `status` is `Optimal`.
    pub witness: Vec<T>,
}

impl<T: Scalar> LpResult<T> {
    fn without(status: LpStatus) -> Self {
        Self {
            status,
            value: T::zero(),
            witness: Vec::new(),
        }
    }
}

impl<T: Scalar> LpProblem<T> {
    /// All variables free, zero objective, no constraints.
    pub fn new(num_vars: usize) -> Self {
        Self {
            num_vars,
            nonneg: vec![false; num_vars],
            objective: vec![T::zero(); num_vars],
            eq_constraints: Vec::new(),
            geq_constraints: Vec::new(),
        }
    }

    pub fn add_eq(&mut self, coeffs: Vec<T>, rhs: T) {
        assert_eq!(coeffs.len(), self.num_vars);
        self.eq_constraints.push((coeffs, rhs));
    }

    pub fn add_geq(&mut self, coeffs: Vec<T>, rhs: T) {
        assert_eq!(coeffs.len(), self.num_vars);
        self.geq_constraints.push((coeffs, rhs));
    }

    pub fn add_leq(&mut self, coeffs: Vec<T>, rhs: T) {
        self.add_geq(coeffs.into_iter().map(|c| -c).collect(), -rhs);
    }

    /// `true` when `v` meets every constraint exactly.
    pub fn is_feasible(&self, v: &[T]) -> bool {
        let dot = |a: &[T]| {
            a.iter()
                .zip(v)
                .fold(T::zero(), |s, (x, y)| s + x.clone() * y.clone())
        };
        v.len() == self.num_vars
            && self
                .nonneg
                .iter()
                .zip(v)
                .all(|(n, x)| !n || *x >= T::zero())
            && self.eq_constraints.iter().all(|(a, b)| dot(a) == *b)
            && self.geq_constraints.iter().all(|(a, b)| dot(a) >= *b)
    }
}

pub fn solve_lp_exact<T: Scalar>(p: &LpProblem<T>) -> LpResult<T> {
    solve_many(p, std::slice::from_ref(&p.objective))
        .pop()
        .expect("one objective in, one result out")
}

/// Minimises each objective over the feasible region of `p` (its own
/// `objective` field is ignored).
pub fn solve_many<T: Scalar>(p: &LpProblem<T>, objectives: &[Vec<T>]) -> Vec<LpResult<T>> {
    let Some(phase1) = Phase1::run(p) else {
        return objectives
            .iter()
            .map(|_| LpResult::without(LpStatus::Infeasible))
            .collect();
    };
    let mut done: Vec<(&Vec<T>, LpResult<T>)> = Vec::new();
    let mut out = Vec::with_capacity(objectives.len());
    for c in objectives {
        let res = match done.iter().find(|(d, _)| *d == c) {
            Some((_, r)) => r.clone(),
            None => {
                let r = phase1.minimise(c);
                done.push((c, r.clone()));
                r
            }
        };
        out.push(res);
    }
    out
}

/// Column layout of the standard-form tableau.
struct Layout {
    /// For each original variable: its positive column and, when free, the
    /// column of its negative part.
    var_cols: Vec<(usize, Option<usize>)>,
    /// First artificial column; slacks sit between the structural columns
    /// and this one.
    first_art: usize,
    total: usize,
}

struct Tableau<T> {
    rows: Vec<Vec<T>>,
    basis: Vec<usize>,
}

impl<T: Scalar> Tableau<T> {
    fn pivot(&mut self, r: usize, c: usize, obj: &mut [T]) {
        let inv = T::one() / self.rows[r][c].clone();
        for x in self.rows[r].iter_mut() {
            if !x.is_zero() {
                *x = x.clone() * inv.clone();
            }
        }
        let pivot_row = self.rows[r].clone();
        let nz: Vec<usize> = (0..pivot_row.len())
            .filter(|&j| !pivot_row[j].is_zero())
            .collect();
        let eliminate = |row: &mut [T]| {
            let f = row[c].clone();
            if f.is_zero() {
                return;
            }
            for &j in &nz {
                row[j] = row[j].clone() - f.clone() * pivot_row[j].clone();
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(obj);
        self.basis[r] = c;
    }

    /// Drives `obj` (reduced costs, last entry = minus the objective value)
    /// to optimality over the columns `allowed` marks. Returns `false` when
    /// the objective is unbounded below.
    fn optimise(&mut self, obj: &mut [T], allowed: &[bool]) -> bool {
        let rhs = obj.len() - 1;
        loop {
            let Some(c) = (0..rhs).find(|&j| allowed[j] && obj[j] < T::zero()) else {
                return true;
            };
            let mut best: Option<(usize, T)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[c] > T::zero() {
                    let ratio = row[rhs].clone() / row[c].clone();
                    let better = match &best {
                        None => true,
                        Some((b, r)) => {
                            ratio < *r || (ratio == *r && self.basis[i] < self.basis[*b])
                        }
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            match best {
                None => return false,
                Some((r, _)) => self.pivot(r, c, obj),
            }
        }
    }
}

struct Phase1<T> {
    layout: Layout,
    tableau: Tableau<T>,
}

impl<T: Scalar> Phase1<T> {
    fn run(p: &LpProblem<T>) -> Option<Self> {
        let (eqs, geqs) = merged_rows(p)?;
        let mut var_cols = Vec::with_capacity(p.num_vars);
        let mut col = 0;
        for &nonneg in &p.nonneg {
            if nonneg {
                var_cols.push((col, None));
                col += 1;
            } else {
                var_cols.push((col, Some(col + 1)));
                col += 2;
            }
        }
        let structural = col;
        let slack0 = structural;
        let art0 = slack0 + geqs.len();
        let m = eqs.len() + geqs.len();
        // rows: structural part, slack (geq only), then sign-normalised rhs
        let mut rows: Vec<(Vec<T>, Option<usize>, T)> = Vec::with_capacity(m);
        for (a, b) in &eqs {
            rows.push((expand(a, &var_cols, structural), None, b.clone()));
        }
        for (k, (a, b)) in geqs.iter().enumerate() {
            rows.push((
                expand(a, &var_cols, structural),
                Some(slack0 + k),
                b.clone(),
            ));
        }
        let needs_art: Vec<bool> = rows
            .iter()
            .map(|(_, slack, b)| !(slack.is_some() && *b <= T::zero()))
            .collect();
        let n_art = needs_art.iter().filter(|x| **x).count();
        let total = art0 + n_art;
        let mut tab_rows = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let mut next_art = art0;
        for ((a, slack, b), art) in rows.into_iter().zip(&needs_art) {
            let mut row = vec![T::zero(); total + 1];
            row[..structural].clone_from_slice(&a);
            if let Some(s) = slack {
                row[s] = -T::one();
            }
            row[total] = b.clone();
            // a slack-basic row needs +1 on its slack, so it is always negated
            if !*art || row[total] < T::zero() {
                for x in row.iter_mut() {
                    *x = -x.clone();
                }
            }
            if *art {
                row[next_art] = T::one();
                basis.push(next_art);
                next_art += 1;
            } else {
                basis.push(slack.expect("slack-basic row"));
            }
            tab_rows.push(row);
        }
        let mut tableau = Tableau {
            rows: tab_rows,
            basis,
        };
        let layout = Layout {
            var_cols,
            first_art: art0,
            total,
        };
        // phase 1: minimise the sum of artificials
        let mut obj = vec![T::zero(); total + 1];
        for (row, &b) in tableau.rows.iter().zip(&tableau.basis) {
            if b >= art0 {
                for (o, x) in obj.iter_mut().zip(row) {
                    *o = o.clone() - x.clone();
                }
            }
        }
        for o in obj[art0..total].iter_mut() {
            *o = T::zero();
        }
        let allowed = vec![true; total];
        tableau.optimise(&mut obj, &allowed);
        if !obj[total].is_zero() {
            return None;
        }
        // drive remaining artificials out of the basis or drop their rows
        let mut r = 0;
        while r < tableau.rows.len() {
            if tableau.basis[r] >= art0 {
                match (0..art0).find(|&j| !tableau.rows[r][j].is_zero()) {
                    Some(c) => {
                        tableau.pivot(r, c, &mut obj);
                        r += 1;
                    }
                    None => {
                        tableau.rows.remove(r);
                        tableau.basis.remove(r);
                    }
                }
            } else {
                r += 1;
            }
        }
        Some(Self { layout, tableau })
    }

    fn minimise(&self, c: &[T]) -> LpResult<T> {
        let l = &self.layout;
        let total = l.total;
        let mut cost = vec![T::zero(); total];
        for (cv, &(pos, neg)) in c.iter().zip(&l.var_cols) {
            cost[pos] = cv.clone();
            if let Some(neg) = neg {
                cost[neg] = -cv.clone();
            }
        }
        let mut tab = Tableau {
            rows: self.tableau.rows.clone(),
            basis: self.tableau.basis.clone(),
        };
        let mut obj: Vec<T> = cost
            .iter()
            .cloned()
            .chain(std::iter::once(T::zero()))
            .collect();
        for (row, &b) in tab.rows.iter().zip(&tab.basis) {
            let cb = cost[b].clone();
            if !cb.is_zero() {
                for (o, x) in obj.iter_mut().zip(row) {
                    *o = o.clone() - cb.clone() * x.clone();
                }
            }
        }
        let allowed: Vec<bool> = (0..total).map(|j| j < l.first_art).collect();
        if !tab.optimise(&mut obj, &allowed) {
            return LpResult::without(LpStatus::Unbounded);
        }
        let mut col_value = vec![T::zero(); total];
        for (row, &b) in tab.rows.iter().zip(&tab.basis) {
            col_value[b] = row[total].clone();
        }
        let witness: Vec<T> = l
            .var_cols
            .iter()
            .map(|&(pos, neg)| match neg {
                Some(neg) => col_value[pos].clone() - col_value[neg].clone(),
                None => col_value[pos].clone(),
            })
            .collect();
        let value = c
            .iter()
            .zip(&witness)
            .fold(T::zero(), |s, (a, b)| s + a.clone() * b.clone());
        LpResult {
            status: LpStatus::Optimal,
            value,
            witness,
        }
    }
}

fn expand<T: Scalar>(a: &[T], var_cols: &[(usize, Option<usize>)], width: usize) -> Vec<T> {
    let mut row = vec![T::zero(); width];
    for (x, &(pos, neg)) in a.iter().zip(var_cols) {
        row[pos] = x.clone();
        if let Some(neg) = neg {
            row[neg] = -x.clone();
        }
    }
    row
}

type Rows<T> = Vec<(Vec<T>, T)>;

/// Merges duplicate rows: equal equality rows must agree on the right-hand
/// side (otherwise `None`, infeasible); equal `>=` rows keep the largest.
fn merged_rows<T: Scalar>(p: &LpProblem<T>) -> Option<(Rows<T>, Rows<T>)> {
    let mut eqs: Rows<T> = Vec::new();
    for (a, b) in &p.eq_constraints {
        if a.iter().all(|x| x.is_zero()) {
            if !b.is_zero() {
                return None;
            }
            continue;
        }
        match eqs.iter().find(|(e, _)| e == a) {
            Some((_, rhs)) if rhs != b => return None,
            Some(_) => {}
            None => eqs.push((a.clone(), b.clone())),
        }
    }
    let mut geqs: Rows<T> = Vec::new();
    for (a, b) in &p.geq_constraints {
        if a.iter().all(|x| x.is_zero()) {
            if *b > T::zero() {
                return None;
            }
            continue;
        }
        match geqs.iter_mut().find(|(e, _)| e == a) {
            Some((_, rhs)) => *rhs = T::max_of(rhs, b),
            None => geqs.push((a.clone(), b.clone())),
        }
    }
    Some((eqs, geqs))
}

fn linear_text<T: Scalar>(coeffs: &[T]) -> String {
    let terms: Vec<String> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| format!("{} v{}", c.to_text(), i + 1))
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

/// Plain-text dump, one constraint per line.
impl<T: Scalar> fmt::Display for LpProblem<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "minimize {}", linear_text(&self.objective))?;
        for (a, b) in &self.eq_constraints {
            writeln!(f, "  {} = {}", linear_text(a), b.to_text())?;
        }
        for (a, b) in &self.geq_constraints {
            writeln!(f, "  {} >= {}", linear_text(a), b.to_text())?;
        }
        for (i, n) in self.nonneg.iter().enumerate() {
            if *n {
                writeln!(f, "  v{} >= 0", i + 1)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests;
