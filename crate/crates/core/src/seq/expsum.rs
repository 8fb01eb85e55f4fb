//! Exponential sums `f(k) = Σ c·ρ^k` with positive bases, one per tail residue.
//!
//! Every decision the sequence lattice needs about a tail (eventual sign,
//! supremum, emptiness) reduces to questions about these sums. Terms are
//! always passed sorted by ratio, largest first.

use crate::scalar::{pow, Scalar};

pub(crate) fn eval<T: Scalar>(terms: &[(T, T)], k: usize) -> T {
    terms
        .iter()
        .fold(T::zero(), |acc, (ratio, c)| acc + c.clone() * pow(ratio, k))
}

/// Smallest `K` such that `f(k)` has the sign of its dominant term for every
/// `k >= K`, together with that sign. `None` when the sum is identically zero.
pub(crate) fn dominance<T: Scalar>(terms: &[(T, T)]) -> Option<(usize, T)> {
    let live: Vec<&(T, T)> = terms.iter().filter(|(_, c)| !c.is_zero()).collect();
    let (lead_ratio, lead) = live.first()?;
    let sign = lead.signum();
    if live.len() == 1 {
        return Some((0, sign));
    }
    let lead_abs = lead.abs();
    // rest_i = |c_i| (ρ_i / ρ_lead)^k, strictly decreasing in k
    let steps: Vec<T> = live[1..]
        .iter()
        .map(|(r, _)| r.clone() / lead_ratio.clone())
        .collect();
    let mut rest: Vec<T> = live[1..].iter().map(|(_, c)| c.abs()).collect();
    let mut k = 0;
    loop {
        let total = rest.iter().fold(T::zero(), |acc, x| acc + x.clone());
        if total < lead_abs {
            return Some((k, sign));
        }
        for (x, s) in rest.iter_mut().zip(&steps) {
            *x = x.clone() * s.clone();
        }
        k += 1;
    }
}

/// `sup_{k >= 0} f(k)` for a sum known to be non-negative for every `k`.
pub(crate) fn sup_nonneg<T: Scalar>(terms: &[(T, T)]) -> T {
    let limit = terms
        .iter()
        .find(|(r, c)| r.is_one() && !c.is_zero())
        .map(|(_, c)| c.clone())
        .unwrap_or_else(T::zero);
    let decaying: Vec<(T, T)> = terms
        .iter()
        .filter(|(r, c)| !r.is_one() && !c.is_zero())
        .cloned()
        .collect();
    let Some((settle, sign)) = dominance(&decaying) else {
        return limit;
    };
    let mut best = limit.clone();
    if sign < T::zero() {
        // f(k) < limit from `settle` on, so only the first few values can win.
        for k in 0..settle {
            best = T::max_of(&best, &eval(terms, k));
        }
        return best;
    }
    let slack = decaying.iter().fold(T::zero(), |acc, (_, c)| acc + c.abs());
    let top_ratio = decaying[0].0.clone();
    let mut envelope = slack * top_ratio.clone();
    let mut k = 0;
    loop {
        best = T::max_of(&best, &eval(terms, k));
        // every later value is at most limit + slack * top_ratio^(k+1)
        if k >= settle && limit.clone() + envelope.clone() <= best {
            return best;
        }
        envelope = envelope * top_ratio.clone();
        k += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    #[test]
    fn dominance_of_mixed_sum() {
        // 2^-k - 3·3^-k: negative at k = 0, 1 (1-3, 1/2-1) then positive
        let terms = vec![(q(1, 2), q(1, 1)), (q(1, 3), q(-3, 1))];
        let (k, s) = dominance(&terms).unwrap();
        assert_eq!(s, q(1, 1));
        for j in k..k + 10 {
            assert!(eval(&terms, j) > q(0, 1));
        }
        assert!(k >= 2);
        assert!(dominance(&[(q(1, 2), q(0, 1))]).is_none());
    }

    #[test]
    fn sup_of_decaying_bump() {
        // 1 + 2^-k - 2·4^-k: values 0, 1, 9/8, 33/32 ... -> sup 9/8 at k = 2
        let terms = vec![(q(1, 1), q(1, 1)), (q(1, 2), q(1, 1)), (q(1, 4), q(-2, 1))];
        assert_eq!(sup_nonneg(&terms), q(9, 8));
    }

    #[test]
    fn sup_approached_from_below_is_limit() {
        let terms = vec![(q(1, 1), q(1, 1)), (q(1, 2), q(-1, 1))];
        assert_eq!(sup_nonneg(&terms), q(1, 1));
    }
}
