//! Cayley–Hamilton reduction of long letter runs for a concrete matrix size.

use std::collections::HashMap;

use crate::coeff::{rat, CoefficientQn};
use crate::error::{Result, TraceError};
use crate::poly::{Mode, MonomialKey, TracePolynomial};
use crate::word::{CyclicWord, Letter, Word};

/// Elementary symmetric functions `σ_1..σ_k` of the eigenvalues of `letter`,
/// written in the power traces `p_j = tr L^j` via Newton's identities
/// `i σ_i = Σ_{j=1}^{i} (-1)^{j-1} σ_{i-j} p_j`.
pub fn elementary_symmetric(mode: Mode, letter: Letter, k: u32) -> Vec<TracePolynomial> {
    let p: Vec<TracePolynomial> = (0..=k).map(|j| TracePolynomial::trace(mode, &Word::power(letter, j))).collect();
    let mut sigma = vec![TracePolynomial::one(mode)];
    for i in 1..=k {
        let mut acc = TracePolynomial::zero(mode);
        for j in 1..=i {
            let term = &sigma[(i - j) as usize] * &p[j as usize];
            acc = if j % 2 == 1 { &acc + &term } else { &acc - &term };
        }
        sigma.push(acc.scale_rational(&rat(1, i64::from(i))));
    }
    sigma
}

struct Reducer {
    mode: Mode,
    k: u32,
    sigma: [Vec<TracePolynomial>; 2],
    memo: HashMap<CyclicWord, TracePolynomial>,
}

impl Reducer {
    fn new(mode: Mode, k: u32) -> Self {
        Self {
            mode,
            k,
            sigma: [elementary_symmetric(mode, Letter::First, k), elementary_symmetric(mode, Letter::Second, k)],
            memo: HashMap::new(),
        }
    }

    fn word(&mut self, w: &CyclicWord) -> TracePolynomial {
        if let Some(p) = self.memo.get(w) {
            return p.clone();
        }
        let runs = w.runs();
        let result = match runs.iter().position(|&(_, e)| e > self.k) {
            None => TracePolynomial::trace(self.mode, w.word()),
            Some(idx) => {
                let (letter, e) = runs[idx];
                // rotate the long run to the end: tr(rest · L^e)
                let rest = Word::from_runs(runs[idx + 1..].iter().chain(&runs[..idx]).copied());
                let mut acc = TracePolynomial::zero(self.mode);
                for i in 1..=self.k {
                    let mut shorter = rest.clone();
                    shorter.push(letter, e - i);
                    let tail = self.word(&crate::word::canonicalize(&shorter));
                    let term = &self.sigma[letter.index()][i as usize] * &tail;
                    acc = if i % 2 == 1 { &acc + &term } else { &acc - &term };
                }
                acc
            }
        };
        self.memo.insert(w.clone(), result.clone());
        result
    }

    fn key(&mut self, key: &MonomialKey) -> TracePolynomial {
        let mut out = TracePolynomial::one(self.mode);
        for f in key.factors() {
            let r = self.word(f);
            out = &out * &r;
            if out.is_zero() {
                return out;
            }
        }
        if key.central() != [0, 0] {
            let central = MonomialKey::from_parts(vec![], key.central());
            out = &out * &TracePolynomial::monomial(self.mode, central, CoefficientQn::one());
        }
        out
    }
}

/// Rewrites every run `L^e` with `e > n_value` by the characteristic identity
/// of an `n_value × n_value` matrix and specializes `n -> n_value`.
pub fn cayley_hamilton_reduce(p: &TracePolynomial, n_value: u32) -> Result<TracePolynomial> {
    if n_value == 0 {
        return Err(TraceError::ZeroN);
    }
    let mut reducer = Reducer::new(p.mode(), n_value);
    let mut out = TracePolynomial::zero(p.mode());
    for (key, c) in p.terms() {
        let r = reducer.key(key);
        out = &out + &r.scale(c);
    }
    Ok(out.specialize_n(i64::from(n_value)))
}

/// Largest single-letter run exponent over all factors.
pub fn max_run_exponent(p: &TracePolynomial) -> u32 {
    p.terms().flat_map(|(k, _)| k.factors().iter()).flat_map(|f| f.runs().iter().map(|&(_, e)| e)).max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::parse_polynomial;

    #[test]
    fn cube_for_two_by_two() {
        let p = parse_polynomial("tr(X^3)").unwrap();
        let r = cayley_hamilton_reduce(&p, 2).unwrap();
        assert_eq!(r, parse_polynomial("3/2*tr(X)*tr(X^2) - 1/2*tr(X)*tr(X)*tr(X)").unwrap());
    }

    #[test]
    fn short_runs_unchanged() {
        let p = parse_polynomial("tr(X^2)").unwrap();
        assert_eq!(cayley_hamilton_reduce(&p, 3).unwrap(), p);
    }

    #[test]
    fn zero_n_rejected() {
        let p = parse_polynomial("tr(X^2)").unwrap();
        assert!(matches!(cayley_hamilton_reduce(&p, 0), Err(TraceError::ZeroN)));
    }

    #[test]
    fn traceless_cube_vanishes_for_n2() {
        // A^2 = -det(A) I for traceless 2x2, so tr A^3 = 0.
        let p = parse_polynomial("tr(A^3)").unwrap();
        assert!(cayley_hamilton_reduce(&p, 2).unwrap().is_zero());
    }

    #[test]
    fn n_one_strips_long_runs() {
        // 1x1: X = (tr X) I, applied only to runs longer than 1
        let p = parse_polynomial("tr(X^3 Y)").unwrap();
        let r = cayley_hamilton_reduce(&p, 1).unwrap();
        assert_eq!(r, parse_polynomial("tr(X)*tr(X)*tr(X Y)").unwrap());
    }

    #[test]
    fn runs_bounded_after_reduction() {
        let p = parse_polynomial("tr(X^5 Y^4 X Y^3) + tr(X^2)").unwrap();
        for n in 1..=3 {
            let r = cayley_hamilton_reduce(&p, n).unwrap();
            assert!(max_run_exponent(&r) <= n);
            assert!(r.has_rational_coefficients());
        }
    }

    #[test]
    fn sigma_two_is_half_difference() {
        // σ_2 = (p_1^2 - p_2) / 2
        let s = elementary_symmetric(Mode::Plain, Letter::First, 2);
        assert_eq!(s[2], parse_polynomial("1/2*tr(X)*tr(X) - 1/2*tr(X^2)").unwrap());
    }
}
