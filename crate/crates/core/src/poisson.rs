//! Exact Poisson brackets of trace polynomials by word splicing.
//!
//! For cyclic words `V`, `W` the standard bracket of `tr(dX ∧ dY)` is
//! `Σ tr(V_x W_y) - Σ tr(V_y W_x)`, where `V_x` runs over the splice
//! derivatives of `V` in the first letter. The traceless bracket subtracts
//! `(1/n) tr(V_a) tr(W_b)` from every pairing; the central symbols satisfy
//! `{tr X, tr Y} = n` and commute with everything else.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::coeff::CoefficientQn;
use crate::error::{Result, TraceError};
use crate::poly::{Mode, MonomialKey, RawTerm, TracePolynomial};
use crate::text::{collect_raw, format_terms};
use crate::word::{canonicalize, CyclicWord, Letter, Word};

/// Cuts of a cyclic word at each occurrence of one letter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpliceDerivative {
    pub base: CyclicWord,
    pub letter: Letter,
    pub terms: Vec<(Word, u32)>,
}

pub fn splice_derivative(base: &CyclicWord, letter: Letter) -> SpliceDerivative {
    SpliceDerivative { base: base.clone(), letter, terms: base.cuts(letter) }
}

/// `{tr V, tr W}` as `(integer coefficient, power of n, factors)`.
type WordBracket = Vec<(i64, i32, Vec<CyclicWord>)>;

fn word_bracket(v: &CyclicWord, w: &CyclicWord, traceless: bool) -> WordBracket {
    let mut out = Vec::new();
    for (sign, first, second) in [(1i64, Letter::First, Letter::Second), (-1, Letter::Second, Letter::First)] {
        let vc = v.cuts(first);
        if vc.is_empty() {
            continue;
        }
        let wc = w.cuts(second);
        for (u, a) in &vc {
            for (x, b) in &wc {
                let m = sign * i64::from(*a) * i64::from(*b);
                out.push((m, 0, vec![canonicalize(&u.concat(x))]));
                if traceless {
                    out.push((-m, -1, vec![canonicalize(u), canonicalize(x)]));
                }
            }
        }
    }
    out
}

/// A bracket before `tr A`, `tr B` are set to zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnreducedBracket {
    mode: Mode,
    terms: BTreeMap<MonomialKey, CoefficientQn>,
}

impl UnreducedBracket {
    pub fn reduce(&self) -> TracePolynomial {
        TracePolynomial::from_raw(
            self.mode,
            self.terms.iter().map(|(k, c)| RawTerm {
                coeff: c.clone(),
                factors: k.factors().to_vec(),
                central: k.central(),
            }),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl fmt::Display for UnreducedBracket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_terms(self.mode, self.terms.iter().map(|(k, c)| (k.clone(), c.clone()))))
    }
}

fn raw_terms(f: &TracePolynomial, g: &TracePolynomial) -> Vec<RawTerm> {
    let traceless = f.mode() == Mode::Traceless;
    let mut memo: HashMap<(CyclicWord, CyclicWord), WordBracket> = HashMap::new();
    let mut out = Vec::new();
    for (k1, c1) in f.terms() {
        for (k2, c2) in g.terms() {
            let c12 = c1 * c2;
            for (v, m1) in k1.grouped_factors() {
                let rest1 = k1.without_one(v);
                for (w, m2) in k2.grouped_factors() {
                    let wb = memo.entry((v.clone(), w.clone())).or_insert_with(|| word_bracket(v, w, traceless));
                    if wb.is_empty() {
                        continue;
                    }
                    let rest = rest1.mul(&k2.without_one(w));
                    let mult = i64::from(m1) * i64::from(m2);
                    for (m, power, words) in wb.iter() {
                        let mut factors = rest.factors().to_vec();
                        factors.extend(words.iter().cloned());
                        out.push(RawTerm {
                            coeff: c12.scale_int(m * mult).shift(*power),
                            factors,
                            central: rest.central(),
                        });
                    }
                }
            }
            let [a0, a1] = k1.central().map(i64::from);
            let [b0, b1] = k2.central().map(i64::from);
            let m = a0 * b1 - a1 * b0;
            if m != 0 {
                let mut factors = k1.factors().to_vec();
                factors.extend(k2.factors().iter().cloned());
                let central = [(a0 + b0 - 1) as u32, (a1 + b1 - 1) as u32];
                out.push(RawTerm { coeff: c12.scale_int(m).shift(1), factors, central });
            }
        }
    }
    out
}

fn require(f: &TracePolynomial, g: &TracePolynomial, mode: Mode) -> Result<()> {
    if f.mode() != g.mode() {
        return Err(TraceError::ModeMismatch { left: f.mode(), right: g.mode() });
    }
    if f.mode() != mode {
        return Err(TraceError::WrongMode { expected: mode, found: f.mode() });
    }
    Ok(())
}

/// Bracket of `tr(dX ∧ dY)` on plain-mode polynomials.
pub fn bracket_standard(f: &TracePolynomial, g: &TracePolynomial) -> Result<TracePolynomial> {
    require(f, g, Mode::Plain)?;
    Ok(TracePolynomial::from_raw(Mode::Plain, raw_terms(f, g)))
}

/// Traceless-corrected bracket on traceless-mode polynomials.
pub fn bracket_traceless(f: &TracePolynomial, g: &TracePolynomial) -> Result<TracePolynomial> {
    require(f, g, Mode::Traceless)?;
    Ok(TracePolynomial::from_raw(Mode::Traceless, raw_terms(f, g)))
}

/// The traceless bracket with `tr A`, `tr B` factors still present.
pub fn bracket_traceless_unreduced(f: &TracePolynomial, g: &TracePolynomial) -> Result<UnreducedBracket> {
    require(f, g, Mode::Traceless)?;
    Ok(UnreducedBracket { mode: Mode::Traceless, terms: collect_raw(raw_terms(f, g)) })
}

/// Dispatches on the common mode of `f` and `g`.
pub fn bracket(f: &TracePolynomial, g: &TracePolynomial) -> Result<TracePolynomial> {
    match f.mode() {
        Mode::Plain => bracket_standard(f, g),
        Mode::Traceless => bracket_traceless(f, g),
    }
}

/// `{f,{g,h}} + {g,{h,f}} + {h,{f,g}}`.
pub fn jacobi_check(f: &TracePolynomial, g: &TracePolynomial, h: &TracePolynomial) -> Result<TracePolynomial> {
    let a = bracket(f, &bracket(g, h)?)?;
    let b = bracket(g, &bracket(h, f)?)?;
    let c = bracket(h, &bracket(f, g)?)?;
    a.checked_add(&b)?.checked_add(&c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::parse_polynomial as p;

    fn br(a: &str, b: &str) -> TracePolynomial {
        bracket(&p(a).unwrap(), &p(b).unwrap()).unwrap()
    }

    #[test]
    fn trace_x_with_trace_y_is_n() {
        assert_eq!(br("tr(X)", "tr(Y)"), p("n").unwrap());
    }

    #[test]
    fn powers_of_one_letter_commute() {
        assert!(br("tr(X^2)", "tr(X^3)").is_zero());
        assert!(br("tr(A^2)", "tr(A^5)").is_zero());
    }

    #[test]
    fn squares_give_four_xy() {
        assert_eq!(br("tr(X^2)", "tr(Y^2)"), p("4*tr(X Y)").unwrap());
    }

    #[test]
    fn unreduced_traceless_output() {
        let u = bracket_traceless_unreduced(&p("tr(A^2)").unwrap(), &p("tr(B^2)").unwrap()).unwrap();
        assert_eq!(u.to_string(), "4*tr(A B) - 4*n^-1*tr(A)*tr(B)");
        assert_eq!(u.reduce().to_string(), "4*tr(A B)");
    }

    #[test]
    fn aj_bq_formula() {
        // {tr A^3, tr B^2} = 6 tr A^2 B - (6/n) tr A^2 tr B, and tr B = 0
        assert_eq!(br("tr(A^3)", "tr(B^2)"), p("6*tr(A^2 B)").unwrap());
        // {tr A^2, tr B^3} = 6 tr A B^2
        assert_eq!(br("tr(A^2)", "tr(B^3)"), p("6*tr(A B^2)").unwrap());
        // {tr A^3, tr B^3} keeps the correction
        assert_eq!(br("tr(A^3)", "tr(B^3)"), p("9*tr(A^2 B^2) - 9*n^-1*tr(A^2)*tr(B^2)").unwrap());
    }

    #[test]
    fn ab_weight() {
        assert_eq!(br("tr(A^2 B)", "tr(A B)"), p("tr(A^2 B)").unwrap());
        assert_eq!(br("tr(A B^3)", "tr(A B)"), p("-2*tr(A B^3)").unwrap());
    }

    #[test]
    fn central_symbols() {
        assert_eq!(br("tr(X)*tr(A^2)", "tr(Y)*tr(A^2)"), p("n*tr(A^2)*tr(A^2)").unwrap());
        let x = crate::text::parse_polynomial_in("tr(X)", Mode::Traceless).unwrap();
        assert!(bracket(&x, &p("tr(A^2 B)").unwrap()).unwrap().is_zero());
    }

    #[test]
    fn mode_errors() {
        let a = p("tr(A^2)").unwrap();
        let x = p("tr(X^2)").unwrap();
        assert!(matches!(bracket_standard(&a, &x), Err(TraceError::ModeMismatch { .. })));
        assert!(matches!(bracket_standard(&a, &a), Err(TraceError::WrongMode { .. })));
        assert!(bracket_traceless(&x, &x).is_err());
    }

    #[test]
    fn leibniz_multiplicity() {
        // {(tr A^2)^2, tr A B} = 2 tr A^2 {tr A^2, tr A B} = 4 (tr A^2)^2
        assert_eq!(br("tr(A^2)*tr(A^2)", "tr(A B)"), p("4*tr(A^2)*tr(A^2)").unwrap());
    }

    #[test]
    fn jacobi_small() {
        let f = p("tr(A^2)").unwrap();
        let g = p("tr(B^2)").unwrap();
        let h = p("tr(A B)").unwrap();
        assert!(jacobi_check(&f, &g, &h).unwrap().is_zero());
        let f = p("tr(A^3)").unwrap();
        let h = p("tr(A B^2)").unwrap();
        assert!(jacobi_check(&f, &g, &h).unwrap().is_zero());
    }

    #[test]
    fn splice_counts() {
        let d = splice_derivative(&CyclicWord::ab(3, 2), Letter::Second);
        assert_eq!(d.terms.iter().map(|(_, m)| m).sum::<u32>(), 2);
    }
}
