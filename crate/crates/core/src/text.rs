//! Text form of trace polynomials.
//!
//! ```text
//! poly     := '-'? term (('+'|'-') term)*
//! term     := coeff ('*'? factor)* | factor ('*'? factor)*
//! factor   := 'tr(' (letter ('^' int)?)* ')'
//! coeff    := rational ('*'? 'n' ('^' int)?)? | 'n' ('^' int)?
//! rational := int ('/' int)?
//! ```
//!
//! Whitespace is ignored. Letters `X`, `Y` select plain mode and `A`, `B`
//! traceless mode; in traceless mode `tr(X)` and `tr(Y)` denote the central
//! trace symbols.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::coeff::{format_n_power, format_rational, CoefficientQn};
use crate::error::{Result, TraceError};
use crate::poly::{display_order, Mode, MonomialKey, RawTerm, TracePolynomial};
use crate::word::{canonicalize, CyclicWord, Letter, Word};

/// Renders `(key, coefficient)` pairs in display order. Keys need not be
/// normalized, so unreduced bracket output (with `tr(A)` factors) prints too.
pub fn format_terms<I>(mode: Mode, terms: I) -> String
where
    I: IntoIterator<Item = (MonomialKey, CoefficientQn)>,
{
    let mut sorted: Vec<(MonomialKey, CoefficientQn)> = terms.into_iter().filter(|(_, c)| !c.is_zero()).collect();
    sorted.sort_by_cached_key(|(k, _)| display_order(k));
    let mut out = String::new();
    for (key, coeff) in &sorted {
        let factors = format_factors(mode, key);
        for (power, r) in coeff.terms().rev() {
            let negative = r.is_negative();
            if out.is_empty() {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let mag = r.abs();
            let mut parts: Vec<String> = Vec::new();
            if !mag.is_one() || (power == 0 && factors.is_empty()) {
                parts.push(format_rational(&mag));
            }
            if power != 0 {
                parts.push(format_n_power(power));
            }
            parts.extend(factors.iter().cloned());
            out.push_str(&parts.join("*"));
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

fn format_factors(mode: Mode, key: &MonomialKey) -> Vec<String> {
    let names = mode.letter_names();
    let mut out: Vec<String> = key.factors().iter().map(|f| format!("tr({})", f.word().fmt_with(names))).collect();
    for (name, e) in ["X", "Y"].iter().zip(key.central()) {
        for _ in 0..e {
            out.push(format!("tr({name})"));
        }
    }
    out
}

/// Parses a polynomial, inferring the mode from the letters used.
pub fn parse_polynomial(input: &str) -> Result<TracePolynomial> {
    parse_with_mode(input, None)
}

/// Parses a polynomial in a fixed mode.
pub fn parse_polynomial_in(input: &str, mode: Mode) -> Result<TracePolynomial> {
    parse_with_mode(input, Some(mode))
}

fn parse_with_mode(input: &str, mode: Option<Mode>) -> Result<TracePolynomial> {
    let mut parser = Parser { src: input, chars: input.char_indices().collect(), pos: 0 };
    let terms = parser.poly()?;
    let uses_ab =
        terms.iter().flat_map(|t| t.factors.iter()).any(|f| f.letters.iter().any(|(c, _)| matches!(c, 'A' | 'B')));
    let mode = match mode {
        Some(m) => m,
        None if uses_ab => Mode::Traceless,
        None => Mode::Plain,
    };
    let mut raw = Vec::with_capacity(terms.len());
    for t in terms {
        let mut factors = Vec::new();
        let mut central = [0u32, 0];
        for f in t.factors {
            match mode {
                Mode::Plain => {
                    let mut w = Word::empty();
                    for (c, e) in f.letters {
                        let letter = match c {
                            'X' => Letter::First,
                            'Y' => Letter::Second,
                            _ => return Err(parser.error_at(f.offset, "letters A/B are not allowed in plain mode")),
                        };
                        w.push(letter, e);
                    }
                    factors.push(canonicalize(&w));
                }
                Mode::Traceless => {
                    if let [(c @ ('X' | 'Y'), 1)] = f.letters.as_slice() {
                        central[usize::from(*c == 'Y')] += 1;
                        continue;
                    }
                    let mut w = Word::empty();
                    for (c, e) in f.letters {
                        let letter = match c {
                            'A' => Letter::First,
                            'B' => Letter::Second,
                            _ => {
                                return Err(parser
                                    .error_at(f.offset, "X/Y may appear in traceless mode only as tr(X) or tr(Y)"))
                            }
                        };
                        w.push(letter, e);
                    }
                    factors.push(canonicalize(&w));
                }
            }
        }
        raw.push(RawTerm { coeff: t.coeff, factors, central });
    }
    Ok(TracePolynomial::from_raw(mode, raw))
}

struct ParsedFactor {
    offset: usize,
    letters: Vec<(char, u32)>,
}

struct ParsedTerm {
    coeff: CoefficientQn,
    factors: Vec<ParsedFactor>,
}

struct Parser<'a> {
    src: &'a str,
    chars: Vec<(usize, char)>,
    pos: usize,
}

impl Parser<'_> {
    fn offset(&self) -> usize {
        self.chars.get(self.pos).map_or(self.src.len(), |(o, _)| *o)
    }

    fn error_at(&self, offset: usize, message: &str) -> TraceError {
        let before = &self.src[..offset.min(self.src.len())];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        TraceError::Parse { line, column, message: message.to_string() }
    }

    fn error(&self, message: &str) -> TraceError {
        self.error_at(self.offset(), message)
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|(_, c)| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).map(|(_, c)| *c)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{c}`")))
        }
    }

    fn digits(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(|(_, c)| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected digits"));
        }
        let s: String = self.chars[start..self.pos].iter().map(|(_, c)| c).collect();
        Ok(s.parse().expect("ascii digits"))
    }

    fn small_int(&mut self, signed: bool) -> Result<i64> {
        let negative = signed && self.eat('-');
        let v = self.digits()?;
        let v: i64 = v.try_into().map_err(|_| self.error("exponent out of range"))?;
        Ok(if negative { -v } else { v })
    }

    fn poly(&mut self) -> Result<Vec<ParsedTerm>> {
        let mut terms = Vec::new();
        let mut negative = self.eat('-');
        if !negative {
            self.eat('+');
        }
        loop {
            let mut t = self.term()?;
            if negative {
                t.coeff = -t.coeff;
            }
            terms.push(t);
            match self.peek() {
                None => break,
                Some('+') => {
                    self.pos += 1;
                    negative = false;
                }
                Some('-') => {
                    self.pos += 1;
                    negative = true;
                }
                Some(_) => return Err(self.error("expected `+`, `-` or end of input")),
            }
        }
        Ok(terms)
    }

    fn n_power(&mut self) -> Result<i32> {
        if self.eat('^') {
            let k = self.small_int(true)?;
            i32::try_from(k).map_err(|_| self.error("power of n out of range"))
        } else {
            Ok(1)
        }
    }

    fn term(&mut self) -> Result<ParsedTerm> {
        let mut coeff = CoefficientQn::one();
        let mut seen = false;
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let num = self.digits()?;
                let den = if self.eat('/') { self.digits()? } else { BigInt::one() };
                if den.is_zero() {
                    return Err(self.error("zero denominator"));
                }
                let r = BigRational::new(num, den);
                let save = self.pos;
                let mut power = 0;
                let starred = self.eat('*');
                if self.eat('n') {
                    power = self.n_power()?;
                } else if starred {
                    self.pos = save;
                }
                coeff = CoefficientQn::monomial(r, power);
                seen = true;
            }
            Some('n') => {
                self.pos += 1;
                let power = self.n_power()?;
                coeff = CoefficientQn::n_pow(power);
                seen = true;
            }
            _ => {}
        }
        let mut factors = Vec::new();
        loop {
            let save = self.pos;
            let starred = self.eat('*');
            if self.peek() == Some('t') {
                factors.push(self.factor()?);
            } else if starred {
                self.pos = save;
                return Err(self.error("expected `tr(` after `*`"));
            } else {
                self.pos = save;
                break;
            }
        }
        if !seen && factors.is_empty() {
            return Err(self.error("expected a term"));
        }
        Ok(ParsedTerm { coeff, factors })
    }

    fn factor(&mut self) -> Result<ParsedFactor> {
        let offset = self.offset();
        self.expect('t')?;
        if self.chars.get(self.pos).map(|(_, c)| *c) != Some('r') {
            return Err(self.error("expected `tr(`"));
        }
        self.pos += 1;
        self.expect('(')?;
        let mut letters: Vec<(char, u32)> = Vec::new();
        loop {
            match self.peek() {
                Some(')') => {
                    self.pos += 1;
                    break;
                }
                Some(c @ ('A' | 'B' | 'X' | 'Y')) => {
                    self.pos += 1;
                    let e = if self.eat('^') {
                        let v = self.small_int(false)?;
                        u32::try_from(v).map_err(|_| self.error("exponent out of range"))?
                    } else {
                        1
                    };
                    if e > 0 {
                        letters.push((c, e));
                    }
                }
                _ => return Err(self.error("expected a letter A, B, X, Y or `)`")),
            }
        }
        let mixes =
            letters.iter().any(|(c, _)| matches!(c, 'A' | 'B')) && letters.iter().any(|(c, _)| matches!(c, 'X' | 'Y'));
        if mixes {
            return Err(self.error_at(offset, "a word may not mix A/B with X/Y"));
        }
        Ok(ParsedFactor { offset, letters })
    }
}

/// Parses a single word such as `A^2 B` (no `tr`).
pub fn parse_word(input: &str) -> Result<(Mode, CyclicWord)> {
    let p = parse_polynomial(&format!("tr({input})"))?;
    let found = match p.terms().next() {
        Some((k, _)) if p.len() == 1 && k.factors().len() == 1 => Some(k.factors()[0].clone()),
        _ => None,
    };
    found.map(|w| (p.mode(), w)).ok_or_else(|| TraceError::Parse {
        line: 1,
        column: 1,
        message: format!("not a word: `{input}`"),
    })
}

/// Collects unnormalized terms into a printable map (empty words still fold into `n`).
pub(crate) fn collect_raw(terms: impl IntoIterator<Item = RawTerm>) -> BTreeMap<MonomialKey, CoefficientQn> {
    let mut acc: BTreeMap<MonomialKey, CoefficientQn> = BTreeMap::new();
    for t in terms {
        let empties = t.factors.iter().filter(|f| f.is_empty()).count() as i32;
        let factors: Vec<CyclicWord> = t.factors.into_iter().filter(|f| !f.is_empty()).collect();
        let key = MonomialKey::from_parts(factors, t.central);
        let slot = acc.entry(key).or_default();
        *slot += &t.coeff.shift(empties);
    }
    acc.retain(|_, c| !c.is_zero());
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn round_trip(s: &str) {
        let p = parse_polynomial(s).unwrap();
        let printed = p.to_string();
        assert_eq!(printed, s, "printing is not canonical");
        assert_eq!(parse_polynomial(&printed).unwrap(), p);
    }

    #[test]
    fn canonical_strings_round_trip() {
        round_trip("4*tr(A B)");
        round_trip("2*tr(A B A B) + tr(A^2 B^2) - 4*n^-1*tr(A B)*tr(A B)");
        round_trip("3/2*tr(X)*tr(X^2) - 1/2*tr(X)*tr(X)*tr(X)");
        round_trip("tr(A^2) + n^-1*tr(X)*tr(X)");
        round_trip("n");
        round_trip("-7/3");
        round_trip("0");
    }

    #[test]
    fn whitespace_and_stars_are_optional() {
        let a = parse_polynomial("  2 n^-1 tr( A^2B )tr(B^2)- tr(A^3)").unwrap();
        let b = parse_polynomial("2*n^-1*tr(A^2 B)*tr(B^2) - tr(A^3)").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rotations_are_merged() {
        let p = parse_polynomial("tr(B A A B) - tr(A^2 B^2)").unwrap();
        assert!(p.is_zero());
    }

    #[test]
    fn mode_inference_and_central_symbols() {
        assert_eq!(parse_polynomial("tr(X Y)").unwrap().mode(), Mode::Plain);
        let p = parse_polynomial("tr(A^2)*tr(X)").unwrap();
        assert_eq!(p.mode(), Mode::Traceless);
        assert_eq!(p.degree(), Some(3));
        assert!(parse_polynomial("tr(A)").unwrap().is_zero());
        assert!(parse_polynomial_in("tr(A)", Mode::Plain).is_err());
    }

    #[test]
    fn multi_power_coefficient_prints_as_several_terms() {
        let p = parse_polynomial("3*tr(A B) - n^-1*tr(A B)").unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.to_string(), "3*tr(A B) - n^-1*tr(A B)");
    }

    #[test]
    fn errors_report_position() {
        match parse_polynomial("tr(A^2) +\n  tr(A Q)") {
            Err(TraceError::Parse { line, column, .. }) => assert_eq!((line, column), (2, 8)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_polynomial("").is_err());
        assert!(parse_polynomial("tr(A X)").is_err());
        assert!(parse_polynomial("1/0").is_err());
        assert!(parse_polynomial("tr(A) tr(B) +").is_err());
    }

    #[test]
    fn parse_single_word() {
        let (mode, w) = parse_word("B A^2").unwrap();
        assert_eq!(mode, Mode::Traceless);
        assert_eq!(w, CyclicWord::ab(2, 1));
    }
}
