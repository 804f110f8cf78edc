//! Conjugation-invariant trace polynomials in two matrix letters.

use std::cmp::Reverse;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::coeff::CoefficientQn;
use crate::error::{Result, TraceError};
use crate::word::{canonicalize, CyclicWord, Letter, Word};

/// Which pair of variables a polynomial is written in.
///
/// * `Plain`: words in `X`, `Y` (full matrices).
/// * `Traceless`: words in `A = X - (tr X / n) I`, `B = Y - (tr Y / n) I`,
///   times powers of the central symbols `tr X`, `tr Y`. `tr A` and `tr B`
///   vanish identically and are dropped on construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Plain,
    Traceless,
}

impl Mode {
    pub fn letter_names(self) -> [&'static str; 2] {
        match self {
            Mode::Plain => ["X", "Y"],
            Mode::Traceless => ["A", "B"],
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = TraceError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" => Ok(Mode::Plain),
            "traceless" => Ok(Mode::Traceless),
            other => Err(TraceError::Usage(format!("unknown mode `{other}`"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Plain => "plain",
            Mode::Traceless => "traceless",
        })
    }
}

/// The coefficient-free part of a trace monomial: a sorted multiset of
/// nonempty cyclic words and, in traceless mode, powers of `tr X`, `tr Y`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MonomialKey {
    factors: Vec<CyclicWord>,
    central: [u32; 2],
}

impl MonomialKey {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn factors(&self) -> &[CyclicWord] {
        &self.factors
    }

    /// Exponents of the central symbols `(tr X, tr Y)`.
    pub fn central(&self) -> [u32; 2] {
        self.central
    }

    pub fn is_constant(&self) -> bool {
        self.factors.is_empty() && self.central == [0, 0]
    }

    pub fn bidegree(&self) -> (u32, u32) {
        let mut d = (self.central[0], self.central[1]);
        for f in &self.factors {
            let (a, b) = f.bidegree();
            d.0 += a;
            d.1 += b;
        }
        d
    }

    pub fn degree(&self) -> u32 {
        let (a, b) = self.bidegree();
        a + b
    }

    pub fn mul(&self, other: &MonomialKey) -> MonomialKey {
        let mut factors = Vec::with_capacity(self.factors.len() + other.factors.len());
        factors.extend_from_slice(&self.factors);
        factors.extend_from_slice(&other.factors);
        factors.sort();
        MonomialKey { factors, central: [self.central[0] + other.central[0], self.central[1] + other.central[1]] }
    }

    /// Distinct factors with their multiplicities.
    pub fn grouped_factors(&self) -> Vec<(&CyclicWord, u32)> {
        let mut out: Vec<(&CyclicWord, u32)> = Vec::new();
        for f in &self.factors {
            match out.last_mut() {
                Some((g, m)) if *g == f => *m += 1,
                _ => out.push((f, 1)),
            }
        }
        out
    }

    /// This key with one copy of `factor` removed.
    pub fn without_one(&self, factor: &CyclicWord) -> MonomialKey {
        let mut factors = self.factors.clone();
        if let Some(pos) = factors.iter().position(|f| f == factor) {
            factors.remove(pos);
        }
        MonomialKey { factors, central: self.central }
    }

    pub(crate) fn from_parts(factors: Vec<CyclicWord>, central: [u32; 2]) -> Self {
        let mut factors = factors;
        factors.sort();
        MonomialKey { factors, central }
    }

    /// Replaces every factor by `First^i Second^j` of the same bidegree.
    pub fn collapsed(&self) -> MonomialKey {
        MonomialKey::from_parts(self.factors.iter().map(CyclicWord::sorted).collect(), self.central)
    }
}

/// One term before normalization: a coefficient, factor words (possibly empty
/// or vanishing single letters) and central powers.
#[derive(Clone, Debug)]
pub struct RawTerm {
    pub coeff: CoefficientQn,
    pub factors: Vec<CyclicWord>,
    pub central: [u32; 2],
}

/// A monomial together with its coefficient, as exposed to callers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceMonomial {
    pub coefficient: CoefficientQn,
    pub key: MonomialKey,
}

/// Exact invariant polynomial `Σ c · Π tr(w_i) · (tr X)^a (tr Y)^b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TracePolynomial {
    mode: Mode,
    terms: BTreeMap<MonomialKey, CoefficientQn>,
}

/// Normalizes factors: empty words become `n`, vanishing `tr A`/`tr B` kill
/// the term in traceless mode.
fn normalize(
    mode: Mode,
    coeff: CoefficientQn,
    factors: Vec<CyclicWord>,
    central: [u32; 2],
) -> Option<(MonomialKey, CoefficientQn)> {
    if coeff.is_zero() {
        return None;
    }
    let mut n_power = 0;
    let mut kept = Vec::with_capacity(factors.len());
    for f in factors {
        if f.is_empty() {
            n_power += 1;
            continue;
        }
        if mode == Mode::Traceless && f.word().single_letter().is_some() {
            return None;
        }
        kept.push(f);
    }
    debug_assert!(mode == Mode::Traceless || central == [0, 0]);
    let coeff = if n_power == 0 { coeff } else { coeff.shift(n_power) };
    Some((MonomialKey::from_parts(kept, central), coeff))
}

impl TracePolynomial {
    pub fn zero(mode: Mode) -> Self {
        Self { mode, terms: BTreeMap::new() }
    }

    pub fn constant(mode: Mode, c: CoefficientQn) -> Self {
        let mut p = Self::zero(mode);
        p.add_term(MonomialKey::one(), c);
        p
    }

    /// `c · key` for an already normalized key.
    pub fn monomial(mode: Mode, key: MonomialKey, c: CoefficientQn) -> Self {
        let mut p = Self::zero(mode);
        p.add_term(key, c);
        p
    }

    pub fn one(mode: Mode) -> Self {
        Self::constant(mode, CoefficientQn::one())
    }

    /// `tr(word)`.
    pub fn trace(mode: Mode, word: &Word) -> Self {
        Self::from_raw(
            mode,
            std::iter::once(RawTerm {
                coeff: CoefficientQn::one(),
                factors: vec![canonicalize(word)],
                central: [0, 0],
            }),
        )
    }

    /// `tr(First^a Second^b)`.
    pub fn trace_ab(mode: Mode, a: u32, b: u32) -> Self {
        Self::trace(mode, &Word::ab(a, b))
    }

    /// The central symbol `tr X` or `tr Y` in traceless mode.
    pub fn central(letter: Letter) -> Self {
        let mut central = [0, 0];
        central[letter.index()] = 1;
        let mut p = Self::zero(Mode::Traceless);
        p.add_term(MonomialKey::from_parts(vec![], central), CoefficientQn::one());
        p
    }

    /// `tr X` (or `tr Y`) in either mode.
    pub fn trace_of_letter(mode: Mode, letter: Letter) -> Self {
        match mode {
            Mode::Plain => Self::trace(mode, &Word::power(letter, 1)),
            Mode::Traceless => Self::central(letter),
        }
    }

    pub fn from_raw<I: IntoIterator<Item = RawTerm>>(mode: Mode, terms: I) -> Self {
        let mut p = Self::zero(mode);
        for t in terms {
            if let Some((key, c)) = normalize(mode, t.coeff, t.factors, t.central) {
                p.add_term(key, c);
            }
        }
        p
    }

    pub(crate) fn from_map(mode: Mode, terms: BTreeMap<MonomialKey, CoefficientQn>) -> Self {
        let terms = terms.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Self { mode, terms }
    }

    /// Adds `c · key`, assuming `key` is already normalized for this mode.
    pub fn add_term(&mut self, key: MonomialKey, c: CoefficientQn) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(slot) => {
                *slot += &c;
                if slot.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MonomialKey, &CoefficientQn)> {
        self.terms.iter()
    }

    pub fn monomials(&self) -> Vec<TraceMonomial> {
        self.terms.iter().map(|(k, c)| TraceMonomial { coefficient: c.clone(), key: k.clone() }).collect()
    }

    pub fn coefficient(&self, key: &MonomialKey) -> CoefficientQn {
        self.terms.get(key).cloned().unwrap_or_default()
    }

    /// Total degree in the matrix entries; `None` stands for `-∞` (zero).
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(MonomialKey::degree).max()
    }

    /// Componentwise maximum bidegree over monomials; `None` for zero.
    pub fn bidegree(&self) -> Option<(u32, u32)> {
        self.terms.keys().map(MonomialKey::bidegree).reduce(|a, b| (a.0.max(b.0), a.1.max(b.1)))
    }

    /// Drops every monomial of degree `<= d`.
    pub fn truncate_below_degree(&self, d: i64) -> Self {
        Self {
            mode: self.mode,
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| i64::from(k.degree()) > d)
                .map(|(k, c)| (k.clone(), c.clone()))
                .collect(),
        }
    }

    /// Keeps only monomials of degree exactly `d`.
    pub fn homogeneous_part(&self, d: u32) -> Self {
        Self {
            mode: self.mode,
            terms: self.terms.iter().filter(|(k, _)| k.degree() == d).map(|(k, c)| (k.clone(), c.clone())).collect(),
        }
    }

    /// Sums monomials after collapsing each factor to `First^i Second^j`.
    pub fn collapsed(&self) -> Self {
        let mut out = Self::zero(self.mode);
        for (k, c) in &self.terms {
            out.add_term(k.collapsed(), c.clone());
        }
        out
    }

    /// Every coefficient is a plain rational (no powers of `n`).
    pub fn has_rational_coefficients(&self) -> bool {
        self.terms.values().all(CoefficientQn::is_rational)
    }

    /// Substitutes `n -> n_value` in all coefficients.
    pub fn specialize_n(&self, n_value: i64) -> Self {
        let mut out = Self::zero(self.mode);
        for (k, c) in &self.terms {
            out.add_term(k.clone(), CoefficientQn::from_rational(c.specialize(n_value)));
        }
        out
    }

    pub fn scale(&self, c: &CoefficientQn) -> Self {
        let mut out = Self::zero(self.mode);
        if c.is_zero() {
            return out;
        }
        for (k, v) in &self.terms {
            out.add_term(k.clone(), v * c);
        }
        out
    }

    pub fn scale_int(&self, v: i64) -> Self {
        self.scale(&CoefficientQn::from_int(v))
    }

    pub fn scale_rational(&self, r: &BigRational) -> Self {
        self.scale(&CoefficientQn::from_rational(r.clone()))
    }

    fn check_mode(&self, other: &Self) -> Result<()> {
        if self.mode != other.mode {
            return Err(TraceError::ModeMismatch { left: self.mode, right: other.mode });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_mode(other)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.neg_ref())
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_mode(other)?;
        let mut acc: BTreeMap<MonomialKey, CoefficientQn> = BTreeMap::new();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let key = ka.mul(kb);
                let c = ca * cb;
                let slot = acc.entry(key).or_default();
                *slot += &c;
            }
        }
        Ok(Self::from_map(self.mode, acc))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.mode);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    fn neg_ref(&self) -> Self {
        Self { mode: self.mode, terms: self.terms.iter().map(|(k, c)| (k.clone(), -c)).collect() }
    }

    /// Plain → traceless: substitutes `X = A + (tr X / n) I`, `Y = B + (tr Y / n) I`
    /// and drops `tr A`, `tr B`.
    pub fn to_traceless(&self) -> Result<Self> {
        if self.mode != Mode::Plain {
            return Err(TraceError::WrongMode { expected: Mode::Plain, found: self.mode });
        }
        let shift_n = CoefficientQn::n_pow(-1);
        let shifts = [
            TracePolynomial::central(Letter::First).scale(&shift_n),
            TracePolynomial::central(Letter::Second).scale(&shift_n),
        ];
        Ok(self.substitute(Mode::Traceless, &shifts))
    }

    /// Traceless → plain: substitutes `A = X - (tr X / n) I`, `B = Y - (tr Y / n) I`
    /// and `tr X`, `tr Y` by the plain traces.
    pub fn to_plain(&self) -> Result<Self> {
        if self.mode != Mode::Traceless {
            return Err(TraceError::WrongMode { expected: Mode::Traceless, found: self.mode });
        }
        let shift_n = -CoefficientQn::n_pow(-1);
        let shifts = [
            TracePolynomial::trace_of_letter(Mode::Plain, Letter::First).scale(&shift_n),
            TracePolynomial::trace_of_letter(Mode::Plain, Letter::Second).scale(&shift_n),
        ];
        Ok(self.substitute(Mode::Plain, &shifts))
    }

    /// Replaces each letter `L` by `L' + shift_L · I` in the target mode, and
    /// central symbols by `tr` of the target letters.
    fn substitute(&self, target: Mode, shifts: &[TracePolynomial; 2]) -> Self {
        let mut memo: BTreeMap<CyclicWord, TracePolynomial> = BTreeMap::new();
        let centrals = [
            TracePolynomial::trace_of_letter(target, Letter::First),
            TracePolynomial::trace_of_letter(target, Letter::Second),
        ];
        let mut out = Self::zero(target);
        for (key, c) in &self.terms {
            let mut term = Self::constant(target, c.clone());
            for f in key.factors() {
                let expanded = memo.entry(f.clone()).or_insert_with(|| expand_word(f.word(), target, shifts)).clone();
                term = &term * &expanded;
                if term.is_zero() {
                    break;
                }
            }
            for (letter, e) in Letter::BOTH.iter().zip(key.central()) {
                if e > 0 {
                    term = &term * &centrals[letter.index()].pow(e);
                }
            }
            out = &out + &term;
        }
        out
    }
}

fn binomial(n: u32, k: u32) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// `tr Π_r (L_r' + shift_{L_r} I)^{e_r}` expanded run by run.
fn expand_word(word: &Word, target: Mode, shifts: &[TracePolynomial; 2]) -> TracePolynomial {
    // partial: (word so far, multiplier polynomial)
    let mut partial: Vec<(Word, TracePolynomial)> = vec![(Word::empty(), TracePolynomial::one(target))];
    for &(letter, e) in word.runs() {
        let mut next = Vec::with_capacity(partial.len() * (e as usize + 1));
        for (w, mult) in &partial {
            for kept in 0..=e {
                let b = BigRational::from_integer(binomial(e, kept));
                let factor = shifts[letter.index()].pow(e - kept).scale_rational(&b);
                let mut w2 = w.clone();
                w2.push(letter, kept);
                next.push((w2, mult * &factor));
            }
        }
        partial = next;
    }
    let mut out = TracePolynomial::zero(target);
    for (w, mult) in partial {
        if mult.is_zero() {
            continue;
        }
        out = &out + &(&mult * &TracePolynomial::trace(target, &w));
    }
    out
}

impl Add for &TracePolynomial {
    type Output = TracePolynomial;
    /// Panics on mode mismatch; use [`TracePolynomial::checked_add`] otherwise.
    fn add(self, rhs: &TracePolynomial) -> TracePolynomial {
        self.checked_add(rhs).expect("mode mismatch in addition")
    }
}

impl Sub for &TracePolynomial {
    type Output = TracePolynomial;
    fn sub(self, rhs: &TracePolynomial) -> TracePolynomial {
        self.checked_sub(rhs).expect("mode mismatch in subtraction")
    }
}

impl Mul for &TracePolynomial {
    type Output = TracePolynomial;
    fn mul(self, rhs: &TracePolynomial) -> TracePolynomial {
        self.checked_mul(rhs).expect("mode mismatch in multiplication")
    }
}

impl Neg for &TracePolynomial {
    type Output = TracePolynomial;
    fn neg(self) -> TracePolynomial {
        self.neg_ref()
    }
}

impl Add for TracePolynomial {
    type Output = TracePolynomial;
    fn add(self, rhs: TracePolynomial) -> TracePolynomial {
        &self + &rhs
    }
}

impl Sub for TracePolynomial {
    type Output = TracePolynomial;
    fn sub(self, rhs: TracePolynomial) -> TracePolynomial {
        &self - &rhs
    }
}

impl Mul for TracePolynomial {
    type Output = TracePolynomial;
    fn mul(self, rhs: TracePolynomial) -> TracePolynomial {
        &self * &rhs
    }
}

impl Neg for TracePolynomial {
    type Output = TracePolynomial;
    fn neg(self) -> TracePolynomial {
        self.neg_ref()
    }
}

/// Display order: higher degree first, then fewer factors, then key order.
pub(crate) fn display_order(key: &MonomialKey) -> (Reverse<u32>, usize, [Reverse<u32>; 2], MonomialKey) {
    let c = key.central();
    let count = key.factors().len() + (c[0] + c[1]) as usize;
    (Reverse(key.degree()), count, [Reverse(c[0]), Reverse(c[1])], key.clone())
}

impl fmt::Display for TracePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::text::format_terms(self.mode, self.terms.iter().map(|(k, c)| (k.clone(), c.clone()))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::rat;
    use Letter::{First, Second};

    fn t(mode: Mode, a: u32, b: u32) -> TracePolynomial {
        TracePolynomial::trace_ab(mode, a, b)
    }

    #[test]
    fn additive_inverse() {
        let p = t(Mode::Traceless, 2, 0);
        assert!((&p + &p.scale_int(-1)).is_zero());
    }

    #[test]
    fn sum_of_two_traces_has_two_terms() {
        let p = &t(Mode::Traceless, 2, 0) + &t(Mode::Traceless, 0, 2);
        assert_eq!(p.len(), 2);
    }

    #[test]
    fn coefficient_arithmetic_recombines() {
        let ab = t(Mode::Traceless, 1, 1);
        let inv_n = CoefficientQn::n_pow(-1);
        let p = &ab.scale(&inv_n) + &ab.scale(&(CoefficientQn::one() - inv_n));
        assert_eq!(p, ab);
    }

    #[test]
    fn product_of_traces() {
        let p = &t(Mode::Traceless, 2, 0) * &t(Mode::Traceless, 0, 2);
        assert_eq!(p.len(), 1);
        let (k, c) = p.terms().next().unwrap();
        assert!(c.is_one());
        assert_eq!(k.factors(), &[CyclicWord::ab(2, 0), CyclicWord::ab(0, 2)]);
        assert!((&TracePolynomial::zero(Mode::Traceless) * &p).is_zero());
    }

    #[test]
    fn binomial_square_in_plain_mode() {
        let s = &t(Mode::Plain, 1, 0) + &t(Mode::Plain, 0, 1);
        let sq = &s * &s;
        let xx = &t(Mode::Plain, 1, 0) * &t(Mode::Plain, 1, 0);
        let xy = &t(Mode::Plain, 1, 0) * &t(Mode::Plain, 0, 1);
        let yy = &t(Mode::Plain, 0, 1) * &t(Mode::Plain, 0, 1);
        assert_eq!(sq, &(&xx + &xy.scale_int(2)) + &yy);
    }

    #[test]
    fn mode_mismatch_is_an_error() {
        let e = t(Mode::Plain, 2, 0).checked_add(&t(Mode::Traceless, 2, 0));
        assert!(matches!(e, Err(TraceError::ModeMismatch { .. })));
        let e = t(Mode::Plain, 2, 0).checked_mul(&t(Mode::Traceless, 2, 0));
        assert!(e.is_err());
    }

    #[test]
    fn traceless_drops_single_letters_and_empty_word_is_n() {
        assert!(t(Mode::Traceless, 1, 0).is_zero());
        assert!(t(Mode::Traceless, 0, 1).is_zero());
        let e = t(Mode::Traceless, 0, 0);
        assert_eq!(e, TracePolynomial::constant(Mode::Traceless, CoefficientQn::n()));
        assert!(!t(Mode::Plain, 1, 0).is_zero());
    }

    #[test]
    fn bidegree_and_degree() {
        assert_eq!(t(Mode::Traceless, 2, 1).bidegree(), Some((2, 1)));
        assert_eq!(TracePolynomial::zero(Mode::Plain).bidegree(), None);
        assert_eq!(TracePolynomial::zero(Mode::Plain).degree(), None);
        let p = &t(Mode::Traceless, 2, 0) * &t(Mode::Traceless, 0, 3);
        assert_eq!(p.bidegree(), Some((2, 3)));
        assert_eq!(p.degree(), Some(5));
    }

    #[test]
    fn truncation() {
        let p = &t(Mode::Traceless, 3, 1) + &t(Mode::Traceless, 1, 1);
        assert_eq!(p.truncate_below_degree(2), t(Mode::Traceless, 3, 1));
        assert_eq!(p.truncate_below_degree(-1), p);
    }

    #[test]
    fn to_traceless_of_x_squared() {
        // tr X^2 = tr A^2 + (1/n) (tr X)^2
        let got = t(Mode::Plain, 2, 0).to_traceless().unwrap();
        let s = TracePolynomial::central(First);
        let want = &t(Mode::Traceless, 2, 0) + &(&s * &s).scale(&CoefficientQn::n_pow(-1));
        assert_eq!(got, want);
    }

    #[test]
    fn to_traceless_of_xy() {
        let got = t(Mode::Plain, 1, 1).to_traceless().unwrap();
        let st = &TracePolynomial::central(First) * &TracePolynomial::central(Second);
        let want = &t(Mode::Traceless, 1, 1) + &st.scale(&CoefficientQn::n_pow(-1));
        assert_eq!(got, want);
    }

    #[test]
    fn to_traceless_of_trace_x_is_central() {
        let got = t(Mode::Plain, 1, 0).to_traceless().unwrap();
        assert_eq!(got, TracePolynomial::central(First));
    }

    #[test]
    fn round_trip_between_modes() {
        let p = &t(Mode::Traceless, 2, 1) * &t(Mode::Traceless, 0, 3);
        let p = &p + &t(Mode::Traceless, 2, 2).scale_rational(&rat(3, 4));
        assert_eq!(p.to_plain().unwrap().to_traceless().unwrap(), p);
        let q = &t(Mode::Plain, 1, 2) * &t(Mode::Plain, 1, 0);
        assert_eq!(q.to_traceless().unwrap().to_plain().unwrap(), q);
    }

    #[test]
    fn wrong_mode_for_substitution() {
        assert!(t(Mode::Traceless, 2, 0).to_traceless().is_err());
        assert!(t(Mode::Plain, 2, 0).to_plain().is_err());
    }
}
