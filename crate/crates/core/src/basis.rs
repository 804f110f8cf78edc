//! Enumeration of cyclic words and trace monomials up to a degree.

use std::collections::BTreeSet;

use crate::coeff::CoefficientQn;
use crate::poly::{Mode, MonomialKey, TracePolynomial};
use crate::word::{canonicalize, CyclicWord, Letter, Word};

/// All cyclic words of length `min_len..=max_len`.
pub fn cyclic_words(min_len: u32, max_len: u32) -> Vec<CyclicWord> {
    let mut out = BTreeSet::new();
    for len in min_len.max(1)..=max_len {
        for bits in 0u64..(1u64 << len) {
            let w =
                Word::from_letters((0..len).map(|i| if bits >> i & 1 == 0 { Letter::First } else { Letter::Second }));
            out.insert(canonicalize(&w));
        }
    }
    let mut v: Vec<CyclicWord> = out.into_iter().collect();
    v.sort_by_key(|w| (w.len(), w.clone()));
    v
}

/// Multisets of `words` with total length `<= max_degree`, including the
/// empty product.
pub fn word_products(words: &[CyclicWord], max_degree: u32) -> Vec<Vec<CyclicWord>> {
    fn rec(
        words: &[CyclicWord],
        start: usize,
        budget: u32,
        current: &mut Vec<CyclicWord>,
        out: &mut Vec<Vec<CyclicWord>>,
    ) {
        out.push(current.clone());
        for i in start..words.len() {
            let l = words[i].len();
            if l <= budget {
                current.push(words[i].clone());
                rec(words, i, budget - l, current, out);
                current.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(words, 0, max_degree, &mut Vec::new(), &mut out);
    out
}

/// Every trace monomial of degree `<= max_degree` without central factors,
/// the constant included. Traceless mode skips `tr A`, `tr B`.
pub fn trace_monomials(mode: Mode, max_degree: i64) -> Vec<TracePolynomial> {
    if max_degree < 0 {
        return Vec::new();
    }
    let d = max_degree as u32;
    let min_len = if mode == Mode::Traceless { 2 } else { 1 };
    let words = cyclic_words(min_len, d);
    word_products(&words, d)
        .into_iter()
        .map(|f| TracePolynomial::monomial(mode, MonomialKey::from_parts(f, [0, 0]), CoefficientQn::one()))
        .collect()
}

/// Products `Π tr A^{p_k} B^{q_k}` with `p_k + q_k >= 2` and total degree
/// `<= max_degree` (the empty product excluded).
pub fn ab_products(max_degree: u32) -> Vec<TracePolynomial> {
    let mut words = Vec::new();
    for total in 2..=max_degree {
        for p in (0..=total).rev() {
            words.push(CyclicWord::ab(p, total - p));
        }
    }
    word_products(&words, max_degree)
        .into_iter()
        .filter(|f| !f.is_empty())
        .map(|f| TracePolynomial::monomial(Mode::Traceless, MonomialKey::from_parts(f, [0, 0]), CoefficientQn::one()))
        .collect()
}
