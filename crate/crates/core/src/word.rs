//! Words in two noncommuting letters and their cyclic canonical forms.
//!
//! Words are stored run-length encoded: `X^2 Y X^3` is `[(X,2),(Y,1),(X,3)]`.
//! A [`CyclicWord`] is the lexicographically least rotation of the flat
//! letter sequence (first letter < second letter), re-encoded as runs.

use std::collections::BTreeMap;
use std::fmt;

/// One of the two matrix letters. `First` renders as `X` (plain) or `A`
/// (traceless); `Second` as `Y` or `B`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    First,
    Second,
}

impl Letter {
    pub fn other(self) -> Letter {
        match self {
            Letter::First => Letter::Second,
            Letter::Second => Letter::First,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Letter::First => 0,
            Letter::Second => 1,
        }
    }

    pub const BOTH: [Letter; 2] = [Letter::First, Letter::Second];
}

/// A linear word, run-length encoded. Adjacent runs alternate letters and
/// all exponents are positive. The empty word stands for the identity.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word {
    runs: Vec<(Letter, u32)>,
}

impl Word {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn power(letter: Letter, exp: u32) -> Self {
        let mut w = Self::empty();
        w.push(letter, exp);
        w
    }

    /// `First^a Second^b`.
    pub fn ab(a: u32, b: u32) -> Self {
        let mut w = Self::power(Letter::First, a);
        w.push(Letter::Second, b);
        w
    }

    pub fn from_runs<I: IntoIterator<Item = (Letter, u32)>>(runs: I) -> Self {
        let mut w = Self::empty();
        for (l, e) in runs {
            w.push(l, e);
        }
        w
    }

    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        Self::from_runs(letters.into_iter().map(|l| (l, 1)))
    }

    /// Appends `letter^exp`, merging with the last run when letters agree.
    pub fn push(&mut self, letter: Letter, exp: u32) {
        if exp == 0 {
            return;
        }
        match self.runs.last_mut() {
            Some((l, e)) if *l == letter => *e += exp,
            _ => self.runs.push((letter, exp)),
        }
    }

    pub fn extend(&mut self, other: &Word) {
        for &(l, e) in &other.runs {
            self.push(l, e);
        }
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut w = self.clone();
        w.extend(other);
        w
    }

    pub fn runs(&self) -> &[(Letter, u32)] {
        &self.runs
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    pub fn len(&self) -> u32 {
        self.runs.iter().map(|(_, e)| e).sum()
    }

    /// `(number of First letters, number of Second letters)`.
    pub fn bidegree(&self) -> (u32, u32) {
        let mut d = (0, 0);
        for &(l, e) in &self.runs {
            match l {
                Letter::First => d.0 += e,
                Letter::Second => d.1 += e,
            }
        }
        d
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        self.runs.iter().flat_map(|&(l, e)| std::iter::repeat_n(l, e as usize))
    }

    /// The word `letter^1` for a single letter, if this is one.
    pub fn single_letter(&self) -> Option<Letter> {
        match self.runs.as_slice() {
            [(l, 1)] => Some(*l),
            _ => None,
        }
    }

    /// Cyclic rotation by `k` letters to the left.
    pub fn rotate(&self, k: usize) -> Word {
        let flat: Vec<Letter> = self.letters().collect();
        if flat.is_empty() {
            return Word::empty();
        }
        let k = k % flat.len();
        Word::from_letters(flat[k..].iter().chain(flat[..k].iter()).copied())
    }

    pub fn fmt_with(&self, names: [&str; 2]) -> String {
        self.runs
            .iter()
            .map(|&(l, e)| if e == 1 { names[l.index()].to_string() } else { format!("{}^{}", names[l.index()], e) })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_with(["X", "Y"]))
    }
}

/// A word up to cyclic rotation, stored as its least rotation.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CyclicWord(Word);

impl CyclicWord {
    pub fn word(&self) -> &Word {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> u32 {
        self.0.len()
    }

    pub fn bidegree(&self) -> (u32, u32) {
        self.0.bidegree()
    }

    pub fn runs(&self) -> &[(Letter, u32)] {
        self.0.runs()
    }

    /// `First^a Second^b` as a cyclic word.
    pub fn ab(a: u32, b: u32) -> Self {
        canonicalize(&Word::ab(a, b))
    }

    pub fn power(letter: Letter, exp: u32) -> Self {
        CyclicWord(Word::power(letter, exp))
    }

    /// Splice derivative: every way of cutting the cycle at an occurrence of
    /// `letter` and deleting it, read starting just after the cut. Identical
    /// linear words are merged with multiplicity.
    pub fn cuts(&self, letter: Letter) -> Vec<(Word, u32)> {
        let runs = self.0.runs();
        let m = runs.len();
        let mut acc: BTreeMap<Word, u32> = BTreeMap::new();
        for i in 0..m {
            let (l, e) = runs[i];
            if l != letter {
                continue;
            }
            for t in 0..e {
                let mut w = Word::empty();
                w.push(l, e - 1 - t);
                for r in runs.iter().skip(i + 1).chain(runs.iter().take(i)) {
                    w.push(r.0, r.1);
                }
                w.push(l, t);
                *acc.entry(w).or_insert(0) += 1;
            }
        }
        acc.into_iter().collect()
    }

    /// Collapses to `First^i Second^j` with the same bidegree.
    pub fn sorted(&self) -> CyclicWord {
        let (a, b) = self.bidegree();
        CyclicWord::ab(a, b)
    }
}

impl fmt::Display for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Least rotation of a flat letter sequence (Booth-style two-pointer scan).
fn least_rotation(s: &[Letter]) -> usize {
    let n = s.len();
    let (mut i, mut j, mut k) = (0usize, 1usize, 0usize);
    while i < n && j < n && k < n {
        let a = s[(i + k) % n];
        let b = s[(j + k) % n];
        if a == b {
            k += 1;
            continue;
        }
        if a > b {
            i += k + 1;
        } else {
            j += k + 1;
        }
        if i == j {
            j += 1;
        }
        k = 0;
    }
    i.min(j)
}

/// Canonical cyclic representative of `word`.
pub fn canonicalize(word: &Word) -> CyclicWord {
    if word.runs().len() <= 1 {
        return CyclicWord(word.clone());
    }
    let flat: Vec<Letter> = word.letters().collect();
    let start = least_rotation(&flat);
    CyclicWord(Word::from_letters(flat[start..].iter().chain(flat[..start].iter()).copied()))
}
