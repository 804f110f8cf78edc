#![allow(dead_code)]

use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use trace_poisson::coeff::rat;
use trace_poisson::numeric::cm::MatrixPair;
use trace_poisson::numeric::eval::evaluate_pair;
use trace_poisson::numeric::linalg::{gaussian_matrix, CMatrix};
use trace_poisson::{CoefficientQn, Letter, Mode, TracePolynomial, Word};

pub fn word(max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(prop_oneof![Just(Letter::First), Just(Letter::Second)], 1..=max_len)
        .prop_map(Word::from_letters)
}

fn coefficient() -> impl Strategy<Value = CoefficientQn> {
    (-4i64..=4, 1i64..=3, -1i32..=1)
        .prop_filter("nonzero", |(a, _, _)| *a != 0)
        .prop_map(|(a, b, e)| CoefficientQn::monomial(rat(a, b), e))
}

/// `c · tr(w1) ··· tr(wk)` with `k ≤ max_factors` and total degree at
/// most `max_degree`.
fn term(mode: Mode, max_factors: usize, max_len: usize, max_degree: u32) -> impl Strategy<Value = TracePolynomial> {
    (coefficient(), prop::collection::vec(word(max_len), 1..=max_factors)).prop_map(move |(c, ws)| {
        let mut p = TracePolynomial::constant(mode, c);
        let mut degree = 0;
        for w in ws {
            if degree + w.len() > max_degree {
                break;
            }
            degree += w.len();
            p = p.checked_mul(&TracePolynomial::trace(mode, &w)).expect("same mode");
        }
        p
    })
}

/// Sums of up to `max_terms` random products of traces, degree ≤ `max_degree`.
pub fn poly(
    mode: Mode,
    max_terms: usize,
    max_factors: usize,
    max_len: usize,
    max_degree: u32,
) -> impl Strategy<Value = TracePolynomial> {
    prop::collection::vec(term(mode, max_factors, max_len, max_degree), 1..=max_terms).prop_map(move |ts| {
        ts.iter().fold(TracePolynomial::zero(mode), |acc, t| acc.checked_add(t).expect("same mode"))
    })
}

pub fn any_mode() -> impl Strategy<Value = Mode> {
    prop_oneof![Just(Mode::Plain), Just(Mode::Traceless)]
}

pub fn random_pair(n: usize, seed: u64) -> MatrixPair {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = gaussian_matrix(n, &mut rng) * Complex64::new(0.5, 0.0);
    let y = gaussian_matrix(n, &mut rng) * Complex64::new(0.5, 0.0);
    MatrixPair::new(x, y).expect("square pair")
}

/// Central differences of `p` in every entry of `X` and `Y`, written
/// out here rather than taken from the library.
pub fn fd_gradient(p: &TracePolynomial, pair: &MatrixPair, h: f64) -> (CMatrix, CMatrix) {
    let n = pair.n();
    let mut gx = CMatrix::zeros(n, n);
    let mut gy = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            for (which, g) in [(0, &mut gx), (1, &mut gy)] {
                let mut plus = pair.clone();
                let mut minus = pair.clone();
                if which == 0 {
                    plus.x[(i, j)] += h;
                    minus.x[(i, j)] -= h;
                } else {
                    plus.y[(i, j)] += h;
                    minus.y[(i, j)] -= h;
                }
                g[(i, j)] = (evaluate_pair(p, &plus) - evaluate_pair(p, &minus)) / (2.0 * h);
            }
        }
    }
    (gx, gy)
}

/// Sum of the absolute values of every term evaluated at `pair`, a scale
/// for relative comparisons that survives cancellation.
pub fn term_scale(p: &TracePolynomial, pair: &MatrixPair) -> f64 {
    p.terms()
        .map(|(k, c)| {
            let mono = TracePolynomial::monomial(p.mode(), k.clone(), c.clone());
            evaluate_pair(&mono, pair).norm()
        })
        .sum::<f64>()
        .max(1.0)
}
