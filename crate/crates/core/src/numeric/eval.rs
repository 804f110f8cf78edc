//! Numeric evaluation, exact gradients and the numeric bracket of trace
//! polynomials at concrete matrix pairs.

use std::collections::HashMap;

use num_complex::Complex64;

use super::cm::{CMPoint, MatrixPair};
use super::linalg::{trace, trace_of_product, CMatrix};
use crate::error::{Result, TraceError};
use crate::poly::{Mode, MonomialKey, TracePolynomial};
use crate::word::{CyclicWord, Letter, Word};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// A polynomial with coefficients specialized to floating point at fixed `n`.
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    pub mode: Mode,
    pub terms: Vec<(f64, MonomialKey)>,
}

impl CompiledPoly {
    pub fn new(p: &TracePolynomial, n: usize) -> Self {
        let nf = n as f64;
        Self { mode: p.mode(), terms: p.terms().map(|(k, c)| (c.to_f64(nf), k.clone())).collect() }
    }
}

/// Per-point cache of letter powers and word traces.
///
/// In traceless mode the letters are the traceless parts `A = X - tr X/n`,
/// `B = Y - tr Y/n` and the central symbols evaluate to `tr X`, `tr Y`.
pub struct Evaluator {
    mode: Mode,
    n: usize,
    letters: [CMatrix; 2],
    central: [Complex64; 2],
    powers: [Vec<CMatrix>; 2],
    traces: HashMap<CyclicWord, Complex64>,
}

impl Evaluator {
    pub fn new(pair: &MatrixPair, mode: Mode) -> Self {
        let n = pair.n();
        let central = [trace(&pair.x), trace(&pair.y)];
        let letters = match mode {
            Mode::Plain => [pair.x.clone(), pair.y.clone()],
            Mode::Traceless => {
                let t = pair.traceless_part();
                [t.x, t.y]
            }
        };
        let id = CMatrix::identity(n, n);
        Self {
            mode,
            n,
            powers: [vec![id.clone(), letters[0].clone()], vec![id, letters[1].clone()]],
            letters,
            central,
            traces: HashMap::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn power(&mut self, letter: Letter, e: u32) -> &CMatrix {
        let i = letter.index();
        while self.powers[i].len() <= e as usize {
            let next = self.powers[i].last().expect("nonempty") * &self.letters[i];
            self.powers[i].push(next);
        }
        &self.powers[i][e as usize]
    }

    pub fn word_matrix(&mut self, w: &Word) -> CMatrix {
        let mut acc: Option<CMatrix> = None;
        for &(l, e) in w.runs() {
            let p = self.power(l, e).clone();
            acc = Some(match acc {
                None => p,
                Some(m) => m * p,
            });
        }
        acc.unwrap_or_else(|| CMatrix::identity(self.n, self.n))
    }

    pub fn trace(&mut self, w: &CyclicWord) -> Complex64 {
        if let Some(v) = self.traces.get(w) {
            return *v;
        }
        let runs = w.runs();
        let v = match runs.len() {
            0 => Complex64::new(self.n as f64, 0.0),
            1 => trace(self.power(runs[0].0, runs[0].1)),
            _ => {
                let (last, head) = runs.split_last().expect("nonempty");
                let left = self.word_matrix(&Word::from_runs(head.iter().copied()));
                let right = self.power(last.0, last.1).clone();
                trace_of_product(&left, &right)
            }
        };
        self.traces.insert(w.clone(), v);
        v
    }

    fn central_value(&self, key: &MonomialKey) -> Complex64 {
        let c = key.central();
        self.central[0].powu(c[0]) * self.central[1].powu(c[1])
    }

    pub fn monomial(&mut self, key: &MonomialKey) -> Complex64 {
        let mut v = self.central_value(key);
        for f in key.factors() {
            v *= self.trace(f);
        }
        v
    }

    pub fn eval_compiled(&mut self, p: &CompiledPoly) -> Complex64 {
        p.terms.iter().map(|(c, k)| self.monomial(k) * *c).sum()
    }

    /// `Σ |c| Π n ‖A‖^i ‖B‖^j` over the terms (Frobenius norms): a bound on
    /// the size of every term that does not vanish when the terms do, so
    /// cancellation in `eval_compiled` is judged against the point's scale.
    pub fn magnitude(&mut self, p: &CompiledPoly) -> f64 {
        let na = self.letters[0].norm();
        let nb = self.letters[1].norm();
        let nf = self.n as f64;
        p.terms
            .iter()
            .map(|(c, k)| {
                let [s, t] = k.central();
                let central = self.central[0].norm().powi(s as i32) * self.central[1].norm().powi(t as i32);
                k.factors().iter().fold(c.abs() * central, |acc, w| {
                    let (i, j) = w.bidegree();
                    acc * nf * na.powi(i as i32) * nb.powi(j as i32)
                })
            })
            .sum()
    }

    pub fn eval(&mut self, p: &TracePolynomial) -> Complex64 {
        let nf = self.n as f64;
        p.terms().map(|(k, c)| self.monomial(k) * c.to_f64(nf)).sum()
    }

    /// `(∂p/∂X, ∂p/∂Y)` with `(∂p/∂X)_{jk} = ∂p/∂X_{jk}`.
    pub fn gradient(&mut self, p: &TracePolynomial) -> (CMatrix, CMatrix) {
        let n = self.n;
        let nf = n as f64;
        let mut g = [CMatrix::zeros(n, n), CMatrix::zeros(n, n)];
        let mut d_central = [ZERO; 2];
        for (key, c) in p.terms() {
            let c = Complex64::new(c.to_f64(nf), 0.0);
            let factors = key.factors();
            let values: Vec<Complex64> = factors.iter().map(|f| self.trace(f)).collect();
            let central = self.central_value(key);
            for (i, f) in factors.iter().enumerate() {
                let others: Complex64 =
                    values.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, v)| *v).product::<Complex64>()
                        * central;
                if others == ZERO {
                    continue;
                }
                for letter in Letter::BOTH {
                    for (u, m) in f.cuts(letter) {
                        let um = self.word_matrix(&u);
                        g[letter.index()] += um.transpose() * (c * others * f64::from(m));
                    }
                }
            }
            let prod: Complex64 = values.iter().product();
            let e = key.central();
            for l in 0..2 {
                if e[l] > 0 {
                    let mut partial = c * prod * f64::from(e[l]);
                    partial *= self.central[l].powu(e[l] - 1) * self.central[1 - l].powu(e[1 - l]);
                    d_central[l] += partial;
                }
            }
        }
        if self.mode == Mode::Traceless {
            let id = CMatrix::identity(n, n);
            for l in 0..2 {
                let tr = trace(&g[l]) / nf;
                g[l] -= &id * tr;
                g[l] += &id * d_central[l];
            }
        }
        let [gx, gy] = g;
        (gx, gy)
    }
}

fn check_n(pt: &CMPoint, n_symbol_value: usize) -> Result<()> {
    if pt.n() != n_symbol_value {
        return Err(TraceError::Dimension { expected: n_symbol_value, found: pt.n() });
    }
    Ok(())
}

pub fn evaluate(p: &TracePolynomial, pt: &CMPoint, n_symbol_value: usize) -> Result<Complex64> {
    check_n(pt, n_symbol_value)?;
    Ok(Evaluator::new(&pt.pair, p.mode()).eval(p))
}

pub fn evaluate_pair(p: &TracePolynomial, pair: &MatrixPair) -> Complex64 {
    Evaluator::new(pair, p.mode()).eval(p)
}

pub fn numeric_gradient(p: &TracePolynomial, pt: &CMPoint) -> (CMatrix, CMatrix) {
    Evaluator::new(&pt.pair, p.mode()).gradient(p)
}

pub fn gradient_at(p: &TracePolynomial, pair: &MatrixPair) -> (CMatrix, CMatrix) {
    Evaluator::new(pair, p.mode()).gradient(p)
}

/// `Σ_{jk} ∂f/∂X_{jk} ∂g/∂Y_{kj} - ∂f/∂Y_{jk} ∂g/∂X_{kj}`.
pub fn numeric_bracket(f: &TracePolynomial, g: &TracePolynomial, pt: &CMPoint) -> Result<Complex64> {
    if f.mode() != g.mode() {
        return Err(TraceError::ModeMismatch { left: f.mode(), right: g.mode() });
    }
    let (fx, fy) = numeric_gradient(f, pt);
    let (gx, gy) = numeric_gradient(g, pt);
    Ok(trace_of_product(&fx, &gy) - trace_of_product(&fy, &gx))
}

/// Cauchy–Schwarz bound `‖f_X‖‖g_Y‖ + ‖f_Y‖‖g_X‖` on the bracket, used as
/// the scale for relative comparisons.
pub fn bracket_scale(f: &TracePolynomial, g: &TracePolynomial, pt: &CMPoint) -> f64 {
    let (fx, fy) = numeric_gradient(f, pt);
    let (gx, gy) = numeric_gradient(g, pt);
    fx.norm() * gy.norm() + fy.norm() * gx.norm()
}

/// Central finite-difference gradient with step `h` in every entry.
pub fn finite_difference_gradient(p: &TracePolynomial, pair: &MatrixPair, h: f64) -> (CMatrix, CMatrix) {
    let n = pair.n();
    let mut out = [CMatrix::zeros(n, n), CMatrix::zeros(n, n)];
    for (l, slot) in out.iter_mut().enumerate() {
        for i in 0..n {
            for j in 0..n {
                let mut plus = pair.clone();
                let mut minus = pair.clone();
                let (mp, mm) = if l == 0 { (&mut plus.x, &mut minus.x) } else { (&mut plus.y, &mut minus.y) };
                mp[(i, j)] += h;
                mm[(i, j)] -= h;
                slot[(i, j)] = (evaluate_pair(p, &plus) - evaluate_pair(p, &minus)) / (2.0 * h);
            }
        }
    }
    let [a, b] = out;
    (a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::cm::{sample_cm, CMPoint};
    use crate::poisson::bracket;
    use crate::text::parse_polynomial as p;

    fn diag_point() -> CMPoint {
        let x = CMatrix::from_row_slice(2, 2, &[Complex64::new(1.0, 0.0), ZERO, ZERO, Complex64::new(-1.0, 0.0)]);
        CMPoint::from_pair(MatrixPair::new(x.clone(), x).unwrap(), true)
    }

    #[test]
    fn empty_word_is_n() {
        let pt = sample_cm(3, true, 1).unwrap();
        let v = evaluate(&p("n").unwrap(), &pt, 3).unwrap();
        assert!((v - 3.0).norm() < 1e-15);
    }

    #[test]
    fn trace_x_vanishes_on_traceless_point() {
        let pt = sample_cm(3, true, 2).unwrap();
        let v = evaluate(&p("tr(X)").unwrap(), &pt, 3).unwrap();
        assert!(v.norm() < 1e-12);
    }

    #[test]
    fn hand_evaluation() {
        let v = evaluate(&p("tr(X^2)").unwrap(), &diag_point(), 2).unwrap();
        assert_eq!(v, Complex64::new(2.0, 0.0));
        assert!(evaluate(&p("tr(X^2)").unwrap(), &diag_point(), 3).is_err());
    }

    #[test]
    fn gradient_conventions() {
        let pt = sample_cm(3, false, 3).unwrap();
        let (gx, gy) = numeric_gradient(&p("tr(X^2)").unwrap(), &pt);
        assert!((gx - pt.pair.x.transpose() * Complex64::new(2.0, 0.0)).norm() < 1e-12);
        assert_eq!(gy.norm(), 0.0);
        let (gx, _) = numeric_gradient(&p("tr(X Y)").unwrap(), &pt);
        assert!((gx - pt.pair.y.transpose()).norm() < 1e-12);
    }

    #[test]
    fn brackets_match_symbolic() {
        let pt = sample_cm(3, false, 4).unwrap();
        let n = numeric_bracket(&p("tr(X)").unwrap(), &p("tr(Y)").unwrap(), &pt).unwrap();
        assert!((n - 3.0).norm() < 1e-12);
        let z = numeric_bracket(&p("tr(X^2)").unwrap(), &p("tr(X^3)").unwrap(), &pt).unwrap();
        assert!(z.norm() < 1e-12 * pt.pair.scale().powi(3));
        let f = p("tr(X^2)").unwrap();
        let g = p("tr(Y^2)").unwrap();
        let want = evaluate(&bracket(&f, &g).unwrap(), &pt, 3).unwrap();
        let got = numeric_bracket(&f, &g, &pt).unwrap();
        assert!((want - got).norm() <= 1e-9 * want.norm().max(1.0));
    }

    #[test]
    fn traceless_gradient_matches_finite_differences() {
        let pt = sample_cm(3, true, 5).unwrap();
        let f = p("tr(A^2 B)*tr(X) + 2*tr(A B^2) - tr(Y)*tr(Y)").unwrap();
        let (gx, gy) = numeric_gradient(&f, &pt);
        let (fx, fy) = finite_difference_gradient(&f, &pt.pair, 1e-6);
        let scale = gx.norm() + gy.norm();
        assert!(((gx - fx).norm() + (gy - fy).norm()) / scale < 1e-6);
    }
}
