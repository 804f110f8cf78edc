//! Least-squares comparison of functions on sampled variety points.

use num_complex::Complex64;
use rayon::prelude::*;

use super::cm::CMPoint;
use super::eval::{CompiledPoly, Evaluator};
use super::linalg::{least_squares, CMatrix, CVector};
use crate::error::{Result, TraceError};
use crate::poly::TracePolynomial;

/// Outcome of fitting a target against a basis on sample points.
#[derive(Clone, Debug)]
pub struct VarietyFit {
    /// `max |target - fit| / max scale` over the points.
    pub residual: f64,
    pub rank: usize,
    pub basis_size: usize,
    pub points: usize,
}

/// Fits `target` by the span of `basis` on `points`. The residual is taken
/// relative to the largest term magnitude of the `scale` polynomials, so
/// an exact cancellation reads as zero regardless of the size of the terms.
pub fn fit_on_points(
    target: &TracePolynomial,
    scale: &[&TracePolynomial],
    basis: &[TracePolynomial],
    points: &[CMPoint],
) -> Result<VarietyFit> {
    let n = points.first().map(CMPoint::n).ok_or_else(|| TraceError::Numeric("no sample points".into()))?;
    if let Some(p) = points.iter().find(|p| p.n() != n) {
        return Err(TraceError::Dimension { expected: n, found: p.n() });
    }
    let mode = target.mode();
    let t = CompiledPoly::new(target, n);
    let sc: Vec<CompiledPoly> = scale.iter().map(|p| CompiledPoly::new(p, n)).collect();
    let bs: Vec<CompiledPoly> = basis.iter().map(|p| CompiledPoly::new(p, n)).collect();
    let rows: Vec<(Complex64, f64, Vec<Complex64>)> = points
        .par_iter()
        .map(|pt| {
            let mut ev = Evaluator::new(&pt.pair, mode);
            let v = ev.eval_compiled(&t);
            let s = sc.iter().map(|p| ev.magnitude(p)).sum::<f64>().max(ev.magnitude(&t));
            let b = bs.iter().map(|p| ev.eval_compiled(p)).collect();
            (v, s, b)
        })
        .collect();
    let m = rows.len();
    let scale_max = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let b = CVector::from_iterator(m, rows.iter().map(|r| r.0));
    let mut a = CMatrix::from_fn(m, bs.len(), |i, j| rows[i].2[j]);
    for mut col in a.column_iter_mut() {
        let s = col.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if s > 0.0 {
            col /= Complex64::new(s, 0.0);
        }
    }
    let ls = least_squares(&a, &b, 1e-10)?;
    let r = &b - &a * &ls.solution;
    let rmax = r.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let residual = if scale_max > 0.0 { rmax / scale_max } else { rmax };
    Ok(VarietyFit { residual, rank: ls.rank, basis_size: bs.len(), points: m })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::cm::{sample_many, SamplerConfig};
    use crate::text::parse_polynomial as p;

    #[test]
    fn commutator_word_is_constant_on_the_variety() {
        // in the diagonal normal form tr(ABAB) - tr(A^2B^2) = λ² n(n-1)/2
        let pts = sample_many(3, true, 7, 60, &SamplerConfig::fitting()).unwrap();
        let d = p("tr(A B A B) - tr(A^2 B^2)").unwrap();
        let one = TracePolynomial::one(crate::poly::Mode::Traceless);
        let with_const = fit_on_points(&d, &[], &[one], &pts).unwrap();
        assert!(with_const.residual < 1e-12, "{}", with_const.residual);
        let without = fit_on_points(&d, &[], &[], &pts).unwrap();
        assert!(without.residual > 1e-3, "{}", without.residual);
        let v = crate::numeric::eval::evaluate(&d, &pts[0], 3).unwrap();
        assert!((v - Complex64::new(-3.0, 0.0)).norm() < 1e-12);
    }
}
