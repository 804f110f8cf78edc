//! Pullback of `tr(dX ∧ dY)` under a map of matrix pairs, by finite differences.

use num_complex::Complex64;

use super::cm::MatrixPair;
use super::linalg::{CMatrix, CVector};
use crate::error::{Result, TraceError};

fn flatten(pair: &MatrixPair) -> CVector {
    let n = pair.n();
    let mut v = CVector::zeros(2 * n * n);
    for i in 0..n {
        for j in 0..n {
            v[i * n + j] = pair.x[(i, j)];
            v[n * n + i * n + j] = pair.y[(i, j)];
        }
    }
    v
}

fn unflatten(n: usize, v: &CVector) -> MatrixPair {
    MatrixPair {
        x: CMatrix::from_fn(n, n, |i, j| v[i * n + j]),
        y: CMatrix::from_fn(n, n, |i, j| v[n * n + i * n + j]),
    }
}

/// Skew matrix of `tr(dX ∧ dY) = Σ dX_{ij} ∧ dY_{ji}` in flattened coordinates.
pub fn symplectic_matrix(n: usize) -> CMatrix {
    let m = n * n;
    let mut s = CMatrix::zeros(2 * m, 2 * m);
    for i in 0..n {
        for j in 0..n {
            let x = i * n + j;
            let y = m + j * n + i;
            s[(x, y)] = Complex64::new(1.0, 0.0);
            s[(y, x)] = Complex64::new(-1.0, 0.0);
        }
    }
    s
}

/// Jacobian of `map` at `pair` by fourth-order central differences.
pub fn jacobian<F>(map: &F, pair: &MatrixPair, h: f64) -> Result<CMatrix>
where
    F: Fn(&MatrixPair) -> Result<MatrixPair>,
{
    let n = pair.n();
    let z = flatten(pair);
    if h.is_nan() || h <= 0.0 || h < 1e-12 * pair.scale() {
        return Err(TraceError::Numeric(format!("finite-difference step {h} underflows")));
    }
    let dim = z.len();
    let mut jac = CMatrix::zeros(dim, dim);
    for k in 0..dim {
        let at = |s: f64| -> Result<CVector> {
            let mut w = z.clone();
            w[k] += s;
            let out = flatten(&map(&unflatten(n, &w))?);
            if out.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
                return Err(TraceError::Numeric("map produced non-finite entries".into()));
            }
            Ok(out)
        };
        let col = (at(-2.0 * h)? - at(2.0 * h)? + (at(h)? - at(-h)?) * Complex64::new(8.0, 0.0))
            / Complex64::new(12.0 * h, 0.0);
        if col.len() != dim {
            return Err(TraceError::Dimension { expected: dim, found: col.len() });
        }
        jac.set_column(k, &col);
    }
    Ok(jac)
}

/// `‖Jᵀ S J - S‖_F / ‖S‖_F`.
pub fn symplectic_pullback_residual<F>(map: F, pair: &MatrixPair, h: f64) -> Result<f64>
where
    F: Fn(&MatrixPair) -> Result<MatrixPair>,
{
    let j = jacobian(&map, pair, h)?;
    let s = symplectic_matrix(pair.n());
    let pulled = j.transpose() * &s * &j;
    Ok((pulled - &s).norm() / s.norm())
}
