//! Small dense complex linear algebra helpers. Matrices are nalgebra's;
//! singular value decompositions go through faer, whose complex SVD stays
//! accurate on the rank-deficient matrices met in variety fits.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Result, TraceError};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub fn gaussian_matrix<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

/// Haar-distributed unitary: QR of a complex Gaussian matrix with the phases
/// of `R`'s diagonal moved into `Q`.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let qr = gaussian_matrix(n, rng).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// `g = U diag(σ) V` with `σ ∈ [1, max_condition]`, returned with its exact
/// inverse `V* diag(1/σ) U*`.
pub fn random_conjugator<R: Rng + ?Sized>(n: usize, max_condition: f64, rng: &mut R) -> (CMatrix, CMatrix) {
    let u = random_unitary(n, rng);
    let v = random_unitary(n, rng);
    let sigma: Vec<f64> = (0..n).map(|_| rng.random_range(1.0..=max_condition.max(1.0))).collect();
    let d = CMatrix::from_diagonal(&CVector::from_iterator(n, sigma.iter().map(|&s| Complex64::new(s, 0.0))));
    let d_inv = CMatrix::from_diagonal(&CVector::from_iterator(n, sigma.iter().map(|&s| Complex64::new(1.0 / s, 0.0))));
    let g = &u * d * &v;
    let g_inv = v.adjoint() * d_inv * u.adjoint();
    (g, g_inv)
}

fn to_faer(m: &CMatrix) -> faer::Mat<faer::c64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn from_faer(m: faer::MatRef<'_, faer::c64>) -> CMatrix {
    CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Thin SVD `m = u diag(s) vt`, singular values in descending order.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: CMatrix,
    pub s: Vec<f64>,
    pub vt: CMatrix,
}

pub fn svd(m: &CMatrix) -> Result<Svd> {
    let d = to_faer(m).thin_svd().map_err(|e| TraceError::Numeric(format!("svd: {e:?}")))?;
    let s = (0..d.S().dim()).map(|i| d.S()[i].re).collect();
    Ok(Svd { u: from_faer(d.U()), s, vt: from_faer(d.V()).adjoint() })
}

/// Singular values in descending order; NaN if the iteration fails.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut s = to_faer(m).singular_values().unwrap_or_else(|_| vec![f64::NAN; m.nrows().min(m.ncols())]);
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().sum()
}

/// `tr(a b)` without forming the product.
pub fn trace_of_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..a.ncols() {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Least-squares solution of `a x ≈ b` by SVD with relative cutoff `rcond`.
#[derive(Clone, Debug)]
pub struct LeastSquares {
    pub solution: CVector,
    pub rank: usize,
    /// `σ_max / σ_min` over the singular values kept.
    pub condition: f64,
    pub singular_values: Vec<f64>,
}

pub fn least_squares(a: &CMatrix, b: &CVector, rcond: f64) -> Result<LeastSquares> {
    if a.ncols() == 0 || a.nrows() == 0 {
        return Ok(LeastSquares {
            solution: CVector::zeros(a.ncols()),
            rank: 0,
            condition: 1.0,
            singular_values: vec![],
        });
    }
    let d = svd(a)?;
    let smax = d.s.first().copied().unwrap_or(0.0);
    let cutoff = rcond * smax;
    let mut x = CVector::zeros(a.ncols());
    let mut rank = 0;
    let mut smin = f64::INFINITY;
    for (k, &sk) in d.s.iter().enumerate() {
        if sk <= cutoff || sk == 0.0 {
            continue;
        }
        rank += 1;
        smin = smin.min(sk);
        let coef = d.u.column(k).dotc(b) / Complex64::new(sk, 0.0);
        x += d.vt.row(k).adjoint() * coef;
    }
    let condition = if rank == 0 { f64::INFINITY } else { smax / smin };
    Ok(LeastSquares { solution: x, rank, condition, singular_values: d.s })
}

/// Number of singular values above `rel_tol · σ_max`.
pub fn numeric_rank(m: &CMatrix, rel_tol: f64) -> usize {
    let s = singular_values(m);
    let smax = s.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return 0;
    }
    s.iter().filter(|&&v| v > rel_tol * smax).count()
}
