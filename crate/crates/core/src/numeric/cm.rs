//! Calogero–Moser points: matrix pairs with `rank([X,Y] + λ I) = 1`.
//!
//! Points are built from the diagonal normal form `X = diag(x)`,
//! `Y_jj = p_j`, `Y_jk = λ ε_j ε_k / (x_j - x_k)` with `ε_j = (-1)^j`, for which
//! `[X,Y] + λ I = λ ε εᵀ`, and then conjugated by a random invertible matrix.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::linalg::{max_abs, random_conjugator, singular_values, trace, CMatrix};
use crate::error::{Result, TraceError};

/// Derives an independent child seed for parallel sampling:
/// `splitmix64(seed ^ splitmix64(index + 1))`.
pub fn child_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index.wrapping_add(1)))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatrixPair {
    pub x: CMatrix,
    pub y: CMatrix,
}

impl MatrixPair {
    pub fn new(x: CMatrix, y: CMatrix) -> Result<Self> {
        let n = x.nrows();
        for m in [&x, &y] {
            if m.nrows() != n || m.ncols() != n {
                return Err(TraceError::Dimension { expected: n, found: m.ncols().max(m.nrows()) });
            }
        }
        Ok(Self { x, y })
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn commutator(&self) -> CMatrix {
        &self.x * &self.y - &self.y * &self.x
    }

    pub fn conjugate(&self, g: &CMatrix, g_inv: &CMatrix) -> MatrixPair {
        MatrixPair { x: g * &self.x * g_inv, y: g * &self.y * g_inv }
    }

    pub fn scale(&self) -> f64 {
        max_abs(&self.x).max(max_abs(&self.y)).max(1.0)
    }

    /// Subtracts `tr/n · I` from both matrices.
    pub fn traceless_part(&self) -> MatrixPair {
        let n = self.n();
        let id = CMatrix::identity(n, n);
        let nc = Complex64::new(n as f64, 0.0);
        MatrixPair { x: &self.x - &id * (trace(&self.x) / nc), y: &self.y - &id * (trace(&self.y) / nc) }
    }

    pub fn is_finite(&self) -> bool {
        self.x.iter().chain(self.y.iter()).all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// `σ_2 / σ_1` of `[X,Y] + λ I`; zero for `n = 1`.
pub fn rank_residual(pair: &MatrixPair, lambda: Complex64) -> f64 {
    if pair.n() <= 1 {
        return 0.0;
    }
    let n = pair.n();
    let m = pair.commutator() + CMatrix::identity(n, n) * lambda;
    let s = singular_values(&m);
    if s[0] == 0.0 {
        return f64::INFINITY;
    }
    s[1] / s[0]
}

/// `max(|tr X|, |tr Y|)` relative to the largest entry.
pub fn trace_residual(pair: &MatrixPair) -> f64 {
    trace(&pair.x).norm().max(trace(&pair.y).norm()) / pair.scale()
}

#[derive(Clone, Debug, PartialEq)]
pub struct CMPoint {
    pub pair: MatrixPair,
    pub traceless: bool,
    pub rank_residual: f64,
    pub seed: Option<u64>,
}

impl CMPoint {
    pub fn n(&self) -> usize {
        self.pair.n()
    }

    /// Wraps a pair, measuring its rank residual for `λ = -i`.
    pub fn from_pair(pair: MatrixPair, traceless: bool) -> Self {
        let rank_residual = rank_residual(&pair, DEFAULT_LAMBDA);
        Self { pair, traceless, rank_residual, seed: None }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&CMPointRecord::from(self))?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let rec: CMPointRecord = serde_json::from_str(s)?;
        rec.try_into()
    }
}

/// Serialized form: row-major entries as `[re, im]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CMPointRecord {
    pub n: usize,
    pub traceless: bool,
    pub x: Vec<[f64; 2]>,
    pub y: Vec<[f64; 2]>,
    pub seed: Option<u64>,
    pub rank_residual: f64,
}

fn row_major(m: &CMatrix) -> Vec<[f64; 2]> {
    let n = m.nrows();
    (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| [m[(i, j)].re, m[(i, j)].im]).collect()
}

fn from_row_major(n: usize, v: &[[f64; 2]]) -> Result<CMatrix> {
    if v.len() != n * n {
        return Err(TraceError::Dimension { expected: n * n, found: v.len() });
    }
    Ok(CMatrix::from_fn(n, n, |i, j| {
        let [re, im] = v[i * n + j];
        Complex64::new(re, im)
    }))
}

impl From<&CMPoint> for CMPointRecord {
    fn from(p: &CMPoint) -> Self {
        CMPointRecord {
            n: p.n(),
            traceless: p.traceless,
            x: row_major(&p.pair.x),
            y: row_major(&p.pair.y),
            seed: p.seed,
            rank_residual: p.rank_residual,
        }
    }
}

impl TryFrom<CMPointRecord> for CMPoint {
    type Error = TraceError;
    fn try_from(r: CMPointRecord) -> Result<Self> {
        let pair = MatrixPair::new(from_row_major(r.n, &r.x)?, from_row_major(r.n, &r.y)?)?;
        Ok(CMPoint { pair, traceless: r.traceless, rank_residual: r.rank_residual, seed: r.seed })
    }
}

pub const DEFAULT_LAMBDA: Complex64 = Complex64 { re: 0.0, im: -1.0 };

#[derive(Clone, Debug)]
pub struct SamplerConfig {
    /// Rank-condition constant: `rank([X,Y] + λ I) = 1`.
    pub lambda: Complex64,
    /// Minimum pairwise distance of the eigenvalues of `X`.
    pub separation: f64,
    /// Eigenvalues of `X` are drawn from the square `|re|, |im| ≤ radius`.
    pub radius: f64,
    /// Diagonal momenta are drawn from `|re|, |im| ≤ momentum`.
    pub momentum: f64,
    /// Upper bound on the condition number of the conjugator.
    pub max_condition: f64,
    pub max_retries: u32,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            lambda: DEFAULT_LAMBDA,
            separation: 0.1,
            radius: 1.5,
            momentum: 1.0,
            max_condition: 10.0,
            max_retries: 64,
        }
    }
}

impl SamplerConfig {
    /// Small, well separated and well conditioned points. Flow families
    /// grow entries like `exp(2|t| tr AB)`, so large momenta overflow
    /// the Jacobian at `|t| = 10`.
    pub fn flow() -> Self {
        Self { separation: 0.5, radius: 1.0, momentum: 0.05, max_condition: 2.0, ..Self::default() }
    }

    /// Unit-scale points used for span tests and least-squares fits.
    pub fn fitting() -> Self {
        Self { separation: 0.5, radius: 1.0, momentum: 1.0, max_condition: 2.0, ..Self::default() }
    }
}

/// The unconjugated pair built from eigenvalues `x` and momenta `p`.
pub fn normal_form(x: &[Complex64], p: &[Complex64], lambda: Complex64) -> Result<MatrixPair> {
    let n = x.len();
    if p.len() != n {
        return Err(TraceError::Dimension { expected: n, found: p.len() });
    }
    let eps = |j: usize| if j.is_multiple_of(2) { 1.0 } else { -1.0 };
    let xm = CMatrix::from_fn(n, n, |i, j| if i == j { x[i] } else { Complex64::new(0.0, 0.0) });
    let mut ym = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            ym[(i, j)] = if i == j {
                p[i]
            } else {
                let d = x[i] - x[j];
                if d.norm() == 0.0 {
                    return Err(TraceError::Sampler("coincident eigenvalues".into()));
                }
                lambda * eps(i) * eps(j) / d
            };
        }
    }
    MatrixPair::new(xm, ym)
}

fn uniform_complex<R: Rng + ?Sized>(rng: &mut R, r: f64) -> Complex64 {
    if r == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    Complex64::new(rng.random_range(-r..=r), rng.random_range(-r..=r))
}

fn separated(x: &[Complex64], sep: f64) -> bool {
    x.iter().enumerate().all(|(i, a)| x[i + 1..].iter().all(|b| (a - b).norm() >= sep))
}

pub fn sample_cm(n: usize, traceless: bool, seed: u64) -> Result<CMPoint> {
    sample_cm_with(n, traceless, seed, &SamplerConfig::default())
}

pub fn sample_cm_with(n: usize, traceless: bool, seed: u64, cfg: &SamplerConfig) -> Result<CMPoint> {
    if n == 0 {
        return Err(TraceError::Usage("matrix size must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x: Option<Vec<Complex64>> = None;
    for _ in 0..cfg.max_retries.max(1) {
        let mut cand: Vec<Complex64> = (0..n).map(|_| uniform_complex(&mut rng, cfg.radius)).collect();
        if traceless {
            let mean = cand.iter().sum::<Complex64>() / n as f64;
            cand.iter_mut().for_each(|v| *v -= mean);
        }
        if separated(&cand, cfg.separation) {
            x = Some(cand);
            break;
        }
    }
    let x = x.ok_or_else(|| {
        TraceError::Sampler(format!(
            "no eigenvalues with separation {} after {} tries",
            cfg.separation, cfg.max_retries
        ))
    })?;
    let mut p: Vec<Complex64> = (0..n).map(|_| uniform_complex(&mut rng, cfg.momentum)).collect();
    if traceless {
        let mean = p.iter().sum::<Complex64>() / n as f64;
        p.iter_mut().for_each(|v| *v -= mean);
    }
    let base = normal_form(&x, &p, cfg.lambda)?;
    let (g, g_inv) = random_conjugator(n, cfg.max_condition, &mut rng);
    let mut pair = base.conjugate(&g, &g_inv);
    if traceless {
        pair = pair.traceless_part();
    }
    let rank_residual = rank_residual(&pair, cfg.lambda);
    Ok(CMPoint { pair, traceless, rank_residual, seed: Some(seed) })
}

/// `count` points drawn with child seeds `child_seed(seed, i)`.
pub fn sample_many(n: usize, traceless: bool, seed: u64, count: usize, cfg: &SamplerConfig) -> Result<Vec<CMPoint>> {
    use rayon::prelude::*;
    (0..count as u64).into_par_iter().map(|i| sample_cm_with(n, traceless, child_seed(seed, i), cfg)).collect()
}
