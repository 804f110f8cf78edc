//! Explicit symplectic flow families on traceless Calogero–Moser space and a
//! fixed-step Hamiltonian integrator.
//!
//! Hamiltonian vector fields use `dX/dτ = (∂h/∂Y)ᵀ`, `dY/dτ = -(∂h/∂X)ᵀ`,
//! which matches [`numeric_bracket`](crate::numeric::numeric_bracket):
//! `d f/dτ = {f, h}`. With this convention the flow of `tr A²` is exactly
//! `(A, B - 2tA)` and the flow of `tr AB` is `(A e^t, B e^{-t})`.
//!
//! Families act on the traceless parts `A = X - tr X/n`, `B = Y - tr Y/n` and
//! leave `tr X`, `tr Y` fixed, so they are symplectic on all matrix pairs.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TraceError};
use crate::numeric::cm::{rank_residual, trace_residual, CMPoint, MatrixPair, DEFAULT_LAMBDA};
use crate::numeric::eval::gradient_at;
use crate::numeric::linalg::{trace, trace_of_product, CMatrix};
use crate::numeric::symplectic::symplectic_pullback_residual;
use crate::poly::TracePolynomial;
use crate::text::parse_polynomial;

/// Rank residual allowed on family outputs.
pub const RANK_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FamilyId {
    #[serde(rename = "shearB")]
    ShearB,
    #[serde(rename = "shearA")]
    ShearA,
    #[serde(rename = "cubicShear")]
    CubicShear,
    #[serde(rename = "scaling")]
    Scaling,
}

impl FamilyId {
    pub const ALL: [FamilyId; 4] = [FamilyId::ShearB, FamilyId::ShearA, FamilyId::CubicShear, FamilyId::Scaling];

    pub fn name(self) -> &'static str {
        match self {
            FamilyId::ShearB => "shearB",
            FamilyId::ShearA => "shearA",
            FamilyId::CubicShear => "cubicShear",
            FamilyId::Scaling => "scaling",
        }
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyId {
    type Err = TraceError;
    fn from_str(s: &str) -> Result<Self> {
        FamilyId::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| TraceError::Unknown { kind: "flow family", name: s.to_string() })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlowFamily {
    pub id: FamilyId,
    pub t: Complex64,
}

impl FlowFamily {
    pub fn new(id: FamilyId, t: Complex64) -> Self {
        Self { id, t }
    }
}

/// `tr A²`, `tr B²`, `tr A³`, `(tr AB)²`.
pub fn family_hamiltonian(id: FamilyId) -> TracePolynomial {
    let text = match id {
        FamilyId::ShearB => "tr(A^2)",
        FamilyId::ShearA => "tr(B^2)",
        FamilyId::CubicShear => "tr(A^3)",
        FamilyId::Scaling => "tr(A B)*tr(A B)",
    };
    parse_polynomial(text).expect("built-in Hamiltonian parses")
}

/// The closed-form map on an arbitrary pair.
pub fn family_map(fam: FlowFamily, pair: &MatrixPair) -> MatrixPair {
    let n = pair.n();
    let id = CMatrix::identity(n, n);
    let nc = Complex64::new(n as f64, 0.0);
    let s = trace(&pair.x) / nc;
    let u = trace(&pair.y) / nc;
    let a = &pair.x - &id * s;
    let b = &pair.y - &id * u;
    let t = fam.t;
    let (a2, b2) = match fam.id {
        FamilyId::ShearB => {
            let b2 = &b - &a * (t * 2.0);
            (a, b2)
        }
        FamilyId::ShearA => {
            let a2 = &a + &b * (t * 2.0);
            (a2, b)
        }
        FamilyId::CubicShear => {
            let sq = &a * &a;
            let shift = trace(&sq) / nc;
            let b2 = &b - (sq - &id * shift) * (t * 3.0);
            (a, b2)
        }
        FamilyId::Scaling => {
            let c = t * 2.0 * trace_of_product(&a, &b);
            let a2 = &a * c.exp();
            let b2 = &b * (-c).exp();
            (a2, b2)
        }
    };
    MatrixPair { x: a2 + &id * s, y: b2 + &id * u }
}

pub fn apply_family(fam: FlowFamily, pt: &CMPoint) -> Result<CMPoint> {
    let pair = family_map(fam, &pt.pair);
    if !pair.is_finite() {
        return Err(TraceError::Numeric(format!("{} at t = {} left the finite range", fam.id, fam.t)));
    }
    let residual = rank_residual(&pair, DEFAULT_LAMBDA);
    if residual.is_nan() || residual >= RANK_TOLERANCE {
        return Err(TraceError::Numeric(format!(
            "{} at t = {}: rank residual {residual:.3e} exceeds {RANK_TOLERANCE:.0e}",
            fam.id, fam.t
        )));
    }
    Ok(CMPoint { pair, traceless: pt.traceless, rank_residual: residual, seed: pt.seed })
}

fn vector_field(h: &TracePolynomial, pair: &MatrixPair) -> MatrixPair {
    let (gx, gy) = gradient_at(h, pair);
    MatrixPair { x: gy.transpose(), y: -gx.transpose() }
}

fn axpy(base: &MatrixPair, k: &MatrixPair, c: Complex64) -> MatrixPair {
    MatrixPair { x: &base.x + &k.x * c, y: &base.y + &k.y * c }
}

fn rk4(h: &TracePolynomial, start: &MatrixPair, t: Complex64, steps: usize) -> Result<MatrixPair> {
    let dt = t / steps as f64;
    let half = dt * 0.5;
    let mut z = start.clone();
    for _ in 0..steps {
        let k1 = vector_field(h, &z);
        let k2 = vector_field(h, &axpy(&z, &k1, half));
        let k3 = vector_field(h, &axpy(&z, &k2, half));
        let k4 = vector_field(h, &axpy(&z, &k3, dt));
        let sixth = dt / 6.0;
        z = MatrixPair {
            x: &z.x + (k1.x + (k2.x + k3.x) * Complex64::new(2.0, 0.0) + k4.x) * sixth,
            y: &z.y + (k1.y + (k2.y + k3.y) * Complex64::new(2.0, 0.0) + k4.y) * sixth,
        };
        if !z.is_finite() {
            return Err(TraceError::Numeric("Hamiltonian flow blew up".into()));
        }
    }
    Ok(z)
}

/// Result of [`ode_flow_with_estimate`].
#[derive(Clone, Debug)]
pub struct OdeResult {
    pub point: CMPoint,
    /// Richardson estimate `max|z_steps - z_2steps| / 15` of the RK4 error.
    pub error_estimate: f64,
}

/// Integrates the Hamiltonian vector field of `h` along the segment `0 → t`
/// with `steps` classical RK4 steps.
pub fn ode_flow(h: &TracePolynomial, pt: &CMPoint, t: Complex64, steps: usize) -> Result<CMPoint> {
    if steps == 0 {
        return Err(TraceError::Usage("steps must be positive".into()));
    }
    let pair = rk4(h, &pt.pair, t, steps)?;
    let residual = rank_residual(&pair, DEFAULT_LAMBDA);
    Ok(CMPoint { pair, traceless: pt.traceless, rank_residual: residual, seed: pt.seed })
}

pub fn ode_flow_with_estimate(h: &TracePolynomial, pt: &CMPoint, t: Complex64, steps: usize) -> Result<OdeResult> {
    let coarse = ode_flow(h, pt, t, steps)?;
    let fine = ode_flow(h, pt, t, 2 * steps)?;
    let error_estimate = max_entry_difference(&coarse.pair, &fine.pair) / 15.0;
    Ok(OdeResult { point: fine, error_estimate })
}

pub fn max_entry_difference(a: &MatrixPair, b: &MatrixPair) -> f64 {
    (&a.x - &b.x).iter().chain((&a.y - &b.y).iter()).fold(0.0, |m, z| m.max(z.norm()))
}

/// Finite-difference step for the Jacobian of a family map: the scaling
/// family oscillates on the scale `1 / (|t| ‖(A,B)‖²)`.
pub fn jacobian_step(fam: FlowFamily, pair: &MatrixPair) -> f64 {
    let base = 1e-3;
    match fam.id {
        FamilyId::Scaling => {
            let m = pair.x.norm().max(pair.y.norm()).max(1.0);
            base / (1.0 + 2.0 * fam.t.norm() * m)
        }
        _ => base,
    }
}

/// One line of a flow certification report.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FlowRecord {
    pub family: String,
    pub t: [f64; 2],
    pub n: usize,
    pub point_id: usize,
    pub symplectic_residual: f64,
    pub rank_residual: f64,
    pub trace_residual: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Copy, Debug)]
pub struct FlowTolerances {
    pub symplectic: f64,
    pub rank: f64,
    pub trace: f64,
}

impl Default for FlowTolerances {
    fn default() -> Self {
        Self { symplectic: 1e-7, rank: RANK_TOLERANCE, trace: 1e-10 }
    }
}

/// What to certify: a flow family or an arbitrary pair map.
pub enum Certified<'a> {
    Family(FlowFamily),
    Map { name: String, map: &'a (dyn Fn(&MatrixPair) -> Result<MatrixPair> + Sync), step: f64 },
}

/// Runs the symplectic, rank and trace checks at every point.
pub fn certify_symplectic(what: &Certified<'_>, pts: &[CMPoint], tol: FlowTolerances) -> Vec<FlowRecord> {
    pts.par_iter()
        .enumerate()
        .map(|(i, pt)| {
            let (name, t, out, sym) = match what {
                Certified::Family(fam) => {
                    let out = apply_family(*fam, pt).map(|p| p.pair);
                    let sym = symplectic_pullback_residual(
                        |p: &MatrixPair| Ok(family_map(*fam, p)),
                        &pt.pair,
                        jacobian_step(*fam, &pt.pair),
                    );
                    (fam.id.name().to_string(), [fam.t.re, fam.t.im], out, sym)
                }
                Certified::Map { name, map, step } => {
                    let out = map(&pt.pair);
                    let sym = symplectic_pullback_residual(|p: &MatrixPair| map(p), &pt.pair, *step);
                    (name.clone(), [0.0, 0.0], out, sym)
                }
            };
            let mut record = FlowRecord {
                family: name,
                t,
                n: pt.n(),
                point_id: i,
                symplectic_residual: f64::NAN,
                rank_residual: f64::NAN,
                trace_residual: f64::NAN,
                passed: false,
                error: None,
            };
            match (out, sym) {
                (Ok(pair), Ok(sym)) => {
                    record.symplectic_residual = sym;
                    record.rank_residual = rank_residual(&pair, DEFAULT_LAMBDA);
                    record.trace_residual = if pt.traceless { trace_residual(&pair) } else { 0.0 };
                    record.passed =
                        sym < tol.symplectic && record.rank_residual < tol.rank && record.trace_residual < tol.trace;
                }
                (Err(e), _) | (_, Err(e)) => record.error = Some(e.to_string()),
            }
            record
        })
        .collect()
}
