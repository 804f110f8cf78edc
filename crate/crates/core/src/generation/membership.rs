//! Numeric certificates that a function lies in the span of a closure.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::closure::LieClosureBasis;
use crate::error::{Result, TraceError};
use crate::numeric::cm::{child_seed, sample_cm_with, CMPoint, SamplerConfig};
use crate::numeric::eval::{CompiledPoly, Evaluator};
use crate::numeric::linalg::{svd, CMatrix, CVector};
use crate::poly::{Mode, TracePolynomial};

pub const CERTIFICATE_TOLERANCE: f64 = 1e-8;
pub const SOUNDNESS_TOLERANCE: f64 = 1e-7;
pub const MAX_CONDITION: f64 = 1e12;
/// Soundness points per fitting point.
pub const SOUNDNESS_FACTOR: usize = 10;
/// Combination terms below this fraction of the largest are round-off.
const COEFFICIENT_FLOOR: f64 = 1e-12;
/// Below this distance the constant column counts as part of the span.
const CONSTANT_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MembershipStatus {
    Certified,
    /// No combination within the closure's caps; says nothing about
    /// membership at larger depth.
    NotFound,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CombinationTerm {
    pub coefficient: [f64; 2],
    pub element: usize,
    pub tree: String,
    pub polynomial: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MembershipCertificate {
    pub target: String,
    pub status: MembershipStatus,
    pub message: String,
    pub n: usize,
    pub depth_cap: usize,
    pub degree_cap: u32,
    pub seed: u64,
    /// Constant term of the fit; Hamiltonians are defined up to constants.
    pub constant: [f64; 2],
    pub combination: Vec<CombinationTerm>,
    pub residual: f64,
    pub soundness_residual: f64,
    pub sample_count: usize,
    pub soundness_count: usize,
    pub condition: f64,
}

impl MembershipCertificate {
    pub fn is_valid(&self) -> bool {
        self.status == MembershipStatus::Certified
    }
}

fn c2(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

/// Closure elements evaluated once at fresh fitting points and at the
/// soundness points, shared by many targets.
pub struct MembershipContext<'a> {
    basis: &'a LieClosureBasis,
    fit_points: Vec<CMPoint>,
    sound_points: Vec<CMPoint>,
    /// Orthonormalized closure columns plus a constant, at the fit points.
    u: CMatrix,
    singular: Vec<f64>,
    vt: CMatrix,
    /// Maps coefficients of `w`'s columns to element coefficients
    /// (last entry the constant).
    to_elements: CMatrix,
    sound_values: CMatrix,
    condition: f64,
    seed: u64,
}

fn sample(n: usize, seed: u64, count: usize) -> Result<Vec<CMPoint>> {
    let cfg = SamplerConfig::fitting();
    (0..count as u64).into_par_iter().map(|i| sample_cm_with(n, true, child_seed(seed, i), &cfg)).collect()
}

fn values_at(polys: &[CompiledPoly], points: &[CMPoint]) -> CMatrix {
    let rows: Vec<Vec<Complex64>> = points
        .par_iter()
        .map(|pt| {
            let mut ev = Evaluator::new(&pt.pair, Mode::Traceless);
            polys.iter().map(|p| ev.eval_compiled(p)).collect()
        })
        .collect();
    CMatrix::from_fn(points.len(), polys.len(), |i, j| rows[i][j])
}

impl<'a> MembershipContext<'a> {
    /// `sample_count` fresh points (default `4 (k + 1)` for `k` elements)
    /// and ten times as many soundness points. Seeds are disjoint from the
    /// closure pool's.
    pub fn new(basis: &'a LieClosureBasis, sample_count: Option<usize>, seed: u64) -> Result<Self> {
        let k = basis.len();
        let m = sample_count.unwrap_or(4 * (k + 1));
        if m < 2 * (k + 1) {
            return Err(TraceError::PoolTooSmall { needed: 2 * (k + 1), cap: m });
        }
        let n = basis.n_value;
        let fit_points = sample(n, child_seed(seed, 0xF17), m)?;
        let sound_points = sample(n, child_seed(seed, 0x50D), SOUNDNESS_FACTOR * m)?;
        let compiled: Vec<CompiledPoly> = basis.elements.iter().map(|e| CompiledPoly::new(&e.poly, n)).collect();

        // element i enters column j of the orthonormal basis with weight t[j][i] / norm_i
        let mut to_elements = CMatrix::zeros(k + 1, k + 1);
        for (j, row) in basis.transform.iter().enumerate() {
            for (i, t) in row.iter().enumerate() {
                to_elements[(i, j)] = t / basis.norms[i];
            }
        }
        to_elements[(k, k)] = Complex64::new(1.0, 0.0);
        let mut w = CMatrix::zeros(m, k + 1);
        let raw = values_at(&compiled, &fit_points);
        w.columns_mut(0, k).copy_from(&(&raw * to_elements.view((0, 0), (k, k))));
        w.column_mut(k).fill(Complex64::new(1.0, 0.0));
        for j in 0..=k {
            let s = w.column(j).norm();
            if s > 0.0 {
                w.column_mut(j).scale_mut(1.0 / s);
                to_elements.column_mut(j).scale_mut(1.0 / s);
            }
        }
        // the constant may already lie in the closure's span on the variety
        let ones = w.column(k).clone_owned();
        let elems = svd(&w.columns(0, k).clone_owned())?;
        let ue = elems.u;
        let mut off = ones.clone();
        for (i, &s) in elems.s.iter().enumerate() {
            if s > 1e-12 {
                let u = ue.column(i);
                off -= u * u.dotc(&ones);
            }
        }
        let off = off.norm();
        if off < CONSTANT_TOLERANCE {
            w = w.columns(0, k).clone_owned();
            to_elements = to_elements.columns(0, k).clone_owned();
        }
        let d = svd(&w)?;
        let singular = d.s;
        let smax = singular.iter().copied().fold(0.0, f64::max);
        let smin = singular.iter().copied().fold(f64::INFINITY, f64::min);
        let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
        let sound_values = values_at(&compiled, &sound_points);
        Ok(Self {
            basis,
            fit_points,
            sound_points,
            u: d.u,
            singular,
            vt: d.vt,
            to_elements,
            sound_values,
            condition,
            seed,
        })
    }

    pub fn condition(&self) -> f64 {
        self.condition
    }

    pub fn check(&self, target: &TracePolynomial) -> Result<MembershipCertificate> {
        let basis = self.basis;
        if target.mode() != Mode::Traceless {
            return Err(TraceError::WrongMode { expected: Mode::Traceless, found: target.mode() });
        }
        if target.degree().unwrap_or(0) > basis.degree_cap {
            return Err(TraceError::Usage(format!(
                "target degree {} exceeds the closure degree cap {}",
                target.degree().unwrap_or(0),
                basis.degree_cap
            )));
        }
        let n = basis.n_value;
        let t = CompiledPoly::new(target, n);
        let eval_target = |pts: &[CMPoint]| -> (CVector, f64) {
            let rows: Vec<(Complex64, f64)> = pts
                .par_iter()
                .map(|pt| {
                    let mut ev = Evaluator::new(&pt.pair, Mode::Traceless);
                    (ev.eval_compiled(&t), ev.magnitude(&t))
                })
                .collect();
            let mag = rows.iter().map(|r| r.1).fold(0.0, f64::max);
            (CVector::from_iterator(rows.len(), rows.iter().map(|r| r.0)), mag)
        };
        let (b, mag) = eval_target(&self.fit_points);
        let k = basis.len();
        let mut cert = MembershipCertificate {
            target: target.to_string(),
            status: MembershipStatus::NotFound,
            message: String::new(),
            n,
            depth_cap: basis.depth_cap,
            degree_cap: basis.degree_cap,
            seed: self.seed,
            constant: [0.0, 0.0],
            combination: Vec::new(),
            residual: 0.0,
            soundness_residual: 0.0,
            sample_count: self.fit_points.len(),
            soundness_count: self.sound_points.len(),
            condition: self.condition,
        };
        let bmax = b.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if bmax <= 1e-12 * mag {
            cert.status = MembershipStatus::Certified;
            cert.message = "target vanishes on the variety".into();
            cert.residual = bmax / mag.max(f64::MIN_POSITIVE);
            return Ok(cert);
        }
        // y = V Σ⁻¹ Uᴴ b, then back to element coefficients
        let mut y = CVector::zeros(self.vt.ncols());
        for (i, &s) in self.singular.iter().enumerate() {
            let c = self.u.column(i).dotc(&b) / Complex64::new(s, 0.0);
            y += self.vt.row(i).adjoint() * c;
        }
        let coeffs = &self.to_elements * &y;
        let fit_res = {
            let u = &self.u * (self.u.adjoint() * &b);
            (&b - u).iter().map(|z| z.norm()).fold(0.0, f64::max) / bmax
        };
        let (bs, _) = eval_target(&self.sound_points);
        let pred = &self.sound_values * coeffs.rows(0, k) + CVector::repeat(bs.len(), coeffs[k]);
        let bs_max = bs.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let sound_res = (&bs - pred).iter().map(|z| z.norm()).fold(0.0, f64::max) / bs_max;
        cert.residual = fit_res;
        cert.soundness_residual = sound_res;
        cert.constant = c2(coeffs[k]);
        let cmax = coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max);
        cert.combination = (0..k)
            .filter(|&i| coeffs[i].norm() > COEFFICIENT_FLOOR * cmax)
            .map(|i| CombinationTerm {
                coefficient: c2(coeffs[i]),
                element: i,
                tree: basis.elements[i].tree.render(&basis.generators),
                polynomial: basis.elements[i].poly.to_string(),
            })
            .collect();
        let found = format!("not found at depth {} (degree cap {})", basis.depth_cap, basis.degree_cap);
        (cert.status, cert.message) = if self.condition > MAX_CONDITION {
            (
                MembershipStatus::Inconclusive,
                format!("value matrix condition {:.3e} exceeds {MAX_CONDITION:e}", self.condition),
            )
        } else if fit_res >= CERTIFICATE_TOLERANCE {
            (MembershipStatus::NotFound, found)
        } else if sound_res >= SOUNDNESS_TOLERANCE {
            (
                MembershipStatus::Inconclusive,
                format!("fit {fit_res:.3e} does not hold on soundness points ({sound_res:.3e})"),
            )
        } else {
            (MembershipStatus::Certified, "in the span of the closure".into())
        };
        Ok(cert)
    }
}

/// One-off membership check; use [`MembershipContext`] for many targets.
pub fn check_membership(
    target: &TracePolynomial,
    basis: &LieClosureBasis,
    sample_count: Option<usize>,
    seed: u64,
) -> Result<MembershipCertificate> {
    MembershipContext::new(basis, sample_count, seed)?.check(target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generation::closure::{build_closure, standard_generators, ClosureConfig};
    use crate::text::parse_polynomial as p;

    fn basis(n: usize, depth: usize, degree: u32) -> LieClosureBasis {
        let cfg = ClosureConfig { depth_cap: depth, degree_cap: degree, ..ClosureConfig::new(n) };
        build_closure(&standard_generators(), &cfg).unwrap()
    }

    #[test]
    fn generator_is_a_trivial_member() {
        let b = basis(2, 3, 4);
        let c = check_membership(&p("tr(A^2)").unwrap(), &b, None, 1).unwrap();
        assert!(c.is_valid());
        assert!(c.residual < 1e-14, "{}", c.residual);
    }

    #[test]
    fn product_member_at_n2() {
        let b = basis(2, 8, 6);
        let c = check_membership(&p("tr(A B)*tr(A^2)").unwrap(), &b, None, 2).unwrap();
        assert!(c.is_valid(), "{c:?}");
    }

    #[test]
    fn shallow_closure_reports_not_found() {
        // depth 0 holds only the generators
        let b = basis(3, 0, 6);
        let c = check_membership(&p("tr(A^2 B^2)").unwrap(), &b, None, 3).unwrap();
        assert_eq!(c.status, MembershipStatus::NotFound);
        assert!(c.message.starts_with("not found at depth 0"));
    }

    #[test]
    fn closure_reaches_cube_of_b_at_n2() {
        let b = basis(2, 6, 6);
        assert!(check_membership(&p("tr(B^3)").unwrap(), &b, None, 4).unwrap().is_valid());
    }

    #[test]
    fn square_of_trace_a2_at_depth_two() {
        let b = basis(3, 2, 4);
        let c = check_membership(&p("tr(A^2) tr(A^2)").unwrap(), &b, None, 5).unwrap();
        assert!(c.is_valid(), "{c:?}");
    }

    #[test]
    fn mixed_word_at_n3() {
        let b = basis(3, 8, 8);
        let c = check_membership(&p("tr(A^2 B^2)").unwrap(), &b, None, 6).unwrap();
        assert!(c.is_valid() && c.residual < 1e-8, "{c:?}");
    }

    #[test]
    fn target_above_degree_cap() {
        let b = basis(2, 2, 4);
        assert!(check_membership(&p("tr(A^5)").unwrap(), &b, None, 1).is_err());
    }
}
