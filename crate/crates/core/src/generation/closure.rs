//! Breadth-first Lie closure of a generator set on the traceless variety.

use std::collections::HashSet;
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TraceError};
use crate::numeric::cm::{child_seed, sample_cm_with, CMPoint, SamplerConfig};
use crate::numeric::eval::{CompiledPoly, Evaluator};
use crate::numeric::linalg::CVector;
use crate::poisson::bracket_traceless;
use crate::poly::{Mode, TracePolynomial};
use crate::reduce::cayley_hamilton_reduce;

/// Relative singular-value threshold of the span test.
pub const SPAN_TOLERANCE: f64 = 1e-10;

/// How an element arose: a generator index or a bracket of two trees.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BracketTree {
    Generator(usize),
    Bracket(Box<BracketTree>, Box<BracketTree>),
}

impl BracketTree {
    pub fn bracket(left: BracketTree, right: BracketTree) -> Self {
        BracketTree::Bracket(Box::new(left), Box::new(right))
    }

    /// Number of nested brackets; generators have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            BracketTree::Generator(_) => 0,
            BracketTree::Bracket(l, r) => 1 + l.depth() + r.depth(),
        }
    }

    /// Renders with generator polynomials in place of indices.
    pub fn render(&self, generators: &[TracePolynomial]) -> String {
        match self {
            BracketTree::Generator(i) => generators.get(*i).map_or_else(|| format!("g{i}"), |g| g.to_string()),
            BracketTree::Bracket(l, r) => format!("{{{}, {}}}", l.render(generators), r.render(generators)),
        }
    }
}

impl fmt::Display for BracketTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BracketTree::Generator(i) => write!(f, "g{i}"),
            BracketTree::Bracket(l, r) => write!(f, "{{{l}, {r}}}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ClosureElement {
    pub poly: TracePolynomial,
    pub tree: BracketTree,
}

#[derive(Clone, Debug)]
pub struct ClosureConfig {
    pub depth_cap: usize,
    pub degree_cap: u32,
    pub n_value: usize,
    pub seed: u64,
    /// Initial pool size; the pool doubles to stay at four times the basis.
    pub pool_min: usize,
    pub pool_cap: usize,
    pub span_tolerance: f64,
    pub sampler: SamplerConfig,
}

impl ClosureConfig {
    /// Depth cap 8 for `n = 2`, 10 otherwise; degree cap 8.
    pub fn new(n_value: usize) -> Self {
        Self {
            depth_cap: default_depth(n_value),
            degree_cap: 8,
            n_value,
            seed: 0,
            pool_min: 64,
            pool_cap: 1 << 14,
            span_tolerance: SPAN_TOLERANCE,
            sampler: SamplerConfig::fitting(),
        }
    }
}

pub fn default_depth(n_value: usize) -> usize {
    if n_value <= 2 {
        8
    } else {
        10
    }
}

/// The four generators `tr A², tr B², tr A³, (tr AB)²`.
pub fn standard_generators() -> Vec<TracePolynomial> {
    let ab = TracePolynomial::trace_ab(Mode::Traceless, 1, 1);
    vec![
        TracePolynomial::trace_ab(Mode::Traceless, 2, 0),
        TracePolynomial::trace_ab(Mode::Traceless, 0, 2),
        TracePolynomial::trace_ab(Mode::Traceless, 3, 0),
        &ab * &ab,
    ]
}

#[derive(Clone, Debug)]
pub struct LieClosureBasis {
    pub generators: Vec<TracePolynomial>,
    pub elements: Vec<ClosureElement>,
    pub depth_cap: usize,
    pub degree_cap: u32,
    pub n_value: usize,
    pub seed: u64,
    /// Span dimension after each depth, starting at depth 0 (generators).
    pub levels: Vec<usize>,
    pub pool_size: usize,
    /// Norm of each element's values on the pool.
    pub(crate) norms: Vec<f64>,
    /// Row `j`: coefficients of the normalized elements `0..=j` in the
    /// `j`-th orthonormal pool vector.
    pub(crate) transform: Vec<Vec<Complex64>>,
}

impl LieClosureBasis {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Rebuilds a tree's polynomial by bracketing and reducing.
    pub fn evaluate_tree(&self, tree: &BracketTree) -> Result<TracePolynomial> {
        match tree {
            BracketTree::Generator(i) => {
                let g = self
                    .generators
                    .get(*i)
                    .ok_or_else(|| TraceError::Unknown { kind: "generator", name: i.to_string() })?;
                cayley_hamilton_reduce(g, self.n_value as u32)
            }
            BracketTree::Bracket(l, r) => {
                let b = bracket_traceless(&self.evaluate_tree(l)?, &self.evaluate_tree(r)?)?;
                cayley_hamilton_reduce(&b, self.n_value as u32)
            }
        }
    }

    /// Every element equals its rebuilt tree.
    pub fn verify_trees(&self) -> Result<bool> {
        for e in &self.elements {
            if self.evaluate_tree(&e.tree)? != e.poly {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

struct Pool {
    evals: Vec<Evaluator>,
    n: usize,
    seed: u64,
    sampler: SamplerConfig,
}

impl Pool {
    fn grow_to(&mut self, size: usize) -> Result<()> {
        let start = self.evals.len();
        if size <= start {
            return Ok(());
        }
        let pts: Vec<CMPoint> = (start as u64..size as u64)
            .into_par_iter()
            .map(|i| sample_cm_with(self.n, true, child_seed(self.seed, i), &self.sampler))
            .collect::<Result<_>>()?;
        self.evals.extend(pts.iter().map(|p| Evaluator::new(&p.pair, Mode::Traceless)));
        Ok(())
    }

    /// Values and term magnitudes of every polynomial at points `from..`.
    fn evaluate(&mut self, polys: &[CompiledPoly], from: usize) -> Vec<(CVector, f64)> {
        let rows: Vec<Vec<(Complex64, f64)>> = self.evals[from..]
            .par_iter_mut()
            .map(|ev| polys.iter().map(|p| (ev.eval_compiled(p), ev.magnitude(p))).collect())
            .collect();
        (0..polys.len())
            .map(|j| {
                let v = CVector::from_iterator(rows.len(), rows.iter().map(|r| r[j].0));
                let m = rows.iter().map(|r| r[j].1 * r[j].1).sum::<f64>().sqrt();
                (v, m)
            })
            .collect()
    }
}

/// Incremental Gram-Schmidt on normalized value columns.
#[derive(Default)]
struct Span {
    q: Vec<CVector>,
    t: Vec<Vec<Complex64>>,
    norms: Vec<f64>,
}

enum Verdict {
    Zero,
    Dependent,
    New,
}

impl Span {
    fn try_add(&mut self, values: &CVector, magnitude: f64, tol: f64) -> Verdict {
        let norm = values.norm();
        if norm <= 1e-10 * magnitude || norm == 0.0 {
            return Verdict::Zero;
        }
        let k = self.q.len();
        let mut w = values / Complex64::new(norm, 0.0);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); k + 1];
        coeffs[k] = Complex64::new(1.0, 0.0);
        for _ in 0..2 {
            let h: Vec<Complex64> = self.q.par_iter().map(|q| q.dotc(&w)).collect();
            for (j, hj) in h.iter().enumerate() {
                w.axpy(-*hj, &self.q[j], Complex64::new(1.0, 0.0));
                for (i, tij) in self.t[j].iter().enumerate() {
                    coeffs[i] -= hj * tij;
                }
            }
        }
        let r = w.norm();
        let noise = 1e-13 * magnitude / norm;
        if r <= tol.max(noise) {
            return Verdict::Dependent;
        }
        let inv = Complex64::new(1.0 / r, 0.0);
        self.q.push(w * inv);
        self.t.push(coeffs.into_iter().map(|c| c * inv).collect());
        self.norms.push(norm);
        Verdict::New
    }
}

fn normalized_key(p: &TracePolynomial) -> String {
    let first = p.terms().next().map(|(_, c)| c.coefficient_of(0));
    match first {
        Some(c) if c != num_rational::BigRational::from_integer(0.into()) => {
            p.scale_rational(&(num_rational::BigRational::from_integer(1.into()) / c)).to_string()
        }
        _ => p.to_string(),
    }
}

/// Nested brackets `{g, e}` of generators with the previous level, each
/// reduced by Cayley–Hamilton at `n_value`. Brackets are homogeneous and
/// never lower the degree, so elements above `degree_cap` are dropped.
pub fn build_closure(generators: &[TracePolynomial], cfg: &ClosureConfig) -> Result<LieClosureBasis> {
    if let Some(g) = generators.iter().find(|g| g.mode() != Mode::Traceless) {
        return Err(TraceError::WrongMode { expected: Mode::Traceless, found: g.mode() });
    }
    if cfg.degree_cap == 0 || cfg.n_value == 0 {
        return Err(TraceError::Usage("degree and n must be positive".into()));
    }
    let nv = cfg.n_value as u32;
    let reduced: Vec<TracePolynomial> =
        generators.iter().map(|g| cayley_hamilton_reduce(g, nv)).collect::<Result<_>>()?;
    let mut pool = Pool { evals: Vec::new(), n: cfg.n_value, seed: cfg.seed, sampler: cfg.sampler.clone() };
    pool.grow_to(cfg.pool_min.max(8).min(cfg.pool_cap))?;
    let mut span = Span::default();
    let mut elements: Vec<ClosureElement> = Vec::new();
    let mut seen: HashSet<String> = HashSet::new();
    let mut levels = Vec::new();

    let mut candidates: Vec<(TracePolynomial, BracketTree)> =
        reduced.iter().enumerate().map(|(i, g)| (g.clone(), BracketTree::Generator(i))).collect();
    let mut frontier_start = 0;
    for depth in 0..=cfg.depth_cap {
        if depth > 0 {
            let pairs: Vec<(usize, &ClosureElement)> =
                elements[frontier_start..].iter().flat_map(|e| (0..reduced.len()).map(move |g| (g, e))).collect();
            candidates = pairs
                .par_iter()
                .map(|(g, e)| {
                    let b = bracket_traceless(&reduced[*g], &e.poly)?;
                    let p = cayley_hamilton_reduce(&b, nv)?;
                    Ok((p, BracketTree::bracket(BracketTree::Generator(*g), e.tree.clone())))
                })
                .collect::<Result<_>>()?;
        }
        candidates.retain(|(p, _)| !p.is_zero() && p.degree().is_some_and(|d| d <= cfg.degree_cap));
        candidates.retain(|(p, _)| seen.insert(normalized_key(p)));
        candidates.sort_by_key(|(p, _)| p.degree());
        let before = elements.len();
        add_candidates(&mut pool, &mut span, &mut elements, std::mem::take(&mut candidates), cfg)?;
        levels.push(elements.len());
        frontier_start = before;
        if elements.len() == before {
            levels.resize(cfg.depth_cap + 1, elements.len());
            break;
        }
    }
    Ok(LieClosureBasis {
        generators: generators.to_vec(),
        elements,
        depth_cap: cfg.depth_cap,
        degree_cap: cfg.degree_cap,
        n_value: cfg.n_value,
        seed: cfg.seed,
        levels,
        pool_size: pool.evals.len(),
        norms: span.norms,
        transform: span.t,
    })
}

fn add_candidates(
    pool: &mut Pool,
    span: &mut Span,
    elements: &mut Vec<ClosureElement>,
    candidates: Vec<(TracePolynomial, BracketTree)>,
    cfg: &ClosureConfig,
) -> Result<()> {
    let compiled: Vec<CompiledPoly> = candidates.iter().map(|(p, _)| CompiledPoly::new(p, cfg.n_value)).collect();
    let mut start = 0;
    while start < candidates.len() {
        let values = pool.evaluate(&compiled[start..], 0);
        let mut grown = false;
        for (offset, (v, m)) in values.iter().enumerate() {
            let needed = 4 * (span.q.len() + 1);
            if needed > pool.evals.len() {
                let target = (2 * pool.evals.len()).max(needed);
                if target > cfg.pool_cap {
                    return Err(TraceError::PoolTooSmall { needed, cap: cfg.pool_cap });
                }
                regrow(pool, span, elements, target, cfg)?;
                start += offset;
                grown = true;
                break;
            }
            if let Verdict::New = span.try_add(v, *m, cfg.span_tolerance) {
                let (p, t) = &candidates[start + offset];
                elements.push(ClosureElement { poly: p.clone(), tree: t.clone() });
            }
        }
        if !grown {
            break;
        }
    }
    Ok(())
}

/// Enlarges the pool and redoes the orthogonalization of the kept
/// elements on it.
fn regrow(
    pool: &mut Pool,
    span: &mut Span,
    elements: &[ClosureElement],
    size: usize,
    cfg: &ClosureConfig,
) -> Result<()> {
    pool.grow_to(size)?;
    let compiled: Vec<CompiledPoly> = elements.iter().map(|e| CompiledPoly::new(&e.poly, cfg.n_value)).collect();
    let values = pool.evaluate(&compiled, 0);
    *span = Span::default();
    for (v, m) in &values {
        if !matches!(span.try_add(v, *m, cfg.span_tolerance), Verdict::New) {
            return Err(TraceError::Numeric("kept element became dependent on a larger pool".into()));
        }
    }
    Ok(())
}
