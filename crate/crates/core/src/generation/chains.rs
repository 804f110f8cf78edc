//! Replays of the bracket sequences used in the generation proofs.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::catalog::{check_leading, fitting_points, parse_in_mode, EqualityKind, FIT_TOLERANCE};
use crate::error::{Result, TraceError};
use crate::numeric::cm::{child_seed, CMPoint};
use crate::poisson::bracket_traceless;
use crate::poly::{Mode, TracePolynomial};

const DEFAULT_CHAINS: &str = include_str!("../../data/chains.json");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainRecord {
    pub lemma_id: String,
    pub step: u32,
    pub lhs: String,
    pub rhs: String,
    pub expected: String,
    pub kind: String,
    #[serde(default)]
    pub degree_bound: Option<i64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct ChainFile {
    steps: Vec<ChainRecord>,
}

#[derive(Clone, Debug)]
pub struct ChainStep {
    pub lemma_id: String,
    pub step: u32,
    pub lhs: TracePolynomial,
    pub rhs: TracePolynomial,
    pub expected: TracePolynomial,
    pub kind: EqualityKind,
}

impl ChainStep {
    pub fn from_record(r: &ChainRecord) -> Result<Self> {
        let id = format!("{}#{}", r.lemma_id, r.step);
        Ok(Self {
            lemma_id: r.lemma_id.clone(),
            step: r.step,
            lhs: parse_in_mode(&r.lhs, Mode::Traceless, &id)?,
            rhs: parse_in_mode(&r.rhs, Mode::Traceless, &id)?,
            expected: parse_in_mode(&r.expected, Mode::Traceless, &id)?,
            kind: EqualityKind::from_parts(&r.kind, r.degree_bound, &id)?,
        })
    }
}

pub fn parse_chains(json: &str) -> Result<Vec<ChainStep>> {
    let file: ChainFile = serde_json::from_str(json)?;
    file.steps.iter().map(ChainStep::from_record).collect()
}

pub fn load_chains(path: &Path) -> Result<Vec<ChainStep>> {
    parse_chains(&std::fs::read_to_string(path)?)
}

pub fn default_chains() -> Vec<ChainStep> {
    parse_chains(DEFAULT_CHAINS).expect("shipped chains parse")
}

/// Lemma ids in order of first appearance.
pub fn lemma_ids(steps: &[ChainStep]) -> Vec<String> {
    let mut ids: Vec<String> = Vec::new();
    for s in steps {
        if !ids.contains(&s.lemma_id) {
            ids.push(s.lemma_id.clone());
        }
    }
    ids
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    pub step: u32,
    pub lhs: String,
    pub rhs: String,
    pub bracket: String,
    pub expected: String,
    pub kind: String,
    pub degree_bound: Option<i64>,
    pub passed: bool,
    pub difference: String,
    pub residual: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub lemma_id: String,
    pub passed: bool,
    /// First failing step; replay stops there.
    pub first_failure: Option<u32>,
    pub steps: Vec<StepReport>,
}

/// Matrix sizes and sample counts for the variety fits of "mod d" steps.
#[derive(Clone, Debug)]
pub struct ReplayOptions {
    pub n_values: Vec<usize>,
    pub samples: usize,
    pub seed: u64,
    pub tolerance: f64,
}

impl Default for ReplayOptions {
    fn default() -> Self {
        Self { n_values: vec![2, 3], samples: 100, seed: 0, tolerance: FIT_TOLERANCE }
    }
}

impl ReplayOptions {
    pub fn point_sets(&self) -> Result<Vec<Vec<CMPoint>>> {
        self.n_values.iter().map(|&n| fitting_points(n, self.samples, child_seed(self.seed, n as u64))).collect()
    }
}

pub fn replay_steps(lemma_id: &str, steps: &[ChainStep], points: &[Vec<CMPoint>], tol: f64) -> Result<ChainReport> {
    let mut selected: Vec<&ChainStep> = steps.iter().filter(|s| s.lemma_id == lemma_id).collect();
    if selected.is_empty() {
        return Err(TraceError::Unknown { kind: "lemma", name: lemma_id.into() });
    }
    selected.sort_by_key(|s| s.step);
    let mut reports = Vec::new();
    let mut first_failure = None;
    for s in selected {
        let actual = bracket_traceless(&s.lhs, &s.rhs)?;
        let (passed, difference, residual) = match s.kind {
            EqualityKind::Exact => {
                let d = actual.checked_sub(&s.expected)?;
                (d.is_zero(), d.to_string(), None)
            }
            EqualityKind::LeadingModDegree(d) => {
                let c = check_leading(&actual, &s.expected, d, points)?;
                (c.passed(tol), c.leading_difference.to_string(), Some(c.max_residual()))
            }
        };
        reports.push(StepReport {
            step: s.step,
            lhs: s.lhs.to_string(),
            rhs: s.rhs.to_string(),
            bracket: actual.to_string(),
            expected: s.expected.to_string(),
            kind: s.kind.name().into(),
            degree_bound: s.kind.degree_bound(),
            passed,
            difference,
            residual,
        });
        if !passed {
            first_failure = Some(s.step);
            break;
        }
    }
    Ok(ChainReport { lemma_id: lemma_id.into(), passed: first_failure.is_none(), first_failure, steps: reports })
}

/// Replays one lemma of the shipped chain catalog.
pub fn replay_lemma_chain(lemma_id: &str) -> Result<ChainReport> {
    replay_lemma_chain_with(lemma_id, &default_chains(), &ReplayOptions::default())
}

pub fn replay_lemma_chain_with(lemma_id: &str, steps: &[ChainStep], opts: &ReplayOptions) -> Result<ChainReport> {
    let needs_points = steps.iter().any(|s| s.lemma_id == lemma_id && s.kind != EqualityKind::Exact);
    let points = if needs_points { opts.point_sets()? } else { Vec::new() };
    replay_steps(lemma_id, steps, &points, opts.tolerance)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_lemmas() {
        let ids = lemma_ids(&default_chains());
        assert_eq!(ids, vec!["trAj&trBk", "squares", "pullingright", "all-p_k=0"]);
    }

    #[test]
    fn trace_b_cubed_chain() {
        let r = replay_lemma_chain("trAj&trBk").unwrap();
        assert!(r.passed, "{:?}", r.steps.last());
        assert_eq!(r.steps[2].bracket, "-48*tr(B^3)");
    }

    #[test]
    fn unknown_lemma() {
        assert!(matches!(replay_lemma_chain("nope"), Err(TraceError::Unknown { .. })));
    }

    #[test]
    fn failing_step_stops_the_replay() {
        let json = r#"{"steps": [
            {"lemma_id": "x", "step": 1, "lhs": "tr(A^2)", "rhs": "tr(B^2)", "expected": "4*tr(A B)", "kind": "exact"},
            {"lemma_id": "x", "step": 2, "lhs": "tr(A^2)", "rhs": "tr(A B)", "expected": "tr(A^2)", "kind": "exact"},
            {"lemma_id": "x", "step": 3, "lhs": "tr(A^2)", "rhs": "tr(A B)", "expected": "2*tr(A^2)", "kind": "exact"}
        ]}"#;
        let steps = parse_chains(json).unwrap();
        let r = replay_steps("x", &steps, &[], FIT_TOLERANCE).unwrap();
        assert_eq!(r.first_failure, Some(2));
        assert_eq!(r.steps.len(), 2);
        assert_eq!(r.steps[1].difference, "tr(A^2)");
    }
}
