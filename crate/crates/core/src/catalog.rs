//! Pinned bracket identities, stored as data and verified exactly or up to
//! lower-degree functions on the variety.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::trace_monomials;
use crate::error::{Result, TraceError};
use crate::numeric::cm::{sample_many, CMPoint, SamplerConfig};
use crate::numeric::fit::fit_on_points;
use crate::poisson::bracket;
use crate::poly::{Mode, TracePolynomial};
use crate::text::{parse_polynomial, parse_polynomial_in};

/// Residual bound for the variety fit of a leading-mod-degree identity.
pub const FIT_TOLERANCE: f64 = 1e-8;

const DEFAULT_CATALOG: &str = include_str!("../data/catalog.json");

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EqualityKind {
    Exact,
    /// Equal up to a function of degree `<= d` on the traceless variety.
    LeadingModDegree(i64),
}

impl EqualityKind {
    pub fn name(self) -> &'static str {
        match self {
            EqualityKind::Exact => "exact",
            EqualityKind::LeadingModDegree(_) => "leading",
        }
    }

    pub fn degree_bound(self) -> Option<i64> {
        match self {
            EqualityKind::Exact => None,
            EqualityKind::LeadingModDegree(d) => Some(d),
        }
    }

    pub(crate) fn from_parts(kind: &str, degree_bound: Option<i64>, id: &str) -> Result<Self> {
        match (kind, degree_bound) {
            ("exact", _) => Ok(EqualityKind::Exact),
            ("leading", Some(d)) => Ok(EqualityKind::LeadingModDegree(d)),
            ("leading", None) => Err(TraceError::Catalog(format!("{id}: leading entry without degree_bound"))),
            (other, _) => Err(TraceError::Catalog(format!("{id}: unknown kind {other:?}"))),
        }
    }
}

/// One record of a catalog file. Polynomials use the text grammar; with
/// `mode: "plain"` traceless input is expanded by `to_plain` first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatalogRecord {
    pub id: String,
    pub lhs: String,
    pub rhs: String,
    pub expected: String,
    pub kind: String,
    #[serde(default)]
    pub degree_bound: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct CatalogFile {
    entries: Vec<CatalogRecord>,
}

#[derive(Clone, Debug)]
pub struct BracketCatalogEntry {
    pub id: String,
    pub lhs: TracePolynomial,
    pub rhs: TracePolynomial,
    pub expected: TracePolynomial,
    pub kind: EqualityKind,
}

pub(crate) fn parse_in_mode(src: &str, mode: Mode, id: &str) -> Result<TracePolynomial> {
    let p = match mode {
        Mode::Traceless => parse_polynomial_in(src, Mode::Traceless),
        Mode::Plain => parse_polynomial(src).and_then(|p| match p.mode() {
            Mode::Plain => Ok(p),
            Mode::Traceless => p.to_plain(),
        }),
    };
    p.map_err(|e| TraceError::Catalog(format!("{id}: {e}")))
}

impl BracketCatalogEntry {
    pub fn from_record(r: &CatalogRecord) -> Result<Self> {
        let mode = r.mode.unwrap_or(Mode::Traceless);
        let kind = EqualityKind::from_parts(&r.kind, r.degree_bound, &r.id)?;
        if mode == Mode::Plain && kind != EqualityKind::Exact {
            return Err(TraceError::Catalog(format!("{}: leading entries must be traceless", r.id)));
        }
        Ok(Self {
            id: r.id.clone(),
            lhs: parse_in_mode(&r.lhs, mode, &r.id)?,
            rhs: parse_in_mode(&r.rhs, mode, &r.id)?,
            expected: parse_in_mode(&r.expected, mode, &r.id)?,
            kind,
        })
    }

    pub fn to_record(&self) -> CatalogRecord {
        CatalogRecord {
            id: self.id.clone(),
            lhs: self.lhs.to_string(),
            rhs: self.rhs.to_string(),
            expected: self.expected.to_string(),
            kind: self.kind.name().into(),
            degree_bound: self.kind.degree_bound(),
            mode: Some(self.lhs.mode()),
        }
    }

    pub fn mode(&self) -> Mode {
        self.lhs.mode()
    }
}

pub fn parse_catalog(json: &str) -> Result<Vec<BracketCatalogEntry>> {
    let file: CatalogFile = serde_json::from_str(json)?;
    file.entries.iter().map(BracketCatalogEntry::from_record).collect()
}

pub fn load_catalog(path: &Path) -> Result<Vec<BracketCatalogEntry>> {
    parse_catalog(&std::fs::read_to_string(path)?)
}

pub fn default_catalog() -> Vec<BracketCatalogEntry> {
    parse_catalog(DEFAULT_CATALOG).expect("shipped catalog parses")
}

/// `"default"` selects the shipped catalog, anything else is a path.
pub fn resolve_catalog(source: &str) -> Result<Vec<BracketCatalogEntry>> {
    if source == "default" {
        Ok(default_catalog())
    } else {
        load_catalog(Path::new(source))
    }
}

/// Result of comparing `actual` and `expected` modulo degree `d`.
#[derive(Clone, Debug)]
pub struct LeadingCheck {
    /// Collapsed difference above degree `d`; zero when the leading
    /// terms agree.
    pub leading_difference: TracePolynomial,
    /// `(n, residual)` for every point set.
    pub residuals: Vec<(usize, f64)>,
}

impl LeadingCheck {
    pub fn passed(&self, tol: f64) -> bool {
        self.leading_difference.is_zero() && self.residuals.iter().all(|&(_, r)| r < tol)
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().map(|r| r.1).fold(0.0, f64::max)
    }
}

/// Checks `actual ~ expected mod d`: the difference, with every word
/// collapsed to `A^i B^j`, has no terms above degree `d`, and the full
/// difference fits the traceless monomials of degree `<= d` on each point
/// set.
pub fn check_leading(
    actual: &TracePolynomial,
    expected: &TracePolynomial,
    d: i64,
    point_sets: &[Vec<CMPoint>],
) -> Result<LeadingCheck> {
    let diff = actual.checked_sub(expected)?;
    let leading_difference = diff.collapsed().truncate_below_degree(d);
    let basis = trace_monomials(Mode::Traceless, d);
    let residuals = point_sets
        .iter()
        .map(|pts| {
            let n = pts.first().map_or(0, CMPoint::n);
            fit_on_points(&diff, &[actual, expected], &basis, pts).map(|f| (n, f.residual))
        })
        .collect::<Result<_>>()?;
    Ok(LeadingCheck { leading_difference, residuals })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntryReport {
    pub id: String,
    pub kind: String,
    pub degree_bound: Option<i64>,
    pub passed: bool,
    pub bracket: String,
    /// `bracket - expected`; for leading entries only the collapsed part
    /// above the degree bound.
    pub difference: String,
    pub residual: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatalogReport {
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub passed: usize,
    pub failed: usize,
    pub entries: Vec<EntryReport>,
}

impl CatalogReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

/// Points shared by all leading-mod-degree checks of one run.
pub fn fitting_points(n_value: usize, sample_count: usize, seed: u64) -> Result<Vec<CMPoint>> {
    sample_many(n_value, true, seed, sample_count, &SamplerConfig::fitting())
}

pub fn verify_entry(entry: &BracketCatalogEntry, point_sets: &[Vec<CMPoint>], tol: f64) -> Result<EntryReport> {
    let actual = bracket(&entry.lhs, &entry.rhs)?;
    let (passed, difference, residual) = match entry.kind {
        EqualityKind::Exact => {
            let diff = actual.checked_sub(&entry.expected)?;
            (diff.is_zero(), diff.to_string(), None)
        }
        EqualityKind::LeadingModDegree(d) => {
            let check = check_leading(&actual, &entry.expected, d, point_sets)?;
            (check.passed(tol), check.leading_difference.to_string(), Some(check.max_residual()))
        }
    };
    Ok(EntryReport {
        id: entry.id.clone(),
        kind: entry.kind.name().into(),
        degree_bound: entry.kind.degree_bound(),
        passed,
        bracket: actual.to_string(),
        difference,
        residual,
    })
}

/// Verifies every entry; leading entries are fitted on `sample_count`
/// traceless points of size `n_value`.
pub fn verify_catalog(
    entries: &[BracketCatalogEntry],
    n_value: usize,
    sample_count: usize,
    seed: u64,
) -> Result<CatalogReport> {
    verify_catalog_with(entries, n_value, sample_count, seed, FIT_TOLERANCE)
}

pub fn verify_catalog_with(
    entries: &[BracketCatalogEntry],
    n_value: usize,
    sample_count: usize,
    seed: u64,
    tol: f64,
) -> Result<CatalogReport> {
    if n_value == 0 || sample_count == 0 {
        return Err(TraceError::Usage("n and samples must be positive".into()));
    }
    let needs_points = entries.iter().any(|e| e.kind != EqualityKind::Exact);
    let points = if needs_points { vec![fitting_points(n_value, sample_count, seed)?] } else { vec![] };
    let reports: Vec<EntryReport> = entries.par_iter().map(|e| verify_entry(e, &points, tol)).collect::<Result<_>>()?;
    let passed = reports.iter().filter(|r| r.passed).count();
    Ok(CatalogReport {
        n: n_value,
        samples: sample_count,
        seed,
        passed,
        failed: reports.len() - passed,
        entries: reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_catalog_loads() {
        let c = default_catalog();
        assert!(c.iter().any(|e| e.id == "bracketformular/j=2,k=1,p=1,q=2"));
        assert!(c.iter().filter(|e| e.mode() == Mode::Plain).count() > 0);
    }

    #[test]
    fn record_round_trip() {
        let c = default_catalog();
        for e in c.iter().take(40) {
            let back = BracketCatalogEntry::from_record(&e.to_record()).unwrap();
            assert_eq!(back.expected, e.expected);
            assert_eq!(back.kind, e.kind);
        }
    }

    #[test]
    fn leading_example() {
        let c = default_catalog();
        let e = c.iter().find(|e| e.id == "bracketformular/j=2,k=1,p=1,q=2").unwrap();
        let pts = vec![fitting_points(3, 100, 11).unwrap()];
        let r = verify_entry(e, &pts, FIT_TOLERANCE).unwrap();
        assert!(r.passed, "{r:?}");
        assert!(e.expected.to_string().starts_with("3*tr(A^2 B^2)"));
    }

    #[test]
    fn wrong_identity_fails_with_difference() {
        let rec = CatalogRecord {
            id: "bad".into(),
            lhs: "tr(A^2)".into(),
            rhs: "tr(B^2)".into(),
            expected: "3*tr(A B)".into(),
            kind: "exact".into(),
            degree_bound: None,
            mode: None,
        };
        let e = BracketCatalogEntry::from_record(&rec).unwrap();
        let r = verify_entry(&e, &[], FIT_TOLERANCE).unwrap();
        assert!(!r.passed);
        assert_eq!(r.difference, "tr(A B)");
    }

    #[test]
    fn wrong_leading_coefficient_fails() {
        let rec = CatalogRecord {
            id: "bad".into(),
            lhs: "tr(A^2 B)".into(),
            rhs: "tr(A B^2)".into(),
            expected: "2*tr(A^2 B^2) - 4*n^-1*tr(A B)*tr(A B) + n^-1*tr(A^2)*tr(B^2)".into(),
            kind: "leading".into(),
            degree_bound: Some(0),
            mode: None,
        };
        let e = BracketCatalogEntry::from_record(&rec).unwrap();
        let pts = vec![fitting_points(2, 100, 5).unwrap()];
        let r = verify_entry(&e, &pts, FIT_TOLERANCE).unwrap();
        assert!(!r.passed);
        assert!(r.residual.unwrap() > 1e-3);
    }
}
