//! Exact Poisson algebras of the plane, the cylinder `ℂ × ℂ*` and the torus.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::coeff::format_rational;
use crate::error::{Result, TraceError};

/// Monomial rule `{z^a w^b, z^c w^d} = (ad - bc) z^(a+c-1+δz) w^(b+d-1+δw)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelSpace {
    /// `ℂ²`, `{z, w} = 1`.
    Plane,
    /// `ℂ × ℂ*`, `{z, w} = w`.
    Cylinder,
    /// `ℂ* × ℂ*`, `{z, w} = z w`.
    Torus,
}

impl ModelSpace {
    fn shift(self) -> (i32, i32) {
        match self {
            ModelSpace::Plane => (0, 0),
            ModelSpace::Cylinder => (0, 1),
            ModelSpace::Torus => (1, 1),
        }
    }

    pub fn allows(self, (a, b): (i32, i32)) -> bool {
        match self {
            ModelSpace::Plane => a >= 0 && b >= 0,
            ModelSpace::Cylinder => a >= 0,
            ModelSpace::Torus => true,
        }
    }
}

impl std::str::FromStr for ModelSpace {
    type Err = TraceError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plane" => Ok(ModelSpace::Plane),
            "cylinder" => Ok(ModelSpace::Cylinder),
            "torus" => Ok(ModelSpace::Torus),
            _ => Err(TraceError::Unknown { kind: "model space", name: s.into() }),
        }
    }
}

impl fmt::Display for ModelSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelSpace::Plane => "plane",
            ModelSpace::Cylinder => "cylinder",
            ModelSpace::Torus => "torus",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LaurentPoly2 {
    space: ModelSpace,
    terms: BTreeMap<(i32, i32), BigRational>,
}

impl LaurentPoly2 {
    pub fn zero(space: ModelSpace) -> Self {
        Self { space, terms: BTreeMap::new() }
    }

    pub fn one(space: ModelSpace) -> Self {
        Self::term(space, (0, 0), BigRational::one())
    }

    /// `c z^a w^b`; errors when the exponents are not regular on the space.
    pub fn monomial(space: ModelSpace, a: i32, b: i32, c: BigRational) -> Result<Self> {
        if !space.allows((a, b)) {
            return Err(TraceError::Usage(format!("z^{a} w^{b} is not regular on the {space}")));
        }
        Ok(Self::term(space, (a, b), c))
    }

    fn term(space: ModelSpace, e: (i32, i32), c: BigRational) -> Self {
        let mut p = Self::zero(space);
        p.add_term(e, c);
        p
    }

    pub fn z_pow(space: ModelSpace, a: i32) -> Result<Self> {
        Self::monomial(space, a, 0, BigRational::one())
    }

    pub fn w_pow(space: ModelSpace, b: i32) -> Result<Self> {
        Self::monomial(space, 0, b, BigRational::one())
    }

    pub fn add_term(&mut self, e: (i32, i32), c: BigRational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn space(&self) -> ModelSpace {
        self.space
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(i32, i32), &BigRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, a: i32, b: i32) -> BigRational {
        self.terms.get(&(a, b)).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut out = Self::zero(self.space);
        for (e, v) in &self.terms {
            out.add_term(*e, v * c);
        }
        out
    }

    pub fn without_constant(&self) -> Self {
        let mut out = self.clone();
        out.terms.remove(&(0, 0));
        out
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.space == other.space {
            Ok(())
        } else {
            Err(TraceError::SpaceMismatch)
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.scale(&-BigRational::one()))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = Self::zero(self.space);
        for ((a, b), c) in &self.terms {
            for ((x, y), d) in &other.terms {
                out.add_term((a + x, b + y), c * d);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(self.space), |acc, _| &acc * self)
    }
}

macro_rules! binop {
    ($tr:ident, $f:ident, $m:ident) => {
        impl $tr for &LaurentPoly2 {
            type Output = LaurentPoly2;
            fn $f(self, rhs: &LaurentPoly2) -> LaurentPoly2 {
                self.$m(rhs).expect("same model space")
            }
        }
    };
}
binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl Neg for &LaurentPoly2 {
    type Output = LaurentPoly2;
    fn neg(self) -> LaurentPoly2 {
        self.scale(&-BigRational::one())
    }
}

impl fmt::Display for LaurentPoly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, ((a, b), c)) in self.terms.iter().rev().enumerate() {
            let neg = *c < BigRational::zero();
            let mag = if neg { -c } else { c.clone() };
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let mut parts = Vec::new();
            if !mag.is_one() || (*a == 0 && *b == 0) {
                parts.push(format_rational(&mag));
            }
            for (name, e) in [("z", a), ("w", b)] {
                match e {
                    0 => {}
                    1 => parts.push(name.to_string()),
                    _ => parts.push(format!("{name}^{e}")),
                }
            }
            f.write_str(&parts.join("*"))?;
        }
        Ok(())
    }
}

/// Bilinear extension of the monomial rule of the common space.
pub fn model_bracket(f: &LaurentPoly2, g: &LaurentPoly2) -> Result<LaurentPoly2> {
    f.check(g)?;
    let (dz, dw) = f.space.shift();
    let mut out = LaurentPoly2::zero(f.space);
    for ((a, b), c) in &f.terms {
        for ((x, y), d) in &g.terms {
            let m = i64::from(*a) * i64::from(*y) - i64::from(*b) * i64::from(*x);
            if m != 0 {
                out.add_term((a + x - 1 + dz, b + y - 1 + dw), c * d * BigRational::from_integer(m.into()));
            }
        }
    }
    Ok(out)
}

/// Exponent region `zmin..=zmax × wmin..=wmax`, optionally cut to total
/// degree `<= max_total`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentBox {
    pub z: (i32, i32),
    pub w: (i32, i32),
    pub max_total: Option<i32>,
}

impl ExponentBox {
    pub fn rect(z: (i32, i32), w: (i32, i32)) -> Self {
        Self { z, w, max_total: None }
    }

    /// Plane monomials of degree `<= d`.
    pub fn degree(d: i32) -> Self {
        Self { z: (0, d), w: (0, d), max_total: Some(d) }
    }

    pub fn contains(&self, (a, b): (i32, i32)) -> bool {
        (self.z.0..=self.z.1).contains(&a)
            && (self.w.0..=self.w.1).contains(&b)
            && self.max_total.is_none_or(|t| a + b <= t)
    }

    pub fn exponents(&self) -> Vec<(i32, i32)> {
        (self.z.0..=self.z.1)
            .flat_map(|a| (self.w.0..=self.w.1).map(move |b| (a, b)))
            .filter(|&e| self.contains(e))
            .collect()
    }
}

impl fmt::Display for ExponentBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "z^{}..{} w^{}..{}", self.z.0, self.z.1, self.w.0, self.w.1)?;
        if let Some(t) = self.max_total {
            write!(f, " degree <= {t}")?;
        }
        Ok(())
    }
}

/// The generator sets of the model-space arguments, large enough to
/// reach `target`: `z^j, w^k` with `j, k` up to one past the box on the
/// plane; `z^j` (`j >= 1`), `w^k` (`k != 0`) on the cylinder; and
/// `z^j, w^k` with `|j|, |k| ∈ {1, 2}` on the torus.
pub fn standard_model_generators(space: ModelSpace, target: &ExponentBox) -> Vec<LaurentPoly2> {
    let one = BigRational::one;
    let mut out = Vec::new();
    let mut push = |a: i32, b: i32| {
        out.push(LaurentPoly2::monomial(space, a, b, one()).expect("regular exponent"));
    };
    match space {
        ModelSpace::Plane => {
            let top = target.z.1.max(target.w.1).max(target.max_total.unwrap_or(0)) + 1;
            (1..=top).for_each(|j| push(j, 0));
            (1..=top).for_each(|k| push(0, k));
        }
        ModelSpace::Cylinder => {
            (1..=target.z.1 + 1).for_each(|j| push(j, 0));
            let kmax = target.w.0.abs().max(target.w.1.abs()).max(1);
            (1..=kmax).for_each(|k| {
                push(0, k);
                push(0, -k);
            });
        }
        ModelSpace::Torus => {
            for j in [-2, -1, 1, 2] {
                push(j, 0);
                push(0, j);
            }
        }
    }
    out
}

/// Exact row echelon form keyed by exponent, pivot on the largest key.
#[derive(Default)]
struct Echelon {
    rows: BTreeMap<(i32, i32), BTreeMap<(i32, i32), BigRational>>,
}

impl Echelon {
    fn reduce(&self, v: &BTreeMap<(i32, i32), BigRational>) -> BTreeMap<(i32, i32), BigRational> {
        let mut v = v.clone();
        let mut done: BTreeSet<(i32, i32)> = BTreeSet::new();
        while let Some((&key, c)) = v.iter().rev().find(|(k, _)| !done.contains(*k)) {
            match self.rows.get(&key) {
                Some(row) => {
                    let c = c.clone();
                    for (k, r) in row {
                        let slot = v.entry(*k).or_insert_with(BigRational::zero);
                        *slot -= &c * r;
                        if slot.is_zero() {
                            v.remove(k);
                        }
                    }
                }
                None => {
                    done.insert(key);
                }
            }
        }
        v
    }

    /// Inserts the reduced vector; false when it was already in the span.
    fn insert(&mut self, v: &BTreeMap<(i32, i32), BigRational>) -> bool {
        let r = self.reduce(v);
        let Some((&pivot, lead)) = r.iter().next_back() else {
            return false;
        };
        let inv = BigRational::one() / lead;
        let row: BTreeMap<_, _> = r.iter().map(|(k, c)| (*k, c * &inv)).collect();
        for other in self.rows.values_mut() {
            if let Some(c) = other.get(&pivot).cloned() {
                for (k, r) in &row {
                    let slot = other.entry(*k).or_insert_with(BigRational::zero);
                    *slot -= &c * r;
                    if slot.is_zero() {
                        other.remove(k);
                    }
                }
            }
        }
        self.rows.insert(pivot, row);
        true
    }

    fn len(&self) -> usize {
        self.rows.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelReport {
    pub space: ModelSpace,
    pub target: ExponentBox,
    pub generators: Vec<String>,
    pub depth_cap: usize,
    /// Span dimension modulo constants.
    pub dimension: usize,
    pub targets: usize,
    pub reached: usize,
    pub missing: Vec<String>,
    pub passed: bool,
}

/// Nested brackets of the generators inside the bounding box of the
/// target and the generators, spanned exactly modulo constants; every
/// nonconstant monomial of `target` must lie in the span.
pub fn model_generation(
    space: ModelSpace,
    generators: &[LaurentPoly2],
    target: &ExponentBox,
    depth_cap: usize,
) -> Result<ModelReport> {
    if generators.iter().any(|g| g.space != space) {
        return Err(TraceError::SpaceMismatch);
    }
    let mut window = target.clone();
    window.max_total = None;
    for g in generators {
        for ((a, b), _) in g.terms() {
            window.z = (window.z.0.min(*a), window.z.1.max(*a));
            window.w = (window.w.0.min(*b), window.w.1.max(*b));
        }
    }
    let inside = |p: &LaurentPoly2| p.terms().all(|(e, _)| window.contains(*e));
    let mut span = Echelon::default();
    let mut frontier: Vec<LaurentPoly2> = Vec::new();
    for g in generators {
        let g = g.without_constant();
        if span.insert(&g.terms) {
            frontier.push(g);
        }
    }
    for _ in 1..depth_cap {
        let mut next = Vec::new();
        for e in &frontier {
            for g in generators {
                let b = model_bracket(g, e)?.without_constant();
                if !b.is_zero() && inside(&b) && span.insert(&b.terms) {
                    next.push(b);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    let wanted: Vec<(i32, i32)> = target.exponents().into_iter().filter(|&e| e != (0, 0) && space.allows(e)).collect();
    let missing: Vec<String> = wanted
        .iter()
        .filter(|&&e| {
            let v: BTreeMap<_, _> = [(e, BigRational::one())].into_iter().collect();
            !span.reduce(&v).is_empty()
        })
        .map(|&(a, b)| LaurentPoly2::term(space, (a, b), BigRational::one()).to_string())
        .collect();
    Ok(ModelReport {
        space,
        target: target.clone(),
        generators: generators.iter().map(ToString::to_string).collect(),
        depth_cap,
        dimension: span.len(),
        targets: wanted.len(),
        reached: wanted.len() - missing.len(),
        passed: missing.is_empty(),
        missing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(space: ModelSpace, a: i32, b: i32, c: i64) -> LaurentPoly2 {
        LaurentPoly2::monomial(space, a, b, BigRational::from_integer(c.into())).unwrap()
    }

    #[test]
    fn monomial_rules() {
        let (p, c, t) = (ModelSpace::Plane, ModelSpace::Cylinder, ModelSpace::Torus);
        assert_eq!(model_bracket(&m(p, 2, 0, 1), &m(p, 0, 3, 1)).unwrap(), m(p, 1, 2, 6));
        assert_eq!(model_bracket(&m(t, 2, 0, 1), &m(t, 0, 3, 1)).unwrap(), m(t, 2, 3, 6));
        assert_eq!(model_bracket(&m(c, 1, 0, 1), &m(c, 0, 1, 1)).unwrap(), m(c, 0, 1, 1));
        assert_eq!(model_bracket(&m(c, 3, 0, 1), &m(c, 0, -2, 1)).unwrap(), m(c, 2, -2, -6));
        assert_eq!(model_bracket(&m(p, 1, 0, 1), &m(p, 0, 1, 1)).unwrap(), LaurentPoly2::one(p));
    }

    #[test]
    fn self_bracket_vanishes() {
        let t = ModelSpace::Torus;
        let f = &(&m(t, 2, -1, 3) + &m(t, -1, 4, 5)) + &m(t, 0, 1, -2);
        assert!(model_bracket(&f, &f).unwrap().is_zero());
    }

    #[test]
    fn space_checks() {
        assert!(LaurentPoly2::monomial(ModelSpace::Plane, -1, 0, BigRational::one()).is_err());
        assert!(LaurentPoly2::monomial(ModelSpace::Cylinder, 0, -1, BigRational::one()).is_ok());
        let e = model_bracket(&LaurentPoly2::one(ModelSpace::Plane), &LaurentPoly2::one(ModelSpace::Torus));
        assert!(matches!(e, Err(TraceError::SpaceMismatch)));
    }

    #[test]
    fn display() {
        let t = ModelSpace::Torus;
        assert_eq!((&m(t, 2, -1, 3) - &m(t, 0, 0, 1)).to_string(), "3*z^2*w^-1 - 1");
    }

    #[test]
    fn coverage_and_degenerate_case() {
        let bx = ExponentBox::degree(5);
        let gens = standard_model_generators(ModelSpace::Plane, &bx);
        assert!(model_generation(ModelSpace::Plane, &gens, &bx, 4).unwrap().passed);
        let z = vec![m(ModelSpace::Plane, 1, 0, 1)];
        let r = model_generation(ModelSpace::Plane, &z, &bx, 4).unwrap();
        assert!(!r.passed);
        assert_eq!(r.reached, 1);
        assert!(r.missing.contains(&"w".to_string()));
    }
}
