//! Functions on a product of two Poisson spaces, with the bracket of the
//! product structure: factors bracket by their own rule and commute across.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;

use super::model::{model_bracket, LaurentPoly2};
use crate::coeff::CoefficientQn;
use crate::error::{Result, TraceError};
use crate::poisson::bracket;
use crate::poly::{MonomialKey, TracePolynomial};

/// A Poisson algebra with a monomial basis over the coefficients `ℚ[n^±]`.
pub trait Factor: Clone + PartialEq + fmt::Debug {
    type Key: Ord + Clone + fmt::Debug;

    fn terms(&self) -> Vec<(Self::Key, CoefficientQn)>;
    /// A polynomial in the same space as `self` built from terms.
    fn with_terms(&self, terms: Vec<(Self::Key, CoefficientQn)>) -> Result<Self>;
    fn one_key(&self) -> Self::Key;
    fn product(&self, other: &Self) -> Result<Self>;
    fn poisson(&self, other: &Self) -> Result<Self>;
    fn render_key(&self, key: &Self::Key) -> String;
}

impl Factor for TracePolynomial {
    type Key = MonomialKey;

    fn terms(&self) -> Vec<(MonomialKey, CoefficientQn)> {
        TracePolynomial::terms(self).map(|(k, c)| (k.clone(), c.clone())).collect()
    }

    fn with_terms(&self, terms: Vec<(MonomialKey, CoefficientQn)>) -> Result<Self> {
        let mut p = TracePolynomial::zero(self.mode());
        for (k, c) in terms {
            p.add_term(k, c);
        }
        Ok(p)
    }

    fn one_key(&self) -> MonomialKey {
        MonomialKey::one()
    }

    fn product(&self, other: &Self) -> Result<Self> {
        self.checked_mul(other)
    }

    fn poisson(&self, other: &Self) -> Result<Self> {
        bracket(self, other)
    }

    fn render_key(&self, key: &MonomialKey) -> String {
        TracePolynomial::monomial(self.mode(), key.clone(), CoefficientQn::one()).to_string()
    }
}

fn rational(c: &CoefficientQn) -> Result<BigRational> {
    if c.is_zero() {
        return Ok(BigRational::from_integer(0.into()));
    }
    if c.is_rational() {
        Ok(c.coefficient_of(0))
    } else {
        Err(TraceError::Numeric(format!("model coefficient {c} depends on n")))
    }
}

impl Factor for LaurentPoly2 {
    type Key = (i32, i32);

    fn terms(&self) -> Vec<((i32, i32), CoefficientQn)> {
        LaurentPoly2::terms(self).map(|(e, c)| (*e, CoefficientQn::from_rational(c.clone()))).collect()
    }

    fn with_terms(&self, terms: Vec<((i32, i32), CoefficientQn)>) -> Result<Self> {
        let mut p = LaurentPoly2::zero(self.space());
        for (e, c) in terms {
            p.add_term(e, rational(&c)?);
        }
        Ok(p)
    }

    fn one_key(&self) -> (i32, i32) {
        (0, 0)
    }

    fn product(&self, other: &Self) -> Result<Self> {
        self.checked_mul(other)
    }

    fn poisson(&self, other: &Self) -> Result<Self> {
        model_bracket(self, other)
    }

    fn render_key(&self, key: &(i32, i32)) -> String {
        LaurentPoly2::monomial(self.space(), key.0, key.1, BigRational::from_integer(1.into()))
            .map_or_else(|_| format!("z^{} w^{}", key.0, key.1), |m| m.to_string())
    }
}

/// A polynomial tagged with the factor it lives on.
#[derive(Clone, Debug, PartialEq)]
pub enum Tagged<L, R> {
    Left(L),
    Right(R),
}

impl<L: Factor, R: Factor> Tagged<L, R> {
    /// `f ⊗ 1` or `1 ⊗ g`; `left`, `right` only fix the factor spaces.
    pub fn embed(&self, left: &L, right: &R) -> Result<ProductPoly<L, R>> {
        match self {
            Tagged::Left(f) => ProductPoly::from_left(f, right),
            Tagged::Right(g) => ProductPoly::from_right(left, g),
        }
    }
}

/// `Σ c (l ⊗ r)` over monomial pairs. `left` and `right` are templates
/// fixing the spaces of the two factors.
#[derive(Clone, Debug)]
pub struct ProductPoly<L: Factor, R: Factor> {
    left: L,
    right: R,
    terms: BTreeMap<(L::Key, R::Key), CoefficientQn>,
}

impl<L: Factor, R: Factor> ProductPoly<L, R> {
    pub fn zero(left: &L, right: &R) -> Self {
        Self { left: left.clone(), right: right.clone(), terms: BTreeMap::new() }
    }

    /// `f ⊗ g`.
    pub fn tensor(f: &L, g: &R) -> Self {
        let mut out = Self::zero(f, g);
        for (a, c) in f.terms() {
            for (b, d) in g.terms() {
                out.add_term((a.clone(), b), &c * &d);
            }
        }
        out
    }

    /// `f ⊗ 1`.
    pub fn from_left(f: &L, right: &R) -> Result<Self> {
        let one = right.with_terms(vec![(right.one_key(), CoefficientQn::one())])?;
        Ok(Self::tensor(f, &one))
    }

    /// `1 ⊗ g`.
    pub fn from_right(left: &L, g: &R) -> Result<Self> {
        let one = left.with_terms(vec![(left.one_key(), CoefficientQn::one())])?;
        Ok(Self::tensor(&one, g))
    }

    fn add_term(&mut self, key: (L::Key, R::Key), c: CoefficientQn) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(key.clone()).or_insert_with(CoefficientQn::zero);
        *slot += &c;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }

    pub fn scale_int(&self, v: i64) -> Self {
        let mut out = Self::zero(&self.left, &self.right);
        for (k, c) in &self.terms {
            out.add_term(k.clone(), c.scale_int(v));
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale_int(-1))
    }

    fn pure(&self, a: &L::Key, b: &R::Key) -> Result<(L, R)> {
        let l = self.left.with_terms(vec![(a.clone(), CoefficientQn::one())])?;
        let r = self.right.with_terms(vec![(b.clone(), CoefficientQn::one())])?;
        Ok((l, r))
    }

    /// Applies `op` to every pair of monomial tensors and sums with the
    /// product of the two coefficients.
    fn bilinear<F>(&self, other: &Self, op: F) -> Result<Self>
    where
        F: Fn(&(L, R), &(L, R)) -> Result<Vec<(L, R)>>,
    {
        let mut out = Self::zero(&self.left, &self.right);
        for ((a, b), c) in &self.terms {
            let x = self.pure(a, b)?;
            for ((p, q), d) in &other.terms {
                let y = self.pure(p, q)?;
                let cd = c * d;
                for (l, r) in op(&x, &y)? {
                    for (k, v) in Self::tensor(&l, &r).terms {
                        out.add_term(k, &v * &cd);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.bilinear(other, |(a, b), (c, d)| Ok(vec![(a.product(c)?, b.product(d)?)]))
    }

    pub fn pow(&self, e: u32) -> Result<Self> {
        let mut acc =
            Self::from_left(&self.left.with_terms(vec![(self.left.one_key(), CoefficientQn::one())])?, &self.right)?;
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// `{a ⊗ b, c ⊗ d} = {a, c} ⊗ bd + ac ⊗ {b, d}`.
    pub fn bracket(&self, other: &Self) -> Result<Self> {
        self.bilinear(other, |(a, b), (c, d)| Ok(vec![(a.poisson(c)?, b.product(d)?), (a.product(c)?, b.poisson(d)?)]))
    }
}

impl<L: Factor, R: Factor> PartialEq for ProductPoly<L, R> {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl<L: Factor, R: Factor> fmt::Display for ProductPoly<L, R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|((a, b), c)| format!("({c})*[{}]⊗[{}]", self.left.render_key(a), self.right.render_key(b)))
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

/// Bracket of two tagged polynomials on the product: the factor's own
/// bracket for a same-side pair and zero across.
pub fn product_bracket<L: Factor, R: Factor>(
    f: &Tagged<L, R>,
    g: &Tagged<L, R>,
    left: &L,
    right: &R,
) -> Result<ProductPoly<L, R>> {
    f.embed(left, right)?.bracket(&g.embed(left, right)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generation::model::ModelSpace;
    use crate::text::parse_polynomial as p;

    fn lp(space: ModelSpace, a: i32, b: i32) -> LaurentPoly2 {
        LaurentPoly2::monomial(space, a, b, BigRational::from_integer(1.into())).unwrap()
    }

    #[test]
    fn cross_factor_brackets_vanish() {
        let (t, c) = (ModelSpace::Torus, ModelSpace::Cylinder);
        let f = Tagged::Left(lp(t, 1, 0));
        let g = Tagged::Right(lp(c, 1, 0));
        assert!(product_bracket(&f, &g, &lp(t, 0, 0), &lp(c, 0, 0)).unwrap().is_zero());
    }

    #[test]
    fn same_factor_bracket_follows_the_factor() {
        let t = ModelSpace::Torus;
        let f = ProductPoly::from_left(&lp(t, 2, 0), &lp(t, 0, 0)).unwrap();
        let g = ProductPoly::from_left(&lp(t, 0, 3), &lp(t, 0, 0)).unwrap();
        let expected =
            ProductPoly::from_left(&model_bracket(&lp(t, 2, 0), &lp(t, 0, 3)).unwrap(), &lp(t, 0, 0)).unwrap();
        assert_eq!(f.bracket(&g).unwrap(), expected);
    }

    #[test]
    fn polarization_on_matrix_product() {
        let a = p("tr(A^2 B)").unwrap();
        let b = p("tr(A B)*tr(B^2)").unwrap();
        let f = ProductPoly::from_left(&a, &b).unwrap();
        let g = ProductPoly::from_right(&a, &b).unwrap();
        let lhs = f.mul(&g).unwrap().scale_int(2);
        let s = f.add(&g);
        let rhs = s.pow(2).unwrap().sub(&f.pow(2).unwrap()).sub(&g.pow(2).unwrap());
        assert_eq!(lhs, rhs);
    }
}
