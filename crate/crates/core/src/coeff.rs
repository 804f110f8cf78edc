//! Exact scalars: Laurent polynomials in the formal matrix size `n` with
//! rational coefficients.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Shorthand for building a rational from a small numerator/denominator.
pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

pub fn rat_to_f64(r: &BigRational) -> f64 {
    // Ratio::to_f64 handles huge numerators/denominators without overflow.
    r.to_f64().unwrap_or(f64::NAN)
}

/// `Σ_k c_k n^k` with `c_k ∈ ℚ`, `k ∈ ℤ`. Zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct CoefficientQn {
    terms: BTreeMap<i32, BigRational>,
}

impl CoefficientQn {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_rational(BigRational::one())
    }

    pub fn from_int(v: i64) -> Self {
        Self::from_rational(rat_int(v))
    }

    pub fn from_rational(r: BigRational) -> Self {
        Self::monomial(r, 0)
    }

    /// `r · n^power`.
    pub fn monomial(r: BigRational, power: i32) -> Self {
        let mut terms = BTreeMap::new();
        if !r.is_zero() {
            terms.insert(power, r);
        }
        Self { terms }
    }

    /// The symbol `n` itself.
    pub fn n() -> Self {
        Self::monomial(BigRational::one(), 1)
    }

    /// `n^power`.
    pub fn n_pow(power: i32) -> Self {
        Self::monomial(BigRational::one(), power)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).is_some_and(|c| c.is_one())
    }

    /// True when no power of `n` other than `n^0` occurs.
    pub fn is_rational(&self) -> bool {
        self.terms.keys().all(|&k| k == 0)
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i32, &BigRational)> {
        self.terms.iter().map(|(k, v)| (*k, v))
    }

    pub fn coefficient_of(&self, power: i32) -> BigRational {
        self.terms.get(&power).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(k, v)| (*k, v * r)).collect() }
    }

    pub fn scale_int(&self, v: i64) -> Self {
        self.scale(&rat_int(v))
    }

    /// Multiply by `n^power`.
    pub fn shift(&self, power: i32) -> Self {
        Self { terms: self.terms.iter().map(|(k, v)| (k + power, v.clone())).collect() }
    }

    /// Substitute a concrete value for `n`.
    pub fn specialize(&self, n: i64) -> BigRational {
        assert!(n != 0 || self.terms.keys().all(|&k| k >= 0), "n = 0 with negative power");
        let base = rat_int(n);
        self.terms.iter().map(|(k, v)| v * pow_rational(&base, *k)).fold(BigRational::zero(), |acc, x| acc + x)
    }

    pub fn to_f64(&self, n: f64) -> f64 {
        self.terms.iter().map(|(k, v)| rat_to_f64(v) * n.powi(*k)).sum()
    }

    /// Sign of the leading (highest power of `n`) rational, used for printing.
    pub fn leading_sign(&self) -> Ordering {
        match self.terms.iter().next_back() {
            Some((_, v)) if v.is_negative() => Ordering::Less,
            Some(_) => Ordering::Greater,
            None => Ordering::Equal,
        }
    }

    fn insert_add(&mut self, power: i32, value: BigRational) {
        if value.is_zero() {
            return;
        }
        let slot = self.terms.entry(power).or_insert_with(BigRational::zero);
        *slot += value;
        if slot.is_zero() {
            self.terms.remove(&power);
        }
    }
}

fn pow_rational(base: &BigRational, exp: i32) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..exp.unsigned_abs() {
        acc *= base;
    }
    if exp < 0 {
        acc.recip()
    } else {
        acc
    }
}

impl From<BigRational> for CoefficientQn {
    fn from(r: BigRational) -> Self {
        Self::from_rational(r)
    }
}

impl From<i64> for CoefficientQn {
    fn from(v: i64) -> Self {
        Self::from_int(v)
    }
}

impl AddAssign<&CoefficientQn> for CoefficientQn {
    fn add_assign(&mut self, rhs: &CoefficientQn) {
        for (k, v) in &rhs.terms {
            self.insert_add(*k, v.clone());
        }
    }
}

impl Add<&CoefficientQn> for &CoefficientQn {
    type Output = CoefficientQn;
    fn add(self, rhs: &CoefficientQn) -> CoefficientQn {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for CoefficientQn {
    type Output = CoefficientQn;
    fn add(mut self, rhs: CoefficientQn) -> CoefficientQn {
        self += &rhs;
        self
    }
}

impl Neg for &CoefficientQn {
    type Output = CoefficientQn;
    fn neg(self) -> CoefficientQn {
        CoefficientQn { terms: self.terms.iter().map(|(k, v)| (*k, -v)).collect() }
    }
}

impl Neg for CoefficientQn {
    type Output = CoefficientQn;
    fn neg(self) -> CoefficientQn {
        -&self
    }
}

impl Sub<&CoefficientQn> for &CoefficientQn {
    type Output = CoefficientQn;
    fn sub(self, rhs: &CoefficientQn) -> CoefficientQn {
        self + &(-rhs)
    }
}

impl Sub for CoefficientQn {
    type Output = CoefficientQn;
    fn sub(self, rhs: CoefficientQn) -> CoefficientQn {
        &self - &rhs
    }
}

impl Mul<&CoefficientQn> for &CoefficientQn {
    type Output = CoefficientQn;
    fn mul(self, rhs: &CoefficientQn) -> CoefficientQn {
        let mut out = CoefficientQn::zero();
        for (ka, va) in &self.terms {
            for (kb, vb) in &rhs.terms {
                out.insert_add(ka + kb, va * vb);
            }
        }
        out
    }
}

impl Mul for CoefficientQn {
    type Output = CoefficientQn;
    fn mul(self, rhs: CoefficientQn) -> CoefficientQn {
        &self * &rhs
    }
}

/// Formats a rational as `p` or `p/q`.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for CoefficientQn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, v) in self.terms.iter().rev() {
            let (sign, mag) = if v.is_negative() { ("-", -v) } else { ("+", v.clone()) };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match *k {
                0 => write!(f, "{}", format_rational(&mag))?,
                _ if mag.is_one() => write!(f, "{}", format_n_power(*k))?,
                _ => write!(f, "{}*{}", format_rational(&mag), format_n_power(*k))?,
            }
        }
        Ok(())
    }
}

pub(crate) fn format_n_power(k: i32) -> String {
    if k == 1 {
        "n".to_string()
    } else {
        format!("n^{k}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_over_n_plus_rest_is_one() {
        // (1/n) + (1 - 1/n) = 1
        let a = CoefficientQn::n_pow(-1);
        let b = CoefficientQn::one() - CoefficientQn::n_pow(-1);
        assert!((a + b).is_one());
    }

    #[test]
    fn product_has_no_zero_divisors_on_samples() {
        let a = CoefficientQn::n() - CoefficientQn::from_int(2);
        let b = CoefficientQn::n() + CoefficientQn::from_int(2);
        let p = &a * &b;
        assert_eq!(p.coefficient_of(2), rat_int(1));
        assert_eq!(p.coefficient_of(0), rat_int(-4));
        assert!(p.coefficient_of(1).is_zero());
        assert!(!p.is_zero());
    }

    #[test]
    fn specialize_and_float_agree() {
        let c = CoefficientQn::monomial(rat(3, 2), -1) + CoefficientQn::from_int(5);
        assert_eq!(c.specialize(3), rat(11, 2));
        assert!((c.to_f64(3.0) - 5.5).abs() < 1e-15);
    }

    #[test]
    fn display() {
        let c = CoefficientQn::from_int(4) - CoefficientQn::monomial(rat(1, 2), -1);
        assert_eq!(c.to_string(), "4 - 1/2*n^-1");
        assert_eq!(CoefficientQn::n().to_string(), "n");
    }
}
