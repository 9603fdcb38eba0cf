//! Exact polynomial elements of the commutative algebra `C([0,1])`.
//!
//! A [`BElem`] is a dense polynomial with arbitrary-precision rational
//! coefficients, stored in ascending degree order. The representation is
//! canonical: trailing zero coefficients are always stripped, so the zero
//! polynomial has an empty coefficient vector and equality is plain
//! coefficient-list equality.
//!
//! Besides ring arithmetic the module provides the two integration operators
//! that realize the covariance maps of the quasinilpotent DT-operator,
//!
//! * [`BElem::alpha12`]: `x ↦ ∫ₓ¹ f(u) du`, the map `b ↦ E(T b T*)`,
//! * [`BElem::alpha21`]: `x ↦ ∫₀ˣ f(u) du`, the map `b ↦ E(T* b T)`,
//!
//! and the trace functional `f ↦ ∫₀¹ f`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Exact rational scalar used throughout the exact engines.
pub type Rational = BigRational;

/// Builds the rational `num / den`.
///
/// Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Formats a rational as `p/q` in lowest terms with the sign on the
/// numerator; integers are written without a denominator.
pub fn format_rational(q: &Rational) -> String {
    q.to_string()
}

pub fn parse_rational(s: &str) -> Result<Rational, BpolyError> {
    let trimmed = s.trim();
    Rational::from_str(trimmed).map_err(|_| BpolyError::BadRational(s.to_string()))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BpolyError {
    #[error("cannot parse rational coefficient {0:?}")]
    BadRational(String),
    #[error("grid size must be at least 2, got {0}")]
    GridTooSmall(usize),
}

/// Polynomial element of `B = C([0,1])` with exact rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct BElem {
    coeffs: Vec<Rational>,
}

impl BElem {
    fn normalize(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn zero() -> Self {
        BElem { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    /// The coordinate function `x`.
    pub fn x() -> Self {
        Self::from_coeffs(vec![Rational::zero(), Rational::one()])
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// Builds a polynomial from ascending-degree coefficients, stripping
    /// trailing zeros.
    pub fn from_coeffs(coeffs: Vec<Rational>) -> Self {
        let mut p = BElem { coeffs };
        p.normalize();
        p
    }

    /// Convenience constructor from `(numerator, denominator)` pairs.
    pub fn from_ratios(coeffs: &[(i64, i64)]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&(n, d)| rat(n, d)).collect())
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        if factor.is_zero() {
            return Self::zero();
        }
        BElem {
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// Exact evaluation by Horner's rule.
    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
    }

    /// Antiderivative vanishing at 0.
    fn antiderivative(&self) -> Self {
        let mut out = Vec::with_capacity(self.coeffs.len() + 1);
        out.push(Rational::zero());
        for (k, c) in self.coeffs.iter().enumerate() {
            out.push(c / BigInt::from(k + 1));
        }
        Self::from_coeffs(out)
    }

    /// `x ↦ ∫ₓ¹ f(u) du`.
    pub fn alpha12(&self) -> Self {
        let anti = self.antiderivative();
        let total = anti.eval(&Rational::one());
        &Self::constant(total) - &anti
    }

    /// `x ↦ ∫₀ˣ f(u) du`.
    pub fn alpha21(&self) -> Self {
        self.antiderivative()
    }

    /// `∫₀¹ f(u) du`.
    pub fn trace(&self) -> Rational {
        self.coeffs
            .iter()
            .enumerate()
            .fold(Rational::zero(), |acc, (k, c)| acc + c / BigInt::from(k + 1))
    }

    /// Values `f(j/(grid_size-1))` for `j = 0..grid_size`.
    pub fn eval_grid(&self, grid_size: usize) -> Result<Vec<Rational>, BpolyError> {
        Ok(grid_points(grid_size)?.iter().map(|x| self.eval(x)).collect())
    }

    /// Largest `|f|` over the uniform grid; stands in for the sup-norm.
    pub fn grid_sup_abs(&self, grid_size: usize) -> Result<Rational, BpolyError> {
        Ok(self
            .eval_grid(grid_size)?
            .into_iter()
            .map(|v| v.abs())
            .max()
            .unwrap_or_else(Rational::zero))
    }

    /// `x ↦ f(a + b x)`.
    pub fn compose_affine(&self, a: &Rational, b: &Rational) -> Self {
        let lin = BElem::from_coeffs(vec![a.clone(), b.clone()]);
        self.coeffs
            .iter()
            .rev()
            .fold(BElem::zero(), |acc, c| &(&acc * &lin) + &BElem::constant(c.clone()))
    }

    /// `x ↦ f(1 - x)`.
    pub fn reflect(&self) -> Self {
        self.compose_affine(&Rational::one(), &-Rational::one())
    }

    /// Coefficients as `p/q` strings, the JSON wire form.
    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(format_rational).collect()
    }

    pub fn from_strings<S: AsRef<str>>(items: &[S]) -> Result<Self, BpolyError> {
        let coeffs = items
            .iter()
            .map(|s| parse_rational(s.as_ref()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_coeffs(coeffs))
    }
}

/// The grid `j/(grid_size-1)`, `j = 0..grid_size`.
pub fn grid_points(grid_size: usize) -> Result<Vec<Rational>, BpolyError> {
    if grid_size < 2 {
        return Err(BpolyError::GridTooSmall(grid_size));
    }
    let den = (grid_size - 1) as i64;
    Ok((0..grid_size as i64).map(|j| rat(j, den)).collect())
}

impl fmt::Display for BElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})x")?,
                _ => write!(f, "({c})x^{k}")?,
            }
        }
        Ok(())
    }
}

impl Add for &BElem {
    type Output = BElem;
    fn add(self, rhs: &BElem) -> BElem {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n)
            .map(|k| {
                let a = self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero);
                match rhs.coeffs.get(k) {
                    Some(b) => a + b,
                    None => a,
                }
            })
            .collect();
        BElem::from_coeffs(coeffs)
    }
}

impl Sub for &BElem {
    type Output = BElem;
    fn sub(self, rhs: &BElem) -> BElem {
        self + &(-rhs)
    }
}

impl Neg for &BElem {
    type Output = BElem;
    fn neg(self) -> BElem {
        BElem {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &BElem {
    type Output = BElem;
    fn mul(self, rhs: &BElem) -> BElem {
        if self.is_zero() || rhs.is_zero() {
            return BElem::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        BElem::from_coeffs(out)
    }
}

impl Add for BElem {
    type Output = BElem;
    fn add(self, rhs: BElem) -> BElem {
        &self + &rhs
    }
}

impl Sub for BElem {
    type Output = BElem;
    fn sub(self, rhs: BElem) -> BElem {
        &self - &rhs
    }
}

impl Mul for BElem {
    type Output = BElem;
    fn mul(self, rhs: BElem) -> BElem {
        &self * &rhs
    }
}

impl Serialize for BElem {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_strings().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BElem {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let items = Vec::<String>::deserialize(deserializer)?;
        BElem::from_strings(&items).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn poly(c: &[(i64, i64)]) -> BElem {
        BElem::from_ratios(c)
    }

    #[test]
    fn alpha12_examples() {
        assert_eq!(BElem::one().alpha12(), poly(&[(1, 1), (-1, 1)]));
        assert_eq!(BElem::zero().alpha12(), BElem::zero());
        assert_eq!(BElem::x().alpha12(), poly(&[(1, 2), (0, 1), (-1, 2)]));
    }

    #[test]
    fn alpha21_examples() {
        assert_eq!(BElem::one().alpha21(), BElem::x());
        assert_eq!(BElem::zero().alpha21(), BElem::zero());
        assert_eq!(BElem::x().alpha21(), poly(&[(0, 1), (0, 1), (1, 2)]));
    }

    #[test]
    fn alpha_kernels_match_riemann_sums() {
        // Diagonal of E(T b T*) for the strictly upper-triangular model is
        // (1/N) Σ_{j>i} b(j/N); it converges to ∫ₓ¹ b.
        let f = poly(&[(1, 3), (-2, 1), (5, 4)]);
        let n = 4000usize;
        for &x in &[0.0, 0.25, 0.6, 0.9] {
            let i = (x * n as f64) as usize;
            let upper: f64 = (i + 1..n).map(|j| f.eval_f64(j as f64 / n as f64)).sum::<f64>() / n as f64;
            let lower: f64 = (0..i).map(|j| f.eval_f64(j as f64 / n as f64)).sum::<f64>() / n as f64;
            assert!((upper - f.alpha12().eval_f64(x)).abs() < 2e-3);
            assert!((lower - f.alpha21().eval_f64(x)).abs() < 2e-3);
        }
    }

    #[test]
    fn trace_examples() {
        assert_eq!(BElem::one().trace(), rat(1, 1));
        assert_eq!(BElem::x().trace(), rat(1, 2));
        assert_eq!(poly(&[(0, 1), (0, 1), (1, 2)]).trace(), rat(1, 6));
    }

    #[test]
    fn eval_grid_examples() {
        assert_eq!(BElem::x().eval_grid(3).unwrap(), vec![rat(0, 1), rat(1, 2), rat(1, 1)]);
        assert_eq!(
            poly(&[(1, 1), (-1, 1)]).eval_grid(2).unwrap(),
            vec![rat(1, 1), rat(0, 1)]
        );
        assert_eq!(
            poly(&[(0, 1), (0, 1), (1, 2)]).eval_grid(3).unwrap(),
            vec![rat(0, 1), rat(1, 8), rat(1, 2)]
        );
        assert_eq!(BElem::x().eval_grid(1), Err(BpolyError::GridTooSmall(1)));
    }

    #[test]
    fn canonical_form_strips_trailing_zeros() {
        let p = poly(&[(1, 2), (0, 1), (0, 1)]);
        assert_eq!(p.coeffs().len(), 1);
        assert_eq!(&p - &p, BElem::zero());
        assert_eq!(BElem::zero().degree(), None);
    }

    #[test]
    fn json_uses_lowest_terms_strings() {
        let p = poly(&[(2, 4), (-3, 6), (4, 1)]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"["1/2","-1/2","4"]"#);
        let back: BElem = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        assert!(serde_json::from_str::<BElem>(r#"["1/x"]"#).is_err());
    }

    #[test]
    fn reflect_swaps_the_kernels() {
        let f = poly(&[(3, 7), (-1, 2), (2, 1)]);
        assert_eq!(f.alpha12().reflect(), f.reflect().alpha21());
    }

    fn arb_belem() -> impl Strategy<Value = BElem> {
        prop::collection::vec((-20i64..=20, 1i64..=9), 0..6).prop_map(|c| BElem::from_ratios(&c))
    }

    proptest! {
        #[test]
        fn kernels_sum_to_the_trace(f in arb_belem()) {
            let sum = &f.alpha12() + &f.alpha21();
            prop_assert_eq!(sum, BElem::constant(f.trace()));
        }

        #[test]
        fn alpha12_is_linear(f in arb_belem(), g in arb_belem(), a in -9i64..9, d in 1i64..5) {
            let a = rat(a, d);
            let lhs = (&f.scale(&a) + &g).alpha12();
            let rhs = &f.alpha12().scale(&a) + &g.alpha12();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn degree_grows_by_one(f in arb_belem()) {
            match f.degree() {
                None => prop_assert!(f.alpha12().is_zero() && f.alpha21().is_zero()),
                Some(d) => {
                    prop_assert_eq!(f.alpha12().degree(), Some(d + 1));
                    prop_assert_eq!(f.alpha21().degree(), Some(d + 1));
                }
            }
        }

        #[test]
        fn positivity_is_transported(roots in prop::collection::vec(1i64..=9, 0..3)) {
            // Products of (x + k) are nonnegative on [0,1].
            let f = roots.iter().fold(BElem::one(), |acc, &k| &acc * &BElem::from_ratios(&[(k, 1), (1, 1)]));
            let grid = 33;
            prop_assert!(f.eval_grid(grid).unwrap().iter().all(|v| !v.is_negative()));
            prop_assert!(f.alpha12().eval_grid(grid).unwrap().iter().all(|v| !v.is_negative()));
            prop_assert!(f.alpha21().eval_grid(grid).unwrap().iter().all(|v| !v.is_negative()));
        }
    }
}
