//! Rational functions: numerator/denominator pairs of [`MultiPoly`].
//!
//! Sums of fractions are kept in common-denominator form: the numerator is
//! `sum_k P_k * prod_{r != k} Q_r` over the denominator `prod_k Q_k`, and
//! no gcd cancellation is ever applied. Cancellation would not change
//! evaluation semantics, but keeping the raw form makes the constructions
//! reproduce their defining formulas term for term.

use std::fmt;

use num_traits::Zero;

use super::poly::MultiPoly;
use super::scalar::Scalar;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalFunc {
    num: MultiPoly,
    den: MultiPoly,
}

impl RationalFunc {
    pub fn new(num: MultiPoly, den: MultiPoly) -> Result<Self> {
        if num.num_vars() != den.num_vars() {
            return Err(Error::Dimension(format!(
                "numerator in {} variables, denominator in {}",
                num.num_vars(),
                den.num_vars()
            )));
        }
        if den.is_zero() {
            return Err(Error::Argument("zero denominator polynomial".into()));
        }
        Ok(RationalFunc { num, den })
    }

    pub fn from_poly(p: MultiPoly) -> Self {
        let den = MultiPoly::one(p.num_vars());
        RationalFunc { num: p, den }
    }

    pub fn zero(num_vars: usize) -> Self {
        Self::from_poly(MultiPoly::zero(num_vars))
    }

    pub fn num(&self) -> &MultiPoly {
        &self.num
    }

    pub fn den(&self) -> &MultiPoly {
        &self.den
    }

    pub fn num_vars(&self) -> usize {
        self.num.num_vars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// True when the denominator is the constant one.
    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    /// Equality as rational functions: cross-multiplied polynomial equality.
    pub fn equiv(&self, other: &Self) -> bool {
        if self.num_vars() != other.num_vars() {
            return false;
        }
        let cap = u32::MAX;
        let lhs = self.num.mul_capped(&other.den, cap);
        let rhs = other.num.mul_capped(&self.den, cap);
        match (lhs, rhs) {
            (Ok(a), Ok(b)) => a == b,
            _ => false,
        }
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        self.mul_capped(rhs, super::poly::DEFAULT_DEGREE_CAP)
    }

    pub fn mul_capped(&self, rhs: &Self, cap: u32) -> Result<Self> {
        RationalFunc::new(
            self.num.mul_capped(&rhs.num, cap)?,
            self.den.mul_capped(&rhs.den, cap)?,
        )
    }

    pub fn scale(&self, factor: &Scalar) -> Self {
        RationalFunc {
            num: self.num.scale(factor),
            den: self.den.clone(),
        }
    }

    /// Formal partial derivative by the quotient rule:
    /// `(P' Q - P Q') / Q^2`, with no cancellation.
    pub fn partial(&self, var: usize) -> Result<Self> {
        self.partial_capped(var, super::poly::DEFAULT_DEGREE_CAP)
    }

    pub fn partial_capped(&self, var: usize, cap: u32) -> Result<Self> {
        let dnum = self.num.partial(var)?;
        let dden = self.den.partial(var)?;
        let num = dnum
            .mul_capped(&self.den, cap)?
            .sub(&self.num.mul_capped(&dden, cap)?)?;
        let den = self.den.mul_capped(&self.den, cap)?;
        RationalFunc::new(num, den)
    }

    /// Exact evaluation; fails if the denominator vanishes at the point.
    pub fn eval(&self, point: &[Scalar]) -> Result<Scalar> {
        let den = self.den.eval(point)?;
        if den.is_zero() {
            return Err(Error::EvalDenominatorZero {
                denominator: self.den.to_string(),
            });
        }
        Ok(self.num.eval(point)? / den)
    }

    /// Rename variables into a larger ring, numerator and denominator
    /// together; see [`MultiPoly::embed`].
    pub fn embed(&self, new_num_vars: usize, map: &[usize]) -> Result<Self> {
        RationalFunc::new(
            self.num.embed(new_num_vars, map)?,
            self.den.embed(new_num_vars, map)?,
        )
    }

    /// Double-precision evaluation; `None` when the denominator magnitude
    /// drops below `guard`.
    pub fn eval_f64_guarded(&self, point: &[f64], guard: f64) -> Option<f64> {
        let den = self.den.eval_f64(point);
        if den.abs() < guard {
            return None;
        }
        Some(self.num.eval_f64(point) / den)
    }
}

impl fmt::Display for RationalFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_polynomial() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

/// Sum of fractions in the fixed common-denominator form.
pub fn rat_combine(terms: &[RationalFunc]) -> Result<RationalFunc> {
    rat_combine_capped(terms, super::poly::DEFAULT_DEGREE_CAP)
}

pub fn rat_combine_capped(terms: &[RationalFunc], cap: u32) -> Result<RationalFunc> {
    let first = terms
        .first()
        .ok_or_else(|| Error::Argument("rat_combine needs a non-empty list".into()))?;
    let nv = first.num_vars();
    if terms.iter().any(|t| t.num_vars() != nv) {
        return Err(Error::Dimension(
            "rat_combine arguments must share one variable count".into(),
        ));
    }
    if terms.len() == 1 {
        return Ok(first.clone());
    }
    let mut num = MultiPoly::zero(nv);
    for (k, term) in terms.iter().enumerate() {
        let mut partial = term.num.clone();
        for (r, other) in terms.iter().enumerate() {
            if r != k {
                partial = partial.mul_capped(&other.den, cap)?;
            }
        }
        num = num.add(&partial)?;
    }
    let mut den = MultiPoly::one(nv);
    for term in terms {
        den = den.mul_capped(&term.den, cap)?;
    }
    RationalFunc::new(num, den)
}
