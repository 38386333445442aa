//! Sparse multivariate polynomials over exact rationals.
//!
//! Terms are stored in a `BTreeMap` keyed by monomial in graded
//! lexicographic order, so iteration, equality, and the canonical text
//! form are all deterministic. Zero coefficients are never stored; the
//! zero polynomial is the empty map.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use super::scalar::{scalar_pow, scalar_to_f64, Scalar};
use crate::error::{Error, Result};

/// Total-degree cap applied by multiplication unless a caller overrides it.
pub const DEFAULT_DEGREE_CAP: u32 = 64;

/// Exponent vector; entry `i` is the power of variable `i` (0-based).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    /// Graded lexicographic: total degree first, then lexicographic on
    /// the exponent vector.
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    num_vars: usize,
    terms: BTreeMap<Monomial, Scalar>,
}

impl MultiPoly {
    pub fn zero(num_vars: usize) -> Self {
        MultiPoly {
            num_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(num_vars: usize) -> Self {
        Self::constant(num_vars, Scalar::one())
    }

    pub fn constant(num_vars: usize, value: Scalar) -> Self {
        let mut p = Self::zero(num_vars);
        if !value.is_zero() {
            p.terms.insert(Monomial(vec![0; num_vars]), value);
        }
        p
    }

    /// The variable `X_{index+1}` as a polynomial (`index` is 0-based).
    pub fn var(num_vars: usize, index: usize) -> Self {
        assert!(index < num_vars, "variable index out of range");
        let mut exps = vec![0; num_vars];
        exps[index] = 1;
        let mut p = Self::zero(num_vars);
        p.terms.insert(Monomial(exps), Scalar::one());
        p
    }

    /// Build from explicit `(coefficient, exponents)` pairs.
    pub fn from_terms(num_vars: usize, terms: Vec<(Scalar, Vec<u32>)>) -> Result<Self> {
        let mut p = Self::zero(num_vars);
        for (coeff, exps) in terms {
            if exps.len() != num_vars {
                return Err(Error::Dimension(format!(
                    "exponent vector has length {}, expected {num_vars}",
                    exps.len()
                )));
            }
            p.add_term(coeff, Monomial(exps));
        }
        Ok(p)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .all(|(m, c)| m.total_degree() == 0 && c.is_one())
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.total_degree() == 0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::total_degree).max().unwrap_or(0)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    fn add_term(&mut self, coeff: Scalar, mono: Monomial) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + &coeff;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    fn check_same_vars(&self, rhs: &Self) -> Result<()> {
        if self.num_vars != rhs.num_vars {
            return Err(Error::Dimension(format!(
                "polynomials in {} and {} variables",
                self.num_vars, rhs.num_vars
            )));
        }
        Ok(())
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.check_same_vars(rhs)?;
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(c.clone(), m.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.check_same_vars(rhs)?;
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(-c.clone(), m.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        let mut out = Self::zero(self.num_vars);
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, factor: &Scalar) -> Self {
        if factor.is_zero() {
            return Self::zero(self.num_vars);
        }
        let mut out = Self::zero(self.num_vars);
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), c * factor);
        }
        out
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        self.mul_capped(rhs, DEFAULT_DEGREE_CAP)
    }

    /// Product with an explicit total-degree cap.
    pub fn mul_capped(&self, rhs: &Self, cap: u32) -> Result<Self> {
        self.check_same_vars(rhs)?;
        if self.is_zero() || rhs.is_zero() {
            return Ok(Self::zero(self.num_vars));
        }
        let degree = self.total_degree() + rhs.total_degree();
        if degree > cap {
            return Err(Error::DegreeOverflow { degree, cap });
        }
        let mut out = Self::zero(self.num_vars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let exps: Vec<u32> = ma.0.iter().zip(&mb.0).map(|(a, b)| a + b).collect();
                out.add_term(ca * cb, Monomial(exps));
            }
        }
        Ok(out)
    }

    /// Formal partial derivative with respect to variable `var` (0-based).
    pub fn partial(&self, var: usize) -> Result<Self> {
        if var >= self.num_vars {
            return Err(Error::Argument(format!(
                "variable index {var} out of range for {} variables",
                self.num_vars
            )));
        }
        let mut out = Self::zero(self.num_vars);
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[var] = e - 1;
            out.add_term(c * Scalar::from_integer(e.into()), Monomial(exps));
        }
        Ok(out)
    }

    /// Exact evaluation at a rational point.
    pub fn eval(&self, point: &[Scalar]) -> Result<Scalar> {
        if point.len() != self.num_vars {
            return Err(Error::Dimension(format!(
                "point has {} coordinates, polynomial has {} variables",
                point.len(),
                self.num_vars
            )));
        }
        let mut acc = Scalar::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (v, e) in point.iter().zip(&m.0) {
                if *e > 0 {
                    term *= scalar_pow(v, *e);
                }
            }
            acc += term;
        }
        Ok(acc)
    }

    /// Double-precision evaluation; used by simulation and numeric oracles.
    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        debug_assert_eq!(point.len(), self.num_vars);
        let mut acc = 0.0;
        for (m, c) in &self.terms {
            let mut term = scalar_to_f64(c);
            for (v, e) in point.iter().zip(&m.0) {
                for _ in 0..*e {
                    term *= v;
                }
            }
            acc += term;
        }
        acc
    }

    /// Rename variables into a larger ring: variable `i` of `self` becomes
    /// variable `map[i]` of the result.
    pub fn embed(&self, new_num_vars: usize, map: &[usize]) -> Result<Self> {
        if map.len() != self.num_vars {
            return Err(Error::Dimension(format!(
                "variable map has length {}, expected {}",
                map.len(),
                self.num_vars
            )));
        }
        if map.iter().any(|&t| t >= new_num_vars) {
            return Err(Error::Argument("variable map target out of range".into()));
        }
        let mut out = Self::zero(new_num_vars);
        for (m, c) in &self.terms {
            let mut exps = vec![0u32; new_num_vars];
            for (i, e) in m.0.iter().enumerate() {
                exps[map[i]] += e;
            }
            out.add_term(c.clone(), Monomial(exps));
        }
        Ok(out)
    }
}

/// Canonical text: terms in descending graded-lex order, coefficients as
/// `p` or `p/q`, variables as `X1..Xn`, e.g. `-X1^2 + 1`.
impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (idx, (mono, coeff)) in self.terms.iter().rev().enumerate() {
            let negative = coeff.is_negative();
            if idx == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let magnitude = coeff.abs();
            let mut wrote_factor = false;
            if !magnitude.is_one() || mono.total_degree() == 0 {
                write!(f, "{magnitude}")?;
                wrote_factor = true;
            }
            for (i, e) in mono.0.iter().enumerate() {
                if *e == 0 {
                    continue;
                }
                if wrote_factor {
                    write!(f, "*")?;
                }
                write!(f, "X{}", i + 1)?;
                if *e > 1 {
                    write!(f, "^{e}")?;
                }
                wrote_factor = true;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::scalar::{scalar_frac, scalar_int};

    fn x(n: usize, i: usize) -> MultiPoly {
        MultiPoly::var(n, i)
    }

    #[test]
    fn additive_inverse_is_zero() {
        let p = x(1, 0);
        assert!(p.sub(&p).unwrap().is_zero());
        assert!(p.add(&p.neg()).unwrap().is_zero());
    }

    #[test]
    fn difference_of_squares() {
        let one = MultiPoly::one(1);
        let a = one.sub(&x(1, 0)).unwrap();
        let b = one.add(&x(1, 0)).unwrap();
        let prod = a.mul(&b).unwrap();
        let x1sq = x(1, 0).mul(&x(1, 0)).unwrap();
        assert_eq!(prod, one.sub(&x1sq).unwrap());
    }

    #[test]
    fn product_expansion_two_vars() {
        // (X1*X2) * (X2 - X2^2) = X1*X2^2 - X1*X2^3, expanded by hand.
        let n = 2;
        let x1x2 = x(n, 0).mul(&x(n, 1)).unwrap();
        let factor = x(n, 1).sub(&x(n, 1).mul(&x(n, 1)).unwrap()).unwrap();
        let prod = x1x2.mul(&factor).unwrap();
        let expected = MultiPoly::from_terms(
            n,
            vec![
                (scalar_int(1), vec![1, 2]),
                (scalar_int(-1), vec![1, 3]),
            ],
        )
        .unwrap();
        assert_eq!(prod, expected);
    }

    #[test]
    fn partial_derivatives() {
        // d/dX1 (1 - X1^2) = -2 X1
        let one = MultiPoly::one(1);
        let p = one.sub(&x(1, 0).mul(&x(1, 0)).unwrap()).unwrap();
        let d = p.partial(0).unwrap();
        assert_eq!(d, x(1, 0).scale(&scalar_int(-2)));

        // d/dX2 (X1) = 0
        assert!(x(2, 0).partial(1).unwrap().is_zero());

        // d/dX1 (X1^2 X2^3) = 2 X1 X2^3
        let p = MultiPoly::from_terms(2, vec![(scalar_int(1), vec![2, 3])]).unwrap();
        let expected = MultiPoly::from_terms(2, vec![(scalar_int(2), vec![1, 3])]).unwrap();
        assert_eq!(p.partial(0).unwrap(), expected);

        assert!(matches!(x(2, 0).partial(5), Err(Error::Argument(_))));
    }

    #[test]
    fn exact_evaluation() {
        let one = MultiPoly::one(1);
        let p = one.sub(&x(1, 0).mul(&x(1, 0)).unwrap()).unwrap();
        assert_eq!(p.eval(&[scalar_frac(1, 2)]).unwrap(), scalar_frac(3, 4));

        // X1 X2 (1 - X1) at (1/2, 1/2) = 1/8
        let n = 2;
        let q = x(n, 0)
            .mul(&x(n, 1))
            .unwrap()
            .mul(&MultiPoly::one(n).sub(&x(n, 0)).unwrap())
            .unwrap();
        assert_eq!(
            q.eval(&[scalar_frac(1, 2), scalar_frac(1, 2)]).unwrap(),
            scalar_frac(1, 8)
        );
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        assert!(matches!(
            x(1, 0).add(&x(2, 0)),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn degree_cap_trips() {
        let p = MultiPoly::from_terms(1, vec![(scalar_int(1), vec![40])]).unwrap();
        match p.mul(&p) {
            Err(Error::DegreeOverflow { degree: 80, cap: 64 }) => {}
            other => panic!("expected overflow, got {other:?}"),
        }
        assert!(p.mul_capped(&p, 100).is_ok());
    }

    #[test]
    fn display_canonical_form() {
        let one = MultiPoly::one(1);
        let p = one.sub(&x(1, 0).mul(&x(1, 0)).unwrap()).unwrap();
        assert_eq!(p.to_string(), "-X1^2 + 1");
        assert_eq!(MultiPoly::zero(3).to_string(), "0");
        let q = MultiPoly::from_terms(
            2,
            vec![
                (scalar_frac(1, 2), vec![1, 0]),
                (scalar_int(-3), vec![0, 2]),
                (scalar_int(1), vec![1, 1]),
            ],
        )
        .unwrap();
        assert_eq!(q.to_string(), "X1*X2 - 3*X2^2 + 1/2*X1");
    }

    #[test]
    fn embed_renames_variables() {
        let p = MultiPoly::from_terms(2, vec![(scalar_int(2), vec![1, 3])]).unwrap();
        let q = p.embed(4, &[2, 0]).unwrap();
        let expected = MultiPoly::from_terms(4, vec![(scalar_int(2), vec![3, 0, 1, 0])]).unwrap();
        assert_eq!(q, expected);
    }
}
