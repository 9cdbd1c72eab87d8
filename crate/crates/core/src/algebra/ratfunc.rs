//! Quotients of polynomials, compared by cross-multiplication.

use std::collections::HashMap;

use num_traits::{One, Zero};

use super::poly::MultiPoly;
use super::rational::Rational;
use super::registry::VarRegistry;
use super::ring::{Field, FractionField, Ring};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct RationalFunction {
    pub num: MultiPoly,
    pub den: MultiPoly,
}

impl RationalFunction {
    pub fn new(num: MultiPoly, den: MultiPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::domain("zero denominator"));
        }
        Ok(Self::normalized(num, den))
    }

    /// Cheap normalization: zero numerator gets denominator 1, constant
    /// denominators are folded into the numerator.
    fn normalized(num: MultiPoly, den: MultiPoly) -> Self {
        if num.is_zero() {
            return Self::from_poly(MultiPoly::zero());
        }
        if let Some(c) = den.as_constant() {
            return Self::from_poly(num.scale(&c.recip()));
        }
        if let Some(q) = num.div_exact(&den) {
            return Self::from_poly(q);
        }
        RationalFunction { num, den }
    }

    pub fn from_poly(p: MultiPoly) -> Self {
        RationalFunction { num: p, den: MultiPoly::one() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_poly(MultiPoly::constant(c))
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.as_constant().is_some()
    }

    pub fn eval(&self, point: &[Rational]) -> Result<Rational> {
        let d = self.den.eval(point)?;
        if d.is_zero() {
            return Err(Error::domain("denominator vanishes at evaluation point"));
        }
        Ok(self.num.eval(point)? / d)
    }

    pub fn substitute_values(&self, values: &HashMap<usize, Rational>) -> Result<Self> {
        RationalFunction::new(self.num.substitute_values(values), self.den.substitute_values(values))
    }

    pub fn derivative(&self, v: usize) -> Self {
        let n = &(&self.num.derivative(v) * &self.den) - &(&self.num * &self.den.derivative(v));
        Self::normalized(n, &self.den * &self.den)
    }

    pub fn weighted_degree(&self, reg: &VarRegistry) -> Option<i64> {
        if self.num.is_zero() {
            return Some(0);
        }
        Some(self.num.weighted_degree(reg)? - self.den.weighted_degree(reg)?)
    }

    pub fn display(&self, reg: &VarRegistry) -> String {
        if self.is_polynomial() {
            self.num.display(reg)
        } else {
            format!("({}) / ({})", self.num.display(reg), self.den.display(reg))
        }
    }
}

impl PartialEq for RationalFunction {
    fn eq(&self, other: &Self) -> bool {
        &self.num * &other.den == &other.num * &self.den
    }
}

impl Zero for RationalFunction {
    fn zero() -> Self {
        Self::from_poly(MultiPoly::zero())
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl One for RationalFunction {
    fn one() -> Self {
        Self::from_poly(MultiPoly::one())
    }
}

impl std::ops::Add for RationalFunction {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Ring::add_ref(&self, &o)
    }
}

impl std::ops::Mul for RationalFunction {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Ring::mul_ref(&self, &o)
    }
}

impl Ring for RationalFunction {
    fn add_ref(&self, o: &Self) -> Self {
        if self.den == o.den {
            return Self::normalized(&self.num + &o.num, self.den.clone());
        }
        Self::normalized(&(&self.num * &o.den) + &(&o.num * &self.den), &self.den * &o.den)
    }
    fn sub_ref(&self, o: &Self) -> Self {
        self.add_ref(&o.neg_ref())
    }
    fn mul_ref(&self, o: &Self) -> Self {
        Self::normalized(&self.num * &o.num, &self.den * &o.den)
    }
    fn neg_ref(&self) -> Self {
        RationalFunction { num: -&self.num, den: self.den.clone() }
    }
    fn from_rational(q: &Rational) -> Self {
        Self::constant(q.clone())
    }
    fn scale(&self, q: &Rational) -> Self {
        Self::normalized(self.num.scale(q), self.den.clone())
    }
}

impl Field for RationalFunction {
    fn inv(&self) -> Self {
        assert!(!self.num.is_zero(), "inverse of zero rational function");
        Self::normalized(self.den.clone(), self.num.clone())
    }
}

impl FractionField for RationalFunction {
    type Domain = MultiPoly;
    fn numer_denom(&self) -> (MultiPoly, MultiPoly) {
        (self.num.clone(), self.den.clone())
    }
    fn from_domain(d: &MultiPoly) -> Self {
        Self::from_poly(d.clone())
    }
    fn common_multiple(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
        if a == b {
            return a.clone();
        }
        if b.div_exact(a).is_some() {
            return b.clone();
        }
        if a.div_exact(b).is_some() {
            return a.clone();
        }
        a * b
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::int;

    #[test]
    fn cross_multiplication_equality() {
        let x = MultiPoly::var(0);
        let y = MultiPoly::var(1);
        let f = RationalFunction::new(&x * &y, &y * &y).unwrap();
        let g = RationalFunction::new(x.clone(), y.clone()).unwrap();
        assert_eq!(f, g);
        let sum = f.add_ref(&g);
        assert_eq!(sum, RationalFunction::new(x.scale(&int(2)), y.clone()).unwrap());
        let d = g.derivative(1);
        assert_eq!(d, RationalFunction::new(-&x, &y * &y).unwrap());
        assert_eq!(g.eval(&[int(3), int(2)]).unwrap(), Rational::new(3.into(), 2.into()));
        assert!(g.eval(&[int(3), int(0)]).is_err());
        assert!(RationalFunction::new(x, MultiPoly::zero()).is_err());
    }
}
