//! Minimal algebraic traits shared by the dense kernels.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::poly::MultiPoly;
use super::rational::Rational;

/// Commutative ring with a rational scalar action.
pub trait Ring: Clone + PartialEq + Debug + Send + Sync + Zero + One {
    fn add_ref(&self, o: &Self) -> Self;
    fn sub_ref(&self, o: &Self) -> Self;
    fn mul_ref(&self, o: &Self) -> Self;
    fn neg_ref(&self) -> Self;
    fn from_rational(q: &Rational) -> Self;
    fn scale(&self, q: &Rational) -> Self;

    fn add_assign(&mut self, o: &Self) {
        *self = self.add_ref(o);
    }

    /// `self += a * b`.
    fn add_mul(&mut self, a: &Self, b: &Self) {
        *self = self.add_ref(&a.mul_ref(b));
    }
}

/// Ring where exact division is decidable.
pub trait IntegralDomain: Ring {
    /// `self / d`, assuming `d` divides `self` exactly.
    fn div_exact(&self, d: &Self) -> Self;
}

/// Field: every nonzero element is invertible.
pub trait Field: Ring {
    fn inv(&self) -> Self;
    fn div_ref(&self, o: &Self) -> Self {
        self.mul_ref(&o.inv())
    }
}

/// Field of fractions of an integral domain, used for fraction-free elimination.
pub trait FractionField: Field {
    type Domain: IntegralDomain;
    fn numer_denom(&self) -> (Self::Domain, Self::Domain);
    fn from_domain(d: &Self::Domain) -> Self;
    /// Common multiple of two denominators (need not be least).
    fn common_multiple(a: &Self::Domain, b: &Self::Domain) -> Self::Domain;
}

impl Ring for Rational {
    fn add_ref(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_ref(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self * o
    }
    fn neg_ref(&self) -> Self {
        -self.clone()
    }
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }
    fn scale(&self, q: &Rational) -> Self {
        self * q
    }
    fn add_assign(&mut self, o: &Self) {
        *self += o;
    }
    fn add_mul(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }
}

impl Field for Rational {
    fn inv(&self) -> Self {
        self.recip()
    }
}

impl Ring for BigInt {
    fn add_ref(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_ref(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self * o
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn from_rational(q: &Rational) -> Self {
        assert!(q.is_integer(), "non-integral rational in integer ring");
        q.to_integer()
    }
    fn scale(&self, q: &Rational) -> Self {
        Self::from_rational(&(q * Rational::from_integer(self.clone())))
    }
}

impl IntegralDomain for BigInt {
    fn div_exact(&self, d: &Self) -> Self {
        self / d
    }
}

impl FractionField for Rational {
    type Domain = BigInt;
    fn numer_denom(&self) -> (BigInt, BigInt) {
        (self.numer().clone(), self.denom().clone())
    }
    fn from_domain(d: &BigInt) -> Self {
        Rational::from_integer(d.clone())
    }
    fn common_multiple(a: &BigInt, b: &BigInt) -> BigInt {
        a.lcm(b).abs()
    }
}

impl Ring for MultiPoly {
    fn add_ref(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_ref(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self * o
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn from_rational(q: &Rational) -> Self {
        MultiPoly::constant(q.clone())
    }
    fn scale(&self, q: &Rational) -> Self {
        MultiPoly::scale(self, q)
    }
    fn add_assign(&mut self, o: &Self) {
        self.add_assign_ref(o);
    }
    fn add_mul(&mut self, a: &Self, b: &Self) {
        self.add_product(a, b);
    }
}

impl IntegralDomain for MultiPoly {
    fn div_exact(&self, d: &Self) -> Self {
        MultiPoly::div_exact(self, d).expect("inexact polynomial division")
    }
}
