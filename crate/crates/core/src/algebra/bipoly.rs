//! Dense bivariate polynomials in `(x, y)` truncated at a total degree.
//!
//! Coefficients live in any [`Ring`], so the same code serves numeric
//! sample points (`Rational`) and symbolic parameters (`MultiPoly`).

use num_traits::One;

use super::poly::{Monomial, MultiPoly};
use super::rational::Rational;
use super::registry::VarRegistry;
use super::ring::Ring;

#[derive(Clone, Debug, PartialEq)]
pub struct BiPoly<C> {
    /// Maximal total degree kept.
    pub deg: usize,
    coeffs: Vec<C>,
}

/// Offset of the degree-`d` block.
fn block(d: usize) -> usize {
    d * (d + 1) / 2
}

impl<C: Ring> BiPoly<C> {
    pub fn zero(deg: usize) -> Self {
        BiPoly { deg, coeffs: vec![C::zero(); block(deg + 1)] }
    }

    pub fn one(deg: usize) -> Self {
        let mut p = Self::zero(deg);
        p.set(0, 0, C::one());
        p
    }

    /// `c * x^i * y^j` (dropped if beyond the truncation).
    pub fn monomial(deg: usize, i: usize, j: usize, c: C) -> Self {
        let mut p = Self::zero(deg);
        if i + j <= deg {
            p.set(i, j, c);
        }
        p
    }

    fn idx(i: usize, j: usize) -> usize {
        block(i + j) + j
    }

    pub fn get(&self, i: usize, j: usize) -> &C {
        &self.coeffs[Self::idx(i, j)]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut C {
        &mut self.coeffs[Self::idx(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, c: C) {
        if i + j <= self.deg {
            self.coeffs[Self::idx(i, j)] = c;
        }
    }

    /// Coefficients of the degree-`d` part, ordered by increasing `y` exponent.
    pub fn homogeneous(&self, d: usize) -> &[C] {
        &self.coeffs[block(d)..block(d + 1)]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Lowest degree with a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        (0..=self.deg).find(|&d| self.homogeneous(d).iter().any(|c| !c.is_zero()))
    }

    pub fn truncate(&self, deg: usize) -> Self {
        let mut p = Self::zero(deg);
        for d in 0..=deg.min(self.deg) {
            for j in 0..=d {
                p.set(d - j, j, self.get(d - j, j).clone());
            }
        }
        p
    }

    pub fn add(&self, o: &Self) -> Self {
        let deg = self.deg.min(o.deg);
        let n = block(deg + 1);
        BiPoly { deg, coeffs: (0..n).map(|k| self.coeffs[k].add_ref(&o.coeffs[k])).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let deg = self.deg.min(o.deg);
        let n = block(deg + 1);
        BiPoly { deg, coeffs: (0..n).map(|k| self.coeffs[k].sub_ref(&o.coeffs[k])).collect() }
    }

    pub fn neg(&self) -> Self {
        BiPoly { deg: self.deg, coeffs: self.coeffs.iter().map(|c| c.neg_ref()).collect() }
    }

    pub fn scale(&self, q: &Rational) -> Self {
        BiPoly { deg: self.deg, coeffs: self.coeffs.iter().map(|c| c.scale(q)).collect() }
    }

    pub fn scale_by(&self, c: &C) -> Self {
        BiPoly { deg: self.deg, coeffs: self.coeffs.iter().map(|x| x.mul_ref(c)).collect() }
    }

    /// Truncated product (truncation = smaller of the two).
    pub fn mul(&self, o: &Self) -> Self {
        let deg = self.deg.min(o.deg);
        let mut out = Self::zero(deg);
        let nz_a: Vec<(usize, usize)> = self.support(deg);
        let nz_b: Vec<(usize, usize)> = o.support(deg);
        for &(i1, j1) in &nz_a {
            let a = self.get(i1, j1);
            for &(i2, j2) in &nz_b {
                if i1 + j1 + i2 + j2 > deg {
                    continue;
                }
                out.coeffs[Self::idx(i1 + i2, j1 + j2)].add_mul(a, o.get(i2, j2));
            }
        }
        out
    }

    /// Nonzero positions up to `deg`.
    pub fn support(&self, deg: usize) -> Vec<(usize, usize)> {
        let mut v = Vec::new();
        for d in 0..=deg.min(self.deg) {
            for j in 0..=d {
                if !self.get(d - j, j).is_zero() {
                    v.push((d - j, j));
                }
            }
        }
        v
    }

    /// `x^a y^b * self`, truncated.
    pub fn shift(&self, a: usize, b: usize) -> Self {
        let mut out = Self::zero(self.deg);
        for d in 0..=self.deg {
            if d + a + b > self.deg {
                break;
            }
            for j in 0..=d {
                out.set(d - j + a, j + b, self.get(d - j, j).clone());
            }
        }
        out
    }

    /// `self += c * x^a y^b * other`, restricted to degrees in `[lo, self.deg]`.
    pub fn add_shifted_scaled(&mut self, other: &Self, a: usize, b: usize, c: &C, lo: usize) {
        if c.is_zero() {
            return;
        }
        for d in 0..=other.deg {
            let td = d + a + b;
            if td > self.deg {
                break;
            }
            if td < lo {
                continue;
            }
            for j in 0..=d {
                let src = other.get(d - j, j);
                if src.is_zero() {
                    continue;
                }
                self.coeffs[Self::idx(d - j + a, j + b)].add_mul(src, c);
            }
        }
    }

    pub fn derivative_x(&self) -> Self {
        let mut out = Self::zero(self.deg.saturating_sub(1));
        for d in 1..=self.deg {
            for j in 0..d {
                let i = d - j;
                out.set(i - 1, j, self.get(i, j).scale(&Rational::from_integer((i as i64).into())));
            }
        }
        out
    }

    pub fn derivative_y(&self) -> Self {
        let mut out = Self::zero(self.deg.saturating_sub(1));
        for d in 1..=self.deg {
            for j in 1..=d {
                let i = d - j;
                out.set(i, j - 1, self.get(i, j).scale(&Rational::from_integer((j as i64).into())));
            }
        }
        out
    }

    pub fn map<D: Ring>(&self, f: impl Fn(&C) -> D) -> BiPoly<D> {
        BiPoly { deg: self.deg, coeffs: self.coeffs.iter().map(f).collect() }
    }
}

impl BiPoly<Rational> {
    /// Reads the `(x, y)` part of a polynomial whose only variables are `x, y`.
    pub fn from_xy(p: &MultiPoly, deg: usize) -> Self {
        let mut out = Self::zero(deg);
        for (m, c) in p.terms() {
            let i = m.exp(VarRegistry::X) as usize;
            let j = m.exp(VarRegistry::Y) as usize;
            debug_assert_eq!(m.degree() as usize, i + j, "non-(x,y) variable in from_xy");
            if i + j <= deg {
                out.get_mut(i, j).add_assign(c);
            }
        }
        out
    }

    pub fn to_xy(&self) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (i, j) in self.support(self.deg) {
            out.add_term(
                Monomial::from_pairs([(VarRegistry::X, i as u32), (VarRegistry::Y, j as u32)]),
                self.get(i, j).clone(),
            );
        }
        out
    }

    pub fn eval(&self, x: &Rational, y: &Rational) -> Rational {
        let mut s = Rational::from_integer(0.into());
        for (i, j) in self.support(self.deg) {
            s += self.get(i, j) * num_traits::pow(x.clone(), i) * num_traits::pow(y.clone(), j);
        }
        s
    }
}

impl BiPoly<MultiPoly> {
    /// Splits the `(x, y)` variables off a polynomial; remaining variables stay in the coefficients.
    pub fn from_poly(p: &MultiPoly, deg: usize) -> Self {
        let mut out = Self::zero(deg);
        for (m, c) in p.terms() {
            let (i, rest) = m.split_var(VarRegistry::X);
            let (j, rest) = rest.split_var(VarRegistry::Y);
            let (i, j) = (i as usize, j as usize);
            if i + j <= deg {
                out.get_mut(i, j).add_term(rest, c.clone());
            }
        }
        out
    }

    pub fn to_poly(&self) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (i, j) in self.support(self.deg) {
            let m = Monomial::from_pairs([(VarRegistry::X, i as u32), (VarRegistry::Y, j as u32)]);
            out.add_assign_ref(&self.get(i, j).mul_monomial(&m));
        }
        out
    }
}

/// `x^i y^j` as an untruncated polynomial.
pub fn xy_monomial(i: usize, j: usize) -> MultiPoly {
    MultiPoly::term(Monomial::from_pairs([(VarRegistry::X, i as u32), (VarRegistry::Y, j as u32)]), Rational::one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::int;

    #[test]
    fn product_matches_sparse() {
        let x = MultiPoly::var(0);
        let y = MultiPoly::var(1);
        let a = &(&x + &y) + &(&x * &x);
        let b = &(&y - &x) + &y.pow(3);
        let full = &a * &b;
        let ba = BiPoly::from_xy(&a, 3);
        let bb = BiPoly::from_xy(&b, 3);
        let prod = ba.mul(&bb);
        let trunc = full.filter_terms(|m| m.degree() <= 3);
        assert_eq!(prod.to_xy(), trunc);
        assert_eq!(prod.valuation(), Some(2));
        assert_eq!(ba.derivative_x().to_xy(), a.derivative(0));
        assert_eq!(bb.derivative_y().to_xy(), b.derivative(1).filter_terms(|m| m.degree() <= 2));
        assert_eq!(ba.shift(1, 1).to_xy(), (&(&a * &x) * &y).filter_terms(|m| m.degree() <= 3));
        assert_eq!(ba.eval(&int(1), &int(2)), int(4));
    }
}
