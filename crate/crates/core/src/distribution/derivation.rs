//! Vector fields on the parameter space and on the `(x, y)`-plane.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::algebra::poly::MultiPoly;
use crate::algebra::ratfunc::RationalFunction;
use crate::algebra::rational::Rational;
use crate::algebra::registry::VarRegistry;
use crate::error::{Error, Result};

/// `Σ X_{k,l} ∂/∂a_{k,l}` with polynomial coefficients; zero components are not stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationOnA {
    pub p: usize,
    coeffs: BTreeMap<(usize, usize), MultiPoly>,
}

impl DerivationOnA {
    pub fn zero(p: usize) -> Self {
        DerivationOnA { p, coeffs: BTreeMap::new() }
    }

    pub fn from_components(p: usize, comps: impl IntoIterator<Item = ((usize, usize), MultiPoly)>) -> Self {
        let mut d = DerivationOnA::zero(p);
        for ((k, l), c) in comps {
            d.set(k, l, c);
        }
        d
    }

    pub fn get(&self, k: usize, l: usize) -> MultiPoly {
        self.coeffs.get(&(k, l)).cloned().unwrap_or_default()
    }

    pub fn get_ref(&self, k: usize, l: usize) -> Option<&MultiPoly> {
        self.coeffs.get(&(k, l))
    }

    pub fn set(&mut self, k: usize, l: usize, c: MultiPoly) {
        if c.is_zero() {
            self.coeffs.remove(&(k, l));
        } else {
            self.coeffs.insert((k, l), c);
        }
    }

    /// Nonzero components in `(k, l)` order.
    pub fn components(&self) -> impl Iterator<Item = (&(usize, usize), &MultiPoly)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `X(f) = Σ X_{k,l} ∂f/∂a_{k,l}`.
    pub fn apply(&self, f: &MultiPoly, reg: &VarRegistry) -> MultiPoly {
        let mut out = MultiPoly::zero();
        let vars = f.variables();
        for (&(k, l), c) in &self.coeffs {
            let v = reg.a(k, l);
            if vars.contains(&v) {
                out.add_product(c, &f.derivative(v));
            }
        }
        out
    }

    /// Numerator of `X(num/den)` over `den^2`: `X(num)·den − num·X(den)`.
    pub fn apply_numerator(&self, f: &RationalFunction, reg: &VarRegistry) -> MultiPoly {
        &(&self.apply(&f.num, reg) * &f.den) - &(&f.num * &self.apply(&f.den, reg))
    }

    /// `[X, Y]` componentwise: `X(Y_{k,l}) − Y(X_{k,l})`.
    pub fn bracket(&self, other: &DerivationOnA, reg: &VarRegistry) -> DerivationOnA {
        let mut keys: Vec<(usize, usize)> = self.coeffs.keys().chain(other.coeffs.keys()).copied().collect();
        keys.sort_unstable();
        keys.dedup();
        let mut out = DerivationOnA::zero(self.p);
        for (k, l) in keys {
            let a = self.apply(&other.get(k, l), reg);
            let b = other.apply(&self.get(k, l), reg);
            out.set(k, l, &a - &b);
        }
        out
    }

    /// Keeps only the level-`m` components.
    pub fn level_projection(&self, m: usize) -> Result<DerivationOnA> {
        if m < 1 || m + 3 > self.p {
            return Err(Error::domain(format!("level {m} does not exist for p={}", self.p)));
        }
        Ok(DerivationOnA {
            p: self.p,
            coeffs: self.coeffs.iter().filter(|((k, _), _)| *k == m).map(|(k, c)| (*k, c.clone())).collect(),
        })
    }

    pub fn add(&self, other: &DerivationOnA) -> DerivationOnA {
        let mut out = self.clone();
        for (&(k, l), c) in &other.coeffs {
            let s = &out.get(k, l) + c;
            out.set(k, l, s);
        }
        out
    }

    pub fn sub(&self, other: &DerivationOnA) -> DerivationOnA {
        self.add(&other.scale(&-Rational::from_integer(1.into())))
    }

    pub fn scale(&self, c: &Rational) -> DerivationOnA {
        DerivationOnA::from_components(self.p, self.coeffs.iter().map(|(k, v)| (*k, v.scale(c))))
    }

    pub fn mul_poly(&self, f: &MultiPoly) -> DerivationOnA {
        DerivationOnA::from_components(self.p, self.coeffs.iter().map(|(k, v)| (*k, v * f)))
    }

    /// Applies `g` to every coefficient.
    pub fn map(&self, g: impl Fn(&MultiPoly) -> MultiPoly) -> DerivationOnA {
        DerivationOnA::from_components(self.p, self.coeffs.iter().map(|(k, v)| (*k, g(v))))
    }

    /// Values at a dense point, ordered as `reg.a_entries()`.
    pub fn eval(&self, reg: &VarRegistry, point: &[Rational]) -> Result<Vec<Rational>> {
        reg.a_entries()
            .into_iter()
            .map(|(k, l, _)| match self.coeffs.get(&(k, l)) {
                Some(c) => c.eval(point),
                None => Ok(Rational::zero()),
            })
            .collect()
    }

    /// Rational `c` with `self = c · other`, if one exists.
    pub fn ratio_to(&self, other: &DerivationOnA) -> Option<Rational> {
        let (key, oc) = other.coeffs.iter().next()?;
        let sc = self.coeffs.get(key)?;
        let (m, c) = oc.leading()?;
        let r = sc.coeff(m) / c;
        if *self == other.scale(&r) {
            Some(r)
        } else {
            None
        }
    }
}

/// `α ∂/∂x + β ∂/∂y`, exact up to total degree `degree` in `(x, y)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlaneVectorField {
    pub alpha: MultiPoly,
    pub beta: MultiPoly,
    pub degree: usize,
}

impl PlaneVectorField {
    /// `x ∂/∂x + y ∂/∂y`.
    pub fn radial(degree: usize) -> Self {
        PlaneVectorField { alpha: MultiPoly::var(VarRegistry::X), beta: MultiPoly::var(VarRegistry::Y), degree }
    }

    /// Applies to a polynomial, truncating at `degree` in `(x, y)` of the field.
    pub fn apply(&self, f: &MultiPoly) -> MultiPoly {
        &(&self.alpha * &f.derivative(VarRegistry::X)) + &(&self.beta * &f.derivative(VarRegistry::Y))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        PlaneVectorField { alpha: self.alpha.scale(c), beta: self.beta.scale(c), degree: self.degree }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::int;

    #[test]
    fn bracket_basics() {
        let reg = VarRegistry::new(7);
        let (a22, a23, a33) = (reg.a(2, 2), reg.a(2, 3), reg.a(3, 3));
        let e = DerivationOnA::from_components(
            7,
            [
                ((2, 2), MultiPoly::var(a22)),
                ((2, 3), MultiPoly::var(a23)),
                ((3, 3), MultiPoly::var(a33).scale(&int(2))),
            ],
        );
        let y = DerivationOnA::from_components(7, [((3, 3), MultiPoly::var(a22))]);
        assert!(e.bracket(&e, &reg).is_zero());
        // weight of a22 is 1, target weight 2: eigenvalue 2 - 1 = 1
        assert_eq!(e.bracket(&y, &reg), y.scale(&int(-1)));
        let proj = e.level_projection(2).unwrap();
        assert_eq!(proj.add(&e.level_projection(3).unwrap()), e);
        assert!(e.level_projection(5).is_err());
        assert_eq!(e.scale(&int(3)).ratio_to(&e), Some(int(3)));
        assert_eq!(y.ratio_to(&e), None);
    }
}
