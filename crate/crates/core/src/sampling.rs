//! Seeded random sampling of parameters, multiplicities and coordinate changes.
//!
//! Every rational drawn here has `|numerator| <= 100` and `1 <= denominator <= 100`.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::poly::{Monomial, MultiPoly};
use crate::algebra::rational::Rational;
use crate::algebra::registry::VarRegistry;
use crate::algebra::series::TruncatedSeries;
use crate::normal_form::{Multiplicities, ParamMatrix};
use crate::prenorm::Biholomorphism;

pub const MAX_HEIGHT: i64 = 100;

#[derive(Clone, Debug)]
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// Rational with small height (possibly zero).
    pub fn rational(&mut self) -> Rational {
        let n: i64 = self.rng.gen_range(-MAX_HEIGHT..=MAX_HEIGHT);
        let d: i64 = self.rng.gen_range(1..=MAX_HEIGHT);
        Rational::new(n.into(), d.into())
    }

    pub fn nonzero(&mut self) -> Rational {
        loop {
            let q = self.rational();
            if !q.is_zero() {
                return q;
            }
        }
    }

    /// Pairwise distinct first-line entries outside `{0, 1}`.
    pub fn first_line(&mut self, p: usize) -> Vec<Rational> {
        let mut v: Vec<Rational> = Vec::new();
        while v.len() < p.saturating_sub(3) {
            let q = self.nonzero();
            if !q.is_one() && !v.contains(&q) {
                v.push(q);
            }
        }
        v
    }

    /// Random nonzero entries on levels `>= 2` over a given first line.
    pub fn params_with_first_line(&mut self, p: usize, a1: &[Rational]) -> ParamMatrix {
        let mut a = ParamMatrix::new(p);
        for k in 1..=p.saturating_sub(3) {
            for l in k..=p - 3 {
                let v = if k == 1 { a1[l - 1].clone() } else { self.nonzero() };
                a.set(k, l, v);
            }
        }
        a
    }

    pub fn params(&mut self, p: usize) -> ParamMatrix {
        let a1 = self.first_line(p);
        self.params_with_first_line(p, &a1)
    }

    /// Positive integers in `1..=max`.
    pub fn integral_multiplicities(&mut self, p: usize, max: i64) -> Multiplicities {
        let v: Vec<i64> = (0..p).map(|_| self.rng.gen_range(1..=max)).collect();
        Multiplicities::integral(&v)
    }

    /// Nonzero rational exponents with nonzero sum.
    pub fn darboux_multiplicities(&mut self, p: usize) -> Multiplicities {
        loop {
            let v: Vec<Rational> = (0..p)
                .map(|_| {
                    let n: i64 = self.rng.gen_range(-9..=9);
                    let d: i64 = self.rng.gen_range(1..=9);
                    Rational::new(n.into(), d.into())
                })
                .collect();
            let m = Multiplicities::darboux(v);
            if m.validate(p).is_ok() {
                return m;
            }
        }
    }

    fn homogeneous(&mut self, d: u32) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for j in 0..=d {
            let m = Monomial::from_pairs([(VarRegistry::X, d - j), (VarRegistry::Y, j)]);
            out.add_term(m, self.rational());
        }
        out
    }

    /// `(x + A, y + B)` with `A, B` of degrees `nu..=max_deg`. The degree-`nu`
    /// part is proportional to the radial field exactly when `dicritical`.
    pub fn tangent_biholomorphism(&mut self, nu: u32, max_deg: u32, dicritical: bool) -> Biholomorphism {
        loop {
            let (mut a, mut b) = if dicritical {
                let h = self.homogeneous(nu - 1);
                (&h * &MultiPoly::var(VarRegistry::X), &h * &MultiPoly::var(VarRegistry::Y))
            } else {
                (self.homogeneous(nu), self.homogeneous(nu))
            };
            for d in (nu + 1)..=max_deg {
                a.add_assign_ref(&self.homogeneous(d));
                b.add_assign_ref(&self.homogeneous(d));
            }
            let phi = Biholomorphism::tangent(a, b);
            if phi.nonlinear_order() == Some(nu) && phi.is_dicritical() == dicritical {
                return phi;
            }
        }
    }

    /// Invertible linear map.
    pub fn linear_map(&mut self) -> Biholomorphism {
        loop {
            let m = [[self.rational(), self.rational()], [self.rational(), self.rational()]];
            if !(&m[0][0] * &m[1][1] - &m[0][1] * &m[1][0]).is_zero() {
                return Biholomorphism::linear(m);
            }
        }
    }

    /// `t ↦ c t u(t)` with `c ≠ 0` and a random unit `u`, truncated at `order`.
    pub fn reparametrization(&mut self, order: usize) -> TruncatedSeries {
        let mut coeffs = vec![self.nonzero()];
        coeffs.extend((2..=order).map(|_| self.rational()));
        coeffs.truncate(order);
        TruncatedSeries::new(coeffs)
    }

    /// `(x, y) ↦ (μx, μy)` with a random `μ ≠ 0`.
    pub fn homothety(&mut self) -> Biholomorphism {
        let mu = self.nonzero();
        let z = Rational::zero();
        Biholomorphism::linear([[mu.clone(), z.clone()], [z, mu]])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normal_form::validate_params;

    #[test]
    fn deterministic_and_valid() {
        let mut s = Sampler::new(7);
        let mut t = Sampler::new(7);
        for p in 4..=10 {
            let a = s.params(p);
            assert!(validate_params(&a).is_empty());
            assert_eq!(a, t.params(p));
        }
        let phi = s.tangent_biholomorphism(2, 4, true);
        assert!(phi.is_dicritical());
        let psi = s.tangent_biholomorphism(3, 4, false);
        assert!(!psi.is_dicritical());
        assert_eq!(psi.nonlinear_order(), Some(3));
        assert!(s.darboux_multiplicities(6).validate(6).is_ok());
    }
}
