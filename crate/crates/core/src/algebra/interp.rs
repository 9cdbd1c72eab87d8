//! Reconstruction of weighted-homogeneous polynomials from point values.

use num_traits::Zero;

use super::linalg::RationalOperator;
use super::poly::{Monomial, MultiPoly};
use super::rational::Rational;
use super::registry::VarRegistry;
use crate::error::{Error, Result};

/// All monomials in `vars` of weighted degree exactly `d`, in a fixed order.
/// Every variable must have positive weight.
pub fn weighted_monomials(vars: &[usize], reg: &VarRegistry, d: i64) -> Vec<Monomial> {
    fn rec(vars: &[usize], reg: &VarRegistry, d: i64, acc: &mut Vec<(usize, u32)>, out: &mut Vec<Monomial>) {
        if d == 0 {
            out.push(Monomial::from_pairs(acc.iter().copied()));
            return;
        }
        let Some((&v, rest)) = vars.split_first() else {
            return;
        };
        let w = reg.weight(v);
        assert!(w > 0, "interpolation variable {} has non-positive weight", reg.name(v));
        let mut e = 0u32;
        while (e as i64) * w <= d {
            if e > 0 {
                acc.push((v, e));
            }
            rec(rest, reg, d - e as i64 * w, acc, out);
            if e > 0 {
                acc.pop();
            }
            e += 1;
        }
    }
    let mut out = Vec::new();
    if d >= 0 {
        rec(vars, reg, d, &mut Vec::new(), &mut out);
    }
    out
}

fn eval_monomial(m: &Monomial, vars: &[usize], point: &[Rational]) -> Rational {
    let mut r = Rational::from_integer(1.into());
    for (v, e) in m.pairs() {
        let pos = vars.iter().position(|&w| w == v).expect("monomial variable not in list");
        r *= num_traits::pow(point[pos].clone(), e as usize);
    }
    r
}

/// Interpolation operator for a fixed monomial basis and fixed sample points,
/// reusable for many value vectors.
#[derive(Clone, Debug)]
pub struct WeightedInterpolator {
    vars: Vec<usize>,
    basis: Vec<Monomial>,
    op: RationalOperator,
    /// Monomial values at the held-out points.
    held_out: Vec<Vec<Rational>>,
}

impl WeightedInterpolator {
    /// Number of samples needed: basis size plus two held-out points.
    pub fn required_samples(vars: &[usize], reg: &VarRegistry, d: i64) -> usize {
        weighted_monomials(vars, reg, d).len() + 2
    }

    /// `points[i]` lists the values of `vars` at sample `i`.
    pub fn new(points: &[Vec<Rational>], vars: &[usize], reg: &VarRegistry, d: i64) -> Result<Self> {
        let basis = weighted_monomials(vars, reg, d);
        let n = basis.len();
        if points.len() < n + 2 {
            return Err(Error::domain(format!("interpolation needs {} samples, got {}", n + 2, points.len())));
        }
        let rows = |pts: &[Vec<Rational>]| -> Vec<Vec<Rational>> {
            pts.iter().map(|p| basis.iter().map(|m| eval_monomial(m, vars, p)).collect()).collect()
        };
        let m = rows(&points[..n]);
        let op = RationalOperator::new(&m);
        if !op.full_column_rank() {
            return Err(Error::domain("degenerate samples"));
        }
        let held_out = rows(&points[n..]);
        Ok(WeightedInterpolator { vars: vars.to_vec(), basis, op, held_out })
    }

    pub fn basis(&self) -> &[Monomial] {
        &self.basis
    }

    pub fn vars(&self) -> &[usize] {
        &self.vars
    }

    /// Interpolates values given at the same points passed to [`Self::new`].
    pub fn interpolate(&self, values: &[Rational]) -> Result<MultiPoly> {
        let n = self.basis.len();
        let coeffs = self.op.apply(&values[..n]).map_err(|_| Error::domain("degenerate samples"))?;
        for (row, v) in self.held_out.iter().zip(&values[n..]) {
            let mut s = Rational::zero();
            for (a, c) in row.iter().zip(&coeffs) {
                s += a * c;
            }
            if &s != v {
                return Err(Error::structural("degree bound violated"));
            }
        }
        Ok(MultiPoly::from_terms(self.basis.iter().cloned().zip(coeffs)))
    }
}

/// One-shot interpolation of a weighted-homogeneous polynomial of degree `d`
/// in `vars` from `(point, value)` samples.
pub fn interpolate_weighted_poly(
    samples: &[(Vec<Rational>, Rational)],
    d: i64,
    vars: &[usize],
    reg: &VarRegistry,
) -> Result<MultiPoly> {
    let points: Vec<Vec<Rational>> = samples.iter().map(|(p, _)| p.clone()).collect();
    let values: Vec<Rational> = samples.iter().map(|(_, v)| v.clone()).collect();
    WeightedInterpolator::new(&points, vars, reg, d)?.interpolate(&values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::int;

    #[test]
    fn monomial_counts() {
        let reg = VarRegistry::new(7);
        let l2: Vec<usize> = reg.level_entries(2).iter().map(|&(_, i)| i).collect();
        let l3: Vec<usize> = reg.level_entries(3).iter().map(|&(_, i)| i).collect();
        assert_eq!(weighted_monomials(&l2, &reg, 0).len(), 1);
        assert_eq!(weighted_monomials(&l2, &reg, 1).len(), 3);
        let mut both = l2.clone();
        both.extend(&l3);
        // weight 2: 6 quadratics in level 2 plus 2 linear level-3 entries
        assert_eq!(weighted_monomials(&both, &reg, 2).len(), 8);
    }

    #[test]
    fn interpolation_examples() {
        let reg = VarRegistry::new(6);
        let (a22, a23) = (reg.a(2, 2), reg.a(2, 3));
        let vars = [a22, a23];
        let f = |p: &[Rational]| int(3) * &p[0] - int(5) * &p[1];
        let pts = vec![vec![int(1), int(2)], vec![int(3), int(-1)], vec![int(2), int(7)], vec![int(-4), int(5)]];
        let samples: Vec<_> = pts.iter().map(|p| (p.clone(), f(p))).collect();
        let poly = interpolate_weighted_poly(&samples, 1, &vars, &reg).unwrap();
        let expect = &MultiPoly::var(a22).scale(&int(3)) - &MultiPoly::var(a23).scale(&int(5));
        assert_eq!(poly, expect);
        // constant
        let samples: Vec<_> = pts.iter().take(3).map(|p| (p.clone(), int(4))).collect();
        assert_eq!(interpolate_weighted_poly(&samples, 0, &vars, &reg).unwrap(), MultiPoly::constant(int(4)));
        // wrong degree bound is detected on held-out samples
        let g = |p: &[Rational]| &p[0] * &p[0];
        let samples: Vec<_> = pts.iter().map(|p| (p.clone(), g(p))).collect();
        assert_eq!(
            interpolate_weighted_poly(&samples, 1, &vars, &reg),
            Err(Error::structural("degree bound violated"))
        );
    }
}
