//! Truncated power series without constant term and implicit branch extraction.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::bipoly::BiPoly;
use super::poly::MultiPoly;
use super::rational::{self, Rational};
use super::ring::Ring;
use crate::error::{Error, Result};

/// `c_1 t + c_2 t^2 + … + c_T t^T`; `coeffs[0]` is `c_1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncatedSeries {
    #[serde(with = "rational::serde_vec")]
    pub coeffs: Vec<Rational>,
}

impl TruncatedSeries {
    pub fn zero(order: usize) -> Self {
        TruncatedSeries { coeffs: vec![Rational::zero(); order] }
    }

    pub fn new(coeffs: Vec<Rational>) -> Self {
        TruncatedSeries { coeffs }
    }

    /// Truncation order `T`.
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficient of `t^j` (`j >= 1`); zero above the order.
    pub fn coeff(&self, j: usize) -> Rational {
        if j == 0 || j > self.coeffs.len() {
            Rational::zero()
        } else {
            self.coeffs[j - 1].clone()
        }
    }

    pub fn truncate(&self, order: usize) -> Self {
        let mut c = self.coeffs.clone();
        c.resize(order, Rational::zero());
        TruncatedSeries { coeffs: c }
    }

    /// Dense coefficient vector including the zero constant term, length `order + 1`.
    pub fn dense(&self) -> Vec<Rational> {
        let mut v = vec![Rational::zero()];
        v.extend(self.coeffs.iter().cloned());
        v
    }

    /// `s(p(x, y))` for a bivariate `p` without constant term, truncated at `p.deg`.
    pub fn compose_bivariate(&self, p: &BiPoly<Rational>) -> BiPoly<Rational> {
        let deg = p.deg;
        let mut out = BiPoly::zero(deg);
        let mut power = BiPoly::one(deg);
        for j in 1..=self.order().min(deg) {
            power = power.mul(p);
            let c = &self.coeffs[j - 1];
            if !c.is_zero() {
                out = out.add(&power.scale(c));
            }
        }
        out
    }

    /// Series of the polynomial `p(t)` given by coefficients `[p_0, p_1, …]` (with `p_0 = 0`).
    pub fn from_dense(v: &[Rational], order: usize) -> Result<Self> {
        if v.first().map(|c| !c.is_zero()).unwrap_or(false) {
            return Err(Error::domain("series must vanish at the origin"));
        }
        let mut coeffs: Vec<Rational> = v.iter().skip(1).take(order).cloned().collect();
        coeffs.resize(order, Rational::zero());
        Ok(TruncatedSeries { coeffs })
    }
}

impl TruncatedSeries {
    /// `self(inner(t))` truncated at the order of `inner`.
    pub fn compose(&self, inner: &TruncatedSeries) -> TruncatedSeries {
        let n = inner.order();
        let d = inner.dense();
        let mut out = vec![Rational::zero(); n + 1];
        let mut power = vec![Rational::zero(); n + 1];
        power[0] = Rational::from_integer(1.into());
        for j in 1..=self.order().min(n) {
            power = mul_dense(&power, &d, n);
            let c = &self.coeffs[j - 1];
            if !c.is_zero() {
                for (o, q) in out.iter_mut().zip(&power) {
                    *o += c * q;
                }
            }
        }
        TruncatedSeries { coeffs: out.into_iter().skip(1).collect() }
    }

    /// Compositional inverse; needs a nonzero linear coefficient.
    pub fn reverse(&self) -> Result<TruncatedSeries> {
        let n = self.order();
        let c1 = self.coeff(1);
        if c1.is_zero() {
            return Err(Error::domain("series is not invertible: zero linear term"));
        }
        // fixed-point refinement r <- r + (t - self(r)) / c1 gains one order per pass
        let mut r = TruncatedSeries::zero(n);
        for _ in 0..n {
            let e = self.compose(&r);
            for h in 1..=n {
                let target = if h == 1 { Rational::from_integer(1.into()) } else { Rational::zero() };
                r.coeffs[h - 1] += (target - e.coeff(h)) / &c1;
            }
        }
        Ok(r)
    }
}

/// Multiplies dense series `a * b` modulo `t^(n+1)`.
fn mul_dense(a: &[Rational], b: &[Rational], n: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); n + 1];
    for (i, ai) in a.iter().enumerate().take(n + 1) {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(n + 1 - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Solves `F(x, s(x)) = 0` for `s` with `s(0) = 0` modulo `x^(T+1)`.
///
/// `F` must only involve the variables `x` and `y`, vanish at the origin and
/// have `∂F/∂y (0,0) != 0`.
pub fn series_implicit_solve(f: &MultiPoly, order: usize) -> Result<TruncatedSeries> {
    let bf = BiPoly::from_xy(f, f.total_degree().unwrap_or(0) as usize);
    implicit_solve_bipoly(&bf, order)
}

pub fn implicit_solve_bipoly(f: &BiPoly<Rational>, order: usize) -> Result<TruncatedSeries> {
    if !f.get(0, 0).is_zero() {
        return Err(Error::domain("F does not vanish at the origin"));
    }
    let fy = f.get(0, 1).clone();
    if fy.is_zero() {
        return Err(Error::domain("not a graph in this orientation"));
    }
    // group F by powers of y: F = Σ_j F_j(x) y^j, F_j dense in x up to `order`
    let ymax = f.deg;
    let mut fj: Vec<Vec<Rational>> = vec![vec![Rational::zero(); order + 1]; ymax + 1];
    for (i, j) in f.support(f.deg) {
        if i <= order {
            fj[j][i] = f.get(i, j).clone();
        }
    }
    let mut s = vec![Rational::zero(); order + 1];
    for n in 1..=order {
        // coefficient of x^n in F(x, s_{<n}(x)) ; s currently has s_n = 0
        let mut acc = fj[0][n].clone();
        let mut power = vec![Rational::zero(); n + 1];
        power[0] = Rational::from_integer(1.into());
        for row in fj.iter().skip(1) {
            power = mul_dense(&power, &s, n);
            if power.iter().all(|c| c.is_zero()) {
                break;
            }
            for (i, pi) in power.iter().enumerate().take(n + 1) {
                if !pi.is_zero() && !row[n - i].is_zero() {
                    acc += &row[n - i] * pi;
                }
            }
        }
        s[n] = -acc / &fy;
    }
    TruncatedSeries::from_dense(&s, order)
}

/// Residual `F(x, s(x))` modulo `x^(T+1)`, as dense coefficients.
pub fn implicit_residual(f: &MultiPoly, s: &TruncatedSeries) -> Vec<Rational> {
    let n = s.order();
    let sd = s.dense();
    let mut out = vec![Rational::zero(); n + 1];
    for (m, c) in f.terms() {
        let i = m.exp(0) as usize;
        let j = m.exp(1) as usize;
        if i > n {
            continue;
        }
        let mut p = vec![Rational::zero(); n + 1];
        p[i] = c.clone();
        for _ in 0..j {
            p = mul_dense(&p, &sd, n);
        }
        for k in 0..=n {
            out[k].add_assign(&p[k]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::int;

    fn x() -> MultiPoly {
        MultiPoly::var(0)
    }
    fn y() -> MultiPoly {
        MultiPoly::var(1)
    }

    #[test]
    fn implicit_examples() {
        let s = series_implicit_solve(&(&y() - &x()), 3).unwrap();
        assert_eq!(s.coeffs, vec![int(1), int(0), int(0)]);
        let f = &(&y() + &x().scale(&int(2))) + &(&x() * &x());
        let s = series_implicit_solve(&f, 4).unwrap();
        assert_eq!(s.coeffs, vec![int(-2), int(-1), int(0), int(0)]);
        // y - x + y^2: independent hand expansion gives x - x^2 + 2x^3
        let f = &(&y() - &x()) + &(&y() * &y());
        let s = series_implicit_solve(&f, 3).unwrap();
        assert_eq!(s.coeffs, vec![int(1), int(-1), int(2)]);
        assert!(implicit_residual(&f, &s).iter().all(|c| c.is_zero()));
        assert!(series_implicit_solve(&(&x() + &(&y() * &y())), 3).is_err());
    }

    #[test]
    fn reversion_examples() {
        // t + t^2 inverts to t - t^2 + 2t^3 - 5t^4 (Catalan numbers with signs)
        let s = TruncatedSeries::new(vec![int(1), int(1), int(0), int(0)]);
        let r = s.reverse().unwrap();
        assert_eq!(r.coeffs, vec![int(1), int(-1), int(2), int(-5)]);
        assert_eq!(s.compose(&r).coeffs, vec![int(1), int(0), int(0), int(0)]);
        assert_eq!(r.compose(&s).coeffs, vec![int(1), int(0), int(0), int(0)]);
        assert!(TruncatedSeries::new(vec![int(0), int(1)]).reverse().is_err());
    }
}
