//! Exact linear algebra: fraction-free elimination, solution sets, ranks and
//! reusable elimination operators.

use num_traits::{One, Zero};

use super::rational::Rational;
use super::ring::{FractionField, IntegralDomain, Ring};

use crate::error::{Error, Result};

/// Particular solution (free variables set to zero) and a kernel basis.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearSolution<F> {
    pub particular: Vec<F>,
    pub kernel: Vec<Vec<F>>,
    pub pivots: Vec<usize>,
}

/// Fraction-free (Bareiss) forward elimination in place.
///
/// Pivots are chosen as the first nonzero entry scanning columns left to
/// right and rows top to bottom. Only the first `ncols_elim` columns are
/// eligible as pivots; later columns (e.g. right-hand sides) are carried along.
/// Returns the pivot column of each pivot row.
pub fn bareiss_forward<D: IntegralDomain>(a: &mut [Vec<D>], ncols_elim: usize) -> Vec<usize> {
    let n = a.len();
    let width = a.first().map(|r| r.len()).unwrap_or(0);
    let mut pivots = Vec::new();
    let mut prev = D::one();
    let mut k = 0;
    for col in 0..ncols_elim {
        if k >= n {
            break;
        }
        let Some(pr) = (k..n).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(k, pr);
        let pivot = a[k][col].clone();
        for i in (k + 1)..n {
            let factor = a[i][col].clone();
            for j in (col + 1)..width {
                let v = pivot.mul_ref(&a[i][j]).sub_ref(&factor.mul_ref(&a[k][j]));
                a[i][j] = v.div_exact(&prev);
            }
            a[i][col] = D::zero();
        }
        // entries of row k left of col are zero; keep columns right of col in
        // the same fraction-free scale for later steps
        prev = pivot;
        pivots.push(col);
        k += 1;
    }
    pivots
}

/// Clears denominators row by row.
fn clear_rows<F: FractionField>(rows: &[Vec<F>]) -> Vec<Vec<F::Domain>> {
    rows.iter()
        .map(|row| {
            let mut l = <F::Domain as One>::one();
            for e in row {
                let (_, d) = e.numer_denom();
                l = F::common_multiple(&l, &d);
            }
            row.iter()
                .map(|e| {
                    let (n, d) = e.numer_denom();
                    n.mul_ref(&l.div_exact(&d))
                })
                .collect()
        })
        .collect()
}

/// Solves `M x = rhs` exactly. Kernel vectors are scaled so that their first
/// nonzero entry is 1.
pub fn solve_linear_exact<F: FractionField>(m: &[Vec<F>], rhs: &[F]) -> Result<LinearSolution<F>> {
    let nrows = m.len();
    assert_eq!(nrows, rhs.len(), "row count mismatch");
    let ncols = m.first().map(|r| r.len()).unwrap_or(0);
    let aug: Vec<Vec<F>> = m
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let mut a = clear_rows(&aug);
    let pivots = bareiss_forward(&mut a, ncols);
    let rank = pivots.len();
    for row in a.iter().skip(rank) {
        if !row[ncols].is_zero() {
            return Err(Error::Inconsistent);
        }
    }
    let af: Vec<Vec<F>> = a.iter().take(rank).map(|r| r.iter().map(F::from_domain).collect()).collect();
    let back = |b: &[F], fixed: Option<usize>| -> Vec<F> {
        let mut x = vec![F::zero(); ncols];
        if let Some(f) = fixed {
            x[f] = F::one();
        }
        for r in (0..rank).rev() {
            let pc = pivots[r];
            let mut acc = b[r].clone();
            for j in (pc + 1)..ncols {
                if !x[j].is_zero() && !af[r][j].is_zero() {
                    acc = acc.sub_ref(&af[r][j].mul_ref(&x[j]));
                }
            }
            x[pc] = acc.div_ref(&af[r][pc]);
        }
        x
    };
    let b: Vec<F> = af.iter().map(|r| r[ncols].clone()).collect();
    let particular = back(&b, None);
    let zeros = vec![F::zero(); rank];
    let mut kernel = Vec::new();
    for f in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = back(&zeros, Some(f));
        if let Some(lead) = v.iter().find(|e| !e.is_zero()).cloned() {
            let inv = lead.inv();
            v = v.iter().map(|e| e.mul_ref(&inv)).collect();
        }
        kernel.push(v);
    }
    Ok(LinearSolution { particular, kernel, pivots })
}

/// Exact rank via fraction-free elimination.
pub fn rank<F: FractionField>(m: &[Vec<F>]) -> usize {
    if m.is_empty() {
        return 0;
    }
    let ncols = m[0].len();
    let mut a = clear_rows(m);
    bareiss_forward(&mut a, ncols).len()
}

pub fn rank_rational(m: &[Vec<Rational>]) -> usize {
    rank(m)
}

/// Precomputed Gauss–Jordan transform of a rational matrix, applicable to
/// right-hand sides over any ring containing the rationals.
#[derive(Clone, Debug)]
pub struct RationalOperator {
    pub rows: usize,
    pub cols: usize,
    /// Pivot column of each pivot row of the reduced form.
    pub pivots: Vec<usize>,
    /// `T` with `T·M` in reduced row echelon form.
    transform: Vec<Vec<Rational>>,
}

impl RationalOperator {
    pub fn new(m: &[Vec<Rational>]) -> Self {
        let rows = m.len();
        let cols = m.first().map(|r| r.len()).unwrap_or(0);
        let mut a: Vec<Vec<Rational>> = m.to_vec();
        let mut t: Vec<Vec<Rational>> = (0..rows)
            .map(|i| {
                (0..rows).map(|j| if i == j { Rational::from_integer(1.into()) } else { Rational::zero() }).collect()
            })
            .collect();
        let mut pivots = Vec::new();
        let mut k = 0;
        for col in 0..cols {
            if k >= rows {
                break;
            }
            let Some(pr) = (k..rows).find(|&r| !a[r][col].is_zero()) else {
                continue;
            };
            a.swap(k, pr);
            t.swap(k, pr);
            let inv = a[k][col].recip();
            for j in 0..cols {
                a[k][j] *= &inv;
            }
            for j in 0..rows {
                t[k][j] *= &inv;
            }
            for i in 0..rows {
                if i == k || a[i][col].is_zero() {
                    continue;
                }
                let f = a[i][col].clone();
                for j in 0..cols {
                    if !a[k][j].is_zero() {
                        let d = &f * &a[k][j];
                        a[i][j] -= d;
                    }
                }
                for j in 0..rows {
                    if !t[k][j].is_zero() {
                        let d = &f * &t[k][j];
                        t[i][j] -= d;
                    }
                }
            }
            pivots.push(col);
            k += 1;
        }
        RationalOperator { rows, cols, pivots, transform: t }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// True when the solution (if any) is unique.
    pub fn full_column_rank(&self) -> bool {
        self.rank() == self.cols
    }

    /// Solution of `M x = b` with free variables zero; `Inconsistent` if none exists.
    pub fn apply<R: Ring>(&self, b: &[R]) -> Result<Vec<R>> {
        assert_eq!(b.len(), self.rows, "rhs length mismatch");
        let y: Vec<R> = self
            .transform
            .iter()
            .map(|row| {
                let mut acc = R::zero();
                for (c, bj) in row.iter().zip(b) {
                    if !c.is_zero() && !bj.is_zero() {
                        acc.add_assign(&bj.scale(c));
                    }
                }
                acc
            })
            .collect();
        if y.iter().skip(self.rank()).any(|v| !v.is_zero()) {
            return Err(Error::Inconsistent);
        }
        let mut x = vec![R::zero(); self.cols];
        for (r, &pc) in self.pivots.iter().enumerate() {
            x[pc] = y[r].clone();
        }
        Ok(x)
    }
}

/// Determinant by cofactor expansion (intended for small matrices over any ring).
pub fn det_small<R: Ring>(m: &[Vec<R>]) -> R {
    let n = m.len();
    match n {
        0 => R::one(),
        1 => m[0][0].clone(),
        2 => m[0][0].mul_ref(&m[1][1]).sub_ref(&m[0][1].mul_ref(&m[1][0])),
        _ => {
            let mut acc = R::zero();
            for j in 0..n {
                if m[0][j].is_zero() {
                    continue;
                }
                let minor = minor(m, 0, j);
                let term = m[0][j].mul_ref(&det_small(&minor));
                acc = if j % 2 == 0 { acc.add_ref(&term) } else { acc.sub_ref(&term) };
            }
            acc
        }
    }
}

fn minor<R: Ring>(m: &[Vec<R>], r: usize, c: usize) -> Vec<Vec<R>> {
    m.iter()
        .enumerate()
        .filter(|(i, _)| *i != r)
        .map(|(_, row)| row.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, e)| e.clone()).collect())
        .collect()
}

/// Adjugate matrix: `adj(M)·M = M·adj(M) = det(M)·I`.
pub fn adjugate_small<R: Ring>(m: &[Vec<R>]) -> Vec<Vec<R>> {
    let n = m.len();
    if n == 1 {
        return vec![vec![R::one()]];
    }
    let mut adj = vec![vec![R::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let c = det_small(&minor(m, i, j));
            adj[j][i] = if (i + j) % 2 == 0 { c } else { c.neg_ref() };
        }
    }
    adj
}

/// `M · v` over a ring.
pub fn mat_vec<R: Ring>(m: &[Vec<R>], v: &[R]) -> Vec<R> {
    m.iter()
        .map(|row| {
            let mut acc = R::zero();
            for (a, b) in row.iter().zip(v) {
                if !a.is_zero() && !b.is_zero() {
                    acc.add_mul(a, b);
                }
            }
            acc
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly::MultiPoly;
    use crate::algebra::ratfunc::RationalFunction;
    use crate::algebra::rational::{int, rat};

    #[test]
    fn spec_examples() {
        let id = vec![vec![int(1), int(0)], vec![int(0), int(1)]];
        let s = solve_linear_exact(&id, &[int(1), int(0)]).unwrap();
        assert_eq!(s.particular, vec![int(1), int(0)]);
        assert!(s.kernel.is_empty());
        let m = vec![vec![int(1), int(1)]];
        let s = solve_linear_exact(&m, &[int(1)]).unwrap();
        assert_eq!(s.particular, vec![int(1), int(0)]);
        assert_eq!(s.kernel, vec![vec![int(1), int(-1)]]);
        let bad = vec![vec![int(1), int(1)], vec![int(2), int(2)]];
        assert_eq!(solve_linear_exact(&bad, &[int(1), int(3)]), Err(Error::Inconsistent));
    }

    #[test]
    fn operator_and_rank() {
        let m = vec![vec![rat(1, 2), int(1), int(3)], vec![int(1), int(2), int(6)], vec![int(0), int(1), int(-1)]];
        assert_eq!(rank_rational(&m), 2);
        let op = RationalOperator::new(&m);
        assert_eq!(op.rank(), 2);
        let x = op.apply(&[int(1), int(2), int(0)]).unwrap();
        assert_eq!(mat_vec(&m, &x), vec![int(1), int(2), int(0)]);
        assert!(op.apply(&[int(1), int(3), int(0)]).is_err());
    }

    #[test]
    fn rational_function_system() {
        let t = MultiPoly::var(5);
        let rf = |p: MultiPoly| RationalFunction::from_poly(p);
        // [[t, 1], [1, t]] x = [1, 0]
        let m = vec![vec![rf(t.clone()), rf(MultiPoly::one())], vec![rf(MultiPoly::one()), rf(t.clone())]];
        let s = solve_linear_exact(&m, &[rf(MultiPoly::one()), rf(MultiPoly::zero())]).unwrap();
        let det = &(&t * &t) - &MultiPoly::one();
        assert_eq!(s.particular[0], RationalFunction::new(t.clone(), det.clone()).unwrap());
        assert_eq!(s.particular[1], RationalFunction::new(-&MultiPoly::one(), det.clone()).unwrap());
        let pm = vec![vec![t.clone(), MultiPoly::one()], vec![MultiPoly::one(), t.clone()]];
        assert_eq!(det_small(&pm), det);
        let adj = adjugate_small(&pm);
        assert_eq!(adj[0][1], -&MultiPoly::one());
    }
}
