//! Degree-sliced solver for `X·N = Z·N + x^i y^j N`.
//!
//! With `P_m` the branches, `Q_m = Π_{r≠m} P_r`, `Π = Π_m P_m` and
//! `W_x = Σ λ_m ∂_x P_m Q_m`, `W_y = Σ λ_m ∂_y P_m Q_m`, the equation is
//! used in the cleared form
//!
//! `Σ_{k,l} X_{k,l} λ_{l+3} x^k Q_{l+3} − α W_x − β W_y = x^i y^j Π`.
//!
//! An unknown of slice `s` (`X_{s,·}`, or a degree-`s` coefficient of `α, β`)
//! first appears in degree `s + p − 1`, where its coefficients only depend on
//! the first line. Slices `1..=p-2` are square, so the equation is solved by
//! forward substitution with one precomputed rational operator per slice.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::algebra::bipoly::BiPoly;
use crate::algebra::linalg::{solve_linear_exact, RationalOperator};
use crate::algebra::poly::{Monomial, MultiPoly};
use crate::algebra::rational::Rational;
use crate::algebra::registry::VarRegistry;
use crate::algebra::ring::Ring;
use crate::error::{Error, Result};
use crate::normal_form::{branch_factors, ensure_valid, Multiplicities, ParamMatrix};

use super::derivation::{DerivationOnA, PlaneVectorField};

/// One scalar unknown of the linear system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Unknown {
    /// `X_{k,l}`.
    X(usize, usize),
    /// Coefficient of `x^a y^b` in `α`.
    Alpha(usize, usize),
    /// Coefficient of `x^a y^b` in `β`.
    Beta(usize, usize),
}

impl Unknown {
    pub fn slice(&self) -> usize {
        match *self {
            Unknown::X(k, _) => k,
            Unknown::Alpha(a, b) | Unknown::Beta(a, b) => a + b,
        }
    }
}

/// Unknowns of slice `s`, in column order.
pub fn slice_unknowns(p: usize, s: usize) -> Vec<Unknown> {
    let mut v = Vec::new();
    if s >= 1 && s + 3 <= p {
        v.extend((s..=p - 3).map(|l| Unknown::X(s, l)));
    }
    v.extend((0..=s).map(|b| Unknown::Alpha(s - b, b)));
    v.extend((0..=s).map(|b| Unknown::Beta(s - b, b)));
    v
}

/// Products attached to one parameter point (numeric or symbolic), exact up to degree `deg`.
#[derive(Clone, Debug)]
pub struct ColumnSystem<C> {
    pub p: usize,
    pub deg: usize,
    pub lambda: Vec<Rational>,
    pub q: Vec<BiPoly<C>>,
    pub pi: BiPoly<C>,
    pub wx: BiPoly<C>,
    pub wy: BiPoly<C>,
}

impl<C: Ring> ColumnSystem<C> {
    pub fn new(p: usize, lambda: &[Rational], deg: usize, entry: impl Fn(usize, usize) -> C) -> Self {
        let branches = branch_factors(p, deg + 1, entry);
        let mut prefix = vec![BiPoly::one(deg + 1)];
        for b in &branches {
            let next = prefix.last().unwrap().mul(b);
            prefix.push(next);
        }
        let mut suffix = vec![BiPoly::one(deg + 1); p + 1];
        for m in (0..p).rev() {
            suffix[m] = branches[m].mul(&suffix[m + 1]);
        }
        let q: Vec<BiPoly<C>> = (0..p).map(|m| prefix[m].mul(&suffix[m + 1]).truncate(deg)).collect();
        let pi = prefix[p].truncate(deg);
        let mut wx = BiPoly::zero(deg);
        let mut wy = BiPoly::zero(deg);
        for m in 0..p {
            wx = wx.add(&branches[m].derivative_x().mul(&q[m]).scale(&lambda[m]));
            wy = wy.add(&branches[m].derivative_y().mul(&q[m]).scale(&lambda[m]));
        }
        ColumnSystem { p, deg, lambda: lambda.to_vec(), q, pi, wx, wy }
    }

    /// Column of an unknown (the polynomial it multiplies), truncated at `deg`.
    pub fn column(&self, u: Unknown) -> BiPoly<C> {
        match u {
            Unknown::X(k, l) => self.q[l + 2].shift(k, 0).scale(&self.lambda[l + 2]),
            Unknown::Alpha(a, b) => self.wx.shift(a, b).neg(),
            Unknown::Beta(a, b) => self.wy.shift(a, b).neg(),
        }
    }

    /// `residual -= value · column(u)` for degrees `>= lo`.
    fn subtract_column(&self, residual: &mut BiPoly<C>, u: Unknown, value: &C, lo: usize) {
        match u {
            Unknown::X(k, l) => {
                let c = value.scale(&-&self.lambda[l + 2]);
                residual.add_shifted_scaled(&self.q[l + 2], k, 0, &c, lo);
            }
            Unknown::Alpha(a, b) => residual.add_shifted_scaled(&self.wx, a, b, value, lo),
            Unknown::Beta(a, b) => residual.add_shifted_scaled(&self.wy, a, b, value, lo),
        }
    }

    /// Right-hand side `x^i y^j Π`.
    pub fn rhs(&self, i: usize, j: usize) -> BiPoly<C> {
        self.pi.shift(i, j)
    }
}

/// Per-slice leading blocks; they only depend on the first line and the multiplicities.
#[derive(Clone, Debug)]
pub struct LeadingBlocks {
    pub p: usize,
    pub blocks: Vec<(Vec<Unknown>, RationalOperator)>,
}

impl LeadingBlocks {
    pub fn new(p: usize, first_line: &[Rational], lambda: &[Rational], max_slice: usize) -> Result<Self> {
        let deg = max_slice + p - 1;
        let lin = ColumnSystem::<Rational>::new(p, lambda, deg, |k, l| {
            if k == 1 {
                first_line[l - 1].clone()
            } else {
                Rational::zero()
            }
        });
        let mut blocks = Vec::with_capacity(max_slice + 1);
        for s in 0..=max_slice {
            let d = s + p - 1;
            let unknowns = slice_unknowns(p, s);
            let cols: Vec<Vec<Rational>> = unknowns.iter().map(|&u| lin.column(u).homogeneous(d).to_vec()).collect();
            let m: Vec<Vec<Rational>> = (0..=d).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect();
            let op = RationalOperator::new(&m);
            if s + 2 <= p && !op.full_column_rank() {
                return Err(Error::domain(format!("leading block of slice {s} is singular for this first line")));
            }
            blocks.push((unknowns, op));
        }
        Ok(LeadingBlocks { p, blocks })
    }

    pub fn max_slice(&self) -> usize {
        self.blocks.len() - 1
    }
}

/// Solution of the sliced system.
#[derive(Clone, Debug)]
pub struct SliceSolution<C> {
    pub x: BTreeMap<(usize, usize), C>,
    pub alpha: BiPoly<C>,
    pub beta: BiPoly<C>,
    /// Highest degree at which the equation holds exactly.
    pub degree: usize,
}

/// Forward substitution through slices `0..=blocks.max_slice()`.
pub fn forward_solve<C: Ring>(
    sys: &ColumnSystem<C>,
    blocks: &LeadingBlocks,
    rhs: &BiPoly<C>,
) -> Result<SliceSolution<C>> {
    let p = sys.p;
    let top = blocks.max_slice() + p - 1;
    if top > sys.deg {
        return Err(Error::structural("column system truncated below the requested slices"));
    }
    let mut residual = rhs.truncate(top);
    let zdeg = blocks.max_slice();
    let mut sol =
        SliceSolution { x: BTreeMap::new(), alpha: BiPoly::zero(zdeg), beta: BiPoly::zero(zdeg), degree: top };
    for d in 0..p - 1 {
        if residual.homogeneous(d).iter().any(|c| !c.is_zero()) {
            return Err(Error::structural("right-hand side has terms below the first slice"));
        }
    }
    for (s, (unknowns, op)) in blocks.blocks.iter().enumerate() {
        let d = s + p - 1;
        let b = residual.homogeneous(d).to_vec();
        let vals = op.apply(&b).map_err(|_| Error::structural(format!("no generator: slice {s} is inconsistent")))?;
        for (&u, v) in unknowns.iter().zip(&vals) {
            if v.is_zero() {
                continue;
            }
            sys.subtract_column(&mut residual, u, v, d);
            match u {
                Unknown::X(k, l) => {
                    sol.x.insert((k, l), v.clone());
                }
                Unknown::Alpha(a, bb) => sol.alpha.set(a, bb, v.clone()),
                Unknown::Beta(a, bb) => sol.beta.set(a, bb, v.clone()),
            }
        }
        if residual.homogeneous(d).iter().any(|c| !c.is_zero()) {
            return Err(Error::structural(format!("nonzero residual in degree {d}")));
        }
    }
    Ok(sol)
}

/// Diagnostics attached to a solved generator.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SolveDiagnostics {
    /// Truncation degree of the equation that was solved.
    pub d_used: usize,
    /// Dimension of the kernel projected on the X-unknowns (always 0 on success).
    pub x_kernel_dim: usize,
    /// `c` in `X_{0,0} = c · Σ (k−1) a_{k,l} ∂/∂a_{k,l}`, when applicable.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x00_ratio: Option<String>,
    pub strategy: String,
}

/// A numerically solved generator.
#[derive(Clone, Debug)]
pub struct GeneratorSolution {
    pub i: usize,
    pub j: usize,
    /// All `X_{k,l}` values, level 1 included.
    pub x: BTreeMap<(usize, usize), Rational>,
    pub z: PlaneVectorField,
    pub diagnostics: SolveDiagnostics,
}

fn ceil_abs(q: &Rational) -> usize {
    let a = q.abs();
    let c = a.numer().div_ceil(a.denom());
    c.to_usize().unwrap_or(usize::MAX / 4)
}

/// Start of the truncation schedule: `⌈|n|⌉ + p`.
pub fn initial_truncation(p: usize, n: &Multiplicities) -> usize {
    ceil_abs(&n.total()) + p
}

/// Hard cap of the truncation schedule: `⌈|n|⌉ + 8p`.
pub fn truncation_cap(p: usize, n: &Multiplicities) -> usize {
    ceil_abs(&n.total()) + 8 * p
}

fn check_range(p: usize, i: usize, j: usize) -> Result<()> {
    if i + j + 4 > p {
        return Err(Error::domain(format!("generator ({i},{j}) requires i+j <= p-4 = {}", p as i64 - 4)));
    }
    Ok(())
}

/// Solves the full jet system at a numeric point, raising the truncation until
/// the X-part is unique. This is the reference solver.
pub fn solve_generator(
    i: usize,
    j: usize,
    a: &ParamMatrix,
    n: &Multiplicities,
    cap: Option<usize>,
) -> Result<GeneratorSolution> {
    let p = a.p;
    ensure_valid(a)?;
    n.validate(p)?;
    check_range(p, i, j)?;
    let cap = cap.unwrap_or_else(|| truncation_cap(p, n));
    let mut d = initial_truncation(p, n).min(cap);
    loop {
        if let Some(sol) = solve_jet(i, j, a, n, d)? {
            return Ok(sol);
        }
        if d >= cap {
            return Err(Error::structural(format!("truncation cap exceeded (D = {cap})")));
        }
        d = (2 * d).min(cap);
    }
}

/// One jet solve at truncation `d`; `None` when the X-part is not yet unique.
fn solve_jet(i: usize, j: usize, a: &ParamMatrix, n: &Multiplicities, d: usize) -> Result<Option<GeneratorSolution>> {
    let p = a.p;
    if d + 1 < p {
        return Ok(None);
    }
    let sys = ColumnSystem::<Rational>::new(p, &n.values, d, |k, l| a.get(k, l));
    let max_slice = d + 1 - p;
    let mut unknowns = Vec::new();
    for k in 1..=p - 3 {
        unknowns.extend((k..=p - 3).map(|l| Unknown::X(k, l)));
    }
    for s in 0..=max_slice {
        unknowns.extend(slice_unknowns(p, s).into_iter().filter(|u| !matches!(u, Unknown::X(..))));
    }
    let cols: Vec<BiPoly<Rational>> = unknowns.iter().map(|&u| sys.column(u)).collect();
    let rhs = sys.rhs(i, j);
    let mut m = Vec::new();
    let mut b = Vec::new();
    for deg in (p - 1)..=d {
        for y in 0..=deg {
            let x = deg - y;
            m.push(cols.iter().map(|c| c.get(x, y).clone()).collect::<Vec<_>>());
            b.push(rhs.get(x, y).clone());
        }
    }
    let sol = match solve_linear_exact(&m, &b) {
        Ok(s) => s,
        Err(Error::Inconsistent) => return Err(Error::structural("no generator: jet system is inconsistent")),
        Err(e) => return Err(e),
    };
    let nx = unknowns.iter().filter(|u| matches!(u, Unknown::X(..))).count();
    let x_kernel: Vec<&Vec<Rational>> = sol.kernel.iter().filter(|v| v[..nx].iter().any(|c| !c.is_zero())).collect();
    if !x_kernel.is_empty() {
        return Ok(None);
    }
    let mut x = BTreeMap::new();
    let mut alpha = MultiPoly::zero();
    let mut beta = MultiPoly::zero();
    for (u, v) in unknowns.iter().zip(&sol.particular) {
        match *u {
            Unknown::X(k, l) => {
                x.insert((k, l), v.clone());
            }
            Unknown::Alpha(ea, eb) => alpha.add_term(xy(ea, eb), v.clone()),
            Unknown::Beta(ea, eb) => beta.add_term(xy(ea, eb), v.clone()),
        }
    }
    let x00_ratio = if (i, j) == (0, 0) { x00_ratio_numeric(a, &x) } else { None };
    Ok(Some(GeneratorSolution {
        i,
        j,
        x,
        z: PlaneVectorField { alpha, beta, degree: max_slice },
        diagnostics: SolveDiagnostics {
            d_used: d,
            x_kernel_dim: 0,
            x00_ratio: x00_ratio.map(|r| crate::algebra::rational::format_rational(&r)),
            strategy: "jet".into(),
        },
    }))
}

fn xy(a: usize, b: usize) -> Monomial {
    Monomial::from_pairs([(VarRegistry::X, a as u32), (VarRegistry::Y, b as u32)])
}

/// `c` with `X_{k,l} = c (k−1) a_{k,l}` for all entries, if such a `c` exists.
pub fn x00_ratio_numeric(a: &ParamMatrix, x: &BTreeMap<(usize, usize), Rational>) -> Option<Rational> {
    let mut ratio: Option<Rational> = None;
    for k in 1..=a.levels() {
        for l in k..=a.levels() {
            let v = x.get(&(k, l)).cloned().unwrap_or_else(Rational::zero);
            let base = a.get(k, l) * Rational::from_integer(((k - 1) as i64).into());
            if base.is_zero() {
                if !v.is_zero() {
                    return None;
                }
                continue;
            }
            let r = v / base;
            match &ratio {
                None => ratio = Some(r),
                Some(q) if *q != r => return None,
                _ => {}
            }
        }
    }
    Some(ratio.unwrap_or_else(Rational::zero))
}

/// Numeric generator by the sliced solver (fast path used for sampling).
pub fn solve_generator_sliced(
    i: usize,
    j: usize,
    a: &ParamMatrix,
    n: &Multiplicities,
    blocks: &LeadingBlocks,
) -> Result<SliceSolution<Rational>> {
    let p = a.p;
    check_range(p, i, j)?;
    let deg = blocks.max_slice() + p - 1;
    let sys = ColumnSystem::<Rational>::new(p, &n.values, deg, |k, l| a.get(k, l));
    let sol = forward_solve(&sys, blocks, &sys.rhs(i, j))?;
    ensure_no_level_one(&sol.x)?;
    Ok(sol)
}

/// All requested generators at one numeric point, sharing the column system.
pub fn solve_generators_sliced(
    indices: &[(usize, usize)],
    a: &ParamMatrix,
    n: &Multiplicities,
    blocks: &LeadingBlocks,
) -> Result<Vec<BTreeMap<(usize, usize), Rational>>> {
    let p = a.p;
    let deg = blocks.max_slice() + p - 1;
    let sys = ColumnSystem::<Rational>::new(p, &n.values, deg, |k, l| a.get(k, l));
    indices
        .iter()
        .map(|&(i, j)| {
            check_range(p, i, j)?;
            let sol = forward_solve(&sys, blocks, &sys.rhs(i, j))?;
            ensure_no_level_one(&sol.x)?;
            Ok(sol.x)
        })
        .collect()
}

pub(crate) fn ensure_no_level_one<C: Ring>(x: &BTreeMap<(usize, usize), C>) -> Result<()> {
    if x.iter().any(|((k, _), v)| *k == 1 && !v.is_zero()) {
        return Err(Error::structural("generator has a component on the first level"));
    }
    Ok(())
}

/// `(1/|n|) Σ_{k≥2} (k−1) a_{k,l} ∂/∂a_{k,l}`.
pub fn x00_closed_form(p: usize, n: &Multiplicities, reg: &VarRegistry) -> Result<DerivationOnA> {
    let total = n.total();
    if total.is_zero() {
        return Err(Error::domain("|n| = 0: the multiplicities must not sum to zero"));
    }
    let inv = Rational::one() / total;
    let mut d = DerivationOnA::zero(p);
    for (k, l, v) in reg.a_entries() {
        if k >= 2 {
            d.set(k, l, MultiPoly::var(v).scale(&(&inv * Rational::from_integer(((k - 1) as i64).into()))));
        }
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{int, rat};

    fn sample(p: usize) -> ParamMatrix {
        ParamMatrix::from_fn(p, |k, l| {
            if k == 1 {
                rat(2 * l as i64 + 1, 3 - l as i64 % 2)
            } else {
                rat((k * 7 + l * 3) as i64 % 11 - 4, (k + l) as i64)
            }
        })
    }

    #[test]
    fn slice_shapes() {
        for p in 5..=9 {
            for s in 1..=p - 3 {
                assert_eq!(slice_unknowns(p, s).len(), s + p, "p={p} s={s}");
            }
            assert_eq!(slice_unknowns(p, p - 2).len(), 2 * p - 2);
        }
    }

    #[test]
    fn sliced_matches_jet() {
        for p in [5usize, 6, 7] {
            let a = sample(p);
            let n = Multiplicities::reduced(p);
            let blocks = LeadingBlocks::new(p, &a.first_line(), &n.values, p - 2).unwrap();
            for i in 0..=p - 4 {
                for j in 0..=p - 4 - i {
                    let jet = solve_generator(i, j, &a, &n, None).unwrap();
                    let fast = solve_generator_sliced(i, j, &a, &n, &blocks).unwrap();
                    for (key, v) in &jet.x {
                        let w = fast.x.get(key).cloned().unwrap_or_else(Rational::zero);
                        assert_eq!(*v, w, "p={p} ({i},{j}) entry {key:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn x00_is_minus_closed_form() {
        let a = sample(7);
        let n = Multiplicities::integral(&[2, 1, 3, 1, 1, 1, 1]);
        let sol = solve_generator(0, 0, &a, &n, None).unwrap();
        assert_eq!(sol.diagnostics.x00_ratio.as_deref(), Some("-1/10"));
        let d = Multiplicities::darboux(vec![int(1), int(-1), int(1), int(-1), rat(1, 2), int(1), int(-1)]);
        let sol = solve_generator(0, 0, &a, &d, None).unwrap();
        let r = Rational::one() / d.total();
        assert_eq!(sol.diagnostics.x00_ratio, Some(crate::algebra::rational::format_rational(&-r)));
        assert!(sol.diagnostics.d_used > initial_truncation(7, &d));
    }

    #[test]
    fn p4_generator_is_zero() {
        let mut a = ParamMatrix::new(4);
        a.set(1, 1, int(3));
        let sol = solve_generator(0, 0, &a, &Multiplicities::reduced(4), None).unwrap();
        assert!(sol.x.values().all(|v| v.is_zero()));
        assert!(solve_generator(1, 0, &a, &Multiplicities::reduced(4), None).is_err());
    }

    #[test]
    fn closed_form_examples() {
        let reg = VarRegistry::new(5);
        let x = x00_closed_form(5, &Multiplicities::integral(&[2, 1, 1, 1, 1]), &reg).unwrap();
        assert_eq!(x.get(2, 2), MultiPoly::var(reg.a(2, 2)).scale(&rat(1, 6)));
        assert!(x00_closed_form(4, &Multiplicities::reduced(4), &VarRegistry::new(4)).unwrap().is_zero());
        assert!(
            x00_closed_form(5, &Multiplicities::darboux(vec![int(1), int(-1), int(1), int(-1), int(0)]), &reg).is_err()
        );
    }
}
