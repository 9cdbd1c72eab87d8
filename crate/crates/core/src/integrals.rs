//! Rational first integrals of the distribution.
//!
//! Level 2 contributes the ratios `a_{2,l}/a_{2,2}`. On a level `k >= 3` the
//! initial parts of the generators starting there pick pivot coordinates
//! `b_{k,·}`; the complementary linear forms `c_{k,·}` are killed by those
//! initial parts and become first integrals once corrected by a polynomial
//! `g_{k,n}` in the lower-level coordinates. Every integral is weighted
//! homogeneous and is made invariant under `X_{0,0}` by dividing by a power of
//! `a_{2,2}`.
//!
//! Coefficients live in the field of rational functions of the level-2
//! entries. Inverses of pivot determinants are carried as formal variables and
//! cleared only when an integral is emitted.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::linalg::{adjugate_small, det_small, mat_vec, rank_rational};
use crate::algebra::poly::{Monomial, MultiPoly};
use crate::algebra::ratfunc::RationalFunction;
use crate::algebra::rational::Rational;
use crate::algebra::registry::{VarKind, VarRegistry};
use crate::distribution::generators::{expected_level_rank, generators_to_level, GeneratorSet};
use crate::distribution::DerivationOnA;
use crate::error::{Error, Result};
use crate::normal_form::{dims, ensure_valid, integrals_on_level, top_integral_level, Multiplicities, ParamMatrix};
use crate::prenorm::{prenormalize, CurveInput};
use crate::sampling::Sampler;

const SPLIT_SEED: u64 = 0x5eed;

/// `a_{2,l}/a_{2,2}` for `l = 3..=p-3`.
pub fn level2_integrals(p: usize) -> Vec<RationalFunction> {
    if p < 6 {
        return Vec::new();
    }
    let reg = VarRegistry::new(p);
    let a22 = MultiPoly::var(reg.a(2, 2));
    (3..=p - 3)
        .map(|l| RationalFunction::new(MultiPoly::var(reg.a(2, l)), a22.clone()).expect("a_{2,2} is nonzero"))
        .collect()
}

/// Pivot/complement split of one level.
#[derive(Clone, Debug)]
pub struct LevelSplit {
    pub level: usize,
    /// Generators `(i, j)` whose initial parts span the level's pivot directions.
    pub fields: Vec<(usize, usize)>,
    /// Column `l` of each `b_{k,m}`.
    pub pivots: Vec<usize>,
    /// Column `l` of each `c_{k,n}`.
    pub complements: Vec<usize>,
    /// Determinant of the initial parts restricted to the pivots.
    pub delta: MultiPoly,
    pub adjugate: Vec<Vec<MultiPoly>>,
    /// `w_n` with `c_{k,n} = Δ a_{k,n} − Σ_m w_{n,m} b_{k,m}`.
    pub weights: Vec<Vec<MultiPoly>>,
    /// `c_{k,n}` in the `a`-variables.
    pub c_forms: Vec<MultiPoly>,
}

#[derive(Clone, Debug)]
pub struct CoordinateSplit {
    pub p: usize,
    pub levels: Vec<LevelSplit>,
}

impl CoordinateSplit {
    pub fn level(&self, k: usize) -> Option<&LevelSplit> {
        self.levels.iter().find(|s| s.level == k)
    }

    pub fn top(&self) -> usize {
        self.levels.last().map(|s| s.level).unwrap_or(2)
    }
}

/// Linear independence test for a greedy row selection.
fn extends_rank(rows: &[Vec<Rational>], candidate: &[Rational]) -> bool {
    let mut m = rows.to_vec();
    m.push(candidate.to_vec());
    rank_rational(&m) == rows.len() + 1
}

fn transpose<T: Clone>(m: &[Vec<T>]) -> Vec<Vec<T>> {
    if m.is_empty() {
        return Vec::new();
    }
    (0..m[0].len()).map(|j| m.iter().map(|r| r[j].clone()).collect()).collect()
}

/// Splits levels `3..=max_level` into pivot and complementary coordinates.
pub fn split_coordinates(g: &GeneratorSet, max_level: usize) -> Result<CoordinateSplit> {
    let p = g.p;
    let reg = &g.reg;
    let sample = Sampler::new(SPLIT_SEED).params_with_first_line(p, &g.first_line);
    let point = sample.point(reg);
    let mut levels = Vec::new();
    for k in 3..=max_level.min(p.saturating_sub(3)) {
        let cols: Vec<usize> = (k..=p - 3).collect();
        let candidates: Vec<(usize, usize)> =
            g.generators.iter().filter(|x| x.i + x.j + 2 == k).map(|x| (x.i, x.j)).collect();
        let rows: Vec<Vec<MultiPoly>> =
            candidates.iter().map(|&(i, j)| cols.iter().map(|&l| g.get(i, j).unwrap().x.get(k, l)).collect()).collect();
        let values: Vec<Vec<Rational>> =
            rows.iter().map(|r| r.iter().map(|c| c.eval(&point)).collect::<Result<Vec<_>>>()).collect::<Result<_>>()?;
        let want = expected_level_rank(p, k);
        let mut chosen = Vec::new();
        let mut chosen_vals: Vec<Vec<Rational>> = Vec::new();
        for (r, v) in values.iter().enumerate() {
            if chosen.len() < want && extends_rank(&chosen_vals, v) {
                chosen.push(r);
                chosen_vals.push(v.clone());
            }
        }
        if chosen.len() < want {
            return Err(Error::domain(format!(
                "non-generic first-line data: initial rank on level {k} is below {want}"
            )));
        }
        let cols_t = transpose(&chosen_vals);
        let mut pivots = Vec::new();
        let mut piv_vals: Vec<Vec<Rational>> = Vec::new();
        for (c, v) in cols_t.iter().enumerate() {
            if pivots.len() < want && extends_rank(&piv_vals, v) {
                pivots.push(c);
                piv_vals.push(v.clone());
            }
        }
        let vj: Vec<Vec<MultiPoly>> =
            chosen.iter().map(|&r| pivots.iter().map(|&c| rows[r][c].clone()).collect()).collect();
        let delta = det_small(&vj);
        if delta.is_zero() {
            return Err(Error::domain(format!("non-generic first-line data: pivot determinant on level {k} vanishes")));
        }
        let adjugate = adjugate_small(&vj);
        let complements: Vec<usize> = (0..cols.len()).filter(|c| !pivots.contains(c)).collect();
        let mut weights = Vec::new();
        let mut c_forms = Vec::new();
        for &c in &complements {
            let col: Vec<MultiPoly> = chosen.iter().map(|&r| rows[r][c].clone()).collect();
            let w = mat_vec(&adjugate, &col);
            let mut form = &delta * &MultiPoly::var(reg.a(k, cols[c]));
            for (m, &pc) in pivots.iter().enumerate() {
                form.sub_assign_ref(&(&w[m] * &MultiPoly::var(reg.a(k, cols[pc]))));
            }
            weights.push(w);
            c_forms.push(form);
        }
        levels.push(LevelSplit {
            level: k,
            fields: chosen.iter().map(|&r| candidates[r]).collect(),
            pivots: pivots.iter().map(|&c| cols[c]).collect(),
            complements: complements.iter().map(|&c| cols[c]).collect(),
            delta,
            adjugate,
            weights,
            c_forms,
        });
    }
    Ok(CoordinateSplit { p, levels })
}

/// One row `Y_{k,m} = α ∂/∂b_{k,m} + (components on higher c-coordinates)`.
#[derive(Clone, Debug)]
pub struct TriangularRow {
    pub level: usize,
    pub index: usize,
    /// Leading coefficient: a product of pivot determinants.
    pub alpha: MultiPoly,
    /// Levels whose determinants make up `alpha`.
    pub alpha_levels: Vec<usize>,
    pub field: DerivationOnA,
}

#[derive(Clone, Debug)]
pub struct TriangularSystem {
    pub p: usize,
    pub max_level: usize,
    pub rows: Vec<TriangularRow>,
}

impl TriangularSystem {
    pub fn row(&self, k: usize, m: usize) -> Option<&TriangularRow> {
        self.rows.iter().find(|r| r.level == k && r.index == m)
    }

    pub fn level_rows(&self, k: usize) -> impl Iterator<Item = &TriangularRow> {
        self.rows.iter().filter(move |r| r.level == k)
    }
}

fn project_up_to(x: &DerivationOnA, max_level: usize) -> DerivationOnA {
    DerivationOnA::from_components(
        x.p,
        x.components().filter(|((k, _), _)| *k <= max_level).map(|(k, c)| (*k, c.clone())),
    )
}

/// Combines the split fields so that each row has a single `∂/∂b` component.
pub fn triangularize(g: &GeneratorSet, split: &CoordinateSplit) -> Result<TriangularSystem> {
    let top = split.top();
    let mut rows: Vec<TriangularRow> = Vec::new();
    for s in &split.levels {
        for m in 0..s.pivots.len() {
            let mut field = DerivationOnA::zero(g.p);
            for (i, &(gi, gj)) in s.fields.iter().enumerate() {
                let x = project_up_to(&g.get(gi, gj).unwrap().x, top);
                field = field.add(&x.mul_poly(&s.adjugate[m][i]));
            }
            if field.components().any(|((k, _), _)| *k < s.level) {
                return Err(Error::structural(format!("field on level {} has lower-level components", s.level)));
            }
            rows.push(TriangularRow {
                level: s.level,
                index: m,
                alpha: s.delta.clone(),
                alpha_levels: vec![s.level],
                field,
            });
        }
    }
    // eliminate b-components above each level, top rows first
    for k in (3..top).rev() {
        for ri in 0..rows.len() {
            if rows[ri].level != k {
                continue;
            }
            for q in (k + 1)..=top {
                let sq = split.level(q).unwrap();
                let mut field = rows[ri].field.mul_poly(&sq.delta);
                for (m, &l) in sq.pivots.iter().enumerate() {
                    let coef = rows[ri].field.get(q, l);
                    if coef.is_zero() {
                        continue;
                    }
                    let yq = &rows.iter().find(|r| r.level == q && r.index == m).unwrap().field;
                    field = field.sub(&yq.mul_poly(&coef));
                }
                let row = &mut rows[ri];
                row.field = field;
                row.alpha = &row.alpha * &sq.delta;
                row.alpha_levels.push(q);
            }
        }
    }
    let sys = TriangularSystem { p: g.p, max_level: top, rows };
    check_triangular(&sys, split, &g.reg)?;
    Ok(sys)
}

fn check_triangular(sys: &TriangularSystem, split: &CoordinateSplit, reg: &VarRegistry) -> Result<()> {
    for row in &sys.rows {
        for s in &split.levels {
            if s.level < row.level {
                continue;
            }
            for (m, &l) in s.pivots.iter().enumerate() {
                let want = if s.level == row.level && m == row.index { row.alpha.clone() } else { MultiPoly::zero() };
                if row.field.get(s.level, l) != want {
                    return Err(Error::structural(format!(
                        "row ({},{}) keeps a b-component on level {}",
                        row.level, row.index, s.level
                    )));
                }
            }
            if s.level == row.level && s.c_forms.iter().any(|c| !row.field.apply(c, reg).is_zero()) {
                return Err(Error::structural(format!(
                    "row ({},{}) moves a c-coordinate of its own level",
                    row.level, row.index
                )));
            }
        }
    }
    Ok(())
}

/// Registry extended by `b`, `f` and inverse-determinant symbols.
#[derive(Clone, Debug)]
struct Coordinates {
    reg: VarRegistry,
    b: BTreeMap<(usize, usize), usize>,
    f: BTreeMap<(usize, usize), usize>,
    inv: BTreeMap<usize, usize>,
    delta: BTreeMap<usize, MultiPoly>,
}

impl Coordinates {
    fn new(base: &VarRegistry, split: &CoordinateSplit) -> Self {
        let mut reg = base.clone();
        let mut b = BTreeMap::new();
        let mut f = BTreeMap::new();
        let mut inv = BTreeMap::new();
        let mut delta = BTreeMap::new();
        for s in &split.levels {
            let k = s.level;
            let dw = s.delta.weighted_degree(base).unwrap_or(0);
            for m in 0..s.pivots.len() {
                b.insert((k, m), reg.push(VarKind::B(k, m + 1), k as i64 - 1));
            }
            for n in 0..s.complements.len() {
                f.insert((k, n), reg.push(VarKind::F(k, n + 1), dw + k as i64 - 1));
            }
            inv.insert(k, reg.push(VarKind::InvDelta(k), -dw));
            delta.insert(k, s.delta.clone());
        }
        Coordinates { reg, b, f, inv, delta }
    }

    /// Replaces every inverse symbol by `1/Δ`, returning a rational function.
    fn clear(&self, poly: &MultiPoly) -> Result<RationalFunction> {
        let mut exps: BTreeMap<usize, u32> = BTreeMap::new();
        for (k, &u) in &self.inv {
            let e = poly.degree_in(u);
            if e > 0 {
                exps.insert(*k, e);
            }
        }
        if exps.is_empty() {
            return Ok(RationalFunction::from_poly(poly.clone()));
        }
        let inv_vars: std::collections::BTreeSet<usize> = exps.keys().map(|k| self.inv[k]).collect();
        let mut num = MultiPoly::zero();
        for (m, c) in poly.coefficients_in(&inv_vars) {
            let mut factor = c;
            for (k, &e) in &exps {
                let have = m.exp(self.inv[k]);
                factor = &factor * &self.delta[k].pow(e - have);
            }
            num.add_assign_ref(&factor);
        }
        let mut den = MultiPoly::one();
        for (k, &e) in &exps {
            den = &den * &self.delta[k].pow(e);
        }
        RationalFunction::new(num, den)
    }

    fn is_zero(&self, poly: &MultiPoly) -> Result<bool> {
        Ok(self.clear(poly)?.num.is_zero())
    }
}

fn antiderivative(f: &MultiPoly, v: usize) -> MultiPoly {
    MultiPoly::from_terms(f.terms().map(|(m, c)| {
        let e = m.exp(v);
        (m.mul(&Monomial::var(v)), c / Rational::from_integer((e as i64 + 1).into()))
    }))
}

/// Correction terms `g_{k,n}` in `(b, f)` coordinates, level by level.
#[derive(Clone, Debug)]
pub struct IntegratedLevels {
    coords: Coordinates,
    /// `g_{k,n}` in the extended registry.
    pub corrections: BTreeMap<(usize, usize), MultiPoly>,
    /// `c_{k,n} + g_{k,n}` in the `a`-variables and inverse symbols.
    in_a: BTreeMap<(usize, usize), MultiPoly>,
}

/// Integrates every complementary coordinate on levels `3..=max_level`.
pub fn integrate_levels(g: &GeneratorSet, split: &CoordinateSplit, sys: &TriangularSystem) -> Result<IntegratedLevels> {
    let coords = Coordinates::new(&g.reg, split);
    let mut out = IntegratedLevels { coords, corrections: BTreeMap::new(), in_a: BTreeMap::new() };
    for s in &split.levels {
        for n in 0..s.complements.len() {
            let gk = integrate_level(&mut out, g, split, sys, s.level, n)?;
            out.corrections.insert((s.level, n), gk);
        }
        let back = back_substitution(&out, split, s.level)?;
        for n in 0..s.complements.len() {
            let ga = out.corrections[&(s.level, n)].substitute(&back);
            out.in_a.insert((s.level, n), &s.c_forms[n] + &ga);
        }
    }
    Ok(out)
}

/// `a`-expressions for `b` and `f` symbols of levels below `k`.
fn back_substitution(st: &IntegratedLevels, split: &CoordinateSplit, k: usize) -> Result<HashMap<usize, MultiPoly>> {
    let mut map = HashMap::new();
    for s in split.levels.iter().filter(|s| s.level < k) {
        for (m, &l) in s.pivots.iter().enumerate() {
            map.insert(st.coords.b[&(s.level, m)], MultiPoly::var(st.coords.reg.a(s.level, l)));
        }
        for n in 0..s.complements.len() {
            map.insert(st.coords.f[&(s.level, n)], st.in_a[&(s.level, n)].clone());
        }
    }
    Ok(map)
}

/// Solves `α_{k',m} ∂g/∂b_{k',m} = −Y_{k',m}(c_{k,n})` for every row below `k`,
/// checking all cross-derivative conditions.
fn integrate_level(
    st: &mut IntegratedLevels,
    g: &GeneratorSet,
    split: &CoordinateSplit,
    sys: &TriangularSystem,
    k: usize,
    n: usize,
) -> Result<MultiPoly> {
    let s = split.level(k).unwrap();
    let target = &s.c_forms[n];
    let coords = &st.coords;
    // a-variables of levels 3..k-1 in (b, f, 1/Δ) coordinates
    let mut to_bf: HashMap<usize, MultiPoly> = HashMap::new();
    for low in split.levels.iter().filter(|t| t.level < k) {
        let kk = low.level;
        let u = MultiPoly::var(coords.inv[&kk]);
        for (m, &l) in low.pivots.iter().enumerate() {
            to_bf.insert(g.reg.a(kk, l), MultiPoly::var(coords.b[&(kk, m)]));
        }
        for (nn, &l) in low.complements.iter().enumerate() {
            let mut e = MultiPoly::var(coords.f[&(kk, nn)]);
            e.sub_assign_ref(&st.corrections[&(kk, nn)]);
            for (m, w) in low.weights[nn].iter().enumerate() {
                e.add_assign_ref(&(w * &MultiPoly::var(coords.b[&(kk, m)])));
            }
            to_bf.insert(g.reg.a(kk, l), &u * &e);
        }
    }
    let mut equations: Vec<(usize, MultiPoly)> = Vec::new();
    for row in sys.rows.iter().filter(|r| r.level < k) {
        let rhs = row.field.apply(target, &g.reg);
        if rhs.variables().iter().any(|&v| g.reg.level(v).is_some_and(|lv| lv >= k)) {
            return Err(Error::structural(format!(
                "row ({},{}) acts on c_{{{k},{}}} through level >= {k}",
                row.level,
                row.index,
                n + 1
            )));
        }
        let mut r = rhs.substitute(&to_bf).scale(&-Rational::one());
        for lv in &row.alpha_levels {
            r = &r * &MultiPoly::var(coords.inv[lv]);
        }
        equations.push((coords.b[&(row.level, row.index)], r));
    }
    let mut gk = MultiPoly::zero();
    for (v, r) in &equations {
        let residual = r - &gk.derivative(*v);
        gk.add_assign_ref(&antiderivative(&residual, *v));
    }
    for (v, r) in &equations {
        if !coords.is_zero(&(&gk.derivative(*v) - r))? {
            return Err(Error::structural(format!("cross-derivative check failed for c_{{{k},{}}}", n + 1)));
        }
    }
    Ok(gk)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "camelCase")]
pub enum IntegralKind {
    /// First-line entry, fixed by the choice of tangent cone.
    CrossRatio { l: usize },
    /// `a_{2,l}/a_{2,2}`.
    LevelTwo { l: usize },
    /// Corrected complementary coordinate `c_{k,n} + g_{k,n}`.
    Level { level: usize, index: usize },
}

#[derive(Clone, Debug)]
pub struct FirstIntegral {
    pub label: String,
    pub kind: IntegralKind,
    /// Integral of the generators other than `X_{0,0}`.
    pub f: RationalFunction,
    pub weight: i64,
    /// `f / a_{2,2}^weight`, annihilated by every generator.
    pub projectivized: RationalFunction,
    /// False for the integrals the global quotient does not count.
    pub counted_in_quotient: bool,
}

#[derive(Clone, Debug)]
pub struct FirstIntegralSet {
    pub p: usize,
    pub n: Multiplicities,
    pub first_line: Vec<Rational>,
    pub reg: VarRegistry,
    pub integrals: Vec<FirstIntegral>,
    /// Highest level any integral depends on.
    pub max_level: usize,
}

impl FirstIntegralSet {
    pub fn tau(&self) -> usize {
        self.integrals.len()
    }

    /// Members counted on the quotient by the `ℂ*`-action.
    pub fn tau_prime(&self) -> usize {
        self.integrals.iter().filter(|f| f.counted_in_quotient).count()
    }
}

fn projectivize_one(f: &RationalFunction, reg: &VarRegistry) -> Result<(i64, RationalFunction)> {
    let w = f.weighted_degree(reg).ok_or_else(|| Error::structural("first integral is not weighted-homogeneous"))?;
    let a22 = MultiPoly::var(reg.a(2, 2));
    let e = w.unsigned_abs() as u32;
    let proj = match w.cmp(&0) {
        std::cmp::Ordering::Equal => f.clone(),
        std::cmp::Ordering::Greater => RationalFunction::new(f.num.clone(), &f.den * &a22.pow(e))?,
        std::cmp::Ordering::Less => RationalFunction::new(&f.num * &a22.pow(e), f.den.clone())?,
    };
    Ok((w, proj))
}

/// `τ` first integrals for a fixed first line.
pub fn first_integrals(p: usize, n: &Multiplicities, a1: &[Rational]) -> Result<FirstIntegralSet> {
    let g = generators_to_level(p, n, a1, top_integral_level(p).max(2))?;
    first_integrals_from(&g)
}

/// First integrals from generators known at least up to the top integral level.
pub fn first_integrals_from(g: &GeneratorSet) -> Result<FirstIntegralSet> {
    let p = g.p;
    let reg = g.reg.clone();
    let mut integrals = Vec::new();
    for (idx, q) in g.first_line.iter().enumerate() {
        integrals.push(FirstIntegral {
            label: format!("a_1_{}", idx + 1),
            kind: IntegralKind::CrossRatio { l: idx + 1 },
            f: RationalFunction::constant(q.clone()),
            weight: 0,
            projectivized: RationalFunction::constant(q.clone()),
            counted_in_quotient: true,
        });
    }
    for (idx, f) in level2_integrals(p).into_iter().enumerate() {
        integrals.push(FirstIntegral {
            label: format!("a_2_{}/a_2_2", idx + 3),
            kind: IntegralKind::LevelTwo { l: idx + 3 },
            projectivized: f.clone(),
            f,
            weight: 0,
            counted_in_quotient: false,
        });
    }
    let top = top_integral_level(p);
    let mut max_level = if p >= 6 { 2 } else { 1 };
    if top >= 3 && (3..=top).any(|k| integrals_on_level(p, k) > 0) {
        for gen in g.generators.iter().filter(|x| (x.i, x.j) != (0, 0)) {
            if gen.x.components().any(|((k, _), _)| *k <= 2) {
                return Err(Error::structural(format!("X_{{{},{}}} has a component on level 2", gen.i, gen.j)));
            }
        }
        let split = split_coordinates(g, top)?;
        let sys = triangularize(g, &split)?;
        let levels = integrate_levels(g, &split, &sys)?;
        for s in &split.levels {
            for n in 0..s.complements.len() {
                let f = levels.coords.clear(&levels.in_a[&(s.level, n)])?;
                let (weight, projectivized) = projectivize_one(&f, &reg)?;
                integrals.push(FirstIntegral {
                    label: format!("f_{}_{}", s.level, n + 1),
                    kind: IntegralKind::Level { level: s.level, index: n + 1 },
                    f,
                    weight,
                    projectivized,
                    counted_in_quotient: true,
                });
                max_level = s.level;
            }
        }
    }
    let expected = dims(p)?.tau as usize;
    if integrals.len() != expected {
        return Err(Error::structural(format!("emitted {} first integrals, expected {expected}", integrals.len())));
    }
    let set = FirstIntegralSet { p, n: g.n.clone(), first_line: g.first_line.clone(), reg, integrals, max_level };
    for f in &set.integrals {
        if let Some((gi, gj, _)) = verify_annihilation(&f.projectivized, g)? {
            return Err(Error::structural(format!("{} is not annihilated by X_{{{gi},{gj}}}", f.label)));
        }
    }
    Ok(set)
}

/// Replaces every integral by its weight-0 form.
pub fn projectivize(set: &FirstIntegralSet) -> Result<FirstIntegralSet> {
    let mut out = set.clone();
    for f in &mut out.integrals {
        let (w, proj) = projectivize_one(&f.f, &set.reg)?;
        if w != f.weight {
            return Err(Error::structural(format!("{} changed weight", f.label)));
        }
        f.f = proj.clone();
        f.projectivized = proj;
        f.weight = 0;
    }
    Ok(out)
}

/// First generator (with its residual numerator) that does not annihilate `f`.
pub fn verify_annihilation(f: &RationalFunction, g: &GeneratorSet) -> Result<Option<(usize, usize, MultiPoly)>> {
    for gen in &g.generators {
        let r = gen.x.apply_numerator(f, &g.reg);
        if !r.is_zero() {
            return Ok(Some((gen.i, gen.j, r)));
        }
    }
    Ok(None)
}

/// Exact rank of the Jacobian of the integral set at a point. The first-line
/// entries contribute `p - 3` unit rows; the rest are differentiated along
/// levels `>= 2`.
pub fn jacobian_rank(set: &FirstIntegralSet, a: &ParamMatrix) -> Result<usize> {
    if a.first_line() != set.first_line {
        return Err(Error::domain("sample point does not match the integral set's first line"));
    }
    let point = a.point(&set.reg);
    let vars: Vec<usize> = set.reg.a_entries().into_iter().filter(|(k, _, _)| *k >= 2).map(|(_, _, v)| v).collect();
    let mut rows = Vec::new();
    let mut fixed = 0;
    for f in &set.integrals {
        if matches!(f.kind, IntegralKind::CrossRatio { .. }) {
            fixed += 1;
            continue;
        }
        let row = gradient_at(&f.projectivized, &point, &vars)?;
        rows.push(row);
    }
    Ok(fixed + rank_rational(&rows))
}

/// Gradient of `h` with respect to `vars` at a dense point.
pub fn gradient_at(h: &RationalFunction, point: &[Rational], vars: &[usize]) -> Result<Vec<Rational>> {
    let den = h.den.eval(point)?;
    if den.is_zero() {
        return Err(Error::domain("integral undefined at the sample point"));
    }
    let num = h.num.eval(point)?;
    vars.iter()
        .map(|&v| {
            Ok((h.num.derivative(v).eval(point)? * &den - &num * h.den.derivative(v).eval(point)?) / (&den * &den))
        })
        .collect()
}

/// Invariants of a curve: its cross-ratios and the weight-0 integral values.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct InvariantTuple {
    pub p: usize,
    pub cross_ratios: Vec<String>,
    pub values: Vec<(String, String)>,
}

/// Evaluates the weight-0 integrals at a parameter point.
pub fn evaluate_invariants(set: &FirstIntegralSet, a: &ParamMatrix) -> Result<InvariantTuple> {
    ensure_valid(a)?;
    if a.p >= 5 && a.get(2, 2).is_zero() {
        return Err(Error::domain("non-generic leaf: invariants undefined at this point"));
    }
    if a.first_line() != set.first_line {
        return Err(Error::domain("parameter point does not match the integral set's first line"));
    }
    let point = a.point(&set.reg);
    let mut values = Vec::new();
    for f in set.integrals.iter().filter(|f| !matches!(f.kind, IntegralKind::CrossRatio { .. })) {
        let v = f
            .projectivized
            .eval(&point)
            .map_err(|_| Error::domain(format!("non-generic point: {} has a vanishing denominator", f.label)))?;
        values.push((f.label.clone(), crate::algebra::rational::format_rational(&v)));
    }
    Ok(InvariantTuple {
        p: a.p,
        cross_ratios: set.first_line.iter().map(crate::algebra::rational::format_rational).collect(),
        values,
    })
}

/// Computes invariants of curves, reusing integral sets per first line.
#[derive(Default)]
pub struct InvariantEngine {
    cache: HashMap<(Vec<Rational>, Vec<Rational>), FirstIntegralSet>,
}

impl InvariantEngine {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn integrals_for(&mut self, n: &Multiplicities, a1: &[Rational]) -> Result<&FirstIntegralSet> {
        let key = (a1.to_vec(), n.values.clone());
        if !self.cache.contains_key(&key) {
            let set = first_integrals(a1.len() + 3, n, a1)?;
            self.cache.insert(key.clone(), set);
        }
        Ok(&self.cache[&key])
    }

    /// Prenormalizes the curve and evaluates the integrals there.
    pub fn curve_invariants(&mut self, c: &CurveInput, max_height: usize) -> Result<InvariantTuple> {
        let p = c.p();
        let n = c.multiplicities.clone().unwrap_or_else(|| Multiplicities::reduced(p));
        let (a, _) = prenormalize(c, max_height)?;
        if p >= 5 && a.get(2, 2).is_zero() {
            return Err(Error::domain("non-generic leaf: invariants undefined at this point"));
        }
        let set = self.integrals_for(&n, &a.first_line())?;
        evaluate_invariants(set, &a)
    }
}

/// One-shot [`InvariantEngine::curve_invariants`].
pub fn curve_invariants(c: &CurveInput, max_height: usize) -> Result<InvariantTuple> {
    InvariantEngine::new().curve_invariants(c, max_height)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{int, parse_rational_list, rat};
    use crate::distribution::generators::{generators_symbolic, Strategy};
    use crate::normal_form::lambda_action;
    use crate::prenorm::{apply_biholomorphism, normal_form_curve, Biholomorphism};

    fn first_line(p: usize) -> Vec<Rational> {
        Sampler::new(p as u64).first_line(p)
    }

    #[test]
    fn level_two_ratios() {
        assert!(level2_integrals(5).is_empty());
        let reg = VarRegistry::new(9);
        let r = level2_integrals(9);
        assert_eq!(r.len(), 4);
        for (i, f) in r.iter().enumerate() {
            assert_eq!(f.weighted_degree(&reg), Some(0));
            let want = RationalFunction::new(MultiPoly::var(reg.a(2, i + 3)), MultiPoly::var(reg.a(2, 2))).unwrap();
            assert_eq!(f, &want);
        }
    }

    #[test]
    fn split_shapes_and_kernel() {
        for (p, k, pivots, complements) in [(8, 3, 2, 1), (9, 3, 2, 2), (10, 4, 3, 1)] {
            let a1 = first_line(p);
            let g = generators_to_level(p, &Multiplicities::reduced(p), &a1, k).unwrap();
            let split = split_coordinates(&g, k).unwrap();
            let s = split.level(k).unwrap();
            assert_eq!((s.pivots.len(), s.complements.len()), (pivots, complements), "p={p}");
            assert_eq!(s.delta.weighted_degree(&g.reg), Some(pivots as i64));
            // the initial part of every chosen field kills every c-form
            for &(i, j) in &s.fields {
                let x = g.get(i, j).unwrap().x.level_projection(k).unwrap();
                for c in &s.c_forms {
                    assert!(x.apply(c, &g.reg).is_zero(), "p={p} X_({i},{j})");
                }
            }
        }
    }

    #[test]
    fn triangular_rows_have_single_pivot() {
        let p = 10;
        let a1 = first_line(p);
        let g = generators_to_level(p, &Multiplicities::reduced(p), &a1, 4).unwrap();
        let split = split_coordinates(&g, 4).unwrap();
        let sys = triangularize(&g, &split).unwrap();
        assert_eq!(sys.level_rows(3).count(), 2);
        assert_eq!(sys.level_rows(4).count(), 3);
        let row = sys.row(3, 0).unwrap();
        assert_eq!(row.alpha_levels, vec![3, 4]);
        assert_eq!(row.alpha, &split.level(3).unwrap().delta * &split.level(4).unwrap().delta);
        for (m, &l) in split.level(4).unwrap().pivots.iter().enumerate() {
            assert!(row.field.get(4, l).is_zero(), "pivot {m}");
        }
        let levels = integrate_levels(&g, &split, &sys).unwrap();
        assert!(levels.corrections[&(4, 0)].variables().len() > 1);
    }

    #[test]
    fn p9_integrals_and_weights() {
        let p = 9;
        let n = Multiplicities::reduced(p);
        let a1 = parse_rational_list("-1,1/2,-1/2,1/4,-1/4,1/3").unwrap();
        let set = first_integrals(p, &n, &a1).unwrap();
        assert_eq!((set.tau(), set.tau_prime()), (12, 8));
        let full = generators_symbolic(p, &n, &a1, Strategy::Direct).unwrap();
        let x00 = full.x00().clone();
        for f in set.integrals.iter().filter(|f| matches!(f.kind, IntegralKind::Level { .. })) {
            assert_eq!(f.weight, 4, "{}", f.label);
            assert_eq!(verify_annihilation(&f.projectivized, &full).unwrap(), None, "{}", f.label);
            // the raw form is an eigenfunction of X_{0,0} with eigenvalue -w/|n|
            let lhs = x00.apply_numerator(&f.f, &full.reg);
            let eig = RationalFunction::new(f.f.num.scale(&rat(-f.weight, 9)), f.f.den.clone()).unwrap();
            let want = &eig.num * &f.f.den;
            assert_eq!(lhs, want, "{}", f.label);
        }
        let mut s = Sampler::new(3);
        for _ in 0..3 {
            let a = s.params_with_first_line(p, &a1);
            assert_eq!(jacobian_rank(&set, &a).unwrap(), 12);
        }
    }

    #[test]
    fn annihilation_witness() {
        let p = 7;
        let a1 = first_line(p);
        let g = generators_symbolic(p, &Multiplicities::reduced(p), &a1, Strategy::Direct).unwrap();
        let a22 = RationalFunction::from_poly(MultiPoly::var(g.reg.a(2, 2)));
        let (i, j, r) = verify_annihilation(&a22, &g).unwrap().unwrap();
        assert_eq!((i, j), (0, 0));
        assert_eq!(r, MultiPoly::var(g.reg.a(2, 2)).scale(&rat(-1, 7)));
    }

    #[test]
    fn invariants_are_lambda_invariant() {
        let p = 8;
        let a1 = first_line(p);
        let set = first_integrals(p, &Multiplicities::reduced(p), &a1).unwrap();
        let mut s = Sampler::new(11);
        let a = s.params_with_first_line(p, &a1);
        let base = evaluate_invariants(&set, &a).unwrap();
        for lambda in [int(2), rat(-3, 5), rat(7, 2)] {
            assert_eq!(evaluate_invariants(&set, &lambda_action(&lambda, &a).unwrap()).unwrap(), base);
        }
        let other = ParamMatrix::with_first_line(p, &first_line(p + 1)[..p - 3]).unwrap();
        assert!(evaluate_invariants(&set, &other).is_err());
    }

    #[test]
    fn curve_invariants_under_coordinate_change() {
        let mut a = ParamMatrix::new(7);
        for (l, v) in [(1, int(3)), (2, int(-2)), (3, rat(1, 2)), (4, int(5))] {
            a.set(1, l, v);
        }
        a.set(2, 2, int(2));
        a.set(2, 3, int(-1));
        a.set(2, 4, rat(1, 3));
        let c = normal_form_curve(&a, 14);
        let mut engine = InvariantEngine::new();
        let base = engine.curve_invariants(&c, 14).unwrap();
        assert_eq!(base.values[0], ("a_2_3/a_2_2".to_string(), "-1/2".to_string()));
        let x = MultiPoly::var(0);
        let y = MultiPoly::var(1);
        let phi = Biholomorphism::tangent(&x * &y, (&y * &y).scale(&int(3)));
        let moved = apply_biholomorphism(&phi, &c).unwrap();
        assert_eq!(engine.curve_invariants(&moved, 14).unwrap(), base);
        // a dicritical change lands on the leaf a_{2,2} = 0
        let dicritical = Biholomorphism::tangent(&x * &x, &x * &y);
        let mut b = a.clone();
        b.set(2, 2, int(0));
        let err = curve_invariants(&apply_biholomorphism(&dicritical, &normal_form_curve(&b, 14)).unwrap(), 14);
        assert!(matches!(err, Err(Error::Domain(m)) if m.contains("non-generic")));
    }
}
