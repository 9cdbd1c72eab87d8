//! Symbolic generator sets and their structural checks.

use std::collections::BTreeMap;

use num_traits::Zero;
use rayon::prelude::*;

use crate::algebra::interp::{weighted_monomials, WeightedInterpolator};
use crate::algebra::linalg::rank_rational;
use crate::algebra::poly::MultiPoly;
use crate::algebra::rational::{format_rational, is_integer, Rational};
use crate::algebra::registry::VarRegistry;
use crate::error::{Error, Result};
use crate::normal_form::{ensure_valid, symbolic_entry, Multiplicities, ParamMatrix};
use crate::sampling::Sampler;

use super::derivation::{DerivationOnA, PlaneVectorField};
use super::solver::{
    ensure_no_level_one, forward_solve, solve_generators_sliced, x00_closed_form, ColumnSystem, LeadingBlocks,
    SolveDiagnostics,
};

#[derive(Clone, Debug)]
pub struct Generator {
    pub i: usize,
    pub j: usize,
    pub x: DerivationOnA,
    pub z: PlaneVectorField,
    pub diagnostics: SolveDiagnostics,
}

/// All generators `X_{i,j}`, `i + j <= p - 4`, for a fixed first line.
#[derive(Clone, Debug)]
pub struct GeneratorSet {
    pub p: usize,
    pub n: Multiplicities,
    pub first_line: Vec<Rational>,
    pub reg: VarRegistry,
    pub generators: Vec<Generator>,
}

/// How symbolic coefficients are obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Forward substitution with polynomial right-hand sides.
    Direct,
    /// Numeric solves at seeded random points, then weighted interpolation.
    Interpolation { seed: u64 },
}

/// Index pairs `(i, j)` with `i + j <= p - 4`, ordered by `i + j` then `j`.
pub fn generator_indices(p: usize) -> Vec<(usize, usize)> {
    let mut v = Vec::new();
    if p >= 4 {
        for s in 0..=p - 4 {
            for j in 0..=s {
                v.push((s - j, j));
            }
        }
    }
    v
}

impl GeneratorSet {
    pub fn get(&self, i: usize, j: usize) -> Option<&Generator> {
        self.generators.iter().find(|g| (g.i, g.j) == (i, j))
    }

    pub fn x00(&self) -> &DerivationOnA {
        &self.get(0, 0).expect("X_{0,0} is always present").x
    }

    pub fn fields(&self) -> impl Iterator<Item = &DerivationOnA> {
        self.generators.iter().map(|g| &g.x)
    }

    /// Dense point for a parameter matrix sharing this set's first line.
    pub fn point(&self, a: &ParamMatrix) -> Result<Vec<Rational>> {
        if a.p != self.p || a.first_line() != self.first_line {
            return Err(Error::domain("sample point does not match the generator set's first line"));
        }
        Ok(a.point(&self.reg))
    }

    /// Generator values at a point, one row per generator.
    pub fn eval(&self, point: &[Rational]) -> Result<Vec<Vec<Rational>>> {
        self.generators.iter().map(|g| g.x.eval(&self.reg, point)).collect()
    }
}

fn validate_first_line(p: usize, a1: &[Rational]) -> Result<ParamMatrix> {
    if p < 4 {
        return Err(Error::domain(format!("p must be at least 4, got {p}")));
    }
    let a = ParamMatrix::with_first_line(p, a1)?;
    ensure_valid(&a)?;
    Ok(a)
}

pub fn generators_symbolic(p: usize, n: &Multiplicities, a1: &[Rational], strategy: Strategy) -> Result<GeneratorSet> {
    validate_first_line(p, a1)?;
    n.validate(p)?;
    match strategy {
        Strategy::Direct => generators_direct(p, n, a1, p - 2),
        Strategy::Interpolation { seed } => generators_interpolated(p, n, a1, seed),
    }
}

fn x00_ratio(x: &DerivationOnA, p: usize, n: &Multiplicities, reg: &VarRegistry) -> Option<String> {
    let closed = x00_closed_form(p, n, reg).ok()?;
    if closed.is_zero() {
        return x.is_zero().then(|| "0".to_string());
    }
    x.ratio_to(&closed).map(|r| format_rational(&(r / n.total())))
}

/// Generators projected to levels `<= max_level`. Slice `s` of the system
/// determines level `s` exactly, so the projection needs no higher slices.
pub fn generators_to_level(p: usize, n: &Multiplicities, a1: &[Rational], max_level: usize) -> Result<GeneratorSet> {
    validate_first_line(p, a1)?;
    n.validate(p)?;
    generators_direct(p, n, a1, max_level.clamp(1, p - 2))
}

fn generators_direct(p: usize, n: &Multiplicities, a1: &[Rational], max_slice: usize) -> Result<GeneratorSet> {
    let reg = VarRegistry::new(p);
    let blocks = LeadingBlocks::new(p, a1, &n.values, max_slice)?;
    let sys = ColumnSystem::<MultiPoly>::new(p, &n.values, max_slice + p - 1, symbolic_entry(&reg, a1));
    let generators = generator_indices(p)
        .into_par_iter()
        .map(|(i, j)| solve_direct(i, j, n, &reg, &sys, &blocks))
        .collect::<Result<Vec<_>>>()?;
    Ok(GeneratorSet { p, n: n.clone(), first_line: a1.to_vec(), reg, generators })
}

/// One symbolic generator `X_{i,j}` over all levels.
pub fn generator_symbolic(
    i: usize,
    j: usize,
    p: usize,
    n: &Multiplicities,
    a1: &[Rational],
) -> Result<(Generator, VarRegistry)> {
    validate_first_line(p, a1)?;
    n.validate(p)?;
    if i + j + 4 > p {
        return Err(Error::domain(format!("X_{{{i},{j}}} needs i + j <= p - 4")));
    }
    let reg = VarRegistry::new(p);
    let blocks = LeadingBlocks::new(p, a1, &n.values, p - 2)?;
    let sys = ColumnSystem::<MultiPoly>::new(p, &n.values, 2 * p - 3, symbolic_entry(&reg, a1));
    let g = solve_direct(i, j, n, &reg, &sys, &blocks)?;
    Ok((g, reg))
}

fn solve_direct(
    i: usize,
    j: usize,
    n: &Multiplicities,
    reg: &VarRegistry,
    sys: &ColumnSystem<MultiPoly>,
    blocks: &LeadingBlocks,
) -> Result<Generator> {
    let p = reg.p();
    let sol = forward_solve(sys, blocks, &sys.rhs(i, j))?;
    ensure_no_level_one(&sol.x)?;
    let x = DerivationOnA::from_components(p, sol.x.into_iter().filter(|((k, _), _)| *k >= 2));
    let x00 = if (i, j) == (0, 0) { x00_ratio(&x, p, n, reg) } else { None };
    let max_slice = blocks.max_slice();
    Ok(Generator {
        i,
        j,
        z: PlaneVectorField { alpha: sol.alpha.to_poly(), beta: sol.beta.to_poly(), degree: max_slice },
        diagnostics: SolveDiagnostics {
            d_used: max_slice + p - 1,
            x_kernel_dim: 0,
            x00_ratio: x00,
            strategy: "direct".into(),
        },
        x,
    })
}

/// Variables a level-`nu` coefficient may involve (levels `2..=nu`).
fn interpolation_vars(reg: &VarRegistry, nu: usize) -> Vec<usize> {
    (2..=nu).flat_map(|k| reg.level_entries(k).into_iter().map(|(_, v)| v)).collect()
}

fn generators_interpolated(p: usize, n: &Multiplicities, a1: &[Rational], seed: u64) -> Result<GeneratorSet> {
    let reg = VarRegistry::new(p);
    let max_slice = p - 2;
    let blocks = LeadingBlocks::new(p, a1, &n.values, max_slice)?;
    let indices = generator_indices(p);
    // interpolation problems keyed by (level, degree)
    let mut problems: BTreeMap<(usize, i64), Vec<usize>> = BTreeMap::new();
    for &(i, j) in &indices {
        for nu in 2..=p - 3 {
            let d = nu as i64 - 1 - (i + j) as i64;
            if d >= 0 {
                problems.entry((nu, d)).or_insert_with(|| interpolation_vars(&reg, nu));
            }
        }
    }
    let needed = problems.iter().map(|((_, d), vars)| weighted_monomials(vars, &reg, *d).len() + 2).max().unwrap_or(2);
    let mut sampler = Sampler::new(seed);
    for _attempt in 0..4 {
        let points: Vec<ParamMatrix> = (0..needed).map(|_| sampler.params_with_first_line(p, a1)).collect();
        let dense: Vec<Vec<Rational>> = points.iter().map(|a| a.point(&reg)).collect();
        let mut interps = BTreeMap::new();
        let mut degenerate = false;
        for (key, vars) in &problems {
            let pts: Vec<Vec<Rational>> =
                dense.iter().map(|pt| vars.iter().map(|&v| pt[v].clone()).collect()).collect();
            match WeightedInterpolator::new(&pts, vars, &reg, key.1) {
                Ok(it) => {
                    interps.insert(*key, it);
                }
                Err(e) if !e.is_structural() => {
                    degenerate = true;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        if degenerate {
            continue;
        }
        let values: Vec<Vec<BTreeMap<(usize, usize), Rational>>> =
            points.par_iter().map(|a| solve_generators_sliced(&indices, a, n, &blocks)).collect::<Result<Vec<_>>>()?;
        let mut generators = Vec::new();
        for (gi, &(i, j)) in indices.iter().enumerate() {
            let mut x = DerivationOnA::zero(p);
            for (k, l, _) in reg.a_entries() {
                if k < 2 {
                    continue;
                }
                let vals: Vec<Rational> =
                    values.iter().map(|v| v[gi].get(&(k, l)).cloned().unwrap_or_else(Rational::zero)).collect();
                let d = k as i64 - 1 - (i + j) as i64;
                if d < 0 {
                    if vals.iter().any(|v| !v.is_zero()) {
                        return Err(Error::structural(format!(
                            "X_{{{i},{j}}} has a nonzero component below its initial level"
                        )));
                    }
                    continue;
                }
                let poly = interps[&(k, d)].interpolate(&vals).map_err(|e| {
                    if e.is_structural() {
                        Error::structural("homogeneity bound violated")
                    } else {
                        e
                    }
                })?;
                x.set(k, l, poly);
            }
            let x00 = if (i, j) == (0, 0) { x00_ratio(&x, p, n, &reg) } else { None };
            generators.push(Generator {
                i,
                j,
                x,
                z: PlaneVectorField { alpha: MultiPoly::zero(), beta: MultiPoly::zero(), degree: 0 },
                diagnostics: SolveDiagnostics {
                    d_used: max_slice + p - 1,
                    x_kernel_dim: 0,
                    x00_ratio: x00,
                    strategy: "interpolation".into(),
                },
            });
        }
        return Ok(GeneratorSet { p, n: n.clone(), first_line: a1.to_vec(), reg, generators });
    }
    Err(Error::domain("degenerate samples after repeated resampling"))
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RankReport {
    pub total: usize,
    pub expected_total: i64,
    /// Rank of the initial parts `{X^m_{i,j} : i + j = m − 2}` per level `m`.
    pub per_level: BTreeMap<usize, usize>,
    pub expected_per_level: BTreeMap<usize, usize>,
}

/// Expected initial rank on level `m`: `min(m − 1, p − m − 2)`.
pub fn expected_level_rank(p: usize, m: usize) -> usize {
    (m - 1).min(p - m - 2)
}

pub fn generic_rank(g: &GeneratorSet, sample: &ParamMatrix) -> Result<RankReport> {
    let point = g.point(sample)?;
    let rows = g.eval(&point)?;
    let starts: Vec<usize> = g.generators.iter().map(|gen| gen.i + gen.j + 2).collect();
    rank_report(g.p, &g.reg, &starts, &rows)
}

/// [`generic_rank`] from generator values solved numerically at the point,
/// without building symbolic generators.
pub fn rank_at_point(a: &ParamMatrix, n: &Multiplicities) -> Result<RankReport> {
    let p = a.p;
    ensure_valid(a)?;
    n.validate(p)?;
    let reg = VarRegistry::new(p);
    let indices = generator_indices(p);
    let blocks = LeadingBlocks::new(p, &a.first_line(), &n.values, p - 2)?;
    let values = solve_generators_sliced(&indices, a, n, &blocks)?;
    let rows: Vec<Vec<Rational>> = values
        .iter()
        .map(|x| reg.a_entries().into_iter().map(|(k, l, _)| x.get(&(k, l)).cloned().unwrap_or_default()).collect())
        .collect();
    let starts: Vec<usize> = indices.iter().map(|(i, j)| i + j + 2).collect();
    rank_report(p, &reg, &starts, &rows)
}

fn rank_report(p: usize, reg: &VarRegistry, starts: &[usize], rows: &[Vec<Rational>]) -> Result<RankReport> {
    let total = rank_rational(rows);
    let entries = reg.a_entries();
    let mut per_level = BTreeMap::new();
    let mut expected_per_level = BTreeMap::new();
    for m in 2..=p - 3 {
        let cols: Vec<usize> = entries.iter().enumerate().filter(|(_, e)| e.0 == m).map(|(c, _)| c).collect();
        let block: Vec<Vec<Rational>> = starts
            .iter()
            .zip(rows)
            .filter(|(s, _)| **s == m)
            .map(|(_, r)| cols.iter().map(|&c| r[c].clone()).collect())
            .collect();
        per_level.insert(m, rank_rational(&block));
        expected_per_level.insert(m, expected_level_rank(p, m));
    }
    let d = crate::normal_form::dims(p)?;
    Ok(RankReport { total, expected_total: d.generic_rank, per_level, expected_per_level })
}

/// Checks `[X_{0,0}, X_{k,l}] = κ (k + l) X_{k,l}` with one `κ`; returns `κ`
/// (`None` when every `X_{k,l}`, `(k,l) ≠ (0,0)`, vanishes).
pub fn eigen_constant(g: &GeneratorSet) -> Result<Option<Rational>> {
    let x00 = g.x00();
    let mut kappa: Option<Rational> = None;
    for gen in g.generators.iter().filter(|gen| (gen.i, gen.j) != (0, 0)) {
        let br = x00.bracket(&gen.x, &g.reg);
        if gen.x.is_zero() {
            if !br.is_zero() {
                return Err(Error::structural("bracket with a zero field is nonzero"));
            }
            continue;
        }
        let e = br.ratio_to(&gen.x).ok_or_else(|| {
            Error::structural(format!(
                "[X00, X_{{{},{}}}] is not proportional to X_{{{},{}}}",
                gen.i, gen.j, gen.i, gen.j
            ))
        })?;
        let k = e / Rational::from_integer(((gen.i + gen.j) as i64).into());
        match &kappa {
            None => kappa = Some(k),
            Some(q) if *q != k => {
                return Err(Error::structural(format!(
                    "eigenvalue of X_{{{},{}}} breaks the common constant",
                    gen.i, gen.j
                )))
            }
            _ => {}
        }
    }
    Ok(kappa)
}

/// One member `a_{2,2}^m X_{k,l}` of the family commuting with `X_{0,0}`.
#[derive(Clone, Debug)]
pub struct CommutingField {
    pub i: usize,
    pub j: usize,
    pub exponent: u32,
    pub field: DerivationOnA,
}

pub fn commuting_family(g: &GeneratorSet) -> Result<Vec<CommutingField>> {
    let p = g.p;
    if p < 5 {
        return Ok(Vec::new());
    }
    let a22 = MultiPoly::var(g.reg.a(2, 2));
    let x00 = g.x00();
    let c = x00
        .apply(&a22, &g.reg)
        .div_exact(&a22)
        .and_then(|q| q.as_constant())
        .ok_or_else(|| Error::structural("X_{0,0}(a_{2,2}) is not a multiple of a_{2,2}"))?;
    if c.is_zero() {
        return Err(Error::structural("X_{0,0} does not move a_{2,2}"));
    }
    let kappa = eigen_constant(g)?;
    let mut out = Vec::new();
    for gen in g.generators.iter().filter(|gen| (gen.i, gen.j) != (0, 0)) {
        let s = Rational::from_integer(((gen.i + gen.j) as i64).into());
        let m = match &kappa {
            Some(k) => -(k * &s) / &c,
            None => s.clone(),
        };
        if !is_integer(&m) || m < Rational::zero() {
            return Err(Error::structural(format!(
                "no integer exponent commutes X_{{{},{}}} with X_{{0,0}}",
                gen.i, gen.j
            )));
        }
        let e: u32 = m.to_integer().try_into().map_err(|_| Error::structural("exponent out of range"))?;
        let field = gen.x.mul_poly(&a22.pow(e));
        if !x00.bracket(&field, &g.reg).is_zero() {
            return Err(Error::structural(format!(
                "a_{{2,2}}^{e} X_{{{},{}}} does not commute with X_{{0,0}}",
                gen.i, gen.j
            )));
        }
        out.push(CommutingField { i: gen.i, j: gen.j, exponent: e, field });
    }
    Ok(out)
}

/// Level-`ν` coefficients of `X_{i,j}` are weighted-homogeneous of degree `ν − 1 − (i + j)`.
pub fn check_homogeneity(g: &GeneratorSet) -> Result<()> {
    for gen in &g.generators {
        for (&(k, l), c) in gen.x.components() {
            let want = k as i64 - 1 - (gen.i + gen.j) as i64;
            match c.weighted_degree(&g.reg) {
                Some(d) if d == want => {}
                _ => {
                    return Err(Error::structural(format!(
                        "coefficient ({k},{l}) of X_{{{},{}}} is not weighted-homogeneous of degree {want}",
                        gen.i, gen.j
                    )))
                }
            }
            let max_level = c.variables().iter().filter_map(|&v| g.reg.level(v)).max().unwrap_or(0);
            let bound = if (gen.i, gen.j) == (0, 0) { k } else { k - 1 };
            if max_level > bound {
                return Err(Error::structural(format!(
                    "coefficient ({k},{l}) of X_{{{},{}}} involves level {max_level}",
                    gen.i, gen.j
                )));
            }
        }
    }
    Ok(())
}

/// Pointwise involutivity: adding all pairwise brackets never raises the rank.
pub fn check_involutive(g: &GeneratorSet, samples: &[ParamMatrix]) -> Result<()> {
    let fields: Vec<&DerivationOnA> = g.fields().collect();
    let mut brackets = Vec::new();
    for a in 0..fields.len() {
        for b in (a + 1)..fields.len() {
            brackets.push(fields[a].bracket(fields[b], &g.reg));
        }
    }
    for s in samples {
        let pt = g.point(s)?;
        let mut rows = g.eval(&pt)?;
        let r0 = rank_rational(&rows);
        for br in &brackets {
            rows.push(br.eval(&g.reg, &pt)?);
        }
        if rank_rational(&rows) != r0 {
            return Err(Error::structural("brackets leave the span of the generators"));
        }
    }
    Ok(())
}

/// Pointwise span equality of two families of vectors.
pub fn same_span(u: &[Vec<Rational>], v: &[Vec<Rational>]) -> bool {
    let ru = rank_rational(u);
    let rv = rank_rational(v);
    let mut both = u.to_vec();
    both.extend(v.iter().cloned());
    ru == rv && rank_rational(&both) == ru
}

/// Random parameter points sharing the set's first line.
pub fn random_points(g: &GeneratorSet, count: usize, seed: u64) -> Vec<ParamMatrix> {
    let mut s = Sampler::new(seed);
    (0..count).map(|_| s.params_with_first_line(g.p, &g.first_line)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{int, parse_rational_list};

    fn direct(p: usize, seed: u64) -> GeneratorSet {
        let a1 = Sampler::new(seed).first_line(p);
        generators_symbolic(p, &Multiplicities::reduced(p), &a1, Strategy::Direct).unwrap()
    }

    #[test]
    fn indices_cover_range() {
        assert_eq!(generator_indices(4), vec![(0, 0)]);
        assert_eq!(generator_indices(6), vec![(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]);
        assert!(generator_indices(3).is_empty());
    }

    #[test]
    fn p5_only_x00_acts() {
        let g = direct(5, 1);
        assert_eq!(g.generators.len(), 3);
        assert!(g.get(1, 0).unwrap().x.is_zero());
        assert!(g.get(0, 1).unwrap().x.is_zero());
        assert_eq!(g.get(0, 0).unwrap().diagnostics.x00_ratio.as_deref(), Some("-1/5"));
    }

    #[test]
    fn p6_level_three_is_linear() {
        let g = direct(6, 2);
        for (i, j) in [(1, 0), (0, 1)] {
            let c = g.get(i, j).unwrap().x.get(3, 3);
            assert!(!c.is_zero());
            assert_eq!(c.weighted_degree(&g.reg), Some(1));
            assert!(c.variables().iter().all(|&v| g.reg.level(v) == Some(2)));
        }
        check_homogeneity(&g).unwrap();
    }

    #[test]
    fn direct_matches_interpolation() {
        for p in [6, 7] {
            let a1 = Sampler::new(p as u64).first_line(p);
            let n = Multiplicities::reduced(p);
            let d = generators_symbolic(p, &n, &a1, Strategy::Direct).unwrap();
            let i = generators_symbolic(p, &n, &a1, Strategy::Interpolation { seed: 3 }).unwrap();
            for (u, v) in d.generators.iter().zip(&i.generators) {
                assert_eq!(u.x, v.x, "p={p} ({},{})", u.i, u.j);
            }
        }
    }

    #[test]
    fn eigen_constant_and_commuting_family() {
        for p in 6..=8 {
            let g = direct(p, 4);
            assert_eq!(eigen_constant(&g).unwrap(), Some(Rational::new(1.into(), (p as i64).into())));
            for f in commuting_family(&g).unwrap() {
                assert_eq!(f.exponent as usize, f.i + f.j);
            }
        }
    }

    #[test]
    fn generic_rank_matches_dimension_count() {
        for p in 6..=8 {
            let g = direct(p, 5);
            for a in random_points(&g, 2, 9) {
                let r = generic_rank(&g, &a).unwrap();
                assert_eq!(r.total as i64, r.expected_total, "p={p}");
                assert_eq!(r.per_level, r.expected_per_level, "p={p}");
                assert_eq!(rank_at_point(&a, &g.n).unwrap(), r, "p={p}");
            }
        }
    }

    #[test]
    fn involutive_at_samples() {
        let g = direct(7, 6);
        check_involutive(&g, &random_points(&g, 4, 1)).unwrap();
    }

    #[test]
    fn scaled_multiplicities_give_same_span() {
        let p = 7;
        let a1 = Sampler::new(8).first_line(p);
        let g1 = generators_symbolic(p, &Multiplicities::reduced(p), &a1, Strategy::Direct).unwrap();
        let n3 = Multiplicities::darboux(vec![Rational::new(3.into(), 2.into()); p]);
        let g3 = generators_symbolic(p, &n3, &a1, Strategy::Direct).unwrap();
        for a in random_points(&g1, 3, 2) {
            let pt = g1.point(&a).unwrap();
            assert!(same_span(&g1.eval(&pt).unwrap(), &g3.eval(&pt).unwrap()));
        }
    }

    #[test]
    fn p9_level_three_a33_entry() {
        let p = 9;
        let a1 = parse_rational_list("-1,2,-2,1/4,-1/4,1/3").unwrap();
        let g = generators_symbolic(p, &Multiplicities::reduced(p), &a1, Strategy::Direct).unwrap();
        let (a22, a23) = (MultiPoly::var(g.reg.a(2, 2)), MultiPoly::var(g.reg.a(2, 3)));
        let ninth = Rational::new((-1).into(), 9.into());
        assert_eq!(g.get(1, 0).unwrap().x.get(3, 3), (&a22 + &a23).scale(&ninth));
        let x10 = &g.get(1, 0).unwrap().x;
        let x01 = &g.get(0, 1).unwrap().x;
        let low = |x: &DerivationOnA| x.level_projection(2).unwrap().add(&x.level_projection(3).unwrap());
        assert!(low(x01).bracket(&low(x10), &g.reg).is_zero());
        // the full bracket lives where every coordinate field belongs to the distribution
        assert!(x01.bracket(x10, &g.reg).components().all(|((k, _), _)| *k >= 4));
        assert_eq!(g.get(0, 0).unwrap().diagnostics.x00_ratio.as_deref(), Some("-1/9"));
        assert_eq!(eigen_constant(&g).unwrap(), Some(Rational::new(1.into(), 9.into())));
    }

    #[test]
    fn truncation_keeps_lower_levels() {
        let p = 8;
        let a1 = Sampler::new(12).first_line(p);
        let n = Multiplicities::reduced(p);
        let full = generators_symbolic(p, &n, &a1, Strategy::Direct).unwrap();
        let low = generators_to_level(p, &n, &a1, 3).unwrap();
        for (u, v) in full.generators.iter().zip(&low.generators) {
            let keep = |x: &DerivationOnA| x.level_projection(2).unwrap().add(&x.level_projection(3).unwrap());
            assert_eq!(keep(&u.x), v.x);
        }
    }

    #[test]
    fn rejects_bad_first_line() {
        let a1 = vec![int(1), int(2), int(3)];
        assert!(generators_symbolic(6, &Multiplicities::reduced(6), &a1, Strategy::Direct).is_err());
    }
}
