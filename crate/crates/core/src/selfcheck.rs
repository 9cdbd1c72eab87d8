//! Self-checks of the engine's identities on seeded random data and on the
//! reference nine-branch fixtures. Shared by the acceptance test target and the
//! `selftest` command.
//!
//! Each criterion is a list of named checks. Checks marked informational
//! report related facts (for instance results at a corrected fixture) and do
//! not affect the verdict.

use std::collections::HashMap;
use std::time::Instant;

use num_traits::{One, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::poly::{Monomial, MultiPoly};
use crate::algebra::ratfunc::RationalFunction;
use crate::algebra::rational::{format_rational, int, parse_rational_list, rat, Rational};
use crate::algebra::registry::{VarKind, VarRegistry};
use crate::distribution::generators::{
    commuting_family, eigen_constant, generator_symbolic, generators_symbolic, generators_to_level, rank_at_point,
    same_span, GeneratorSet, Strategy,
};
use crate::distribution::DerivationOnA;
use crate::error::{Error, Result};
use crate::integrals::{
    curve_invariants, first_integrals, first_integrals_from, gradient_at, jacobian_rank, verify_annihilation,
    FirstIntegralSet, IntegralKind, InvariantEngine,
};
use crate::normal_form::{
    branch_polys, build_from_branches, build_normal_form, dims, lambda_action, Multiplicities, NormalForm, ParamMatrix,
};
use crate::prenorm::{
    apply_biholomorphism, default_max_height, normal_form_curve, prenormalize, Biholomorphism, BranchSeries, CurveInput,
};
use crate::sampling::Sampler;

/// First line of the nine-branch example as stated with its first jet.
pub const P9_FIRST_LINE: &str = "-1,2,-2,1/4,-1/4,1/3";
/// First line that reproduces the reference nine-branch generators.
pub const P9_FIRST_LINE_REFERENCE_VALUES: &str = "-1,1/2,-1/2,1/4,-1/4,1/3";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scope {
    /// Every range as stated.
    Full,
    /// Ranges capped at `p <= 7`, two invariance points, plus the nine-branch fixtures.
    Quick,
}

impl Scope {
    fn cap(self, p: usize) -> usize {
        match self {
            Scope::Full => p,
            Scope::Quick => p.min(7),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub informational: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CriterionReport {
    pub id: u8,
    pub title: String,
    pub passed: bool,
    pub seconds: f64,
    pub checks: Vec<Check>,
}

impl CriterionReport {
    /// One line: `criterion N [PASS|FAIL] title (t s)` plus failed checks.
    pub fn summary_line(&self) -> String {
        let failed: Vec<&str> =
            self.checks.iter().filter(|c| !c.passed && !c.informational).map(|c| c.name.as_str()).collect();
        let mut s = format!(
            "criterion {} [{}] {} ({:.1} s, {} checks)",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.title,
            self.seconds,
            self.checks.iter().filter(|c| !c.informational).count()
        );
        if !failed.is_empty() {
            s.push_str(&format!("; failed: {}", failed.join(", ")));
        }
        s
    }
}

pub const CRITERIA: [(u8, &str); 9] = [
    (1, "dimension formulas"),
    (2, "closed form of X_{0,0}"),
    (3, "nine-branch generator fixture"),
    (4, "bracket structure"),
    (5, "rank laws"),
    (6, "first integrals"),
    (7, "prenormalization"),
    (8, "end-to-end invariance"),
    (9, "quasi-homogeneity"),
];

#[derive(Default)]
struct Recorder {
    checks: Vec<Check>,
}

impl Recorder {
    fn push(&mut self, name: impl Into<String>, passed: bool, informational: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), passed, informational, detail: detail.into() });
    }

    fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.push(name, passed, false, detail);
    }

    fn info(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.push(name, passed, true, detail);
    }

    /// Records an error as a failed check and returns `None`.
    fn ok<T>(&mut self, name: &str, r: Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.check(name, false, e.to_string());
                None
            }
        }
    }
}

pub fn run_criterion(id: u8, scope: Scope, seed: u64) -> Result<CriterionReport> {
    let title = CRITERIA
        .iter()
        .find(|(i, _)| *i == id)
        .map(|(_, t)| t.to_string())
        .ok_or_else(|| Error::domain(format!("no criterion {id}")))?;
    let start = Instant::now();
    let mut rec = Recorder::default();
    let seed = seed.wrapping_mul(0x9e37_79b9).wrapping_add(id as u64);
    match id {
        1 => dimension_formulas(&mut rec),
        2 => x00_closed_form(&mut rec, scope, seed),
        3 => p9_generators(&mut rec, seed),
        4 => bracket_structure(&mut rec, scope, seed),
        5 => rank_laws(&mut rec, scope, seed),
        6 => first_integral_checks(&mut rec, scope, seed),
        7 => prenormalization(&mut rec, scope, seed),
        8 => invariance(&mut rec, scope, seed),
        _ => quasi_homogeneity(&mut rec, scope, seed),
    }
    let passed =
        rec.checks.iter().filter(|c| !c.informational).all(|c| c.passed) && rec.checks.iter().any(|c| !c.informational);
    Ok(CriterionReport { id, title, passed, seconds: start.elapsed().as_secs_f64(), checks: rec.checks })
}

/// All criteria in order; independent criteria run in parallel.
pub fn run_all(scope: Scope, seed: u64) -> Vec<CriterionReport> {
    CRITERIA.par_iter().map(|(id, _)| run_criterion(*id, scope, seed).expect("known criterion")).collect()
}

fn dimension_formulas(rec: &mut Recorder) {
    for p in 4..=12usize {
        let Some(d) = rec.ok("dims", dims(p)) else { continue };
        let pi = p as i64;
        let tau = if p % 2 == 0 { ((pi - 2) / 2).pow(2) } else { ((pi - 1) / 2) * ((pi - 3) / 2) };
        let delta = (pi - 2) * (pi - 3) / 2;
        let level_sum: i64 = d.level_dims.values().sum();
        let integral_sum: i64 = d.integrals_per_level.values().sum();
        let ok = d.delta == delta
            && d.dim_a == delta
            && d.tau == tau
            && d.tau_prime == tau - (pi - 5)
            && level_sum == d.dim_a
            && integral_sum == d.tau;
        rec.check(format!("p={p}"), ok, format!("delta={} tau={} tauPrime={}", d.delta, d.tau, d.tau_prime));
    }
    if let Some(d) = rec.ok("dims", dims(9)) {
        let ok = d.fixed_first_line_dim == 15 && d.generic_rank == 9 && d.free_integrals == 6;
        rec.check(
            "p=9 reference counts",
            ok,
            format!(
                "fixed first line dim {}, generic rank {}, free integrals {}",
                d.fixed_first_line_dim, d.generic_rank, d.free_integrals
            ),
        );
    }
    if let Some(d) = rec.ok("dims", dims(10)) {
        let ok = d.free_integrals == 9 && d.cross_ratios == 7;
        rec.check(
            "p=10 reference counts",
            ok,
            format!("{} integrals beyond {} cross-ratios", d.free_integrals, d.cross_ratios),
        );
    }
}

/// `Σ_{k>=2} (k−1) a_{k,l} ∂/∂a_{k,l}`.
fn euler_field(reg: &VarRegistry, p: usize) -> DerivationOnA {
    DerivationOnA::from_components(
        p,
        reg.a_entries()
            .into_iter()
            .filter(|(k, _, _)| *k >= 2)
            .map(|(k, l, v)| ((k, l), MultiPoly::var(v).scale(&int(k as i64 - 1)))),
    )
}

fn x00_closed_form(rec: &mut Recorder, scope: Scope, seed: u64) {
    let mut s = Sampler::new(seed);
    let mut jobs = Vec::new();
    for p in 5..=scope.cap(9) {
        let a1 = s.first_line(p);
        jobs.push((p, a1.clone(), s.integral_multiplicities(p, 4)));
        jobs.push((p, a1.clone(), s.integral_multiplicities(p, 4)));
        jobs.push((p, a1, s.darboux_multiplicities(p)));
    }
    let results: Vec<_> =
        jobs.par_iter().map(|(p, a1, n)| generator_symbolic(0, 0, *p, n, a1).map(|(g, reg)| (g.x, reg))).collect();
    for ((p, _, n), r) in jobs.iter().zip(results) {
        let name = format!("p={p} n=[{}]", n.values.iter().map(format_rational).collect::<Vec<_>>().join(","));
        let Some((x00, reg)) = rec.ok(&name, r) else { continue };
        let ratio = x00.ratio_to(&euler_field(&reg, *p));
        let inv = Rational::one() / n.total();
        let ok = ratio.as_ref().is_some_and(|c| *c == inv || *c == -inv.clone());
        let shown = ratio.map(|c| format_rational(&c)).unwrap_or_else(|| "not proportional".into());
        rec.check(name, ok, format!("ratio {shown}, 1/|n| = {}", format_rational(&inv)));
    }
}

fn poly_terms(reg: &VarRegistry, terms: &[(i64, i64, &[(usize, usize)])]) -> MultiPoly {
    MultiPoly::from_terms(terms.iter().map(|(n, d, vars)| {
        let m = vars.iter().fold(Monomial::one(), |m, &(k, l)| m.mul(&Monomial::var(reg.a(k, l))));
        (m, rat(*n, *d))
    }))
}

/// Reference level-3 parts of `X_{1,0}` and `X_{0,1}` at nine branches.
pub fn p9_reference_generators(reg: &VarRegistry) -> (DerivationOnA, DerivationOnA) {
    let x10 = [
        (3, poly_terms(reg, &[(-1, 9, &[(2, 2)]), (-1, 9, &[(2, 3)])])),
        (4, poly_terms(reg, &[(5, 72, &[(2, 2)]), (-1, 9, &[(2, 4)])])),
        (5, poly_terms(reg, &[(-5, 72, &[(2, 2)]), (-1, 9, &[(2, 5)])])),
        (6, poly_terms(reg, &[(64, 729, &[(2, 2)]), (-1, 9, &[(2, 6)])])),
    ];
    let x01 = [
        (3, poly_terms(reg, &[(1, 18, &[(2, 2)]), (-1, 18, &[(2, 3)])])),
        (4, poly_terms(reg, &[(-5, 144, &[(2, 2)]), (1, 36, &[(2, 4)])])),
        (5, poly_terms(reg, &[(5, 144, &[(2, 2)]), (-1, 36, &[(2, 5)])])),
        (6, poly_terms(reg, &[(-32, 729, &[(2, 2)]), (1, 27, &[(2, 6)])])),
    ];
    let mk = |c: [(usize, MultiPoly); 4]| DerivationOnA::from_components(9, c.into_iter().map(|(l, q)| ((3, l), q)));
    (mk(x10), mk(x01))
}

/// Which version of the reference nine-branch integral `f₆` to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum F6Variant {
    AsGiven,
    /// Signs of the `a_{2,2}a_{2,3}` and `a_{2,3}a_{2,5}` terms of the
    /// `a_{3,4}` coefficient flipped.
    SignCorrected,
}

/// Reference nine-branch integrals `f₅`, `f₆`, with the out-of-range index
/// `a_{4,2}` read as `a_{2,4}`.
pub fn p9_reference_integrals(reg: &VarRegistry, variant: F6Variant) -> (RationalFunction, RationalFunction) {
    let a3 = |l: usize| MultiPoly::var(reg.a(3, l));
    let den = MultiPoly::var(reg.a(2, 2)).pow(4);
    let shared = poly_terms(reg, &[(2, 1, &[(2, 2), (2, 4)]), (5, 1, &[(2, 2), (2, 3)]), (-6, 1, &[(2, 3), (2, 4)])]);
    let f5 = &(&(&poly_terms(
        reg,
        &[(-270, 324, &[(2, 2), (2, 6)]), (-216, 324, &[(2, 4), (2, 6)]), (512, 324, &[(2, 2), (2, 4)])],
    ) * &a3(3))
        + &(&poly_terms(
            reg,
            &[(540, 81, &[(2, 3), (2, 6)]), (-108, 81, &[(2, 2), (2, 6)]), (-512, 81, &[(2, 2), (2, 3)])],
        ) * &a3(4)))
        + &(&shared * &a3(6));
    let s = if variant == F6Variant::AsGiven { -1 } else { 1 };
    let f6 = &(&(&poly_terms(
        reg,
        &[(-1215, 324, &[(2, 2), (2, 5)]), (-405, 324, &[(2, 4), (2, 2)]), (1296, 324, &[(2, 4), (2, 5)])],
    ) * &a3(3))
        + &(&poly_terms(
            reg,
            &[(-486, 81, &[(2, 2), (2, 5)]), (405 * s, 81, &[(2, 2), (2, 3)]), (162 * s, 81, &[(2, 3), (2, 5)])],
        ) * &a3(4)))
        + &(&shared * &a3(5));
    (
        RationalFunction::new(f5, den.clone()).expect("nonzero denominator"),
        RationalFunction::new(f6, den).expect("nonzero denominator"),
    )
}

fn level3(x: &DerivationOnA) -> DerivationOnA {
    x.level_projection(3).expect("level 3 exists for p = 9")
}

fn p9_first_line(s: &str) -> Vec<Rational> {
    parse_rational_list(s).expect("valid fixture")
}

fn p9_generators(rec: &mut Recorder, seed: u64) {
    let n = Multiplicities::reduced(9);
    let a1 = p9_first_line(P9_FIRST_LINE);
    let Some(g) = rec.ok("generators", generators_to_level(9, &n, &a1, 3)) else { return };
    let (px10, px01) = p9_reference_generators(&g.reg);
    let c10 = level3(&g.get(1, 0).unwrap().x);
    let c01 = level3(&g.get(0, 1).unwrap().x);
    for (name, c, pr) in [("X_{1,0}", &c10, &px10), ("X_{0,1}", &c01, &px01)] {
        let ok = c == pr || *c == pr.scale(&int(-1));
        let mism: Vec<String> = (3..=6)
            .filter(|&l| c.get(3, l) != pr.get(3, l) && c.get(3, l) != -pr.get(3, l))
            .map(|l| {
                format!(
                    "d/da_3_{l}: computed {} reference {}",
                    c.get(3, l).display(&g.reg),
                    pr.get(3, l).display(&g.reg)
                )
            })
            .collect();
        rec.check(
            format!("{name} coefficients up to sign"),
            ok,
            if ok { "exact match".to_string() } else { mism.join("; ") },
        );
    }
    let mut s = Sampler::new(seed);
    let mut agree = 0;
    for _ in 0..20 {
        let pt = s.params_with_first_line(9, &a1).point(&g.reg);
        let ev = |x: &DerivationOnA| x.eval(&g.reg, &pt).expect("polynomial evaluation");
        if same_span(&[ev(&c10), ev(&c01)], &[ev(&px10), ev(&px01)]) {
            agree += 1;
        }
    }
    rec.check("span equality at 20 points", agree == 20, format!("{agree}/20 points agree"));
    let a33 = poly_terms(&g.reg, &[(-1, 9, &[(2, 2)]), (-1, 9, &[(2, 3)])]);
    rec.info("X_{1,0} a_3_3 entry", c10.get(3, 3) == a33, format!("computed {}", c10.get(3, 3).display(&g.reg)));
    let b1 = p9_first_line(P9_FIRST_LINE_REFERENCE_VALUES);
    if let Ok(h) = generators_to_level(9, &n, &b1, 3) {
        let ok = level3(&h.get(1, 0).unwrap().x) == px10 && level3(&h.get(0, 1).unwrap().x) == px01;
        rec.info(
            format!("first line ({P9_FIRST_LINE_REFERENCE_VALUES}) reproduces the reference generators"),
            ok,
            if ok { "all eight coefficients equal".to_string() } else { "mismatch".to_string() },
        );
    }
}

fn project_up_to(x: &DerivationOnA, max_level: usize) -> DerivationOnA {
    DerivationOnA::from_components(
        x.p,
        x.components().filter(|((k, _), _)| *k <= max_level).map(|(k, c)| (*k, c.clone())),
    )
}

fn bracket_structure(rec: &mut Recorder, scope: Scope, seed: u64) {
    let mut s = Sampler::new(seed);
    let jobs: Vec<(usize, Vec<Rational>)> = (6..=scope.cap(9)).map(|p| (p, s.first_line(p))).collect();
    let sets: Vec<_> = jobs
        .par_iter()
        .map(|(p, a1)| generators_symbolic(*p, &Multiplicities::reduced(*p), a1, Strategy::Direct))
        .collect();
    for ((p, _), g) in jobs.iter().zip(sets) {
        let Some(g) = rec.ok(&format!("p={p} generators"), g) else { continue };
        match eigen_constant(&g) {
            Ok(Some(k)) => {
                let want = rat(1, *p as i64);
                rec.check(
                    format!("p={p} common eigenvalue"),
                    k == want || k == -want.clone(),
                    format!("kappa = {}", format_rational(&k)),
                );
            }
            Ok(None) => rec.check(format!("p={p} common eigenvalue"), false, "no nonzero generator"),
            Err(e) => rec.check(format!("p={p} common eigenvalue"), false, e.to_string()),
        }
        match commuting_family(&g) {
            Ok(f) => rec.check(
                format!("p={p} commuting family"),
                f.len() + 1 == g.generators.len(),
                format!("{} fields a_2_2^m X_(k,l) commute with X_(0,0)", f.len()),
            ),
            Err(e) => rec.check(format!("p={p} commuting family"), false, e.to_string()),
        }
    }
    let a1 = p9_first_line(P9_FIRST_LINE);
    let Some(g) = rec.ok("p=9 generators", generators_symbolic(9, &Multiplicities::reduced(9), &a1, Strategy::Direct))
    else {
        return;
    };
    let x10 = &g.get(1, 0).unwrap().x;
    let x01 = &g.get(0, 1).unwrap().x;
    let low = project_up_to(x01, 3).bracket(&project_up_to(x10, 3), &g.reg);
    rec.check("p=9 [X_{0,1}, X_{1,0}] on levels <= 3", low.is_zero(), "projections commute exactly");
    let full = x01.bracket(x10, &g.reg);
    let levels: std::collections::BTreeSet<usize> = full.components().map(|((k, _), _)| *k).collect();
    rec.info("p=9 full bracket [X_{0,1}, X_{1,0}]", full.is_zero(), format!("nonzero components on levels {levels:?}"));
    let ok = levels.iter().all(|&k| k >= 4);
    rec.check(
        "p=9 full bracket lies in the span of d/da_{k,l}, k >= 4",
        ok,
        "those coordinate fields belong to the distribution at nine branches",
    );
}

fn rank_laws(rec: &mut Recorder, scope: Scope, seed: u64) {
    let mut s = Sampler::new(seed);
    let jobs: Vec<(usize, ParamMatrix)> =
        (6..=scope.cap(10)).flat_map(|p| (0..10).map(|_| (p, s.params(p))).collect::<Vec<_>>()).collect();
    let reports: Vec<_> = jobs.par_iter().map(|(p, a)| rank_at_point(a, &Multiplicities::reduced(*p))).collect();
    for p in 6..=scope.cap(10) {
        let mut good = 0;
        let mut detail = String::new();
        for ((q, _), r) in jobs.iter().zip(&reports) {
            if *q != p {
                continue;
            }
            match r {
                Ok(r) if r.total as i64 == r.expected_total && r.per_level == r.expected_per_level => good += 1,
                Ok(r) => {
                    detail = format!("rank {} (expected {}), per level {:?}", r.total, r.expected_total, r.per_level)
                }
                Err(e) => detail = e.to_string(),
            }
        }
        let d = dims(p).map(|d| d.generic_rank).unwrap_or(-1);
        rec.check(
            format!("p={p}"),
            good == 10,
            if good == 10 {
                format!("rank dimA - tau = {d} and per-level ranks min(m-1, p-m-2) at 10 points")
            } else {
                detail
            },
        );
    }
}

fn level_two_rows(set: &FirstIntegralSet, point: &[Rational], vars: &[usize]) -> Result<Vec<Vec<Rational>>> {
    set.integrals
        .iter()
        .filter(|f| matches!(f.kind, IntegralKind::LevelTwo { .. }))
        .map(|f| gradient_at(&f.projectivized, point, vars))
        .collect()
}

/// `{df₅, df₆}` and the computed level-3 integrals span the same space modulo
/// the differentials of the level-2 ratios, at `count` points.
fn fixture_span(
    set: &FirstIntegralSet,
    f5: &RationalFunction,
    f6: &RationalFunction,
    count: usize,
    seed: u64,
) -> Result<usize> {
    let vars: Vec<usize> = set.reg.a_entries().into_iter().filter(|(k, _, _)| *k >= 2).map(|(_, _, v)| v).collect();
    let mut s = Sampler::new(seed);
    let mut agree = 0;
    for _ in 0..count {
        let pt = s.params_with_first_line(9, &set.first_line).point(&set.reg);
        let base = level_two_rows(set, &pt, &vars)?;
        let mut reference = base.clone();
        reference.push(gradient_at(f5, &pt, &vars)?);
        reference.push(gradient_at(f6, &pt, &vars)?);
        let mut computed = base;
        for f in set.integrals.iter().filter(|f| matches!(f.kind, IntegralKind::Level { level: 3, .. })) {
            computed.push(gradient_at(&f.projectivized, &pt, &vars)?);
        }
        if same_span(&reference, &computed) {
            agree += 1;
        }
    }
    Ok(agree)
}

fn annihilation_detail(r: &Result<Option<(usize, usize, MultiPoly)>>) -> (bool, String) {
    match r {
        Ok(None) => (true, "annihilated".into()),
        Ok(Some((i, j, _))) => (false, format!("not annihilated by X_({i},{j})")),
        Err(e) => (false, e.to_string()),
    }
}

fn first_integral_checks(rec: &mut Recorder, scope: Scope, seed: u64) {
    let mut s = Sampler::new(seed);
    let jobs: Vec<(usize, Vec<Rational>)> = (6..=scope.cap(9)).map(|p| (p, s.first_line(p))).collect();
    let results: Vec<Result<(GeneratorSet, FirstIntegralSet)>> = jobs
        .par_iter()
        .map(|(p, a1)| {
            let n = Multiplicities::reduced(*p);
            let set = first_integrals(*p, &n, a1)?;
            let full = generators_symbolic(*p, &n, a1, Strategy::Direct)?;
            Ok((full, set))
        })
        .collect();
    for ((p, a1), r) in jobs.iter().zip(results) {
        let Some((full, set)) = rec.ok(&format!("p={p} integrals"), r) else { continue };
        let tau = dims(*p).map(|d| d.tau as usize).unwrap_or(0);
        rec.check(format!("p={p} count"), set.tau() == tau, format!("{} members, tau = {tau}", set.tau()));
        let failing: Vec<String> = set
            .integrals
            .iter()
            .filter(|f| !matches!(verify_annihilation(&f.projectivized, &full), Ok(None)))
            .map(|f| f.label.clone())
            .collect();
        rec.check(
            format!("p={p} annihilation by every generator"),
            failing.is_empty(),
            if failing.is_empty() { "exact zero for every member".to_string() } else { failing.join(", ") },
        );
        let ring = set
            .integrals
            .iter()
            .all(|f| f.projectivized.den.variables().iter().all(|&v| full.reg.level(v).is_some_and(|k| k == 2)));
        rec.check(format!("p={p} denominators in level 2"), ring, "denominators involve level-2 entries only");
        let mut ranks = Vec::new();
        for _ in 0..5 {
            let a = s.params_with_first_line(*p, a1);
            ranks.push(jacobian_rank(&set, &a).map(|r| r.to_string()).unwrap_or_else(|e| e.to_string()));
        }
        let want = tau.to_string();
        rec.check(format!("p={p} Jacobian rank"), ranks.iter().all(|r| *r == want), format!("ranks {ranks:?}"));
    }
    p9_integral_fixture(rec, seed);
}

fn p9_integral_fixture(rec: &mut Recorder, seed: u64) {
    let n = Multiplicities::reduced(9);
    for (tag, line, verdict) in
        [("stated", P9_FIRST_LINE, true), ("reference-values", P9_FIRST_LINE_REFERENCE_VALUES, false)]
    {
        let a1 = p9_first_line(line);
        let Some(g) = rec.ok("p=9 generators", generators_to_level(9, &n, &a1, 3)) else { continue };
        let Some(set) = rec.ok("p=9 integrals", first_integrals_from(&g)) else { continue };
        let push = |rec: &mut Recorder, name: String, ok: bool, detail: String| {
            if verdict {
                rec.check(name, ok, detail)
            } else {
                rec.info(name, ok, detail)
            }
        };
        let (f5, f6) = p9_reference_integrals(&g.reg, F6Variant::AsGiven);
        let (ok5, d5) = annihilation_detail(&verify_annihilation(&f5, &g));
        let (ok6, d6) = annihilation_detail(&verify_annihilation(&f6, &g));
        if ok5 && ok6 {
            push(rec, format!("p=9 reference f5, f6 ({tag} first line)"), true, "both annihilated".into());
        } else {
            rec.info(format!("p=9 reference f5, f6 ({tag} first line)"), false, format!("f5: {d5}; f6: {d6}"));
            let span = fixture_span(&set, &f5, &f6, 5, seed);
            let (ok, detail) = match span {
                Ok(k) => (k == 5, format!("{k}/5 points agree")),
                Err(e) => (false, e.to_string()),
            };
            push(rec, format!("p=9 span of df5, df6 ({tag} first line)"), ok, detail);
        }
        if !verdict {
            let (f5, f6c) = p9_reference_integrals(&g.reg, F6Variant::SignCorrected);
            let (ok, d) = annihilation_detail(&verify_annihilation(&f6c, &g));
            rec.info(format!("p=9 sign-corrected f6 ({tag} first line)"), ok, d);
            if let Ok(k) = fixture_span(&set, &f5, &f6c, 5, seed) {
                rec.info(
                    format!("p=9 span of df5, corrected df6 ({tag} first line)"),
                    k == 5,
                    format!("{k}/5 points agree"),
                );
            }
        }
    }
}

fn prenormalization(rec: &mut Recorder, scope: Scope, seed: u64) {
    let mut s = Sampler::new(seed);
    for p in 5..=scope.cap(8) {
        let order = default_max_height(p);
        let samples: Vec<ParamMatrix> = (0..20).map(|_| s.params(p)).collect();
        let good = samples
            .par_iter()
            .filter(|a| prenormalize(&normal_form_curve(a, order), order).is_ok_and(|(b, _)| &b == *a))
            .count();
        rec.check(format!("p={p} idempotence"), good == 20, format!("{good}/20 matrices recovered exactly"));
    }
    let x = MultiPoly::var(VarRegistry::X);
    let y = MultiPoly::var(VarRegistry::Y);
    let phi = Biholomorphism::tangent(&x * &x, &x * &y);
    let mut good = 0;
    let mut detail = String::new();
    for _ in 0..5 {
        let mut a = ParamMatrix::with_first_line(6, &s.first_line(6)).expect("sampled first line");
        let a23 = s.nonzero();
        a.set(2, 3, a23.clone());
        let order = default_max_height(6);
        match apply_biholomorphism(&phi, &normal_form_curve(&a, order)).and_then(|c| prenormalize(&c, order)) {
            Ok((b, _)) => {
                let mut want = a.clone();
                want.set(3, 3, a23);
                if b == want {
                    good += 1;
                } else {
                    detail = format!("got {b}");
                }
            }
            Err(e) => detail = e.to_string(),
        }
    }
    rec.check(
        "dicritical fixture (1+x)(x,y) at p=6",
        good == 5,
        if good == 5 { "a_3_3 = a_2_3 and all other entries unchanged, 5 samples".to_string() } else { detail },
    );
}

/// Every branch re-read through a random parametrization `t ↦ φ(t)`.
fn reparametrize(c: &CurveInput, s: &mut Sampler) -> Result<CurveInput> {
    let branches = c
        .branches
        .iter()
        .map(|b| {
            let phi = s.reparametrization(b.order());
            let (u, v) = b.parametrize(&phi);
            BranchSeries::from_parametrization(b.orientation, &u, &v)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CurveInput { branches, multiplicities: c.multiplicities.clone() })
}

fn invariance(rec: &mut Recorder, scope: Scope, seed: u64) {
    let p = 7;
    let order = default_max_height(p);
    let count = if scope == Scope::Full { 10 } else { 2 };
    let mut s = Sampler::new(seed);
    let mut points = Vec::new();
    while points.len() < count {
        let a = s.params(p);
        if !a.get(2, 2).is_zero() {
            points.push(a);
        }
    }
    // each point gets its own sampler, so the outcome does not depend on scheduling
    let jobs: Vec<(ParamMatrix, u64)> = points.iter().map(|a| (a.clone(), s.rng().gen())).collect();
    let outcomes: Vec<Result<Vec<std::result::Result<(), String>>>> = jobs
        .par_iter()
        .map(|(a, point_seed)| {
            let mut s = Sampler::new(*point_seed);
            let mut engine = InvariantEngine::new();
            let c = normal_form_curve(a, order);
            let base = engine.curve_invariants(&c, order)?;
            Ok((0..5)
                .map(|i| {
                    let nu = 2 + (i % 2) as u32;
                    let dicritical = i % 2 == 0;
                    let mut phi = s.tangent_biholomorphism(nu, 4, dicritical);
                    if i >= 3 {
                        phi = s.linear_map().compose(&phi);
                    }
                    match apply_biholomorphism(&phi, &c)
                        .and_then(|m| reparametrize(&m, &mut s))
                        .and_then(|m| engine.curve_invariants(&m, order))
                    {
                        Ok(t) if t == base => Ok(()),
                        Ok(t) => Err(format!("{:?} vs {:?}", t.values, base.values)),
                        Err(e) => Err(e.to_string()),
                    }
                })
                .collect())
        })
        .collect();
    let mut pairs = 0;
    let mut good = 0;
    let mut detail = String::new();
    for o in outcomes {
        let Some(rows) = rec.ok("invariants of N_a", o) else { continue };
        for r in rows {
            pairs += 1;
            match r {
                Ok(()) => good += 1,
                Err(e) => detail = e,
            }
        }
    }
    rec.check(
        "biholomorphisms and reparametrizations",
        good == pairs && pairs == 5 * count,
        if good == pairs { format!("{good}/{pairs} transformed curves give identical tuples") } else { detail },
    );
    let a = &points[0];
    let base = curve_invariants(&normal_form_curve(a, order), order);
    let mut good = 0;
    for _ in 0..5 {
        let lambda = s.nonzero();
        let scaled = lambda_action(&lambda, a).and_then(|b| curve_invariants(&normal_form_curve(&b, order), order));
        if matches!((&base, &scaled), (Ok(x), Ok(y)) if x == y) {
            good += 1;
        }
    }
    rec.check(
        "N_a and N_(lambda a)",
        good == 5,
        format!("{good}/5 values of lambda give identical projectivized tuples"),
    );
    let mut b = a.clone();
    b.set(2, 3, &a.get(2, 3) + Rational::one());
    let other = curve_invariants(&normal_form_curve(&b, order), order);
    rec.info(
        "different level-2 ratio separates",
        matches!((&base, &other), (Ok(x), Ok(y)) if x != y),
        "changing a_2_3 changes the tuple",
    );
}

fn quasi_homogeneity(rec: &mut Recorder, scope: Scope, seed: u64) {
    let mut s = Sampler::new(seed);
    for p in 4..=scope.cap(8) {
        let a = s.params(p);
        let n = s.integral_multiplicities(p, 3);
        let mut reg = VarRegistry::new(p);
        let lam = reg.push(VarKind::Aux("lambda".into()), 1);
        let lp = MultiPoly::var(lam);
        let lhs = match build_normal_form(&a, &n, false) {
            Ok(NormalForm::Expanded(f)) => {
                let subs: HashMap<usize, MultiPoly> = [
                    (VarRegistry::X, &lp * &MultiPoly::var(VarRegistry::X)),
                    (VarRegistry::Y, &lp * &MultiPoly::var(VarRegistry::Y)),
                ]
                .into();
                f.substitute(&subs)
            }
            other => {
                rec.check(format!("p={p}"), false, format!("{other:?}"));
                continue;
            }
        };
        let branches = branch_polys(p, |k, l| &a.entry_poly(k, l) * &lp.pow(k as u32 - 1));
        let Some(NormalForm::Expanded(scaled)) = rec.ok("N_(lambda a)", build_from_branches(&branches, &n)) else {
            continue;
        };
        let total: u32 = n.total().to_integer().try_into().unwrap_or(0);
        let rhs = &lp.pow(total) * &scaled;
        rec.check(
            format!("p={p} |n|={total}"),
            lhs == rhs,
            format!("identity in lambda with {} terms", lhs.terms().count()),
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_integrals_are_weight_zero() {
        let reg = VarRegistry::new(9);
        for v in [F6Variant::AsGiven, F6Variant::SignCorrected] {
            let (f5, f6) = p9_reference_integrals(&reg, v);
            assert_eq!(f5.weighted_degree(&reg), Some(0));
            assert_eq!(f6.weighted_degree(&reg), Some(0));
        }
        let (x10, x01) = p9_reference_generators(&reg);
        assert_eq!(x10.components().count(), 4);
        assert_eq!(x01.get(3, 6), poly_terms(&reg, &[(-32, 729, &[(2, 2)]), (1, 27, &[(2, 6)])]));
    }

    #[test]
    fn quick_dimension_and_homogeneity_pass() {
        for id in [1, 9] {
            let r = run_criterion(id, Scope::Quick, 1).unwrap();
            assert!(r.passed, "{}", r.summary_line());
        }
        assert!(run_criterion(10, Scope::Quick, 1).is_err());
    }
}
