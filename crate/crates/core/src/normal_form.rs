//! The triangular family `N_a^{(n)}`, its parameter space and the `C*`-action.
//!
//! Branches are numbered `1..=p`: `x`, `y`, `y + x`, then
//! `y + Σ_{k ≤ l} a_{k,l} x^k` for `l = 1..=p-3`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::bipoly::BiPoly;
use crate::algebra::poly::{Monomial, MultiPoly};
use crate::algebra::rational::{format_rational, int, is_integer, parse_rational, Rational};
use crate::algebra::registry::VarRegistry;
use crate::algebra::ring::Ring;
use crate::error::{Error, Result};

/// A numeric point of the parameter space `A` (missing entries read as zero).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamMatrix {
    pub p: usize,
    pub entries: BTreeMap<(usize, usize), Rational>,
}

impl ParamMatrix {
    pub fn new(p: usize) -> Self {
        ParamMatrix { p, entries: BTreeMap::new() }
    }

    /// Highest level `p - 3`.
    pub fn levels(&self) -> usize {
        self.p.saturating_sub(3)
    }

    pub fn get(&self, k: usize, l: usize) -> Rational {
        self.entries.get(&(k, l)).cloned().unwrap_or_else(Rational::zero)
    }

    /// Zero values are not stored, so equal matrices compare equal.
    pub fn set(&mut self, k: usize, l: usize, v: Rational) {
        if v.is_zero() {
            self.entries.remove(&(k, l));
        } else {
            self.entries.insert((k, l), v);
        }
    }

    /// Builds from a first line and an entry function for levels `>= 2`.
    pub fn from_fn(p: usize, f: impl Fn(usize, usize) -> Rational) -> Self {
        let mut a = ParamMatrix::new(p);
        for k in 1..=p.saturating_sub(3) {
            for l in k..=p - 3 {
                a.set(k, l, f(k, l));
            }
        }
        a
    }

    pub fn first_line(&self) -> Vec<Rational> {
        (1..=self.levels()).map(|l| self.get(1, l)).collect()
    }

    pub fn with_first_line(p: usize, first: &[Rational]) -> Result<Self> {
        if first.len() != p.saturating_sub(3) {
            return Err(Error::domain(format!(
                "first line must have {} entries for p={p}, got {}",
                p.saturating_sub(3),
                first.len()
            )));
        }
        let mut a = ParamMatrix::new(p);
        for (i, v) in first.iter().enumerate() {
            a.set(1, i + 1, v.clone());
        }
        Ok(a)
    }

    /// Dense point vector over the registry (x, y set to zero).
    pub fn point(&self, reg: &VarRegistry) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); reg.len()];
        for (k, l, i) in reg.a_entries() {
            v[i] = self.get(k, l);
        }
        v
    }

    /// Reads a numeric matrix back from a dense point vector.
    pub fn from_point(p: usize, reg: &VarRegistry, point: &[Rational]) -> Self {
        ParamMatrix::from_fn(p, |k, l| point[reg.a(k, l)].clone())
    }

    /// Entries as polynomials: all numeric.
    pub fn entry_poly(&self, k: usize, l: usize) -> MultiPoly {
        MultiPoly::constant(self.get(k, l))
    }
}

impl fmt::Display for ParamMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in 1..=self.levels() {
            let row: Vec<String> = (k..=self.levels()).map(|l| format_rational(&self.get(k, l))).collect();
            writeln!(f, "{:width$}[{}]", "", row.join(", "), width = 2 * (k - 1))?;
        }
        Ok(())
    }
}

impl Serialize for ParamMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        struct Entries<'a>(&'a ParamMatrix);
        impl Serialize for Entries<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let a = self.0;
                let mut m = s.serialize_map(None)?;
                for k in 1..=a.levels() {
                    for l in k..=a.levels() {
                        m.serialize_entry(&format!("{k},{l}"), &format_rational(&a.get(k, l)))?;
                    }
                }
                m.end()
            }
        }
        let mut m = s.serialize_map(Some(2))?;
        m.serialize_entry("p", &self.p)?;
        m.serialize_entry("entries", &Entries(self))?;
        m.end()
    }
}

impl<'de> Deserialize<'de> for ParamMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            p: usize,
            entries: BTreeMap<String, String>,
        }
        let raw = Raw::deserialize(d)?;
        let mut a = ParamMatrix::new(raw.p);
        for (key, val) in raw.entries {
            let (k, l) = parse_index(&key).map_err(serde::de::Error::custom)?;
            let v = parse_rational(&val).map_err(serde::de::Error::custom)?;
            a.set(k, l, v);
        }
        Ok(a)
    }
}

/// Parses `"k,l"`.
pub fn parse_index(key: &str) -> Result<(usize, usize)> {
    let bad = || Error::Parse(format!("bad entry index {key:?}"));
    let (k, l) = key.split_once(',').ok_or_else(bad)?;
    Ok((k.trim().parse().map_err(|_| bad())?, l.trim().parse().map_err(|_| bad())?))
}

/// Parses `"k,l:v"` entry assignments.
pub fn parse_entry(s: &str) -> Result<((usize, usize), Rational)> {
    let (idx, val) = s.split_once(':').ok_or_else(|| Error::Parse(format!("expected k,l:value, got {s:?}")))?;
    Ok((parse_index(idx)?, parse_rational(val)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MultiplicityMode {
    Integral,
    Darboux,
}

/// Multiplicities `n_1..n_p` of the branches (or Darboux exponents).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Multiplicities {
    #[serde(with = "crate::algebra::rational::serde_vec")]
    pub values: Vec<Rational>,
    pub mode: MultiplicityMode,
}

impl Multiplicities {
    pub fn reduced(p: usize) -> Self {
        Multiplicities { values: vec![Rational::one(); p], mode: MultiplicityMode::Integral }
    }

    pub fn integral(values: &[i64]) -> Self {
        Multiplicities { values: values.iter().map(|&v| int(v)).collect(), mode: MultiplicityMode::Integral }
    }

    pub fn darboux(values: Vec<Rational>) -> Self {
        Multiplicities { values, mode: MultiplicityMode::Darboux }
    }

    /// `|n| = Σ n_i`.
    pub fn total(&self) -> Rational {
        self.values.iter().fold(Rational::zero(), |a, b| a + b)
    }

    pub fn validate(&self, p: usize) -> Result<()> {
        if self.values.len() != p {
            return Err(Error::domain(format!("expected {p} multiplicities, got {}", self.values.len())));
        }
        match self.mode {
            MultiplicityMode::Integral => {
                if self.values.iter().any(|v| !is_integer(v) || !v.is_positive()) {
                    return Err(Error::domain("integral multiplicities must be positive integers"));
                }
            }
            MultiplicityMode::Darboux => {
                if self.values.iter().any(|v| v.is_zero()) {
                    return Err(Error::domain("Darboux exponents must be nonzero"));
                }
                if self.total().is_zero() {
                    return Err(Error::domain("Darboux exponents must not sum to zero"));
                }
            }
        }
        Ok(())
    }
}

/// Lists every violated invariant of a parameter matrix (empty when valid).
pub fn validate_params(a: &ParamMatrix) -> Vec<String> {
    let mut v = Vec::new();
    if a.p < 4 {
        v.push(format!("p = {} is below 4", a.p));
        return v;
    }
    for &(k, l) in a.entries.keys() {
        if k == 0 || k > l || l > a.levels() {
            v.push(format!("entry ({k},{l}) outside the triangular range"));
        }
    }
    let first = a.first_line();
    for (i, e) in first.iter().enumerate() {
        if e.is_zero() {
            v.push(format!("first-line entry a_1,{} equals 0", i + 1));
        }
        if e.is_one() {
            v.push(format!("first-line entry a_1,{} equals 1", i + 1));
        }
    }
    for i in 0..first.len() {
        for j in (i + 1)..first.len() {
            if first[i] == first[j] {
                v.push(format!("first-line entries not distinct (a_1,{} = a_1,{})", i + 1, j + 1));
            }
        }
    }
    v
}

pub fn ensure_valid(a: &ParamMatrix) -> Result<()> {
    let v = validate_params(a);
    if v.is_empty() {
        Ok(())
    } else {
        Err(Error::domain(format!("invalid parameter matrix: {}", v.join("; "))))
    }
}

/// The `p` branch factors as truncated bivariate polynomials; `entry(k, l)`
/// supplies `a_{k,l}` in the coefficient ring.
pub fn branch_factors<C: Ring>(p: usize, deg: usize, entry: impl Fn(usize, usize) -> C) -> Vec<BiPoly<C>> {
    let mut out = Vec::with_capacity(p);
    out.push(BiPoly::monomial(deg, 1, 0, C::one()));
    out.push(BiPoly::monomial(deg, 0, 1, C::one()));
    let mut b3 = BiPoly::monomial(deg, 0, 1, C::one());
    b3.set(1, 0, C::one());
    out.push(b3);
    for l in 1..=p.saturating_sub(3) {
        let mut b = BiPoly::monomial(deg, 0, 1, C::one());
        for k in 1..=l {
            b.set(k, 0, entry(k, l));
        }
        out.push(b);
    }
    out
}

/// Branch factors as polynomials in the registry (entries supplied as polynomials).
pub fn branch_polys(p: usize, entry: impl Fn(usize, usize) -> MultiPoly) -> Vec<MultiPoly> {
    let x = MultiPoly::var(VarRegistry::X);
    let y = MultiPoly::var(VarRegistry::Y);
    let mut out = vec![x.clone(), y.clone(), &y + &x];
    for l in 1..=p.saturating_sub(3) {
        let mut b = y.clone();
        for k in 1..=l {
            b.add_assign_ref(&entry(k, l).mul_monomial(&Monomial::var_pow(VarRegistry::X, k as u32)));
        }
        out.push(b);
    }
    out
}

/// Symbolic entries: first line from `first`, all other entries registry variables.
pub fn symbolic_entry<'a>(reg: &'a VarRegistry, first: &[Rational]) -> impl Fn(usize, usize) -> MultiPoly + 'a {
    let first = first.to_vec();
    move |k, l| {
        if k == 1 {
            MultiPoly::constant(first[l - 1].clone())
        } else {
            MultiPoly::var(reg.a(k, l))
        }
    }
}

/// Fully symbolic entries, first line included.
pub fn generic_entry(reg: &VarRegistry) -> impl Fn(usize, usize) -> MultiPoly + '_ {
    move |k, l| MultiPoly::var(reg.a(k, l))
}

#[derive(Clone, Debug, PartialEq)]
pub enum NormalForm {
    /// Expanded product (integral multiplicities).
    Expanded(MultiPoly),
    /// Branch factors with their exponents (Darboux mode).
    Factored(Vec<(MultiPoly, Rational)>),
}

/// Builds `N_a^{(n)}`; with `reduced` every multiplicity is taken to be 1.
pub fn build_normal_form(a: &ParamMatrix, n: &Multiplicities, reduced: bool) -> Result<NormalForm> {
    ensure_valid(a)?;
    let mult = if reduced { Multiplicities::reduced(a.p) } else { n.clone() };
    mult.validate(a.p)?;
    let branches = branch_polys(a.p, |k, l| a.entry_poly(k, l));
    build_from_branches(&branches, &mult)
}

pub fn build_from_branches(branches: &[MultiPoly], n: &Multiplicities) -> Result<NormalForm> {
    match n.mode {
        MultiplicityMode::Darboux => {
            Ok(NormalForm::Factored(branches.iter().cloned().zip(n.values.iter().cloned()).collect()))
        }
        MultiplicityMode::Integral => {
            let mut prod = MultiPoly::one();
            for (b, e) in branches.iter().zip(&n.values) {
                let e = e.to_integer().to_u32().ok_or_else(|| Error::domain("multiplicity too large"))?;
                prod = &prod * &b.pow(e);
            }
            Ok(NormalForm::Expanded(prod))
        }
    }
}

/// `λ·a`: entry `(k, l)` multiplied by `λ^{k-1}`.
pub fn lambda_action(lambda: &Rational, a: &ParamMatrix) -> Result<ParamMatrix> {
    if lambda.is_zero() {
        return Err(Error::domain("lambda must be nonzero"));
    }
    let mut out = a.clone();
    for ((k, _), v) in out.entries.iter_mut() {
        *v = &*v * num_traits::pow(lambda.clone(), *k - 1);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DimensionReport {
    pub p: usize,
    pub dim_a: i64,
    pub delta: i64,
    pub tau: i64,
    pub tau_prime: i64,
    pub generic_rank: i64,
    pub free_integrals: i64,
    /// Number of first-line entries (the fixed cross-ratios).
    pub cross_ratios: i64,
    /// Dimension of `A` once the first line is fixed.
    pub fixed_first_line_dim: i64,
    /// Level `m` has `p - 2 - m` entries (`p - 3` for `m = 1`).
    pub level_dims: BTreeMap<usize, i64>,
    /// Number of first integrals carried by each level.
    pub integrals_per_level: BTreeMap<usize, i64>,
}

/// Generic codimension `τ` via the parity-split closed form.
pub fn tau(p: usize) -> i64 {
    let p = p as i64;
    if p % 2 == 0 {
        (p - 2) * (p - 2) / 4
    } else {
        (p - 1) * (p - 3) / 4
    }
}

/// Highest level carrying first integrals beyond the level-2 ratios.
pub fn top_integral_level(p: usize) -> usize {
    (p.saturating_sub(2)) / 2
}

/// Number of first integrals supported on level `m`.
pub fn integrals_on_level(p: usize, m: usize) -> i64 {
    let p = p as i64;
    let m = m as i64;
    match m {
        1 => p - 3,
        2 => (p - 5).max(0),
        _ => (p - 2 * m - 1).max(0),
    }
}

pub fn dims(p: usize) -> Result<DimensionReport> {
    if p < 4 {
        return Err(Error::domain(format!("p must be at least 4, got {p}")));
    }
    let pi = p as i64;
    let dim_a = (pi - 2) * (pi - 3) / 2;
    let t = tau(p);
    let levels = p - 3;
    let level_dims = (1..=levels).map(|m| (m, if m == 1 { pi - 3 } else { pi - 2 - m as i64 })).collect();
    let integrals_per_level = (1..=levels).map(|m| (m, integrals_on_level(p, m))).collect();
    Ok(DimensionReport {
        p,
        dim_a,
        delta: dim_a,
        tau: t,
        tau_prime: t - (pi - 5),
        generic_rank: dim_a - t,
        free_integrals: t - (pi - 3),
        cross_ratios: pi - 3,
        fixed_first_line_dim: dim_a - (pi - 3),
        level_dims,
        integrals_per_level,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::rat;

    #[test]
    fn validation_examples() {
        let mut a = ParamMatrix::new(4);
        a.set(1, 1, int(2));
        assert!(validate_params(&a).is_empty());
        a.set(1, 1, int(1));
        assert_eq!(validate_params(&a), vec!["first-line entry a_1,1 equals 1".to_string()]);
        let mut b = ParamMatrix::new(5);
        b.set(1, 1, int(3));
        b.set(1, 2, int(3));
        assert!(validate_params(&b)[0].contains("not distinct"));
        b.set(2, 1, int(3));
        assert!(validate_params(&b).iter().any(|s| s.contains("triangular")));
    }

    #[test]
    fn normal_form_examples() {
        let x = MultiPoly::var(0);
        let y = MultiPoly::var(1);
        let mut a = ParamMatrix::new(4);
        a.set(1, 1, int(2));
        let expect = &(&(&x * &y) * &(&y + &x)) * &(&y + &x.scale(&int(2)));
        assert_eq!(
            build_normal_form(&a, &Multiplicities::reduced(4), false).unwrap(),
            NormalForm::Expanded(expect.clone())
        );

        let mut a5 = ParamMatrix::new(5);
        a5.set(1, 1, int(2));
        a5.set(1, 2, int(3));
        a5.set(2, 2, int(1));
        let last = &(&y + &x.scale(&int(3))) + &(&x * &x);
        let e5 = &expect * &last;
        let n = Multiplicities::integral(&[2, 1, 1, 1, 1]);
        assert_eq!(build_normal_form(&a5, &n, true).unwrap(), NormalForm::Expanded(e5));
        match build_normal_form(&a5, &Multiplicities::darboux(vec![rat(1, 2); 5]), false).unwrap() {
            NormalForm::Factored(f) => assert_eq!(f.len(), 5),
            _ => panic!("expected factored form"),
        }
    }

    #[test]
    fn lambda_examples() {
        let mut a = ParamMatrix::new(6);
        a.set(1, 1, int(3));
        a.set(2, 2, int(5));
        a.set(3, 3, int(1));
        assert_eq!(lambda_action(&int(1), &a).unwrap(), a);
        let b = lambda_action(&int(2), &a).unwrap();
        assert_eq!(b.get(2, 2), int(10));
        assert_eq!(b.get(3, 3), int(4));
        assert_eq!(b.get(1, 1), int(3));
        assert!(lambda_action(&int(0), &a).is_err());
    }

    #[test]
    fn dims_examples() {
        let d9 = dims(9).unwrap();
        assert_eq!((d9.dim_a, d9.tau, d9.generic_rank, d9.free_integrals), (21, 12, 9, 6));
        assert_eq!(d9.fixed_first_line_dim, 15);
        assert_eq!(d9.tau_prime, 8);
        let d10 = dims(10).unwrap();
        assert_eq!((d10.tau, d10.free_integrals, d10.cross_ratios), (16, 9, 7));
        let d4 = dims(4).unwrap();
        assert_eq!((d4.dim_a, d4.tau, d4.generic_rank), (1, 1, 0));
        assert!(dims(3).is_err());
        for p in 4..=14 {
            let d = dims(p).unwrap();
            assert_eq!(d.tau, ((p as i64 - 2) * (p as i64 - 2)) / 4);
            assert_eq!(d.integrals_per_level.values().sum::<i64>(), d.tau);
        }
    }

    #[test]
    fn json_round_trip() {
        let mut a = ParamMatrix::new(5);
        a.set(1, 1, int(2));
        a.set(1, 2, rat(-1, 3));
        a.set(2, 2, int(7));
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"{"p":5,"entries":{"1,1":"2","1,2":"-1/3","2,2":"7"}}"#);
        let b: ParamMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(a, b);
        let n = Multiplicities::darboux(vec![rat(1, 2), int(3)]);
        let s = serde_json::to_string(&n).unwrap();
        assert_eq!(s, r#"{"values":["1/2","3"],"mode":"darboux"}"#);
    }
}
