//! Reduction of a list of smooth branches to the triangular normal form.
//!
//! Cone convention: a branch `y = Σ s_h x^h` has entry `-s_h` at height `h`,
//! so the factor `y + Σ a_{k,l} x^k` reads off `a_{k,l}` directly. A branch
//! tangent to `{x = 0}` is stored as `x = Σ r_h y^h`, has the marker `∞` at
//! height 1 and `-r_h` above.

use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::bipoly::BiPoly;
use crate::algebra::poly::{Monomial, MultiPoly};
use crate::algebra::rational::{format_rational, parse_rational, Rational};
use crate::algebra::registry::VarRegistry;
use crate::algebra::series::{implicit_solve_bipoly, TruncatedSeries};
use crate::error::{Error, Result};
use crate::normal_form::{ensure_valid, Multiplicities, ParamMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    #[serde(rename = "yOfX")]
    YOfX,
    #[serde(rename = "xOfY")]
    XOfY,
}

/// One smooth branch as a truncated graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawBranch", into = "RawBranch")]
pub struct BranchSeries {
    pub orientation: Orientation,
    pub series: TruncatedSeries,
}

#[derive(Serialize, Deserialize)]
struct RawBranch {
    orientation: Orientation,
    coeffs: Vec<String>,
    /// Declared truncation order; coefficients beyond `coeffs` are zero.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    order: Option<usize>,
}

impl TryFrom<RawBranch> for BranchSeries {
    type Error = Error;
    fn try_from(r: RawBranch) -> Result<Self> {
        let mut coeffs = r.coeffs.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()?;
        if let Some(t) = r.order {
            if t < coeffs.len() {
                return Err(Error::Parse(format!("order {t} shorter than {} coefficients", coeffs.len())));
            }
            coeffs.resize(t, Rational::zero());
        }
        Ok(BranchSeries { orientation: r.orientation, series: TruncatedSeries::new(coeffs) })
    }
}

impl From<BranchSeries> for RawBranch {
    fn from(b: BranchSeries) -> Self {
        RawBranch {
            orientation: b.orientation,
            coeffs: b.series.coeffs.iter().map(format_rational).collect(),
            order: None,
        }
    }
}

impl BranchSeries {
    pub fn y_of_x(coeffs: Vec<Rational>) -> Self {
        BranchSeries { orientation: Orientation::YOfX, series: TruncatedSeries::new(coeffs) }
    }

    pub fn x_of_y(coeffs: Vec<Rational>) -> Self {
        BranchSeries { orientation: Orientation::XOfY, series: TruncatedSeries::new(coeffs) }
    }

    pub fn order(&self) -> usize {
        self.series.order()
    }

    /// Tangent direction as a vector `(dx, dy)`.
    pub fn direction(&self) -> (Rational, Rational) {
        match self.orientation {
            Orientation::YOfX => (Rational::one(), self.series.coeff(1)),
            Orientation::XOfY => (self.series.coeff(1), Rational::one()),
        }
    }

    /// Defining function `y - s(x)` or `x - r(y)` truncated at the series order.
    pub fn equation(&self) -> BiPoly<Rational> {
        let t = self.order();
        let mut f = BiPoly::zero(t);
        let (lin, var): ((usize, usize), fn(usize) -> (usize, usize)) = match self.orientation {
            Orientation::YOfX => ((0, 1), |h| (h, 0)),
            Orientation::XOfY => ((1, 0), |h| (0, h)),
        };
        f.set(lin.0, lin.1, Rational::one());
        for h in 1..=t {
            let (i, j) = var(h);
            let c = -self.series.coeff(h) + f.get(i, j);
            f.set(i, j, c);
        }
        f
    }
}

impl BranchSeries {
    /// Parametrization `t ↦ (φ(t), s(φ(t)))` in the branch's own orientation.
    pub fn parametrize(&self, phi: &TruncatedSeries) -> (TruncatedSeries, TruncatedSeries) {
        let phi = phi.truncate(self.order());
        (phi.clone(), self.series.compose(&phi))
    }

    /// Graph of a parametrized branch `t ↦ (u(t), v(t))`, where `u` is the
    /// independent coordinate of `orientation` and has a nonzero linear term.
    pub fn from_parametrization(orientation: Orientation, u: &TruncatedSeries, v: &TruncatedSeries) -> Result<Self> {
        let inv = u.reverse()?;
        Ok(BranchSeries { orientation, series: v.truncate(u.order()).compose(&inv) })
    }
}

/// A curve given by its ordered branches.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveInput {
    pub branches: Vec<BranchSeries>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiplicities: Option<Multiplicities>,
}

impl CurveInput {
    pub fn new(branches: Vec<BranchSeries>) -> Self {
        CurveInput { branches, multiplicities: None }
    }

    pub fn p(&self) -> usize {
        self.branches.len()
    }

    pub fn min_order(&self) -> usize {
        self.branches.iter().map(|b| b.order()).min().unwrap_or(0)
    }
}

/// Branches of `N_a^{(1)}` truncated at `order`.
pub fn normal_form_curve(a: &ParamMatrix, order: usize) -> CurveInput {
    let mut branches =
        vec![BranchSeries::x_of_y(vec![Rational::zero(); order]), BranchSeries::y_of_x(vec![Rational::zero(); order])];
    let mut third = vec![Rational::zero(); order];
    third[0] = -Rational::one();
    branches.push(BranchSeries::y_of_x(third));
    for l in 1..=a.levels() {
        let mut s = vec![Rational::zero(); order];
        for k in 1..=l.min(order) {
            s[k - 1] = -a.get(k, l);
        }
        branches.push(BranchSeries::y_of_x(s));
    }
    CurveInput::new(branches)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConeEntry {
    Infinity,
    Value(Rational),
}

impl ConeEntry {
    pub fn is_zero(&self) -> bool {
        matches!(self, ConeEntry::Value(v) if v.is_zero())
    }

    pub fn value(&self) -> Option<&Rational> {
        match self {
            ConeEntry::Value(v) => Some(v),
            ConeEntry::Infinity => None,
        }
    }
}

impl fmt::Display for ConeEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConeEntry::Infinity => write!(f, "inf"),
            ConeEntry::Value(v) => write!(f, "{}", format_rational(v)),
        }
    }
}

impl Serialize for ConeEntry {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Entries `rows[h-1][k]` for heights `1..=height`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConeMatrix {
    pub height: usize,
    pub rows: Vec<Vec<ConeEntry>>,
}

impl ConeMatrix {
    pub fn entry(&self, h: usize, k: usize) -> &ConeEntry {
        &self.rows[h - 1][k]
    }

    pub fn row_is_zero(&self, h: usize) -> bool {
        self.rows[h - 1].iter().all(ConeEntry::is_zero)
    }
}

pub fn cone_matrix(c: &CurveInput, height: usize) -> Result<ConeMatrix> {
    if c.min_order() < height {
        return Err(Error::domain(format!(
            "need higher order: height {height} requested, truncation {}",
            c.min_order()
        )));
    }
    let rows = (1..=height)
        .map(|h| {
            c.branches
                .iter()
                .map(|b| match (b.orientation, h) {
                    (Orientation::XOfY, 1) => ConeEntry::Infinity,
                    _ => ConeEntry::Value(-b.series.coeff(h)),
                })
                .collect()
        })
        .collect();
    Ok(ConeMatrix { height, rows })
}

/// A polynomial map `(x, y) ↦ (φ_x, φ_y)` with invertible linear part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Biholomorphism {
    pub x: MultiPoly,
    pub y: MultiPoly,
}

impl Biholomorphism {
    pub fn identity() -> Self {
        Biholomorphism { x: MultiPoly::var(VarRegistry::X), y: MultiPoly::var(VarRegistry::Y) }
    }

    /// `(x + A, y + B)`.
    pub fn tangent(a: MultiPoly, b: MultiPoly) -> Self {
        Biholomorphism { x: &MultiPoly::var(VarRegistry::X) + &a, y: &MultiPoly::var(VarRegistry::Y) + &b }
    }

    /// `(m00 x + m01 y, m10 x + m11 y)`.
    pub fn linear(m: [[Rational; 2]; 2]) -> Self {
        let x = MultiPoly::var(VarRegistry::X);
        let y = MultiPoly::var(VarRegistry::Y);
        Biholomorphism { x: &x.scale(&m[0][0]) + &y.scale(&m[0][1]), y: &x.scale(&m[1][0]) + &y.scale(&m[1][1]) }
    }

    pub fn linear_part(&self) -> [[Rational; 2]; 2] {
        let c = |p: &MultiPoly, v: usize| p.coeff(&Monomial::var(v));
        [
            [c(&self.x, VarRegistry::X), c(&self.x, VarRegistry::Y)],
            [c(&self.y, VarRegistry::X), c(&self.y, VarRegistry::Y)],
        ]
    }

    pub fn validate(&self) -> Result<()> {
        for comp in [&self.x, &self.y] {
            if comp.variables().iter().any(|&v| v > VarRegistry::Y) {
                return Err(Error::domain("biholomorphism components may only involve x and y"));
            }
            if !comp.coeff(&Monomial::one()).is_zero() {
                return Err(Error::domain("biholomorphism must fix the origin"));
            }
        }
        let m = self.linear_part();
        if (&m[0][0] * &m[1][1] - &m[0][1] * &m[1][0]).is_zero() {
            return Err(Error::domain("biholomorphism has singular linear part"));
        }
        Ok(())
    }

    pub fn is_identity(&self) -> bool {
        *self == Biholomorphism::identity()
    }

    fn nonlinear(&self) -> (MultiPoly, MultiPoly) {
        (self.x.filter_terms(|m| m.degree() >= 2), self.y.filter_terms(|m| m.degree() >= 2))
    }

    /// Lowest degree `ν >= 2` of a nonlinear term, if any.
    pub fn nonlinear_order(&self) -> Option<u32> {
        let (a, b) = self.nonlinear();
        [a.terms().map(|(m, _)| m.degree()).min(), b.terms().map(|(m, _)| m.degree()).min()].into_iter().flatten().min()
    }

    /// Lowest nonlinear homogeneous part proportional to the radial field: `y A_ν - x B_ν ≡ 0`.
    pub fn is_dicritical(&self) -> bool {
        let Some(nu) = self.nonlinear_order() else {
            return false;
        };
        let (a, b) = self.nonlinear();
        let an = a.filter_terms(|m| m.degree() == nu);
        let bn = b.filter_terms(|m| m.degree() == nu);
        let r = &(&MultiPoly::var(VarRegistry::Y) * &an) - &(&MultiPoly::var(VarRegistry::X) * &bn);
        r.is_zero()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Biholomorphism) -> Biholomorphism {
        let sub = [(VarRegistry::X, other.x.clone()), (VarRegistry::Y, other.y.clone())].into_iter().collect();
        Biholomorphism { x: self.x.substitute(&sub), y: self.y.substitute(&sub) }
    }
}

fn transpose(f: &BiPoly<Rational>) -> BiPoly<Rational> {
    let mut g = BiPoly::zero(f.deg);
    for (i, j) in f.support(f.deg) {
        g.set(j, i, f.get(i, j).clone());
    }
    g
}

/// Branches of the pulled-back curve `{f ∘ φ = 0}`.
pub fn apply_biholomorphism(phi: &Biholomorphism, c: &CurveInput) -> Result<CurveInput> {
    phi.validate()?;
    let branches = c.branches.iter().map(|b| apply_to_branch(phi, b)).collect::<Result<Vec<_>>>()?;
    Ok(CurveInput { branches, multiplicities: c.multiplicities.clone() })
}

fn apply_to_branch(phi: &Biholomorphism, b: &BranchSeries) -> Result<BranchSeries> {
    let t = b.order();
    let px = BiPoly::from_xy(&phi.x, t);
    let py = BiPoly::from_xy(&phi.y, t);
    let f = match b.orientation {
        Orientation::YOfX => py.sub(&b.series.compose_bivariate(&px)),
        Orientation::XOfY => px.sub(&b.series.compose_bivariate(&py)),
    };
    if !f.get(0, 1).is_zero() {
        Ok(BranchSeries { orientation: Orientation::YOfX, series: implicit_solve_bipoly(&f, t)? })
    } else if !f.get(1, 0).is_zero() {
        Ok(BranchSeries { orientation: Orientation::XOfY, series: implicit_solve_bipoly(&transpose(&f), t)? })
    } else {
        Err(Error::domain("transformed branch is singular"))
    }
}

/// Linear map sending the tangents of branches 1, 2, 3 to `{x=0}`, `{y=0}`,
/// `{y+x=0}`, and the transformed curve.
pub fn normalize_tangent_cone(c: &CurveInput) -> Result<(Biholomorphism, CurveInput)> {
    if c.p() < 3 {
        return Err(Error::domain("at least 3 branches are required"));
    }
    if c.min_order() == 0 {
        return Err(Error::domain("need higher order: empty branch series"));
    }
    let dirs: Vec<(Rational, Rational)> = c.branches.iter().map(BranchSeries::direction).collect();
    let det = |u: &(Rational, Rational), v: &(Rational, Rational)| &u.0 * &v.1 - &u.1 * &v.0;
    for i in 0..dirs.len() {
        for j in (i + 1)..dirs.len() {
            if det(&dirs[i], &dirs[j]).is_zero() {
                return Err(Error::domain(format!("branches {} and {} have the same tangent", i + 1, j + 1)));
            }
        }
    }
    let (d1, d2, d3) = (&dirs[0], &dirs[1], &dirs[2]);
    // d3 = c1 d1 + c2 d2
    let dd = det(d1, d2);
    let c1 = det(d3, d2) / &dd;
    let c2 = det(d1, d3) / &dd;
    let m = [[&c2 * &d2.0, -(&c1 * &d1.0)], [&c2 * &d2.1, -(&c1 * &d1.1)]];
    let phi = Biholomorphism::linear(m);
    let out = apply_biholomorphism(&phi, c)?;
    Ok((phi, out))
}

/// Newton interpolation through `(u_k, v_k)`; coefficients by increasing power.
fn interpolate(nodes: &[Rational], values: &[Rational]) -> Result<Vec<Rational>> {
    let n = nodes.len();
    let mut dd = values.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            let den = &nodes[i] - &nodes[i - j];
            if den.is_zero() {
                return Err(Error::structural("interpolation nodes not distinct"));
            }
            dd[i] = (&dd[i] - &dd[i - 1]) / den;
        }
    }
    let mut poly = vec![Rational::zero(); n.max(1)];
    for i in (0..n).rev() {
        // poly = poly * (u - nodes[i]) + dd[i]
        let mut next = vec![Rational::zero(); n.max(1)];
        for (e, c) in poly.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if e + 1 < next.len() {
                next[e + 1] += c;
            }
            next[e] -= c * &nodes[i];
        }
        next[0] += &dd[i];
        poly = next;
    }
    Ok(poly)
}

/// Kills the height-`N+1` cone entries of branches `1..=min(p, N+3)` of a curve
/// whose cone already agrees with a normal form up to height `N`.
pub fn kill_height(c: &CurveInput, n: usize) -> Result<(Biholomorphism, CurveInput)> {
    let p = c.p();
    let h = n + 1;
    if c.min_order() < h {
        return Err(Error::domain(format!("need higher order: height {h}, truncation {}", c.min_order())));
    }
    if c.branches[0].orientation != Orientation::XOfY
        || c.branches[1..].iter().any(|b| b.orientation != Orientation::YOfX)
    {
        return Err(Error::domain("tangent cone is not normalized"));
    }
    let top = c.branches[0].series.coeff(h);
    let last = p.min(n + 3);
    let nodes: Vec<Rational> = c.branches[1..last].iter().map(|b| b.series.coeff(1)).collect();
    let values: Vec<Rational> = c.branches[1..last]
        .iter()
        .zip(&nodes)
        .map(|(b, u)| -b.series.coeff(h) - &top * num_traits::pow(u.clone(), n + 2))
        .collect();
    let low = interpolate(&nodes, &values)?;
    if low.len() > n + 2 {
        return Err(Error::structural("interpolant degree exceeds N+1"));
    }
    let mut a = MultiPoly::zero();
    let mut b = MultiPoly::zero();
    let hd = h as u32;
    if !top.is_zero() {
        a.add_term(Monomial::var_pow(VarRegistry::Y, hd), top.clone());
    }
    for (j, cj) in low.iter().enumerate() {
        if !cj.is_zero() {
            let m = Monomial::from_pairs([(VarRegistry::X, hd - j as u32), (VarRegistry::Y, j as u32)]);
            b.add_term(m, -cj);
        }
    }
    if a.is_zero() && b.is_zero() {
        return Ok((Biholomorphism::identity(), c.clone()));
    }
    let phi = Biholomorphism::tangent(a, b);
    let out = apply_biholomorphism(&phi, c)?;
    Ok((phi, out))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PrenormReport {
    /// Highest height brought to normal-form shape.
    pub max_height: usize,
    /// Linear part applied first, as `[[m00, m01], [m10, m11]]`.
    pub linear_map: Vec<Vec<String>>,
    /// Values of `N` whose step required a nontrivial map.
    pub nontrivial_steps: Vec<usize>,
    /// First height at which all entries vanish identically.
    pub zero_from_height: usize,
}

pub fn default_max_height(p: usize) -> usize {
    2 * p
}

/// Full prenormalization; also returns the normalized curve.
pub fn prenormalize_curve(c: &CurveInput, hmax: usize) -> Result<(ParamMatrix, PrenormReport, CurveInput)> {
    let p = c.p();
    if p < 4 {
        return Err(Error::domain(format!("at least 4 branches are required, got {p}")));
    }
    if hmax < p - 2 {
        return Err(Error::domain(format!("max height {hmax} is below p-2 = {}", p - 2)));
    }
    if c.min_order() < hmax {
        return Err(Error::domain(format!("need higher order: max height {hmax}, truncation {}", c.min_order())));
    }
    if let Some(m) = &c.multiplicities {
        m.validate(p)?;
    }
    let (lin, mut cur) = normalize_tangent_cone(c)?;
    let mut steps = Vec::new();
    for n in 1..hmax {
        let (phi, next) = kill_height(&cur, n)?;
        if !phi.is_identity() {
            steps.push(n);
        }
        cur = next;
    }
    let cone = cone_matrix(&cur, hmax)?;
    for h in 1..=hmax {
        for k in 0..p {
            let allowed = h == 1 || (k >= 3 && h <= k - 2 && h <= p - 3);
            if !allowed && !cone.entry(h, k).is_zero() {
                return Err(Error::structural(format!("cone entry at height {h}, branch {} not flattened", k + 1)));
            }
        }
    }
    let mut a = ParamMatrix::new(p);
    for l in 1..=p - 3 {
        for k in 1..=l {
            let v = cone.entry(k, l + 2).value().cloned().unwrap_or_else(Rational::zero);
            a.set(k, l, v);
        }
    }
    ensure_valid(&a)?;
    let lp = lin.linear_part();
    let report = PrenormReport {
        max_height: hmax,
        linear_map: lp.iter().map(|r| r.iter().map(format_rational).collect()).collect(),
        nontrivial_steps: steps,
        zero_from_height: p - 2,
    };
    Ok((a, report, cur))
}

pub fn prenormalize(c: &CurveInput, hmax: usize) -> Result<(ParamMatrix, PrenormReport)> {
    prenormalize_curve(c, hmax).map(|(a, r, _)| (a, r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{int, rat};

    fn lines(slopes: &[i64]) -> CurveInput {
        CurveInput::new(slopes.iter().map(|&m| BranchSeries::y_of_x(vec![int(m), int(0), int(0)])).collect())
    }

    #[test]
    fn cone_examples() {
        let mut a = ParamMatrix::new(4);
        a.set(1, 1, int(2));
        let cone = cone_matrix(&normal_form_curve(&a, 2), 2).unwrap();
        let row1: Vec<String> = cone.rows[0].iter().map(|e| e.to_string()).collect();
        assert_eq!(row1, ["inf", "0", "1", "2"]);
        assert!(cone.row_is_zero(2));
        let b = BranchSeries::y_of_x(vec![int(1), int(0), int(1)]);
        let cone = cone_matrix(&CurveInput::new(vec![b.clone()]), 3).unwrap();
        let col: Vec<Rational> = cone.rows.iter().map(|r| r[0].value().unwrap().clone()).collect();
        assert_eq!(col, [int(-1), int(0), int(-1)]);
        assert!(cone_matrix(&CurveInput::new(vec![b]), 4).is_err());
    }

    #[test]
    fn tangent_normalization() {
        let mut a = ParamMatrix::new(5);
        a.set(1, 1, int(3));
        a.set(1, 2, int(-2));
        let c = normal_form_curve(&a, 3);
        let (phi, out) = normalize_tangent_cone(&c).unwrap();
        assert!(phi.is_identity());
        assert_eq!(out, c);
        let (_, out) = normalize_tangent_cone(&lines(&[1, 2, 3, 4])).unwrap();
        let cone = cone_matrix(&out, 1).unwrap();
        let row: Vec<String> = cone.rows[0].iter().map(|e| e.to_string()).collect();
        assert_eq!(row, ["inf", "0", "1", "4/3"]);
        let (_, out) = normalize_tangent_cone(&lines(&[1, 2, 4, 3])).unwrap();
        assert_eq!(cone_matrix(&out, 1).unwrap().rows[0][3].to_string(), "3/4");
        assert!(normalize_tangent_cone(&lines(&[1, 2, 2, 3])).is_err());
    }

    #[test]
    fn pullback_examples() {
        let c = CurveInput::new(vec![BranchSeries::y_of_x(vec![int(0); 3])]);
        let phi = Biholomorphism::tangent(MultiPoly::zero(), MultiPoly::var(0).pow(2));
        let out = apply_biholomorphism(&phi, &c).unwrap();
        assert_eq!(out.branches[0].series.coeffs, vec![int(0), int(-1), int(0)]);
        assert_eq!(apply_biholomorphism(&Biholomorphism::identity(), &c).unwrap(), c);
        // composition law: pulling back by φ∘ψ equals ψ applied after φ
        let mut a = ParamMatrix::new(5);
        a.set(1, 1, int(3));
        a.set(1, 2, int(-2));
        a.set(2, 2, int(5));
        let c = normal_form_curve(&a, 6);
        let x = MultiPoly::var(0);
        let y = MultiPoly::var(1);
        let phi = Biholomorphism::tangent(&x * &y, y.pow(3).scale(&rat(1, 2)));
        let psi = Biholomorphism::tangent(x.pow(2).scale(&int(-3)), &x * &x);
        let lhs = apply_biholomorphism(&phi.compose(&psi), &c).unwrap();
        let rhs = apply_biholomorphism(&psi, &apply_biholomorphism(&phi, &c).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn dicritical_fixture() {
        let x = MultiPoly::var(0);
        let y = MultiPoly::var(1);
        let phi = Biholomorphism::tangent(&x * &x, &x * &y);
        assert!(phi.is_dicritical());
        assert!(!Biholomorphism::tangent(&x * &y, MultiPoly::zero()).is_dicritical());
        let mut a = ParamMatrix::new(6);
        for (l, v) in [(1, int(3)), (2, int(-2)), (3, rat(1, 2))] {
            a.set(1, l, v);
        }
        a.set(2, 3, int(7));
        let out = apply_biholomorphism(&phi, &normal_form_curve(&a, 12)).unwrap();
        let (b, _) = prenormalize(&out, 12).unwrap();
        let mut expect = a.clone();
        expect.set(2, 2, int(0));
        expect.set(3, 3, int(7));
        assert_eq!(b, expect);
    }

    #[test]
    fn kill_step_preserves_lower_heights() {
        let mut a = ParamMatrix::new(6);
        for (l, v) in [(1, int(3)), (2, int(-2)), (3, rat(1, 2))] {
            a.set(1, l, v);
        }
        let x = MultiPoly::var(0);
        let y = MultiPoly::var(1);
        let phi = Biholomorphism::tangent(&(&x * &y) + &y.pow(2), (&x * &x).scale(&int(2)));
        let c = apply_biholomorphism(&phi, &normal_form_curve(&a, 8)).unwrap();
        let (_, c1) = kill_height(&c, 1).unwrap();
        let before = cone_matrix(&c, 8).unwrap();
        let after = cone_matrix(&c1, 8).unwrap();
        assert_eq!(before.rows[0], after.rows[0]);
        assert!(after.rows[1][..4].iter().all(ConeEntry::is_zero));
    }

    #[test]
    fn curve_json_round_trip() {
        let c = lines(&[1, 2, 3, 4]);
        let s = serde_json::to_string(&c).unwrap();
        let d: CurveInput = serde_json::from_str(&s).unwrap();
        assert_eq!(c, d);
        let padded: CurveInput =
            serde_json::from_str(r#"{"branches":[{"orientation":"xOfY","coeffs":["0"],"order":3}]}"#).unwrap();
        assert_eq!(padded.branches[0].order(), 3);
    }
}
