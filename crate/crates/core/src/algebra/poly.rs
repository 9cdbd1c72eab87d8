//! Sparse multivariate polynomials over exact rationals.
//!
//! Monomials are sorted `(variable, exponent)` lists; terms live in a
//! `BTreeMap` keyed by graded-lexicographic order on registry indices, so
//! iteration and serialization order are stable.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use smallvec::SmallVec;

use super::rational::{format_rational, Rational};
use super::registry::VarRegistry;
use crate::error::{Error, Result};

/// Product of variable powers, stored as increasing `(var, exp)` pairs with `exp > 0`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(SmallVec<[(u32, u32); 4]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn var(v: usize) -> Self {
        Self::var_pow(v, 1)
    }

    pub fn var_pow(v: usize, e: u32) -> Self {
        let mut m = SmallVec::new();
        if e > 0 {
            m.push((v as u32, e));
        }
        Monomial(m)
    }

    /// Builds from arbitrary `(var, exp)` pairs (merged and sorted).
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, u32)>) -> Self {
        let mut map: BTreeMap<u32, u32> = BTreeMap::new();
        for (v, e) in pairs {
            if e > 0 {
                *map.entry(v as u32).or_insert(0) += e;
            }
        }
        Monomial(map.into_iter().collect())
    }

    pub fn from_exponents(exps: &[u32]) -> Self {
        Monomial(exps.iter().enumerate().filter(|(_, &e)| e > 0).map(|(v, &e)| (v as u32, e)).collect())
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.0.iter().map(|&(v, e)| (v as usize, e))
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn exp(&self, v: usize) -> u32 {
        self.0.iter().find(|&&(w, _)| w as usize == v).map(|&(_, e)| e).unwrap_or(0)
    }

    pub fn weighted_degree(&self, reg: &VarRegistry) -> i64 {
        self.pairs().map(|(v, e)| reg.weight(v) * e as i64).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// `self / other` if `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out: SmallVec<[(u32, u32); 4]> = SmallVec::new();
        let mut j = 0;
        let b = &other.0;
        for &(v, e) in self.0.iter() {
            if j < b.len() && b[j].0 < v {
                return None;
            }
            if j < b.len() && b[j].0 == v {
                if b[j].1 > e {
                    return None;
                }
                if e > b[j].1 {
                    out.push((v, e - b[j].1));
                }
                j += 1;
            } else {
                out.push((v, e));
            }
        }
        if j < b.len() {
            return None;
        }
        Some(Monomial(out))
    }

    /// Removes variable `v`, returning its exponent and the remaining monomial.
    pub fn split_var(&self, v: usize) -> (u32, Monomial) {
        let mut e = 0;
        let rest = self
            .0
            .iter()
            .filter(|&&(w, x)| {
                if w as usize == v {
                    e = x;
                    false
                } else {
                    true
                }
            })
            .copied()
            .collect();
        (e, Monomial(rest))
    }

    /// Splits into the part over `vars` and the complementary part.
    pub fn split_by(&self, vars: &BTreeSet<usize>) -> (Monomial, Monomial) {
        let mut inside = SmallVec::new();
        let mut outside = SmallVec::new();
        for &(v, e) in self.0.iter() {
            if vars.contains(&(v as usize)) {
                inside.push((v, e));
            } else {
                outside.push((v, e));
            }
        }
        (Monomial(inside), Monomial(outside))
    }

    pub fn exponent_vector(&self, len: usize) -> Vec<u32> {
        let mut v = vec![0; len];
        for (i, e) in self.pairs() {
            if i < len {
                v[i] = e;
            }
        }
        v
    }

    pub fn max_var(&self) -> Option<usize> {
        self.0.last().map(|&(v, _)| v as usize)
    }
}

impl Ord for Monomial {
    /// Graded lexicographic: total degree first, then the exponent of the
    /// lowest-index variable decides.
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            o => return o,
        }
        let (a, b) = (&self.0, &other.0);
        let mut i = 0;
        while i < a.len() && i < b.len() {
            let (va, ea) = a[i];
            let (vb, eb) = b[i];
            if va != vb {
                // the monomial containing the lower-index variable is larger
                return if va < vb { Ordering::Greater } else { Ordering::Less };
            }
            if ea != eb {
                return ea.cmp(&eb);
            }
            i += 1;
        }
        a.len().cmp(&b.len())
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let parts: Vec<String> =
            self.pairs().map(|(v, e)| if e == 1 { format!("v{v}") } else { format!("v{v}^{e}") }).collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Sparse polynomial with rational coefficients; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct MultiPoly {
    terms: BTreeMap<Monomial, Rational>,
}

impl MultiPoly {
    pub fn zero() -> Self {
        MultiPoly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::term(Monomial::one(), c)
    }

    pub fn var(v: usize) -> Self {
        Self::term(Monomial::var(v), Rational::one())
    }

    pub fn term(m: Monomial, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        MultiPoly { terms }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = MultiPoly::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_one())
    }

    /// Constant value if the polynomial has no variables.
    pub fn as_constant(&self) -> Option<Rational> {
        if self.is_zero() {
            return Some(Rational::zero());
        }
        if self.is_constant() {
            self.terms.values().next().cloned()
        } else {
            None
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Monomial, Rational)> {
        self.terms.into_iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Leading term under graded-lex order.
    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_assign_ref(&mut self, other: &MultiPoly) {
        for (m, c) in other.terms.iter() {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn sub_assign_ref(&mut self, other: &MultiPoly) {
        for (m, c) in other.terms.iter() {
            self.add_term(m.clone(), -c.clone());
        }
    }

    /// `self += c * m * other`.
    pub fn add_scaled(&mut self, other: &MultiPoly, c: &Rational, m: &Monomial) {
        if c.is_zero() {
            return;
        }
        for (mo, co) in other.terms.iter() {
            self.add_term(mo.mul(m), co * c);
        }
    }

    /// `self += a * b`.
    pub fn add_product(&mut self, a: &MultiPoly, b: &MultiPoly) {
        for (ma, ca) in a.terms.iter() {
            for (mb, cb) in b.terms.iter() {
                self.add_term(ma.mul(mb), ca * cb);
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero();
        }
        MultiPoly { terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect() }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> MultiPoly {
        MultiPoly { terms: self.terms.iter().map(|(mo, c)| (mo.mul(m), c.clone())).collect() }
    }

    pub fn pow(&self, e: u32) -> MultiPoly {
        let mut result = MultiPoly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn derivative(&self, v: usize) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (m, c) in self.terms.iter() {
            let (e, rest) = m.split_var(v);
            if e > 0 {
                let nm = rest.mul(&Monomial::var_pow(v, e - 1));
                out.add_term(nm, c * Rational::from_integer(e.into()));
            }
        }
        out
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    pub fn degree_in(&self, v: usize) -> u32 {
        self.terms.keys().map(|m| m.exp(v)).max().unwrap_or(0)
    }

    /// Degree in the subset of variables `vars`.
    pub fn degree_in_set(&self, vars: &BTreeSet<usize>) -> u32 {
        self.terms.keys().map(|m| m.pairs().filter(|(v, _)| vars.contains(v)).map(|(_, e)| e).sum()).max().unwrap_or(0)
    }

    pub fn variables(&self) -> BTreeSet<usize> {
        self.terms.keys().flat_map(|m| m.pairs().map(|(v, _)| v)).collect()
    }

    pub fn max_var(&self) -> Option<usize> {
        self.terms.keys().filter_map(|m| m.max_var()).max()
    }

    /// Substitutes polynomials for variables; unbound variables pass through.
    pub fn substitute(&self, bindings: &HashMap<usize, MultiPoly>) -> MultiPoly {
        if bindings.is_empty() {
            return self.clone();
        }
        let mut cache: HashMap<(usize, u32), MultiPoly> = HashMap::new();
        let mut out = MultiPoly::zero();
        for (m, c) in self.terms.iter() {
            let mut kept = Monomial::one();
            let mut factor = MultiPoly::constant(c.clone());
            for (v, e) in m.pairs() {
                match bindings.get(&v) {
                    Some(val) => {
                        let pw = cache.entry((v, e)).or_insert_with(|| val.pow(e)).clone();
                        factor = &factor * &pw;
                        if factor.is_zero() {
                            break;
                        }
                    }
                    None => kept = kept.mul(&Monomial::var_pow(v, e)),
                }
            }
            if !factor.is_zero() {
                out.add_assign_ref(&factor.mul_monomial(&kept));
            }
        }
        out
    }

    /// Substitutes rational values for some variables.
    pub fn substitute_values(&self, values: &HashMap<usize, Rational>) -> MultiPoly {
        let mut out = MultiPoly::zero();
        let mut cache: HashMap<(usize, u32), Rational> = HashMap::new();
        for (m, c) in self.terms.iter() {
            let mut coeff = c.clone();
            let mut kept: SmallVec<[(u32, u32); 4]> = SmallVec::new();
            for &(v, e) in m.0.iter() {
                match values.get(&(v as usize)) {
                    Some(val) => {
                        let pw =
                            cache.entry((v as usize, e)).or_insert_with(|| num_traits::pow(val.clone(), e as usize));
                        coeff *= &*pw;
                        if coeff.is_zero() {
                            break;
                        }
                    }
                    None => kept.push((v, e)),
                }
            }
            out.add_term(Monomial(kept), coeff);
        }
        out
    }

    /// Evaluates with a dense value vector indexed by variable; missing values are an error.
    pub fn eval(&self, point: &[Rational]) -> Result<Rational> {
        let mut total = Rational::zero();
        for (m, c) in self.terms.iter() {
            let mut t = c.clone();
            for (v, e) in m.pairs() {
                let val = point.get(v).ok_or_else(|| Error::Registry(format!("no value for variable {v}")))?;
                t *= num_traits::pow(val.clone(), e as usize);
            }
            total += t;
        }
        Ok(total)
    }

    /// Homogeneous components with respect to the variables `vars`.
    pub fn homogeneous_components(&self, vars: &[usize]) -> BTreeMap<u32, MultiPoly> {
        let mut out: BTreeMap<u32, MultiPoly> = BTreeMap::new();
        for (m, c) in self.terms.iter() {
            let d: u32 = vars.iter().map(|&v| m.exp(v)).sum();
            out.entry(d).or_default().add_term(m.clone(), c.clone());
        }
        out
    }

    /// Common weighted degree of all terms, or `None` if they differ.
    /// The zero polynomial is reported as `None` too.
    pub fn weighted_degree(&self, reg: &VarRegistry) -> Option<i64> {
        let mut it = self.terms.keys().map(|m| m.weighted_degree(reg));
        let first = it.next()?;
        if it.all(|d| d == first) {
            Some(first)
        } else {
            None
        }
    }

    /// Groups terms by their monomial in `vars`; values are polynomials in the other variables.
    pub fn coefficients_in(&self, vars: &BTreeSet<usize>) -> BTreeMap<Monomial, MultiPoly> {
        let mut out: BTreeMap<Monomial, MultiPoly> = BTreeMap::new();
        for (m, c) in self.terms.iter() {
            let (inside, outside) = m.split_by(vars);
            out.entry(inside).or_default().add_term(outside, c.clone());
        }
        out
    }

    /// Keeps the terms accepted by `keep`.
    pub fn filter_terms(&self, keep: impl Fn(&Monomial) -> bool) -> MultiPoly {
        MultiPoly { terms: self.terms.iter().filter(|(m, _)| keep(m)).map(|(m, c)| (m.clone(), c.clone())).collect() }
    }

    /// Exact division; `None` if `divisor` does not divide `self`.
    pub fn div_exact(&self, divisor: &MultiPoly) -> Option<MultiPoly> {
        let (lm, lc) = divisor.leading()?;
        let (lm, lc) = (lm.clone(), lc.clone());
        if let Some(c) = divisor.as_constant() {
            return Some(self.scale(&(Rational::one() / c)));
        }
        let mut rem = self.clone();
        let mut quot = MultiPoly::zero();
        while let Some((m, c)) = rem.leading() {
            let qm = m.div(&lm)?;
            let qc = c / &lc;
            rem.add_scaled(divisor, &(-qc.clone()), &qm);
            quot.add_term(qm, qc);
        }
        Some(quot)
    }

    /// Renders with registry names, e.g. `2*a_2_2*x^2 - 1/3`.
    pub fn display(&self, reg: &VarRegistry) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c < &Rational::zero();
            let abs = if neg { -c.clone() } else { c.clone() };
            if idx == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let vars: Vec<String> = m
                .pairs()
                .map(|(v, e)| {
                    let n = if v < reg.len() { reg.name(v).to_string() } else { format!("v{v}") };
                    if e == 1 {
                        n
                    } else {
                        format!("{n}^{e}")
                    }
                })
                .collect();
            if vars.is_empty() {
                s.push_str(&format_rational(&abs));
            } else if abs.is_one() {
                s.push_str(&vars.join("*"));
            } else {
                s.push_str(&format!("{}*{}", format_rational(&abs), vars.join("*")));
            }
        }
        s
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(m, c)| format!("{}*{:?}", format_rational(c), m)).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Zero for MultiPoly {
    fn zero() -> Self {
        MultiPoly::zero()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for MultiPoly {
    fn one() -> Self {
        MultiPoly::one()
    }
}

impl From<Rational> for MultiPoly {
    fn from(c: Rational) -> Self {
        MultiPoly::constant(c)
    }
}

impl<'a> Add<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        let (big, small) = if self.len() >= rhs.len() { (self, rhs) } else { (rhs, self) };
        let mut out = big.clone();
        out.add_assign_ref(small);
        out
    }
}

impl<'a> Sub<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        out.sub_assign_ref(rhs);
        out
    }
}

impl<'a> Mul<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero();
        out.add_product(self, rhs);
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect() }
    }
}

impl Add for MultiPoly {
    type Output = MultiPoly;
    fn add(mut self, rhs: MultiPoly) -> MultiPoly {
        self.add_assign_ref(&rhs);
        self
    }
}

impl Sub for MultiPoly {
    type Output = MultiPoly;
    fn sub(mut self, rhs: MultiPoly) -> MultiPoly {
        self.sub_assign_ref(&rhs);
        self
    }
}

impl Mul for MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: MultiPoly) -> MultiPoly {
        &self * &rhs
    }
}

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        -&self
    }
}

/// Substitutes polynomial-or-rational bindings given by registry name.
pub fn poly_eval_subst(poly: &MultiPoly, reg: &VarRegistry, bindings: &[(&str, MultiPoly)]) -> Result<MultiPoly> {
    let mut map = HashMap::new();
    for (name, val) in bindings {
        map.insert(reg.find_name(name)?, val.clone());
    }
    Ok(poly.substitute(&map))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{int, rat};

    fn x() -> MultiPoly {
        MultiPoly::var(0)
    }
    fn y() -> MultiPoly {
        MultiPoly::var(1)
    }

    #[test]
    fn arithmetic_and_order() {
        let p = &(&x() * &y()) + &x();
        let q = &p * &p;
        assert_eq!(q.len(), 3);
        assert_eq!(q.total_degree(), Some(4));
        let (lm, _) = q.leading().unwrap();
        assert_eq!(lm, &Monomial::from_pairs([(0, 2), (1, 2)]));
        // x^2 > x*y > y^2 in graded lex
        assert!(Monomial::var_pow(0, 2) > Monomial::from_pairs([(0, 1), (1, 1)]));
        assert!(Monomial::from_pairs([(0, 1), (1, 1)]) > Monomial::var_pow(1, 2));
        assert!(Monomial::var(1) > Monomial::one());
    }

    #[test]
    fn substitution_examples() {
        let reg = VarRegistry::new(4);
        let xy = &x() * &y();
        let v = poly_eval_subst(&xy, &reg, &[("x", MultiPoly::constant(int(2))), ("y", MultiPoly::constant(int(3)))])
            .unwrap();
        assert_eq!(v, MultiPoly::constant(int(6)));
        assert_eq!(poly_eval_subst(&xy, &reg, &[]).unwrap(), xy);
        assert!(poly_eval_subst(&xy, &reg, &[("z", MultiPoly::one())]).is_err());
    }

    #[test]
    fn homogeneous_and_weighted() {
        let p = &(&(&x() * &x()) + &(&x() * &y())) + &y().pow(3);
        let comps = p.homogeneous_components(&[0, 1]);
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[&2], &(&x() * &x()) + &(&x() * &y()));
        assert_eq!(comps[&3], y().pow(3));
        assert!(MultiPoly::zero().homogeneous_components(&[0, 1]).is_empty());

        let reg = VarRegistry::new(6);
        let a22 = MultiPoly::var(reg.a(2, 2));
        let a33 = MultiPoly::var(reg.a(3, 3));
        assert_eq!((&a22 * &a33).weighted_degree(&reg), Some(3));
        assert_eq!((&a22 + &a33).weighted_degree(&reg), None);
    }

    #[test]
    fn division_and_derivative() {
        let a = &x() + &y();
        let b = &(&x() * &x()) - &y();
        let prod = &a * &b;
        assert_eq!(prod.div_exact(&a).unwrap(), b);
        assert!(prod.div_exact(&(&x() + &MultiPoly::one())).is_none());
        let d = prod.derivative(0);
        let expect = &(&b + &(&a * &x().scale(&int(2)))) + &MultiPoly::zero();
        assert_eq!(d, expect);
        assert_eq!(x().scale(&rat(1, 2)).eval(&[int(4), int(0)]).unwrap(), int(2));
    }
}
