//! JSON documents for polynomials, generator sets and first-integral sets.
//!
//! Polynomials are stored as term lists keyed by variable name, with a
//! `display` string alongside for reading. Only the term list is parsed back.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::algebra::poly::{Monomial, MultiPoly};
use crate::algebra::ratfunc::RationalFunction;
use crate::algebra::rational::{format_rational, parse_rational, serde_vec, Rational};
use crate::algebra::registry::VarRegistry;
use crate::distribution::generators::GeneratorSet;
use crate::distribution::{DerivationOnA, PlaneVectorField, SolveDiagnostics};
use crate::error::{Error, Result};
use crate::integrals::{FirstIntegral, FirstIntegralSet, IntegralKind};
use crate::normal_form::{parse_index, Multiplicities, NormalForm};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub coeff: String,
    /// Variable name to exponent; empty for the constant term.
    pub monomial: BTreeMap<String, u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyJson {
    #[serde(default)]
    pub display: String,
    pub terms: Vec<TermJson>,
}

pub fn poly_to_json(p: &MultiPoly, reg: &VarRegistry) -> PolyJson {
    let terms = p
        .terms()
        .map(|(m, c)| TermJson {
            coeff: format_rational(c),
            monomial: m.pairs().map(|(v, e)| (reg.name(v).to_string(), e)).collect(),
        })
        .collect();
    PolyJson { display: p.display(reg), terms }
}

pub fn poly_from_json(p: &PolyJson, reg: &VarRegistry) -> Result<MultiPoly> {
    let mut terms = Vec::with_capacity(p.terms.len());
    for t in &p.terms {
        let mut m = Monomial::one();
        for (name, &e) in &t.monomial {
            m = m.mul(&Monomial::var_pow(reg.find_name(name)?, e));
        }
        terms.push((m, parse_rational(&t.coeff)?));
    }
    Ok(MultiPoly::from_terms(terms))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalFunctionJson {
    #[serde(default)]
    pub display: String,
    pub num: PolyJson,
    pub den: PolyJson,
}

pub fn ratfunc_to_json(f: &RationalFunction, reg: &VarRegistry) -> RationalFunctionJson {
    RationalFunctionJson { display: f.display(reg), num: poly_to_json(&f.num, reg), den: poly_to_json(&f.den, reg) }
}

pub fn ratfunc_from_json(f: &RationalFunctionJson, reg: &VarRegistry) -> Result<RationalFunction> {
    RationalFunction::new(poly_from_json(&f.num, reg)?, poly_from_json(&f.den, reg)?)
}

/// `Σ c_{k,l} ∂/∂a_{k,l}` keyed by `"k,l"`.
pub type DerivationJson = BTreeMap<String, PolyJson>;

pub fn derivation_to_json(x: &DerivationOnA, reg: &VarRegistry) -> DerivationJson {
    x.components().map(|((k, l), c)| (format!("{k},{l}"), poly_to_json(c, reg))).collect()
}

pub fn derivation_from_json(p: usize, x: &DerivationJson, reg: &VarRegistry) -> Result<DerivationOnA> {
    let comps =
        x.iter().map(|(key, c)| Ok((parse_index(key)?, poly_from_json(c, reg)?))).collect::<Result<Vec<_>>>()?;
    Ok(DerivationOnA::from_components(p, comps))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaneFieldJson {
    pub alpha: PolyJson,
    pub beta: PolyJson,
    pub degree: usize,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GeneratorJson {
    pub i: usize,
    pub j: usize,
    pub x: DerivationJson,
    pub z: PlaneFieldJson,
    pub diagnostics: SolveDiagnostics,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GeneratorSetJson {
    pub p: usize,
    pub multiplicities: Multiplicities,
    #[serde(with = "serde_vec")]
    pub first_line: Vec<Rational>,
    pub generators: Vec<GeneratorJson>,
}

fn plane_field_json(z: &PlaneVectorField, reg: &VarRegistry) -> PlaneFieldJson {
    PlaneFieldJson { alpha: poly_to_json(&z.alpha, reg), beta: poly_to_json(&z.beta, reg), degree: z.degree }
}

pub fn generator_set_json(g: &GeneratorSet) -> GeneratorSetJson {
    GeneratorSetJson {
        p: g.p,
        multiplicities: g.n.clone(),
        first_line: g.first_line.clone(),
        generators: g
            .generators
            .iter()
            .map(|gen| GeneratorJson {
                i: gen.i,
                j: gen.j,
                x: derivation_to_json(&gen.x, &g.reg),
                z: plane_field_json(&gen.z, &g.reg),
                diagnostics: gen.diagnostics.clone(),
            })
            .collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FirstIntegralJson {
    pub label: String,
    pub kind: IntegralKind,
    pub weight: i64,
    pub counted_in_quotient: bool,
    pub f: RationalFunctionJson,
    pub projectivized: RationalFunctionJson,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FirstIntegralSetJson {
    pub p: usize,
    pub multiplicities: Multiplicities,
    #[serde(with = "serde_vec")]
    pub first_line: Vec<Rational>,
    pub tau: usize,
    pub tau_prime: usize,
    pub max_level: usize,
    pub integrals: Vec<FirstIntegralJson>,
}

pub fn integral_set_json(set: &FirstIntegralSet) -> FirstIntegralSetJson {
    FirstIntegralSetJson {
        p: set.p,
        multiplicities: set.n.clone(),
        first_line: set.first_line.clone(),
        tau: set.tau(),
        tau_prime: set.tau_prime(),
        max_level: set.max_level,
        integrals: set
            .integrals
            .iter()
            .map(|f| FirstIntegralJson {
                label: f.label.clone(),
                kind: f.kind.clone(),
                weight: f.weight,
                counted_in_quotient: f.counted_in_quotient,
                f: ratfunc_to_json(&f.f, &set.reg),
                projectivized: ratfunc_to_json(&f.projectivized, &set.reg),
            })
            .collect(),
    }
}

pub fn integral_set_from_json(doc: &FirstIntegralSetJson) -> Result<FirstIntegralSet> {
    if doc.first_line.len() + 3 != doc.p {
        return Err(Error::Parse(format!(
            "first line has {} entries, expected {}",
            doc.first_line.len(),
            doc.p.saturating_sub(3)
        )));
    }
    let reg = VarRegistry::new(doc.p);
    let integrals = doc
        .integrals
        .iter()
        .map(|f| {
            Ok(FirstIntegral {
                label: f.label.clone(),
                kind: f.kind.clone(),
                f: ratfunc_from_json(&f.f, &reg)?,
                weight: f.weight,
                projectivized: ratfunc_from_json(&f.projectivized, &reg)?,
                counted_in_quotient: f.counted_in_quotient,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FirstIntegralSet {
        p: doc.p,
        n: doc.multiplicities.clone(),
        first_line: doc.first_line.clone(),
        reg,
        integrals,
        max_level: doc.max_level,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "camelCase")]
pub enum NormalFormJson {
    Expanded { poly: PolyJson },
    Factored { factors: Vec<FactorJson> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorJson {
    pub branch: PolyJson,
    pub exponent: String,
}

pub fn normal_form_json(nf: &NormalForm, reg: &VarRegistry) -> NormalFormJson {
    match nf {
        NormalForm::Expanded(p) => NormalFormJson::Expanded { poly: poly_to_json(p, reg) },
        NormalForm::Factored(fs) => NormalFormJson::Factored {
            factors: fs
                .iter()
                .map(|(b, e)| FactorJson { branch: poly_to_json(b, reg), exponent: format_rational(e) })
                .collect(),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::int;
    use crate::integrals::first_integrals;
    use crate::sampling::Sampler;

    #[test]
    fn polynomial_round_trip() {
        let reg = VarRegistry::new(7);
        let a22 = MultiPoly::var(reg.a(2, 2));
        let p = &(&a22.pow(2) * &MultiPoly::var(reg.a(3, 4))).scale(&int(-3)) + &MultiPoly::constant(int(5));
        let j = poly_to_json(&p, &reg);
        let text = serde_json::to_string(&j).unwrap();
        let back: PolyJson = serde_json::from_str(&text).unwrap();
        assert_eq!(poly_from_json(&back, &reg).unwrap(), p);
        let bad = PolyJson {
            display: String::new(),
            terms: vec![TermJson { coeff: "1".into(), monomial: [("q".into(), 1)].into() }],
        };
        assert!(poly_from_json(&bad, &reg).is_err());
    }

    #[test]
    fn integral_set_round_trip() {
        let p = 8;
        let a1 = Sampler::new(2).first_line(p);
        let set = first_integrals(p, &Multiplicities::reduced(p), &a1).unwrap();
        let text = serde_json::to_string(&integral_set_json(&set)).unwrap();
        let doc: FirstIntegralSetJson = serde_json::from_str(&text).unwrap();
        let back = integral_set_from_json(&doc).unwrap();
        assert_eq!(back.tau(), set.tau());
        for (x, y) in back.integrals.iter().zip(&set.integrals) {
            assert_eq!(x.f, y.f);
            assert_eq!(x.projectivized, y.projectivized);
            assert_eq!(x.kind, y.kind);
        }
        assert_eq!(serde_json::to_string(&integral_set_json(&back)).unwrap(), text);
    }
}
