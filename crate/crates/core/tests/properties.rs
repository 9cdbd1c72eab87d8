//! Property tests for the algebraic invariants of the engine.

use proptest::prelude::*;

use tangentcone::algebra::poly::{Monomial, MultiPoly};
use tangentcone::algebra::rational::{format_rational, parse_rational, Rational};
use tangentcone::algebra::registry::VarRegistry;
use tangentcone::algebra::series::TruncatedSeries;
use tangentcone::io::{poly_from_json, poly_to_json};
use tangentcone::normal_form::{lambda_action, ParamMatrix};
use tangentcone::prenorm::{default_max_height, normal_form_curve, prenormalize};
use tangentcone::sampling::Sampler;

fn rational() -> impl Strategy<Value = Rational> {
    (-30i64..=30, 1i64..=12).prop_map(|(n, d)| Rational::new(n.into(), d.into()))
}

fn nonzero_rational() -> impl Strategy<Value = Rational> {
    rational().prop_filter("nonzero", |q| *q != Rational::from_integer(0.into()))
}

/// Sparse polynomial in `x`, `y`, `a_{2,2}`, `a_{2,3}` of degree at most 3 per variable.
fn poly() -> impl Strategy<Value = MultiPoly> {
    let reg = VarRegistry::new(6);
    let vars = [VarRegistry::X, VarRegistry::Y, reg.a(2, 2), reg.a(2, 3)];
    prop::collection::vec((prop::collection::vec(0u32..=3, 4), rational()), 0..6).prop_map(move |terms| {
        MultiPoly::from_terms(
            terms.into_iter().map(|(exps, c)| (Monomial::from_pairs(vars.iter().copied().zip(exps)), c)),
        )
    })
}

fn series(order: usize) -> impl Strategy<Value = TruncatedSeries> {
    (nonzero_rational(), prop::collection::vec(rational(), order - 1))
        .prop_map(|(c1, rest)| TruncatedSeries::new(std::iter::once(c1).chain(rest).collect()))
}

fn identity(order: usize) -> TruncatedSeries {
    let mut c = vec![Rational::from_integer(0.into()); order];
    c[0] = Rational::from_integer(1.into());
    TruncatedSeries::new(c)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rational_text_round_trip(q in rational()) {
        prop_assert_eq!(parse_rational(&format_rational(&q)).unwrap(), q);
    }

    #[test]
    fn polynomial_ring_laws(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn derivative_obeys_product_rule(a in poly(), b in poly()) {
        let v = VarRegistry::X;
        let lhs = (&a * &b).derivative(v);
        let rhs = &(&a.derivative(v) * &b) + &(&a * &b.derivative(v));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn polynomial_json_round_trip(a in poly()) {
        let reg = VarRegistry::new(6);
        let text = serde_json::to_string(&poly_to_json(&a, &reg)).unwrap();
        let back = poly_from_json(&serde_json::from_str(&text).unwrap(), &reg).unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn series_reversion_is_two_sided_inverse(s in series(6)) {
        let r = s.reverse().unwrap();
        prop_assert_eq!(s.compose(&r), identity(6));
        prop_assert_eq!(r.compose(&s), identity(6));
    }

    #[test]
    fn series_composition_is_associative(f in series(5), g in series(5), h in series(5)) {
        prop_assert_eq!(f.compose(&g).compose(&h), f.compose(&g.compose(&h)));
    }

    #[test]
    fn lambda_action_is_a_group_action(seed in any::<u64>(), l in nonzero_rational(), m in nonzero_rational()) {
        let a = Sampler::new(seed).params(7);
        let lm = &l * &m;
        prop_assert_eq!(lambda_action(&l, &lambda_action(&m, &a).unwrap()).unwrap(), lambda_action(&lm, &a).unwrap());
        prop_assert_eq!(lambda_action(&Rational::from_integer(1.into()), &a).unwrap(), a);
    }

    #[test]
    fn zero_entries_do_not_affect_equality(seed in any::<u64>()) {
        let a = Sampler::new(seed).params(6);
        let mut b = a.clone();
        b.set(3, 3, Rational::from_integer(0.into()));
        let mut c = a.clone();
        c.entries.remove(&(3, 3));
        prop_assert_eq!(b, c);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn prenormalization_recovers_the_matrix(seed in any::<u64>(), p in 5usize..=6) {
        let a: ParamMatrix = Sampler::new(seed).params(p);
        let h = default_max_height(p);
        let (b, _) = prenormalize(&normal_form_curve(&a, h), h).unwrap();
        prop_assert_eq!(b, a);
    }
}
