use proptest::prelude::*;

use curvecensus::families::{j_invariant, to_long_weierstrass, valid_parameters};
use curvecensus::iso::{canonical_class_key, hessian_iso, legendre_iso, weierstrass_iso};
use curvecensus::{CurveDescriptor, Error, Family, Fe, GaloisField, LongWeierstrass};

const ORDERS: &[u64] = &[2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 25, 27, 32, 49, 64, 81, 121, 125, 243, 256, 343, 1009];
const ODD_SMALL: &[u64] = &[3, 5, 7, 9, 11, 13, 17, 19, 23, 25, 27, 29, 31, 37, 41, 43, 47, 49];
const SMALL: &[u64] = &[2, 4, 8, 16, 32, 3, 5, 7, 9, 11, 13, 17, 19, 23, 25, 27, 29, 31, 37, 41, 43, 47, 49];

fn field(q: u64) -> GaloisField {
    GaloisField::with_order(q).unwrap()
}

fn el(f: &GaloisField, raw: u64) -> Fe {
    f.elem(raw % f.q() as u64).unwrap()
}

fn any_q(orders: &'static [u64]) -> impl Strategy<Value = u64> {
    prop::sample::select(orders)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn field_axioms(q in any_q(ORDERS), a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let f = field(q);
        let (a, b, c) = (el(&f, a), el(&f, b), el(&f, c));
        prop_assert_eq!(f.add(a, b), f.add(b, a));
        prop_assert_eq!(f.mul(a, b), f.mul(b, a));
        prop_assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.add(a, f.neg(a)), f.zero());
        prop_assert_eq!(f.sub(f.add(a, b), b), a);
        if !a.is_zero() {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), f.one());
            prop_assert_eq!(f.mul(f.div(b, a).unwrap(), a), b);
            prop_assert_eq!(f.pow(a, f.q() as u64 - 1), f.one());
        } else {
            prop_assert!(matches!(f.inv(a), Err(Error::DivisionByZero)));
        }
        // Frobenius is additive
        let p = f.p() as u64;
        prop_assert_eq!(f.pow(f.add(a, b), p), f.add(f.pow(a, p), f.pow(b, p)));
    }

    #[test]
    fn quadratic_character_is_multiplicative(q in any_q(ORDERS), a in any::<u64>(), b in any::<u64>()) {
        let f = field(q);
        prop_assume!(f.p() > 2);
        let (a, b) = (el(&f, a), el(&f, b));
        prop_assert_eq!(f.chi2(f.mul(a, b)).unwrap(), f.chi2(a).unwrap() * f.chi2(b).unwrap());
        if let Some((r, s)) = f.sqrt(a).unwrap() {
            prop_assert_eq!(f.sqr(r), a);
            prop_assert_eq!(f.sqr(s), a);
            prop_assert!(r <= s);
        } else {
            prop_assert_eq!(f.chi2(a).unwrap(), -1);
        }
    }

    #[test]
    fn b8_relation(q in any_q(ORDERS), coeffs in prop::array::uniform5(any::<u64>())) {
        let f = field(q);
        let a = coeffs.map(|c| el(&f, c));
        let Ok(w) = LongWeierstrass::new(&f, a) else { return Ok(()) };
        let lhs = f.mul(f.int(4), w.b8());
        let rhs = f.sub(f.mul(w.b2(), w.b6()), f.sqr(w.b4()));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn isomorphic_models_share_j_and_key(
        q in any_q(ORDERS),
        coeffs in prop::array::uniform5(any::<u64>()),
        change in prop::array::uniform4(any::<u64>()),
    ) {
        let f = field(q);
        let a = coeffs.map(|c| el(&f, c));
        let Ok(w) = LongWeierstrass::new(&f, a) else { return Ok(()) };
        let alpha = el(&f, change[0]);
        prop_assume!(!alpha.is_zero());
        let b = w.transformed_coefficients(alpha, el(&f, change[1]), el(&f, change[2]), el(&f, change[3])).unwrap();
        let w2 = LongWeierstrass::new(&f, b).unwrap();
        prop_assert_eq!(w.j(), w2.j());
        prop_assert_eq!(canonical_class_key(&w), canonical_class_key(&w2));
        prop_assert!(weierstrass_iso(&w, &w2).unwrap());
    }

    #[test]
    fn jacobi_quartic_matches_legendre(q in any_q(ORDERS), u in any::<u64>()) {
        let f = field(q);
        prop_assume!(f.p() > 2);
        let u = el(&f, u);
        let Ok(jq) = CurveDescriptor::jacobi_quartic(&f, u) else { return Ok(()) };
        let half = f.inv(f.int(2)).unwrap();
        let t = f.mul(f.sub(f.one(), u), half);
        let leg = CurveDescriptor::legendre(&f, t).unwrap();
        prop_assert_eq!(j_invariant(&jq).unwrap(), j_invariant(&leg).unwrap());
        let ji = CurveDescriptor::jacobi_intersection(&f, u);
        if let Ok(ji) = ji {
            let lu = CurveDescriptor::legendre(&f, u).unwrap();
            prop_assert_eq!(j_invariant(&ji).unwrap(), j_invariant(&lu).unwrap());
        }
    }

    #[test]
    fn generalized_hessian_scales_to_hessian(q in any_q(ORDERS), u in any::<u64>(), z in any::<u64>()) {
        let f = field(q);
        let (u, zeta) = (el(&f, u), el(&f, z));
        prop_assume!(!zeta.is_zero());
        let v = f.pow(zeta, 3);
        let Ok(gh) = CurveDescriptor::generalized_hessian(&f, u, v) else { return Ok(()) };
        let h = CurveDescriptor::hessian(&f, f.div(u, zeta).unwrap()).unwrap();
        prop_assert_eq!(j_invariant(&gh).unwrap(), j_invariant(&h).unwrap());
    }
}

fn check_equivalence<F: Fn(Fe, Fe) -> bool>(params: &[Fe], rel: F) -> Result<(), TestCaseError> {
    for &a in params {
        prop_assert!(rel(a, a));
        for &b in params {
            let ab = rel(a, b);
            prop_assert_eq!(ab, rel(b, a));
            if !ab {
                continue;
            }
            for &c in params {
                if rel(b, c) {
                    prop_assert!(rel(a, c));
                }
            }
        }
    }
    Ok(())
}

fn params(f: &GaloisField, family: Family) -> Vec<Fe> {
    valid_parameters(f, family)
        .unwrap()
        .iter()
        .map(|c| f.elem(c.parameter_encoding().unwrap()).unwrap())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn legendre_predicate_is_equivalence(q in any_q(ODD_SMALL)) {
        let f = field(q);
        let ps = params(&f, Family::Legendre);
        check_equivalence(&ps, |a, b| legendre_iso(&f, a, b).unwrap())?;
    }

    #[test]
    fn hessian_predicate_is_equivalence(q in any_q(SMALL)) {
        let f = field(q);
        let ps = params(&f, Family::Hessian);
        check_equivalence(&ps, |a, b| hessian_iso(&f, a, b).unwrap())?;
    }
}

#[test]
fn hessian_characteristic_three_j_values_distinct() {
    for q in [3u64, 9, 27, 81, 243] {
        let f = field(q);
        let cs = valid_parameters(&f, Family::Hessian).unwrap();
        let mut js: Vec<Fe> = cs.iter().map(|c| j_invariant(c).unwrap()).collect();
        let n = js.len();
        js.sort();
        js.dedup();
        assert_eq!(js.len(), n, "q={q}");
    }
}

#[test]
fn every_family_model_is_nonsingular() {
    for q in [2u64, 3, 4, 5, 7, 8, 9, 25, 27, 32] {
        let f = field(q);
        for fam in Family::ALL {
            let Ok(cs) = valid_parameters(&f, fam) else {
                assert!(!fam.supports_characteristic(f.p()));
                continue;
            };
            for c in &cs {
                let w = to_long_weierstrass(c).unwrap();
                assert!(!w.discriminant().is_zero());
                assert_eq!(w.j(), j_invariant(c).unwrap());
            }
        }
    }
}
