//! Isomorphism over the ground field: lemma predicates, a decision procedure
//! on Weierstrass models, a brute-force oracle and canonical class keys.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::families::{
    apply_change_of_variables, j_invariant, to_long_weierstrass, valid_parameters, CurveDescriptor, CurveParams,
    Family, LongWeierstrass,
};
use crate::gf::{Fe, GaloisField};

/// Largest field on which the brute-force oracle runs.
pub const ORACLE_MAX_Q: u32 = 64;

/// Canonical fingerprint of an isomorphism class: the j-invariant followed by
/// the orbit-minimal reduced coefficients `[a1, a2, a3, a4, a6]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassKey {
    pub j: Fe,
    pub rep: [Fe; 5],
}

impl ClassKey {
    pub fn encodings(&self) -> [u32; 6] {
        let r = self.rep.map(|x| x.encoding());
        [self.j.encoding(), r[0], r[1], r[2], r[3], r[4]]
    }
}

impl Serialize for ClassKey {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.encodings().serialize(s)
    }
}

fn same_field(a: &LongWeierstrass<'_>, b: &LongWeierstrass<'_>) -> Result<()> {
    if std::ptr::eq(a.field(), b.field()) {
        Ok(())
    } else {
        Err(Error::MixedFields)
    }
}

fn check_odd(f: &GaloisField) -> Result<()> {
    if f.p() == 2 {
        Err(Error::EvenCharacteristic)
    } else {
        Ok(())
    }
}

fn chi(f: &GaloisField, a: Fe) -> i8 {
    debug_assert!(!a.is_zero(), "lemma clauses apply chi2 to nonzero arguments only");
    f.chi2(a).expect("odd characteristic")
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Whether `a ≠ 0` is an `n`-th power in the field.
fn is_nth_power(f: &GaloisField, a: Fe, n: u64) -> bool {
    let log = f.log(a).expect("nonzero") as u64;
    log.is_multiple_of(gcd(n, f.q() as u64 - 1))
}

fn min_trace_one(f: &GaloisField, scale: Fe) -> Fe {
    // smallest x with Tr(x / scale) = 1
    let inv = f.inv(scale).expect("nonzero");
    f.elements()
        .find(|&x| f.trace(f.mul(x, inv)) == 1)
        .expect("trace is surjective")
}

/// `y² = x³ + A x + B` isomorphic to `w`, characteristic ≥ 5.
fn short_form(w: &LongWeierstrass<'_>) -> (Fe, Fe) {
    let f = w.field();
    (f.mul(f.int(-27), w.c4()), f.mul(f.int(-54), w.c6()))
}

/// Characteristic 3: `y² = x³ + a2 x² + a4 x + a6`.
fn square_completed(w: &LongWeierstrass<'_>) -> (Fe, Fe, Fe) {
    let f = w.field();
    let half = f.inv(f.int(2)).expect("odd characteristic");
    let quarter = f.sqr(half);
    (f.mul(w.b2(), quarter), f.mul(w.b4(), half), f.mul(w.b6(), quarter))
}

/// Characteristic 3, `j ≠ 0`: `y² = x³ + a2 x² + a6`.
fn p3_ordinary(w: &LongWeierstrass<'_>) -> (Fe, Fe) {
    let f = w.field();
    let (a2, a4, a6) = square_completed(w);
    let r = f.div(a4, a2).expect("j != 0");
    let a6 = f.add(f.add(f.add(a6, f.mul(r, a4)), f.mul(f.sqr(r), a2)), f.pow(r, 3));
    (a2, a6)
}

/// Characteristic 2, `j ≠ 0`: `y² + xy = x³ + a2 x² + a6`.
fn p2_ordinary(w: &LongWeierstrass<'_>) -> (Fe, Fe) {
    let f = w.field();
    let z = Fe::ZERO;
    let a = w.coefficients();
    let a = apply_change_of_variables(f, a, a[0], z, z, z).expect("a1 != 0");
    let a = apply_change_of_variables(f, a, Fe::ONE, a[2], z, z).expect("unit");
    let a = apply_change_of_variables(f, a, Fe::ONE, z, z, a[3]).expect("unit");
    debug_assert!(a[0] == Fe::ONE && a[2].is_zero() && a[3].is_zero());
    (a[1], a[4])
}

/// Characteristic 2, `j = 0`: `y² + a3 y = x³ + a4 x + a6`.
fn p2_supersingular(w: &LongWeierstrass<'_>) -> (Fe, Fe, Fe) {
    let f = w.field();
    let z = Fe::ZERO;
    let a = apply_change_of_variables(f, w.coefficients(), Fe::ONE, w.a2(), z, z).expect("unit");
    debug_assert!(a[0].is_zero() && a[1].is_zero());
    (a[2], a[3], a[4])
}

fn argmin_alphas(f: &GaloisField, value: impl Fn(Fe) -> Fe) -> (Fe, Vec<Fe>) {
    let mut best = None;
    let mut alphas = Vec::new();
    for alpha in f.nonzero() {
        let v = value(alpha);
        match best {
            Some(b) if v > b => {}
            Some(b) if v == b => alphas.push(alpha),
            _ => {
                best = Some(v);
                alphas.clear();
                alphas.push(alpha);
            }
        }
    }
    (best.expect("nonempty group"), alphas)
}

/// Canonical key of the isomorphism class of `w` over its field.
pub fn canonical_class_key(w: &LongWeierstrass<'_>) -> ClassKey {
    let f = w.field();
    let z = Fe::ZERO;
    let rep = match f.p() {
        2 if !w.a1().is_zero() => {
            let (a2, a6) = p2_ordinary(w);
            let a2 = if f.trace(a2) == 0 { z } else { min_trace_one(f, Fe::ONE) };
            [Fe::ONE, a2, z, z, a6]
        }
        2 => {
            let (a3, a4, a6) = p2_supersingular(w);
            let (a3m, alphas) = argmin_alphas(f, |al| f.mul(a3, f.inv(f.pow(al, 3)).unwrap()));
            // t moves a6 within a coset of a3²·{x² + x}; only Tr(c / a3²) survives
            let a3sq = f.sqr(a3);
            let mut best: Option<(Fe, u32)> = None;
            for alpha in alphas {
                let ai4 = f.inv(f.pow(alpha, 4)).unwrap();
                for s in f.elements() {
                    let a4n = f.mul(f.add(f.add(a4, f.mul(s, a3)), f.pow(s, 4)), ai4);
                    let c = f.add(f.add(a6, f.mul(f.sqr(s), a4)), f.pow(s, 6));
                    let bit = f.trace(f.div(c, a3sq).unwrap());
                    let cand = (a4n, bit);
                    if best.is_none_or(|b| cand < b) {
                        best = Some(cand);
                    }
                }
            }
            let (a4m, bit) = best.unwrap();
            let a6m = if bit == 0 { z } else { min_trace_one(f, f.sqr(a3m)) };
            [z, z, a3m, a4m, a6m]
        }
        3 => {
            let (a2, _, _) = square_completed(w);
            if !a2.is_zero() {
                let (a2, a6) = p3_ordinary(w);
                let mut best = None;
                for alpha in f.nonzero() {
                    let l = f.inv(f.sqr(alpha)).unwrap();
                    let cand = (f.mul(a2, l), f.mul(a6, f.pow(l, 3)));
                    if best.is_none_or(|b| cand < b) {
                        best = Some(cand);
                    }
                }
                let (a2, a6) = best.unwrap();
                [z, a2, z, z, a6]
            } else {
                let (_, a4, a6) = square_completed(w);
                let shifted: Vec<Fe> = f
                    .elements()
                    .map(|r| f.add(f.add(a6, f.mul(r, a4)), f.pow(r, 3)))
                    .collect();
                let (a4m, alphas) = argmin_alphas(f, |al| f.mul(a4, f.inv(f.pow(al, 4)).unwrap()));
                let a6m = alphas
                    .iter()
                    .flat_map(|&al| {
                        let ai6 = f.inv(f.pow(al, 6)).unwrap();
                        shifted.iter().map(move |&c| f.mul(c, ai6))
                    })
                    .min()
                    .unwrap();
                [z, z, z, a4m, a6m]
            }
        }
        _ => {
            let (a, b) = short_form(w);
            let mut best = None;
            for alpha in f.nonzero() {
                let a2 = f.sqr(alpha);
                let a4 = f.sqr(a2);
                let cand = (f.mul(a4, a), f.mul(f.mul(a4, a2), b));
                if best.is_none_or(|x| cand < x) {
                    best = Some(cand);
                }
            }
            let (a, b) = best.unwrap();
            [z, z, z, a, b]
        }
    };
    ClassKey { j: w.j(), rep }
}

/// Decides whether two models over the same field are isomorphic over it.
pub fn weierstrass_iso(w1: &LongWeierstrass<'_>, w2: &LongWeierstrass<'_>) -> Result<bool> {
    same_field(w1, w2)?;
    if w1.j() != w2.j() {
        return Ok(false);
    }
    let f = w1.field();
    Ok(match f.p() {
        2 if !w1.a1().is_zero() => {
            let (a2, a6) = p2_ordinary(w1);
            let (b2, b6) = p2_ordinary(w2);
            a6 == b6 && f.trace(f.add(a2, b2)) == 0
        }
        2 => {
            let (a3, a4, a6) = p2_supersingular(w1);
            let (b3, b4, b6) = p2_supersingular(w2);
            let target = f.div(a3, b3)?;
            f.nonzero().filter(|&al| f.pow(al, 3) == target).any(|al| {
                let b4s = f.mul(b4, f.pow(al, 4));
                let b6s = f.mul(b6, f.pow(al, 6));
                f.elements()
                    .filter(|&s| f.add(f.add(a4, f.mul(s, a3)), f.pow(s, 4)) == b4s)
                    .any(|s| {
                        let c = f.add(f.add(a6, f.mul(f.sqr(s), a4)), f.pow(s, 6));
                        f.elements().any(|t| f.add(f.add(c, f.mul(t, a3)), f.sqr(t)) == b6s)
                    })
            })
        }
        3 => {
            let (a2, _, _) = square_completed(w1);
            if !a2.is_zero() {
                let (a2, a6) = p3_ordinary(w1);
                let (b2, b6) = p3_ordinary(w2);
                let lambda = f.div(a2, b2)?;
                f.is_square(lambda)? && f.pow(lambda, 3) == f.div(a6, b6)?
            } else {
                let (_, a4, a6) = square_completed(w1);
                let (_, b4, b6) = square_completed(w2);
                let target = f.div(a4, b4)?;
                f.nonzero().filter(|&al| f.pow(al, 4) == target).any(|al| {
                    let b6s = f.mul(b6, f.pow(al, 6));
                    f.elements()
                        .any(|r| f.add(f.add(a6, f.mul(r, a4)), f.pow(r, 3)) == b6s)
                })
            }
        }
        _ => {
            let (a1, b1) = short_form(w1);
            let (a2, b2) = short_form(w2);
            if a1.is_zero() {
                is_nth_power(f, f.div(b2, b1)?, 6)
            } else if b1.is_zero() {
                is_nth_power(f, f.div(a2, a1)?, 4)
            } else {
                let ra = f.div(a2, a1)?;
                let rb = f.div(b2, b1)?;
                let lambda = f.div(rb, ra)?;
                f.sqr(lambda) == ra && f.pow(lambda, 3) == rb && f.is_square(lambda)?
            }
        }
    })
}

fn oracle_guard(f: &GaloisField) -> Result<()> {
    if f.q() > ORACLE_MAX_Q {
        Err(Error::GuardExceeded { what: "isomorphism oracle", q: f.q(), limit: ORACLE_MAX_Q })
    } else {
        Ok(())
    }
}

/// Brute-force isomorphism test: searches every admissible change of
/// variables `(α, β, γ, δ)` for one mapping `w1` to `w2`.
pub fn weierstrass_iso_oracle(w1: &LongWeierstrass<'_>, w2: &LongWeierstrass<'_>) -> Result<bool> {
    same_field(w1, w2)?;
    let f = w1.field();
    oracle_guard(f)?;
    let [a1, a2, a3, ..] = w1.coefficients();
    let target = w2.coefficients();
    let c = |n: i64| f.int(n);
    for u in f.nonzero() {
        let ui = f.inv(u)?;
        let (ui2, ui3) = (f.sqr(ui), f.pow(ui, 3));
        for s in f.elements() {
            if f.mul(f.add(a1, f.mul(c(2), s)), ui) != target[0] {
                continue;
            }
            for r in f.elements() {
                let n2 = f.sub(f.add(f.sub(a2, f.mul(s, a1)), f.mul(c(3), r)), f.sqr(s));
                if f.mul(n2, ui2) != target[1] {
                    continue;
                }
                for t in f.elements() {
                    let n3 = f.add(f.add(a3, f.mul(r, a1)), f.mul(c(2), t));
                    if f.mul(n3, ui3) != target[2] {
                        continue;
                    }
                    let out = apply_change_of_variables(f, w1.coefficients(), u, r, s, t)?;
                    if out == target {
                        return Ok(true);
                    }
                }
            }
        }
    }
    Ok(false)
}

/// Minimal coefficient tuple over the full orbit of `w`, by enumeration of
/// all `(q − 1)·q³` changes of variables.
pub fn oracle_class_key(w: &LongWeierstrass<'_>) -> Result<[Fe; 5]> {
    let f = w.field();
    oracle_guard(f)?;
    let mut best: Option<[Fe; 5]> = None;
    for u in f.nonzero() {
        for r in f.elements() {
            for s in f.elements() {
                for t in f.elements() {
                    let out = apply_change_of_variables(f, w.coefficients(), u, r, s, t)?;
                    if best.is_none_or(|b| out < b) {
                        best = Some(out);
                    }
                }
            }
        }
    }
    Ok(best.expect("nonempty orbit"))
}

fn check_legendre_params(f: &GaloisField, u: Fe, v: Fe) -> Result<()> {
    check_odd(f)?;
    for x in [u, v] {
        if x.is_zero() || x == Fe::ONE {
            return Err(Error::InvalidParameters("Legendre parameters must avoid 0 and 1".into()));
        }
    }
    Ok(())
}

/// First clause (1..=6) of the Legendre isomorphism criterion that holds for
/// `(u, v)`, if any.
pub fn legendre_iso_witness(f: &GaloisField, u: Fe, v: Fe) -> Result<Option<u8>> {
    check_legendre_params(f, u, v)?;
    let one = Fe::ONE;
    let one_minus_u = f.sub(one, u);
    let u_minus_one = f.sub(u, one);
    let clauses = [
        (u, true),
        (f.inv(u)?, chi(f, u) == 1),
        (one_minus_u, chi(f, f.neg(one)) == 1),
        (f.inv(one_minus_u)?, chi(f, u_minus_one) == 1),
        (f.div(u_minus_one, u)?, chi(f, f.neg(u)) == 1),
        (f.div(u, u_minus_one)?, chi(f, one_minus_u) == 1),
    ];
    Ok(clauses
        .iter()
        .position(|&(target, cond)| v == target && cond)
        .map(|i| i as u8 + 1))
}

pub fn legendre_iso(f: &GaloisField, u: Fe, v: Fe) -> Result<bool> {
    Ok(legendre_iso_witness(f, u, v)?.is_some())
}

/// Which clause of the Hessian isomorphism criterion holds, with the third
/// roots of unity used.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HessianWitness {
    Scaling { zeta1: Fe },
    Fractional { zeta1: Fe, zeta2: Fe },
}

pub fn hessian_iso_witness(f: &GaloisField, u: Fe, v: Fe) -> Result<Option<HessianWitness>> {
    let k27 = f.int(27);
    if f.pow(u, 3) == k27 || f.pow(v, 3) == k27 {
        return Err(Error::InvalidParameters("Hessian parameters need u^3 != 27".into()));
    }
    let roots = f.third_roots_of_unity();
    for &z1 in &roots {
        if v == f.mul(z1, u) {
            return Ok(Some(HessianWitness::Scaling { zeta1: z1 }));
        }
    }
    if f.q() % 3 == 1 {
        let three = f.int(3);
        for &z1 in &roots {
            for &z2 in &roots {
                let den = f.sub(u, f.mul(three, z2));
                if den.is_zero() {
                    continue;
                }
                let num = f.mul(f.mul(three, z1), f.add(u, f.mul(f.int(6), z2)));
                if v == f.div(num, den)? {
                    return Ok(Some(HessianWitness::Fractional { zeta1: z1, zeta2: z2 }));
                }
            }
        }
    }
    Ok(None)
}

pub fn hessian_iso(f: &GaloisField, u: Fe, v: Fe) -> Result<bool> {
    Ok(hessian_iso_witness(f, u, v)?.is_some())
}

/// The sets of parameters equivalent to a family curve over the closure
/// (equal j) and over the ground field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassSets {
    pub j_set: Vec<u64>,
    pub i_set: Vec<u64>,
}

/// Computes both class sets of `c` by scanning every valid parameter. The
/// ground-field set uses the family's own criterion where one exists and
/// the Weierstrass decision procedure otherwise.
pub fn class_sets(c: &CurveDescriptor<'_>) -> Result<ClassSets> {
    let family = c
        .family()
        .ok_or_else(|| Error::InvalidParameters("class sets are defined for family curves".into()))?;
    let f = c.field();
    let j = j_invariant(c)?;
    let model = to_long_weierstrass(c)?;
    let mut j_set = Vec::new();
    let mut i_set = Vec::new();
    for other in valid_parameters(f, family)? {
        if j_invariant(&other)? != j {
            continue;
        }
        let enc = other.parameter_encoding().expect("family curve");
        j_set.push(enc);
        let iso = match (c.params(), other.params()) {
            (CurveParams::Legendre(u), CurveParams::Legendre(v)) => legendre_iso(f, u, v)?,
            (CurveParams::Hessian(u), CurveParams::Hessian(v)) => hessian_iso(f, u, v)?,
            _ => weierstrass_iso(&model, &to_long_weierstrass(&other)?)?,
        };
        if iso {
            i_set.push(enc);
        }
    }
    debug_assert!(family != Family::GeneralizedHessian || !j_set.is_empty());
    Ok(ClassSets { j_set, i_set })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(q: u64) -> GaloisField {
        GaloisField::with_order(q).unwrap()
    }

    fn short<'f>(gf: &'f GaloisField, a: i64, b: i64) -> LongWeierstrass<'f> {
        LongWeierstrass::short(gf, gf.int(a), gf.int(b)).unwrap()
    }

    #[test]
    fn legendre_predicate_examples() {
        let gf7 = f(7);
        assert!(legendre_iso(&gf7, Fe(3), Fe(3)).unwrap());
        assert_eq!(legendre_iso_witness(&gf7, Fe(2), Fe(4)).unwrap(), Some(2));
        assert!(!legendre_iso(&gf7, Fe(3), Fe(5)).unwrap());
        assert!(legendre_iso(&gf7, Fe(1), Fe(2)).is_err());
        assert_eq!(legendre_iso(&f(4), Fe(2), Fe(3)), Err(Error::EvenCharacteristic));
    }

    #[test]
    fn hessian_predicate_examples() {
        let gf7 = f(7);
        assert!(hessian_iso(&gf7, Fe(2), Fe(2)).unwrap());
        let v = gf7.div(gf7.int(18), gf7.int(-3)).unwrap();
        assert!(hessian_iso(&gf7, Fe(0), v).unwrap());
        assert!(!hessian_iso(&f(5), Fe(1), Fe(2)).unwrap());
        assert!(hessian_iso(&gf7, Fe(3), Fe(1)).is_err());
    }

    #[test]
    fn weierstrass_examples() {
        let gf7 = f(7);
        let w = short(&gf7, 1, 1);
        assert!(weierstrass_iso(&w, &w).unwrap());
        assert!(weierstrass_iso(&w, &short(&gf7, 4, 1)).unwrap());
        assert!(!weierstrass_iso(&short(&gf7, 1, 0), &short(&gf7, 3, 0)).unwrap());
        assert_eq!(canonical_class_key(&w), canonical_class_key(&short(&gf7, 4, 1)));
        assert_ne!(
            canonical_class_key(&short(&gf7, 1, 0)),
            canonical_class_key(&short(&gf7, 3, 0))
        );
        let other = f(11);
        assert_eq!(
            weierstrass_iso(&w, &short(&other, 1, 1)),
            Err(Error::MixedFields)
        );
    }

    #[test]
    fn oracle_examples() {
        let gf5 = f(5);
        let m = |u: u32| to_long_weierstrass(&CurveDescriptor::legendre(&gf5, Fe(u)).unwrap()).unwrap();
        assert!(weierstrass_iso_oracle(&m(2), &m(2)).unwrap());
        assert!(!legendre_iso(&gf5, Fe(2), Fe(3)).unwrap());
        assert!(!weierstrass_iso_oracle(&m(2), &m(3)).unwrap());
        let gf7 = f(7);
        assert!(weierstrass_iso_oracle(&short(&gf7, 1, 1), &short(&gf7, 4, 1)).unwrap());
        let big = f(67);
        let w = short(&big, 1, 1);
        assert!(matches!(weierstrass_iso_oracle(&w, &w), Err(Error::GuardExceeded { .. })));
    }

    #[test]
    fn class_set_examples() {
        let gf7 = f(7);
        let c = CurveDescriptor::legendre(&gf7, Fe(3)).unwrap();
        let s = class_sets(&c).unwrap();
        assert_eq!(s.j_set, vec![3, 5]);
        assert_eq!(s.i_set, vec![3]);
        let gf9 = f(9);
        let c = CurveDescriptor::legendre(&gf9, gf9.int(-1)).unwrap();
        let s = class_sets(&c).unwrap();
        assert_eq!(s.j_set, vec![2]);
        assert_eq!(s.i_set, vec![2]);
        let c = CurveDescriptor::hessian(&gf7, Fe(0)).unwrap();
        assert_eq!(class_sets(&c).unwrap().j_set.len(), 4);
    }

    #[test]
    fn keys_agree_with_oracle_small_fields() {
        for q in [2u64, 3, 4, 5, 7, 8, 9] {
            let gf = f(q);
            let mut models = Vec::new();
            for fam in Family::ALL {
                if let Ok(ps) = valid_parameters(&gf, fam) {
                    models.extend(ps.iter().map(|c| to_long_weierstrass(c).unwrap()));
                }
            }
            let keys: Vec<_> = models.iter().map(canonical_class_key).collect();
            let oracle: Vec<_> = models.iter().map(|w| oracle_class_key(w).unwrap()).collect();
            for i in 0..models.len() {
                for k in 0..models.len() {
                    let truth = oracle[i] == oracle[k];
                    assert_eq!(keys[i] == keys[k], truth, "q={q} {:?} {:?}", models[i], models[k]);
                    assert_eq!(weierstrass_iso(&models[i], &models[k]).unwrap(), truth, "q={q}");
                }
            }
        }
    }
}
