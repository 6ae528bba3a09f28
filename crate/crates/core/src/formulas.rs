#![allow(clippy::manual_div_ceil)] // floors kept in the shape of the closed forms

//! Closed-form predictions: class counts, class sizes, character sums and
//! the tables they are assembled from. All arithmetic is on integers.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::families::{hessian_short_coefficients, legendre_short_coefficients, Family};
use crate::gf::{prime_power, Fe, GaloisField};

/// Splits `q` into `(p, k)`, rejecting non prime powers and fields too large
/// for the crate.
fn split(q: u64) -> Result<(u32, u32)> {
    let (p, k) = prime_power(q).ok_or(Error::NotPrimePower(q))?;
    if q > crate::gf::MAX_FIELD_SIZE {
        return Err(Error::FieldOutOfRange { p, k });
    }
    Ok((p as u32, k))
}

fn odd(q: u64) -> Result<u32> {
    let (p, _) = split(q)?;
    if p == 2 {
        Err(Error::EvenCharacteristic)
    } else {
        Ok(p)
    }
}

fn legendre_like(family: Family) -> bool {
    matches!(family, Family::Legendre | Family::JacobiQuartic | Family::JacobiIntersection)
}

/// Number of distinct j-invariants in the family over `F_q`.
pub fn predicted_j(family: Family, q: u64) -> Result<u64> {
    let (p, _) = split(q)?;
    family.check_characteristic(p)?;
    Ok(if legendre_like(family) {
        (q + 5) / 6
    } else {
        match (family, q % 3) {
            (_, 0) => q - 1,
            (Family::Hessian, 1) => (q + 11) / 12,
            (_, 1) => (3 * q + 1) / 4,
            _ => q / 2,
        }
    })
}

/// Number of `F_q`-isomorphism classes in the family.
pub fn predicted_i(family: Family, q: u64) -> Result<u64> {
    let (p, _) = split(q)?;
    family.check_characteristic(p)?;
    Ok(if legendre_like(family) {
        match q % 12 {
            1 => (7 * q + 29) / 24,
            3 | 7 => (q + 2) / 3,
            5 | 9 => (7 * q + 13) / 24,
            11 => (q - 2) / 3,
            r => unreachable!("odd q has residue {r} mod 12"),
        }
    } else {
        match (family, q % 3) {
            (Family::Hessian, 1) => (q + 11) / 12,
            (_, 1) => 3 * (q + 3) / 4,
            _ => q - 1,
        }
    })
}

/// The finer case split used inside the counting arguments, indexed by `q`
/// modulo 24 (Legendre) or 12 (Hessian families).
pub mod proof_level {
    use super::*;

    pub fn legendre_j(q: u64) -> Result<u64> {
        let p = odd(q)?;
        Ok(if p == 3 {
            (q + 3) / 6
        } else if q % 3 == 1 {
            (q + 5) / 6
        } else {
            (q + 1) / 6
        })
    }

    pub fn legendre_i(q: u64) -> Result<u64> {
        odd(q)?;
        Ok(match q % 24 {
            1 => (7 * q + 17) / 24,
            3 => q / 3,
            5 => (7 * q + 13) / 24,
            7 | 19 => (q + 2) / 3,
            9 => (7 * q + 9) / 24,
            11 | 23 => (q - 2) / 3,
            13 => (7 * q + 29) / 24,
            17 => (7 * q + 1) / 24,
            r => return Err(Error::Internal(format!("no odd prime power is {r} mod 24"))),
        })
    }

    /// Size of the Hessian j-set at `v = 1`, which equals the Hessian J count.
    pub fn hessian_j(q: u64) -> Result<u64> {
        split(q)?;
        Ok(match (q % 3, q % 12) {
            (0, _) => q - 1,
            (_, 1) => (q + 11) / 12,
            (_, 4) => (q + 8) / 12,
            (_, 7) => (q + 5) / 12,
            _ if q.is_multiple_of(2) => q / 2,
            _ => (q - 1) / 2,
        })
    }

    pub fn generalized_hessian_j(q: u64) -> Result<u64> {
        split(q)?;
        Ok(match q % 12 {
            1 => (3 * q + 1) / 4,
            4 => 3 * q / 4,
            7 => (3 * q - 1) / 4,
            _ => hessian_j(q)?,
        })
    }

    pub fn generalized_hessian_i(q: u64) -> Result<u64> {
        split(q)?;
        Ok(match q % 12 {
            1 => (3 * q + 9) / 4,
            4 => (3 * q + 8) / 4,
            7 => (3 * q + 7) / 4,
            _ => q - 1,
        })
    }
}

/// Which closed lemma a class-size prediction comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Lemma {
    LegendreJ,
    LegendreI,
    HessianJ,
    HessianI,
}

impl Lemma {
    pub const ALL: [Lemma; 4] = [Lemma::LegendreJ, Lemma::LegendreI, Lemma::HessianJ, Lemma::HessianI];

    /// Number of cases in the lemma.
    pub fn branch_count(self) -> u8 {
        match self {
            Lemma::LegendreJ => 4,
            Lemma::LegendreI => 10,
            Lemma::HessianJ => 5,
            Lemma::HessianI => 5,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Lemma::LegendreJ => "legendre-j-class-size",
            Lemma::LegendreI => "legendre-i-class-size",
            Lemma::HessianJ => "hessian-j-class-size",
            Lemma::HessianI => "hessian-i-class-size",
        }
    }
}

impl fmt::Display for Lemma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Closure (`J`) or ground-field (`I`) class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum SizeKind {
    J,
    I,
}

/// A predicted class size together with the lemma case that produced it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SizePrediction {
    pub lemma: Lemma,
    /// 1-based index of the case in the lemma's list.
    pub branch: u8,
    pub size: u64,
}

fn exactly_one(lemma: Lemma, cases: &[(bool, u64)], what: impl fmt::Display) -> Result<SizePrediction> {
    let fired: Vec<usize> = cases.iter().enumerate().filter(|(_, c)| c.0).map(|(i, _)| i).collect();
    match fired.as_slice() {
        [i] => Ok(SizePrediction { lemma, branch: *i as u8 + 1, size: cases[*i].1 }),
        [] => Err(Error::Internal(format!("{lemma}: no case applies to {what}"))),
        many => Err(Error::Internal(format!(
            "{lemma}: cases {:?} all apply to {what}",
            many.iter().map(|i| i + 1).collect::<Vec<_>>()
        ))),
    }
}

/// Membership in the exceptional Legendre set `B` (parameters with
/// j ∈ {0, 1728}). In characteristic 3 this is `{−1}`.
pub fn legendre_exceptional(f: &GaloisField, u: Fe) -> Result<bool> {
    if f.p() == 3 {
        return Ok(u == f.int(-1));
    }
    let (a, b) = legendre_short_coefficients(f, u)?;
    Ok(f.mul(a, b).is_zero())
}

fn legendre_size(f: &GaloisField, kind: SizeKind, u: Fe) -> Result<SizePrediction> {
    if f.p() == 2 {
        return Err(Error::IncompatibleFamily { family: Family::Legendre, p: 2 });
    }
    if u.is_zero() || u == Fe::ONE {
        return Err(Error::InvalidParameters("Legendre parameters must avoid 0 and 1".into()));
    }
    let p = f.p();
    let q = f.q() as u64;
    let big_p = p > 3;
    let minus_one = f.int(-1);
    let half = f.inv(f.int(2))?;
    let in_b1 = u == minus_one || u == f.int(2) || u == half;
    let in_b2 = f.add(f.sub(f.sqr(u), u), Fe::ONE).is_zero();
    let in_b = legendre_exceptional(f, u)?;
    match kind {
        SizeKind::J => exactly_one(
            Lemma::LegendreJ,
            &[
                (u == minus_one && p == 3, 1),
                (in_b1 && big_p, 3),
                (in_b2 && big_p, 2),
                (!in_b, 6),
            ],
            format_args!("u={u}, q={q}"),
        ),
        SizeKind::I => {
            let chi = |a: Fe| f.chi2(a).expect("odd characteristic");
            let c_m1 = chi(minus_one);
            let (cu, c1u) = (chi(u), chi(f.sub(Fe::ONE, u)));
            let q8 = q % 8;
            exactly_one(
                Lemma::LegendreI,
                &[
                    (u == minus_one && p == 3, 1),
                    (in_b1 && matches!(q8, 1 | 3 | 7) && big_p, 3),
                    ((u == minus_one || u == f.int(2)) && q8 == 5, 2),
                    (u == half && q8 == 5, 1),
                    (in_b2 && q % 12 == 1 && big_p, 2),
                    // characteristic 3 is already the first case
                    (in_b2 && q % 12 != 1 && big_p, 1),
                    (c_m1 == -1 && !in_b, 3),
                    (c_m1 == 1 && cu == -1 && c1u == -1 && !in_b, 2),
                    (c_m1 == 1 && cu * c1u == -1 && !in_b, 4),
                    (c_m1 == 1 && cu == 1 && c1u == 1 && !in_b, 6),
                ],
                format_args!("u={u}, q={q}"),
            )
        }
    }
}

fn hessian_size(f: &GaloisField, kind: SizeKind, u: Fe) -> Result<SizePrediction> {
    if f.pow(u, 3) == f.int(27) {
        return Err(Error::InvalidParameters("Hessian parameters need u^3 != 27".into()));
    }
    let p = f.p();
    let q = f.q() as u64;
    let r = q % 3;
    let (a_zero, b_zero) = if p == 3 {
        // the short model does not exist; no case below consults it when q ≡ 0 (mod 3)
        (false, false)
    } else {
        let (a, b) = hessian_short_coefficients(f, u)?;
        (a.is_zero(), b.is_zero())
    };
    let what = format_args!("u={u}, q={q}");
    match kind {
        SizeKind::J => exactly_one(
            Lemma::HessianJ,
            &[
                ((p == 2 && u.is_zero()) || p == 3, 1),
                (r == 1 && p != 2 && a_zero, 4),
                (r == 1 && p != 2 && b_zero, 6),
                (r == 1 && !a_zero && !b_zero, 12),
                (r == 2 && (p != 2 || !u.is_zero()), 2),
            ],
            what,
        ),
        SizeKind::I => exactly_one(
            Lemma::HessianI,
            &[
                (r == 0 || r == 2, 1),
                (r == 1 && p != 2 && a_zero, 4),
                (r == 1 && p != 2 && b_zero, 6),
                (r == 1 && !a_zero && !b_zero, 12),
                // the j = 0 curve in characteristic 2 is alone in its class
                (r == 1 && p == 2 && u.is_zero(), 1),
            ],
            what,
        ),
    }
}

/// Size of the class of parameter `u` as given by the class-size lemmas.
/// Only the Legendre and Hessian families have such lemmas.
pub fn predicted_class_size(f: &GaloisField, family: Family, kind: SizeKind, u: Fe) -> Result<SizePrediction> {
    match family {
        Family::Legendre => legendre_size(f, kind, u),
        Family::Hessian => hessian_size(f, kind, u),
        other => Err(Error::InvalidParameters(format!("no class-size lemma for {other}"))),
    }
}

/// `#{u : χ₂(u) = i, χ₂(1 − u) = j}`.
pub fn predicted_s_ij(q: u64, i: i8, j: i8) -> Result<u64> {
    odd(q)?;
    if !matches!(i, -1 | 1) || !matches!(j, -1 | 1) {
        return Err(Error::InvalidParameters("character values must be +1 or -1".into()));
    }
    Ok(if q % 4 == 1 {
        if (i, j) == (1, 1) {
            (q - 5) / 4
        } else {
            (q - 1) / 4
        }
    } else if (i, j) == (-1, -1) {
        (q + 1) / 4
    } else {
        (q - 3) / 4
    })
}

/// Number of Legendre parameters whose ground-field class has size `k`,
/// `k = 1..=6`, by the row for `q mod 24`.
pub fn predicted_mk_table(q: u64) -> Result<BTreeMap<u32, u64>> {
    odd(q)?;
    let row: [u64; 6] = match q % 24 {
        1 => [0, (q + 7) / 4, 3, (q - 1) / 2, 0, (q - 25) / 4],
        3 => [1, 0, q - 3, 0, 0, 0],
        5 => [1, (q + 3) / 4, 0, (q - 5) / 2, 0, (q - 5) / 4],
        7 | 19 => [2, 0, q - 4, 0, 0, 0],
        9 => [1, (q - 1) / 4, 0, (q - 1) / 2, 0, (q - 9) / 4],
        11 | 23 => [0, 0, q - 2, 0, 0, 0],
        13 => [1, (q + 11) / 4, 0, (q - 5) / 2, 0, (q - 13) / 4],
        17 => [0, (q - 1) / 4, 3, (q - 1) / 2, 0, (q - 17) / 4],
        r => return Err(Error::Internal(format!("no odd prime power is {r} mod 24"))),
    };
    let total: u64 = row.iter().sum();
    if total != q - 2 {
        return Err(Error::Internal(format!("M_k row for q={q} sums to {total}, not q-2")));
    }
    let weighted = (1..=6u64).zip(row).map(|(k, m)| m * (60 / k)).sum::<u64>();
    if weighted % 60 != 0 || weighted / 60 != proof_level::legendre_i(q)? {
        return Err(Error::Internal(format!("M_k row for q={q} disagrees with the class count")));
    }
    Ok((1..=6).zip(row).collect())
}

/// Number of isomorphism classes of all short Weierstrass curves over `F_q`.
pub fn predicted_baseline(q: u64) -> Result<u64> {
    let (p, _) = split(q)?;
    if p <= 3 {
        return Err(Error::UnsupportedCharacteristic(p));
    }
    Ok(match q % 12 {
        1 => 2 * q + 6,
        5 => 2 * q + 2,
        7 => 2 * q + 4,
        11 => 2 * q,
        r => unreachable!("q > 3 prime power has residue {r} mod 12"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::prime_powers_up_to;

    #[test]
    fn count_examples() {
        assert_eq!(predicted_j(Family::Legendre, 7).unwrap(), 2);
        assert_eq!(predicted_j(Family::Hessian, 13).unwrap(), 2);
        assert_eq!(predicted_j(Family::GeneralizedHessian, 7).unwrap(), 5);
        assert_eq!(predicted_i(Family::Legendre, 13).unwrap(), 5);
        assert_eq!(predicted_i(Family::Legendre, 11).unwrap(), 3);
        assert_eq!(predicted_i(Family::Legendre, 7).unwrap(), 3);
        assert_eq!(predicted_i(Family::GeneralizedHessian, 13).unwrap(), 12);
        assert_eq!(predicted_j(Family::GeneralizedHessian, 4).unwrap(), 3);
        assert_eq!(predicted_i(Family::GeneralizedHessian, 4).unwrap(), 5);
        assert!(matches!(predicted_j(Family::Legendre, 8), Err(Error::IncompatibleFamily { .. })));
        assert_eq!(predicted_j(Family::Hessian, 6), Err(Error::NotPrimePower(6)));
    }

    #[test]
    fn auxiliary_examples() {
        assert_eq!(predicted_s_ij(7, -1, -1).unwrap(), 2);
        assert_eq!(predicted_s_ij(7, 1, 1).unwrap(), 1);
        assert_eq!(predicted_s_ij(13, 1, 1).unwrap(), 2);
        assert_eq!(predicted_s_ij(13, 1, -1).unwrap(), 3);
        assert_eq!(predicted_s_ij(8, 1, 1), Err(Error::EvenCharacteristic));
        assert_eq!(predicted_baseline(13).unwrap(), 32);
        assert_eq!(predicted_baseline(5).unwrap(), 12);
        assert_eq!(predicted_baseline(7).unwrap(), 18);
        assert_eq!(predicted_baseline(11).unwrap(), 22);
        assert_eq!(predicted_baseline(9), Err(Error::UnsupportedCharacteristic(3)));
        let m13 = predicted_mk_table(13).unwrap();
        assert_eq!(m13.values().copied().collect::<Vec<_>>(), vec![1, 6, 0, 4, 0, 0]);
        let m7 = predicted_mk_table(7).unwrap();
        assert_eq!((m7[&1], m7[&3]), (2, 3));
        assert_eq!(predicted_mk_table(11).unwrap()[&3], 9);
    }

    #[test]
    fn class_size_examples() {
        let gf7 = GaloisField::with_order(7).unwrap();
        let p = predicted_class_size(&gf7, Family::Legendre, SizeKind::J, Fe(3)).unwrap();
        assert_eq!((p.size, p.branch), (2, 3));
        let gf13 = GaloisField::with_order(13).unwrap();
        let p = predicted_class_size(&gf13, Family::Legendre, SizeKind::I, Fe(2)).unwrap();
        assert_eq!((p.size, p.branch), (2, 3));
        let p = predicted_class_size(&gf7, Family::Hessian, SizeKind::J, Fe(0)).unwrap();
        assert_eq!((p.size, p.branch), (4, 2));
        assert!(predicted_class_size(&gf7, Family::JacobiQuartic, SizeKind::J, Fe(0)).is_err());
    }

    #[test]
    fn statements_agree_with_proof_tables() {
        for q in prime_powers_up_to(1 << 14) {
            let (p, _) = prime_power(q).unwrap();
            if p > 2 {
                assert_eq!(predicted_j(Family::Legendre, q).unwrap(), proof_level::legendre_j(q).unwrap(), "q={q}");
                assert_eq!(predicted_i(Family::Legendre, q).unwrap(), proof_level::legendre_i(q).unwrap(), "q={q}");
                let row = predicted_mk_table(q).unwrap();
                assert_eq!(row.values().sum::<u64>(), q - 2);
                assert_eq!(predicted_s_ij(q, 1, 1).unwrap() + predicted_s_ij(q, 1, -1).unwrap()
                    + predicted_s_ij(q, -1, 1).unwrap() + predicted_s_ij(q, -1, -1).unwrap(), q - 2);
            }
            assert_eq!(predicted_j(Family::Hessian, q).unwrap(), proof_level::hessian_j(q).unwrap(), "q={q}");
            let gh = Family::GeneralizedHessian;
            assert_eq!(predicted_j(gh, q).unwrap(), proof_level::generalized_hessian_j(q).unwrap(), "q={q}");
            assert_eq!(predicted_i(gh, q).unwrap(), proof_level::generalized_hessian_i(q).unwrap(), "q={q}");
            if q % 3 == 1 {
                assert_eq!(predicted_i(gh, q).unwrap(), 2 + predicted_j(gh, q).unwrap());
            }
        }
    }
}
