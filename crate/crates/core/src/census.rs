//! Exhaustive enumeration of a family over a finite field.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::families::{
    family_rational_f, j_invariant, to_long_weierstrass, valid_parameters, CurveDescriptor, CurveParams, Family,
    LongWeierstrass,
};
use crate::formulas::{predicted_class_size, Lemma, SizeKind};
use crate::gf::{Fe, GaloisField};
use crate::iso::{canonical_class_key, ClassKey};

/// Largest field accepted by [`projective_point_count`].
pub const POINT_COUNT_MAX_Q: u32 = 512;

/// Per-family ceilings on `q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Guards {
    /// Legendre and both Jacobi families.
    pub legendre: u32,
    pub hessian: u32,
    /// Generalized Hessian j-census.
    pub generalized_hessian_j: u32,
    /// Generalized Hessian isomorphism census.
    pub generalized_hessian_i: u32,
    /// Short Weierstrass baseline census (cost q³).
    pub baseline: u32,
    /// Pairwise identity checks (cost q²).
    pub identities: u32,
}

impl Default for Guards {
    fn default() -> Self {
        Guards {
            legendre: 1009,
            hessian: 512,
            generalized_hessian_j: 256,
            generalized_hessian_i: 128,
            baseline: 199,
            identities: 97,
        }
    }
}

impl Guards {
    pub fn unlimited() -> Self {
        let m = crate::gf::MAX_FIELD_SIZE as u32;
        Guards {
            legendre: m,
            hessian: m,
            generalized_hessian_j: m,
            generalized_hessian_i: m,
            baseline: m,
            identities: m,
        }
    }

    pub fn j_limit(&self, family: Family) -> u32 {
        match family {
            Family::Legendre | Family::JacobiQuartic | Family::JacobiIntersection => self.legendre,
            Family::Hessian => self.hessian,
            Family::GeneralizedHessian => self.generalized_hessian_j,
        }
    }

    pub fn i_limit(&self, family: Family) -> u32 {
        match family {
            Family::GeneralizedHessian => self.generalized_hessian_i,
            other => self.j_limit(other),
        }
    }
}

/// What the census learned about one parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParamRecord {
    pub encoding: u64,
    pub j: Fe,
    pub key: Option<ClassKey>,
}

/// Exact value of `Σ_k hist[k] / k`.
fn weighted_class_total(hist: &BTreeMap<u64, u64>) -> Ratio<u64> {
    hist.iter().map(|(&k, &n)| Ratio::new(n, k)).sum()
}

fn histogram<K: Ord>(classes: &BTreeMap<K, Vec<u64>>) -> BTreeMap<u64, u64> {
    let mut h = BTreeMap::new();
    for members in classes.values() {
        *h.entry(members.len() as u64).or_insert(0) += members.len() as u64;
    }
    h
}

/// The partition of a family's valid parameters into j-classes and
/// isomorphism classes.
#[derive(Clone, Debug)]
pub struct ClassPartition {
    pub family: Family,
    pub q: u32,
    pub records: Vec<ParamRecord>,
    pub j_classes: BTreeMap<Fe, Vec<u64>>,
    /// Absent when the isomorphism census is beyond its guard.
    pub iso_classes: Option<BTreeMap<ClassKey, Vec<u64>>>,
    pub n_hist: BTreeMap<u64, u64>,
    pub m_hist: Option<BTreeMap<u64, u64>>,
    /// Generalized Hessian only: the j-values reached from each cube-class
    /// representative `v`.
    pub representative_j_sets: Option<Vec<(Fe, BTreeSet<Fe>)>>,
}

impl ClassPartition {
    pub fn valid_count(&self) -> u64 {
        self.records.len() as u64
    }

    pub fn j_count(&self) -> u64 {
        self.j_classes.len() as u64
    }

    pub fn i_count(&self) -> Option<u64> {
        self.iso_classes.as_ref().map(|c| c.len() as u64)
    }

    /// Number of distinct j-values found using only the cube-class
    /// representatives of `v`.
    pub fn representative_j_count(&self) -> Option<u64> {
        self.representative_j_sets.as_ref().map(|sets| {
            sets.iter().flat_map(|(_, s)| s.iter()).collect::<BTreeSet<_>>().len() as u64
        })
    }

    /// `Σ N_k / k`, exactly.
    pub fn n_weighted_total(&self) -> Ratio<u64> {
        weighted_class_total(&self.n_hist)
    }

    pub fn m_weighted_total(&self) -> Option<Ratio<u64>> {
        self.m_hist.as_ref().map(weighted_class_total)
    }

    fn record_index(&self, encoding: u64) -> Option<usize> {
        self.records.binary_search_by_key(&encoding, |r| r.encoding).ok()
    }

    pub fn j_class_of(&self, encoding: u64) -> Option<&[u64]> {
        let r = &self.records[self.record_index(encoding)?];
        self.j_classes.get(&r.j).map(Vec::as_slice)
    }

    pub fn iso_class_of(&self, encoding: u64) -> Option<&[u64]> {
        let r = &self.records[self.record_index(encoding)?];
        self.iso_classes.as_ref()?.get(r.key.as_ref()?).map(Vec::as_slice)
    }

    /// Whether every isomorphism class lies inside one j-class.
    pub fn iso_refines_j(&self) -> bool {
        let Some(iso) = &self.iso_classes else { return true };
        iso.values().all(|members| {
            let j = self.records[self.record_index(members[0]).unwrap()].j;
            members
                .iter()
                .all(|&e| self.records[self.record_index(e).unwrap()].j == j)
        })
    }
}

fn guard(what: &'static str, q: u32, limit: u32) -> Result<()> {
    if q > limit {
        Err(Error::GuardExceeded { what, q, limit })
    } else {
        Ok(())
    }
}

/// Enumerates every valid member of `family` over `field` and partitions the
/// parameters by j-invariant and by isomorphism class.
///
/// Generalized Hessian fields between the two guards get a j-only census.
pub fn census(field: &GaloisField, family: Family, guards: &Guards) -> Result<ClassPartition> {
    family.check_characteristic(field.p())?;
    let q = field.q();
    guard("j-invariant census", q, guards.j_limit(family))?;
    let with_iso = q <= guards.i_limit(family);

    let mut records = Vec::new();
    for c in valid_parameters(field, family)? {
        let j = j_invariant(&c)?;
        let key = if with_iso { Some(canonical_class_key(&to_long_weierstrass(&c)?)) } else { None };
        records.push(ParamRecord { encoding: c.parameter_encoding().expect("family curve"), j, key });
    }

    let mut j_classes: BTreeMap<Fe, Vec<u64>> = BTreeMap::new();
    for r in &records {
        j_classes.entry(r.j).or_default().push(r.encoding);
    }
    let iso_classes = with_iso.then(|| {
        let mut m: BTreeMap<ClassKey, Vec<u64>> = BTreeMap::new();
        for r in &records {
            m.entry(r.key.expect("keyed")).or_default().push(r.encoding);
        }
        m
    });

    let representative_j_sets = (family == Family::GeneralizedHessian).then(|| {
        let reps = field.cube_classes().representatives();
        reps.into_iter()
            .map(|v| {
                let set = field
                    .elements()
                    .filter_map(|u| CurveDescriptor::generalized_hessian(field, u, v).ok())
                    .map(|c| j_invariant(&c))
                    .collect::<Result<BTreeSet<_>>>();
                set.map(|s| (v, s))
            })
            .collect::<Result<Vec<_>>>()
    });
    let representative_j_sets = representative_j_sets.transpose()?;

    let n_hist = histogram(&j_classes);
    let m_hist = iso_classes.as_ref().map(histogram);
    Ok(ClassPartition { family, q, records, j_classes, iso_classes, n_hist, m_hist, representative_j_sets })
}

/// One parameter whose enumerated class size differs from the lemma.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SizeMismatch {
    pub lemma: Lemma,
    pub branch: u8,
    pub encoding: u64,
    pub predicted: u64,
    pub enumerated: u64,
}

/// Outcome of comparing every parameter's class sizes with the lemmas.
#[derive(Clone, Debug, Default)]
pub struct ClassSizeReport {
    pub checked: u64,
    pub mismatches: Vec<SizeMismatch>,
    /// How often each `(lemma, case)` fired.
    pub branch_hits: BTreeMap<(Lemma, u8), u64>,
}

impl ClassSizeReport {
    pub fn merge(&mut self, other: &ClassSizeReport) {
        self.checked += other.checked;
        self.mismatches.extend(other.mismatches.iter().cloned());
        for (k, v) in &other.branch_hits {
            *self.branch_hits.entry(*k).or_insert(0) += v;
        }
    }
}

/// Checks `|𝒥_u|` and `|ℐ_u|` of every parameter against the class-size
/// lemmas. Families without lemmas produce an empty report.
pub fn check_class_sizes(field: &GaloisField, partition: &ClassPartition) -> Result<ClassSizeReport> {
    let mut report = ClassSizeReport::default();
    if !matches!(partition.family, Family::Legendre | Family::Hessian) {
        return Ok(report);
    }
    for r in &partition.records {
        let u = field.elem(r.encoding)?;
        let mut kinds = vec![(SizeKind::J, partition.j_class_of(r.encoding).map(|c| c.len()))];
        if partition.iso_classes.is_some() {
            kinds.push((SizeKind::I, partition.iso_class_of(r.encoding).map(|c| c.len())));
        }
        for (kind, actual) in kinds {
            let actual = actual.expect("parameter is classified") as u64;
            let pred = predicted_class_size(field, partition.family, kind, u)?;
            report.checked += 1;
            *report.branch_hits.entry((pred.lemma, pred.branch)).or_insert(0) += 1;
            if pred.size != actual {
                report.mismatches.push(SizeMismatch {
                    lemma: pred.lemma,
                    branch: pred.branch,
                    encoding: r.encoding,
                    predicted: pred.size,
                    enumerated: actual,
                });
            }
        }
    }
    Ok(report)
}

/// `#{u ∈ F_q ∖ {0, 1} : χ₂(u) = i, χ₂(1 − u) = j}` for all four sign pairs.
pub fn s_ij_census(field: &GaloisField) -> Result<BTreeMap<(i8, i8), u64>> {
    if field.p() == 2 {
        return Err(Error::EvenCharacteristic);
    }
    let mut counts: BTreeMap<(i8, i8), u64> = [(1, 1), (1, -1), (-1, 1), (-1, -1)].map(|k| (k, 0)).into();
    for u in field.elements() {
        if u.is_zero() || u == Fe::ONE {
            continue;
        }
        let key = (field.chi2(u)?, field.chi2(field.sub(Fe::ONE, u))?);
        *counts.get_mut(&key).expect("nonzero characters") += 1;
    }
    Ok(counts)
}

/// Number of isomorphism classes among all nonsingular `y² = x³ + Ax + B`.
pub fn baseline_short_weierstrass_census(field: &GaloisField) -> Result<u64> {
    if field.p() <= 3 {
        return Err(Error::UnsupportedCharacteristic(field.p()));
    }
    let mut keys = HashSet::new();
    for a in field.elements() {
        for b in field.elements() {
            if let Ok(w) = LongWeierstrass::short(field, a, b) {
                keys.insert(canonical_class_key(&w));
            }
        }
    }
    Ok(keys.len() as u64)
}

fn weierstrass_point_count(w: &LongWeierstrass<'_>) -> u64 {
    let f = w.field();
    let [a1, a2, a3, a4, a6] = w.coefficients();
    let mut count = 1; // the point at infinity
    for x in f.elements() {
        let rhs = f.add(f.add(f.add(f.pow(x, 3), f.mul(a2, f.sqr(x))), f.mul(a4, x)), a6);
        let lin = f.add(f.mul(a1, x), a3);
        count += f
            .elements()
            .filter(|&y| f.add(f.sqr(y), f.mul(lin, y)) == rhs)
            .count() as u64;
    }
    count
}

fn cubic_point_count(f: &GaloisField, u: Fe, v: Fe) -> u64 {
    // x³ + y³ + v z³ = u x y z
    let on = |x: Fe, y: Fe, z: Fe| {
        let lhs = f.add(f.add(f.pow(x, 3), f.pow(y, 3)), f.mul(v, f.pow(z, 3)));
        lhs == f.mul(u, f.mul(f.mul(x, y), z))
    };
    let mut count = 0;
    for x in f.elements() {
        for y in f.elements() {
            if on(x, y, Fe::ONE) {
                count += 1;
            }
        }
    }
    count += f.elements().filter(|&x| on(x, Fe::ONE, Fe::ZERO)).count() as u64;
    if on(Fe::ONE, Fe::ZERO, Fe::ZERO) {
        count += 1;
    }
    count
}

/// Number of projective `F_q`-points: on the plane cubic for (generalized)
/// Hessian curves, on the Weierstrass closure otherwise.
pub fn projective_point_count(c: &CurveDescriptor<'_>) -> Result<u64> {
    let f = c.field();
    guard("point count", f.q(), POINT_COUNT_MAX_Q)?;
    match c.params() {
        CurveParams::Hessian(u) => Ok(cubic_point_count(f, u, Fe::ONE)),
        CurveParams::GeneralizedHessian { u, v } => Ok(cubic_point_count(f, u, v)),
        CurveParams::Legendre(_) | CurveParams::ShortWeierstrass { .. } | CurveParams::LongWeierstrass(_) => {
            Ok(weierstrass_point_count(&to_long_weierstrass(c)?))
        }
        CurveParams::JacobiQuartic(_) | CurveParams::JacobiIntersection(_) => Err(Error::InvalidParameters(
            "point counts are taken on plane cubics or Weierstrass models".into(),
        )),
    }
}

/// The quadratic twist `(c²A, c³B)` by the smallest non-residue `c`.
pub fn quadratic_twist(field: &GaloisField, a: Fe, b: Fe) -> Result<(Fe, Fe)> {
    if field.p() == 2 {
        return Err(Error::EvenCharacteristic);
    }
    let c = field
        .nonzero()
        .find(|&x| field.chi2(x) == Ok(-1))
        .expect("odd fields have non-residues");
    Ok((field.mul(field.sqr(c), a), field.mul(field.pow(c, 3), b)))
}

/// Whether `u ↦ u(u³ + 216v)/(u³ − 27v)` is injective on its domain.
pub fn rational_map_injective(field: &GaloisField, v: Fe) -> Result<bool> {
    let mut seen = HashSet::new();
    for u in field.elements() {
        match family_rational_f(field, Family::GeneralizedHessian, Some(v), u) {
            Ok(x) => {
                if !seen.insert(x) {
                    return Ok(false);
                }
            }
            Err(Error::Pole) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(true)
}
