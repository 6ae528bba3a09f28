use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use curvecensus::gf::prime_power;
use curvecensus::{census, ClassPartition, Error, Family, GaloisField};

use crate::config::RunConfig;

/// A family parameter: `u`, plus `v` for the generalized Hessian family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Param {
    pub u: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v: Option<u64>,
}

impl Param {
    fn decode(family: Family, q: u64, encoding: u64) -> Self {
        if family == Family::GeneralizedHessian {
            Param { u: encoding % q, v: Some(encoding / q) }
        } else {
            Param { u: encoding, v: None }
        }
    }
}

impl std::fmt::Display for Param {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.v {
            Some(v) => write!(f, "u={},v={}", self.u, v),
            None => write!(f, "u={}", self.u),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ParamRow {
    pub parameter: Param,
    pub j: u32,
    pub j_class_size: u64,
    /// `[j, a1, a2, a3, a4, a6]` of the canonical representative.
    pub class_key: Option<[u32; 6]>,
    pub class_size: Option<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CensusDoc {
    pub family: Family,
    pub q: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
    pub curves: u64,
    #[serde(rename = "J")]
    pub j: u64,
    #[serde(rename = "I")]
    pub i: Option<u64>,
    #[serde(rename = "N_hist")]
    pub n_hist: BTreeMap<u64, u64>,
    #[serde(rename = "M_hist")]
    pub m_hist: Option<BTreeMap<u64, u64>>,
    pub parameters: Vec<ParamRow>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassEntry {
    pub representative: Param,
    pub j: u32,
    pub key: Option<[u32; 6]>,
    pub size: u64,
    pub members: Vec<Param>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassesDoc {
    pub family: Family,
    pub q: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
    /// `isomorphism` or `j-invariant` when the isomorphism census is beyond its guard.
    pub kind: &'static str,
    pub classes: Vec<ClassEntry>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FieldDoc {
    pub q: u64,
    pub p: u32,
    pub k: u32,
    /// Modulus coefficients, constant term first.
    pub modulus: Vec<u32>,
    pub generator: u32,
}

fn partition_for(cfg: &RunConfig, family: Family, q: u64) -> Result<Result<(GaloisField, ClassPartition), String>, Error> {
    let p = prime_power(q).map_or(0, |(p, _)| p as u32);
    if !family.supports_characteristic(p) {
        return Ok(Err(format!("{family} is not defined in characteristic {p}")));
    }
    let f = GaloisField::with_order(q)?;
    let part = census(&f, family, &cfg.guards)?;
    Ok(Ok((f, part)))
}

fn census_doc(cfg: &RunConfig, family: Family, q: u64) -> Result<CensusDoc, Error> {
    let mut doc = CensusDoc {
        family,
        q,
        skipped: None,
        curves: 0,
        j: 0,
        i: None,
        n_hist: BTreeMap::new(),
        m_hist: None,
        parameters: Vec::new(),
    };
    let part = match partition_for(cfg, family, q)? {
        Ok((_, part)) => part,
        Err(why) => {
            doc.skipped = Some(why);
            return Ok(doc);
        }
    };
    doc.curves = part.valid_count();
    doc.j = part.j_count();
    doc.i = part.i_count();
    doc.n_hist = part.n_hist.clone();
    doc.m_hist = part.m_hist.clone();
    doc.parameters = part
        .records
        .iter()
        .map(|r| ParamRow {
            parameter: Param::decode(family, q, r.encoding),
            j: r.j.encoding(),
            j_class_size: part.j_class_of(r.encoding).map_or(0, |c| c.len() as u64),
            class_key: r.key.map(|k| k.encodings()),
            class_size: part.iso_class_of(r.encoding).map(|c| c.len() as u64),
        })
        .collect();
    Ok(doc)
}

fn classes_doc(cfg: &RunConfig, family: Family, q: u64) -> Result<ClassesDoc, Error> {
    let (_, part) = match partition_for(cfg, family, q)? {
        Ok(x) => x,
        Err(why) => return Ok(ClassesDoc { family, q, skipped: Some(why), kind: "isomorphism", classes: Vec::new() }),
    };
    let j_of: BTreeMap<u64, u32> = part.records.iter().map(|r| (r.encoding, r.j.encoding())).collect();
    let entry = |key: Option<[u32; 6]>, encodings: &[u64]| {
        let members: Vec<Param> = encodings.iter().map(|&e| Param::decode(family, q, e)).collect();
        ClassEntry {
            representative: *members.iter().min().expect("classes are nonempty"),
            j: j_of[&encodings[0]],
            key,
            size: members.len() as u64,
            members,
        }
    };
    let (kind, mut classes): (&'static str, Vec<ClassEntry>) = match &part.iso_classes {
        Some(iso) => ("isomorphism", iso.iter().map(|(k, m)| entry(Some(k.encodings()), m)).collect()),
        None => ("j-invariant", part.j_classes.values().map(|m| entry(None, m)).collect()),
    };
    classes.sort_by_key(|c| c.representative);
    Ok(ClassesDoc { family, q, skipped: None, kind, classes })
}

pub fn run_census(cfg: &RunConfig) -> Result<Vec<CensusDoc>, Error> {
    cfg.jobs.par_iter().map(|&(f, q)| census_doc(cfg, f, q)).collect()
}

pub fn run_classes(cfg: &RunConfig) -> Result<Vec<ClassesDoc>, Error> {
    cfg.jobs.par_iter().map(|&(f, q)| classes_doc(cfg, f, q)).collect()
}

pub fn field_docs(qs: &[u64]) -> Result<Vec<FieldDoc>, Error> {
    qs.iter()
        .map(|&q| {
            let f = GaloisField::with_order(q)?;
            Ok(FieldDoc { q, p: f.p(), k: f.k(), modulus: f.modulus().to_vec(), generator: f.generator().encoding() })
        })
        .collect()
}
