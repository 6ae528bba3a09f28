use std::collections::{BTreeMap, BTreeSet};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use curvecensus::census::{baseline_short_weierstrass_census, check_class_sizes, s_ij_census, ClassSizeReport};
use curvecensus::families::{difference_factorization_check, hessian_discriminant_identity};
use curvecensus::formulas::{predicted_baseline, predicted_i, predicted_j, predicted_mk_table, predicted_s_ij, Lemma};
use curvecensus::gf::prime_power;
use curvecensus::{census, ClassPartition, Error, Family, Fe, GaloisField};

use crate::config::RunConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, ok: bool, detail: String) -> Self {
        Check { name: name.into(), status: if ok { Status::Pass } else { Status::Fail }, detail }
    }

    fn skipped(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Check { name: name.into(), status: Status::Skipped, detail: detail.into() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Comparison {
    pub predicted: u64,
    pub enumerated: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Record {
    pub family: Family,
    pub q: u64,
    #[serde(rename = "J")]
    pub j: Option<Comparison>,
    #[serde(rename = "I")]
    pub i: Option<Comparison>,
    #[serde(rename = "N_hist")]
    pub n_hist: Option<BTreeMap<u64, u64>>,
    #[serde(rename = "M_hist")]
    pub m_hist: Option<BTreeMap<u64, u64>>,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl Record {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }
}

fn theorem_name(family: Family, kind: &str) -> String {
    format!("{}-{kind}-theorem", family.name())
}

fn count_check(name: String, pred: u64, got: u64) -> Check {
    Check::new(name, pred == got, format!("predicted {pred}, enumerated {got}"))
}

fn lemma_check(lemma: Lemma, report: &ClassSizeReport) -> Check {
    let hits: Vec<String> = report
        .branch_hits
        .iter()
        .filter(|((l, _), _)| *l == lemma)
        .map(|((_, b), n)| format!("case {b}: {n}"))
        .collect();
    let bad: Vec<String> = report
        .mismatches
        .iter()
        .filter(|m| m.lemma == lemma)
        .map(|m| format!("parameter {} case {}: predicted {}, enumerated {}", m.encoding, m.branch, m.predicted, m.enumerated))
        .collect();
    let total: u64 = report.branch_hits.iter().filter(|((l, _), _)| *l == lemma).map(|(_, n)| n).sum();
    if bad.is_empty() {
        Check::new(lemma.name(), true, format!("{total} parameters; {}", hits.join(", ")))
    } else {
        let shown = bad.iter().take(5).cloned().collect::<Vec<_>>().join("; ");
        Check::new(lemma.name(), false, format!("{} of {total} mismatched: {shown}", bad.len()))
    }
}

fn hist_check(q: u64, part: &ClassPartition) -> Result<Check, Error> {
    let name = "legendre-mk-table";
    let Some(hist) = &part.m_hist else {
        return Ok(Check::skipped(name, "isomorphism census not run"));
    };
    let table = predicted_mk_table(q)?;
    let diffs: Vec<String> = table
        .iter()
        .map(|(&k, &m)| (k, m, hist.get(&(k as u64)).copied().unwrap_or(0)))
        .filter(|(_, m, got)| m != got)
        .map(|(k, m, got)| format!("M_{k}: table {m}, enumerated {got}"))
        .collect();
    let extra = hist.keys().any(|k| !table.contains_key(&(*k as u32)));
    Ok(if diffs.is_empty() && !extra {
        Check::new(name, true, format!("row q = {} mod 24 matches", q % 24))
    } else {
        Check::new(name, false, format!("row q = {} mod 24: {}", q % 24, diffs.join("; ")))
    })
}

fn pairwise_identity(f: &GaloisField, family: Family) -> Result<Check, Error> {
    let mut checked = 0u64;
    let mut bad = Vec::new();
    for u in f.elements() {
        for v in f.elements() {
            match difference_factorization_check(f, family, u, v) {
                Ok(true) => checked += 1,
                Ok(false) => bad.push(format!("({}, {})", u.encoding(), v.encoding())),
                Err(Error::Pole) => {}
                Err(e) => return Err(e),
            }
        }
    }
    let name = format!("{}-difference-factorization", family.name());
    Ok(if bad.is_empty() {
        Check::new(name, true, format!("{checked} pairs"))
    } else {
        Check::new(name, false, format!("fails at {} of {checked} pairs, first {}", bad.len(), bad[0]))
    })
}

fn discriminant_identity(f: &GaloisField) -> Result<Check, Error> {
    let mut checked = 0u64;
    for u in f.elements() {
        match hessian_discriminant_identity(f, u) {
            Ok((l, r)) if l == r => checked += 1,
            Ok((l, r)) => {
                return Ok(Check::new(
                    "hessian-discriminant-identity",
                    false,
                    format!("u = {}: discriminant {}, -3^21 B_u^4 = {}", u.encoding(), l.encoding(), r.encoding()),
                ))
            }
            Err(Error::Pole) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(Check::new("hessian-discriminant-identity", true, format!("{checked} values of u")))
}

fn generalized_hessian_checks(q: u64, part: &ClassPartition, out: &mut Vec<Check>) {
    let Some(sets) = &part.representative_j_sets else { return };
    let rep = part.representative_j_count().unwrap_or(0);
    out.push(Check::new(
        "generalized-hessian-cube-class-reduction",
        rep == part.j_count(),
        format!("{} cube-class representatives reach {rep} j-values, all v reach {}", sets.len(), part.j_count()),
    ));
    if q % 3 == 1 {
        let mut meets = Vec::new();
        for a in 0..sets.len() {
            for b in a + 1..sets.len() {
                let inter: BTreeSet<Fe> = sets[a].1.intersection(&sets[b].1).copied().collect();
                if inter.len() != 1 || !inter.contains(&Fe::ZERO) {
                    meets.push(format!("v = {}, {}", sets[a].0.encoding(), sets[b].0.encoding()));
                }
            }
        }
        out.push(Check::new(
            "generalized-hessian-j-set-intersection",
            meets.is_empty(),
            if meets.is_empty() {
                "representative j-sets pairwise meet in {0}".into()
            } else {
                format!("unexpected intersections: {}", meets.join("; "))
            },
        ));
    }
}

fn run_checks(cfg: &RunConfig, family: Family, q: u64, rec: &mut Record) -> Result<(), Error> {
    let f = GaloisField::with_order(q)?;
    let p = f.p();
    let part = census(&f, family, &cfg.guards)?;
    let bump = cfg.inject_fault as u64;

    let pj = predicted_j(family, q)? + bump;
    rec.j = Some(Comparison { predicted: pj, enumerated: part.j_count() });
    rec.checks.push(count_check(theorem_name(family, "j"), pj, part.j_count()));
    rec.n_hist = Some(part.n_hist.clone());
    rec.m_hist = part.m_hist.clone();
    match part.i_count() {
        Some(got) => {
            let pi = predicted_i(family, q)?;
            rec.i = Some(Comparison { predicted: pi, enumerated: got });
            rec.checks.push(count_check(theorem_name(family, "i"), pi, got));
            if family == Family::GeneralizedHessian && q % 3 == 1 {
                rec.checks.push(Check::new(
                    "generalized-hessian-i-j-relation",
                    got == part.j_count() + 2,
                    format!("I = {got}, J + 2 = {}", part.j_count() + 2),
                ));
            }
        }
        None => rec.checks.push(Check::skipped(
            theorem_name(family, "i"),
            format!("isomorphism census guard is q <= {}", cfg.guards.i_limit(family)),
        )),
    }

    if p > 3 {
        rec.checks.push(Check::new(
            format!("{}-closed-form-j", family.name()),
            true,
            format!("model j equals closed form at {} parameters", part.valid_count()),
        ));
    }

    match family {
        Family::Legendre | Family::Hessian => {
            let sizes = check_class_sizes(&f, &part)?;
            let lemmas = if family == Family::Legendre {
                [Lemma::LegendreJ, Lemma::LegendreI]
            } else {
                [Lemma::HessianJ, Lemma::HessianI]
            };
            rec.checks.push(lemma_check(lemmas[0], &sizes));
            if part.iso_classes.is_some() {
                rec.checks.push(lemma_check(lemmas[1], &sizes));
            }
            if p > 3 && q <= cfg.guards.identities as u64 {
                rec.checks.push(pairwise_identity(&f, family)?);
                if family == Family::Hessian {
                    rec.checks.push(discriminant_identity(&f)?);
                }
            }
        }
        Family::GeneralizedHessian => generalized_hessian_checks(q, &part, &mut rec.checks),
        _ => {}
    }

    if family == Family::Legendre {
        rec.checks.push(hist_check(q, &part)?);
        let counts = s_ij_census(&f)?;
        let mut bad = Vec::new();
        for (&(i, j), &n) in &counts {
            let pred = predicted_s_ij(q, i, j)?;
            if pred != n {
                bad.push(format!("S({i},{j}): predicted {pred}, enumerated {n}"));
            }
        }
        let detail = if bad.is_empty() {
            counts.iter().map(|((i, j), n)| format!("S({i},{j}) = {n}")).collect::<Vec<_>>().join(", ")
        } else {
            bad.join("; ")
        };
        rec.checks.push(Check::new("character-pair-lemma", bad.is_empty(), detail));
        if p > 3 && q <= cfg.guards.baseline as u64 {
            let got = baseline_short_weierstrass_census(&f)?;
            rec.checks.push(count_check("short-weierstrass-baseline".into(), predicted_baseline(q)?, got));
        }
    }
    Ok(())
}

/// Runs every check for one (family, q) job.
pub fn verify_one(cfg: &RunConfig, family: Family, q: u64) -> Record {
    let start = Instant::now();
    let mut rec = Record { family, q, j: None, i: None, n_hist: None, m_hist: None, checks: Vec::new(), elapsed_ms: None };
    let p = prime_power(q).map_or(0, |(p, _)| p as u32);
    if !family.supports_characteristic(p) {
        let why = format!("{family} is not defined in characteristic {p}");
        rec.checks.push(Check::skipped(theorem_name(family, "j"), why.clone()));
        rec.checks.push(Check::skipped(theorem_name(family, "i"), why));
    } else if let Err(e) = run_checks(cfg, family, q, &mut rec) {
        rec.checks.push(Check::new("census", false, e.to_string()));
    }
    if !cfg.stable {
        rec.elapsed_ms = Some(start.elapsed().as_millis() as u64);
    }
    rec
}

/// Runs all jobs in parallel and returns the records ordered by (family, q).
/// With `fail_fast`, the list ends at the first failing record.
pub fn run_verify(cfg: &RunConfig) -> Vec<Record> {
    let first_fail = AtomicUsize::new(usize::MAX);
    let records: Vec<Option<Record>> = cfg
        .jobs
        .par_iter()
        .enumerate()
        .map(|(idx, &(family, q))| {
            if cfg.fail_fast && idx > first_fail.load(Ordering::Relaxed) {
                return None;
            }
            let rec = verify_one(cfg, family, q);
            if cfg.fail_fast && !rec.passed() {
                first_fail.fetch_min(idx, Ordering::Relaxed);
            }
            Some(rec)
        })
        .collect();
    let cut = first_fail.load(Ordering::Relaxed);
    records
        .into_iter()
        .enumerate()
        .take_while(|(idx, _)| *idx <= cut)
        .map(|(_, r)| r.expect("jobs before the first failure always run"))
        .collect()
}
