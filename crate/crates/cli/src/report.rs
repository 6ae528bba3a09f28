use serde::Serialize;

use crate::config::Format;
use crate::inspect::{CensusDoc, ClassesDoc, FieldDoc};
use crate::verify::{Record, Status};

/// Pretty JSON with object keys sorted, newline terminated.
pub fn to_json<T: Serialize>(doc: &T) -> String {
    // serde_json::Value keeps keys in a BTreeMap
    let value = serde_json::to_value(doc).expect("report types serialize");
    let mut s = serde_json::to_string_pretty(&value).expect("value serializes");
    s.push('\n');
    s
}

fn to_csv(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(headers).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

fn to_table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let mut out = String::new();
    let head: Vec<String> = headers.iter().map(|h| h.to_string()).collect();
    for r in std::iter::once(&head).chain(rows) {
        let last = r.len() - 1;
        for (i, c) in r.iter().enumerate() {
            if i == last {
                out.push_str(c);
            } else {
                out.push_str(&format!("{c:<w$}  ", w = widths[i]));
            }
        }
        out.push('\n');
    }
    out
}

fn hist_string(h: &Option<std::collections::BTreeMap<u64, u64>>) -> String {
    match h {
        Some(h) => h.iter().map(|(k, n)| format!("{k}:{n}")).collect::<Vec<_>>().join(" "),
        None => "-".into(),
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(String::new, |v| v.to_string())
}

pub fn emit_verify(records: &[Record], format: Format) -> String {
    match format {
        Format::Json => to_json(&records),
        Format::Csv | Format::Text => {
            let rows: Vec<Vec<String>> = records
                .iter()
                .flat_map(|r| {
                    r.checks.iter().map(move |c| {
                        vec![
                            r.family.to_string(),
                            r.q.to_string(),
                            c.name.clone(),
                            c.status.as_str().to_string(),
                            c.detail.clone(),
                        ]
                    })
                })
                .collect();
            let headers = ["family", "q", "check", "status", "detail"];
            if format == Format::Csv {
                to_csv(&headers, &rows)
            } else {
                let mut s = to_table(&headers, &rows);
                let failed = records.iter().flat_map(|r| &r.checks).filter(|c| c.status == Status::Fail).count();
                let total: usize = records.iter().map(|r| r.checks.len()).sum();
                s.push_str(&format!("{} records, {total} checks, {failed} failed\n", records.len()));
                s
            }
        }
    }
}

pub fn emit_census(docs: &[CensusDoc], format: Format) -> String {
    match format {
        Format::Json => to_json(&docs),
        Format::Csv => {
            let rows: Vec<Vec<String>> = docs
                .iter()
                .flat_map(|d| {
                    d.parameters.iter().map(move |p| {
                        vec![
                            d.family.to_string(),
                            d.q.to_string(),
                            p.parameter.u.to_string(),
                            opt(p.parameter.v),
                            p.j.to_string(),
                            p.j_class_size.to_string(),
                            p.class_key.map_or_else(String::new, |k| {
                                k.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(":")
                            }),
                            opt(p.class_size),
                        ]
                    })
                })
                .collect();
            to_csv(&["family", "q", "u", "v", "j", "j_class_size", "class_key", "class_size"], &rows)
        }
        Format::Text => {
            let rows: Vec<Vec<String>> = docs
                .iter()
                .map(|d| match &d.skipped {
                    Some(why) => vec![d.family.to_string(), d.q.to_string(), "skipped".into(), why.clone()],
                    None => vec![
                        d.family.to_string(),
                        d.q.to_string(),
                        format!("curves={} J={} I={}", d.curves, d.j, opt(d.i)),
                        format!("N_hist {} | M_hist {}", hist_string(&Some(d.n_hist.clone())), hist_string(&d.m_hist)),
                    ],
                })
                .collect();
            to_table(&["family", "q", "counts", "histograms"], &rows)
        }
    }
}

pub fn emit_classes(docs: &[ClassesDoc], format: Format) -> String {
    let key_str = |k: &Option<[u32; 6]>| {
        k.map_or_else(String::new, |k| k.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(":"))
    };
    let rows: Vec<Vec<String>> = docs
        .iter()
        .flat_map(|d| {
            d.classes.iter().enumerate().map(move |(i, c)| {
                vec![
                    d.family.to_string(),
                    d.q.to_string(),
                    d.kind.to_string(),
                    (i + 1).to_string(),
                    c.representative.to_string(),
                    c.j.to_string(),
                    key_str(&c.key),
                    c.size.to_string(),
                    c.members.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(" "),
                ]
            })
        })
        .collect();
    let headers = ["family", "q", "kind", "class", "representative", "j", "key", "size", "members"];
    match format {
        Format::Json => to_json(&docs),
        Format::Csv => to_csv(&headers, &rows),
        Format::Text => {
            let mut s = to_table(&headers, &rows);
            for d in docs {
                match &d.skipped {
                    Some(why) => s.push_str(&format!("{} q={}: skipped, {why}\n", d.family, d.q)),
                    None => s.push_str(&format!("{} q={}: {} {} classes\n", d.family, d.q, d.classes.len(), d.kind)),
                }
            }
            s
        }
    }
}

pub fn emit_fields(docs: &[FieldDoc], format: Format) -> String {
    let rows: Vec<Vec<String>> = docs
        .iter()
        .map(|d| {
            vec![
                d.q.to_string(),
                d.p.to_string(),
                d.k.to_string(),
                d.modulus.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" "),
                d.generator.to_string(),
            ]
        })
        .collect();
    let headers = ["q", "p", "k", "modulus", "generator"];
    match format {
        Format::Json => to_json(&docs),
        Format::Csv => to_csv(&headers, &rows),
        Format::Text => to_table(&headers, &rows),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_keys_are_sorted() {
        #[derive(Serialize)]
        struct T {
            zeta: u8,
            alpha: u8,
        }
        assert_eq!(to_json(&T { zeta: 1, alpha: 2 }), "{\n  \"alpha\": 2,\n  \"zeta\": 1\n}\n");
    }

    #[test]
    fn table_columns_align() {
        let t = to_table(&["a", "bb"], &[vec!["xyz".into(), "1".into()], vec!["w".into(), "22".into()]]);
        assert_eq!(t, "a    bb\nxyz  1\nw    22\n");
    }

    #[test]
    fn csv_quotes_commas() {
        let s = to_csv(&["x"], &[vec!["a, b".into()]]);
        assert_eq!(s, "x\n\"a, b\"\n");
    }
}
