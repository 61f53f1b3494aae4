use std::collections::BTreeMap;
use std::fmt::Write;

use loglift::checks::CheckReport;
use loglift::examples::SchraenRow;
use loglift::field::Elem;
use loglift::group_ring::DgHReport;
use loglift::induced::TruncatedInduced;
use loglift::io::{canonical_lit, element_to_file, matrix_to_json};
use loglift::matrix::{MatrixE, PrimaryDecomposition};
use loglift::root_data::GroupElement;
use serde_json::{json, Value};

pub fn json_line(v: &Value) -> String {
    format!("{}\n", serde_json::to_string_pretty(v).expect("json values serialize"))
}

pub fn matrix(m: &MatrixE) -> String {
    m.to_string()
}

fn weight(w: &[i64]) -> String {
    let parts: Vec<String> = w.iter().map(i64::to_string).collect();
    format!("({})", parts.join(", "))
}

fn elems_json(xs: &[Elem]) -> Value {
    serde_json::to_value(xs.iter().map(canonical_lit).collect::<Vec<_>>()).expect("literals serialize")
}

fn element_json(g: &GroupElement) -> Value {
    serde_json::to_value(element_to_file(g).matrix).expect("literals serialize")
}

fn monomial(v: &TruncatedInduced, mono: &[usize]) -> String {
    if mono.is_empty() {
        return "1".into();
    }
    let roots = v.negative_roots();
    let mut out = Vec::new();
    let mut i = 0;
    while i < mono.len() {
        let run = mono[i..].iter().take_while(|&&r| r == mono[i]).count();
        let (a, b) = roots[mono[i]];
        let f = format!("f_{}_{}", a + 1, b + 1);
        out.push(if run > 1 { format!("{f}^{run}") } else { f });
        i += run;
    }
    out.join(" ")
}

pub fn verma(v: &TruncatedInduced, mults: Option<&BTreeMap<Vec<i64>, usize>>, basis: bool, as_json: bool) -> String {
    let base_dim = v.base().dim();
    if as_json {
        let mut out = json!({ "depth": v.depth(), "dim": v.dim(), "base_dim": base_dim });
        if let Some(m) = mults {
            out["weights"] = m.iter().map(|(w, k)| json!({ "weight": w, "multiplicity": k })).collect();
        }
        if basis {
            out["monomials"] = v.monomials().iter().map(|m| Value::String(monomial(v, m))).collect();
        }
        return json_line(&out);
    }
    let mut s = String::new();
    let _ = writeln!(s, "depth {}: dimension {} ({} monomials x base dimension {})", v.depth(), v.dim(), v.monomials().len(), base_dim);
    if basis {
        for m in v.monomials() {
            let _ = writeln!(s, "  {} (x) m_j, weight shift {}", monomial(v, m), weight(&v.monomial_weight(m)));
        }
    }
    if let Some(m) = mults {
        let _ = writeln!(s, "weight multiplicities:");
        for (w, k) in m {
            let _ = writeln!(s, "  {:<20} {k}", weight(w));
        }
    }
    s
}

pub fn weights(dec: &PrimaryDecomposition, projectors: bool, as_json: bool) -> String {
    if as_json {
        let comps: Vec<Value> = dec
            .components
            .iter()
            .map(|c| {
                let mut v = json!({ "weight": c.weight, "dim": c.dim });
                if projectors {
                    v["projector"] = matrix_to_json(&c.projector);
                }
                v
            })
            .collect();
        return json_line(&json!({ "dim": dec.dim, "components": comps }));
    }
    let mut s = String::new();
    for c in &dec.components {
        let _ = writeln!(s, "weight {:<16} dim {}", weight(&c.weight), c.dim);
        if projectors {
            let _ = writeln!(s, "{}", matrix(&c.projector));
        }
    }
    s
}

pub fn check_report(r: &CheckReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "module of dimension {}, cap {}, {} samples, seed {}", r.dim, r.cap, r.samples, r.seed);
    if let Some(d) = r.lift_digits {
        let _ = writeln!(s, "lift checks asserted to {d} digits");
    }
    for suite in &r.suites {
        if let Some(why) = &suite.skipped {
            let _ = writeln!(s, "SKIP {:<28} {why}", suite.name);
            continue;
        }
        let status = if suite.passed() { "PASS" } else { "FAIL" };
        let _ = writeln!(s, "{status} {:<28} {} checked, {} failed", suite.name, suite.checked, suite.failures.len());
        for f in &suite.failures {
            let _ = writeln!(s, "     - {f}");
        }
    }
    let _ = writeln!(s, "{}", if r.all_passed() { "all checks passed" } else { "some checks failed" });
    s
}

pub fn dgh(r: &DgHReport) -> String {
    let mut s = String::new();
    let status = if r.passed() { "PASS" } else { "FAIL" };
    let _ = writeln!(s, "{status} dgh-compatibility {} checked, {} failed", r.checked, r.violations.len());
    for v in &r.violations {
        let _ = writeln!(s, "     - {v}");
    }
    s
}

pub fn breuil(l: &Elem, k: i64, rows: &[(&str, MatrixE, GroupElement)], as_json: bool) -> String {
    if as_json {
        let rows: Vec<Value> =
            rows.iter().map(|(name, m, g)| json!({ "name": name, "element": element_json(g), "lift": matrix_to_json(m) })).collect();
        return json_line(&json!({ "L": canonical_lit(l), "k": k, "rows": rows }));
    }
    let mut s = String::new();
    let _ = writeln!(s, "branch L = {l}, k = {k}");
    for (name, m, _) in rows {
        let _ = writeln!(s, "{name}:\n{}", matrix(m));
    }
    s
}

pub fn schraen(l: &Elem, lp: &Elem, rows: &[SchraenRow], as_json: bool) -> String {
    if as_json {
        let rows: Vec<Value> = rows
            .iter()
            .map(|r| {
                json!({
                    "element": element_json(&r.element),
                    "computed": elems_json(&r.computed),
                    "closed_form": elems_json(&r.closed_form),
                    "agrees": r.agrees,
                })
            })
            .collect();
        return json_line(&json!({ "L": canonical_lit(l), "Lp": canonical_lit(lp), "rows": rows }));
    }
    let mut s = String::new();
    let _ = writeln!(s, "L = {l}, L' = {lp}");
    for r in rows {
        let diag: Vec<String> = r.element.diagonal_entries().iter().map(Elem::to_string).collect();
        let _ = writeln!(s, "t = diag({})  {}", diag.join(", "), if r.agrees { "agrees" } else { "DISAGREES" });
        for (i, (a, b)) in r.computed.iter().zip(&r.closed_form).enumerate() {
            let _ = writeln!(s, "  coordinate {}: {a}", i + 1);
            let _ = writeln!(s, "  closed form : {b}");
        }
    }
    s
}
