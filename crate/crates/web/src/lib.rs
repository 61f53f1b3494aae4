//! Browser bindings. Each export takes plain strings and numbers and returns
//! a JSON document; the native functions of the same shape are tested directly.

use std::collections::BTreeMap;

use loglift::examples::{schraen_table, BreuilTwist};
use loglift::field::{ExtFieldSpec, Field, PrimeConfig};
use loglift::induced::TruncatedInduced;
use loglift::io::{canonical_lit, matrix_to_json};
use loglift::matrix::MatrixE;
use loglift::modules::torus_inflation;
use loglift::root_data::{GLnContext, GroupElement};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Depth limit for the multiplicity grid; keeps the page responsive.
pub const MAX_VERMA_DEPTH: usize = 8;

fn field(p: u32, cap: i32, ext: ExtFieldSpec) -> Result<Field, String> {
    let config = PrimeConfig::new(u64::from(p), i64::from(cap)).map_err(|e| e.to_string())?;
    Field::new(config, ext).map_err(|e| e.to_string())
}

fn strings(m: &MatrixE) -> Value {
    m.to_rows().iter().map(|r| r.iter().map(|x| Value::String(x.to_string())).collect::<Vec<_>>()).collect()
}

/// Lift of the twisted two-dimensional example at `[[a, b], [0, d]]`.
pub fn breuil_lift(l: &str, k: i32, p: u32, cap: i32, a: &str, b: &str, d: &str) -> Result<String, String> {
    let ext = if k % 2 == 0 { ExtFieldSpec::Base } else { ExtFieldSpec::SqrtP };
    let f = field(p, cap, ext)?;
    let parse = |s: &str| f.parse(s).map_err(|e| format!("{s:?}: {e}"));
    let l = parse(l)?;
    let tw = BreuilTwist::new(&f, &l, i64::from(k)).map_err(|e| e.to_string())?;
    let mut m = MatrixE::zeros(&f, 2, 2);
    m[(0, 0)] = parse(a)?;
    m[(0, 1)] = parse(b)?;
    m[(1, 1)] = parse(d)?;
    let g = GroupElement::new(m).map_err(|e| e.to_string())?;
    let value = tw.eval(&g).map_err(|e| e.to_string())?;
    Ok(json!({ "L": l.to_string(), "lift": strings(&value), "canonical": matrix_to_json(&value) }).to_string())
}

/// The three-dimensional logarithm next to its closed form on fixed torus elements.
pub fn schraen(l: &str, lp: &str, p: u32, cap: i32) -> Result<String, String> {
    let f = field(p, cap, ExtFieldSpec::Base)?;
    let l = f.parse(l).map_err(|e| e.to_string())?;
    let lp = f.parse(lp).map_err(|e| e.to_string())?;
    let rows = schraen_table(&f, &l, &lp, i64::from(cap) - 2).map_err(|e| e.to_string())?;
    let rows: Vec<Value> = rows
        .iter()
        .map(|r| {
            let show = |xs: &[loglift::field::Elem]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>();
            json!({
                "element": r.element.diagonal_entries().iter().map(canonical_lit).collect::<Vec<_>>(),
                "computed": show(&r.computed),
                "closed_form": show(&r.closed_form),
                "agrees": r.agrees,
            })
        })
        .collect();
    Ok(json!({ "L": l.to_string(), "Lp": lp.to_string(), "rows": rows }).to_string())
}

/// Weight multiplicities of the truncated induced module of the `gl_3`
/// character `lambda`, as `{ "depth", "dim", "weights": [[w, mult], ...] }`.
pub fn verma_grid(l1: i32, l2: i32, l3: i32, depth: usize) -> Result<String, String> {
    if depth > MAX_VERMA_DEPTH {
        return Err(format!("depth is limited to {MAX_VERMA_DEPTH} here"));
    }
    let f = field(5, 10, ExtFieldSpec::Base)?;
    let ctx = GLnContext::borel(3);
    let zero = MatrixE::zeros(&f, 1, 1);
    let lambda = [l1, l2, l3].map(i64::from);
    let base = torus_inflation(&ctx, &f, &lambda, &[zero.clone(), zero.clone(), zero]).map_err(|e| e.to_string())?;
    let v = TruncatedInduced::build(&base, depth).map_err(|e| e.to_string())?;
    let mults: BTreeMap<Vec<i64>, usize> = v.weight_multiplicities().map_err(|e| e.to_string())?;
    let weights: Vec<Value> = mults.iter().map(|(w, k)| json!([w, k])).collect();
    Ok(json!({ "depth": depth, "dim": v.dim(), "weights": weights }).to_string())
}

#[wasm_bindgen(js_name = breuilLift)]
#[allow(clippy::too_many_arguments)]
pub fn breuil_lift_js(l: &str, k: i32, p: u32, cap: i32, a: &str, b: &str, d: &str) -> Result<String, JsValue> {
    breuil_lift(l, k, p, cap, a, b, d).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = schraenTable)]
pub fn schraen_js(l: &str, lp: &str, p: u32, cap: i32) -> Result<String, JsValue> {
    schraen(l, lp, p, cap).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = vermaGrid)]
pub fn verma_grid_js(l1: i32, l2: i32, l3: i32, depth: u32) -> Result<String, JsValue> {
    verma_grid(l1, l2, l3, depth as usize).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn breuil_diag_p_one_is_the_branch() {
        let out: Value = serde_json::from_str(&breuil_lift("2 + O(5^10)", 2, 5, 20, "5", "0", "1").unwrap()).unwrap();
        assert_eq!(out["canonical"], json!([[1, "2 + O(5^10)"], [0, 1]]));
    }

    #[test]
    fn schraen_rows_agree() {
        let out: Value = serde_json::from_str(&schraen("117", "118", 7, 12).unwrap()).unwrap();
        assert!(out["rows"].as_array().unwrap().iter().all(|r| r["agrees"] == true));
    }

    #[test]
    fn verma_grid_counts_match_dimension() {
        let out: Value = serde_json::from_str(&verma_grid(2, 0, -3, 3).unwrap()).unwrap();
        let total: u64 = out["weights"].as_array().unwrap().iter().map(|w| w[1].as_u64().unwrap()).sum();
        assert_eq!(total, out["dim"].as_u64().unwrap());
        assert_eq!(out["dim"], 20);
        assert!(verma_grid(0, 0, 0, MAX_VERMA_DEPTH + 1).is_err());
    }

    #[test]
    fn bad_literal_is_reported() {
        let err = breuil_lift("2 + x", 2, 5, 20, "5", "0", "1").unwrap_err();
        assert!(err.contains("2 + x"));
    }
}
