//! JSON file formats for modules, logarithms and group elements.
//!
//! Field entries are either JSON integers or literal strings in the field
//! syntax (`"2 + 3*p + O(p^10)"`). Canonical output writes an entry as an
//! integer exactly when that integer reparses to the same element.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{is_prime, Elem, ExtFieldSpec, Field, PrimeConfig, DEFAULT_CAP};
use crate::matrix::MatrixE;
use crate::modules::{FdPModule, Generator};
use crate::root_data::{GLnContext, GroupElement};
use crate::torus_log::TorusLogarithm;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Lit {
    Int(i64),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldFile {
    pub p: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ext: Option<ExtFieldSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub composition: Option<Vec<usize>>,
    pub field: FieldFile,
    pub dim: usize,
    /// Declares an action of all of `gl_n` even if only `p` entries are listed.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub g_module: bool,
    pub action: BTreeMap<String, Vec<Vec<Lit>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogFile {
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<Vec<i64>>>,
    pub branches: Vec<Lit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub correction: Option<Vec<Vec<Lit>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementFile {
    pub matrix: Vec<Vec<Lit>>,
}

/// How the precision cap is chosen: `force` beats the file, the file beats `default`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CapPolicy {
    pub force: Option<i64>,
    pub default: i64,
}

impl Default for CapPolicy {
    fn default() -> Self {
        CapPolicy { force: None, default: DEFAULT_CAP }
    }
}

impl CapPolicy {
    pub fn resolve(&self, from_file: Option<i64>) -> i64 {
        self.force.or(from_file).unwrap_or(self.default)
    }
}

fn json_error(e: serde_json::Error) -> Error {
    Error::Parse { position: e.line(), message: format!("line {}, column {}: {e}", e.line(), e.column()) }
}

pub fn parse_lit(field: &Field, lit: &Lit, at: &str) -> Result<Elem> {
    match lit {
        Lit::Int(k) => Ok(field.int(*k)),
        Lit::Text(s) => field.parse(s).map_err(|e| Error::schema(at, e.to_string())),
    }
}

pub fn canonical_lit(x: &Elem) -> Lit {
    if x.is_exact_zero() {
        return Lit::Int(0);
    }
    let text = x.to_string();
    if let Some(k) = x.to_i64() {
        let as_int = x.field().int(k);
        if k.unsigned_abs() < 1_000_000_000 && as_int.to_string() == text && x.prec_ord() >= as_int.prec_ord() {
            return Lit::Int(k);
        }
    }
    Lit::Text(text)
}

fn parse_matrix(field: &Field, rows: &[Vec<Lit>], shape: (usize, usize), at: &str) -> Result<MatrixE> {
    if rows.len() != shape.0 || rows.iter().any(|r| r.len() != shape.1) {
        return Err(Error::schema(at, format!("expected a {}x{} matrix", shape.0, shape.1)));
    }
    let mut m = MatrixE::zeros(field, shape.0, shape.1);
    for (i, row) in rows.iter().enumerate() {
        for (j, lit) in row.iter().enumerate() {
            m[(i, j)] = parse_lit(field, lit, &format!("{at}[{i}][{j}]"))?;
        }
    }
    Ok(m)
}

fn matrix_lits(m: &MatrixE) -> Vec<Vec<Lit>> {
    m.to_rows().iter().map(|r| r.iter().map(canonical_lit).collect()).collect()
}

pub fn generator_key(g: Generator) -> String {
    format!("e_{}_{}", g.0 + 1, g.1 + 1)
}

/// Parses `e_i_j` with 1-based indices.
pub fn parse_generator_key(key: &str, n: usize) -> Result<Generator> {
    let at = format!("action.{key}");
    let rest = key.strip_prefix("e_").ok_or_else(|| Error::schema(&at, "keys look like `e_i_j`"))?;
    let mut parts = rest.split('_');
    let (Some(i), Some(j), None) = (parts.next(), parts.next(), parts.next()) else {
        return Err(Error::schema(&at, "keys look like `e_i_j`"));
    };
    let parse = |s: &str| s.parse::<usize>().ok().filter(|&k| (1..=n).contains(&k));
    match (parse(i), parse(j)) {
        (Some(i), Some(j)) => Ok((i - 1, j - 1)),
        _ => Err(Error::schema(&at, format!("indices must lie in 1..={n}"))),
    }
}

pub fn field_from_file(f: &FieldFile, caps: CapPolicy) -> Result<Field> {
    if !is_prime(f.p) {
        return Err(Error::schema("field.p", format!("{} is not prime", f.p)));
    }
    let cap = caps.resolve(f.cap);
    let config = PrimeConfig::new(f.p, cap).map_err(|e| Error::schema("field.cap", e.to_string()))?;
    Field::new(config, f.ext.clone().unwrap_or(ExtFieldSpec::Base)).map_err(|e| Error::schema("field.ext", e.to_string()))
}

pub fn field_to_file(f: &Field) -> FieldFile {
    let ext = match f.ext() {
        ExtFieldSpec::Base => None,
        other => Some(other.clone()),
    };
    FieldFile { p: f.p(), cap: Some(f.cap()), ext }
}

pub fn module_from_file(file: &ModuleFile, caps: CapPolicy) -> Result<FdPModule> {
    let composition = file.composition.clone().unwrap_or_else(|| vec![1; file.n]);
    if composition.iter().sum::<usize>() != file.n || composition.contains(&0) {
        return Err(Error::schema("composition", format!("must be positive parts summing to n = {}", file.n)));
    }
    let ctx = GLnContext::new(composition).map_err(|e| Error::schema("composition", e.to_string()))?;
    let field = field_from_file(&file.field, caps)?;
    if file.dim == 0 {
        return Err(Error::schema("dim", "must be positive"));
    }
    let mut action = BTreeMap::new();
    for (key, rows) in &file.action {
        let g = parse_generator_key(key, file.n)?;
        let m = parse_matrix(&field, rows, (file.dim, file.dim), &format!("action.{key}"))?;
        action.insert(g, m);
    }
    let m = FdPModule::new(ctx, field, file.dim, action)?;
    Ok(if file.g_module { m.as_g_module() } else { m })
}

pub fn module_to_file(m: &FdPModule, name: Option<&str>) -> ModuleFile {
    let ctx = m.ctx();
    let composition = if ctx.composition.iter().all(|&c| c == 1) { None } else { Some(ctx.composition.clone()) };
    let action = m.explicit_action().iter().map(|(g, a)| (generator_key(*g), matrix_lits(a))).collect();
    ModuleFile {
        name: name.map(str::to_owned),
        n: ctx.n,
        composition,
        field: field_to_file(m.field()),
        dim: m.dim(),
        g_module: m.is_g_module(),
        action,
    }
}

pub fn log_from_file(file: &LogFile, field: &Field, n: usize) -> Result<TorusLogarithm> {
    if file.branches.len() != n {
        return Err(Error::schema("branches", format!("expected {n} branch values")));
    }
    let branches =
        file.branches.iter().enumerate().map(|(i, b)| parse_lit(field, b, &format!("branches[{i}]"))).collect::<Result<Vec<_>>>()?;
    let log = match &file.a {
        None => TorusLogarithm::standard(field, branches),
        Some(a) => {
            if a.len() != n || a.iter().any(|r| r.len() != n) {
                return Err(Error::schema("A", format!("expected an {n}x{n} integer matrix")));
            }
            TorusLogarithm::new(field, a.clone(), branches)
        }
    }
    .map_err(|e| Error::schema("A", e.to_string()))?;
    match &file.correction {
        None => Ok(log),
        Some(c) => log.with_correction(parse_matrix(field, c, (n, n), "correction")?),
    }
}

pub fn log_to_file(log: &TorusLogarithm) -> LogFile {
    let n = log.rank();
    let identity = (0..n).all(|i| (0..n).all(|j| log.a()[i][j] == i64::from(i == j)));
    LogFile {
        a: if identity { None } else { Some(log.a().to_vec()) },
        branches: log.branches().iter().map(canonical_lit).collect(),
        correction: log.correction().map(matrix_lits),
    }
}

pub fn element_from_file(file: &ElementFile, field: &Field, n: usize) -> Result<GroupElement> {
    let m = parse_matrix(field, &file.matrix, (n, n), "matrix")?;
    GroupElement::new(m).map_err(|e| Error::schema("matrix", e.to_string()))
}

pub fn element_to_file(g: &GroupElement) -> ElementFile {
    ElementFile { matrix: matrix_lits(g.matrix()) }
}

pub fn parse_module(text: &str, caps: CapPolicy) -> Result<FdPModule> {
    let file: ModuleFile = serde_json::from_str(text).map_err(json_error)?;
    module_from_file(&file, caps)
}

pub fn parse_log(text: &str, field: &Field, n: usize) -> Result<TorusLogarithm> {
    let file: LogFile = serde_json::from_str(text).map_err(json_error)?;
    log_from_file(&file, field, n)
}

pub fn parse_element(text: &str, field: &Field, n: usize) -> Result<GroupElement> {
    let file: ElementFile = serde_json::from_str(text).map_err(json_error)?;
    element_from_file(&file, field, n)
}

fn pretty<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("plain data serializes")
}

pub fn module_to_json(m: &FdPModule, name: Option<&str>) -> String {
    pretty(&module_to_file(m, name))
}

pub fn log_to_json(log: &TorusLogarithm) -> String {
    pretty(&log_to_file(log))
}

pub fn element_to_json(g: &GroupElement) -> String {
    pretty(&element_to_file(g))
}

pub fn matrix_to_json(m: &MatrixE) -> serde_json::Value {
    serde_json::to_value(matrix_lits(m)).expect("plain data serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modules::{breuil_module, schraen_module};

    const TRIVIAL: &str = r#"{"n": 2, "field": {"p": 5}, "dim": 1, "action": {}}"#;

    #[test]
    fn minimal_file() {
        let m = parse_module(TRIVIAL, CapPolicy::default()).unwrap();
        assert_eq!(m.dim(), 1);
        assert_eq!(m.field().cap(), DEFAULT_CAP);
        let forced = parse_module(TRIVIAL, CapPolicy { force: Some(33), default: 20 }).unwrap();
        assert_eq!(forced.field().cap(), 33);
    }

    #[test]
    fn schema_errors_name_the_field() {
        let bad_p = r#"{"n": 2, "field": {"p": 6}, "dim": 1, "action": {}}"#;
        match parse_module(bad_p, CapPolicy::default()) {
            Err(Error::Schema { field, .. }) => assert_eq!(field, "field.p"),
            other => panic!("{other:?}"),
        }
        let bad_key = r#"{"n": 2, "field": {"p": 5}, "dim": 1, "action": {"e_3_1": [[1]]}}"#;
        assert!(matches!(parse_module(bad_key, CapPolicy::default()), Err(Error::Schema { .. })));
        let bad_shape = r#"{"n": 2, "field": {"p": 5}, "dim": 2, "action": {"e_1_1": [[1]]}}"#;
        match parse_module(bad_shape, CapPolicy::default()) {
            Err(Error::Schema { field, .. }) => assert_eq!(field, "action.e_1_1"),
            other => panic!("{other:?}"),
        }
        let unknown = r#"{"n": 2, "field": {"p": 5}, "dim": 1, "action": {}, "extra": 1}"#;
        assert!(matches!(parse_module(unknown, CapPolicy::default()), Err(Error::Parse { .. })));
    }

    #[test]
    fn round_trip_is_canonical() {
        let f = Field::qp(5, 20).unwrap();
        for m in [breuil_module(&f), schraen_module(&f)] {
            let text = module_to_json(&m, Some("x"));
            let back = parse_module(&text, CapPolicy::default()).unwrap();
            assert_eq!(module_to_json(&back, Some("x")), text);
            for (g, a) in m.explicit_action() {
                assert!(back.phi(g.0, g.1).approx_eq(a, 0));
            }
        }
    }

    #[test]
    fn literals_survive() {
        let f = Field::qp(5, 20).unwrap();
        let x = f.parse("2 + 3*p + O(p^10)").unwrap();
        let lit = canonical_lit(&x);
        assert!(matches!(lit, Lit::Text(_)));
        assert!(parse_lit(&f, &lit, "x").unwrap().approx_eq(&x, 0));
        assert_eq!(canonical_lit(&f.int(-7)), Lit::Int(-7));
        assert_eq!(canonical_lit(&f.zero()), Lit::Int(0));
    }

    #[test]
    fn logs_and_elements() {
        let f = Field::qp(5, 20).unwrap();
        let text = r#"{"A": [[1, 0], [1, 1]], "branches": ["3 + O(p^15)", 7], "correction": [[0, 1], [0, 0]]}"#;
        let log = parse_log(text, &f, 2).unwrap();
        assert_eq!(log.a()[1][0], 1);
        let again = parse_log(&log_to_json(&log), &f, 2).unwrap();
        assert_eq!(log_to_json(&again), log_to_json(&log));
        assert!(parse_log(r#"{"branches": [1]}"#, &f, 2).is_err());
        let g = parse_element(r#"{"matrix": [["p", 1], [0, 1]]}"#, &f, 2).unwrap();
        assert_eq!(g.matrix()[(0, 0)].to_i64(), Some(5));
        assert!(parse_element(r#"{"matrix": [[0, 0], [0, 1]]}"#, &f, 2).is_err());
    }
}
