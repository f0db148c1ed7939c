//! JSON files for data sets, single elements and reports.
//!
//! Complex entries are `[re, im]` (a bare number is read as a real entry).
//! Matrix-instance elements are dense row lists; sequence-instance elements
//! are lists of `{"j": index, "coeff": rows}`. See docs/FORMAT.md.

use std::path::Path;

use serde_json::{json, Map, Value};

use crate::algebra::{Algebra, InstanceKind};
use crate::data::{AnyDataSet, DataSet};
use crate::error::{Error, Result};
use crate::linalg::{zeros, ComplexMatrix, C64};
use crate::matrix::TriangularAlgebra;
use crate::sequence::{MatSeq, SequenceAlgebra};

pub const DATASET_FORMAT: &str = "eginv-dataset/1";
pub const ELEMENT_FORMAT: &str = "eginv-element/1";
pub const REPORT_FORMAT: &str = "eginv-report/1";

/// Element of either instance.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyElement {
    Matrix(ComplexMatrix),
    Sequence(MatSeq),
}

/// Parsed data file with its optional generator seed.
#[derive(Clone, Debug, PartialEq)]
pub struct DataSetFile {
    pub data: AnyDataSet,
    pub seed: Option<u64>,
}

/// Parsed element file.
#[derive(Clone, Debug, PartialEq)]
pub struct ElementFile {
    pub kind: InstanceKind,
    pub p: usize,
    pub q: usize,
    pub name: String,
    pub element: AnyElement,
    pub seed: Option<u64>,
}

fn perr(location: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse { location: location.into(), message: message.into() }
}

fn parse_json(text: &str, source: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| perr(format!("{source}:{}:{}", e.line(), e.column()), e.to_string()))
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, at: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| perr(at, format!("missing field \"{key}\"")))
}

fn as_object<'a>(v: &'a Value, at: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| perr(at, "expected an object"))
}

fn as_usize(v: &Value, at: &str) -> Result<usize> {
    v.as_u64().map(|x| x as usize).ok_or_else(|| perr(at, "expected a nonnegative integer"))
}

fn check_format(obj: &Map<String, Value>, want: &str, at: &str) -> Result<()> {
    match obj.get("format").and_then(Value::as_str) {
        Some(f) if f == want => Ok(()),
        Some(f) => Err(perr(format!("{at}.format"), format!("expected \"{want}\", found \"{f}\""))),
        None => Err(perr(at, format!("missing field \"format\" (expected \"{want}\")"))),
    }
}

fn parse_kind(v: &Value, at: &str) -> Result<InstanceKind> {
    match v.as_str() {
        Some("matrix") => Ok(InstanceKind::TriangularMatrix),
        Some("sequence") => Ok(InstanceKind::Sequence),
        _ => Err(perr(at, "expected \"matrix\" or \"sequence\"")),
    }
}

/// "matrix" or "sequence".
pub fn kind_name(kind: InstanceKind) -> &'static str {
    match kind {
        InstanceKind::TriangularMatrix => "matrix",
        InstanceKind::Sequence => "sequence",
    }
}

fn parse_complex(v: &Value, at: &str) -> Result<C64> {
    if let Some(x) = v.as_f64() {
        return Ok(C64::new(x, 0.0));
    }
    match v.as_array().map(Vec::as_slice) {
        Some([re, im]) => match (re.as_f64(), im.as_f64()) {
            (Some(re), Some(im)) => Ok(C64::new(re, im)),
            _ => Err(perr(at, "entries of [re, im] must be numbers")),
        },
        _ => Err(perr(at, "expected a complex entry [re, im]")),
    }
}

fn parse_matrix(v: &Value, rows: usize, cols: usize, at: &str) -> Result<ComplexMatrix> {
    let list = v.as_array().ok_or_else(|| perr(at, "expected a list of rows"))?;
    if list.len() != rows {
        return Err(perr(at, format!("expected {rows} rows, found {}", list.len())));
    }
    let mut m = zeros(rows, cols);
    for (i, row) in list.iter().enumerate() {
        let at_i = format!("{at}[{i}]");
        let row = row.as_array().ok_or_else(|| perr(&at_i, "expected a row list"))?;
        if row.len() != cols {
            return Err(perr(&at_i, format!("expected {cols} entries, found {}", row.len())));
        }
        for (j, x) in row.iter().enumerate() {
            m[(i, j)] = parse_complex(x, &format!("{at_i}[{j}]"))?;
        }
    }
    Ok(m)
}

fn parse_seq(v: &Value, rows: usize, cols: usize, at: &str) -> Result<MatSeq> {
    let list = v.as_array().ok_or_else(|| perr(at, "expected a list of {\"j\", \"coeff\"} terms"))?;
    let mut seen = std::collections::BTreeSet::new();
    let mut terms = Vec::with_capacity(list.len());
    for (k, t) in list.iter().enumerate() {
        let at_k = format!("{at}[{k}]");
        let obj = as_object(t, &at_k)?;
        let j = field(obj, "j", &at_k)?.as_i64().ok_or_else(|| perr(format!("{at_k}.j"), "expected an integer"))?;
        if !seen.insert(j) {
            return Err(perr(format!("{at_k}.j"), format!("index {j} appears twice")));
        }
        terms.push((j, parse_matrix(field(obj, "coeff", &at_k)?, rows, cols, &format!("{at_k}.coeff"))?));
    }
    MatSeq::from_coeffs(rows, cols, terms)
}

fn parse_element(kind: InstanceKind, v: &Value, rows: usize, cols: usize, at: &str) -> Result<AnyElement> {
    Ok(match kind {
        InstanceKind::TriangularMatrix => AnyElement::Matrix(parse_matrix(v, rows, cols, at)?),
        InstanceKind::Sequence => AnyElement::Sequence(parse_seq(v, rows, cols, at)?),
    })
}

fn complex_value(z: C64) -> Value {
    // + 0.0 turns -0.0 into 0.0
    json!([z.re + 0.0, z.im + 0.0])
}

fn matrix_value(m: &ComplexMatrix) -> Value {
    Value::Array((0..m.nrows()).map(|i| Value::Array((0..m.ncols()).map(|j| complex_value(m[(i, j)])).collect())).collect())
}

fn seq_value(s: &MatSeq) -> Value {
    Value::Array(s.iter().map(|(j, m)| json!({ "j": j, "coeff": matrix_value(m) })).collect())
}

/// JSON form of an element (full precision; reading it back is exact).
pub fn element_value(e: &AnyElement) -> Value {
    match e {
        AnyElement::Matrix(m) => matrix_value(m),
        AnyElement::Sequence(s) => seq_value(s),
    }
}

fn dims(obj: &Map<String, Value>, kind: InstanceKind) -> Result<(usize, usize)> {
    let p = as_usize(field(obj, "p", "$")?, "$.p")?;
    let q = match obj.get("q") {
        Some(v) => as_usize(v, "$.q")?,
        None => p,
    };
    if p == 0 || q == 0 {
        return Err(perr("$.p", "dimensions must be at least 1"));
    }
    if kind == InstanceKind::TriangularMatrix && p != q {
        return Err(perr("$.q", format!("matrix instance needs p = q, found p = {p}, q = {q}")));
    }
    Ok((p, q))
}

fn seed_of(obj: &Map<String, Value>) -> Result<Option<u64>> {
    match obj.get("seed") {
        None | Some(Value::Null) => Ok(None),
        Some(v) => v.as_u64().map(Some).ok_or_else(|| perr("$.seed", "expected a nonnegative integer")),
    }
}

fn build_dataset<A: Algebra>(
    alg: A,
    parts: [A::Elem; 4],
) -> Result<DataSet<A>> {
    let [a, b, c, d] = parts;
    DataSet::new(alg, a, b, c, d).map_err(|e| match e {
        Error::NotInPart { what, part, residual } => {
            perr(format!("$.{what}"), format!("not in {part:?}: mass {residual:.3e} outside the allowed entries"))
        }
        other => other,
    })
}

/// Parse a data-set document. `source` names it in error locations.
pub fn parse_dataset(text: &str, source: &str) -> Result<DataSetFile> {
    let v = parse_json(text, source)?;
    let obj = as_object(&v, "$")?;
    check_format(obj, DATASET_FORMAT, "$")?;
    let kind = parse_kind(field(obj, "instance", "$")?, "$.instance")?;
    let (p, q) = dims(obj, kind)?;
    let shapes = [("alpha", p, p), ("beta", p, q), ("gamma", q, p), ("delta", q, q)];
    let mut parts = Vec::with_capacity(4);
    for (name, r, c) in shapes {
        let at = format!("$.{name}");
        parts.push(parse_element(kind, field(obj, name, "$")?, r, c, &at)?);
    }
    let data = match kind {
        InstanceKind::TriangularMatrix => {
            let els: Vec<ComplexMatrix> = parts.into_iter().map(|e| match e { AnyElement::Matrix(m) => m, _ => unreachable!() }).collect();
            let els: [ComplexMatrix; 4] = els.try_into().expect("four elements");
            AnyDataSet::Matrix(build_dataset(TriangularAlgebra::new(p)?, els)?)
        }
        InstanceKind::Sequence => {
            let els: Vec<MatSeq> = parts.into_iter().map(|e| match e { AnyElement::Sequence(s) => s, _ => unreachable!() }).collect();
            let els: [MatSeq; 4] = els.try_into().expect("four elements");
            AnyDataSet::Sequence(build_dataset(SequenceAlgebra::new(p, q)?, els)?)
        }
    };
    Ok(DataSetFile { data, seed: seed_of(obj)? })
}

/// Parse an element document; `g` must lie in B+.
pub fn parse_element_file(text: &str, source: &str) -> Result<ElementFile> {
    let v = parse_json(text, source)?;
    let obj = as_object(&v, "$")?;
    check_format(obj, ELEMENT_FORMAT, "$")?;
    let kind = parse_kind(field(obj, "instance", "$")?, "$.instance")?;
    let (p, q) = dims(obj, kind)?;
    let name = obj.get("name").and_then(Value::as_str).unwrap_or("g").to_string();
    let element = parse_element(kind, field(obj, "value", "$")?, p, q, "$.value")?;
    let residual = match &element {
        AnyElement::Matrix(m) => TriangularAlgebra::new(p)?.part_residual(m, crate::PartTag::BPlus)?,
        AnyElement::Sequence(s) => SequenceAlgebra::new(p, q)?.part_residual(s, crate::PartTag::BPlus)?,
    };
    if residual != 0.0 {
        return Err(perr("$.value", format!("not in BPlus: mass {residual:.3e} outside the allowed entries")));
    }
    Ok(ElementFile { kind, p, q, name, element, seed: seed_of(obj)? })
}

pub fn read_dataset(path: &Path) -> Result<DataSetFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_dataset(&text, &path.display().to_string())
}

pub fn read_element(path: &Path) -> Result<ElementFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_element_file(&text, &path.display().to_string())
}

fn dataset_doc<A: Algebra>(data: &DataSet<A>, seed: Option<u64>, wrap: impl Fn(&A::Elem) -> AnyElement) -> Value {
    let alg = data.alg();
    json!({
        "format": DATASET_FORMAT,
        "instance": kind_name(alg.kind()),
        "p": alg.p(),
        "q": alg.q(),
        "seed": seed,
        "alpha": element_value(&wrap(data.alpha())),
        "beta": element_value(&wrap(data.beta())),
        "gamma": element_value(&wrap(data.gamma())),
        "delta": element_value(&wrap(data.delta())),
    })
}

pub fn dataset_value(data: &AnyDataSet, seed: Option<u64>) -> Value {
    match data {
        AnyDataSet::Matrix(d) => dataset_doc(d, seed, |m| AnyElement::Matrix(m.clone())),
        AnyDataSet::Sequence(d) => dataset_doc(d, seed, |s| AnyElement::Sequence(s.clone())),
    }
}

pub fn element_file_value(kind: InstanceKind, p: usize, q: usize, name: &str, e: &AnyElement, seed: Option<u64>) -> Value {
    json!({
        "format": ELEMENT_FORMAT,
        "instance": kind_name(kind),
        "p": p,
        "q": q,
        "name": name,
        "seed": seed,
        "value": element_value(e),
    })
}

fn compact(v: &Value) -> String {
    match v {
        Value::Array(xs) => format!("[{}]", xs.iter().map(compact).collect::<Vec<_>>().join(", ")),
        Value::Object(m) => {
            format!("{{{}}}", m.iter().map(|(k, x)| format!("{}: {}", Value::from(k.as_str()), compact(x))).collect::<Vec<_>>().join(", "))
        }
        other => other.to_string(),
    }
}

fn layout(v: &Value, indent: usize, out: &mut String) {
    let c = compact(v);
    if indent + c.len() <= 100 || !(v.is_array() || v.is_object()) {
        out.push_str(&c);
        return;
    }
    let pad = "  ".repeat(indent / 2 + 1);
    let (open, close, items): (char, char, Vec<(Option<&str>, &Value)>) = match v {
        Value::Array(xs) => ('[', ']', xs.iter().map(|x| (None, x)).collect()),
        Value::Object(m) => ('{', '}', m.iter().map(|(k, x)| (Some(k.as_str()), x)).collect()),
        _ => unreachable!(),
    };
    out.push(open);
    out.push('\n');
    for (i, (k, x)) in items.iter().enumerate() {
        out.push_str(&pad);
        if let Some(k) = k {
            out.push_str(&Value::from(*k).to_string());
            out.push_str(": ");
        }
        layout(x, pad.len(), out);
        if i + 1 < items.len() {
            out.push(',');
        }
        out.push('\n');
    }
    out.push_str(&"  ".repeat(indent / 2));
    out.push(close);
}

/// JSON text with short arrays (matrix rows) kept on one line, plus a trailing newline.
pub fn to_text(v: &Value) -> String {
    let mut s = String::new();
    layout(v, 0, &mut s);
    s.push('\n');
    s
}

/// x rounded to 15 significant digits (non-finite values become null).
pub fn round15(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let r: f64 = format!("{x:.14e}").parse().expect("formatted float parses");
    json!(r)
}

pub fn round15_opt(x: Option<f64>) -> Value {
    x.map_or(Value::Null, round15)
}

/// Conversion between an instance's elements and [`AnyElement`].
pub trait ElementCodec: Algebra {
    fn wrap(e: &Self::Elem) -> AnyElement;
    fn unwrap(e: &AnyElement) -> Option<Self::Elem>;
}

impl ElementCodec for TriangularAlgebra {
    fn wrap(e: &ComplexMatrix) -> AnyElement {
        AnyElement::Matrix(e.clone())
    }

    fn unwrap(e: &AnyElement) -> Option<ComplexMatrix> {
        match e {
            AnyElement::Matrix(m) => Some(m.clone()),
            AnyElement::Sequence(_) => None,
        }
    }
}

impl ElementCodec for SequenceAlgebra {
    fn wrap(e: &MatSeq) -> AnyElement {
        AnyElement::Sequence(e.clone())
    }

    fn unwrap(e: &AnyElement) -> Option<MatSeq> {
        match e {
            AnyElement::Sequence(s) => Some(s.clone()),
            AnyElement::Matrix(_) => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_entries() {
        assert_eq!(parse_complex(&json!([1.5, -2.0]), "x").unwrap(), C64::new(1.5, -2.0));
        assert_eq!(parse_complex(&json!(3), "x").unwrap(), C64::new(3.0, 0.0));
        assert!(parse_complex(&json!([1, 2, 3]), "x").is_err());
    }

    #[test]
    fn location_of_bad_entry() {
        let text = r#"{"format":"eginv-dataset/1","instance":"matrix","p":2,
            "alpha":[[[1,0],[0,0]],[[0,0],[1,0]]],
            "beta":[[[0,0],[0,0]],[[0,0],"x"]],
            "gamma":[[[0,0],[0,0]],[[0,0],[0,0]]],
            "delta":[[[1,0],[0,0]],[[0,0],[1,0]]]}"#;
        match parse_dataset(text, "t") {
            Err(Error::Parse { location, .. }) => assert_eq!(location, "$.beta[1][1]"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn membership_error_names_field() {
        let text = r#"{"format":"eginv-dataset/1","instance":"matrix","p":2,
            "alpha":[[[1,0],[0,0]],[[0.5,0],[1,0]]],
            "beta":[[[0,0],[0,0]],[[0,0],[0,0]]],
            "gamma":[[[0,0],[0,0]],[[0,0],[0,0]]],
            "delta":[[[1,0],[0,0]],[[0,0],[1,0]]]}"#;
        match parse_dataset(text, "t") {
            Err(Error::Parse { location, .. }) => assert_eq!(location, "$.alpha"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn syntax_error_has_line() {
        match parse_dataset("{\n  \"format\": ,\n}", "f.json") {
            Err(Error::Parse { location, .. }) => assert!(location.starts_with("f.json:2:"), "{location}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rounding_keeps_fifteen_digits() {
        assert_eq!(round15(0.1 + 0.2), json!(0.3));
        assert_eq!(round15(f64::NAN), Value::Null);
    }
}
