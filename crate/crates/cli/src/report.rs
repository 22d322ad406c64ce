//! JSON encodings. Integers and rationals are strings, complex numbers are
//! `[re, im]` pairs of floats.

use gkzkit::curves::{CMatrix, MPoly, MonodromyInvariants};
use gkzkit::hyper::TruncatedSeries;
use gkzkit::matrix::{Int, Rat};
use gkzkit::polytope::Face;
use num_complex::Complex64;
use serde_json::{json, Map, Value};

pub fn int(v: &Int) -> Value {
    Value::String(v.to_string())
}

pub fn rat(v: &Rat) -> Value {
    Value::String(v.to_string())
}

pub fn ints(v: &[Int]) -> Value {
    Value::Array(v.iter().map(int).collect())
}

pub fn rats(v: &[Rat]) -> Value {
    Value::Array(v.iter().map(rat).collect())
}

pub fn points(v: &[Vec<Int>]) -> Value {
    Value::Array(v.iter().map(|p| ints(p)).collect())
}

pub fn face(f: &Face) -> Value {
    let supporting = match &f.supporting {
        Some((h, c)) => json!({ "normal": ints(h), "offset": int(c) }),
        None => Value::Null,
    };
    json!({ "columns": f.indices, "dim": f.dim, "supporting": supporting })
}

pub fn complex(z: &Complex64) -> Value {
    json!([z.re, z.im])
}

pub fn cmatrix(m: &CMatrix) -> Value {
    Value::Array(m.rows().iter().map(|r| Value::Array(r.iter().map(complex).collect())).collect())
}

pub fn invariants(inv: &MonodromyInvariants) -> Value {
    json!({
        "charpoly": inv.charpoly.iter().map(complex).collect::<Vec<_>>(),
        "det": complex(&inv.det),
        "trace": complex(&inv.trace),
    })
}

pub fn polynomial(p: &MPoly) -> Value {
    json!({
        "text": p.to_string(),
        "terms": p.terms().len(),
        "total_degree": p.total_degree(),
    })
}

pub fn series(s: &TruncatedSeries) -> Value {
    let terms: Vec<Value> = s
        .terms()
        .iter()
        .map(|(u, c)| json!({ "coefficient": rat(c), "exponent": rats(&s.exponent(u)), "offset": u }))
        .collect();
    json!({ "base": rats(s.base()), "order": s.order(), "terms": terms })
}

/// Builds a JSON object from `(key, value)` pairs; keys come out sorted.
pub fn object<I: IntoIterator<Item = (&'static str, Value)>>(pairs: I) -> Value {
    Value::Object(pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect::<Map<_, _>>())
}
