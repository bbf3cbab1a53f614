//! JSON descriptors for norms, families and matrices.
//!
//! Exact scalars are written as `"p/q"` strings. On input, strings, integers and decimal
//! literals are all read as exact rationals.
//!
//! ```json
//! {"space": {"dim": 2, "kind": "linf"}, "vectors": [["1", "0"], ["-1/2", 1]]}
//! ```
//!
//! Norm kinds: `lp` (with `"p"`, a number or `"inf"`), `linf`, `slab` (`"functionals"`,
//! optional `"cap": {"direction", "bound"}`), `l1sub` (`"basis"`), `polytope`
//! (`"generators"`). Families in `l_p` with `p` other than 1 and infinity use binary64
//! unless `"arithmetic": "exact"` is given.

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::family::VectorFamily;
use crate::matrixform::CollapseMatrix;
use crate::scalar::{format_rational, parse_rational, Rational, Scalar};
use crate::spaces::{Cap, NormKind, NormSpace};

fn perr(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

pub fn parse_rational_value(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s).ok_or_else(|| perr(format!("not a rational: {s:?}"))),
        Value::Number(n) => parse_rational(&n.to_string()).ok_or_else(|| perr(format!("not a rational: {n}"))),
        other => Err(perr(format!("expected a number or \"p/q\" string, got {other}"))),
    }
}

pub fn parse_scalar<S: Scalar>(v: &Value) -> Result<S> {
    Ok(S::from_rational(&parse_rational_value(v)?))
}

pub fn scalar_json<S: Scalar>(x: &S) -> Value {
    if S::EXACT {
        Value::String(format_rational(&x.to_rational()))
    } else {
        json!(x.to_f64())
    }
}

pub fn vector_json<S: Scalar>(v: &[S]) -> Value {
    Value::Array(v.iter().map(scalar_json).collect())
}

pub fn vectors_json<S: Scalar>(vs: &[Vec<S>]) -> Value {
    Value::Array(vs.iter().map(|v| vector_json(v)).collect())
}

fn parse_vector<S: Scalar>(v: &Value) -> Result<Vec<S>> {
    v.as_array().ok_or_else(|| perr("expected an array of scalars"))?.iter().map(parse_scalar).collect()
}

fn parse_vectors<S: Scalar>(v: &Value) -> Result<Vec<Vec<S>>> {
    v.as_array().ok_or_else(|| perr("expected an array of vectors"))?.iter().map(parse_vector).collect()
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| perr(format!("missing field {key:?}")))
}

fn parse_p(v: &Value) -> Result<f64> {
    match v {
        Value::String(s) if s == "inf" || s == "infinity" => Ok(f64::INFINITY),
        Value::Number(n) => n.as_f64().ok_or_else(|| perr("bad p")),
        Value::String(s) => s.parse().map_err(|_| perr(format!("bad p: {s:?}"))),
        _ => Err(perr("bad p")),
    }
}

/// Whether a norm descriptor needs binary64 arithmetic.
pub fn needs_float(norm: &Value) -> bool {
    let kind = norm.get("kind").and_then(Value::as_str);
    if kind != Some("lp") {
        return false;
    }
    match norm.get("p").map(parse_p) {
        Some(Ok(p)) => p != 1.0 && p != f64::INFINITY,
        _ => false,
    }
}

pub fn parse_norm<S: Scalar>(v: &Value) -> Result<NormSpace<S>> {
    let obj = v.as_object().ok_or_else(|| perr("norm must be an object"))?;
    let kind = field(obj, "kind")?.as_str().ok_or_else(|| perr("kind must be a string"))?;
    let dim = || -> Result<usize> {
        field(obj, "dim")?.as_u64().map(|d| d as usize).ok_or_else(|| perr("dim must be a non-negative integer"))
    };
    match kind {
        "lp" => NormSpace::lp(dim()?, parse_p(field(obj, "p")?)?),
        "linf" => Ok(NormSpace::linf(dim()?)),
        "l1" => Ok(NormSpace::l1(dim()?)),
        "l2" => Ok(NormSpace::l2(dim()?)),
        "slab" => {
            let cap = match obj.get("cap") {
                None | Some(Value::Null) => None,
                Some(c) => Some(Cap {
                    direction: parse_vector(c.get("direction").ok_or_else(|| perr("cap needs direction"))?)?,
                    bound: parse_scalar(c.get("bound").ok_or_else(|| perr("cap needs bound"))?)?,
                }),
            };
            NormSpace::slab(dim()?, parse_vectors(field(obj, "functionals")?)?, cap)
        }
        "l1sub" => NormSpace::l1_subspace(parse_vectors(field(obj, "basis")?)?),
        "polytope" => {
            let gens: Vec<Vec<S>> = parse_vectors(field(obj, "generators")?)?;
            let d = match obj.get("dim") {
                Some(_) => dim()?,
                None => gens.first().map_or(0, Vec::len),
            };
            NormSpace::polytope(d, gens)
        }
        other => Err(perr(format!("unknown norm kind {other:?}"))),
    }
}

pub fn norm_json<S: Scalar>(space: &NormSpace<S>) -> Value {
    match &space.kind {
        NormKind::Lp { p } if p.is_infinite() => json!({"dim": space.dim, "kind": "linf"}),
        NormKind::Lp { p } => json!({"dim": space.dim, "kind": "lp", "p": p}),
        NormKind::Slab { functionals, cap } => {
            let mut v = json!({"dim": space.dim, "kind": "slab", "functionals": vectors_json(functionals)});
            if let Some(c) = cap {
                v["cap"] = json!({"direction": vector_json(&c.direction), "bound": scalar_json(&c.bound)});
            }
            v
        }
        NormKind::L1Subspace { basis } => json!({"dim": space.dim, "kind": "l1sub", "basis": vectors_json(basis)}),
        NormKind::Polytope { generators } => {
            json!({"dim": space.dim, "kind": "polytope", "generators": vectors_json(generators)})
        }
    }
}

pub fn family_json<S: Scalar>(fam: &VectorFamily<S>) -> Value {
    json!({
        "space": norm_json(&fam.space),
        "arithmetic": if S::EXACT { "exact" } else { "float" },
        "vectors": vectors_json(&fam.vectors),
    })
}

pub fn parse_family<S: Scalar>(v: &Value) -> Result<VectorFamily<S>> {
    let space = parse_norm(v.get("space").ok_or_else(|| perr("missing field \"space\""))?)?;
    let vectors = parse_vectors(v.get("vectors").ok_or_else(|| perr("missing field \"vectors\""))?)?;
    VectorFamily::new(space, vectors)
}

/// A family in whichever backend its norm calls for.
#[derive(Debug, Clone, PartialEq)]
pub enum DynFamily {
    Exact(VectorFamily<Rational>),
    Float(VectorFamily<f64>),
}

impl DynFamily {
    pub fn from_json(v: &Value) -> Result<Self> {
        let space = v.get("space").ok_or_else(|| perr("missing field \"space\""))?;
        let float = match v.get("arithmetic").and_then(Value::as_str) {
            Some("exact") => false,
            Some("float") => true,
            Some(other) => return Err(perr(format!("unknown arithmetic {other:?}"))),
            None => needs_float(space),
        };
        Ok(if float { DynFamily::Float(parse_family(v)?) } else { DynFamily::Exact(parse_family(v)?) })
    }

    pub fn to_json(&self) -> Value {
        match self {
            DynFamily::Exact(f) => family_json(f),
            DynFamily::Float(f) => family_json(f),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            DynFamily::Exact(f) => f.len(),
            DynFamily::Float(f) => f.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn matrix_json<S: Scalar>(a: &CollapseMatrix<S>) -> Value {
    json!({"m": a.m, "entries": vectors_json(&a.entries)})
}

pub fn parse_matrix<S: Scalar>(v: &Value) -> Result<CollapseMatrix<S>> {
    let entries = parse_vectors(v.get("entries").ok_or_else(|| perr("missing field \"entries\""))?)?;
    if let Some(m) = v.get("m").and_then(Value::as_u64) {
        if m as usize != entries.len() {
            return Err(Error::DimensionMismatch { expected: m as usize, got: entries.len() });
        }
    }
    CollapseMatrix::new(entries)
}
