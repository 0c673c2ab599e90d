//! JSON documents: rings, elements, morphisms, modules, glue and coherence
//! data, plus the report envelope written by the command-line tool.
//!
//! Every top-level document carries `"schema_version": 1`. Unknown fields
//! are rejected. Rationals are strings `"p/q"` (or `"p"`).

use std::collections::{BTreeMap, BTreeSet};

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::glueqcoh::{FiniteModule, GlueDatum, QcohDatum};
use crate::latspace::PointSet;
use crate::poly::UPoly;
use crate::rings::{CanonicalMap, HomRule, Matrix, RingDescriptor, RingElement, RingHom};
use crate::scalar::{fmt_q, parse_q_at, schema, Field, Q};
use crate::sheafspec::{ncspec, NCSpecSpace};
use crate::skewproj::{GradedModulePresentation, SkewLaurentPoly, SkewSpec};

pub const SCHEMA_VERSION: u64 = 1;

/// Parses JSON text, mapping syntax errors to their line and column.
pub fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::ParseError { line: e.line(), column: e.column(), message: e.to_string() })
}

/// Parses a top-level document and checks its schema version.
pub fn parse_document(text: &str) -> Result<Value> {
    let v = parse_json(text)?;
    let obj = v.as_object().ok_or_else(|| schema("$", "a document must be an object"))?;
    match obj.get("schema_version") {
        None => Err(schema("$.schema_version", "missing")),
        Some(Value::Number(n)) if n.as_u64() == Some(SCHEMA_VERSION) => Ok(v),
        Some(other) => Err(schema("$.schema_version", format!("unsupported version {other}"))),
    }
}

/// An object whose keys are all in `allowed`.
fn object<'a>(v: &'a Value, path: &str, allowed: &[&str]) -> Result<&'a Map<String, Value>> {
    let obj = v.as_object().ok_or_else(|| schema(path, "expected an object"))?;
    if let Some(k) = obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(schema(&format!("{path}.{k}"), "unknown field"));
    }
    Ok(obj)
}

fn field<'a>(obj: &'a Map<String, Value>, path: &str, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| schema(&format!("{path}.{key}"), "missing"))
}

fn uint(v: &Value, path: &str) -> Result<u64> {
    v.as_u64().ok_or_else(|| schema(path, "expected a nonnegative integer"))
}

fn int(v: &Value, path: &str) -> Result<i64> {
    v.as_i64().ok_or_else(|| schema(path, "expected an integer"))
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| schema(path, "expected an array"))
}

fn string<'a>(v: &'a Value, path: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| schema(path, "expected a string"))
}

fn rational(v: &Value, path: &str) -> Result<Q> {
    parse_q_at(path, string(v, path)?)
}

fn field_tag(v: &Value, path: &str) -> Result<Field> {
    let t = string(v, path)?;
    Field::from_tag(t).ok_or_else(|| schema(path, format!("unknown base field {t:?}; use \"q\" or \"f<p>\"")))
}

const RING_KEYS: &[&str] = &["schema_version", "kind", "n", "factors", "base", "size", "dims", "inverted", "nvars", "lambda"];

pub fn ring_from_json(v: &Value, path: &str) -> Result<RingDescriptor> {
    let obj = object(v, path, RING_KEYS)?;
    let kind = string(field(obj, path, "kind")?, &format!("{path}.kind"))?;
    let p = |k: &str| format!("{path}.{k}");
    let r = match kind {
        "zero" => RingDescriptor::Zero,
        "modular" => RingDescriptor::modular(uint(field(obj, path, "n")?, &p("n"))?),
        "product" => {
            let fs = array(field(obj, path, "factors")?, &p("factors"))?;
            RingDescriptor::product(fs.iter().enumerate().map(|(i, f)| ring_from_json(f, &format!("{path}.factors[{i}]"))).collect::<Result<_>>()?)?
        }
        "matrix" => RingDescriptor::matrix(field_tag(field(obj, path, "base")?, &p("base"))?, uint(field(obj, path, "size")?, &p("size"))? as usize),
        "semisimple" => {
            let dims = array(field(obj, path, "dims")?, &p("dims"))?.iter().enumerate().map(|(i, d)| uint(d, &format!("{path}.dims[{i}]")).map(|x| x as usize)).collect::<Result<_>>()?;
            RingDescriptor::semisimple(field_tag(field(obj, path, "base")?, &p("base"))?, dims)
        }
        "poly" => {
            let inverted = match obj.get("inverted") {
                None => UPoly::one(),
                Some(c) => UPoly::new(array(c, &p("inverted"))?.iter().enumerate().map(|(i, x)| rational(x, &format!("{path}.inverted[{i}]"))).collect::<Result<_>>()?),
            };
            RingDescriptor::Poly { inverted }
        }
        "skew_laurent" => {
            let nvars = uint(field(obj, path, "nvars")?, &p("nvars"))? as usize;
            let lambda = array(field(obj, path, "lambda")?, &p("lambda"))?
                .iter()
                .enumerate()
                .map(|(i, row)| {
                    let rp = format!("{path}.lambda[{i}]");
                    array(row, &rp)?.iter().enumerate().map(|(j, x)| rational(x, &format!("{rp}[{j}]"))).collect::<Result<Vec<Q>>>()
                })
                .collect::<Result<_>>()?;
            let inverted: BTreeSet<usize> = match obj.get("inverted") {
                None => BTreeSet::new(),
                Some(xs) => array(xs, &p("inverted"))?.iter().enumerate().map(|(i, x)| uint(x, &format!("{path}.inverted[{i}]")).map(|x| x as usize)).collect::<Result<_>>()?,
            };
            let spec = SkewSpec::new(nvars, lambda, inverted).map_err(|e| match e {
                Error::SchemaViolation { path: sub, message } => schema(&format!("{path}.{sub}"), message),
                other => other,
            })?;
            RingDescriptor::SkewLaurent(spec)
        }
        other => return Err(schema(&p("kind"), format!("unknown ring kind {other:?}"))),
    };
    let allowed: &[&str] = match kind {
        "zero" => &["kind"],
        "modular" => &["kind", "n"],
        "product" => &["kind", "factors"],
        "matrix" => &["kind", "base", "size"],
        "semisimple" => &["kind", "base", "dims"],
        "poly" => &["kind", "inverted"],
        _ => &["kind", "nvars", "lambda", "inverted"],
    };
    if let Some(k) = obj.keys().find(|k| k.as_str() != "schema_version" && !allowed.contains(&k.as_str())) {
        return Err(schema(&format!("{path}.{k}"), format!("not a field of a {kind} ring")));
    }
    r.validate()?;
    Ok(r)
}

pub fn ring_to_json(r: &RingDescriptor) -> Value {
    match r {
        RingDescriptor::Zero => json!({"kind": "zero"}),
        RingDescriptor::Modular { n } => json!({"kind": "modular", "n": n}),
        RingDescriptor::Product { factors } => json!({"kind": "product", "factors": factors.iter().map(ring_to_json).collect::<Vec<_>>()}),
        RingDescriptor::Matrix { base, size } => json!({"kind": "matrix", "base": base.tag(), "size": size}),
        RingDescriptor::Semisimple { base, dims } => json!({"kind": "semisimple", "base": base.tag(), "dims": dims}),
        RingDescriptor::Poly { inverted } => json!({"kind": "poly", "inverted": inverted.coeffs().iter().map(fmt_q).collect::<Vec<_>>()}),
        RingDescriptor::SkewLaurent(s) => json!({
            "kind": "skew_laurent",
            "nvars": s.nvars,
            "lambda": s.lambda.iter().map(|row| row.iter().map(fmt_q).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "inverted": s.inverted.iter().collect::<Vec<_>>(),
        }),
    }
}

fn matrix_from_json(v: &Value, path: &str) -> Result<Matrix> {
    let rows = array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let rp = format!("{path}[{i}]");
            array(row, &rp)?.iter().enumerate().map(|(j, x)| rational(x, &format!("{rp}[{j}]"))).collect::<Result<Vec<Q>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    if rows.iter().any(|r| r.len() != rows.len()) {
        return Err(schema(path, "a matrix must be square"));
    }
    Ok(Matrix::from_rows(rows))
}

fn matrix_to_json(m: &Matrix) -> Value {
    Value::Array((0..m.n).map(|i| Value::Array((0..m.n).map(|j| json!(fmt_q(m.get(i, j)))).collect())).collect())
}

pub fn skew_poly_from_json(nvars: usize, v: &Value, path: &str) -> Result<SkewLaurentPoly> {
    let mut p = SkewLaurentPoly::zero(nvars);
    for (i, t) in array(v, path)?.iter().enumerate() {
        let tp = format!("{path}[{i}]");
        let obj = object(t, &tp, &["exp", "coef"])?;
        let exp: Vec<i64> = array(field(obj, &tp, "exp")?, &format!("{tp}.exp"))?.iter().enumerate().map(|(k, x)| int(x, &format!("{tp}.exp[{k}]"))).collect::<Result<_>>()?;
        if exp.len() != nvars {
            return Err(schema(&format!("{tp}.exp"), format!("expected {nvars} exponents")));
        }
        let coef = rational(field(obj, &tp, "coef")?, &format!("{tp}.coef"))?;
        p = p.add(&SkewLaurentPoly::monomial(exp, coef))?;
    }
    Ok(p)
}

pub fn skew_poly_to_json(p: &SkewLaurentPoly) -> Value {
    Value::Array(p.terms.iter().map(|(e, c)| json!({"exp": e, "coef": fmt_q(c)})).collect())
}

pub fn element_from_json(r: &RingDescriptor, v: &Value, path: &str) -> Result<RingElement> {
    let x = match r {
        RingDescriptor::Zero => {
            uint(v, path)?;
            RingElement::Zero
        }
        RingDescriptor::Modular { .. } => RingElement::Residue(uint(v, path)?),
        RingDescriptor::Product { factors } => {
            let xs = array(v, path)?;
            if xs.len() != factors.len() {
                return Err(schema(path, format!("expected {} components", factors.len())));
            }
            RingElement::Tuple(factors.iter().zip(xs).enumerate().map(|(i, (f, x))| element_from_json(f, x, &format!("{path}[{i}]"))).collect::<Result<_>>()?)
        }
        RingDescriptor::Matrix { .. } => RingElement::Matrix(matrix_from_json(v, path)?),
        RingDescriptor::Semisimple { .. } => RingElement::Blocks(array(v, path)?.iter().enumerate().map(|(i, b)| matrix_from_json(b, &format!("{path}[{i}]"))).collect::<Result<_>>()?),
        RingDescriptor::Poly { .. } => {
            let obj = object(v, path, &["num", "power"])?;
            let num = UPoly::new(array(field(obj, path, "num")?, &format!("{path}.num"))?.iter().enumerate().map(|(i, c)| rational(c, &format!("{path}.num[{i}]"))).collect::<Result<_>>()?);
            let power = obj.get("power").map(|p| uint(p, &format!("{path}.power"))).transpose()?.unwrap_or(0) as u32;
            RingElement::Fraction { num, power }
        }
        RingDescriptor::SkewLaurent(s) => RingElement::Skew(skew_poly_from_json(s.nvars, v, path)?),
    };
    if !r.owns(&x) {
        return Err(schema(path, format!("not an element of {r} in normal form")));
    }
    Ok(x)
}

pub fn element_to_json(x: &RingElement) -> Value {
    match x {
        RingElement::Zero => json!(0),
        RingElement::Residue(r) => json!(r),
        RingElement::Tuple(xs) => Value::Array(xs.iter().map(element_to_json).collect()),
        RingElement::Matrix(m) => matrix_to_json(m),
        RingElement::Blocks(bs) => Value::Array(bs.iter().map(matrix_to_json).collect()),
        RingElement::Fraction { num, power } => json!({"num": num.coeffs().iter().map(fmt_q).collect::<Vec<_>>(), "power": power}),
        RingElement::Skew(p) => skew_poly_to_json(p),
    }
}

pub fn subset_from_json(r: &RingDescriptor, v: &Value, path: &str) -> Result<Vec<RingElement>> {
    array(v, path)?.iter().enumerate().map(|(i, x)| element_from_json(r, x, &format!("{path}[{i}]"))).collect()
}

/// `{"schema_version": 1, "kind": …}` as a ring.
pub fn parse_ring(text: &str) -> Result<RingDescriptor> {
    ring_from_json(&parse_document(text)?, "$")
}

pub fn hom_from_json(v: &Value, path: &str) -> Result<RingHom> {
    let obj = object(v, path, &["schema_version", "source", "target", "rule"])?;
    let source = ring_from_json(field(obj, path, "source")?, &format!("{path}.source"))?;
    let target = ring_from_json(field(obj, path, "target")?, &format!("{path}.target"))?;
    let rp = format!("{path}.rule");
    let rule_v = field(obj, path, "rule")?;
    let rule = object(rule_v, &rp, &["kind", "index", "pairs", "images"])?;
    let kind = string(field(rule, &rp, "kind")?, &format!("{rp}.kind"))?;
    let rule = match kind {
        "identity" => HomRule::Canonical(CanonicalMap::Identity),
        "to_zero" => HomRule::Canonical(CanonicalMap::ToZero),
        "quotient" => HomRule::Canonical(CanonicalMap::Quotient),
        "diagonal" => HomRule::Canonical(CanonicalMap::Diagonal),
        "inclusion" => HomRule::Canonical(CanonicalMap::Inclusion),
        "projection" => HomRule::Canonical(CanonicalMap::Projection(uint(field(rule, &rp, "index")?, &format!("{rp}.index"))? as usize)),
        "table" => {
            let pairs = array(field(rule, &rp, "pairs")?, &format!("{rp}.pairs"))?
                .iter()
                .enumerate()
                .map(|(i, pr)| {
                    let pp = format!("{rp}.pairs[{i}]");
                    match array(pr, &pp)?.as_slice() {
                        [a, b] => Ok((element_from_json(&source, a, &format!("{pp}[0]"))?, element_from_json(&target, b, &format!("{pp}[1]"))?)),
                        _ => Err(schema(&pp, "expected [source element, target element]")),
                    }
                })
                .collect::<Result<_>>()?;
            HomRule::Table(pairs)
        }
        "generators" => HomRule::Generators(subset_from_json(&target, field(rule, &rp, "images")?, &format!("{rp}.images"))?),
        other => return Err(schema(&format!("{rp}.kind"), format!("unknown rule {other:?}"))),
    };
    Ok(RingHom::new(source, target, rule))
}

pub fn hom_to_json(h: &RingHom) -> Result<Value> {
    let rule = match &h.rule {
        HomRule::Canonical(CanonicalMap::Identity) => json!({"kind": "identity"}),
        HomRule::Canonical(CanonicalMap::ToZero) => json!({"kind": "to_zero"}),
        HomRule::Canonical(CanonicalMap::Quotient) => json!({"kind": "quotient"}),
        HomRule::Canonical(CanonicalMap::Diagonal) => json!({"kind": "diagonal"}),
        HomRule::Canonical(CanonicalMap::Inclusion) => json!({"kind": "inclusion"}),
        HomRule::Canonical(CanonicalMap::Projection(i)) => json!({"kind": "projection", "index": i}),
        HomRule::Table(pairs) => json!({"kind": "table", "pairs": pairs.iter().map(|(a, b)| json!([element_to_json(a), element_to_json(b)])).collect::<Vec<_>>()}),
        HomRule::Generators(xs) => json!({"kind": "generators", "images": xs.iter().map(element_to_json).collect::<Vec<_>>()}),
        HomRule::Canonical(_) => return hom_to_json(&h.tabulate()?),
    };
    Ok(json!({"schema_version": SCHEMA_VERSION, "source": ring_to_json(&h.source), "target": ring_to_json(&h.target), "rule": rule}))
}

pub fn parse_hom(text: &str) -> Result<RingHom> {
    hom_from_json(&parse_document(text)?, "$")
}

/// A finite module over a finite ring: `R`, `0`, `R/R·relations`, or a
/// direct sum of those.
pub fn finite_module_from_json(r: &RingDescriptor, v: &Value, path: &str) -> Result<FiniteModule> {
    let obj = object(v, path, &["schema_version", "ring", "kind", "relations", "summands"])?;
    match string(field(obj, path, "kind")?, &format!("{path}.kind"))? {
        "regular" => FiniteModule::regular(r),
        "zero" => FiniteModule::zero_module(r),
        "cyclic" => FiniteModule::cyclic_quotient(r, &subset_from_json(r, field(obj, path, "relations")?, &format!("{path}.relations"))?),
        "sum" => {
            let parts = array(field(obj, path, "summands")?, &format!("{path}.summands"))?;
            let mut acc: Option<FiniteModule> = None;
            for (i, s) in parts.iter().enumerate() {
                let m = finite_module_from_json(r, s, &format!("{path}.summands[{i}]"))?;
                acc = Some(match acc {
                    None => m,
                    Some(a) => a.direct_sum(&m)?,
                });
            }
            acc.ok_or_else(|| schema(&format!("{path}.summands"), "empty direct sum"))
        }
        other => Err(schema(&format!("{path}.kind"), format!("unknown module kind {other:?}"))),
    }
}

/// `{"schema_version": 1, "ring": …, "kind": …}`.
pub fn parse_finite_module(text: &str) -> Result<(RingDescriptor, FiniteModule)> {
    let v = parse_document(text)?;
    let obj = object(&v, "$", &["schema_version", "ring", "kind", "relations", "summands"])?;
    let r = ring_from_json(field(obj, "$", "ring")?, "$.ring")?;
    let m = finite_module_from_json(&r, &v, "$")?;
    Ok((r, m))
}

/// `{"schema_version": 1, "degrees": [..], "relations": [[poly, ..], ..]}`
/// over a given skew polynomial ring.
pub fn parse_graded_module(spec: &SkewSpec, text: &str) -> Result<GradedModulePresentation> {
    let v = parse_document(text)?;
    let obj = object(&v, "$", &["schema_version", "degrees", "relations"])?;
    let degrees: Vec<i64> = array(field(obj, "$", "degrees")?, "$.degrees")?.iter().enumerate().map(|(i, d)| int(d, &format!("$.degrees[{i}]"))).collect::<Result<_>>()?;
    let relations = match obj.get("relations") {
        None => Vec::new(),
        Some(rs) => array(rs, "$.relations")?
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let rp = format!("$.relations[{i}]");
                array(row, &rp)?.iter().enumerate().map(|(k, p)| skew_poly_from_json(spec.nvars, p, &format!("{rp}[{k}]"))).collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?,
    };
    GradedModulePresentation::new(spec.clone(), degrees, relations)
}

pub fn graded_module_to_json(m: &GradedModulePresentation) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "degrees": m.degrees,
        "relations": m.relations.iter().map(|row| row.iter().map(skew_poly_to_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

fn point_by_label(space: &NCSpecSpace, label: &str, path: &str) -> Result<usize> {
    (0..space.len()).find(|&p| space.point_label(p) == label).ok_or_else(|| schema(path, format!("no point labelled {label:?}")))
}

/// Pieces are rings (their spectra are glued); each gluing lists the point
/// bijection `φ_{from,to}` by point labels, and its keys form `U_{from,to}`.
pub fn parse_glue(text: &str) -> Result<GlueDatum> {
    let v = parse_document(text)?;
    let obj = object(&v, "$", &["schema_version", "pieces", "gluings"])?;
    let pieces: Vec<NCSpecSpace> = array(field(obj, "$", "pieces")?, "$.pieces")?.iter().enumerate().map(|(i, p)| ncspec(&ring_from_json(p, &format!("$.pieces[{i}]"))?)).collect::<Result<_>>()?;
    let mut overlaps = BTreeMap::new();
    let mut isos = BTreeMap::new();
    if let Some(gs) = obj.get("gluings") {
        for (i, g) in array(gs, "$.gluings")?.iter().enumerate() {
            let gp = format!("$.gluings[{i}]");
            let go = object(g, &gp, &["from", "to", "map"])?;
            let (a, b) = (uint(field(go, &gp, "from")?, &format!("{gp}.from"))? as usize, uint(field(go, &gp, "to")?, &format!("{gp}.to"))? as usize);
            if a >= pieces.len() || b >= pieces.len() {
                return Err(schema(&gp, "piece index out of range"));
            }
            let map = field(go, &gp, "map")?.as_object().ok_or_else(|| schema(&format!("{gp}.map"), "expected an object"))?;
            let mut u: PointSet = 0;
            let mut table = BTreeMap::new();
            for (from, to) in map {
                let mp = format!("{gp}.map.{from}");
                let p = point_by_label(&pieces[a], from, &mp)?;
                let q = point_by_label(&pieces[b], string(to, &mp)?, &mp)?;
                u |= 1 << p;
                table.insert(p, q);
            }
            overlaps.insert((a, b), u);
            isos.insert((a, b), table);
        }
    }
    Ok(GlueDatum { pieces, overlaps, isos })
}

/// A module over a finite ring with a chart cover by subsets; optional
/// `scale` entries multiply `φ_{from,to}` by an integer.
pub fn parse_qcoh(text: &str) -> Result<QcohDatum> {
    let v = parse_document(text)?;
    let obj = object(&v, "$", &["schema_version", "ring", "module", "charts", "scale"])?;
    let r = ring_from_json(field(obj, "$", "ring")?, "$.ring")?;
    let m = finite_module_from_json(&r, field(obj, "$", "module")?, "$.module")?;
    let tilde = crate::glueqcoh::tilde_module(&r, &m)?;
    let charts = array(field(obj, "$", "charts")?, "$.charts")?
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let s = subset_from_json(&r, c, &format!("$.charts[{i}]"))?;
            tilde.space.lattice.cell_of(&s)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut d = QcohDatum::from_module(tilde, charts);
    if let Some(ss) = obj.get("scale") {
        for (i, s) in array(ss, "$.scale")?.iter().enumerate() {
            let sp = format!("$.scale[{i}]");
            let so = object(s, &sp, &["from", "to", "by"])?;
            let (a, b) = (uint(field(so, &sp, "from")?, &format!("{sp}.from"))? as usize, uint(field(so, &sp, "to")?, &format!("{sp}.to"))? as usize);
            let k = uint(field(so, &sp, "by")?, &format!("{sp}.by"))?;
            if a >= d.charts.len() || b >= d.charts.len() {
                return Err(schema(&sp, "chart index out of range"));
            }
            let piece = &d.tilde.pieces[d.overlap(&[a, b])];
            let scaled: Vec<usize> = (0..piece.len()).map(|x| (0..k).fold(piece.zero, |acc, _| piece.add(acc, x))).collect();
            d.phi.insert((a, b), scaled);
        }
    }
    Ok(d)
}

/// Outcome of one command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Inconclusive => "inconclusive",
        }
    }

    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

/// The envelope written for every command: status, payload, the bounds
/// used, and for failures the error or witness.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: String,
    pub status: Status,
    pub payload: Value,
    pub provenance: Value,
    pub error: Option<Value>,
}

impl Report {
    pub fn new(command: &str, status: Status, payload: Value, provenance: Value) -> Self {
        Report { command: command.into(), status, payload, provenance, error: None }
    }

    pub fn from_error(command: &str, e: &Error, provenance: Value) -> Self {
        let status = if matches!(e, Error::BoundInconclusive { .. } | Error::BoxTooSmall { .. } | Error::ClosureBoundExceeded { .. }) { Status::Inconclusive } else { Status::Fail };
        Report { command: command.into(), status, payload: Value::Null, provenance, error: Some(json!({"name": e.name(), "message": e.to_string()})) }
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "command": self.command,
            "status": self.status.as_str(),
            "payload": self.payload,
            "provenance": self.provenance,
        });
        if let Some(e) = &self.error {
            v["error"] = e.clone();
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::enumerate_elements;
    use crate::scalar::q;
    use proptest::prelude::*;

    fn doc(body: &str) -> String {
        format!("{{\"schema_version\": 1, {body}}}")
    }

    #[test]
    fn ring_documents() {
        assert_eq!(parse_ring(&doc("\"kind\": \"modular\", \"n\": 6")).unwrap(), RingDescriptor::modular(6));
        assert_eq!(parse_ring(&doc("\"kind\": \"semisimple\", \"base\": \"q\", \"dims\": [2, 3]")).unwrap(), RingDescriptor::semisimple(Field::Rationals, vec![2, 3]));
        let e = parse_ring(&doc("\"kind\": \"skew_laurent\", \"nvars\": 2, \"lambda\": [[\"1\", \"2\", \"2\"]]")).unwrap_err();
        assert!(matches!(e, Error::SchemaViolation { ref path, .. } if path == "$.lambda[0]"), "{e:?}");
        let e = parse_ring("{\"kind\": \"modular\", \"n\": 6}").unwrap_err();
        assert!(matches!(e, Error::SchemaViolation { ref path, .. } if path == "$.schema_version"));
        let e = parse_ring(&doc("\"kind\": \"modular\", \"n\": 6, \"colour\": 1")).unwrap_err();
        assert!(matches!(e, Error::SchemaViolation { ref path, .. } if path == "$.colour"));
        let e = parse_ring(&doc("\"kind\": \"modular\", \"n\": 6, \"size\": 1")).unwrap_err();
        assert!(matches!(e, Error::SchemaViolation { ref path, .. } if path == "$.size"));
        let e = parse_ring("{\n  \"schema_version\": 1,\n  \"kind\": \"modular\" \"n\": 6}").unwrap_err();
        assert!(matches!(e, Error::ParseError { line: 3, .. }), "{e:?}");
    }

    #[test]
    fn modules_glue_and_qcoh() {
        let (r, m) = parse_finite_module(&doc("\"ring\": {\"kind\": \"modular\", \"n\": 6}, \"kind\": \"cyclic\", \"relations\": [2]")).unwrap();
        assert_eq!((r, m.len()), (RingDescriptor::modular(6), 2));
        let g = parse_glue(&doc(
            "\"pieces\": [{\"kind\": \"matrix\", \"base\": \"f3\", \"size\": 2}, {\"kind\": \"matrix\", \"base\": \"f3\", \"size\": 2}],
             \"gluings\": [{\"from\": 0, \"to\": 1, \"map\": {\"↓R_{0}\": \"↓R_{0}\"}}, {\"from\": 1, \"to\": 0, \"map\": {\"↓R_{0}\": \"↓R_{0}\"}}]",
        ))
        .unwrap();
        assert_eq!(crate::glueqcoh::glue(&g).unwrap().len(), 3);
        let d = parse_qcoh(&doc("\"ring\": {\"kind\": \"modular\", \"n\": 6}, \"module\": {\"kind\": \"regular\"}, \"charts\": [[2], [3], [1]], \"scale\": [{\"from\": 0, \"to\": 2, \"by\": 2}]")).unwrap();
        assert!(!crate::glueqcoh::qcoh_cocycle_check(&d).unwrap().passed());
        let spec = SkewSpec::uniform(2, q(2));
        let m = parse_graded_module(&spec, &doc("\"degrees\": [0], \"relations\": [[[{\"exp\": [1, 0], \"coef\": \"1\"}]]]")).unwrap();
        assert_eq!(m.relations.len(), 1);
        assert_eq!(parse_graded_module(&spec, &graded_module_to_json(&m).to_string()).unwrap(), m);
    }

    #[test]
    fn report_envelope() {
        let r = Report::from_error("spec", &Error::BoundInconclusive { bound: 3 }, json!({"k": 3}));
        let v = r.to_json();
        assert_eq!(v["status"], "inconclusive");
        assert_eq!(v["error"]["name"], "BoundInconclusive");
    }

    fn small_ring() -> impl Strategy<Value = RingDescriptor> {
        let leaf = prop_oneof![
            (2u64..13).prop_map(RingDescriptor::modular),
            Just(RingDescriptor::Zero),
            (1usize..3).prop_map(|n| RingDescriptor::matrix(Field::Prime(2), n)),
            prop::collection::vec(1usize..3, 1..3).prop_map(|d| RingDescriptor::semisimple(Field::Prime(3), d)),
        ];
        prop_oneof![leaf.clone(), prop::collection::vec(leaf, 2..3).prop_map(|fs| RingDescriptor::product(fs).unwrap())]
    }

    proptest! {
        #[test]
        fn rings_and_elements_round_trip(r in small_ring(), pick in 0usize..1000) {
            let mut v = ring_to_json(&r);
            v["schema_version"] = json!(1);
            prop_assert_eq!(parse_ring(&v.to_string()).unwrap(), r.clone());
            if let Ok(xs) = enumerate_elements(&r) {
                let x = &xs[pick % xs.len()];
                prop_assert_eq!(&element_from_json(&r, &element_to_json(x), "$").unwrap(), x);
            }
        }

        #[test]
        fn skew_specs_round_trip(a in -5i64..6, b in 1i64..5, c in -4i64..5, inv in prop::collection::btree_set(0usize..3, 0..3)) {
            prop_assume!(a != 0 && c != 0);
            let spec = SkewSpec::new(3, vec![vec![crate::scalar::q_frac(a, b), q(c)], vec![q(b)]], inv).unwrap();
            let r = RingDescriptor::SkewLaurent(spec);
            let mut v = ring_to_json(&r);
            v["schema_version"] = json!(1);
            prop_assert_eq!(parse_ring(&v.to_string()).unwrap(), r);
        }
    }
}
