//! JSON formats shared by the command line and the HTTP service.
//!
//! Everything is rendered through `serde_json::Value`, whose object maps
//! keep keys sorted; together with sorted arrows and terms and rationals in
//! lowest terms this makes the output a normal form.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graded::{GradedQp, PresentedAlgebra};
use crate::path_algebra::{AlgebraElement, DimensionResult, Potential};
use crate::qp::{Qp, Rigidity};
use crate::quiver::{Arrow, ArrowId, Quiver, Vertex};
use crate::rational;
use crate::surface::{SideKind, Triangulation};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArrowJson {
    id: String,
    source: Vertex,
    target: Vertex,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    degree: Option<i64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TermJson {
    coeff: String,
    cycle: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PathTermJson {
    coeff: String,
    path: Vec<String>,
}

/// Union of the quiver, QP, graded QP and presented-algebra formats.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct Doc {
    vertices: Vec<Vertex>,
    arrows: Vec<ArrowJson>,
    #[serde(default)]
    potential: Option<Vec<TermJson>>,
    #[serde(default)]
    truncation: Option<usize>,
    #[serde(default)]
    truncated: bool,
    #[serde(default)]
    relations: Option<Vec<Vec<PathTermJson>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SideJson {
    id: String,
    kind: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TriangulationJson {
    sides: Vec<SideJson>,
    triangles: Vec<[String; 3]>,
}

fn parse_err(e: serde_json::Error) -> Error {
    Error::Parse(e.to_string())
}

fn doc(v: &Value) -> Result<Doc> {
    Doc::deserialize(v).map_err(parse_err)
}

fn build_quiver(d: &Doc) -> Result<Quiver> {
    Quiver::new(d.vertices.iter().copied(), d.arrows.iter().map(|a| Arrow::new(a.id.as_str(), a.source, a.target)))
}

fn ids(v: &[String]) -> Vec<ArrowId> {
    v.iter().map(|s| ArrowId::from(s.as_str())).collect()
}

fn build_potential(d: &Doc) -> Result<Potential> {
    let n = d.truncation.unwrap_or(crate::DEFAULT_TRUNCATION);
    let terms = d.potential.as_deref().unwrap_or_default();
    let parsed = terms.iter().map(|t| Ok((ids(&t.cycle), rational::parse(&t.coeff)?))).collect::<Result<Vec<_>>>()?;
    let mut w = Potential::new(parsed, n)?;
    if d.truncated {
        w.mark_truncated();
    }
    Ok(w)
}

pub fn quiver_from_json(v: &Value) -> Result<Quiver> {
    build_quiver(&doc(v)?)
}

pub fn quiver_to_json(q: &Quiver) -> Value {
    json!({
        "vertices": q.vertices(),
        "arrows": q.arrows().iter().map(|a| json!({"id": a.id.as_str(), "source": a.source, "target": a.target})).collect::<Vec<_>>(),
    })
}

pub fn potential_to_json(w: &Potential) -> Value {
    Value::Array(
        w.terms()
            .iter()
            .map(|(c, x)| json!({"coeff": rational::format(x), "cycle": c.arrows().iter().map(|a| a.as_str()).collect::<Vec<_>>()}))
            .collect(),
    )
}

pub fn qp_from_json(v: &Value) -> Result<Qp> {
    let d = doc(v)?;
    Qp::new(build_quiver(&d)?, build_potential(&d)?)
}

pub fn qp_to_json(qp: &Qp) -> Value {
    let mut v = quiver_to_json(&qp.quiver);
    v["potential"] = potential_to_json(&qp.potential);
    v["truncation"] = json!(qp.potential.truncation());
    if qp.potential.was_truncated() {
        v["truncated"] = json!(true);
    }
    v
}

/// Missing degrees default to 0.
pub fn graded_from_json(v: &Value) -> Result<GradedQp> {
    let d = doc(v)?;
    let qp = Qp::new(build_quiver(&d)?, build_potential(&d)?)?;
    let degrees: BTreeMap<ArrowId, i64> = d.arrows.iter().map(|a| (ArrowId::from(a.id.as_str()), a.degree.unwrap_or(0))).collect();
    GradedQp::new(qp, degrees)
}

pub fn graded_to_json(g: &GradedQp) -> Value {
    let mut v = qp_to_json(g.qp());
    if let Some(arrows) = v["arrows"].as_array_mut() {
        for a in arrows {
            let id = ArrowId::from(a["id"].as_str().unwrap());
            a["degree"] = json!(g.degree(&id).unwrap_or(0));
        }
    }
    v
}

/// True if any arrow carries a `degree` field.
pub fn has_degrees(v: &Value) -> bool {
    v.get("arrows").and_then(Value::as_array).is_some_and(|a| a.iter().any(|x| x.get("degree").is_some()))
}

pub fn algebra_from_json(v: &Value) -> Result<PresentedAlgebra> {
    let d = doc(v)?;
    let q = build_quiver(&d)?;
    let mut relations = Vec::new();
    for r in d.relations.as_deref().unwrap_or_default() {
        let terms = r.iter().map(|t| Ok((ids(&t.path), rational::parse(&t.coeff)?))).collect::<Result<Vec<_>>>()?;
        relations.push(AlgebraElement::from_paths(&q, terms)?);
    }
    PresentedAlgebra::new(q, relations)
}

pub fn element_to_json(e: &AlgebraElement) -> Value {
    Value::Array(
        e.terms()
            .iter()
            .map(|(p, c)| json!({"coeff": rational::format(c), "path": p.iter().map(|a| a.as_str()).collect::<Vec<_>>()}))
            .collect(),
    )
}

pub fn algebra_to_json(a: &PresentedAlgebra) -> Value {
    let mut v = quiver_to_json(&a.quiver);
    v["relations"] = Value::Array(a.relations.iter().map(element_to_json).collect());
    v
}

pub fn triangulation_from_json(v: &Value) -> Result<Triangulation> {
    let t = TriangulationJson::deserialize(v).map_err(parse_err)?;
    let sides = t
        .sides
        .into_iter()
        .map(|s| {
            let kind = match s.kind.as_str() {
                "arc" => SideKind::Arc,
                "boundary" => SideKind::Boundary,
                k => return Err(Error::Parse(format!("unknown side kind {k:?}"))),
            };
            Ok((s.id, kind))
        })
        .collect::<Result<Vec<_>>>()?;
    Triangulation::new(sides, t.triangles)
}

pub fn triangulation_to_json(t: &Triangulation) -> Value {
    let sides: Vec<Value> = t
        .sides()
        .iter()
        .map(|(id, k)| json!({"id": id, "kind": if *k == SideKind::Arc { "arc" } else { "boundary" }}))
        .collect();
    json!({"sides": sides, "triangles": t.triangles()})
}

pub fn is_triangulation(v: &Value) -> bool {
    v.get("triangles").is_some()
}

pub fn dimension_to_json(d: &DimensionResult) -> Value {
    json!({"finite": d.is_finite(), "dim": d.dim(), "bound": d.bound()})
}

pub fn rigidity_to_json(r: &Rigidity) -> Value {
    match r {
        Rigidity::CertifiedRigid => json!({"rigid": "certified"}),
        Rigidity::NotRigidWitness(c) => json!({
            "rigid": "not_rigid",
            "witness": c.arrows().iter().map(|a| a.as_str()).collect::<Vec<_>>(),
        }),
        Rigidity::UnknownAtBound { bound } => json!({"rigid": "unknown", "bound": bound}),
    }
}

/// Compact rendering with sorted keys.
pub fn to_normalized_string(v: &Value) -> String {
    serde_json::to_string(v).expect("values always serialize")
}

pub fn parse(s: &str) -> Result<Value> {
    serde_json::from_str(s).map_err(parse_err)
}
