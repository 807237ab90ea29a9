//! Stateless operations shared by `POST /ops/{op}` and the sessions API.

use qpmut_core::explorer::{self, AcyclicSearch, ClusterType, Dedup, Limits, MutationClass, SearchOutcome};
use qpmut_core::graded::{algebra_from_cut, qp_from_algebra};
use qpmut_core::path_algebra::{build_preprojective, truncated_quotient_dimension};
use qpmut_core::quiver::fz_mutate;
use qpmut_core::surface::quiver_from_triangulation;
use qpmut_core::{wire, Error, GradedQp, PresentedAlgebra, Qp, Quiver, Result, Side, Triangulation, Vertex};
use serde::Deserialize;
use serde_json::{json, Value};

pub const OPS: &[&str] = &[
    "normalize",
    "mutate",
    "reduce",
    "jacobian-dim",
    "rigid",
    "from-algebra",
    "to-algebra",
    "preprojective",
    "surface-quiver",
    "flip",
    "mutation-class",
    "acyclic",
    "cluster-type",
    "search-equiv",
];

/// Body of `POST /ops/{op}`: the input document plus the operation's flags.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpRequest {
    pub input: Value,
    #[serde(default)]
    pub target: Option<Value>,
    #[serde(default)]
    pub kind: Option<String>,
    #[serde(default)]
    pub vertex: Option<Vertex>,
    #[serde(default)]
    pub arc: Option<String>,
    #[serde(default)]
    pub bound: Option<usize>,
    #[serde(default)]
    pub depth: Option<usize>,
    #[serde(default)]
    pub max_quivers: Option<usize>,
    #[serde(default)]
    pub max_depth: Option<usize>,
    #[serde(default)]
    pub labeled: bool,
    #[serde(default)]
    pub truncation: Option<usize>,
}

/// Any document a session can hold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum State {
    Quiver(Quiver),
    Qp(Qp),
    Graded(GradedQp),
    Triangulation(Triangulation),
}

impl State {
    /// Triangulations are recognised by `triangles`, graded QPs by arrow
    /// degrees, QPs by a potential.
    pub fn from_json(v: &Value) -> Result<State> {
        if wire::is_triangulation(v) {
            Ok(State::Triangulation(wire::triangulation_from_json(v)?))
        } else if wire::has_degrees(v) {
            Ok(State::Graded(wire::graded_from_json(v)?))
        } else if v.get("potential").is_some() {
            Ok(State::Qp(wire::qp_from_json(v)?))
        } else {
            Ok(State::Quiver(wire::quiver_from_json(v)?))
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            State::Quiver(q) => wire::quiver_to_json(q),
            State::Qp(qp) => wire::qp_to_json(qp),
            State::Graded(g) => wire::graded_to_json(g),
            State::Triangulation(t) => wire::triangulation_to_json(t),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            State::Quiver(_) => "quiver",
            State::Qp(_) => "qp",
            State::Graded(_) => "graded",
            State::Triangulation(_) => "triangulation",
        }
    }

    /// The QP a state stands for: quivers carry the zero potential,
    /// triangulations their associated QP.
    pub fn as_qp(&self, n: usize) -> Result<Qp> {
        Ok(match self {
            State::Quiver(q) => Qp::new(q.clone(), qpmut_core::Potential::zero(n))?,
            State::Qp(qp) => qp.clone(),
            State::Graded(g) => g.qp().clone(),
            State::Triangulation(t) => quiver_from_triangulation(t)?,
        })
    }

    /// Mutation kinds that apply to this state, with the vertices (or arcs)
    /// where each is defined.
    pub fn legal_moves(&self) -> Value {
        let mutable = |q: &Quiver| -> Vec<Vertex> {
            q.vertices().iter().copied().filter(|&v| !q.has_loop_at(v) && !q.has_two_cycle_at(v)).collect()
        };
        match self {
            State::Quiver(q) => {
                let all = if q.has_loops_or_two_cycles() { vec![] } else { q.vertices().to_vec() };
                json!({"fz": all})
            }
            State::Qp(qp) => json!({"dwz": mutable(&qp.quiver)}),
            State::Graded(g) => {
                let v = g.mutable_vertices();
                json!({"left": v, "right": v})
            }
            State::Triangulation(t) => {
                let arcs: Vec<&str> = t.arcs().filter(|a| t.flip(a).is_ok()).collect();
                json!({"flip": arcs})
            }
        }
    }

    /// Applies one mutation move. `kind` defaults to the natural move of the
    /// state: fz, dwz, left or flip.
    pub fn mutate(&self, kind: Option<&str>, vertex: Option<Vertex>, arc: Option<&str>, n: usize) -> Result<State> {
        let v = vertex;
        let vertex = || v.ok_or_else(|| Error::Parse("missing vertex".into()));
        match (self, kind) {
            (State::Quiver(q), None | Some("fz")) => Ok(State::Quiver(fz_mutate(q, vertex()?)?)),
            (State::Qp(qp), Some("fz")) => Ok(State::Quiver(fz_mutate(&qp.quiver, vertex()?)?)),
            (State::Quiver(q), Some("dwz")) => Ok(State::Qp(Qp::trivial(q.clone()).dwz_mutate(vertex()?, n)?)),
            (State::Qp(qp), None | Some("dwz")) => Ok(State::Qp(qp.dwz_mutate(vertex()?, n)?)),
            (State::Graded(g), None | Some("left")) => Ok(State::Graded(g.mutate(Side::Left, vertex()?, n)?)),
            (State::Graded(g), Some("right")) => Ok(State::Graded(g.mutate(Side::Right, vertex()?, n)?)),
            (State::Quiver(_) | State::Qp(_), Some(side @ ("left" | "right"))) => {
                let g = GradedQp::ungraded(self.as_qp(n)?)?;
                let side = if side == "left" { Side::Left } else { Side::Right };
                Ok(State::Graded(g.mutate(side, vertex()?, n)?))
            }
            (State::Graded(g), Some("dwz")) => Ok(State::Qp(g.qp().dwz_mutate(vertex()?, n)?)),
            (State::Triangulation(t), None | Some("flip")) => {
                let arc = match (arc, v) {
                    (Some(a), _) => a.to_string(),
                    (None, Some(v)) => v.to_string(),
                    (None, None) => return Err(Error::Parse("missing arc".into())),
                };
                Ok(State::Triangulation(t.flip(&arc)?))
            }
            (s, Some(k)) => Err(Error::Parse(format!("mutation kind {k:?} does not apply to a {}", s.kind()))),
        }
    }
}

fn limits(req: &OpRequest) -> Limits {
    let d = Limits::default();
    Limits { max_quivers: req.max_quivers.unwrap_or(d.max_quivers), max_depth: req.max_depth.unwrap_or(d.max_depth) }
}

fn bound(req: &OpRequest) -> Result<usize> {
    req.bound.ok_or_else(|| Error::Parse("missing bound".into()))
}

/// Sets the truncation order of a quiver or QP document that has none, or
/// of any such document when `force` is set.
pub fn with_truncation(v: &Value, n: usize, force: bool) -> Value {
    let mut v = v.clone();
    if wire::is_triangulation(&v) {
        return v;
    }
    if let Some(obj) = v.as_object_mut() {
        if force || !obj.contains_key("truncation") {
            obj.insert("truncation".into(), n.into());
        }
    }
    v
}

fn graded(v: &Value) -> Result<GradedQp> {
    match State::from_json(v)? {
        State::Graded(g) => Ok(g),
        State::Quiver(q) => GradedQp::ungraded(Qp::trivial(q)),
        State::Qp(qp) => GradedQp::ungraded(qp),
        State::Triangulation(_) => Err(Error::Parse("expected a graded QP, got a triangulation".into())),
    }
}

fn quiver_only(v: &Value) -> Result<Quiver> {
    match State::from_json(v)? {
        State::Quiver(q) => Ok(q),
        State::Qp(qp) => Ok(qp.quiver),
        State::Graded(g) => Ok(g.quiver().clone()),
        State::Triangulation(t) => Ok(quiver_from_triangulation(&t)?.quiver),
    }
}

fn steps_to_json(steps: &[(Side, Vertex)]) -> Value {
    Value::Array(steps.iter().map(|(s, v)| json!({"side": s.to_string(), "vertex": v})).collect())
}

pub fn class_to_json(class: &MutationClass) -> Value {
    json!({
        "size": class.len(),
        "truncated": class.truncated,
        "members": class.members.iter().map(|m| json!({"key": m.key, "quiver": wire::quiver_to_json(&m.quiver), "depth": m.depth})).collect::<Vec<_>>(),
        "edges": class.edges.iter().map(|&(a, v, b)| json!([a, v, b])).collect::<Vec<_>>(),
    })
}

fn class_from_json(v: &Value) -> Result<MutationClass> {
    let lines = v.as_array().ok_or_else(|| Error::Parse("resume expects an array of class members".into()))?;
    let text: String = lines.iter().map(|l| wire::to_normalized_string(l) + "\n").collect();
    MutationClass::read_ndjson(text.as_bytes())
}

/// Runs `op` on `req`; `n` is the truncation order used when the request
/// does not set one.
pub fn run(op: &str, req: &OpRequest, n: usize) -> Result<Value> {
    let n = req.truncation.unwrap_or(n);
    let input = &with_truncation(&req.input, n, req.truncation.is_some());
    match op {
        "normalize" => Ok(State::from_json(input)?.to_json()),
        "mutate" => {
            let state = State::from_json(input)?;
            Ok(state.mutate(req.kind.as_deref(), req.vertex, req.arc.as_deref(), n)?.to_json())
        }
        "reduce" => {
            let qp = State::from_json(input)?.as_qp(n)?;
            Ok(wire::qp_to_json(&qp.reduce(n)?.0))
        }
        "jacobian-dim" => {
            let l = bound(req)?;
            let dim = if input.get("relations").is_some() {
                let alg = wire::algebra_from_json(input)?;
                truncated_quotient_dimension(&alg.quiver, &alg.relations, l)?
            } else {
                State::from_json(input)?.as_qp(n)?.jacobi_finite(l)?
            };
            Ok(wire::dimension_to_json(&dim))
        }
        "rigid" => Ok(wire::rigidity_to_json(&State::from_json(input)?.as_qp(n)?.is_rigid(bound(req)?)?)),
        "from-algebra" => Ok(wire::graded_to_json(&qp_from_algebra(&wire::algebra_from_json(input)?)?)),
        "to-algebra" => Ok(wire::algebra_to_json(&algebra_from_cut(&graded(input)?)?)),
        "preprojective" => {
            let (q, relations) = build_preprojective(&quiver_only(input)?)?;
            Ok(wire::algebra_to_json(&PresentedAlgebra::new(q, relations)?))
        }
        "surface-quiver" => Ok(wire::qp_to_json(&quiver_from_triangulation(&wire::triangulation_from_json(input)?)?)),
        "flip" => {
            let t: Triangulation = wire::triangulation_from_json(input)?;
            let arc = req.arc.as_deref().ok_or_else(|| Error::Parse("missing arc".into()))?;
            Ok(wire::triangulation_to_json(&t.flip(arc)?))
        }
        "mutation-class" => {
            let dedup = if req.labeled { Dedup::Labeled } else { Dedup::Isomorphism };
            let class = match input.get("resume") {
                Some(lines) => explorer::resume_mutation_class(class_from_json(lines)?, limits(req), dedup)?,
                None => explorer::mutation_class(&quiver_only(input)?, limits(req), dedup)?,
            };
            Ok(class_to_json(&class))
        }
        "acyclic" => Ok(match explorer::is_mutation_acyclic(&quiver_only(input)?, limits(req))? {
            AcyclicSearch::Found { quiver, path } => json!({"found": true, "quiver": wire::quiver_to_json(&quiver), "path": path}),
            AcyclicSearch::NotFoundWithinBudget { explored } => json!({"found": false, "explored": explored}),
        }),
        "cluster-type" => {
            let qp = State::from_json(input)?.as_qp(n)?;
            Ok(match explorer::acyclic_cluster_type(&qp, limits(req), bound(req)?)? {
                ClusterType::Certified { quiver, path } => json!({"certified": true, "quiver": wire::quiver_to_json(&quiver), "path": path}),
                ClusterType::NotCertified { reason } => json!({"certified": false, "reason": reason}),
            })
        }
        "search-equiv" => {
            let target = req.target.as_ref().ok_or_else(|| Error::Parse("missing target".into()))?;
            let depth = req.depth.unwrap_or(4);
            Ok(match explorer::graded_equivalence_search(&graded(input)?, &graded(target)?, depth, n)? {
                SearchOutcome::Found(steps) => json!({"found": true, "sequence": steps_to_json(&steps)}),
                SearchOutcome::NotFoundWithinBudget { depth, explored } => json!({"found": false, "depth": depth, "explored": explored}),
            })
        }
        _ => Err(Error::Parse(format!("unknown operation {op:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn req(input: Value) -> OpRequest {
        OpRequest { input, ..Default::default() }
    }

    #[test]
    fn state_detection() {
        let q = json!({"vertices": [1, 2], "arrows": [{"id": "a", "source": 1, "target": 2}]});
        assert_eq!(State::from_json(&q).unwrap().kind(), "quiver");
        let mut qp = q.clone();
        qp["potential"] = json!([]);
        assert_eq!(State::from_json(&qp).unwrap().kind(), "qp");
        let g = json!({"vertices": [1, 2], "arrows": [{"id": "a", "source": 1, "target": 2, "degree": 0}]});
        assert_eq!(State::from_json(&g).unwrap().kind(), "graded");
    }

    #[test]
    fn fz_on_a3() {
        let q = json!({"vertices": [1, 2, 3], "arrows": [{"id": "a", "source": 1, "target": 2}, {"id": "b", "source": 2, "target": 3}]});
        let out = run("mutate", &OpRequest { vertex: Some(2), ..req(q) }, 12).unwrap();
        let edges: Vec<(u64, u64)> =
            out["arrows"].as_array().unwrap().iter().map(|a| (a["source"].as_u64().unwrap(), a["target"].as_u64().unwrap())).collect();
        assert_eq!(edges, vec![(1, 3), (2, 1), (3, 2)]);
    }

    #[test]
    fn errors_are_typed() {
        assert!(matches!(run("nope", &req(json!({})), 12), Err(Error::Parse(_))));
        let two = json!({"vertices": [1, 2], "arrows": [{"id": "a", "source": 1, "target": 2}, {"id": "b", "source": 2, "target": 1}]});
        assert_eq!(run("mutate", &OpRequest { vertex: Some(1), ..req(two) }, 12).unwrap_err(), Error::LoopOrTwoCyclePresent);
    }
}
