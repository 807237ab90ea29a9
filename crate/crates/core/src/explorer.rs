//! Breadth-first searches over mutation: mutation classes, acyclic members,
//! acyclic cluster type, and graded-mutation equivalence.

use std::collections::{HashMap, VecDeque};
use std::io::{BufRead, Write};

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::canonical::canonical_form;
use crate::error::{Error, ErrorClass, Result};
use crate::graded::{graded_iso, GradedQp, Side};
use crate::qp::{Qp, Rigidity};
use crate::quiver::{fz_mutate, Quiver, Vertex};
use crate::wire;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_quivers: usize,
    pub max_depth: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_quivers: 50_000, max_depth: 32 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Dedup {
    /// One member per isomorphism class.
    #[default]
    Isomorphism,
    /// Vertex labels are significant.
    Labeled,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassMember {
    pub key: String,
    pub quiver: Quiver,
    pub depth: usize,
}

#[derive(Debug, Clone, Default)]
pub struct MutationClass {
    pub members: Vec<ClassMember>,
    /// `(from, vertex, to)` member indices.
    pub edges: Vec<(usize, Vertex, usize)>,
    /// Some limit was hit before the class closed.
    pub truncated: bool,
}

fn labeled_key(q: &Quiver) -> String {
    let mut e: Vec<(Vertex, Vertex)> = q.arrows().iter().map(|a| (a.source, a.target)).collect();
    e.sort_unstable();
    format!("{:?}|{:?}", q.vertices(), e)
}

fn key_of(q: &Quiver, dedup: Dedup) -> String {
    match dedup {
        Dedup::Isomorphism => canonical_form(q),
        Dedup::Labeled => labeled_key(q),
    }
}

impl MutationClass {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn index_of(&self, key: &str) -> Option<usize> {
        self.members.iter().position(|m| m.key == key)
    }

    /// One JSON object per member: key, quiver, depth and outgoing edges.
    pub fn write_ndjson<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let mut out: Vec<Vec<Value>> = vec![Vec::new(); self.members.len()];
        for &(from, v, to) in &self.edges {
            out[from].push(json!({"vertex": v, "to": self.members[to].key}));
        }
        for (m, edges) in self.members.iter().zip(out) {
            let line = json!({"key": m.key, "quiver": wire::quiver_to_json(&m.quiver), "depth": m.depth, "edges": edges});
            writeln!(w, "{}", wire::to_normalized_string(&line))?;
        }
        Ok(())
    }

    pub fn read_ndjson<R: BufRead>(r: R) -> Result<MutationClass> {
        let mut class = MutationClass::default();
        let mut pending: Vec<(usize, Vertex, String)> = Vec::new();
        for line in r.lines() {
            let line = line.map_err(|e| Error::Parse(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let v = wire::parse(&line)?;
            let key = v["key"].as_str().ok_or_else(|| Error::Parse("member without key".into()))?.to_string();
            let quiver = wire::quiver_from_json(&v["quiver"])?;
            let depth = v["depth"].as_u64().unwrap_or(0) as usize;
            let idx = class.members.len();
            for e in v["edges"].as_array().map(Vec::as_slice).unwrap_or_default() {
                let vertex = e["vertex"].as_u64().ok_or_else(|| Error::Parse("edge without vertex".into()))? as Vertex;
                let to = e["to"].as_str().ok_or_else(|| Error::Parse("edge without target".into()))?;
                pending.push((idx, vertex, to.to_string()));
            }
            class.members.push(ClassMember { key, quiver, depth });
        }
        let index: HashMap<&str, usize> = class.members.iter().enumerate().map(|(k, m)| (m.key.as_str(), k)).collect();
        let mut edges = Vec::new();
        for (from, v, to) in pending {
            let to = *index.get(to.as_str()).ok_or_else(|| Error::Parse(format!("edge to unknown member {to}")))?;
            edges.push((from, v, to));
        }
        class.edges = edges;
        Ok(class)
    }
}

/// Closure of `q` under FZ mutation at every vertex, breadth first.
pub fn mutation_class(q: &Quiver, limits: Limits, dedup: Dedup) -> Result<MutationClass> {
    if q.has_loops_or_two_cycles() {
        return Err(Error::LoopOrTwoCyclePresent);
    }
    let start = q.renumbered().0;
    let class = MutationClass {
        members: vec![ClassMember { key: key_of(&start, dedup), quiver: start, depth: 0 }],
        ..Default::default()
    };
    extend_class(class, limits, dedup)
}

/// Continues an interrupted enumeration: members with fewer outgoing edges
/// than vertices are expanded again.
pub fn resume_mutation_class(class: MutationClass, limits: Limits, dedup: Dedup) -> Result<MutationClass> {
    extend_class(class, limits, dedup)
}

fn extend_class(mut class: MutationClass, limits: Limits, dedup: Dedup) -> Result<MutationClass> {
    let mut index: HashMap<String, usize> = class.members.iter().enumerate().map(|(k, m)| (m.key.clone(), k)).collect();
    let mut out_degree = vec![0usize; class.members.len()];
    for &(from, _, _) in &class.edges {
        out_degree[from] += 1;
    }
    let mut frontier: Vec<usize> =
        (0..class.members.len()).filter(|&k| out_degree[k] < class.members[k].quiver.num_vertices()).collect();
    class.truncated = false;
    while !frontier.is_empty() {
        // expand the whole layer in parallel, merge in a fixed order
        let expanded: Vec<Vec<(Vertex, Quiver, String)>> = frontier
            .par_iter()
            .map(|&k| {
                let q = &class.members[k].quiver;
                q.vertices()
                    .iter()
                    .map(|&v| {
                        let m = fz_mutate(q, v).expect("class members have no loops or 2-cycles").renumbered().0;
                        let key = key_of(&m, dedup);
                        (v, m, key)
                    })
                    .collect()
            })
            .collect();
        let mut next = Vec::new();
        if class.edges.iter().any(|e| out_degree.get(e.0).is_some_and(|&d| d > 0)) {
            let redo: std::collections::HashSet<usize> = frontier.iter().copied().collect();
            class.edges.retain(|e| !redo.contains(&e.0));
            out_degree.clear();
        }
        for (&k, children) in frontier.iter().zip(expanded) {
            let depth = class.members[k].depth + 1;
            for (v, m, key) in children {
                let to = match index.get(&key) {
                    Some(&j) => j,
                    None if depth > limits.max_depth || class.members.len() >= limits.max_quivers => {
                        class.truncated = true;
                        continue;
                    }
                    None => {
                        let j = class.members.len();
                        index.insert(key.clone(), j);
                        class.members.push(ClassMember { key, quiver: m, depth });
                        next.push(j);
                        j
                    }
                };
                class.edges.push((k, v, to));
            }
        }
        frontier = next;
    }
    class.edges.sort_unstable();
    Ok(class)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AcyclicSearch {
    /// An acyclic quiver and the vertices mutated to reach it.
    Found { quiver: Quiver, path: Vec<Vertex> },
    NotFoundWithinBudget { explored: usize },
}

/// Breadth-first search for an acyclic quiver in the mutation class.
pub fn is_mutation_acyclic(q: &Quiver, limits: Limits) -> Result<AcyclicSearch> {
    if q.has_loops_or_two_cycles() {
        return Err(Error::LoopOrTwoCyclePresent);
    }
    let mut seen: HashMap<String, ()> = HashMap::from([(canonical_form(q), ())]);
    let mut queue = VecDeque::from([(q.clone(), Vec::new())]);
    let mut explored = 0;
    while let Some((cur, path)) = queue.pop_front() {
        explored += 1;
        if cur.is_acyclic() {
            return Ok(AcyclicSearch::Found { quiver: cur, path });
        }
        if path.len() >= limits.max_depth {
            continue;
        }
        for &v in cur.vertices() {
            let m = fz_mutate(&cur, v)?;
            let key = canonical_form(&m);
            if seen.contains_key(&key) || seen.len() >= limits.max_quivers {
                continue;
            }
            seen.insert(key, ());
            let mut p = path.clone();
            p.push(v);
            queue.push_back((m, p));
        }
    }
    Ok(AcyclicSearch::NotFoundWithinBudget { explored })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClusterType {
    Certified { quiver: Quiver, path: Vec<Vertex> },
    NotCertified { reason: String },
}

/// Acyclic cluster type: the quiver is mutation acyclic and the potential
/// is rigid, the latter certified at `bound`.
pub fn acyclic_cluster_type(qp: &Qp, limits: Limits, bound: usize) -> Result<ClusterType> {
    let not = |reason: String| Ok(ClusterType::NotCertified { reason });
    match qp.is_rigid(bound)? {
        Rigidity::CertifiedRigid => {}
        Rigidity::NotRigidWitness(c) => return not(format!("potential is not rigid: cycle {c} is not cyclically equivalent to the Jacobian ideal")),
        Rigidity::UnknownAtBound { bound } => return not(format!("rigidity could not be certified at bound {bound}")),
    }
    if qp.quiver.has_loops_or_two_cycles() {
        return not("quiver has loops or 2-cycles".into());
    }
    match is_mutation_acyclic(&qp.quiver, limits)? {
        AcyclicSearch::Found { quiver, path } => Ok(ClusterType::Certified { quiver, path }),
        AcyclicSearch::NotFoundWithinBudget { explored } => not(format!("no acyclic quiver among {explored} explored mutation classes")),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(Vec<(Side, Vertex)>),
    NotFoundWithinBudget { depth: usize, explored: usize },
}

/// Applies a sequence of graded mutations.
pub fn replay(g: &GradedQp, steps: &[(Side, Vertex)], n: usize) -> Result<GradedQp> {
    steps.iter().try_fold(g.clone(), |cur, &(side, v)| cur.mutate(side, v, n))
}

struct Frontier {
    seen: HashMap<String, (GradedQp, Vec<(Side, Vertex)>)>,
    layer: Vec<String>,
    depth: usize,
}

impl Frontier {
    fn new(g: &GradedQp) -> Self {
        let key = g.canonical().key;
        Frontier { seen: HashMap::from([(key.clone(), (g.clone(), Vec::new()))]), layer: vec![key], depth: 0 }
    }

    fn expand(&mut self, n: usize) -> Result<Vec<String>> {
        let layer = std::mem::take(&mut self.layer);
        let states: Vec<(GradedQp, Vec<(Side, Vertex)>)> = layer.iter().map(|k| self.seen[k].clone()).collect();
        let children: Vec<Vec<(String, GradedQp, Vec<(Side, Vertex)>)>> = states
            .par_iter()
            .map(|(g, path)| {
                let mut out = Vec::new();
                for v in g.mutable_vertices() {
                    for side in [Side::Left, Side::Right] {
                        match g.mutate(side, v, n) {
                            Ok(m) => {
                                let mut p = path.clone();
                                p.push((side, v));
                                out.push((m.canonical().key, m, p));
                            }
                            Err(e) if e.class() == ErrorClass::Precondition && !matches!(e, Error::HomogeneityViolation(_)) => {}
                            Err(e) => return Err(e),
                        }
                    }
                }
                Ok(out)
            })
            .collect::<Result<_>>()?;
        let mut fresh = Vec::new();
        for (key, m, p) in children.into_iter().flatten() {
            if !self.seen.contains_key(&key) {
                self.seen.insert(key.clone(), (m, p));
                self.layer.push(key.clone());
                fresh.push(key);
            }
        }
        self.depth += 1;
        Ok(fresh)
    }
}

/// Bidirectional breadth-first search for a sequence of left and right
/// graded mutations taking `g1` to a graded QP isomorphic to `g2`. Every
/// returned sequence has been replayed and checked.
pub fn graded_equivalence_search(g1: &GradedQp, g2: &GradedQp, max_depth: usize, n: usize) -> Result<SearchOutcome> {
    let mut fwd = Frontier::new(g1);
    let mut bwd = Frontier::new(g2);
    let try_meet = |fwd: &Frontier, bwd: &Frontier, keys: &[String]| -> Result<Option<Vec<(Side, Vertex)>>> {
        for key in keys {
            let (Some((f, fp)), Some((b, bp))) = (fwd.seen.get(key), bwd.seen.get(key)) else { continue };
            let phi_inv = b.canonical().vertex_map_to(&f.canonical());
            let mut steps = fp.clone();
            steps.extend(bp.iter().rev().map(|&(side, v)| (side.inverse(), phi_inv[&v])));
            match replay(g1, &steps, n) {
                Ok(end) if graded_iso(&end, g2) => return Ok(Some(steps)),
                _ => {}
            }
        }
        Ok(None)
    };
    let k0 = fwd.layer.clone();
    if let Some(s) = try_meet(&fwd, &bwd, &k0)? {
        return Ok(SearchOutcome::Found(s));
    }
    while fwd.depth + bwd.depth < max_depth {
        let grow_fwd = fwd.depth <= bwd.depth;
        let fresh = if grow_fwd { fwd.expand(n)? } else { bwd.expand(n)? };
        if let Some(s) = try_meet(&fwd, &bwd, &fresh)? {
            return Ok(SearchOutcome::Found(s));
        }
        if fresh.is_empty() {
            // that side is exhausted, nothing new can meet
            break;
        }
    }
    Ok(SearchOutcome::NotFoundWithinBudget { depth: fwd.depth + bwd.depth, explored: fwd.seen.len() + bwd.seen.len() })
}
