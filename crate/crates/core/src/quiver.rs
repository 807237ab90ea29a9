//! Quivers, exchange matrices and Fomin–Zelevinsky mutation.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};

pub type Vertex = u32;

/// Arrow identifier. Ordered "naturally": runs of digits compare by value
/// and sort before non-digit runs, so `2 < 10 < a < r2 < r10`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ArrowId(String);

impl ArrowId {
    pub fn new(s: impl Into<String>) -> Self {
        ArrowId(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

fn chunks(s: &str) -> impl Iterator<Item = &str> {
    let b = s.as_bytes();
    let mut i = 0;
    std::iter::from_fn(move || {
        if i >= b.len() {
            return None;
        }
        let digit = b[i].is_ascii_digit();
        let start = i;
        while i < b.len() && b[i].is_ascii_digit() == digit {
            i += 1;
        }
        Some(&s[start..i])
    })
}

fn cmp_chunk(x: &str, y: &str) -> Ordering {
    let dx = x.as_bytes()[0].is_ascii_digit();
    let dy = y.as_bytes()[0].is_ascii_digit();
    match (dx, dy) {
        (true, true) => {
            let (tx, ty) = (x.trim_start_matches('0'), y.trim_start_matches('0'));
            tx.len().cmp(&ty.len()).then_with(|| tx.cmp(ty))
        }
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        (false, false) => x.cmp(y),
    }
}

impl Ord for ArrowId {
    fn cmp(&self, other: &Self) -> Ordering {
        let (mut a, mut b) = (chunks(&self.0), chunks(&other.0));
        loop {
            match (a.next(), b.next()) {
                (None, None) => return self.0.cmp(&other.0),
                (None, Some(_)) => return Ordering::Less,
                (Some(_), None) => return Ordering::Greater,
                (Some(x), Some(y)) => match cmp_chunk(x, y) {
                    Ordering::Equal => {}
                    o => return o,
                },
            }
        }
    }
}

impl PartialOrd for ArrowId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ArrowId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for ArrowId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl From<&str> for ArrowId {
    fn from(s: &str) -> Self {
        ArrowId(s.to_string())
    }
}

impl From<String> for ArrowId {
    fn from(s: String) -> Self {
        ArrowId(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Arrow {
    pub id: ArrowId,
    pub source: Vertex,
    pub target: Vertex,
}

impl Arrow {
    pub fn new(id: impl Into<ArrowId>, source: Vertex, target: Vertex) -> Self {
        Arrow { id: id.into(), source, target }
    }

    pub fn is_loop(&self) -> bool {
        self.source == self.target
    }
}

/// Finite directed multigraph with named arrows.
///
/// Vertices are kept sorted and arrows are kept sorted by id, so two quivers
/// built from the same data compare equal regardless of input order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Quiver {
    vertices: Vec<Vertex>,
    arrows: Vec<Arrow>,
}

impl Quiver {
    pub fn new(vertices: impl IntoIterator<Item = Vertex>, arrows: impl IntoIterator<Item = Arrow>) -> Result<Self> {
        let vertices: BTreeSet<Vertex> = vertices.into_iter().collect();
        let mut arrows: Vec<Arrow> = arrows.into_iter().collect();
        arrows.sort_by(|a, b| a.id.cmp(&b.id));
        for w in arrows.windows(2) {
            if w[0].id == w[1].id {
                return Err(Error::InvalidQuiver(format!("duplicate arrow id {}", w[0].id)));
            }
        }
        for a in &arrows {
            for v in [a.source, a.target] {
                if !vertices.contains(&v) {
                    return Err(Error::InvalidQuiver(format!("arrow {} uses unknown vertex {v}", a.id)));
                }
            }
        }
        Ok(Quiver { vertices: vertices.into_iter().collect(), arrows })
    }

    /// Convenience constructor from `(id, source, target)` triples.
    pub fn from_triples<'a>(vertices: impl IntoIterator<Item = Vertex>, arrows: impl IntoIterator<Item = (&'a str, Vertex, Vertex)>) -> Result<Self> {
        Quiver::new(vertices, arrows.into_iter().map(|(id, s, t)| Arrow::new(id, s, t)))
    }

    /// Quiver with arrows `1, 2, ...` assigned in the order of `edges`.
    pub fn from_edges(vertices: impl IntoIterator<Item = Vertex>, edges: &[(Vertex, Vertex)]) -> Result<Self> {
        Quiver::new(
            vertices,
            edges.iter().enumerate().map(|(k, &(s, t))| Arrow::new((k + 1).to_string(), s, t)),
        )
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn has_vertex(&self, v: Vertex) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    pub fn vertex_index(&self, v: Vertex) -> Option<usize> {
        self.vertices.binary_search(&v).ok()
    }

    pub fn arrow(&self, id: &ArrowId) -> Option<&Arrow> {
        self.arrows.binary_search_by(|a| a.id.cmp(id)).ok().map(|k| &self.arrows[k])
    }

    pub fn arrow_index(&self, id: &ArrowId) -> Option<usize> {
        self.arrows.binary_search_by(|a| a.id.cmp(id)).ok()
    }

    pub fn incoming(&self, v: Vertex) -> impl Iterator<Item = &Arrow> {
        self.arrows.iter().filter(move |a| a.target == v)
    }

    pub fn outgoing(&self, v: Vertex) -> impl Iterator<Item = &Arrow> {
        self.arrows.iter().filter(move |a| a.source == v)
    }

    /// Number of arrows `j -> k`.
    pub fn multiplicity(&self, j: Vertex, k: Vertex) -> usize {
        self.arrows.iter().filter(|a| a.source == j && a.target == k).count()
    }

    pub fn has_loop_at(&self, v: Vertex) -> bool {
        self.arrows.iter().any(|a| a.source == v && a.target == v)
    }

    /// True if some arrow into `v` and some arrow out of `v` share their
    /// other endpoint.
    pub fn has_two_cycle_at(&self, v: Vertex) -> bool {
        let outs: BTreeSet<Vertex> = self.outgoing(v).filter(|a| !a.is_loop()).map(|a| a.target).collect();
        self.incoming(v).any(|a| !a.is_loop() && outs.contains(&a.source))
    }

    pub fn has_loops_or_two_cycles(&self) -> bool {
        let pairs: BTreeSet<(Vertex, Vertex)> = self.arrows.iter().map(|a| (a.source, a.target)).collect();
        pairs.iter().any(|&(s, t)| s == t || pairs.contains(&(t, s)))
    }

    pub fn is_source(&self, v: Vertex) -> bool {
        self.incoming(v).next().is_none()
    }

    pub fn is_sink(&self, v: Vertex) -> bool {
        self.outgoing(v).next().is_none()
    }

    /// True iff there is no directed cycle (loops count as cycles).
    pub fn is_acyclic(&self) -> bool {
        // Kahn's algorithm over the vertex indices.
        let n = self.vertices.len();
        let mut indeg = vec![0usize; n];
        let mut succ = vec![Vec::new(); n];
        for a in &self.arrows {
            let s = self.vertex_index(a.source).unwrap();
            let t = self.vertex_index(a.target).unwrap();
            indeg[t] += 1;
            succ[s].push(t);
        }
        let mut stack: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut seen = 0;
        while let Some(v) = stack.pop() {
            seen += 1;
            for &w in &succ[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    stack.push(w);
                }
            }
        }
        seen == n
    }

    /// Renames arrows to `1..=m`, ordered by `(source, target, old id)`.
    /// Returns the renamed quiver and the old-to-new id map.
    pub fn renumbered(&self) -> (Quiver, BTreeMap<ArrowId, ArrowId>) {
        let mut order: Vec<&Arrow> = self.arrows.iter().collect();
        order.sort_by(|a, b| (a.source, a.target, &a.id).cmp(&(b.source, b.target, &b.id)));
        let mut map = BTreeMap::new();
        let arrows: Vec<Arrow> = order
            .iter()
            .enumerate()
            .map(|(k, a)| {
                let id = ArrowId::new((k + 1).to_string());
                map.insert(a.id.clone(), id.clone());
                Arrow { id, source: a.source, target: a.target }
            })
            .collect();
        (Quiver::new(self.vertices.iter().copied(), arrows).expect("renaming keeps validity"), map)
    }

    /// Subquiver keeping only the listed arrows (all vertices are kept).
    pub fn with_arrows<F: Fn(&Arrow) -> bool>(&self, keep: F) -> Quiver {
        Quiver {
            vertices: self.vertices.clone(),
            arrows: self.arrows.iter().filter(|a| keep(a)).cloned().collect(),
        }
    }

    pub fn relabel_vertices(&self, map: &BTreeMap<Vertex, Vertex>) -> Result<Quiver> {
        let f = |v: Vertex| map.get(&v).copied().ok_or(Error::UnknownVertex(v));
        let vertices = self.vertices.iter().map(|&v| f(v)).collect::<Result<Vec<_>>>()?;
        let arrows = self
            .arrows
            .iter()
            .map(|a| Ok(Arrow { id: a.id.clone(), source: f(a.source)?, target: f(a.target)? }))
            .collect::<Result<Vec<_>>>()?;
        Quiver::new(vertices, arrows)
    }

    pub fn to_exchange_matrix(&self) -> Result<ExchangeMatrix> {
        if self.has_loops_or_two_cycles() {
            return Err(Error::LoopOrTwoCyclePresent);
        }
        let n = self.vertices.len();
        let mut b = vec![vec![0i64; n]; n];
        for a in &self.arrows {
            let s = self.vertex_index(a.source).unwrap();
            let t = self.vertex_index(a.target).unwrap();
            b[s][t] += 1;
            b[t][s] -= 1;
        }
        Ok(ExchangeMatrix { vertices: self.vertices.clone(), entries: b })
    }

    pub fn from_exchange_matrix(m: &ExchangeMatrix) -> Quiver {
        let mut edges = Vec::new();
        for (j, row) in m.entries.iter().enumerate() {
            for (k, &x) in row.iter().enumerate() {
                for _ in 0..x.max(0) {
                    edges.push((m.vertices[j], m.vertices[k]));
                }
            }
        }
        Quiver::from_edges(m.vertices.iter().copied(), &edges).expect("matrix encodes a valid quiver")
    }
}

impl fmt::Display for Quiver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, a) in self.arrows.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}:{}->{}", a.id, a.source, a.target)?;
        }
        write!(f, "}}")
    }
}

/// Skew-symmetric integer matrix `B[j][k] = #(j->k) - #(k->j)`, indexed by
/// the positions of `vertices`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExchangeMatrix {
    pub vertices: Vec<Vertex>,
    pub entries: Vec<Vec<i64>>,
}

impl ExchangeMatrix {
    pub fn new(vertices: Vec<Vertex>, entries: Vec<Vec<i64>>) -> Result<Self> {
        let n = vertices.len();
        if entries.len() != n || entries.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidQuiver("exchange matrix is not square".into()));
        }
        for j in 0..n {
            for k in 0..n {
                if entries[j][k] != -entries[k][j] {
                    return Err(Error::InvalidQuiver("exchange matrix is not skew-symmetric".into()));
                }
            }
        }
        Ok(ExchangeMatrix { vertices, entries })
    }

    pub fn size(&self) -> usize {
        self.vertices.len()
    }
}

/// Matrix mutation at position `i`:
/// `B'[j][k] = -B[j][k]` if `i` is `j` or `k`, else
/// `B[j][k] + sgn(B[j][i]) * max(0, B[j][i] * B[i][k])`.
pub fn fz_mutate_matrix(b: &ExchangeMatrix, i: usize) -> Result<ExchangeMatrix> {
    let n = b.size();
    if i >= n {
        return Err(Error::IndexOutOfRange(i));
    }
    let e = &b.entries;
    let mut out = vec![vec![0i64; n]; n];
    for j in 0..n {
        for k in 0..n {
            out[j][k] = if j == i || k == i {
                -e[j][k]
            } else {
                e[j][k] + e[j][i].signum() * (e[j][i] * e[i][k]).max(0)
            };
        }
    }
    Ok(ExchangeMatrix { vertices: b.vertices.clone(), entries: out })
}

/// Fomin–Zelevinsky mutation of a loop-free, 2-cycle-free quiver at `i`.
///
/// Composite arrows are provisionally named `[b|a]` and reversed ones
/// `star(a)`; 2-cycles are cancelled lowest id first, then every arrow is
/// renamed `1..=m` by `(source, target, provisional name)`.
pub fn fz_mutate(q: &Quiver, i: Vertex) -> Result<Quiver> {
    if !q.has_vertex(i) {
        return Err(Error::UnknownVertex(i));
    }
    if q.has_loops_or_two_cycles() {
        return Err(Error::LoopOrTwoCyclePresent);
    }
    let mut arrows: Vec<Arrow> = Vec::new();
    for a in q.incoming(i) {
        for b in q.outgoing(i) {
            arrows.push(Arrow::new(format!("[{}|{}]", b.id, a.id), a.source, b.target));
        }
    }
    for a in q.arrows() {
        if a.target == i || a.source == i {
            arrows.push(Arrow::new(format!("star({})", a.id), a.target, a.source));
        } else {
            arrows.push(a.clone());
        }
    }

    // M3: cancel opposite pairs, lowest ids first.
    let mut bundles: BTreeMap<(Vertex, Vertex), Vec<Arrow>> = BTreeMap::new();
    for a in arrows {
        bundles.entry((a.source, a.target)).or_default().push(a);
    }
    for list in bundles.values_mut() {
        list.sort_by(|x, y| x.id.cmp(&y.id));
    }
    let keys: Vec<(Vertex, Vertex)> = bundles.keys().copied().collect();
    for (s, t) in keys {
        if s >= t {
            continue;
        }
        let back = bundles.get(&(t, s)).map_or(0, Vec::len);
        let fwd = bundles[&(s, t)].len();
        let cancel = fwd.min(back);
        if cancel > 0 {
            bundles.get_mut(&(s, t)).unwrap().drain(..cancel);
            bundles.get_mut(&(t, s)).unwrap().drain(..cancel);
        }
    }

    let mut survivors: Vec<Arrow> = bundles.into_values().flatten().collect();
    survivors.sort_by(|a, b| (a.source, a.target, a.id.as_str()).cmp(&(b.source, b.target, b.id.as_str())));
    let renamed = survivors
        .into_iter()
        .enumerate()
        .map(|(k, a)| Arrow::new((k + 1).to_string(), a.source, a.target));
    Quiver::new(q.vertices().iter().copied(), renamed)
}
