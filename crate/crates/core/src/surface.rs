//! Combinatorial triangulations of unpunctured marked surfaces, flips, and
//! the associated quivers with potential.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::path_algebra::Potential;
use crate::qp::Qp;
use crate::quiver::{Arrow, ArrowId, Quiver, Vertex};
use crate::rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SideKind {
    Arc,
    Boundary,
}

/// Sides tagged arc or boundary and triangles listing their sides
/// clockwise. Every arc lies on two triangles, every boundary side on one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triangulation {
    sides: BTreeMap<String, SideKind>,
    triangles: Vec<[String; 3]>,
}

impl Triangulation {
    pub fn new(sides: impl IntoIterator<Item = (String, SideKind)>, triangles: Vec<[String; 3]>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (id, kind) in sides {
            if map.insert(id.clone(), kind).is_some() {
                return Err(Error::InvalidTriangulation(format!("duplicate side {id}")));
            }
        }
        let t = Triangulation { sides: map, triangles };
        t.validate()?;
        Ok(t)
    }

    /// Fan triangulation of a convex `n`-gon from one corner. Arcs are
    /// `1..=n-3`, numbered counterclockwise; boundary sides `b1..bn`.
    pub fn polygon_fan(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidTriangulation(format!("a polygon needs at least 3 corners, got {n}")));
        }
        // corners 0..n counterclockwise; diagonal (0, k) is arc k-1
        let side = |p: usize, q: usize| -> String {
            let (p, q) = (p.min(q), p.max(q));
            if q - p == 1 {
                format!("b{}", p + 1)
            } else if p == 0 && q == n - 1 {
                format!("b{n}")
            } else {
                (q - 1).to_string()
            }
        };
        let mut sides: Vec<(String, SideKind)> = (1..=n).map(|k| (format!("b{k}"), SideKind::Boundary)).collect();
        sides.extend((1..n.saturating_sub(2)).map(|k| (k.to_string(), SideKind::Arc)));
        let triangles = (1..n - 1).map(|k| [side(0, k + 1), side(k + 1, k), side(k, 0)]).collect();
        Triangulation::new(sides, triangles)
    }

    pub fn sides(&self) -> &BTreeMap<String, SideKind> {
        &self.sides
    }

    pub fn triangles(&self) -> &[[String; 3]] {
        &self.triangles
    }

    pub fn arcs(&self) -> impl Iterator<Item = &str> {
        self.sides.iter().filter(|(_, k)| **k == SideKind::Arc).map(|(s, _)| s.as_str())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidTriangulation(m));
        if self.triangles.is_empty() {
            return bad("no triangles".into());
        }
        let mut count: HashMap<&str, usize> = HashMap::new();
        for t in &self.triangles {
            for s in t {
                if !self.sides.contains_key(s) {
                    return bad(format!("unknown side {s}"));
                }
                *count.entry(s).or_default() += 1;
            }
            if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return bad(format!("self-folded triangle {t:?}"));
            }
        }
        for (s, kind) in &self.sides {
            let want = if *kind == SideKind::Arc { 2 } else { 1 };
            let got = count.get(s.as_str()).copied().unwrap_or(0);
            if got != want {
                return bad(format!("side {s} lies on {got} triangles, expected {want}"));
            }
        }
        // connectivity through shared arcs
        let mut seen = vec![false; self.triangles.len()];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(k) = queue.pop_front() {
            for s in &self.triangles[k] {
                for (j, t) in self.triangles.iter().enumerate() {
                    if !seen[j] && t.contains(s) {
                        seen[j] = true;
                        queue.push_back(j);
                    }
                }
            }
        }
        if seen.iter().any(|x| !x) {
            return bad("triangles do not form a connected surface".into());
        }
        Ok(())
    }

    /// Quiver vertex of each arc: the arc's own number when every arc id is
    /// a positive integer, otherwise its rank in natural order.
    pub fn arc_vertices(&self) -> BTreeMap<String, Vertex> {
        let mut arcs: Vec<&str> = self.arcs().collect();
        arcs.sort_by(|a, b| ArrowId::from(*a).cmp(&ArrowId::from(*b)));
        let numeric: Option<Vec<Vertex>> = arcs.iter().map(|a| a.parse::<Vertex>().ok().filter(|&v| v > 0)).collect();
        match numeric {
            Some(vs) => arcs.iter().map(|a| a.to_string()).zip(vs).collect(),
            None => arcs.iter().enumerate().map(|(k, a)| (a.to_string(), k as Vertex + 1)).collect(),
        }
    }

    fn triangles_of(&self, arc: &str) -> Vec<usize> {
        (0..self.triangles.len()).filter(|&k| self.triangles[k].iter().any(|s| s == arc)).collect()
    }

    /// Replaces `arc` by the other diagonal of its quadrilateral.
    pub fn flip(&self, arc: &str) -> Result<Triangulation> {
        match self.sides.get(arc) {
            None => return Err(Error::InvalidTriangulation(format!("unknown side {arc}"))),
            Some(SideKind::Boundary) => return Err(Error::BoundarySide(arc.to_string())),
            Some(SideKind::Arc) => {}
        }
        let ts = self.triangles_of(arc);
        if ts.len() != 2 {
            return Err(Error::SelfFoldedConfiguration(arc.to_string()));
        }
        let rot = |t: &[String; 3]| -> [String; 3] {
            let k = t.iter().position(|s| s == arc).unwrap();
            [t[k].clone(), t[(k + 1) % 3].clone(), t[(k + 2) % 3].clone()]
        };
        let [_, x, y] = rot(&self.triangles[ts[0]]);
        let [_, z, w] = rot(&self.triangles[ts[1]]);
        let quad: BTreeSet<&String> = [&x, &y, &z, &w].into_iter().collect();
        if quad.len() != 4 {
            return Err(Error::SelfFoldedConfiguration(arc.to_string()));
        }
        let mut triangles = self.triangles.clone();
        triangles[ts[0]] = [arc.to_string(), w, x];
        triangles[ts[1]] = [arc.to_string(), y, z];
        Ok(Triangulation { sides: self.sides.clone(), triangles })
    }

    /// For a polygon: each arc as the pair of corners it joins, corners being
    /// named by the boundary side leaving them clockwise. `None` when some
    /// corner has no such name or two corners share one.
    pub fn arc_endpoints(&self) -> Option<BTreeMap<String, (String, String)>> {
        let nt = self.triangles.len();
        // corner 3k+i sits between side i and side i+1 of triangle k
        let mut parent: Vec<usize> = (0..3 * nt).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let next = p[y];
                p[y] = r;
                y = next;
            }
            r
        }
        // side i of triangle k runs clockwise from corner 3k+(i+2)%3 to corner 3k+i
        let ends = |k: usize, i: usize| (3 * k + (i + 2) % 3, 3 * k + i);
        let mut occurrences: HashMap<&str, Vec<(usize, usize)>> = HashMap::new();
        for (k, t) in self.triangles.iter().enumerate() {
            for (i, s) in t.iter().enumerate() {
                occurrences.entry(s).or_default().push((k, i));
            }
        }
        for occ in occurrences.values() {
            if let [(k1, i1), (k2, i2)] = occ[..] {
                let (s1, e1) = ends(k1, i1);
                let (s2, e2) = ends(k2, i2);
                let (a, b) = (find(&mut parent, s1), find(&mut parent, e2));
                parent[a] = b;
                let (a, b) = (find(&mut parent, e1), find(&mut parent, s2));
                parent[a] = b;
            }
        }
        let mut name: HashMap<usize, String> = HashMap::new();
        for (k, t) in self.triangles.iter().enumerate() {
            for (i, s) in t.iter().enumerate() {
                if self.sides[s] == SideKind::Boundary {
                    let root = find(&mut parent, ends(k, i).0);
                    if name.insert(root, s.clone()).is_some() {
                        return None;
                    }
                }
            }
        }
        let mut out = BTreeMap::new();
        for (k, t) in self.triangles.iter().enumerate() {
            for (i, s) in t.iter().enumerate() {
                if self.sides[s] == SideKind::Arc {
                    let (a, b) = ends(k, i);
                    let a = name.get(&find(&mut parent, a))?.clone();
                    let b = name.get(&find(&mut parent, b))?.clone();
                    out.insert(s.clone(), if a <= b { (a, b) } else { (b, a) });
                }
            }
        }
        Some(out)
    }

    /// Label-free key of a polygon triangulation: its set of diagonals.
    pub fn disk_key(&self) -> Option<Vec<(String, String)>> {
        let mut v: Vec<(String, String)> = self.arc_endpoints()?.into_values().collect();
        v.sort();
        Some(v)
    }
}

/// One arrow `s -> t` for each clockwise-consecutive pair of arcs in a
/// triangle; the potential sums the clockwise 3-cycles of the triangles
/// bounded by three arcs.
pub fn quiver_from_triangulation(t: &Triangulation) -> Result<Qp> {
    t.validate()?;
    let vertex = t.arc_vertices();
    let mut arrows = Vec::new();
    let mut cycles = Vec::new();
    for (k, tri) in t.triangles().iter().enumerate() {
        let mut ids = Vec::new();
        for i in 0..3 {
            let (s, u) = (&tri[i], &tri[(i + 1) % 3]);
            if let (Some(&vs), Some(&vu)) = (vertex.get(s), vertex.get(u)) {
                let id = ArrowId::new(format!("t{k}.{i}"));
                arrows.push(Arrow { id: id.clone(), source: vs, target: vu });
                ids.push(id);
            }
        }
        if ids.len() == 3 {
            cycles.push(ids);
        }
    }
    let quiver = Quiver::new(vertex.values().copied(), arrows)?;
    let (quiver, map) = quiver.renumbered();
    let potential = Potential::new(
        cycles.into_iter().map(|c| (c.iter().map(|a| map[a].clone()).collect(), rational::one())),
        crate::DEFAULT_TRUNCATION,
    )?;
    Qp::new(quiver, potential)
}

/// Triangulations reachable by flips, deduplicated by their diagonal sets.
#[derive(Debug, Clone)]
pub struct FlipGraph {
    pub triangulations: Vec<Triangulation>,
    /// `(from, arc, to)` indices into `triangulations`.
    pub edges: Vec<(usize, String, usize)>,
    pub complete: bool,
}

pub fn flip_graph(start: &Triangulation, max_size: usize) -> Result<FlipGraph> {
    let key0 = start.disk_key().ok_or_else(|| Error::InvalidTriangulation("flip graph enumeration needs a polygon".into()))?;
    let mut index: HashMap<Vec<(String, String)>, usize> = HashMap::from([(key0, 0)]);
    let mut triangulations = vec![start.clone()];
    let mut edges = Vec::new();
    let mut complete = true;
    let mut k = 0;
    while k < triangulations.len() {
        let t = triangulations[k].clone();
        let arcs: Vec<String> = t.arcs().map(String::from).collect();
        for arc in arcs {
            let f = t.flip(&arc)?;
            let key = f.disk_key().expect("flips keep the polygon");
            let j = match index.get(&key) {
                Some(&j) => j,
                None if triangulations.len() >= max_size => {
                    complete = false;
                    continue;
                }
                None => {
                    index.insert(key, triangulations.len());
                    triangulations.push(f);
                    triangulations.len() - 1
                }
            };
            edges.push((k, arc, j));
        }
        k += 1;
    }
    Ok(FlipGraph { triangulations, edges, complete })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::canonicalize;

    fn edges(q: &Quiver) -> Vec<(Vertex, Vertex)> {
        let mut e: Vec<_> = q.arrows().iter().map(|a| (a.source, a.target)).collect();
        e.sort();
        e
    }

    #[test]
    fn hexagon_fan_is_linear() {
        let t = Triangulation::polygon_fan(6).unwrap();
        let qp = quiver_from_triangulation(&t).unwrap();
        assert_eq!(edges(&qp.quiver), vec![(1, 2), (2, 3)]);
        assert!(qp.potential.is_zero());
    }

    #[test]
    fn square_has_one_vertex() {
        let qp = quiver_from_triangulation(&Triangulation::polygon_fan(4).unwrap()).unwrap();
        assert_eq!(qp.quiver.vertices(), &[1]);
        assert!(qp.quiver.arrows().is_empty());
        let t = Triangulation::polygon_fan(4).unwrap();
        let f = t.flip("1").unwrap();
        assert_ne!(f.disk_key(), t.disk_key());
        assert_eq!(f.flip("1").unwrap().disk_key(), t.disk_key());
    }

    #[test]
    fn middle_flip_of_hexagon_fan_gives_three_cycle() {
        let t = Triangulation::polygon_fan(6).unwrap();
        let f = t.flip("2").unwrap();
        let qp = quiver_from_triangulation(&f).unwrap();
        assert_eq!(qp.quiver.arrows().len(), 3);
        assert!(!qp.quiver.is_acyclic());
        assert_eq!(qp.potential.len(), 1);
        assert_eq!(qp.jacobi_finite(3).unwrap().dim(), 6);
        let dwz = quiver_from_triangulation(&t).unwrap().dwz_mutate(2, 12).unwrap();
        assert_eq!(canonicalize(&dwz.quiver, None, Some(&dwz.potential)).key, canonicalize(&qp.quiver, None, Some(&qp.potential)).key);
    }

    #[test]
    fn flip_graph_sizes() {
        assert_eq!(flip_graph(&Triangulation::polygon_fan(5).unwrap(), 100).unwrap().triangulations.len(), 5);
        let g = flip_graph(&Triangulation::polygon_fan(6).unwrap(), 100).unwrap();
        assert_eq!(g.triangulations.len(), 14);
        assert!(g.complete);
        assert_eq!(g.edges.len(), 14 * 3);
    }

    #[test]
    fn flip_errors() {
        let t = Triangulation::polygon_fan(5).unwrap();
        assert_eq!(t.flip("b1"), Err(Error::BoundarySide("b1".into())));
        assert!(matches!(t.flip("zz"), Err(Error::InvalidTriangulation(_))));
    }

    #[test]
    fn validation() {
        let s = |v: &[(&str, SideKind)]| v.iter().map(|(a, k)| (a.to_string(), *k)).collect::<Vec<_>>();
        let tri = |a: &str, b: &str, c: &str| [a.to_string(), b.to_string(), c.to_string()];
        let sides = s(&[("1", SideKind::Arc), ("b1", SideKind::Boundary), ("b2", SideKind::Boundary)]);
        assert!(Triangulation::new(sides.clone(), vec![tri("1", "b1", "b2")]).is_err());
        assert!(Triangulation::new(sides, vec![tri("1", "1", "b2")]).is_err());
    }
}
