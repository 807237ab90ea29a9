//! Graded quivers with potential, left and right graded mutation, and the
//! passage between algebras with relations and cut gradings.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::canonical::{canonicalize, CanonicalForm};
use crate::error::{Error, Result};
use crate::path_algebra::{cyclic_derivative, AlgebraElement, CycleClass, Potential};
use crate::qp::{Origin, Qp};
use crate::quiver::{Arrow, ArrowId, Quiver, Vertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn inverse(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "L",
            Side::Right => "R",
        })
    }
}

/// A QP with integer arrow degrees, its potential homogeneous of degree 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedQp {
    qp: Qp,
    degrees: BTreeMap<ArrowId, i64>,
}

impl GradedQp {
    pub fn new(qp: Qp, degrees: BTreeMap<ArrowId, i64>) -> Result<Self> {
        let arrows: BTreeSet<&ArrowId> = qp.quiver.arrows().iter().map(|a| &a.id).collect();
        if let Some(a) = arrows.iter().find(|a| !degrees.contains_key(**a)) {
            return Err(Error::InvalidQuiver(format!("arrow {a} has no degree")));
        }
        if let Some(a) = degrees.keys().find(|a| !arrows.contains(a)) {
            return Err(Error::UnknownArrow(a.to_string()));
        }
        let g = GradedQp { qp, degrees };
        g.check_homogeneous()?;
        Ok(g)
    }

    /// All arrows in degree 0; the potential must then be zero.
    pub fn ungraded(qp: Qp) -> Result<Self> {
        let degrees = qp.quiver.arrows().iter().map(|a| (a.id.clone(), 0)).collect();
        GradedQp::new(qp, degrees)
    }

    pub fn qp(&self) -> &Qp {
        &self.qp
    }

    pub fn quiver(&self) -> &Quiver {
        &self.qp.quiver
    }

    pub fn potential(&self) -> &Potential {
        &self.qp.potential
    }

    pub fn degrees(&self) -> &BTreeMap<ArrowId, i64> {
        &self.degrees
    }

    pub fn degree(&self, a: &ArrowId) -> Option<i64> {
        self.degrees.get(a).copied()
    }

    fn cycle_degree(&self, c: &CycleClass) -> i64 {
        c.arrows().iter().map(|a| self.degrees[a]).sum()
    }

    fn check_homogeneous(&self) -> Result<()> {
        for c in self.qp.potential.terms().keys() {
            let d = self.cycle_degree(c);
            if d != 1 {
                return Err(Error::HomogeneityViolation(format!("term {c} has degree {d}")));
            }
        }
        Ok(())
    }

    pub fn renumbered(&self) -> GradedQp {
        let (quiver, map) = self.qp.quiver.renumbered();
        let degrees = self.degrees.iter().map(|(a, d)| (map[a].clone(), *d)).collect();
        GradedQp { qp: Qp { quiver, potential: self.qp.potential.rename(&map) }, degrees }
    }

    pub fn relabel_vertices(&self, map: &BTreeMap<Vertex, Vertex>) -> Result<GradedQp> {
        let quiver = self.qp.quiver.relabel_vertices(map)?;
        Ok(GradedQp { qp: Qp { quiver, potential: self.qp.potential.clone() }, degrees: self.degrees.clone() })
    }

    pub fn mutate(&self, side: Side, i: Vertex, n: usize) -> Result<GradedQp> {
        let (pre, origins) = self.qp.premutate_traced(i)?;
        let degrees: BTreeMap<ArrowId, i64> = origins
            .iter()
            .map(|(id, o)| {
                let d = match o {
                    Origin::Kept(a) => self.degrees[a],
                    Origin::Composite { incoming, outgoing } => self.degrees[incoming] + self.degrees[outgoing],
                    Origin::Reversed { arrow, incoming } => match (side, incoming) {
                        (Side::Left, true) | (Side::Right, false) => 1 - self.degrees[arrow],
                        _ => -self.degrees[arrow],
                    },
                };
                (id.clone(), d)
            })
            .collect();
        let pre = GradedQp { qp: pre, degrees };
        pre.check_homogeneous()?;
        let (reduced, _) = pre.qp.reduce(n)?;
        let degrees = reduced.quiver.arrows().iter().map(|a| (a.id.clone(), pre.degrees[&a.id])).collect();
        let out = GradedQp { qp: reduced, degrees };
        out.check_homogeneous()?;
        Ok(out)
    }

    pub fn left_mutate(&self, i: Vertex, n: usize) -> Result<GradedQp> {
        self.mutate(Side::Left, i, n)
    }

    pub fn right_mutate(&self, i: Vertex, n: usize) -> Result<GradedQp> {
        self.mutate(Side::Right, i, n)
    }

    pub fn canonical(&self) -> CanonicalForm {
        canonicalize(&self.qp.quiver, Some(&self.degrees), Some(&self.qp.potential))
    }

    /// Vertices at which a graded mutation is defined.
    pub fn mutable_vertices(&self) -> Vec<Vertex> {
        let q = &self.qp.quiver;
        q.vertices().iter().copied().filter(|&v| !q.has_loop_at(v) && !q.has_two_cycle_at(v)).collect()
    }
}

/// Vertex and arrow relabeling preserving degrees and the potential.
pub fn graded_iso(g1: &GradedQp, g2: &GradedQp) -> bool {
    g1.quiver().num_vertices() == g2.quiver().num_vertices()
        && g1.quiver().arrows().len() == g2.quiver().arrows().len()
        && g1.canonical().key == g2.canonical().key
}

/// A quiver with a chosen set of relations (combinations of parallel paths
/// of length at least 2).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PresentedAlgebra {
    pub quiver: Quiver,
    pub relations: Vec<AlgebraElement>,
}

impl PresentedAlgebra {
    pub fn new(quiver: Quiver, relations: Vec<AlgebraElement>) -> Result<Self> {
        for r in &relations {
            if r.is_zero() {
                return Err(Error::MalformedRelation("zero relation".into()));
            }
            if r.order().unwrap_or(0) < 2 {
                return Err(Error::MalformedRelation(format!("relation {r} has a path of length < 2")));
            }
            for p in r.terms().keys() {
                let (s, t) = crate::path_algebra::endpoints(&quiver, p)?;
                if (s, t) != (r.source, r.target) {
                    return Err(Error::MalformedRelation(format!("relation {r} mixes endpoints")));
                }
            }
        }
        Ok(PresentedAlgebra { quiver, relations })
    }
}

/// Adds an arrow `t(r) -> s(r)` of degree 1 for every relation `r` and the
/// potential `Σ r·a_r`; original arrows get degree 0.
pub fn qp_from_algebra(alg: &PresentedAlgebra) -> Result<GradedQp> {
    let alg = PresentedAlgebra::new(alg.quiver.clone(), alg.relations.clone())?;
    let used: BTreeSet<ArrowId> = alg.quiver.arrows().iter().map(|a| a.id.clone()).collect();
    let mut arrows: Vec<Arrow> = alg.quiver.arrows().to_vec();
    let mut degrees: BTreeMap<ArrowId, i64> = arrows.iter().map(|a| (a.id.clone(), 0)).collect();
    let mut terms = Vec::new();
    let mut k = 0;
    for r in &alg.relations {
        let id = loop {
            k += 1;
            let id = ArrowId::new(format!("r{k}"));
            if !used.contains(&id) {
                break id;
            }
        };
        arrows.push(Arrow { id: id.clone(), source: r.target, target: r.source });
        degrees.insert(id.clone(), 1);
        for (p, c) in r.terms() {
            let mut cyc = p.clone();
            cyc.push(id.clone());
            terms.push((cyc, c.clone()));
        }
    }
    let quiver = Quiver::new(alg.quiver.vertices().iter().copied(), arrows)?;
    let longest = alg.relations.iter().flat_map(|r| r.terms().keys().map(Vec::len)).max().unwrap_or(0);
    let potential = Potential::new(terms, crate::DEFAULT_TRUNCATION.max(longest + 1))?;
    GradedQp::new(Qp::new(quiver, potential)?, degrees)
}

/// Degree-0 subquiver with the relations `∂_a W` for the degree-1 arrows.
pub fn algebra_from_cut(g: &GradedQp) -> Result<PresentedAlgebra> {
    if let Some((a, d)) = g.degrees.iter().find(|(_, d)| !(0..=1).contains(*d)) {
        return Err(Error::BadDegrees(format!("arrow {a} has degree {d}")));
    }
    let q = g.quiver();
    let sub = q.with_arrows(|a| g.degrees[&a.id] == 0);
    let mut relations = Vec::new();
    for a in q.arrows().iter().filter(|a| g.degrees[&a.id] == 1) {
        let d = cyclic_derivative(q, g.potential(), &a.id)?;
        if d.is_zero() {
            continue;
        }
        relations.push(AlgebraElement::new(&sub, d.source, d.target, d.terms().clone())?);
    }
    PresentedAlgebra::new(sub, relations)
}
