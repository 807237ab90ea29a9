//! Paths, cycles up to rotation, potentials, cyclic derivatives and truncated
//! quotients of the completed path algebra.

mod preprojective;
mod quotient;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::quiver::{ArrowId, Quiver, Vertex};
use crate::rational::{self, Rational};

pub use preprojective::build_preprojective;
pub(crate) use quotient::TruncatedIdeal;
pub use quotient::{truncated_quotient_dimension, DimensionResult};

/// A path in traversal order. Length 0 is the lazy path at `source`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path {
    pub source: Vertex,
    pub target: Vertex,
    pub arrows: Vec<ArrowId>,
}

impl Path {
    pub fn lazy(v: Vertex) -> Self {
        Path { source: v, target: v, arrows: Vec::new() }
    }

    /// Checks composability and computes the endpoints.
    pub fn new(q: &Quiver, arrows: Vec<ArrowId>) -> Result<Self> {
        let (source, target) = endpoints(q, &arrows)?;
        Ok(Path { source, target, arrows })
    }

    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrows.is_empty()
    }
}

/// Source and target of a non-empty arrow sequence, checking that
/// consecutive arrows compose.
pub fn endpoints(q: &Quiver, arrows: &[ArrowId]) -> Result<(Vertex, Vertex)> {
    let first = arrows.first().ok_or_else(|| Error::InvalidPotential("empty path".into()))?;
    let a0 = q.arrow(first).ok_or_else(|| Error::UnknownArrow(first.to_string()))?;
    let mut at = a0.target;
    for id in &arrows[1..] {
        let a = q.arrow(id).ok_or_else(|| Error::UnknownArrow(id.to_string()))?;
        if a.source != at {
            return Err(Error::InvalidPotential(format!("arrow {id} does not compose after vertex {at}")));
        }
        at = a.target;
    }
    Ok((a0.source, at))
}

/// Writes an arrow sequence right-to-left, the way products are printed.
pub(crate) fn display_word(arrows: &[ArrowId]) -> String {
    let compact = arrows.iter().all(|a| a.as_str().chars().count() == 1);
    let parts: Vec<&str> = arrows.iter().rev().map(|a| a.as_str()).collect();
    if compact {
        parts.concat()
    } else {
        parts.join("·")
    }
}

fn min_rotation<T: Ord + Clone>(seq: &[T]) -> Vec<T> {
    let n = seq.len();
    let mut best: Option<Vec<T>> = None;
    for r in 0..n {
        let rot: Vec<T> = seq[r..].iter().chain(&seq[..r]).cloned().collect();
        if best.as_ref().map_or(true, |b| rot < *b) {
            best = Some(rot);
        }
    }
    best.unwrap_or_default()
}

/// A cyclic path, rotated so that its arrow sequence is lexicographically
/// smallest among all rotations.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CycleClass(Vec<ArrowId>);

impl CycleClass {
    pub fn new(arrows: Vec<ArrowId>) -> Self {
        CycleClass(min_rotation(&arrows))
    }

    pub fn from_ids(ids: &[&str]) -> Self {
        CycleClass::new(ids.iter().map(|s| ArrowId::from(*s)).collect())
    }

    pub fn arrows(&self) -> &[ArrowId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, a: &ArrowId) -> bool {
        self.0.contains(a)
    }

    /// The rotation starting at position `k`.
    pub fn rotated(&self, k: usize) -> Vec<ArrowId> {
        self.0[k..].iter().chain(&self.0[..k]).cloned().collect()
    }
}

impl fmt::Display for CycleClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&display_word(&self.0))
    }
}

fn add_term<K: Ord>(map: &mut BTreeMap<K, Rational>, key: K, c: Rational) {
    if c.is_zero() {
        return;
    }
    match map.entry(key) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

/// Finite linear combination of cycle classes, truncated at a length order.
#[derive(Debug, Clone)]
pub struct Potential {
    terms: BTreeMap<CycleClass, Rational>,
    truncation: usize,
    truncated: bool,
}

impl PartialEq for Potential {
    /// Coefficient-wise equality of the normalized terms.
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl Eq for Potential {}

impl Potential {
    pub fn zero(truncation: usize) -> Self {
        Potential { terms: BTreeMap::new(), truncation, truncated: false }
    }

    /// Builds a potential; cycles longer than `truncation` are dropped and
    /// flagged, zero-length cycles are rejected.
    pub fn new(terms: impl IntoIterator<Item = (Vec<ArrowId>, Rational)>, truncation: usize) -> Result<Self> {
        let mut p = Potential::zero(truncation);
        for (cycle, c) in terms {
            if cycle.is_empty() {
                return Err(Error::InvalidPotential("lazy path in potential".into()));
            }
            p.add(CycleClass::new(cycle), c);
        }
        Ok(p)
    }

    /// `[(coeff, cycle)]` with integer coefficients; handy in tests.
    pub fn from_terms(terms: &[(i64, &[&str])], truncation: usize) -> Self {
        Potential::new(
            terms.iter().map(|(c, ids)| (ids.iter().map(|s| ArrowId::from(*s)).collect(), rational::int(*c))),
            truncation,
        )
        .expect("non-empty cycles")
    }

    pub fn add(&mut self, class: CycleClass, c: Rational) {
        if class.len() > self.truncation {
            if !c.is_zero() {
                self.truncated = true;
            }
            return;
        }
        add_term(&mut self.terms, class, c);
    }

    pub fn terms(&self) -> &BTreeMap<CycleClass, Rational> {
        &self.terms
    }

    pub fn coefficient(&self, class: &CycleClass) -> Rational {
        self.terms.get(class).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn with_truncation(mut self, n: usize) -> Self {
        self.truncation = n;
        let long: Vec<CycleClass> = self.terms.keys().filter(|c| c.len() > n).cloned().collect();
        for c in long {
            self.terms.remove(&c);
            self.truncated = true;
        }
        self
    }

    pub(crate) fn mark_truncated(&mut self) {
        self.truncated = true;
    }

    /// True if some term was discarded for exceeding the truncation order.
    pub fn was_truncated(&self) -> bool {
        self.truncated
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &Rational) -> Potential {
        let mut out = Potential::zero(self.truncation);
        out.truncated = self.truncated;
        for (k, v) in &self.terms {
            out.add(k.clone(), v * c);
        }
        out
    }

    pub fn plus(&self, other: &Potential) -> Potential {
        let mut out = self.clone();
        out.truncated |= other.truncated;
        for (k, v) in &other.terms {
            out.add(k.clone(), v.clone());
        }
        out
    }

    /// Checks that every term is a closed path of `q`.
    pub fn validate(&self, q: &Quiver) -> Result<()> {
        for class in self.terms.keys() {
            let (s, t) = endpoints(q, class.arrows())?;
            if s != t {
                return Err(Error::InvalidPotential(format!("{class} is not a cycle")));
            }
        }
        Ok(())
    }

    /// Renames arrows; unmapped arrows keep their ids.
    pub fn rename(&self, map: &BTreeMap<ArrowId, ArrowId>) -> Potential {
        let mut out = Potential::zero(self.truncation);
        out.truncated = self.truncated;
        for (k, v) in &self.terms {
            let ids = k.arrows().iter().map(|a| map.get(a).cloned().unwrap_or_else(|| a.clone())).collect();
            out.add(CycleClass::new(ids), v.clone());
        }
        out
    }

    /// Simultaneous substitution `arrow -> combination of parallel paths`
    /// (paths given in traversal order). Products longer than the truncation
    /// order are dropped; the returned flag reports whether that happened.
    pub fn substitute(&self, subst: &BTreeMap<ArrowId, Vec<(Vec<ArrowId>, Rational)>>) -> (Potential, bool) {
        let n = self.truncation;
        let mut out = Potential::zero(n);
        out.truncated = self.truncated;
        let mut lost = false;
        for (class, coeff) in &self.terms {
            // rest[k]: least length the arrows from position k on can contribute
            let arrows = class.arrows();
            let mut rest = vec![0; arrows.len() + 1];
            for k in (0..arrows.len()).rev() {
                let least = subst.get(&arrows[k]).map_or(1, |alts| alts.iter().map(|(p, _)| p.len()).min().unwrap_or(0));
                rest[k] = rest[k + 1] + least;
            }
            let mut partial: HashMap<Vec<ArrowId>, Rational> = HashMap::from([(Vec::new(), coeff.clone())]);
            for (k, a) in arrows.iter().enumerate() {
                let mut next: HashMap<Vec<ArrowId>, Rational> = HashMap::new();
                let single = [(vec![a.clone()], rational::one())];
                let alts: &[(Vec<ArrowId>, Rational)] = subst.get(a).map_or(&single, |v| v);
                for (w, c) in &partial {
                    for (p, pc) in alts {
                        if w.len() + p.len() + rest[k + 1] > n {
                            lost = true;
                            continue;
                        }
                        let mut w2 = w.clone();
                        w2.extend(p.iter().cloned());
                        *next.entry(w2).or_insert_with(Rational::zero) += c * pc;
                    }
                }
                next.retain(|_, c| !c.is_zero());
                partial = next;
                if partial.is_empty() {
                    break;
                }
            }
            for (w, c) in partial {
                if !w.is_empty() {
                    out.add(CycleClass::new(w), c);
                }
            }
        }
        out.truncated |= lost;
        (out, lost)
    }

    /// Cyclic derivative with respect to `a`.
    pub fn cyclic_derivative(&self, q: &Quiver, a: &ArrowId) -> Result<AlgebraElement> {
        cyclic_derivative(q, self, a)
    }
}

impl fmt::Display for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (class, c)) in self.terms.iter().enumerate() {
            let neg = rational::is_negative(c);
            let abs = if neg { -c.clone() } else { c.clone() };
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if !abs.is_one() {
                write!(f, "{}", rational::format(&abs))?;
            }
            write!(f, "{class}")?;
        }
        Ok(())
    }
}

/// Element of `e_target · kQ · e_source`: a combination of paths that all
/// start at `source` and end at `target` (traversal order).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraElement {
    pub source: Vertex,
    pub target: Vertex,
    terms: BTreeMap<Vec<ArrowId>, Rational>,
}

impl AlgebraElement {
    pub fn zero(source: Vertex, target: Vertex) -> Self {
        AlgebraElement { source, target, terms: BTreeMap::new() }
    }

    /// Builds an element, checking that every path runs `source -> target`.
    pub fn new(q: &Quiver, source: Vertex, target: Vertex, terms: impl IntoIterator<Item = (Vec<ArrowId>, Rational)>) -> Result<Self> {
        let mut e = AlgebraElement::zero(source, target);
        for (p, c) in terms {
            if p.is_empty() {
                if source != target {
                    return Err(Error::InvalidPotential("lazy path between distinct vertices".into()));
                }
            } else {
                let (s, t) = endpoints(q, &p)?;
                if (s, t) != (source, target) {
                    return Err(Error::InvalidPotential(format!(
                        "path {} runs {s}->{t}, expected {source}->{target}",
                        display_word(&p)
                    )));
                }
            }
            e.add(p, c);
        }
        Ok(e)
    }

    /// Builds an element from paths, inferring endpoints from the first one.
    pub fn from_paths(q: &Quiver, terms: Vec<(Vec<ArrowId>, Rational)>) -> Result<Self> {
        let first = terms
            .iter()
            .find(|(p, _)| !p.is_empty())
            .ok_or_else(|| Error::MalformedRelation("element has no non-lazy path".into()))?;
        let (s, t) = endpoints(q, &first.0)?;
        AlgebraElement::new(q, s, t, terms)
    }

    pub(crate) fn add(&mut self, p: Vec<ArrowId>, c: Rational) {
        add_term(&mut self.terms, p, c);
    }

    pub fn terms(&self) -> &BTreeMap<Vec<ArrowId>, Rational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Minimal length of a path with nonzero coefficient.
    pub fn order(&self) -> Option<usize> {
        self.terms.keys().map(Vec::len).min()
    }

    pub fn scale(&self, c: &Rational) -> AlgebraElement {
        let mut out = AlgebraElement::zero(self.source, self.target);
        for (p, v) in &self.terms {
            out.add(p.clone(), v * c);
        }
        out
    }

    pub fn plus(&self, other: &AlgebraElement) -> AlgebraElement {
        let mut out = self.clone();
        for (p, v) in &other.terms {
            out.add(p.clone(), v.clone());
        }
        out
    }

    pub fn rename(&self, map: &BTreeMap<ArrowId, ArrowId>) -> AlgebraElement {
        let mut out = AlgebraElement::zero(self.source, self.target);
        for (p, v) in &self.terms {
            out.add(p.iter().map(|a| map.get(a).cloned().unwrap_or_else(|| a.clone())).collect(), v.clone());
        }
        out
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (p, c)) in self.terms.iter().enumerate() {
            let neg = rational::is_negative(c);
            let abs = if neg { -c.clone() } else { c.clone() };
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if !abs.is_one() || p.is_empty() {
                write!(f, "{}", rational::format(&abs))?;
            }
            if p.is_empty() {
                write!(f, "e{}", self.source)?;
            } else {
                f.write_str(&display_word(p))?;
            }
        }
        Ok(())
    }
}

/// `∂_a`: each occurrence of `a` in a cycle contributes the path that
/// follows `a` around the cycle back to its source. The result runs from
/// `target(a)` to `source(a)`.
pub fn cyclic_derivative(q: &Quiver, w: &Potential, a: &ArrowId) -> Result<AlgebraElement> {
    let arrow = q.arrow(a).ok_or_else(|| Error::UnknownArrow(a.to_string()))?;
    let mut out = AlgebraElement::zero(arrow.target, arrow.source);
    for (class, c) in w.terms() {
        for (k, x) in class.arrows().iter().enumerate() {
            if x == a {
                let rot = class.rotated(k);
                out.add(rot[1..].to_vec(), c.clone());
            }
        }
    }
    Ok(out)
}
