//! Truncated two-sided ideals of the path algebra and quotient dimensions.
//!
//! Everything happens in `kQ / J^{L+1}`: paths of length at most `L` are the
//! columns, and the ideal generated by a list of elements is closed under
//! left and right multiplication by arrows, discarding components longer
//! than `L`.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::linalg::{Echelon, SparseRow};
use crate::path_algebra::{AlgebraElement, CycleClass};
use crate::quiver::{ArrowId, Quiver};

/// Hard cap on the number of enumerated paths.
pub(crate) const PATH_LIMIT: usize = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DimensionResult {
    /// The quotient is finite dimensional; the certificate was obtained at
    /// bound `certified_at`.
    Finite { dim: usize, certified_at: usize },
    /// Dimension of the truncation at `bound`; stabilization not observed.
    UnknownAtBound { dim_at_bound: usize, bound: usize },
}

impl DimensionResult {
    pub fn is_finite(&self) -> bool {
        matches!(self, DimensionResult::Finite { .. })
    }

    /// The dimension, either certified or at the bound.
    pub fn dim(&self) -> usize {
        match *self {
            DimensionResult::Finite { dim, .. } => dim,
            DimensionResult::UnknownAtBound { dim_at_bound, .. } => dim_at_bound,
        }
    }

    pub fn bound(&self) -> usize {
        match *self {
            DimensionResult::Finite { certified_at, .. } => certified_at,
            DimensionResult::UnknownAtBound { bound, .. } => bound,
        }
    }
}

/// All paths of length `<= bound`, sorted by (length, start, arrow indices).
#[derive(Debug)]
pub(crate) struct PathIndex {
    pub arrow_ends: Vec<(usize, usize)>,
    pub arrow_ids: Vec<ArrowId>,
    /// (start vertex index, arrow indices)
    pub paths: Vec<(usize, Vec<u32>)>,
    pub ends: Vec<usize>,
    index: HashMap<(usize, Vec<u32>), usize>,
    /// `count_upto[k]` = number of paths of length `<= k`.
    pub count_upto: Vec<usize>,
    pub bound: usize,
}

impl PathIndex {
    pub fn build(q: &Quiver, bound: usize) -> Result<Self> {
        let n = q.num_vertices();
        let arrow_ends: Vec<(usize, usize)> = q
            .arrows()
            .iter()
            .map(|a| (q.vertex_index(a.source).unwrap(), q.vertex_index(a.target).unwrap()))
            .collect();
        let arrow_ids = q.arrows().iter().map(|a| a.id.clone()).collect();
        let mut out_arrows = vec![Vec::new(); n];
        for (k, &(s, _)) in arrow_ends.iter().enumerate() {
            out_arrows[s].push(k as u32);
        }
        let mut paths: Vec<(usize, Vec<u32>)> = (0..n).map(|v| (v, Vec::new())).collect();
        let mut ends: Vec<usize> = (0..n).collect();
        let mut count_upto = vec![n];
        let mut level_start = 0;
        for _len in 1..=bound {
            let level_end = paths.len();
            let mut next: Vec<((usize, Vec<u32>), usize)> = Vec::new();
            for p in level_start..level_end {
                let end = ends[p];
                for &a in &out_arrows[end] {
                    let mut w = paths[p].1.clone();
                    w.push(a);
                    next.push(((paths[p].0, w), arrow_ends[a as usize].1));
                }
            }
            if paths.len() + next.len() > PATH_LIMIT {
                return Err(Error::ResourceLimit(format!("more than {PATH_LIMIT} paths of length <= {bound}")));
            }
            next.sort();
            for (p, e) in next {
                paths.push(p);
                ends.push(e);
            }
            count_upto.push(paths.len());
            level_start = level_end;
        }
        let index = paths.iter().cloned().enumerate().map(|(k, p)| (p, k)).collect();
        Ok(PathIndex { arrow_ends, arrow_ids, paths, ends, index, count_upto, bound })
    }

    pub fn lookup(&self, start: usize, arrows: &[u32]) -> Option<usize> {
        self.index.get(&(start, arrows.to_vec())).copied()
    }

    pub fn len_of(&self, col: usize) -> usize {
        self.paths[col].1.len()
    }

    fn arrow_index(&self, id: &ArrowId) -> Option<u32> {
        self.arrow_ids.binary_search(id).ok().map(|k| k as u32)
    }

    /// `x · p` in traversal order: prepend arrow `x`.
    fn prepend(&self, x: u32, col: usize) -> Option<usize> {
        let (s, t) = self.arrow_ends[x as usize];
        let (start, w) = &self.paths[col];
        if t != *start || w.len() >= self.bound {
            return None;
        }
        let mut nw = Vec::with_capacity(w.len() + 1);
        nw.push(x);
        nw.extend_from_slice(w);
        self.lookup(s, &nw)
    }

    /// `p · y` in traversal order: append arrow `y`.
    fn append(&self, col: usize, y: u32) -> Option<usize> {
        let (s, _) = self.arrow_ends[y as usize];
        let (start, w) = &self.paths[col];
        if self.ends[col] != s || w.len() >= self.bound {
            return None;
        }
        let mut nw = w.clone();
        nw.push(y);
        self.lookup(*start, &nw)
    }

    /// Image of a row under a column map, dropping columns mapped to `None`.
    fn shift(&self, row: &SparseRow, f: impl Fn(usize) -> Option<usize>) -> Option<SparseRow> {
        let entries: Vec<_> = row.entries().iter().filter_map(|(c, v)| f(*c).map(|col| (col, v.clone()))).collect();
        (!entries.is_empty()).then(|| SparseRow::from_entries(entries))
    }

    fn row_of(&self, q: &Quiver, e: &AlgebraElement) -> Result<SparseRow> {
        let src = q.vertex_index(e.source).ok_or(Error::UnknownVertex(e.source))?;
        let mut entries = Vec::new();
        for (p, c) in e.terms() {
            if p.len() > self.bound {
                continue;
            }
            let word = p
                .iter()
                .map(|a| self.arrow_index(a).ok_or_else(|| Error::UnknownArrow(a.to_string())))
                .collect::<Result<Vec<u32>>>()?;
            let col = self
                .lookup(src, &word)
                .ok_or_else(|| Error::InvalidPotential("generator path is not a path of the quiver".into()))?;
            entries.push((col, c.clone()));
        }
        Ok(SparseRow::from_rationals(entries))
    }
}

/// Echelon basis of the truncated ideal `π_{<=L}(I)`.
#[derive(Debug)]
pub(crate) struct TruncatedIdeal {
    pub index: PathIndex,
    pub basis: Echelon,
}

impl TruncatedIdeal {
    pub fn build(q: &Quiver, generators: &[AlgebraElement], bound: usize) -> Result<Self> {
        let index = PathIndex::build(q, bound)?;
        let rows = generators.iter().map(|g| index.row_of(q, g)).collect::<Result<Vec<_>>>()?;
        let num_arrows = index.arrow_ends.len() as u32;
        // right[j][g] = all g·v with |v| = j
        let mut right: Vec<Vec<SparseRow>> = vec![rows.into_iter().filter(|r| !r.is_zero()).collect()];
        for _ in 1..bound {
            let next: Vec<SparseRow> = right
                .last()
                .unwrap()
                .iter()
                .flat_map(|r| (0..num_arrows).filter_map(|y| index.shift(r, |c| index.append(c, y))))
                .collect();
            if next.is_empty() {
                break;
            }
            right.push(next);
        }
        // u·g·v in decreasing |u| + |v|, so that long paths are pivots before
        // the rows whose tails reach them are reduced
        let mut basis = Echelon::new();
        for m in (0..bound).rev() {
            for j in (0..=m.min(right.len() - 1)).rev() {
                let i = m - j;
                for r in &right[j] {
                    let mut layer = vec![r.clone()];
                    for _ in 0..i {
                        layer = layer
                            .iter()
                            .flat_map(|r| (0..num_arrows).filter_map(|x| index.shift(r, |c| index.prepend(x, c))))
                            .collect();
                    }
                    for row in layer {
                        basis.insert(row);
                    }
                }
            }
        }
        Ok(TruncatedIdeal { index, basis })
    }

    /// Dimension of `kQ / (I + J^{k+1})` for every `k <= bound`.
    pub fn quotient_dims(&self) -> Vec<usize> {
        let mut pivots_upto = vec![0usize; self.index.bound + 1];
        for p in self.basis.pivots() {
            pivots_upto[self.index.len_of(p)] += 1;
        }
        let mut acc = 0;
        (0..=self.index.bound)
            .map(|k| {
                acc += pivots_upto[k];
                self.index.count_upto[k] - acc
            })
            .collect()
    }

    /// Cycle classes of length `1..=bound` that are not cyclically equivalent
    /// to an element of the truncated ideal, smallest first. Empty iff every
    /// cycle class is covered.
    pub fn cyclic_cokernel(&self) -> Vec<CycleClass> {
        let idx = &self.index;
        // class id per closed, non-lazy path column
        let mut classes: Vec<Vec<u32>> = Vec::new();
        let mut class_of: HashMap<Vec<u32>, usize> = HashMap::new();
        let mut col_class: HashMap<usize, usize> = HashMap::new();
        for (col, (start, w)) in idx.paths.iter().enumerate() {
            if w.is_empty() || idx.ends[col] != *start {
                continue;
            }
            let rot = super::min_rotation(w);
            let id = *class_of.entry(rot.clone()).or_insert_with(|| {
                classes.push(rot);
                classes.len() - 1
            });
            col_class.insert(col, id);
        }
        // order classes by (length, word) so pivots prefer short classes
        let mut order: Vec<usize> = (0..classes.len()).collect();
        order.sort_by(|&a, &b| (classes[a].len(), &classes[a]).cmp(&(classes[b].len(), &classes[b])));
        let mut rank_of = vec![0usize; classes.len()];
        for (r, &c) in order.iter().enumerate() {
            rank_of[c] = r;
        }
        let mut cyc = Echelon::new();
        for row in self.basis.rows() {
            let entries: Vec<_> = row
                .entries()
                .iter()
                .filter_map(|(c, v)| col_class.get(c).map(|&k| (rank_of[k], v.clone())))
                .collect();
            if !entries.is_empty() {
                cyc.insert(SparseRow::from_entries(entries));
            }
        }
        order
            .iter()
            .enumerate()
            .filter(|(r, _)| !cyc.is_pivot(*r))
            .map(|(_, &c)| CycleClass::new(classes[c].iter().map(|&a| idx.arrow_ids[a as usize].clone()).collect()))
            .collect()
    }
}

/// Dimension of `kQ̂ / <generators>` as seen through the truncation at `L`.
///
/// Returns `Finite` when the truncations at `L-1` and `L` agree: then `J^L`
/// lies in the ideal plus `J^{L+1}`, hence in the closed ideal, and the
/// truncated dimension is the true one.
pub fn truncated_quotient_dimension(q: &Quiver, generators: &[AlgebraElement], bound: usize) -> Result<DimensionResult> {
    if bound == 0 {
        return Err(Error::BoundTooSmall { bound, order: 1 });
    }
    let order = generators.iter().filter_map(AlgebraElement::order).max().unwrap_or(0);
    if bound < order {
        return Err(Error::BoundTooSmall { bound, order });
    }
    let ideal = TruncatedIdeal::build(q, generators, bound)?;
    let dims = ideal.quotient_dims();
    let (d, prev) = (dims[bound], dims[bound - 1]);
    Ok(if d == prev {
        DimensionResult::Finite { dim: d, certified_at: bound }
    } else {
        DimensionResult::UnknownAtBound { dim_at_bound: d, bound }
    })
}

/// Arrows that occur in some generator; used by callers for diagnostics.
#[allow(dead_code)]
pub(crate) fn support(generators: &[AlgebraElement]) -> BTreeSet<ArrowId> {
    generators.iter().flat_map(|g| g.terms().keys().flatten().cloned()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational;

    fn elem(q: &Quiver, paths: &[&[&str]]) -> AlgebraElement {
        AlgebraElement::from_paths(q, paths.iter().map(|p| (p.iter().map(|s| ArrowId::from(*s)).collect(), rational::int(1))).collect())
            .unwrap()
    }

    #[test]
    fn three_cycle_all_two_paths_killed() {
        let q = Quiver::from_triples([1, 2, 3], [("a", 1, 2), ("b", 2, 3), ("c", 3, 1)]).unwrap();
        let gens = vec![elem(&q, &[&["b", "c"]]), elem(&q, &[&["c", "a"]]), elem(&q, &[&["a", "b"]])];
        let r = truncated_quotient_dimension(&q, &gens, 3).unwrap();
        assert_eq!(r, DimensionResult::Finite { dim: 6, certified_at: 3 });
    }

    #[test]
    fn no_arrows() {
        let q = Quiver::from_edges([1, 2, 3, 4], &[]).unwrap();
        let r = truncated_quotient_dimension(&q, &[], 1).unwrap();
        assert_eq!(r, DimensionResult::Finite { dim: 4, certified_at: 1 });
    }

    #[test]
    fn free_algebra_is_not_certified() {
        let q = Quiver::from_triples([1], [("x", 1, 1)]).unwrap();
        let r = truncated_quotient_dimension(&q, &[], 5).unwrap();
        assert_eq!(r, DimensionResult::UnknownAtBound { dim_at_bound: 6, bound: 5 });
    }

    #[test]
    fn bound_too_small() {
        let q = Quiver::from_triples([1, 2, 3], [("a", 1, 2), ("b", 2, 3), ("c", 3, 1)]).unwrap();
        let gens = vec![elem(&q, &[&["a", "b", "c"]])];
        assert_eq!(truncated_quotient_dimension(&q, &gens, 2), Err(Error::BoundTooSmall { bound: 2, order: 3 }));
        assert!(matches!(truncated_quotient_dimension(&q, &[], 0), Err(Error::BoundTooSmall { .. })));
    }

    #[test]
    fn path_index_counts() {
        let q = Quiver::from_triples([1, 2], [("a", 1, 2), ("b", 1, 2)]).unwrap();
        let idx = PathIndex::build(&q, 3).unwrap();
        assert_eq!(idx.count_upto, vec![2, 4, 4, 4]);
    }
}
