//! Canonical keys for quivers, optionally decorated with arrow degrees and a
//! potential.
//!
//! Vertices are coloured by iterated neighbourhood refinement; the key is
//! the lexicographically least adjacency encoding over all vertex orders
//! compatible with the colouring, found by a pruned depth-first search.
//! When a potential is present, parallel arrows that occur in it are
//! additionally permuted and the least potential encoding wins.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use crate::path_algebra::Potential;
use crate::quiver::{ArrowId, Quiver, Vertex};
use crate::rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalForm {
    pub key: String,
    /// `vertex_order[k]` is the vertex placed at canonical position `k`.
    pub vertex_order: Vec<Vertex>,
    /// Arrows in canonical order.
    pub arrow_order: Vec<ArrowId>,
}

impl CanonicalForm {
    /// Vertex bijection `self -> other`, valid when the keys agree.
    pub fn vertex_map_to(&self, other: &CanonicalForm) -> BTreeMap<Vertex, Vertex> {
        self.vertex_order.iter().copied().zip(other.vertex_order.iter().copied()).collect()
    }

    pub fn arrow_map_to(&self, other: &CanonicalForm) -> BTreeMap<ArrowId, ArrowId> {
        self.arrow_order.iter().cloned().zip(other.arrow_order.iter().cloned()).collect()
    }
}

/// Key of the bare quiver: equal iff the quivers are isomorphic.
pub fn canonical_form(q: &Quiver) -> String {
    canonicalize(q, None, None).key
}

pub fn canonicalize(q: &Quiver, degrees: Option<&BTreeMap<ArrowId, i64>>, w: Option<&Potential>) -> CanonicalForm {
    Canon::new(q, degrees, w).run()
}

type Label = Vec<i64>;
type Block = Vec<i64>;

struct Canon<'a> {
    q: &'a Quiver,
    degrees: Option<&'a BTreeMap<ArrowId, i64>>,
    w: Option<&'a Potential>,
    n: usize,
    /// `lab[u][v]`: sorted degrees of the arrows `u -> v`
    lab: Vec<Vec<Label>>,
    colour: Vec<usize>,
    best: Option<Vec<Block>>,
    ties: Vec<Vec<usize>>,
}

impl<'a> Canon<'a> {
    fn new(q: &'a Quiver, degrees: Option<&'a BTreeMap<ArrowId, i64>>, w: Option<&'a Potential>) -> Self {
        let n = q.num_vertices();
        let mut lab = vec![vec![Label::new(); n]; n];
        for a in q.arrows() {
            let (s, t) = (q.vertex_index(a.source).unwrap(), q.vertex_index(a.target).unwrap());
            lab[s][t].push(degree(degrees, &a.id));
        }
        for row in &mut lab {
            for l in row {
                l.sort_unstable();
            }
        }
        let w = w.filter(|w| !w.is_zero());
        Canon { q, degrees, w, n, lab, colour: vec![0; n], best: None, ties: Vec::new() }
    }

    fn refine(&mut self) {
        let n = self.n;
        let mut colour: Vec<usize> = {
            let sig: Vec<&Label> = (0..n).map(|u| &self.lab[u][u]).collect();
            ranks(&sig)
        };
        loop {
            let sig: Vec<(usize, Vec<(usize, &Label, &Label)>)> = (0..n)
                .map(|u| {
                    let mut nb: Vec<(usize, &Label, &Label)> = (0..n)
                        .filter(|&v| v != u && (!self.lab[u][v].is_empty() || !self.lab[v][u].is_empty()))
                        .map(|v| (colour[v], &self.lab[u][v], &self.lab[v][u]))
                        .collect();
                    nb.sort();
                    (colour[u], nb)
                })
                .collect();
            let next = ranks(&sig);
            let classes = |c: &[usize]| c.iter().collect::<BTreeSet<_>>().len();
            let done = classes(&next) == classes(&colour);
            colour = next;
            if done {
                break;
            }
        }
        self.colour = colour;
    }

    fn block(&self, order: &[usize]) -> Block {
        let k = order.len() - 1;
        let v = order[k];
        let mut b = Vec::new();
        push_label(&mut b, &self.lab[v][v]);
        for &u in &order[..k] {
            push_label(&mut b, &self.lab[v][u]);
            push_label(&mut b, &self.lab[u][v]);
        }
        b
    }

    fn search(&mut self, slots: &[usize], order: &mut Vec<usize>, blocks: &mut Vec<Block>, used: &mut Vec<bool>) {
        let depth = order.len();
        if depth == self.n {
            match self.best.as_ref().map(|best| blocks[..].cmp(&best[..])) {
                Some(std::cmp::Ordering::Equal) => self.ties.push(order.clone()),
                Some(std::cmp::Ordering::Greater) => {}
                _ => {
                    self.best = Some(blocks.clone());
                    self.ties = vec![order.clone()];
                }
            }
            return;
        }
        for v in 0..self.n {
            if used[v] || self.colour[v] != slots[depth] {
                continue;
            }
            order.push(v);
            blocks.push(self.block(order));
            let prune = self.best.as_ref().is_some_and(|best| blocks[..] > best[..=depth]);
            if !prune {
                used[v] = true;
                self.search(slots, order, blocks, used);
                used[v] = false;
            }
            blocks.pop();
            order.pop();
        }
    }

    fn run(mut self) -> CanonicalForm {
        self.refine();
        let mut slots = self.colour.clone();
        slots.sort_unstable();
        let mut used = vec![false; self.n];
        self.search(&slots, &mut Vec::new(), &mut Vec::new(), &mut used);
        let best = self.best.take().unwrap_or_default();
        let mut key = format!("n{}", self.n);
        for b in &best {
            key.push('|');
            for (k, x) in b.iter().enumerate() {
                if k > 0 {
                    key.push(',');
                }
                write!(key, "{x}").unwrap();
            }
        }
        let ties = std::mem::take(&mut self.ties);
        let mut chosen: Option<(String, Vec<usize>, Vec<ArrowId>)> = None;
        for order in ties.iter() {
            let (wkey, arrows) = self.arrow_orders(order);
            if chosen.as_ref().map_or(true, |c| wkey < c.0) {
                chosen = Some((wkey, order.clone(), arrows));
            }
            if self.w.is_none() {
                break;
            }
        }
        let (wkey, order, arrow_order) = chosen.unwrap_or_default();
        if self.w.is_some() {
            key.push_str("|W");
            key.push_str(&wkey);
        }
        let vs = self.q.vertices();
        CanonicalForm { key, vertex_order: order.iter().map(|&k| vs[k]).collect(), arrow_order }
    }

    /// Best arrow order for a fixed vertex order and the resulting
    /// potential encoding.
    fn arrow_orders(&self, order: &[usize]) -> (String, Vec<ArrowId>) {
        let q = self.q;
        let mut pos = vec![0; self.n];
        for (k, &v) in order.iter().enumerate() {
            pos[v] = k;
        }
        let in_w: BTreeSet<&ArrowId> = self.w.map(|w| w.terms().keys().flat_map(|c| c.arrows()).collect()).unwrap_or_default();
        let mut groups: BTreeMap<(usize, usize, i64), (Vec<ArrowId>, Vec<ArrowId>)> = BTreeMap::new();
        for a in q.arrows() {
            let s = pos[q.vertex_index(a.source).unwrap()];
            let t = pos[q.vertex_index(a.target).unwrap()];
            let g = groups.entry((s, t, degree(self.degrees, &a.id))).or_default();
            if in_w.contains(&a.id) {
                g.0.push(a.id.clone());
            } else {
                g.1.push(a.id.clone());
            }
        }
        let groups: Vec<(Vec<ArrowId>, Vec<ArrowId>)> = groups.into_values().collect();
        let assemble = |perms: &[Vec<usize>]| -> Vec<ArrowId> {
            let mut out = Vec::new();
            for ((w, rest), p) in groups.iter().zip(perms) {
                out.extend(p.iter().map(|&k| w[k].clone()));
                out.extend(rest.iter().cloned());
            }
            out
        };
        let mut perms: Vec<Vec<usize>> = groups.iter().map(|g| (0..g.0.len()).collect()).collect();
        let Some(w) = self.w else {
            return (String::new(), assemble(&perms));
        };
        let mut best: Option<(String, Vec<ArrowId>)> = None;
        loop {
            let arrows = assemble(&perms);
            let idx: BTreeMap<&ArrowId, usize> = arrows.iter().enumerate().map(|(k, a)| (a, k)).collect();
            let mut terms: Vec<(Vec<usize>, String)> = w
                .terms()
                .iter()
                .map(|(c, x)| (min_rotation(c.arrows().iter().map(|a| idx[a]).collect()), rational::format(x)))
                .collect();
            terms.sort();
            let mut s = String::new();
            for (cyc, x) in &terms {
                s.push(';');
                for (k, i) in cyc.iter().enumerate() {
                    if k > 0 {
                        s.push('.');
                    }
                    write!(s, "{i}").unwrap();
                }
                write!(s, "={x}").unwrap();
            }
            if best.as_ref().map_or(true, |b| s < b.0) {
                best = Some((s, arrows));
            }
            // odometer over per-group permutations
            let mut g = 0;
            loop {
                if g == perms.len() {
                    return best.unwrap();
                }
                if next_permutation(&mut perms[g]) {
                    break;
                }
                g += 1;
            }
        }
    }
}

fn degree(degrees: Option<&BTreeMap<ArrowId, i64>>, a: &ArrowId) -> i64 {
    degrees.and_then(|d| d.get(a).copied()).unwrap_or(0)
}

fn push_label(b: &mut Block, l: &Label) {
    b.push(l.len() as i64);
    b.extend_from_slice(l);
}

fn ranks<T: Ord>(sig: &[T]) -> Vec<usize> {
    let sorted: BTreeSet<&T> = sig.iter().collect();
    let index: BTreeMap<&T, usize> = sorted.into_iter().enumerate().map(|(k, s)| (s, k)).collect();
    sig.iter().map(|s| index[s]).collect()
}

fn min_rotation(seq: Vec<usize>) -> Vec<usize> {
    (0..seq.len()).map(|r| [&seq[r..], &seq[..r]].concat()).min().unwrap_or(seq)
}

/// Advances to the next permutation in lexicographic order; on the last one
/// resets to the first and returns false.
fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        p.reverse();
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}
