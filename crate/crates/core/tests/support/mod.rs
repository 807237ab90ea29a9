// Naive reimplementations used as oracles by the test suites: brute-force
// path enumeration with dense rational elimination for Jacobian dimensions,
// and recursive enumeration of polygon triangulations.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use qpmut_core::{rational, AlgebraElement, ArrowId, Potential, Qp, Quiver, Rational};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct P {
    pub start: u32,
    pub end: u32,
    pub arrows: Vec<usize>,
}

pub fn all_paths(q: &Quiver, max_len: usize) -> Vec<P> {
    let mut out: Vec<P> = q.vertices().iter().map(|&v| P { start: v, end: v, arrows: vec![] }).collect();
    let mut layer = out.clone();
    for _ in 0..max_len {
        let mut next = Vec::new();
        for p in &layer {
            for (k, a) in q.arrows().iter().enumerate() {
                if a.source == p.end {
                    let mut arrows = p.arrows.clone();
                    arrows.push(k);
                    next.push(P { start: p.start, end: a.target, arrows });
                }
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

pub fn concat(a: &P, b: &P) -> Option<P> {
    (a.end == b.start).then(|| P { start: a.start, end: b.end, arrows: a.arrows.iter().chain(&b.arrows).copied().collect() })
}

/// `∂_a W`: for each occurrence of `a` in a cycle, the rest of the cycle read
/// from just after `a`.
pub fn derivative(q: &Quiver, w: &Potential, a: usize) -> BTreeMap<P, Rational> {
    let idx = |id: &ArrowId| q.arrows().iter().position(|x| &x.id == id).unwrap();
    let mut out: BTreeMap<P, Rational> = BTreeMap::new();
    for (c, coeff) in w.terms() {
        let word: Vec<usize> = c.arrows().iter().map(idx).collect();
        for k in 0..word.len() {
            if word[k] != a {
                continue;
            }
            let rest: Vec<usize> = word[k + 1..].iter().chain(&word[..k]).copied().collect();
            let (s, t) = (q.arrows()[a].target, q.arrows()[a].source);
            *out.entry(P { start: s, end: t, arrows: rest }).or_insert_with(Rational::zero) += coeff;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

pub fn rank(mut rows: Vec<Vec<Rational>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = Rational::one() / rows[r][c].clone();
        let pivot: Vec<Rational> = rows[r].iter().map(|x| x * &inv).collect();
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in c..cols {
                    let d = &f * &pivot[j];
                    rows[i][j] -= d;
                }
            }
        }
        rows[r] = pivot;
        r += 1;
    }
    r
}

/// `dim kQ/(I + J^{k+1})` for `k = bound-1` and `k = bound`.
pub fn oracle_dims(q: &Quiver, gens: &[BTreeMap<P, Rational>], bound: usize) -> (usize, usize) {
    let paths = all_paths(q, bound);
    let col: BTreeMap<&P, usize> = paths.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let mut rows = Vec::new();
    for g in gens {
        let shortest = g.keys().map(|p| p.arrows.len()).min().unwrap_or(0);
        for u in paths.iter().filter(|u| u.arrows.len() + shortest <= bound) {
            for v in paths.iter().filter(|v| u.arrows.len() + v.arrows.len() + shortest <= bound) {
                let mut row = vec![Rational::zero(); paths.len()];
                let mut any = false;
                for (p, c) in g {
                    if let Some(x) = concat(u, p).and_then(|x| concat(&x, v)) {
                        if x.arrows.len() <= bound {
                            row[col[&x]] += c;
                            any = true;
                        }
                    }
                }
                if any && row.iter().any(|x| !x.is_zero()) {
                    rows.push(row);
                }
            }
        }
    }
    let dim_at = |k: usize| {
        let keep: Vec<usize> = (0..paths.len()).filter(|&i| paths[i].arrows.len() <= k).collect();
        let projected: Vec<Vec<Rational>> = rows.iter().map(|r| keep.iter().map(|&i| r[i].clone()).collect()).collect();
        keep.len() - rank(projected)
    };
    (dim_at(bound - 1), dim_at(bound))
}

pub fn cycles(q: &Quiver, max_len: usize) -> Vec<Vec<usize>> {
    let mut out = BTreeSet::new();
    for p in all_paths(q, max_len) {
        if !p.arrows.is_empty() && p.start == p.end {
            let n = p.arrows.len();
            let rot = (0..n).map(|k| p.arrows[k..].iter().chain(&p.arrows[..k]).copied().collect::<Vec<_>>()).min().unwrap();
            out.insert(rot);
        }
    }
    out.into_iter().collect()
}

pub fn random_qp(rng: &mut ChaCha8Rng) -> Qp {
    let n = rng.gen_range(1..=4u32);
    let m = rng.gen_range(0..=5);
    let mut edges = Vec::new();
    if n > 1 && rng.gen_bool(0.5) {
        edges.extend((1..=n).map(|v| (v, v % n + 1)));
    }
    for _ in 0..m {
        let (s, t) = (rng.gen_range(1..=n), rng.gen_range(1..=n));
        if s != t {
            edges.push((s, t));
        }
    }
    let q = Quiver::from_edges(1..=n, &edges).unwrap();
    let coeffs = ["1", "-1", "2", "1/2", "-3"];
    let mut terms = Vec::new();
    for c in cycles(&q, 4) {
        if c.len() >= 2 && rng.gen_bool(0.6) {
            let ids = c.iter().map(|&k| q.arrows()[k].id.clone()).collect();
            terms.push((ids, rational::parse(coeffs[rng.gen_range(0..coeffs.len())]).unwrap()));
        }
    }
    Qp::new(q, Potential::new(terms, 12).unwrap()).unwrap()
}


/// All triangulations of the convex polygon on corners `lo..=hi`, as sets
/// of diagonals.
pub fn triangulations(lo: usize, hi: usize, n: usize) -> Vec<BTreeSet<(usize, usize)>> {
    if hi - lo < 2 {
        return vec![BTreeSet::new()];
    }
    let mut out = Vec::new();
    for k in lo + 1..hi {
        for left in triangulations(lo, k, n) {
            for right in triangulations(k, hi, n) {
                let mut s: BTreeSet<(usize, usize)> = left.union(&right).copied().collect();
                for (a, b) in [(lo, k), (k, hi)] {
                    if b - a > 1 && !(a == 0 && b == n - 1) {
                        s.insert((a, b));
                    }
                }
                out.push(s);
            }
        }
    }
    out
}

pub fn crosses((a, b): (usize, usize), (c, d): (usize, usize)) -> bool {
    (a < c && c < b && b < d) || (c < a && a < d && d < b)
}


/// An algebra element as a combination of oracle paths.
pub fn element(q: &Quiver, e: &AlgebraElement) -> BTreeMap<P, Rational> {
    let idx = |id: &ArrowId| q.arrows().iter().position(|x| &x.id == id).unwrap();
    e.terms()
        .iter()
        .map(|(p, c)| {
            let arrows: Vec<usize> = p.iter().map(idx).collect();
            (P { start: e.source, end: e.target, arrows }, c.clone())
        })
        .collect()
}
