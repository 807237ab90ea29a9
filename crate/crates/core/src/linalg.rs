//! Fraction-free sparse row echelon forms over the integers.
//!
//! Rows are kept primitive (content 1, positive leading coefficient). The
//! leading column of a row is its smallest column index, and the basis is
//! kept fully reduced, so the non-pivot columns give a complement basis.

use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SparseRow {
    entries: Vec<(usize, BigInt)>,
}

impl SparseRow {
    /// Builds a row from unsorted entries; duplicate columns are summed and
    /// zeros dropped.
    pub fn from_entries(mut entries: Vec<(usize, BigInt)>) -> Self {
        entries.sort_by_key(|e| e.0);
        let mut out: Vec<(usize, BigInt)> = Vec::with_capacity(entries.len());
        for (c, v) in entries {
            match out.last_mut() {
                Some((lc, lv)) if *lc == c => *lv += v,
                _ => out.push((c, v)),
            }
        }
        out.retain(|(_, v)| !v.is_zero());
        SparseRow { entries: out }
    }

    /// Clears denominators of a rational row.
    pub fn from_rationals(entries: Vec<(usize, Rational)>) -> Self {
        let lcm = entries.iter().fold(BigInt::one(), |acc, (_, q)| acc.lcm(q.denom()));
        SparseRow::from_entries(
            entries
                .into_iter()
                .map(|(c, q)| (c, q.numer() * (&lcm / q.denom())))
                .collect(),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn leading(&self) -> Option<usize> {
        self.entries.first().map(|e| e.0)
    }

    pub fn entries(&self) -> &[(usize, BigInt)] {
        &self.entries
    }

    /// `a * self - b * other`.
    fn combine(&self, a: &BigInt, other: &SparseRow, b: &BigInt) -> SparseRow {
        let (x, y) = (&self.entries, &other.entries);
        let mut out = Vec::with_capacity(x.len() + y.len());
        let (mut i, mut j) = (0, 0);
        while i < x.len() || j < y.len() {
            let take_x = j >= y.len() || (i < x.len() && x[i].0 < y[j].0);
            let take_y = i >= x.len() || (j < y.len() && y[j].0 < x[i].0);
            if take_x {
                out.push((x[i].0, a * &x[i].1));
                i += 1;
            } else if take_y {
                out.push((y[j].0, -(b * &y[j].1)));
                j += 1;
            } else {
                let v = a * &x[i].1 - b * &y[j].1;
                if !v.is_zero() {
                    out.push((x[i].0, v));
                }
                i += 1;
                j += 1;
            }
        }
        SparseRow { entries: out }
    }

    fn make_primitive(&mut self) {
        let Some(first) = self.entries.first() else { return };
        let mut g = first.1.abs();
        for (_, v) in &self.entries[1..] {
            if g.is_one() {
                break;
            }
            g = g.gcd(v);
        }
        if first.1.is_negative() {
            g = -g;
        }
        if !g.is_one() {
            for (_, v) in &mut self.entries {
                *v /= &g;
            }
        }
    }
}

/// Reduced row echelon basis: every row is zero in the leading columns of
/// the other rows.
#[derive(Debug, Clone, Default)]
pub struct Echelon {
    rows: Vec<SparseRow>,
    pivot_of: HashMap<usize, usize>,
    /// rows with a non-zero entry in each non-pivot column
    users: HashMap<usize, HashSet<usize>>,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    /// Reduces `row` against the basis; if something survives it becomes a
    /// new basis row and its index is returned. Existing rows keep their
    /// leading columns but are cleared in the new one.
    pub fn insert(&mut self, mut row: SparseRow) -> Option<usize> {
        let hits: Vec<usize> = row.entries.iter().filter_map(|(c, _)| self.pivot_of.get(c).copied()).collect();
        for p in hits {
            let pivot = &self.rows[p];
            let col = pivot.entries[0].0;
            let Ok(k) = row.entries.binary_search_by_key(&col, |e| e.0) else { continue };
            let (a, b) = (&pivot.entries[0].1, &row.entries[k].1);
            let g = a.gcd(b);
            let (ca, cb) = (a / &g, b / &g);
            row = row.combine(&ca, pivot, &cb);
        }
        let lead = row.leading()?;
        row.make_primitive();
        let idx = self.rows.len();
        for j in self.users.remove(&lead).unwrap_or_default() {
            let old = std::mem::take(&mut self.rows[j]);
            let k = old.entries.binary_search_by_key(&lead, |e| e.0).expect("column is used by the row");
            let (a, b) = (&row.entries[0].1, &old.entries[k].1);
            let g = a.gcd(b);
            let mut next = old.combine(&(a / &g), &row, &(b / &g));
            next.make_primitive();
            for (c, _) in &old.entries[1..] {
                if let Some(u) = self.users.get_mut(c) {
                    u.remove(&j);
                }
            }
            for (c, _) in &next.entries[1..] {
                self.users.entry(*c).or_default().insert(j);
            }
            self.rows[j] = next;
        }
        for (c, _) in &row.entries[1..] {
            self.users.entry(*c).or_default().insert(idx);
        }
        self.rows.push(row);
        self.pivot_of.insert(lead, idx);
        Some(idx)
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[SparseRow] {
        &self.rows
    }

    pub fn row(&self, k: usize) -> &SparseRow {
        &self.rows[k]
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.pivot_of.contains_key(&col)
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.iter().map(|r| r.entries[0].0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(v: &[(usize, i64)]) -> SparseRow {
        SparseRow::from_entries(v.iter().map(|&(c, x)| (c, BigInt::from(x))).collect())
    }

    #[test]
    fn rank_of_dependent_rows() {
        let mut e = Echelon::new();
        assert!(e.insert(row(&[(0, 2), (1, 4)])).is_some());
        assert!(e.insert(row(&[(1, 3), (2, 1)])).is_some());
        assert!(e.insert(row(&[(0, 1), (1, 5), (2, 1)])).is_none());
        assert!(e.insert(row(&[])).is_none());
        assert_eq!(e.rank(), 2);
        assert!(e.is_pivot(0) && e.is_pivot(1) && !e.is_pivot(2));
        // stored rows are primitive
        for r in e.rows() {
            assert!(r.entries().iter().fold(BigInt::zero(), |g, (_, v)| g.gcd(v)).is_one());
            assert!(r.entries()[0].1.is_positive());
        }
    }

    #[test]
    fn basis_stays_reduced() {
        let mut e = Echelon::new();
        e.insert(row(&[(1, 1), (2, 1), (4, 3)]));
        e.insert(row(&[(2, 2), (3, 1)]));
        e.insert(row(&[(0, 1), (1, 1), (3, 5)]));
        e.insert(row(&[(3, 1), (4, 1)]));
        let leads: Vec<usize> = e.pivots().collect();
        assert_eq!(leads, vec![1, 2, 0, 3]);
        for r in e.rows() {
            for (c, _) in &r.entries()[1..] {
                assert!(!e.is_pivot(*c), "{r:?} uses pivot column {c}");
            }
        }
        // r1 + 2 r3 - r4
        assert!(e.insert(row(&[(0, 2), (1, 3), (2, 1), (3, 9), (4, 2)])).is_none());
    }

    #[test]
    fn rational_rows_clear_denominators() {
        let r = SparseRow::from_rationals(vec![(3, Rational::new(1.into(), 2.into())), (5, Rational::new(1.into(), 3.into()))]);
        assert_eq!(r.entries(), &[(3, BigInt::from(3)), (5, BigInt::from(2))]);
    }
}
