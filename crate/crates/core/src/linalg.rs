//! Sparse row echelon form over a [`Scalar`] field.
//!
//! Rows are sorted `(column, value)` lists. Exact rows are kept as coprime
//! integer vectors and combined by cross-multiplication
//! (`t ← p_lead·t − t_lead·p`), so rationals never accumulate denominators.

use std::collections::BTreeMap;

use crate::scalar::Scalar;

pub type SparseRow<S> = Vec<(usize, S)>;

/// `a·t − b·p`, merged by column.
fn combine<S: Scalar>(t: &[(usize, S)], a: &S, p: &[(usize, S)], b: &S) -> SparseRow<S> {
    let mut out = Vec::with_capacity(t.len() + p.len());
    let (mut i, mut j) = (0, 0);
    while i < t.len() || j < p.len() {
        let ct = t.get(i).map_or(usize::MAX, |e| e.0);
        let cp = p.get(j).map_or(usize::MAX, |e| e.0);
        let (col, v) = if ct < cp {
            i += 1;
            (ct, t[i - 1].1.mul(a))
        } else if cp < ct {
            j += 1;
            (cp, p[j - 1].1.mul(b).neg())
        } else {
            i += 1;
            j += 1;
            (ct, t[i - 1].1.mul(a).sub(&p[j - 1].1.mul(b)))
        };
        if !v.negligible() {
            out.push((col, v));
        }
    }
    out
}

/// Sorts by column and merges duplicates.
pub fn canonical_row<S: Scalar>(mut row: SparseRow<S>) -> SparseRow<S> {
    row.sort_by_key(|e| e.0);
    let mut out: SparseRow<S> = Vec::with_capacity(row.len());
    for (c, v) in row {
        match out.last_mut() {
            Some(last) if last.0 == c => last.1 = last.1.add(&v),
            _ => out.push((c, v)),
        }
    }
    out.retain(|e| !e.1.negligible());
    out
}

/// Incrementally built echelon form; each stored row has a distinct leading column.
#[derive(Clone, Debug)]
pub struct Echelon<S> {
    ncols: usize,
    pivots: BTreeMap<usize, SparseRow<S>>,
}

impl<S: Scalar> Echelon<S> {
    pub fn new(ncols: usize) -> Self {
        Echelon {
            ncols,
            pivots: BTreeMap::new(),
        }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivot_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivots.keys().copied()
    }

    /// Eliminates every column of `row` that has a pivot.
    pub fn reduce(&self, row: SparseRow<S>) -> SparseRow<S> {
        let mut t = canonical_row(row);
        S::normalize_row(&mut t);
        let mut pos = 0;
        while pos < t.len() {
            let col = t[pos].0;
            match self.pivots.get(&col) {
                Some(p) => {
                    let a = p[0].1.clone();
                    let b = t[pos].1.clone();
                    t = combine(&t, &a, p, &b);
                    S::normalize_row(&mut t);
                    // entries before `col` are unchanged by the update
                    pos = t.partition_point(|e| e.0 < col);
                }
                None => pos += 1,
            }
        }
        t
    }

    /// Adds a row; returns true when the rank grew.
    pub fn insert(&mut self, row: SparseRow<S>) -> bool {
        let t = self.reduce(row);
        match t.first() {
            Some(&(col, _)) => {
                self.pivots.insert(col, t);
                true
            }
            None => false,
        }
    }

    pub fn contains(&self, row: SparseRow<S>) -> bool {
        self.reduce(row).is_empty()
    }

    /// Basis of {v : row·v = 0 for every inserted row}.
    pub fn nullspace(&self) -> Vec<SparseRow<S>> {
        // back-substitute to reduced form, highest pivot first
        let mut reduced: BTreeMap<usize, SparseRow<S>> = BTreeMap::new();
        for (&col, row) in self.pivots.iter().rev() {
            let mut t = row.clone();
            let mut pos = 1;
            while pos < t.len() {
                let c = t[pos].0;
                match reduced.get(&c) {
                    Some(p) => {
                        let a = p[0].1.clone();
                        let b = t[pos].1.clone();
                        t = combine(&t, &a, p, &b);
                        S::normalize_row(&mut t);
                        pos = t.partition_point(|e| e.0 <= c);
                    }
                    None => pos += 1,
                }
            }
            debug_assert_eq!(t[0].0, col);
            reduced.insert(col, t);
        }
        let mut basis: BTreeMap<usize, SparseRow<S>> = (0..self.ncols)
            .filter(|c| !self.pivots.contains_key(c))
            .map(|c| (c, vec![(c, S::one())]))
            .collect();
        for (&col, row) in &reduced {
            let lead = &row[0].1;
            for (f, v) in &row[1..] {
                if let Some(vec) = basis.get_mut(f) {
                    vec.push((col, v.div(lead).neg()));
                }
            }
        }
        basis
            .into_values()
            .map(|v| {
                let mut v = canonical_row(v);
                S::normalize_row(&mut v);
                v
            })
            .collect()
    }
}

pub fn echelon<S: Scalar>(rows: impl IntoIterator<Item = SparseRow<S>>, ncols: usize) -> Echelon<S> {
    let mut rows: Vec<SparseRow<S>> = rows.into_iter().collect();
    // short rows first keeps fill-in low
    rows.sort_by_key(|r| r.len());
    let mut e = Echelon::new(ncols);
    for r in rows {
        e.insert(r);
    }
    e
}

pub fn rank<S: Scalar>(rows: impl IntoIterator<Item = SparseRow<S>>, ncols: usize) -> usize {
    echelon(rows, ncols).rank()
}

pub fn nullspace<S: Scalar>(rows: impl IntoIterator<Item = SparseRow<S>>, ncols: usize) -> Vec<SparseRow<S>> {
    echelon(rows, ncols).nullspace()
}

/// Ranks of two row sets and of their union.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct SpanComparison {
    pub rank_left: usize,
    pub rank_right: usize,
    pub rank_union: usize,
}

impl SpanComparison {
    pub fn equal(&self) -> bool {
        self.rank_left == self.rank_union && self.rank_right == self.rank_union
    }

    pub fn left_in_right(&self) -> bool {
        self.rank_right == self.rank_union
    }
}

pub fn compare_spans<S: Scalar>(left: &[SparseRow<S>], right: &[SparseRow<S>], ncols: usize) -> SpanComparison {
    let l = echelon(left.iter().cloned(), ncols);
    let r = echelon(right.iter().cloned(), ncols);
    let mut u = r.clone();
    for row in left {
        u.insert(row.clone());
    }
    SpanComparison {
        rank_left: l.rank(),
        rank_right: r.rank(),
        rank_union: u.rank(),
    }
}

/// Coefficients c with Σ c_i basis_i = target, or None when target is outside the span.
///
/// Each basis row is tagged with a unit column past `ncols` and the target with
/// one more, so the reduced target reads off the combination directly.
pub fn express_in_span<S: Scalar>(basis: &[SparseRow<S>], target: &SparseRow<S>, ncols: usize) -> Option<Vec<S>> {
    let n = basis.len();
    let mut e = Echelon::new(ncols + n + 1);
    for (i, row) in basis.iter().enumerate() {
        let mut r = canonical_row(row.clone());
        r.push((ncols + i, S::one()));
        e.insert(r);
    }
    let mut t = canonical_row(target.clone());
    t.push((ncols + n, S::one()));
    let r = e.reduce(t);
    if r.first().is_some_and(|(c, _)| *c < ncols) {
        return None;
    }
    let scale = r.iter().find(|(c, _)| *c == ncols + n).map(|(_, v)| v.clone())?;
    let mut out = vec![S::zero(); n];
    for (c, v) in &r {
        if *c >= ncols && *c < ncols + n {
            out[c - ncols] = v.div(&scale).neg();
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rat;
    use proptest::prelude::*;

    #[test]
    fn span_expansion() {
        let basis = vec![r(&[1, 1, 0]), r(&[0, 1, 1])];
        let c = express_in_span(&basis, &r(&[2, 5, 3]), 3).unwrap();
        assert_eq!(c, vec![Rat::from_i64(2), Rat::from_i64(3)]);
        assert!(express_in_span(&basis, &r(&[1, 0, 0]), 3).is_none());
        assert_eq!(
            express_in_span(&basis, &r(&[0, 0, 0]), 3).unwrap(),
            vec![Rat::from_i64(0); 2]
        );
    }

    fn r(v: &[i64]) -> SparseRow<Rat> {
        v.iter()
            .enumerate()
            .filter(|(_, x)| **x != 0)
            .map(|(i, x)| (i, Rat::from_i64(*x)))
            .collect()
    }

    #[test]
    fn rank_and_nullspace_small() {
        let rows = vec![r(&[1, 2, 3]), r(&[2, 4, 6]), r(&[0, 1, 1])];
        let e = echelon(rows.clone(), 3);
        assert_eq!(e.rank(), 2);
        let ns = e.nullspace();
        assert_eq!(ns.len(), 1);
        // (1, 1, -1) up to scale
        assert_eq!(ns[0], r(&[1, 1, -1]));
    }

    #[test]
    fn span_comparison() {
        let a = vec![r(&[1, 1, 0]), r(&[0, 1, 1])];
        let b = vec![r(&[1, 2, 1]), r(&[1, 0, -1])];
        assert!(compare_spans(&a, &b, 3).equal());
        let c = vec![r(&[1, 2, 1]), r(&[1, 0, 1])];
        assert!(!compare_spans(&a, &c, 3).equal());
    }

    #[test]
    fn float_mode_handles_irrational_entries() {
        let s = 3f64.sqrt() / 2.0;
        let rows = vec![
            vec![(0, s), (1, 0.5)],
            vec![(0, 2.0 * s), (1, 1.0)],
            vec![(1, 1.0), (2, -s)],
        ];
        let e = echelon(rows, 3);
        assert_eq!(e.rank(), 2);
        assert_eq!(e.nullspace().len(), 1);
    }

    fn dense_rank_oracle(m: &[Vec<i64>]) -> usize {
        // plain dense Gaussian elimination over rationals
        let mut a: Vec<Vec<Rat>> = m
            .iter()
            .map(|r| r.iter().map(|&x| Rat::from_i64(x)).collect())
            .collect();
        let (rows, cols) = (a.len(), a.first().map_or(0, |r| r.len()));
        let mut rank = 0;
        for c in 0..cols {
            let Some(p) = (rank..rows).find(|&i| !num_traits::Zero::is_zero(&a[i][c])) else {
                continue;
            };
            a.swap(rank, p);
            for i in 0..rows {
                if i != rank && !num_traits::Zero::is_zero(&a[i][c]) {
                    let f = &a[i][c] / &a[rank][c];
                    for k in 0..cols {
                        let d = &f * &a[rank][k];
                        a[i][k] -= d;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    proptest! {
        #[test]
        fn rank_matches_dense_oracle(m in proptest::collection::vec(proptest::collection::vec(-3i64..4, 6), 1..8)) {
            let rows: Vec<_> = m.iter().map(|v| r(v)).collect();
            let e = echelon(rows.clone(), 6);
            prop_assert_eq!(e.rank(), dense_rank_oracle(&m));
            let ns = e.nullspace();
            prop_assert_eq!(ns.len() + e.rank(), 6);
            for v in &ns {
                let mut dense = vec![Rat::from_i64(0); 6];
                for (c, x) in v { dense[*c] = x.clone(); }
                for row in &rows {
                    let s = row.iter().fold(Rat::from_i64(0), |acc, (c, x)| acc + x * &dense[*c]);
                    prop_assert!(num_traits::Zero::is_zero(&s));
                }
            }
        }
    }
}
