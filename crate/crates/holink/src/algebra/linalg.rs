//! Sparse exact linear algebra over the rationals: rank, reduced row
//! echelon form, and nullspace bases.  Rows are sparse maps from column
//! index to coefficient; elimination pivots on the sparsest available row
//! per column (a light Markowitz rule) for speed, with fully deterministic
//! tie-breaking so results are reproducible.

use super::{rat, Rat};
use num_traits::Zero;
use std::collections::BTreeMap;

pub type Row = BTreeMap<usize, Rat>;

#[derive(Debug, Clone)]
pub struct SparseMat {
    pub ncols: usize,
    pub rows: Vec<Row>,
}

impl SparseMat {
    pub fn new(ncols: usize) -> SparseMat {
        SparseMat { ncols, rows: Vec::new() }
    }

    pub fn push_row(&mut self, row: Row) {
        debug_assert!(row.keys().all(|&c| c < self.ncols));
        self.rows.push(row);
    }

    pub fn push_dense_row(&mut self, coeffs: &[Rat]) {
        debug_assert_eq!(coeffs.len(), self.ncols);
        let row: Row = coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (i, c.clone()))
            .collect();
        self.rows.push(row);
    }

    /// Reduced row echelon form: returns (reduced nonzero rows in pivot
    /// order, pivot column per row).
    pub fn rref(&self) -> (Vec<Row>, Vec<usize>) {
        let mut work: Vec<Row> = self.rows.iter().filter(|r| !r.is_empty()).cloned().collect();
        let mut echelon: Vec<Row> = Vec::new();
        let mut pivots: Vec<usize> = Vec::new();
        for col in 0..self.ncols {
            // Pick the sparsest remaining row with a nonzero in this column.
            let candidate = work
                .iter()
                .enumerate()
                .filter(|(_, r)| r.contains_key(&col))
                .min_by_key(|(i, r)| (r.len(), *i))
                .map(|(i, _)| i);
            let Some(pi) = candidate else { continue };
            let mut pivot = work.swap_remove(pi);
            let inv = pivot[&col].clone().recip();
            for v in pivot.values_mut() {
                *v *= inv.clone();
            }
            for r in work.iter_mut() {
                if let Some(f) = r.get(&col).cloned() {
                    eliminate(r, &pivot, &f);
                }
            }
            work.retain(|r| !r.is_empty());
            echelon.push(pivot);
            pivots.push(col);
        }
        // Back-substitute to reach reduced form.
        for i in (0..echelon.len()).rev() {
            let pivot = echelon[i].clone();
            let col = pivots[i];
            for j in 0..i {
                if let Some(f) = echelon[j].get(&col).cloned() {
                    eliminate(&mut echelon[j], &pivot, &f);
                }
            }
        }
        (echelon, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().0.len()
    }

    /// Basis of the right nullspace as dense vectors, one per non-pivot
    /// column, in column order; the free coordinate of each vector is 1.
    pub fn nullspace(&self) -> Vec<Vec<Rat>> {
        let (rows, pivots) = self.rref();
        let is_pivot: Vec<bool> = {
            let mut b = vec![false; self.ncols];
            for &p in &pivots {
                b[p] = true;
            }
            b
        };
        let mut basis = Vec::new();
        for free in 0..self.ncols {
            if is_pivot[free] {
                continue;
            }
            let mut v = vec![rat(0); self.ncols];
            v[free] = rat(1);
            for (row, &p) in rows.iter().zip(&pivots) {
                if let Some(c) = row.get(&free) {
                    v[p] = -c.clone();
                }
            }
            basis.push(v);
        }
        basis
    }
}

/// `row -= f * pivot` (pivot is monic in its pivot column).
fn eliminate(row: &mut Row, pivot: &Row, f: &Rat) {
    for (&c, pv) in pivot {
        let delta = f.clone() * pv.clone();
        let entry = row.entry(c).or_insert_with(|| rat(0));
        *entry -= delta;
        if entry.is_zero() {
            row.remove(&c);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(entries: &[(usize, i64)]) -> Row {
        entries.iter().map(|&(c, v)| (c, rat(v))).collect()
    }

    #[test]
    fn rank_and_nullspace() {
        let mut m = SparseMat::new(3);
        m.push_row(row(&[(0, 1), (1, 2), (2, 3)]));
        m.push_row(row(&[(0, 2), (1, 4), (2, 6)]));
        m.push_row(row(&[(1, 1), (2, 1)]));
        assert_eq!(m.rank(), 2);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 1);
        // Verify the nullspace vector annihilates every row.
        for r in &m.rows {
            let dot: Rat = r.iter().map(|(&c, v)| v.clone() * ns[0][c].clone()).sum();
            assert!(dot.is_zero());
        }
    }

    #[test]
    fn full_rank_empty_nullspace() {
        let mut m = SparseMat::new(2);
        m.push_row(row(&[(0, 1)]));
        m.push_row(row(&[(1, 5)]));
        assert_eq!(m.rank(), 2);
        assert!(m.nullspace().is_empty());
    }

    #[test]
    fn rref_is_reduced() {
        let mut m = SparseMat::new(3);
        m.push_row(row(&[(0, 2), (1, 2)]));
        m.push_row(row(&[(1, 3), (2, 3)]));
        let (rows, pivots) = m.rref();
        assert_eq!(pivots, vec![0, 1]);
        // Each pivot column appears in exactly one row, with coefficient 1.
        for (i, &p) in pivots.iter().enumerate() {
            assert_eq!(rows[i][&p], rat(1));
            for (j, r) in rows.iter().enumerate() {
                if j != i {
                    assert!(!r.contains_key(&p));
                }
            }
        }
    }

    #[test]
    fn zero_matrix() {
        let m = SparseMat::new(4);
        assert_eq!(m.rank(), 0);
        assert_eq!(m.nullspace().len(), 4);
    }
}
