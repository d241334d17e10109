use num_traits::{One, Zero};

use super::scalar::Scalar;

/// Dense matrix over the rationals, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMatrix {
    rows: Vec<Vec<Scalar>>,
    ncols: usize,
}

impl QMatrix {
    pub fn new(ncols: usize) -> Self {
        Self { rows: Vec::new(), ncols }
    }

    pub fn from_rows(ncols: usize, rows: Vec<Vec<Scalar>>) -> Self {
        assert!(rows.iter().all(|r| r.len() == ncols), "ragged matrix");
        Self { rows, ncols }
    }

    pub fn push_row(&mut self, row: Vec<Scalar>) {
        assert_eq!(row.len(), self.ncols, "row length");
        self.rows.push(row);
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rows(&self) -> &[Vec<Scalar>] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<Vec<Scalar>> {
        self.rows
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    /// The first nonzero entry in a column is always the pivot, so the result
    /// depends only on the row space and the column order.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.ncols {
            if r == self.rows.len() {
                break;
            }
            let Some(p) = (r..self.rows.len()).find(|&i| !self.rows[i][c].is_zero()) else {
                continue;
            };
            self.rows.swap(r, p);
            let inv = self.rows[r][c].recip();
            if !inv.is_one() {
                for v in self.rows[r][c..].iter_mut() {
                    *v *= &inv;
                }
            }
            let pivot_row = self.rows[r].clone();
            for (i, row) in self.rows.iter_mut().enumerate() {
                if i == r || row[c].is_zero() {
                    continue;
                }
                let f = row[c].clone();
                for (v, pv) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                    if !pv.is_zero() {
                        *v -= &f * pv;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        self.rows.truncate(r.max(pivots.len()));
        self.rows.retain(|row| row.iter().any(|v| !v.is_zero()));
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Basis of `{ v : A v = 0 }`, one vector per free column, with a `1` in
    /// that free column.
    pub fn nullspace(&self) -> Vec<Vec<Scalar>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let free: Vec<usize> = (0..self.ncols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Scalar::zero(); self.ncols];
                v[f] = Scalar::one();
                for (row, &p) in m.rows.iter().zip(&pivots) {
                    v[p] = -row[f].clone();
                }
                v
            })
            .collect()
    }
}

/// Rank of the span of a set of vectors of equal length.
pub fn rank_of(vectors: &[Vec<Scalar>]) -> usize {
    let Some(first) = vectors.first() else { return 0 };
    QMatrix::from_rows(first.len(), vectors.to_vec()).rank()
}

/// Indices of a maximal independent subset, chosen greedily in the given order.
pub fn independent_subset(vectors: &[Vec<Scalar>]) -> Vec<usize> {
    let mut basis = IncrementalBasis::default();
    vectors
        .iter()
        .enumerate()
        .filter_map(|(i, v)| basis.insert(v.clone()).then_some(i))
        .collect()
}

/// Fully reduced echelon basis that grows one vector at a time.
#[derive(Clone, Debug, Default)]
pub struct IncrementalBasis {
    rows: Vec<(usize, Vec<Scalar>)>,
}

impl IncrementalBasis {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Reduces `v` against the basis; the remainder is zero iff `v` is in the span.
    pub fn reduce(&self, mut v: Vec<Scalar>) -> Vec<Scalar> {
        for (p, row) in &self.rows {
            if v[*p].is_zero() {
                continue;
            }
            let f = v[*p].clone();
            for (a, b) in v.iter_mut().zip(row) {
                if !b.is_zero() {
                    *a -= &f * b;
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        self.reduce(v.to_vec()).iter().all(Zero::is_zero)
    }

    /// Adds `v` if it is independent of the current basis; reports whether it was.
    pub fn insert(&mut self, v: Vec<Scalar>) -> bool {
        let mut v = self.reduce(v);
        let Some(p) = v.iter().position(|a| !a.is_zero()) else {
            return false;
        };
        let inv = v[p].recip();
        v.iter_mut().for_each(|a| *a *= &inv);
        for (_, row) in self.rows.iter_mut() {
            if row[p].is_zero() {
                continue;
            }
            let f = row[p].clone();
            for (a, b) in row.iter_mut().zip(&v) {
                if !b.is_zero() {
                    *a -= &f * b;
                }
            }
        }
        self.rows.push((p, v));
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::scalar::{q, qi};

    fn row(v: &[i64]) -> Vec<Scalar> {
        v.iter().map(|&a| qi(a)).collect()
    }

    #[test]
    fn rank_and_nullspace() {
        let m = QMatrix::from_rows(3, vec![row(&[1, 2, 3]), row(&[2, 4, 6]), row(&[1, 0, 1])]);
        assert_eq!(m.rank(), 2);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 1);
        for r in m.rows() {
            let dot: Scalar = r.iter().zip(&ns[0]).map(|(a, b)| a * b).sum();
            assert!(dot.is_zero());
        }
    }

    #[test]
    fn rref_is_canonical() {
        let a = QMatrix::from_rows(3, vec![row(&[2, 4, 0]), row(&[0, 1, 1])]);
        let b = QMatrix::from_rows(3, vec![row(&[1, 3, 1]), row(&[0, 3, 3])]);
        let (mut a, mut b) = (a, b);
        a.rref();
        b.rref();
        assert_eq!(a, b);
        assert_eq!(a.rows()[0], vec![qi(1), qi(0), qi(-2)]);
    }

    #[test]
    fn greedy_subset() {
        let vs = vec![row(&[1, 0]), row(&[2, 0]), row(&[0, 1]), row(&[1, 1])];
        assert_eq!(independent_subset(&vs), vec![0, 2]);
        assert_eq!(rank_of(&vs), 2);
        assert_eq!(rank_of(&[]), 0);
        let _ = q(1, 2);
    }
}
