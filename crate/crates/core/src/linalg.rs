//! Exact linear algebra over the complexified scalar field.
//!
//! Everything here is plain Gaussian elimination with deterministic pivoting
//! (first nonzero column, first-seen row). Matrices are small — dimensions are
//! those of the ambient complex spaces — so no effort is spent on fill-in.

use crate::scalar::Complex;

pub type Row = Vec<Complex>;

/// Incremental row basis for a subspace of row vectors, used to accumulate
/// span ladders. Rows are reduced against the existing echelon rows when
/// inserted; insertion order is preserved for witness bookkeeping.
#[derive(Clone, Debug)]
pub struct RowBasis {
    ncols: usize,
    rows: Vec<Row>,
    pivots: Vec<usize>,
}

impl RowBasis {
    pub fn new(ncols: usize) -> Self {
        RowBasis {
            ncols,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    fn reduce(&self, row: &mut Row) {
        for (basis_row, &p) in self.rows.iter().zip(&self.pivots) {
            if row[p].is_zero() {
                continue;
            }
            let factor = &row[p] * &basis_row[p].inv().expect("pivot entries are nonzero");
            for j in 0..self.ncols {
                row[j] = &row[j] - &(&factor * &basis_row[j]);
            }
        }
    }

    /// Insert a row; returns true if it enlarged the span.
    pub fn insert(&mut self, row: Row) -> bool {
        assert_eq!(row.len(), self.ncols);
        let mut r = row;
        self.reduce(&mut r);
        match r.iter().position(|c| !c.is_zero()) {
            Some(p) => {
                self.rows.push(r);
                self.pivots.push(p);
                true
            }
            None => false,
        }
    }

    pub fn contains(&self, row: &Row) -> bool {
        let mut r = row.clone();
        self.reduce(&mut r);
        r.iter().all(|c| c.is_zero())
    }

    /// Pivot columns in insertion order.
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }
}

/// Reduced row echelon form with unit pivots, rows ordered by pivot column.
/// This is a canonical form: two row sets span the same space iff their
/// canonical forms are identical.
pub fn canonical_row_space(rows: &[Row], ncols: usize) -> Vec<Row> {
    let mut basis = RowBasis::new(ncols);
    for r in rows {
        basis.insert(r.clone());
    }
    let mut echelon: Vec<(usize, Row)> = basis
        .rows
        .into_iter()
        .zip(basis.pivots)
        .map(|(r, p)| (p, r))
        .collect();
    echelon.sort_by_key(|(p, _)| *p);
    // normalize pivots to 1 and eliminate above
    let n = echelon.len();
    for i in 0..n {
        let (p, row) = &mut echelon[i];
        let inv = row[*p].inv().expect("pivot entries are nonzero");
        for c in row.iter_mut() {
            *c = &*c * &inv;
        }
        let (p, pivot_row) = (echelon[i].0, echelon[i].1.clone());
        for (k, (_, other)) in echelon.iter_mut().enumerate() {
            if k == i || other[p].is_zero() {
                continue;
            }
            let f = other[p].clone();
            for j in 0..ncols {
                other[j] = &other[j] - &(&f * &pivot_row[j]);
            }
        }
    }
    echelon.into_iter().map(|(_, r)| r).collect()
}

pub fn row_spaces_equal(a: &[Row], b: &[Row], ncols: usize) -> bool {
    canonical_row_space(a, ncols) == canonical_row_space(b, ncols)
}

/// Rank of a rectangular matrix.
pub fn rank(rows: &[Row], ncols: usize) -> usize {
    let mut basis = RowBasis::new(ncols);
    for r in rows {
        basis.insert(r.clone());
    }
    basis.rank()
}

/// Exact inverse of a square matrix by Gauss-Jordan elimination;
/// None if singular.
pub fn mat_inverse(m: &[Row]) -> Option<Vec<Row>> {
    let n = m.len();
    let mut aug: Vec<Row> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            assert_eq!(row.len(), n, "matrix must be square");
            let mut r = row.clone();
            for j in 0..n {
                r.push(if i == j { Complex::one() } else { Complex::zero() });
            }
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !aug[r][col].is_zero())?;
        aug.swap(col, pivot);
        let inv = aug[col][col].inv().ok()?;
        for entry in aug[col].iter_mut() {
            *entry = &*entry * &inv;
        }
        for r in 0..n {
            if r == col || aug[r][col].is_zero() {
                continue;
            }
            let f = aug[r][col].clone();
            let pivot_row = aug[col].clone();
            for (entry, p) in aug[r].iter_mut().zip(&pivot_row) {
                *entry = &*entry - &(&f * p);
            }
        }
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn mat_mul(a: &[Row], b: &[Row]) -> Vec<Row> {
    let n = a.len();
    let inner = b.len();
    let m = if inner == 0 { 0 } else { b[0].len() };
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut acc = Complex::zero();
                    for k in 0..inner {
                        acc = &acc + &(&a[i][k] * &b[k][j]);
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// Row vector times matrix.
pub fn row_times_mat(row: &Row, m: &[Row]) -> Row {
    let ncols = if m.is_empty() { 0 } else { m[0].len() };
    (0..ncols)
        .map(|j| {
            let mut acc = Complex::zero();
            for (k, entry) in row.iter().enumerate() {
                acc = &acc + &(entry * &m[k][j]);
            }
            acc
        })
        .collect()
}
