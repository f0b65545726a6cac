//! Dense exact linear algebra over `F_p`.
//!
//! Every routine here is deterministic: pivots are chosen as the leftmost
//! nonzero column and the topmost candidate row, so reduced row echelon forms,
//! kernel bases and particular solutions are canonical.

use thiserror::Error;

use crate::field::PrimeField;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("linear system has no solution")]
    NoSolution,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

/// Row-major matrix of residues sharing one modulus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseMatrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl DenseMatrix {
    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        Self {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a matrix from rows; entries are reduced mod `p`.
    pub fn from_rows(field: PrimeField, cols: usize, rows: &[Vec<u32>]) -> Self {
        let mut m = Self::zeros(field, rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged row {i}");
            for (j, &v) in r.iter().enumerate() {
                m.set(i, j, v % field.modulus());
            }
        }
        m
    }

    /// Builds a matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(field: PrimeField, rows: usize, columns: &[Vec<u32>]) -> Self {
        let mut m = Self::zeros(field, rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "ragged column {j}");
            for (i, &v) in c.iter().enumerate() {
                m.set(i, j, v % field.modulus());
            }
        }
        m
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<u32> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn columns(&self) -> Vec<Vec<u32>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// Matrix-vector product.
    pub fn apply(&self, x: &[u32]) -> Vec<u32> {
        assert_eq!(x.len(), self.cols);
        let f = self.field;
        (0..self.rows)
            .map(|i| {
                let acc = self
                    .row(i)
                    .iter()
                    .zip(x)
                    .fold(0u64, |acc, (&a, &b)| (acc + a as u64 * b as u64) % f.modulus() as u64);
                acc as u32
            })
            .collect()
    }

    pub fn mul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.rows);
        let f = self.field;
        let mut out = DenseMatrix::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = f.mul_add(out.get(i, j), a, other.get(k, j));
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn add(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let f = self.field;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f.add(a, b)).collect();
        DenseMatrix { data, ..*self }
    }

    pub fn sub(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let f = self.field;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f.sub(a, b)).collect();
        DenseMatrix { data, ..*self }
    }

    pub fn scale(&self, c: u32) -> DenseMatrix {
        let f = self.field;
        let data = self.data.iter().map(|&a| f.mul(a, c)).collect();
        DenseMatrix { data, ..*self }
    }

    pub fn rank(&self) -> usize {
        rref(self).pivots.len()
    }

    /// Basis of `{x : self * x = 0}`.
    pub fn kernel(&self) -> Vec<Vec<u32>> {
        let r = rref(self);
        kernel_from_rref(&r.matrix, &r.pivots, self.cols)
    }

    pub fn inverse(&self) -> Option<DenseMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut aug = DenseMatrix::zeros(self.field, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, n + i, 1);
        }
        let r = rref(&aug);
        if r.pivots.len() < n || r.pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = DenseMatrix::zeros(self.field, n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, r.matrix.get(i, n + j));
            }
        }
        Some(inv)
    }
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub matrix: DenseMatrix,
    pub pivots: Vec<usize>,
}

/// Gauss-Jordan elimination with leftmost-column, topmost-row pivoting.
pub fn rref(m: &DenseMatrix) -> Rref {
    let f = m.field;
    let p = f.modulus() as u64;
    let mut a = m.clone();
    let cols = a.cols;
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == a.rows {
            break;
        }
        let Some(pr) = (r..a.rows).find(|&i| a.get(i, c) != 0) else {
            continue;
        };
        if pr != r {
            for j in 0..cols {
                a.data.swap(pr * cols + j, r * cols + j);
            }
        }
        let inv = f.inv(a.get(r, c)).expect("pivot is nonzero");
        for j in c..cols {
            let v = f.mul(a.get(r, j), inv);
            a.set(r, j, v);
        }
        let (before, rest) = a.data.split_at_mut(r * cols);
        let (pivot_row, after) = rest.split_at_mut(cols);
        for other in before.chunks_mut(cols).chain(after.chunks_mut(cols)) {
            let factor = other[c];
            if factor == 0 {
                continue;
            }
            let neg = p - factor as u64;
            for j in c..cols {
                other[j] = ((other[j] as u64 + neg * pivot_row[j] as u64) % p) as u32;
            }
        }
        pivots.push(c);
        r += 1;
    }
    Rref { matrix: a, pivots }
}

fn kernel_from_rref(m: &DenseMatrix, pivots: &[usize], cols: usize) -> Vec<Vec<u32>> {
    let f = m.field;
    let mut is_pivot = vec![false; cols];
    for &c in pivots {
        is_pivot[c] = true;
    }
    (0..cols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = vec![0; cols];
            v[free] = 1;
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(m.get(i, free));
            }
            v
        })
        .collect()
}

/// Canonical solution of an affine system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineSolution {
    /// The solution with every free coordinate set to zero.
    pub particular: Vec<u32>,
    pub kernel_basis: Vec<Vec<u32>>,
}

/// Solves `a * x = b`.
pub fn solve_affine(a: &DenseMatrix, b: &[u32]) -> Result<AffineSolution, LinalgError> {
    if b.len() != a.rows {
        return Err(LinalgError::DimensionMismatch {
            expected: a.rows,
            found: b.len(),
        });
    }
    let n = a.cols;
    let mut aug = DenseMatrix::zeros(a.field, a.rows, n + 1);
    for i in 0..a.rows {
        for j in 0..n {
            aug.set(i, j, a.get(i, j));
        }
        aug.set(i, n, b[i] % a.field.modulus());
    }
    let r = rref(&aug);
    if r.pivots.last() == Some(&n) {
        return Err(LinalgError::NoSolution);
    }
    let mut particular = vec![0; n];
    for (i, &c) in r.pivots.iter().enumerate() {
        particular[c] = r.matrix.get(i, n);
    }
    let left = DenseMatrix {
        field: a.field,
        rows: r.matrix.rows,
        cols: n,
        data: r
            .matrix
            .to_rows()
            .into_iter()
            .flat_map(|row| row[..n].to_vec())
            .collect(),
    };
    Ok(AffineSolution {
        particular,
        kernel_basis: kernel_from_rref(&left, &r.pivots, n),
    })
}

/// Canonical (reduced row echelon) basis of the span of `vectors`.
pub fn span_basis(field: PrimeField, len: usize, vectors: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let mut red = RowReducer::new(field, len);
    for v in vectors {
        red.push_dense(v);
    }
    red.basis()
}

/// Whether `v` lies in the span of `basis`.
pub fn subspace_contains(field: PrimeField, basis: &[Vec<u32>], v: &[u32]) -> bool {
    let mut red = RowReducer::new(field, v.len());
    for b in basis {
        red.push_dense(b);
    }
    red.contains(v)
}

/// `span(small) ⊆ span(big)`.
pub fn subspace_le(field: PrimeField, len: usize, small: &[Vec<u32>], big: &[Vec<u32>]) -> bool {
    let mut red = RowReducer::new(field, len);
    for b in big {
        red.push_dense(b);
    }
    small.iter().all(|v| red.contains(v))
}

pub fn subspace_eq(field: PrimeField, len: usize, a: &[Vec<u32>], b: &[Vec<u32>]) -> bool {
    span_basis(field, len, a) == span_basis(field, len, b)
}

/// Coordinates of `v` with respect to a reduced row echelon `basis` with the
/// given pivot columns, or `None` if `v` is outside the span.
pub fn rref_coordinates(field: PrimeField, basis: &[Vec<u32>], v: &[u32]) -> Option<Vec<u32>> {
    let coords: Vec<u32> = basis
        .iter()
        .map(|b| {
            let pc = b.iter().position(|&x| x != 0).expect("basis vector is nonzero");
            v[pc]
        })
        .collect();
    let recon = combine(field, v.len(), basis, &coords);
    (recon == v).then_some(coords)
}

/// `Σ coeffs[i] * vectors[i]`.
pub fn combine(field: PrimeField, len: usize, vectors: &[Vec<u32>], coeffs: &[u32]) -> Vec<u32> {
    let mut out = vec![0; len];
    for (v, &c) in vectors.iter().zip(coeffs) {
        axpy(field, &mut out, c, v);
    }
    out
}

/// `y += a * x`
#[inline]
pub fn axpy(field: PrimeField, y: &mut [u32], a: u32, x: &[u32]) {
    if a == 0 {
        return;
    }
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi = field.mul_add(*yi, a, xi);
    }
}

pub fn vec_add(field: PrimeField, x: &[u32], y: &[u32]) -> Vec<u32> {
    x.iter().zip(y).map(|(&a, &b)| field.add(a, b)).collect()
}

pub fn vec_sub(field: PrimeField, x: &[u32], y: &[u32]) -> Vec<u32> {
    x.iter().zip(y).map(|(&a, &b)| field.sub(a, b)).collect()
}

pub fn vec_scale(field: PrimeField, c: u32, x: &[u32]) -> Vec<u32> {
    x.iter().map(|&a| field.mul(c, a)).collect()
}

pub fn is_zero(x: &[u32]) -> bool {
    x.iter().all(|&v| v == 0)
}

struct PivotRow {
    pivot: usize,
    values: Vec<u32>,
    /// Positions that may be nonzero, sorted.
    support: Vec<u32>,
}

/// Incremental reduced row echelon form.
///
/// Rows are pushed one at a time and the accumulated rows are kept fully
/// reduced, so the result equals [`rref`] of the stacked rows regardless of
/// push order. Pivot rows are dense but carry a support list, which keeps
/// large sparse constraint systems cheap to eliminate.
pub struct RowReducer {
    field: PrimeField,
    cols: usize,
    rows: Vec<PivotRow>,
    pivot_of: Vec<Option<u32>>,
    scratch: Vec<u64>,
    touched: Vec<usize>,
    marked: Vec<bool>,
    lazy_limit: u64,
}

impl RowReducer {
    pub fn new(field: PrimeField, cols: usize) -> Self {
        let pm1 = (field.modulus() - 1) as u64;
        let lazy_limit = ((u64::MAX - field.modulus() as u64) / (pm1 * pm1).max(1)).max(1);
        Self {
            field,
            cols,
            rows: Vec::new(),
            pivot_of: vec![None; cols],
            scratch: vec![0; cols],
            touched: Vec::new(),
            marked: vec![false; cols],
            lazy_limit,
        }
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn touch(&mut self, j: usize) {
        if !self.marked[j] {
            self.marked[j] = true;
            self.touched.push(j);
        }
    }

    fn clear_scratch(&mut self) {
        for &j in &self.touched {
            self.scratch[j] = 0;
            self.marked[j] = false;
        }
        self.touched.clear();
    }

    /// Reduces the sparse row into the scratch buffer; returns the residual
    /// as sorted `(column, value)` pairs.
    fn reduce_into_scratch(&mut self, entries: &[(usize, u32)]) -> Vec<(usize, u32)> {
        let p = self.field.modulus() as u64;
        for &(j, v) in entries {
            let v = v as u64 % p;
            if v == 0 {
                continue;
            }
            self.touch(j);
            self.scratch[j] = (self.scratch[j] + v) % p;
        }
        let hits: Vec<(usize, u32)> = self
            .touched
            .iter()
            .filter_map(|&j| {
                let v = self.scratch[j] % p;
                match self.pivot_of[j] {
                    Some(r) if v != 0 => Some((r as usize, v as u32)),
                    _ => None,
                }
            })
            .collect();
        let mut adds = 0u64;
        for (r, v) in hits {
            let factor = p - v as u64;
            let support_len = self.rows[r].support.len();
            for s in 0..support_len {
                let j = self.rows[r].support[s] as usize;
                let x = self.rows[r].values[j];
                if x == 0 {
                    continue;
                }
                self.touch(j);
                self.scratch[j] += factor * x as u64;
            }
            adds += 1;
            if adds >= self.lazy_limit {
                for &j in &self.touched {
                    self.scratch[j] %= p;
                }
                adds = 0;
            }
        }
        let mut residual: Vec<(usize, u32)> = self
            .touched
            .iter()
            .filter_map(|&j| {
                let v = (self.scratch[j] % p) as u32;
                (v != 0).then_some((j, v))
            })
            .collect();
        self.clear_scratch();
        residual.sort_unstable();
        residual
    }

    /// Adds a sparse row; returns `true` if the rank grew.
    pub fn push(&mut self, entries: &[(usize, u32)]) -> bool {
        let residual = self.reduce_into_scratch(entries);
        let Some(&(pivot, lead)) = residual.first() else {
            return false;
        };
        let f = self.field;
        let inv = f.inv(lead).expect("nonzero lead");
        let mut values = vec![0u32; self.cols];
        let mut support = Vec::with_capacity(residual.len());
        for &(j, v) in &residual {
            values[j] = f.mul(v, inv);
            support.push(j as u32);
        }
        for row in self.rows.iter_mut() {
            let c = row.values[pivot];
            if c == 0 {
                continue;
            }
            let neg = f.neg(c);
            for &j in &support {
                let j = j as usize;
                row.values[j] = f.mul_add(row.values[j], neg, values[j]);
            }
            row.support = merge_support(&row.support, &support, &row.values);
        }
        self.pivot_of[pivot] = Some(self.rows.len() as u32);
        self.rows.push(PivotRow { pivot, values, support });
        true
    }

    pub fn push_dense(&mut self, v: &[u32]) -> bool {
        assert_eq!(v.len(), self.cols);
        let entries: Vec<(usize, u32)> = v
            .iter()
            .enumerate()
            .filter(|(_, &x)| x != 0)
            .map(|(j, &x)| (j, x))
            .collect();
        self.push(&entries)
    }

    /// Residual of `v` after reduction against the accumulated rows.
    pub fn residual(&mut self, v: &[u32]) -> Vec<u32> {
        let entries: Vec<(usize, u32)> = v
            .iter()
            .enumerate()
            .filter(|(_, &x)| x != 0)
            .map(|(j, &x)| (j, x))
            .collect();
        let mut out = vec![0; self.cols];
        for (j, x) in self.reduce_into_scratch(&entries) {
            out[j] = x;
        }
        out
    }

    pub fn contains(&mut self, v: &[u32]) -> bool {
        is_zero(&self.residual(v))
    }

    /// Sorted pivot columns.
    pub fn pivots(&self) -> Vec<usize> {
        let mut p: Vec<usize> = self.rows.iter().map(|r| r.pivot).collect();
        p.sort_unstable();
        p
    }

    fn sorted_rows(&self) -> Vec<&PivotRow> {
        let mut rows: Vec<&PivotRow> = self.rows.iter().collect();
        rows.sort_by_key(|r| r.pivot);
        rows
    }

    /// The reduced rows, ordered by pivot column.
    pub fn basis(&self) -> Vec<Vec<u32>> {
        self.sorted_rows().into_iter().map(|r| r.values.clone()).collect()
    }

    pub fn to_rref(&self) -> Rref {
        let rows = self.basis();
        Rref {
            matrix: DenseMatrix::from_rows(self.field, self.cols, &rows),
            pivots: self.pivots(),
        }
    }

    /// Kernel basis of the homogeneous system whose rows were pushed: one
    /// vector per free column, with that column set to 1.
    pub fn kernel_basis(&self) -> Vec<Vec<u32>> {
        self.kernel_basis_of_width(self.cols)
    }

    fn kernel_basis_of_width(&self, width: usize) -> Vec<Vec<u32>> {
        let f = self.field;
        let rows = self.sorted_rows();
        (0..width)
            .filter(|&c| self.pivot_of[c].is_none())
            .map(|free| {
                let mut v = vec![0; width];
                v[free] = 1;
                for r in &rows {
                    if r.pivot < width {
                        v[r.pivot] = f.neg(r.values[free]);
                    }
                }
                v
            })
            .collect()
    }

    /// Treats the last column as the right-hand side of an affine system.
    pub fn is_consistent(&self) -> bool {
        self.pivot_of[self.cols - 1].is_none()
    }

    /// Canonical solution of the affine system whose augmented rows were
    /// pushed (last column = right-hand side).
    pub fn affine_solution(&self) -> Result<AffineSolution, LinalgError> {
        if !self.is_consistent() {
            return Err(LinalgError::NoSolution);
        }
        let n = self.cols - 1;
        let mut particular = vec![0; n];
        for r in &self.rows {
            particular[r.pivot] = r.values[n];
        }
        Ok(AffineSolution {
            particular,
            kernel_basis: self.kernel_basis_of_width(n),
        })
    }
}

fn merge_support(a: &[u32], b: &[u32], values: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let next = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) if x == y => {
                i += 1;
                j += 1;
                x
            }
            (Some(&x), Some(&y)) if x < y => {
                i += 1;
                x
            }
            (Some(_), Some(&y)) => {
                j += 1;
                y
            }
            (Some(&x), None) => {
                i += 1;
                x
            }
            (None, Some(&y)) => {
                j += 1;
                y
            }
            (None, None) => unreachable!(),
        };
        if values[next as usize] != 0 {
            out.push(next);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn rref_identity() {
        let m = DenseMatrix::identity(f(5), 2);
        let r = rref(&m);
        assert_eq!(r.matrix, m);
        assert_eq!(r.pivots, vec![0, 1]);
    }

    #[test]
    fn rref_dependent_rows() {
        let m = DenseMatrix::from_rows(f(5), 2, &[vec![2, 4], vec![1, 2]]);
        let r = rref(&m);
        assert_eq!(r.matrix.to_rows(), vec![vec![1, 2], vec![0, 0]]);
        assert_eq!(r.pivots, vec![0]);
    }

    #[test]
    fn rref_zero() {
        let m = DenseMatrix::zeros(f(5), 3, 3);
        let r = rref(&m);
        assert!(r.matrix.is_zero());
        assert!(r.pivots.is_empty());
    }

    #[test]
    fn solve_scalar() {
        let a = DenseMatrix::from_rows(f(5), 1, &[vec![2]]);
        let s = solve_affine(&a, &[3]).unwrap();
        assert_eq!(s.particular, vec![4]);
        assert!(s.kernel_basis.is_empty());
    }

    #[test]
    fn solve_with_kernel() {
        let a = DenseMatrix::from_rows(f(3), 2, &[vec![1, 1]]);
        let s = solve_affine(&a, &[0]).unwrap();
        assert_eq!(s.particular, vec![0, 0]);
        assert_eq!(s.kernel_basis, vec![vec![2, 1]]);
    }

    #[test]
    fn solve_inconsistent() {
        let a = DenseMatrix::from_rows(f(5), 1, &[vec![0]]);
        assert_eq!(solve_affine(&a, &[1]), Err(LinalgError::NoSolution));
        assert!(matches!(
            solve_affine(&a, &[1, 2]),
            Err(LinalgError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn containment() {
        let fld = f(5);
        assert!(subspace_contains(fld, &[vec![1, 0]], &[3, 0]));
        assert!(!subspace_contains(fld, &[vec![1, 0]], &[0, 1]));
        assert!(subspace_contains(fld, &[], &[0, 0]));
    }

    #[test]
    fn inverse_roundtrip() {
        let fld = f(7);
        let m = DenseMatrix::from_rows(fld, 2, &[vec![1, 2], vec![3, 4]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), DenseMatrix::identity(fld, 2));
        let sing = DenseMatrix::from_rows(fld, 2, &[vec![1, 2], vec![2, 4]]);
        assert!(sing.inverse().is_none());
    }

    fn arb_matrix() -> impl Strategy<Value = (u64, Vec<Vec<u32>>)> {
        (prop::sample::select(vec![3u64, 5, 7]), 1usize..6, 1usize..7).prop_flat_map(|(p, r, c)| {
            (
                Just(p),
                prop::collection::vec(prop::collection::vec(0u32..p as u32, c), r),
            )
        })
    }

    proptest! {
        #[test]
        fn rref_invariants((p, rows) in arb_matrix()) {
            let fld = f(p);
            let cols = rows[0].len();
            let m = DenseMatrix::from_rows(fld, cols, &rows);
            let r = rref(&m);
            prop_assert_eq!(rref(&r.matrix).matrix, r.matrix.clone());
            let ker = m.kernel();
            prop_assert_eq!(r.pivots.len() + ker.len(), cols);
            for k in &ker {
                prop_assert!(is_zero(&m.apply(k)));
            }
            // incremental reducer agrees with batch elimination in any push order
            let mut red = RowReducer::new(fld, cols);
            for row in rows.iter().rev() {
                red.push_dense(row);
            }
            let nonzero: Vec<Vec<u32>> = r.matrix.to_rows().into_iter().filter(|x| !is_zero(x)).collect();
            prop_assert_eq!(red.basis(), nonzero);
            prop_assert_eq!(red.kernel_basis(), ker);
        }

        #[test]
        fn affine_residual((p, rows) in arb_matrix(), seed in any::<u64>()) {
            let fld = f(p);
            let cols = rows[0].len();
            let m = DenseMatrix::from_rows(fld, cols, &rows);
            // a right-hand side in the image is always solvable
            let x: Vec<u32> = (0..cols).map(|i| ((seed >> (i * 3)) % p) as u32).collect();
            let b = m.apply(&x);
            let s = solve_affine(&m, &b).unwrap();
            prop_assert_eq!(m.apply(&s.particular), b.clone());
            let mut red = RowReducer::new(fld, cols + 1);
            for (row, &bi) in rows.iter().zip(&b) {
                let mut aug = row.clone();
                aug.push(bi);
                red.push_dense(&aug);
            }
            prop_assert_eq!(red.affine_solution().unwrap(), s);
        }
    }
}
