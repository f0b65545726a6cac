//! Finite-dimensional unital associative algebras given by structure
//! constants, together with centers and commuting linear maps.

use std::fmt;

use thiserror::Error;

use crate::field::PrimeField;
use crate::linalg::{self, is_zero, DenseMatrix, RowReducer};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("structure tensor has {found} entries, expected {expected}")]
    TensorShape { expected: usize, found: usize },
    #[error("unit vector has length {found}, expected {expected}")]
    UnitShape { expected: usize, found: usize },
    #[error("residue {value} at {at} is not below the modulus {p}")]
    Residue { value: u64, p: u32, at: String },
}

/// A failed algebra axiom on basis indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AxiomViolation {
    /// `(e_i e_j) e_k != e_i (e_j e_k)`
    Associativity(usize, usize, usize),
    /// `1 · e_i != e_i`
    LeftUnit(usize),
    /// `e_i · 1 != e_i`
    RightUnit(usize),
}

impl fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Associativity(i, j, k) => {
                write!(f, "associativity fails on (e{i} e{j}) e{k}")
            }
            Self::LeftUnit(i) => write!(f, "left unit law fails on e{i}"),
            Self::RightUnit(i) => write!(f, "right unit law fails on e{i}"),
        }
    }
}

/// Algebra over `F_p` with basis `e_0..e_{d-1}` and
/// `e_i e_j = Σ_k mult[(i*d + j)*d + k] e_k`.
#[derive(Clone, Debug)]
pub struct Algebra {
    field: PrimeField,
    dim: usize,
    mult: Vec<u32>,
    unit: Vec<u32>,
    products: Vec<Vec<(usize, u32)>>,
}

impl PartialEq for Algebra {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.dim == other.dim && self.mult == other.mult && self.unit == other.unit
    }
}

impl Eq for Algebra {}

impl Algebra {
    /// Builds an algebra from a flat structure tensor. Only shapes and
    /// residues are checked here; use [`Algebra::validate`] for the axioms.
    pub fn new(field: PrimeField, dim: usize, mult: Vec<u32>, unit: Vec<u32>) -> Result<Self, AlgebraError> {
        if mult.len() != dim * dim * dim {
            return Err(AlgebraError::TensorShape {
                expected: dim * dim * dim,
                found: mult.len(),
            });
        }
        if unit.len() != dim {
            return Err(AlgebraError::UnitShape {
                expected: dim,
                found: unit.len(),
            });
        }
        let p = field.modulus();
        if let Some(pos) = mult.iter().position(|&v| v >= p) {
            let (ij, k) = (pos / dim, pos % dim);
            return Err(AlgebraError::Residue {
                value: mult[pos] as u64,
                p,
                at: format!("mult[{}][{}][{}]", ij / dim, ij % dim, k),
            });
        }
        if let Some(pos) = unit.iter().position(|&v| v >= p) {
            return Err(AlgebraError::Residue {
                value: unit[pos] as u64,
                p,
                at: format!("unit[{pos}]"),
            });
        }
        let products = mult
            .chunks(dim.max(1))
            .take(dim * dim)
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(_, &c)| c != 0)
                    .map(|(k, &c)| (k, c))
                    .collect()
            })
            .collect();
        Ok(Self {
            field,
            dim,
            mult,
            unit,
            products,
        })
    }

    /// Builds an algebra from a closure giving `e_i e_j`.
    pub fn from_products(
        field: PrimeField,
        dim: usize,
        unit: Vec<u32>,
        mut product: impl FnMut(usize, usize) -> Vec<u32>,
    ) -> Self {
        let mut mult = Vec::with_capacity(dim * dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                let v = product(i, j);
                assert_eq!(v.len(), dim);
                mult.extend(v.into_iter().map(|x| x % field.modulus()));
            }
        }
        Self::new(field, dim, mult, unit).expect("shapes are consistent")
    }

    /// The base field viewed as a one-dimensional algebra.
    pub fn scalars(field: PrimeField) -> Self {
        Self::new(field, 1, vec![1], vec![1]).expect("valid")
    }

    /// `F_p^k` with coordinatewise product.
    pub fn diagonal(field: PrimeField, k: usize) -> Self {
        Self::from_products(field, k, vec![1; k], |i, j| {
            let mut v = vec![0; k];
            if i == j {
                v[i] = 1;
            }
            v
        })
    }

    /// `M_n(F_p)` in the matrix-unit basis `E_{rc}` at index `r*n + c`.
    pub fn matrix(field: PrimeField, n: usize) -> Self {
        Self::matrix_units(
            field,
            n,
            &(0..n).flat_map(|r| (0..n).map(move |c| (r, c))).collect::<Vec<_>>(),
        )
    }

    /// Upper triangular `T_n(F_p)` in the basis `E_{rc}`, `r <= c`, ordered row by row.
    pub fn upper_triangular(field: PrimeField, n: usize) -> Self {
        let units: Vec<(usize, usize)> = (0..n).flat_map(|r| (r..n).map(move |c| (r, c))).collect();
        Self::matrix_units(field, n, &units)
    }

    /// Subalgebra of `M_n` spanned by the given matrix units, which must be
    /// closed under products and contain every diagonal unit.
    pub fn matrix_units(field: PrimeField, n: usize, units: &[(usize, usize)]) -> Self {
        let d = units.len();
        let index = |r: usize, c: usize| units.iter().position(|&u| u == (r, c));
        let mut unit = vec![0; d];
        for i in 0..n {
            unit[index(i, i).expect("diagonal unit present")] = 1;
        }
        Self::from_products(field, d, unit, |i, j| {
            let (a, b) = units[i];
            let (c, e) = units[j];
            let mut v = vec![0; d];
            if b == c {
                v[index(a, e).expect("units closed under product")] = 1;
            }
            v
        })
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn unit(&self) -> &[u32] {
        &self.unit
    }

    pub fn structure_constants(&self) -> &[u32] {
        &self.mult
    }

    #[inline]
    pub fn constant(&self, i: usize, j: usize, k: usize) -> u32 {
        self.mult[(i * self.dim + j) * self.dim + k]
    }

    /// Nonzero coordinates of `e_i e_j`.
    #[inline]
    pub fn basis_product(&self, i: usize, j: usize) -> &[(usize, u32)] {
        &self.products[i * self.dim + j]
    }

    pub fn basis_vector(&self, i: usize) -> Vec<u32> {
        let mut v = vec![0; self.dim];
        v[i] = 1;
        v
    }

    pub fn zero(&self) -> Vec<u32> {
        vec![0; self.dim]
    }

    pub fn mul(&self, x: &[u32], y: &[u32]) -> Vec<u32> {
        let f = self.field;
        let p = f.modulus() as u64;
        let mut acc = vec![0u64; self.dim];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for (j, &yj) in y.iter().enumerate() {
                if yj == 0 {
                    continue;
                }
                let c = f.mul(xi, yj) as u64;
                for &(k, s) in self.basis_product(i, j) {
                    acc[k] = (acc[k] + c * s as u64) % p;
                }
            }
        }
        acc.into_iter().map(|v| v as u32).collect()
    }

    /// `xy - yx`
    pub fn commutator(&self, x: &[u32], y: &[u32]) -> Vec<u32> {
        linalg::vec_sub(self.field, &self.mul(x, y), &self.mul(y, x))
    }

    /// Checks associativity on all basis triples, then both unit laws.
    pub fn validate(&self) -> Vec<AxiomViolation> {
        let d = self.dim;
        let mut out = Vec::new();
        for i in 0..d {
            let ei = self.basis_vector(i);
            for j in 0..d {
                let eij = self.mul(&ei, &self.basis_vector(j));
                for k in 0..d {
                    let ek = self.basis_vector(k);
                    let lhs = self.mul(&eij, &ek);
                    let rhs = self.mul(&ei, &self.mul(&self.basis_vector(j), &ek));
                    if lhs != rhs {
                        out.push(AxiomViolation::Associativity(i, j, k));
                    }
                }
            }
        }
        for i in 0..d {
            let ei = self.basis_vector(i);
            if self.mul(&self.unit, &ei) != ei {
                out.push(AxiomViolation::LeftUnit(i));
            }
        }
        for i in 0..d {
            let ei = self.basis_vector(i);
            if self.mul(&ei, &self.unit) != ei {
                out.push(AxiomViolation::RightUnit(i));
            }
        }
        out
    }

    /// First basis pair `(i, j)` with `e_i e_j != e_j e_i`.
    pub fn noncommuting_pair(&self) -> Option<(usize, usize)> {
        let d = self.dim;
        (0..d)
            .flat_map(|i| (i + 1..d).map(move |j| (i, j)))
            .find(|&(i, j)| self.basis_product(i, j) != self.basis_product(j, i))
    }

    pub fn is_commutative(&self) -> bool {
        self.noncommuting_pair().is_none()
    }

    /// Matrix of `y ↦ x y`.
    pub fn left_mult_matrix(&self, x: &[u32]) -> DenseMatrix {
        let cols: Vec<Vec<u32>> = (0..self.dim).map(|j| self.mul(x, &self.basis_vector(j))).collect();
        DenseMatrix::from_columns(self.field, self.dim, &cols)
    }

    /// Matrix of `y ↦ y x`.
    pub fn right_mult_matrix(&self, x: &[u32]) -> DenseMatrix {
        let cols: Vec<Vec<u32>> = (0..self.dim).map(|j| self.mul(&self.basis_vector(j), x)).collect();
        DenseMatrix::from_columns(self.field, self.dim, &cols)
    }

    /// Reduced row echelon basis of the center.
    pub fn center_basis(&self) -> Vec<Vec<u32>> {
        let d = self.dim;
        let f = self.field;
        let mut red = RowReducer::new(f, d);
        for i in 0..d {
            for t in 0..d {
                // coefficient of e_t in [z, e_i] = Σ_k z_k (c[k][i][t] - c[i][k][t])
                let row: Vec<(usize, u32)> = (0..d)
                    .map(|k| (k, f.sub(self.constant(k, i, t), self.constant(i, k, t))))
                    .filter(|&(_, v)| v != 0)
                    .collect();
                red.push(&row);
            }
        }
        linalg::span_basis(f, d, &red.kernel_basis())
    }

    pub fn is_central(&self, x: &[u32]) -> bool {
        (0..self.dim).all(|i| is_zero(&self.commutator(x, &self.basis_vector(i))))
    }

    /// Basis of the space of linear maps `f` with `[f(x), x] = 0` for all `x`.
    ///
    /// Uses the polarized condition `[f(e_i), e_j] + [f(e_j), e_i] = 0` on
    /// basis pairs `i <= j`. Unknown `i*d + k` is the `e_k` coordinate of `f(e_i)`.
    pub fn commuting_linear_map_space(&self) -> Vec<LinearMapRep> {
        let d = self.dim;
        let f = self.field;
        let mut red = RowReducer::new(f, d * d);
        for i in 0..d {
            for j in i..d {
                for t in 0..d {
                    let mut row = Vec::new();
                    for k in 0..d {
                        let a = f.sub(self.constant(k, j, t), self.constant(j, k, t));
                        if a != 0 {
                            row.push((i * d + k, a));
                        }
                        let b = f.sub(self.constant(k, i, t), self.constant(i, k, t));
                        if b != 0 {
                            row.push((j * d + k, b));
                        }
                    }
                    red.push(&row);
                }
            }
        }
        red.kernel_basis()
            .into_iter()
            .map(|v| LinearMapRep::from_column_major(f, d, d, &v))
            .collect()
    }

    /// Whether `[f(x), x] = 0` for all `x`, tested on the polarized form.
    /// Returns the first failing basis pair.
    pub fn commuting_violation(&self, map: &LinearMapRep) -> Option<(usize, usize)> {
        let d = self.dim;
        let f = self.field;
        let images: Vec<Vec<u32>> = (0..d).map(|i| map.column(i)).collect();
        for i in 0..d {
            for j in i..d {
                let s = linalg::vec_add(
                    f,
                    &self.commutator(&images[i], &self.basis_vector(j)),
                    &self.commutator(&images[j], &self.basis_vector(i)),
                );
                if !is_zero(&s) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// Solves `f(x) = z x + η(x)` with `z` central and `η` center-valued.
    ///
    /// Unknowns are the center coordinates of `z` followed by those of each
    /// `η(e_i)`. Returns the canonical solution, or the first basis index at
    /// which the system becomes inconsistent.
    pub fn proper_linear_decompose(&self, map: &LinearMapRep) -> Result<ProperLinearWitness, NotProperLinear> {
        assert_eq!((map.source_dim(), map.target_dim()), (self.dim, self.dim));
        let d = self.dim;
        let f = self.field;
        let center = self.center_basis();
        let r = center.len();
        let unknowns = r + d * r;
        let mut red = RowReducer::new(f, unknowns + 1);
        let z_times: Vec<Vec<Vec<u32>>> = center
            .iter()
            .map(|z| (0..d).map(|i| self.mul(z, &self.basis_vector(i))).collect())
            .collect();
        for i in 0..d {
            let target = map.column(i);
            for t in 0..d {
                let mut row = Vec::new();
                for (s, zs) in z_times.iter().enumerate() {
                    if zs[i][t] != 0 {
                        row.push((s, zs[i][t]));
                    }
                }
                for (s, z) in center.iter().enumerate() {
                    if z[t] != 0 {
                        row.push((r + i * r + s, z[t]));
                    }
                }
                if target[t] != 0 {
                    row.push((unknowns, target[t]));
                }
                red.push(&row);
            }
            if !red.is_consistent() {
                return Err(NotProperLinear { basis_index: i });
            }
        }
        let sol = red.affine_solution().expect("consistent");
        let x = sol.particular;
        let z = linalg::combine(f, d, &center, &x[..r]);
        let eta_cols: Vec<Vec<u32>> = (0..d)
            .map(|i| linalg::combine(f, d, &center, &x[r + i * r..r + (i + 1) * r]))
            .collect();
        Ok(ProperLinearWitness {
            z,
            eta: LinearMapRep::from_columns(f, d, &eta_cols),
        })
    }

    pub fn identity_map(&self) -> LinearMapRep {
        LinearMapRep::identity(self.field, self.dim)
    }
}

/// `f` admits no decomposition `z x + η(x)`; the system first becomes
/// inconsistent on the equations for `f(e_{basis_index})`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Error)]
#[error("map is not proper (inconsistent at basis element {basis_index})")]
pub struct NotProperLinear {
    pub basis_index: usize,
}

/// `f(x) = z x + η(x)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProperLinearWitness {
    pub z: Vec<u32>,
    pub eta: LinearMapRep,
}

impl ProperLinearWitness {
    /// Recomputes `z e_i + η(e_i)` for every basis element.
    pub fn reconstruct(&self, algebra: &Algebra) -> LinearMapRep {
        let f = algebra.field();
        let cols: Vec<Vec<u32>> = (0..algebra.dim())
            .map(|i| linalg::vec_add(f, &algebra.mul(&self.z, &algebra.basis_vector(i)), &self.eta.column(i)))
            .collect();
        LinearMapRep::from_columns(f, algebra.dim(), &cols)
    }
}

/// Linear map `F_p^source → F_p^target`; column `j` is the image of `e_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearMapRep {
    matrix: DenseMatrix,
}

impl LinearMapRep {
    pub fn new(matrix: DenseMatrix) -> Self {
        Self { matrix }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        Self::new(DenseMatrix::identity(field, n))
    }

    pub fn zero(field: PrimeField, source: usize, target: usize) -> Self {
        Self::new(DenseMatrix::zeros(field, target, source))
    }

    /// Builds a map from the images of the basis vectors.
    pub fn from_columns(field: PrimeField, target_dim: usize, columns: &[Vec<u32>]) -> Self {
        Self::new(DenseMatrix::from_columns(field, target_dim, columns))
    }

    pub fn from_fn(field: PrimeField, source: usize, target: usize, mut image: impl FnMut(usize) -> Vec<u32>) -> Self {
        let cols: Vec<Vec<u32>> = (0..source).map(&mut image).collect();
        Self::from_columns(field, target, &cols)
    }

    /// Inverse of [`LinearMapRep::to_column_major`].
    pub fn from_column_major(field: PrimeField, source: usize, target: usize, v: &[u32]) -> Self {
        let cols: Vec<Vec<u32>> = v.chunks(target.max(1)).take(source).map(|c| c.to_vec()).collect();
        Self::from_columns(field, target, &cols)
    }

    /// Concatenated basis images.
    pub fn to_column_major(&self) -> Vec<u32> {
        (0..self.source_dim()).flat_map(|j| self.column(j)).collect()
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn field(&self) -> PrimeField {
        self.matrix.field()
    }

    pub fn source_dim(&self) -> usize {
        self.matrix.cols()
    }

    pub fn target_dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn column(&self, j: usize) -> Vec<u32> {
        self.matrix.column(j)
    }

    pub fn columns(&self) -> Vec<Vec<u32>> {
        self.matrix.columns()
    }

    pub fn apply(&self, x: &[u32]) -> Vec<u32> {
        self.matrix.apply(x)
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &LinearMapRep) -> LinearMapRep {
        Self::new(self.matrix.mul(&other.matrix))
    }

    pub fn add(&self, other: &LinearMapRep) -> LinearMapRep {
        Self::new(self.matrix.add(&other.matrix))
    }

    pub fn sub(&self, other: &LinearMapRep) -> LinearMapRep {
        Self::new(self.matrix.sub(&other.matrix))
    }

    pub fn scale(&self, c: u32) -> LinearMapRep {
        Self::new(self.matrix.scale(c))
    }

    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }

    pub fn inverse(&self) -> Option<LinearMapRep> {
        self.matrix.inverse().map(Self::new)
    }
}
