//! Bilinear maps on the flat algebra of a [`Gma`] and their traces
//! `T_q(x) = q(x, x)`.
//!
//! A trace only depends on the symmetric part `S(x, y) = (q(x, y) + q(y, x)) / 2`,
//! so solution spaces are parameterized by `S(e_a, e_b)` for `a <= b`:
//! coordinate `s*d + k` of a symmetric vector is the `e_k` coordinate of
//! `S` on the `s`-th pair in lexicographic order.

use thiserror::Error;

use crate::algebra::{Algebra, LinearMapRep};
use crate::field::{PointCounter, PrimeField};
use crate::linalg::{self, RowReducer};
use crate::morita::{Gma, TooLarge};

/// `q(e_i, e_j) = Σ_k tensor[(i*d + j)*d + k] e_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BilinearMapRep {
    field: PrimeField,
    dim: usize,
    tensor: Vec<u32>,
}

impl BilinearMapRep {
    pub fn new(field: PrimeField, dim: usize, tensor: Vec<u32>) -> Self {
        assert_eq!(tensor.len(), dim * dim * dim, "tensor must have shape d×d×d");
        Self { field, dim, tensor }
    }

    pub fn zero(field: PrimeField, dim: usize) -> Self {
        Self::new(field, dim, vec![0; dim * dim * dim])
    }

    pub fn from_fn(field: PrimeField, dim: usize, mut value: impl FnMut(usize, usize) -> Vec<u32>) -> Self {
        let mut tensor = Vec::with_capacity(dim * dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                let v = value(i, j);
                assert_eq!(v.len(), dim);
                tensor.extend(v.into_iter().map(|x| x % field.modulus()));
            }
        }
        Self::new(field, dim, tensor)
    }

    /// `q(x, y) = xy`
    pub fn product(alg: &Algebra) -> Self {
        Self::from_fn(alg.field(), alg.dim(), |i, j| {
            alg.mul(&alg.basis_vector(i), &alg.basis_vector(j))
        })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tensor(&self) -> &[u32] {
        &self.tensor
    }

    /// `q(e_i, e_j)`
    pub fn basis_value(&self, i: usize, j: usize) -> &[u32] {
        let s = (i * self.dim + j) * self.dim;
        &self.tensor[s..s + self.dim]
    }

    pub fn apply(&self, x: &[u32], y: &[u32]) -> Vec<u32> {
        let f = self.field;
        let mut out = vec![0; self.dim];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for (j, &yj) in y.iter().enumerate() {
                if yj != 0 {
                    linalg::axpy(f, &mut out, f.mul(xi, yj), self.basis_value(i, j));
                }
            }
        }
        out
    }

    /// `q(x, x)`
    pub fn evaluate_trace(&self, x: &[u32]) -> Vec<u32> {
        self.apply(x, x)
    }

    /// `(q(x, y) + q(y, x)) / 2`
    pub fn symmetric_part(&self) -> Self {
        let f = self.field;
        let h = f.half();
        Self::from_fn(f, self.dim, |i, j| {
            let s = linalg::vec_add(f, self.basis_value(i, j), self.basis_value(j, i));
            linalg::vec_scale(f, h, &s)
        })
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(
            self.field,
            self.dim,
            linalg::vec_add(self.field, &self.tensor, &other.tensor),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(
            self.field,
            self.dim,
            linalg::vec_sub(self.field, &self.tensor, &other.tensor),
        )
    }

    pub fn scale(&self, c: u32) -> Self {
        Self::new(self.field, self.dim, linalg::vec_scale(self.field, c, &self.tensor))
    }

    /// Symmetric-pair coordinates of the symmetric part.
    pub fn to_sym_vector(&self) -> Vec<u32> {
        let s = self.symmetric_part();
        sym_pairs(self.dim)
            .into_iter()
            .flat_map(|(a, b)| s.basis_value(a, b).to_vec())
            .collect()
    }

    /// The symmetric bilinear map with the given symmetric-pair coordinates.
    pub fn from_sym_vector(field: PrimeField, dim: usize, v: &[u32]) -> Self {
        let idx = PairIndex::new(dim);
        Self::from_fn(field, dim, |i, j| {
            let s = idx.get(i, j);
            v[s * dim..(s + 1) * dim].to_vec()
        })
    }
}

/// Pairs `(a, b)` with `a <= b` in lexicographic order.
pub fn sym_pairs(d: usize) -> Vec<(usize, usize)> {
    (0..d).flat_map(|a| (a..d).map(move |b| (a, b))).collect()
}

struct PairIndex {
    d: usize,
    table: Vec<usize>,
}

impl PairIndex {
    fn new(d: usize) -> Self {
        let mut table = vec![0; d * d];
        for (s, (a, b)) in sym_pairs(d).into_iter().enumerate() {
            table[a * d + b] = s;
            table[b * d + a] = s;
        }
        Self { d, table }
    }

    fn get(&self, a: usize, b: usize) -> usize {
        self.table[a * self.d + b]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TraceKind {
    /// `[T(x), x] = 0`
    Commuting,
    /// `[T(x), x] ∈ Z(G)`
    Centralizing,
}

impl std::str::FromStr for TraceKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "commuting" => Ok(Self::Commuting),
            "centralizing" => Ok(Self::Centralizing),
            other => Err(format!(
                "unknown trace kind {other:?} (expected commuting or centralizing)"
            )),
        }
    }
}

/// Maps a value `w` to the coordinates that must vanish: all of `w` for
/// commuting traces, or the non-pivot coordinates of `w` reduced modulo the
/// center's echelon basis for centralizing ones.
struct Projection {
    field: PrimeField,
    /// `(output coordinate, Σ coeff * w[source])`
    rows: Vec<Vec<(usize, u32)>>,
}

impl Projection {
    fn new(alg: &Algebra, kind: TraceKind) -> Self {
        let d = alg.dim();
        let f = alg.field();
        match kind {
            TraceKind::Commuting => Self {
                field: f,
                rows: (0..d).map(|t| vec![(t, 1)]).collect(),
            },
            TraceKind::Centralizing => {
                let center = alg.center_basis();
                let pivots: Vec<usize> = center
                    .iter()
                    .map(|z| z.iter().position(|&x| x != 0).expect("nonzero basis vector"))
                    .collect();
                let rows = (0..d)
                    .filter(|t| !pivots.contains(t))
                    .map(|t| {
                        let mut row = vec![(t, 1)];
                        for (z, &pc) in center.iter().zip(&pivots) {
                            if z[t] != 0 {
                                row.push((pc, f.neg(z[t])));
                            }
                        }
                        row
                    })
                    .collect();
                Self { field: f, rows }
            }
        }
    }

    fn is_zero(&self, w: &[u32]) -> bool {
        self.rows
            .iter()
            .all(|row| row.iter().fold(0, |acc, &(s, c)| self.field.mul_add(acc, c, w[s])) == 0)
    }

    /// Combines per-coordinate sparse rows into the projected rows.
    fn combine(&self, by_coord: &[Vec<(usize, u32)>]) -> impl Iterator<Item = Vec<(usize, u32)>> + '_ {
        let f = self.field;
        let by_coord = by_coord.to_vec();
        self.rows.iter().map(move |row| {
            let mut out = Vec::new();
            for &(s, c) in row {
                out.extend(by_coord[s].iter().map(|&(col, v)| (col, f.mul(c, v))));
            }
            out
        })
    }
}

/// `[e_k, e_c]` as sparse coordinates, indexed `c*d + k`.
fn commutator_table(alg: &Algebra) -> Vec<Vec<(usize, u32)>> {
    let d = alg.dim();
    let mut table = Vec::with_capacity(d * d);
    for c in 0..d {
        for k in 0..d {
            let v = alg.commutator(&alg.basis_vector(k), &alg.basis_vector(c));
            table.push(v.into_iter().enumerate().filter(|&(_, x)| x != 0).collect());
        }
    }
    table
}

fn needs_enumeration(field: PrimeField) -> bool {
    field.modulus() == 3
}

/// `[S(x,y), z] + [S(y,z), x] + [S(x,z), y]` on basis vectors.
fn polarized_value(alg: &Algebra, s: &BilinearMapRep, i: usize, j: usize, k: usize) -> Vec<u32> {
    let f = alg.field();
    let term = |a: usize, b: usize, c: usize| alg.commutator(s.basis_value(a, b), &alg.basis_vector(c));
    let mut w = term(i, j, k);
    w = linalg::vec_add(f, &w, &term(j, k, i));
    linalg::vec_add(f, &w, &term(i, k, j))
}

fn cubic_value(alg: &Algebra, q: &BilinearMapRep, x: &[u32]) -> Vec<u32> {
    alg.commutator(&q.evaluate_trace(x), x)
}

/// Decides whether `T_q` is commuting or centralizing; returns a point `x`
/// at which it fails.
///
/// For `p >= 5` the cubic `x ↦ [q(x,x), x]` is polarized on basis triples;
/// the first failing triple `(i, j, k)` is turned into a witness by searching
/// `x = a e_i + b e_j + c e_k` over `a, b, c ∈ {0..3}`. For `p = 3` all of
/// `F_3^d` is enumerated in counter order.
pub fn trace_witness(g: &Gma, q: &BilinearMapRep, kind: TraceKind, cap: u64) -> Result<Option<Vec<u32>>, TooLarge> {
    let alg = g.flat();
    let d = alg.dim();
    let f = alg.field();
    let proj = Projection::new(alg, kind);
    if needs_enumeration(f) {
        TooLarge::check(f, d, cap)?;
        return Ok(PointCounter::new(f, d).find(|x| !proj.is_zero(&cubic_value(alg, q, x))));
    }
    let s = q.symmetric_part();
    for i in 0..d {
        for j in i..d {
            for k in j..d {
                if proj.is_zero(&polarized_value(alg, &s, i, j, k)) {
                    continue;
                }
                for n in 0..64u32 {
                    let c = [n % 4, n / 4 % 4, n / 16];
                    let mut x = vec![0; d];
                    for (&idx, &coef) in [i, j, k].iter().zip(&c) {
                        x[idx] = f.add(x[idx], coef);
                    }
                    if !proj.is_zero(&cubic_value(alg, q, &x)) {
                        return Ok(Some(x));
                    }
                }
            }
        }
    }
    Ok(None)
}

pub fn is_commuting_trace(g: &Gma, q: &BilinearMapRep, cap: u64) -> Result<Option<Vec<u32>>, TooLarge> {
    trace_witness(g, q, TraceKind::Commuting, cap)
}

pub fn is_centralizing_trace(g: &Gma, q: &BilinearMapRep, cap: u64) -> Result<Option<Vec<u32>>, TooLarge> {
    trace_witness(g, q, TraceKind::Centralizing, cap)
}

/// Canonical basis of the symmetric bilinear maps whose trace is commuting
/// (or centralizing), as the kernel of the linear constraint system on
/// symmetric-pair coordinates.
pub fn trace_space(g: &Gma, kind: TraceKind, cap: u64) -> Result<Vec<BilinearMapRep>, TooLarge> {
    let red = trace_constraints(g.flat(), kind, cap)?;
    let d = g.dim();
    Ok(red
        .kernel_basis()
        .into_iter()
        .map(|v| BilinearMapRep::from_sym_vector(g.field(), d, &v))
        .collect())
}

/// Reduced constraint system for [`trace_space`].
pub fn trace_constraints(alg: &Algebra, kind: TraceKind, cap: u64) -> Result<RowReducer, TooLarge> {
    let d = alg.dim();
    let f = alg.field();
    let idx = PairIndex::new(d);
    let npairs = d * (d + 1) / 2;
    let mut red = RowReducer::new(f, npairs * d);
    let comm = commutator_table(alg);
    let proj = Projection::new(alg, kind);
    let mut by_coord: Vec<Vec<(usize, u32)>> = vec![Vec::new(); d];
    if needs_enumeration(f) {
        TooLarge::check(f, d, cap)?;
        let pairs = sym_pairs(d);
        for x in PointCounter::new(f, d) {
            by_coord.iter_mut().for_each(Vec::clear);
            // [e_k, x] for every k
            let comm_x: Vec<Vec<u32>> = (0..d)
                .map(|k| {
                    let mut v = vec![0; d];
                    for (c, &xc) in x.iter().enumerate() {
                        if xc != 0 {
                            for &(t, val) in &comm[c * d + k] {
                                v[t] = f.mul_add(v[t], xc, val);
                            }
                        }
                    }
                    v
                })
                .collect();
            for (s, &(a, b)) in pairs.iter().enumerate() {
                let mut coef = f.mul(x[a], x[b]);
                if a != b {
                    coef = f.add(coef, coef);
                }
                if coef == 0 {
                    continue;
                }
                for (k, ck) in comm_x.iter().enumerate() {
                    for (t, &v) in ck.iter().enumerate() {
                        if v != 0 {
                            by_coord[t].push((s * d + k, f.mul(coef, v)));
                        }
                    }
                }
            }
            for row in proj.combine(&by_coord) {
                red.push(&row);
            }
        }
        return Ok(red);
    }
    for i in 0..d {
        for j in i..d {
            for k in j..d {
                by_coord.iter_mut().for_each(Vec::clear);
                for (a, b, c) in [(i, j, k), (j, k, i), (i, k, j)] {
                    let s = idx.get(a, b);
                    for kk in 0..d {
                        for &(t, v) in &comm[c * d + kk] {
                            by_coord[t].push((s * d + kk, v));
                        }
                    }
                }
                for row in proj.combine(&by_coord) {
                    if !row.is_empty() {
                        red.push(&row);
                    }
                }
            }
        }
    }
    Ok(red)
}

/// `T_q(x) = z x² + μ(x) x + ν(x, x)` with `z` central and `μ`, `ν`
/// center-valued.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProperDecomposition {
    pub z: Vec<u32>,
    pub mu: LinearMapRep,
    /// Symmetric.
    pub nu: BilinearMapRep,
}

impl ProperDecomposition {
    /// The symmetric bilinear map
    /// `z (xy + yx)/2 + (μ(x) y + μ(y) x)/2 + ν(x, y)`.
    pub fn reconstruct(&self, alg: &Algebra) -> BilinearMapRep {
        let f = alg.field();
        let h = f.half();
        BilinearMapRep::from_fn(f, alg.dim(), |a, b| {
            let (ea, eb) = (alg.basis_vector(a), alg.basis_vector(b));
            let mut w = linalg::vec_add(
                f,
                &alg.mul(&self.z, &alg.mul(&ea, &eb)),
                &alg.mul(&self.z, &alg.mul(&eb, &ea)),
            );
            w = linalg::vec_add(f, &w, &alg.mul(&self.mu.column(a), &eb));
            w = linalg::vec_add(f, &w, &alg.mul(&self.mu.column(b), &ea));
            linalg::vec_add(f, &linalg::vec_scale(f, h, &w), self.nu.basis_value(a, b))
        })
    }
}

/// No proper decomposition exists; the system first becomes inconsistent
/// on the equations for `S(e_a, e_b)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Error)]
#[error("trace is not proper (inconsistent at basis pair ({}, {}))", .pair.0, .pair.1)]
pub struct NotProper {
    pub pair: (usize, usize),
}

/// Solves for `(z, μ, ν)` coefficient-wise on the polarized identity; the
/// unknowns are center coordinates of `z`, of each `μ(e_i)`, and of each
/// `ν(e_a, e_b)`, `a <= b`. Returns the canonical solution.
pub fn proper_trace_decompose(g: &Gma, q: &BilinearMapRep) -> Result<ProperDecomposition, NotProper> {
    decompose_on(g.flat(), q)
}

pub(crate) fn decompose_on(alg: &Algebra, q: &BilinearMapRep) -> Result<ProperDecomposition, NotProper> {
    let d = alg.dim();
    let f = alg.field();
    let h = f.half();
    let center = alg.center_basis();
    let r = center.len();
    let pairs = sym_pairs(d);
    let (mu_off, nu_off) = (r, r + d * r);
    let unknowns = nu_off + pairs.len() * r;
    let s = q.symmetric_part();
    // z_s e_a for every center basis element and basis index
    let ze: Vec<Vec<Vec<u32>>> = center
        .iter()
        .map(|z| (0..d).map(|a| alg.mul(z, &alg.basis_vector(a))).collect())
        .collect();
    let mut red = RowReducer::new(f, unknowns + 1);
    for (p_idx, &(a, b)) in pairs.iter().enumerate() {
        let sym_ab = linalg::vec_add(
            f,
            &alg.mul(&alg.basis_vector(a), &alg.basis_vector(b)),
            &alg.mul(&alg.basis_vector(b), &alg.basis_vector(a)),
        );
        let z_terms: Vec<Vec<u32>> = center
            .iter()
            .map(|z| linalg::vec_scale(f, h, &alg.mul(z, &sym_ab)))
            .collect();
        let target = s.basis_value(a, b);
        for t in 0..d {
            let mut row = Vec::new();
            for sidx in 0..r {
                if z_terms[sidx][t] != 0 {
                    row.push((sidx, z_terms[sidx][t]));
                }
                // (μ(e_a) e_b + μ(e_b) e_a) / 2
                let vb = f.mul(h, ze[sidx][b][t]);
                if vb != 0 {
                    row.push((mu_off + a * r + sidx, vb));
                }
                let va = f.mul(h, ze[sidx][a][t]);
                if va != 0 {
                    row.push((mu_off + b * r + sidx, va));
                }
                if center[sidx][t] != 0 {
                    row.push((nu_off + p_idx * r + sidx, center[sidx][t]));
                }
            }
            if target[t] != 0 {
                row.push((unknowns, target[t]));
            }
            red.push(&row);
        }
        if !red.is_consistent() {
            return Err(NotProper { pair: (a, b) });
        }
    }
    let x = red.affine_solution().expect("consistent").particular;
    let z = linalg::combine(f, d, &center, &x[..r]);
    let mu_cols: Vec<Vec<u32>> = (0..d)
        .map(|i| linalg::combine(f, d, &center, &x[mu_off + i * r..mu_off + (i + 1) * r]))
        .collect();
    let nu_vec: Vec<u32> = (0..pairs.len())
        .flat_map(|p_idx| linalg::combine(f, d, &center, &x[nu_off + p_idx * r..nu_off + (p_idx + 1) * r]))
        .collect();
    Ok(ProperDecomposition {
        z,
        mu: LinearMapRep::from_columns(f, d, &mu_cols),
        nu: BilinearMapRep::from_sym_vector(f, d, &nu_vec),
    })
}

/// Canonical basis of the span of all proper-form traces, polarized to
/// symmetric bilinear maps.
pub fn properness_subspace(g: &Gma) -> Vec<BilinearMapRep> {
    let alg = g.flat();
    let d = alg.dim();
    let f = alg.field();
    let center = alg.center_basis();
    let pairs = sym_pairs(d);
    let zero = || BilinearMapRep::zero(f, d);
    let mut generators = Vec::new();
    for z in &center {
        let gen = ProperDecomposition {
            z: z.clone(),
            mu: LinearMapRep::zero(f, d, d),
            nu: zero(),
        };
        generators.push(gen.reconstruct(alg).to_sym_vector());
        for i in 0..d {
            let mut mu = vec![vec![0; d]; d];
            mu[i] = z.clone();
            let gen = ProperDecomposition {
                z: vec![0; d],
                mu: LinearMapRep::from_columns(f, d, &mu),
                nu: zero(),
            };
            generators.push(gen.reconstruct(alg).to_sym_vector());
        }
        for s in 0..pairs.len() {
            let mut v = vec![0; pairs.len() * d];
            v[s * d..(s + 1) * d].copy_from_slice(z);
            generators.push(v);
        }
    }
    linalg::span_basis(f, pairs.len() * d, &generators)
        .into_iter()
        .map(|v| BilinearMapRep::from_sym_vector(f, d, &v))
        .collect()
}

/// Whether every map in `maps` lies in the span of `basis` (compared on
/// symmetric parts). Returns the index of the first map outside.
pub fn first_outside_span(basis: &[BilinearMapRep], maps: &[BilinearMapRep]) -> Option<usize> {
    let first = basis.first().or(maps.first())?;
    let (f, d) = (first.field(), first.dim());
    let mut red = RowReducer::new(f, d * (d + 1) / 2 * d);
    for b in basis {
        red.push_dense(&b.to_sym_vector());
    }
    maps.iter().position(|m| !red.contains(&m.to_sym_vector()))
}

/// Whether two families span the same space of traces.
pub fn same_trace_span(a: &[BilinearMapRep], b: &[BilinearMapRep]) -> bool {
    first_outside_span(a, b).is_none() && first_outside_span(b, a).is_none()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::is_zero;
    use crate::morita::{build_block_partition, build_upper_triangular, DEFAULT_ENUM_CAP};

    #[test]
    fn trace_of_product() {
        let g = build_block_partition(2, 1, 5).unwrap();
        let q = BilinearMapRep::product(g.flat());
        // (e12 + e21)^2 = 1
        assert_eq!(q.evaluate_trace(&[0, 1, 1, 0]), vec![1, 0, 0, 1]);
        assert_eq!(is_commuting_trace(&g, &q, DEFAULT_ENUM_CAP).unwrap(), None);
    }

    #[test]
    fn left_unit_times_product_is_not_commuting() {
        let g = build_block_partition(2, 1, 5).unwrap();
        let alg = g.flat();
        let e11 = alg.basis_vector(0);
        let q = BilinearMapRep::from_fn(alg.field(), 4, |i, j| {
            alg.mul(&e11, &alg.mul(&alg.basis_vector(i), &alg.basis_vector(j)))
        });
        let x = is_commuting_trace(&g, &q, DEFAULT_ENUM_CAP).unwrap().expect("witness");
        assert!(!is_zero(&alg.commutator(&q.evaluate_trace(&x), &x)));
        assert!(is_centralizing_trace(&g, &q, DEFAULT_ENUM_CAP).unwrap().is_some());
    }

    #[test]
    fn sym_vector_roundtrip() {
        let f = PrimeField::new(7).unwrap();
        let q = BilinearMapRep::from_fn(f, 3, |i, j| vec![(i * 3 + j) as u32, 1, (i * j) as u32]);
        let s = q.symmetric_part();
        assert_eq!(BilinearMapRep::from_sym_vector(f, 3, &q.to_sym_vector()), s);
    }

    #[test]
    fn product_decomposes_with_unit_coefficient() {
        let g = build_upper_triangular(2, 3).unwrap();
        let q = BilinearMapRep::product(g.flat());
        let dec = proper_trace_decompose(&g, &q).unwrap();
        assert_eq!(dec.z, g.flat().unit());
        assert!(dec.mu.matrix().is_zero());
        assert_eq!(dec.reconstruct(g.flat()), q.symmetric_part());
    }

    #[test]
    fn commutator_has_zero_trace() {
        let g = build_block_partition(2, 1, 5).unwrap();
        let alg = g.flat();
        let q = BilinearMapRep::from_fn(alg.field(), 4, |i, j| {
            linalg::vec_scale(
                alg.field(),
                alg.field().half(),
                &alg.commutator(&alg.basis_vector(i), &alg.basis_vector(j)),
            )
        });
        let dec = proper_trace_decompose(&g, &q).unwrap();
        assert!(is_zero(&dec.z));
        assert!(dec.mu.matrix().is_zero());
        assert_eq!(dec.nu, BilinearMapRep::zero(alg.field(), 4));
    }

    #[test]
    fn scalar_algebra_spaces() {
        let f = PrimeField::new(5).unwrap();
        let alg = Algebra::scalars(f);
        let red = trace_constraints(&alg, TraceKind::Commuting, DEFAULT_ENUM_CAP).unwrap();
        assert_eq!(red.kernel_basis().len(), 1);
    }
}
