#![allow(dead_code)]

use gmat_core::linalg::DenseMatrix;
use gmat_core::{Gma, LinearMapRep, PrimeField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Matrix position of each flat coordinate of `full n k p`: the corners
/// `k×k`, `k×(n−k)`, `(n−k)×k`, `(n−k)×(n−k)` in row-major order.
pub fn block_positions(n: usize, k: usize) -> Vec<(usize, usize)> {
    let l = n - k;
    let mut out = Vec::with_capacity(n * n);
    out.extend((0..k * k).map(|i| (i / k, i % k)));
    out.extend((0..k * l).map(|i| (i / l, k + i % l)));
    out.extend((0..l * k).map(|i| (k + i / k, i % k)));
    out.extend((0..l * l).map(|i| (k + i / l, k + i % l)));
    out
}

pub fn flat_to_matrix(f: PrimeField, pos: &[(usize, usize)], n: usize, x: &[u32]) -> DenseMatrix {
    let mut m = DenseMatrix::zeros(f, n, n);
    for (i, &(r, c)) in pos.iter().enumerate() {
        m.set(r, c, x[i]);
    }
    m
}

pub fn matrix_to_flat(pos: &[(usize, usize)], m: &DenseMatrix) -> Vec<u32> {
    pos.iter().map(|&(r, c)| m.get(r, c)).collect()
}

/// Checks that the coordinate identification is an algebra isomorphism onto
/// `M_n(F_p)` with the ordinary matrix product.
pub fn positions_are_isomorphism(g: &Gma, pos: &[(usize, usize)], n: usize) -> bool {
    let f = g.field();
    let alg = g.flat();
    (0..g.dim()).all(|i| {
        (0..g.dim()).all(|j| {
            let (x, y) = (alg.basis_vector(i), alg.basis_vector(j));
            let prod = flat_to_matrix(f, pos, n, &x).mul(&flat_to_matrix(f, pos, n, &y));
            matrix_to_flat(pos, &prod) == alg.mul(&x, &y)
        })
    })
}

/// The flat linear map induced by a map on `n × n` matrices.
pub fn matrix_map(
    f: PrimeField,
    pos: &[(usize, usize)],
    n: usize,
    map: impl Fn(&DenseMatrix) -> DenseMatrix,
) -> LinearMapRep {
    let d = pos.len();
    LinearMapRep::from_fn(f, d, d, |j| {
        let mut e = vec![0; d];
        e[j] = 1;
        matrix_to_flat(pos, &map(&flat_to_matrix(f, pos, n, &e)))
    })
}

pub fn random_vector(rng: &mut impl Rng, f: PrimeField, len: usize) -> Vec<u32> {
    (0..len).map(|_| rng.gen_range(0..f.modulus())).collect()
}

pub fn random_invertible(rng: &mut impl Rng, f: PrimeField, n: usize) -> DenseMatrix {
    loop {
        let rows: Vec<Vec<u32>> = (0..n).map(|_| random_vector(rng, f, n)).collect();
        let m = DenseMatrix::from_rows(f, n, &rows);
        if m.rank() == n {
            return m;
        }
    }
}

pub fn trace(m: &DenseMatrix) -> u32 {
    let f = m.field();
    (0..m.rows()).fold(0, |acc, i| f.add(acc, m.get(i, i)))
}
