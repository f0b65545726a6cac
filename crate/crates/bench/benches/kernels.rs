use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use gmat_core::linalg::{rref, DenseMatrix};
use gmat_core::*;

fn pseudo_random_matrix(f: PrimeField, n: usize) -> DenseMatrix {
    let mut state = 0x2545_f491_4f6c_dd1du64;
    let rows: Vec<Vec<u32>> = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| {
                    state ^= state << 13;
                    state ^= state >> 7;
                    state ^= state << 17;
                    f.reduce(state)
                })
                .collect()
        })
        .collect();
    DenseMatrix::from_rows(f, n, &rows)
}

fn linear_algebra(c: &mut Criterion) {
    let f = PrimeField::new(5).unwrap();
    let m = pseudo_random_matrix(f, 64);
    c.bench_function("rref 64x64 F_5", |b| b.iter(|| rref(black_box(&m))));
}

fn traces(c: &mut Criterion) {
    let g = build_block_partition(3, 1, 5).unwrap();
    c.bench_function("commuting trace space full 3 1 5", |b| {
        b.iter(|| trace_space(black_box(&g), TraceKind::Commuting, DEFAULT_ENUM_CAP).unwrap())
    });
    let q = BilinearMapRep::product(g.flat());
    c.bench_function("proper decomposition of x^2 on full 3 1 5", |b| {
        b.iter(|| proper_trace_decompose(black_box(&g), black_box(&q)).unwrap())
    });
}

fn lie(c: &mut Criterion) {
    let g = build_block_partition(3, 1, 5).unwrap();
    let l = LinearMapRep::identity(g.field(), g.dim());
    c.bench_function("lie decomposition of the identity on full 3 1 5", |b| {
        b.iter(|| lie_decompose(black_box(&l), &g, &g).unwrap())
    });
    let full = build_block_partition(4, 2, 5).unwrap();
    c.bench_function("identity [[x^2,y],[x,y]] on full 4 2 5", |b| {
        b.iter(|| check_identity_l41(black_box(&full), DEFAULT_ENUM_CAP).unwrap())
    });
}

criterion_group!(benches, linear_algebra, traces, lie);
criterion_main!(benches);
