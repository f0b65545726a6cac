//! Trace spaces cross-checked by evaluating `[T(x), x]` on every point.

mod common;

use gmat_core::linalg;
use gmat_core::traces::{is_commuting_trace, BilinearMapRep};
use gmat_core::*;
use rand::Rng;

/// `[q(x, x), x]` (or its non-centrality) on every point of the algebra.
fn brute_force_trace_holds(g: &Gma, q: &BilinearMapRep, kind: TraceKind) -> bool {
    let alg = g.flat();
    let center = alg.center_basis();
    PointCounter::new(g.field(), g.dim()).all(|x| {
        let c = alg.commutator(&q.evaluate_trace(&x), &x);
        match kind {
            TraceKind::Commuting => linalg::is_zero(&c),
            TraceKind::Centralizing => linalg::subspace_contains(g.field(), &center, &c),
        }
    })
}

fn random_bilinear(rng: &mut impl Rng, f: PrimeField, d: usize) -> BilinearMapRep {
    BilinearMapRep::new(f, d, common::random_vector(rng, f, d * d * d))
}

fn in_span(f: PrimeField, basis: &[BilinearMapRep], q: &BilinearMapRep) -> bool {
    let vecs: Vec<Vec<u32>> = basis.iter().map(|b| b.to_sym_vector()).collect();
    linalg::subspace_contains(
        f,
        &linalg::span_basis(f, q.to_sym_vector().len(), &vecs),
        &q.to_sym_vector(),
    )
}

fn cross_check(g: &Gma, kind: TraceKind, seed: u64) {
    let f = g.field();
    let space = trace_space(g, kind, DEFAULT_ENUM_CAP).unwrap();
    for q in &space {
        assert!(brute_force_trace_holds(g, q, kind));
    }
    let mut rng = common::rng(seed);
    for _ in 0..40 {
        // half the samples lie in the space, half are arbitrary
        let q = if rng.gen_bool(0.5) {
            let c = common::random_vector(&mut rng, f, space.len());
            space
                .iter()
                .zip(&c)
                .fold(BilinearMapRep::zero(f, g.dim()), |acc, (b, &k)| acc.add(&b.scale(k)))
        } else {
            random_bilinear(&mut rng, f, g.dim())
        };
        assert_eq!(in_span(f, &space, &q), brute_force_trace_holds(g, &q, kind));
    }
}

#[test]
fn triangular_2_3_commuting_and_centralizing() {
    let g = build_upper_triangular(2, 3).unwrap();
    cross_check(&g, TraceKind::Commuting, 1);
    cross_check(&g, TraceKind::Centralizing, 2);
}

#[test]
fn full_2_1_5_commuting_and_centralizing() {
    let g = build_block_partition(2, 1, 5).unwrap();
    cross_check(&g, TraceKind::Commuting, 3);
    cross_check(&g, TraceKind::Centralizing, 4);
}

#[test]
fn nonloyal_demo_3_commuting() {
    let g = build_nonloyal_demo(3).unwrap();
    cross_check(&g, TraceKind::Commuting, 5);
}

#[test]
fn witnesses_violate_the_definition() {
    let g = build_block_partition(2, 1, 5).unwrap();
    let mut rng = common::rng(6);
    for _ in 0..20 {
        let q = random_bilinear(&mut rng, g.field(), g.dim());
        if let Some(x) = is_commuting_trace(&g, &q, DEFAULT_ENUM_CAP).unwrap() {
            assert!(!linalg::is_zero(&g.flat().commutator(&q.evaluate_trace(&x), &x)));
        }
    }
}

#[test]
fn centralizing_contains_commuting() {
    for g in [
        build_block_partition(3, 1, 5).unwrap(),
        build_upper_triangular(3, 5).unwrap(),
    ] {
        let commuting = trace_space(&g, TraceKind::Commuting, DEFAULT_ENUM_CAP).unwrap();
        let centralizing = trace_space(&g, TraceKind::Centralizing, DEFAULT_ENUM_CAP).unwrap();
        assert_eq!(gmat_core::traces::first_outside_span(&centralizing, &commuting), None);
    }
}

#[test]
fn proper_decomposition_reconstructs_symmetric_part() {
    let g = build_block_partition(4, 2, 5).unwrap();
    let f = g.field();
    let space = trace_space(&g, TraceKind::Commuting, DEFAULT_ENUM_CAP).unwrap();
    let mut rng = common::rng(7);
    for _ in 0..5 {
        let c = common::random_vector(&mut rng, f, space.len());
        let q = space
            .iter()
            .zip(&c)
            .fold(BilinearMapRep::zero(f, g.dim()), |acc, (b, &k)| acc.add(&b.scale(k)));
        let dec = proper_trace_decompose(&g, &q).unwrap();
        assert_eq!(dec.reconstruct(g.flat()), q.symmetric_part());
        assert!(g.flat().is_central(&dec.z));
        for col in dec.mu.columns() {
            assert!(g.flat().is_central(&col));
        }
    }
}

#[test]
fn non_proper_map_reports_pair() {
    // q(x, y) = e x y on the demo algebra, with e a non-central idempotent
    let g = build_nonloyal_demo(5).unwrap();
    let alg = g.flat();
    let e = g.embed(Block::A, &[1, 0]);
    let q = BilinearMapRep::from_fn(g.field(), g.dim(), |i, j| {
        alg.mul(&e, &alg.mul(&alg.basis_vector(i), &alg.basis_vector(j)))
    });
    let err = proper_trace_decompose(&g, &q).unwrap_err();
    assert!(err.pair.0 <= err.pair.1 && err.pair.1 < g.dim());
}
