//! Block components of commuting traces and the standard form of Lie
//! isomorphisms.

mod common;

use gmat_core::blocks::{derive, DerivedError};
use gmat_core::lie::{identity_value, LieFailure, LieWitness};
use gmat_core::linalg::{self, DenseMatrix};
use gmat_core::*;

#[test]
fn product_trace_components() {
    let g = build_block_partition(3, 1, 5).unwrap();
    let q = BilinearMapRep::product(g.flat());
    let analysis = block_components(&g, &q, DEFAULT_ENUM_CAP);
    let d = analysis.derived.unwrap();
    assert_eq!(d.epsilon, g.a().unit());
    assert_eq!(d.epsilon_prime, g.b().unit());
    assert!(linalg::is_zero(&d.alpha.to_column_major()));
    assert!(linalg::is_zero(&d.gamma.to_column_major()));
    let x: Vec<u32> = (0..9).map(|i| (i * i % 5) as u32).collect();
    assert_eq!(analysis.components.reassemble(&g, &x), q.evaluate_trace(&x));
}

#[test]
fn non_commuting_trace_has_no_derived_data() {
    let g = build_block_partition(3, 1, 5).unwrap();
    let e = g.flat().basis_vector(0);
    let alg = g.flat();
    let q = BilinearMapRep::from_fn(g.field(), g.dim(), |i, j| {
        alg.mul(&e, &alg.mul(&alg.basis_vector(i), &alg.basis_vector(j)))
    });
    let analysis = block_components(&g, &q, DEFAULT_ENUM_CAP);
    match analysis.derived {
        Err(DerivedError::RequiresCommuting { witness }) => {
            assert!(!linalg::is_zero(&alg.commutator(&q.evaluate_trace(&witness), &witness)));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn perturbed_components_fail_a_check() {
    let g = build_block_partition(4, 2, 5).unwrap();
    let f = g.field();
    let center = gma_center(&g);
    let q = BilinearMapRep::product(g.flat());
    let comps = extract_components(&g, &q);
    let d = derive(&g, &center, &comps).unwrap();
    let mut tampered = d.clone();
    tampered.epsilon = linalg::vec_scale(f, 2, &d.epsilon);
    let checks = check_block_identities(&g, &center, &comps, &tampered);
    assert!(checks.iter().any(|c| !c.holds()));
}

#[test]
fn identity_l41_matches_corner_commutativity() {
    for g in [
        build_block_partition(4, 2, 5).unwrap(),
        build_block_partition(3, 1, 5).unwrap(),
        build_block_partition(2, 1, 5).unwrap(),
        build_upper_triangular(2, 5).unwrap(),
        build_upper_triangular(3, 5).unwrap(),
        build_nonloyal_demo(5).unwrap(),
        build_upper_triangular(2, 3).unwrap(),
    ] {
        let commutative = g.a().is_commutative() && g.b().is_commutative();
        let w = check_identity_l41(&g, DEFAULT_ENUM_CAP).unwrap();
        assert_eq!(w.is_none(), commutative);
        if let Some((x, y)) = w {
            assert!(!linalg::is_zero(&identity_value(g.flat(), &x, &y)));
        }
    }
}

#[test]
fn lower_triangular_demo_satisfies_identity() {
    // A = B = F_5, M = 0, N = F_5
    let g = build_block_partition(2, 1, 5).unwrap();
    let mut ctx = g.context().clone();
    ctx.m = Bimodule::zero(1, 1);
    let (_, dn, da) = ctx.phi.dims();
    ctx.phi = Pairing::zero(0, dn, da);
    let (dn, _, db) = ctx.psi.dims();
    ctx.psi = Pairing::zero(dn, 0, db);
    let lower = Gma::new(ctx).unwrap();
    assert_eq!(check_identity_l41(&lower, DEFAULT_ENUM_CAP).unwrap(), None);
}

fn conjugation(g: &Gma, c: &DenseMatrix, n: usize, k: usize) -> LinearMapRep {
    let ci = c.inverse().unwrap();
    common::matrix_map(g.field(), &common::block_positions(n, k), n, |x| c.mul(x).mul(&ci))
}

#[test]
fn composition_of_automorphisms_is_homomorphism() {
    let g = build_block_partition(3, 1, 5).unwrap();
    let f = g.field();
    let mut rng = common::rng(11);
    for _ in 0..5 {
        let l1 = conjugation(&g, &common::random_invertible(&mut rng, f, 3), 3, 1);
        let l2 = conjugation(&g, &common::random_invertible(&mut rng, f, 3), 3, 1);
        let dec = lie_decompose(&l2.compose(&l1), &g, &g).unwrap();
        assert_eq!(dec.kind, LieKind::Homomorphism);
        assert!(!dec.degenerate);
    }
}

#[test]
fn square_defect_is_central() {
    let g = build_block_partition(3, 1, 5).unwrap();
    let f = g.field();
    let pos = common::block_positions(3, 1);
    let l = common::matrix_map(f, &pos, 3, |x| {
        x.transpose()
            .scale(f.neg(1))
            .add(&DenseMatrix::identity(f, 3).scale(common::trace(x)))
    });
    let dec = lie_decompose(&l, &g, &g).unwrap();
    assert_eq!(dec.kind, LieKind::NegativeOfAntiHomomorphism);
    let s = dec.signed_m();
    let alg = g.flat();
    for j in 0..9 {
        let x = alg.basis_vector(j);
        let defect = linalg::vec_sub(f, &s.apply(&alg.mul(&x, &x)), &alg.mul(&s.apply(&x), &s.apply(&x)));
        assert!(alg.is_central(&defect));
    }
    // n(x) = tr(x) · 1
    let h = dec.h.unwrap();
    for (j, &(r, c)) in pos.iter().enumerate() {
        assert_eq!(h[j], u32::from(r == c));
    }
}

#[test]
fn failures_are_reported() {
    let g = build_block_partition(3, 1, 5).unwrap();
    let f = g.field();
    let zero = LinearMapRep::zero(f, 9, 9);
    assert!(matches!(
        lie_decompose(&zero, &g, &g),
        Err(LieFailure::NotLieIsomorphism(LieWitness::NotBijective { rank: 0 }))
    ));
    // a bijection that does not preserve brackets
    let swap = LinearMapRep::from_fn(f, 9, 9, |j| {
        let mut v = vec![0; 9];
        v[match j {
            0 => 1,
            1 => 0,
            j => j,
        }] = 1;
        v
    });
    assert!(matches!(
        is_lie_isomorphism(&swap, &g, &g).unwrap(),
        Some(LieWitness::BracketFails { .. })
    ));
    let small = build_block_partition(2, 1, 5).unwrap();
    assert!(is_lie_isomorphism(&zero, &g, &small).is_err());
}

#[test]
fn identity_on_nonloyal_demo() {
    let g = build_nonloyal_demo(5).unwrap();
    let l = LinearMapRep::identity(g.field(), g.dim());
    let dec = lie_decompose(&l, &g, &g).unwrap();
    assert_eq!(dec.kind, LieKind::Homomorphism);
    assert!(!dec.degenerate);
    assert_eq!(dec.m, l);
}
