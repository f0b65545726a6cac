//! Morita contexts, centers and hypothesis reports on the catalog.

mod common;

use gmat_core::algebra::Algebra;
use gmat_core::hypotheses::Verdict;
use gmat_core::linalg;
use gmat_core::morita::{
    center_zero_divisors, central_annihilation_witness, largest_central_ideal, Loyalty, MoritaViolation, Side,
};
use gmat_core::*;

fn catalog() -> Vec<Gma> {
    vec![
        build_block_partition(4, 2, 5).unwrap(),
        build_block_partition(3, 1, 5).unwrap(),
        build_block_partition(3, 2, 3).unwrap(),
        build_upper_triangular(3, 5).unwrap(),
        build_upper_triangular(2, 3).unwrap(),
        build_nonloyal_demo(5).unwrap(),
    ]
}

#[test]
fn block_partition_is_matrix_algebra() {
    for (n, k) in [(2, 1), (3, 1), (3, 2), (4, 2)] {
        let g = build_block_partition(n, k, 5).unwrap();
        assert!(common::positions_are_isomorphism(&g, &common::block_positions(n, k), n));
    }
}

#[test]
fn catalog_validates() {
    for g in catalog() {
        assert!(g.validate().is_empty());
        assert!(g.flat().validate().is_empty());
    }
}

#[test]
fn zeroed_psi_breaks_the_diagram() {
    let g = build_block_partition(3, 1, 5).unwrap();
    let mut ctx = g.context().clone();
    let (dn, dm, db) = ctx.psi.dims();
    ctx.psi = Pairing::zero(dn, dm, db);
    let v = ctx.validate();
    assert!(matches!(v.first(), Some(MoritaViolation::DiagramM { .. })), "{v:?}");
}

#[test]
fn block_split_bounds() {
    assert!(build_block_partition(3, 0, 5).is_err());
    assert!(build_block_partition(3, 3, 5).is_err());
    assert!(build_block_partition(3, 1, 4).is_err());
}

#[test]
fn centers_agree_with_flat_algebra() {
    for g in catalog() {
        let c = gma_center(&g);
        assert!(linalg::subspace_eq(
            g.field(),
            g.dim(),
            &c.center_basis,
            &g.flat().center_basis()
        ));
        for z in &c.center_basis {
            let parts = g.split(z);
            assert!(linalg::is_zero(&parts.m) && linalg::is_zero(&parts.n));
        }
    }
}

#[test]
fn center_of_peirce_splits() {
    let f = PrimeField::new(5).unwrap();
    let t3 = Algebra::upper_triangular(f, 3);
    // e11 and e11 + e22 in T_3
    let e11 = t3.basis_vector(0);
    let mut e = e11.clone();
    for (k, v) in e.iter_mut().enumerate() {
        *v = f.add(*v, if k == 3 { 1 } else { 0 });
    }
    for idem in [e11, e] {
        assert_eq!(t3.mul(&idem, &idem), idem);
        let split = build_from_idempotent(&t3, &idem).unwrap();
        assert!(split.gma.is_triangular());
        let c = gma_center(&split.gma);
        let ambient: Vec<Vec<u32>> = c.center_basis.iter().map(|z| split.to_ambient.apply(z)).collect();
        assert!(linalg::subspace_eq(f, t3.dim(), &ambient, &t3.center_basis()));
    }
}

#[test]
fn peirce_rejects_bad_idempotents() {
    let f = PrimeField::new(5).unwrap();
    let m2 = Algebra::matrix(f, 2);
    assert!(build_from_idempotent(&m2, m2.unit()).is_err());
    assert!(build_from_idempotent(&m2, &[2, 0, 0, 0]).is_err());
}

#[test]
fn faithfulness_and_loyalty() {
    let g = build_block_partition(4, 2, 5).unwrap();
    assert_eq!(check_module_faithful(&g, Side::Left), None);
    assert_eq!(check_module_faithful(&g, Side::Right), None);
    assert!(check_loyal(&g, 100).is_err());
    assert_eq!(check_loyal(&g, DEFAULT_ENUM_CAP).unwrap(), Loyalty::Loyal);
    let demo = build_nonloyal_demo(5).unwrap();
    assert_eq!(check_module_faithful(&demo, Side::Left), None);
    match check_loyal(&demo, DEFAULT_ENUM_CAP).unwrap() {
        Loyalty::Witness { a, b } => {
            // a M b = 0 on every basis vector of M
            for u in 0..demo.m().dim() {
                let mut m = vec![0; demo.m().dim()];
                m[u] = 1;
                let amb = demo
                    .m()
                    .act_right(demo.field(), &demo.m().act_left(demo.field(), &a, &m), &b);
                assert!(linalg::is_zero(&amb));
            }
        }
        Loyalty::Loyal => panic!("demo must not be loyal"),
    }
}

#[test]
fn loyal_instances_satisfy_the_center_lemmas() {
    for g in [
        build_block_partition(3, 1, 5).unwrap(),
        build_block_partition(4, 2, 3).unwrap(),
    ] {
        let c = gma_center(&g);
        assert_eq!(central_annihilation_witness(&g, &c, DEFAULT_ENUM_CAP).unwrap(), None);
        assert_eq!(center_zero_divisors(&g, &c, DEFAULT_ENUM_CAP).unwrap(), None);
        assert!(largest_central_ideal(&g, &c).is_empty());
    }
}

#[test]
fn reports_carry_witnesses() {
    for g in catalog() {
        for t in Theorem::ALL {
            for cond in hypothesis_report(&g, t, DEFAULT_ENUM_CAP).conditions {
                if let Verdict::Fails(w) = &cond.verdict {
                    assert!(!w.note.is_empty(), "{}", cond.key);
                }
            }
        }
    }
}

#[test]
fn lie_target_report_on_full_4_2() {
    let g = build_block_partition(4, 2, 5).unwrap();
    for t in [Theorem::P4_2, Theorem::T4_3Target] {
        let r = hypothesis_report(&g, t, DEFAULT_ENUM_CAP);
        assert!(r.all_hold(), "{t}: {:?}", r.failed_keys());
    }
}

#[test]
fn triangular_corners_fail_the_corner_conditions() {
    let g = build_upper_triangular(2, 3).unwrap();
    let r = hypothesis_report(&g, Theorem::T3_4, DEFAULT_ENUM_CAP);
    for key in [
        "ZA_proper_subset",
        "ZB_proper_subset",
        "A_noncommutative",
        "B_noncommutative",
    ] {
        assert!(!r.get(key).unwrap().holds(), "{key}");
    }
    assert!(r.get("M_loyal").unwrap().holds());
}
