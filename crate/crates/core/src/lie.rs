//! Lie isomorphisms between generalized matrix algebras and their standard
//! form `l = m + n`.

use std::fmt;

use thiserror::Error;

use crate::algebra::{Algebra, LinearMapRep};
use crate::field::{PointCounter, PrimeField};
use crate::linalg;
use crate::morita::{Gma, TooLarge};
use crate::traces::{decompose_on, BilinearMapRep};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LieError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },
    #[error("field mismatch: p = {0} vs p = {1}")]
    FieldMismatch(u32, u32),
}

/// Why a map is not a Lie isomorphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LieWitness {
    /// Rank of the matrix when below full.
    NotBijective { rank: usize },
    /// `l([e_i, e_j]) != [l(e_i), l(e_j)]`.
    BracketFails { pair: (usize, usize) },
}

impl fmt::Display for LieWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LieWitness::NotBijective { rank } => write!(f, "not bijective (rank {rank})"),
            LieWitness::BracketFails { pair } => {
                write!(f, "bracket not preserved on basis pair ({}, {})", pair.0, pair.1)
            }
        }
    }
}

fn check_shapes(l: &LinearMapRep, g: &Gma, g2: &Gma) -> Result<(), LieError> {
    if g.field() != g2.field() || l.field() != g.field() {
        return Err(LieError::FieldMismatch(g.field().modulus(), g2.field().modulus()));
    }
    if l.source_dim() != g.dim() || l.target_dim() != g2.dim() || g.dim() != g2.dim() {
        return Err(LieError::DimensionMismatch {
            expected: format!("{} -> {}", g.dim(), g2.dim()),
            found: format!("{} -> {}", l.source_dim(), l.target_dim()),
        });
    }
    Ok(())
}

/// `Ok(None)` when `l` is a bijective bracket-preserving map.
pub fn is_lie_isomorphism(l: &LinearMapRep, g: &Gma, g2: &Gma) -> Result<Option<LieWitness>, LieError> {
    check_shapes(l, g, g2)?;
    let rank = l.rank();
    if rank < g.dim() {
        return Ok(Some(LieWitness::NotBijective { rank }));
    }
    let (a, a2) = (g.flat(), g2.flat());
    let images = l.columns();
    for i in 0..g.dim() {
        for j in i + 1..g.dim() {
            let lhs = l.apply(&a.commutator(&a.basis_vector(i), &a.basis_vector(j)));
            if lhs != a2.commutator(&images[i], &images[j]) {
                return Ok(Some(LieWitness::BracketFails { pair: (i, j) }));
            }
        }
    }
    Ok(None)
}

/// `[[x², y], [x, y]]`
pub fn identity_value(alg: &Algebra, x: &[u32], y: &[u32]) -> Vec<u32> {
    alg.commutator(&alg.commutator(&alg.mul(x, x), y), &alg.commutator(x, y))
}

/// A pair `(x, y)` with `[[x², y], [x, y]] != 0`, in flat coordinates.
pub type IdentityWitness = (Vec<u32>, Vec<u32>);

/// Decides whether `[[x², y], [x, y]] = 0` on all of `G`. For `p >= 5` the
/// full linearization is checked on basis tuples; for `p = 3` all pairs are
/// enumerated.
pub fn check_identity_l41(g: &Gma, cap: u64) -> Result<Option<IdentityWitness>, TooLarge> {
    let alg = g.flat();
    let f = alg.field();
    let d = alg.dim();
    if f.modulus() == 3 {
        TooLarge::check(f, 2 * d, cap)?;
        for xy in PointCounter::new(f, 2 * d) {
            let (x, y) = xy.split_at(d);
            if !linalg::is_zero(&identity_value(alg, x, y)) {
                return Ok(Some((x.to_vec(), y.to_vec())));
            }
        }
        return Ok(None);
    }
    let basis: Vec<Vec<u32>> = (0..d).map(|i| alg.basis_vector(i)).collect();
    let products: Vec<Vec<Vec<u32>>> = (0..d)
        .map(|a| (0..d).map(|b| alg.mul(&basis[a], &basis[b])).collect())
        .collect();
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    for i1 in 0..d {
        for i2 in i1..d {
            for i3 in i2..d {
                let xs = [i1, i2, i3];
                for j1 in 0..d {
                    for j2 in j1..d {
                        let ys = [j1, j2];
                        let mut total = vec![0; d];
                        for s in PERMS {
                            for t in [[0, 1], [1, 0]] {
                                let sq = &products[xs[s[0]]][xs[s[1]]];
                                let left = alg.commutator(sq, &basis[ys[t[0]]]);
                                let right = alg.commutator(&basis[xs[s[2]]], &basis[ys[t[1]]]);
                                total = linalg::vec_add(f, &total, &alg.commutator(&left, &right));
                            }
                        }
                        if !linalg::is_zero(&total) {
                            return Ok(Some(grid_witness(alg, xs, ys)));
                        }
                    }
                }
            }
        }
    }
    Ok(None)
}

// The identity restricted to span(e_i1, e_i2, e_i3, e_j1, e_j2) is a nonzero
// polynomial of degree <= 3 in each x coefficient and <= 2 in each y
// coefficient, so it is nonzero somewhere on {0..3}³ × {0..2}².
fn grid_witness(alg: &Algebra, xs: [usize; 3], ys: [usize; 2]) -> IdentityWitness {
    let f = alg.field();
    let d = alg.dim();
    for n in 0..64u32 {
        let c = [n % 4, n / 4 % 4, n / 16];
        let mut x = vec![0; d];
        for (k, &i) in xs.iter().enumerate() {
            x[i] = f.add(x[i], c[k]);
        }
        for m in 0..9u32 {
            let e = [m % 3, m / 3];
            let mut y = vec![0; d];
            for (k, &j) in ys.iter().enumerate() {
                y[j] = f.add(y[j], e[k]);
            }
            if !linalg::is_zero(&identity_value(alg, &x, &y)) {
                return (x, y);
            }
        }
    }
    unreachable!("nonzero multilinear value implies a grid witness")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LieKind {
    Homomorphism,
    NegativeOfAntiHomomorphism,
}

impl fmt::Display for LieKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LieKind::Homomorphism => "homomorphism",
            LieKind::NegativeOfAntiHomomorphism => "negative-of-anti-homomorphism",
        })
    }
}

/// `l = m + n` with `m` a homomorphism or the negative of an
/// anti-homomorphism and `n` center-valued.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieDecomposition {
    /// Coefficient of `y²` in `l(l⁻¹(y)²)`, a central element of `G'`.
    pub lambda: Vec<u32>,
    /// `G' → Z(G')`.
    pub mu1: LinearMapRep,
    pub m: LinearMapRep,
    pub n: LinearMapRep,
    pub kind: LieKind,
    /// Set when `m₀` is both multiplicative and anti-multiplicative.
    pub degenerate: bool,
    /// `n(x) = h(x)·1`, present when `Z(G')` is spanned by `1`.
    pub h: Option<Vec<u32>>,
}

impl LieDecomposition {
    /// `m` for a homomorphism, `−m` otherwise: in either case a unital map
    /// that is multiplicative or anti-multiplicative.
    pub fn signed_m(&self) -> LinearMapRep {
        match self.kind {
            LieKind::Homomorphism => self.m.clone(),
            LieKind::NegativeOfAntiHomomorphism => self.m.scale(self.m.field().neg(1)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum LieFailure {
    #[error("not a Lie isomorphism: {0}")]
    NotLieIsomorphism(LieWitness),
    #[error("l(l⁻¹(y)²) is not proper (inconsistent at basis pair ({}, {}))", .pair.0, .pair.1)]
    NotProperTrace { pair: (usize, usize) },
    #[error("λ = 0")]
    LambdaZero,
    #[error("m₀ is neither multiplicative nor anti-multiplicative (basis pair ({}, {}))", .pair.0, .pair.1)]
    NeitherKind { pair: (usize, usize) },
    #[error(transparent)]
    Shape(#[from] LieError),
}

/// First basis pair where `m(e_i e_j) != m(e_i) m(e_j)` (or, with
/// `anti`, `!= m(e_j) m(e_i)`).
fn multiplicativity_failure(m: &LinearMapRep, a: &Algebra, a2: &Algebra, anti: bool) -> Option<(usize, usize)> {
    let images = m.columns();
    for i in 0..a.dim() {
        for j in 0..a.dim() {
            let lhs = m.apply(&a.mul(&a.basis_vector(i), &a.basis_vector(j)));
            let rhs = if anti {
                a2.mul(&images[j], &images[i])
            } else {
                a2.mul(&images[i], &images[j])
            };
            if lhs != rhs {
                return Some((i, j));
            }
        }
    }
    None
}

/// Builds `q(y, z) = l(l⁻¹(y) l⁻¹(z))`, decomposes its trace as
/// `λ y² + μ₁(y) y + ν₁(y)`, sets `m₀(x) = λ l(x) + μ₁(l(x))/2` and
/// classifies `m₀` by direct tests. `n` is recovered as `l − m`.
pub fn lie_decompose(l: &LinearMapRep, g: &Gma, g2: &Gma) -> Result<LieDecomposition, LieFailure> {
    if let Some(w) = is_lie_isomorphism(l, g, g2)? {
        return Err(LieFailure::NotLieIsomorphism(w));
    }
    let (a, a2) = (g.flat(), g2.flat());
    let f = a.field();
    let d = a.dim();
    let inv = l.inverse().expect("bijective");
    let pre: Vec<Vec<u32>> = inv.columns();
    let q = BilinearMapRep::from_fn(f, d, |y, z| l.apply(&a.mul(&pre[y], &pre[z])));
    let dec = decompose_on(a2, &q).map_err(|e| LieFailure::NotProperTrace { pair: e.pair })?;
    let lambda = dec.z;
    if linalg::is_zero(&lambda) {
        return Err(LieFailure::LambdaZero);
    }
    let mu1 = dec.mu;
    let h = f.half();
    let m0 = LinearMapRep::from_fn(f, d, d, |j| {
        let lx = l.column(j);
        linalg::vec_add(f, &a2.mul(&lambda, &lx), &linalg::vec_scale(f, h, &mu1.apply(&lx)))
    });
    let hom = multiplicativity_failure(&m0, a, a2, false);
    let anti = multiplicativity_failure(&m0, a, a2, true);
    let (kind, m) = match (hom, anti) {
        (None, _) => (LieKind::Homomorphism, m0),
        (Some(_), None) => (LieKind::NegativeOfAntiHomomorphism, m0.scale(f.neg(1))),
        (Some(pair), Some(_)) => return Err(LieFailure::NeitherKind { pair }),
    };
    let n = l.sub(&m);
    let center = a2.center_basis();
    let h_functional = scalar_functional(&n, a2, &center);
    Ok(LieDecomposition {
        lambda,
        mu1,
        m,
        n,
        kind,
        degenerate: hom.is_none() && anti.is_none(),
        h: h_functional,
    })
}

// n(e_j) = h_j · 1 when the center is F_p · 1
fn scalar_functional(n: &LinearMapRep, a2: &Algebra, center: &[Vec<u32>]) -> Option<Vec<u32>> {
    if center.len() != 1 {
        return None;
    }
    let one = a2.unit();
    let pivot = one.iter().position(|&c| c != 0)?;
    let inv = a2.field().inv(one[pivot])?;
    n.columns()
        .iter()
        .map(|col| {
            let h = a2.field().mul(col[pivot], inv);
            (linalg::vec_scale(a2.field(), h, one) == *col).then_some(h)
        })
        .collect()
}

/// A clause of the standard form that does not hold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StandardFormViolation {
    SumMismatch { basis: usize },
    NNotCentral { basis: usize },
    NOnCommutator { pair: (usize, usize) },
    KindProperty { pair: (usize, usize) },
    MNotInjective,
    MNotSurjective,
    MUnitNotSigned,
    SquareDefectNotCentral { basis: usize },
    EpsilonNonzero { pair: (usize, usize) },
    LambdaNotSign,
}

impl StandardFormViolation {
    pub fn clause(&self) -> &'static str {
        match self {
            Self::SumMismatch { .. } => "l = m + n",
            Self::NNotCentral { .. } => "n central-valued",
            Self::NOnCommutator { .. } => "n vanishes on commutators",
            Self::KindProperty { .. } => "kind property",
            Self::MNotInjective => "m injective",
            Self::MNotSurjective => "m surjective",
            Self::MUnitNotSigned => "m(1) = ±1",
            Self::SquareDefectNotCentral { .. } => "m(x²) − m(x)² central",
            Self::EpsilonNonzero { .. } => "ε residual zero",
            Self::LambdaNotSign => "λ = ±1",
        }
    }
}

impl fmt::Display for StandardFormViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::SumMismatch { basis } | Self::NNotCentral { basis } | Self::SquareDefectNotCentral { basis } => {
                write!(f, "{} fails at basis {basis}", self.clause())
            }
            Self::NOnCommutator { pair } | Self::KindProperty { pair } | Self::EpsilonNonzero { pair } => {
                write!(f, "{} fails at basis pair ({}, {})", self.clause(), pair.0, pair.1)
            }
            _ => write!(f, "{} fails", self.clause()),
        }
    }
}

/// Re-checks every clause of the decomposition from scratch. Surjectivity,
/// `m(1) = ±1` and `λ = ±1` are checked only when `Z(G')` is one-dimensional.
pub fn verify_standard_form(
    l: &LinearMapRep,
    dec: &LieDecomposition,
    g: &Gma,
    g2: &Gma,
) -> Result<Vec<StandardFormViolation>, LieError> {
    check_shapes(l, g, g2)?;
    check_shapes(&dec.m, g, g2)?;
    check_shapes(&dec.n, g, g2)?;
    let (a, a2) = (g.flat(), g2.flat());
    let f = a.field();
    let d = a.dim();
    let mut out = Vec::new();
    if let Some(basis) = (0..d).find(|&j| linalg::vec_add(f, &dec.m.column(j), &dec.n.column(j)) != l.column(j)) {
        out.push(StandardFormViolation::SumMismatch { basis });
    }
    if let Some(basis) = (0..d).find(|&j| !a2.is_central(&dec.n.column(j))) {
        out.push(StandardFormViolation::NNotCentral { basis });
    }
    let pairs = || (0..d).flat_map(|i| (0..d).map(move |j| (i, j)));
    if let Some(pair) = pairs()
        .filter(|&(i, j)| i < j)
        .find(|&(i, j)| !linalg::is_zero(&dec.n.apply(&a.commutator(&a.basis_vector(i), &a.basis_vector(j)))))
    {
        out.push(StandardFormViolation::NOnCommutator { pair });
    }
    let anti = dec.kind == LieKind::NegativeOfAntiHomomorphism;
    let signed = dec.signed_m();
    if let Some(pair) = multiplicativity_failure(&signed, a, a2, anti) {
        out.push(StandardFormViolation::KindProperty { pair });
    }
    if dec.m.rank() < d {
        out.push(StandardFormViolation::MNotInjective);
    }
    let center = a2.center_basis();
    if center.len() == 1 {
        if dec.m.rank() < g2.dim() {
            out.push(StandardFormViolation::MNotSurjective);
        }
        let m1 = dec.m.apply(a.unit());
        let one = a2.unit().to_vec();
        if m1 != one && m1 != linalg::vec_scale(f, f.neg(1), &one) {
            out.push(StandardFormViolation::MUnitNotSigned);
        }
        if dec.lambda != one && dec.lambda != linalg::vec_scale(f, f.neg(1), &one) {
            out.push(StandardFormViolation::LambdaNotSign);
        }
    }
    let images = signed.columns();
    if let Some(basis) = (0..d).find(|&j| {
        let x = a.basis_vector(j);
        let defect = linalg::vec_sub(f, &signed.apply(&a.mul(&x, &x)), &a2.mul(&images[j], &images[j]));
        !a2.is_central(&defect)
    }) {
        out.push(StandardFormViolation::SquareDefectNotCentral { basis });
    }
    // ε(x, y) = λ m(xy) − α m(x) m(y) − (α − 1) m(y) m(x), α = 1 or 0
    if let Some(pair) = pairs().find(|&(i, j)| {
        let xy = signed.apply(&a.mul(&a.basis_vector(i), &a.basis_vector(j)));
        let mut eps = a2.mul(&dec.lambda, &xy);
        if anti {
            eps = linalg::vec_add(f, &eps, &a2.mul(&images[j], &images[i]));
        } else {
            eps = linalg::vec_sub(f, &eps, &a2.mul(&images[i], &images[j]));
        }
        !linalg::is_zero(&eps)
    }) {
        out.push(StandardFormViolation::EpsilonNonzero { pair });
    }
    Ok(out)
}

/// `x ↦ −xᵀ` on `M_n(F_p)` in the coordinates `E_rc ↦ r*n + c`.
pub fn negative_transpose(field: PrimeField, n: usize) -> LinearMapRep {
    let minus = field.neg(1);
    LinearMapRep::from_fn(field, n * n, n * n, |j| {
        let mut v = vec![0; n * n];
        v[(j % n) * n + j / n] = minus;
        v
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morita::{build_block_partition, build_upper_triangular, DEFAULT_ENUM_CAP};

    fn m3() -> Gma {
        build_block_partition(3, 1, 5).unwrap()
    }

    // matrix position of a flat coordinate of `full 3 1 p`
    fn position(g: &Gma, idx: usize) -> (usize, usize) {
        let (block, i) = g.locate(idx);
        match block {
            crate::morita::Block::A => (0, 0),
            crate::morita::Block::M => (0, 1 + i),
            crate::morita::Block::N => (1 + i, 0),
            crate::morita::Block::B => (1 + i / 2, 1 + i % 2),
        }
    }

    fn flat_negative_transpose(g: &Gma) -> LinearMapRep {
        let f = g.field();
        let d = g.dim();
        let index: Vec<(usize, usize)> = (0..d).map(|k| position(g, k)).collect();
        LinearMapRep::from_fn(f, d, d, |j| {
            let (r, c) = index[j];
            let t = index.iter().position(|&p| p == (c, r)).unwrap();
            let mut v = vec![0; d];
            v[t] = f.neg(1);
            v
        })
    }

    #[test]
    fn identity_decomposes_trivially() {
        let g = m3();
        let l = LinearMapRep::identity(g.field(), g.dim());
        let dec = lie_decompose(&l, &g, &g).unwrap();
        assert_eq!(dec.kind, LieKind::Homomorphism);
        assert_eq!(dec.lambda, g.flat().unit());
        assert_eq!(dec.m, l);
        assert_eq!(dec.n, LinearMapRep::zero(g.field(), 9, 9));
        assert_eq!(dec.h, Some(vec![0; 9]));
        assert!(verify_standard_form(&l, &dec, &g, &g).unwrap().is_empty());
    }

    #[test]
    fn negative_transpose_is_negative_anti() {
        let g = m3();
        let f = g.field();
        let l = flat_negative_transpose(&g);
        assert_eq!(is_lie_isomorphism(&l, &g, &g).unwrap(), None);
        let dec = lie_decompose(&l, &g, &g).unwrap();
        assert_eq!(dec.kind, LieKind::NegativeOfAntiHomomorphism);
        assert_eq!(dec.lambda, linalg::vec_scale(f, f.neg(1), g.flat().unit()));
        assert_eq!(dec.m, l);
        assert!(linalg::is_zero(&dec.n.to_column_major()));
        assert!(verify_standard_form(&l, &dec, &g, &g).unwrap().is_empty());
    }

    #[test]
    fn rank_deficient_map_rejected() {
        let g = build_block_partition(2, 1, 5).unwrap();
        let e11 = g.flat().basis_vector(0);
        let l = LinearMapRep::from_fn(g.field(), 4, 4, |j| g.flat().mul(&e11, &g.flat().basis_vector(j)));
        assert!(matches!(
            is_lie_isomorphism(&l, &g, &g).unwrap(),
            Some(LieWitness::NotBijective { rank: 2 })
        ));
    }

    #[test]
    fn tampered_n_is_reported() {
        let g = m3();
        let l = LinearMapRep::identity(g.field(), g.dim());
        let mut dec = lie_decompose(&l, &g, &g).unwrap();
        let mut cols = dec.n.columns();
        cols[1][1] = 1;
        dec.n = LinearMapRep::from_columns(g.field(), 9, &cols);
        let v = verify_standard_form(&l, &dec, &g, &g).unwrap();
        assert!(v.iter().any(|x| x.clause() == "n central-valued"));
    }

    #[test]
    fn identity_l41_on_small_instances() {
        let t2 = build_upper_triangular(2, 5).unwrap();
        assert_eq!(check_identity_l41(&t2, DEFAULT_ENUM_CAP).unwrap(), None);
        let g = build_block_partition(4, 2, 5).unwrap();
        let (x, y) = check_identity_l41(&g, DEFAULT_ENUM_CAP).unwrap().unwrap();
        assert!(!linalg::is_zero(&identity_value(g.flat(), &x, &y)));
        let t3 = build_upper_triangular(2, 3).unwrap();
        assert_eq!(check_identity_l41(&t3, DEFAULT_ENUM_CAP).unwrap(), None);
    }

    #[test]
    fn negative_transpose_helper_matches_matrix_coordinates() {
        let f = PrimeField::new(5).unwrap();
        let l = negative_transpose(f, 2);
        assert_eq!(l.apply(&[1, 2, 3, 4]), vec![4, 2, 3, 1]);
    }
}
