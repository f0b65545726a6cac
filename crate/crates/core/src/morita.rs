//! Morita contexts and the generalized matrix algebras built from them.
//!
//! A [`Gma`] keeps both views of `G = [A M; N B]`: the four corners with
//! their actions and pairings, and the flat algebra on the concatenated
//! coordinates `[A | M | N | B]`.

use std::fmt;

use thiserror::Error;

use crate::algebra::{Algebra, AxiomViolation, LinearMapRep};
use crate::field::{FieldError, PointCounter, PrimeField};
use crate::linalg::{self, is_zero, RowReducer};

/// Default bound on exhaustive enumerations.
pub const DEFAULT_ENUM_CAP: u64 = 1_000_000;

/// Bound on `p^dim Z(G)` for the exhaustive center checks.
pub const CENTER_ENUM_CAP: u64 = 10_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GmaError {
    #[error("{0}")]
    Shape(String),
    #[error("at least one of M and N must be nonzero")]
    BothModulesZero,
    #[error("Morita context axioms fail ({} violations, first: {})", .0.len(), .0[0])]
    Invalid(Vec<MoritaViolation>),
    #[error("element is not idempotent")]
    NotIdempotent,
    #[error("idempotent must differ from 0 and 1")]
    TrivialIdempotent,
    #[error("block size k = {k} must satisfy 0 < k < n = {n}")]
    BlockSplit { n: usize, k: usize },
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Two elements, e.g. a witness pair.
pub type ElementPair = (Vec<u32>, Vec<u32>);

/// An exhaustive search over `p^exponent` points was refused.
#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("enumerating {p}^{exponent} points exceeds the cap {cap}")]
pub struct TooLarge {
    pub p: u32,
    pub exponent: usize,
    pub cap: u64,
}

impl TooLarge {
    /// Errors unless `p^n <= cap`.
    pub fn check(field: PrimeField, n: usize, cap: u64) -> Result<u64, TooLarge> {
        match field.point_count(n) {
            Some(c) if c <= cap => Ok(c),
            _ => Err(TooLarge {
                p: field.modulus(),
                exponent: n,
                cap,
            }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

/// A bimodule over two algebras of dimensions `left_dim`, `right_dim`.
///
/// `left[(i*dim + u)*dim + k]` is the `u_k` coordinate of `x_i · u_u`, and
/// `right[(u*right_dim + j)*dim + k]` that of `u_u · y_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bimodule {
    dim: usize,
    left_dim: usize,
    right_dim: usize,
    left: Vec<u32>,
    right: Vec<u32>,
}

impl Bimodule {
    pub fn new(
        left_dim: usize,
        right_dim: usize,
        dim: usize,
        left: Vec<u32>,
        right: Vec<u32>,
    ) -> Result<Self, GmaError> {
        if left.len() != left_dim * dim * dim {
            return Err(GmaError::Shape(format!(
                "left action has {} entries, expected {}",
                left.len(),
                left_dim * dim * dim
            )));
        }
        if right.len() != dim * right_dim * dim {
            return Err(GmaError::Shape(format!(
                "right action has {} entries, expected {}",
                right.len(),
                dim * right_dim * dim
            )));
        }
        Ok(Self {
            dim,
            left_dim,
            right_dim,
            left,
            right,
        })
    }

    pub fn zero(left_dim: usize, right_dim: usize) -> Self {
        Self::new(left_dim, right_dim, 0, Vec::new(), Vec::new()).expect("empty shapes")
    }

    /// Builds the action tensors from closures giving `x_i · u_u` and `u_u · y_j`.
    pub fn from_actions(
        left_dim: usize,
        right_dim: usize,
        dim: usize,
        mut left: impl FnMut(usize, usize) -> Vec<u32>,
        mut right: impl FnMut(usize, usize) -> Vec<u32>,
    ) -> Self {
        let mut l = Vec::with_capacity(left_dim * dim * dim);
        for i in 0..left_dim {
            for u in 0..dim {
                l.extend(left(i, u));
            }
        }
        let mut r = Vec::with_capacity(dim * right_dim * dim);
        for u in 0..dim {
            for j in 0..right_dim {
                r.extend(right(u, j));
            }
        }
        Self::new(left_dim, right_dim, dim, l, r).expect("closures return vectors of length dim")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn left_dim(&self) -> usize {
        self.left_dim
    }

    pub fn right_dim(&self) -> usize {
        self.right_dim
    }

    pub fn left_tensor(&self) -> &[u32] {
        &self.left
    }

    pub fn right_tensor(&self) -> &[u32] {
        &self.right
    }

    /// `x_i · u_u`
    pub fn left_basis(&self, i: usize, u: usize) -> &[u32] {
        let s = (i * self.dim + u) * self.dim;
        &self.left[s..s + self.dim]
    }

    /// `u_u · y_j`
    pub fn right_basis(&self, u: usize, j: usize) -> &[u32] {
        let s = (u * self.right_dim + j) * self.dim;
        &self.right[s..s + self.dim]
    }

    pub fn act_left(&self, field: PrimeField, x: &[u32], v: &[u32]) -> Vec<u32> {
        let mut out = vec![0; self.dim];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for (u, &vu) in v.iter().enumerate() {
                if vu != 0 {
                    linalg::axpy(field, &mut out, field.mul(xi, vu), self.left_basis(i, u));
                }
            }
        }
        out
    }

    pub fn act_right(&self, field: PrimeField, v: &[u32], y: &[u32]) -> Vec<u32> {
        let mut out = vec![0; self.dim];
        for (u, &vu) in v.iter().enumerate() {
            if vu == 0 {
                continue;
            }
            for (j, &yj) in y.iter().enumerate() {
                if yj != 0 {
                    linalg::axpy(field, &mut out, field.mul(vu, yj), self.right_basis(u, j));
                }
            }
        }
        out
    }

    fn basis_vector(&self, u: usize) -> Vec<u32> {
        let mut v = vec![0; self.dim];
        v[u] = 1;
        v
    }
}

/// Bilinear pairing `U × V → W`; `data[(u*dim_v + v)*dim_w + k]` is the
/// `w_k` coordinate of the pairing of `u_u` and `v_v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pairing {
    dim_u: usize,
    dim_v: usize,
    dim_w: usize,
    data: Vec<u32>,
}

impl Pairing {
    pub fn new(dim_u: usize, dim_v: usize, dim_w: usize, data: Vec<u32>) -> Result<Self, GmaError> {
        if data.len() != dim_u * dim_v * dim_w {
            return Err(GmaError::Shape(format!(
                "pairing has {} entries, expected {}",
                data.len(),
                dim_u * dim_v * dim_w
            )));
        }
        Ok(Self {
            dim_u,
            dim_v,
            dim_w,
            data,
        })
    }

    pub fn zero(dim_u: usize, dim_v: usize, dim_w: usize) -> Self {
        Self::new(dim_u, dim_v, dim_w, vec![0; dim_u * dim_v * dim_w]).expect("consistent shape")
    }

    pub fn from_fn(dim_u: usize, dim_v: usize, dim_w: usize, mut pair: impl FnMut(usize, usize) -> Vec<u32>) -> Self {
        let mut data = Vec::with_capacity(dim_u * dim_v * dim_w);
        for u in 0..dim_u {
            for v in 0..dim_v {
                data.extend(pair(u, v));
            }
        }
        Self::new(dim_u, dim_v, dim_w, data).expect("closure returns vectors of length dim_w")
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.dim_u, self.dim_v, self.dim_w)
    }

    pub fn tensor(&self) -> &[u32] {
        &self.data
    }

    pub fn basis(&self, u: usize, v: usize) -> &[u32] {
        let s = (u * self.dim_v + v) * self.dim_w;
        &self.data[s..s + self.dim_w]
    }

    pub fn apply(&self, field: PrimeField, x: &[u32], y: &[u32]) -> Vec<u32> {
        let mut out = vec![0; self.dim_w];
        for (u, &xu) in x.iter().enumerate() {
            if xu == 0 {
                continue;
            }
            for (v, &yv) in y.iter().enumerate() {
                if yv != 0 {
                    linalg::axpy(field, &mut out, field.mul(xu, yv), self.basis(u, v));
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModuleName {
    M,
    N,
}

impl fmt::Display for ModuleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModuleName::M => "M",
            ModuleName::N => "N",
        })
    }
}

/// A failed Morita context axiom on basis indices. For `M` the left algebra
/// is `A` and the right one `B`; for `N` it is the other way round.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MoritaViolation {
    CornerA(AxiomViolation),
    CornerB(AxiomViolation),
    /// `(x_i x_j) · u != x_i · (x_j · u)`
    LeftAssociativity {
        module: ModuleName,
        i: usize,
        j: usize,
        u: usize,
    },
    LeftUnit {
        module: ModuleName,
        u: usize,
    },
    /// `u · (y_i y_j) != (u · y_i) · y_j`
    RightAssociativity {
        module: ModuleName,
        u: usize,
        i: usize,
        j: usize,
    },
    RightUnit {
        module: ModuleName,
        u: usize,
    },
    /// `(x_i · u) · y_j != x_i · (u · y_j)`
    Compatibility {
        module: ModuleName,
        i: usize,
        u: usize,
        j: usize,
    },
    /// `Φ(a_i m, n) != a_i Φ(m, n)`
    PhiLeftLinear {
        i: usize,
        m: usize,
        n: usize,
    },
    /// `Φ(m, n a_i) != Φ(m, n) a_i`
    PhiRightLinear {
        m: usize,
        n: usize,
        i: usize,
    },
    /// `Φ(m b_j, n) != Φ(m, b_j n)`
    PhiBalanced {
        m: usize,
        j: usize,
        n: usize,
    },
    /// `Ψ(b_j n, m) != b_j Ψ(n, m)`
    PsiLeftLinear {
        j: usize,
        n: usize,
        m: usize,
    },
    /// `Ψ(n, m b_j) != Ψ(n, m) b_j`
    PsiRightLinear {
        n: usize,
        m: usize,
        j: usize,
    },
    /// `Ψ(n a_i, m) != Ψ(n, a_i m)`
    PsiBalanced {
        n: usize,
        i: usize,
        m: usize,
    },
    /// `Φ(m, n) m' != m Ψ(n, m')`
    DiagramM {
        m: usize,
        n: usize,
        m2: usize,
    },
    /// `Ψ(n, m) n' != n Φ(m, n')`
    DiagramN {
        n: usize,
        m: usize,
        n2: usize,
    },
    BothModulesZero,
}

impl fmt::Display for MoritaViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use MoritaViolation::*;
        match self {
            CornerA(v) => write!(f, "A: {v}"),
            CornerB(v) => write!(f, "B: {v}"),
            LeftAssociativity { module, i, j, u } => {
                write!(f, "{module}: (x{i} x{j}) u{u} != x{i} (x{j} u{u})")
            }
            LeftUnit { module, u } => write!(f, "{module}: 1 u{u} != u{u}"),
            RightAssociativity { module, u, i, j } => {
                write!(f, "{module}: u{u} (y{i} y{j}) != (u{u} y{i}) y{j}")
            }
            RightUnit { module, u } => write!(f, "{module}: u{u} 1 != u{u}"),
            Compatibility { module, i, u, j } => {
                write!(f, "{module}: (x{i} u{u}) y{j} != x{i} (u{u} y{j})")
            }
            PhiLeftLinear { i, m, n } => write!(f, "Phi(a{i} m{m}, n{n}) != a{i} Phi(m{m}, n{n})"),
            PhiRightLinear { m, n, i } => write!(f, "Phi(m{m}, n{n} a{i}) != Phi(m{m}, n{n}) a{i}"),
            PhiBalanced { m, j, n } => write!(f, "Phi(m{m} b{j}, n{n}) != Phi(m{m}, b{j} n{n})"),
            PsiLeftLinear { j, n, m } => write!(f, "Psi(b{j} n{n}, m{m}) != b{j} Psi(n{n}, m{m})"),
            PsiRightLinear { n, m, j } => write!(f, "Psi(n{n}, m{m} b{j}) != Psi(n{n}, m{m}) b{j}"),
            PsiBalanced { n, i, m } => write!(f, "Psi(n{n} a{i}, m{m}) != Psi(n{n}, a{i} m{m})"),
            DiagramM { m, n, m2 } => write!(f, "Phi(m{m}, n{n}) m{m2} != m{m} Psi(n{n}, m{m2})"),
            DiagramN { n, m, n2 } => write!(f, "Psi(n{n}, m{m}) n{n2} != n{n} Phi(m{m}, n{n2})"),
            BothModulesZero => write!(f, "M and N are both zero"),
        }
    }
}

/// The data `(A, B, M, N, Φ, Ψ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MoritaContext {
    pub a: Algebra,
    pub b: Algebra,
    /// An `(A, B)`-bimodule.
    pub m: Bimodule,
    /// A `(B, A)`-bimodule.
    pub n: Bimodule,
    /// `Φ: M × N → A`
    pub phi: Pairing,
    /// `Ψ: N × M → B`
    pub psi: Pairing,
}

impl MoritaContext {
    pub fn field(&self) -> PrimeField {
        self.a.field()
    }

    /// Checks that all dimensions fit together and the moduli agree.
    pub fn check_shapes(&self) -> Result<(), GmaError> {
        let (da, db, dm, dn) = (self.a.dim(), self.b.dim(), self.m.dim(), self.n.dim());
        let shape = |what: &str| Err(GmaError::Shape(what.to_string()));
        if self.a.field() != self.b.field() {
            return shape("A and B have different moduli");
        }
        if (self.m.left_dim(), self.m.right_dim()) != (da, db) {
            return shape("M must be an (A, B)-bimodule");
        }
        if (self.n.left_dim(), self.n.right_dim()) != (db, da) {
            return shape("N must be a (B, A)-bimodule");
        }
        if self.phi.dims() != (dm, dn, da) {
            return shape("phiMN must have shape dim M × dim N × dim A");
        }
        if self.psi.dims() != (dn, dm, db) {
            return shape("psiNM must have shape dim N × dim M × dim B");
        }
        Ok(())
    }

    /// Reports every failed axiom on basis tuples: corner algebras, module
    /// laws for `M` then `N`, pairing laws, and the two associativity diagrams.
    pub fn validate(&self) -> Vec<MoritaViolation> {
        let mut out = Vec::new();
        out.extend(self.a.validate().into_iter().map(MoritaViolation::CornerA));
        out.extend(self.b.validate().into_iter().map(MoritaViolation::CornerB));
        module_violations(&self.a, &self.b, &self.m, ModuleName::M, &mut out);
        module_violations(&self.b, &self.a, &self.n, ModuleName::N, &mut out);
        self.pairing_violations(&mut out);
        if self.m.dim() == 0 && self.n.dim() == 0 {
            out.push(MoritaViolation::BothModulesZero);
        }
        out
    }

    fn pairing_violations(&self, out: &mut Vec<MoritaViolation>) {
        use MoritaViolation::*;
        let f = self.field();
        let (a, b, m, n) = (&self.a, &self.b, &self.m, &self.n);
        let (da, db, dm, dn) = (a.dim(), b.dim(), m.dim(), n.dim());
        let mv = |u: usize| m.basis_vector(u);
        let nv = |v: usize| n.basis_vector(v);
        let phi = |x: &[u32], y: &[u32]| self.phi.apply(f, x, y);
        let psi = |x: &[u32], y: &[u32]| self.psi.apply(f, x, y);

        for i in 0..da {
            let ai = a.basis_vector(i);
            for u in 0..dm {
                for v in 0..dn {
                    if phi(&m.act_left(f, &ai, &mv(u)), &nv(v)) != a.mul(&ai, self.phi.basis(u, v)) {
                        out.push(PhiLeftLinear { i, m: u, n: v });
                    }
                }
            }
        }
        for u in 0..dm {
            for v in 0..dn {
                for i in 0..da {
                    let ai = a.basis_vector(i);
                    if phi(&mv(u), &n.act_right(f, &nv(v), &ai)) != a.mul(self.phi.basis(u, v), &ai) {
                        out.push(PhiRightLinear { m: u, n: v, i });
                    }
                }
            }
        }
        for u in 0..dm {
            for j in 0..db {
                let bj = b.basis_vector(j);
                for v in 0..dn {
                    if phi(&m.act_right(f, &mv(u), &bj), &nv(v)) != phi(&mv(u), &n.act_left(f, &bj, &nv(v))) {
                        out.push(PhiBalanced { m: u, j, n: v });
                    }
                }
            }
        }
        for j in 0..db {
            let bj = b.basis_vector(j);
            for v in 0..dn {
                for u in 0..dm {
                    if psi(&n.act_left(f, &bj, &nv(v)), &mv(u)) != b.mul(&bj, self.psi.basis(v, u)) {
                        out.push(PsiLeftLinear { j, n: v, m: u });
                    }
                }
            }
        }
        for v in 0..dn {
            for u in 0..dm {
                for j in 0..db {
                    let bj = b.basis_vector(j);
                    if psi(&nv(v), &m.act_right(f, &mv(u), &bj)) != b.mul(self.psi.basis(v, u), &bj) {
                        out.push(PsiRightLinear { n: v, m: u, j });
                    }
                }
            }
        }
        for v in 0..dn {
            for i in 0..da {
                let ai = a.basis_vector(i);
                for u in 0..dm {
                    if psi(&n.act_right(f, &nv(v), &ai), &mv(u)) != psi(&nv(v), &m.act_left(f, &ai, &mv(u))) {
                        out.push(PsiBalanced { n: v, i, m: u });
                    }
                }
            }
        }
        for u in 0..dm {
            for v in 0..dn {
                for u2 in 0..dm {
                    let lhs = m.act_left(f, self.phi.basis(u, v), &mv(u2));
                    let rhs = m.act_right(f, &mv(u), self.psi.basis(v, u2));
                    if lhs != rhs {
                        out.push(DiagramM { m: u, n: v, m2: u2 });
                    }
                }
            }
        }
        for v in 0..dn {
            for u in 0..dm {
                for v2 in 0..dn {
                    let lhs = n.act_left(f, self.psi.basis(v, u), &nv(v2));
                    let rhs = n.act_right(f, &nv(v), self.phi.basis(u, v2));
                    if lhs != rhs {
                        out.push(DiagramN { n: v, m: u, n2: v2 });
                    }
                }
            }
        }
    }
}

fn module_violations(
    left: &Algebra,
    right: &Algebra,
    module: &Bimodule,
    name: ModuleName,
    out: &mut Vec<MoritaViolation>,
) {
    use MoritaViolation::*;
    let f = left.field();
    let d = module.dim();
    for i in 0..left.dim() {
        for j in 0..left.dim() {
            let xij = left.mul(&left.basis_vector(i), &left.basis_vector(j));
            for u in 0..d {
                let lhs = module.act_left(f, &xij, &module.basis_vector(u));
                let rhs = module.act_left(f, &left.basis_vector(i), module.left_basis(j, u));
                if lhs != rhs {
                    out.push(LeftAssociativity { module: name, i, j, u });
                }
            }
        }
    }
    for u in 0..d {
        if module.act_left(f, left.unit(), &module.basis_vector(u)) != module.basis_vector(u) {
            out.push(LeftUnit { module: name, u });
        }
    }
    for u in 0..d {
        for i in 0..right.dim() {
            for j in 0..right.dim() {
                let yij = right.mul(&right.basis_vector(i), &right.basis_vector(j));
                let lhs = module.act_right(f, &module.basis_vector(u), &yij);
                let rhs = module.act_right(f, module.right_basis(u, i), &right.basis_vector(j));
                if lhs != rhs {
                    out.push(RightAssociativity { module: name, u, i, j });
                }
            }
        }
    }
    for u in 0..d {
        if module.act_right(f, &module.basis_vector(u), right.unit()) != module.basis_vector(u) {
            out.push(RightUnit { module: name, u });
        }
    }
    for i in 0..left.dim() {
        for u in 0..d {
            for j in 0..right.dim() {
                let lhs = module.act_right(f, module.left_basis(i, u), &right.basis_vector(j));
                let rhs = module.act_left(f, &left.basis_vector(i), module.right_basis(u, j));
                if lhs != rhs {
                    out.push(Compatibility { module: name, i, u, j });
                }
            }
        }
    }
}

/// The four corners of `G`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Block {
    A,
    M,
    N,
    B,
}

impl Block {
    pub const ALL: [Block; 4] = [Block::A, Block::M, Block::N, Block::B];

    /// Position in `[A | M | N | B]`, starting at 1.
    pub fn number(self) -> usize {
        self as usize + 1
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Block::A => "A",
            Block::M => "M",
            Block::N => "N",
            Block::B => "B",
        })
    }
}

/// An element `[a m; n b]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GmaElement {
    pub a: Vec<u32>,
    pub m: Vec<u32>,
    pub n: Vec<u32>,
    pub b: Vec<u32>,
}

impl GmaElement {
    pub fn block(&self, block: Block) -> &[u32] {
        match block {
            Block::A => &self.a,
            Block::M => &self.m,
            Block::N => &self.n,
            Block::B => &self.b,
        }
    }

    pub fn to_flat(&self) -> Vec<u32> {
        [&self.a[..], &self.m, &self.n, &self.b].concat()
    }
}

/// A generalized matrix algebra `[A M; N B]` with its flat algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gma {
    context: MoritaContext,
    flat: Algebra,
}

impl Gma {
    /// Assembles the flat algebra. Only shapes are checked; see
    /// [`Gma::validate`] for the axioms.
    pub fn from_context(context: MoritaContext) -> Result<Self, GmaError> {
        context.check_shapes()?;
        if context.m.dim() == 0 && context.n.dim() == 0 {
            return Err(GmaError::BothModulesZero);
        }
        let flat = flat_algebra(&context);
        Ok(Self { context, flat })
    }

    /// Like [`Gma::from_context`], additionally rejecting contexts that
    /// fail [`MoritaContext::validate`].
    pub fn new(context: MoritaContext) -> Result<Self, GmaError> {
        let g = Self::from_context(context)?;
        let violations = g.context.validate();
        if !violations.is_empty() {
            return Err(GmaError::Invalid(violations));
        }
        Ok(g)
    }

    pub fn context(&self) -> &MoritaContext {
        &self.context
    }

    pub fn flat(&self) -> &Algebra {
        &self.flat
    }

    pub fn field(&self) -> PrimeField {
        self.flat.field()
    }

    pub fn dim(&self) -> usize {
        self.flat.dim()
    }

    pub fn a(&self) -> &Algebra {
        &self.context.a
    }

    pub fn b(&self) -> &Algebra {
        &self.context.b
    }

    pub fn m(&self) -> &Bimodule {
        &self.context.m
    }

    pub fn n(&self) -> &Bimodule {
        &self.context.n
    }

    pub fn block_dim(&self, block: Block) -> usize {
        match block {
            Block::A => self.a().dim(),
            Block::M => self.m().dim(),
            Block::N => self.n().dim(),
            Block::B => self.b().dim(),
        }
    }

    /// First flat coordinate of a corner.
    pub fn offset(&self, block: Block) -> usize {
        Block::ALL
            .iter()
            .take_while(|&&b| b != block)
            .map(|&b| self.block_dim(b))
            .sum()
    }

    pub fn block_range(&self, block: Block) -> std::ops::Range<usize> {
        let o = self.offset(block);
        o..o + self.block_dim(block)
    }

    /// Corner and local index of a flat coordinate.
    pub fn locate(&self, index: usize) -> (Block, usize) {
        for block in Block::ALL {
            let r = self.block_range(block);
            if r.contains(&index) {
                return (block, index - r.start);
            }
        }
        panic!("flat index {index} out of range")
    }

    /// Embeds a corner vector into flat coordinates.
    pub fn embed(&self, block: Block, v: &[u32]) -> Vec<u32> {
        let mut out = vec![0; self.dim()];
        out[self.block_range(block)].copy_from_slice(v);
        out
    }

    pub fn project(&self, block: Block, x: &[u32]) -> Vec<u32> {
        x[self.block_range(block)].to_vec()
    }

    pub fn split(&self, x: &[u32]) -> GmaElement {
        GmaElement {
            a: self.project(Block::A, x),
            m: self.project(Block::M, x),
            n: self.project(Block::N, x),
            b: self.project(Block::B, x),
        }
    }

    pub fn diag(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        let mut x = self.embed(Block::A, a);
        x[self.block_range(Block::B)].copy_from_slice(b);
        x
    }

    pub fn is_triangular(&self) -> bool {
        self.n().dim() == 0
    }

    /// All context axioms followed by the flat algebra axioms.
    pub fn validate(&self) -> Vec<GmaViolation> {
        let mut out: Vec<GmaViolation> = self.context.validate().into_iter().map(GmaViolation::Context).collect();
        out.extend(self.flat.validate().into_iter().map(GmaViolation::Flat));
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GmaViolation {
    Context(MoritaViolation),
    Flat(AxiomViolation),
}

impl fmt::Display for GmaViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GmaViolation::Context(v) => write!(f, "{v}"),
            GmaViolation::Flat(v) => write!(f, "flat algebra: {v}"),
        }
    }
}

fn flat_algebra(ctx: &MoritaContext) -> Algebra {
    let f = ctx.field();
    let (da, dm, dn, db) = (ctx.a.dim(), ctx.m.dim(), ctx.n.dim(), ctx.b.dim());
    let d = da + dm + dn + db;
    let (om, on, ob) = (da, da + dm, da + dm + dn);
    let locate = |i: usize| {
        if i < om {
            (Block::A, i)
        } else if i < on {
            (Block::M, i - om)
        } else if i < ob {
            (Block::N, i - on)
        } else {
            (Block::B, i - ob)
        }
    };
    let mut unit = vec![0; d];
    unit[..da].copy_from_slice(ctx.a.unit());
    unit[ob..].copy_from_slice(ctx.b.unit());
    Algebra::from_products(f, d, unit, |i, j| {
        let mut out = vec![0; d];
        let (bi, li) = locate(i);
        let (bj, lj) = locate(j);
        let mut place = |offset: usize, v: &[u32]| out[offset..offset + v.len()].copy_from_slice(v);
        match (bi, bj) {
            (Block::A, Block::A) => place(0, &ctx.a.mul(&ctx.a.basis_vector(li), &ctx.a.basis_vector(lj))),
            (Block::A, Block::M) => place(om, ctx.m.left_basis(li, lj)),
            (Block::M, Block::B) => place(om, ctx.m.right_basis(li, lj)),
            (Block::M, Block::N) => place(0, ctx.phi.basis(li, lj)),
            (Block::N, Block::A) => place(on, ctx.n.right_basis(li, lj)),
            (Block::B, Block::N) => place(on, ctx.n.left_basis(li, lj)),
            (Block::N, Block::M) => place(ob, ctx.psi.basis(li, lj)),
            (Block::B, Block::B) => place(ob, &ctx.b.mul(&ctx.b.basis_vector(li), &ctx.b.basis_vector(lj))),
            _ => {}
        }
        out
    })
}

/// Builds a context from four sets of matrix units whose union is
/// closed under products; corner bases follow the order given.
fn matrix_unit_context(field: PrimeField, blocks: [Vec<(usize, usize)>; 4]) -> MoritaContext {
    let [ua, um, un, ub] = blocks;
    let index =
        |units: &[(usize, usize)], r: usize, c: usize| -> Option<usize> { units.iter().position(|&u| u == (r, c)) };
    // product of units s and t landing in `target`, as a coordinate vector there
    let prod = |s: (usize, usize), t: (usize, usize), target: &[(usize, usize)]| -> Vec<u32> {
        let mut v = vec![0; target.len()];
        if s.1 == t.0 {
            let k = index(target, s.0, t.1).expect("matrix units closed under the block product");
            v[k] = 1;
        }
        v
    };
    let a = corner_algebra(field, &ua);
    let b = corner_algebra(field, &ub);
    let m = Bimodule::from_actions(
        ua.len(),
        ub.len(),
        um.len(),
        |i, u| prod(ua[i], um[u], &um),
        |u, j| prod(um[u], ub[j], &um),
    );
    let nn = Bimodule::from_actions(
        ub.len(),
        ua.len(),
        un.len(),
        |j, v| prod(ub[j], un[v], &un),
        |v, i| prod(un[v], ua[i], &un),
    );
    let phi = Pairing::from_fn(um.len(), un.len(), ua.len(), |u, v| prod(um[u], un[v], &ua));
    let psi = Pairing::from_fn(un.len(), um.len(), ub.len(), |v, u| prod(un[v], um[u], &ub));
    MoritaContext {
        a,
        b,
        m,
        n: nn,
        phi,
        psi,
    }
}

/// Algebra spanned by matrix units closed under products; its unit is the
/// sum of the diagonal units present.
fn corner_algebra(field: PrimeField, units: &[(usize, usize)]) -> Algebra {
    let d = units.len();
    let index = |r: usize, c: usize| units.iter().position(|&u| u == (r, c));
    let mut unit = vec![0; d];
    for (k, &(r, c)) in units.iter().enumerate() {
        if r == c {
            unit[k] = 1;
        }
    }
    Algebra::from_products(field, d, unit, |i, j| {
        let (a, b) = units[i];
        let (c, e) = units[j];
        let mut v = vec![0; d];
        if b == c {
            v[index(a, e).expect("corner closed under product")] = 1;
        }
        v
    })
}

/// `M_n(F_p)` split as `[M_k, M_{k×(n−k)}; M_{(n−k)×k}, M_{n−k}]`; every
/// corner uses matrix units in row-major order.
pub fn build_block_partition(n: usize, k: usize, p: u64) -> Result<Gma, GmaError> {
    let field = PrimeField::new(p)?;
    if k == 0 || k >= n {
        return Err(GmaError::BlockSplit { n, k });
    }
    let units = |rows: std::ops::Range<usize>, cols: std::ops::Range<usize>| -> Vec<(usize, usize)> {
        rows.flat_map(|r| cols.clone().map(move |c| (r, c))).collect()
    };
    let ctx = matrix_unit_context(
        field,
        [
            units(0..k, 0..k),
            units(0..k, k..n),
            units(k..n, 0..k),
            units(k..n, k..n),
        ],
    );
    Gma::new(ctx)
}

/// `T_n(F_p)` split at the first diagonal entry: `A = F_p`, `M` the
/// remaining first-row entries, `N = 0`, `B = T_{n−1}(F_p)`.
pub fn build_upper_triangular(n: usize, p: u64) -> Result<Gma, GmaError> {
    let field = PrimeField::new(p)?;
    if n < 2 {
        return Err(GmaError::BlockSplit { n, k: 1 });
    }
    let ub: Vec<(usize, usize)> = (1..n).flat_map(|r| (r..n).map(move |c| (r, c))).collect();
    let ctx = matrix_unit_context(field, [vec![(0, 0)], (1..n).map(|c| (0, c)).collect(), Vec::new(), ub]);
    Gma::new(ctx)
}

/// `[A M; 0 B]` with zero pairings.
pub fn build_triangular(a: Algebra, m: Bimodule, b: Algebra) -> Result<Gma, GmaError> {
    let (da, db, dm) = (a.dim(), b.dim(), m.dim());
    let ctx = MoritaContext {
        a,
        b,
        m,
        n: Bimodule::zero(db, da),
        phi: Pairing::zero(dm, 0, da),
        psi: Pairing::zero(0, dm, db),
    };
    Gma::new(ctx)
}

/// `A = B = F_p^2` acting coordinatewise on `M = F_p^2`, `N = 0`.
/// `M` is faithful on both sides but not loyal.
pub fn build_nonloyal_demo(p: u64) -> Result<Gma, GmaError> {
    let field = PrimeField::new(p)?;
    let coord = |i: usize, u: usize| {
        let mut v = vec![0; 2];
        if i == u {
            v[u] = 1;
        }
        v
    };
    let m = Bimodule::from_actions(2, 2, 2, coord, |u, j| coord(j, u));
    build_triangular(Algebra::diagonal(field, 2), m, Algebra::diagonal(field, 2))
}

/// A Peirce decomposition `[eAe eAf; fAe fAf]` together with the basis
/// change back to the ambient algebra.
#[derive(Clone, Debug)]
pub struct PeirceSplit {
    pub gma: Gma,
    /// Column `j` holds the ambient coordinates of flat basis vector `j`.
    pub to_ambient: LinearMapRep,
}

/// Peirce decomposition of `alg` at the idempotent `e`, with corner bases
/// taken as reduced row echelon bases of `e·A·e`, `e·A·f`, `f·A·e`, `f·A·f`.
pub fn build_from_idempotent(alg: &Algebra, e: &[u32]) -> Result<PeirceSplit, GmaError> {
    let f = alg.field();
    let d = alg.dim();
    if e.len() != d {
        return Err(GmaError::Shape(format!(
            "idempotent has length {}, expected {d}",
            e.len()
        )));
    }
    if alg.mul(e, e) != e {
        return Err(GmaError::NotIdempotent);
    }
    if is_zero(e) || e == alg.unit() {
        return Err(GmaError::TrivialIdempotent);
    }
    let fe = linalg::vec_sub(f, alg.unit(), e);
    let corner = |l: &[u32], r: &[u32]| -> Vec<Vec<u32>> {
        let images: Vec<Vec<u32>> = (0..d).map(|i| alg.mul(&alg.mul(l, &alg.basis_vector(i)), r)).collect();
        linalg::span_basis(f, d, &images)
    };
    let ba = corner(e, e);
    let bm = corner(e, &fe);
    let bn = corner(&fe, e);
    let bb = corner(&fe, &fe);
    let coords =
        |basis: &[Vec<u32>], v: &[u32]| linalg::rref_coordinates(f, basis, v).expect("product stays in its corner");
    let sub_algebra = |basis: &[Vec<u32>], unit: &[u32]| {
        Algebra::from_products(f, basis.len(), coords(basis, unit), |i, j| {
            coords(basis, &alg.mul(&basis[i], &basis[j]))
        })
    };
    let a = sub_algebra(&ba, e);
    let b = sub_algebra(&bb, &fe);
    let module = |lb: &[Vec<u32>], mb: &[Vec<u32>], rb: &[Vec<u32>]| {
        Bimodule::from_actions(
            lb.len(),
            rb.len(),
            mb.len(),
            |i, u| coords(mb, &alg.mul(&lb[i], &mb[u])),
            |u, j| coords(mb, &alg.mul(&mb[u], &rb[j])),
        )
    };
    let m = module(&ba, &bm, &bb);
    let n = module(&bb, &bn, &ba);
    let phi = Pairing::from_fn(bm.len(), bn.len(), ba.len(), |u, v| {
        coords(&ba, &alg.mul(&bm[u], &bn[v]))
    });
    let psi = Pairing::from_fn(bn.len(), bm.len(), bb.len(), |v, u| {
        coords(&bb, &alg.mul(&bn[v], &bm[u]))
    });
    let gma = Gma::new(MoritaContext { a, b, m, n, phi, psi })?;
    let columns: Vec<Vec<u32>> = [ba, bm, bn, bb].concat();
    Ok(PeirceSplit {
        gma,
        to_ambient: LinearMapRep::from_columns(f, d, &columns),
    })
}

/// The center of a [`Gma`] with its corner projections and the transfer
/// map `φ: π_A(Z(G)) → π_B(Z(G))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CenterData {
    pub field: PrimeField,
    /// Reduced row echelon basis of `Z(G)` in flat coordinates.
    pub center_basis: Vec<Vec<u32>>,
    /// Reduced row echelon basis of `π_A(Z(G))`.
    pub pi_a_basis: Vec<Vec<u32>>,
    /// Reduced row echelon basis of `π_B(Z(G))`.
    pub pi_b_basis: Vec<Vec<u32>>,
    /// `φ` of each element of `pi_a_basis`.
    pub phi_images: Vec<Vec<u32>>,
    /// `φ⁻¹` of each element of `pi_b_basis`.
    pub phi_inverse_images: Vec<Vec<u32>>,
    /// `π_A` is injective on `Z(G)`, so `φ` is well defined.
    pub phi_well_defined: bool,
    /// `π_B` is injective on `Z(G)`, so `φ` is injective.
    pub phi_injective: bool,
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("element is not in the domain of the map")]
pub struct NotInDomain;

impl CenterData {
    pub fn dim(&self) -> usize {
        self.center_basis.len()
    }

    /// The unique `b` with `[a 0; 0 b]` central.
    pub fn phi_apply(&self, a: &[u32]) -> Result<Vec<u32>, NotInDomain> {
        let c = linalg::rref_coordinates(self.field, &self.pi_a_basis, a).ok_or(NotInDomain)?;
        let len = self.phi_images.first().map_or(0, |v| v.len());
        Ok(linalg::combine(self.field, len, &self.phi_images, &c))
    }

    pub fn phi_inverse(&self, b: &[u32]) -> Result<Vec<u32>, NotInDomain> {
        let c = linalg::rref_coordinates(self.field, &self.pi_b_basis, b).ok_or(NotInDomain)?;
        let len = self.phi_inverse_images.first().map_or(0, |v| v.len());
        Ok(linalg::combine(self.field, len, &self.phi_inverse_images, &c))
    }

    pub fn contains(&self, x: &[u32]) -> bool {
        linalg::rref_coordinates(self.field, &self.center_basis, x).is_some()
    }

    /// `φ` as a matrix from `pi_a_basis` coordinates to `B` coordinates.
    pub fn phi_matrix(&self, dim_b: usize) -> LinearMapRep {
        LinearMapRep::from_columns(self.field, dim_b, &self.phi_images)
    }
}

/// Computes `Z(G)` as the pairs `(a, b)` with `a` central in `A`, `b`
/// central in `B`, `a u = u b` on `M` and `v a = b v` on `N`.
pub fn gma_center(g: &Gma) -> CenterData {
    let f = g.field();
    let (a, b, m, n) = (g.a(), g.b(), g.m(), g.n());
    let (da, db) = (a.dim(), b.dim());
    let mut red = RowReducer::new(f, da + db);
    let push_rows = |red: &mut RowReducer, cols: Vec<Vec<u32>>| {
        // each column is the image of one unknown; push one row per output coordinate
        let len = cols.first().map_or(0, |c| c.len());
        for t in 0..len {
            let row: Vec<(usize, u32)> = cols
                .iter()
                .enumerate()
                .filter(|(_, c)| c[t] != 0)
                .map(|(k, c)| (k, c[t]))
                .collect();
            red.push(&row);
        }
    };
    for u in 0..m.dim() {
        let cols = (0..da)
            .map(|i| m.left_basis(i, u).to_vec())
            .chain((0..db).map(|j| linalg::vec_scale(f, f.neg(1), m.right_basis(u, j))))
            .collect();
        push_rows(&mut red, cols);
    }
    for v in 0..n.dim() {
        let cols = (0..da)
            .map(|i| n.right_basis(v, i).to_vec())
            .chain((0..db).map(|j| linalg::vec_scale(f, f.neg(1), n.left_basis(j, v))))
            .collect();
        push_rows(&mut red, cols);
    }
    for i in 0..da {
        let ei = a.basis_vector(i);
        let cols = (0..da)
            .map(|k| a.commutator(&a.basis_vector(k), &ei))
            .chain((0..db).map(|_| vec![0; da]))
            .collect();
        push_rows(&mut red, cols);
    }
    for j in 0..db {
        let ej = b.basis_vector(j);
        let cols = (0..da)
            .map(|_| vec![0; db])
            .chain((0..db).map(|k| b.commutator(&b.basis_vector(k), &ej)))
            .collect();
        push_rows(&mut red, cols);
    }
    let pairs = red.kernel_basis();
    let flat: Vec<Vec<u32>> = pairs.iter().map(|x| g.diag(&x[..da], &x[da..])).collect();
    let center_basis = linalg::span_basis(f, g.dim(), &flat);
    let a_parts: Vec<Vec<u32>> = center_basis.iter().map(|z| g.project(Block::A, z)).collect();
    let b_parts: Vec<Vec<u32>> = center_basis.iter().map(|z| g.project(Block::B, z)).collect();
    let pi_a_basis = linalg::span_basis(f, da, &a_parts);
    let pi_b_basis = linalg::span_basis(f, db, &b_parts);
    let r = center_basis.len();
    let transfer = |from_parts: &[Vec<u32>], to_parts: &[Vec<u32>], targets: &[Vec<u32>], to_dim: usize| {
        targets
            .iter()
            .map(|t| {
                let sys = linalg::DenseMatrix::from_columns(f, t.len(), from_parts);
                let sol = linalg::solve_affine(&sys, t).expect("target lies in the projection");
                linalg::combine(f, to_dim, to_parts, &sol.particular)
            })
            .collect::<Vec<_>>()
    };
    let phi_images = transfer(&a_parts, &b_parts, &pi_a_basis, db);
    let phi_inverse_images = transfer(&b_parts, &a_parts, &pi_b_basis, da);
    CenterData {
        field: f,
        phi_well_defined: pi_a_basis.len() == r,
        phi_injective: pi_b_basis.len() == r,
        center_basis,
        pi_a_basis,
        pi_b_basis,
        phi_images,
        phi_inverse_images,
    }
}

/// Returns a nonzero annihilator of `M` on the given side, or `None` if `M`
/// is faithful there.
pub fn check_module_faithful(g: &Gma, side: Side) -> Option<Vec<u32>> {
    let f = g.field();
    let m = g.m();
    let acting_dim = match side {
        Side::Left => g.a().dim(),
        Side::Right => g.b().dim(),
    };
    let image = |i: usize, u: usize| match side {
        Side::Left => m.left_basis(i, u),
        Side::Right => m.right_basis(u, i),
    };
    let mut red = RowReducer::new(f, acting_dim);
    for u in 0..m.dim() {
        let cols: Vec<&[u32]> = (0..acting_dim).map(|i| image(i, u)).collect();
        for t in 0..m.dim() {
            let row: Vec<(usize, u32)> = cols
                .iter()
                .enumerate()
                .filter(|(_, c)| c[t] != 0)
                .map(|(k, c)| (k, c[t]))
                .collect();
            red.push(&row);
        }
    }
    red.kernel_basis().into_iter().next()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Loyalty {
    Loyal,
    /// Nonzero `a`, `b` with `a M b = 0`.
    Witness {
        a: Vec<u32>,
        b: Vec<u32>,
    },
}

/// Searches nonzero `a ∈ A` in counter order; for each, the `b` with
/// `a M b = 0` form a subspace, and the first nonzero `b` of it in counter
/// order is reported.
pub fn check_loyal(g: &Gma, cap: u64) -> Result<Loyalty, TooLarge> {
    let f = g.field();
    let (a, b, m) = (g.a(), g.b(), g.m());
    TooLarge::check(f, a.dim() + b.dim(), cap)?;
    for x in PointCounter::nonzero(f, a.dim()) {
        let xm: Vec<Vec<u32>> = (0..m.dim()).map(|u| m.act_left(f, &x, &m.basis_vector(u))).collect();
        // rows of the map y ↦ (x u y)_u
        let mut rows: Vec<Vec<u32>> = Vec::new();
        for w in &xm {
            let cols: Vec<Vec<u32>> = (0..b.dim()).map(|j| m.act_right(f, w, &b.basis_vector(j))).collect();
            for t in 0..m.dim() {
                rows.push(cols.iter().map(|c| c[t]).collect());
            }
        }
        let mut red = RowReducer::new(f, b.dim());
        for r in &rows {
            red.push_dense(r);
        }
        if red.rank() == b.dim() {
            continue;
        }
        let y = PointCounter::nonzero(f, b.dim())
            .find(|y| rows.iter().all(|r| dot(f, r, y) == 0))
            .expect("nonzero kernel has a nonzero point");
        return Ok(Loyalty::Witness { a: x, b: y });
    }
    Ok(Loyalty::Loyal)
}

fn dot(f: PrimeField, x: &[u32], y: &[u32]) -> u32 {
    x.iter().zip(y).fold(0, |acc, (&a, &b)| f.mul_add(acc, a, b))
}

/// A nonzero `λ ∈ π_A(Z(G))` and nonzero `a ∈ A` with `λ a = 0`, if any.
pub fn central_annihilation_witness(g: &Gma, center: &CenterData, cap: u64) -> Result<Option<ElementPair>, TooLarge> {
    let f = g.field();
    let a = g.a();
    let r = center.pi_a_basis.len();
    TooLarge::check(f, r, cap)?;
    for c in PointCounter::nonzero(f, r) {
        let lambda = linalg::combine(f, a.dim(), &center.pi_a_basis, &c);
        if let Some(k) = a.left_mult_matrix(&lambda).kernel().into_iter().next() {
            return Ok(Some((lambda, k)));
        }
    }
    Ok(None)
}

/// Nonzero central `z, w` with `z w = 0`, if any. `z` runs over `Z(G)` in
/// counter order of its center coordinates.
pub fn center_zero_divisors(g: &Gma, center: &CenterData, cap: u64) -> Result<Option<ElementPair>, TooLarge> {
    let f = g.field();
    let d = g.dim();
    let r = center.dim();
    TooLarge::check(f, r, cap)?;
    for c in PointCounter::nonzero(f, r) {
        let z = linalg::combine(f, d, &center.center_basis, &c);
        let products: Vec<Vec<u32>> = center.center_basis.iter().map(|w| g.flat().mul(&z, w)).collect();
        let sys = linalg::DenseMatrix::from_columns(f, d, &products);
        if let Some(k) = sys.kernel().into_iter().next() {
            return Ok(Some((z, linalg::combine(f, d, &center.center_basis, &k))));
        }
    }
    Ok(None)
}

/// Basis of the largest two-sided ideal of the flat algebra contained in
/// its center.
pub fn largest_central_ideal(g: &Gma, center: &CenterData) -> Vec<Vec<u32>> {
    let f = g.field();
    let alg = g.flat();
    let d = alg.dim();
    let mut current = center.center_basis.clone();
    loop {
        if current.is_empty() {
            return current;
        }
        let mut span = RowReducer::new(f, d);
        for v in &current {
            span.push_dense(v);
        }
        // coefficients c with e_i v, v e_i inside the current span
        let mut cond = RowReducer::new(f, current.len());
        for i in 0..d {
            let ei = alg.basis_vector(i);
            for side in [Side::Left, Side::Right] {
                let residuals: Vec<Vec<u32>> = current
                    .iter()
                    .map(|v| {
                        let w = match side {
                            Side::Left => alg.mul(&ei, v),
                            Side::Right => alg.mul(v, &ei),
                        };
                        span.residual(&w)
                    })
                    .collect();
                for t in 0..d {
                    cond.push_dense(&residuals.iter().map(|r| r[t]).collect::<Vec<_>>());
                }
            }
        }
        if cond.rank() == 0 {
            return current;
        }
        let next: Vec<Vec<u32>> = cond
            .kernel_basis()
            .iter()
            .map(|c| linalg::combine(f, d, &current, c))
            .collect();
        current = linalg::span_basis(f, d, &next);
    }
}
