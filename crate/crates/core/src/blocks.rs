//! Corner decomposition of a trace `T_q` on `G = [A₁ A₂; A₃ A₄]`, with
//! `A₁ = A`, `A₂ = M`, `A₃ = N`, `A₄ = B`.
//!
//! `T_q` splits into bilinear components `f_ij` (values in `A`), `g_ij` (in
//! `M`), `h_ij` (in `N`) and `k_ij` (in `B`) for `i <= j`, so that e.g.
//! `F(x) = Σ f_ij(a_i, a_j)`. For `i < j` the component is the cross term
//! `q(a_i, a_j) + q(a_j, a_i)` projected to the output corner; for `i = j` it
//! is the symmetric part of `q` restricted to the corner.

use std::fmt::Write as _;

use thiserror::Error;

use crate::algebra::LinearMapRep;
use crate::field::PrimeField;
use crate::linalg;
use crate::morita::{gma_center, Block, CenterData, Gma, Pairing, TooLarge};
use crate::traces::{is_commuting_trace, BilinearMapRep};

/// The 40 corner components of a trace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockComponents {
    field: PrimeField,
    components: Vec<Pairing>,
}

/// Conventional letter of the component valued in `out`.
pub fn component_name(out: Block, i: Block, j: Block) -> String {
    let letter = match out {
        Block::A => 'f',
        Block::M => 'g',
        Block::N => 'h',
        Block::B => 'k',
    };
    format!("{letter}{}{}", i.number(), j.number())
}

/// Input block pairs `(i, j)` with `i <= j`, in lexicographic order.
pub fn block_pairs() -> Vec<(Block, Block)> {
    let mut out = Vec::new();
    for (x, &i) in Block::ALL.iter().enumerate() {
        for &j in &Block::ALL[x..] {
            out.push((i, j));
        }
    }
    out
}

impl BlockComponents {
    /// The component `A_i × A_j → out`, `i <= j`.
    pub fn get(&self, out: Block, i: Block, j: Block) -> &Pairing {
        let slot = block_pairs().iter().position(|&p| p == (i, j)).expect("i <= j");
        &self.components[out as usize * 10 + slot]
    }

    pub fn eval(&self, out: Block, i: Block, j: Block, x: &[u32], y: &[u32]) -> Vec<u32> {
        self.get(out, i, j).apply(self.field, x, y)
    }

    /// `Σ_{i<=j}` of all components on the corners of `x`, in flat coordinates.
    pub fn reassemble(&self, g: &Gma, x: &[u32]) -> Vec<u32> {
        let f = g.field();
        let parts = g.split(x);
        let mut out = vec![0; g.dim()];
        for out_block in Block::ALL {
            let mut acc = vec![0; g.block_dim(out_block)];
            for (i, j) in block_pairs() {
                let v = self.eval(out_block, i, j, parts.block(i), parts.block(j));
                acc = linalg::vec_add(f, &acc, &v);
            }
            out[g.block_range(out_block)].copy_from_slice(&acc);
        }
        out
    }

    pub fn is_zero(&self, out: Block, i: Block, j: Block) -> bool {
        self.get(out, i, j).tensor().iter().all(|&v| v == 0)
    }
}

/// Splits `T_q` into its corner components. Always succeeds.
pub fn extract_components(g: &Gma, q: &BilinearMapRep) -> BlockComponents {
    let f = g.field();
    let s = q.symmetric_part();
    let mut components = Vec::with_capacity(40);
    for out in Block::ALL {
        for (i, j) in block_pairs() {
            let (oi, oj) = (g.offset(i), g.offset(j));
            let c = Pairing::from_fn(g.block_dim(i), g.block_dim(j), g.block_dim(out), |u, v| {
                let (x, y) = (oi + u, oj + v);
                let value = if i == j {
                    s.basis_value(x, y).to_vec()
                } else {
                    linalg::vec_add(f, q.basis_value(x, y), q.basis_value(y, x))
                };
                g.project(out, &value)
            });
            components.push(c);
        }
    }
    BlockComponents { field: f, components }
}

/// The maps and constants built from the components of a commuting trace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivedData {
    /// `α: M → A`, `α(m) = f12(1, m) − φ⁻¹(k12(1, m))`
    pub alpha: LinearMapRep,
    /// `τ: N → A`, `τ(n) = f13(1, n) − φ⁻¹(k13(1, n))`
    pub tau: LinearMapRep,
    /// `γ: B → Z(A)` with `f14(a, b) = γ(b) a + δ(a, b)`
    pub gamma: LinearMapRep,
    /// `γ': A → B`, `γ'(a) = k14(a, 1) − φ(δ(a, 1))`
    pub gamma_prime: LinearMapRep,
    /// `δ: A × B → Z(A)`
    pub delta: Pairing,
    /// `ε = θ − γ(1)`
    pub epsilon: Vec<u32>,
    /// `ε' = ζ − γ'(1)`
    pub epsilon_prime: Vec<u32>,
    /// `ζ = φ(f11(1, 1)) − k11(1, 1)`
    pub zeta: Vec<u32>,
    /// `θ = φ⁻¹(k44(1, 1)) − f44(1, 1)`
    pub theta: Vec<u32>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DerivedError {
    #[error("derived data needs a commuting trace; [T(x), x] != 0 at x = {witness:?}")]
    RequiresCommuting { witness: Vec<u32> },
    #[error("derived data undefined: {0}")]
    Undefined(String),
    #[error(transparent)]
    TooLarge(#[from] TooLarge),
}

struct Ctx<'a> {
    g: &'a Gma,
    center: &'a CenterData,
    f: PrimeField,
}

impl Ctx<'_> {
    fn phi(&self, a: &[u32], what: &str) -> Result<Vec<u32>, String> {
        self.center
            .phi_apply(a)
            .map_err(|_| format!("{what} = {a:?} is not in π_A(Z(G))"))
    }

    fn phi_inv(&self, b: &[u32], what: &str) -> Result<Vec<u32>, String> {
        self.center
            .phi_inverse(b)
            .map_err(|_| format!("{what} = {b:?} is not in π_B(Z(G))"))
    }

    fn sub(&self, x: &[u32], y: &[u32]) -> Vec<u32> {
        linalg::vec_sub(self.f, x, y)
    }

    fn add(&self, x: &[u32], y: &[u32]) -> Vec<u32> {
        linalg::vec_add(self.f, x, y)
    }

    fn basis(&self, block: Block, i: usize) -> Vec<u32> {
        let mut v = vec![0; self.g.block_dim(block)];
        v[i] = 1;
        v
    }
}

/// Computes the derived data from the components; assumes the trace is
/// commuting but does not check it.
pub fn derive(g: &Gma, center: &CenterData, comps: &BlockComponents) -> Result<DerivedData, DerivedError> {
    derive_inner(
        &Ctx {
            g,
            center,
            f: g.field(),
        },
        comps,
    )
    .map_err(DerivedError::Undefined)
}

fn derive_inner(cx: &Ctx, comps: &BlockComponents) -> Result<DerivedData, String> {
    use Block::*;
    let (g, f) = (cx.g, cx.f);
    let (one_a, one_b) = (g.a().unit().to_vec(), g.b().unit().to_vec());
    let (da, db) = (g.a().dim(), g.b().dim());
    let transfer = |j: Block, what: &str| -> Result<LinearMapRep, String> {
        let cols = (0..g.block_dim(j))
            .map(|u| {
                let e = cx.basis(j, u);
                let fa = comps.eval(A, A, j, &one_a, &e);
                let kb = comps.eval(B, A, j, &one_a, &e);
                Ok(cx.sub(&fa, &cx.phi_inv(&kb, &format!("{what}(1, e{u})"))?))
            })
            .collect::<Result<Vec<_>, String>>()?;
        Ok(LinearMapRep::from_columns(f, da, &cols))
    };
    let alpha = transfer(M, "k12")?;
    let tau = transfer(N, "k13")?;

    let mut gamma_cols = Vec::with_capacity(db);
    let mut etas = Vec::with_capacity(db);
    for t in 0..db {
        let bt = cx.basis(B, t);
        let map = LinearMapRep::from_fn(f, da, da, |s| comps.eval(A, A, B, &cx.basis(A, s), &bt));
        let w = g
            .a()
            .proper_linear_decompose(&map)
            .map_err(|e| format!("a ↦ f14(a, e{t}) is not proper on A ({e})"))?;
        gamma_cols.push(w.z);
        etas.push(w.eta);
    }
    let gamma = LinearMapRep::from_columns(f, da, &gamma_cols);
    let delta = Pairing::from_fn(da, db, da, |s, t| etas[t].column(s));

    let gp_cols = (0..da)
        .map(|s| {
            let es = cx.basis(A, s);
            let k = comps.eval(B, A, B, &es, &one_b);
            let d1 = delta.apply(f, &es, &one_b);
            Ok(cx.sub(&k, &cx.phi(&d1, &format!("δ(e{s}, 1)"))?))
        })
        .collect::<Result<Vec<_>, String>>()?;
    let gamma_prime = LinearMapRep::from_columns(f, db, &gp_cols);

    let f11 = comps.eval(A, A, A, &one_a, &one_a);
    let k11 = comps.eval(B, A, A, &one_a, &one_a);
    let zeta = cx.sub(&cx.phi(&f11, "f11(1, 1)")?, &k11);
    let k44 = comps.eval(B, B, B, &one_b, &one_b);
    let f44 = comps.eval(A, B, B, &one_b, &one_b);
    let theta = cx.sub(&cx.phi_inv(&k44, "k44(1, 1)")?, &f44);
    let epsilon = cx.sub(&theta, &gamma.apply(&one_b));
    let epsilon_prime = cx.sub(&zeta, &gamma_prime.apply(&one_a));
    Ok(DerivedData {
        alpha,
        tau,
        gamma,
        gamma_prime,
        delta,
        epsilon,
        epsilon_prime,
        zeta,
        theta,
    })
}

/// Raw components plus derived data when `T_q` is commuting.
#[derive(Clone, Debug)]
pub struct BlockAnalysis {
    pub components: BlockComponents,
    pub derived: Result<DerivedData, DerivedError>,
}

pub fn block_components(g: &Gma, q: &BilinearMapRep, cap: u64) -> BlockAnalysis {
    let components = extract_components(g, q);
    let derived = match is_commuting_trace(g, q, cap) {
        Err(e) => Err(DerivedError::TooLarge(e)),
        Ok(Some(witness)) => Err(DerivedError::RequiresCommuting { witness }),
        Ok(None) => derive(g, &gma_center(g), &components),
    };
    BlockAnalysis { components, derived }
}

type ClosedForm<'a> = dyn Fn(&[u32], &[u32]) -> Result<Vec<u32>, String> + 'a;

/// Outcome of one identity check on basis elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockCheck {
    pub name: &'static str,
    /// First failure, if any.
    pub failure: Option<String>,
}

impl BlockCheck {
    pub fn holds(&self) -> bool {
        self.failure.is_none()
    }
}

/// Verifies the vanishing patterns, centrality properties and closed forms
/// satisfied by the components of a commuting trace on a GMA with loyal,
/// faithful `M` and noncommutative corners.
pub fn check_block_identities(
    g: &Gma,
    center: &CenterData,
    comps: &BlockComponents,
    derived: &DerivedData,
) -> Vec<BlockCheck> {
    use Block::*;
    let cx = Ctx {
        g,
        center,
        f: g.field(),
    };
    let mut out = Vec::new();
    let mut push = |name: &'static str, result: Result<(), String>| {
        out.push(BlockCheck {
            name,
            failure: result.err(),
        })
    };

    let vanish = |out_block: Block, list: &[(Block, Block)]| -> Result<(), String> {
        match list.iter().find(|&&(i, j)| !comps.is_zero(out_block, i, j)) {
            Some(&(i, j)) => Err(format!("{} is not zero", component_name(out_block, i, j))),
            None => Ok(()),
        }
    };
    push(
        "lower_block_vanishing",
        vanish(N, &[(A, A), (A, M), (A, B), (M, M), (M, B), (B, B)]),
    );
    push(
        "upper_block_vanishing",
        vanish(M, &[(A, A), (A, N), (A, B), (N, N), (N, B), (B, B)]),
    );

    let central = |out_block: Block, list: &[(Block, Block)]| -> Result<(), String> {
        let alg = if out_block == A { g.a() } else { g.b() };
        for &(i, j) in list {
            let c = comps.get(out_block, i, j);
            for u in 0..g.block_dim(i) {
                for v in 0..g.block_dim(j) {
                    if !alg.is_central(c.basis(u, v)) {
                        return Err(format!(
                            "{}(e{u}, e{v}) is not central",
                            component_name(out_block, i, j)
                        ));
                    }
                }
            }
        }
        Ok(())
    };
    push(
        "A_components_central",
        central(A, &[(M, M), (M, B), (N, N), (N, B), (B, B)]),
    );
    push(
        "B_components_central",
        central(B, &[(A, A), (A, M), (A, N), (M, M), (N, N)]),
    );

    push(
        "module_diagonals_central",
        (|| {
            for blk in [M, N] {
                let (fc, kc) = (comps.get(A, blk, blk), comps.get(B, blk, blk));
                for u in 0..g.block_dim(blk) {
                    for v in u..g.block_dim(blk) {
                        if !center.contains(&g.diag(fc.basis(u, v), kc.basis(u, v))) {
                            let n = blk.number();
                            return Err(format!("diag(f{n}{n}, k{n}{n}) at (e{u}, e{v}) is not central"));
                        }
                    }
                }
            }
            Ok(())
        })(),
    );

    let d = derived;
    let (fld, m, n) = (cx.f, g.m(), g.n());
    let a_alg = g.a();
    let b_alg = g.b();
    // compares a component against a closed form on all basis pairs
    let formula = |out_block: Block, i: Block, j: Block, rhs: &ClosedForm| {
        for u in 0..g.block_dim(i) {
            for v in 0..g.block_dim(j) {
                let (x, y) = (cx.basis(i, u), cx.basis(j, v));
                let expected = rhs(&x, &y)?;
                if comps.eval(out_block, i, j, &x, &y) != expected {
                    return Err(format!("{} differs at (e{u}, e{v})", component_name(out_block, i, j)));
                }
            }
        }
        Ok(())
    };

    push(
        "f12_formula",
        formula(A, A, M, &|a1, a2| {
            let k = comps.eval(B, A, M, a1, a2);
            Ok(cx.add(&a_alg.mul(&d.alpha.apply(a2), a1), &cx.phi_inv(&k, "k12")?))
        }),
    );
    push(
        "k24_formula",
        formula(B, M, B, &|a2, a4| {
            let fa = comps.eval(A, M, B, a2, a4);
            Ok(cx.add(&b_alg.mul(&cx.phi(&d.alpha.apply(a2), "α")?, a4), &cx.phi(&fa, "f24")?))
        }),
    );
    push(
        "f13_formula",
        formula(A, A, N, &|a1, a3| {
            let k = comps.eval(B, A, N, a1, a3);
            Ok(cx.add(&a_alg.mul(&d.tau.apply(a3), a1), &cx.phi_inv(&k, "k13")?))
        }),
    );
    push(
        "k34_formula",
        formula(B, N, B, &|a3, a4| {
            let fa = comps.eval(A, N, B, a3, a4);
            Ok(cx.add(&b_alg.mul(&cx.phi(&d.tau.apply(a3), "τ")?, a4), &cx.phi(&fa, "f34")?))
        }),
    );
    push(
        "f14_formula",
        formula(A, A, B, &|a1, a4| {
            Ok(cx.add(&a_alg.mul(&d.gamma.apply(a4), a1), &d.delta.apply(fld, a1, a4)))
        }),
    );
    push(
        "k14_formula",
        formula(B, A, B, &|a1, a4| {
            let dl = d.delta.apply(fld, a1, a4);
            Ok(cx.add(&b_alg.mul(&d.gamma_prime.apply(a1), a4), &cx.phi(&dl, "δ")?))
        }),
    );
    push(
        "g12_formula",
        formula(M, A, M, &|a1, a2| {
            let lhs = m.act_left(fld, &a_alg.mul(&d.epsilon, a1), a2);
            let gp = cx.phi_inv(&d.gamma_prime.apply(a1), "γ'")?;
            Ok(cx.add(&lhs, &m.act_left(fld, &gp, a2)))
        }),
    );
    push(
        "g24_formula",
        formula(M, M, B, &|a2, a4| {
            let right = cx.add(&b_alg.mul(&d.epsilon_prime, a4), &cx.phi(&d.gamma.apply(a4), "γ")?);
            Ok(m.act_right(fld, a2, &right))
        }),
    );
    push(
        "h13_formula",
        formula(N, A, N, &|a1, a3| {
            let first = n.act_right(fld, &n.act_right(fld, a3, &d.epsilon), a1);
            Ok(cx.add(&first, &n.act_left(fld, &d.gamma_prime.apply(a1), a3)))
        }),
    );
    push(
        "h34_formula",
        formula(N, N, B, &|a3, a4| {
            let first = n.act_left(fld, &b_alg.mul(&d.epsilon_prime, a4), a3);
            let second = n.act_left(fld, &cx.phi(&d.gamma.apply(a4), "γ")?, a3);
            Ok(cx.add(&first, &second))
        }),
    );

    // polarized forms of the two corner squares
    let h = fld.half();
    push(
        "f11_formula",
        (|| {
            for u in 0..a_alg.dim() {
                for v in u..a_alg.dim() {
                    let (x, y) = (cx.basis(A, u), cx.basis(A, v));
                    let sym = cx.add(&a_alg.mul(&x, &y), &a_alg.mul(&y, &x));
                    let mut rhs = a_alg.mul(&d.epsilon, &sym);
                    rhs = cx.add(&rhs, &a_alg.mul(&cx.phi_inv(&d.gamma_prime.apply(&x), "γ'")?, &y));
                    rhs = cx.add(&rhs, &a_alg.mul(&cx.phi_inv(&d.gamma_prime.apply(&y), "γ'")?, &x));
                    rhs = linalg::vec_scale(fld, h, &rhs);
                    rhs = cx.add(&rhs, &cx.phi_inv(&comps.eval(B, A, A, &x, &y), "k11")?);
                    if comps.eval(A, A, A, &x, &y) != rhs {
                        return Err(format!("f11 differs at (e{u}, e{v})"));
                    }
                }
            }
            Ok(())
        })(),
    );
    push(
        "k44_formula",
        (|| {
            for u in 0..b_alg.dim() {
                for v in u..b_alg.dim() {
                    let (x, y) = (cx.basis(B, u), cx.basis(B, v));
                    let sym = cx.add(&b_alg.mul(&x, &y), &b_alg.mul(&y, &x));
                    let mut rhs = b_alg.mul(&d.epsilon_prime, &sym);
                    rhs = cx.add(&rhs, &b_alg.mul(&cx.phi(&d.gamma.apply(&x), "γ")?, &y));
                    rhs = cx.add(&rhs, &b_alg.mul(&cx.phi(&d.gamma.apply(&y), "γ")?, &x));
                    rhs = linalg::vec_scale(fld, h, &rhs);
                    rhs = cx.add(&rhs, &cx.phi(&comps.eval(A, B, B, &x, &y), "f44")?);
                    if comps.eval(B, B, B, &x, &y) != rhs {
                        return Err(format!("k44 differs at (e{u}, e{v})"));
                    }
                }
            }
            Ok(())
        })(),
    );
    push(
        "epsilon_pair_central",
        if center.contains(&g.diag(&d.epsilon, &d.epsilon_prime)) {
            Ok(())
        } else {
            Err("diag(ε, ε') is not central".to_string())
        },
    );
    out
}

/// Renders failed checks one per line.
pub fn describe_failures(checks: &[BlockCheck]) -> String {
    let mut s = String::new();
    for c in checks {
        if let Some(msg) = &c.failure {
            let _ = writeln!(s, "{}: {msg}", c.name);
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morita::{build_block_partition, DEFAULT_ENUM_CAP};

    #[test]
    fn product_components() {
        use Block::*;
        let g = build_block_partition(4, 2, 5).unwrap();
        let q = BilinearMapRep::product(g.flat());
        let c = extract_components(&g, &q);
        let f = g.field();
        for (i, j) in block_pairs() {
            let g_nonzero = [(A, M), (M, B)].contains(&(i, j));
            let h_nonzero = [(A, N), (N, B)].contains(&(i, j));
            assert_eq!(c.is_zero(M, i, j), !g_nonzero, "{}", component_name(M, i, j));
            assert_eq!(c.is_zero(N, i, j), !h_nonzero, "{}", component_name(N, i, j));
        }
        // g12(a1, a2) = a1 a2 and f23(a2, a3) = Φ(a2, a3)
        for s in 0..4 {
            for u in 0..4 {
                let (a1, a2) = (
                    g.project(A, &g.flat().basis_vector(s)),
                    g.project(M, &g.flat().basis_vector(4 + u)),
                );
                assert_eq!(c.eval(M, A, M, &a1, &a2), g.m().act_left(f, &a1, &a2));
                let a3 = g.project(N, &g.flat().basis_vector(8 + u));
                assert_eq!(
                    c.eval(A, M, N, &g.project(M, &g.flat().basis_vector(4 + s)), &a3),
                    g.context()
                        .phi
                        .apply(f, &g.project(M, &g.flat().basis_vector(4 + s)), &a3)
                );
            }
        }
        let x: Vec<u32> = (0..16).map(|i| (i * 7 % 5) as u32).collect();
        assert_eq!(c.reassemble(&g, &x), q.evaluate_trace(&x));
    }

    #[test]
    fn product_has_unit_epsilons() {
        let g = build_block_partition(4, 2, 5).unwrap();
        let q = BilinearMapRep::product(g.flat());
        let analysis = block_components(&g, &q, DEFAULT_ENUM_CAP);
        let d = analysis.derived.unwrap();
        assert_eq!(d.epsilon, g.a().unit());
        assert_eq!(d.epsilon_prime, g.b().unit());
        let checks = check_block_identities(&g, &gma_center(&g), &analysis.components, &d);
        assert!(checks.iter().all(BlockCheck::holds), "{}", describe_failures(&checks));
    }

    #[test]
    fn zero_map_has_zero_components() {
        let g = build_block_partition(3, 1, 5).unwrap();
        let c = extract_components(&g, &BilinearMapRep::zero(g.field(), g.dim()));
        for out in Block::ALL {
            for (i, j) in block_pairs() {
                assert!(c.is_zero(out, i, j));
            }
        }
    }
}
