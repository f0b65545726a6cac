//! Condition-by-condition reports on the hypotheses of the structure
//! theorems for commuting traces and Lie isomorphisms.

use std::fmt;
use std::str::FromStr;

use crate::algebra::Algebra;
use crate::field::PointCounter;
use crate::linalg;
use crate::morita::{
    center_zero_divisors, check_loyal, check_module_faithful, gma_center, largest_central_ideal, CenterData,
    ElementPair, Gma, Loyalty, Side, TooLarge,
};
use crate::traces::{first_outside_span, properness_subspace, trace_space, TraceKind};

/// Which family of hypotheses to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Theorem {
    /// Commuting traces on a GMA with noncommutative corners and loyal `M`.
    T3_4,
    /// Commuting traces on `[R M; N B]` with `B` central.
    P3_17,
    /// Target-side conditions for Lie isomorphisms, trace form.
    P4_2,
    /// Target-side conditions for Lie isomorphisms, corner form.
    T4_3Target,
}

impl Theorem {
    pub const ALL: [Theorem; 4] = [Theorem::T3_4, Theorem::P3_17, Theorem::P4_2, Theorem::T4_3Target];

    pub fn key(self) -> &'static str {
        match self {
            Theorem::T3_4 => "3.4",
            Theorem::P3_17 => "3.17",
            Theorem::P4_2 => "4.2",
            Theorem::T4_3Target => "4.3-target",
        }
    }
}

impl FromStr for Theorem {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Theorem::ALL
            .into_iter()
            .find(|t| t.key() == s)
            .ok_or_else(|| format!("unknown theorem {s:?} (expected 3.4, 3.17, 4.2 or 4.3-target)"))
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

/// Evidence for a failed condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub note: String,
    pub vectors: Vec<Vec<u32>>,
}

impl Witness {
    fn new(note: impl Into<String>, vectors: Vec<Vec<u32>>) -> Self {
        Witness {
            note: note.into(),
            vectors,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails(Witness),
    /// Not decided, e.g. an enumeration over the cap.
    Skipped(String),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    fn from_option(w: Option<Witness>) -> Self {
        w.map_or(Verdict::Holds, Verdict::Fails)
    }

    fn from_capped(r: Result<Option<Witness>, TooLarge>) -> Self {
        match r {
            Ok(w) => Verdict::from_option(w),
            Err(e) => Verdict::Skipped(e.to_string()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Condition {
    pub key: &'static str,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HypothesisReport {
    pub theorem: Theorem,
    pub conditions: Vec<Condition>,
}

impl HypothesisReport {
    pub fn all_hold(&self) -> bool {
        self.conditions.iter().all(|c| c.verdict.holds())
    }

    pub fn failed_keys(&self) -> Vec<&'static str> {
        self.conditions
            .iter()
            .filter(|c| matches!(c.verdict, Verdict::Fails(_)))
            .map(|c| c.key)
            .collect()
    }

    pub fn get(&self, key: &str) -> Option<&Verdict> {
        self.conditions.iter().find(|c| c.key == key).map(|c| &c.verdict)
    }
}

fn commuting_maps_proper(alg: &Algebra) -> Option<Witness> {
    alg.commuting_linear_map_space().into_iter().find_map(|map| {
        alg.proper_linear_decompose(&map).err().map(|e| {
            Witness::new(
                format!("commuting map (column-major) not proper at basis {}", e.basis_index),
                vec![map.to_column_major()],
            )
        })
    })
}

fn projection_equals_center(alg: &Algebra, projection: &[Vec<u32>]) -> Option<Witness> {
    let f = alg.field();
    let z = alg.center_basis();
    if let Some(x) = z.iter().find(|x| !linalg::subspace_contains(f, projection, x)) {
        return Some(Witness::new(
            "central element outside the projection of Z(G)",
            vec![x.clone()],
        ));
    }
    projection
        .iter()
        .find(|x| !linalg::subspace_contains(f, &z, x))
        .map(|x| Witness::new("projection of Z(G) contains a non-central element", vec![x.clone()]))
}

fn center_proper_subset(alg: &Algebra) -> Option<Witness> {
    alg.is_commutative().then(|| {
        Witness::new(
            format!("Z = whole corner (dim {})", alg.dim()),
            vec![alg.unit().to_vec()],
        )
    })
}

fn noncommutative(alg: &Algebra) -> Option<Witness> {
    alg.is_commutative()
        .then(|| Witness::new("corner is commutative", vec![alg.unit().to_vec()]))
}

fn faithful(g: &Gma, side: Side) -> Option<Witness> {
    check_module_faithful(g, side).map(|x| Witness::new("nonzero annihilator", vec![x]))
}

fn loyal(g: &Gma, cap: u64) -> Result<Option<Witness>, TooLarge> {
    Ok(match check_loyal(g, cap)? {
        Loyalty::Loyal => None,
        Loyalty::Witness { a, b } => Some(Witness::new("a M b = 0 with a, b nonzero", vec![a, b])),
    })
}

fn no_central_ideals(g: &Gma, center: &CenterData) -> Option<Witness> {
    largest_central_ideal(g, center)
        .into_iter()
        .next()
        .map(|x| Witness::new("nonzero element of a central ideal", vec![x]))
}

fn center_domain(g: &Gma, center: &CenterData, cap: u64) -> Result<Option<Witness>, TooLarge> {
    Ok(center_zero_divisors(g, center, cap)?
        .map(|(x, y)| Witness::new("nonzero central elements with zero product", vec![x, y])))
}

/// `m b` and `m` linearly independent for some `m ∈ M`, `b ∈ B`. Basis
/// pairs are tried first; otherwise all `m` are enumerated against the `B`
/// basis, which suffices because the condition is linear in `b`.
pub fn independent_pair(g: &Gma, cap: u64) -> Result<Option<ElementPair>, TooLarge> {
    let f = g.field();
    let (m, b) = (g.m(), g.b());
    let bb: Vec<Vec<u32>> = (0..b.dim()).map(|t| b.basis_vector(t)).collect();
    let independent = |x: &[u32], y: &[u32]| linalg::span_basis(f, x.len(), &[x.to_vec(), y.to_vec()]).len() == 2;
    for u in 0..m.dim() {
        let mut mu = vec![0; m.dim()];
        mu[u] = 1;
        for bt in &bb {
            if independent(&mu, &m.act_right(f, &mu, bt)) {
                return Ok(Some((mu, bt.clone())));
            }
        }
    }
    TooLarge::check(f, m.dim(), cap)?;
    for x in PointCounter::nonzero(f, m.dim()) {
        for bt in &bb {
            if independent(&x, &m.act_right(f, &x, bt)) {
                return Ok(Some((x, bt.clone())));
            }
        }
    }
    Ok(None)
}

fn one_dimensional_center(alg: &Algebra, what: &str) -> Option<Witness> {
    let z = alg.center_basis();
    (z.len() != 1).then(|| Witness::new(format!("{what} has center of dimension {}", z.len()), z))
}

/// Evaluates every condition of `theorem` on `g` (taken as the target GMA
/// for the Lie statements), plus faithfulness of `M`, absence of nonzero
/// central ideals and the domain property of the center.
pub fn hypothesis_report(g: &Gma, theorem: Theorem, cap: u64) -> HypothesisReport {
    let center = gma_center(g);
    let mut conditions: Vec<Condition> = Vec::new();
    let mut add = |key: &'static str, verdict: Verdict| conditions.push(Condition { key, verdict });
    let (a, b) = (g.a(), g.b());
    let corner_conditions = |add: &mut dyn FnMut(&'static str, Verdict)| {
        add(
            "commuting_maps_proper_on_A",
            Verdict::from_option(commuting_maps_proper(a)),
        );
        add(
            "commuting_maps_proper_on_B",
            Verdict::from_option(commuting_maps_proper(b)),
        );
        add(
            "piA_center_equals_ZA",
            Verdict::from_option(projection_equals_center(a, &center.pi_a_basis)),
        );
        add("ZA_proper_subset", Verdict::from_option(center_proper_subset(a)));
        add(
            "piB_center_equals_ZB",
            Verdict::from_option(projection_equals_center(b, &center.pi_b_basis)),
        );
        add("ZB_proper_subset", Verdict::from_option(center_proper_subset(b)));
    };
    let some_corner_noncommutative = || {
        Verdict::from_option(
            (a.is_commutative() && b.is_commutative()).then(|| Witness::new("both corners are commutative", vec![])),
        )
    };
    match theorem {
        Theorem::T3_4 => {
            corner_conditions(&mut add);
            add("M_loyal", Verdict::from_capped(loyal(g, cap)));
            add("A_noncommutative", Verdict::from_option(noncommutative(a)));
            add("B_noncommutative", Verdict::from_option(noncommutative(b)));
        }
        Theorem::P3_17 => {
            add(
                "A_is_base_ring",
                Verdict::from_option((a.dim() != 1).then(|| Witness::new(format!("dim A = {}", a.dim()), vec![]))),
            );
            add("B_noncommutative", Verdict::from_option(noncommutative(b)));
            add("G_central", Verdict::from_option(one_dimensional_center(g.flat(), "G")));
            add("B_central", Verdict::from_option(one_dimensional_center(b, "B")));
            add(
                "commuting_maps_proper_on_B",
                Verdict::from_option(commuting_maps_proper(b)),
            );
            let pair = independent_pair(g, cap).map(|p| match p {
                Some(_) => None,
                None => Some(Witness::new("m b ∈ span(m) for all m, b", vec![])),
            });
            add("independent_pair_exists", Verdict::from_capped(pair));
        }
        Theorem::P4_2 => {
            let traces = trace_space(g, TraceKind::Commuting, cap).map(|space| {
                first_outside_span(&properness_subspace(g), &space).map(|i| {
                    Witness::new(
                        "commuting trace (bilinear tensor) outside the proper subspace",
                        vec![space[i].tensor().to_vec()],
                    )
                })
            });
            add("all_commuting_traces_proper", Verdict::from_capped(traces));
            add("some_corner_noncommutative", some_corner_noncommutative());
            add("M_loyal", Verdict::from_capped(loyal(g, cap)));
        }
        Theorem::T4_3Target => {
            corner_conditions(&mut add);
            add("some_corner_noncommutative", some_corner_noncommutative());
            add("M_loyal", Verdict::from_capped(loyal(g, cap)));
        }
    }
    add("M_faithful_left", Verdict::from_option(faithful(g, Side::Left)));
    add("M_faithful_right", Verdict::from_option(faithful(g, Side::Right)));
    add(
        "no_nonzero_central_ideals",
        Verdict::from_option(no_central_ideals(g, &center)),
    );
    add("center_is_domain", Verdict::from_capped(center_domain(g, &center, cap)));
    HypothesisReport { theorem, conditions }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morita::{build_block_partition, build_nonloyal_demo, build_upper_triangular, DEFAULT_ENUM_CAP};

    #[test]
    fn full_4_2_satisfies_commuting_trace_hypotheses() {
        let g = build_block_partition(4, 2, 5).unwrap();
        let r = hypothesis_report(&g, Theorem::T3_4, DEFAULT_ENUM_CAP);
        assert!(r.all_hold(), "{r:?}");
    }

    #[test]
    fn full_3_1_routes() {
        let g = build_block_partition(3, 1, 5).unwrap();
        let r = hypothesis_report(&g, Theorem::T3_4, DEFAULT_ENUM_CAP);
        assert!(r.failed_keys().contains(&"ZA_proper_subset"));
        let r = hypothesis_report(&g, Theorem::P3_17, DEFAULT_ENUM_CAP);
        assert!(r.all_hold(), "{r:?}");
        let (m0, b0) = independent_pair(&g, DEFAULT_ENUM_CAP).unwrap().unwrap();
        assert_eq!(m0, vec![1, 0]);
        assert_eq!(b0, vec![0, 1, 0, 0]);
    }

    #[test]
    fn triangular_corners_commutative() {
        let g = build_upper_triangular(2, 3).unwrap();
        let r = hypothesis_report(&g, Theorem::T3_4, DEFAULT_ENUM_CAP);
        let failed = r.failed_keys();
        for key in [
            "ZA_proper_subset",
            "ZB_proper_subset",
            "A_noncommutative",
            "B_noncommutative",
        ] {
            assert!(failed.contains(&key), "{key}");
        }
    }

    #[test]
    fn nonloyal_demo_failures() {
        let g = build_nonloyal_demo(5).unwrap();
        let r = hypothesis_report(&g, Theorem::T3_4, DEFAULT_ENUM_CAP);
        assert_eq!(
            r.failed_keys(),
            vec![
                "ZA_proper_subset",
                "ZB_proper_subset",
                "M_loyal",
                "A_noncommutative",
                "B_noncommutative",
                "center_is_domain"
            ]
        );
    }

    #[test]
    fn theorem_keys_round_trip() {
        for t in Theorem::ALL {
            assert_eq!(t.key().parse::<Theorem>().unwrap(), t);
        }
        assert!("5.1".parse::<Theorem>().is_err());
    }
}
