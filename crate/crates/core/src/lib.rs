//! Generalized matrix algebras `[A M; N B]` over `F_p` (odd `p`): exact
//! linear algebra, Morita contexts, commuting traces of bilinear maps and
//! the standard form of Lie isomorphisms.

pub mod algebra;
pub mod blocks;
pub mod field;
pub mod hypotheses;
pub mod json;
pub mod lie;
pub mod linalg;
pub mod morita;
pub mod traces;

pub use algebra::{Algebra, AxiomViolation, LinearMapRep, NotProperLinear, ProperLinearWitness};
pub use blocks::{block_components, check_block_identities, extract_components, BlockComponents, DerivedData};
pub use field::{PointCounter, PrimeField};
pub use hypotheses::{hypothesis_report, HypothesisReport, Theorem, Verdict};
pub use lie::{check_identity_l41, is_lie_isomorphism, lie_decompose, verify_standard_form, LieDecomposition, LieKind};
pub use linalg::{DenseMatrix, RowReducer};
pub use morita::{
    build_block_partition, build_from_idempotent, build_nonloyal_demo, build_triangular, build_upper_triangular,
    check_loyal, check_module_faithful, gma_center, Bimodule, Block, CenterData, Gma, GmaElement, MoritaContext,
    Pairing, TooLarge, DEFAULT_ENUM_CAP,
};
pub use traces::{
    proper_trace_decompose, properness_subspace, trace_space, BilinearMapRep, NotProper, ProperDecomposition, TraceKind,
};
