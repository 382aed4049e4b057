//! Canonical forms and local-unitary (LU) equivalence for multipartite
//! quantum states.
//!
//! Pure states are stored as dense tensors with the first party's index
//! slowest. [`hosvd`] brings a state to a canonical core whose per-mode
//! singular values are LU invariants; [`compare_pure`] and [`compare_mixed`]
//! decide equivalence, returning a verified witness, a named certificate, or
//! an explicit `Undecided`.

pub mod decomposition;
pub mod equivalence;
pub mod error;
pub mod linalg;
pub mod linearization;
pub mod mixed;
pub mod tensor;

pub use decomposition::{
    degeneracy_structure, hosvd, mode_singular_values, singular_value_matrix, Block, CanonicalForm,
    DegeneracyStructure, SingularValueMatrix, DEFAULT_CLUSTER_TOL,
};
pub use equivalence::certificates::{
    gram_certificate, marginal_spectra_certificate, reduced_spectrum,
};
pub use equivalence::phase::{phase_equivalence, solve_core_phases, PhaseSolve};
pub use equivalence::search::{
    random_block_symmetry, search_tensors, verify_witness, witness_search, SearchBudget,
    SearchResult,
};
pub use equivalence::segments::{segment_decompose, segments_of, Segment};
pub use equivalence::verdict::{Certificate, Diagnostics, Outcome, Stage, Verdict, Witness};
pub use equivalence::{compare_pure, CompareOptions, Strategy, WITNESS_TOL};
pub use error::{Error, Result};
pub use linearization::{
    build_linear_system, conjugation_split, count_products, independent_products,
    quadratic_relations, solve_fully_degenerate, LinearizedSystem, NuIndex, QuadraticRelation,
};
pub use mixed::{
    canonical_mixed, compare_mixed, new_density_matrix, partial_trace_0, purify, purify_with,
    random_density_matrix, DensityMatrix, Purification,
};
pub use tensor::{
    apply_local_unitaries, inner_product, mode_product, new_state_tensor, random_local_unitaries,
    random_state, random_unitary, refold, unfold, vectorize, CMatrix, LocalUnitarySet, StateTensor,
    UnfoldedMatrix,
};
