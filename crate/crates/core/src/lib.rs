//! Homological and combinatorial invariants of monomial ideals.
//!
//! The crate builds lcm-lattices of monomial ideals, reads multigraded Betti
//! numbers and Betti posets off them, computes Stanley depth through
//! interval partitions, and runs consistency checks that relate the two
//! sides (see [`lab`]).

pub mod betti;
pub mod homology;
pub mod lab;
pub mod monomial;
pub mod poset;
pub mod stanley;

pub use betti::{
    betti_poset, betti_table, hilbert_numerator, homological_summary, scarf_complex,
    taylor_betti_oracle, BettiPoset, BettiTable, HomologicalSummary, NumeratorSource,
};
pub use homology::{is_acyclic, reduced_homology_ranks, FieldSpec};
pub use lab::{CheckReport, LabError, Verdict};
pub use monomial::{LcmLattice, Monomial, MonomialIdeal, RandomIdealParams};
pub use poset::{canonical_form, is_isomorphic, FiniteLattice, FinitePoset, NodeId, SimplicialComplexData};
pub use stanley::{sdepth, spdim, CharacteristicPoset, IntervalPartition, SearchBudget, Side};
