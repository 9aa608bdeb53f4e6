//! Sequential pattern-structure concept mining.
//!
//! Sequences of structured elements (taxonomy nodes, itemsets, repetition
//! intervals) are described by antichains of maximal common contiguous
//! subsequences. Projections coarsen the descriptions, the lattice module
//! builds the concept lattice and the stability module ranks concepts.

pub mod alphabet;
pub mod error;
pub mod io;
pub mod lattice;
pub mod projection;
pub mod pstruct;
pub mod sequence;
pub mod stability;

pub use alphabet::{
    AlphabetSchema, Element, ElementProjection, FieldKind, FieldSpec, Interval, ItemSet, Taxonomy,
    Value,
};
pub use error::{Error, Result};
pub use lattice::{build_lattice, validate_lattice, BuildOptions, Concept, ConceptId, Lattice};
pub use projection::{ProjectionSpec, Projector};
pub use pstruct::{
    ContextStructure, Description, FormalContext, ObjectSet, PatternStructure, SequentialStructure,
};
pub use sequence::{Pattern, Sequence};
pub use stability::{rank_concepts, stability_exact, stable_filter, RankKey, StabilityReport};
