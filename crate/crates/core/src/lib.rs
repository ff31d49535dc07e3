//! Finite-scale workbench for structural partition relations.
//!
//! The crate represents finite members of a handful of ordered classes
//! (chains, disjoint chains, colored chains, trees of bounded height, convex
//! equivalence relations, ordered graphs and colored hypergraphs), computes
//! quantifier-free types of increasing tuples, searches for big
//! type-homogeneous substructures, decides small instances of the structural
//! arrow relation, and builds, extracts and checks finite blueprints together
//! with their term models.

pub mod arrow;
pub mod blueprints;
pub mod cli;
pub mod colorings;
pub mod error;
pub mod reductions;
pub mod search;
pub mod structures;
pub mod tuples;
pub mod types;

pub use arrow::{arrow_check, ramsey_table, ArrowQuery, Mode, Outcome, Verdict};
pub use blueprints::{
    check_coherence, check_indiscernible, derive_homogeneous, em_model, extract_blueprint, Blueprint,
    Diagram, EmModel, OutputSignature, OutputStructure,
};
pub use colorings::{
    find_type_homogeneous, random_coloring, type_homogeneity_witness, Coloring, HomogeneityWitness,
    HomogeneousSearch,
};
pub use error::{Error, Result};
pub use reductions::{aux_coloring_chicolor, reduce_ceq, refined_aux_coloring_chicolor, reduce_chicolor, ReductionReport};
pub use structures::{
    closure, induced_substructure, is_big, is_member, make_canonical, BignessLevel, ClassKind,
    FinStructure, Payload,
};
pub use types::{enumerate_types, restrict_type, tuple_type, TupleType, TypeTable};
