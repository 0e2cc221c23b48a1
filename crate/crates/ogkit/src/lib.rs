//! Finite impartial combinatorial games represented as *optiongraphs*:
//! directed graphs whose vertices are positions and whose out-neighbours
//! are the moves available to the player to move.
//!
//! The crate covers the structural algebra of these games — option-preserving
//! maps, congruence relations and their lattice, quotient graphs with
//! executable isomorphism-theorem witnesses, disjunctive sums — together with
//! game values (normal and misère outcomes, remoteness, extended nim-values)
//! and exhaustive enumeration of small graphs up to isomorphism.
//!
//! Graphs are tiny by combinatorial-game standards (tens of positions), so
//! the data structures favour clarity and determinism over asymptotics.
//! Everything is deterministic: equal inputs produce byte-equal outputs.

pub mod congruence;
pub mod enumeration;
pub mod fixtures;
pub mod graph;
pub mod morphism;
pub mod quotient;
pub mod sum;
pub mod valuation;

pub use congruence::{
    all_congruences, all_congruences_bounded, all_congruences_sequential, congruence_lattice,
    congruence_lattice_bounded, is_congruence, is_simple, join, max_congruence, meet,
    principal_congruence, Congruence, CongruenceLattice, CongruenceViolation, EnumerationBound,
    Partition, DEFAULT_CONGRUENCE_BOUND,
};
pub use enumeration::{
    count_simple, count_simple_sequential, count_simple_unbounded, enumerate_labeled,
    graph_from_mask, random_congruence, random_optiongraph, simple_representatives,
    EnumerationLimit, EnumerationReport, RunOptions, ENUMERATION_BOUND, LONG_RUN_BOUND,
};
pub use graph::{reachable_closure, GraphError, Optiongraph, ParseError, Suboptiongraph};
pub use morphism::{
    canonical_form, compose, find_isomorphism, CanonicalBound, CanonicalCode, MapError,
    OptionMap, PreservationViolation, CANONICAL_FORM_BOUND,
};
pub use quotient::{
    extend_congruence, first_iso_witness, fourth_iso_alpha, minimize, quotient,
    relation_quotient, restrict_congruence, second_iso_witness, third_iso_witness,
    FirstIsoWitness, FourthIsoWitness, QuotientResult, SecondIsoWitness, ThirdIsoWitness,
};
pub use sum::{product_map, sum, sum_congruence, sum_with_separator, GameSum};
pub use valuation::{
    extended_nim, fim_partition, formal_birthday, is_rulegraph, misere_outcomes, outcomes_normal,
    remoteness, valuation, FimClass, FimPartition, NimValue, Outcome, Remoteness, Valuation,
};
