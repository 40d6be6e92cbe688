//! Symmetry toolkit for finite model expansion.
//!
//! A model expansion problem asks for an interpretation of the output
//! vocabulary that, together with a fixed input structure, satisfies a
//! first-order theory. This crate detects *local domain symmetries* of
//! such problems on the first-order level, before grounding: domain
//! permutations applied only at a connectively closed set of argument
//! positions. Detected symmetries are broken with lex-leader clauses
//! appended to a CNF grounding, which an embedded CDCL solver can then
//! solve or count.
//!
//! The pipeline runs in stages, each usable on its own:
//!
//! * [`fo`]: vocabularies, theories, structures, parsing, printing,
//!   evaluation, and brute-force expansion enumeration (the oracle the
//!   rest of the crate is tested against).
//! * [`decompose`]: per-occurrence copies of input symbols, so that
//!   symmetry requirements can be checked per occurrence.
//! * [`argpos`]: argument positions, direct connections, and the
//!   partition of positions into minimal connectively closed sets.
//! * [`transform`]: induced structure transformations and the
//!   brute-force model-expansion symmetry oracle.
//! * [`interchange`]: detection of interchangeable subdomains by
//!   pairwise swap tests.
//! * [`dpg`] and [`autom`]: the domain permutation graph and a graph
//!   automorphism engine for symmetries beyond interchangeability.
//! * [`ground`]: grounding to CNF over a ground atom catalog, DIMACS
//!   emission and parsing.
//! * [`breaker`]: lex-leader symmetry breaking constraints.
//! * [`solve`]: a CDCL SAT solver with exhaustive projected model
//!   counting.

pub mod argpos;
pub mod autom;
pub mod breaker;
pub mod decompose;
pub mod dpg;
pub mod dset;
pub mod fo;
pub mod ground;
pub mod interchange;
pub mod solve;
pub mod transform;

#[cfg(test)]
pub(crate) mod testfix;

pub use argpos::ArgPos;
pub use breaker::{
    atom_order, break_generators, break_interchangeable, completeness_condition, lex_leader,
    BreakError, GroundAtomOrder, InterchangeBreaking, LexLeaderConstraint,
};
pub use fo::{Domain, ElemId, Formula, Problem, Structure, Symbol, Term, Theory, Vocabulary};
pub use ground::{
    emit_dimacs, ground_theory, parse_dimacs, AtomCatalog, Cnf, GroundAtom, GroundError, Lit, Var,
};
pub use solve::{count_models, sat_solve, SolverResult, SolverStats, SolverStatus};
pub use transform::{DomainPermutation, InducedTransform};
