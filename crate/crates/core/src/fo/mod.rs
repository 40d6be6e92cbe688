//! First-order core: vocabularies, theories, structures, parsing,
//! printing, evaluation, and expansion enumeration.

mod ast;
mod enumerate;
mod eval;
mod parse;
mod print;
mod rename;
mod structure;

pub use ast::{Formula, Symbol, SymbolIo, SymbolKind, Term, Theory, VocabError, Vocabulary};
pub use enumerate::{enumerate_expansions, expansion_count, EnumError, ExpansionIter, ENUM_BUDGET_DEFAULT};
pub use eval::{check_models, eval_term, EvalError};
pub use parse::{parse_problem, ParseError};
pub use print::{print_domain, print_formula, print_problem, print_structure, print_term, print_theory_block, print_vocab};
pub use rename::rename_apart;
pub use structure::{Domain, DomainError, ElemId, FuncGraph, Relation, Structure, StructureError, Tuple};

/// A model expansion instance: find an output structure that together
/// with the input structure satisfies the theory.
///
/// Invariants, established by [`parse_problem`]: the theory only uses
/// declared symbols with correct kinds and arities, its sentences are
/// closed and renamed apart, the input structure interprets all and
/// only the input symbols (functions totally), and there is at least
/// one output symbol.
#[derive(Clone, Debug, PartialEq)]
pub struct Problem {
    pub vocab: Vocabulary,
    pub theory: Theory,
    pub input: Structure,
}

impl Problem {
    pub fn domain(&self) -> &std::sync::Arc<Domain> {
        self.input.domain()
    }

    /// Does `output` expand the input structure into a model?
    pub fn is_solution(&self, output: &Structure) -> Result<bool, EvalError> {
        let full = self
            .input
            .merge(output)
            .map_err(|_| EvalError::Uninterpreted("structures overlap".into()))?;
        check_models(&full, &self.theory)
    }
}
