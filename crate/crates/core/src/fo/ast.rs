//! Vocabularies, terms and formulas.
//!
//! Variables and constants are both function symbols of arity 0; the
//! only distinction is that variables are bound by quantifiers inside a
//! theory while constants are declared in the vocabulary. Predicates of
//! arity 0 are propositions.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SymbolKind {
    Pred,
    Func,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SymbolIo {
    Input,
    Output,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
    pub kind: SymbolKind,
    pub io: SymbolIo,
}

impl Symbol {
    pub fn pred(name: &str, arity: usize, io: SymbolIo) -> Symbol {
        Symbol { name: name.into(), arity, kind: SymbolKind::Pred, io }
    }

    pub fn func(name: &str, arity: usize, io: SymbolIo) -> Symbol {
        Symbol { name: name.into(), arity, kind: SymbolKind::Func, io }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VocabError {
    #[error("symbol `{0}` declared twice")]
    Duplicate(String),
}

/// Symbol table. Declaration order is significant: it fixes the symbol
/// component of the ground atom order used by grounding and breaking.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Vocabulary {
    symbols: Vec<Symbol>,
    by_name: HashMap<String, usize>,
}

impl Vocabulary {
    pub fn new() -> Vocabulary {
        Vocabulary::default()
    }

    pub fn declare(&mut self, sym: Symbol) -> Result<(), VocabError> {
        if self.by_name.contains_key(&sym.name) {
            return Err(VocabError::Duplicate(sym.name));
        }
        self.by_name.insert(sym.name.clone(), self.symbols.len());
        self.symbols.push(sym);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&Symbol> {
        self.by_name.get(name).map(|&i| &self.symbols[i])
    }

    /// Position of `name` in declaration order.
    pub fn decl_index(&self, name: &str) -> Option<usize> {
        self.by_name.get(name).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Symbol> {
        self.symbols.iter()
    }

    pub fn inputs(&self) -> impl Iterator<Item = &Symbol> {
        self.symbols.iter().filter(|s| s.io == SymbolIo::Input)
    }

    pub fn outputs(&self) -> impl Iterator<Item = &Symbol> {
        self.symbols.iter().filter(|s| s.io == SymbolIo::Output)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Term {
    /// Occurrence of a quantified variable.
    Var(String),
    /// Application of a declared function symbol; constants have no args.
    App { sym: String, args: Vec<Term> },
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.into())
    }

    pub fn cons(name: &str) -> Term {
        Term::App { sym: name.into(), args: Vec::new() }
    }

    pub fn app(name: &str, args: Vec<Term>) -> Term {
        Term::App { sym: name.into(), args }
    }

    /// Head symbol name: the variable name or the applied function symbol.
    pub fn head(&self) -> &str {
        match self {
            Term::Var(v) => v,
            Term::App { sym, .. } => sym,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Formula {
    Pred { sym: String, args: Vec<Term> },
    Eq(Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
}

impl Formula {
    pub fn pred(sym: &str, args: Vec<Term>) -> Formula {
        Formula::Pred { sym: sym.into(), args }
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn forall(v: &str, f: Formula) -> Formula {
        Formula::Forall(v.into(), Box::new(f))
    }

    pub fn exists(v: &str, f: Formula) -> Formula {
        Formula::Exists(v.into(), Box::new(f))
    }
}

/// A finite set of sentences (formulas without free variables).
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Theory {
    pub sentences: Vec<Formula>,
}

impl Theory {
    pub fn new(sentences: Vec<Formula>) -> Theory {
        Theory { sentences }
    }
}

impl fmt::Display for SymbolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolKind::Pred => write!(f, "pred"),
            SymbolKind::Func => write!(f, "func"),
        }
    }
}

impl fmt::Display for SymbolIo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolIo::Input => write!(f, "input"),
            SymbolIo::Output => write!(f, "output"),
        }
    }
}
