//! Occurrence splitting for input symbols.
//!
//! Every occurrence of an input symbol in the theory is renamed to a fresh
//! copy (`Edge` becomes `Edge#1`, `Edge#2`, ...), and every copy is
//! interpreted by the original symbol's interpretation. The rewritten
//! problem has exactly the same solutions, but its argument positions are
//! finer: two occurrences of the same input symbol no longer have to sit in
//! the same connected block, so more domain symmetries become local.

use std::collections::BTreeMap;

use crate::fo::{Formula, Problem, Structure, Symbol, SymbolIo, SymbolKind, Term, Theory, Vocabulary};

/// A problem whose input-symbol occurrences have been split apart, together
/// with the renaming that produced it.
#[derive(Debug)]
pub struct Decomposition {
    pub problem: Problem,
    /// Copy name (`"Edge#2"`) to original name (`"Edge"`).
    pub copy_map: BTreeMap<String, String>,
}

impl Decomposition {
    pub fn original(&self, copy: &str) -> Option<&str> {
        self.copy_map.get(copy).map(String::as_str)
    }

    /// Copies of `original` in occurrence order (`S#1`, `S#2`, ...).
    pub fn copies_of(&self, original: &str) -> Vec<&str> {
        let mut out: Vec<&str> = self
            .copy_map
            .iter()
            .filter(|(_, orig)| orig.as_str() == original)
            .map(|(copy, _)| copy.as_str())
            .collect();
        out.sort_by_key(|c| occurrence_number(c));
        out
    }

    /// Maps a name from the decomposed problem back to the source problem.
    /// Output symbols and variables pass through unchanged.
    pub fn source_name<'a>(&'a self, name: &'a str) -> &'a str {
        self.original(name).unwrap_or(name)
    }
}

fn occurrence_number(copy: &str) -> usize {
    copy.rsplit('#').next().and_then(|k| k.parse().ok()).unwrap_or(0)
}

/// Splits every theory occurrence of an input symbol into its own copy.
///
/// Copies are numbered per symbol in pre-order reading order (head before
/// arguments, sentences first to last) and share the original
/// interpretation. Input symbols that never occur in the theory are dropped:
/// they cannot influence satisfaction, so keeping them would only make
/// symmetries harder to find. Output symbols are kept as they are, in their
/// original declaration order.
pub fn decompose(p: &Problem) -> Decomposition {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    let sentences: Vec<Formula> =
        p.theory.sentences.iter().map(|s| rw_formula(s, p, &mut counts)).collect();

    let mut vocab = Vocabulary::new();
    let mut input = Structure::new(p.domain().clone());
    let mut copy_map = BTreeMap::new();
    for sym in p.vocab.iter() {
        if sym.io == SymbolIo::Output {
            vocab.declare(sym.clone()).expect("source vocabulary had no duplicates");
            continue;
        }
        let n = counts.get(sym.name.as_str()).copied().unwrap_or(0);
        for k in 1..=n {
            let copy = copy_name(&sym.name, k);
            vocab
                .declare(Symbol { name: copy.clone(), ..sym.clone() })
                .expect("copy names cannot collide: '#' is rejected in source names");
            match sym.kind {
                SymbolKind::Pred => {
                    let r = p.input.rel(&sym.name).expect("input predicate is interpreted");
                    input.set_rel(&copy, r.clone()).unwrap();
                }
                SymbolKind::Func => {
                    let g = p.input.func(&sym.name).expect("input function is interpreted");
                    input.set_func(&copy, g.clone()).unwrap();
                }
            }
            copy_map.insert(copy, sym.name.clone());
        }
    }

    let problem = Problem { vocab, theory: Theory::new(sentences), input };
    Decomposition { problem, copy_map }
}

fn copy_name(original: &str, k: usize) -> String {
    format!("{original}#{k}")
}

fn next_copy<'a>(name: &'a str, counts: &mut BTreeMap<&'a str, usize>) -> String {
    let k = counts.entry(name).or_insert(0);
    *k += 1;
    copy_name(name, *k)
}

fn is_input(name: &str, p: &Problem) -> bool {
    p.vocab.get(name).map(|s| s.io == SymbolIo::Input).unwrap_or(false)
}

fn rw_formula<'a>(f: &'a Formula, p: &Problem, counts: &mut BTreeMap<&'a str, usize>) -> Formula {
    match f {
        Formula::Pred { sym, args } => {
            let head = if is_input(sym, p) { next_copy(sym, counts) } else { sym.clone() };
            let args = args.iter().map(|t| rw_term(t, p, counts)).collect();
            Formula::Pred { sym: head, args }
        }
        Formula::Eq(l, r) => Formula::Eq(rw_term(l, p, counts), rw_term(r, p, counts)),
        Formula::Not(g) => Formula::Not(Box::new(rw_formula(g, p, counts))),
        Formula::And(l, r) => Formula::And(
            Box::new(rw_formula(l, p, counts)),
            Box::new(rw_formula(r, p, counts)),
        ),
        Formula::Or(l, r) => Formula::Or(
            Box::new(rw_formula(l, p, counts)),
            Box::new(rw_formula(r, p, counts)),
        ),
        Formula::Implies(l, r) => Formula::Implies(
            Box::new(rw_formula(l, p, counts)),
            Box::new(rw_formula(r, p, counts)),
        ),
        Formula::Iff(l, r) => Formula::Iff(
            Box::new(rw_formula(l, p, counts)),
            Box::new(rw_formula(r, p, counts)),
        ),
        Formula::Forall(v, g) => Formula::Forall(v.clone(), Box::new(rw_formula(g, p, counts))),
        Formula::Exists(v, g) => Formula::Exists(v.clone(), Box::new(rw_formula(g, p, counts))),
    }
}

fn rw_term<'a>(t: &'a Term, p: &Problem, counts: &mut BTreeMap<&'a str, usize>) -> Term {
    match t {
        Term::Var(v) => Term::Var(v.clone()),
        Term::App { sym, args } => {
            let head = if is_input(sym, p) { next_copy(sym, counts) } else { sym.clone() };
            let args = args.iter().map(|a| rw_term(a, p, counts)).collect();
            Term::App { sym: head, args }
        }
    }
}
