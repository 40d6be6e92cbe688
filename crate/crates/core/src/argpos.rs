//! Argument positions and connective closure.
//!
//! An argument position `S|i` names the i-th argument slot of a symbol
//! `S`; for function symbols, `S|0` is the output slot. Variables count
//! as zero-ary function symbols, so each variable `x` contributes the
//! position `x|0`.
//!
//! Two positions are *directly connected* in a theory when a term
//! `f(..)` occurs as the i-th argument of a symbol `S` (connecting
//! `f|0` with `S|i`), or when an equality joins two terms (connecting
//! the output slots of both heads). A set of positions is
//! *connectively closed* when it contains every position directly
//! connected to one of its members. The minimal closed sets are the
//! connected components of the direct-connection relation; permuting
//! the domain at exactly the positions of a closed set commutes with
//! the truth of every sentence.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::dset::UnionFind;
use crate::fo::{Formula, SymbolKind, Term, Theory, Vocabulary};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ArgPos {
    pub symbol: String,
    pub index: usize,
}

impl ArgPos {
    pub fn new(symbol: &str, index: usize) -> ArgPos {
        ArgPos { symbol: symbol.into(), index }
    }

    /// Parse `Sym|i`.
    pub fn parse(s: &str) -> Option<ArgPos> {
        let (sym, ix) = s.rsplit_once('|')?;
        if sym.is_empty() {
            return None;
        }
        Some(ArgPos { symbol: sym.to_string(), index: ix.parse().ok()? })
    }
}

impl fmt::Display for ArgPos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}", self.symbol, self.index)
    }
}

pub type ArgPosSet = BTreeSet<ArgPos>;

/// All direct connections of the theory, deduplicated, in first-seen
/// order. Each pair is oriented (inner head, enclosing position) for
/// argument nesting and (left head, right head) for equalities.
pub fn connectivity_pairs(theory: &Theory) -> Vec<(ArgPos, ArgPos)> {
    let mut seen = BTreeSet::new();
    let mut pairs = Vec::new();
    let mut emit = |a: ArgPos, b: ArgPos| {
        if seen.insert((a.clone(), b.clone())) {
            pairs.push((a, b));
        }
    };
    for s in &theory.sentences {
        walk_formula(s, &mut emit);
    }
    pairs
}

fn walk_formula(f: &Formula, emit: &mut impl FnMut(ArgPos, ArgPos)) {
    match f {
        Formula::Pred { sym, args } => {
            for (i, arg) in args.iter().enumerate() {
                emit(ArgPos::new(arg.head(), 0), ArgPos::new(sym, i + 1));
                walk_term(arg, emit);
            }
        }
        Formula::Eq(a, b) => {
            emit(ArgPos::new(a.head(), 0), ArgPos::new(b.head(), 0));
            walk_term(a, emit);
            walk_term(b, emit);
        }
        Formula::Not(g) => walk_formula(g, emit),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            walk_formula(a, emit);
            walk_formula(b, emit);
        }
        Formula::Forall(_, g) | Formula::Exists(_, g) => walk_formula(g, emit),
    }
}

fn walk_term(t: &Term, emit: &mut impl FnMut(ArgPos, ArgPos)) {
    if let Term::App { sym, args } = t {
        for (i, arg) in args.iter().enumerate() {
            emit(ArgPos::new(arg.head(), 0), ArgPos::new(sym, i + 1));
            walk_term(arg, emit);
        }
    }
}

/// Every argument position of the vocabulary plus one position per
/// bound variable of the theory, sorted.
pub fn all_positions(vocab: &Vocabulary, theory: &Theory) -> ArgPosSet {
    let mut set = ArgPosSet::new();
    for s in vocab.iter() {
        let lo = match s.kind {
            SymbolKind::Func => 0,
            SymbolKind::Pred => 1,
        };
        for i in lo..=s.arity {
            set.insert(ArgPos::new(&s.name, i));
        }
    }
    for s in &theory.sentences {
        collect_binders(s, &mut set);
    }
    set
}

fn collect_binders(f: &Formula, set: &mut ArgPosSet) {
    match f {
        Formula::Forall(v, g) | Formula::Exists(v, g) => {
            set.insert(ArgPos::new(v, 0));
            collect_binders(g, set);
        }
        Formula::Not(g) => collect_binders(g, set),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            collect_binders(a, set);
            collect_binders(b, set);
        }
        Formula::Pred { .. } | Formula::Eq(..) => {}
    }
}

/// Is `a` closed under the direct connections of `theory`?
pub fn is_connectively_closed(a: &ArgPosSet, theory: &Theory) -> bool {
    for (p, q) in connectivity_pairs(theory) {
        if a.contains(&p) != a.contains(&q) {
            return false;
        }
    }
    true
}

/// The partition of all argument positions into minimal connectively
/// closed sets. Blocks are ordered by their smallest member; every
/// union of blocks is closed, and no proper nonempty subset of a block
/// is.
pub fn closed_partition(vocab: &Vocabulary, theory: &Theory) -> Vec<ArgPosSet> {
    let universe: Vec<ArgPos> = all_positions(vocab, theory).into_iter().collect();
    let index: BTreeMap<&ArgPos, usize> = universe.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let mut uf = UnionFind::new(universe.len());
    for (p, q) in connectivity_pairs(theory) {
        // Positions outside the universe cannot arise: the vocabulary
        // covers all symbols and `all_positions` collected the binders.
        let (i, j) = (index[&p], index[&q]);
        uf.union(i, j);
    }
    uf.sets()
        .into_iter()
        .map(|set| set.into_iter().map(|i| universe[i].clone()).collect())
        .collect()
}

/// Positions of `a` over symbols the structure interprets or could
/// interpret, dropping variable positions: the user-facing view.
pub fn without_variables(a: &ArgPosSet, vocab: &Vocabulary) -> ArgPosSet {
    a.iter().filter(|p| vocab.get(&p.symbol).is_some()).cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testfix::coloring;

    fn pos(s: &str) -> ArgPos {
        ArgPos::parse(s).unwrap()
    }

    fn set(items: &[&str]) -> ArgPosSet {
        items.iter().map(|s| pos(s)).collect()
    }

    #[test]
    fn display_and_parse_round_trip() {
        let p = pos("Edge|2");
        assert_eq!(p.to_string(), "Edge|2");
        assert_eq!(ArgPos::parse("Edge|2"), Some(p));
        assert_eq!(ArgPos::parse("Edge"), None);
        assert_eq!(ArgPos::parse("|1"), None);
    }

    #[test]
    fn connections_of_the_running_example() {
        let p = coloring();
        let pairs = connectivity_pairs(&p.theory);
        let want = [
            (pos("x1|0"), pos("Edge|1")),
            (pos("y1|0"), pos("Edge|2")),
            (pos("Color|0"), pos("Color|0")),
            (pos("x1|0"), pos("Color|1")),
            (pos("y1|0"), pos("Color|1")),
            (pos("x2|0"), pos("Edge|1")),
            (pos("x2|0"), pos("V|1")),
            (pos("y2|0"), pos("V|1")),
            (pos("Color|0"), pos("C|1")),
            (pos("x3|0"), pos("Color|1")),
        ];
        for w in &want {
            assert!(pairs.contains(w), "missing {w:?}");
        }
        assert_eq!(pairs.len(), 11);
    }

    #[test]
    fn partition_of_the_running_example() {
        let p = coloring();
        let blocks = closed_partition(&p.vocab, &p.theory);
        assert_eq!(blocks.len(), 2);
        assert_eq!(blocks[0], set(&["C|1", "Color|0"]));
        assert_eq!(
            blocks[1],
            set(&["Color|1", "Edge|1", "Edge|2", "V|1", "x1|0", "y1|0", "x2|0", "y2|0", "x3|0"])
        );
        for b in &blocks {
            assert!(is_connectively_closed(b, &p.theory));
        }
        // Unions of blocks stay closed.
        let both: ArgPosSet = blocks[0].union(&blocks[1]).cloned().collect();
        assert!(is_connectively_closed(&both, &p.theory));
    }

    #[test]
    fn vertex_block_without_variable_positions_is_not_closed() {
        let p = coloring();
        let b = set(&["Edge|1", "Edge|2", "Color|1", "x1|0", "y1|0", "x3|0"]);
        assert!(!is_connectively_closed(&b, &p.theory));
    }

    #[test]
    fn equality_connects_both_heads() {
        let src = "
vocab { func f/0 output  func g/0 output  pred P/1 output }
domain = { a }
theory { f = g. }
structure { }
";
        let p = crate::fo::parse_problem(src).unwrap();
        let pairs = connectivity_pairs(&p.theory);
        assert_eq!(pairs, vec![(pos("f|0"), pos("g|0"))]);
        let blocks = closed_partition(&p.vocab, &p.theory);
        assert!(blocks.contains(&set(&["f|0", "g|0"])));
        // P never occurs: its position is its own minimal block.
        assert!(blocks.contains(&set(&["P|1"])));
    }

    #[test]
    fn report_view_suppresses_variables() {
        let p = coloring();
        let blocks = closed_partition(&p.vocab, &p.theory);
        let visible = without_variables(&blocks[1], &p.vocab);
        assert_eq!(visible, set(&["Color|1", "Edge|1", "Edge|2", "V|1"]));
    }
}
