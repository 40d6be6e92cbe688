//! Lex-leader symmetry breaking constraints over the ground atoms.
//!
//! A detected symmetry acts on ground output atoms by permuting the
//! domain elements sitting at its argument positions. The breaker
//! orders the atoms it can move and asserts that a solution is no
//! lex-greater than its image, with false before true, so each
//! surviving solution is a lex-least representative of a part of its
//! orbit. For a block of interchangeable elements, constraints for the
//! consecutive transpositions in the domain order make the breaking
//! complete whenever the position set holds at most one argument
//! position per output symbol.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::Range;

use thiserror::Error;

use crate::argpos::{ArgPos, ArgPosSet};
use crate::fo::{ElemId, Problem, SymbolIo};
use crate::ground::{lit, AtomCatalog, Cnf, GroundAtom, Lit, Var};
use crate::transform::{DomainPermutation, InducedTransform};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BreakError {
    #[error("the transformation moves atoms outside the order")]
    OrderMismatch,
    #[error("interchangeable block is not sorted by the domain order")]
    UnsortedBlock,
}

/// The ground output atoms a position set can move, in the global
/// catalog order: output symbols by declaration, tuples rank-lex.
/// Structures are compared by this sequence with false before true,
/// so the all-false prefix is the lex-least.
#[derive(Debug)]
pub struct GroundAtomOrder {
    atoms: Vec<(Var, GroundAtom)>,
}

impl GroundAtomOrder {
    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Var, &GroundAtom)> {
        self.atoms.iter().map(|(v, a)| (*v, a))
    }

    /// The projection onto the ordered atoms' variables.
    pub fn vars(&self) -> Vec<Var> {
        self.atoms.iter().map(|(v, _)| *v).collect()
    }
}

/// Atoms of output symbols with at least one argument position in `a`.
/// Atoms of other symbols cannot change truth under any induced
/// transformation over `a` and stay out of the order.
pub fn atom_order(p: &Problem, cat: &AtomCatalog, a: &ArgPosSet) -> GroundAtomOrder {
    let movable: BTreeSet<&str> = p
        .vocab
        .outputs()
        .filter(|s| a.iter().any(|pos| pos.symbol == s.name))
        .map(|s| s.name.as_str())
        .collect();
    let atoms =
        cat.iter().filter(|(_, atom)| movable.contains(atom.symbol.as_str())).map(|(v, a)| (v, a.clone())).collect();
    GroundAtomOrder { atoms }
}

/// At most one argument position per output symbol in `a`; positions
/// over input symbols, copies, and variables do not count. Under this
/// condition consecutive-transposition breaking is complete.
pub fn completeness_condition(a: &ArgPosSet, p: &Problem) -> bool {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for pos in a {
        if let Some(sym) = p.vocab.get(&pos.symbol) {
            if sym.io == SymbolIo::Output {
                *counts.entry(pos.symbol.as_str()).or_insert(0) += 1;
            }
        }
    }
    counts.values().all(|&c| c <= 1)
}

/// Clauses forcing a solution to be lex-no-greater than its image
/// under one symmetry. `aux` is the range of fresh prefix-equality
/// variables the encoding allocated in the target CNF.
#[derive(Debug)]
pub struct LexLeaderConstraint {
    pub sigma: InducedTransform,
    pub clauses: Vec<Vec<Lit>>,
    pub aux: Range<Var>,
}

/// Appends the lex-leader encoding of `sigma` over `order` to `cnf`.
///
/// Positions the symmetry fixes are skipped, as is the later half of
/// a swapped atom pair: once the earlier half compares equal the later
/// one is equal by itself. `cap` truncates the chain to the order's
/// first `cap` atoms, which weakens the constraint but keeps it sound.
pub fn lex_leader(
    sigma: &InducedTransform,
    order: &GroundAtomOrder,
    cat: &AtomCatalog,
    cnf: &mut Cnf,
    cap: Option<usize>,
) -> Result<LexLeaderConstraint, BreakError> {
    let in_order: BTreeSet<Var> = order.atoms.iter().map(|(v, _)| *v).collect();
    // Every atom the symmetry moves must be comparable, and within the
    // order the image must be a permutation.
    let mut images = Vec::with_capacity(order.len());
    for (v, atom) in cat.iter() {
        let img = cat.var(&atom_image(sigma, atom)).ok_or(BreakError::OrderMismatch)?;
        if img != v && !in_order.contains(&v) {
            return Err(BreakError::OrderMismatch);
        }
        if in_order.contains(&v) {
            if !in_order.contains(&img) {
                return Err(BreakError::OrderMismatch);
            }
            images.push((v, img));
        }
    }
    {
        let mut sorted: Vec<Var> = images.iter().map(|&(_, img)| img).collect();
        sorted.sort_unstable();
        if sorted != images.iter().map(|&(v, _)| v).collect::<Vec<_>>() {
            return Err(BreakError::OrderMismatch);
        }
    }

    let cap = cap.unwrap_or(usize::MAX);
    let mut active: Vec<(Var, Var)> = Vec::new();
    let mut seen: BTreeSet<(Var, Var)> = BTreeSet::new();
    for (i, &(v, img)) in images.iter().enumerate() {
        if img == v || i >= cap || seen.contains(&(img, v)) {
            continue;
        }
        seen.insert((v, img));
        active.push((v, img));
    }

    let mut constraint = LexLeaderConstraint {
        sigma: sigma.clone(),
        clauses: Vec::new(),
        aux: cnf.num_vars + 1..cnf.num_vars + 1,
    };
    let mut push = |cnf: &mut Cnf, c: Vec<Lit>| {
        constraint.clauses.push(c.clone());
        cnf.add_clause(c);
    };
    let mut prev: Option<Var> = None;
    for (k, &(v, img)) in active.iter().enumerate() {
        let (a, b) = (lit(v, true), lit(img, true));
        match prev {
            None => push(cnf, vec![-a, b]),
            Some(e) => push(cnf, vec![lit(e, false), -a, b]),
        }
        if k + 1 == active.len() {
            break;
        }
        // e' holds exactly when the compared prefix through this
        // position is equal; both implication directions are encoded.
        let e2 = lit(cnf.new_var(), true);
        match prev {
            None => {
                push(cnf, vec![-e2, -a, b]);
                push(cnf, vec![-e2, a, -b]);
                push(cnf, vec![e2, -a, -b]);
                push(cnf, vec![e2, a, b]);
            }
            Some(e) => {
                let e = lit(e, true);
                push(cnf, vec![-e2, e]);
                push(cnf, vec![-e2, -a, b]);
                push(cnf, vec![-e2, a, -b]);
                push(cnf, vec![e2, -e, -a, -b]);
                push(cnf, vec![e2, -e, a, b]);
            }
        }
        prev = Some(e2 as Var);
    }
    constraint.aux.end = cnf.num_vars + 1;
    Ok(constraint)
}

/// The image of a ground atom: components at `sigma`'s argument
/// positions go through the permutation, everything else stays.
fn atom_image(sigma: &InducedTransform, atom: &GroundAtom) -> GroundAtom {
    let args = atom
        .args
        .iter()
        .enumerate()
        .map(|(i, &e)| {
            if sigma.positions.contains(&ArgPos::new(&atom.symbol, i + 1)) {
                sigma.perm.apply(e)
            } else {
                e
            }
        })
        .collect();
    let value = atom.value.map(|e| {
        if sigma.positions.contains(&ArgPos::new(&atom.symbol, 0)) {
            sigma.perm.apply(e)
        } else {
            e
        }
    });
    GroundAtom { symbol: atom.symbol.clone(), args, value }
}

#[derive(Debug)]
pub struct InterchangeBreaking {
    pub constraints: Vec<LexLeaderConstraint>,
    /// Whether the constraints cut every orbit of the block's full
    /// symmetric group down to one survivor.
    pub complete: bool,
}

/// One lex-leader per consecutive transposition of the block, in the
/// domain order. `delta` must be sorted by that order.
#[allow(clippy::too_many_arguments)]
pub fn break_interchangeable(
    delta: &[ElemId],
    a: &ArgPosSet,
    p: &Problem,
    order: &GroundAtomOrder,
    cat: &AtomCatalog,
    cnf: &mut Cnf,
    cap: Option<usize>,
) -> Result<InterchangeBreaking, BreakError> {
    let d = p.domain();
    if delta.windows(2).any(|w| d.rank(w[0]) >= d.rank(w[1])) {
        return Err(BreakError::UnsortedBlock);
    }
    let mut constraints = Vec::with_capacity(delta.len().saturating_sub(1));
    for w in delta.windows(2) {
        let perm = DomainPermutation::transposition(d.size(), w[0], w[1]);
        let sigma = InducedTransform::new(a.clone(), perm);
        constraints.push(lex_leader(&sigma, order, cat, cnf, cap)?);
    }
    Ok(InterchangeBreaking { constraints, complete: completeness_condition(a, p) })
}

/// Partial breaking: one lex-leader per generator.
pub fn break_generators(
    gens: &[DomainPermutation],
    a: &ArgPosSet,
    order: &GroundAtomOrder,
    cat: &AtomCatalog,
    cnf: &mut Cnf,
    cap: Option<usize>,
) -> Result<Vec<LexLeaderConstraint>, BreakError> {
    gens.iter()
        .map(|g| lex_leader(&InducedTransform::new(a.clone(), g.clone()), order, cat, cnf, cap))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fo::parse_problem;
    use crate::ground::ground_theory;
    use crate::solve::count_models;
    use crate::testfix::coloring;

    fn pos(s: &str) -> ArgPos {
        ArgPos::parse(s).unwrap()
    }

    fn posset(items: &[&str]) -> ArgPosSet {
        items.iter().map(|s| pos(s)).collect()
    }

    /// Output P/1 over three interchangeable elements; every subset of
    /// P is a solution.
    fn free_pred() -> Problem {
        parse_problem(
            "vocab { pred P/1 output }\n\
             domain = { a b c }\n\
             theory { ! x: P(x) | ~ P(x). }\n\
             structure { }",
        )
        .unwrap()
    }

    #[test]
    fn the_running_example_orders_every_graph_atom() {
        let p = coloring();
        let cat = AtomCatalog::new(&p);
        let order = atom_order(&p, &cat, &posset(&["C#1|1", "Color|0"]));
        assert_eq!(order.len(), 49);
        let empty = atom_order(&p, &cat, &ArgPosSet::new());
        assert!(empty.is_empty());
    }

    #[test]
    fn a_unary_predicate_orders_by_rank() {
        let p = free_pred();
        let cat = AtomCatalog::new(&p);
        let order = atom_order(&p, &cat, &posset(&["P|1"]));
        let labels: Vec<String> =
            order.iter().map(|(_, a)| a.label(p.domain())).collect();
        assert_eq!(labels, ["P(a)", "P(b)", "P(c)"]);
    }

    #[test]
    fn the_identity_breaks_nothing() {
        let p = free_pred();
        let (mut cnf, cat) = ground_theory(&p).unwrap();
        let order = atom_order(&p, &cat, &posset(&["P|1"]));
        let sigma =
            InducedTransform::new(posset(&["P|1"]), DomainPermutation::identity(3));
        let c = lex_leader(&sigma, &order, &cat, &mut cnf, None).unwrap();
        assert!(c.clauses.is_empty());
        assert!(c.aux.is_empty());
    }

    #[test]
    fn a_two_atom_swap_gives_one_clause() {
        let p = parse_problem(
            "vocab { pred P/1 output }\n\
             domain = { a b }\n\
             theory { ! x: P(x) | ~ P(x). }\n\
             structure { }",
        )
        .unwrap();
        let (mut cnf, cat) = ground_theory(&p).unwrap();
        let order = atom_order(&p, &cat, &posset(&["P|1"]));
        let d = p.domain();
        let swap = DomainPermutation::transposition(2, d.id("a").unwrap(), d.id("b").unwrap());
        let sigma = InducedTransform::new(posset(&["P|1"]), swap);
        let c = lex_leader(&sigma, &order, &cat, &mut cnf, None).unwrap();
        assert_eq!(c.clauses, vec![vec![-1, 2]]);
        assert!(c.aux.is_empty());
        // Of the four assignments exactly P(a)=1, P(b)=0 dies.
        let survivors: Vec<Vec<bool>> = (0..4u8)
            .map(|bits| vec![bits & 1 == 1, bits & 2 == 2])
            .filter(|m| cnf.eval(m))
            .collect();
        assert_eq!(survivors.len(), 3);
        assert!(!survivors.contains(&vec![true, false]));
    }

    #[test]
    fn moved_atoms_outside_the_order_are_rejected() {
        let p = parse_problem(
            "vocab { pred P/1 output pred Q/1 output }\n\
             domain = { a b }\n\
             theory { ! x: P(x) | ~ P(x). }\n\
             structure { }",
        )
        .unwrap();
        let (mut cnf, cat) = ground_theory(&p).unwrap();
        let order = atom_order(&p, &cat, &posset(&["P|1"]));
        let d = p.domain();
        let swap = DomainPermutation::transposition(2, d.id("a").unwrap(), d.id("b").unwrap());
        let sigma = InducedTransform::new(posset(&["Q|1"]), swap);
        let err = lex_leader(&sigma, &order, &cat, &mut cnf, None).unwrap_err();
        assert_eq!(err, BreakError::OrderMismatch);
    }

    #[test]
    fn the_color_swap_halves_the_model_count() {
        let p = coloring();
        let (mut cnf, cat) = ground_theory(&p).unwrap();
        let a = posset(&["C#1|1", "Color|0"]);
        let order = atom_order(&p, &cat, &a);
        let d = p.domain();
        let swap =
            DomainPermutation::transposition(7, d.id("r").unwrap(), d.id("g").unwrap());
        let sigma = InducedTransform::new(a, swap);
        let c = lex_leader(&sigma, &order, &cat, &mut cnf, None).unwrap();
        // Seven moved pairs, one active position each, aux for all but
        // the last.
        assert_eq!(c.aux.len(), 6);
        let projection = order.vars();
        assert_eq!(count_models(&cnf, &projection, 1000), Ok(243));
    }

    #[test]
    fn capping_weakens_but_stays_sound() {
        let p = coloring();
        let (mut cnf, cat) = ground_theory(&p).unwrap();
        let a = posset(&["C#1|1", "Color|0"]);
        let order = atom_order(&p, &cat, &a);
        let d = p.domain();
        let swap =
            DomainPermutation::transposition(7, d.id("r").unwrap(), d.id("g").unwrap());
        let sigma = InducedTransform::new(a, swap);
        // Only the order prefix through the first moved pair remains:
        // a single unchained clause on Color(t).
        let c = lex_leader(&sigma, &order, &cat, &mut cnf, Some(6)).unwrap();
        assert_eq!(c.clauses.len(), 1);
        assert_eq!(count_models(&cnf, &order.vars(), 1000), Ok(324));
    }

    #[test]
    fn consecutive_swaps_break_the_color_group_completely() {
        let p = coloring();
        let (mut cnf, cat) = ground_theory(&p).unwrap();
        let a = posset(&["C#1|1", "Color|0"]);
        let order = atom_order(&p, &cat, &a);
        let d = p.domain();
        let delta = vec![d.id("r").unwrap(), d.id("g").unwrap(), d.id("b").unwrap()];
        let br =
            break_interchangeable(&delta, &a, &p, &order, &cat, &mut cnf, None).unwrap();
        assert_eq!(br.constraints.len(), 2);
        assert!(br.complete);
        assert_eq!(count_models(&cnf, &order.vars(), 1000), Ok(81));
    }

    #[test]
    fn skew_generators_leave_extra_survivors() {
        // Eight subsets of P fall into four orbits under full
        // interchange of {a, b, c}. Consecutive transpositions leave
        // one survivor each; the star {(a b), (a c)} leaves five.
        let p = free_pred();
        let a = posset(&["P|1"]);
        let d = p.domain();
        let (ea, eb, ec) = (d.id("a").unwrap(), d.id("b").unwrap(), d.id("c").unwrap());

        let (mut cnf, cat) = ground_theory(&p).unwrap();
        let order = atom_order(&p, &cat, &a);
        let br = break_interchangeable(&[ea, eb, ec], &a, &p, &order, &cat, &mut cnf, None)
            .unwrap();
        assert!(br.complete);
        assert_eq!(count_models(&cnf, &order.vars(), 100), Ok(4));

        let (mut cnf, cat) = ground_theory(&p).unwrap();
        let order = atom_order(&p, &cat, &a);
        let star = [
            DomainPermutation::transposition(3, ea, eb),
            DomainPermutation::transposition(3, ea, ec),
        ];
        break_generators(&star, &a, &order, &cat, &mut cnf, None).unwrap();
        assert_eq!(count_models(&cnf, &order.vars(), 100), Ok(5));
    }

    #[test]
    fn unsorted_blocks_are_rejected() {
        let p = free_pred();
        let a = posset(&["P|1"]);
        let (mut cnf, cat) = ground_theory(&p).unwrap();
        let order = atom_order(&p, &cat, &a);
        let d = p.domain();
        let delta = vec![d.id("b").unwrap(), d.id("a").unwrap()];
        let err = break_interchangeable(&delta, &a, &p, &order, &cat, &mut cnf, None)
            .unwrap_err();
        assert_eq!(err, BreakError::UnsortedBlock);
    }

    #[test]
    fn completeness_needs_at_most_one_position_per_output_symbol() {
        let p = coloring();
        assert!(completeness_condition(&posset(&["C#1|1", "Color|0"]), &p));
        assert!(!completeness_condition(&posset(&["Color|0", "Color|1"]), &p));
        assert!(completeness_condition(&posset(&["C#1|1", "Edge#1|1", "x1|0"]), &p));
    }
}
