//! Brute-force enumeration of output structures.
//!
//! Walks every interpretation of the output vocabulary over the
//! problem's domain: each predicate tuple is a binary choice, each
//! function input tuple picks one of |D| values. The stream is
//! deterministic: choices advance odometer-style, rightmost slot
//! fastest, with slots laid out per output symbol in declaration order
//! and per tuple in rank order. This is the reference oracle the
//! symmetry machinery is validated against, so it favors clarity over
//! speed.

use std::sync::Arc;

use thiserror::Error;

use super::ast::{SymbolKind, Vocabulary};
use super::structure::{FuncGraph, Relation, Structure, Tuple};
use super::Problem;

/// Default cap on the number of enumerated structures.
pub const ENUM_BUDGET_DEFAULT: u64 = 1 << 24;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EnumError {
    #[error("expansion space has {space} structures, over the budget of {budget}")]
    Budget { space: u128, budget: u64 },
}

#[derive(Debug)]
enum Slot {
    /// Membership of one tuple in one output predicate.
    Rel { sym: usize, tuple: Tuple },
    /// Value of one output function on one input tuple, as a rank index.
    Func { sym: usize, tuple: Tuple },
}

#[derive(Debug)]
pub struct ExpansionIter {
    domain: Arc<super::structure::Domain>,
    /// Output symbol names with their kind, declaration order.
    symbols: Vec<(String, SymbolKind)>,
    slots: Vec<Slot>,
    counters: Vec<u32>,
    radix: Vec<u32>,
    done: bool,
    started: bool,
}

/// Total number of output structures for `p`, without enumerating.
pub fn expansion_count(p: &Problem) -> u128 {
    space_size(&p.vocab, p.input.domain().size())
}

fn space_size(vocab: &Vocabulary, dsize: usize) -> u128 {
    let mut total: u128 = 1;
    for s in vocab.outputs() {
        let tuples = sat_pow(dsize as u128, s.arity as u128);
        let per = match s.kind {
            SymbolKind::Pred => sat_pow(2, tuples),
            SymbolKind::Func => sat_pow(dsize as u128, tuples),
        };
        total = total.saturating_mul(per);
    }
    total
}

fn sat_pow(base: u128, exp: u128) -> u128 {
    if base <= 1 {
        return base.max(1);
    }
    if exp >= 128 {
        return u128::MAX;
    }
    let mut r: u128 = 1;
    for _ in 0..exp {
        r = r.saturating_mul(base);
    }
    r
}

/// Stream of every output structure, smallest-budget guard included.
pub fn enumerate_expansions(p: &Problem, budget: u64) -> Result<ExpansionIter, EnumError> {
    let dsize = p.input.domain().size();
    let space = space_size(&p.vocab, dsize);
    if space > budget as u128 {
        return Err(EnumError::Budget { space, budget });
    }
    let mut slots = Vec::new();
    let mut radix = Vec::new();
    let mut symbols = Vec::new();
    for s in p.vocab.outputs() {
        let sym_ix = symbols.len();
        symbols.push((s.name.clone(), s.kind));
        for tuple in p.input.domain().tuples(s.arity) {
            match s.kind {
                SymbolKind::Pred => {
                    slots.push(Slot::Rel { sym: sym_ix, tuple });
                    radix.push(2);
                }
                SymbolKind::Func => {
                    slots.push(Slot::Func { sym: sym_ix, tuple });
                    radix.push(dsize as u32);
                }
            }
        }
    }
    let counters = vec![0; slots.len()];
    Ok(ExpansionIter {
        domain: p.input.domain().clone(),
        symbols,
        slots,
        counters,
        radix,
        done: false,
        started: false,
    })
}

impl Iterator for ExpansionIter {
    type Item = Structure;

    fn next(&mut self) -> Option<Structure> {
        if self.done {
            return None;
        }
        if self.started {
            let mut i = self.counters.len();
            loop {
                if i == 0 {
                    self.done = true;
                    return None;
                }
                i -= 1;
                self.counters[i] += 1;
                if self.counters[i] < self.radix[i] {
                    break;
                }
                self.counters[i] = 0;
            }
        }
        self.started = true;

        enum Interp {
            Rel(Relation),
            Func(FuncGraph),
        }
        let mut interps: Vec<Interp> = self
            .symbols
            .iter()
            .map(|(_, kind)| match kind {
                SymbolKind::Pred => Interp::Rel(Relation::new()),
                SymbolKind::Func => Interp::Func(FuncGraph::new()),
            })
            .collect();
        for (slot, &c) in self.slots.iter().zip(&self.counters) {
            match slot {
                Slot::Rel { sym, tuple } => {
                    if c == 1 {
                        if let Interp::Rel(r) = &mut interps[*sym] {
                            r.insert(tuple.clone());
                        }
                    }
                }
                Slot::Func { sym, tuple } => {
                    let value = self.domain.elems_ordered()[c as usize];
                    if let Interp::Func(g) = &mut interps[*sym] {
                        g.insert(tuple.clone(), value);
                    }
                }
            }
        }
        let mut out = Structure::new(self.domain.clone());
        for ((name, _), interp) in self.symbols.iter().zip(interps) {
            match interp {
                Interp::Rel(r) => out.set_rel(name, Arc::new(r)).unwrap(),
                Interp::Func(g) => out.set_func(name, Arc::new(g)).unwrap(),
            }
        }
        Some(out)
    }
}
