//! Canonical printer.
//!
//! The output is valid problem source and is canonical: structurally
//! equal problems print byte-identically, and parsing printed output
//! reproduces the problem exactly. The one exception is decomposed
//! problems: their generated `S#k` names use the reserved separator,
//! so their printout is for inspection and will not reparse. Tuples are listed in rank order,
//! structure entries in declaration order, and the element order
//! section is always printed. Negated equalities print as `~=`,
//! quantifier chains are collapsed, and parentheses follow connective
//! precedence (quantified operands are always parenthesized).

use std::fmt::Write;

use super::ast::{Formula, SymbolIo, SymbolKind, Term, Theory, Vocabulary};
use super::structure::{Domain, Structure};
use super::Problem;

pub fn print_problem(p: &Problem) -> String {
    let mut out = String::new();
    print_vocab(&mut out, &p.vocab);
    print_domain(&mut out, p.input.domain());
    print_theory_block(&mut out, &p.theory);
    print_structure(&mut out, &p.vocab, &p.input);
    print_order(&mut out, p.input.domain());
    out
}

pub fn print_vocab(out: &mut String, vocab: &Vocabulary) {
    out.push_str("vocab {\n");
    for s in vocab.iter() {
        let kind = match s.kind {
            SymbolKind::Pred => "pred",
            SymbolKind::Func => "func",
        };
        let io = match s.io {
            SymbolIo::Input => "input",
            SymbolIo::Output => "output",
        };
        writeln!(out, "  {kind} {}/{} {io}", s.name, s.arity).unwrap();
    }
    out.push_str("}\n");
}

pub fn print_domain(out: &mut String, domain: &Domain) {
    out.push_str("domain = {");
    for e in domain.elems() {
        out.push(' ');
        out.push_str(domain.name(e));
    }
    out.push_str(" }\n");
}

pub fn print_order(out: &mut String, domain: &Domain) {
    out.push_str("order = {");
    for &e in domain.elems_ordered() {
        out.push(' ');
        out.push_str(domain.name(e));
    }
    out.push_str(" }\n");
}

pub fn print_theory_block(out: &mut String, theory: &Theory) {
    out.push_str("theory {\n");
    for s in &theory.sentences {
        out.push_str("  ");
        out.push_str(&print_formula(s));
        out.push_str(".\n");
    }
    out.push_str("}\n");
}

/// Structure entries for the symbols `s` interprets, in declaration
/// order. Empty relations are omitted; parsing restores them. Input
/// structures interpret input symbols only, so printing a problem is
/// unaffected by any output interpretations a caller pasted in.
pub fn print_structure(out: &mut String, vocab: &Vocabulary, s: &Structure) {
    let domain = s.domain();
    out.push_str("structure {\n");
    for sym in vocab.iter() {
        match sym.kind {
            SymbolKind::Pred => {
                let rel = match s.rel(&sym.name) {
                    Some(r) if !r.is_empty() => r,
                    _ => continue,
                };
                let mut tuples: Vec<&Vec<u32>> = rel.iter().collect();
                tuples.sort_by(|a, b| domain.cmp_tuples(a, b));
                write!(out, "  {} = {{", sym.name).unwrap();
                for t in tuples {
                    out.push(' ');
                    print_tuple(out, domain, t);
                }
                out.push_str(" }\n");
            }
            SymbolKind::Func => {
                let graph = match s.func(&sym.name) {
                    Some(g) => g,
                    None => continue,
                };
                let mut entries: Vec<(&Vec<u32>, u32)> = graph.iter().map(|(t, &v)| (t, v)).collect();
                entries.sort_by(|a, b| domain.cmp_tuples(a.0, b.0));
                write!(out, "  {} = {{", sym.name).unwrap();
                for (t, v) in entries {
                    out.push(' ');
                    if t.len() == 1 {
                        out.push_str(domain.name(t[0]));
                    } else {
                        print_parens_tuple(out, domain, t);
                    }
                    write!(out, " -> {}", domain.name(v)).unwrap();
                }
                out.push_str(" }\n");
            }
        }
    }
    out.push_str("}\n");
}

fn print_tuple(out: &mut String, domain: &Domain, t: &[u32]) {
    if t.len() == 1 {
        out.push_str(domain.name(t[0]));
    } else {
        print_parens_tuple(out, domain, t);
    }
}

fn print_parens_tuple(out: &mut String, domain: &Domain, t: &[u32]) {
    out.push('(');
    for (i, &e) in t.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(domain.name(e));
    }
    out.push(')');
}

// Precedence levels, loosest first. A child is parenthesized when its
// own level is below the level its context requires.
const LVL_IFF: u8 = 1;
const LVL_IMPLIES: u8 = 2;
const LVL_OR: u8 = 3;
const LVL_AND: u8 = 4;
const LVL_NOT: u8 = 5;
const LVL_ATOM: u8 = 6;

pub fn print_formula(f: &Formula) -> String {
    let mut out = String::new();
    fmt_formula(&mut out, f, 0);
    out
}

fn level(f: &Formula) -> u8 {
    match f {
        Formula::Forall(..) | Formula::Exists(..) => 0,
        Formula::Iff(..) => LVL_IFF,
        Formula::Implies(..) => LVL_IMPLIES,
        Formula::Or(..) => LVL_OR,
        Formula::And(..) => LVL_AND,
        Formula::Not(inner) => match inner.as_ref() {
            Formula::Eq(..) => LVL_ATOM, // prints as ~=
            _ => LVL_NOT,
        },
        Formula::Pred { .. } | Formula::Eq(..) => LVL_ATOM,
    }
}

fn fmt_formula(out: &mut String, f: &Formula, min_level: u8) {
    if level(f) < min_level {
        out.push('(');
        fmt_formula(out, f, 0);
        out.push(')');
        return;
    }
    match f {
        Formula::Forall(..) | Formula::Exists(..) => {
            let marker = if matches!(f, Formula::Forall(..)) { '!' } else { '?' };
            out.push(marker);
            // Collapse a chain of like quantifiers into one binder list.
            let mut cur = f;
            loop {
                let (v, g) = match cur {
                    Formula::Forall(v, g) if marker == '!' => (v, g),
                    Formula::Exists(v, g) if marker == '?' => (v, g),
                    _ => break,
                };
                out.push(' ');
                out.push_str(v);
                cur = g.as_ref();
            }
            out.push_str(": ");
            fmt_formula(out, cur, 0);
        }
        Formula::Iff(a, b) => {
            fmt_formula(out, a, LVL_IFF);
            out.push_str(" <=> ");
            fmt_formula(out, b, LVL_IFF + 1);
        }
        Formula::Implies(a, b) => {
            fmt_formula(out, a, LVL_IMPLIES + 1);
            out.push_str(" => ");
            fmt_formula(out, b, LVL_IMPLIES);
        }
        Formula::Or(a, b) => {
            fmt_formula(out, a, LVL_OR);
            out.push_str(" | ");
            fmt_formula(out, b, LVL_OR + 1);
        }
        Formula::And(a, b) => {
            fmt_formula(out, a, LVL_AND);
            out.push_str(" & ");
            fmt_formula(out, b, LVL_AND + 1);
        }
        Formula::Not(inner) => match inner.as_ref() {
            Formula::Eq(a, b) => {
                write!(out, "{} ~= {}", print_term(a), print_term(b)).unwrap();
            }
            _ => {
                out.push('~');
                fmt_formula(out, inner, LVL_NOT);
            }
        },
        Formula::Eq(a, b) => {
            write!(out, "{} = {}", print_term(a), print_term(b)).unwrap();
        }
        Formula::Pred { sym, args } => {
            out.push_str(sym);
            fmt_args(out, args);
        }
    }
}

pub fn print_term(t: &Term) -> String {
    let mut out = String::new();
    fmt_term(&mut out, t);
    out
}

fn fmt_term(out: &mut String, t: &Term) {
    match t {
        Term::Var(v) => out.push_str(v),
        Term::App { sym, args } => {
            out.push_str(sym);
            fmt_args(out, args);
        }
    }
}

fn fmt_args(out: &mut String, args: &[Term]) {
    if args.is_empty() {
        return;
    }
    out.push('(');
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        fmt_term(out, a);
    }
    out.push(')');
}
