//! Renaming bound variables apart.
//!
//! Every binder in the output binds a name that no other binder in the
//! theory uses and that no symbol occurring in the theory shares. A
//! name bound exactly once is kept, so the transformation is
//! idempotent. A name bound `n > 1` times has its occurrences numbered
//! in traversal order: sentence by sentence, outer binders first.

use std::collections::{HashMap, HashSet};

use super::ast::{Formula, Term, Theory};

pub fn rename_apart(theory: &Theory) -> Theory {
    let mut binder_count: HashMap<String, usize> = HashMap::new();
    let mut avoid: HashSet<String> = HashSet::new();
    for s in &theory.sentences {
        collect(s, &mut binder_count, &mut avoid);
    }
    // Names bound once stay; they must not be reused for fresh names.
    for (name, n) in &binder_count {
        if *n == 1 {
            avoid.insert(name.clone());
        }
    }
    let mut ren = Renamer { binder_count, avoid, suffix: HashMap::new() };
    let sentences = theory.sentences.iter().map(|s| ren.formula(s, &mut Vec::new())).collect();
    Theory::new(sentences)
}

fn collect(f: &Formula, binders: &mut HashMap<String, usize>, heads: &mut HashSet<String>) {
    match f {
        Formula::Pred { sym, args } => {
            heads.insert(sym.clone());
            for t in args {
                collect_term(t, heads);
            }
        }
        Formula::Eq(a, b) => {
            collect_term(a, heads);
            collect_term(b, heads);
        }
        Formula::Not(g) => collect(g, binders, heads),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            collect(a, binders, heads);
            collect(b, binders, heads);
        }
        Formula::Forall(v, g) | Formula::Exists(v, g) => {
            *binders.entry(v.clone()).or_insert(0) += 1;
            collect(g, binders, heads);
        }
    }
}

fn collect_term(t: &Term, heads: &mut HashSet<String>) {
    if let Term::App { sym, args } = t {
        heads.insert(sym.clone());
        for a in args {
            collect_term(a, heads);
        }
    }
}

struct Renamer {
    binder_count: HashMap<String, usize>,
    avoid: HashSet<String>,
    suffix: HashMap<String, usize>,
}

impl Renamer {
    fn fresh(&mut self, base: &str) -> String {
        let k = self.suffix.entry(base.to_string()).or_insert(0);
        loop {
            *k += 1;
            let cand = format!("{base}{k}");
            if self.avoid.insert(cand.clone()) {
                return cand;
            }
        }
    }

    fn formula(&mut self, f: &Formula, scope: &mut Vec<(String, String)>) -> Formula {
        match f {
            Formula::Pred { sym, args } => Formula::Pred {
                sym: sym.clone(),
                args: args.iter().map(|t| rewrite_term(t, scope)).collect(),
            },
            Formula::Eq(a, b) => Formula::Eq(rewrite_term(a, scope), rewrite_term(b, scope)),
            Formula::Not(g) => Formula::not(self.formula(g, scope)),
            Formula::And(a, b) => Formula::and(self.formula(a, scope), self.formula(b, scope)),
            Formula::Or(a, b) => Formula::or(self.formula(a, scope), self.formula(b, scope)),
            Formula::Implies(a, b) => Formula::implies(self.formula(a, scope), self.formula(b, scope)),
            Formula::Iff(a, b) => Formula::iff(self.formula(a, scope), self.formula(b, scope)),
            Formula::Forall(v, g) | Formula::Exists(v, g) => {
                let new = if self.binder_count[v] == 1 { v.clone() } else { self.fresh(v) };
                scope.push((v.clone(), new.clone()));
                let body = self.formula(g, scope);
                scope.pop();
                match f {
                    Formula::Forall(..) => Formula::forall(&new, body),
                    _ => Formula::exists(&new, body),
                }
            }
        }
    }
}

fn rewrite_term(t: &Term, scope: &[(String, String)]) -> Term {
    match t {
        Term::Var(v) => {
            // Innermost binding wins under shadowing.
            for (old, new) in scope.iter().rev() {
                if old == v {
                    return Term::Var(new.clone());
                }
            }
            Term::Var(v.clone())
        }
        Term::App { sym, args } => Term::App {
            sym: sym.clone(),
            args: args.iter().map(|a| rewrite_term(a, scope)).collect(),
        },
    }
}
