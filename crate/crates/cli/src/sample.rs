//! Random instances for the property suites.
//!
//! Sampling is seeded and deterministic. Sizes stay at desk scale so
//! brute-force oracles (full enumeration, all permutations) remain
//! affordable; the space cap rejects draws whose expansion space would
//! not fit the enumeration budget.

use std::sync::Arc;

use rand::rngs::StdRng;
use rand::Rng;

use mxsym_core::argpos::ArgPosSet;
use mxsym_core::fo::{
    rename_apart, Domain, Formula, Problem, Relation, Structure, Symbol, SymbolIo, Term, Theory,
    Vocabulary,
};
use mxsym_core::ArgPos;

#[derive(Clone, Debug)]
pub struct SampleLimits {
    pub min_domain: usize,
    pub max_domain: usize,
    pub max_sentences: usize,
    /// Force every symbol into the output vocabulary, for theory-level
    /// suites that enumerate all structures.
    pub all_output: bool,
    /// Upper bound on the full expansion space.
    pub space_cap: Option<u128>,
}

impl SampleLimits {
    /// Theories only: everything output, small enough to enumerate.
    pub fn theory_suite() -> SampleLimits {
        SampleLimits {
            min_domain: 2,
            max_domain: 3,
            max_sentences: 3,
            all_output: true,
            space_cap: Some(4096),
        }
    }

    /// Model-expansion instances: random input interpretations, output
    /// space small enough for the symmetry oracle.
    pub fn mx_suite() -> SampleLimits {
        SampleLimits {
            min_domain: 2,
            max_domain: 3,
            max_sentences: 3,
            all_output: false,
            space_cap: Some(4096),
        }
    }

    /// Larger domains for detection-only suites; nothing enumerates
    /// expansions, so no space cap.
    pub fn detection_suite() -> SampleLimits {
        SampleLimits {
            min_domain: 2,
            max_domain: 6,
            max_sentences: 3,
            all_output: false,
            space_cap: None,
        }
    }
}

/// Symbol pool: at most two binary and two unary predicates.
const POOL: [(&str, usize); 4] = [("R", 2), ("P", 1), ("S", 2), ("Q", 1)];

pub fn random_problem(rng: &mut StdRng, lim: &SampleLimits) -> Problem {
    loop {
        let n = rng.random_range(lim.min_domain..=lim.max_domain);
        let keep = [
            rng.random_bool(0.8),
            rng.random_bool(0.7),
            rng.random_bool(0.25),
            rng.random_bool(0.4),
        ];
        let syms: Vec<(&str, usize)> =
            POOL.iter().zip(keep).filter(|(_, k)| *k).map(|(s, _)| *s).collect();
        if syms.is_empty() {
            continue;
        }
        let inputs: Vec<bool> =
            syms.iter().map(|_| !lim.all_output && rng.random_bool(0.5)).collect();
        if inputs.iter().all(|&b| b) {
            continue;
        }
        let bits: u32 = syms
            .iter()
            .zip(&inputs)
            .filter(|(_, &inp)| !inp)
            .map(|((_, arity), _)| (n as u32).pow(*arity as u32))
            .sum();
        if let Some(cap) = lim.space_cap {
            if bits >= 127 || 1u128 << bits > cap {
                continue;
            }
        }

        let mut vocab = Vocabulary::new();
        for ((name, arity), &inp) in syms.iter().zip(&inputs) {
            let io = if inp { SymbolIo::Input } else { SymbolIo::Output };
            vocab.declare(Symbol::pred(name, *arity, io)).unwrap();
        }
        let domain = Domain::new((1..=n).map(|i| format!("d{i}")).collect()).unwrap();
        let mut input = Structure::new(domain.clone());
        for ((name, arity), &inp) in syms.iter().zip(&inputs) {
            if inp {
                let rel: Relation =
                    domain.tuples(*arity).filter(|_| rng.random_bool(0.5)).collect();
                input.set_rel(name, Arc::new(rel)).unwrap();
            }
        }
        let count = rng.random_range(1..=lim.max_sentences);
        let sentences = (0..count).map(|_| sentence(rng, &syms)).collect();
        let theory = rename_apart(&Theory::new(sentences));
        return Problem { vocab, theory, input };
    }
}

fn var(rng: &mut StdRng) -> Term {
    Term::var(if rng.random_bool(0.5) { "x" } else { "y" })
}

fn atom(rng: &mut StdRng, syms: &[(&str, usize)]) -> Formula {
    if rng.random_bool(0.15) {
        let s = var(rng);
        let t = var(rng);
        return Formula::Eq(s, t);
    }
    let (name, arity) = syms[rng.random_range(0..syms.len())];
    Formula::pred(name, (0..arity).map(|_| var(rng)).collect())
}

fn formula(rng: &mut StdRng, syms: &[(&str, usize)], depth: usize) -> Formula {
    if depth == 0 || rng.random_bool(0.35) {
        return atom(rng, syms);
    }
    let f = formula(rng, syms, depth - 1);
    match rng.random_range(0..5) {
        0 => Formula::not(f),
        1 => Formula::and(f, formula(rng, syms, depth - 1)),
        2 => Formula::or(f, formula(rng, syms, depth - 1)),
        3 => Formula::implies(f, formula(rng, syms, depth - 1)),
        _ => Formula::iff(f, formula(rng, syms, depth - 1)),
    }
}

fn sentence(rng: &mut StdRng, syms: &[(&str, usize)]) -> Formula {
    let body = formula(rng, syms, 3);
    let inner =
        if rng.random_bool(0.7) { Formula::forall("y", body) } else { Formula::exists("y", body) };
    if rng.random_bool(0.7) {
        Formula::forall("x", inner)
    } else {
        Formula::exists("x", inner)
    }
}

/// A random interpreted structure plus a nonempty set of its argument
/// positions, for exercising the permutation-graph bijection.
pub fn random_structure_with_positions(
    rng: &mut StdRng,
    min_domain: usize,
    max_domain: usize,
) -> (Structure, ArgPosSet) {
    let n = rng.random_range(min_domain..=max_domain);
    let domain = Domain::new((1..=n).map(|i| format!("d{i}")).collect()).unwrap();
    let mut pool: Vec<(&str, usize)> = vec![("R", 2)];
    if rng.random_bool(0.5) {
        pool.push(("P", 1));
    }
    if rng.random_bool(0.3) {
        pool.push(("S", 2));
    }
    let mut s = Structure::new(domain.clone());
    for (name, arity) in &pool {
        let rel: Relation = domain.tuples(*arity).filter(|_| rng.random_bool(0.4)).collect();
        s.set_rel(name, Arc::new(rel)).unwrap();
    }
    let mut a = ArgPosSet::new();
    for (name, arity) in &pool {
        for i in 1..=*arity {
            if rng.random_bool(0.6) {
                a.insert(ArgPos::new(name, i));
            }
        }
    }
    if a.is_empty() {
        a.insert(ArgPos::new("R", 1));
    }
    (s, a)
}
