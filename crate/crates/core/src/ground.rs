//! Grounding to CNF over output atoms.
//!
//! The catalog assigns one propositional variable to every ground atom
//! of the output vocabulary: `P(d..)` for predicates and `f(d..) = e`
//! for function graphs. Quantifiers are expanded over the domain, input
//! symbols are evaluated away against the input structure, and nested
//! output functions are flattened through their graph atoms. Per
//! function and input tuple, exactly-one clauses pin the graph to a
//! total function, so CNF models restricted to catalog variables are
//! exactly the solutions of the expansion problem.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

use crate::fo::{
    print_formula, Domain, ElemId, Formula, FuncGraph, Problem, Relation, Structure, SymbolKind,
    Term, Tuple,
};

pub type Var = u32;
pub type Lit = i32;

pub fn lit(v: Var, positive: bool) -> Lit {
    if positive {
        v as Lit
    } else {
        -(v as Lit)
    }
}

pub fn lit_var(l: Lit) -> Var {
    l.unsigned_abs()
}

/// Work units (instantiations and term branches) before grounding bails.
pub const GROUND_BUDGET_DEFAULT: u64 = 1 << 26;

/// Functions with more domain values than this get the sequential
/// at-most-one encoding instead of the pairwise one.
const PAIRWISE_CAP: usize = 12;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroundError {
    #[error("sentence `{sentence}` grounds to false under {binding}")]
    FalseSentence { sentence: String, binding: String },
    #[error("grounding budget exhausted")]
    Budget,
    #[error("bad DIMACS: {0}")]
    Dimacs(String),
    #[error("bad model: {0}")]
    BadModel(String),
}

/// A ground atom of the output vocabulary. `value` is the result slot
/// of a function graph atom `symbol(args) = value`; predicates have
/// none.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct GroundAtom {
    pub symbol: String,
    pub args: Tuple,
    pub value: Option<ElemId>,
}

impl GroundAtom {
    pub fn pred(symbol: &str, args: Tuple) -> GroundAtom {
        GroundAtom { symbol: symbol.into(), args, value: None }
    }

    pub fn graph(symbol: &str, args: Tuple, value: ElemId) -> GroundAtom {
        GroundAtom { symbol: symbol.into(), args, value: Some(value) }
    }

    pub fn label(&self, d: &Domain) -> String {
        let mut s = format_app(&self.symbol, &self.args, d);
        if let Some(e) = self.value {
            write!(s, " = {}", d.name(e)).unwrap();
        }
        s
    }
}

fn format_app(symbol: &str, args: &[ElemId], d: &Domain) -> String {
    if args.is_empty() {
        return symbol.to_string();
    }
    let names: Vec<&str> = args.iter().map(|&e| d.name(e)).collect();
    format!("{}({})", symbol, names.join(", "))
}

/// Bijection between variables `1..=len` and the ground output atoms,
/// in the global atom order: output symbols in declaration order, then
/// tuples in rank-lexicographic order (a function's value slot is the
/// last tuple component).
#[derive(Debug)]
pub struct AtomCatalog {
    domain: Arc<Domain>,
    atoms: Vec<GroundAtom>,
    index: BTreeMap<GroundAtom, Var>,
}

impl AtomCatalog {
    pub fn new(p: &Problem) -> AtomCatalog {
        let domain = p.domain().clone();
        let mut atoms = Vec::new();
        for sym in p.vocab.outputs() {
            let width = match sym.kind {
                SymbolKind::Pred => sym.arity,
                SymbolKind::Func => sym.arity + 1,
            };
            for tup in domain.tuples(width) {
                atoms.push(match sym.kind {
                    SymbolKind::Pred => GroundAtom::pred(&sym.name, tup),
                    SymbolKind::Func => {
                        let value = tup[sym.arity];
                        GroundAtom::graph(&sym.name, tup[..sym.arity].to_vec(), value)
                    }
                });
            }
        }
        let index = atoms.iter().enumerate().map(|(i, a)| (a.clone(), i as Var + 1)).collect();
        AtomCatalog { domain, atoms, index }
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn domain(&self) -> &Arc<Domain> {
        &self.domain
    }

    pub fn var(&self, atom: &GroundAtom) -> Option<Var> {
        self.index.get(atom).copied()
    }

    pub fn atom(&self, v: Var) -> Option<&GroundAtom> {
        self.atoms.get(v as usize - 1)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Var, &GroundAtom)> {
        self.atoms.iter().enumerate().map(|(i, a)| (i as Var + 1, a))
    }

    /// Truth of `atom` in an output structure.
    pub fn holds_in(&self, atom: &GroundAtom, output: &Structure) -> bool {
        match atom.value {
            None => output.rel(&atom.symbol).is_some_and(|r| r.contains(&atom.args)),
            Some(e) => {
                output.func(&atom.symbol).and_then(|g| g.get(&atom.args).copied()) == Some(e)
            }
        }
    }

    /// Rebuild the output structure from a model's catalog prefix.
    /// `model[v - 1]` is the truth of variable `v`.
    pub fn decode(&self, p: &Problem, model: &[bool]) -> Result<Structure, GroundError> {
        let mut rels: BTreeMap<&str, Relation> = BTreeMap::new();
        let mut funcs: BTreeMap<&str, FuncGraph> = BTreeMap::new();
        for (v, atom) in self.iter() {
            if !model[v as usize - 1] {
                continue;
            }
            match atom.value {
                None => {
                    rels.entry(&atom.symbol).or_default().insert(atom.args.clone());
                }
                Some(e) => {
                    let graph = funcs.entry(&atom.symbol).or_default();
                    if graph.insert(atom.args.clone(), e).is_some() {
                        return Err(GroundError::BadModel(format!(
                            "two values for `{}`",
                            format_app(&atom.symbol, &atom.args, &self.domain)
                        )));
                    }
                }
            }
        }
        let mut out = Structure::new(p.domain().clone());
        for sym in p.vocab.outputs() {
            match sym.kind {
                SymbolKind::Pred => {
                    let rel = rels.remove(sym.name.as_str()).unwrap_or_default();
                    out.set_rel(&sym.name, Arc::new(rel)).unwrap();
                }
                SymbolKind::Func => {
                    let graph = funcs.remove(sym.name.as_str()).unwrap_or_default();
                    for tup in self.domain.tuples(sym.arity) {
                        if !graph.contains_key(&tup) {
                            return Err(GroundError::BadModel(format!(
                                "no value for `{}`",
                                format_app(&sym.name, &tup, &self.domain)
                            )));
                        }
                    }
                    out.set_func(&sym.name, Arc::new(graph)).unwrap();
                }
            }
        }
        Ok(out)
    }
}

/// Clause set in DIMACS conventions: variables `1..=num_vars`, a
/// clause is a vector of nonzero literals. `labels` carries the atom
/// names of the catalog prefix for DIMACS comments.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Cnf {
    pub num_vars: Var,
    pub clauses: Vec<Vec<Lit>>,
    pub labels: Vec<(Var, String)>,
}

impl Cnf {
    pub fn new() -> Cnf {
        Cnf::default()
    }

    pub fn new_var(&mut self) -> Var {
        self.num_vars += 1;
        self.num_vars
    }

    pub fn add_clause(&mut self, clause: Vec<Lit>) {
        debug_assert!(clause.iter().all(|&l| l != 0 && lit_var(l) <= self.num_vars));
        self.clauses.push(clause);
    }

    /// Truth under a full assignment, `assign[v - 1]` for variable `v`.
    pub fn eval(&self, assign: &[bool]) -> bool {
        self.clauses.iter().all(|c| {
            c.iter().any(|&l| if l > 0 { assign[l as usize - 1] } else { !assign[-l as usize - 1] })
        })
    }
}

pub fn ground_theory(p: &Problem) -> Result<(Cnf, AtomCatalog), GroundError> {
    ground_theory_budgeted(p, GROUND_BUDGET_DEFAULT)
}

pub fn ground_theory_budgeted(p: &Problem, budget: u64) -> Result<(Cnf, AtomCatalog), GroundError> {
    let n = p.domain().size() as u128;
    let mut atom_count: u128 = 0;
    for sym in p.vocab.outputs() {
        let width = match sym.kind {
            SymbolKind::Pred => sym.arity,
            SymbolKind::Func => sym.arity + 1,
        };
        atom_count += n.pow(width as u32);
    }
    if atom_count > budget as u128 {
        return Err(GroundError::Budget);
    }
    let cat = AtomCatalog::new(p);
    let mut cnf = Cnf::new();
    cnf.num_vars = cat.len() as Var;
    for (v, atom) in cat.iter() {
        cnf.labels.push((v, atom.label(p.domain())));
    }
    let mut g = Grounder {
        p,
        cat: &cat,
        cnf,
        elems: p.domain().elems_ordered().to_vec(),
        budget: budget - atom_count as u64,
    };
    g.function_axioms();
    for s in &p.theory.sentences {
        g.sentence(s)?;
    }
    Ok((g.cnf, cat))
}

/// Ground formula in negation normal form; negation lives only in
/// literal signs. The smart constructors fold constants, flatten
/// nesting and drop duplicate literals, so composites never contain
/// constants or same-shaped children.
enum Gf {
    Const(bool),
    Lit(Lit),
    And(Vec<Gf>),
    Or(Vec<Gf>),
}

impl Gf {
    fn and(parts: Vec<Gf>) -> Gf {
        let mut stack: Vec<Gf> = parts.into_iter().rev().collect();
        let mut lits: Vec<Lit> = Vec::new();
        let mut out = Vec::new();
        while let Some(p) = stack.pop() {
            match p {
                Gf::Const(true) => {}
                Gf::Const(false) => return Gf::Const(false),
                Gf::Lit(l) => {
                    if lits.contains(&-l) {
                        return Gf::Const(false);
                    }
                    if !lits.contains(&l) {
                        lits.push(l);
                        out.push(Gf::Lit(l));
                    }
                }
                Gf::And(sub) => stack.extend(sub.into_iter().rev()),
                o => out.push(o),
            }
        }
        match out.len() {
            0 => Gf::Const(true),
            1 => out.pop().unwrap(),
            _ => Gf::And(out),
        }
    }

    fn or(parts: Vec<Gf>) -> Gf {
        let mut stack: Vec<Gf> = parts.into_iter().rev().collect();
        let mut lits: Vec<Lit> = Vec::new();
        let mut out = Vec::new();
        while let Some(p) = stack.pop() {
            match p {
                Gf::Const(false) => {}
                Gf::Const(true) => return Gf::Const(true),
                Gf::Lit(l) => {
                    if lits.contains(&-l) {
                        return Gf::Const(true);
                    }
                    if !lits.contains(&l) {
                        lits.push(l);
                        out.push(Gf::Lit(l));
                    }
                }
                Gf::Or(sub) => stack.extend(sub.into_iter().rev()),
                o => out.push(o),
            }
        }
        match out.len() {
            0 => Gf::Const(false),
            1 => out.pop().unwrap(),
            _ => Gf::Or(out),
        }
    }
}

/// Term branches: ways the term can take a value, each guarded by the
/// function graph atoms (positive variables) the branch requires.
type Branches = Vec<(Vec<Var>, ElemId)>;

struct Grounder<'a> {
    p: &'a Problem,
    cat: &'a AtomCatalog,
    cnf: Cnf,
    elems: Vec<ElemId>,
    budget: u64,
}

impl Grounder<'_> {
    fn spend(&mut self, n: u64) -> Result<(), GroundError> {
        if self.budget < n {
            return Err(GroundError::Budget);
        }
        self.budget -= n;
        Ok(())
    }

    fn function_axioms(&mut self) {
        for sym in self.p.vocab.outputs() {
            if sym.kind != SymbolKind::Func {
                continue;
            }
            for tup in self.p.domain().tuples(sym.arity) {
                let lits: Vec<Lit> = self
                    .elems
                    .iter()
                    .map(|&e| {
                        let v = self.cat.var(&GroundAtom::graph(&sym.name, tup.clone(), e));
                        lit(v.unwrap(), true)
                    })
                    .collect();
                self.cnf.add_clause(lits.clone());
                at_most_one(&mut self.cnf, &lits, PAIRWISE_CAP);
            }
        }
    }

    fn sentence(&mut self, s: &Formula) -> Result<(), GroundError> {
        let mut binders: Vec<&str> = Vec::new();
        let mut body = s;
        while let Formula::Forall(v, g) = body {
            binders.push(v);
            body = g;
        }
        let n = self.elems.len();
        let mut idx = vec![0usize; binders.len()];
        loop {
            self.spend(1)?;
            let mut env: Vec<(String, ElemId)> = binders
                .iter()
                .zip(&idx)
                .map(|(v, &r)| (v.to_string(), self.elems[r]))
                .collect();
            match self.gf(body, &mut env, true)? {
                Gf::Const(false) => {
                    let binding = if binders.is_empty() {
                        "no binding".to_string()
                    } else {
                        binders
                            .iter()
                            .zip(&idx)
                            .map(|(v, &r)| {
                                format!("{} = {}", v, self.p.domain().name(self.elems[r]))
                            })
                            .collect::<Vec<_>>()
                            .join(", ")
                    };
                    return Err(GroundError::FalseSentence {
                        sentence: print_formula(s),
                        binding,
                    });
                }
                Gf::Const(true) => {}
                g => self.assert_gf(g),
            }
            let mut i = idx.len();
            loop {
                if i == 0 {
                    return Ok(());
                }
                i -= 1;
                idx[i] += 1;
                if idx[i] < n {
                    break;
                }
                idx[i] = 0;
            }
        }
    }

    /// Grounds `f` under the environment with the sign applied, so the
    /// result is already in negation normal form.
    fn gf(
        &mut self,
        f: &Formula,
        env: &mut Vec<(String, ElemId)>,
        pos: bool,
    ) -> Result<Gf, GroundError> {
        match f {
            Formula::Pred { sym, args } => {
                let mut per = Vec::with_capacity(args.len());
                for a in args {
                    per.push(self.flatten_term(a, env)?);
                }
                let cs = combos(&per);
                self.spend(cs.len() as u64)?;
                let mut parts = Vec::with_capacity(cs.len());
                for (conds, tup) in cs {
                    let payload = if let Some(r) = self.p.input.rel(sym) {
                        Gf::Const(r.contains(&tup) == pos)
                    } else {
                        let v = self.cat.var(&GroundAtom::pred(sym, tup)).unwrap();
                        Gf::Lit(lit(v, pos))
                    };
                    parts.push(self.guard(conds, payload, pos));
                }
                Ok(if pos { Gf::or(parts) } else { Gf::and(parts) })
            }
            Formula::Eq(a, b) => {
                let ba = self.flatten_term(a, env)?;
                let bb = self.flatten_term(b, env)?;
                self.spend((ba.len() * bb.len()) as u64)?;
                let mut parts = Vec::with_capacity(ba.len() * bb.len());
                for (ca, va) in &ba {
                    for (cb, vb) in &bb {
                        let mut conds = ca.clone();
                        conds.extend_from_slice(cb);
                        let payload = Gf::Const((va == vb) == pos);
                        parts.push(self.guard(conds, payload, pos));
                    }
                }
                Ok(if pos { Gf::or(parts) } else { Gf::and(parts) })
            }
            Formula::Not(g) => self.gf(g, env, !pos),
            Formula::And(a, b) => {
                let parts = vec![self.gf(a, env, pos)?, self.gf(b, env, pos)?];
                Ok(if pos { Gf::and(parts) } else { Gf::or(parts) })
            }
            Formula::Or(a, b) => {
                let parts = vec![self.gf(a, env, pos)?, self.gf(b, env, pos)?];
                Ok(if pos { Gf::or(parts) } else { Gf::and(parts) })
            }
            Formula::Implies(a, b) => {
                let na = self.gf(a, env, !pos)?;
                let gb = self.gf(b, env, pos)?;
                Ok(if pos { Gf::or(vec![na, gb]) } else { Gf::and(vec![na, gb]) })
            }
            Formula::Iff(a, b) => {
                // Both signs are conjunctions of two clauses: equivalence
                // is (~a | b) & (a | ~b), exclusive or is (a | b) & (~a | ~b).
                let left = {
                    let na = self.gf(a, env, !pos)?;
                    let gb = self.gf(b, env, true)?;
                    Gf::or(vec![na, gb])
                };
                let right = {
                    let ga = self.gf(a, env, pos)?;
                    let nb = self.gf(b, env, false)?;
                    Gf::or(vec![ga, nb])
                };
                Ok(Gf::and(vec![left, right]))
            }
            Formula::Forall(v, g) => self.quantifier(v, g, env, pos, pos),
            Formula::Exists(v, g) => self.quantifier(v, g, env, pos, !pos),
        }
    }

    /// Conjunctive tells whether the expansion conjoins under a
    /// positive sign (universal) or disjoins (existential).
    fn quantifier(
        &mut self,
        v: &str,
        g: &Formula,
        env: &mut Vec<(String, ElemId)>,
        pos: bool,
        conjunctive: bool,
    ) -> Result<Gf, GroundError> {
        self.spend(self.elems.len() as u64)?;
        let mut parts = Vec::with_capacity(self.elems.len());
        for i in 0..self.elems.len() {
            let e = self.elems[i];
            env.push((v.to_string(), e));
            let r = self.gf(g, env, pos);
            env.pop();
            parts.push(r?);
        }
        Ok(if conjunctive { Gf::and(parts) } else { Gf::or(parts) })
    }

    /// One branch of an atom: positively the guards are conjoined with
    /// the payload, negatively the branch contributes the implication
    /// "guards hold so the negated payload holds".
    fn guard(&self, conds: Vec<Var>, payload: Gf, pos: bool) -> Gf {
        let mut parts: Vec<Gf> =
            conds.into_iter().map(|v| Gf::Lit(lit(v, pos))).collect();
        parts.push(payload);
        if pos {
            Gf::and(parts)
        } else {
            Gf::or(parts)
        }
    }

    /// All (guards, value) pairs a ground term can evaluate to. Input
    /// functions collapse to a single value once their arguments do;
    /// output functions branch over the domain through graph atoms.
    fn flatten_term(
        &mut self,
        t: &Term,
        env: &[(String, ElemId)],
    ) -> Result<Branches, GroundError> {
        match t {
            Term::Var(v) => {
                let e = env
                    .iter()
                    .rev()
                    .find(|(n, _)| n == v)
                    .map(|&(_, e)| e)
                    .expect("sentences are closed");
                Ok(vec![(Vec::new(), e)])
            }
            Term::App { sym, args } => {
                let mut per = Vec::with_capacity(args.len());
                for a in args {
                    per.push(self.flatten_term(a, env)?);
                }
                let base = combos(&per);
                if let Some(g) = self.p.input.func(sym) {
                    self.spend(base.len() as u64)?;
                    Ok(base
                        .into_iter()
                        .map(|(conds, tup)| {
                            let v = *g.get(&tup).expect("input functions are total");
                            (conds, v)
                        })
                        .collect())
                } else {
                    self.spend((base.len() * self.elems.len()) as u64)?;
                    let mut out = Vec::with_capacity(base.len() * self.elems.len());
                    for (conds, tup) in base {
                        for &e in &self.elems {
                            let v = self.cat.var(&GroundAtom::graph(sym, tup.clone(), e));
                            let mut c = conds.clone();
                            c.push(v.unwrap());
                            out.push((c, e));
                        }
                    }
                    Ok(out)
                }
            }
        }
    }

    fn assert_gf(&mut self, g: Gf) {
        match g {
            Gf::Const(true) => {}
            Gf::Const(false) => unreachable!("constant sentences are handled by the caller"),
            Gf::Lit(l) => self.cnf.add_clause(vec![l]),
            Gf::And(parts) => {
                for p in parts {
                    self.assert_gf(p);
                }
            }
            Gf::Or(parts) => {
                let clause = parts.into_iter().map(|p| self.lit_of(p)).collect();
                self.cnf.add_clause(clause);
            }
        }
    }

    /// Tseitin with the polarity optimization: the formula is in NNF
    /// and only asserted, so one implication direction per auxiliary
    /// suffices.
    fn lit_of(&mut self, g: Gf) -> Lit {
        match g {
            Gf::Const(_) => unreachable!("constructors fold constants"),
            Gf::Lit(l) => l,
            Gf::And(parts) => {
                let a = lit(self.cnf.new_var(), true);
                for p in parts {
                    let l = self.lit_of(p);
                    self.cnf.add_clause(vec![-a, l]);
                }
                a
            }
            Gf::Or(parts) => {
                let o = lit(self.cnf.new_var(), true);
                let mut clause: Vec<Lit> = vec![-o];
                for p in parts {
                    clause.push(self.lit_of(p));
                }
                self.cnf.add_clause(clause);
                o
            }
        }
    }
}

/// Cartesian product of per-argument branches into tuple branches.
fn combos(per_arg: &[Branches]) -> Vec<(Vec<Var>, Tuple)> {
    let mut acc: Vec<(Vec<Var>, Tuple)> = vec![(Vec::new(), Vec::new())];
    for branches in per_arg {
        let mut next = Vec::with_capacity(acc.len() * branches.len());
        for (c0, t0) in &acc {
            for (c1, v) in branches {
                let mut c = c0.clone();
                c.extend_from_slice(c1);
                let mut t = t0.clone();
                t.push(*v);
                next.push((c, t));
            }
        }
        acc = next;
    }
    acc
}

pub(crate) fn at_most_one(cnf: &mut Cnf, lits: &[Lit], pairwise_cap: usize) {
    let k = lits.len();
    if k <= 1 {
        return;
    }
    if k <= pairwise_cap {
        for i in 0..k {
            for j in i + 1..k {
                cnf.add_clause(vec![-lits[i], -lits[j]]);
            }
        }
        return;
    }
    // Sequential counter: s[i] commits "some of lits[..=i] is true".
    let s: Vec<Lit> = (0..k - 1).map(|_| lit(cnf.new_var(), true)).collect();
    cnf.add_clause(vec![-lits[0], s[0]]);
    for i in 1..k - 1 {
        cnf.add_clause(vec![-lits[i], s[i]]);
        cnf.add_clause(vec![-s[i - 1], s[i]]);
        cnf.add_clause(vec![-lits[i], -s[i - 1]]);
    }
    cnf.add_clause(vec![-lits[k - 1], -s[k - 2]]);
}

pub fn emit_dimacs(c: &Cnf) -> String {
    let mut out = String::new();
    for (v, label) in &c.labels {
        writeln!(out, "c {} {}", v, label).unwrap();
    }
    writeln!(out, "p cnf {} {}", c.num_vars, c.clauses.len()).unwrap();
    for clause in &c.clauses {
        for l in clause {
            write!(out, "{} ", l).unwrap();
        }
        writeln!(out, "0").unwrap();
    }
    out
}

pub fn parse_dimacs(text: &str) -> Result<Cnf, GroundError> {
    let mut header: Option<(Var, usize)> = None;
    let mut clauses = Vec::new();
    let mut cur: Vec<Lit> = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('p') {
            if header.is_some() {
                return Err(GroundError::Dimacs("duplicate header".into()));
            }
            let fields: Vec<&str> = rest.split_whitespace().collect();
            let bad = || GroundError::Dimacs(format!("bad header `{}`", line));
            if fields.len() != 3 || fields[0] != "cnf" {
                return Err(bad());
            }
            let vars: Var = fields[1].parse().map_err(|_| bad())?;
            let count: usize = fields[2].parse().map_err(|_| bad())?;
            header = Some((vars, count));
            continue;
        }
        let (vars, _) =
            header.ok_or_else(|| GroundError::Dimacs("clause before header".into()))?;
        for tok in line.split_whitespace() {
            let l: Lit = tok
                .parse()
                .map_err(|_| GroundError::Dimacs(format!("bad literal `{}`", tok)))?;
            if l == 0 {
                clauses.push(std::mem::take(&mut cur));
            } else if lit_var(l) > vars {
                return Err(GroundError::Dimacs(format!("literal `{}` out of range", l)));
            } else {
                cur.push(l);
            }
        }
    }
    let (vars, count) = header.ok_or_else(|| GroundError::Dimacs("missing header".into()))?;
    if !cur.is_empty() {
        return Err(GroundError::Dimacs("unterminated clause".into()));
    }
    if clauses.len() != count {
        return Err(GroundError::Dimacs(format!(
            "header promises {} clauses, found {}",
            count,
            clauses.len()
        )));
    }
    Ok(Cnf { num_vars: vars, clauses, labels: Vec::new() })
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::fo::{enumerate_expansions, parse_problem, ENUM_BUDGET_DEFAULT};
    use crate::testfix::coloring;

    fn problem(src: &str) -> Problem {
        parse_problem(src).unwrap()
    }

    /// All catalog-variable assignments extensible to a CNF model, by
    /// brute force over every assignment of every variable.
    fn projected_models(cnf: &Cnf, cat_len: usize) -> BTreeSet<Vec<bool>> {
        assert!(cnf.num_vars <= 20, "brute force only at desk scale");
        let n = cnf.num_vars as usize;
        let mut seen = BTreeSet::new();
        for bits in 0u64..1 << n {
            let assign: Vec<bool> = (0..n).map(|i| bits >> i & 1 == 1).collect();
            if cnf.eval(&assign) {
                seen.insert(assign[..cat_len].to_vec());
            }
        }
        seen
    }

    fn solution_codes(p: &Problem, cat: &AtomCatalog) -> BTreeSet<Vec<bool>> {
        let mut want = BTreeSet::new();
        for e in enumerate_expansions(p, ENUM_BUDGET_DEFAULT).unwrap() {
            if p.is_solution(&e).unwrap() {
                want.insert(cat.iter().map(|(_, a)| cat.holds_in(a, &e)).collect());
            }
        }
        want
    }

    #[test]
    fn a_universal_fact_grounds_to_unit_clauses() {
        let p = problem(
            "vocab { pred P/1 output func F/0 output }\n\
             domain = { a b }\n\
             theory { ! x: P(x). }\n\
             structure { }",
        );
        let (cnf, cat) = ground_theory(&p).unwrap();
        assert_eq!(cat.atom(1).unwrap().label(p.domain()), "P(a)");
        assert_eq!(cat.atom(2).unwrap().label(p.domain()), "P(b)");
        assert!(cnf.clauses.contains(&vec![1]));
        assert!(cnf.clauses.contains(&vec![2]));
    }

    #[test]
    fn output_constants_get_exactly_one_value() {
        let p = problem(
            "vocab { func pick/0 output }\n\
             domain = { a b c }\n\
             theory { ? x: pick = x. }\n\
             structure { }",
        );
        let (cnf, cat) = ground_theory(&p).unwrap();
        assert_eq!(cat.len(), 3);
        assert_eq!(cat.atom(1).unwrap().label(p.domain()), "pick = a");
        assert!(cnf.clauses.contains(&vec![1, 2, 3]));
        assert!(cnf.clauses.contains(&vec![-1, -2]));
        assert!(cnf.clauses.contains(&vec![-1, -3]));
        assert!(cnf.clauses.contains(&vec![-2, -3]));
        assert_eq!(projected_models(&cnf, cat.len()).len(), 3);
    }

    #[test]
    fn input_atoms_evaluate_away() {
        let p = problem(
            "vocab { pred C/1 input func F/1 output }\n\
             domain = { a b }\n\
             theory { ! x: C(F(x)). }\n\
             structure { C = { a } }",
        );
        let (cnf, cat) = ground_theory(&p).unwrap();
        // Catalog: F(a)=a, F(a)=b, F(b)=a, F(b)=b. The sentence pins
        // both images to a.
        assert!(cnf.clauses.contains(&vec![1]));
        assert!(cnf.clauses.contains(&vec![3]));
        let got = projected_models(&cnf, cat.len());
        assert_eq!(got.len(), 1);
        assert_eq!(got, solution_codes(&p, &cat));
    }

    #[test]
    fn cnf_models_biject_with_solutions() {
        let p = problem(
            "vocab { pred E/2 input func F/1 output }\n\
             domain = { a b }\n\
             theory { ! x y: E(x, y) => F(x) ~= F(y). }\n\
             structure { E = { (a, b) } }",
        );
        let (cnf, cat) = ground_theory(&p).unwrap();
        let got = projected_models(&cnf, cat.len());
        assert_eq!(got, solution_codes(&p, &cat));
        assert_eq!(got.len(), 2);
        for code in &got {
            let out = cat.decode(&p, code).unwrap();
            assert!(p.is_solution(&out).unwrap());
        }
    }

    #[test]
    fn nested_connectives_biject_with_solutions() {
        let p = problem(
            "vocab { pred E/2 input pred P/1 output pred Q/1 output }\n\
             domain = { a b }\n\
             theory {\n\
               ! x: P(x) <=> (? y: E(x, y) & Q(y)).\n\
               ! x: ~ (P(x) & Q(x)) | E(x, x).\n\
             }\n\
             structure { E = { (a, b) (b, b) } }",
        );
        let (cnf, cat) = ground_theory(&p).unwrap();
        assert_eq!(projected_models(&cnf, cat.len()), solution_codes(&p, &cat));
    }

    #[test]
    fn a_negated_iff_grounds_as_exclusive_or() {
        let p = problem(
            "vocab { pred P/1 output pred Q/1 output }\n\
             domain = { a b }\n\
             theory { ! x: ~ (P(x) <=> Q(x)). }\n\
             structure { }",
        );
        let (cnf, cat) = ground_theory(&p).unwrap();
        let models = projected_models(&cnf, cat.len());
        assert_eq!(models.len(), 4);
        assert_eq!(models, solution_codes(&p, &cat));
    }

    #[test]
    fn the_running_example_catalog_lists_every_graph_atom() {
        let p = coloring();
        let cat = AtomCatalog::new(&p);
        assert_eq!(cat.len(), 49);
        assert_eq!(cat.atom(1).unwrap().label(p.domain()), "Color(t) = t");
        assert_eq!(cat.atom(49).unwrap().label(p.domain()), "Color(b) = b");
        let v = cat.var(&GroundAtom::graph("Color", vec![p.domain().id("t").unwrap()],
            p.domain().id("r").unwrap()));
        assert_eq!(v, Some(5));
    }

    #[test]
    fn false_instances_report_their_binding() {
        let p = problem(
            "vocab { pred P/1 input func F/0 output }\n\
             domain = { a b }\n\
             theory { ! x: P(x). }\n\
             structure { }",
        );
        let err = ground_theory(&p).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("x = a"), "{}", msg);
        assert!(msg.contains("P(x)"), "{}", msg);
    }

    #[test]
    fn tight_budgets_stop_grounding() {
        assert_eq!(ground_theory_budgeted(&coloring(), 10).unwrap_err(), GroundError::Budget);
    }

    #[test]
    fn dimacs_output_is_pinned() {
        assert_eq!(emit_dimacs(&Cnf::new()), "p cnf 0 0\n");
        let mut cnf = Cnf::new();
        cnf.num_vars = 2;
        cnf.add_clause(vec![1, -2]);
        assert_eq!(emit_dimacs(&cnf), "p cnf 2 1\n1 -2 0\n");
    }

    #[test]
    fn dimacs_round_trips() {
        let (cnf, _) = ground_theory(&coloring()).unwrap();
        let back = parse_dimacs(&emit_dimacs(&cnf)).unwrap();
        assert_eq!(back.num_vars, cnf.num_vars);
        assert_eq!(back.clauses, cnf.clauses);
    }

    #[test]
    fn dimacs_parser_rejects_malformed_text() {
        assert!(parse_dimacs("p cnf 1").is_err());
        assert!(parse_dimacs("1 0").is_err());
        assert!(parse_dimacs("p cnf 1 1\n2 0").is_err());
        assert!(parse_dimacs("p cnf 1 1\n1").is_err());
        assert!(parse_dimacs("p cnf 1 2\n1 0").is_err());
    }

    #[test]
    fn the_ladder_encoding_matches_pairwise() {
        let mut pair = Cnf::new();
        let mut ladder = Cnf::new();
        let lits: Vec<Lit> = (0..4).map(|_| lit(pair.new_var(), true)).collect();
        for _ in 0..4 {
            ladder.new_var();
        }
        at_most_one(&mut pair, &lits, 12);
        at_most_one(&mut ladder, &lits, 0);
        let want = projected_models(&pair, 4);
        assert_eq!(projected_models(&ladder, 4), want);
        assert_eq!(want.len(), 5);
    }

    #[test]
    fn decode_rejects_non_functional_models() {
        let p = problem(
            "vocab { func c/0 output }\n\
             domain = { a b }\n\
             theory { c = c. }\n\
             structure { }",
        );
        let cat = AtomCatalog::new(&p);
        assert!(cat.decode(&p, &[true, true]).is_err());
        assert!(cat.decode(&p, &[false, false]).is_err());
        assert!(cat.decode(&p, &[true, false]).is_ok());
    }
}
