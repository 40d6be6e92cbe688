//! Truth evaluation over finite structures.

use thiserror::Error;

use super::ast::{Formula, Term, Theory};
use super::structure::{ElemId, Structure};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("symbol `{0}` has no interpretation")]
    Uninterpreted(String),
    #[error("variable `{0}` is unbound")]
    Unbound(String),
}

/// Value of a closed term. Variables evaluate through zero-ary
/// interpretations when present, so `I.extend(x, d)` realizes the
/// classic assignment extension.
pub fn eval_term(t: &Term, i: &Structure) -> Result<ElemId, EvalError> {
    let mut ctx = Ctx { s: i, env: Vec::new(), scratch: Vec::new() };
    ctx.term(t)
}

/// Does `i` satisfy every sentence of `t`? `i` must interpret every
/// symbol occurring in `t`.
pub fn check_models(i: &Structure, t: &Theory) -> Result<bool, EvalError> {
    let mut ctx = Ctx { s: i, env: Vec::new(), scratch: Vec::new() };
    for s in &t.sentences {
        if !ctx.formula(s)? {
            return Ok(false);
        }
    }
    Ok(true)
}

struct Ctx<'a> {
    s: &'a Structure,
    env: Vec<(&'a str, ElemId)>,
    /// Argument scratch shared across the recursion; each call site
    /// only touches the slots it pushed.
    scratch: Vec<ElemId>,
}

impl<'a> Ctx<'a> {
    fn lookup(&self, v: &str) -> Option<ElemId> {
        self.env.iter().rev().find(|(name, _)| *name == v).map(|&(_, e)| e)
    }

    fn term(&mut self, t: &'a Term) -> Result<ElemId, EvalError> {
        match t {
            Term::Var(v) => {
                if let Some(e) = self.lookup(v) {
                    return Ok(e);
                }
                // A variable may be interpreted as a fresh constant.
                if let Some(g) = self.s.func(v) {
                    if let Some(&e) = g.get(&[][..]) {
                        return Ok(e);
                    }
                }
                Err(EvalError::Unbound(v.clone()))
            }
            Term::App { sym, args } => {
                let base = self.scratch.len();
                for a in args {
                    let e = self.term(a)?;
                    self.scratch.push(e);
                }
                let g = match self.s.func(sym) {
                    Some(g) => g,
                    None => {
                        self.scratch.truncate(base);
                        return Err(EvalError::Uninterpreted(sym.clone()));
                    }
                };
                let val = g.get(&self.scratch[base..]).copied();
                self.scratch.truncate(base);
                // Interpretations are total over the domain.
                val.ok_or_else(|| EvalError::Uninterpreted(sym.clone()))
            }
        }
    }

    fn formula(&mut self, f: &'a Formula) -> Result<bool, EvalError> {
        match f {
            Formula::Pred { sym, args } => {
                let base = self.scratch.len();
                for a in args {
                    let e = self.term(a)?;
                    self.scratch.push(e);
                }
                let rel = match self.s.rel(sym) {
                    Some(r) => r,
                    None => {
                        self.scratch.truncate(base);
                        return Err(EvalError::Uninterpreted(sym.clone()));
                    }
                };
                let holds = rel.contains(&self.scratch[base..]);
                self.scratch.truncate(base);
                Ok(holds)
            }
            Formula::Eq(a, b) => Ok(self.term(a)? == self.term(b)?),
            Formula::Not(g) => Ok(!self.formula(g)?),
            Formula::And(a, b) => Ok(self.formula(a)? && self.formula(b)?),
            Formula::Or(a, b) => Ok(self.formula(a)? || self.formula(b)?),
            Formula::Implies(a, b) => Ok(!self.formula(a)? || self.formula(b)?),
            Formula::Iff(a, b) => Ok(self.formula(a)? == self.formula(b)?),
            Formula::Forall(v, g) => {
                for e in 0..self.s.domain().size() as ElemId {
                    self.env.push((v.as_str(), e));
                    let holds = self.formula(g)?;
                    self.env.pop();
                    if !holds {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Formula::Exists(v, g) => {
                for e in 0..self.s.domain().size() as ElemId {
                    self.env.push((v.as_str(), e));
                    let holds = self.formula(g)?;
                    self.env.pop();
                    if holds {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
        }
    }
}
