//! Parser for the problem source format.
//!
//! ```text
//! problem   := vocab domain theory structure [order]
//! vocab     := "vocab" "{" (("pred" | "func") NAME "/" INT ("input" | "output"))* "}"
//! domain    := "domain" "=" "{" NAME+ "}"
//! theory    := "theory" "{" (formula ".")* "}"
//! structure := "structure" "{" (NAME "=" "{" (tuple | tuple "->" NAME)* "}")* "}"
//! order     := "order" "=" "{" NAME+ "}"
//!
//! formula   := ("!" | "?") NAME+ ":" formula | iff
//! iff       := impl ("<=>" impl)*
//! impl      := or ("=>" impl)?
//! or        := and ("|" and)*
//! and       := unary ("&" unary)*
//! unary     := "~" unary | "(" formula ")" | quantified | atom
//! atom      := term (("=" | "~=") term)?
//! term      := NAME | NAME "(" term ("," term)* ")"
//! tuple     := NAME | "(" ")" | "(" NAME ("," NAME)* ")"
//! ```
//!
//! `//` starts a line comment. Names match `[A-Za-z_][A-Za-z0-9_]*`;
//! the character `#` is reserved for generated symbol copies and is
//! rejected in declarations. `t1 ~= t2` is shorthand for `~(t1 = t2)`.
//! Quantifier bodies extend as far right as possible. Binders may not
//! shadow declared symbols. An input predicate without a structure
//! entry is interpreted as empty; input functions must be total.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use super::ast::{Formula, Symbol, SymbolIo, SymbolKind, Term, Theory, Vocabulary};
use super::rename::rename_apart;
use super::structure::{Domain, FuncGraph, Relation, Structure};
use super::Problem;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("{line}:{col}: {msg}")]
pub struct ParseError {
    pub line: u32,
    pub col: u32,
    pub msg: String,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Tok {
    Ident,
    Int,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Slash,
    Dot,
    Bang,
    Question,
    Amp,
    Pipe,
    Tilde,
    Eq,
    Neq,
    Implies,
    Iff,
    Arrow,
    Colon,
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    text: String,
    line: u32,
    col: u32,
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut toks = Vec::new();
    let mut line: u32 = 1;
    let mut col: u32 = 1;
    let mut chars = src.chars().peekable();
    macro_rules! bump {
        () => {{
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        }};
    }
    while let Some(&c) = chars.peek() {
        let (tl, tc) = (line, col);
        let mut push = |tok: Tok, text: String| toks.push(Token { tok, text, line: tl, col: tc });
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                bump!();
            }
            '/' => {
                bump!();
                if chars.peek() == Some(&'/') {
                    while let Some(&c) = chars.peek() {
                        if c == '\n' {
                            break;
                        }
                        bump!();
                    }
                } else {
                    push(Tok::Slash, "/".into());
                }
            }
            '{' => {
                bump!();
                push(Tok::LBrace, "{".into());
            }
            '}' => {
                bump!();
                push(Tok::RBrace, "}".into());
            }
            '(' => {
                bump!();
                push(Tok::LParen, "(".into());
            }
            ')' => {
                bump!();
                push(Tok::RParen, ")".into());
            }
            ',' => {
                bump!();
                push(Tok::Comma, ",".into());
            }
            '.' => {
                bump!();
                push(Tok::Dot, ".".into());
            }
            '!' => {
                bump!();
                push(Tok::Bang, "!".into());
            }
            '?' => {
                bump!();
                push(Tok::Question, "?".into());
            }
            '&' => {
                bump!();
                push(Tok::Amp, "&".into());
            }
            '|' => {
                bump!();
                push(Tok::Pipe, "|".into());
            }
            ':' => {
                bump!();
                push(Tok::Colon, ":".into());
            }
            '~' => {
                bump!();
                if chars.peek() == Some(&'=') {
                    bump!();
                    push(Tok::Neq, "~=".into());
                } else {
                    push(Tok::Tilde, "~".into());
                }
            }
            '=' => {
                bump!();
                if chars.peek() == Some(&'>') {
                    bump!();
                    push(Tok::Implies, "=>".into());
                } else {
                    push(Tok::Eq, "=".into());
                }
            }
            '<' => {
                bump!();
                if chars.peek() == Some(&'=') {
                    bump!();
                    if chars.peek() == Some(&'>') {
                        bump!();
                        push(Tok::Iff, "<=>".into());
                    } else {
                        return Err(ParseError { line: tl, col: tc, msg: "expected `<=>`".into() });
                    }
                } else {
                    return Err(ParseError { line: tl, col: tc, msg: "expected `<=>`".into() });
                }
            }
            '-' => {
                bump!();
                if chars.peek() == Some(&'>') {
                    bump!();
                    push(Tok::Arrow, "->".into());
                } else {
                    return Err(ParseError { line: tl, col: tc, msg: "expected `->`".into() });
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' || c == '#' {
                        s.push(bump!());
                    } else {
                        break;
                    }
                }
                push(Tok::Ident, s);
            }
            c if c.is_ascii_digit() => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_digit() {
                        s.push(bump!());
                    } else {
                        break;
                    }
                }
                push(Tok::Int, s);
            }
            c => {
                return Err(ParseError { line, col, msg: format!("unexpected character `{c}`") });
            }
        }
    }
    toks.push(Token { tok: Tok::Eof, text: String::new(), line, col });
    Ok(toks)
}

struct Parser {
    toks: Vec<Token>,
    at: usize,
    vocab: Vocabulary,
    scope: Vec<String>,
}

/// Structure entry before element interning.
struct RawEntry {
    sym: String,
    line: u32,
    col: u32,
    tuples: Vec<Vec<String>>,
    maplets: Vec<(Vec<String>, String)>,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.at]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.at].clone();
        if t.tok != Tok::Eof {
            self.at += 1;
        }
        t
    }

    fn err<T>(&self, tok: &Token, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { line: tok.line, col: tok.col, msg: msg.into() })
    }

    fn err_here<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let t = self.peek().clone();
        self.err(&t, msg)
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<Token, ParseError> {
        if self.peek().tok == tok {
            Ok(self.next())
        } else {
            let found = if self.peek().tok == Tok::Eof {
                "end of input".to_string()
            } else {
                format!("`{}`", self.peek().text)
            };
            self.err_here(format!("expected {what}, found {found}"))
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        let t = self.expect(Tok::Ident, &format!("`{kw}`"))?;
        if t.text != kw {
            return self.err(&t, format!("expected `{kw}`, found `{}`", t.text));
        }
        Ok(())
    }

    fn ident(&mut self, what: &str) -> Result<Token, ParseError> {
        self.expect(Tok::Ident, what)
    }

    /// A name usable in declarations: `#` is reserved for copies.
    fn declared_name(&mut self, what: &str) -> Result<Token, ParseError> {
        let t = self.ident(what)?;
        if t.text.contains('#') {
            return self.err(&t, format!("`#` is reserved for generated copies: `{}`", t.text));
        }
        Ok(t)
    }

    fn vocab_section(&mut self) -> Result<(), ParseError> {
        self.expect_keyword("vocab")?;
        self.expect(Tok::LBrace, "`{`")?;
        while self.peek().tok == Tok::Ident {
            let kw = self.next();
            let kind = match kw.text.as_str() {
                "pred" => SymbolKind::Pred,
                "func" => SymbolKind::Func,
                other => return self.err(&kw, format!("expected `pred` or `func`, found `{other}`")),
            };
            let name = self.declared_name("symbol name")?;
            self.expect(Tok::Slash, "`/`")?;
            let arity_tok = self.expect(Tok::Int, "arity")?;
            let arity: usize = match arity_tok.text.parse() {
                Ok(a) => a,
                Err(_) => return self.err(&arity_tok, "arity out of range"),
            };
            let io_tok = self.ident("`input` or `output`")?;
            let io = match io_tok.text.as_str() {
                "input" => SymbolIo::Input,
                "output" => SymbolIo::Output,
                other => return self.err(&io_tok, format!("expected `input` or `output`, found `{other}`")),
            };
            let sym = Symbol { name: name.text.clone(), arity, kind, io };
            if self.vocab.declare(sym).is_err() {
                return self.err(&name, format!("symbol `{}` declared twice", name.text));
            }
        }
        self.expect(Tok::RBrace, "`}`")?;
        Ok(())
    }

    fn name_set(&mut self, section: &str) -> Result<Vec<Token>, ParseError> {
        self.expect_keyword(section)?;
        self.expect(Tok::Eq, "`=`")?;
        self.expect(Tok::LBrace, "`{`")?;
        let mut names = Vec::new();
        while self.peek().tok == Tok::Ident {
            names.push(self.declared_name("element name")?);
        }
        self.expect(Tok::RBrace, "`}`")?;
        Ok(names)
    }

    fn theory_section(&mut self) -> Result<Theory, ParseError> {
        self.expect_keyword("theory")?;
        self.expect(Tok::LBrace, "`{`")?;
        let mut sentences = Vec::new();
        while self.peek().tok != Tok::RBrace && self.peek().tok != Tok::Eof {
            let f = self.formula()?;
            self.expect(Tok::Dot, "`.`")?;
            sentences.push(f);
        }
        self.expect(Tok::RBrace, "`}`")?;
        Ok(Theory::new(sentences))
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        match self.peek().tok {
            Tok::Bang | Tok::Question => self.quantified(),
            _ => self.iff(),
        }
    }

    fn quantified(&mut self) -> Result<Formula, ParseError> {
        let q = self.next();
        let mut binders = Vec::new();
        while self.peek().tok == Tok::Ident {
            let t = self.declared_name("variable")?;
            if self.vocab.get(&t.text).is_some() {
                return self.err(&t, format!("binder `{}` shadows a declared symbol", t.text));
            }
            binders.push(t.text);
        }
        if binders.is_empty() {
            return self.err_here("expected at least one variable");
        }
        self.expect(Tok::Colon, "`:`")?;
        let depth = self.scope.len();
        self.scope.extend(binders.iter().cloned());
        let body = self.formula()?;
        self.scope.truncate(depth);
        let mut f = body;
        for v in binders.into_iter().rev() {
            f = match q.tok {
                Tok::Bang => Formula::forall(&v, f),
                _ => Formula::exists(&v, f),
            };
        }
        Ok(f)
    }

    fn iff(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.implication()?;
        while self.peek().tok == Tok::Iff {
            self.next();
            let rhs = self.implication()?;
            f = Formula::iff(f, rhs);
        }
        Ok(f)
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let f = self.disjunction()?;
        if self.peek().tok == Tok::Implies {
            self.next();
            let rhs = self.implication()?;
            return Ok(Formula::implies(f, rhs));
        }
        Ok(f)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.conjunction()?;
        while self.peek().tok == Tok::Pipe {
            self.next();
            let rhs = self.conjunction()?;
            f = Formula::or(f, rhs);
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.unary()?;
        while self.peek().tok == Tok::Amp {
            self.next();
            let rhs = self.unary()?;
            f = Formula::and(f, rhs);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().tok {
            Tok::Tilde => {
                self.next();
                Ok(Formula::not(self.unary()?))
            }
            Tok::LParen => {
                self.next();
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::Bang | Tok::Question => self.quantified(),
            Tok::Ident => self.atom(),
            _ => self.err_here(format!("expected a formula, found `{}`", self.peek().text)),
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        let head = self.ident("a formula")?;
        let mut args = Vec::new();
        let applied = self.peek().tok == Tok::LParen;
        if applied {
            self.next();
            loop {
                args.push(self.term()?);
                if self.peek().tok == Tok::Comma {
                    self.next();
                } else {
                    break;
                }
            }
            self.expect(Tok::RParen, "`)`")?;
        }
        if self.peek().tok == Tok::Eq || self.peek().tok == Tok::Neq {
            let negated = self.next().tok == Tok::Neq;
            let lhs = self.resolve_term(&head, args, applied)?;
            let rhs = self.term()?;
            let eq = Formula::Eq(lhs, rhs);
            return Ok(if negated { Formula::not(eq) } else { eq });
        }
        if !applied && self.scope.iter().any(|v| v == &head.text) {
            return self.err(&head, format!("variable `{}` used as a formula", head.text));
        }
        match self.vocab.get(&head.text) {
            Some(s) if s.kind == SymbolKind::Pred => {
                if s.arity != args.len() {
                    return self.err(
                        &head,
                        format!("`{}` has arity {}, applied to {} arguments", head.text, s.arity, args.len()),
                    );
                }
                Ok(Formula::Pred { sym: head.text, args })
            }
            Some(_) => self.err(&head, format!("function `{}` used as a formula", head.text)),
            None => self.err(&head, format!("undeclared symbol `{}`", head.text)),
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let name = self.ident("a term")?;
        let mut args = Vec::new();
        let applied = self.peek().tok == Tok::LParen;
        if applied {
            self.next();
            loop {
                args.push(self.term()?);
                if self.peek().tok == Tok::Comma {
                    self.next();
                } else {
                    break;
                }
            }
            self.expect(Tok::RParen, "`)`")?;
        }
        self.resolve_term(&name, args, applied)
    }

    /// A parsed name with arguments, required to denote a term: a bound
    /// variable or a function application of matching arity.
    fn resolve_term(&self, name: &Token, args: Vec<Term>, applied: bool) -> Result<Term, ParseError> {
        if !applied && self.scope.iter().any(|v| v == &name.text) {
            return Ok(Term::Var(name.text.clone()));
        }
        match self.vocab.get(&name.text) {
            Some(s) if s.kind == SymbolKind::Func => {
                if s.arity != args.len() {
                    return self.err(
                        name,
                        format!("`{}` has arity {}, applied to {} arguments", name.text, s.arity, args.len()),
                    );
                }
                Ok(Term::App { sym: name.text.clone(), args })
            }
            Some(_) => self.err(name, format!("predicate `{}` used as a term", name.text)),
            None => self.err(name, format!("undeclared symbol `{}`", name.text)),
        }
    }

    fn structure_section(&mut self) -> Result<Vec<RawEntry>, ParseError> {
        self.expect_keyword("structure")?;
        self.expect(Tok::LBrace, "`{`")?;
        let mut entries = Vec::new();
        while self.peek().tok == Tok::Ident {
            let name = self.ident("symbol name")?;
            self.expect(Tok::Eq, "`=`")?;
            self.expect(Tok::LBrace, "`{`")?;
            let mut entry = RawEntry {
                sym: name.text.clone(),
                line: name.line,
                col: name.col,
                tuples: Vec::new(),
                maplets: Vec::new(),
            };
            while self.peek().tok == Tok::Ident || self.peek().tok == Tok::LParen {
                let tuple = self.raw_tuple()?;
                if self.peek().tok == Tok::Arrow {
                    self.next();
                    let val = self.ident("element name")?;
                    entry.maplets.push((tuple, val.text));
                } else {
                    entry.tuples.push(tuple);
                }
            }
            self.expect(Tok::RBrace, "`}`")?;
            entries.push(entry);
        }
        self.expect(Tok::RBrace, "`}`")?;
        Ok(entries)
    }

    fn raw_tuple(&mut self) -> Result<Vec<String>, ParseError> {
        if self.peek().tok == Tok::Ident {
            return Ok(vec![self.next().text]);
        }
        self.expect(Tok::LParen, "`(`")?;
        let mut parts = Vec::new();
        if self.peek().tok != Tok::RParen {
            loop {
                parts.push(self.ident("element name")?.text);
                if self.peek().tok == Tok::Comma {
                    self.next();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RParen, "`)`")?;
        Ok(parts)
    }
}

pub fn parse_problem(src: &str) -> Result<Problem, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, at: 0, vocab: Vocabulary::new(), scope: Vec::new() };

    p.vocab_section()?;
    let domain_names = p.name_set("domain")?;
    if domain_names.is_empty() {
        return p.err_here("domain must not be empty");
    }
    for t in &domain_names {
        if p.vocab.get(&t.text).is_some() {
            return p.err(t, format!("domain element `{}` shadows a declared symbol", t.text));
        }
    }
    let theory = p.theory_section()?;
    let entries = p.structure_section()?;
    let order = if p.peek().tok == Tok::Ident && p.peek().text == "order" {
        Some(p.name_set("order")?)
    } else {
        None
    };
    let eof = p.peek().clone();
    if eof.tok != Tok::Eof {
        return p.err(&eof, format!("unexpected `{}` after problem", eof.text));
    }

    let names: Vec<String> = domain_names.iter().map(|t| t.text.clone()).collect();
    let domain = match &order {
        Some(toks) => {
            let order_names: Vec<String> = toks.iter().map(|t| t.text.clone()).collect();
            Domain::with_order(names, &order_names)
        }
        None => Domain::new(names),
    };
    let domain = match domain {
        Ok(d) => d,
        Err(e) => {
            let at = order.as_ref().and_then(|o| o.first()).or(domain_names.first()).unwrap();
            return p.err(at, e.to_string());
        }
    };

    // Intern the structure entries.
    let mut input = Structure::new(domain.clone());
    let mut seen: BTreeMap<String, ()> = BTreeMap::new();
    for entry in &entries {
        let here = Token { tok: Tok::Ident, text: entry.sym.clone(), line: entry.line, col: entry.col };
        let sym = match p.vocab.get(&entry.sym) {
            Some(s) => s.clone(),
            None => return p.err(&here, format!("undeclared symbol `{}`", entry.sym)),
        };
        if sym.io != SymbolIo::Input {
            return p.err(&here, format!("structure interprets output symbol `{}`", entry.sym));
        }
        if seen.insert(entry.sym.clone(), ()).is_some() {
            return p.err(&here, format!("symbol `{}` interpreted twice", entry.sym));
        }
        let intern = |parts: &[String]| -> Result<Vec<u32>, ParseError> {
            parts
                .iter()
                .map(|n| {
                    domain.id(n).ok_or(ParseError {
                        line: entry.line,
                        col: entry.col,
                        msg: format!("`{n}` is not a domain element"),
                    })
                })
                .collect()
        };
        match sym.kind {
            SymbolKind::Pred => {
                if !entry.maplets.is_empty() {
                    return p.err(&here, format!("predicate `{}` interpreted with `->`", entry.sym));
                }
                let mut rel = Relation::new();
                for t in &entry.tuples {
                    if t.len() != sym.arity {
                        return p.err(&here, format!("tuple of width {} for `{}/{}`", t.len(), sym.name, sym.arity));
                    }
                    rel.insert(intern(t)?);
                }
                input.set_rel(&entry.sym, Arc::new(rel)).unwrap();
            }
            SymbolKind::Func => {
                if !entry.tuples.is_empty() {
                    return p.err(&here, format!("function `{}` needs `->` entries", entry.sym));
                }
                let mut graph = FuncGraph::new();
                for (t, v) in &entry.maplets {
                    if t.len() != sym.arity {
                        return p.err(&here, format!("tuple of width {} for `{}/{}`", t.len(), sym.name, sym.arity));
                    }
                    let key = intern(t)?;
                    let val = intern(std::slice::from_ref(v))?[0];
                    if graph.insert(key, val).is_some() {
                        return p.err(&here, format!("function `{}` maps a tuple twice", entry.sym));
                    }
                }
                let expected = (domain.size() as u64).checked_pow(sym.arity as u32);
                if Some(graph.len() as u64) != expected {
                    return p.err(&here, format!("input function `{}` is not total", entry.sym));
                }
                input.set_func(&entry.sym, Arc::new(graph)).unwrap();
            }
        }
    }
    // Inputs without an entry: empty predicates are fine, functions are not.
    for sym in p.vocab.inputs() {
        if input.interprets(&sym.name) {
            continue;
        }
        match sym.kind {
            SymbolKind::Pred => {
                input.set_rel(&sym.name, Arc::new(Relation::new())).unwrap();
            }
            SymbolKind::Func => {
                return Err(ParseError {
                    line: 1,
                    col: 1,
                    msg: format!("input function `{}` has no interpretation", sym.name),
                });
            }
        }
    }

    if p.vocab.outputs().next().is_none() {
        return Err(ParseError { line: 1, col: 1, msg: "vocabulary declares no output symbol".into() });
    }

    let theory = rename_apart(&theory);
    Ok(Problem { vocab: p.vocab, theory, input })
}
