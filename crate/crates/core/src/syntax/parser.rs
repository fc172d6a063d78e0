//! Recursive-descent parser for the ASCII surface syntax.
//!
//! ```text
//! formula = impl ;
//! impl    = disj ["->" impl] ;
//! disj    = conj {"|" conj} ;
//! conj    = unary {"&" unary} ;
//! unary   = "!" unary | "D{" vars "}" unary | "E{" vars "}" unary | atom ;
//! atom    = IDENT "(" vars ")" | "dep(" "{" vars "}" "," (IDENT | "{" vars "}") ")"
//!         | IDENT "=" IDENT | "inc(" tuple "," tuple ")" | "(" formula ")" ;
//! tuple   = IDENT | "(" vars ")" ;
//! vars    = [IDENT {"," IDENT}] ;
//! ```
//!
//! `|`, `->` and `E{X}` are desugared into `¬`, `∧` and `𝔻`.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::formula::Formula;
use super::vocab::{is_ident, PredId, Vocabulary};
use crate::error::{Error, Result};
use crate::vars::{Var, VarSet};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Bang,
    Amp,
    Pipe,
    Arrow,
    Equals,
    End,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'{' => Tok::LBrace,
            b'}' => Tok::RBrace,
            b',' => Tok::Comma,
            b'!' => Tok::Bang,
            b'&' => Tok::Amp,
            b'|' => Tok::Pipe,
            b'=' => Tok::Equals,
            b'-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    i += 1;
                    Tok::Arrow
                } else {
                    return Err(Error::Syntax {
                        pos: i,
                        msg: "expected `->`".into(),
                    });
                }
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
                continue;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(Error::Syntax {
                    pos: i,
                    msg: format!("unexpected character `{ch}`"),
                });
            }
        };
        i += 1;
        out.push((tok, start));
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

/// Name-level syntax tree, before symbol resolution.
#[derive(Debug, Clone)]
enum Raw {
    Pred(String, Vec<(String, usize)>, usize),
    Eq((String, usize), (String, usize)),
    Incl(Vec<(String, usize)>, Vec<(String, usize)>),
    Dep(Vec<(String, usize)>, Vec<(String, usize)>),
    Not(Box<Raw>),
    And(Box<Raw>, Box<Raw>),
    Or(Box<Raw>, Box<Raw>),
    Imp(Box<Raw>, Box<Raw>),
    Quant(Vec<(String, usize)>, Box<Raw>),
    Exists(Vec<(String, usize)>, Box<Raw>),
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek2(&self) -> &Tok {
        let i = (self.pos + 1).min(self.toks.len() - 1);
        &self.toks[i].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            pos: self.offset(),
            msg: msg.into(),
        })
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<()> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn ident(&mut self) -> Result<(String, usize)> {
        let at = self.offset();
        match self.bump() {
            Tok::Ident(s) => Ok((s, at)),
            _ => {
                self.pos -= 1;
                self.err("expected identifier")
            }
        }
    }

    fn vars(&mut self, close: Tok) -> Result<Vec<(String, usize)>> {
        let mut out = Vec::new();
        if *self.peek() == close {
            return Ok(out);
        }
        loop {
            out.push(self.ident()?);
            if *self.peek() == Tok::Comma {
                self.bump();
            } else {
                return Ok(out);
            }
        }
    }

    fn formula(&mut self) -> Result<Raw> {
        let lhs = self.disj()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.formula()?;
            return Ok(Raw::Imp(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn disj(&mut self) -> Result<Raw> {
        let mut lhs = self.conj()?;
        while *self.peek() == Tok::Pipe {
            self.bump();
            let rhs = self.conj()?;
            lhs = Raw::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn conj(&mut self) -> Result<Raw> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let rhs = self.unary()?;
            lhs = Raw::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Raw> {
        match (self.peek().clone(), self.peek2().clone()) {
            (Tok::Bang, _) => {
                self.bump();
                Ok(Raw::Not(Box::new(self.unary()?)))
            }
            (Tok::Ident(m), Tok::LBrace) if m == "D" || m == "E" => {
                self.bump();
                self.bump();
                let xs = self.vars(Tok::RBrace)?;
                self.expect(Tok::RBrace, "`}`")?;
                let body = Box::new(self.unary()?);
                Ok(if m == "D" {
                    Raw::Quant(xs, body)
                } else {
                    Raw::Exists(xs, body)
                })
            }
            _ => self.atom(),
        }
    }

    fn tuple(&mut self) -> Result<Vec<(String, usize)>> {
        if *self.peek() == Tok::LParen {
            self.bump();
            let vs = self.vars(Tok::RParen)?;
            self.expect(Tok::RParen, "`)`")?;
            Ok(vs)
        } else {
            Ok(alloc::vec![self.ident()?])
        }
    }

    fn atom(&mut self) -> Result<Raw> {
        let at = self.offset();
        match (self.peek().clone(), self.peek2().clone()) {
            (Tok::LParen, _) => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            (Tok::Ident(k), Tok::LParen) if k == "dep" => {
                self.bump();
                self.bump();
                self.expect(Tok::LBrace, "`{` opening the determining set")?;
                let xs = self.vars(Tok::RBrace)?;
                self.expect(Tok::RBrace, "`}`")?;
                self.expect(Tok::Comma, "`,`")?;
                let ys = if *self.peek() == Tok::LBrace {
                    let brace = self.offset();
                    self.bump();
                    let ys = self.vars(Tok::RBrace)?;
                    self.expect(Tok::RBrace, "`}`")?;
                    if ys.is_empty() {
                        return Err(Error::Syntax {
                            pos: brace,
                            msg: "dependence atom needs at least one dependent variable".into(),
                        });
                    }
                    ys
                } else {
                    alloc::vec![self.ident()?]
                };
                self.expect(Tok::RParen, "`)`")?;
                Ok(Raw::Dep(xs, ys))
            }
            (Tok::Ident(k), Tok::LParen) if k == "inc" => {
                self.bump();
                self.bump();
                let xs = self.tuple()?;
                self.expect(Tok::Comma, "`,`")?;
                let ys = self.tuple()?;
                self.expect(Tok::RParen, "`)`")?;
                if xs.len() != ys.len() || xs.is_empty() {
                    return Err(Error::Syntax {
                        pos: at,
                        msg: "inclusion atom needs two non-empty tuples of equal length".into(),
                    });
                }
                Ok(Raw::Incl(xs, ys))
            }
            (Tok::Ident(_), Tok::LParen) => {
                let (name, _) = self.ident()?;
                self.bump();
                let args = self.vars(Tok::RParen)?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Raw::Pred(name, args, at))
            }
            (Tok::Ident(_), Tok::Equals) => {
                let x = self.ident()?;
                self.bump();
                let y = self.ident()?;
                Ok(Raw::Eq(x, y))
            }
            (Tok::End, _) => self.err("unexpected end of input"),
            _ => self.err("expected an atom, `!`, `D{`, `E{` or `(`"),
        }
    }
}

fn parse_raw(text: &str) -> Result<Raw> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let f = p.formula()?;
    if *p.peek() != Tok::End {
        return p.err("trailing input");
    }
    Ok(f)
}

trait Resolver {
    fn var(&mut self, name: &str, pos: usize) -> Result<Var>;
    fn pred(&mut self, name: &str, arity: usize, pos: usize) -> Result<PredId>;
}

struct Fixed<'a>(&'a Vocabulary);

impl Resolver for Fixed<'_> {
    fn var(&mut self, name: &str, _pos: usize) -> Result<Var> {
        self.0
            .var(name)
            .ok_or_else(|| Error::UnknownVariable(name.into()))
    }

    fn pred(&mut self, name: &str, arity: usize, _pos: usize) -> Result<PredId> {
        let p = self
            .0
            .pred(name)
            .ok_or_else(|| Error::UnknownPredicate(name.into()))?;
        if self.0.arity(p) != arity {
            return Err(Error::ArityMismatch {
                predicate: name.into(),
                expected: self.0.arity(p),
                found: arity,
            });
        }
        Ok(p)
    }
}

#[derive(Default)]
struct Inferring {
    vars: Vec<String>,
    preds: Vec<(String, usize)>,
}

impl Resolver for Inferring {
    fn var(&mut self, name: &str, _pos: usize) -> Result<Var> {
        if let Some(i) = self.vars.iter().position(|v| v == name) {
            return Ok(Var(i));
        }
        self.vars.push(name.into());
        Ok(Var(self.vars.len() - 1))
    }

    fn pred(&mut self, name: &str, arity: usize, pos: usize) -> Result<PredId> {
        if let Some(i) = self.preds.iter().position(|(p, _)| p == name) {
            if self.preds[i].1 != arity {
                return Err(Error::ArityMismatch {
                    predicate: name.into(),
                    expected: self.preds[i].1,
                    found: arity,
                });
            }
            return Ok(PredId(i));
        }
        if !is_ident(name) {
            return Err(Error::Syntax {
                pos,
                msg: format!("invalid predicate name `{name}`"),
            });
        }
        self.preds.push((name.into(), arity));
        Ok(PredId(self.preds.len() - 1))
    }
}

fn resolve(raw: &Raw, r: &mut impl Resolver) -> Result<Formula> {
    fn set(vs: &[(String, usize)], r: &mut impl Resolver) -> Result<VarSet> {
        vs.iter().map(|(n, p)| r.var(n, *p)).collect()
    }
    fn tuple(vs: &[(String, usize)], r: &mut impl Resolver) -> Result<Vec<Var>> {
        vs.iter().map(|(n, p)| r.var(n, *p)).collect()
    }
    Ok(match raw {
        Raw::Pred(name, args, pos) => {
            let p = r.pred(name, args.len(), *pos)?;
            Formula::Atom(p, tuple(args, r)?)
        }
        Raw::Eq((x, px), (y, py)) => Formula::Eq(r.var(x, *px)?, r.var(y, *py)?),
        Raw::Incl(xs, ys) => Formula::Incl(tuple(xs, r)?, tuple(ys, r)?),
        Raw::Dep(xs, ys) => {
            let x = set(xs, r)?;
            let mut conj: Option<Formula> = None;
            for (name, pos) in ys {
                let atom = Formula::Dep(x, r.var(name, *pos)?);
                conj = Some(match conj {
                    None => atom,
                    Some(c) => Formula::and(c, atom),
                });
            }
            conj.expect("parser guarantees a dependent variable")
        }
        Raw::Not(f) => Formula::not(resolve(f, r)?),
        Raw::And(a, b) => Formula::and(resolve(a, r)?, resolve(b, r)?),
        Raw::Or(a, b) => Formula::or(resolve(a, r)?, resolve(b, r)?),
        Raw::Imp(a, b) => Formula::implies(resolve(a, r)?, resolve(b, r)?),
        Raw::Quant(xs, f) => {
            let x = set(xs, r)?;
            Formula::quant(x, resolve(f, r)?)
        }
        Raw::Exists(xs, f) => {
            let x = set(xs, r)?;
            Formula::exists(x, resolve(f, r)?)
        }
    })
}

/// Parse `text` against a fixed vocabulary.
pub fn parse_formula(text: &str, vocab: &Vocabulary) -> Result<Formula> {
    let raw = parse_raw(text)?;
    resolve(&raw, &mut Fixed(vocab))
}

/// Parse `text`, inferring the vocabulary from its symbols: variables in
/// order of first occurrence, predicates with the arity of their first use.
pub fn parse_formula_infer(text: &str) -> Result<(Vocabulary, Formula)> {
    let raw = parse_raw(text)?;
    let mut inf = Inferring::default();
    let f = resolve(&raw, &mut inf)?;
    let vocab = Vocabulary::new(inf.vars, inf.preds)?;
    Ok((vocab, f))
}
