//! Reader for the printed phrase notation.
//!
//! Parsing is type-directed: every primitive prints all of its type-level
//! arguments, so the parameter types of a lambda in an argument slot are
//! known from the signature. The result still has unresolved inference
//! state only where the text itself says so; callers run the checker.

use super::signatures::signature;
use super::{DArg, DKind, Phrase, PhraseType, Rw};
use crate::expr::{Ident, Literal};
use crate::parse::{Cursor, ParseError, Tok};
use crate::types::AddressSpace;

pub(crate) fn parse_kind(c: &mut Cursor) -> Result<DKind, ParseError> {
    let k = c.ident()?;
    match k.as_str() {
        "Nat" => Ok(DKind::Nat),
        "DataType" => Ok(DKind::Data),
        "AddrSp" | "AddressSpace" => Ok(DKind::Addr),
        "ReadWrite" => Ok(DKind::Rw),
        other => Err(c.error(format!("unknown kind `{other}`"))),
    }
}

fn parse_rw(c: &mut Cursor) -> Result<Rw, ParseError> {
    let w = c.ident()?;
    Ok(match w.as_str() {
        "Rd" => Rw::Rd,
        "Wr" => Rw::Wr,
        _ => Rw::Var(w),
    })
}

pub(crate) fn parse_phrase_type_at(c: &mut Cursor) -> Result<PhraseType, ParseError> {
    let lhs = pair_type(c)?;
    if c.eat(&Tok::Arrow) {
        Ok(PhraseType::fun(lhs, parse_phrase_type_at(c)?))
    } else {
        Ok(lhs)
    }
}

fn pair_type(c: &mut Cursor) -> Result<PhraseType, ParseError> {
    let a = atom_type(c)?;
    if c.is_ident("x") {
        c.bump();
        let b = pair_type(c)?;
        return Ok(PhraseType::Pair(Box::new(a), Box::new(b)));
    }
    Ok(a)
}

fn atom_type(c: &mut Cursor) -> Result<PhraseType, ParseError> {
    if c.eat(&Tok::LParen) {
        if matches!(c.peek(), Tok::Ident(_)) && matches!(c.peek_at(1), Tok::Colon) {
            let param = c.ident()?;
            c.expect(&Tok::Colon)?;
            let kind = parse_kind(c)?;
            c.expect(&Tok::RParen)?;
            c.expect(&Tok::Arrow)?;
            let body = parse_phrase_type_at(c)?;
            return Ok(PhraseType::DepFun {
                kind,
                param,
                body: Box::new(body),
            });
        }
        let t = parse_phrase_type_at(c)?;
        c.expect(&Tok::RParen)?;
        return Ok(t);
    }
    let head = c.ident()?;
    match head.as_str() {
        "Exp" => {
            c.expect(&Tok::LBracket)?;
            let d = c.data_type()?;
            c.expect(&Tok::Comma)?;
            let rw = parse_rw(c)?;
            c.expect(&Tok::RBracket)?;
            Ok(PhraseType::Exp(d, rw))
        }
        "Acc" => {
            c.expect(&Tok::LBracket)?;
            let d = c.data_type()?;
            c.expect(&Tok::RBracket)?;
            Ok(PhraseType::Acc(d))
        }
        "Comm" => Ok(PhraseType::Comm),
        other => Err(c.error(format!("expected a phrase type, found `{other}`"))),
    }
}

pub fn parse_phrase_type(src: &str) -> Result<PhraseType, ParseError> {
    let mut c = Cursor::new(src)?;
    let t = parse_phrase_type_at(&mut c)?;
    c.finish()?;
    Ok(t)
}

/// Parses a phrase whose free identifiers are `free`.
pub fn parse_phrase(src: &str, free: &[(Ident, PhraseType)]) -> Result<Phrase, ParseError> {
    let mut p = Reader {
        c: Cursor::new(src)?,
        scope: free.to_vec(),
    };
    let out = p.phrase(None)?;
    p.c.finish()?;
    Ok(out)
}

struct Reader {
    c: Cursor,
    scope: Vec<(Ident, PhraseType)>,
}

impl Reader {
    fn lookup(&self, name: &str) -> Option<&(Ident, PhraseType)> {
        self.scope.iter().rev().find(|(i, _)| i.name == name)
    }

    fn phrase(&mut self, expected: Option<&PhraseType>) -> Result<Phrase, ParseError> {
        let first = self.assign(expected)?;
        if self.c.eat(&Tok::Semi) {
            let rest = self.phrase(Some(&PhraseType::Comm))?;
            return Ok(first.seq(rest));
        }
        Ok(first)
    }

    fn assign(&mut self, expected: Option<&PhraseType>) -> Result<Phrase, ParseError> {
        let lhs = self.arith(expected)?;
        if self.c.eat(&Tok::Eq) {
            let PhraseType::Acc(dt) = lhs.ty.clone() else {
                return Err(self
                    .c
                    .error(format!("left of `=` must be an acceptor, found {}", lhs.ty)));
            };
            let rhs = self.arith(Some(&PhraseType::Exp(dt.clone(), Rw::Rd)))?;
            return Ok(Phrase::prim("assign", vec![DArg::Data(dt)], vec![lhs, rhs]));
        }
        Ok(lhs)
    }

    fn binop(&self, tag: &str, a: Phrase, b: Phrase) -> Result<Phrase, ParseError> {
        let dt = a.ty.data().cloned().ok_or_else(|| {
            self.c
                .error(format!("operand of `{tag}` is not an expression"))
        })?;
        Ok(Phrase::prim(tag, vec![DArg::Data(dt)], vec![a, b]))
    }

    fn arith(&mut self, expected: Option<&PhraseType>) -> Result<Phrase, ParseError> {
        let mut acc = self.term(expected)?;
        loop {
            let tag = if self.c.eat(&Tok::Plus) {
                "add"
            } else if self.c.eat(&Tok::Minus) {
                "sub"
            } else {
                return Ok(acc);
            };
            let rhs = self.term(None)?;
            acc = self.binop(tag, acc, rhs)?;
        }
    }

    fn term(&mut self, expected: Option<&PhraseType>) -> Result<Phrase, ParseError> {
        let mut acc = self.app(expected)?;
        while self.c.eat(&Tok::Star) {
            let rhs = self.app(None)?;
            acc = self.binop("mul", acc, rhs)?;
        }
        Ok(acc)
    }

    fn app(&mut self, expected: Option<&PhraseType>) -> Result<Phrase, ParseError> {
        let mut f = self.atom(expected)?;
        while self.c.eat(&Tok::LParen) {
            f = match f.ty.clone() {
                PhraseType::Fun(a, _) => {
                    let arg = self.phrase(Some(&a))?;
                    f.app(arg)
                }
                PhraseType::DepFun { kind, .. } => {
                    let arg = self.darg(kind)?;
                    f.dep_app(arg)
                }
                other => {
                    return Err(self
                        .c
                        .error(format!("cannot apply a phrase of type {other}")))
                }
            };
            self.c.expect(&Tok::RParen)?;
        }
        Ok(f)
    }

    fn darg(&mut self, kind: DKind) -> Result<DArg, ParseError> {
        Ok(match kind {
            DKind::Nat => DArg::Nat(self.c.nat()?),
            DKind::Data => DArg::Data(self.c.data_type()?),
            DKind::Rw => DArg::Rw(parse_rw(&mut self.c)?),
            DKind::Addr => {
                let a = self.c.ident()?;
                DArg::Addr(
                    AddressSpace::parse(&a)
                        .ok_or_else(|| self.c.error(format!("unknown address space `{a}`")))?,
                )
            }
        })
    }

    fn atom(&mut self, expected: Option<&PhraseType>) -> Result<Phrase, ParseError> {
        match self.c.peek().clone() {
            Tok::Float(text) => {
                self.c.bump();
                let value: f32 = text
                    .trim_end_matches('f')
                    .parse()
                    .map_err(|_| self.c.error(format!("bad float `{text}`")))?;
                Ok(Phrase::literal(Literal::F32 { text, value }))
            }
            Tok::I32(v) => {
                self.c.bump();
                Ok(Phrase::literal(Literal::I32(v)))
            }
            Tok::LParen => {
                self.c.bump();
                let p = self.phrase(expected)?;
                self.c.expect(&Tok::RParen)?;
                Ok(p)
            }
            Tok::Ident(name) => self.named(&name, expected),
            other => Err(self.c.error(format!("expected a phrase, found {other}"))),
        }
    }

    fn named(&mut self, name: &str, expected: Option<&PhraseType>) -> Result<Phrase, ParseError> {
        if let Some((id, ty)) = self.lookup(name).cloned() {
            self.c.bump();
            return Ok(Phrase::ident(&id, ty));
        }
        match name {
            "fun" => self.lambda(expected),
            "depFun" => self.dep_lambda(),
            "true" | "false" => {
                self.c.bump();
                Ok(Phrase::literal(Literal::Bool(name == "true")))
            }
            "if" => {
                self.c.bump();
                self.c.expect(&Tok::LParen)?;
                let lhs = self.c.nat()?;
                self.c.expect(&Tok::Less)?;
                let rhs = self.c.nat()?;
                self.c.expect(&Tok::RParen)?;
                let then = self.block()?;
                if !self.c.is_ident("else") {
                    return Err(self.c.error("expected `else`"));
                }
                self.c.bump();
                let els = self.block()?;
                Ok(Phrase::prim(
                    "if",
                    vec![DArg::Nat(lhs), DArg::Nat(rhs)],
                    vec![then, els],
                ))
            }
            "pair" => {
                self.c.bump();
                self.c.expect(&Tok::LParen)?;
                let a = self.phrase(None)?;
                self.c.expect(&Tok::Comma)?;
                let b = self.phrase(None)?;
                self.c.expect(&Tok::RParen)?;
                Ok(Phrase::pair(a, b))
            }
            "proj1" | "proj2" => {
                self.c.bump();
                self.c.expect(&Tok::LParen)?;
                let a = self.phrase(None)?;
                self.c.expect(&Tok::RParen)?;
                if !matches!(a.ty, PhraseType::Pair(..)) {
                    return Err(self
                        .c
                        .error(format!("`{name}` of a non-pair of type {}", a.ty)));
                }
                Ok(a.proj(name == "proj2"))
            }
            _ if signature(name).is_some() => self.prim(name),
            _ => Err(self.c.error(format!("unbound identifier `{name}`"))),
        }
    }

    fn block(&mut self) -> Result<Phrase, ParseError> {
        self.c.expect(&Tok::LBrace)?;
        let p = self.phrase(Some(&PhraseType::Comm))?;
        self.c.expect(&Tok::RBrace)?;
        Ok(p)
    }

    fn prim(&mut self, tag: &str) -> Result<Phrase, ParseError> {
        let sig = signature(tag).expect("checked by caller");
        self.c.bump();
        self.c.expect(&Tok::LParen)?;
        let mut targs = Vec::new();
        let mut first = true;
        for (_, kind) in sig.type_params() {
            if !first {
                self.c.expect(&Tok::Comma)?;
            }
            first = false;
            targs.push(self.darg(kind)?);
        }
        let (params, _) = sig.instantiate(&targs).map_err(|m| self.c.error(m))?;
        let mut args = Vec::new();
        for (_, pty) in &params {
            if !first {
                self.c.expect(&Tok::Comma)?;
            }
            first = false;
            args.push(self.phrase(Some(pty))?);
        }
        self.c.expect(&Tok::RParen)?;
        Ok(Phrase::prim(tag, targs, args))
    }

    fn lambda(&mut self, expected: Option<&PhraseType>) -> Result<Phrase, ParseError> {
        self.c.bump();
        self.c.expect(&Tok::LParen)?;
        let mut raw: Vec<(String, Option<PhraseType>)> = Vec::new();
        let grouped = matches!(self.c.peek(), Tok::LParen);
        if grouped {
            self.c.bump();
        }
        loop {
            let name = self.c.ident()?;
            let ann = if self.c.eat(&Tok::Colon) {
                Some(parse_phrase_type_at(&mut self.c)?)
            } else {
                None
            };
            raw.push((name, ann));
            if !grouped || !self.c.eat(&Tok::Comma) {
                break;
            }
        }
        if grouped {
            self.c.expect(&Tok::RParen)?;
        }
        self.c.expect(&Tok::FatArrow)?;
        let mut remaining = expected.cloned();
        let mut params = Vec::new();
        for (name, ann) in raw {
            let (from_expected, rest) = match remaining.take() {
                Some(PhraseType::Fun(a, b)) => (Some(*a), Some(*b)),
                _ => (None, None),
            };
            let ty = ann.or(from_expected).ok_or_else(|| {
                self.c
                    .error(format!("cannot determine the type of parameter `{name}`"))
            })?;
            remaining = rest;
            params.push((Ident::fresh(name), ty));
        }
        let depth = self.scope.len();
        self.scope.extend(params.iter().cloned());
        let body = self.phrase(remaining.as_ref());
        self.scope.truncate(depth);
        let body = body?;
        self.c.expect(&Tok::RParen)?;
        Ok(params
            .into_iter()
            .rev()
            .fold(body, |b, (x, t)| Phrase::lambda(x, t, b)))
    }

    fn dep_lambda(&mut self) -> Result<Phrase, ParseError> {
        self.c.bump();
        self.c.expect(&Tok::LParen)?;
        let grouped = matches!(self.c.peek(), Tok::LParen);
        if grouped {
            self.c.bump();
        }
        let mut params = Vec::new();
        loop {
            let name = self.c.ident()?;
            self.c.expect(&Tok::Colon)?;
            params.push((name, parse_kind(&mut self.c)?));
            if !grouped || !self.c.eat(&Tok::Comma) {
                break;
            }
        }
        if grouped {
            self.c.expect(&Tok::RParen)?;
        }
        self.c.expect(&Tok::FatArrow)?;
        let body = self.phrase(None)?;
        self.c.expect(&Tok::RParen)?;
        Ok(params
            .into_iter()
            .rev()
            .fold(body, |b, (x, k)| Phrase::dep_lambda(k, x, b)))
    }
}
