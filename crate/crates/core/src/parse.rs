//! Surface syntax for RISE programs, types and Nat expressions.

use std::collections::HashMap;
use std::fmt;

use crate::expr::{Expr, ExprKind, Ident, Literal, Span};
use crate::nat::Nat;
use crate::primitives::Registry;
use crate::types::{AddressSpace, DataType, Kind, ScalarType, Type, TypeArg};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: u32,
    pub column: u32,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    Float(String),
    I32(i32),
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    Colon,
    Semi,
    Eq,
    FatArrow,
    Arrow,
    Pipe,
    Compose,
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    Caret,
    Less,
    At,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "identifier `{s}`"),
            Tok::Int(i) => return write!(f, "integer `{i}`"),
            Tok::Float(t) => return write!(f, "literal `{t}`"),
            Tok::I32(i) => return write!(f, "literal `{i}i32`"),
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Comma => ",",
            Tok::Colon => ":",
            Tok::Semi => ";",
            Tok::Eq => "=",
            Tok::FatArrow => "=>",
            Tok::Arrow => "->",
            Tok::Pipe => "|>",
            Tok::Compose => ">>",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::Percent => "%",
            Tok::Caret => "^",
            Tok::Less => "<",
            Tok::At => "@",
            Tok::Eof => return write!(f, "end of input"),
        };
        write!(f, "`{s}`")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

/// Splits source text into tokens. Backticks are skipped and `//`
/// comments run to the end of the line.
pub fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);
    let err = |line, column, message: String| ParseError {
        line,
        column,
        message,
    };
    while i < chars.len() {
        let c = chars[i];
        let span = Span { line, column: col };
        let advance = |n: usize, i: &mut usize, col: &mut u32| {
            *i += n;
            *col += n as u32;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() || c == '`' {
            advance(1, &mut i, &mut col);
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len()
                && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'')
            {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            col += (i - start) as u32;
            out.push(Token {
                tok: Tok::Ident(word),
                span,
            });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let mut is_float = false;
            if i + 1 < chars.len() && chars[i] == '.' && chars[i + 1].is_ascii_digit() {
                is_float = true;
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '-' || chars[j] == '+') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    is_float = true;
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let digits: String = chars[start..i].iter().collect();
            let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
            let tok = if chars.get(i) == Some(&'f') {
                i += 1;
                Tok::Float(format!("{digits}f"))
            } else if rest == "i32" {
                i += 3;
                let v = digits
                    .parse::<i32>()
                    .map_err(|e| err(line, col, format!("bad integer literal: {e}")))?;
                Tok::I32(v)
            } else if is_float {
                Tok::Float(digits.clone())
            } else {
                let v = digits
                    .parse::<i64>()
                    .map_err(|e| err(line, col, format!("bad integer literal: {e}")))?;
                Tok::Int(v)
            };
            if i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                return Err(err(line, col, format!("malformed number near `{digits}`")));
            }
            col += (i - start) as u32;
            out.push(Token { tok, span });
            continue;
        }
        let two: String = chars[i..chars.len().min(i + 2)].iter().collect();
        let (tok, len) = match two.as_str() {
            "=>" => (Tok::FatArrow, 2),
            "->" => (Tok::Arrow, 2),
            "|>" => (Tok::Pipe, 2),
            ">>" => (Tok::Compose, 2),
            _ => match c {
                '(' => (Tok::LParen, 1),
                ')' => (Tok::RParen, 1),
                '[' => (Tok::LBracket, 1),
                ']' => (Tok::RBracket, 1),
                '{' => (Tok::LBrace, 1),
                '}' => (Tok::RBrace, 1),
                ',' => (Tok::Comma, 1),
                ':' => (Tok::Colon, 1),
                ';' => (Tok::Semi, 1),
                '=' => (Tok::Eq, 1),
                '+' => (Tok::Plus, 1),
                '-' => (Tok::Minus, 1),
                '*' => (Tok::Star, 1),
                '/' => (Tok::Slash, 1),
                '%' => (Tok::Percent, 1),
                '^' => (Tok::Caret, 1),
                '<' => (Tok::Less, 1),
                '@' => (Tok::At, 1),
                other => return Err(err(line, col, format!("unexpected character `{other}`"))),
            },
        };
        advance(len, &mut i, &mut col);
        out.push(Token { tok, span });
    }
    out.push(Token {
        tok: Tok::Eof,
        span: Span { line, column: col },
    });
    Ok(out)
}

/// A parsed `.rise` file: an optional `def name =` and the body.
#[derive(Clone, Debug, PartialEq)]
pub struct Program {
    pub name: Option<String>,
    pub body: Expr,
}

/// Token cursor shared by the RISE, type, strategy and DPIA parsers.
pub struct Cursor {
    toks: Vec<Token>,
    pos: usize,
}

impl Cursor {
    pub fn new(src: &str) -> Result<Cursor, ParseError> {
        Ok(Cursor {
            toks: lex(src)?,
            pos: 0,
        })
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    pub fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    pub fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    pub fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub fn at_eof(&self) -> bool {
        matches!(self.peek(), Tok::Eof)
    }

    pub fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn error(&self, message: impl Into<String>) -> ParseError {
        let sp = self.span();
        ParseError {
            line: sp.line,
            column: sp.column,
            message: message.into(),
        }
    }

    pub fn expect(&mut self, t: &Tok) -> Result<(), ParseError> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(self.error(format!("expected {t}, found {}", self.peek())))
        }
    }

    pub fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            other => Err(self.error(format!("expected identifier, found {other}"))),
        }
    }

    pub fn is_ident(&self, name: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == name)
    }

    pub fn finish(&self) -> Result<(), ParseError> {
        if self.at_eof() {
            Ok(())
        } else {
            Err(self.error(format!("unexpected {} after end of input", self.peek())))
        }
    }

    // ---- Nat expressions ----

    pub fn nat(&mut self) -> Result<Nat, ParseError> {
        let mut acc = self.nat_term()?;
        loop {
            if self.eat(&Tok::Plus) {
                acc = acc.add(self.nat_term()?);
            } else if self.eat(&Tok::Minus) {
                acc = acc.sub(self.nat_term()?);
            } else {
                return Ok(acc.normalize());
            }
        }
    }

    fn nat_term(&mut self) -> Result<Nat, ParseError> {
        let mut acc = self.nat_pow()?;
        loop {
            if self.eat(&Tok::Star) {
                acc = acc.mul(self.nat_pow()?);
            } else if self.eat(&Tok::Slash) {
                acc = acc.div(self.nat_pow()?);
            } else if self.eat(&Tok::Percent)
                || (self.is_ident("mod") && {
                    self.bump();
                    true
                })
            {
                acc = acc.rem(self.nat_pow()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn nat_pow(&mut self) -> Result<Nat, ParseError> {
        let base = self.nat_atom()?;
        if self.eat(&Tok::Caret) {
            Ok(base.pow(self.nat_pow()?))
        } else {
            Ok(base)
        }
    }

    fn nat_atom(&mut self) -> Result<Nat, ParseError> {
        match self.peek().clone() {
            Tok::Int(i) => {
                self.bump();
                Ok(Nat::Const(i))
            }
            Tok::Ident(s) => {
                self.bump();
                Ok(Nat::Var(s))
            }
            Tok::Minus => {
                self.bump();
                Ok(Nat::Const(-1).mul(self.nat_atom()?))
            }
            Tok::LParen => {
                self.bump();
                let n = self.nat()?;
                self.expect(&Tok::RParen)?;
                Ok(n)
            }
            other => Err(self.error(format!("expected Nat expression, found {other}"))),
        }
    }

    // ---- types ----

    pub fn kind(&mut self) -> Result<Kind, ParseError> {
        let k = self.ident()?;
        match k.as_str() {
            "Nat" => Ok(Kind::Nat),
            "DataType" => Ok(Kind::DataType),
            "AddrSp" | "AddressSpace" => Ok(Kind::AddressSpace),
            other => Err(self.error(format!("unknown kind `{other}`"))),
        }
    }

    pub fn data_type(&mut self) -> Result<DataType, ParseError> {
        let name = self.ident()?;
        match name.as_str() {
            "f32" => Ok(DataType::Scalar(ScalarType::F32)),
            "i32" => Ok(DataType::Scalar(ScalarType::I32)),
            "bool" => Ok(DataType::Scalar(ScalarType::Bool)),
            "Idx" => {
                self.expect(&Tok::LBracket)?;
                let n = self.nat()?;
                self.expect(&Tok::RBracket)?;
                Ok(DataType::Index(n))
            }
            "Array" => {
                self.expect(&Tok::LBracket)?;
                let n = self.nat()?;
                self.expect(&Tok::Comma)?;
                let e = self.data_type()?;
                self.expect(&Tok::RBracket)?;
                Ok(DataType::array(n, e))
            }
            "Tuple" => {
                self.expect(&Tok::LBracket)?;
                let a = self.data_type()?;
                self.expect(&Tok::Comma)?;
                let b = self.data_type()?;
                self.expect(&Tok::RBracket)?;
                Ok(DataType::tuple(a, b))
            }
            _ => Ok(DataType::Var(name)),
        }
    }

    /// `T -> T`, `(x: K) -> T`, `{x: K} -> T`, parenthesized types.
    pub fn ty(&mut self) -> Result<Type, ParseError> {
        let lhs = self.ty_atom()?;
        if let Some(binder) = lhs.1 {
            // dependent binder already consumed
            self.expect(&Tok::Arrow)?;
            let body = self.ty()?;
            let (param, kind, implicit) = binder;
            return Ok(Type::DepFun {
                kind,
                param,
                implicit,
                body: Box::new(body),
            });
        }
        if self.eat(&Tok::Arrow) {
            let rhs = self.ty()?;
            Ok(Type::fun(lhs.0, rhs))
        } else {
            Ok(lhs.0)
        }
    }

    #[allow(clippy::type_complexity)]
    fn ty_atom(&mut self) -> Result<(Type, Option<(String, Kind, bool)>), ParseError> {
        let is_binder = |c: &Cursor| {
            matches!(c.peek_at(1), Tok::Ident(_)) && matches!(c.peek_at(2), Tok::Colon)
        };
        match self.peek() {
            Tok::LBrace => {
                self.bump();
                let p = self.ident()?;
                self.expect(&Tok::Colon)?;
                let k = self.kind()?;
                self.expect(&Tok::RBrace)?;
                Ok((Type::Var(String::new()), Some((p, k, true))))
            }
            Tok::LParen if is_binder(self) => {
                self.bump();
                let p = self.ident()?;
                self.expect(&Tok::Colon)?;
                let k = self.kind()?;
                self.expect(&Tok::RParen)?;
                Ok((Type::Var(String::new()), Some((p, k, false))))
            }
            Tok::LParen => {
                self.bump();
                let t = self.ty()?;
                self.expect(&Tok::RParen)?;
                Ok((t, None))
            }
            _ => Ok((Type::Data(self.data_type()?), None)),
        }
    }
}

pub fn parse_nat(src: &str) -> Result<Nat, ParseError> {
    let mut c = Cursor::new(src)?;
    let n = c.nat()?;
    c.finish()?;
    Ok(n)
}

pub fn parse_type(src: &str) -> Result<Type, ParseError> {
    let mut c = Cursor::new(src)?;
    let t = c.ty()?;
    c.finish()?;
    Ok(t)
}

pub fn parse_data_type(src: &str) -> Result<DataType, ParseError> {
    let mut c = Cursor::new(src)?;
    let t = c.data_type()?;
    c.finish()?;
    Ok(t)
}

/// Parses a RISE program against the primitive names of `registry`.
pub fn parse_rise(src: &str, registry: &Registry) -> Result<Program, ParseError> {
    let mut p = RiseParser {
        c: Cursor::new(src)?,
        registry,
        scope: Vec::new(),
        type_scope: HashMap::new(),
    };
    let name = if p.c.is_ident("def") {
        p.c.bump();
        let n = p.c.ident()?;
        p.c.expect(&Tok::Eq)?;
        Some(n)
    } else {
        None
    };
    let body = p.expr()?;
    p.c.finish()?;
    Ok(Program { name, body })
}

/// Parses only an expression (no `def` prefix).
pub fn parse_expr(src: &str, registry: &Registry) -> Result<Expr, ParseError> {
    let prog = parse_rise(src, registry)?;
    Ok(prog.body)
}

struct RiseParser<'r> {
    c: Cursor,
    registry: &'r Registry,
    scope: Vec<Ident>,
    type_scope: HashMap<String, Kind>,
}

impl RiseParser<'_> {
    fn lookup(&self, name: &str) -> Option<&Ident> {
        self.scope.iter().rev().find(|x| x.name == name)
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.compose()?;
        while self.c.peek() == &Tok::Pipe {
            let span = self.c.span();
            self.c.bump();
            let f = self.compose()?;
            lhs = f.app(lhs).with_span(Some(span));
        }
        Ok(lhs)
    }

    fn compose(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.additive()?;
        while self.c.peek() == &Tok::Compose {
            let span = self.c.span();
            self.c.bump();
            let g = self.additive()?;
            lhs = Expr::compose(lhs, g).with_span(Some(span));
        }
        Ok(lhs)
    }

    fn additive(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.multiplicative()?;
        loop {
            let prim = match self.c.peek() {
                Tok::Plus => "add",
                Tok::Minus => "sub",
                _ => return Ok(lhs),
            };
            let span = self.c.span();
            self.c.bump();
            let rhs = self.multiplicative()?;
            lhs = Expr::prim(prim).with_span(Some(span)).app(lhs).app(rhs);
        }
    }

    fn multiplicative(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.application()?;
        while self.c.peek() == &Tok::Star {
            let span = self.c.span();
            self.c.bump();
            let rhs = self.application()?;
            lhs = Expr::prim("mul").with_span(Some(span)).app(lhs).app(rhs);
        }
        Ok(lhs)
    }

    fn application(&mut self) -> Result<Expr, ParseError> {
        let mut head = self.atom()?;
        while self.c.peek() == &Tok::LParen {
            let span = self.c.span();
            self.c.bump();
            head = self.argument(head)?.with_span(Some(span));
            self.c.expect(&Tok::RParen)?;
        }
        Ok(head)
    }

    /// Parses one parenthesized argument and applies `head` to it,
    /// deciding between an expression and a type-level argument.
    fn argument(&mut self, head: Expr) -> Result<Expr, ParseError> {
        match self.c.peek().clone() {
            Tok::Int(_) => {
                let n = self.c.nat()?;
                Ok(head.dep_app(TypeArg::Nat(n)))
            }
            Tok::Ident(name) => {
                if let Some(a) = AddressSpace::parse(&name) {
                    self.c.bump();
                    if let ExprKind::Primitive(p) = &head.kind {
                        if p == "reduceSeq" {
                            return Ok(Expr::prim("reduceSeqAt")
                                .with_span(head.span)
                                .dep_app(TypeArg::AddressSpace(a)));
                        }
                    }
                    return Ok(head.dep_app(TypeArg::AddressSpace(a)));
                }
                if matches!(
                    name.as_str(),
                    "f32" | "i32" | "bool" | "Array" | "Tuple" | "Idx"
                ) || self.type_scope.get(&name) == Some(&Kind::DataType)
                {
                    let dt = self.c.data_type()?;
                    return Ok(head.dep_app(TypeArg::DataType(dt)));
                }
                let is_expr = self.lookup(&name).is_some()
                    || self.registry.contains(&name)
                    || matches!(name.as_str(), "fun" | "depFun" | "true" | "false");
                if is_expr {
                    let arg = self.expr()?;
                    Ok(head.app(arg))
                } else {
                    let n = self.c.nat()?;
                    Ok(head.dep_app(TypeArg::Nat(n)))
                }
            }
            _ => {
                let arg = self.expr()?;
                Ok(head.app(arg))
            }
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let at = self.c.span();
        let span = Some(at);
        match self.c.peek().clone() {
            Tok::Float(text) => {
                self.c.bump();
                let digits = text.trim_end_matches('f');
                let value: f32 = digits
                    .parse()
                    .map_err(|_| self.c.error(format!("bad float literal `{text}`")))?;
                Ok(Expr::lit(Literal::F32 { text, value }).with_span(span))
            }
            Tok::I32(v) => {
                self.c.bump();
                Ok(Expr::lit(Literal::I32(v)).with_span(span))
            }
            Tok::Minus if matches!(self.c.peek_at(1), Tok::Float(_) | Tok::I32(_)) => {
                self.c.bump();
                match self.c.bump() {
                    Tok::Float(text) => {
                        let digits = text.trim_end_matches('f');
                        let value: f32 = digits
                            .parse()
                            .map_err(|_| self.c.error(format!("bad float literal `-{text}`")))?;
                        Ok(Expr::lit(Literal::F32 {
                            text: format!("-{text}"),
                            value: -value,
                        })
                        .with_span(span))
                    }
                    Tok::I32(v) => Ok(Expr::lit(Literal::I32(v.wrapping_neg())).with_span(span)),
                    _ => unreachable!("checked by the guard"),
                }
            }
            Tok::LParen => {
                self.c.bump();
                let e = self.expr()?;
                self.c.expect(&Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) => match name.as_str() {
                "fun" => self.lambda(),
                "depFun" => self.dep_lambda(),
                "true" | "false" => {
                    self.c.bump();
                    Ok(Expr::lit(Literal::Bool(name == "true")).with_span(span))
                }
                _ => {
                    self.c.bump();
                    if let Some(x) = self.lookup(&name) {
                        Ok(Expr::ident(&x.clone()).with_span(span))
                    } else if self.registry.contains(&name) {
                        Ok(Expr::prim(&name).with_span(span))
                    } else {
                        Err(ParseError {
                            line: at.line,
                            column: at.column,
                            message: format!("unknown primitive or unbound identifier `{name}`"),
                        })
                    }
                }
            },
            other => Err(self.c.error(format!("expected expression, found {other}"))),
        }
    }

    /// `fun(x => e)`, `fun(x: T => e)`, `fun(a, b => e)`, `fun((a, b) => e)`.
    fn lambda(&mut self) -> Result<Expr, ParseError> {
        let span = Some(self.c.span());
        self.c.bump();
        self.c.expect(&Tok::LParen)?;
        let grouped = self.c.eat(&Tok::LParen);
        let mut params = Vec::new();
        loop {
            let name = self.c.ident()?;
            let ann = if self.c.eat(&Tok::Colon) {
                Some(self.c.ty()?)
            } else {
                None
            };
            params.push((Ident::fresh(name), ann));
            if !self.c.eat(&Tok::Comma) {
                break;
            }
        }
        if grouped {
            self.c.expect(&Tok::RParen)?;
        }
        self.c.expect(&Tok::FatArrow)?;
        let depth = self.scope.len();
        self.scope.extend(params.iter().map(|p| p.0.clone()));
        let body = self.expr();
        self.scope.truncate(depth);
        let body = body?;
        self.c.expect(&Tok::RParen)?;
        let mut e = body;
        for (x, ann) in params.into_iter().rev() {
            e = match ann {
                Some(t) => Expr::lambda_typed(x, t, e),
                None => Expr::lambda(x, e),
            };
        }
        Ok(e.with_span(span))
    }

    /// `depFun((n: Nat, m: Nat) => e)` or `depFun(n: Nat => e)`.
    fn dep_lambda(&mut self) -> Result<Expr, ParseError> {
        let span = Some(self.c.span());
        self.c.bump();
        self.c.expect(&Tok::LParen)?;
        let grouped = self.c.eat(&Tok::LParen);
        let mut params = Vec::new();
        loop {
            let name = self.c.ident()?;
            self.c.expect(&Tok::Colon)?;
            let k = self.c.kind()?;
            params.push((name, k));
            if !self.c.eat(&Tok::Comma) {
                break;
            }
        }
        if grouped {
            self.c.expect(&Tok::RParen)?;
        }
        self.c.expect(&Tok::FatArrow)?;
        let saved = self.type_scope.clone();
        for (p, k) in &params {
            self.type_scope.insert(p.clone(), *k);
        }
        let body = self.expr();
        self.type_scope = saved;
        let body = body?;
        self.c.expect(&Tok::RParen)?;
        let mut e = body;
        for (p, k) in params.into_iter().rev() {
            e = Expr::dep_lambda(k, p, e);
        }
        Ok(e.with_span(span))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::alpha_eq;

    fn reg() -> Registry {
        Registry::standard()
    }

    #[test]
    fn identity_lambda() {
        let e = parse_expr("fun(x => x)", &reg()).unwrap();
        let ExprKind::Lambda { param, body, .. } = &e.kind else {
            panic!()
        };
        assert_eq!(body.kind, ExprKind::Identifier(param.clone()));
    }

    #[test]
    fn pipe_reverses_application() {
        let a = parse_expr("fun(a => fun(f => a |> f))", &reg()).unwrap();
        let b = parse_expr("fun(a => fun(f => f(a)))", &reg()).unwrap();
        assert!(alpha_eq(&a, &b));
    }

    #[test]
    fn bare_identifier_argument_is_nat() {
        let e = parse_expr("split(s)", &reg()).unwrap();
        let ExprKind::DepApply(f, arg) = &e.kind else {
            panic!("{e:?}")
        };
        assert_eq!(f.head_primitive(), Some("split"));
        assert_eq!(arg, &TypeArg::Nat(Nat::var("s")));
    }

    #[test]
    fn reduce_seq_with_address_space() {
        let e = parse_expr("reduceSeq(Private)(add)(0.0f)", &reg()).unwrap();
        assert_eq!(e.head_primitive(), Some("reduceSeqAt"));
    }

    #[test]
    fn syntax_error_has_position() {
        let err = parse_expr("fun(x =>\n  x", &reg()).unwrap_err();
        assert_eq!(err.line, 2);
        let err = parse_expr("frobnicate(x)", &reg()).unwrap_err();
        assert!(err.message.contains("frobnicate"));
    }

    #[test]
    fn types_parse_and_print() {
        for src in [
            "{n: Nat} -> {t: DataType} -> (t -> t -> t) -> t -> Array[n, t] -> t",
            "(n: Nat) -> Array[n*m, t] -> Array[m, Array[n, t]]",
            "Array[n^k*m, t]",
        ] {
            let t = parse_type(src).unwrap();
            assert_eq!(parse_type(&t.to_string()).unwrap(), t, "{src}");
        }
    }

    #[test]
    fn nat_precedence() {
        let n = parse_nat("n^(k - i - 1)*m + 2 % s").unwrap();
        assert_eq!(
            parse_nat(&n.to_string()).unwrap().normalize(),
            n.normalize()
        );
    }
}
