//! Reads the emitted C subset back into [`CProgram`] form.

use super::c_ast::{AssignOp, BinOp, CDecl, CExpr, CFunction, CProgram, CStmt, CType};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    Float(String),
    Pragma(String),
    Punct(&'static str),
    Eof,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CParseError {
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for CParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for CParseError {}

const PUNCT: &[&str] = &[
    "+=", "*=", "(", ")", "{", "}", "[", "]", ";", ",", "?", ":", "=", "<", "+", "-", "*", "/",
    "%", "^",
];

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, CParseError> {
    let mut out = Vec::new();
    let bytes = src.as_bytes();
    let mut i = 0;
    let mut line = 1;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c == '\n' {
            line += 1;
            i += 1;
        } else if c.is_whitespace() {
            i += 1;
        } else if src[i..].starts_with("//") || src[i..].starts_with('#') {
            let end = src[i..].find('\n').map_or(src.len(), |e| i + e);
            if let Some(p) = src[i..end].strip_prefix("#pragma") {
                out.push((Tok::Pragma(p.trim().to_string()), line));
            }
            i = end;
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(src[start..i].to_string()), line));
        } else if c.is_ascii_digit() {
            let start = i;
            let mut float = false;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'.' {
                float = true;
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                float = true;
                i += 1;
                if i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
                    i += 1;
                }
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < bytes.len() && bytes[i] == b'f' {
                float = true;
                i += 1;
            }
            let text = &src[start..i];
            out.push((
                if float {
                    Tok::Float(text.to_string())
                } else {
                    Tok::Int(text.parse().map_err(|_| CParseError {
                        line,
                        message: format!("bad integer `{text}`"),
                    })?)
                },
                line,
            ));
        } else if let Some(p) = PUNCT.iter().find(|p| src[i..].starts_with(**p)) {
            out.push((Tok::Punct(p), line));
            i += p.len();
        } else {
            return Err(CParseError {
                line,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    out.push((Tok::Eof, line));
    Ok(out)
}

struct P {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl P {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, CParseError> {
        Err(CParseError {
            line: self.toks[self.pos].1,
            message: message.into(),
        })
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Ident(q) if q == w)
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        let hit = self.is_punct(p);
        if hit {
            self.bump();
        }
        hit
    }

    fn eat_word(&mut self, w: &str) -> bool {
        let hit = self.is_word(w);
        if hit {
            self.bump();
        }
        hit
    }

    fn punct(&mut self, p: &str) -> Result<(), CParseError> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            self.err(format!("expected `{p}`, found {:?}", self.peek()))
        }
    }

    fn word(&mut self, w: &str) -> Result<(), CParseError> {
        if self.eat_word(w) {
            Ok(())
        } else {
            self.err(format!("expected `{w}`, found {:?}", self.peek()))
        }
    }

    fn name(&mut self) -> Result<String, CParseError> {
        match self.bump() {
            Tok::Ident(s) => Ok(s),
            other => self.err(format!("expected a name, found {other:?}")),
        }
    }

    fn starts_decl(&self) -> bool {
        ["const", "global", "local", "float", "int", "unsigned"]
            .iter()
            .any(|w| self.is_word(w))
    }

    fn ctype(&mut self) -> Result<CType, CParseError> {
        if self.eat_word("float") {
            Ok(CType::Float)
        } else if self.eat_word("int") {
            Ok(CType::Int)
        } else if self.eat_word("unsigned") {
            self.word("char")?;
            Ok(CType::UChar)
        } else {
            self.err(format!("expected a type, found {:?}", self.peek()))
        }
    }

    fn decl(&mut self) -> Result<CDecl, CParseError> {
        let konst = self.eat_word("const");
        let space = if self.is_word("global") || self.is_word("local") {
            Some(self.name()?)
        } else {
            None
        };
        let ty = self.ctype()?;
        let pointer = self.eat_punct("*");
        let restrict = self.eat_word("restrict");
        let name = self.name()?;
        let len = if self.eat_punct("[") {
            let e = self.expr()?;
            self.punct("]")?;
            Some(e)
        } else {
            None
        };
        Ok(CDecl {
            konst,
            space,
            ty,
            pointer,
            restrict,
            name,
            len,
        })
    }

    fn function(&mut self) -> Result<CFunction, CParseError> {
        let kernel = self.eat_word("__kernel");
        let is_static = self.eat_word("static");
        let ret = if self.eat_word("void") {
            None
        } else {
            Some(self.ctype()?)
        };
        let name = self.name()?;
        self.punct("(")?;
        let mut params: Vec<Vec<CDecl>> = Vec::new();
        let mut line = None;
        if !self.is_punct(")") {
            loop {
                let l = self.toks[self.pos].1;
                let d = self.decl()?;
                match (params.last_mut(), line) {
                    (Some(group), Some(prev)) if prev == l => group.push(d),
                    _ => params.push(vec![d]),
                }
                line = Some(l);
                if !self.eat_punct(",") {
                    break;
                }
            }
        }
        self.punct(")")?;
        let body = self.block()?;
        Ok(CFunction {
            kernel,
            is_static,
            ret,
            name,
            params,
            body,
        })
    }

    fn block(&mut self) -> Result<Vec<CStmt>, CParseError> {
        self.punct("{")?;
        let mut out = Vec::new();
        while !self.eat_punct("}") {
            out.push(self.stmt()?);
        }
        Ok(out)
    }

    fn stmt(&mut self) -> Result<CStmt, CParseError> {
        if let Tok::Pragma(p) = self.peek().clone() {
            self.bump();
            return Ok(CStmt::Pragma(p));
        }
        if self.eat_word("for") {
            self.punct("(")?;
            self.word("int")?;
            let var = self.name()?;
            self.punct("=")?;
            let init = self.expr()?;
            self.punct(";")?;
            if self.name()? != var {
                return self.err("loop condition must test the loop variable");
            }
            self.punct("<")?;
            let bound = self.expr()?;
            self.punct(";")?;
            if self.name()? != var {
                return self.err("loop step must advance the loop variable");
            }
            self.punct("+=")?;
            let step = self.expr()?;
            self.punct(")")?;
            let body = self.block()?;
            return Ok(CStmt::For {
                var,
                init,
                bound,
                step,
                body,
            });
        }
        if self.eat_word("if") {
            self.punct("(")?;
            let c = self.expr()?;
            self.punct(")")?;
            let t = self.block()?;
            let e = if self.eat_word("else") {
                self.block()?
            } else {
                Vec::new()
            };
            return Ok(CStmt::If(c, t, e));
        }
        if self.eat_word("return") {
            let e = self.expr()?;
            self.punct(";")?;
            return Ok(CStmt::Return(e));
        }
        if self.starts_decl() {
            let d = self.decl()?;
            let init = if self.eat_punct("=") {
                Some(self.expr()?)
            } else {
                None
            };
            self.punct(";")?;
            return Ok(CStmt::Decl(d, init));
        }
        let lhs = self.unary()?;
        let op = if self.eat_punct("=") {
            AssignOp::Set
        } else if self.eat_punct("+=") {
            AssignOp::Add
        } else if self.eat_punct("*=") {
            AssignOp::Mul
        } else {
            return self.err(format!("expected an assignment, found {:?}", self.peek()));
        };
        let rhs = self.expr()?;
        self.punct(";")?;
        Ok(CStmt::Assign(lhs, op, rhs))
    }

    fn expr(&mut self) -> Result<CExpr, CParseError> {
        let c = self.binary(1)?;
        if self.eat_punct("?") {
            let a = self.binary(1)?;
            self.punct(":")?;
            let b = self.expr()?;
            return Ok(CExpr::Cond(Box::new(c), Box::new(a), Box::new(b)));
        }
        Ok(c)
    }

    fn binop(&self) -> Option<BinOp> {
        let Tok::Punct(p) = self.peek() else {
            return None;
        };
        Some(match *p {
            "+" => BinOp::Add,
            "-" => BinOp::Sub,
            "*" => BinOp::Mul,
            "/" => BinOp::Div,
            "%" => BinOp::Mod,
            "<" => BinOp::Lt,
            "^" => BinOp::Xor,
            _ => return None,
        })
    }

    fn binary(&mut self, min: u8) -> Result<CExpr, CParseError> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.binop().filter(|op| op.precedence() >= min) {
            self.bump();
            let rhs = self.binary(op.precedence() + 1)?;
            lhs = CExpr::bin(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<CExpr, CParseError> {
        if self.eat_punct("*") {
            return Ok(CExpr::Deref(Box::new(self.unary()?)));
        }
        if self.eat_punct("-") {
            return match self.bump() {
                Tok::Int(v) => Ok(CExpr::Int(-v)),
                other => self.err(format!(
                    "unary minus applies to integer literals only, found {other:?}"
                )),
            };
        }
        let mut e = match self.bump() {
            Tok::Int(v) => CExpr::Int(v),
            Tok::Float(t) => CExpr::Float(t),
            Tok::Punct("(") => {
                let e = self.expr()?;
                self.punct(")")?;
                e
            }
            Tok::Ident(n) if self.is_punct("(") => {
                self.bump();
                let mut args = Vec::new();
                if !self.is_punct(")") {
                    loop {
                        args.push(self.expr()?);
                        if !self.eat_punct(",") {
                            break;
                        }
                    }
                }
                self.punct(")")?;
                CExpr::Call(n, args)
            }
            Tok::Ident(n) => CExpr::Var(n),
            other => return self.err(format!("unexpected {other:?} in an expression")),
        };
        while self.eat_punct("[") {
            let i = self.expr()?;
            self.punct("]")?;
            e = CExpr::index(e, i);
        }
        Ok(e)
    }
}

pub fn parse_c(src: &str) -> Result<CProgram, CParseError> {
    let mut p = P {
        toks: lex(src)?,
        pos: 0,
    };
    let mut functions = Vec::new();
    while *p.peek() != Tok::Eof {
        functions.push(p.function()?);
    }
    Ok(CProgram { functions })
}
