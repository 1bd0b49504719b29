//! The C subset produced by the emitter, with its printer.

use std::fmt::{self, Write};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CType {
    Float,
    Int,
    UChar,
}

impl CType {
    pub fn keyword(self) -> &'static str {
        match self {
            CType::Float => "float",
            CType::Int => "int",
            CType::UChar => "unsigned char",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Lt,
    Xor,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Mod => "%",
            BinOp::Lt => "<",
            BinOp::Xor => "^",
        }
    }

    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Xor => 1,
            BinOp::Lt => 2,
            BinOp::Add | BinOp::Sub => 3,
            BinOp::Mul | BinOp::Div | BinOp::Mod => 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CExpr {
    Int(i64),
    /// A float literal kept as source text, e.g. `0.0f`.
    Float(String),
    Var(String),
    Index(Box<CExpr>, Box<CExpr>),
    Deref(Box<CExpr>),
    Bin(BinOp, Box<CExpr>, Box<CExpr>),
    Cond(Box<CExpr>, Box<CExpr>, Box<CExpr>),
    Call(String, Vec<CExpr>),
}

impl CExpr {
    pub fn var(name: &str) -> CExpr {
        CExpr::Var(name.to_string())
    }

    pub fn bin(op: BinOp, l: CExpr, r: CExpr) -> CExpr {
        CExpr::Bin(op, Box::new(l), Box::new(r))
    }

    pub fn index(base: CExpr, i: CExpr) -> CExpr {
        CExpr::Index(Box::new(base), Box::new(i))
    }

    fn precedence(&self) -> u8 {
        match self {
            CExpr::Cond(..) => 0,
            CExpr::Bin(op, ..) => op.precedence(),
            _ => 10,
        }
    }

    fn write_at(&self, out: &mut String, min: u8) {
        if self.precedence() < min {
            out.push('(');
            self.write(out);
            out.push(')');
        } else {
            self.write(out);
        }
    }

    fn write(&self, out: &mut String) {
        match self {
            CExpr::Int(v) => {
                let _ = write!(out, "{v}");
            }
            CExpr::Float(t) => out.push_str(t),
            CExpr::Var(v) => out.push_str(v),
            CExpr::Index(b, i) => {
                b.write_at(out, 10);
                out.push('[');
                i.write(out);
                out.push(']');
            }
            CExpr::Deref(e) => {
                out.push('*');
                e.write_at(out, 10);
            }
            CExpr::Bin(op, l, r) => {
                let p = op.precedence();
                l.write_at(out, p);
                let _ = write!(out, " {} ", op.symbol());
                r.write_at(out, p + 1);
            }
            CExpr::Cond(c, a, b) => {
                c.write_at(out, 1);
                out.push_str(" ? ");
                a.write_at(out, 1);
                out.push_str(" : ");
                b.write_at(out, 0);
            }
            CExpr::Call(f, args) => {
                out.push_str(f);
                out.push('(');
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    a.write(out);
                }
                out.push(')');
            }
        }
    }
}

impl fmt::Display for CExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.write(&mut s);
        f.write_str(&s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AssignOp {
    Set,
    Add,
    Mul,
}

impl AssignOp {
    fn symbol(self) -> &'static str {
        match self {
            AssignOp::Set => "=",
            AssignOp::Add => "+=",
            AssignOp::Mul => "*=",
        }
    }
}

/// A declared variable, parameter or local.
#[derive(Clone, Debug, PartialEq)]
pub struct CDecl {
    pub konst: bool,
    /// `global` or `local`.
    pub space: Option<String>,
    pub ty: CType,
    pub pointer: bool,
    pub restrict: bool,
    pub name: String,
    /// Element count of a local array.
    pub len: Option<CExpr>,
}

impl CDecl {
    pub fn scalar(ty: CType, name: &str) -> CDecl {
        CDecl {
            konst: false,
            space: None,
            ty,
            pointer: false,
            restrict: false,
            name: name.into(),
            len: None,
        }
    }

    fn write(&self, out: &mut String) {
        if self.konst {
            out.push_str("const ");
        }
        if let Some(s) = &self.space {
            out.push_str(s);
            out.push(' ');
        }
        out.push_str(self.ty.keyword());
        if self.pointer {
            out.push('*');
        }
        out.push(' ');
        if self.restrict {
            out.push_str("restrict ");
        }
        out.push_str(&self.name);
        if let Some(l) = &self.len {
            let _ = write!(out, "[{l}]");
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CStmt {
    Decl(CDecl, Option<CExpr>),
    Assign(CExpr, AssignOp, CExpr),
    /// `for (int var = init; var < bound; var += step) { body }`
    For {
        var: String,
        init: CExpr,
        bound: CExpr,
        step: CExpr,
        body: Vec<CStmt>,
    },
    If(CExpr, Vec<CStmt>, Vec<CStmt>),
    Pragma(String),
    Return(CExpr),
}

#[derive(Clone, Debug, PartialEq)]
pub struct CFunction {
    pub kernel: bool,
    pub is_static: bool,
    pub ret: Option<CType>,
    pub name: String,
    /// Parameters grouped by printed line.
    pub params: Vec<Vec<CDecl>>,
    pub body: Vec<CStmt>,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct CProgram {
    pub functions: Vec<CFunction>,
}

const INDENT: &str = "  ";

fn write_block(out: &mut String, stmts: &[CStmt], depth: usize) {
    for s in stmts {
        write_stmt(out, s, depth);
    }
}

fn pad(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str(INDENT);
    }
}

fn write_stmt(out: &mut String, s: &CStmt, depth: usize) {
    pad(out, depth);
    match s {
        CStmt::Decl(d, init) => {
            d.write(out);
            if let Some(e) = init {
                let _ = write!(out, " = {e}");
            }
            out.push_str(";\n");
        }
        CStmt::Assign(l, op, r) => {
            let _ = writeln!(out, "{l} {} {r};", op.symbol());
        }
        CStmt::For {
            var,
            init,
            bound,
            step,
            body,
        } => {
            let _ = writeln!(
                out,
                "for (int {var} = {init}; {var} < {bound}; {var} += {step}) {{"
            );
            write_block(out, body, depth + 1);
            pad(out, depth);
            out.push_str("}\n");
        }
        CStmt::If(c, t, e) => {
            let _ = writeln!(out, "if ({c}) {{");
            write_block(out, t, depth + 1);
            pad(out, depth);
            if e.is_empty() {
                out.push_str("}\n");
            } else {
                out.push_str("} else {\n");
                write_block(out, e, depth + 1);
                pad(out, depth);
                out.push_str("}\n");
            }
        }
        CStmt::Pragma(p) => {
            let _ = writeln!(out, "#pragma {p}");
        }
        CStmt::Return(e) => {
            let _ = writeln!(out, "return {e};");
        }
    }
}

impl fmt::Display for CFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        if self.kernel {
            out.push_str("__kernel\n");
        }
        if self.is_static {
            out.push_str("static ");
        }
        let head = format!("{} {}(", self.ret.map_or("void", CType::keyword), self.name);
        out.push_str(&head);
        let align = " ".repeat(head.len() + if self.is_static { 7 } else { 0 });
        for (li, line) in self.params.iter().enumerate() {
            if li > 0 {
                out.push_str(",\n");
                out.push_str(&align);
            }
            for (i, p) in line.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                p.write(&mut out);
            }
        }
        out.push_str(") {\n");
        write_block(&mut out, &self.body, 1);
        out.push_str("}\n");
        f.write_str(&out)
    }
}

impl fmt::Display for CProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, func) in self.functions.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{func}")?;
        }
        Ok(())
    }
}
