//! The hybrid functional-imperative IR.
//!
//! Phrases are typed as expressions (`Exp[dt, rw]`), acceptors (`Acc[dt]`)
//! or commands (`Comm`), plus functions, dependent functions and pairs over
//! those. Primitives are always fully applied: a [`Prim`] node carries its
//! type-level arguments and its phrase arguments together.

mod check;
mod parse;
mod print;
mod signatures;

use std::collections::BTreeSet;
use std::fmt;

use crate::expr::{Ident, Literal, Span};
use crate::nat::Nat;
use crate::types::{AddressSpace, DataType};

pub use check::{check_phrase, check_phrase_in, DpiaError, DpiaErrorKind};
pub use parse::{parse_phrase, parse_phrase_type};
pub use print::print_phrase;
pub use signatures::{signature, signatures, DpiaSignature, Param};

/// Read/write annotation on expression types.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rw {
    Rd,
    Wr,
    /// A signature parameter (`w`) or an inference variable (`?w3`).
    Var(String),
}

impl fmt::Display for Rw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rw::Rd => f.write_str("Rd"),
            Rw::Wr => f.write_str("Wr"),
            Rw::Var(v) => f.write_str(v),
        }
    }
}

/// Kinds of type-level parameters: the RISE kinds plus `ReadWrite`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DKind {
    Nat,
    Data,
    Addr,
    Rw,
}

impl fmt::Display for DKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DKind::Nat => "Nat",
            DKind::Data => "DataType",
            DKind::Addr => "AddrSp",
            DKind::Rw => "ReadWrite",
        })
    }
}

/// A type-level argument of a primitive or dependent application.
#[derive(Clone, Debug, PartialEq)]
pub enum DArg {
    Nat(Nat),
    Data(DataType),
    Addr(AddressSpace),
    Rw(Rw),
}

impl DArg {
    pub fn kind(&self) -> DKind {
        match self {
            DArg::Nat(_) => DKind::Nat,
            DArg::Data(_) => DKind::Data,
            DArg::Addr(_) => DKind::Addr,
            DArg::Rw(_) => DKind::Rw,
        }
    }

    pub fn as_nat(&self) -> Option<&Nat> {
        match self {
            DArg::Nat(n) => Some(n),
            _ => None,
        }
    }

    pub fn as_data(&self) -> Option<&DataType> {
        match self {
            DArg::Data(d) => Some(d),
            _ => None,
        }
    }

    pub fn as_addr(&self) -> Option<AddressSpace> {
        match self {
            DArg::Addr(a) => Some(*a),
            _ => None,
        }
    }

    fn map_nats(&self, f: &mut dyn FnMut(&Nat) -> Nat) -> DArg {
        match self {
            DArg::Nat(n) => DArg::Nat(f(n)),
            DArg::Data(d) => DArg::Data(d.map_nats(f)),
            other => other.clone(),
        }
    }
}

impl fmt::Display for DArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DArg::Nat(n) => write!(f, "{n}"),
            DArg::Data(d) => write!(f, "{d}"),
            DArg::Addr(a) => write!(f, "{a}"),
            DArg::Rw(r) => write!(f, "{r}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum PhraseType {
    Exp(DataType, Rw),
    Acc(DataType),
    Comm,
    Fun(Box<PhraseType>, Box<PhraseType>),
    DepFun {
        kind: DKind,
        param: String,
        body: Box<PhraseType>,
    },
    Pair(Box<PhraseType>, Box<PhraseType>),
}

impl PhraseType {
    pub fn exp(dt: DataType, rw: Rw) -> PhraseType {
        PhraseType::Exp(dt, rw)
    }

    pub fn fun(a: PhraseType, b: PhraseType) -> PhraseType {
        PhraseType::Fun(Box::new(a), Box::new(b))
    }

    /// The data type of an `Exp` or `Acc`.
    pub fn data(&self) -> Option<&DataType> {
        match self {
            PhraseType::Exp(d, _) | PhraseType::Acc(d) => Some(d),
            _ => None,
        }
    }

    pub fn rw(&self) -> Option<&Rw> {
        match self {
            PhraseType::Exp(_, rw) => Some(rw),
            _ => None,
        }
    }

    pub fn map_nats(&self, f: &mut dyn FnMut(&Nat) -> Nat) -> PhraseType {
        match self {
            PhraseType::Exp(d, rw) => PhraseType::Exp(d.map_nats(f), rw.clone()),
            PhraseType::Acc(d) => PhraseType::Acc(d.map_nats(f)),
            PhraseType::Comm => PhraseType::Comm,
            PhraseType::Fun(a, b) => PhraseType::fun(a.map_nats(f), b.map_nats(f)),
            PhraseType::DepFun { kind, param, body } => PhraseType::DepFun {
                kind: *kind,
                param: param.clone(),
                body: Box::new(body.map_nats(f)),
            },
            PhraseType::Pair(a, b) => {
                PhraseType::Pair(Box::new(a.map_nats(f)), Box::new(b.map_nats(f)))
            }
        }
    }

    pub fn map_rw(&self, f: &mut dyn FnMut(&Rw) -> Rw) -> PhraseType {
        match self {
            PhraseType::Exp(d, rw) => PhraseType::Exp(d.clone(), f(rw)),
            PhraseType::Fun(a, b) => PhraseType::fun(a.map_rw(f), b.map_rw(f)),
            PhraseType::DepFun { kind, param, body } => PhraseType::DepFun {
                kind: *kind,
                param: param.clone(),
                body: Box::new(body.map_rw(f)),
            },
            PhraseType::Pair(a, b) => {
                PhraseType::Pair(Box::new(a.map_rw(f)), Box::new(b.map_rw(f)))
            }
            other => other.clone(),
        }
    }

    fn free_names(&self, out: &mut BTreeSet<String>) {
        let mut dts = BTreeSet::new();
        match self {
            PhraseType::Exp(d, rw) => {
                d.collect_free(out, &mut dts);
                if let Rw::Var(v) = rw {
                    out.insert(v.clone());
                }
            }
            PhraseType::Acc(d) => d.collect_free(out, &mut dts),
            PhraseType::Comm => {}
            PhraseType::Fun(a, b) | PhraseType::Pair(a, b) => {
                a.free_names(out);
                b.free_names(out);
            }
            PhraseType::DepFun { param, body, .. } => {
                let mut inner = BTreeSet::new();
                body.free_names(&mut inner);
                inner.remove(param);
                out.extend(inner);
            }
        }
        out.extend(dts);
    }

    /// Capture-avoiding substitution of a type-level parameter.
    pub fn substitute(&self, var: &str, arg: &DArg) -> PhraseType {
        match self {
            PhraseType::Exp(d, rw) => {
                let rw = match (rw, arg) {
                    (Rw::Var(v), DArg::Rw(r)) if v == var => r.clone(),
                    _ => rw.clone(),
                };
                PhraseType::Exp(subst_dt(d, var, arg), rw)
            }
            PhraseType::Acc(d) => PhraseType::Acc(subst_dt(d, var, arg)),
            PhraseType::Comm => PhraseType::Comm,
            PhraseType::Fun(a, b) => {
                PhraseType::fun(a.substitute(var, arg), b.substitute(var, arg))
            }
            PhraseType::Pair(a, b) => PhraseType::Pair(
                Box::new(a.substitute(var, arg)),
                Box::new(b.substitute(var, arg)),
            ),
            PhraseType::DepFun { kind, param, body } => {
                if param == var {
                    return self.clone();
                }
                let mut names = BTreeSet::new();
                darg_free(arg, &mut names);
                if names.contains(param) {
                    let fresh = fresh_type_name(param, &names, body);
                    let renamed = body.substitute(param, &rename_darg(*kind, &fresh));
                    return PhraseType::DepFun {
                        kind: *kind,
                        param: fresh,
                        body: Box::new(renamed.substitute(var, arg)),
                    };
                }
                PhraseType::DepFun {
                    kind: *kind,
                    param: param.clone(),
                    body: Box::new(body.substitute(var, arg)),
                }
            }
        }
    }
}

fn subst_dt(d: &DataType, var: &str, arg: &DArg) -> DataType {
    match arg {
        DArg::Nat(n) => d.substitute_nat(var, n),
        DArg::Data(dt) => d.substitute_dt(var, dt),
        _ => d.clone(),
    }
}

fn darg_free(arg: &DArg, out: &mut BTreeSet<String>) {
    let mut dts = BTreeSet::new();
    match arg {
        DArg::Nat(n) => out.extend(n.free_vars()),
        DArg::Data(d) => d.collect_free(out, &mut dts),
        DArg::Rw(Rw::Var(v)) => {
            out.insert(v.clone());
        }
        _ => {}
    }
    out.extend(dts);
}

fn fresh_type_name(base: &str, avoid: &BTreeSet<String>, body: &PhraseType) -> String {
    let mut used = avoid.clone();
    body.free_names(&mut used);
    (1..)
        .map(|i| format!("{base}_{i}"))
        .find(|c| !used.contains(c))
        .expect("unbounded supply")
}

pub(crate) fn rename_darg(kind: DKind, name: &str) -> DArg {
    match kind {
        DKind::Nat => DArg::Nat(Nat::var(name)),
        DKind::Data => DArg::Data(DataType::Var(name.to_string())),
        DKind::Rw => DArg::Rw(Rw::Var(name.to_string())),
        DKind::Addr => DArg::Addr(AddressSpace::Private),
    }
}

/// A fully applied primitive.
#[derive(Clone, Debug, PartialEq)]
pub struct Prim {
    pub tag: String,
    pub targs: Vec<DArg>,
    pub args: Vec<Phrase>,
    /// Source position of the RISE primitive this node came from.
    pub span: Option<Span>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum PhraseKind {
    Ident(Ident),
    Literal(Literal),
    /// The parameter's type is the input of the node's function type.
    Lambda(Ident, Box<Phrase>),
    Apply(Box<Phrase>, Box<Phrase>),
    DepLambda(DKind, String, Box<Phrase>),
    DepApply(Box<Phrase>, DArg),
    Pair(Box<Phrase>, Box<Phrase>),
    Proj1(Box<Phrase>),
    Proj2(Box<Phrase>),
    Prim(Prim),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Phrase {
    pub kind: PhraseKind,
    pub ty: PhraseType,
}

impl Phrase {
    pub fn ident(id: &Ident, ty: PhraseType) -> Phrase {
        Phrase {
            kind: PhraseKind::Ident(id.clone()),
            ty,
        }
    }

    pub fn literal(l: Literal) -> Phrase {
        let ty = PhraseType::Exp(crate::typecheck::literal_type(&l), Rw::Rd);
        Phrase {
            kind: PhraseKind::Literal(l),
            ty,
        }
    }

    pub fn lambda(param: Ident, param_ty: PhraseType, body: Phrase) -> Phrase {
        let ty = PhraseType::fun(param_ty, body.ty.clone());
        Phrase {
            kind: PhraseKind::Lambda(param, Box::new(body)),
            ty,
        }
    }

    pub fn dep_lambda(kind: DKind, param: impl Into<String>, body: Phrase) -> Phrase {
        let param = param.into();
        let ty = PhraseType::DepFun {
            kind,
            param: param.clone(),
            body: Box::new(body.ty.clone()),
        };
        Phrase {
            kind: PhraseKind::DepLambda(kind, param, Box::new(body)),
            ty,
        }
    }

    /// Application; the result type is read off the function's type.
    pub fn app(self, arg: Phrase) -> Phrase {
        let ty = match &self.ty {
            PhraseType::Fun(_, b) => (**b).clone(),
            other => panic!("applying a phrase of non-function type {other}"),
        };
        Phrase {
            kind: PhraseKind::Apply(Box::new(self), Box::new(arg)),
            ty,
        }
    }

    pub fn dep_app(self, arg: DArg) -> Phrase {
        let ty = match &self.ty {
            PhraseType::DepFun { param, body, .. } => body.substitute(param, &arg),
            other => panic!("dependent application of a phrase of type {other}"),
        };
        Phrase {
            kind: PhraseKind::DepApply(Box::new(self), arg),
            ty,
        }
    }

    pub fn pair(a: Phrase, b: Phrase) -> Phrase {
        let ty = PhraseType::Pair(Box::new(a.ty.clone()), Box::new(b.ty.clone()));
        Phrase {
            kind: PhraseKind::Pair(Box::new(a), Box::new(b)),
            ty,
        }
    }

    pub fn proj(self, second: bool) -> Phrase {
        let ty = match &self.ty {
            PhraseType::Pair(a, b) => {
                if second {
                    (**b).clone()
                } else {
                    (**a).clone()
                }
            }
            other => panic!("projection from a phrase of type {other}"),
        };
        let inner = Box::new(self);
        Phrase {
            kind: if second {
                PhraseKind::Proj2(inner)
            } else {
                PhraseKind::Proj1(inner)
            },
            ty,
        }
    }

    /// A primitive node whose type comes from its signature. Arguments are
    /// not checked here; [`check_phrase`] does that.
    pub fn prim(tag: &str, targs: Vec<DArg>, args: Vec<Phrase>) -> Phrase {
        let sig = signature(tag).unwrap_or_else(|| panic!("no signature for `{tag}`"));
        let (_, ty) = sig.instantiate(&targs).unwrap_or_else(|e| panic!("{e}"));
        Phrase {
            kind: PhraseKind::Prim(Prim {
                tag: tag.to_string(),
                targs,
                args,
                span: None,
            }),
            ty,
        }
    }

    pub fn with_span(mut self, span: Option<Span>) -> Phrase {
        if let PhraseKind::Prim(p) = &mut self.kind {
            p.span = span;
        }
        self
    }

    pub fn as_prim(&self) -> Option<&Prim> {
        match &self.kind {
            PhraseKind::Prim(p) => Some(p),
            _ => None,
        }
    }

    pub fn is_prim(&self, tag: &str) -> bool {
        self.as_prim().is_some_and(|p| p.tag == tag)
    }

    /// `c1 ; c2`.
    pub fn seq(self, next: Phrase) -> Phrase {
        Phrase::prim("seq", vec![], vec![self, next])
    }

    pub fn children(&self) -> Vec<&Phrase> {
        match &self.kind {
            PhraseKind::Ident(_) | PhraseKind::Literal(_) => vec![],
            PhraseKind::Lambda(_, b)
            | PhraseKind::DepLambda(_, _, b)
            | PhraseKind::DepApply(b, _) => vec![b],
            PhraseKind::Proj1(b) | PhraseKind::Proj2(b) => vec![b],
            PhraseKind::Apply(a, b) | PhraseKind::Pair(a, b) => vec![a, b],
            PhraseKind::Prim(p) => p.args.iter().collect(),
        }
    }

    /// Pre-order visit of every node.
    pub fn visit(&self, f: &mut dyn FnMut(&Phrase)) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }

    pub fn count_prims(&self, tag: &str) -> usize {
        let mut n = 0;
        self.visit(&mut |p| {
            if p.is_prim(tag) {
                n += 1;
            }
        });
        n
    }

    pub fn map_types(
        &self,
        f: &mut dyn FnMut(&PhraseType) -> PhraseType,
        g: &mut dyn FnMut(&DArg) -> DArg,
    ) -> Phrase {
        let kind = match &self.kind {
            PhraseKind::Ident(i) => PhraseKind::Ident(i.clone()),
            PhraseKind::Literal(l) => PhraseKind::Literal(l.clone()),
            PhraseKind::Lambda(x, b) => PhraseKind::Lambda(x.clone(), Box::new(b.map_types(f, g))),
            PhraseKind::Apply(a, b) => {
                PhraseKind::Apply(Box::new(a.map_types(f, g)), Box::new(b.map_types(f, g)))
            }
            PhraseKind::DepLambda(k, p, b) => {
                PhraseKind::DepLambda(*k, p.clone(), Box::new(b.map_types(f, g)))
            }
            PhraseKind::DepApply(b, a) => PhraseKind::DepApply(Box::new(b.map_types(f, g)), g(a)),
            PhraseKind::Pair(a, b) => {
                PhraseKind::Pair(Box::new(a.map_types(f, g)), Box::new(b.map_types(f, g)))
            }
            PhraseKind::Proj1(b) => PhraseKind::Proj1(Box::new(b.map_types(f, g))),
            PhraseKind::Proj2(b) => PhraseKind::Proj2(Box::new(b.map_types(f, g))),
            PhraseKind::Prim(p) => PhraseKind::Prim(Prim {
                tag: p.tag.clone(),
                targs: p.targs.iter().map(&mut *g).collect(),
                args: p.args.iter().map(|a| a.map_types(f, g)).collect(),
                span: p.span,
            }),
        };
        Phrase {
            kind,
            ty: f(&self.ty),
        }
    }

    /// Substitutes a Nat variable everywhere, types included. Dependent
    /// binders of the same name shadow the substitution.
    pub fn substitute_nat(&self, var: &str, n: &Nat) -> Phrase {
        if let PhraseKind::DepLambda(_, p, _) = &self.kind {
            if p == var {
                return self.clone();
            }
        }
        let arg = DArg::Nat(n.clone());
        let kind = match &self.kind {
            PhraseKind::Ident(i) => PhraseKind::Ident(i.clone()),
            PhraseKind::Literal(l) => PhraseKind::Literal(l.clone()),
            PhraseKind::Lambda(x, b) => {
                PhraseKind::Lambda(x.clone(), Box::new(b.substitute_nat(var, n)))
            }
            PhraseKind::Apply(a, b) => PhraseKind::Apply(
                Box::new(a.substitute_nat(var, n)),
                Box::new(b.substitute_nat(var, n)),
            ),
            PhraseKind::DepLambda(k, p, b) => {
                PhraseKind::DepLambda(*k, p.clone(), Box::new(b.substitute_nat(var, n)))
            }
            PhraseKind::DepApply(b, a) => PhraseKind::DepApply(
                Box::new(b.substitute_nat(var, n)),
                a.map_nats(&mut |x| x.substitute(var, n)),
            ),
            PhraseKind::Pair(a, b) => PhraseKind::Pair(
                Box::new(a.substitute_nat(var, n)),
                Box::new(b.substitute_nat(var, n)),
            ),
            PhraseKind::Proj1(b) => PhraseKind::Proj1(Box::new(b.substitute_nat(var, n))),
            PhraseKind::Proj2(b) => PhraseKind::Proj2(Box::new(b.substitute_nat(var, n))),
            PhraseKind::Prim(p) => PhraseKind::Prim(Prim {
                tag: p.tag.clone(),
                targs: p
                    .targs
                    .iter()
                    .map(|a| a.map_nats(&mut |x| x.substitute(var, n)))
                    .collect(),
                args: p.args.iter().map(|a| a.substitute_nat(var, n)).collect(),
                span: p.span,
            }),
        };
        Phrase {
            kind,
            ty: self.ty.substitute(var, &arg),
        }
    }

    /// Replaces free occurrences of the identifier `var`. Binder identities
    /// are unique, so no renaming is needed.
    pub fn substitute(&self, var: &Ident, rep: &Phrase) -> Phrase {
        let kind = match &self.kind {
            PhraseKind::Ident(i) if i == var => return rep.clone(),
            PhraseKind::Ident(i) => PhraseKind::Ident(i.clone()),
            PhraseKind::Literal(l) => PhraseKind::Literal(l.clone()),
            PhraseKind::Lambda(x, _) if x == var => return self.clone(),
            PhraseKind::Lambda(x, b) => {
                PhraseKind::Lambda(x.clone(), Box::new(b.substitute(var, rep)))
            }
            PhraseKind::Apply(a, b) => PhraseKind::Apply(
                Box::new(a.substitute(var, rep)),
                Box::new(b.substitute(var, rep)),
            ),
            PhraseKind::DepLambda(k, p, b) => {
                PhraseKind::DepLambda(*k, p.clone(), Box::new(b.substitute(var, rep)))
            }
            PhraseKind::DepApply(b, a) => {
                PhraseKind::DepApply(Box::new(b.substitute(var, rep)), a.clone())
            }
            PhraseKind::Pair(a, b) => PhraseKind::Pair(
                Box::new(a.substitute(var, rep)),
                Box::new(b.substitute(var, rep)),
            ),
            PhraseKind::Proj1(b) => PhraseKind::Proj1(Box::new(b.substitute(var, rep))),
            PhraseKind::Proj2(b) => PhraseKind::Proj2(Box::new(b.substitute(var, rep))),
            PhraseKind::Prim(p) => PhraseKind::Prim(Prim {
                tag: p.tag.clone(),
                targs: p.targs.clone(),
                args: p.args.iter().map(|a| a.substitute(var, rep)).collect(),
                span: p.span,
            }),
        };
        Phrase {
            kind,
            ty: self.ty.clone(),
        }
    }

    /// One step of beta reduction at the root, if the root is a redex.
    pub fn beta_step(&self) -> Option<Phrase> {
        match &self.kind {
            PhraseKind::Apply(f, a) => match &f.kind {
                PhraseKind::Lambda(x, body) => Some(body.substitute(x, a)),
                _ => f.beta_step().map(|f2| f2.app((**a).clone())),
            },
            PhraseKind::DepApply(f, DArg::Nat(n)) => match &f.kind {
                PhraseKind::DepLambda(_, p, body) => Some(body.substitute_nat(p, n)),
                _ => f.beta_step().map(|f2| f2.dep_app(DArg::Nat(n.clone()))),
            },
            PhraseKind::Proj1(p) | PhraseKind::Proj2(p) => match &p.kind {
                PhraseKind::Pair(a, b) => Some(if matches!(self.kind, PhraseKind::Proj1(_)) {
                    (**a).clone()
                } else {
                    (**b).clone()
                }),
                _ => None,
            },
            _ => None,
        }
    }

    /// Beta-reduces at the root until the head is no longer a redex.
    pub fn whnf(&self) -> Phrase {
        let mut cur = self.clone();
        while let Some(next) = cur.beta_step() {
            cur = next;
        }
        cur
    }
}

impl fmt::Display for Phrase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_phrase(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nat::Assumptions;

    const MISSING: &str = "depFun((n: Nat, m: Nat) =>
  fun(M: Exp[Array[n, Array[m, f32]], Rd] =>
    mapWorkGroup(n, Array[m, f32], Array[m, f32],
      fun(row => mapLocal(m, f32, f32, fun(b => b + 1.0f),
                   mapLocal(m, f32, f32, fun(a => a * 2.0f), row))),
      M)))";

    #[test]
    fn stacked_map_locals_need_memory() {
        let p = parse_phrase(MISSING, &[]).unwrap();
        let e = check_phrase(&p, &Assumptions::new()).unwrap_err();
        match &e.kind {
            DpiaErrorKind::RwMismatch {
                expected,
                found,
                producer,
                ..
            } => {
                assert_eq!(
                    (expected, found, producer.as_str()),
                    (&Rw::Rd, &Rw::Wr, "mapLocal")
                );
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(e.code(), "RWMismatch");
    }

    #[test]
    fn to_mem_repairs_the_program() {
        let fixed = MISSING.replace(
            "mapLocal(m, f32, f32, fun(a => a * 2.0f), row)",
            "toMem(Private, Array[m, f32], mapLocal(m, f32, f32, fun(a => a * 2.0f), row))",
        );
        let p = parse_phrase(&fixed, &[]).unwrap();
        let c = check_phrase(&p, &Assumptions::new()).unwrap();
        assert_eq!(
            c.ty.to_string(),
            "(n: Nat) -> (m: Nat) -> Exp[Array[n, Array[m, f32]], Rd] -> Exp[Array[n, Array[m, f32]], Wr]"
        );
        assert_eq!(check_phrase(&c, &Assumptions::new()).unwrap(), c);
    }

    #[test]
    fn to_mem_rejects_readable_input_and_nesting() {
        let x = Ident::fresh("x");
        let env = [(x.clone(), PhraseType::Exp(DataType::f32(), Rw::Rd))];
        for src in [
            "toMem(Private, f32, x)",
            "toMem(Private, f32, toMem(Private, f32, x * x))",
        ] {
            let p = parse_phrase(src, &env).unwrap();
            let err = check_phrase_in(&p, &env, &Assumptions::new()).unwrap_err();
            assert!(
                matches!(err.kind, DpiaErrorKind::RwMismatch { found: Rw::Rd, .. }),
                "{src}: {err}"
            );
        }
    }

    #[test]
    fn polymorphic_rw_is_solved_from_context() {
        let xs = Ident::fresh("xs");
        let arr = PhraseType::Exp(DataType::array(4, DataType::f32()), Rw::Rd);
        let env = [(xs.clone(), arr.clone())];
        let ident = Phrase::ident(&xs, arr);
        let w = DArg::Rw(Rw::Var("?w0".into()));
        let f = DArg::Data(DataType::f32());
        let zip = Phrase::prim(
            "zip",
            vec![DArg::Nat(Nat::Const(4)), f.clone(), f.clone(), w],
            vec![ident.clone(), ident],
        );
        let c = check_phrase_in(&zip, &env, &Assumptions::new()).unwrap();
        assert_eq!(c.ty.rw(), Some(&Rw::Rd));
        assert_eq!(c.as_prim().unwrap().targs[3], DArg::Rw(Rw::Rd));
    }

    #[test]
    fn assign_literal_is_a_command() {
        let a = Ident::fresh("a");
        let env = [(a.clone(), PhraseType::Acc(DataType::f32()))];
        let p = parse_phrase("a = 0.0f", &env).unwrap();
        assert_eq!(
            check_phrase_in(&p, &env, &Assumptions::new()).unwrap().ty,
            PhraseType::Comm
        );
        assert_eq!(print_phrase(&p), "a = 0.0f");
    }

    #[test]
    fn printed_phrases_parse_back() {
        let p = parse_phrase(MISSING, &[]).unwrap();
        let text = print_phrase(&p);
        let again = parse_phrase(&text, &[]).unwrap();
        assert_eq!(print_phrase(&again), text);
    }
}
