//! Phrase type checking with read/write inference.
//!
//! RW-polymorphic primitives carry `Rw::Var` arguments until the checker
//! unifies them with the annotations of the slots they flow into. Anything
//! left unconstrained defaults to `Rd`.

use std::collections::HashMap;
use std::fmt;

use super::signatures::signature;
use super::{rename_darg, DArg, Phrase, PhraseKind, PhraseType, Prim, Rw};
use crate::expr::{Ident, Span};
use crate::nat::Assumptions;
use crate::typecheck::literal_type;

#[derive(Clone, Debug, PartialEq)]
pub enum DpiaErrorKind {
    /// An argument's read/write annotation does not fit its slot; the
    /// classic case is a `Wr` expression where `Rd` is required, meaning a
    /// `toMem` is missing.
    RwMismatch {
        expected: Rw,
        found: Rw,
        producer: String,
        consumer: String,
        param: String,
    },
    TypeMismatch {
        expected: PhraseType,
        found: PhraseType,
        context: String,
    },
    Arity {
        tag: String,
        expected: usize,
        found: usize,
    },
    UnknownPrimitive(String),
    UnboundIdentifier(String),
    NotAFunction(PhraseType),
    BadTypeArguments(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct DpiaError {
    pub kind: DpiaErrorKind,
    pub span: Option<Span>,
}

impl DpiaError {
    fn new(kind: DpiaErrorKind, span: Option<Span>) -> DpiaError {
        DpiaError { kind, span }
    }

    /// Short machine-readable code for diagnostics.
    pub fn code(&self) -> &'static str {
        match self.kind {
            DpiaErrorKind::RwMismatch { .. } => "RWMismatch",
            DpiaErrorKind::TypeMismatch { .. } => "DpiaTypeMismatch",
            DpiaErrorKind::Arity { .. } => "DpiaArity",
            DpiaErrorKind::UnknownPrimitive(_) => "DpiaUnknownPrimitive",
            DpiaErrorKind::UnboundIdentifier(_) => "DpiaUnbound",
            DpiaErrorKind::NotAFunction(_) => "DpiaNotAFunction",
            DpiaErrorKind::BadTypeArguments(_) => "DpiaTypeArguments",
        }
    }
}

impl fmt::Display for DpiaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            DpiaErrorKind::RwMismatch { expected, found, producer, consumer, param } => write!(
                f,
                "RWMismatch at `{producer}`: expected {expected}, found {found} (argument `{param}` of `{consumer}`)"
            )?,
            DpiaErrorKind::TypeMismatch { expected, found, context } => {
                write!(f, "type mismatch in {context}: expected {expected}, found {found}")?
            }
            DpiaErrorKind::Arity { tag, expected, found } => {
                write!(f, "`{tag}` expects {expected} arguments, given {found}")?
            }
            DpiaErrorKind::UnknownPrimitive(t) => write!(f, "no signature for primitive `{t}`")?,
            DpiaErrorKind::UnboundIdentifier(x) => write!(f, "unbound identifier `{x}`")?,
            DpiaErrorKind::NotAFunction(t) => write!(f, "applying a phrase of type {t}")?,
            DpiaErrorKind::BadTypeArguments(m) => f.write_str(m)?,
        }
        if let Some(s) = self.span {
            write!(f, " at {s}")?;
        }
        Ok(())
    }
}

impl std::error::Error for DpiaError {}

pub fn check_phrase(p: &Phrase, asm: &Assumptions) -> Result<Phrase, DpiaError> {
    check_phrase_in(p, &[], asm)
}

/// Checks `p` with the given free identifiers in scope, solving all
/// read/write variables.
pub fn check_phrase_in(
    p: &Phrase,
    env: &[(Ident, PhraseType)],
    asm: &Assumptions,
) -> Result<Phrase, DpiaError> {
    let mut c = Checker {
        asm,
        subst: HashMap::new(),
        env: env.to_vec(),
    };
    let out = c.check(p)?;
    Ok(c.zonk(&out))
}

struct Checker<'a> {
    asm: &'a Assumptions,
    subst: HashMap<String, Rw>,
    env: Vec<(Ident, PhraseType)>,
}

/// Where a slot check happens, for error messages.
struct Site<'s> {
    consumer: &'s str,
    param: &'s str,
    producer: &'s Phrase,
    span: Option<Span>,
}

fn describe(p: &Phrase) -> String {
    match &p.kind {
        PhraseKind::Prim(prim) => prim.tag.clone(),
        PhraseKind::Ident(i) => i.name.clone(),
        PhraseKind::Literal(l) => l.to_string(),
        PhraseKind::Lambda(..) => "fun".into(),
        PhraseKind::Apply(f, _) | PhraseKind::DepApply(f, _) => describe(f),
        _ => "phrase".into(),
    }
}

fn producer_span(p: &Phrase) -> Option<Span> {
    match &p.kind {
        PhraseKind::Prim(prim) => prim.span,
        PhraseKind::Lambda(_, b) | PhraseKind::DepLambda(_, _, b) => producer_span(b),
        PhraseKind::Apply(f, _) | PhraseKind::DepApply(f, _) => producer_span(f),
        _ => None,
    }
}

impl Checker<'_> {
    fn resolve(&self, rw: &Rw) -> Rw {
        let mut cur = rw.clone();
        while let Rw::Var(v) = &cur {
            match self.subst.get(v) {
                Some(next) => cur = next.clone(),
                None => break,
            }
        }
        cur
    }

    fn zonk(&self, p: &Phrase) -> Phrase {
        let fix = |rw: &Rw| match self.resolve(rw) {
            Rw::Var(_) => Rw::Rd,
            r => r,
        };
        p.map_types(&mut |t| t.map_rw(&mut |r| fix(r)), &mut |a| match a {
            DArg::Rw(r) => DArg::Rw(fix(r)),
            other => other.clone(),
        })
    }

    fn unify_rw(
        &mut self,
        expected: &Rw,
        found: &Rw,
        scalar_sub: bool,
        site: &Site,
    ) -> Result<(), DpiaError> {
        let e = self.resolve(expected);
        let f = self.resolve(found);
        match (&e, &f) {
            (a, b) if a == b => Ok(()),
            (_, Rw::Var(v)) => {
                self.subst.insert(v.clone(), e.clone());
                Ok(())
            }
            (Rw::Var(v), _) => {
                self.subst.insert(v.clone(), f.clone());
                Ok(())
            }
            (Rw::Wr, Rw::Rd) if scalar_sub => Ok(()),
            _ => Err(DpiaError::new(
                DpiaErrorKind::RwMismatch {
                    expected: e,
                    found: f,
                    producer: describe(site.producer),
                    consumer: site.consumer.to_string(),
                    param: site.param.to_string(),
                },
                producer_span(site.producer).or(site.span),
            )),
        }
    }

    fn mismatch(&self, expected: &PhraseType, found: &PhraseType, site: &Site) -> DpiaError {
        DpiaError::new(
            DpiaErrorKind::TypeMismatch {
                expected: expected.clone(),
                found: found.clone(),
                context: format!("argument `{}` of `{}`", site.param, site.consumer),
            },
            site.span,
        )
    }

    /// Does a phrase of type `found` fit a slot of type `expected`? With
    /// `sub`, a readable scalar may fill a writable scalar slot.
    fn fit(
        &mut self,
        expected: &PhraseType,
        found: &PhraseType,
        sub: bool,
        site: &Site,
    ) -> Result<(), DpiaError> {
        match (expected, found) {
            (PhraseType::Exp(d1, r1), PhraseType::Exp(d2, r2)) => {
                if !d1.equal_under(d2, self.asm) {
                    return Err(self.mismatch(expected, found, site));
                }
                self.unify_rw(r1, r2, sub && d1.is_scalar(), site)
            }
            (PhraseType::Acc(d1), PhraseType::Acc(d2)) => {
                if d1.equal_under(d2, self.asm) {
                    Ok(())
                } else {
                    Err(self.mismatch(expected, found, site))
                }
            }
            (PhraseType::Comm, PhraseType::Comm) => Ok(()),
            (PhraseType::Fun(a1, b1), PhraseType::Fun(a2, b2)) => {
                self.fit(a2, a1, false, site)?;
                self.fit(b1, b2, sub, site)
            }
            (PhraseType::Pair(a1, b1), PhraseType::Pair(a2, b2)) => {
                self.fit(a1, a2, sub, site)?;
                self.fit(b1, b2, sub, site)
            }
            (
                PhraseType::DepFun {
                    kind: k1,
                    param: p1,
                    body: b1,
                },
                PhraseType::DepFun {
                    kind: k2,
                    param: p2,
                    body: b2,
                },
            ) if k1 == k2 => {
                let renamed = b2.substitute(p2, &rename_darg(*k1, p1));
                self.fit(b1, &renamed, sub, site)
            }
            _ => Err(self.mismatch(expected, found, site)),
        }
    }

    fn resolve_ty(&self, t: &PhraseType) -> PhraseType {
        t.map_rw(&mut |r| self.resolve(r))
    }

    fn check(&mut self, p: &Phrase) -> Result<Phrase, DpiaError> {
        let (kind, ty) = match &p.kind {
            PhraseKind::Ident(x) => {
                let ty = self
                    .env
                    .iter()
                    .rev()
                    .find(|(i, _)| i == x)
                    .map(|(_, t)| t.clone())
                    .ok_or_else(|| {
                        DpiaError::new(DpiaErrorKind::UnboundIdentifier(x.name.clone()), None)
                    })?;
                (p.kind.clone(), ty)
            }
            PhraseKind::Literal(l) => (p.kind.clone(), PhraseType::Exp(literal_type(l), Rw::Rd)),
            PhraseKind::Lambda(x, body) => {
                let PhraseType::Fun(pt, _) = &p.ty else {
                    return Err(DpiaError::new(
                        DpiaErrorKind::NotAFunction(p.ty.clone()),
                        None,
                    ));
                };
                self.env.push((x.clone(), (**pt).clone()));
                let b = self.check(body);
                self.env.pop();
                let b = b?;
                let ty = PhraseType::fun((**pt).clone(), b.ty.clone());
                (PhraseKind::Lambda(x.clone(), Box::new(b)), ty)
            }
            PhraseKind::Apply(f, a) => {
                let f = self.check(f)?;
                let a = self.check(a)?;
                let PhraseType::Fun(pt, rt) = self.resolve_ty(&f.ty) else {
                    return Err(DpiaError::new(
                        DpiaErrorKind::NotAFunction(f.ty.clone()),
                        None,
                    ));
                };
                let name = describe(&f);
                let site = Site {
                    consumer: &name,
                    param: "argument",
                    producer: &a,
                    span: producer_span(&f),
                };
                self.fit(&pt, &a.ty, true, &site)?;
                (PhraseKind::Apply(Box::new(f), Box::new(a)), *rt)
            }
            PhraseKind::DepLambda(k, x, body) => {
                let b = self.check(body)?;
                let ty = PhraseType::DepFun {
                    kind: *k,
                    param: x.clone(),
                    body: Box::new(b.ty.clone()),
                };
                (PhraseKind::DepLambda(*k, x.clone(), Box::new(b)), ty)
            }
            PhraseKind::DepApply(f, arg) => {
                let f = self.check(f)?;
                let PhraseType::DepFun { kind, param, body } = &f.ty else {
                    return Err(DpiaError::new(
                        DpiaErrorKind::NotAFunction(f.ty.clone()),
                        None,
                    ));
                };
                if arg.kind() != *kind {
                    return Err(DpiaError::new(
                        DpiaErrorKind::BadTypeArguments(format!(
                            "expected a {kind}, given `{arg}`"
                        )),
                        None,
                    ));
                }
                let ty = body.substitute(param, arg);
                (PhraseKind::DepApply(Box::new(f), arg.clone()), ty)
            }
            PhraseKind::Pair(a, b) => {
                let a = self.check(a)?;
                let b = self.check(b)?;
                let ty = PhraseType::Pair(Box::new(a.ty.clone()), Box::new(b.ty.clone()));
                (PhraseKind::Pair(Box::new(a), Box::new(b)), ty)
            }
            PhraseKind::Proj1(x) | PhraseKind::Proj2(x) => {
                let x = self.check(x)?;
                let PhraseType::Pair(a, b) = &x.ty else {
                    return Err(DpiaError::new(
                        DpiaErrorKind::TypeMismatch {
                            expected: PhraseType::Pair(
                                Box::new(PhraseType::Comm),
                                Box::new(PhraseType::Comm),
                            ),
                            found: x.ty.clone(),
                            context: "projection".into(),
                        },
                        None,
                    ));
                };
                let second = matches!(p.kind, PhraseKind::Proj2(_));
                let ty = if second { (**b).clone() } else { (**a).clone() };
                let inner = Box::new(x);
                (
                    if second {
                        PhraseKind::Proj2(inner)
                    } else {
                        PhraseKind::Proj1(inner)
                    },
                    ty,
                )
            }
            PhraseKind::Prim(prim) => return self.check_prim(prim),
        };
        Ok(Phrase { kind, ty })
    }

    fn check_prim(&mut self, prim: &Prim) -> Result<Phrase, DpiaError> {
        let sig = signature(&prim.tag).ok_or_else(|| {
            DpiaError::new(DpiaErrorKind::UnknownPrimitive(prim.tag.clone()), prim.span)
        })?;
        if prim.args.len() != sig.arity() {
            return Err(DpiaError::new(
                DpiaErrorKind::Arity {
                    tag: prim.tag.clone(),
                    expected: sig.arity(),
                    found: prim.args.len(),
                },
                prim.span,
            ));
        }
        let (params, result) = sig
            .instantiate(&prim.targs)
            .map_err(|m| DpiaError::new(DpiaErrorKind::BadTypeArguments(m), prim.span))?;
        let mut args = Vec::with_capacity(prim.args.len());
        for ((pname, pty), arg) in params.iter().zip(&prim.args) {
            let a = self.check(arg)?;
            let site = Site {
                consumer: &prim.tag,
                param: pname,
                producer: &a,
                span: prim.span,
            };
            self.fit(pty, &a.ty, prim.tag != "toMem", &site)?;
            args.push(a);
        }
        let kind = PhraseKind::Prim(Prim {
            tag: prim.tag.clone(),
            targs: prim.targs.clone(),
            args,
            span: prim.span,
        });
        Ok(Phrase { kind, ty: result })
    }
}
