use super::{LowerError, NameSupply};
use crate::dpia::{check_phrase, signature, DArg, DKind, Phrase, PhraseType, Rw};
use crate::expr::{Expr, ExprKind, Ident};
use crate::nat::{Assumptions, Nat};
use crate::primitives::is_high_level;
use crate::types::{DataType, Kind, Type, TypeArg};

/// Translates a typed, fully lowered RISE expression into functional DPIA
/// and solves its read/write annotations.
pub fn rise_to_dpia(e: &Expr, asm: &Assumptions) -> Result<Phrase, LowerError> {
    let mut names = NameSupply::default();
    e.any_node(&mut |n| {
        match &n.kind {
            ExprKind::Identifier(x) | ExprKind::Lambda { param: x, .. } => names.reserve(&x.name),
            ExprKind::DepLambda { param, .. } => names.reserve(param),
            _ => {}
        }
        false
    });
    let mut l = Lower {
        names,
        env: Vec::new(),
        rw_vars: 0,
    };
    let p = l.expr(e)?;
    Ok(check_phrase(&p, asm)?)
}

struct Lower {
    names: NameSupply,
    env: Vec<(Ident, PhraseType)>,
    rw_vars: usize,
}

fn ty_of(e: &Expr) -> Result<&Type, LowerError> {
    e.ty.as_ref().ok_or_else(|| LowerError::Unsupported {
        what: "untyped expression".into(),
        span: e.span,
    })
}

fn fun_parts(t: &Type) -> (Vec<&Type>, &Type) {
    let mut params = Vec::new();
    let mut cur = t;
    while let Type::Fun(a, b) = cur {
        params.push(&**a);
        cur = b;
    }
    (params, cur)
}

fn data(t: &Type) -> Option<&DataType> {
    match t {
        Type::Data(d) => Some(d),
        _ => None,
    }
}

fn array(t: &Type) -> Option<(&Nat, &DataType)> {
    match data(t)? {
        DataType::Array(n, e) => Some((n, e)),
        _ => None,
    }
}

fn tuple(t: &Type) -> Option<(&DataType, &DataType)> {
    match data(t)? {
        DataType::Tuple(a, b) => Some((a, b)),
        _ => None,
    }
}

fn dkind(k: Kind) -> DKind {
    match k {
        Kind::Nat => DKind::Nat,
        Kind::DataType => DKind::Data,
        Kind::AddressSpace => DKind::Addr,
    }
}

fn darg(t: &TypeArg) -> DArg {
    match t {
        TypeArg::Nat(n) => DArg::Nat(n.clone()),
        TypeArg::DataType(d) => DArg::Data(d.clone()),
        TypeArg::AddressSpace(a) => DArg::Addr(*a),
    }
}

impl Lower {
    fn fresh_rw(&mut self) -> DArg {
        self.rw_vars += 1;
        DArg::Rw(Rw::Var(format!("?w{}", self.rw_vars)))
    }

    fn param_type(&self, t: &Type, e: &Expr) -> Result<PhraseType, LowerError> {
        match t {
            Type::Data(d) => Ok(PhraseType::Exp(d.clone(), Rw::Rd)),
            other => Err(LowerError::Unsupported {
                what: format!("parameter of function type {other}"),
                span: e.span,
            }),
        }
    }

    fn expr(&mut self, e: &Expr) -> Result<Phrase, LowerError> {
        if e.head_primitive().is_some() {
            return self.prim_app(e);
        }
        Ok(match &e.kind {
            ExprKind::Identifier(x) => {
                let (id, ty) = self
                    .env
                    .iter()
                    .rev()
                    .find(|(i, _)| i == x)
                    .cloned()
                    .ok_or_else(|| LowerError::Unsupported {
                        what: format!("free identifier `{x}`"),
                        span: e.span,
                    })?;
                Phrase::ident(&id, ty)
            }
            ExprKind::Literal(l) => Phrase::literal(l.clone()),
            ExprKind::Lambda { param, body, .. } => {
                let Type::Fun(a, _) = ty_of(e)? else {
                    unreachable!("lambda of non-function type")
                };
                let pt = self.param_type(a, e)?;
                self.env.push((param.clone(), pt.clone()));
                let b = self.expr(body);
                self.env.pop();
                Phrase::lambda(param.clone(), pt, b?)
            }
            ExprKind::Apply(f, a) => {
                let f = self.expr(f)?;
                let a = self.expr(a)?;
                if !matches!(f.ty, PhraseType::Fun(..)) {
                    return Err(LowerError::Unsupported {
                        what: format!("application of {}", f.ty),
                        span: e.span,
                    });
                }
                f.app(a)
            }
            ExprKind::DepLambda { kind, param, body } => {
                Phrase::dep_lambda(dkind(*kind), param.clone(), self.expr(body)?)
            }
            ExprKind::DepApply(f, t) => {
                let f = self.expr(f)?;
                if !matches!(f.ty, PhraseType::DepFun { .. }) {
                    return Err(LowerError::Unsupported {
                        what: format!("dependent application of {}", f.ty),
                        span: e.span,
                    });
                }
                f.dep_app(darg(t))
            }
            ExprKind::Primitive(_) => unreachable!("handled above"),
        })
    }

    fn prim_app(&mut self, e: &Expr) -> Result<Phrase, LowerError> {
        let mut args = Vec::new();
        let mut cur = e;
        while let ExprKind::Apply(f, a) = &cur.kind {
            args.push(&**a);
            cur = f;
        }
        args.reverse();
        let typed_head = cur;
        let mut targs = Vec::new();
        while let ExprKind::DepApply(f, t) = &cur.kind {
            targs.push(t);
            cur = f;
        }
        targs.reverse();
        let ExprKind::Primitive(name) = &cur.kind else {
            return Err(LowerError::Unsupported {
                what: "mixed type and value arguments".into(),
                span: e.span,
            });
        };
        let span = cur.span;
        if is_high_level(name) {
            return Err(LowerError::Unlowered {
                primitive: name.clone(),
                span,
            });
        }
        let (params, result) = fun_parts(ty_of(typed_head)?);
        let shape = |what: &str| LowerError::Unsupported {
            what: format!("unexpected type for `{name}`: {what}"),
            span,
        };
        let nat = |n: &Nat| DArg::Nat(n.clone());
        let dt = |d: &DataType| DArg::Data(d.clone());
        let (tag, dargs): (&str, Vec<DArg>) = match name.as_str() {
            "mapSeq" | "mapGlobal" | "mapWorkGroup" | "mapLocal" => {
                let (n, s) = params
                    .get(1)
                    .and_then(|t| array(t))
                    .ok_or_else(|| shape("input"))?;
                let (_, t) = array(result).ok_or_else(|| shape("result"))?;
                (name.as_str(), vec![nat(n), dt(s), dt(t)])
            }
            "reduceSeqAt" => {
                let (n, s) = params
                    .get(2)
                    .and_then(|t| array(t))
                    .ok_or_else(|| shape("input"))?;
                let t = data(result).ok_or_else(|| shape("result"))?;
                ("reduceSeq", vec![nat(n), darg(targs[0]), dt(s), dt(t)])
            }
            "zip" => {
                let (n, s) = params
                    .first()
                    .and_then(|t| array(t))
                    .ok_or_else(|| shape("lhs"))?;
                let (_, t) = params
                    .get(1)
                    .and_then(|t| array(t))
                    .ok_or_else(|| shape("rhs"))?;
                let w = self.fresh_rw();
                ("zip", vec![nat(n), dt(s), dt(t), w])
            }
            "fst" | "snd" => {
                let (s, t) = params
                    .first()
                    .and_then(|t| tuple(t))
                    .ok_or_else(|| shape("input"))?;
                let w = self.fresh_rw();
                (name.as_str(), vec![dt(s), dt(t), w])
            }
            "split" => {
                let (m, inner) = array(result).ok_or_else(|| shape("result"))?;
                let DataType::Array(_, t) = inner else {
                    return Err(shape("result"));
                };
                let w = self.fresh_rw();
                ("split", vec![darg(targs[0]), nat(m), dt(t), w])
            }
            "join" => {
                let (n, inner) = params
                    .first()
                    .and_then(|t| array(t))
                    .ok_or_else(|| shape("input"))?;
                let DataType::Array(m, t) = inner else {
                    return Err(shape("input"));
                };
                let w = self.fresh_rw();
                ("join", vec![nat(n), nat(m), dt(t), w])
            }
            "toMem" => {
                let t = params
                    .first()
                    .and_then(|t| data(t))
                    .ok_or_else(|| shape("input"))?;
                ("toMem", vec![darg(targs[0]), dt(t)])
            }
            "add" | "sub" | "mul" => {
                let t = params
                    .first()
                    .and_then(|t| data(t))
                    .ok_or_else(|| shape("operand"))?;
                (name.as_str(), vec![dt(t)])
            }
            "iterate" => {
                let TypeArg::Nat(k) = targs[0] else {
                    return Err(shape("iteration count"));
                };
                if k.as_const() == Some(0) {
                    return Err(LowerError::Unsupported {
                        what: "iterate needs at least one iteration".into(),
                        span,
                    });
                }
                let Some(Type::DepFun { param, body, .. }) = params.first() else {
                    return Err(shape("body"));
                };
                let (step_in, _) = fun_parts(body);
                let (ln, _) = step_in
                    .first()
                    .and_then(|t| array(t))
                    .ok_or_else(|| shape("body input"))?;
                let n = ln.substitute(param, &Nat::Const(1)).normalize();
                let (m, t) = array(result).ok_or_else(|| shape("result"))?;
                ("iterate", vec![DArg::Nat(n), nat(m), nat(k), dt(t)])
            }
            other => {
                return Err(LowerError::Unsupported {
                    what: format!("primitive `{other}` has no DPIA counterpart"),
                    span,
                })
            }
        };
        let sig = signature(tag).expect("every lowered tag has a signature");
        let (slots, _) = sig
            .instantiate(&dargs)
            .map_err(|what| LowerError::Unsupported { what, span })?;
        let mut phrase_args = Vec::new();
        for a in args.iter().take(slots.len()) {
            phrase_args.push(self.expr(a)?);
        }
        let mut eta = Vec::new();
        for (pname, pty) in slots.iter().skip(phrase_args.len()) {
            let x = self.names.fresh(pname);
            phrase_args.push(Phrase::ident(&x, pty.clone()));
            eta.push((x, pty.clone()));
        }
        let mut out = Phrase::prim(tag, dargs, phrase_args).with_span(span);
        for (x, t) in eta.into_iter().rev() {
            out = Phrase::lambda(x, t, out);
        }
        for extra in args.iter().skip(slots.len()) {
            let a = self.expr(extra)?;
            out = out.app(a);
        }
        Ok(out)
    }
}
