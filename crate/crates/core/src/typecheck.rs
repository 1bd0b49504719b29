//! Type inference for RISE.
//!
//! Implicit binders of primitive schemes are instantiated with inference
//! variables (`?n3` for Nats, `?t5` for data types, `?a7` for arbitrary
//! types) which are then solved by unification. Nat equations are solved by
//! normalization plus solving for a single unknown that occurs linearly.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::expr::{Expr, ExprKind, Ident, Literal, Span};
use crate::nat::{Assumptions, Nat};
use crate::primitives::Registry;
use crate::types::{rename_arg, DataType, Kind, ScalarType, Type, TypeArg};

#[derive(Clone, Debug, PartialEq)]
pub enum TypeErrorKind {
    Mismatch { expected: Type, found: Type },
    NatMismatch { expected: Nat, found: Nat },
    UnboundIdentifier(String),
    UnknownPrimitive(String),
    UnsolvedImplicit(String),
    StoringFunction(Type),
    NotAFunction(Type),
    MissingTypeArgument(Type),
    KindMismatch { expected: Kind, found: Kind },
    Inconsistent(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct TypeError {
    pub kind: TypeErrorKind,
    pub span: Option<Span>,
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(sp) = self.span {
            write!(f, "{sp}: ")?;
        }
        match &self.kind {
            TypeErrorKind::Mismatch { expected, found } => {
                write!(f, "type mismatch: expected `{expected}`, found `{found}`")
            }
            TypeErrorKind::NatMismatch { expected, found } => {
                write!(f, "size mismatch: cannot prove `{expected}` = `{found}`")
            }
            TypeErrorKind::UnboundIdentifier(x) => write!(f, "unbound identifier `{x}`"),
            TypeErrorKind::UnknownPrimitive(p) => write!(f, "unknown primitive `{p}`"),
            TypeErrorKind::UnsolvedImplicit(v) => {
                write!(f, "could not infer implicit argument `{v}`")
            }
            TypeErrorKind::StoringFunction(t) => {
                write!(f, "function type `{t}` cannot be stored inside a data type")
            }
            TypeErrorKind::NotAFunction(t) => write!(f, "`{t}` is applied but is not a function"),
            TypeErrorKind::MissingTypeArgument(t) => {
                write!(
                    f,
                    "expression of dependent type `{t}` needs an explicit type-level argument"
                )
            }
            TypeErrorKind::KindMismatch { expected, found } => {
                write!(f, "kind mismatch: expected {expected}, found {found}")
            }
            TypeErrorKind::Inconsistent(m) => write!(f, "inconsistent annotation: {m}"),
        }
    }
}

impl std::error::Error for TypeError {}

fn err(kind: TypeErrorKind, span: Option<Span>) -> TypeError {
    TypeError { kind, span }
}

/// Types of expression variables in scope, innermost last.
#[derive(Clone, Debug, Default)]
pub struct TypeEnv {
    pub vars: Vec<(Ident, Type)>,
}

impl TypeEnv {
    pub fn lookup(&self, x: &Ident) -> Option<&Type> {
        self.vars
            .iter()
            .rev()
            .find(|(y, _)| y.id == x.id)
            .map(|(_, t)| t)
    }
}

/// Infers and annotates every node of a closed expression.
pub fn infer(e: &Expr, registry: &Registry, asm: &mut Assumptions) -> Result<Expr, TypeError> {
    infer_in(e, &TypeEnv::default(), registry, asm)
}

/// Like [`infer`], for a subterm whose free identifiers are typed by `env`.
pub fn infer_in(
    e: &Expr,
    env: &TypeEnv,
    registry: &Registry,
    asm: &mut Assumptions,
) -> Result<Expr, TypeError> {
    let mut inf = Inference::new(registry, asm.clone());
    let mut env = env.clone();
    let typed = inf.infer(e, &mut env)?;
    inf.solve_deferred(true)?;
    let out = inf.zonk_expr(&typed)?;
    *asm = inf.asm;
    Ok(out)
}

struct Inference<'r> {
    registry: &'r Registry,
    asm: Assumptions,
    nats: BTreeMap<String, Nat>,
    dts: BTreeMap<String, DataType>,
    tys: BTreeMap<String, Type>,
    deferred: Vec<(Nat, Nat, Option<Span>)>,
    counter: usize,
}

fn is_meta(name: &str) -> bool {
    name.starts_with('?')
}

impl<'r> Inference<'r> {
    fn new(registry: &'r Registry, asm: Assumptions) -> Self {
        Inference {
            registry,
            asm,
            nats: BTreeMap::new(),
            dts: BTreeMap::new(),
            tys: BTreeMap::new(),
            deferred: Vec::new(),
            counter: 0,
        }
    }

    fn fresh(&mut self, prefix: &str) -> String {
        self.counter += 1;
        format!("?{prefix}{}", self.counter)
    }

    fn fresh_arg(&mut self, kind: Kind) -> TypeArg {
        match kind {
            Kind::Nat => TypeArg::Nat(Nat::Var(self.fresh("n"))),
            Kind::DataType => TypeArg::DataType(DataType::Var(self.fresh("t"))),
            Kind::AddressSpace => TypeArg::Nat(Nat::Var(self.fresh("a"))),
        }
    }

    /// Replaces leading implicit binders with fresh inference variables.
    fn instantiate(&mut self, mut t: Type) -> Type {
        while let Type::DepFun {
            kind,
            param,
            implicit: true,
            body,
        } = t
        {
            let arg = self.fresh_arg(kind);
            t = body.substitute(&param, &arg);
        }
        t
    }

    // ---- resolution ----

    fn resolve_nat(&self, n: &Nat) -> Nat {
        n.map_vars(&mut |v| self.nats.get(v).map(|b| self.resolve_nat(b)))
            .normalize_under(&self.asm)
    }

    fn resolve_dt(&self, d: &DataType) -> DataType {
        match d {
            DataType::Var(v) => match self.dts.get(v) {
                Some(b) => self.resolve_dt(b),
                None => d.clone(),
            },
            DataType::Scalar(_) => d.clone(),
            DataType::Index(n) => DataType::Index(self.resolve_nat(n)),
            DataType::Array(n, e) => {
                DataType::Array(self.resolve_nat(n), Box::new(self.resolve_dt(e)))
            }
            DataType::Tuple(a, b) => DataType::tuple(self.resolve_dt(a), self.resolve_dt(b)),
        }
    }

    fn resolve(&self, t: &Type) -> Type {
        match t {
            Type::Var(v) => match self.tys.get(v) {
                Some(b) => self.resolve(b),
                None => t.clone(),
            },
            Type::Data(d) => Type::Data(self.resolve_dt(d)),
            Type::Fun(a, b) => Type::fun(self.resolve(a), self.resolve(b)),
            Type::DepFun {
                kind,
                param,
                implicit,
                body,
            } => Type::DepFun {
                kind: *kind,
                param: param.clone(),
                implicit: *implicit,
                body: Box::new(self.resolve(body)),
            },
        }
    }

    // ---- unification ----

    fn unify(
        &mut self,
        expected: &Type,
        found: &Type,
        span: Option<Span>,
    ) -> Result<(), TypeError> {
        let a = self.resolve(expected);
        let b = self.resolve(found);
        let mismatch = || {
            err(
                TypeErrorKind::Mismatch {
                    expected: a.clone(),
                    found: b.clone(),
                },
                span,
            )
        };
        match (&a, &b) {
            (Type::Var(x), Type::Var(y)) if x == y => Ok(()),
            (Type::Var(x), other) | (other, Type::Var(x)) if is_meta(x) => {
                if other.free_type_vars().contains(x) {
                    return Err(mismatch());
                }
                self.tys.insert(x.clone(), other.clone());
                Ok(())
            }
            (Type::Data(d1), Type::Data(d2)) => {
                self.unify_dt(d1, d2, span).map_err(|e| match e.kind {
                    TypeErrorKind::Mismatch { .. } => mismatch(),
                    _ => e,
                })
            }
            (Type::Data(DataType::Var(x)), Type::Fun(..) | Type::DepFun { .. })
            | (Type::Fun(..) | Type::DepFun { .. }, Type::Data(DataType::Var(x)))
                if is_meta(x) =>
            {
                let f = if matches!(a, Type::Data(_)) {
                    b.clone()
                } else {
                    a.clone()
                };
                Err(err(TypeErrorKind::StoringFunction(f), span))
            }
            (Type::Fun(p1, r1), Type::Fun(p2, r2)) => {
                self.unify(p1, p2, span)?;
                self.unify(r1, r2, span)
            }
            (
                Type::DepFun {
                    kind: k1,
                    param: p1,
                    implicit: i1,
                    body: b1,
                },
                Type::DepFun {
                    kind: k2,
                    param: p2,
                    implicit: i2,
                    body: b2,
                },
            ) if k1 == k2 && i1 == i2 => {
                let renamed = b2.substitute(p2, &rename_arg(*k2, p1));
                self.unify(b1, &renamed, span)
            }
            _ => Err(mismatch()),
        }
    }

    fn unify_dt(
        &mut self,
        a: &DataType,
        b: &DataType,
        span: Option<Span>,
    ) -> Result<(), TypeError> {
        let a = self.resolve_dt(a);
        let b = self.resolve_dt(b);
        let mismatch = || {
            err(
                TypeErrorKind::Mismatch {
                    expected: Type::Data(a.clone()),
                    found: Type::Data(b.clone()),
                },
                span,
            )
        };
        match (&a, &b) {
            (DataType::Var(x), DataType::Var(y)) if x == y => Ok(()),
            (DataType::Var(x), other) | (other, DataType::Var(x)) if is_meta(x) => {
                let mut nats = BTreeSet::new();
                let mut dts = BTreeSet::new();
                other.collect_free(&mut nats, &mut dts);
                if dts.contains(x) {
                    return Err(mismatch());
                }
                self.dts.insert(x.clone(), other.clone());
                Ok(())
            }
            (DataType::Scalar(s1), DataType::Scalar(s2)) if s1 == s2 => Ok(()),
            (DataType::Index(n1), DataType::Index(n2)) => self.unify_nat(n1, n2, span),
            (DataType::Array(n1, e1), DataType::Array(n2, e2)) => {
                self.unify_nat(n1, n2, span)?;
                self.unify_dt(e1, e2, span)
            }
            (DataType::Tuple(a1, b1), DataType::Tuple(a2, b2)) => {
                self.unify_dt(a1, a2, span)?;
                self.unify_dt(b1, b2, span)
            }
            _ => Err(mismatch()),
        }
    }

    fn unify_nat(&mut self, a: &Nat, b: &Nat, span: Option<Span>) -> Result<(), TypeError> {
        match self.try_solve_nat(a, b)? {
            NatStep::Solved => Ok(()),
            NatStep::Deferred => {
                self.deferred.push((a.clone(), b.clone(), span));
                Ok(())
            }
            NatStep::Failed(x, y) => Err(err(
                TypeErrorKind::NatMismatch {
                    expected: x,
                    found: y,
                },
                span,
            )),
        }
    }

    fn try_solve_nat(&mut self, a: &Nat, b: &Nat) -> Result<NatStep, TypeError> {
        let a = self.resolve_nat(a);
        let b = self.resolve_nat(b);
        if a == b {
            return Ok(NatStep::Solved);
        }
        let diff = a.clone().sub(b.clone()).normalize_under(&self.asm);
        if diff == Nat::Const(0) {
            return Ok(NatStep::Solved);
        }
        let metas: Vec<String> = diff
            .free_vars()
            .into_iter()
            .filter(|v| is_meta(v))
            .collect();
        match metas.as_slice() {
            [] => Ok(NatStep::Failed(a, b)),
            [x] => match solve_linear(&diff, x, &mut self.asm) {
                Some(sol) => {
                    self.nats.insert(x.clone(), sol);
                    Ok(NatStep::Solved)
                }
                None => Ok(NatStep::Deferred),
            },
            _ => {
                // A meta standing alone on one side can be bound directly.
                for (side, other) in [(&a, &b), (&b, &a)] {
                    if let Nat::Var(x) = side {
                        if is_meta(x) && !other.mentions(x) {
                            self.nats.insert(x.clone(), other.clone());
                            return Ok(NatStep::Solved);
                        }
                    }
                }
                Ok(NatStep::Deferred)
            }
        }
    }

    /// Retries deferred Nat equations until no progress is made. With
    /// `final_pass`, anything left over is an error.
    fn solve_deferred(&mut self, final_pass: bool) -> Result<(), TypeError> {
        loop {
            let pending = std::mem::take(&mut self.deferred);
            if pending.is_empty() {
                return Ok(());
            }
            let before = pending.len();
            for (a, b, span) in pending {
                match self.try_solve_nat(&a, &b)? {
                    NatStep::Solved => {}
                    NatStep::Deferred => self.deferred.push((a, b, span)),
                    NatStep::Failed(x, y) => {
                        return Err(err(
                            TypeErrorKind::NatMismatch {
                                expected: x,
                                found: y,
                            },
                            span,
                        ))
                    }
                }
            }
            if self.deferred.len() == before {
                if final_pass {
                    let (a, b, span) = self.deferred[0].clone();
                    return Err(err(
                        TypeErrorKind::NatMismatch {
                            expected: self.resolve_nat(&a),
                            found: self.resolve_nat(&b),
                        },
                        span,
                    ));
                }
                return Ok(());
            }
        }
    }

    // ---- inference ----

    fn infer(&mut self, e: &Expr, env: &mut TypeEnv) -> Result<Expr, TypeError> {
        let span = e.span;
        let (kind, ty) = match &e.kind {
            ExprKind::Identifier(x) => {
                let t = env
                    .lookup(x)
                    .cloned()
                    .ok_or_else(|| err(TypeErrorKind::UnboundIdentifier(x.name.clone()), span))?;
                (e.kind.clone(), t)
            }
            ExprKind::Literal(l) => (e.kind.clone(), Type::Data(literal_type(l))),
            ExprKind::Primitive(p) => {
                let scheme = self
                    .registry
                    .scheme(p)
                    .cloned()
                    .ok_or_else(|| err(TypeErrorKind::UnknownPrimitive(p.clone()), span))?;
                (e.kind.clone(), self.instantiate(scheme))
            }
            ExprKind::Lambda {
                param,
                annotation,
                body,
            } => {
                let pt = match annotation {
                    Some(t) => t.clone(),
                    None => Type::Var(self.fresh("a")),
                };
                env.vars.push((param.clone(), pt.clone()));
                let body = self.infer(body, env);
                env.vars.pop();
                let body = body?;
                let bt = body.ty.clone().expect("typed");
                (
                    ExprKind::Lambda {
                        param: param.clone(),
                        annotation: annotation.clone(),
                        body: Box::new(body),
                    },
                    Type::fun(pt, bt),
                )
            }
            ExprKind::Apply(f, a) => {
                let f = self.infer(f, env)?;
                let a = self.infer(a, env)?;
                let ft = self.resolve(f.ty.as_ref().expect("typed"));
                let at = a.ty.clone().expect("typed");
                let result = match ft {
                    Type::Fun(p, r) => {
                        self.unify(&p, &at, a.span.or(span))?;
                        *r
                    }
                    Type::Var(ref v) if is_meta(v) => {
                        let r = Type::Var(self.fresh("a"));
                        self.unify(&ft, &Type::fun(at, r.clone()), span)?;
                        r
                    }
                    dep @ Type::DepFun { .. } => {
                        return Err(err(TypeErrorKind::MissingTypeArgument(dep), span))
                    }
                    other => return Err(err(TypeErrorKind::NotAFunction(other), span)),
                };
                (ExprKind::Apply(Box::new(f), Box::new(a)), result)
            }
            ExprKind::DepLambda { kind, param, body } => {
                let body = self.infer(body, env)?;
                let bt = body.ty.clone().expect("typed");
                (
                    ExprKind::DepLambda {
                        kind: *kind,
                        param: param.clone(),
                        body: Box::new(body),
                    },
                    Type::DepFun {
                        kind: *kind,
                        param: param.clone(),
                        implicit: false,
                        body: Box::new(bt),
                    },
                )
            }
            ExprKind::DepApply(f, arg) => {
                let f = self.infer(f, env)?;
                let ft = self.resolve(f.ty.as_ref().expect("typed"));
                let Type::DepFun {
                    kind,
                    param,
                    implicit: false,
                    body,
                } = &ft
                else {
                    return Err(err(TypeErrorKind::NotAFunction(ft), span));
                };
                if *kind != arg.kind() {
                    return Err(err(
                        TypeErrorKind::KindMismatch {
                            expected: *kind,
                            found: arg.kind(),
                        },
                        span,
                    ));
                }
                let t = body.substitute(param, arg);
                let t = self.instantiate(t);
                (ExprKind::DepApply(Box::new(f), arg.clone()), t)
            }
        };
        self.solve_deferred(false)?;
        Ok(Expr {
            kind,
            ty: Some(ty),
            span,
        })
    }

    // ---- finalization ----

    fn zonk_type(&self, t: &Type, span: Option<Span>) -> Result<Type, TypeError> {
        let t = self.resolve(t).normalize_under(&self.asm);
        if let Some(v) = t.free_type_vars().into_iter().find(|v| is_meta(v)) {
            return Err(err(TypeErrorKind::UnsolvedImplicit(v), span));
        }
        Ok(t)
    }

    fn zonk_expr(&self, e: &Expr) -> Result<Expr, TypeError> {
        let kind = match &e.kind {
            ExprKind::Lambda {
                param,
                annotation,
                body,
            } => ExprKind::Lambda {
                param: param.clone(),
                annotation: annotation.clone(),
                body: Box::new(self.zonk_expr(body)?),
            },
            ExprKind::Apply(f, a) => {
                ExprKind::Apply(Box::new(self.zonk_expr(f)?), Box::new(self.zonk_expr(a)?))
            }
            ExprKind::DepLambda { kind, param, body } => ExprKind::DepLambda {
                kind: *kind,
                param: param.clone(),
                body: Box::new(self.zonk_expr(body)?),
            },
            ExprKind::DepApply(f, t) => ExprKind::DepApply(Box::new(self.zonk_expr(f)?), t.clone()),
            other => other.clone(),
        };
        let ty = match &e.ty {
            Some(t) => Some(self.zonk_type(t, e.span)?),
            None => None,
        };
        Ok(Expr {
            kind,
            ty,
            span: e.span,
        })
    }
}

enum NatStep {
    Solved,
    Deferred,
    Failed(Nat, Nat),
}

/// Solves `diff = 0` for `x` when `diff` is linear in `x`. A symbolic
/// quotient is accepted by recording the divisibility it relies on.
fn solve_linear(diff: &Nat, x: &str, asm: &mut Assumptions) -> Option<Nat> {
    let rest = diff.substitute(x, &Nat::Const(0)).normalize_under(asm);
    let coef = diff
        .substitute(x, &Nat::Const(1))
        .sub(rest.clone())
        .normalize_under(asm);
    if coef.mentions(x) || rest.mentions(x) || coef == Nat::Const(0) {
        return None;
    }
    let rebuilt = coef
        .clone()
        .mul(Nat::var(x))
        .add(rest.clone())
        .normalize_under(asm);
    if rebuilt != diff.normalize_under(asm) {
        return None;
    }
    let target = Nat::Const(0).sub(rest).normalize_under(asm);
    let check = |sol: &Nat, asm: &Assumptions| {
        coef.clone()
            .mul(sol.clone())
            .sub(target.clone())
            .normalize_under(asm)
            == Nat::Const(0)
    };
    let sol = target.clone().div(coef.clone()).normalize_under(asm);
    if check(&sol, asm) {
        return Some(sol);
    }
    if coef.as_const().is_some() && target.as_const().is_some() {
        return None;
    }
    asm.assume_divides(&coef, &target);
    let sol = target.clone().div(coef.clone()).normalize_under(asm);
    check(&sol, asm).then_some(sol)
}

pub fn literal_type(l: &Literal) -> DataType {
    match l {
        Literal::F32 { .. } => DataType::Scalar(ScalarType::F32),
        Literal::I32(_) => DataType::Scalar(ScalarType::I32),
        Literal::Bool(_) => DataType::Scalar(ScalarType::Bool),
    }
}

/// Re-checks a fully annotated tree without solving anything: every node's
/// type must follow from its children's annotations by the typing rules.
pub fn check_annotated(e: &Expr, registry: &Registry, asm: &Assumptions) -> Result<(), TypeError> {
    check_node(e, &mut TypeEnv::default(), registry, asm)
}

fn check_node(
    e: &Expr,
    env: &mut TypeEnv,
    registry: &Registry,
    asm: &Assumptions,
) -> Result<(), TypeError> {
    let span = e.span;
    let bad = |m: String| err(TypeErrorKind::Inconsistent(m), span);
    let t =
        e.ty.as_ref()
            .ok_or_else(|| bad("missing type annotation".into()))?;
    if t.free_type_vars().iter().any(|v| is_meta(v)) {
        return Err(bad(format!("inference variable left in `{t}`")));
    }
    let same = |a: &Type, b: &Type| a.equal_under(b, asm);
    match &e.kind {
        ExprKind::Identifier(x) => {
            let bound = env
                .lookup(x)
                .ok_or_else(|| err(TypeErrorKind::UnboundIdentifier(x.name.clone()), span))?;
            if !same(bound, t) {
                return Err(bad(format!(
                    "`{}` has type `{bound}` but is annotated `{t}`",
                    x.name
                )));
            }
        }
        ExprKind::Literal(l) => {
            if !same(&Type::Data(literal_type(l)), t) {
                return Err(bad(format!("literal annotated `{t}`")));
            }
        }
        ExprKind::Primitive(p) => {
            let scheme = registry
                .scheme(p)
                .ok_or_else(|| err(TypeErrorKind::UnknownPrimitive(p.clone()), span))?;
            if !is_instance(scheme, t, registry, asm) {
                return Err(bad(format!(
                    "`{p}` annotated `{t}` is not an instance of `{scheme}`"
                )));
            }
        }
        ExprKind::Lambda { param, body, .. } => {
            let Type::Fun(pt, rt) = t else {
                return Err(bad(format!("lambda annotated `{t}`")));
            };
            env.vars.push((param.clone(), (**pt).clone()));
            let r = check_node(body, env, registry, asm);
            env.vars.pop();
            r?;
            if !same(body.ty.as_ref().unwrap(), rt) {
                return Err(bad("lambda body type differs from annotation".into()));
            }
        }
        ExprKind::Apply(f, a) => {
            check_node(f, env, registry, asm)?;
            check_node(a, env, registry, asm)?;
            let Some(Type::Fun(pt, rt)) = f.ty.as_ref() else {
                return Err(bad(
                    "applied expression is not annotated with a function type".into(),
                ));
            };
            if !same(pt, a.ty.as_ref().unwrap()) || !same(rt, t) {
                return Err(bad(format!(
                    "application of `{}` to `{}`",
                    f.ty.as_ref().unwrap(),
                    a.ty.as_ref().unwrap()
                )));
            }
        }
        ExprKind::DepLambda { kind, param, body } => {
            check_node(body, env, registry, asm)?;
            let expected = Type::DepFun {
                kind: *kind,
                param: param.clone(),
                implicit: false,
                body: Box::new(body.ty.clone().unwrap()),
            };
            if !same(&expected, t) {
                return Err(bad("dependent lambda annotation".into()));
            }
        }
        ExprKind::DepApply(f, arg) => {
            check_node(f, env, registry, asm)?;
            let Some(Type::DepFun {
                param,
                body,
                implicit: false,
                ..
            }) = f.ty.as_ref()
            else {
                return Err(bad("dependent application of a non-dependent type".into()));
            };
            let inst = body.substitute(param, arg);
            if !is_instance(&inst, t, registry, asm) {
                return Err(bad(format!("`{inst}` instantiated to `{t}`")));
            }
        }
    }
    Ok(())
}

/// True when `t` is obtained from `scheme` by choosing its leading implicit
/// arguments.
fn is_instance(scheme: &Type, t: &Type, registry: &Registry, asm: &Assumptions) -> bool {
    let mut inf = Inference::new(registry, asm.clone());
    let inst = inf.instantiate(scheme.clone());
    inf.unify(&inst, t, None).is_ok()
        && inf.solve_deferred(true).is_ok()
        && inf
            .resolve(&inst)
            .normalize_under(&inf.asm)
            .equal_under(&t.normalize_under(asm), &inf.asm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_expr, parse_type};

    fn typed(src: &str) -> Result<Type, TypeError> {
        let reg = Registry::standard();
        let e = parse_expr(src, &reg).unwrap();
        let mut asm = Assumptions::new();
        infer(&e, &reg, &mut asm).map(|e| e.ty.unwrap())
    }

    #[test]
    fn identity_on_f32() {
        assert_eq!(
            typed("fun(x: f32 => x)").unwrap(),
            parse_type("f32 -> f32").unwrap()
        );
    }

    #[test]
    fn zip_instantiates_implicits() {
        let t = typed("fun(a: Array[4, f32] => fun(b: Array[4, i32] => zip(a)(b)))").unwrap();
        assert_eq!(
            t,
            parse_type("Array[4, f32] -> Array[4, i32] -> Array[4, Tuple[f32, i32]]").unwrap()
        );
    }

    #[test]
    fn zip_length_mismatch() {
        let e = typed("fun(a: Array[4, f32] => fun(b: Array[5, f32] => zip(a)(b)))").unwrap_err();
        assert!(
            matches!(
                e.kind,
                TypeErrorKind::Mismatch { .. } | TypeErrorKind::NatMismatch { .. }
            ),
            "{e}"
        );
    }

    #[test]
    fn unbound_and_function_storage() {
        let reg = Registry::standard();
        let x = Ident::fresh("x");
        let mut asm = Assumptions::new();
        let e = infer(&Expr::ident(&x), &reg, &mut asm).unwrap_err();
        assert_eq!(e.kind, TypeErrorKind::UnboundIdentifier("x".into()));
        let e = typed("fun(xs: Array[4, f32] => map(fun(x => add))(xs))").unwrap_err();
        assert!(matches!(e.kind, TypeErrorKind::StoringFunction(_)), "{e}");
    }

    #[test]
    fn unsolved_implicit_is_reported() {
        let e = typed("fun(f: f32 -> f32 => map(f))").unwrap_err();
        assert!(matches!(e.kind, TypeErrorKind::UnsolvedImplicit(_)), "{e}");
    }

    #[test]
    fn split_by_symbolic_size_records_divisibility() {
        let reg = Registry::standard();
        let e = parse_expr(
            "depFun(n: Nat => fun(xs: Array[n, f32] => xs |> split(s) |> join))",
            &reg,
        )
        .unwrap();
        let mut asm = Assumptions::new();
        let t = infer(&e, &reg, &mut asm).unwrap().ty.unwrap();
        assert_eq!(
            t,
            parse_type("(n: Nat) -> Array[n, f32] -> Array[n, f32]").unwrap()
        );
        assert!(asm.holds(&Nat::var("s"), &Nat::var("n")));
    }

    #[test]
    fn annotated_tree_rechecks() {
        let reg = Registry::standard();
        let e = parse_expr(
            "depFun((n: Nat, m: Nat) => fun(M: Array[n, Array[m, f32]] => fun(x: Array[m, f32] =>
               M |> map(fun(row => zip(row)(x) |> map(fun(ax => fst(ax) * snd(ax))) |> reduce(add)(0.0f))))))",
            &reg,
        )
        .unwrap();
        let mut asm = Assumptions::new();
        let t = infer(&e, &reg, &mut asm).unwrap();
        check_annotated(&t, &reg, &asm).unwrap();
    }

    #[test]
    fn optimized_matrix_vector_types() {
        let t = typed(
            "depFun((n: Nat, m: Nat) => fun(M: Array[n, Array[m, f32]] => fun(x: Array[m, f32] =>
               M |> split(s) |> mapWorkGroup(fun(rows => rows |> mapLocal(fun(row =>
                 zip(row)(x) |> reduceSeq(Private)(fun(acc, ax => acc + (fst(ax) * snd(ax))))(0.0f))))) |> join)))",
        )
        .unwrap();
        assert_eq!(
            t,
            parse_type(
                "(n: Nat) -> (m: Nat) -> Array[n, Array[m, f32]] -> Array[m, f32] -> Array[n, f32]"
            )
            .unwrap()
        );
    }

    #[test]
    fn iterate_solves_through_dependent_body() {
        let t = typed(
            "fun(xs: Array[8, f32] => iterate(3)(depFun(l: Nat => fun(a => a |> split(2) |> map(reduce(add)(0.0f)))))(xs))",
        )
        .unwrap();
        assert_eq!(t, parse_type("Array[8, f32] -> Array[1, f32]").unwrap());
    }
}
