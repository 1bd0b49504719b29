//! RISE expressions.
//!
//! Identifiers carry a globally fresh integer id behind their display name,
//! so alpha-renaming never has to invent names during rewriting. Every node
//! has a type slot that is empty before inference and populated after.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::types::{Kind, Type, TypeArg};

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

fn fresh_id() -> u64 {
    NEXT_ID.fetch_add(1, Ordering::Relaxed)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ident {
    pub name: String,
    pub id: u64,
}

impl Ident {
    pub fn fresh(name: impl Into<String>) -> Ident {
        Ident {
            name: name.into(),
            id: fresh_id(),
        }
    }

    /// Same display name, new identity.
    pub fn refresh(&self) -> Ident {
        Ident::fresh(self.name.clone())
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Literal {
    /// Kept with its source text so it prints back verbatim.
    F32 {
        text: String,
        value: f32,
    },
    I32(i32),
    Bool(bool),
}

impl Literal {
    pub fn f32(value: f32) -> Literal {
        let mut text = format!("{value:?}");
        if !text.contains('.') && !text.contains('e') {
            text.push_str(".0");
        }
        text.push('f');
        Literal::F32 { text, value }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::F32 { text, .. } => f.write_str(text),
            Literal::I32(v) => write!(f, "{v}i32"),
            Literal::Bool(b) => write!(f, "{b}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Span {
    pub line: u32,
    pub column: u32,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExprKind {
    Identifier(Ident),
    Literal(Literal),
    Lambda {
        param: Ident,
        annotation: Option<Type>,
        body: Box<Expr>,
    },
    Apply(Box<Expr>, Box<Expr>),
    DepLambda {
        kind: Kind,
        param: String,
        body: Box<Expr>,
    },
    DepApply(Box<Expr>, TypeArg),
    Primitive(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub ty: Option<Type>,
    pub span: Option<Span>,
}

/// One argument in an application spine.
#[derive(Clone, Debug, PartialEq)]
pub enum SpineArg<'a> {
    Expr(&'a Expr),
    Type(&'a TypeArg),
}

impl Expr {
    pub fn new(kind: ExprKind) -> Expr {
        Expr {
            kind,
            ty: None,
            span: None,
        }
    }

    pub fn with_span(mut self, span: Option<Span>) -> Expr {
        self.span = span;
        self
    }

    pub fn ident(id: &Ident) -> Expr {
        Expr::new(ExprKind::Identifier(id.clone()))
    }

    pub fn lit(l: Literal) -> Expr {
        Expr::new(ExprKind::Literal(l))
    }

    pub fn prim(name: &str) -> Expr {
        Expr::new(ExprKind::Primitive(name.to_string()))
    }

    pub fn lambda(param: Ident, body: Expr) -> Expr {
        Expr::new(ExprKind::Lambda {
            param,
            annotation: None,
            body: Box::new(body),
        })
    }

    pub fn lambda_typed(param: Ident, ty: Type, body: Expr) -> Expr {
        Expr::new(ExprKind::Lambda {
            param,
            annotation: Some(ty),
            body: Box::new(body),
        })
    }

    pub fn app(self, arg: Expr) -> Expr {
        Expr::new(ExprKind::Apply(Box::new(self), Box::new(arg)))
    }

    pub fn dep_lambda(kind: Kind, param: impl Into<String>, body: Expr) -> Expr {
        Expr::new(ExprKind::DepLambda {
            kind,
            param: param.into(),
            body: Box::new(body),
        })
    }

    pub fn dep_app(self, arg: TypeArg) -> Expr {
        Expr::new(ExprKind::DepApply(Box::new(self), arg))
    }

    /// `f >> g` as `fun(x => g(f(x)))`. When `f` is already a lambda its
    /// parameter is reused, so chains of `>>` stay free of redexes.
    pub fn compose(f: Expr, g: Expr) -> Expr {
        let span = f.span;
        if let ExprKind::Lambda {
            param,
            annotation,
            body,
        } = f.kind
        {
            return Expr::new(ExprKind::Lambda {
                param,
                annotation,
                body: Box::new(g.app(*body)),
            })
            .with_span(span);
        }
        let x = Ident::fresh("x");
        Expr::lambda(x.clone(), g.app(f.app(Expr::ident(&x))))
    }

    pub fn ty(&self) -> Option<&Type> {
        self.ty.as_ref()
    }

    /// Head and arguments of a (possibly empty) application spine.
    pub fn spine(&self) -> (&Expr, Vec<SpineArg<'_>>) {
        let mut args = Vec::new();
        let mut cur = self;
        loop {
            match &cur.kind {
                ExprKind::Apply(f, a) => {
                    args.push(SpineArg::Expr(a));
                    cur = f;
                }
                ExprKind::DepApply(f, t) => {
                    args.push(SpineArg::Type(t));
                    cur = f;
                }
                _ => break,
            }
        }
        args.reverse();
        (cur, args)
    }

    /// Name of the primitive at the head of the spine, if any.
    pub fn head_primitive(&self) -> Option<&str> {
        match &self.spine().0.kind {
            ExprKind::Primitive(p) => Some(p),
            _ => None,
        }
    }

    /// Expression arguments of the spine (type arguments skipped).
    pub fn spine_exprs(&self) -> Vec<&Expr> {
        self.spine()
            .1
            .into_iter()
            .filter_map(|a| match a {
                SpineArg::Expr(e) => Some(e),
                SpineArg::Type(_) => None,
            })
            .collect()
    }

    pub fn spine_types(&self) -> Vec<&TypeArg> {
        self.spine()
            .1
            .into_iter()
            .filter_map(|a| match a {
                SpineArg::Type(t) => Some(t),
                SpineArg::Expr(_) => None,
            })
            .collect()
    }

    pub fn is_apply(&self) -> bool {
        matches!(self.kind, ExprKind::Apply(..) | ExprKind::DepApply(..))
    }

    pub fn free_vars(&self) -> BTreeSet<Ident> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<u64>, out: &mut BTreeSet<Ident>) {
        match &self.kind {
            ExprKind::Identifier(x) => {
                if !bound.contains(&x.id) {
                    out.insert(x.clone());
                }
            }
            ExprKind::Literal(_) | ExprKind::Primitive(_) => {}
            ExprKind::Lambda { param, body, .. } => {
                bound.push(param.id);
                body.collect_free(bound, out);
                bound.pop();
            }
            ExprKind::Apply(f, a) => {
                f.collect_free(bound, out);
                a.collect_free(bound, out);
            }
            ExprKind::DepLambda { body, .. } => body.collect_free(bound, out),
            ExprKind::DepApply(f, _) => f.collect_free(bound, out),
        }
    }

    pub fn node_count(&self) -> usize {
        1 + match &self.kind {
            ExprKind::Identifier(_) | ExprKind::Literal(_) | ExprKind::Primitive(_) => 0,
            ExprKind::Lambda { body, .. } | ExprKind::DepLambda { body, .. } => body.node_count(),
            ExprKind::Apply(f, a) => f.node_count() + a.node_count(),
            ExprKind::DepApply(f, _) => f.node_count(),
        }
    }

    /// Capture-avoiding substitution of `replacement` for the free
    /// occurrences of `var`. Binders whose identity occurs free in the
    /// replacement are refreshed.
    pub fn substitute(&self, var: &Ident, replacement: &Expr) -> Expr {
        let fv = replacement.free_vars();
        self.subst_inner(var, replacement, &fv)
    }

    fn subst_inner(&self, var: &Ident, rep: &Expr, fv: &BTreeSet<Ident>) -> Expr {
        let kind = match &self.kind {
            ExprKind::Identifier(x) if x == var => return rep.clone(),
            ExprKind::Identifier(_) | ExprKind::Literal(_) | ExprKind::Primitive(_) => {
                return self.clone()
            }
            ExprKind::Lambda {
                param,
                annotation,
                body,
            } => {
                if param == var {
                    return self.clone();
                }
                let clashes = fv.iter().any(|f| f.id == param.id || f.name == param.name);
                let (param, body) = if clashes {
                    let fresh = param.refresh();
                    let renamed = body.subst_inner(param, &Expr::ident(&fresh), &BTreeSet::new());
                    (fresh, renamed)
                } else {
                    (param.clone(), (**body).clone())
                };
                ExprKind::Lambda {
                    param,
                    annotation: annotation.clone(),
                    body: Box::new(body.subst_inner(var, rep, fv)),
                }
            }
            ExprKind::Apply(f, a) => ExprKind::Apply(
                Box::new(f.subst_inner(var, rep, fv)),
                Box::new(a.subst_inner(var, rep, fv)),
            ),
            ExprKind::DepLambda { kind, param, body } => ExprKind::DepLambda {
                kind: *kind,
                param: param.clone(),
                body: Box::new(body.subst_inner(var, rep, fv)),
            },
            ExprKind::DepApply(f, t) => {
                ExprKind::DepApply(Box::new(f.subst_inner(var, rep, fv)), t.clone())
            }
        };
        Expr {
            kind,
            ty: self.ty.clone(),
            span: self.span,
        }
    }

    /// Substitutes a type-level argument for a type-level variable inside
    /// annotations and dependent arguments.
    pub fn substitute_type(&self, var: &str, arg: &TypeArg) -> Expr {
        let kind = match &self.kind {
            ExprKind::Identifier(_) | ExprKind::Literal(_) | ExprKind::Primitive(_) => {
                self.kind.clone()
            }
            ExprKind::Lambda {
                param,
                annotation,
                body,
            } => ExprKind::Lambda {
                param: param.clone(),
                annotation: annotation.as_ref().map(|t| t.substitute(var, arg)),
                body: Box::new(body.substitute_type(var, arg)),
            },
            ExprKind::Apply(f, a) => ExprKind::Apply(
                Box::new(f.substitute_type(var, arg)),
                Box::new(a.substitute_type(var, arg)),
            ),
            ExprKind::DepLambda { kind, param, body } => {
                if param == var {
                    self.kind.clone()
                } else {
                    ExprKind::DepLambda {
                        kind: *kind,
                        param: param.clone(),
                        body: Box::new(body.substitute_type(var, arg)),
                    }
                }
            }
            ExprKind::DepApply(f, t) => ExprKind::DepApply(
                Box::new(f.substitute_type(var, arg)),
                subst_type_arg(t, var, arg),
            ),
        };
        Expr {
            kind,
            ty: self.ty.as_ref().map(|t| t.substitute(var, arg)),
            span: self.span,
        }
    }

    /// Drops every type annotation slot (not the lambda parameter
    /// annotations written in the source).
    pub fn erase_types(&self) -> Expr {
        let kind = match &self.kind {
            ExprKind::Lambda {
                param,
                annotation,
                body,
            } => ExprKind::Lambda {
                param: param.clone(),
                annotation: annotation.clone(),
                body: Box::new(body.erase_types()),
            },
            ExprKind::Apply(f, a) => {
                ExprKind::Apply(Box::new(f.erase_types()), Box::new(a.erase_types()))
            }
            ExprKind::DepLambda { kind, param, body } => ExprKind::DepLambda {
                kind: *kind,
                param: param.clone(),
                body: Box::new(body.erase_types()),
            },
            ExprKind::DepApply(f, t) => ExprKind::DepApply(Box::new(f.erase_types()), t.clone()),
            other => other.clone(),
        };
        Expr {
            kind,
            ty: None,
            span: self.span,
        }
    }

    /// Applies `f` to every node, children first.
    pub fn any_node(&self, pred: &mut dyn FnMut(&Expr) -> bool) -> bool {
        if pred(self) {
            return true;
        }
        match &self.kind {
            ExprKind::Identifier(_) | ExprKind::Literal(_) | ExprKind::Primitive(_) => false,
            ExprKind::Lambda { body, .. } | ExprKind::DepLambda { body, .. } => body.any_node(pred),
            ExprKind::Apply(f, a) => f.any_node(pred) || a.any_node(pred),
            ExprKind::DepApply(f, _) => f.any_node(pred),
        }
    }

    pub fn primitives(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.any_node(&mut |e| {
            if let ExprKind::Primitive(p) = &e.kind {
                out.push(p.clone());
            }
            false
        });
        out
    }

    /// Beta-reduces `(fun(x => b))(a)` redexes everywhere.
    pub fn beta_reduce(&self) -> Expr {
        let kind = match &self.kind {
            ExprKind::Apply(f, a) => {
                let f = f.beta_reduce();
                let a = a.beta_reduce();
                if let ExprKind::Lambda { param, body, .. } = &f.kind {
                    return body.substitute(param, &a).beta_reduce();
                }
                ExprKind::Apply(Box::new(f), Box::new(a))
            }
            ExprKind::DepApply(f, t) => {
                let f = f.beta_reduce();
                if let ExprKind::DepLambda { param, body, .. } = &f.kind {
                    return body.substitute_type(param, t).beta_reduce();
                }
                ExprKind::DepApply(Box::new(f), t.clone())
            }
            ExprKind::Lambda {
                param,
                annotation,
                body,
            } => ExprKind::Lambda {
                param: param.clone(),
                annotation: annotation.clone(),
                body: Box::new(body.beta_reduce()),
            },
            ExprKind::DepLambda { kind, param, body } => ExprKind::DepLambda {
                kind: *kind,
                param: param.clone(),
                body: Box::new(body.beta_reduce()),
            },
            other => other.clone(),
        };
        Expr {
            kind,
            ty: self.ty.clone(),
            span: self.span,
        }
    }

    /// Eta-reduces `fun(x => f(x))` where `x` is not free in `f`.
    pub fn eta_reduce(&self) -> Expr {
        let kind = match &self.kind {
            ExprKind::Lambda {
                param,
                annotation,
                body,
            } => {
                let body = body.eta_reduce();
                if let ExprKind::Apply(f, a) = &body.kind {
                    if matches!(&a.kind, ExprKind::Identifier(x) if x == param)
                        && !f.free_vars().contains(param)
                    {
                        return (**f).clone();
                    }
                }
                ExprKind::Lambda {
                    param: param.clone(),
                    annotation: annotation.clone(),
                    body: Box::new(body),
                }
            }
            ExprKind::Apply(f, a) => {
                ExprKind::Apply(Box::new(f.eta_reduce()), Box::new(a.eta_reduce()))
            }
            ExprKind::DepApply(f, t) => ExprKind::DepApply(Box::new(f.eta_reduce()), t.clone()),
            ExprKind::DepLambda { kind, param, body } => ExprKind::DepLambda {
                kind: *kind,
                param: param.clone(),
                body: Box::new(body.eta_reduce()),
            },
            other => other.clone(),
        };
        Expr {
            kind,
            ty: self.ty.clone(),
            span: self.span,
        }
    }
}

fn subst_type_arg(t: &TypeArg, var: &str, arg: &TypeArg) -> TypeArg {
    match (t, arg) {
        (TypeArg::Nat(n), TypeArg::Nat(r)) => TypeArg::Nat(n.substitute(var, r)),
        (TypeArg::DataType(d), TypeArg::Nat(r)) => TypeArg::DataType(d.substitute_nat(var, r)),
        (TypeArg::DataType(d), TypeArg::DataType(r)) => TypeArg::DataType(d.substitute_dt(var, r)),
        _ => t.clone(),
    }
}

/// Alpha-equivalence: equal up to renaming of bound identifiers and
/// dependent binders, Nat normalization, ignoring type slots and spans.
pub fn alpha_eq(a: &Expr, b: &Expr) -> bool {
    alpha_inner(a, b, &mut HashMap::new(), &mut Vec::new())
}

fn alpha_inner(
    a: &Expr,
    b: &Expr,
    ids: &mut HashMap<u64, u64>,
    deps: &mut Vec<(String, String)>,
) -> bool {
    match (&a.kind, &b.kind) {
        (ExprKind::Identifier(x), ExprKind::Identifier(y)) => match ids.get(&x.id) {
            Some(m) => *m == y.id,
            None => x == y,
        },
        (ExprKind::Literal(x), ExprKind::Literal(y)) => x == y,
        (ExprKind::Primitive(x), ExprKind::Primitive(y)) => x == y,
        (
            ExprKind::Lambda {
                param: p,
                annotation: ta,
                body: ba,
            },
            ExprKind::Lambda {
                param: q,
                annotation: tb,
                body: bb,
            },
        ) => {
            let types_ok = match (ta, tb) {
                (Some(x), Some(y)) => x.equal_under(&rename_deps(y, deps), &Default::default()),
                (None, None) => true,
                _ => false,
            };
            let prev = ids.insert(p.id, q.id);
            let ok = types_ok && alpha_inner(ba, bb, ids, deps);
            match prev {
                Some(v) => ids.insert(p.id, v),
                None => ids.remove(&p.id),
            };
            ok
        }
        (ExprKind::Apply(f, x), ExprKind::Apply(g, y)) => {
            alpha_inner(f, g, ids, deps) && alpha_inner(x, y, ids, deps)
        }
        (
            ExprKind::DepLambda {
                kind: k1,
                param: p1,
                body: b1,
            },
            ExprKind::DepLambda {
                kind: k2,
                param: p2,
                body: b2,
            },
        ) => {
            if k1 != k2 {
                return false;
            }
            deps.push((p2.clone(), p1.clone()));
            let ok = alpha_inner(b1, b2, ids, deps);
            deps.pop();
            ok
        }
        (ExprKind::DepApply(f, s), ExprKind::DepApply(g, t)) => {
            alpha_inner(f, g, ids, deps) && type_arg_eq(s, &rename_arg_deps(t, deps))
        }
        _ => false,
    }
}

fn rename_deps(t: &Type, deps: &[(String, String)]) -> Type {
    deps.iter().rev().fold(t.clone(), |t, (from, to)| {
        t.substitute(from, &crate::types::rename_arg(Kind::Nat, to))
            .substitute(from, &crate::types::rename_arg(Kind::DataType, to))
    })
}

fn rename_arg_deps(t: &TypeArg, deps: &[(String, String)]) -> TypeArg {
    deps.iter().rev().fold(t.clone(), |t, (from, to)| {
        let t = subst_type_arg(&t, from, &crate::types::rename_arg(Kind::Nat, to));
        subst_type_arg(&t, from, &crate::types::rename_arg(Kind::DataType, to))
    })
}

fn type_arg_eq(a: &TypeArg, b: &TypeArg) -> bool {
    match (a, b) {
        (TypeArg::Nat(x), TypeArg::Nat(y)) => crate::nat::nat_equal(x, y),
        (TypeArg::DataType(x), TypeArg::DataType(y)) => x.equal_under(y, &Default::default()),
        _ => a == b,
    }
}

/// Printer options for the surface syntax.
#[derive(Clone, Copy, Debug, Default)]
pub struct PrintOptions {
    /// Annotate every lambda parameter with its inferred type.
    pub annotate_params: bool,
}

pub fn print_expr(e: &Expr, opts: PrintOptions) -> String {
    let e = uniquify_names(e);
    let mut out = String::new();
    write_expr(&mut out, &e, opts, 0);
    out
}

/// Renames binders so that every bound identifier has a display name that
/// is distinct from all other binders, free identifiers, and type-level
/// names in the term. Printing the result and parsing it back therefore
/// resolves each occurrence to the same binder.
pub fn uniquify_names(e: &Expr) -> Expr {
    let mut taken: BTreeSet<String> = e.free_vars().into_iter().map(|x| x.name).collect();
    collect_type_level_names(e, &mut taken);
    let mut renames = HashMap::new();
    rename_binders(e, &mut taken, &mut renames)
}

fn collect_type_level_names(e: &Expr, out: &mut BTreeSet<String>) {
    e.any_node(&mut |n| {
        match &n.kind {
            ExprKind::DepLambda { param, .. } => {
                out.insert(param.clone());
            }
            ExprKind::DepApply(_, TypeArg::Nat(k)) => out.extend(k.free_vars()),
            ExprKind::DepApply(_, TypeArg::DataType(d)) => {
                let mut dts = BTreeSet::new();
                d.collect_free(out, &mut dts);
                out.extend(dts);
            }
            ExprKind::Lambda {
                annotation: Some(t),
                ..
            } => out.extend(t.free_type_vars()),
            _ => {}
        }
        false
    });
}

fn rename_binders(
    e: &Expr,
    taken: &mut BTreeSet<String>,
    renames: &mut HashMap<u64, String>,
) -> Expr {
    let kind = match &e.kind {
        ExprKind::Identifier(x) => {
            let name = renames
                .get(&x.id)
                .cloned()
                .unwrap_or_else(|| x.name.clone());
            ExprKind::Identifier(Ident { name, id: x.id })
        }
        ExprKind::Lambda {
            param,
            annotation,
            body,
        } => {
            let name = if taken.contains(&param.name) {
                (1..)
                    .map(|i| format!("{}_{i}", param.name))
                    .find(|c| !taken.contains(c))
                    .unwrap()
            } else {
                param.name.clone()
            };
            taken.insert(name.clone());
            renames.insert(param.id, name.clone());
            ExprKind::Lambda {
                param: Ident { name, id: param.id },
                annotation: annotation.clone(),
                body: Box::new(rename_binders(body, taken, renames)),
            }
        }
        ExprKind::Apply(f, a) => ExprKind::Apply(
            Box::new(rename_binders(f, taken, renames)),
            Box::new(rename_binders(a, taken, renames)),
        ),
        ExprKind::DepLambda { kind, param, body } => ExprKind::DepLambda {
            kind: *kind,
            param: param.clone(),
            body: Box::new(rename_binders(body, taken, renames)),
        },
        ExprKind::DepApply(f, t) => {
            ExprKind::DepApply(Box::new(rename_binders(f, taken, renames)), t.clone())
        }
        other => other.clone(),
    };
    Expr {
        kind,
        ty: e.ty.clone(),
        span: e.span,
    }
}

const INDENT: &str = "  ";

fn write_expr(out: &mut String, e: &Expr, opts: PrintOptions, depth: usize) {
    match &e.kind {
        ExprKind::Identifier(x) => out.push_str(&x.name),
        ExprKind::Literal(l) => out.push_str(&l.to_string()),
        ExprKind::Primitive(p) => out.push_str(crate::primitives::surface_name(p)),
        ExprKind::Lambda {
            param,
            annotation,
            body,
        } => {
            out.push_str("fun(");
            out.push_str(&param.name);
            let ann = if opts.annotate_params {
                param_type(e).or(annotation.clone())
            } else {
                annotation.clone()
            };
            if let Some(t) = ann {
                out.push_str(": ");
                out.push_str(&t.to_string());
            }
            out.push_str(" =>\n");
            push_indent(out, depth + 1);
            write_expr(out, body, opts, depth + 1);
            out.push(')');
        }
        ExprKind::DepLambda { kind, param, body } => {
            out.push_str(&format!("depFun(({param}: {kind}) =>\n"));
            push_indent(out, depth + 1);
            write_expr(out, body, opts, depth + 1);
            out.push(')');
        }
        ExprKind::Apply(f, a) => {
            write_expr(out, f, opts, depth);
            out.push('(');
            write_expr(out, a, opts, depth);
            out.push(')');
        }
        ExprKind::DepApply(f, t) => {
            write_expr(out, f, opts, depth);
            out.push('(');
            out.push_str(&t.to_string());
            out.push(')');
        }
    }
}

fn param_type(lambda: &Expr) -> Option<Type> {
    match lambda.ty.as_ref()? {
        Type::Fun(a, _) => Some((**a).clone()),
        _ => None,
    }
}

fn push_indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str(INDENT);
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_expr(self, PrintOptions::default()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn substitution_avoids_capture() {
        // fun(x => y)[y := x] = fun(x' => x)
        let x = Ident::fresh("x");
        let y = Ident::fresh("y");
        let e = Expr::lambda(x.clone(), Expr::ident(&y));
        let r = e.substitute(&y, &Expr::ident(&x));
        let ExprKind::Lambda { param, body, .. } = &r.kind else {
            panic!()
        };
        assert_ne!(param.id, x.id);
        assert_eq!(body.kind, ExprKind::Identifier(x.clone()));
        assert_eq!(r.free_vars(), [x].into_iter().collect());
    }

    #[test]
    fn spine_collects_arguments_in_order() {
        let f = Ident::fresh("f");
        let xs = Ident::fresh("xs");
        let e = Expr::prim("map").app(Expr::ident(&f)).app(Expr::ident(&xs));
        assert_eq!(e.head_primitive(), Some("map"));
        let args = e.spine_exprs();
        assert_eq!(args.len(), 2);
        assert_eq!(args[0].kind, ExprKind::Identifier(f));
    }

    #[test]
    fn alpha_equivalence_ignores_binder_identity() {
        let a = Ident::fresh("a");
        let b = Ident::fresh("b");
        let e1 = Expr::lambda(a.clone(), Expr::ident(&a));
        let e2 = Expr::lambda(b.clone(), Expr::ident(&b));
        assert!(alpha_eq(&e1, &e2));
        let c = Ident::fresh("c");
        assert!(!alpha_eq(&e1, &Expr::lambda(b, Expr::ident(&c))));
    }

    #[test]
    fn eta_and_beta() {
        let x = Ident::fresh("x");
        let f = Ident::fresh("f");
        let eta = Expr::lambda(x.clone(), Expr::ident(&f).app(Expr::ident(&x)));
        assert!(alpha_eq(&eta.eta_reduce(), &Expr::ident(&f)));
        let y = Ident::fresh("y");
        let redex = Expr::lambda(x.clone(), Expr::ident(&x)).app(Expr::ident(&y));
        assert!(alpha_eq(&redex.beta_reduce(), &Expr::ident(&y)));
    }
}
