//! Strategy combinators over typed RISE expressions.
//!
//! A *position* is any node that is not the function part of an
//! application, so `map(f)(xs)` is one position (the whole spine) with
//! positions `f` and `xs` below it. Traversals enumerate positions; the
//! rewritten subtree is re-typed in the binder environment of its path.

use std::fmt;

use crate::expr::{Expr, ExprKind};
use crate::nat::Assumptions;
use crate::primitives::Registry;
use crate::typecheck::{infer_in, TypeEnv, TypeError};
use crate::types::{Type, TypeArg};

pub const DEFAULT_FUEL: usize = 10_000;

/// Signature shared by every rule body.
pub type RuleFn = fn(&Expr, &[TypeArg], &mut RuleCx) -> Result<Expr, String>;

#[derive(Clone)]
pub struct Rule {
    pub name: String,
    pub args: Vec<TypeArg>,
    pub apply: RuleFn,
}

impl fmt::Debug for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Rule({self})")
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        for a in &self.args {
            write!(f, "({a})")?;
        }
        Ok(())
    }
}

/// What a rule body may consult or record.
pub struct RuleCx<'a> {
    pub registry: &'a Registry,
    pub assumptions: &'a mut Assumptions,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pred {
    IsMap,
    IsReduce,
    IsPrimitive(String),
}

impl Pred {
    pub fn holds(&self, e: &Expr) -> bool {
        match self {
            Pred::IsMap => e.head_primitive() == Some("map"),
            Pred::IsReduce => matches!(e.head_primitive(), Some("reduce" | "reduceSeq")),
            Pred::IsPrimitive(p) => e.head_primitive() == Some(p.as_str()),
        }
    }
}

impl fmt::Display for Pred {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pred::IsMap => write!(f, "isMap"),
            Pred::IsReduce => write!(f, "isReduce"),
            Pred::IsPrimitive(p) => write!(f, "isPrimitive({p})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Locator {
    Outermost(Pred),
    Every(Pred),
}

impl fmt::Display for Locator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Locator::Outermost(p) => write!(f, "outermost({p})"),
            Locator::Every(p) => write!(f, "every({p})"),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Strategy {
    Id,
    Fail,
    Rule(Rule),
    Seq(Box<Strategy>, Box<Strategy>),
    LChoice(Box<Strategy>, Box<Strategy>),
    Try(Box<Strategy>),
    Repeat(Box<Strategy>),
    TopDown(Box<Strategy>),
    BottomUp(Box<Strategy>),
    At(Box<Strategy>, Locator),
}

impl Strategy {
    pub fn seq(a: Strategy, b: Strategy) -> Strategy {
        Strategy::Seq(Box::new(a), Box::new(b))
    }

    pub fn lchoice(a: Strategy, b: Strategy) -> Strategy {
        Strategy::LChoice(Box::new(a), Box::new(b))
    }

    pub fn try_(a: Strategy) -> Strategy {
        Strategy::Try(Box::new(a))
    }

    pub fn repeat(a: Strategy) -> Strategy {
        Strategy::Repeat(Box::new(a))
    }

    pub fn top_down(a: Strategy) -> Strategy {
        Strategy::TopDown(Box::new(a))
    }

    pub fn bottom_up(a: Strategy) -> Strategy {
        Strategy::BottomUp(Box::new(a))
    }

    pub fn at(self, loc: Locator) -> Strategy {
        Strategy::At(Box::new(self), loc)
    }

    /// Left-nested sequence of all steps; `id` when empty.
    pub fn sequence(steps: Vec<Strategy>) -> Strategy {
        steps
            .into_iter()
            .reduce(Strategy::seq)
            .unwrap_or(Strategy::Id)
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::Id => write!(f, "id"),
            Strategy::Fail => write!(f, "fail"),
            Strategy::Rule(r) => write!(f, "{r}"),
            Strategy::Seq(a, b) => write!(f, "{a} ; {b}"),
            Strategy::LChoice(a, b) => write!(f, "lChoice({a}, {b})"),
            Strategy::Try(a) => write!(f, "try({a})"),
            Strategy::Repeat(a) => write!(f, "repeat({a})"),
            Strategy::TopDown(a) => write!(f, "topDown({a})"),
            Strategy::BottomUp(a) => write!(f, "bottomUp({a})"),
            Strategy::At(a, l) => match **a {
                Strategy::Seq(..) => write!(f, "({a}) @ {l}"),
                _ => write!(f, "{a} @ {l}"),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum StrategyError {
    /// Ordinary failure; caught by `lChoice`, `try` and `repeat`.
    #[error("strategy failed: {0}")]
    Failure(String),
    #[error("strategy `{0}` exceeded its fuel of {1} steps; it probably does not terminate")]
    FuelExhausted(String, usize),
    #[error("rewritten term does not type check: {0}")]
    Type(TypeError),
}

fn failure<T>(msg: impl Into<String>) -> Result<T, StrategyError> {
    Err(StrategyError::Failure(msg.into()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEntry {
    pub rule: String,
    /// Dot-separated child indices from the root (`0` function, `1`
    /// argument, `b` binder body).
    pub path: String,
}

impl fmt::Display for TraceEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let path = if self.path.is_empty() {
            "<root>"
        } else {
            &self.path
        };
        write!(f, "{} @ {}", self.rule, path)
    }
}

/// Mutable state threaded through one strategy run.
pub struct RewriteCtx<'r> {
    pub registry: &'r Registry,
    pub assumptions: Assumptions,
    pub trace: Vec<TraceEntry>,
    pub fuel: usize,
}

impl<'r> RewriteCtx<'r> {
    pub fn new(registry: &'r Registry) -> Self {
        RewriteCtx {
            registry,
            assumptions: Assumptions::new(),
            trace: Vec::new(),
            fuel: DEFAULT_FUEL,
        }
    }

    pub fn with_fuel(mut self, fuel: usize) -> Self {
        self.fuel = fuel;
        self
    }
}

/// Where a subterm sits: path and the types of the enclosing binders.
#[derive(Clone, Default)]
struct Place {
    path: Vec<char>,
    env: TypeEnv,
}

impl Place {
    fn path_string(&self) -> String {
        self.path
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(".")
    }
}

/// Runs `s` on a typed expression.
pub fn apply(s: &Strategy, e: &Expr, ctx: &mut RewriteCtx) -> Result<Expr, StrategyError> {
    run(s, e, &Place::default(), ctx)
}

fn run(s: &Strategy, e: &Expr, place: &Place, ctx: &mut RewriteCtx) -> Result<Expr, StrategyError> {
    match s {
        Strategy::Id => Ok(e.clone()),
        Strategy::Fail => failure("fail"),
        Strategy::Rule(r) => apply_rule(r, e, place, ctx),
        Strategy::Seq(a, b) => {
            let e1 = run(a, e, place, ctx)?;
            run(b, &e1, place, ctx)
        }
        Strategy::LChoice(a, b) => match run(a, e, place, ctx) {
            Err(StrategyError::Failure(_)) => run(b, e, place, ctx),
            other => other,
        },
        Strategy::Try(a) => match run(a, e, place, ctx) {
            Err(StrategyError::Failure(_)) => Ok(e.clone()),
            other => other,
        },
        Strategy::Repeat(a) => {
            let mut cur = e.clone();
            for _ in 0..ctx.fuel {
                match run(a, &cur, place, ctx) {
                    Ok(next) => cur = next,
                    Err(StrategyError::Failure(_)) => return Ok(cur),
                    Err(other) => return Err(other),
                }
            }
            Err(StrategyError::FuelExhausted(s.to_string(), ctx.fuel))
        }
        Strategy::TopDown(a) => first_success(a, e, place, ctx, Order::Pre)?.map_or_else(
            || failure(format!("{s}: no position accepted the rewrite")),
            Ok,
        ),
        Strategy::BottomUp(a) => first_success(a, e, place, ctx, Order::Post)?.map_or_else(
            || failure(format!("{s}: no position accepted the rewrite")),
            Ok,
        ),
        Strategy::At(a, Locator::Outermost(p)) => {
            let Some(target) = positions(e, place, Order::Pre)
                .into_iter()
                .find(|(x, _)| p.holds(x))
            else {
                return failure(format!("outermost({p}): no matching position"));
            };
            let (_, at) = target;
            rewrite_at(
                e,
                place,
                &at.path[place.path.len()..],
                &mut |sub, pl, ctx| run(a, sub, pl, ctx),
                ctx,
            )
        }
        Strategy::At(a, Locator::Every(p)) => {
            let mut hits = 0usize;
            let out = every(a, p, e, place, ctx, &mut hits)?;
            if hits == 0 {
                return failure(format!("every({p}): no matching position"));
            }
            Ok(out)
        }
    }
}

fn apply_rule(
    r: &Rule,
    e: &Expr,
    place: &Place,
    ctx: &mut RewriteCtx,
) -> Result<Expr, StrategyError> {
    let mut asm = ctx.assumptions.clone();
    let out = {
        let mut cx = RuleCx {
            registry: ctx.registry,
            assumptions: &mut asm,
        };
        (r.apply)(e, &r.args, &mut cx).map_err(|m| StrategyError::Failure(format!("{r}: {m}")))?
    };
    let typed = infer_in(&out.erase_types(), &place.env, ctx.registry, &mut asm)
        .map_err(StrategyError::Type)?;
    if let (Some(before), Some(after)) = (e.ty.as_ref(), typed.ty.as_ref()) {
        if !before.equal_under(after, &asm) {
            return Err(StrategyError::Type(crate::typecheck::TypeError {
                kind: crate::typecheck::TypeErrorKind::Mismatch {
                    expected: before.clone(),
                    found: after.clone(),
                },
                span: e.span,
            }));
        }
    }
    ctx.assumptions = asm;
    ctx.trace.push(TraceEntry {
        rule: r.to_string(),
        path: place.path_string(),
    });
    Ok(typed)
}

#[derive(Clone, Copy, PartialEq)]
enum Order {
    Pre,
    Post,
}

/// Children of a position that are themselves positions, with the step
/// path from `e` to each. Function parts of applications are walked
/// through rather than reported.
fn child_positions(e: &Expr) -> Vec<(Vec<char>, &Expr)> {
    let mut out = Vec::new();
    collect_children(e, &mut Vec::new(), &mut out);
    out
}

fn collect_children<'e>(e: &'e Expr, prefix: &mut Vec<char>, out: &mut Vec<(Vec<char>, &'e Expr)>) {
    match &e.kind {
        ExprKind::Apply(f, a) => {
            prefix.push('0');
            spine_head_children(f, prefix, out);
            prefix.pop();
            prefix.push('1');
            out.push((prefix.clone(), a));
            prefix.pop();
        }
        ExprKind::DepApply(f, _) => {
            prefix.push('0');
            spine_head_children(f, prefix, out);
            prefix.pop();
        }
        ExprKind::Lambda { body, .. } | ExprKind::DepLambda { body, .. } => {
            prefix.push('b');
            out.push((prefix.clone(), body));
            prefix.pop();
        }
        _ => {}
    }
}

/// `f` is in function position: it is not a position itself, but its own
/// children are.
fn spine_head_children<'e>(
    f: &'e Expr,
    prefix: &mut Vec<char>,
    out: &mut Vec<(Vec<char>, &'e Expr)>,
) {
    collect_children(f, prefix, out);
}

fn child_env(e: &Expr, steps: &[char], env: &TypeEnv) -> TypeEnv {
    let mut env = env.clone();
    let mut cur = e;
    for s in steps {
        match (&cur.kind, s) {
            (ExprKind::Apply(f, _), '0') | (ExprKind::DepApply(f, _), '0') => cur = f,
            (ExprKind::Apply(_, a), '1') => cur = a,
            (ExprKind::Lambda { param, body, .. }, 'b') => {
                let pt = match cur.ty.as_ref() {
                    Some(Type::Fun(p, _)) => (**p).clone(),
                    _ => annotation_or_unknown(cur),
                };
                env.vars.push((param.clone(), pt));
                cur = body;
            }
            (ExprKind::DepLambda { body, .. }, 'b') => cur = body,
            _ => unreachable!("path step does not match the term"),
        }
    }
    env
}

fn annotation_or_unknown(lambda: &Expr) -> Type {
    match &lambda.kind {
        ExprKind::Lambda {
            annotation: Some(t),
            ..
        } => t.clone(),
        _ => Type::Var("?untyped".into()),
    }
}

/// Every position under (and including) `e`, in the requested order.
fn positions<'e>(e: &'e Expr, place: &Place, order: Order) -> Vec<(&'e Expr, Place)> {
    let mut out = Vec::new();
    walk(e, place.clone(), order, &mut out);
    out
}

fn walk<'e>(e: &'e Expr, place: Place, order: Order, out: &mut Vec<(&'e Expr, Place)>) {
    if order == Order::Pre {
        out.push((e, place.clone()));
    }
    for (steps, child) in child_positions(e) {
        let mut p = place.clone();
        p.env = child_env(e, &steps, &place.env);
        p.path.extend(steps);
        walk(child, p, order, out);
    }
    if order == Order::Post {
        out.push((e, place));
    }
}

type Rewriter<'a> = dyn FnMut(&Expr, &Place, &mut RewriteCtx) -> Result<Expr, StrategyError> + 'a;

/// Rebuilds `e` with the subterm at `steps` replaced by `f(subterm)`.
fn rewrite_at(
    e: &Expr,
    place: &Place,
    steps: &[char],
    f: &mut Rewriter<'_>,
    ctx: &mut RewriteCtx,
) -> Result<Expr, StrategyError> {
    let Some((&s, rest)) = steps.split_first() else {
        return f(e, place, ctx);
    };
    let p = Place {
        path: {
            let mut v = place.path.clone();
            v.push(s);
            v
        },
        env: child_env(e, &[s], &place.env),
    };
    let kind = match (&e.kind, s) {
        (ExprKind::Apply(g, a), '0') => {
            ExprKind::Apply(Box::new(rewrite_at(g, &p, rest, f, ctx)?), a.clone())
        }
        (ExprKind::Apply(g, a), '1') => {
            ExprKind::Apply(g.clone(), Box::new(rewrite_at(a, &p, rest, f, ctx)?))
        }
        (ExprKind::DepApply(g, t), '0') => {
            ExprKind::DepApply(Box::new(rewrite_at(g, &p, rest, f, ctx)?), t.clone())
        }
        (
            ExprKind::Lambda {
                param,
                annotation,
                body,
            },
            'b',
        ) => ExprKind::Lambda {
            param: param.clone(),
            annotation: annotation.clone(),
            body: Box::new(rewrite_at(body, &p, rest, f, ctx)?),
        },
        (ExprKind::DepLambda { kind, param, body }, 'b') => ExprKind::DepLambda {
            kind: *kind,
            param: param.clone(),
            body: Box::new(rewrite_at(body, &p, rest, f, ctx)?),
        },
        _ => unreachable!("path step does not match the term"),
    };
    Ok(Expr {
        kind,
        ty: e.ty.clone(),
        span: e.span,
    })
}

fn first_success(
    s: &Strategy,
    e: &Expr,
    place: &Place,
    ctx: &mut RewriteCtx,
    order: Order,
) -> Result<Option<Expr>, StrategyError> {
    let candidates: Vec<Place> = positions(e, place, order)
        .into_iter()
        .map(|(_, p)| p)
        .collect();
    for at in candidates {
        let steps = at.path[place.path.len()..].to_vec();
        match rewrite_at(
            e,
            place,
            &steps,
            &mut |sub, pl, ctx| run(s, sub, pl, ctx),
            ctx,
        ) {
            Ok(out) => return Ok(Some(out)),
            Err(StrategyError::Failure(_)) => continue,
            Err(other) => return Err(other),
        }
    }
    Ok(None)
}

/// Bottom-up single pass: children are rewritten first, then the node
/// itself if it matches; rewritten results are not revisited.
fn every(
    s: &Strategy,
    p: &Pred,
    e: &Expr,
    place: &Place,
    ctx: &mut RewriteCtx,
    hits: &mut usize,
) -> Result<Expr, StrategyError> {
    let mut cur = e.clone();
    for (steps, _) in child_positions(e) {
        cur = rewrite_at(
            &cur,
            place,
            &steps,
            &mut |sub, pl, ctx| every(s, p, sub, pl, ctx, hits),
            ctx,
        )?;
    }
    if p.holds(&cur) {
        *hits += 1;
        run(s, &cur, place, ctx)
    } else {
        Ok(cur)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::alpha_eq;
    use crate::parse::parse_expr;
    use crate::typecheck::infer;

    fn typed(src: &str) -> Expr {
        let reg = Registry::standard();
        let e = parse_expr(src, &reg).unwrap();
        infer(&e, &reg, &mut Assumptions::new()).unwrap()
    }

    #[test]
    fn id_and_fail() {
        let reg = Registry::standard();
        let e = typed("fun(x: f32 => x)");
        let mut ctx = RewriteCtx::new(&reg);
        assert!(alpha_eq(
            &apply(&Strategy::seq(Strategy::Id, Strategy::Id), &e, &mut ctx).unwrap(),
            &e
        ));
        assert!(matches!(
            apply(&Strategy::seq(Strategy::Fail, Strategy::Id), &e, &mut ctx),
            Err(StrategyError::Failure(_))
        ));
        assert!(alpha_eq(
            &apply(&Strategy::try_(Strategy::Fail), &e, &mut ctx).unwrap(),
            &e
        ));
    }

    #[test]
    fn repeat_runs_out_of_fuel() {
        let reg = Registry::standard();
        let e = typed("fun(x: f32 => x)");
        let mut ctx = RewriteCtx::new(&reg).with_fuel(50);
        assert!(matches!(
            apply(&Strategy::repeat(Strategy::Id), &e, &mut ctx),
            Err(StrategyError::FuelExhausted(_, 50))
        ));
    }

    #[test]
    fn outermost_prefers_the_enclosing_map() {
        let e = typed("fun(xs: Array[4, Array[2, f32]] => map(map(fun(y => y)))(xs))");
        let found: Vec<String> = positions(&e, &Place::default(), Order::Pre)
            .into_iter()
            .filter(|(x, _)| Pred::IsMap.holds(x))
            .map(|(_, p)| p.path_string())
            .collect();
        assert_eq!(found, vec!["b".to_string(), "b.0.1".to_string()]);
    }

    #[test]
    fn every_with_id_keeps_the_term() {
        let reg = Registry::standard();
        let e = typed("fun(xs: Array[4, f32] => map(fun(y => y))(xs))");
        let mut ctx = RewriteCtx::new(&reg);
        let out = apply(&Strategy::Id.at(Locator::Every(Pred::IsMap)), &e, &mut ctx).unwrap();
        assert!(alpha_eq(&out, &e));
    }
}
