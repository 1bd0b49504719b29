//! The rewrite rule library.

use crate::expr::{Expr, ExprKind, Ident};
use crate::nat::Nat;
use crate::primitives::is_map_like;
use crate::strategy::{Rule, RuleCx, RuleFn};
use crate::types::{AddressSpace, Type, TypeArg};

pub struct RuleInfo {
    pub name: &'static str,
    pub params: &'static str,
    pub summary: &'static str,
    apply: RuleFn,
    arity: ArgKind,
}

#[derive(Clone, Copy, PartialEq)]
enum ArgKind {
    None,
    OptNat,
    OptAddr,
}

pub const RULES: &[RuleInfo] = &[
    RuleInfo {
        name: "splitJoinMap",
        params: "(n: Nat = s)",
        summary: "map(f) => split(n) >> map(map(f)) >> join",
        apply: split_join_map,
        arity: ArgKind::OptNat,
    },
    RuleInfo {
        name: "mapFusion",
        params: "",
        summary: "map(f) >> map(g) => map(f >> g)",
        apply: map_fusion,
        arity: ArgKind::None,
    },
    RuleInfo {
        name: "fuseReduceMap",
        params: "",
        summary: "map(f) >> reduce(op)(init) => reduceSeq(fun(acc, y => op(acc)(f(y))))(init)",
        apply: fuse_reduce_map,
        arity: ArgKind::None,
    },
    RuleInfo {
        name: "toMapSeq",
        params: "",
        summary: "map => mapSeq",
        apply: to_map_seq,
        arity: ArgKind::None,
    },
    RuleInfo {
        name: "toMapGlobal",
        params: "",
        summary: "map => mapGlobal",
        apply: to_map_global,
        arity: ArgKind::None,
    },
    RuleInfo {
        name: "toMapWorkGroup",
        params: "",
        summary: "map => mapWorkGroup",
        apply: to_map_work_group,
        arity: ArgKind::None,
    },
    RuleInfo {
        name: "toMapLocal",
        params: "",
        summary: "map => mapLocal",
        apply: to_map_local,
        arity: ArgKind::None,
    },
    RuleInfo {
        name: "toReduceSeq",
        params: "(a: AddrSp = Private)",
        summary: "reduce / reduceSeq => reduceSeq(a)",
        apply: to_reduce_seq,
        arity: ArgKind::OptAddr,
    },
    RuleInfo {
        name: "insertToMem",
        params: "(a: AddrSp = Private)",
        summary: "mapX(g)(P) => mapX(g)(toMem(a)(P)) for a map-like producer P",
        apply: insert_to_mem,
        arity: ArgKind::OptAddr,
    },
];

/// Builds the named rule with its arguments checked against its parameters.
pub fn lookup(name: &str, args: Vec<TypeArg>) -> Result<Rule, String> {
    let info = RULES
        .iter()
        .find(|r| r.name == name)
        .ok_or_else(|| format!("unknown rule `{name}`"))?;
    let ok = matches!(
        (info.arity, args.as_slice()),
        (_, [])
            | (ArgKind::OptNat, [TypeArg::Nat(_)])
            | (ArgKind::OptAddr, [TypeArg::AddressSpace(_)])
    );
    if !ok {
        return Err(format!(
            "rule `{name}` expects arguments {}",
            if info.params.is_empty() {
                "()"
            } else {
                info.params
            }
        ));
    }
    Ok(Rule {
        name: name.to_string(),
        args,
        apply: info.apply,
    })
}

fn spine_of(e: &Expr) -> (Option<&str>, Vec<&Expr>) {
    (e.head_primitive(), e.spine_exprs())
}

/// `f(arg)`, substituting directly when `f` is a lambda.
fn app_beta(f: &Expr, arg: Expr) -> Expr {
    match &f.kind {
        ExprKind::Lambda { param, body, .. } => body.substitute(param, &arg),
        _ => f.erase_types().app(arg),
    }
}

fn lambda_param_name(f: &Expr, fallback: &str) -> String {
    match &f.kind {
        ExprKind::Lambda { param, .. } => param.name.clone(),
        _ => fallback.to_string(),
    }
}

fn array_length(t: Option<&Type>) -> Option<Nat> {
    match t? {
        Type::Data(crate::types::DataType::Array(n, _)) => Some(n.clone()),
        _ => None,
    }
}

fn split_join_map(e: &Expr, args: &[TypeArg], cx: &mut RuleCx) -> Result<Expr, String> {
    let (head, xs) = spine_of(e);
    if head != Some("map") || xs.is_empty() || xs.len() > 2 {
        return Err("expected a map".into());
    }
    let n = match args.first() {
        Some(TypeArg::Nat(n)) => n.clone(),
        _ => Nat::var("s"),
    };
    let len = match xs.get(1) {
        Some(arr) => array_length(arr.ty.as_ref()),
        None => match e.ty.as_ref() {
            Some(Type::Fun(a, _)) => array_length(Some(a)),
            _ => None,
        },
    };
    if let Some(len) = len {
        if let (Some(a), Some(b)) = (n.normalize().as_const(), len.normalize().as_const()) {
            if a <= 0 || b % a != 0 {
                return Err(format!("split size {a} does not divide length {b}"));
            }
        } else {
            cx.assumptions.assume_divides(&n, &len);
        }
    }
    let f = xs[0].erase_types();
    let rows = Ident::fresh("rows");
    let inner = Expr::lambda(
        rows.clone(),
        Expr::prim("map").app(f).app(Expr::ident(&rows)),
    );
    let build = move |arr: Expr| {
        Expr::prim("join").app(
            Expr::prim("map").app(inner.clone()).app(
                Expr::prim("split")
                    .dep_app(TypeArg::Nat(n.clone()))
                    .app(arr),
            ),
        )
    };
    Ok(match xs.get(1) {
        Some(arr) => build(arr.erase_types()),
        None => {
            let x = Ident::fresh("x");
            Expr::lambda(x.clone(), build(Expr::ident(&x)))
        }
    })
}

fn map_fusion(e: &Expr, _: &[TypeArg], _: &mut RuleCx) -> Result<Expr, String> {
    let (head, xs) = spine_of(e);
    if head != Some("map") || xs.len() != 2 {
        return Err("expected map(g)(map(f)(xs))".into());
    }
    let (inner_head, inner) = spine_of(xs[1]);
    if inner_head != Some("map") || inner.len() != 2 {
        return Err("argument is not a map".into());
    }
    let (g, f, arr) = (xs[0], inner[0], inner[1]);
    let y = Ident::fresh(lambda_param_name(f, "y"));
    let body = app_beta(
        &g.erase_types(),
        app_beta(&f.erase_types(), Expr::ident(&y)),
    );
    Ok(Expr::prim("map")
        .app(Expr::lambda(y, body))
        .app(arr.erase_types()))
}

fn fuse_reduce_map(e: &Expr, _: &[TypeArg], _: &mut RuleCx) -> Result<Expr, String> {
    let (head, xs) = spine_of(e);
    if !matches!(head, Some("reduce" | "reduceSeq")) || xs.len() != 3 {
        return Err("expected reduce(op)(init)(map(f)(xs))".into());
    }
    let (inner_head, inner) = spine_of(xs[2]);
    if inner_head != Some("map") || inner.len() != 2 {
        return Err("reduced array is not produced by a map".into());
    }
    let (op, init, f, arr) = (
        xs[0].erase_types(),
        xs[1].erase_types(),
        inner[0].erase_types(),
        inner[1].erase_types(),
    );
    let acc = Ident::fresh(lambda_param_name(&op, "acc"));
    let y = Ident::fresh(lambda_param_name(&f, "y"));
    let fy = app_beta(&f, Expr::ident(&y));
    let partial = app_beta(&op, Expr::ident(&acc));
    let body = app_beta(&partial, fy);
    let fused = Expr::lambda(acc, Expr::lambda(y, body));
    Ok(Expr::prim("reduceSeq").app(fused).app(init).app(arr))
}

/// Replaces the head primitive of a spine.
fn retag(e: &Expr, from: &[&str], to: &str) -> Result<Expr, String> {
    match e.head_primitive() {
        Some(h) if from.contains(&h) => {}
        Some(h) => return Err(format!("`{h}` is not {}", from.join(" or "))),
        None => return Err("not a primitive application".into()),
    }
    Ok(replace_head(e, &mut |h| Expr {
        span: h.span,
        ..Expr::prim(to)
    }))
}

fn replace_head(e: &Expr, f: &mut dyn FnMut(&Expr) -> Expr) -> Expr {
    let out = match &e.kind {
        ExprKind::Apply(g, a) => replace_head(g, f).app(a.erase_types()),
        ExprKind::DepApply(g, t) => replace_head(g, f).dep_app(t.clone()),
        _ => return f(e),
    };
    Expr {
        span: e.span,
        ..out
    }
}

fn to_map_seq(e: &Expr, _: &[TypeArg], _: &mut RuleCx) -> Result<Expr, String> {
    retag(e, &["map"], "mapSeq")
}

fn to_map_global(e: &Expr, _: &[TypeArg], _: &mut RuleCx) -> Result<Expr, String> {
    retag(e, &["map"], "mapGlobal")
}

fn to_map_work_group(e: &Expr, _: &[TypeArg], _: &mut RuleCx) -> Result<Expr, String> {
    retag(e, &["map"], "mapWorkGroup")
}

fn to_map_local(e: &Expr, _: &[TypeArg], _: &mut RuleCx) -> Result<Expr, String> {
    retag(e, &["map"], "mapLocal")
}

fn address_arg(args: &[TypeArg]) -> AddressSpace {
    match args.first() {
        Some(TypeArg::AddressSpace(a)) => *a,
        _ => AddressSpace::Private,
    }
}

fn to_reduce_seq(e: &Expr, args: &[TypeArg], _: &mut RuleCx) -> Result<Expr, String> {
    let a = address_arg(args);
    match e.head_primitive() {
        Some("reduce" | "reduceSeq") => {}
        _ => return Err("expected reduce or reduceSeq without an address space".into()),
    }
    Ok(replace_head(e, &mut |_| {
        Expr::prim("reduceSeqAt").dep_app(TypeArg::AddressSpace(a))
    }))
}

fn insert_to_mem(e: &Expr, args: &[TypeArg], _: &mut RuleCx) -> Result<Expr, String> {
    let a = address_arg(args);
    let (head, xs) = spine_of(e);
    if !head.is_some_and(is_map_like) || xs.len() != 2 {
        return Err("expected a map-like consumer applied to its input".into());
    }
    let producer = xs[1];
    match producer.head_primitive() {
        Some(p) if is_map_like(p) || p == "iterate" => {}
        Some(p) => return Err(format!("input produced by `{p}` needs no materialization")),
        None => return Err("input is already in memory".into()),
    }
    let wrapped = Expr::prim("toMem")
        .dep_app(TypeArg::AddressSpace(a))
        .app(producer.erase_types());
    let ExprKind::Apply(f, _) = &e.kind else {
        unreachable!()
    };
    Ok(f.erase_types().app(wrapped))
}

/// Names and parameter lists for `--list-rules`.
pub fn describe() -> Vec<String> {
    RULES
        .iter()
        .map(|r| format!("{}{}  {}", r.name, r.params, r.summary))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::alpha_eq;
    use crate::nat::Assumptions;
    use crate::parse::parse_expr;
    use crate::primitives::Registry;
    use crate::strategy::{apply, Locator, Pred, RewriteCtx, Strategy, StrategyError};
    use crate::typecheck::infer;

    fn typed(src: &str) -> Expr {
        let reg = Registry::standard();
        infer(
            &parse_expr(src, &reg).unwrap(),
            &reg,
            &mut Assumptions::new(),
        )
        .unwrap()
    }

    fn rule(name: &str) -> Strategy {
        Strategy::Rule(lookup(name, vec![]).unwrap())
    }

    #[test]
    fn lowering_rules_fail_on_second_application() {
        let reg = Registry::standard();
        let e = typed("fun(xs: Array[4, f32] => map(fun(x => x))(xs))");
        let mut ctx = RewriteCtx::new(&reg);
        let s = rule("toMapSeq").at(Locator::Outermost(Pred::IsPrimitive("map".into())));
        let once = apply(&s, &e, &mut ctx).unwrap();
        assert_eq!(once.primitives(), vec!["mapSeq".to_string()]);
        assert!(matches!(
            apply(&s, &once, &mut ctx),
            Err(StrategyError::Failure(_))
        ));
    }

    #[test]
    fn split_join_map_rejects_reduce() {
        let reg = Registry::standard();
        let e = typed("fun(xs: Array[4, f32] => reduce(add)(0.0f)(xs))");
        let mut ctx = RewriteCtx::new(&reg);
        let s = rule("splitJoinMap").at(Locator::Outermost(Pred::IsReduce));
        assert!(matches!(
            apply(&s, &e, &mut ctx),
            Err(StrategyError::Failure(_))
        ));
    }

    #[test]
    fn fusion_chains_to_one_map() {
        let reg = Registry::standard();
        let e = typed(
            "fun(xs: Array[4, f32] => xs |> (map(fun(a => a + 1.0f)) >> map(fun(b => b * 3.0f)) >> map(fun(c => c))))",
        );
        let mut ctx = RewriteCtx::new(&reg);
        let s = Strategy::repeat(rule("mapFusion").at(Locator::Outermost(Pred::IsMap)));
        let out = apply(&s, &e, &mut ctx).unwrap();
        assert_eq!(out.primitives().iter().filter(|p| *p == "map").count(), 1);
    }

    #[test]
    fn insert_to_mem_needs_a_producer() {
        let reg = Registry::standard();
        let e = typed("fun(xs: Array[4, f32] => mapLocal(fun(x => x))(xs))");
        let mut ctx = RewriteCtx::new(&reg);
        let s = Strategy::Rule(lookup("insertToMem", vec![]).unwrap())
            .at(Locator::Outermost(Pred::IsPrimitive("mapLocal".into())));
        assert!(matches!(
            apply(&s, &e, &mut ctx),
            Err(StrategyError::Failure(_))
        ));
    }

    #[test]
    fn fuse_reduce_map_matches_hand_written_form() {
        let reg = Registry::standard();
        let e = typed("fun(xs: Array[3, f32] => xs |> map(fun(y => y * y)) |> reduce(add)(0.0f))");
        let mut ctx = RewriteCtx::new(&reg);
        let out = apply(
            &rule("fuseReduceMap").at(Locator::Every(Pred::IsReduce)),
            &e,
            &mut ctx,
        )
        .unwrap();
        let expected =
            typed("fun(xs: Array[3, f32] => xs |> reduceSeq(fun(acc, y => acc + (y * y)))(0.0f))");
        assert!(alpha_eq(&out, &expected), "{out}");
    }
}
