use rise_core::elv::parse_strategy;
use rise_core::strategy::{apply, RewriteCtx};
use rise_core::{alpha_eq, infer, parse_rise, Assumptions, Nat, Registry};

fn load(name: &str) -> String {
    std::fs::read_to_string(format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

#[test]
fn five_step_strategy_yields_the_optimized_program() {
    let reg = Registry::standard();
    let mv = infer(
        &parse_rise(&load("mv.rise"), &reg).unwrap().body,
        &reg,
        &mut Assumptions::new(),
    )
    .unwrap();
    let strategy = parse_strategy(&load("mv.elv")).unwrap();
    let mut ctx = RewriteCtx::new(&reg);
    let out = apply(&strategy, &mv, &mut ctx).unwrap();
    let expected = parse_rise(&load("mv_opt.rise"), &reg).unwrap().body;
    assert!(alpha_eq(&out, &expected), "got:\n{out}");
    assert_eq!(ctx.trace.len(), 5);
    assert!(ctx.assumptions.holds(&Nat::var("s"), &Nat::var("n")));
    assert!(out
        .ty
        .unwrap()
        .equal_under(&mv.ty.unwrap(), &ctx.assumptions));
}
