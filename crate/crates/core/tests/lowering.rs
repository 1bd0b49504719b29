use rise_core::dpia::print_phrase;
use rise_core::lowering::{rise_to_dpia, translate_unit, LowerError};
use rise_core::{infer, parse_rise, Assumptions, Registry};

fn load(name: &str) -> String {
    std::fs::read_to_string(format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

fn typed(name: &str) -> (rise_core::Expr, Assumptions) {
    let reg = Registry::standard();
    let mut asm = Assumptions::new();
    let e = infer(&parse_rise(&load(name), &reg).unwrap().body, &reg, &mut asm).unwrap();
    (e, asm)
}

#[test]
fn optimized_mv_lowers_to_nested_parallel_loops() {
    let (e, asm) = typed("mv_opt.rise");
    let f = rise_to_dpia(&e, &asm).unwrap();
    let (unit, trace) = translate_unit("mv", &f, &asm, true).unwrap();
    let text = print_phrase(&unit.body);
    println!("{text}");
    assert_eq!(unit.nat_params, vec!["n", "m", "s"]);
    assert_eq!(unit.body.count_prims("parForWorkGroup"), 1);
    assert_eq!(unit.body.count_prims("parForLocal"), 1);
    assert_eq!(unit.body.count_prims("new"), 1);
    assert_eq!(unit.body.count_prims("for"), 1);
    assert!(text.contains("joinAcc"));
    assert!(trace.unwrap().iter().any(|t| t == "accT mapWorkGroup"));
}

#[test]
fn stacked_map_locals_report_a_read_write_mismatch() {
    let (e, asm) = typed("missing_mem.rise");
    let err = rise_to_dpia(&e, &asm).unwrap_err();
    assert_eq!(err.code(), "RWMismatch");
    assert!(err.to_string().contains("mapLocal"), "{err}");
    assert!(err.span().is_some());
}

#[test]
fn high_level_map_is_rejected() {
    let (e, asm) = typed("mv.rise");
    let err = rise_to_dpia(&e, &asm).unwrap_err();
    assert!(
        matches!(err, LowerError::Unlowered { ref primitive, .. } if primitive == "map"),
        "{err}"
    );
}
