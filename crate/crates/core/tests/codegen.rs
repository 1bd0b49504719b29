use rise_core::codegen::c_eval::{run_kernel, CArg, CVal, Grid};
use rise_core::codegen::c_parse::parse_c;
use rise_core::codegen::{emit_text, Target};
use rise_core::lowering::{rise_to_dpia, translate_unit, Unit};
use rise_core::{infer, parse_rise, Assumptions, Registry};

fn load(name: &str) -> String {
    std::fs::read_to_string(format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

fn mv_unit() -> Unit {
    let reg = Registry::standard();
    let mut asm = Assumptions::new();
    let e = infer(
        &parse_rise(&load("mv_opt.rise"), &reg).unwrap().body,
        &reg,
        &mut asm,
    )
    .unwrap();
    let f = rise_to_dpia(&e, &asm).unwrap();
    translate_unit("mvOpt", &f, &asm, false).unwrap().0
}

#[test]
fn mv_kernel_text_parses_and_computes_the_product() {
    let unit = mv_unit();
    let text = emit_text(&unit, Target::OpenCL).unwrap();
    println!("{text}");
    let prog = parse_c(&text).unwrap();
    assert_eq!(prog.to_string(), text);
    let (n, m, s) = (4usize, 8usize, 2usize);
    let mat: Vec<f32> = (0..n * m).map(|v| v as f32 * 0.5).collect();
    let x: Vec<f32> = (0..m).map(|v| 1.0 + v as f32).collect();
    let args = vec![
        CArg::Buffer(vec![CVal::Undef; n]),
        CArg::Int(n as i64),
        CArg::Int(m as i64),
        CArg::Int(s as i64),
        CArg::Buffer(mat.iter().map(|v| CVal::Float(*v)).collect()),
        CArg::Buffer(x.iter().map(|v| CVal::Float(*v)).collect()),
    ];
    let out = run_kernel(
        &prog,
        "mvOptKernel",
        args,
        Grid {
            groups: 2,
            local: 2,
        },
    )
    .unwrap();
    let got: Vec<f32> = out[0]
        .as_ref()
        .unwrap()
        .iter()
        .map(|v| v.as_f32().unwrap())
        .collect();
    let want: Vec<f32> = (0..n)
        .map(|r| (0..m).fold(0.0f32, |acc, c| acc + mat[r * m + c] * x[c]))
        .collect();
    assert_eq!(got, want);
}

#[test]
fn parallel_loops_are_rejected_for_plain_c() {
    let err = emit_text(&mv_unit(), Target::C).unwrap_err();
    assert_eq!(err.code(), "UnsupportedForTarget");
    assert!(err.to_string().contains("parForWorkGroup"), "{err}");
}

#[test]
fn openmp_marks_only_the_outer_loop() {
    let text = emit_text(&mv_unit(), Target::OpenMP).unwrap();
    println!("{text}");
    assert_eq!(text.matches("#pragma omp parallel for").count(), 1);
}
