mod common;

use common::{corpus, data, random_inputs};
use rand::rngs::StdRng;
use rand::SeedableRng;
use rise_core::codegen::{self, Target};
use rise_core::driver::{compile, Config, InputForm, Stage};
use rise_core::interp::{eval_unit, EvalOptions, NatEnv, Value};
use rise_core::lowering::{parse_dpia_file, print_dpia_file, Unit};

#[test]
fn imperative_files_round_trip_for_every_corpus_program() {
    let mut rng = StdRng::seed_from_u64(3);
    for case in corpus() {
        let out = case.compile(Stage::DpiaImp);
        let unit = out.unit.as_ref().unwrap();
        let (asm, phrase) = parse_dpia_file(&out.text)
            .unwrap_or_else(|e| panic!("{}: {e}\n{}", case.name, out.text));
        let back = Unit::from_phrase(&unit.name, &phrase, asm.clone()).unwrap();
        assert_eq!(
            print_dpia_file(&asm, &back.to_phrase()),
            out.text,
            "{}",
            case.name
        );
        let nats = case.nat_env();
        let inputs = random_inputs(out.typed.as_ref().unwrap(), &nats, &mut rng);
        let reparsed = compile(
            &out.text,
            &Config {
                from: InputForm::DpiaImp,
                emit: Stage::DpiaImp,
                ..Config::new("u.dpia")
            },
        )
        .unwrap();
        let a = eval_unit(unit, &nats, &inputs, EvalOptions::default()).unwrap();
        let b = eval_unit(
            reparsed.unit.as_ref().unwrap(),
            &nats,
            &inputs,
            EvalOptions::default(),
        )
        .unwrap();
        assert_eq!(a, b, "{}", case.name);
    }
}

#[test]
fn strict_mode_reports_overlapping_parallel_writes() {
    let cfg = Config {
        from: InputForm::DpiaImp,
        emit: Stage::DpiaImp,
        ..Config::new("race.dpia")
    };
    let out = compile(&data("race.dpia"), &cfg).unwrap();
    let unit = out.unit.unwrap();
    let nats = NatEnv::from([("n".to_string(), 3)]);
    let xs = vec![Value::f32s(&[1.0, 2.0, 3.0])];
    let err = eval_unit(&unit, &nats, &xs, EvalOptions { strict: true }).unwrap_err();
    assert_eq!(err.code(), "ParallelWriteConflict");
    // Without the check the last iteration wins.
    assert_eq!(
        eval_unit(&unit, &nats, &xs, EvalOptions::default()).unwrap(),
        Value::f32s(&[3.0; 3])
    );
}

fn pairwise(src: &str, target: Target) -> rise_core::driver::Output {
    let mut cfg = Config::new("pairwise.rise");
    cfg.strategy = Some((
        "seq.elv".into(),
        "toMapSeq @ every(isMap) ; toReduceSeq @ every(isReduce)".into(),
    ));
    cfg.target = target;
    compile(src, &cfg).unwrap()
}

#[test]
fn double_buffered_pairwise_sum_has_the_expected_skeleton() {
    let out = pairwise(&data("pairwise.rise"), Target::C);
    let unit = out.unit.as_ref().unwrap();
    assert_eq!(unit.body.count_prims("newDoubleBuffer"), 1);
    let text = &out.text;
    for needle in [
        "float buffer1[4];",
        "float buffer2[4];",
        "const float* in_ptr = xs;",
        "float* out_ptr = buffer1;",
        "unsigned char flag = 1;",
        "for (int i = 0; i < 3; i += 1) {",
        "if (i + 2 < 3) {",
        "in_ptr = flag ? buffer1 : buffer2;",
        "out_ptr = flag ? buffer2 : buffer1;",
        "flag = flag ^ 1;",
        "} else {",
        "out_ptr = output;",
    ] {
        assert!(text.contains(needle), "missing `{needle}` in\n{text}");
    }
    let nats = NatEnv::new();
    let xs = vec![Value::f32s(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0])];
    let code = codegen::run_text(unit, text, &nats, &xs, Default::default()).unwrap();
    let dpia = eval_unit(unit, &nats, &xs, EvalOptions { strict: true }).unwrap();
    let rise = common::eval_program(out.typed.as_ref().unwrap(), &nats, &xs);
    assert_eq!(code, Value::f32s(&[36.0]));
    assert_eq!(dpia, code);
    assert_eq!(rise, code);
}

#[test]
fn single_round_writes_straight_to_the_output() {
    let src = "fun(xs: Array[2, f32] => xs |> iterate(1)(depFun(l: Nat => \
               fun(a => a |> split(2) |> map(fun(p => p |> reduce(add)(0.0f)))))))";
    let out = pairwise(src, Target::C);
    assert!(
        out.text.contains("float* out_ptr = output;"),
        "{}",
        out.text
    );
    let xs = vec![Value::f32s(&[2.5, 4.0])];
    let v = codegen::run_text(
        out.unit.as_ref().unwrap(),
        &out.text,
        &NatEnv::new(),
        &xs,
        Default::default(),
    )
    .unwrap();
    assert_eq!(v, Value::f32s(&[6.5]));
}

#[test]
fn symbolic_round_count_selects_the_first_buffer_at_run_time() {
    let out = pairwise(&data("pairwise_k.rise"), Target::OpenMP);
    assert!(
        out.text
            .contains("float* out_ptr = 1 < k ? buffer1 : output;"),
        "{}",
        out.text
    );
    let unit = out.unit.as_ref().unwrap();
    for k in 1..=5i64 {
        let nats = NatEnv::from([("k".to_string(), k)]);
        let n = 1 << k;
        let xs = vec![Value::f32s(&(1..=n).map(|v| v as f32).collect::<Vec<_>>())];
        let want = Value::f32s(&[(n * (n + 1) / 2) as f32]);
        assert_eq!(
            codegen::run_text(unit, &out.text, &nats, &xs, Default::default()).unwrap(),
            want,
            "k={k}"
        );
        assert_eq!(
            eval_unit(unit, &nats, &xs, EvalOptions { strict: true }).unwrap(),
            want,
            "k={k}"
        );
    }
}

#[test]
fn opencl_rejects_double_buffering() {
    let mut cfg = Config::new("pairwise.rise");
    cfg.strategy = Some((
        "seq.elv".into(),
        "toMapSeq @ every(isMap) ; toReduceSeq @ every(isReduce)".into(),
    ));
    let d = compile(&data("pairwise.rise"), &cfg).unwrap_err();
    assert_eq!(d.code, "UnsupportedForTarget");
    assert_eq!(d.stage, "codegen");
}
