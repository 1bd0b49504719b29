use criterion::{criterion_group, criterion_main, Criterion};
use rise_bench::{mv_config, mv_inputs, mv_output, MV};
use rise_core::codegen;
use rise_core::driver::{compile, run, Stage};
use rise_core::interp::{eval_unit, EvalOptions};
use std::hint::black_box;

fn stages(c: &mut Criterion) {
    let mut g = c.benchmark_group("compile");
    for stage in [
        Stage::RiseTyped,
        Stage::RiseLowered,
        Stage::DpiaImp,
        Stage::Code,
    ] {
        let cfg = mv_config(stage);
        g.bench_function(stage.name(), |b| {
            b.iter(|| compile(black_box(MV), &cfg).unwrap())
        });
    }
    g.finish();
}

fn evaluation(c: &mut Criterion) {
    let (nats, inputs) = mv_inputs(16, 32, 4);
    let mut g = c.benchmark_group("evaluate mv 16x32");
    let lowered = mv_output(Stage::RiseLowered);
    g.bench_function("rise", |b| {
        b.iter(|| run(&lowered, &nats, black_box(&inputs), None).unwrap())
    });
    let code = mv_output(Stage::Code);
    let unit = code.unit.as_ref().unwrap();
    g.bench_function("dpia strict", |b| {
        b.iter(|| {
            eval_unit(
                unit,
                &nats,
                black_box(&inputs),
                EvalOptions { strict: true },
            )
            .unwrap()
        })
    });
    let grid = codegen::default_grid(&code.text);
    g.bench_function("c subset", |b| {
        b.iter(|| codegen::run_text(unit, &code.text, &nats, black_box(&inputs), grid).unwrap())
    });
    g.finish();
}

criterion_group!(benches, stages, evaluation);
criterion_main!(benches);
