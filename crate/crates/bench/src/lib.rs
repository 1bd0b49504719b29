//! Shared inputs for the pipeline benchmarks.

use rise_core::codegen::Target;
use rise_core::driver::{compile, Config, Output, Stage};
use rise_core::interp::{NatEnv, Value};

pub const MV: &str = include_str!("../../core/tests/data/mv.rise");
pub const MV_STRATEGY: &str = include_str!("../../core/tests/data/mv.elv");

pub fn mv_config(emit: Stage) -> Config {
    let mut cfg = Config::new("mv.rise");
    cfg.strategy = Some(("mv.elv".into(), MV_STRATEGY.into()));
    cfg.target = Target::OpenCL;
    cfg.emit = emit;
    cfg
}

pub fn mv_output(emit: Stage) -> Output {
    compile(MV, &mv_config(emit)).expect("the benchmark program compiles")
}

/// Sizes and inputs for an `n`×`m` product with tiles of `s` rows.
pub fn mv_inputs(n: i64, m: i64, s: i64) -> (NatEnv, Vec<Value>) {
    let nats = NatEnv::from([("n".into(), n), ("m".into(), m), ("s".into(), s)]);
    let row = |r: i64| Value::f32s(&(0..m).map(|c| ((r * m + c) % 7) as f32).collect::<Vec<_>>());
    let matrix = Value::Array((0..n).map(row).collect());
    let x = Value::f32s(&(0..m).map(|c| (c % 3) as f32).collect::<Vec<_>>());
    (nats, vec![matrix, x])
}
