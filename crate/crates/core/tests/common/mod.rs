//! Programs, strategies and random inputs shared by the soundness suites.
#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::Rng;
use rise_core::codegen::Target;
use rise_core::driver::{compile, Config, Output, Stage};
use rise_core::interp::{self, NatEnv, Value};
use rise_core::{DataType, Expr, ScalarType, Type};

pub mod gen;
pub mod suites;

pub const ULPS: u64 = 4;

pub fn data(name: &str) -> String {
    std::fs::read_to_string(format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

pub const DOT: &str = "fun(a: Array[n, f32] => fun(b: Array[n, f32] =>
  zip(a)(b) |> map(fun(p => fst(p) * snd(p))) |> reduce(add)(0.0f)))";
pub const SCALE: &str = "fun(xs: Array[n, f32] => xs |> map(fun(x => x * 2.0f + 1.0f)))";
pub const ROWSUM: &str =
    "fun(M: Array[n, Array[m, f32]] => M |> map(fun(r => r |> reduce(add)(0.0f))))";
pub const FUSE: &str =
    "fun(xs: Array[n, f32] => xs |> map(fun(x => x * 3.0f)) |> map(fun(y => y - 1.0f)))";
pub const ISUM: &str = "fun(xs: Array[n, i32] => xs |> reduce(add)(0i32))";
pub const VADD: &str =
    "fun(a: Array[n, f32] => fun(b: Array[n, f32] => zip(a)(b) |> map(fun(p => fst(p) + snd(p)))))";
pub const SQUARES: &str = "fun(a: Array[n, f32] => fun(b: Array[n, f32] =>
  zip(a)(b) |> map(fun(p => fst(p) - snd(p))) |> map(fun(x => x * x))))";
pub const SUMSQ: &str = "fun(xs: Array[n, f32] => xs |> map(fun(x => x * x)) |> reduce(add)(0.0f))";
pub const CHAIN: &str = "fun(xs: Array[n, i32] =>
  xs |> map(fun(x => x + 7i32)) |> map(fun(y => y * y)) |> map(fun(z => z - 3i32)))";
pub const IROWS: &str =
    "fun(M: Array[n, Array[m, i32]] => M |> map(fun(r => r |> map(fun(x => x * 3i32 - 1i32)))))";

/// One end-to-end program with the strategy that lowers it.
pub struct Case {
    pub name: &'static str,
    pub src: String,
    pub strategy: &'static str,
    pub target: Target,
    pub nats: &'static [(&'static str, i64)],
}

impl Case {
    pub fn nat_env(&self) -> NatEnv {
        self.nats.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    pub fn compile(&self, emit: Stage) -> Output {
        let mut cfg = Config::new(format!("{}.rise", self.name));
        cfg.strategy = Some((format!("{}.elv", self.name), self.strategy.to_string()));
        cfg.target = self.target;
        cfg.emit = emit;
        compile(&self.src, &cfg).unwrap_or_else(|d| panic!("{}: {d}", self.name))
    }
}

pub fn corpus() -> Vec<Case> {
    let seq = "toMapSeq @ every(isMap) ; toReduceSeq @ every(isReduce)";
    fn case(
        name: &'static str,
        src: &str,
        strategy: &'static str,
        target: Target,
        nats: &'static [(&'static str, i64)],
    ) -> Case {
        Case {
            name,
            src: src.to_string(),
            strategy,
            target,
            nats,
        }
    }
    vec![
        Case {
            name: "mv",
            src: data("mv.rise"),
            strategy: "splitJoinMap @ outermost(isMap) ; toMapWorkGroup @ outermost(isMap) ; \
                       toMapLocal @ outermost(isMap) ; fuseReduceMap @ every(isReduce) ; toReduceSeq @ every(isReduce)",
            target: Target::OpenCL,
            nats: &[("n", 4), ("m", 8), ("s", 2)],
        },
        Case {
            name: "mapMapPrivate",
            src: data("missing_mem_hl.rise"),
            strategy: "toMapWorkGroup @ outermost(isMap) ; toMapLocal @ every(isMap) ; \
                       insertToMem(Private) @ outermost(isPrimitive(mapLocal))",
            target: Target::OpenCL,
            nats: &[("n", 3), ("m", 4)],
        },
        Case {
            name: "mapMapLocal",
            src: data("missing_mem_hl.rise"),
            strategy: "toMapWorkGroup @ outermost(isMap) ; toMapLocal @ every(isMap) ; \
                       insertToMem(Local) @ outermost(isPrimitive(mapLocal))",
            target: Target::OpenCL,
            nats: &[("n", 3), ("m", 4)],
        },
        case("dot", DOT, "fuseReduceMap @ every(isReduce) ; toReduceSeq @ every(isReduce)", Target::C, &[("n", 7)]),
        case("scaleGlobal", SCALE, "toMapGlobal @ every(isMap)", Target::OpenCL, &[("n", 6)]),
        case(
            "scaleTiled",
            SCALE,
            "splitJoinMap(4) @ outermost(isMap) ; toMapWorkGroup @ outermost(isMap) ; toMapLocal @ outermost(isMap)",
            Target::OpenCL,
            &[("n", 12)],
        ),
        case("rowsumOmp", ROWSUM, "toMapGlobal @ outermost(isMap) ; toReduceSeq @ every(isReduce)", Target::OpenMP, &[
            ("n", 3),
            ("m", 5),
        ]),
        case(
            "rowsumLocal",
            ROWSUM,
            "toMapWorkGroup @ outermost(isMap) ; toReduceSeq(Local) @ every(isReduce)",
            Target::OpenCL,
            &[("n", 4), ("m", 3)],
        ),
        case("fused", FUSE, "mapFusion @ outermost(isMap) ; toMapSeq @ every(isMap)", Target::C, &[("n", 9)]),
        case("isum", ISUM, "toReduceSeq @ every(isReduce)", Target::OpenMP, &[("n", 10)]),
        case("vadd", VADD, "toMapGlobal @ every(isMap)", Target::OpenMP, &[("n", 5)]),
        case("squaresMem", SQUARES, "toMapSeq @ every(isMap) ; insertToMem @ outermost(isPrimitive(mapSeq))", Target::C, &[
            ("n", 6),
        ]),
        case("sumsq", SUMSQ, "fuseReduceMap @ every(isReduce) ; toReduceSeq @ every(isReduce)", Target::C, &[
            ("n", 8),
        ]),
        case("irows", IROWS, "toMapGlobal @ outermost(isMap) ; toMapSeq @ every(isMap)", Target::OpenMP, &[
            ("n", 4),
            ("m", 3),
        ]),
        case("pairwise", &data("pairwise.rise"), seq, Target::C, &[]),
        case("pairwiseK", &data("pairwise_k.rise"), seq, Target::C, &[("k", 4)]),
    ]
}

/// Parameter types of a typed program, after its Nat binders.
pub fn param_types(e: &Expr) -> Vec<DataType> {
    let mut ty = e.ty().expect("typed").clone();
    let mut out = Vec::new();
    loop {
        ty = match ty {
            Type::DepFun { body, .. } => *body,
            Type::Fun(a, b) => {
                out.push(a.data().expect("data parameter").clone());
                *b
            }
            _ => return out,
        }
    }
}

/// A random value of `dt`. Floats are multiples of 1/8 in [-4, 4].
pub fn random_value(dt: &DataType, nats: &NatEnv, rng: &mut StdRng) -> Value {
    match dt {
        DataType::Scalar(ScalarType::F32) => Value::F32(rng.gen_range(-32..=32) as f32 / 8.0),
        DataType::Scalar(ScalarType::I32) => Value::I32(rng.gen_range(-100..=100)),
        DataType::Scalar(ScalarType::Bool) => Value::Bool(rng.gen_bool(0.5)),
        DataType::Array(n, e) => {
            let n = n.eval_map(nats).expect("sizes evaluate");
            Value::Array((0..n).map(|_| random_value(e, nats, rng)).collect())
        }
        DataType::Tuple(a, b) => Value::Tuple(
            Box::new(random_value(a, nats, rng)),
            Box::new(random_value(b, nats, rng)),
        ),
        other => panic!("no generator for {other}"),
    }
}

pub fn random_inputs(e: &Expr, nats: &NatEnv, rng: &mut StdRng) -> Vec<Value> {
    param_types(e)
        .iter()
        .map(|dt| random_value(dt, nats, rng))
        .collect()
}

pub fn eval_program(e: &Expr, nats: &NatEnv, inputs: &[Value]) -> Value {
    let f = interp::eval_rise(e, nats).unwrap();
    interp::apply_program(&f, nats, inputs).unwrap()
}
