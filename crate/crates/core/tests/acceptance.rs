//! End-to-end acceptance checks. Each criterion prints one PASS or FAIL
//! line with its measured runtime; the test fails if any criterion does.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::{data, gen, suites};
use proptest::test_runner::{Config as PropConfig, TestRunner};
use rise_core::codegen::c_ast::{AssignOp, BinOp, CExpr, CProgram, CStmt};
use rise_core::codegen::c_parse::parse_c;
use rise_core::codegen::{self, c_eval::Grid, Target};
use rise_core::driver::{compile, run, Config, Stage};
use rise_core::elv::parse_strategy;
use rise_core::interp::{eval_unit, parse_values, EvalOptions, NatEnv, Value};
use rise_core::parse::parse_nat;
use rise_core::strategy::{apply, RewriteCtx, StrategyError};
use rise_core::{nat_equal, Nat, Registry};

type Check = Result<String, String>;

fn criterion(n: u32, title: &str, budget: Duration, f: impl FnOnce() -> Check) -> bool {
    let start = Instant::now();
    let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        Err(p
            .downcast_ref::<String>()
            .cloned()
            .or(p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default())
    });
    let took = start.elapsed();
    let result = result.and_then(|s| {
        if took <= budget {
            Ok(s)
        } else {
            Err(format!("took {took:.2?}, budget {budget:.0?}"))
        }
    });
    match &result {
        Ok(detail) => println!("criterion {n}: PASS {title} ({detail}; {took:.2?})"),
        Err(why) => println!("criterion {n}: FAIL {title}: {why}"),
    }
    result.is_ok()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn strategy_config(src: &str, strategy: &str, target: Target) -> Config {
    let mut cfg = Config::new(src);
    cfg.strategy = Some((strategy.to_string(), data(strategy)));
    cfg.target = target;
    cfg
}

fn to_nat(e: &CExpr) -> Result<Nat, String> {
    Ok(match e {
        CExpr::Int(i) => Nat::Const(*i),
        CExpr::Var(v) => Nat::var(v.as_str()),
        CExpr::Bin(op, a, b) => {
            let (a, b) = (to_nat(a)?, to_nat(b)?);
            match op {
                BinOp::Add => a.add(b),
                BinOp::Sub => a.sub(b),
                BinOp::Mul => a.mul(b),
                BinOp::Div => a.div(b),
                BinOp::Mod => a.rem(b),
                other => return Err(format!("{other:?} in an index")),
            }
        }
        other => return Err(format!("{other:?} in an index")),
    })
}

fn index_of<'a>(e: &'a CExpr, array: &str) -> Option<&'a CExpr> {
    match e {
        CExpr::Index(a, i) if matches!(&**a, CExpr::Var(v) if v == array) => Some(i),
        CExpr::Bin(_, a, b) => index_of(a, array).or_else(|| index_of(b, array)),
        _ => None,
    }
}

fn same_index(found: &CExpr, want: &str) -> Result<(), String> {
    let f = to_nat(found)?;
    let w = parse_nat(want).map_err(|e| e.to_string())?;
    ensure(nat_equal(&f, &w), || format!("index {f} is not {want}"))
}

fn parallel_loop<'a>(body: &'a [CStmt], id: &str) -> Result<(&'a str, &'a [CStmt]), String> {
    match body {
        [CStmt::For {
            var,
            init: CExpr::Call(f, _),
            body,
            ..
        }] if f == id => Ok((var, body)),
        other => Err(format!(
            "expected a single loop starting at {id}, found {} statements",
            other.len()
        )),
    }
}

/// The structural shape of the optimized matrix-vector kernel.
fn mv_structure(prog: &CProgram) -> Result<(), String> {
    let k = codegen::c_eval::kernel_of(prog).ok_or("no kernel")?;
    let (wg, body) = parallel_loop(&k.body, "get_group_id")?;
    let (l, body) = parallel_loop(body, "get_local_id")?;
    let [CStmt::Decl(acc, None), CStmt::Assign(CExpr::Var(init), AssignOp::Set, _), CStmt::For {
        var: i,
        init: CExpr::Int(0),
        body: inner,
        ..
    }, CStmt::Assign(out, AssignOp::Set, CExpr::Var(res))] = body
    else {
        return Err(format!(
            "unexpected loop body with {} statements",
            body.len()
        ));
    };
    ensure(
        acc.space.is_none() && acc.len.is_none() && !acc.pointer,
        || "accumulator is not a private scalar".into(),
    )?;
    ensure(init == &acc.name && res == &acc.name, || {
        "accumulator is not initialised and stored".into()
    })?;
    let [CStmt::Assign(CExpr::Var(a), AssignOp::Add, rhs)] = inner.as_slice() else {
        return Err("inner loop is not a single accumulation".into());
    };
    ensure(a == &acc.name, || "inner loop accumulates elsewhere".into())?;
    same_index(
        index_of(rhs, "M").ok_or("no M access")?,
        &format!("({i}+{l}*m)+(m*s*{wg})"),
    )?;
    same_index(index_of(rhs, "x").ok_or("no x access")?, i)?;
    same_index(
        index_of(out, "output").ok_or("no output store")?,
        &format!("{l} + s*{wg}"),
    )
}

fn mv_golden() -> Check {
    let out = compile(
        &data("mv.rise"),
        &strategy_config("mv.rise", "mv.elv", Target::OpenCL),
    )
    .map_err(|d| d.to_string())?;
    let prog = parse_c(&out.text).map_err(|e| e.to_string())?;
    mv_structure(&prog)?;
    ensure(out.text == data("mvOptKernel.cl"), || {
        "text differs from the pinned golden file".into()
    })?;
    let nats = NatEnv::from([("n".into(), 4), ("m".into(), 8), ("s".into(), 2)]);
    let m: Vec<Vec<f32>> = (0..4)
        .map(|r| (0..8).map(|c| (r * 8 + c) as f32 * 0.5).collect())
        .collect();
    let x: Vec<f32> = (0..8).map(|c| c as f32 - 3.0).collect();
    let inputs = vec![
        Value::Array(m.iter().map(|r| Value::f32s(r)).collect()),
        Value::f32s(&x),
    ];
    let want = Value::f32s(
        &m.iter()
            .map(|r| r.iter().zip(&x).fold(0.0f32, |s, (a, b)| s + a * b))
            .collect::<Vec<_>>(),
    );
    let got = run(
        &out,
        &nats,
        &inputs,
        Some(Grid {
            groups: 2,
            local: 2,
        }),
    )
    .map_err(|d| d.to_string())?;
    ensure(got == want, || {
        format!("kernel computed {got}, expected {want}")
    })?;
    Ok("structure, golden bytes and n=4 m=8 s=2 run".into())
}

fn rw_enforcement() -> Check {
    let err = compile(
        &data("missing_mem_hl.rise"),
        &strategy_config("missing_mem_hl.rise", "lower_only.elv", Target::OpenCL),
    )
    .expect_err("the program without memory must not compile");
    ensure(
        err.code == "RWMismatch" && err.message.contains("mapLocal"),
        || err.to_string(),
    )?;
    ensure((err.line, err.column) == (5, 14), || {
        format!("reported at {}:{}", err.line, err.column)
    })?;
    let out = compile(
        &data("missing_mem_hl.rise"),
        &strategy_config("missing_mem_hl.rise", "lower_with_mem.elv", Target::OpenCL),
    )
    .map_err(|d| d.to_string())?;
    ensure(
        out.rewrite_trace
            .iter()
            .any(|t| t.rule.starts_with("insertToMem")),
        || "insertToMem did not fire".into(),
    )?;
    ensure(out.text.contains("float tmp["), || {
        "no private temporary in the kernel".into()
    })?;
    Ok("RWMismatch at 5:14 before, compiles after insertToMem(Private)".into())
}

fn double_buffering() -> Check {
    let mut cfg = Config::new("pairwise.rise");
    cfg.strategy = Some(("sequential.elv".into(), data("sequential.elv")));
    cfg.target = Target::C;
    let out = compile(&data("pairwise.rise"), &cfg).map_err(|d| d.to_string())?;
    let unit = out.unit.as_ref().unwrap();
    ensure(unit.body.count_prims("newDoubleBuffer") == 1, || {
        "no newDoubleBuffer in the unit".into()
    })?;
    for needle in [
        "float buffer1[",
        "float buffer2[",
        "in_ptr = xs;",
        "out_ptr = buffer1;",
        "flag = 1;",
        "in_ptr = flag ? buffer1 : buffer2;",
        "out_ptr = flag ? buffer2 : buffer1;",
        "flag = flag ^ 1;",
        "out_ptr = output;",
    ] {
        ensure(out.text.contains(needle), || format!("missing `{needle}`"))?;
    }
    let inputs = parse_values("[1, 2, 3, 4, 5, 6, 7, 8]").unwrap();
    let nats = NatEnv::new();
    let code = run(&out, &nats, &inputs, None).map_err(|d| d.to_string())?;
    let dpia =
        eval_unit(unit, &nats, &inputs, EvalOptions { strict: true }).map_err(|e| e.to_string())?;
    let rise = common::eval_program(out.typed.as_ref().unwrap(), &nats, &inputs);
    ensure(code == Value::f32s(&[36.0]), || {
        format!("code computed {code}")
    })?;
    ensure(dpia == code && rise == code, || {
        format!("interpreters disagree: {dpia} / {rise}")
    })?;
    Ok("skeleton present, result [36.0] in code, DPIA and RISE".into())
}

fn property_suites() -> Check {
    let mut runner = TestRunner::new(PropConfig {
        cases: 1000,
        failure_persistence: None,
        ..PropConfig::default()
    });
    runner
        .run(&(gen::nat_term(), gen::nat_env()), |(t, env)| {
            gen::check_nat_term(&t, &env).map_err(proptest::test_runner::TestCaseError::fail)
        })
        .map_err(|e| e.to_string())?;
    let programs = gen::program_round_trips(0xacce, 200)?;
    // Strict disjointness runs inside the translation suite.
    suites::translation_soundness(7)?;
    let reg = Registry::standard();
    let e = rise_core::driver::compile(
        common::SCALE,
        &Config {
            emit: Stage::RiseTyped,
            ..Config::new("s.rise")
        },
    )
    .map_err(|d| d.to_string())?
    .typed
    .unwrap();
    let looping =
        parse_strategy("repeat(splitJoinMap(1) @ outermost(isMap))").map_err(|e| e.to_string())?;
    let mut ctx = RewriteCtx::new(&reg).with_fuel(40);
    match apply(&looping, &e, &mut ctx) {
        Err(StrategyError::FuelExhausted(_, 40)) => {}
        other => return Err(format!("looping strategy ended with {other:?}")),
    }
    Ok(format!(
        "1000 Nat terms, {programs} programs, strict parFor checks, fuel exhaustion"
    ))
}

#[test]
fn acceptance() {
    let s = Duration::from_secs;
    let results = [
        criterion(
            1,
            "matrix-vector kernel matches the golden structure",
            s(1),
            mv_golden,
        ),
        criterion(
            2,
            "read/write annotations reject missing memory",
            s(1),
            rw_enforcement,
        ),
        criterion(3, "rewrite rules preserve meaning", s(30), || {
            suites::rule_soundness(1)
        }),
        criterion(
            4,
            "translation agrees with the functional evaluator",
            s(30),
            || suites::translation_soundness(2),
        ),
        criterion(
            5,
            "emitted code agrees with the store evaluator",
            s(60),
            || suites::codegen_soundness(3),
        ),
        criterion(6, "double buffering", s(5), double_buffering),
        criterion(7, "property suites", s(60), property_suites),
    ];
    let failed: Vec<usize> = results
        .iter()
        .enumerate()
        .filter(|(_, ok)| !**ok)
        .map(|(i, _)| i + 1)
        .collect();
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
