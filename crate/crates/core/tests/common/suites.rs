//! Each suite returns a one-line summary on success and the first
//! counterexample on failure.

use rand::rngs::StdRng;
use rand::SeedableRng;
use rise_core::codegen::{self, c_eval::Grid};
use rise_core::driver::{compile, Config, Stage};
use rise_core::interp::{eval_unit, EvalOptions, NatEnv};

use super::*;

pub const INPUTS_PER_PROGRAM: usize = 20;

/// A rule under test, the strategy step that applies it once and the
/// programs it is applied to.
pub struct RuleCase {
    pub rule: &'static str,
    pub step: &'static str,
    pub contexts: Vec<(String, &'static [(&'static str, i64)])>,
}

pub fn rule_cases() -> Vec<RuleCase> {
    fn c(s: &str, n: &'static [(&'static str, i64)]) -> (String, &'static [(&'static str, i64)]) {
        (s.to_string(), n)
    }
    let mv = data("mv.rise");
    let mm = data("missing_mem_hl.rise");
    vec![
        RuleCase {
            rule: "splitJoinMap",
            step: "splitJoinMap(2) @ outermost(isMap)",
            contexts: vec![
                c(SCALE, &[("n", 8)]),
                c(ROWSUM, &[("n", 6), ("m", 3)]),
                c(&mv, &[("n", 4), ("m", 5)]),
            ],
        },
        RuleCase {
            rule: "mapFusion",
            step: "mapFusion @ outermost(isMap)",
            contexts: vec![
                c(FUSE, &[("n", 7)]),
                c(SQUARES, &[("n", 5)]),
                c(CHAIN, &[("n", 6)]),
            ],
        },
        RuleCase {
            rule: "fuseReduceMap",
            step: "fuseReduceMap @ every(isReduce)",
            contexts: vec![
                c(DOT, &[("n", 6)]),
                c(SUMSQ, &[("n", 9)]),
                c(&mv, &[("n", 3), ("m", 4)]),
            ],
        },
        RuleCase {
            rule: "toMapSeq",
            step: "toMapSeq @ every(isMap)",
            contexts: vec![
                c(SCALE, &[("n", 5)]),
                c(IROWS, &[("n", 3), ("m", 4)]),
                c(&mv, &[("n", 3), ("m", 4)]),
            ],
        },
        RuleCase {
            rule: "toMapGlobal",
            step: "toMapGlobal @ every(isMap)",
            contexts: vec![
                c(VADD, &[("n", 5)]),
                c(ROWSUM, &[("n", 4), ("m", 2)]),
                c(&mm, &[("n", 2), ("m", 3)]),
            ],
        },
        RuleCase {
            rule: "toMapWorkGroup",
            step: "toMapWorkGroup @ outermost(isMap)",
            contexts: vec![
                c(SCALE, &[("n", 4)]),
                c(&mv, &[("n", 3), ("m", 4)]),
                c(&mm, &[("n", 2), ("m", 3)]),
            ],
        },
        RuleCase {
            rule: "toMapLocal",
            step: "toMapLocal @ every(isMap)",
            contexts: vec![
                c(FUSE, &[("n", 6)]),
                c(IROWS, &[("n", 2), ("m", 5)]),
                c(DOT, &[("n", 4)]),
            ],
        },
        RuleCase {
            rule: "toReduceSeq",
            step: "toReduceSeq @ every(isReduce)",
            contexts: vec![
                c(ISUM, &[("n", 8)]),
                c(ROWSUM, &[("n", 3), ("m", 4)]),
                c(&mv, &[("n", 2), ("m", 6)]),
            ],
        },
        RuleCase {
            rule: "insertToMem",
            step: "insertToMem @ outermost(isMap)",
            contexts: vec![
                c(FUSE, &[("n", 6)]),
                c(SQUARES, &[("n", 4)]),
                c(CHAIN, &[("n", 5)]),
            ],
        },
    ]
}

fn rise_stage(src: &str, strategy: Option<&str>) -> Result<Expr, String> {
    let mut cfg = Config::new("context.rise");
    cfg.emit = Stage::RiseLowered;
    cfg.strategy = strategy.map(|s| ("step.elv".to_string(), s.to_string()));
    compile(src, &cfg)
        .map(|o| o.typed.expect("rise stages keep the expression"))
        .map_err(|d| d.to_string())
}

/// Applies every shipped rule in its contexts and compares evaluation
/// before and after on random inputs.
pub fn rule_soundness(seed: u64) -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(seed);
    let (mut contexts, mut runs) = (0, 0);
    for rc in rule_cases() {
        if rc.contexts.len() < 3 {
            return Err(format!(
                "{} has only {} contexts",
                rc.rule,
                rc.contexts.len()
            ));
        }
        for (src, nats) in &rc.contexts {
            let nats: NatEnv = nats.iter().map(|(k, v)| (k.to_string(), *v)).collect();
            let before = rise_stage(src, None)?;
            let after = rise_stage(src, Some(rc.step)).map_err(|e| format!("{}: {e}", rc.rule))?;
            for _ in 0..INPUTS_PER_PROGRAM {
                let inputs = random_inputs(&before, &nats, &mut rng);
                let a = eval_program(&before, &nats, &inputs);
                let b = eval_program(&after, &nats, &inputs);
                if !a.approx_eq(&b, ULPS) {
                    return Err(format!(
                        "{} changed the result on {inputs:?}: {a} vs {b}",
                        rc.rule
                    ));
                }
                runs += 1;
            }
            contexts += 1;
        }
    }
    Ok(format!("{contexts} rule contexts, {runs} evaluations"))
}

/// Compares the functional evaluator on lowered RISE with the store
/// evaluator (strict mode) on the translated unit.
pub fn translation_soundness(seed: u64) -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut runs = 0;
    let cases = corpus();
    for case in &cases {
        let out = case.compile(Stage::DpiaImp);
        let (lowered, unit) = (out.typed.as_ref().unwrap(), out.unit.as_ref().unwrap());
        let nats = case.nat_env();
        for _ in 0..INPUTS_PER_PROGRAM {
            let inputs = random_inputs(lowered, &nats, &mut rng);
            let want = eval_program(lowered, &nats, &inputs);
            let got = eval_unit(unit, &nats, &inputs, EvalOptions { strict: true })
                .map_err(|e| format!("{}: {e} ({})", case.name, e.code()))?;
            if !want.approx_eq(&got, ULPS) {
                return Err(format!(
                    "{}: functional {want}, imperative {got} on {inputs:?}",
                    case.name
                ));
            }
            runs += 1;
        }
    }
    Ok(format!(
        "{} programs, {runs} evaluations, strict disjointness checked",
        cases.len()
    ))
}

/// Runs the emitted text in the C-subset evaluator under two work-group
/// shapes and compares with the store evaluator.
pub fn codegen_soundness(seed: u64) -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut runs = 0;
    let cases = corpus();
    for case in &cases {
        let out = case.compile(Stage::Code);
        let (lowered, unit) = (out.typed.as_ref().unwrap(), out.unit.as_ref().unwrap());
        let nats = case.nat_env();
        let grids = [
            codegen::default_grid(&out.text),
            Grid {
                groups: 1,
                local: 1,
            },
        ];
        for i in 0..INPUTS_PER_PROGRAM {
            let inputs = random_inputs(lowered, &nats, &mut rng);
            let want = eval_unit(unit, &nats, &inputs, EvalOptions::default())
                .map_err(|e| e.to_string())?;
            let grid = grids[i % 2];
            let got = codegen::run_text(unit, &out.text, &nats, &inputs, grid)
                .map_err(|e| format!("{} ({}): {e}", case.name, case.target))?;
            if !want.approx_eq(&got, ULPS) {
                return Err(format!(
                    "{} ({}): dpia {want}, code {got} on {inputs:?}",
                    case.name, case.target
                ));
            }
            runs += 1;
        }
    }
    Ok(format!("{} programs, {runs} kernel runs", cases.len()))
}
