//! Builds emitted C and OpenMP kernels with the system compiler, runs
//! them and compares with the store evaluator. Enabled by the
//! `native-cc` feature.
#![cfg(feature = "native-cc")]

mod common;

use std::fmt::Write as _;
use std::process::Command;

use common::{corpus, random_inputs};
use rand::rngs::StdRng;
use rand::SeedableRng;
use rise_core::codegen::Target;
use rise_core::driver::Stage;
use rise_core::interp::{eval_unit, EvalOptions, Value};
use rise_core::{DataType, ScalarType};

fn c_type(dt: &DataType) -> &'static str {
    match dt.base_elem() {
        DataType::Scalar(ScalarType::F32) => "float",
        _ => "int",
    }
}

fn c_literal(v: &Value) -> String {
    match v {
        Value::F32(f) => format!("{f:?}f"),
        Value::I32(i) => i.to_string(),
        Value::Bool(b) => (*b as i32).to_string(),
        Value::Index(i) => i.to_string(),
        other => panic!("{other} is not a scalar"),
    }
}

#[test]
fn compiled_kernels_agree_with_the_store_evaluator() {
    let mut rng = StdRng::seed_from_u64(21);
    let dir = std::env::temp_dir().join(format!("rise-native-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let mut built = 0;
    for case in corpus().into_iter().filter(|c| c.target != Target::OpenCL) {
        let out = case.compile(Stage::Code);
        let unit = out.unit.as_ref().unwrap();
        let nats = case.nat_env();
        for round in 0..3 {
            let inputs = random_inputs(out.typed.as_ref().unwrap(), &nats, &mut rng);
            let want = eval_unit(unit, &nats, &inputs, EvalOptions::default()).unwrap();
            let out_len = want.flatten().len();
            let mut src = format!("#include <stdio.h>\n\n{}\nint main(void) {{\n", out.text);
            writeln!(
                src,
                "  static {} output[{out_len}];",
                c_type(&unit.output.1)
            )
            .unwrap();
            let mut args = vec!["output".to_string()];
            args.extend(unit.nat_params.iter().map(|n| nats[n].to_string()));
            for (i, ((_, dt), v)) in unit.inputs.iter().zip(&inputs).enumerate() {
                if dt.is_scalar() {
                    args.push(c_literal(v));
                } else {
                    let elems: Vec<String> = v.flatten().iter().map(c_literal).collect();
                    writeln!(
                        src,
                        "  static const {} in{i}[] = {{{}}};",
                        c_type(dt),
                        elems.join(", ")
                    )
                    .unwrap();
                    args.push(format!("in{i}"));
                }
            }
            writeln!(src, "  {}Kernel({});", unit.name, args.join(", ")).unwrap();
            let fmt = if c_type(&unit.output.1) == "float" {
                "%.9g"
            } else {
                "%d"
            };
            writeln!(
                src,
                "  for (int i = 0; i < {out_len}; i += 1) printf(\"{fmt}\\n\", output[i]);"
            )
            .unwrap();
            src.push_str("  return 0;\n}\n");
            let c_file = dir.join(format!("{}_{round}.c", case.name));
            let exe = dir.join(format!("{}_{round}", case.name));
            std::fs::write(&c_file, &src).unwrap();
            let cc = Command::new("cc")
                .args(["-std=c99", "-O1", "-fopenmp", "-o"])
                .arg(&exe)
                .arg(&c_file)
                .output()
                .unwrap();
            assert!(
                cc.status.success(),
                "{}: {}\n{src}",
                case.name,
                String::from_utf8_lossy(&cc.stderr)
            );
            let run = Command::new(&exe)
                .env("OMP_NUM_THREADS", "3")
                .output()
                .unwrap();
            assert!(run.status.success(), "{} crashed", case.name);
            let got: Vec<f64> = String::from_utf8_lossy(&run.stdout)
                .lines()
                .map(|l| l.parse().unwrap())
                .collect();
            let expected: Vec<f64> = want
                .flatten()
                .iter()
                .map(|v| match v {
                    Value::F32(f) => *f as f64,
                    Value::I32(i) => *i as f64,
                    other => panic!("unexpected {other}"),
                })
                .collect();
            assert_eq!(got, expected, "{}", case.name);
            built += 1;
        }
    }
    std::fs::remove_dir_all(&dir).ok();
    assert!(built >= 20, "only {built} native runs");
}
