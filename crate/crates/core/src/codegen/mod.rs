//! C, OpenMP and OpenCL text from imperative DPIA.
//!
//! Index views built from `idx`, `zip`, `split`, `join` and their acceptor
//! counterparts are resolved into flat row-major offsets in Nat normal
//! form. The [`c_parse`] and [`c_eval`] modules read the emitted text back
//! and execute it, which makes the generated code testable without a C
//! toolchain.

pub mod c_ast;
pub mod c_eval;
pub mod c_parse;
mod emit;

use std::fmt;
use std::str::FromStr;

use crate::lowering::Unit;

pub use c_ast::CProgram;
pub use emit::emit_unit;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Target {
    C,
    OpenMP,
    OpenCL,
}

impl Target {
    pub fn extension(self) -> &'static str {
        match self {
            Target::OpenCL => "cl",
            _ => "c",
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Target::C => "c",
            Target::OpenMP => "openmp",
            Target::OpenCL => "opencl",
        })
    }
}

impl FromStr for Target {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "c" => Ok(Target::C),
            "openmp" | "omp" => Ok(Target::OpenMP),
            "opencl" | "cl" => Ok(Target::OpenCL),
            other => Err(format!(
                "unknown target `{other}` (expected c, openmp or opencl)"
            )),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CodegenError {
    Unsupported {
        what: String,
        target: Option<Target>,
    },
    /// The phrase does not have the shape the translation produces.
    Internal(String),
}

impl CodegenError {
    pub fn code(&self) -> &'static str {
        match self {
            CodegenError::Unsupported { .. } => "UnsupportedForTarget",
            CodegenError::Internal(_) => "CodegenInternal",
        }
    }
}

impl fmt::Display for CodegenError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodegenError::Unsupported {
                what,
                target: Some(t),
            } => write!(f, "{what} is not supported for target {t}"),
            CodegenError::Unsupported { what, target: None } => {
                write!(f, "{what} is not supported")
            }
            CodegenError::Internal(m) => write!(f, "internal codegen error: {m}"),
        }
    }
}

impl std::error::Error for CodegenError {}

/// Emits the unit and prints it.
pub fn emit_text(unit: &Unit, target: Target) -> Result<String, CodegenError> {
    Ok(emit_unit(unit, target)?.to_string())
}

/// Work-group shape used when running emitted OpenCL text. Programs with
/// `local` temporaries run with one item per group, since items execute
/// one after another.
pub fn default_grid(text: &str) -> c_eval::Grid {
    if text.contains("local float") || text.contains("local int") {
        c_eval::Grid {
            groups: 4,
            local: 1,
        }
    } else {
        c_eval::Grid {
            groups: 2,
            local: 2,
        }
    }
}

/// Parses and runs emitted text for `unit` and returns its output value.
pub fn run_text(
    unit: &Unit,
    text: &str,
    nats: &crate::interp::NatEnv,
    inputs: &[crate::interp::Value],
    grid: c_eval::Grid,
) -> Result<crate::interp::Value, String> {
    use crate::interp::{coerce, Value};
    use c_eval::{CArg, CVal};

    let prog = c_parse::parse_c(text).map_err(|e| e.to_string())?;
    let kernel = format!("{}Kernel", unit.name);
    let (_, out_dt) = &unit.output;
    let mut args = vec![CArg::Buffer(vec![CVal::Undef; flat_len(out_dt, nats)?])];
    for n in &unit.nat_params {
        args.push(CArg::Int(
            *nats
                .get(n)
                .ok_or_else(|| format!("no value for Nat parameter `{n}`"))?,
        ));
    }
    if inputs.len() != unit.inputs.len() {
        return Err(format!(
            "expected {} inputs, given {}",
            unit.inputs.len(),
            inputs.len()
        ));
    }
    let to_c = |v: &Value| match v {
        Value::F32(f) => Ok(CVal::Float(*f)),
        Value::I32(i) => Ok(CVal::Int(*i as i64)),
        Value::Bool(b) => Ok(CVal::Int(*b as i64)),
        Value::Index(i) => Ok(CVal::Int(*i)),
        other => Err(format!("{other} has no C representation")),
    };
    for ((_, dt), v) in unit.inputs.iter().zip(inputs) {
        let v = coerce(v, dt, nats).map_err(|e| e.to_string())?;
        args.push(match v {
            Value::F32(f) => CArg::Float(f),
            Value::I32(i) => CArg::Int(i as i64),
            Value::Bool(b) => CArg::Int(b as i64),
            Value::Index(i) => CArg::Int(i),
            arr => CArg::Buffer(arr.flatten().iter().map(to_c).collect::<Result<_, _>>()?),
        });
    }
    let out = c_eval::run_kernel(&prog, &kernel, args, grid).map_err(|e| e.to_string())?;
    let flat = out
        .into_iter()
        .next()
        .flatten()
        .ok_or("kernel has no output buffer")?;
    let mut it = flat.into_iter();
    unflatten(out_dt, nats, &mut it)
}

fn flat_len(dt: &crate::types::DataType, nats: &crate::interp::NatEnv) -> Result<usize, String> {
    use crate::types::DataType;
    match dt {
        DataType::Array(n, e) => {
            let n = n
                .eval_map(nats)
                .ok_or_else(|| format!("cannot evaluate size `{n}`"))?;
            Ok(n.max(0) as usize * flat_len(e, nats)?)
        }
        DataType::Tuple(..) => Err("tuple outputs have no flat C layout".into()),
        _ => Ok(1),
    }
}

fn unflatten(
    dt: &crate::types::DataType,
    nats: &crate::interp::NatEnv,
    it: &mut impl Iterator<Item = c_eval::CVal>,
) -> Result<crate::interp::Value, String> {
    use crate::interp::Value;
    use crate::types::{DataType, ScalarType};
    use c_eval::CVal;
    match dt {
        DataType::Array(n, e) => {
            let n = n
                .eval_map(nats)
                .ok_or_else(|| format!("cannot evaluate size `{n}`"))?;
            Ok(Value::Array(
                (0..n)
                    .map(|_| unflatten(e, nats, it))
                    .collect::<Result<_, _>>()?,
            ))
        }
        _ => match (dt, it.next()) {
            (_, None) => Err("output buffer too short".into()),
            (_, Some(CVal::Undef)) => Err("output element was never written".into()),
            (DataType::Scalar(ScalarType::F32), Some(CVal::Float(f))) => Ok(Value::F32(f)),
            (DataType::Scalar(ScalarType::Bool), Some(CVal::Int(i))) => Ok(Value::Bool(i != 0)),
            (DataType::Index(_), Some(CVal::Int(i))) => Ok(Value::Index(i)),
            (_, Some(CVal::Int(i))) => Ok(Value::I32(i as i32)),
            (_, Some(other)) => Err(format!("unexpected output element {other:?}")),
        },
    }
}
