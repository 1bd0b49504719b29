use std::rc::Rc;

use super::{coerce, eval_nat, EvalError, NatEnv, Value};
use crate::expr::{Expr, ExprKind, Ident, Literal};
use crate::nat::Nat;
use crate::types::{DataType, Kind, Type, TypeArg};

type Env = Option<Rc<EnvNode>>;

pub struct EnvNode {
    id: Ident,
    val: Value,
    next: Env,
}

fn lookup(env: &Env, x: &Ident) -> Option<Value> {
    let mut cur = env;
    while let Some(node) = cur {
        if node.id == *x {
            return Some(node.val.clone());
        }
        cur = &node.next;
    }
    None
}

fn bind(env: &Env, id: Ident, val: Value) -> Env {
    Some(Rc::new(EnvNode {
        id,
        val,
        next: env.clone(),
    }))
}

pub enum FunVal {
    Closure {
        param: Ident,
        param_ty: Option<DataType>,
        body: Expr,
        env: Env,
        nats: NatEnv,
    },
    DepClosure {
        kind: Kind,
        param: String,
        body: Expr,
        env: Env,
        nats: NatEnv,
    },
    Prim {
        name: String,
        ty: Option<Type>,
        targs: Vec<Option<i64>>,
        args: Vec<Value>,
        nats: NatEnv,
    },
}

/// Explicit type arguments and value arguments of each primitive.
fn arity(name: &str) -> Option<(usize, usize)> {
    Some(match name {
        "map" | "mapSeq" | "mapGlobal" | "mapWorkGroup" | "mapLocal" | "zip" | "add" | "sub"
        | "mul" => (0, 2),
        "reduce" | "reduceSeq" => (0, 3),
        "reduceSeqAt" => (1, 3),
        "fst" | "snd" | "join" => (0, 1),
        "split" | "toMem" => (1, 1),
        "iterate" => (1, 2),
        _ => return None,
    })
}

fn shape(m: impl Into<String>) -> EvalError {
    EvalError::Shape(m.into())
}

fn array(v: Value, what: &str) -> Result<Vec<Value>, EvalError> {
    match v {
        Value::Array(vs) => Ok(vs),
        other => Err(shape(format!("{what} expects an array, found {other}"))),
    }
}

fn arith(name: &str, a: &Value, b: &Value) -> Result<Value, EvalError> {
    Ok(match (a, b) {
        (Value::F32(x), Value::F32(y)) => Value::F32(match name {
            "add" => x + y,
            "sub" => x - y,
            _ => x * y,
        }),
        (Value::I32(x), Value::I32(y)) => Value::I32(match name {
            "add" => x.wrapping_add(*y),
            "sub" => x.wrapping_sub(*y),
            _ => x.wrapping_mul(*y),
        }),
        (Value::Index(x), Value::Index(y)) => Value::Index(match name {
            "add" => x + y,
            "sub" => x - y,
            _ => x * y,
        }),
        _ => return Err(shape(format!("`{name}` on {a} and {b}"))),
    })
}

fn literal(l: &Literal) -> Value {
    match l {
        Literal::F32 { value, .. } => Value::F32(*value),
        Literal::I32(v) => Value::I32(*v),
        Literal::Bool(b) => Value::Bool(*b),
    }
}

fn eval(e: &Expr, env: &Env, nats: &NatEnv) -> Result<Value, EvalError> {
    match &e.kind {
        ExprKind::Identifier(x) => {
            lookup(env, x).ok_or_else(|| EvalError::Unsupported(format!("free identifier `{x}`")))
        }
        ExprKind::Literal(l) => Ok(literal(l)),
        ExprKind::Lambda { param, body, .. } => {
            let param_ty = match &e.ty {
                Some(Type::Fun(a, _)) => a.data().cloned(),
                _ => None,
            };
            Ok(Value::Fun(Rc::new(FunVal::Closure {
                param: param.clone(),
                param_ty,
                body: (**body).clone(),
                env: env.clone(),
                nats: nats.clone(),
            })))
        }
        ExprKind::Apply(f, a) => {
            let f = eval(f, env, nats)?;
            let a = eval(a, env, nats)?;
            apply(&f, a)
        }
        ExprKind::DepLambda { kind, param, body } => Ok(Value::Fun(Rc::new(FunVal::DepClosure {
            kind: *kind,
            param: param.clone(),
            body: (**body).clone(),
            env: env.clone(),
            nats: nats.clone(),
        }))),
        ExprKind::DepApply(f, t) => {
            let f = eval(f, env, nats)?;
            let arg = match t {
                TypeArg::Nat(n) => Some(eval_nat(n, nats)?),
                _ => None,
            };
            dep_apply(&f, arg, e.ty.clone())
        }
        ExprKind::Primitive(name) => {
            if arity(name).is_none() {
                return Err(EvalError::Unsupported(format!("primitive `{name}`")));
            }
            Ok(Value::Fun(Rc::new(FunVal::Prim {
                name: name.clone(),
                ty: e.ty.clone(),
                targs: Vec::new(),
                args: Vec::new(),
                nats: nats.clone(),
            })))
        }
    }
}

fn dep_apply(f: &Value, arg: Option<i64>, node_ty: Option<Type>) -> Result<Value, EvalError> {
    let Value::Fun(fv) = f else {
        return Err(shape(format!("dependent application of {f}")));
    };
    match &**fv {
        FunVal::DepClosure {
            kind,
            param,
            body,
            env,
            nats,
        } => {
            let mut nats = nats.clone();
            if *kind == Kind::Nat {
                let v = arg.ok_or_else(|| shape(format!("`{param}` expects a Nat")))?;
                nats.insert(param.clone(), v);
            }
            eval(body, env, &nats)
        }
        FunVal::Prim {
            name,
            targs,
            args,
            nats,
            ..
        } if args.is_empty() => {
            let mut targs = targs.clone();
            targs.push(arg);
            Ok(Value::Fun(Rc::new(FunVal::Prim {
                name: name.clone(),
                ty: node_ty,
                targs,
                args: Vec::new(),
                nats: nats.clone(),
            })))
        }
        _ => Err(shape("type argument given to a value function")),
    }
}

/// Applies a function value to one argument.
pub fn apply(f: &Value, a: Value) -> Result<Value, EvalError> {
    let Value::Fun(fv) = f else {
        return Err(shape(format!("application of non-function {f}")));
    };
    match &**fv {
        FunVal::Closure {
            param,
            body,
            env,
            nats,
            ..
        } => eval(body, &bind(env, param.clone(), a), nats),
        FunVal::DepClosure { param, .. } => {
            Err(shape(format!("`{param}` expects a type argument first")))
        }
        FunVal::Prim {
            name,
            ty,
            targs,
            args,
            nats,
        } => {
            let (_, n) = arity(name).expect("checked at creation");
            let mut args = args.clone();
            args.push(a);
            if args.len() < n {
                return Ok(Value::Fun(Rc::new(FunVal::Prim {
                    name: name.clone(),
                    ty: ty.clone(),
                    targs: targs.clone(),
                    args,
                    nats: nats.clone(),
                })));
            }
            run_prim(name, ty.as_ref(), targs, args, nats)
        }
    }
}

fn iterate_factor(ty: Option<&Type>, nats: &NatEnv) -> Result<i64, EvalError> {
    let missing = || EvalError::Unsupported("iterate without type information".into());
    let Some(Type::Fun(body, _)) = ty else {
        return Err(missing());
    };
    let Type::DepFun { param, body, .. } = &**body else {
        return Err(missing());
    };
    let Type::Fun(input, _) = &**body else {
        return Err(missing());
    };
    let Some(DataType::Array(len, _)) = input.data() else {
        return Err(missing());
    };
    eval_nat(&len.substitute(param, &Nat::Const(1)), nats)
}

fn run_prim(
    name: &str,
    ty: Option<&Type>,
    targs: &[Option<i64>],
    mut args: Vec<Value>,
    nats: &NatEnv,
) -> Result<Value, EvalError> {
    let mut it = args.drain(..);
    let mut next = || it.next().expect("arity checked");
    match name {
        "map" | "mapSeq" | "mapGlobal" | "mapWorkGroup" | "mapLocal" => {
            let f = next();
            let xs = array(next(), name)?;
            Ok(Value::Array(
                xs.into_iter()
                    .map(|x| apply(&f, x))
                    .collect::<Result<_, _>>()?,
            ))
        }
        "reduce" | "reduceSeq" | "reduceSeqAt" => {
            let f = next();
            let init = next();
            let xs = array(next(), name)?;
            xs.into_iter()
                .try_fold(init, |acc, x| apply(&apply(&f, acc)?, x))
        }
        "zip" => {
            let a = array(next(), "zip")?;
            let b = array(next(), "zip")?;
            if a.len() != b.len() {
                return Err(shape(format!("zip of lengths {} and {}", a.len(), b.len())));
            }
            Ok(Value::Array(
                a.into_iter()
                    .zip(b)
                    .map(|(x, y)| Value::Tuple(Box::new(x), Box::new(y)))
                    .collect(),
            ))
        }
        "fst" | "snd" => match next() {
            Value::Tuple(a, b) => Ok(if name == "fst" { *a } else { *b }),
            other => Err(shape(format!("`{name}` of {other}"))),
        },
        "split" => {
            let n = targs
                .first()
                .copied()
                .flatten()
                .ok_or_else(|| shape("split needs a chunk size"))?;
            let xs = array(next(), "split")?;
            if n <= 0 || xs.len() as i64 % n != 0 {
                return Err(shape(format!("split({n}) of length {}", xs.len())));
            }
            Ok(Value::Array(
                xs.chunks(n as usize)
                    .map(|c| Value::Array(c.to_vec()))
                    .collect(),
            ))
        }
        "join" => {
            let xs = array(next(), "join")?;
            let mut out = Vec::new();
            for x in xs {
                out.extend(array(x, "join")?);
            }
            Ok(Value::Array(out))
        }
        "toMem" => Ok(next()),
        "add" | "sub" | "mul" => {
            let a = next();
            let b = next();
            arith(name, &a, &b)
        }
        "iterate" => {
            let k = targs
                .first()
                .copied()
                .flatten()
                .ok_or_else(|| shape("iterate needs a count"))?;
            let n = iterate_factor(ty, nats)?;
            let f = next();
            let mut xs = next();
            for _ in 0..k {
                let len = xs
                    .as_array()
                    .map(|a| a.len() as i64)
                    .ok_or_else(|| shape("iterate of a non-array"))?;
                if n <= 0 || len % n != 0 {
                    return Err(shape(format!(
                        "iterate step over length {len} with factor {n}"
                    )));
                }
                xs = apply(&dep_apply(&f, Some(len / n), None)?, xs)?;
            }
            Ok(xs)
        }
        other => Err(EvalError::Unsupported(format!("primitive `{other}`"))),
    }
}

/// Evaluates a closed expression.
pub fn eval_rise(e: &Expr, nats: &NatEnv) -> Result<Value, EvalError> {
    eval(e, &None, nats)
}

/// Instantiates the Nat parameters of a program value from `nats` by name
/// and applies it to `inputs`.
pub fn apply_program(program: &Value, nats: &NatEnv, inputs: &[Value]) -> Result<Value, EvalError> {
    let mut v = program.clone();
    while let Value::Fun(fv) = &v {
        let FunVal::DepClosure { kind, param, .. } = &**fv else {
            break;
        };
        let arg = match kind {
            Kind::Nat => Some(*nats.get(param).ok_or_else(|| {
                EvalError::Unsupported(format!("no value for Nat parameter `{param}`"))
            })?),
            _ => None,
        };
        v = dep_apply(&v, arg, None)?;
    }
    for x in inputs {
        let x = match &v {
            Value::Fun(fv) => match &**fv {
                FunVal::Closure {
                    param_ty: Some(dt),
                    nats: scope,
                    ..
                } => coerce(x, dt, scope)?,
                _ => x.clone(),
            },
            _ => x.clone(),
        };
        v = apply(&v, x)?;
    }
    Ok(v)
}
