//! Reference semantics for RISE expressions and imperative DPIA units.
//!
//! [`eval_rise`] evaluates a typed expression directly; every map flavour
//! is a plain pointwise map. [`eval_unit`] runs a translated unit against
//! a store and can check that iterations of a parallel loop write disjoint
//! cells.

mod dpia;
mod rise;

use std::collections::BTreeMap;
use std::fmt;
use std::rc::Rc;

use crate::nat::Nat;
use crate::types::{DataType, ScalarType};

pub use self::dpia::{eval_unit, EvalOptions};
pub use self::rise::{apply_program, eval_rise};

/// Concrete values of every Nat variable in scope.
pub type NatEnv = BTreeMap<String, i64>;

#[derive(Clone)]
pub enum Value {
    F32(f32),
    I32(i32),
    Bool(bool),
    Index(i64),
    Array(Vec<Value>),
    Tuple(Box<Value>, Box<Value>),
    /// A function value of the functional evaluator.
    Fun(Rc<rise::FunVal>),
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Value::F32(a), Value::F32(b)) => a.to_bits() == b.to_bits() || a == b,
            (Value::I32(a), Value::I32(b)) => a == b,
            (Value::Bool(a), Value::Bool(b)) => a == b,
            (Value::Index(a), Value::Index(b)) => a == b,
            (Value::Array(a), Value::Array(b)) => a == b,
            (Value::Tuple(a1, a2), Value::Tuple(b1, b2)) => a1 == b1 && a2 == b2,
            _ => false,
        }
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::F32(v) => write!(f, "{v:?}"),
            Value::I32(v) => write!(f, "{v}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Index(i) => write!(f, "{i}"),
            Value::Array(vs) => {
                f.write_str("[")?;
                for (i, v) in vs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str("]")
            }
            Value::Tuple(a, b) => write!(f, "({a}, {b})"),
            Value::Fun(_) => f.write_str("<function>"),
        }
    }
}

impl Value {
    pub fn f32s(vs: &[f32]) -> Value {
        Value::Array(vs.iter().map(|v| Value::F32(*v)).collect())
    }

    pub fn as_array(&self) -> Option<&[Value]> {
        match self {
            Value::Array(vs) => Some(vs),
            _ => None,
        }
    }

    /// Scalars in row-major order.
    pub fn flatten(&self) -> Vec<Value> {
        match self {
            Value::Array(vs) => vs.iter().flat_map(Value::flatten).collect(),
            other => vec![other.clone()],
        }
    }

    /// Largest distance in units in the last place between two values of
    /// the same shape, or `None` when the shapes or scalar kinds differ.
    pub fn ulp_distance(&self, other: &Value) -> Option<u64> {
        match (self, other) {
            (Value::F32(a), Value::F32(b)) => {
                if a == b {
                    return Some(0);
                }
                if a.is_nan() || b.is_nan() {
                    return None;
                }
                Some(ordered_bits(*a).abs_diff(ordered_bits(*b)))
            }
            (Value::Array(a), Value::Array(b)) if a.len() == b.len() => a
                .iter()
                .zip(b)
                .map(|(x, y)| x.ulp_distance(y))
                .try_fold(0, |m, d| d.map(|d| m.max(d))),
            (Value::Tuple(a1, a2), Value::Tuple(b1, b2)) => {
                Some(a1.ulp_distance(b1)?.max(a2.ulp_distance(b2)?))
            }
            (a, b) if a == b => Some(0),
            _ => None,
        }
    }

    /// Exact for integer data, within `ulps` for floats.
    pub fn approx_eq(&self, other: &Value, ulps: u64) -> bool {
        self.ulp_distance(other).is_some_and(|d| d <= ulps)
    }
}

fn ordered_bits(f: f32) -> i64 {
    let b = f.to_bits() as i32;
    (if b < 0 { i32::MIN - b } else { b }) as i64
}

#[derive(Clone, Debug, PartialEq)]
pub enum EvalError {
    OutOfBounds {
        index: i64,
        len: i64,
    },
    Shape(String),
    Uninitialized(String),
    /// Two iterations of one parallel loop wrote the same cell.
    Race(String),
    Unsupported(String),
}

impl EvalError {
    pub fn code(&self) -> &'static str {
        match self {
            EvalError::OutOfBounds { .. } => "OutOfBounds",
            EvalError::Shape(_) => "ShapeMismatch",
            EvalError::Uninitialized(_) => "Uninitialized",
            EvalError::Race(_) => "ParallelWriteConflict",
            EvalError::Unsupported(_) => "Unsupported",
        }
    }
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::OutOfBounds { index, len } => {
                write!(f, "index {index} is out of bounds for length {len}")
            }
            EvalError::Shape(m) => write!(f, "shape mismatch: {m}"),
            EvalError::Uninitialized(m) => write!(f, "read of uninitialized memory: {m}"),
            EvalError::Race(m) => write!(f, "parallel iterations write the same cell: {m}"),
            EvalError::Unsupported(m) => write!(f, "cannot evaluate: {m}"),
        }
    }
}

impl std::error::Error for EvalError {}

pub(crate) fn eval_nat(n: &Nat, env: &NatEnv) -> Result<i64, EvalError> {
    n.eval_map(env)
        .ok_or_else(|| EvalError::Unsupported(format!("Nat `{n}` has unassigned variables")))
}

/// Converts `v` into the shape of `dt`, turning integer literals into
/// floats where the type asks for `f32`.
pub fn coerce(v: &Value, dt: &DataType, env: &NatEnv) -> Result<Value, EvalError> {
    let bad = || EvalError::Shape(format!("value {v} does not have type {dt}"));
    Ok(match (dt, v) {
        (DataType::Scalar(ScalarType::F32), Value::F32(x)) => Value::F32(*x),
        (DataType::Scalar(ScalarType::F32), Value::I32(x)) => Value::F32(*x as f32),
        (DataType::Scalar(ScalarType::I32), Value::I32(x)) => Value::I32(*x),
        (DataType::Scalar(ScalarType::Bool), Value::Bool(b)) => Value::Bool(*b),
        (DataType::Index(_), Value::I32(x)) => Value::Index(*x as i64),
        (DataType::Index(_), Value::Index(x)) => Value::Index(*x),
        (DataType::Array(n, e), Value::Array(vs)) => {
            let n = eval_nat(n, env)?;
            if vs.len() as i64 != n {
                return Err(EvalError::Shape(format!(
                    "expected {n} elements for {dt}, found {}",
                    vs.len()
                )));
            }
            Value::Array(
                vs.iter()
                    .map(|x| coerce(x, e, env))
                    .collect::<Result<_, _>>()?,
            )
        }
        (DataType::Tuple(a, b), Value::Tuple(x, y)) => {
            Value::Tuple(Box::new(coerce(x, a, env)?), Box::new(coerce(y, b, env)?))
        }
        _ => return Err(bad()),
    })
}

/// Parses whitespace- or comma-separated value literals such as
/// `[[1.0, 2.0], [3.0, 4.0]] [1, 1]`.
pub fn parse_values(src: &str) -> Result<Vec<Value>, String> {
    let mut p = ValueParser {
        s: src.as_bytes(),
        i: 0,
    };
    let mut out = Vec::new();
    loop {
        p.skip();
        if p.i >= p.s.len() {
            return Ok(out);
        }
        out.push(p.value()?);
        p.skip();
        if p.peek() == Some(b',') || p.peek() == Some(b';') {
            p.i += 1;
        }
    }
}

struct ValueParser<'a> {
    s: &'a [u8],
    i: usize,
}

impl ValueParser<'_> {
    fn peek(&self) -> Option<u8> {
        self.s.get(self.i).copied()
    }

    fn skip(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_ascii_whitespace() {
                self.i += 1;
            } else if c == b'#' || (c == b'/' && self.s.get(self.i + 1) == Some(&b'/')) {
                while self.peek().is_some_and(|c| c != b'\n') {
                    self.i += 1;
                }
            } else {
                break;
            }
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), String> {
        self.skip();
        if self.peek() == Some(c) {
            self.i += 1;
            Ok(())
        } else {
            Err(format!("expected `{}` at byte {}", c as char, self.i))
        }
    }

    fn value(&mut self) -> Result<Value, String> {
        self.skip();
        match self.peek() {
            Some(b'[') => {
                self.i += 1;
                let mut vs = Vec::new();
                self.skip();
                if self.peek() == Some(b']') {
                    self.i += 1;
                    return Ok(Value::Array(vs));
                }
                loop {
                    vs.push(self.value()?);
                    self.skip();
                    match self.peek() {
                        Some(b',') => self.i += 1,
                        Some(b']') => {
                            self.i += 1;
                            return Ok(Value::Array(vs));
                        }
                        _ => return Err(format!("expected `,` or `]` at byte {}", self.i)),
                    }
                }
            }
            Some(b'(') => {
                self.i += 1;
                let a = self.value()?;
                self.expect(b',')?;
                let b = self.value()?;
                self.expect(b')')?;
                Ok(Value::Tuple(Box::new(a), Box::new(b)))
            }
            Some(_) => {
                let start = self.i;
                while self
                    .peek()
                    .is_some_and(|c| c.is_ascii_alphanumeric() || b"+-._".contains(&c))
                {
                    self.i += 1;
                }
                let word = std::str::from_utf8(&self.s[start..self.i]).expect("ascii");
                match word {
                    "true" => Ok(Value::Bool(true)),
                    "false" => Ok(Value::Bool(false)),
                    w if w.contains(['.', 'e', 'E', 'f']) && !w.ends_with("i32") => w
                        .trim_end_matches('f')
                        .parse::<f32>()
                        .map(Value::F32)
                        .map_err(|_| format!("bad number `{w}`")),
                    w => w
                        .trim_end_matches("i32")
                        .parse::<i32>()
                        .map(Value::I32)
                        .map_err(|_| format!("bad value `{w}`")),
                }
            }
            None => Err("unexpected end of input".into()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_parse_and_print() {
        let vs = parse_values("[[1.0, 2.5], [3.0, -4.0]]\n[1, 2], (true, 3i32)").unwrap();
        assert_eq!(vs.len(), 3);
        assert_eq!(vs[0].to_string(), "[[1.0, 2.5], [3.0, -4.0]]");
        assert_eq!(
            vs[2],
            Value::Tuple(Box::new(Value::Bool(true)), Box::new(Value::I32(3)))
        );
        assert_eq!(parse_values(&vs[0].to_string()).unwrap()[0], vs[0]);
    }

    #[test]
    fn ulp_distance_counts_representable_steps() {
        let a = Value::F32(1.0);
        let b = Value::F32(f32::from_bits(1.0f32.to_bits() + 3));
        assert_eq!(a.ulp_distance(&b), Some(3));
        assert!(a.approx_eq(&b, 4));
        assert_eq!(Value::F32(-0.0).ulp_distance(&Value::F32(0.0)), Some(0));
        assert_eq!(Value::I32(1).ulp_distance(&Value::I32(2)), None);
    }

    #[test]
    fn coercion_follows_the_type() {
        let env = NatEnv::from([("n".to_string(), 2)]);
        let dt = DataType::array(Nat::var("n"), DataType::f32());
        let v = coerce(&parse_values("[1, 2]").unwrap()[0], &dt, &env).unwrap();
        assert_eq!(v, Value::f32s(&[1.0, 2.0]));
        assert!(coerce(&Value::f32s(&[1.0]), &dt, &env).is_err());
    }
}
