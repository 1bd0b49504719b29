use std::collections::HashMap;

use super::{coerce, eval_nat, EvalError, NatEnv, Value};
use crate::dpia::{DArg, Phrase, PhraseKind};
use crate::expr::{Ident, Literal};
use crate::lowering::Unit;
use crate::types::DataType;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EvalOptions {
    /// Reject parallel loops whose iterations write a common cell.
    pub strict: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Sel {
    Idx(i64),
    Fst,
    Snd,
}

#[derive(Clone, Debug)]
enum Slot {
    Leaf(Option<Value>),
    Arr(Vec<Slot>),
    Tup(Box<Slot>, Box<Slot>),
}

#[derive(Clone, Debug)]
enum AccV {
    Base(usize),
    Idx(i64, Box<AccV>),
    Join(i64, Box<AccV>),
    Split(i64, Box<AccV>),
    Zip(Sel, Box<AccV>),
}

#[derive(Clone, Copy, Debug)]
enum Role {
    In,
    Out,
    Swap,
    Done,
}

#[derive(Clone, Debug)]
enum Bind {
    Val(Value),
    Loc(usize),
    Acc(AccV),
    Db(usize, Role),
}

struct DoubleBuffer {
    input: usize,
    b1: usize,
    b2: usize,
    /// `None` while the output acceptor is the write target.
    out: Option<usize>,
    output: AccV,
    flag: bool,
}

struct ParFrame {
    alloc_start: usize,
    iter: i64,
    owner: HashMap<(usize, Vec<Sel>), i64>,
}

struct Machine {
    store: Vec<Slot>,
    env: HashMap<Ident, Bind>,
    nats: NatEnv,
    dbs: Vec<DoubleBuffer>,
    frames: Vec<ParFrame>,
    strict: bool,
}

fn unsupported<T>(m: impl Into<String>) -> Result<T, EvalError> {
    Err(EvalError::Unsupported(m.into()))
}

fn shape(m: impl Into<String>) -> EvalError {
    EvalError::Shape(m.into())
}

fn slot_from(v: &Value) -> Slot {
    match v {
        Value::Array(vs) => Slot::Arr(vs.iter().map(slot_from).collect()),
        Value::Tuple(a, b) => Slot::Tup(Box::new(slot_from(a)), Box::new(slot_from(b))),
        other => Slot::Leaf(Some(other.clone())),
    }
}

fn value_of(s: &Slot, what: &dyn Fn() -> String) -> Result<Value, EvalError> {
    Ok(match s {
        Slot::Leaf(Some(v)) => v.clone(),
        Slot::Leaf(None) => return Err(EvalError::Uninitialized(what())),
        Slot::Arr(xs) => Value::Array(
            xs.iter()
                .map(|x| value_of(x, what))
                .collect::<Result<_, _>>()?,
        ),
        Slot::Tup(a, b) => Value::Tuple(Box::new(value_of(a, what)?), Box::new(value_of(b, what)?)),
    })
}

fn project(v: &Value, path: &[Sel]) -> Result<Value, EvalError> {
    let mut cur = v;
    for s in path {
        cur = match (s, cur) {
            (Sel::Idx(i), Value::Array(xs)) => {
                xs.get(*i as usize)
                    .filter(|_| *i >= 0)
                    .ok_or(EvalError::OutOfBounds {
                        index: *i,
                        len: xs.len() as i64,
                    })?
            }
            (Sel::Fst, Value::Tuple(a, _)) => a,
            (Sel::Snd, Value::Tuple(_, b)) => b,
            _ => return Err(shape(format!("cannot select {s:?} from {cur}"))),
        };
    }
    Ok(cur.clone())
}

fn dt_at(dt: &DataType, path: &[Sel]) -> Result<DataType, EvalError> {
    let mut cur = dt.clone();
    for s in path {
        cur = match (s, cur) {
            (Sel::Idx(_), DataType::Array(_, e)) => *e,
            (Sel::Fst, DataType::Tuple(a, _)) => *a,
            (Sel::Snd, DataType::Tuple(_, b)) => *b,
            (_, other) => return Err(shape(format!("cannot select {s:?} from type {other}"))),
        };
    }
    Ok(cur)
}

fn with(head: Sel, rest: &[Sel]) -> Vec<Sel> {
    let mut v = Vec::with_capacity(rest.len() + 1);
    v.push(head);
    v.extend_from_slice(rest);
    v
}

fn binder(p: &Phrase) -> Result<(Ident, Phrase), EvalError> {
    match &p.whnf().kind {
        PhraseKind::Lambda(x, b) => Ok((x.clone(), (**b).clone())),
        _ => unsupported(format!("expected a binder, found `{p}`")),
    }
}

fn literal(l: &Literal) -> Value {
    match l {
        Literal::F32 { value, .. } => Value::F32(*value),
        Literal::I32(v) => Value::I32(*v),
        Literal::Bool(b) => Value::Bool(*b),
    }
}

impl Machine {
    fn nat(&self, a: &DArg) -> Result<i64, EvalError> {
        match a.as_nat() {
            Some(n) => eval_nat(n, &self.nats),
            None => unsupported(format!("expected a Nat argument, found {a}")),
        }
    }

    fn alloc(&mut self, dt: &DataType) -> Result<usize, EvalError> {
        let s = self.empty_slot(dt)?;
        self.store.push(s);
        Ok(self.store.len() - 1)
    }

    fn empty_slot(&self, dt: &DataType) -> Result<Slot, EvalError> {
        Ok(match dt {
            DataType::Array(n, e) => {
                let n = eval_nat(n, &self.nats)?;
                let elem = self.empty_slot(e)?;
                Slot::Arr(vec![elem; n.max(0) as usize])
            }
            DataType::Tuple(a, b) => {
                Slot::Tup(Box::new(self.empty_slot(a)?), Box::new(self.empty_slot(b)?))
            }
            _ => Slot::Leaf(None),
        })
    }

    fn slot_at(&self, a: usize, path: &[Sel]) -> Result<&Slot, EvalError> {
        let mut cur = &self.store[a];
        for s in path {
            cur = match (s, cur) {
                (Sel::Idx(i), Slot::Arr(xs)) => {
                    xs.get(*i as usize)
                        .filter(|_| *i >= 0)
                        .ok_or(EvalError::OutOfBounds {
                            index: *i,
                            len: xs.len() as i64,
                        })?
                }
                (Sel::Fst, Slot::Tup(x, _)) => x,
                (Sel::Snd, Slot::Tup(_, y)) => y,
                _ => return Err(shape(format!("path {path:?} does not fit allocation {a}"))),
            };
        }
        Ok(cur)
    }

    fn read_store(&self, a: usize, path: &[Sel]) -> Result<Value, EvalError> {
        value_of(self.slot_at(a, path)?, &|| {
            format!("allocation {a} at {path:?}")
        })
    }

    fn write_store(&mut self, a: usize, path: Vec<Sel>, v: Value) -> Result<(), EvalError> {
        if self.strict {
            for f in &mut self.frames {
                if a >= f.alloc_start {
                    continue;
                }
                match f.owner.get(&(a, path.clone())) {
                    Some(prev) if *prev != f.iter => {
                        return Err(EvalError::Race(format!(
                            "iterations {prev} and {} both write allocation {a} at {path:?}",
                            f.iter
                        )))
                    }
                    Some(_) => {}
                    None => {
                        f.owner.insert((a, path.clone()), f.iter);
                    }
                }
            }
        }
        let mut cur = &mut self.store[a];
        for s in &path {
            cur = match (s, cur) {
                (Sel::Idx(i), Slot::Arr(xs)) => {
                    let len = xs.len() as i64;
                    if *i < 0 || *i >= len {
                        return Err(EvalError::OutOfBounds { index: *i, len });
                    }
                    &mut xs[*i as usize]
                }
                (Sel::Fst, Slot::Tup(x, _)) => x,
                (Sel::Snd, Slot::Tup(_, y)) => y,
                _ => {
                    return Err(shape(format!(
                        "write path {path:?} does not fit allocation {a}"
                    )))
                }
            };
        }
        match cur {
            Slot::Leaf(cell) => {
                *cell = Some(v);
                Ok(())
            }
            _ => Err(shape(format!(
                "write of a scalar into an aggregate of allocation {a}"
            ))),
        }
    }

    fn index_value(&mut self, p: &Phrase) -> Result<i64, EvalError> {
        match self.read(p, &[])? {
            Value::Index(i) => Ok(i),
            Value::I32(i) => Ok(i as i64),
            other => Err(shape(format!("{other} used as an index"))),
        }
    }

    /// Materializes the value of `p` at `path` from its element reads.
    fn build(&mut self, p: &Phrase, path: &[Sel]) -> Result<Value, EvalError> {
        let dt =
            p.ty.data()
                .cloned()
                .ok_or_else(|| shape(format!("`{p}` is not an expression")))?;
        match dt_at(&dt, path)? {
            DataType::Array(n, _) => {
                let n = eval_nat(&n, &self.nats)?;
                let mut out = Vec::with_capacity(n.max(0) as usize);
                for k in 0..n {
                    let mut sub = path.to_vec();
                    sub.push(Sel::Idx(k));
                    out.push(self.read(p, &sub)?);
                }
                Ok(Value::Array(out))
            }
            DataType::Tuple(..) => {
                let mut a = path.to_vec();
                a.push(Sel::Fst);
                let mut b = path.to_vec();
                b.push(Sel::Snd);
                Ok(Value::Tuple(
                    Box::new(self.read(p, &a)?),
                    Box::new(self.read(p, &b)?),
                ))
            }
            other => unsupported(format!("reading a {other} from `{p}`")),
        }
    }

    fn read(&mut self, p: &Phrase, path: &[Sel]) -> Result<Value, EvalError> {
        let p = p.whnf();
        let prim = match &p.kind {
            PhraseKind::Ident(x) => {
                return match self.env.get(x).cloned() {
                    Some(Bind::Val(v)) => project(&v, path),
                    Some(Bind::Loc(a)) => self.read_store(a, path),
                    Some(Bind::Db(d, Role::In)) => self.read_store(self.dbs[d].input, path),
                    _ => unsupported(format!("`{x}` is not readable")),
                }
            }
            PhraseKind::Literal(l) if path.is_empty() => return Ok(literal(l)),
            PhraseKind::Prim(prim) => prim.clone(),
            _ => return unsupported(format!("cannot read `{p}`")),
        };
        let (ta, a) = (&prim.targs, &prim.args);
        match prim.tag.as_str() {
            "idx" => {
                let n = self.nat(&ta[0])?;
                let i = self.index_value(&a[0])?;
                if i < 0 || i >= n {
                    return Err(EvalError::OutOfBounds { index: i, len: n });
                }
                self.read(&a[1], &with(Sel::Idx(i), path))
            }
            "zip" => match path {
                [i @ Sel::Idx(_), side @ (Sel::Fst | Sel::Snd), rest @ ..] => self.read(
                    if *side == Sel::Fst { &a[0] } else { &a[1] },
                    &with(*i, rest),
                ),
                _ => self.build(&p, path),
            },
            "fst" => self.read(&a[0], &with(Sel::Fst, path)),
            "snd" => self.read(&a[0], &with(Sel::Snd, path)),
            "split" => match path {
                [Sel::Idx(i), Sel::Idx(j), rest @ ..] => {
                    let n = self.nat(&ta[0])?;
                    self.read(&a[0], &with(Sel::Idx(i * n + j), rest))
                }
                _ => self.build(&p, path),
            },
            "join" => match path {
                [Sel::Idx(k), rest @ ..] => {
                    let m = self.nat(&ta[1])?;
                    let mut sub = vec![Sel::Idx(k / m), Sel::Idx(k % m)];
                    sub.extend_from_slice(rest);
                    self.read(&a[0], &sub)
                }
                _ => self.build(&p, path),
            },
            "prefix" => self.read(&a[0], path),
            "add" | "sub" | "mul" if path.is_empty() => {
                let l = self.read(&a[0], &[])?;
                let r = self.read(&a[1], &[])?;
                scalar_op(&prim.tag, &l, &r)
            }
            other => unsupported(format!("`{other}` in an imperative program")),
        }
    }

    fn acceptor(&mut self, p: &Phrase) -> Result<AccV, EvalError> {
        let p = p.whnf();
        let prim = match &p.kind {
            PhraseKind::Ident(x) => {
                return match self.env.get(x).cloned() {
                    Some(Bind::Loc(a)) => Ok(AccV::Base(a)),
                    Some(Bind::Acc(v)) => Ok(v),
                    Some(Bind::Db(d, Role::Out)) => {
                        let db = &self.dbs[d];
                        Ok(db.out.map_or_else(|| db.output.clone(), AccV::Base))
                    }
                    _ => unsupported(format!("`{x}` is not an acceptor")),
                }
            }
            PhraseKind::Prim(prim) => prim.clone(),
            _ => return unsupported(format!("cannot write through `{p}`")),
        };
        let (ta, a) = (&prim.targs, &prim.args);
        Ok(match prim.tag.as_str() {
            "idxAcc" => {
                let n = self.nat(&ta[0])?;
                let i = self.index_value(&a[0])?;
                if i < 0 || i >= n {
                    return Err(EvalError::OutOfBounds { index: i, len: n });
                }
                AccV::Idx(i, Box::new(self.acceptor(&a[1])?))
            }
            "joinAcc" => AccV::Join(self.nat(&ta[1])?, Box::new(self.acceptor(&a[0])?)),
            "splitAcc" => AccV::Split(self.nat(&ta[0])?, Box::new(self.acceptor(&a[0])?)),
            "zipAcc1" => AccV::Zip(Sel::Fst, Box::new(self.acceptor(&a[0])?)),
            "zipAcc2" => AccV::Zip(Sel::Snd, Box::new(self.acceptor(&a[0])?)),
            "prefixAcc" => self.acceptor(&a[0])?,
            other => return unsupported(format!("acceptor `{other}`")),
        })
    }

    fn write_scalar(&mut self, acc: &AccV, path: Vec<Sel>, v: Value) -> Result<(), EvalError> {
        match acc {
            AccV::Base(a) => self.write_store(*a, path, v),
            AccV::Idx(i, inner) => self.write_scalar(inner, with(Sel::Idx(*i), &path), v),
            AccV::Join(m, inner) => match path.as_slice() {
                [Sel::Idx(i), Sel::Idx(j), rest @ ..] => {
                    self.write_scalar(inner, with(Sel::Idx(i * m + j), rest), v)
                }
                _ => Err(shape("joined acceptor written without two indices")),
            },
            AccV::Split(n, inner) => match path.as_slice() {
                [Sel::Idx(k), rest @ ..] => {
                    let mut sub = vec![Sel::Idx(k / n), Sel::Idx(k % n)];
                    sub.extend_from_slice(rest);
                    self.write_scalar(inner, sub, v)
                }
                _ => Err(shape("split acceptor written without an index")),
            },
            AccV::Zip(side, inner) => match path.as_slice() {
                [i @ Sel::Idx(_), rest @ ..] => {
                    let mut sub = vec![*i, *side];
                    sub.extend_from_slice(rest);
                    self.write_scalar(inner, sub, v)
                }
                _ => Err(shape("zipped acceptor written without an index")),
            },
        }
    }

    fn write_value(&mut self, acc: &AccV, path: Vec<Sel>, v: Value) -> Result<(), EvalError> {
        match v {
            Value::Array(xs) => {
                for (k, x) in xs.into_iter().enumerate() {
                    let mut sub = path.clone();
                    sub.push(Sel::Idx(k as i64));
                    self.write_value(acc, sub, x)?;
                }
                Ok(())
            }
            Value::Tuple(a, b) => {
                let mut pa = path.clone();
                pa.push(Sel::Fst);
                self.write_value(acc, pa, *a)?;
                let mut pb = path;
                pb.push(Sel::Snd);
                self.write_value(acc, pb, *b)
            }
            scalar => self.write_scalar(acc, path, scalar),
        }
    }

    fn exec(&mut self, p: &Phrase) -> Result<(), EvalError> {
        let p = p.whnf();
        let prim = match &p.kind {
            PhraseKind::Ident(x) => {
                return match self.env.get(x).cloned() {
                    Some(Bind::Db(d, Role::Swap)) => {
                        let db = &mut self.dbs[d];
                        db.input = if db.flag { db.b1 } else { db.b2 };
                        db.out = Some(if db.flag { db.b2 } else { db.b1 });
                        db.flag = !db.flag;
                        Ok(())
                    }
                    Some(Bind::Db(d, Role::Done)) => {
                        let db = &mut self.dbs[d];
                        db.input = if db.flag { db.b1 } else { db.b2 };
                        db.out = None;
                        Ok(())
                    }
                    _ => unsupported(format!("`{x}` is not a command")),
                }
            }
            PhraseKind::Prim(prim) => prim.clone(),
            _ => return unsupported(format!("not a command: `{p}`")),
        };
        let (ta, a) = (&prim.targs, &prim.args);
        match prim.tag.as_str() {
            "seq" => {
                self.exec(&a[0])?;
                self.exec(&a[1])
            }
            "assign" => {
                let acc = self.acceptor(&a[0])?;
                let v = self.read(&a[1], &[])?;
                self.write_value(&acc, Vec::new(), v)
            }
            "new" => {
                let dt = ta[1]
                    .as_data()
                    .cloned()
                    .ok_or_else(|| shape("new needs a data type"))?;
                let (acc, rest) = binder(&a[0])?;
                let (exp, body) = binder(&rest)?;
                let loc = self.alloc(&dt)?;
                self.env.insert(acc, Bind::Loc(loc));
                self.env.insert(exp, Bind::Loc(loc));
                self.exec(&body)
            }
            "for" => {
                let n = self.nat(&ta[0])?;
                let (i, body) = binder(&a[0])?;
                for k in 0..n {
                    self.env.insert(i.clone(), Bind::Val(Value::Index(k)));
                    self.nats.insert(i.name.clone(), k);
                    self.exec(&body)?;
                }
                self.nats.remove(&i.name);
                Ok(())
            }
            "parForGlobal" | "parForWorkGroup" | "parForLocal" => {
                let n = self.nat(&ta[0])?;
                let out = self.acceptor(&a[0])?;
                let (i, rest) = binder(&a[1])?;
                let (o, body) = binder(&rest)?;
                self.frames.push(ParFrame {
                    alloc_start: 0,
                    iter: 0,
                    owner: HashMap::new(),
                });
                let result = (|| {
                    for k in 0..n {
                        let frame = self.frames.last_mut().expect("frame");
                        frame.alloc_start = self.store.len();
                        frame.iter = k;
                        self.env.insert(i.clone(), Bind::Val(Value::Index(k)));
                        self.env
                            .insert(o.clone(), Bind::Acc(AccV::Idx(k, Box::new(out.clone()))));
                        self.nats.insert(i.name.clone(), k);
                        self.exec(&body)?;
                    }
                    Ok(())
                })();
                self.frames.pop();
                self.nats.remove(&i.name);
                result
            }
            "if" => {
                let l = self.nat(&ta[0])?;
                let r = self.nat(&ta[1])?;
                self.exec(if l < r { &a[0] } else { &a[1] })
            }
            "newDoubleBuffer" => {
                let t = ta[0]
                    .as_data()
                    .cloned()
                    .ok_or_else(|| shape("newDoubleBuffer needs a data type"))?;
                let cap = ta[1]
                    .as_nat()
                    .cloned()
                    .ok_or_else(|| shape("newDoubleBuffer needs a capacity"))?;
                let k = self.nat(&ta[4])?;
                let input = self.read(&a[0], &[])?;
                self.store.push(slot_from(&input));
                let input = self.store.len() - 1;
                let output = self.acceptor(&a[1])?;
                let buf_ty = DataType::array(cap, t);
                let b1 = self.alloc(&buf_ty)?;
                let b2 = self.alloc(&buf_ty)?;
                let d = self.dbs.len();
                self.dbs.push(DoubleBuffer {
                    input,
                    b1,
                    b2,
                    out: (k > 1).then_some(b1),
                    output,
                    flag: true,
                });
                let (acc, r1) = binder(&a[2])?;
                let (exp, r2) = binder(&r1)?;
                let (swap, r3) = binder(&r2)?;
                let (done, body) = binder(&r3)?;
                self.env.insert(acc, Bind::Db(d, Role::Out));
                self.env.insert(exp, Bind::Db(d, Role::In));
                self.env.insert(swap, Bind::Db(d, Role::Swap));
                self.env.insert(done, Bind::Db(d, Role::Done));
                self.exec(&body)
            }
            other => unsupported(format!("command `{other}`")),
        }
    }
}

fn scalar_op(tag: &str, l: &Value, r: &Value) -> Result<Value, EvalError> {
    Ok(match (l, r) {
        (Value::F32(x), Value::F32(y)) => Value::F32(match tag {
            "add" => x + y,
            "sub" => x - y,
            _ => x * y,
        }),
        (Value::I32(x), Value::I32(y)) => Value::I32(match tag {
            "add" => x.wrapping_add(*y),
            "sub" => x.wrapping_sub(*y),
            _ => x.wrapping_mul(*y),
        }),
        _ => return Err(shape(format!("`{tag}` on {l} and {r}"))),
    })
}

/// Runs a translated unit and returns the contents of its output.
pub fn eval_unit(
    unit: &Unit,
    nats: &NatEnv,
    inputs: &[Value],
    opts: EvalOptions,
) -> Result<Value, EvalError> {
    if inputs.len() != unit.inputs.len() {
        return Err(shape(format!(
            "unit `{}` takes {} inputs, given {}",
            unit.name,
            unit.inputs.len(),
            inputs.len()
        )));
    }
    for n in &unit.nat_params {
        if !nats.contains_key(n) {
            return unsupported(format!("no value for Nat parameter `{n}`"));
        }
    }
    let mut m = Machine {
        store: Vec::new(),
        env: HashMap::new(),
        nats: nats.clone(),
        dbs: Vec::new(),
        frames: Vec::new(),
        strict: opts.strict,
    };
    for ((x, dt), v) in unit.inputs.iter().zip(inputs) {
        let v = coerce(v, dt, nats)?;
        m.env.insert(x.clone(), Bind::Val(v));
    }
    let out = m.alloc(&unit.output.1)?;
    m.env.insert(unit.output.0.clone(), Bind::Loc(out));
    m.exec(&unit.body)?;
    value_of(&m.store[out], &|| {
        format!("output `{}` is not fully written", unit.output.0)
    })
}
