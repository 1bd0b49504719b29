//! Executes programs in the emitted C subset.
//!
//! A kernel runs once per work item of a one-dimensional grid of
//! `groups × local` items. Items run one after another, so barriers and
//! memory visibility between items play no role.

use std::collections::HashMap;
use std::fmt;

use super::c_ast::{AssignOp, BinOp, CDecl, CExpr, CFunction, CProgram, CStmt, CType};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CVal {
    Int(i64),
    Float(f32),
    /// Buffer id and element offset.
    Ptr(usize, i64),
    Undef,
}

impl CVal {
    pub fn as_f32(self) -> Option<f32> {
        match self {
            CVal::Float(f) => Some(f),
            CVal::Int(i) => Some(i as f32),
            _ => None,
        }
    }

    pub fn as_i64(self) -> Option<i64> {
        match self {
            CVal::Int(i) => Some(i),
            _ => None,
        }
    }
}

/// A kernel argument: a scalar or the initial contents of a buffer.
#[derive(Clone, Debug, PartialEq)]
pub enum CArg {
    Int(i64),
    Float(f32),
    Buffer(Vec<CVal>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Grid {
    pub groups: usize,
    pub local: usize,
}

impl Default for Grid {
    fn default() -> Self {
        Grid {
            groups: 1,
            local: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalError(pub String);

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C evaluation failed: {}", self.0)
    }
}

impl std::error::Error for EvalError {}

type R<T> = Result<T, EvalError>;

fn fail<T>(m: impl Into<String>) -> R<T> {
    Err(EvalError(m.into()))
}

/// At most this many statements run before evaluation is abandoned.
const STEP_LIMIT: u64 = 50_000_000;

struct Machine<'p> {
    prog: &'p CProgram,
    buffers: Vec<(CType, Vec<CVal>)>,
    item: [i64; 4],
    steps: u64,
}

struct Frame {
    scopes: Vec<HashMap<String, (CVal, Option<CType>)>>,
}

impl Frame {
    fn get(&self, x: &str) -> R<CVal> {
        for s in self.scopes.iter().rev() {
            if let Some((v, _)) = s.get(x) {
                return Ok(*v);
            }
        }
        fail(format!("unknown variable `{x}`"))
    }

    fn set(&mut self, x: &str, v: CVal) -> R<()> {
        for s in self.scopes.iter_mut().rev() {
            if let Some((slot, ty)) = s.get_mut(x) {
                *slot = convert(v, *ty);
                return Ok(());
            }
        }
        fail(format!("assignment to unknown variable `{x}`"))
    }

    fn declare(&mut self, x: &str, v: CVal, ty: Option<CType>) {
        self.scopes
            .last_mut()
            .expect("scope")
            .insert(x.to_string(), (convert(v, ty), ty));
    }
}

fn convert(v: CVal, ty: Option<CType>) -> CVal {
    match (ty, v) {
        (Some(CType::Float), CVal::Int(i)) => CVal::Float(i as f32),
        (Some(CType::Int), CVal::Float(f)) => CVal::Int(f as i64),
        (Some(CType::UChar), CVal::Int(i)) => CVal::Int(i & 0xff),
        _ => v,
    }
}

fn arith(op: BinOp, a: CVal, b: CVal) -> R<CVal> {
    use CVal::*;
    Ok(match (a, b) {
        (Int(x), Int(y)) => match op {
            BinOp::Add => Int(x + y),
            BinOp::Sub => Int(x - y),
            BinOp::Mul => Int(x * y),
            BinOp::Div if y == 0 => return fail("integer division by zero"),
            BinOp::Div => Int(x / y),
            BinOp::Mod if y == 0 => return fail("integer modulo by zero"),
            BinOp::Mod => Int(x % y),
            BinOp::Lt => Int((x < y) as i64),
            BinOp::Xor => Int(x ^ y),
        },
        (Ptr(b, o), Int(y)) if matches!(op, BinOp::Add) => Ptr(b, o + y),
        (Undef, _) | (_, Undef) => return fail("use of an uninitialized value"),
        (x, y) => {
            let (Some(x), Some(y)) = (x.as_f32(), y.as_f32()) else {
                return fail(format!("invalid operands for `{}`", op.symbol()));
            };
            match op {
                BinOp::Add => Float(x + y),
                BinOp::Sub => Float(x - y),
                BinOp::Mul => Float(x * y),
                BinOp::Div => Float(x / y),
                BinOp::Lt => Int((x < y) as i64),
                _ => return fail(format!("`{}` on floats", op.symbol())),
            }
        }
    })
}

enum Flow {
    Next,
    Return(CVal),
}

impl Machine<'_> {
    fn tick(&mut self) -> R<()> {
        self.steps += 1;
        if self.steps > STEP_LIMIT {
            return fail("step limit exceeded");
        }
        Ok(())
    }

    fn cell(&mut self, fr: &mut Frame, lv: &CExpr) -> R<(usize, usize)> {
        let (base, off) = match lv {
            CExpr::Index(b, i) => (self.expr(fr, b)?, self.expr(fr, i)?),
            CExpr::Deref(b) => (self.expr(fr, b)?, CVal::Int(0)),
            other => return fail(format!("`{other}` is not a memory location")),
        };
        let (CVal::Ptr(buf, start), CVal::Int(i)) = (base, off) else {
            return fail(format!("bad memory access `{lv}`"));
        };
        let at = start + i;
        let len = self.buffers[buf].1.len();
        if at < 0 || at as usize >= len {
            return fail(format!("out-of-bounds access `{lv}`: offset {at} of {len}"));
        }
        Ok((buf, at as usize))
    }

    fn expr(&mut self, fr: &mut Frame, e: &CExpr) -> R<CVal> {
        match e {
            CExpr::Int(v) => Ok(CVal::Int(*v)),
            CExpr::Float(t) => t
                .trim_end_matches('f')
                .parse::<f32>()
                .map(CVal::Float)
                .or_else(|_| fail(format!("bad float literal `{t}`"))),
            CExpr::Var(x) => fr.get(x),
            CExpr::Index(..) | CExpr::Deref(_) => {
                let (b, i) = self.cell(fr, e)?;
                match self.buffers[b].1[i] {
                    CVal::Undef => fail(format!("read of uninitialized memory `{e}`")),
                    v => Ok(v),
                }
            }
            CExpr::Bin(op, l, r) => {
                let l = self.expr(fr, l)?;
                let r = self.expr(fr, r)?;
                arith(*op, l, r)
            }
            CExpr::Cond(c, a, b) => match self.expr(fr, c)? {
                CVal::Int(0) => self.expr(fr, b),
                CVal::Int(_) => self.expr(fr, a),
                _ => fail("non-integer condition"),
            },
            CExpr::Call(f, args) => {
                let vals = args
                    .iter()
                    .map(|a| self.expr(fr, a))
                    .collect::<R<Vec<_>>>()?;
                self.call(f, vals)
            }
        }
    }

    fn call(&mut self, f: &str, args: Vec<CVal>) -> R<CVal> {
        let builtin = match f {
            "get_group_id" => Some(0),
            "get_num_groups" => Some(1),
            "get_local_id" => Some(2),
            "get_local_size" => Some(3),
            _ => None,
        };
        if let Some(k) = builtin {
            return Ok(CVal::Int(self.item[k]));
        }
        match f {
            "get_global_id" => return Ok(CVal::Int(self.item[0] * self.item[3] + self.item[2])),
            "get_global_size" => return Ok(CVal::Int(self.item[1] * self.item[3])),
            _ => {}
        }
        let prog = self.prog;
        let Some(func) = prog.functions.iter().find(|g| g.name == f) else {
            return fail(format!("call of unknown function `{f}`"));
        };
        let mut fr = Frame {
            scopes: vec![HashMap::new()],
        };
        let params: Vec<&CDecl> = func.params.iter().flatten().collect();
        if params.len() != args.len() {
            return fail(format!("`{f}` expects {} arguments", params.len()));
        }
        for (p, v) in params.into_iter().zip(args) {
            fr.declare(&p.name, v, (!p.pointer).then_some(p.ty));
        }
        match self.block(&mut fr, &func.body)? {
            Flow::Return(v) => Ok(v),
            Flow::Next => Ok(CVal::Undef),
        }
    }

    fn block(&mut self, fr: &mut Frame, stmts: &[CStmt]) -> R<Flow> {
        fr.scopes.push(HashMap::new());
        let mut flow = Flow::Next;
        for s in stmts {
            match self.stmt(fr, s) {
                Ok(Flow::Next) => {}
                Ok(ret) => {
                    flow = ret;
                    break;
                }
                Err(e) => {
                    fr.scopes.pop();
                    return Err(e);
                }
            }
        }
        fr.scopes.pop();
        Ok(flow)
    }

    fn stmt(&mut self, fr: &mut Frame, s: &CStmt) -> R<Flow> {
        self.tick()?;
        match s {
            CStmt::Decl(d, init) => {
                if let Some(len) = &d.len {
                    let CVal::Int(n) = self.expr(fr, len)? else {
                        return fail("non-integer array length");
                    };
                    if n < 0 {
                        return fail(format!("negative array length for `{}`", d.name));
                    }
                    self.buffers.push((d.ty, vec![CVal::Undef; n as usize]));
                    fr.declare(&d.name, CVal::Ptr(self.buffers.len() - 1, 0), None);
                } else {
                    let v = match init {
                        Some(e) => self.expr(fr, e)?,
                        None => CVal::Undef,
                    };
                    fr.declare(&d.name, v, (!d.pointer).then_some(d.ty));
                }
            }
            CStmt::Assign(lhs, op, rhs) => {
                let r = self.expr(fr, rhs)?;
                let new = |old: CVal| -> R<CVal> {
                    match op {
                        AssignOp::Set => Ok(r),
                        AssignOp::Add => arith(BinOp::Add, old, r),
                        AssignOp::Mul => arith(BinOp::Mul, old, r),
                    }
                };
                if let CExpr::Var(x) = lhs {
                    let v = new(fr.get(x)?)?;
                    fr.set(x, v)?;
                } else {
                    let (b, i) = self.cell(fr, lhs)?;
                    let v = new(self.buffers[b].1[i])?;
                    let ty = self.buffers[b].0;
                    self.buffers[b].1[i] = convert(v, Some(ty));
                }
            }
            CStmt::For {
                var,
                init,
                bound,
                step,
                body,
            } => {
                let start = self.expr(fr, init)?;
                fr.scopes.push(HashMap::new());
                fr.declare(var, start, Some(CType::Int));
                let out = (|| loop {
                    let i = fr.get(var)?;
                    let b = self.expr(fr, bound)?;
                    if arith(BinOp::Lt, i, b)? == CVal::Int(0) {
                        return Ok(Flow::Next);
                    }
                    if let Flow::Return(v) = self.block(fr, body)? {
                        return Ok(Flow::Return(v));
                    }
                    self.tick()?;
                    let st = self.expr(fr, step)?;
                    let i = fr.get(var)?;
                    fr.set(var, arith(BinOp::Add, i, st)?)?;
                })();
                fr.scopes.pop();
                return out;
            }
            CStmt::If(c, t, e) => {
                return match self.expr(fr, c)? {
                    CVal::Int(0) => self.block(fr, e),
                    CVal::Int(_) => self.block(fr, t),
                    _ => fail("non-integer condition"),
                };
            }
            CStmt::Pragma(_) => {}
            CStmt::Return(e) => return Ok(Flow::Return(self.expr(fr, e)?)),
        }
        Ok(Flow::Next)
    }
}

/// Runs `kernel` on every work item of `grid`. Returns the final contents
/// of each buffer argument, in argument order, and `None` for scalars.
pub fn run_kernel(
    prog: &CProgram,
    kernel: &str,
    args: Vec<CArg>,
    grid: Grid,
) -> R<Vec<Option<Vec<CVal>>>> {
    let Some(func) = prog.functions.iter().find(|f| f.name == kernel) else {
        return fail(format!("no function `{kernel}`"));
    };
    let params: Vec<&CDecl> = func.params.iter().flatten().collect();
    if params.len() != args.len() {
        return fail(format!(
            "`{kernel}` expects {} arguments, given {}",
            params.len(),
            args.len()
        ));
    }
    let mut m = Machine {
        prog,
        buffers: Vec::new(),
        item: [0, grid.groups as i64, 0, grid.local as i64],
        steps: 0,
    };
    let mut vals = Vec::new();
    let mut slots = Vec::new();
    for (p, a) in params.iter().zip(args) {
        match a {
            CArg::Int(i) => {
                vals.push(CVal::Int(i));
                slots.push(None);
            }
            CArg::Float(f) => {
                vals.push(CVal::Float(f));
                slots.push(None);
            }
            CArg::Buffer(b) => {
                if !p.pointer {
                    return fail(format!("parameter `{}` is not a pointer", p.name));
                }
                m.buffers.push((p.ty, b));
                vals.push(CVal::Ptr(m.buffers.len() - 1, 0));
                slots.push(Some(m.buffers.len() - 1));
            }
        }
    }
    for g in 0..grid.groups {
        for l in 0..grid.local {
            m.item[0] = g as i64;
            m.item[2] = l as i64;
            m.buffers.truncate(slots.iter().flatten().count());
            m.call(kernel, vals.clone())?;
        }
    }
    Ok(slots
        .into_iter()
        .map(|s| s.map(|b| std::mem::take(&mut m.buffers[b].1)))
        .collect())
}

/// The kernel among the program's functions.
pub fn kernel_of(prog: &CProgram) -> Option<&CFunction> {
    prog.functions
        .iter()
        .rev()
        .find(|f| f.name.ends_with("Kernel"))
        .or(prog.functions.last())
}
