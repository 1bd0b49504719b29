use std::collections::HashMap;

use super::c_ast::{AssignOp, BinOp, CDecl, CExpr, CFunction, CProgram, CStmt, CType};
use super::{CodegenError, Target};
use crate::dpia::{DArg, Phrase, PhraseKind};
use crate::expr::{Ident, Literal};
use crate::lowering::{phrase_names, NameSupply, Unit};
use crate::nat::{Assumptions, Nat};
use crate::types::{AddressSpace, DataType, ScalarType};

const RESERVED: &[&str] = &[
    "int",
    "float",
    "char",
    "unsigned",
    "const",
    "global",
    "local",
    "restrict",
    "for",
    "if",
    "else",
    "return",
    "void",
    "static",
    "ipow",
    "get_group_id",
    "get_local_id",
    "get_global_id",
    "get_num_groups",
    "get_local_size",
    "get_global_size",
];

#[derive(Clone, Debug)]
enum Sel {
    Idx(Nat),
    Fst,
    Snd,
}

#[derive(Clone, Debug)]
enum Binding {
    /// Memory named `cname` holding a value of type `dt`.
    Store {
        cname: String,
        dt: DataType,
        scalar_ptr: bool,
    },
    Comm(Vec<CStmt>),
}

struct Emitter<'a> {
    target: Target,
    asm: &'a Assumptions,
    names: NameSupply,
    env: HashMap<Ident, Binding>,
    par_depth: usize,
    needs_ipow: bool,
}

fn c_scalar(dt: &DataType) -> Result<CType, CodegenError> {
    match dt.base_elem() {
        DataType::Scalar(ScalarType::F32) => Ok(CType::Float),
        DataType::Scalar(_) | DataType::Index(_) => Ok(CType::Int),
        other => Err(CodegenError::Internal(format!(
            "no C storage for element type {other}"
        ))),
    }
}

fn elems(dt: &DataType) -> Result<Nat, CodegenError> {
    match dt {
        DataType::Scalar(_) | DataType::Index(_) => Ok(Nat::Const(1)),
        DataType::Array(n, e) => Ok(n.clone().mul(elems(e)?)),
        DataType::Tuple(..) => Err(CodegenError::Unsupported {
            what: "storing tuples in memory".into(),
            target: None,
        }),
        DataType::Var(v) => Err(CodegenError::Internal(format!(
            "data type variable `{v}` reached codegen"
        ))),
    }
}

/// Splits a normalized term into its sign and magnitude.
fn split_sign(t: &Nat) -> (bool, Nat) {
    match t {
        Nat::Const(c) if *c < 0 => (true, Nat::Const(-c)),
        Nat::Product(fs) => {
            let mut neg = false;
            let mut out = Vec::new();
            for f in fs {
                match f {
                    Nat::Const(c) if *c < 0 => {
                        neg = !neg;
                        if *c != -1 {
                            out.push(Nat::Const(-c));
                        }
                    }
                    other => out.push(other.clone()),
                }
            }
            let mag = if out.len() == 1 {
                out.pop().unwrap()
            } else {
                Nat::Product(out)
            };
            (neg, mag)
        }
        other => (false, other.clone()),
    }
}

fn body_of(p: &Phrase) -> Result<(Ident, Phrase), CodegenError> {
    match &p.whnf().kind {
        PhraseKind::Lambda(x, b) => Ok((x.clone(), (**b).clone())),
        _ => Err(CodegenError::Internal(format!(
            "expected a binder, found `{p}`"
        ))),
    }
}

fn nat_arg(a: &DArg) -> Result<Nat, CodegenError> {
    a.as_nat()
        .cloned()
        .ok_or_else(|| CodegenError::Internal(format!("expected a Nat argument, found {a}")))
}

fn literal(l: &Literal) -> CExpr {
    match l {
        Literal::F32 { text, .. } => CExpr::Float(text.clone()),
        Literal::I32(v) => CExpr::Int(*v as i64),
        Literal::Bool(b) => CExpr::Int(*b as i64),
    }
}

fn unsupported(what: impl Into<String>, target: Target) -> CodegenError {
    CodegenError::Unsupported {
        what: what.into(),
        target: Some(target),
    }
}

impl Emitter<'_> {
    fn nat(&mut self, n: &Nat) -> CExpr {
        let n = n.normalize_under(self.asm);
        self.nat_raw(&n)
    }

    fn nat_raw(&mut self, n: &Nat) -> CExpr {
        match n {
            Nat::Const(c) => CExpr::Int(*c),
            Nat::Var(v) => CExpr::var(v),
            Nat::Sum(ts) => {
                let signed: Vec<(bool, Nat)> = ts.iter().map(split_sign).collect();
                let mut order: Vec<&(bool, Nat)> = signed.iter().filter(|(neg, _)| !neg).collect();
                order.extend(signed.iter().filter(|(neg, _)| *neg));
                let mut acc: Option<CExpr> = None;
                for (neg, t) in order {
                    let c = self.nat_raw(t);
                    acc = Some(match (acc, neg) {
                        (None, false) => c,
                        (None, true) => CExpr::bin(BinOp::Sub, CExpr::Int(0), c),
                        (Some(a), false) => CExpr::bin(BinOp::Add, a, c),
                        (Some(a), true) => CExpr::bin(BinOp::Sub, a, c),
                    });
                }
                acc.unwrap_or(CExpr::Int(0))
            }
            Nat::Product(_) => {
                let (neg, mag) = split_sign(n);
                let Nat::Product(fs) = &mag else {
                    let c = self.nat_raw(&mag);
                    return if neg {
                        CExpr::bin(BinOp::Sub, CExpr::Int(0), c)
                    } else {
                        c
                    };
                };
                let mut it = fs.iter();
                let first = it.next().map(|f| self.nat_raw(f)).unwrap_or(CExpr::Int(1));
                let prod = it.fold(first, |a, f| {
                    let c = self.nat_raw(f);
                    CExpr::bin(BinOp::Mul, a, c)
                });
                if neg {
                    CExpr::bin(BinOp::Sub, CExpr::Int(0), prod)
                } else {
                    prod
                }
            }
            Nat::Pow(b, e) => {
                self.needs_ipow = true;
                let (b, e) = (self.nat_raw(b), self.nat_raw(e));
                CExpr::Call("ipow".into(), vec![b, e])
            }
            Nat::Div(a, b) => CExpr::bin(BinOp::Div, self.nat_raw(a), self.nat_raw(b)),
            Nat::Mod(a, b) => CExpr::bin(BinOp::Mod, self.nat_raw(a), self.nat_raw(b)),
        }
    }

    fn index_nat(&self, p: &Phrase) -> Result<Nat, CodegenError> {
        match &p.whnf().kind {
            PhraseKind::Ident(x) => Ok(Nat::var(x.name.clone())),
            PhraseKind::Literal(Literal::I32(v)) => Ok(Nat::Const(*v as i64)),
            _ => Err(CodegenError::Unsupported {
                what: format!("index expression `{p}`"),
                target: Some(self.target),
            }),
        }
    }

    fn storage(&mut self, x: &Ident, path: Vec<Sel>) -> Result<CExpr, CodegenError> {
        let Some(Binding::Store {
            cname,
            dt,
            scalar_ptr,
        }) = self.env.get(x).cloned()
        else {
            return Err(CodegenError::Internal(format!(
                "`{x}` is not bound to memory"
            )));
        };
        if path.is_empty() && dt.is_scalar() {
            let v = CExpr::var(&cname);
            return Ok(if scalar_ptr {
                CExpr::Deref(Box::new(v))
            } else {
                v
            });
        }
        let mut flat = Nat::Const(0);
        let mut cur = dt.clone();
        for s in path {
            match (s, cur) {
                (Sel::Idx(i), DataType::Array(_, e)) => {
                    flat = flat.add(i.mul(elems(&e)?));
                    cur = *e;
                }
                (Sel::Fst | Sel::Snd, DataType::Tuple(..)) => {
                    return Err(unsupported("storing tuples in memory", self.target));
                }
                (_, other) => {
                    return Err(CodegenError::Internal(format!(
                        "view does not fit `{x}`: {other} in {dt}"
                    )))
                }
            }
        }
        if !cur.is_scalar() {
            return Err(unsupported(
                format!("non-scalar access to `{x}` of type {cur}"),
                self.target,
            ));
        }
        let i = self.nat(&flat);
        Ok(CExpr::index(CExpr::var(&cname), i))
    }

    fn exp(&mut self, p: &Phrase, mut path: Vec<Sel>) -> Result<CExpr, CodegenError> {
        let p = p.whnf();
        let prim = match &p.kind {
            PhraseKind::Ident(x) => return self.storage(x, path),
            PhraseKind::Literal(l) if path.is_empty() => return Ok(literal(l)),
            PhraseKind::Prim(prim) => prim,
            _ => return Err(CodegenError::Internal(format!("cannot read `{p}`"))),
        };
        let (ta, a) = (&prim.targs, &prim.args);
        match prim.tag.as_str() {
            "idx" => {
                path.insert(0, Sel::Idx(self.index_nat(&a[0])?));
                self.exp(&a[1], path)
            }
            "zip" => match (path.first().cloned(), path.get(1).cloned()) {
                (Some(i @ Sel::Idx(_)), Some(side @ (Sel::Fst | Sel::Snd))) => {
                    let mut rest = path.split_off(2);
                    rest.insert(0, i);
                    self.exp(
                        if matches!(side, Sel::Fst) {
                            &a[0]
                        } else {
                            &a[1]
                        },
                        rest,
                    )
                }
                _ => Err(CodegenError::Internal(
                    "zip read without an element projection".into(),
                )),
            },
            "fst" | "snd" => {
                path.insert(
                    0,
                    if prim.tag == "fst" {
                        Sel::Fst
                    } else {
                        Sel::Snd
                    },
                );
                self.exp(&a[0], path)
            }
            "split" => {
                let n = nat_arg(&ta[0])?;
                match (path.first().cloned(), path.get(1).cloned()) {
                    (Some(Sel::Idx(i)), Some(Sel::Idx(j))) => {
                        let mut rest = path.split_off(2);
                        rest.insert(0, Sel::Idx(i.mul(n).add(j)));
                        self.exp(&a[0], rest)
                    }
                    _ => Err(CodegenError::Internal(
                        "split read needs two indices".into(),
                    )),
                }
            }
            "join" => {
                let m = nat_arg(&ta[1])?;
                let Some(Sel::Idx(k)) = path.first().cloned() else {
                    return Err(CodegenError::Internal("join read needs an index".into()));
                };
                let mut rest = path.split_off(1);
                rest.insert(0, Sel::Idx(k.clone().rem(m.clone())));
                rest.insert(0, Sel::Idx(k.div(m)));
                self.exp(&a[0], rest)
            }
            "prefix" => self.exp(&a[0], path),
            "add" | "sub" | "mul" if path.is_empty() => {
                let op = match prim.tag.as_str() {
                    "add" => BinOp::Add,
                    "sub" => BinOp::Sub,
                    _ => BinOp::Mul,
                };
                Ok(CExpr::bin(
                    op,
                    self.exp(&a[0], vec![])?,
                    self.exp(&a[1], vec![])?,
                ))
            }
            other => Err(unsupported(format!("reading `{other}`"), self.target)),
        }
    }

    fn acc(&mut self, p: &Phrase, mut path: Vec<Sel>) -> Result<CExpr, CodegenError> {
        let p = p.whnf();
        let prim = match &p.kind {
            PhraseKind::Ident(x) => return self.storage(x, path),
            PhraseKind::Prim(prim) => prim,
            _ => {
                return Err(CodegenError::Internal(format!(
                    "cannot write through `{p}`"
                )))
            }
        };
        let (ta, a) = (&prim.targs, &prim.args);
        let need =
            |what: &str| CodegenError::Internal(format!("`{}` acceptor needs {what}", prim.tag));
        match prim.tag.as_str() {
            "idxAcc" => {
                path.insert(0, Sel::Idx(self.index_nat(&a[0])?));
                self.acc(&a[1], path)
            }
            "joinAcc" => {
                let m = nat_arg(&ta[1])?;
                match (path.first().cloned(), path.get(1).cloned()) {
                    (Some(Sel::Idx(i)), Some(Sel::Idx(j))) => {
                        let mut rest = path.split_off(2);
                        rest.insert(0, Sel::Idx(i.mul(m).add(j)));
                        self.acc(&a[0], rest)
                    }
                    _ => Err(need("two indices")),
                }
            }
            "splitAcc" => {
                let n = nat_arg(&ta[0])?;
                let Some(Sel::Idx(k)) = path.first().cloned() else {
                    return Err(need("an index"));
                };
                let mut rest = path.split_off(1);
                rest.insert(0, Sel::Idx(k.clone().rem(n.clone())));
                rest.insert(0, Sel::Idx(k.div(n)));
                self.acc(&a[0], rest)
            }
            "zipAcc1" | "zipAcc2" => {
                let Some(i @ Sel::Idx(_)) = path.first().cloned() else {
                    return Err(need("an index"));
                };
                let mut rest = path.split_off(1);
                rest.insert(
                    0,
                    if prim.tag == "zipAcc1" {
                        Sel::Fst
                    } else {
                        Sel::Snd
                    },
                );
                rest.insert(0, i);
                self.acc(&a[0], rest)
            }
            "prefixAcc" => self.acc(&a[0], path),
            other => Err(unsupported(
                format!("writing through `{other}`"),
                self.target,
            )),
        }
    }

    fn bind_store(&mut self, x: Ident, cname: &str, dt: DataType) {
        self.env.insert(
            x,
            Binding::Store {
                cname: cname.to_string(),
                dt,
                scalar_ptr: false,
            },
        );
    }

    fn c_name(&mut self, binder: &Ident) -> String {
        let base = binder.name.replace("Acc", "");
        let base = if base.is_empty() {
            "tmp".to_string()
        } else {
            base
        };
        self.names.fresh(&base).name
    }

    fn comm(&mut self, p: &Phrase) -> Result<Vec<CStmt>, CodegenError> {
        let p = p.whnf();
        let prim = match &p.kind {
            PhraseKind::Ident(x) => {
                return match self.env.get(x) {
                    Some(Binding::Comm(s)) => Ok(s.clone()),
                    _ => Err(CodegenError::Internal(format!("command `{x}` is unbound"))),
                }
            }
            PhraseKind::Prim(prim) => prim.clone(),
            _ => return Err(CodegenError::Internal(format!("not a command: `{p}`"))),
        };
        let (ta, a) = (&prim.targs, &prim.args);
        match prim.tag.as_str() {
            "seq" => {
                let mut out = self.comm(&a[0])?;
                out.extend(self.comm(&a[1])?);
                Ok(out)
            }
            "assign" => {
                let lhs = self.acc(&a[0], vec![])?;
                let rhs = self.exp(&a[1], vec![])?;
                Ok(vec![match rhs {
                    CExpr::Bin(BinOp::Add, l, r) if *l == lhs => {
                        CStmt::Assign(lhs, AssignOp::Add, *r)
                    }
                    rhs => CStmt::Assign(lhs, AssignOp::Set, rhs),
                }])
            }
            "new" => {
                let addr = ta[0]
                    .as_addr()
                    .ok_or_else(|| CodegenError::Internal("new needs an address space".into()))?;
                let dt = ta[1]
                    .as_data()
                    .cloned()
                    .ok_or_else(|| CodegenError::Internal("new needs a type".into()))?;
                let (acc, rest) = body_of(&a[0])?;
                let (exp, body) = body_of(&rest)?;
                let cname = self.c_name(&acc);
                let space = match (addr, self.target) {
                    (AddressSpace::Global, Target::OpenCL) => {
                        return Err(unsupported(
                            "a Global temporary inside a kernel",
                            self.target,
                        ))
                    }
                    (AddressSpace::Local, Target::OpenCL) => Some("local".to_string()),
                    _ => None,
                };
                let len = if dt.is_scalar() {
                    None
                } else {
                    Some(self.nat(&elems(&dt)?))
                };
                let decl = CDecl {
                    space,
                    len,
                    ..CDecl::scalar(c_scalar(&dt)?, &cname)
                };
                self.bind_store(acc, &cname, dt.clone());
                self.bind_store(exp, &cname, dt);
                let mut out = vec![CStmt::Decl(decl, None)];
                out.extend(self.comm(&body)?);
                Ok(out)
            }
            "for" => {
                let n = nat_arg(&ta[0])?;
                let (i, body) = body_of(&a[0])?;
                let bound = self.nat(&n);
                let body = self.comm(&body)?;
                Ok(vec![CStmt::For {
                    var: i.name.clone(),
                    init: CExpr::Int(0),
                    bound,
                    step: CExpr::Int(1),
                    body,
                }])
            }
            "parForGlobal" | "parForWorkGroup" | "parForLocal" => self.par_for(&prim.tag, ta, a),
            "if" => {
                let l = self.nat(&nat_arg(&ta[0])?);
                let r = self.nat(&nat_arg(&ta[1])?);
                let t = self.comm(&a[0])?;
                let e = self.comm(&a[1])?;
                Ok(vec![CStmt::If(CExpr::bin(BinOp::Lt, l, r), t, e)])
            }
            "newDoubleBuffer" => self.double_buffer(ta, a),
            other => Err(unsupported(format!("command `{other}`"), self.target)),
        }
    }

    fn par_for(
        &mut self,
        tag: &str,
        ta: &[DArg],
        a: &[Phrase],
    ) -> Result<Vec<CStmt>, CodegenError> {
        let n = nat_arg(&ta[0])?;
        let t = ta[1].clone();
        let (i, rest) = body_of(&a[1])?;
        let (o, body) = body_of(&rest)?;
        let iv = Phrase::ident(
            &i,
            crate::dpia::PhraseType::Exp(DataType::Index(n.clone()), crate::dpia::Rw::Rd),
        );
        let elem_acc = Phrase::prim(
            "idxAcc",
            vec![DArg::Nat(n.clone()), t],
            vec![iv, a[0].clone()],
        );
        let body = body.substitute(&o, &elem_acc);
        let bound = self.nat(&n);
        let (init, step, pragma) = match self.target {
            Target::C => return Err(unsupported(format!("`{tag}`"), self.target)),
            Target::OpenMP => (CExpr::Int(0), CExpr::Int(1), self.par_depth == 0),
            Target::OpenCL => {
                let (start, stride) = match tag {
                    "parForWorkGroup" => ("get_group_id", "get_num_groups"),
                    "parForLocal" => ("get_local_id", "get_local_size"),
                    _ => ("get_global_id", "get_global_size"),
                };
                (
                    CExpr::Call(start.into(), vec![CExpr::Int(0)]),
                    CExpr::Call(stride.into(), vec![CExpr::Int(0)]),
                    false,
                )
            }
        };
        self.par_depth += 1;
        let body = self.comm(&body);
        self.par_depth -= 1;
        let mut out = Vec::new();
        if pragma {
            out.push(CStmt::Pragma("omp parallel for".into()));
        }
        out.push(CStmt::For {
            var: i.name.clone(),
            init,
            bound,
            step,
            body: body?,
        });
        Ok(out)
    }

    fn whole_buffer(&self, p: &Phrase, role: &str) -> Result<String, CodegenError> {
        if let PhraseKind::Ident(x) = &p.whnf().kind {
            if let Some(Binding::Store { cname, .. }) = self.env.get(x) {
                return Ok(cname.clone());
            }
        }
        Err(unsupported(
            format!("double buffering with a {role} view `{p}`"),
            self.target,
        ))
    }

    fn double_buffer(&mut self, ta: &[DArg], a: &[Phrase]) -> Result<Vec<CStmt>, CodegenError> {
        if self.target == Target::OpenCL {
            return Err(unsupported("`newDoubleBuffer`", self.target));
        }
        let t = ta[0]
            .as_data()
            .cloned()
            .ok_or_else(|| CodegenError::Internal("newDoubleBuffer needs a type".into()))?;
        let (cap, in_sz, k) = (nat_arg(&ta[1])?, nat_arg(&ta[2])?, nat_arg(&ta[4])?);
        let input = self.whole_buffer(&a[0], "input")?;
        let output = self.whole_buffer(&a[1], "output")?;
        let ty = c_scalar(&t)?;
        let len = self.nat(&cap.clone().mul(elems(&t)?));
        let [b1, b2, inp, outp, flag] =
            ["buffer1", "buffer2", "in_ptr", "out_ptr", "flag"].map(|n| self.names.fresh(n).name);
        let v = |s: &str| CExpr::var(s);
        let pick =
            |a: &str, b: &str| CExpr::Cond(Box::new(v(&flag)), Box::new(v(a)), Box::new(v(b)));
        let first_out = match k.normalize_under(self.asm).as_const() {
            Some(1) => v(&output),
            Some(c) if c > 1 => v(&b1),
            _ => CExpr::Cond(
                Box::new(CExpr::bin(BinOp::Lt, CExpr::Int(1), self.nat(&k))),
                Box::new(v(&b1)),
                Box::new(v(&output)),
            ),
        };
        let ptr = |name: &str, konst: bool| CDecl {
            konst,
            pointer: true,
            ..CDecl::scalar(ty, name)
        };
        let mut out = vec![
            CStmt::Decl(
                CDecl {
                    len: Some(len.clone()),
                    ..CDecl::scalar(ty, &b1)
                },
                None,
            ),
            CStmt::Decl(
                CDecl {
                    len: Some(len),
                    ..CDecl::scalar(ty, &b2)
                },
                None,
            ),
            CStmt::Decl(ptr(&inp, true), Some(v(&input))),
            CStmt::Decl(ptr(&outp, false), Some(first_out)),
            CStmt::Decl(CDecl::scalar(CType::UChar, &flag), Some(CExpr::Int(1))),
        ];
        let swap = vec![
            CStmt::Assign(v(&inp), AssignOp::Set, pick(&b1, &b2)),
            CStmt::Assign(v(&outp), AssignOp::Set, pick(&b2, &b1)),
            CStmt::Assign(
                v(&flag),
                AssignOp::Set,
                CExpr::bin(BinOp::Xor, v(&flag), CExpr::Int(1)),
            ),
        ];
        let done = vec![
            CStmt::Assign(v(&inp), AssignOp::Set, pick(&b1, &b2)),
            CStmt::Assign(v(&outp), AssignOp::Set, v(&output)),
        ];
        let (acc, r1) = body_of(&a[2])?;
        let (exp, r2) = body_of(&r1)?;
        let (sw, r3) = body_of(&r2)?;
        let (dn, body) = body_of(&r3)?;
        self.bind_store(acc, &outp, DataType::array(cap, t.clone()));
        self.bind_store(exp, &inp, DataType::array(in_sz, t));
        self.env.insert(sw, Binding::Comm(swap));
        self.env.insert(dn, Binding::Comm(done));
        out.extend(self.comm(&body)?);
        Ok(out)
    }
}

fn ipow_helper() -> CFunction {
    let v = CExpr::var;
    CFunction {
        kernel: false,
        is_static: true,
        ret: Some(CType::Int),
        name: "ipow".into(),
        params: vec![vec![
            CDecl::scalar(CType::Int, "b"),
            CDecl::scalar(CType::Int, "e"),
        ]],
        body: vec![
            CStmt::Decl(CDecl::scalar(CType::Int, "r"), Some(CExpr::Int(1))),
            CStmt::For {
                var: "j".into(),
                init: CExpr::Int(0),
                bound: v("e"),
                step: CExpr::Int(1),
                body: vec![CStmt::Assign(v("r"), AssignOp::Mul, v("b"))],
            },
            CStmt::Return(v("r")),
        ],
    }
}

/// Emits a translated unit as a C function named `<unit>Kernel`.
pub fn emit_unit(unit: &Unit, target: Target) -> Result<CProgram, CodegenError> {
    let mut used = phrase_names(&unit.body);
    used.extend(unit.nat_params.iter().cloned());
    used.extend(unit.inputs.iter().map(|(i, _)| i.name.clone()));
    used.insert(unit.output.0.name.clone());
    used.extend(RESERVED.iter().map(|s| s.to_string()));
    let mut em = Emitter {
        target,
        asm: &unit.assumptions,
        names: NameSupply::avoiding(used),
        env: HashMap::new(),
        par_depth: 0,
        needs_ipow: false,
    };
    let space = (target == Target::OpenCL).then(|| "global".to_string());
    let (out_id, out_dt) = &unit.output;
    let out_decl = CDecl {
        space: space.clone(),
        pointer: true,
        restrict: true,
        ..CDecl::scalar(c_scalar(out_dt)?, &out_id.name)
    };
    em.env.insert(
        out_id.clone(),
        Binding::Store {
            cname: out_id.name.clone(),
            dt: out_dt.clone(),
            scalar_ptr: out_dt.is_scalar(),
        },
    );
    let mut params = vec![vec![out_decl]];
    if !unit.nat_params.is_empty() {
        params.push(
            unit.nat_params
                .iter()
                .map(|n| CDecl::scalar(CType::Int, n))
                .collect(),
        );
    }
    for (x, dt) in &unit.inputs {
        let decl = if dt.is_scalar() {
            CDecl::scalar(c_scalar(dt)?, &x.name)
        } else {
            CDecl {
                konst: true,
                space: space.clone(),
                pointer: true,
                restrict: true,
                ..CDecl::scalar(c_scalar(dt)?, &x.name)
            }
        };
        params.push(vec![decl]);
        em.bind_store(x.clone(), &x.name, dt.clone());
    }
    let body = em.comm(&unit.body)?;
    let kernel = CFunction {
        kernel: target == Target::OpenCL,
        is_static: false,
        ret: None,
        name: format!("{}Kernel", unit.name),
        params,
        body,
    };
    let mut functions = Vec::new();
    if em.needs_ipow {
        functions.push(ipow_helper());
    }
    functions.push(kernel);
    Ok(CProgram { functions })
}
