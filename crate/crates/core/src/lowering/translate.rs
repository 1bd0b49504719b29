use std::collections::BTreeSet;

use super::{phrase_names, LowerError, NameSupply, Unit};
use crate::dpia::{check_phrase_in, DArg, Phrase, PhraseKind, PhraseType, Rw};
use crate::expr::Ident;
use crate::nat::{Assumptions, Nat};
use crate::types::DataType;

/// A continuation over translated expressions. Continuations live on the
/// host side only; they never become IR nodes.
type Cont = Box<dyn FnOnce(&mut Translator, Phrase) -> Result<Phrase, LowerError>>;

/// State of the acceptor and continuation translations.
pub struct Translator {
    names: NameSupply,
    /// One line per dispatch when tracing is on.
    pub trace: Option<Vec<String>>,
}

fn exp(d: &DataType) -> PhraseType {
    PhraseType::Exp(d.clone(), Rw::Rd)
}

fn nat_arg(a: &DArg) -> Nat {
    a.as_nat().expect("Nat argument").clone()
}

fn data_arg(a: &DArg) -> DataType {
    a.as_data().expect("DataType argument").clone()
}

fn idx_type(n: &Nat) -> PhraseType {
    exp(&DataType::Index(n.clone()))
}

impl Translator {
    pub fn new(names: NameSupply, tracing: bool) -> Translator {
        Translator {
            names,
            trace: tracing.then(Vec::new),
        }
    }

    fn log(&mut self, what: &str, p: &Phrase) {
        if let Some(t) = &mut self.trace {
            let head = match &p.kind {
                PhraseKind::Prim(prim) => prim.tag.clone(),
                PhraseKind::Ident(i) => format!("identifier {i}"),
                PhraseKind::Literal(l) => format!("literal {l}"),
                _ => "phrase".into(),
            };
            t.push(format!("{what} {head}"));
        }
    }

    fn fresh(&mut self, base: &str) -> Ident {
        self.names.fresh(base)
    }

    /// Writes the value of `e` into `out`.
    pub fn acc_t(&mut self, e: &Phrase, out: Phrase) -> Result<Phrase, LowerError> {
        let e = e.whnf();
        self.log("accT", &e);
        let Some(prim) = e.as_prim() else {
            return self.acc_readable(&e, out);
        };
        let ta = &prim.targs;
        let a = &prim.args;
        match prim.tag.as_str() {
            "mapWorkGroup" | "mapLocal" | "mapGlobal" => {
                let (n, s, t) = (nat_arg(&ta[0]), data_arg(&ta[1]), data_arg(&ta[2]));
                let (par, idx_name, out_name) = match prim.tag.as_str() {
                    "mapWorkGroup" => ("parForWorkGroup", "wgId", "wgOut"),
                    "mapLocal" => ("parForLocal", "lId", "lOut"),
                    _ => ("parForGlobal", "gId", "gOut"),
                };
                let f = a[0].clone();
                self.con_t(
                    &a[1],
                    Box::new(move |tx, arr_t| {
                        let i = tx.fresh(idx_name);
                        let o = tx.fresh(out_name);
                        let iv = Phrase::ident(&i, idx_type(&n));
                        let ov = Phrase::ident(&o, PhraseType::Acc(t.clone()));
                        let elem = Phrase::prim(
                            "idx",
                            vec![DArg::Nat(n.clone()), DArg::Data(s)],
                            vec![iv, arr_t],
                        );
                        let body = tx.acc_t(&f.app(elem), ov)?;
                        let lam = Phrase::lambda(
                            i,
                            idx_type(&n),
                            Phrase::lambda(o, PhraseType::Acc(t.clone()), body),
                        );
                        Ok(Phrase::prim(
                            par,
                            vec![DArg::Nat(n), DArg::Data(t)],
                            vec![out, lam],
                        ))
                    }),
                )
            }
            "mapSeq" => {
                let (n, s, t) = (nat_arg(&ta[0]), data_arg(&ta[1]), data_arg(&ta[2]));
                let f = a[0].clone();
                self.con_t(
                    &a[1],
                    Box::new(move |tx, arr_t| {
                        let i = tx.fresh("i");
                        let iv = Phrase::ident(&i, idx_type(&n));
                        let elem = Phrase::prim(
                            "idx",
                            vec![DArg::Nat(n.clone()), DArg::Data(s)],
                            vec![iv.clone(), arr_t],
                        );
                        let o = Phrase::prim(
                            "idxAcc",
                            vec![DArg::Nat(n.clone()), DArg::Data(t)],
                            vec![iv, out],
                        );
                        let body = tx.acc_t(&f.app(elem), o)?;
                        Ok(Phrase::prim(
                            "for",
                            vec![DArg::Nat(n.clone())],
                            vec![Phrase::lambda(i, idx_type(&n), body)],
                        ))
                    }),
                )
            }
            "zip" if ta[3] == DArg::Rw(Rw::Wr) => {
                let acc_args = ta[..3].to_vec();
                let o1 = Phrase::prim("zipAcc1", acc_args.clone(), vec![out.clone()]);
                let o2 = Phrase::prim("zipAcc2", acc_args, vec![out]);
                Ok(self.acc_t(&a[0], o1)?.seq(self.acc_t(&a[1], o2)?))
            }
            "join" if ta[3] == DArg::Rw(Rw::Wr) => {
                let o = Phrase::prim("joinAcc", ta[..3].to_vec(), vec![out]);
                self.acc_t(&a[0], o)
            }
            "split" if ta[3] == DArg::Rw(Rw::Wr) => {
                let o = Phrase::prim("splitAcc", ta[..3].to_vec(), vec![out]);
                self.acc_t(&a[0], o)
            }
            "iterate" => self.acc_iterate(&e, out),
            _ => self.acc_readable(&e, out),
        }
    }

    /// Scalars that are already readable are stored with one assignment.
    fn acc_readable(&mut self, e: &Phrase, out: Phrase) -> Result<Phrase, LowerError> {
        match &e.ty {
            PhraseType::Exp(d, Rw::Rd) if d.is_scalar() => {
                let d = d.clone();
                self.con_t(
                    e,
                    Box::new(move |_, v| {
                        Ok(Phrase::prim("assign", vec![DArg::Data(d)], vec![out, v]))
                    }),
                )
            }
            other => Err(LowerError::NoAcceptorRule(format!(
                "`{}` of type {other}",
                short(e)
            ))),
        }
    }

    fn acc_iterate(&mut self, e: &Phrase, out: Phrase) -> Result<Phrase, LowerError> {
        let prim = e.as_prim().expect("iterate node");
        let (n, m, k, t) = (
            nat_arg(&prim.targs[0]),
            nat_arg(&prim.targs[1]),
            nat_arg(&prim.targs[2]),
            data_arg(&prim.targs[3]),
        );
        let f = prim.args[0].clone();
        self.con_t(
            &prim.args[1],
            Box::new(move |tx, arr_t| {
                let in_sz = n.clone().pow(k.clone()).mul(m.clone()).normalize();
                let cap = n
                    .clone()
                    .pow(k.clone().sub(Nat::Const(1)))
                    .mul(m.clone())
                    .normalize();
                let tmp_acc = tx.fresh("tmpAcc");
                let tmp_exp = tx.fresh("tmpExp");
                let swap = tx.fresh("swap");
                let done = tx.fresh("done");
                let i = tx.fresh("i");
                let acc_ty = PhraseType::Acc(DataType::array(cap.clone(), t.clone()));
                let exp_ty = exp(&DataType::array(in_sz.clone(), t.clone()));
                let iv = Nat::var(i.name.clone());
                let l = n
                    .clone()
                    .pow(k.clone().sub(iv.clone()).sub(Nat::Const(1)))
                    .mul(m.clone())
                    .normalize();
                let read = Phrase::prim(
                    "prefix",
                    vec![
                        DArg::Nat(l.clone().mul(n.clone()).normalize()),
                        DArg::Nat(in_sz.clone()),
                        DArg::Data(t.clone()),
                    ],
                    vec![Phrase::ident(&tmp_exp, exp_ty.clone())],
                );
                let write = Phrase::prim(
                    "prefixAcc",
                    vec![
                        DArg::Nat(l.clone()),
                        DArg::Nat(cap.clone()),
                        DArg::Data(t.clone()),
                    ],
                    vec![Phrase::ident(&tmp_acc, acc_ty.clone())],
                );
                let step = tx.acc_t(&f.dep_app(DArg::Nat(l)).app(read), write)?;
                let guard = Phrase::prim(
                    "if",
                    vec![
                        DArg::Nat(iv.add(Nat::Const(2)).normalize()),
                        DArg::Nat(k.clone()),
                    ],
                    vec![
                        Phrase::ident(&swap, PhraseType::Comm),
                        Phrase::ident(&done, PhraseType::Comm),
                    ],
                );
                let lp = Phrase::prim(
                    "for",
                    vec![DArg::Nat(k.clone())],
                    vec![Phrase::lambda(i, idx_type(&k), step.seq(guard))],
                );
                let body = Phrase::lambda(
                    tmp_acc,
                    acc_ty,
                    Phrase::lambda(
                        tmp_exp,
                        exp_ty,
                        Phrase::lambda(
                            swap,
                            PhraseType::Comm,
                            Phrase::lambda(done, PhraseType::Comm, lp),
                        ),
                    ),
                );
                Ok(Phrase::prim(
                    "newDoubleBuffer",
                    vec![
                        DArg::Data(t),
                        DArg::Nat(cap),
                        DArg::Nat(in_sz),
                        DArg::Nat(m),
                        DArg::Nat(k),
                    ],
                    vec![arr_t, out, body],
                ))
            }),
        )
    }

    /// Makes `e` readable and passes the readable form to `k`.
    pub fn con_t(&mut self, e: &Phrase, k: Cont) -> Result<Phrase, LowerError> {
        let e = e.whnf();
        self.log("conT", &e);
        let prim = match &e.kind {
            PhraseKind::Ident(_) | PhraseKind::Literal(_) => return k(self, e),
            PhraseKind::Prim(p) => p.clone(),
            _ => return Err(LowerError::NoContinuationRule(format!("`{}`", short(&e)))),
        };
        let ta = prim.targs.clone();
        let a = prim.args.clone();
        match prim.tag.as_str() {
            "toMem" => {
                let (addr, t) = (ta[0].clone(), data_arg(&ta[1]));
                let tmp_acc = self.fresh("tmpAcc");
                let tmp_exp = self.fresh("tmpExp");
                let write =
                    self.acc_t(&a[0], Phrase::ident(&tmp_acc, PhraseType::Acc(t.clone())))?;
                let rest = k(self, Phrase::ident(&tmp_exp, exp(&t)))?;
                Ok(new_block(addr, t, tmp_acc, tmp_exp, write.seq(rest)))
            }
            "reduceSeq" => {
                let (n, addr, s, t) = (
                    nat_arg(&ta[0]),
                    ta[1].clone(),
                    data_arg(&ta[2]),
                    data_arg(&ta[3]),
                );
                let f = a[0].clone();
                let init = a[1].clone();
                self.con_t(
                    &a[2],
                    Box::new(move |tx, arr_t| {
                        let acc = tx.fresh("accumAcc");
                        let cur = tx.fresh("accumExp");
                        let acc_v = Phrase::ident(&acc, PhraseType::Acc(t.clone()));
                        let cur_v = Phrase::ident(&cur, exp(&t));
                        let first = tx.acc_t(&init, acc_v.clone())?;
                        let i = tx.fresh("i");
                        let iv = Phrase::ident(&i, idx_type(&n));
                        let elem = Phrase::prim(
                            "idx",
                            vec![DArg::Nat(n.clone()), DArg::Data(s)],
                            vec![iv, arr_t],
                        );
                        let step = tx.acc_t(&f.app(cur_v.clone()).app(elem), acc_v)?;
                        let lp = Phrase::prim(
                            "for",
                            vec![DArg::Nat(n.clone())],
                            vec![Phrase::lambda(i, idx_type(&n), step)],
                        );
                        let rest = tx.con_t(&cur_v, k)?;
                        Ok(new_block(addr, t, acc, cur, first.seq(lp).seq(rest)))
                    }),
                )
            }
            "zip" => {
                let rhs = a[1].clone();
                self.con_t(
                    &a[0],
                    Box::new(move |tx, l| {
                        tx.con_t(
                            &rhs,
                            Box::new(move |tx, r| k(tx, Phrase::prim("zip", ta, vec![l, r]))),
                        )
                    }),
                )
            }
            "join" | "split" | "fst" | "snd" | "prefix" => {
                let tag = prim.tag.clone();
                self.con_t(
                    &a[0],
                    Box::new(move |tx, x| k(tx, Phrase::prim(&tag, ta, vec![x]))),
                )
            }
            "idx" | "add" | "sub" | "mul" => {
                let tag = prim.tag.clone();
                let second = a[1].clone();
                self.con_t(
                    &a[0],
                    Box::new(move |tx, x| {
                        tx.con_t(
                            &second,
                            Box::new(move |tx, y| k(tx, Phrase::prim(&tag, ta, vec![x, y]))),
                        )
                    }),
                )
            }
            _ => Err(LowerError::NoContinuationRule(format!(
                "`{}` of type {}",
                prim.tag, e.ty
            ))),
        }
    }
}

fn short(p: &Phrase) -> String {
    let s = p.to_string();
    match s.char_indices().nth(60) {
        Some((i, _)) => format!("{}...", &s[..i]),
        None => s,
    }
}

fn new_block(addr: DArg, t: DataType, acc: Ident, cur: Ident, body: Phrase) -> Phrase {
    let lam = Phrase::lambda(
        acc,
        PhraseType::Acc(t.clone()),
        Phrase::lambda(cur, exp(&t), body),
    );
    Phrase::prim("new", vec![addr, DArg::Data(t)], vec![lam])
}

/// Translates a checked functional phrase into an imperative unit: the
/// leading dependent and value parameters become unit parameters, free Nat
/// variables are appended to the Nat parameters, and the body is written
/// into a fresh `output` acceptor.
pub fn translate_unit(
    name: &str,
    functional: &Phrase,
    asm: &Assumptions,
    tracing: bool,
) -> Result<(Unit, Option<Vec<String>>), LowerError> {
    let mut nat_params = Vec::new();
    let mut cur = functional.clone();
    while let PhraseKind::DepLambda(_, x, b) = &cur.kind {
        nat_params.push(x.clone());
        cur = (**b).clone();
    }
    let mut inputs = Vec::new();
    while let PhraseKind::Lambda(x, b) = &cur.kind {
        let PhraseType::Fun(t, _) = &cur.ty else {
            unreachable!()
        };
        let PhraseType::Exp(d, _) = &**t else {
            return Err(LowerError::Unsupported {
                what: format!("unit parameter `{x}` of type {t}"),
                span: None,
            });
        };
        inputs.push((x.clone(), d.clone()));
        cur = (**b).clone();
    }
    let Some(out_ty) = cur.ty.data().cloned() else {
        return Err(LowerError::Unsupported {
            what: format!("unit result of type {}", cur.ty),
            span: None,
        });
    };
    let mut free_nats = BTreeSet::new();
    collect_nat_vars(&cur, &mut free_nats);
    for (_, d) in &inputs {
        let mut dts = BTreeSet::new();
        d.collect_free(&mut free_nats, &mut dts);
    }
    let bound: BTreeSet<String> = nat_params.iter().cloned().collect();
    let loop_names = binder_names(&cur);
    nat_params.extend(
        free_nats
            .into_iter()
            .filter(|v| !bound.contains(v) && !loop_names.contains(v)),
    );

    let mut names = NameSupply::avoiding(phrase_names(functional));
    for n in &nat_params {
        names.reserve(n);
    }
    let output = names.fresh("output");
    let mut tx = Translator::new(names, tracing);
    let out_phrase = Phrase::ident(&output, PhraseType::Acc(out_ty.clone()));
    let body = tx.acc_t(&cur, out_phrase)?;
    let mut unit = Unit {
        name: name.to_string(),
        nat_params,
        inputs,
        output: (output, out_ty),
        body,
        assumptions: asm.clone(),
    };
    unit.body = check_phrase_in(&unit.body, &unit.env(), asm)?;
    Ok((unit, tx.trace))
}

fn binder_names(p: &Phrase) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    p.visit(&mut |q| {
        if let PhraseKind::Lambda(x, _) | PhraseKind::Ident(x) = &q.kind {
            out.insert(x.name.clone());
        }
        if let PhraseKind::DepLambda(_, x, _) = &q.kind {
            out.insert(x.clone());
        }
    });
    out
}

fn collect_nat_vars(p: &Phrase, out: &mut BTreeSet<String>) {
    p.visit(&mut |q| {
        if let Some(d) = q.ty.data() {
            let mut dts = BTreeSet::new();
            d.collect_free(out, &mut dts);
        }
        if let Some(prim) = q.as_prim() {
            for a in &prim.targs {
                match a {
                    DArg::Nat(n) => out.extend(n.free_vars()),
                    DArg::Data(d) => {
                        let mut dts = BTreeSet::new();
                        d.collect_free(out, &mut dts);
                    }
                    _ => {}
                }
            }
        }
    });
}
