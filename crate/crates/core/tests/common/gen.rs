//! Random Nat terms and random RISE programs.

use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rise_core::expr::{print_expr, PrintOptions};
use rise_core::parse::parse_nat;
use rise_core::{
    alpha_eq, nat_equal, parse_expr, AddressSpace, DataType, Expr, Ident, Kind, Literal, Nat,
    Registry, Type, TypeArg,
};

const VARS: [&str; 3] = ["n", "m", "s"];

pub fn nat_term() -> impl Strategy<Value = Nat> {
    let leaf = prop_oneof![
        (0i64..6).prop_map(Nat::Const),
        prop::sample::select(&VARS[..]).prop_map(Nat::var)
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.add(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.mul(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.sub(b)),
            (inner.clone(), 1i64..4).prop_map(|(a, b)| a.div(Nat::Const(b))),
            (inner.clone(), prop::sample::select(&VARS[..])).prop_map(|(a, v)| a.div(Nat::var(v))),
            (inner.clone(), 1i64..4).prop_map(|(a, b)| a.rem(Nat::Const(b))),
            (inner.clone(), prop::sample::select(&VARS[..])).prop_map(|(a, v)| a.rem(Nat::var(v))),
            (inner, 0i64..3).prop_map(|(a, e)| a.pow(Nat::Const(e))),
        ]
    })
}

pub fn nat_env() -> impl Strategy<Value = BTreeMap<String, i64>> {
    (1i64..9, 1i64..9, 1i64..9).prop_map(|(n, m, s)| {
        BTreeMap::from([
            ("n".to_string(), n),
            ("m".to_string(), m),
            ("s".to_string(), s),
        ])
    })
}

const PRIMS: [&str; 14] = [
    "map",
    "mapSeq",
    "mapGlobal",
    "mapWorkGroup",
    "mapLocal",
    "reduce",
    "reduceSeq",
    "zip",
    "fst",
    "snd",
    "join",
    "add",
    "sub",
    "mul",
];

pub struct Gen {
    pub rng: StdRng,
    vars: Vec<Ident>,
    nats: Vec<String>,
}

impl Gen {
    fn nat(&mut self) -> Nat {
        if !self.nats.is_empty() && self.rng.gen_bool(0.5) {
            let v = Nat::var(self.nats[self.rng.gen_range(0..self.nats.len())].clone());
            if self.rng.gen_bool(0.3) {
                v.mul(Nat::Const(self.rng.gen_range(2..4)))
            } else {
                v
            }
        } else {
            Nat::Const(self.rng.gen_range(1..9))
        }
    }

    fn data_type(&mut self, depth: u32) -> DataType {
        match self.rng.gen_range(0..if depth == 0 { 2 } else { 4 }) {
            0 => DataType::f32(),
            1 => DataType::i32(),
            2 => {
                let n = self.nat();
                DataType::array(n, self.data_type(depth - 1))
            }
            _ => DataType::tuple(self.data_type(depth - 1), self.data_type(depth - 1)),
        }
    }

    fn literal(&mut self) -> Expr {
        Expr::lit(match self.rng.gen_range(0..3) {
            0 => Literal::f32(self.rng.gen_range(-8..8) as f32 * 0.25),
            1 => Literal::I32(self.rng.gen_range(-50..50)),
            _ => Literal::Bool(self.rng.gen_bool(0.5)),
        })
    }

    fn leaf(&mut self) -> Expr {
        match self.rng.gen_range(0..4) {
            0 | 1 if !self.vars.is_empty() => {
                Expr::ident(&self.vars[self.rng.gen_range(0..self.vars.len())].clone())
            }
            2 => Expr::prim(PRIMS[self.rng.gen_range(0..PRIMS.len())]),
            3 => {
                let n = self.nat();
                Expr::prim("split").dep_app(TypeArg::Nat(n))
            }
            _ => self.literal(),
        }
    }

    pub fn expr(&mut self, depth: u32) -> Expr {
        if depth == 0 {
            return self.leaf();
        }
        match self.rng.gen_range(0..8) {
            0 | 1 => {
                let f = self.expr(depth - 1);
                f.app(self.expr(depth - 1))
            }
            2 | 3 => {
                // Reusing a display name exercises shadowing.
                let name = ["x", "y", "acc", "row"][self.rng.gen_range(0..4)];
                let x = Ident::fresh(name);
                let annotated = self
                    .rng
                    .gen_bool(0.3)
                    .then(|| Type::Data(self.data_type(2)));
                self.vars.push(x.clone());
                let body = self.expr(depth - 1);
                self.vars.pop();
                match annotated {
                    Some(t) => Expr::lambda_typed(x, t, body),
                    None => Expr::lambda(x, body),
                }
            }
            4 => {
                let n = ["n", "m", "k"][self.rng.gen_range(0..3)].to_string();
                self.nats.push(n.clone());
                let body = self.expr(depth - 1);
                self.nats.pop();
                Expr::dep_lambda(Kind::Nat, n, body)
            }
            5 => {
                let a = [
                    AddressSpace::Private,
                    AddressSpace::Local,
                    AddressSpace::Global,
                ][self.rng.gen_range(0..3)];
                let prim = if self.rng.gen_bool(0.5) {
                    "toMem"
                } else {
                    "reduceSeqAt"
                };
                Expr::prim(prim)
                    .dep_app(TypeArg::AddressSpace(a))
                    .app(self.expr(depth - 1))
            }
            6 => {
                let f = self.expr(depth - 1);
                Expr::compose(f, self.expr(depth - 1))
            }
            _ => self.leaf(),
        }
    }
}

impl Gen {
    pub fn new(seed: u64) -> Gen {
        Gen {
            rng: StdRng::seed_from_u64(seed),
            vars: Vec::new(),
            nats: Vec::new(),
        }
    }
}

/// Prints `count` random programs, parses them back and checks alpha
/// equivalence; returns the number checked.
pub fn program_round_trips(seed: u64, count: usize) -> Result<usize, String> {
    let reg = Registry::standard();
    let mut g = Gen::new(seed);
    for _ in 0..count {
        let depth = g.rng.gen_range(1..7);
        let e = g.expr(depth);
        let text = print_expr(&e, PrintOptions::default());
        let back = parse_expr(&text, &reg).map_err(|err| format!("{text}\n{err}"))?;
        if !alpha_eq(&e, &back) {
            return Err(format!(
                "not alpha-equivalent after a round trip:\n{text}\n{}",
                print_expr(&back, PrintOptions::default())
            ));
        }
    }
    Ok(count)
}

/// Normalization is idempotent, keeps the value of every term that
/// evaluates and prints to text that parses back to the same normal form.
pub fn check_nat_term(t: &Nat, env: &BTreeMap<String, i64>) -> Result<(), String> {
    let once = t.normalize();
    if once.normalize() != once || !once.is_normal() {
        return Err(format!(
            "{t} normalizes to {once}, which is not a fixed point"
        ));
    }
    if let Some(v) = t.eval_map(env) {
        if once.eval_map(env) != Some(v) {
            return Err(format!(
                "{t} = {v} but its normal form {once} evaluates to {:?} under {env:?}",
                once.eval_map(env)
            ));
        }
    }
    let back = parse_nat(&once.to_string()).map_err(|e| e.to_string())?;
    if !nat_equal(&back, &once) {
        return Err(format!("{once} reparsed as {back}"));
    }
    Ok(())
}
