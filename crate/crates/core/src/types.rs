//! RISE types. [`DataType`] is the memory-representable subset and has no
//! function constructor, so functions can never be stored.

use std::collections::BTreeSet;
use std::fmt;

use crate::nat::{Assumptions, Nat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    Nat,
    DataType,
    AddressSpace,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Nat => "Nat",
            Kind::DataType => "DataType",
            Kind::AddressSpace => "AddrSp",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AddressSpace {
    Global,
    Local,
    Private,
}

impl AddressSpace {
    pub fn parse(s: &str) -> Option<AddressSpace> {
        match s {
            "Global" => Some(AddressSpace::Global),
            "Local" => Some(AddressSpace::Local),
            "Private" => Some(AddressSpace::Private),
            _ => None,
        }
    }
}

impl fmt::Display for AddressSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AddressSpace::Global => "Global",
            AddressSpace::Local => "Local",
            AddressSpace::Private => "Private",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ScalarType {
    F32,
    I32,
    Bool,
}

impl fmt::Display for ScalarType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScalarType::F32 => "f32",
            ScalarType::I32 => "i32",
            ScalarType::Bool => "bool",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DataType {
    Scalar(ScalarType),
    Index(Nat),
    Array(Nat, Box<DataType>),
    Tuple(Box<DataType>, Box<DataType>),
    /// A data-type variable, bound by a `DataType`-kinded binder or a
    /// primitive scheme.
    Var(String),
}

impl DataType {
    pub fn f32() -> DataType {
        DataType::Scalar(ScalarType::F32)
    }

    pub fn i32() -> DataType {
        DataType::Scalar(ScalarType::I32)
    }

    pub fn array(n: impl Into<Nat>, elem: DataType) -> DataType {
        DataType::Array(n.into(), Box::new(elem))
    }

    pub fn tuple(a: DataType, b: DataType) -> DataType {
        DataType::Tuple(Box::new(a), Box::new(b))
    }

    pub fn is_scalar(&self) -> bool {
        matches!(self, DataType::Scalar(_) | DataType::Index(_))
    }

    /// The innermost element type below all array dimensions.
    pub fn base_elem(&self) -> &DataType {
        match self {
            DataType::Array(_, e) => e.base_elem(),
            other => other,
        }
    }

    pub fn substitute_nat(&self, var: &str, n: &Nat) -> DataType {
        self.map_nats(&mut |x| x.substitute(var, n))
    }

    pub fn map_nats(&self, f: &mut dyn FnMut(&Nat) -> Nat) -> DataType {
        match self {
            DataType::Scalar(s) => DataType::Scalar(*s),
            DataType::Index(n) => DataType::Index(f(n)),
            DataType::Array(n, e) => DataType::Array(f(n), Box::new(e.map_nats(f))),
            DataType::Tuple(a, b) => {
                DataType::Tuple(Box::new(a.map_nats(f)), Box::new(b.map_nats(f)))
            }
            DataType::Var(v) => DataType::Var(v.clone()),
        }
    }

    pub fn substitute_dt(&self, var: &str, dt: &DataType) -> DataType {
        match self {
            DataType::Var(v) if v == var => dt.clone(),
            DataType::Array(n, e) => DataType::Array(n.clone(), Box::new(e.substitute_dt(var, dt))),
            DataType::Tuple(a, b) => DataType::Tuple(
                Box::new(a.substitute_dt(var, dt)),
                Box::new(b.substitute_dt(var, dt)),
            ),
            other => other.clone(),
        }
    }

    pub fn normalize_under(&self, asm: &Assumptions) -> DataType {
        self.map_nats(&mut |n| n.normalize_under(asm))
    }

    pub fn collect_free(&self, nats: &mut BTreeSet<String>, dts: &mut BTreeSet<String>) {
        match self {
            DataType::Scalar(_) => {}
            DataType::Index(n) => nats.extend(n.free_vars()),
            DataType::Array(n, e) => {
                nats.extend(n.free_vars());
                e.collect_free(nats, dts);
            }
            DataType::Tuple(a, b) => {
                a.collect_free(nats, dts);
                b.collect_free(nats, dts);
            }
            DataType::Var(v) => {
                dts.insert(v.clone());
            }
        }
    }

    pub fn equal_under(&self, other: &DataType, asm: &Assumptions) -> bool {
        match (self, other) {
            (DataType::Scalar(a), DataType::Scalar(b)) => a == b,
            (DataType::Index(a), DataType::Index(b)) => asm.nat_equal(a, b),
            (DataType::Array(n, a), DataType::Array(m, b)) => {
                asm.nat_equal(n, m) && a.equal_under(b, asm)
            }
            (DataType::Tuple(a1, b1), DataType::Tuple(a2, b2)) => {
                a1.equal_under(a2, asm) && b1.equal_under(b2, asm)
            }
            (DataType::Var(a), DataType::Var(b)) => a == b,
            _ => false,
        }
    }
}

impl fmt::Display for DataType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DataType::Scalar(s) => write!(f, "{s}"),
            DataType::Index(n) => write!(f, "Idx[{n}]"),
            DataType::Array(n, e) => write!(f, "Array[{n}, {e}]"),
            DataType::Tuple(a, b) => write!(f, "Tuple[{a}, {b}]"),
            DataType::Var(v) => write!(f, "{v}"),
        }
    }
}

/// A type-level argument: what a dependent function abstracts over.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TypeArg {
    Nat(Nat),
    DataType(DataType),
    AddressSpace(AddressSpace),
}

impl TypeArg {
    pub fn kind(&self) -> Kind {
        match self {
            TypeArg::Nat(_) => Kind::Nat,
            TypeArg::DataType(_) => Kind::DataType,
            TypeArg::AddressSpace(_) => Kind::AddressSpace,
        }
    }
}

impl fmt::Display for TypeArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeArg::Nat(n) => write!(f, "{n}"),
            TypeArg::DataType(d) => write!(f, "{d}"),
            TypeArg::AddressSpace(a) => write!(f, "{a}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Type {
    Data(DataType),
    Fun(Box<Type>, Box<Type>),
    DepFun {
        kind: Kind,
        param: String,
        /// Implicit binders are instantiated by inference, never applied
        /// explicitly.
        implicit: bool,
        body: Box<Type>,
    },
    /// Type identifier; also used for inference variables over arbitrary types.
    Var(String),
}

impl Type {
    pub fn fun(a: Type, b: Type) -> Type {
        Type::Fun(Box::new(a), Box::new(b))
    }

    pub fn data(&self) -> Option<&DataType> {
        match self {
            Type::Data(d) => Some(d),
            _ => None,
        }
    }

    /// Capture-avoiding substitution of a type-level argument for `var`.
    pub fn substitute(&self, var: &str, arg: &TypeArg) -> Type {
        match self {
            Type::Data(d) => Type::Data(subst_dt(d, var, arg)),
            Type::Fun(a, b) => Type::fun(a.substitute(var, arg), b.substitute(var, arg)),
            Type::Var(v) => match arg {
                TypeArg::DataType(dt) if v == var => Type::Data(dt.clone()),
                _ => Type::Var(v.clone()),
            },
            Type::DepFun {
                kind,
                param,
                implicit,
                body,
            } => {
                if param == var {
                    return self.clone();
                }
                let (param, body) = if type_arg_mentions(arg, param) {
                    let fresh = fresh_type_param(param, arg, body);
                    let renamed = body.substitute(param, &rename_arg(*kind, &fresh));
                    (fresh, renamed)
                } else {
                    (param.clone(), (**body).clone())
                };
                Type::DepFun {
                    kind: *kind,
                    param,
                    implicit: *implicit,
                    body: Box::new(body.substitute(var, arg)),
                }
            }
        }
    }

    pub fn map_nats(&self, f: &mut dyn FnMut(&Nat) -> Nat) -> Type {
        match self {
            Type::Data(d) => Type::Data(d.map_nats(f)),
            Type::Fun(a, b) => Type::fun(a.map_nats(f), b.map_nats(f)),
            Type::DepFun {
                kind,
                param,
                implicit,
                body,
            } => Type::DepFun {
                kind: *kind,
                param: param.clone(),
                implicit: *implicit,
                body: Box::new(body.map_nats(f)),
            },
            Type::Var(v) => Type::Var(v.clone()),
        }
    }

    pub fn normalize_under(&self, asm: &Assumptions) -> Type {
        self.map_nats(&mut |n| n.normalize_under(asm))
    }

    /// Free type-level variables (Nat, DataType) of this type.
    pub fn free_type_vars(&self) -> BTreeSet<String> {
        let mut nats = BTreeSet::new();
        let mut dts = BTreeSet::new();
        self.collect_free(&mut nats, &mut dts);
        nats.extend(dts);
        nats
    }

    fn collect_free(&self, nats: &mut BTreeSet<String>, dts: &mut BTreeSet<String>) {
        match self {
            Type::Data(d) => d.collect_free(nats, dts),
            Type::Fun(a, b) => {
                a.collect_free(nats, dts);
                b.collect_free(nats, dts);
            }
            Type::Var(v) => {
                dts.insert(v.clone());
            }
            Type::DepFun { param, body, .. } => {
                let mut inner_n = BTreeSet::new();
                let mut inner_d = BTreeSet::new();
                body.collect_free(&mut inner_n, &mut inner_d);
                inner_n.remove(param);
                inner_d.remove(param);
                nats.extend(inner_n);
                dts.extend(inner_d);
            }
        }
    }

    /// Equality up to Nat normalization, alpha-renaming of binders, and
    /// the given divisibility facts.
    pub fn equal_under(&self, other: &Type, asm: &Assumptions) -> bool {
        match (self, other) {
            (Type::Data(a), Type::Data(b)) => a.equal_under(b, asm),
            (Type::Fun(a1, b1), Type::Fun(a2, b2)) => {
                a1.equal_under(a2, asm) && b1.equal_under(b2, asm)
            }
            (Type::Var(a), Type::Var(b)) => a == b,
            (
                Type::DepFun {
                    kind: k1,
                    param: p1,
                    implicit: i1,
                    body: b1,
                },
                Type::DepFun {
                    kind: k2,
                    param: p2,
                    implicit: i2,
                    body: b2,
                },
            ) => {
                k1 == k2
                    && i1 == i2
                    && b1.equal_under(&b2.substitute(p2, &rename_arg(*k2, p1)), asm)
            }
            _ => false,
        }
    }

    pub fn contains_fun(&self) -> bool {
        !matches!(self, Type::Data(_))
    }
}

fn subst_dt(d: &DataType, var: &str, arg: &TypeArg) -> DataType {
    match arg {
        TypeArg::Nat(n) => d.substitute_nat(var, n),
        TypeArg::DataType(dt) => d.substitute_dt(var, dt),
        TypeArg::AddressSpace(_) => d.clone(),
    }
}

fn type_arg_mentions(arg: &TypeArg, name: &str) -> bool {
    match arg {
        TypeArg::Nat(n) => n.mentions(name),
        TypeArg::DataType(d) => {
            let mut nats = BTreeSet::new();
            let mut dts = BTreeSet::new();
            d.collect_free(&mut nats, &mut dts);
            nats.contains(name) || dts.contains(name)
        }
        TypeArg::AddressSpace(_) => false,
    }
}

fn fresh_type_param(base: &str, arg: &TypeArg, body: &Type) -> String {
    let taken = body.free_type_vars();
    (1..)
        .map(|i| format!("{base}{i}"))
        .find(|c| !taken.contains(c) && !type_arg_mentions(arg, c))
        .unwrap()
}

/// A type-level argument referring to a variable called `name`.
pub fn rename_arg(kind: Kind, name: &str) -> TypeArg {
    match kind {
        Kind::Nat => TypeArg::Nat(Nat::var(name)),
        Kind::DataType => TypeArg::DataType(DataType::Var(name.to_string())),
        Kind::AddressSpace => TypeArg::Nat(Nat::var(name)),
    }
}

/// Recursive checker: true when no function type hides inside a data type.
/// Always true by construction; kept as an executable statement of the rule.
pub fn data_type_is_storable(dt: &DataType) -> bool {
    match dt {
        DataType::Scalar(_) | DataType::Index(_) | DataType::Var(_) => true,
        DataType::Array(_, e) => data_type_is_storable(e),
        DataType::Tuple(a, b) => data_type_is_storable(a) && data_type_is_storable(b),
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Data(d) => write!(f, "{d}"),
            Type::Var(v) => write!(f, "{v}"),
            Type::Fun(a, b) => {
                if matches!(**a, Type::Fun(..) | Type::DepFun { .. }) {
                    write!(f, "({a}) -> {b}")
                } else {
                    write!(f, "{a} -> {b}")
                }
            }
            Type::DepFun {
                kind,
                param,
                implicit,
                body,
            } => {
                if *implicit {
                    write!(f, "{{{param}: {kind}}} -> {body}")
                } else {
                    write!(f, "({param}: {kind}) -> {body}")
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn substitute_array_size() {
        let t = Type::Data(DataType::array(Nat::var("n"), DataType::f32()));
        let s = t.substitute("n", &TypeArg::Nat(Nat::Const(4)));
        assert_eq!(s, Type::Data(DataType::array(4, DataType::f32())));
    }

    #[test]
    fn dep_binder_is_renamed_to_avoid_capture() {
        // (m: Nat) -> Array[n, Array[m, f32]] with n := m keeps the outer m free
        let t = Type::DepFun {
            kind: Kind::Nat,
            param: "m".into(),
            implicit: false,
            body: Box::new(Type::Data(DataType::array(
                Nat::var("n"),
                DataType::array(Nat::var("m"), DataType::f32()),
            ))),
        };
        let s = t.substitute("n", &TypeArg::Nat(Nat::var("m")));
        let Type::DepFun { param, body, .. } = &s else {
            panic!()
        };
        assert_ne!(param, "m");
        assert_eq!(
            **body,
            Type::Data(DataType::array(
                Nat::var("m"),
                DataType::array(Nat::var(param.clone()), DataType::f32())
            ))
        );
    }

    #[test]
    fn alpha_equivalent_dep_types_are_equal() {
        let mk = |p: &str| Type::DepFun {
            kind: Kind::Nat,
            param: p.into(),
            implicit: false,
            body: Box::new(Type::Data(DataType::array(Nat::var(p), DataType::f32()))),
        };
        assert!(mk("a").equal_under(&mk("b"), &Assumptions::default()));
    }

    #[test]
    fn display_matches_surface_syntax() {
        let t = Type::fun(
            Type::Data(DataType::array(Nat::var("n"), DataType::f32())),
            Type::Data(DataType::f32()),
        );
        assert_eq!(t.to_string(), "Array[n, f32] -> f32");
    }
}
