//! The primitive table: names and type schemes, held as data.

use std::collections::BTreeMap;

use crate::parse::{parse_type, ParseError};
use crate::types::Type;

#[derive(Clone, Debug, PartialEq)]
pub struct PrimitiveSignature {
    pub name: String,
    /// Scheme with implicit binders marked on the `DepFun` nodes.
    pub scheme: Type,
}

impl PrimitiveSignature {
    pub fn parse(name: &str, scheme: &str) -> Result<PrimitiveSignature, ParseError> {
        Ok(PrimitiveSignature {
            name: name.to_string(),
            scheme: parse_type(scheme)?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum RegistryError {
    #[error("primitive `{0}` is already registered")]
    Duplicate(String),
    #[error("implicit parameter `{param}` of `{name}` does not occur in its scheme")]
    UninferableImplicit { name: String, param: String },
}

const MAP_SCHEME: &str =
    "{n: Nat} -> {s: DataType} -> {t: DataType} -> (s -> t) -> Array[n, s] -> Array[n, t]";
const REDUCE_SEQ_SCHEME: &str =
    "{n: Nat} -> {s: DataType} -> {t: DataType} -> (t -> s -> t) -> t -> Array[n, s] -> t";

const CORE: &[(&str, &str)] = &[
    ("map", MAP_SCHEME),
    ("mapSeq", MAP_SCHEME),
    ("mapGlobal", MAP_SCHEME),
    ("mapWorkGroup", MAP_SCHEME),
    ("mapLocal", MAP_SCHEME),
    ("reduce", "{n: Nat} -> {t: DataType} -> (t -> t -> t) -> t -> Array[n, t] -> t"),
    ("reduceSeq", REDUCE_SEQ_SCHEME),
    (
        "reduceSeqAt",
        "(a: AddrSp) -> {n: Nat} -> {s: DataType} -> {t: DataType} -> (t -> s -> t) -> t -> Array[n, s] -> t",
    ),
    ("zip", "{n: Nat} -> {s: DataType} -> {t: DataType} -> Array[n, s] -> Array[n, t] -> Array[n, Tuple[s, t]]"),
    ("fst", "{s: DataType} -> {t: DataType} -> Tuple[s, t] -> s"),
    ("snd", "{s: DataType} -> {t: DataType} -> Tuple[s, t] -> t"),
    ("split", "(n: Nat) -> {m: Nat} -> {t: DataType} -> Array[n*m, t] -> Array[m, Array[n, t]]"),
    ("join", "{n: Nat} -> {m: Nat} -> {t: DataType} -> Array[n, Array[m, t]] -> Array[n*m, t]"),
    ("toMem", "(a: AddrSp) -> {t: DataType} -> t -> t"),
    ("add", "{t: DataType} -> t -> t -> t"),
    ("sub", "{t: DataType} -> t -> t -> t"),
    ("mul", "{t: DataType} -> t -> t -> t"),
];

pub const ITERATE_SCHEME: &str = "{n: Nat} -> {m: Nat} -> (k: Nat) -> {t: DataType} -> \
     ((l: Nat) -> Array[l*n, t] -> Array[l, t]) -> Array[n^k*m, t] -> Array[m, t]";

/// Write-once table of primitive schemes.
#[derive(Clone, Debug, Default)]
pub struct Registry {
    prims: BTreeMap<String, PrimitiveSignature>,
}

impl Registry {
    pub fn empty() -> Registry {
        Registry::default()
    }

    /// Everything except the iteration extension.
    pub fn core() -> Registry {
        let mut r = Registry::empty();
        for (name, scheme) in CORE {
            r.register_primitive(
                PrimitiveSignature::parse(name, scheme).expect("builtin scheme parses"),
            )
            .expect("builtin names are distinct");
        }
        r
    }

    pub fn standard() -> Registry {
        let mut r = Registry::core();
        r.register_primitive(
            PrimitiveSignature::parse("iterate", ITERATE_SCHEME).expect("iterate scheme parses"),
        )
        .expect("iterate is registered once");
        r
    }

    pub fn register_primitive(&mut self, sig: PrimitiveSignature) -> Result<(), RegistryError> {
        if self.prims.contains_key(&sig.name) {
            return Err(RegistryError::Duplicate(sig.name));
        }
        check_implicits_occur(&sig)?;
        self.prims.insert(sig.name.clone(), sig);
        Ok(())
    }

    pub fn contains(&self, name: &str) -> bool {
        self.prims.contains_key(name)
    }

    pub fn scheme(&self, name: &str) -> Option<&Type> {
        self.prims.get(name).map(|s| &s.scheme)
    }

    pub fn iter(&self) -> impl Iterator<Item = &PrimitiveSignature> {
        self.prims.values()
    }
}

fn check_implicits_occur(sig: &PrimitiveSignature) -> Result<(), RegistryError> {
    let mut t = &sig.scheme;
    while let Type::DepFun {
        param,
        implicit,
        body,
        ..
    } = t
    {
        if *implicit && !body.free_type_vars().contains(param) {
            return Err(RegistryError::UninferableImplicit {
                name: sig.name.clone(),
                param: param.clone(),
            });
        }
        t = body;
    }
    Ok(())
}

/// Name used when printing a primitive tag back to surface syntax.
pub fn surface_name(tag: &str) -> &str {
    match tag {
        "reduceSeqAt" => "reduceSeq",
        other => other,
    }
}

/// High-level primitives that must be lowered before translation.
pub fn is_high_level(tag: &str) -> bool {
    matches!(tag, "map" | "reduce" | "reduceSeq")
}

pub fn is_map_like(tag: &str) -> bool {
    matches!(
        tag,
        "map" | "mapSeq" | "mapGlobal" | "mapWorkGroup" | "mapLocal"
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicate_is_rejected() {
        let mut r = Registry::core();
        let err = r
            .register_primitive(PrimitiveSignature::parse("map", MAP_SCHEME).unwrap())
            .unwrap_err();
        assert_eq!(err, RegistryError::Duplicate("map".into()));
    }

    #[test]
    fn iterate_is_an_extension() {
        assert!(!Registry::core().contains("iterate"));
        assert!(Registry::standard().contains("iterate"));
    }

    #[test]
    fn implicit_must_occur() {
        let sig = PrimitiveSignature::parse("bad", "{n: Nat} -> f32 -> f32").unwrap();
        assert!(matches!(
            Registry::empty().register_primitive(sig),
            Err(RegistryError::UninferableImplicit { .. })
        ));
    }
}
