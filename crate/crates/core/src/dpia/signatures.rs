//! Primitive signatures, written in the same notation the printer emits.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use super::parse::{parse_kind, parse_phrase_type_at};
use super::{DArg, DKind, PhraseType};
use crate::parse::{Cursor, ParseError, Tok};

#[derive(Clone, Debug, PartialEq)]
pub enum Param {
    Type(String, DKind),
    Phrase(String, PhraseType),
}

#[derive(Clone, Debug, PartialEq)]
pub struct DpiaSignature {
    pub tag: String,
    pub params: Vec<Param>,
    pub result: PhraseType,
    pub imperative: bool,
}

impl DpiaSignature {
    pub fn type_params(&self) -> impl Iterator<Item = (&str, DKind)> {
        self.params.iter().filter_map(|p| match p {
            Param::Type(n, k) => Some((n.as_str(), *k)),
            Param::Phrase(..) => None,
        })
    }

    pub fn phrase_params(&self) -> impl Iterator<Item = (&str, &PhraseType)> {
        self.params.iter().filter_map(|p| match p {
            Param::Phrase(n, t) => Some((n.as_str(), t)),
            Param::Type(..) => None,
        })
    }

    pub fn type_arity(&self) -> usize {
        self.type_params().count()
    }

    pub fn arity(&self) -> usize {
        self.phrase_params().count()
    }

    /// Substitutes the type-level arguments, giving the phrase parameter
    /// types and the result type.
    #[allow(clippy::type_complexity)]
    pub fn instantiate(
        &self,
        targs: &[DArg],
    ) -> Result<(Vec<(String, PhraseType)>, PhraseType), String> {
        let tps: Vec<_> = self.type_params().collect();
        if tps.len() != targs.len() {
            return Err(format!(
                "`{}` takes {} type-level arguments, given {}",
                self.tag,
                tps.len(),
                targs.len()
            ));
        }
        for ((name, kind), arg) in tps.iter().zip(targs) {
            if arg.kind() != *kind {
                return Err(format!(
                    "`{}`: parameter `{name}` expects a {kind}, given `{arg}`",
                    self.tag
                ));
            }
        }
        let subst = |t: &PhraseType| {
            tps.iter()
                .zip(targs)
                .fold(t.clone(), |acc, ((name, _), arg)| acc.substitute(name, arg))
        };
        let params = self
            .phrase_params()
            .map(|(n, t)| (n.to_string(), subst(t)))
            .collect();
        Ok((params, subst(&self.result)))
    }
}

const MAP_PARAMS: &str = "(n: Nat, s: DataType, t: DataType, f: Exp[s, Rd] -> Exp[t, Wr], \
                          x: Exp[Array[n, s], Rd]): Exp[Array[n, t], Wr]";
const PAR_FOR_PARAMS: &str =
    "(n: Nat, t: DataType, out: Acc[Array[n, t]], body: Exp[Idx[n], Rd] -> Acc[t] -> Comm): Comm";
const BINOP_PARAMS: &str = "(t: DataType, lhs: Exp[t, Rd], rhs: Exp[t, Rd]): Exp[t, Rd]";

const FUNCTIONAL: &[(&str, &str)] = &[
    ("mapSeq", MAP_PARAMS),
    ("mapGlobal", MAP_PARAMS),
    ("mapWorkGroup", MAP_PARAMS),
    ("mapLocal", MAP_PARAMS),
    (
        "reduceSeq",
        "(n: Nat, a: AddrSp, s: DataType, t: DataType, f: Exp[t, Rd] -> Exp[s, Rd] -> Exp[t, Wr], \
         init: Exp[t, Wr], x: Exp[Array[n, s], Rd]): Exp[t, Rd]",
    ),
    (
        "zip",
        "(n: Nat, s: DataType, t: DataType, w: ReadWrite, lhs: Exp[Array[n, s], w], \
         rhs: Exp[Array[n, t], w]): Exp[Array[n, Tuple[s, t]], w]",
    ),
    ("fst", "(s: DataType, t: DataType, w: ReadWrite, x: Exp[Tuple[s, t], w]): Exp[s, w]"),
    ("snd", "(s: DataType, t: DataType, w: ReadWrite, x: Exp[Tuple[s, t], w]): Exp[t, w]"),
    (
        "join",
        "(n: Nat, m: Nat, t: DataType, w: ReadWrite, x: Exp[Array[n, Array[m, t]], w]): Exp[Array[n*m, t], w]",
    ),
    (
        "split",
        "(n: Nat, m: Nat, t: DataType, w: ReadWrite, x: Exp[Array[n*m, t], w]): Exp[Array[m, Array[n, t]], w]",
    ),
    ("toMem", "(a: AddrSp, t: DataType, x: Exp[t, Wr]): Exp[t, Rd]"),
    ("idx", "(n: Nat, t: DataType, i: Exp[Idx[n], Rd], arr: Exp[Array[n, t], Rd]): Exp[t, Rd]"),
    ("add", BINOP_PARAMS),
    ("sub", BINOP_PARAMS),
    ("mul", BINOP_PARAMS),
    (
        "iterate",
        "(n: Nat, m: Nat, k: Nat, t: DataType, f: (l: Nat) -> Exp[Array[l*n, t], Rd] -> Exp[Array[l, t], Wr], \
         arr: Exp[Array[n^k*m, t], Rd]): Exp[Array[m, t], Wr]",
    ),
    ("prefix", "(n: Nat, m: Nat, t: DataType, x: Exp[Array[m, t], Rd]): Exp[Array[n, t], Rd]"),
];

const IMPERATIVE: &[(&str, &str)] = &[
    ("assign", "(t: DataType, lhs: Acc[t], rhs: Exp[t, Rd]): Comm"),
    ("seq", "(c1: Comm, c2: Comm): Comm"),
    ("new", "(a: AddrSp, t: DataType, body: Acc[t] -> Exp[t, Rd] -> Comm): Comm"),
    ("for", "(n: Nat, body: Exp[Idx[n], Rd] -> Comm): Comm"),
    ("parForGlobal", PAR_FOR_PARAMS),
    ("parForWorkGroup", PAR_FOR_PARAMS),
    ("parForLocal", PAR_FOR_PARAMS),
    ("idxAcc", "(n: Nat, t: DataType, i: Exp[Idx[n], Rd], array: Acc[Array[n, t]]): Acc[t]"),
    ("zipAcc1", "(n: Nat, s: DataType, t: DataType, array: Acc[Array[n, Tuple[s, t]]]): Acc[Array[n, s]]"),
    ("zipAcc2", "(n: Nat, s: DataType, t: DataType, array: Acc[Array[n, Tuple[s, t]]]): Acc[Array[n, t]]"),
    ("joinAcc", "(n: Nat, m: Nat, t: DataType, array: Acc[Array[n*m, t]]): Acc[Array[n, Array[m, t]]]"),
    ("splitAcc", "(n: Nat, m: Nat, t: DataType, array: Acc[Array[m, Array[n, t]]]): Acc[Array[n*m, t]]"),
    ("prefixAcc", "(n: Nat, m: Nat, t: DataType, array: Acc[Array[m, t]]): Acc[Array[n, t]]"),
    ("if", "(lhs: Nat, rhs: Nat, thenBranch: Comm, elseBranch: Comm): Comm"),
    (
        "newDoubleBuffer",
        "(t: DataType, cap: Nat, inSz: Nat, outSz: Nat, k: Nat, input: Exp[Array[inSz, t], Rd], \
         output: Acc[Array[outSz, t]], body: Acc[Array[cap, t]] -> Exp[Array[inSz, t], Rd] -> Comm -> Comm -> Comm): Comm",
    ),
];

fn parse_signature(tag: &str, src: &str, imperative: bool) -> Result<DpiaSignature, ParseError> {
    let mut c = Cursor::new(src)?;
    c.expect(&Tok::LParen)?;
    let mut params = Vec::new();
    loop {
        let name = c.ident()?;
        c.expect(&Tok::Colon)?;
        let is_kind = matches!(c.peek(), Tok::Ident(k) if matches!(k.as_str(), "Nat" | "DataType" | "AddrSp" | "ReadWrite"))
            && matches!(c.peek_at(1), Tok::Comma | Tok::RParen);
        if is_kind {
            params.push(Param::Type(name, parse_kind(&mut c)?));
        } else {
            params.push(Param::Phrase(name, parse_phrase_type_at(&mut c)?));
        }
        if !c.eat(&Tok::Comma) {
            break;
        }
    }
    c.expect(&Tok::RParen)?;
    c.expect(&Tok::Colon)?;
    let result = parse_phrase_type_at(&mut c)?;
    c.finish()?;
    Ok(DpiaSignature {
        tag: tag.to_string(),
        params,
        result,
        imperative,
    })
}

/// Every primitive signature, keyed by tag.
pub fn signatures() -> &'static BTreeMap<String, DpiaSignature> {
    static TABLE: OnceLock<BTreeMap<String, DpiaSignature>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut m = BTreeMap::new();
        for (imperative, table) in [(false, FUNCTIONAL), (true, IMPERATIVE)] {
            for (tag, src) in table {
                let sig = parse_signature(tag, src, imperative)
                    .unwrap_or_else(|e| panic!("signature of `{tag}` is malformed: {e}"));
                assert!(
                    m.insert(tag.to_string(), sig).is_none(),
                    "duplicate signature `{tag}`"
                );
            }
        }
        m
    })
}

pub fn signature(tag: &str) -> Option<&'static DpiaSignature> {
    signatures().get(tag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dpia::Rw;
    use crate::{DataType, Nat};

    #[test]
    fn table_parses_and_counts() {
        assert_eq!(signatures().len(), FUNCTIONAL.len() + IMPERATIVE.len());
        let ml = signature("mapLocal").unwrap();
        assert_eq!(ml.type_arity(), 3);
        assert_eq!(ml.arity(), 2);
        assert!(!ml.imperative);
        assert!(signature("newDoubleBuffer").unwrap().imperative);
    }

    #[test]
    fn zip_instantiates_its_rw_parameter() {
        let zip = signature("zip").unwrap();
        let (params, res) = zip
            .instantiate(&[
                DArg::Nat(Nat::Const(4)),
                DArg::Data(DataType::f32()),
                DArg::Data(DataType::i32()),
                DArg::Rw(Rw::Wr),
            ])
            .unwrap();
        assert_eq!(
            params[0].1,
            PhraseType::Exp(DataType::array(4, DataType::f32()), Rw::Wr)
        );
        assert_eq!(res.to_string(), "Exp[Array[4, Tuple[f32, i32]], Wr]");
    }

    #[test]
    fn wrong_kind_is_reported() {
        let e = signature("toMem")
            .unwrap()
            .instantiate(&[DArg::Nat(Nat::Const(1)), DArg::Data(DataType::f32())]);
        assert!(e.unwrap_err().contains("AddrSp"));
    }
}
