//! From typed low-level RISE to imperative DPIA.
//!
//! [`rise_to_dpia`] maps each low-level RISE primitive onto its fully
//! applied DPIA counterpart. [`translate_unit`] then allocates the output,
//! runs the acceptor translation and closes the result over the program's
//! parameters.

mod to_dpia;
mod translate;

use std::collections::BTreeSet;
use std::fmt;

use crate::dpia::{DKind, DpiaError, Phrase, PhraseKind, PhraseType};
use crate::expr::{Ident, Span};
use crate::nat::Assumptions;
use crate::parse::{Cursor, ParseError, Tok};
use crate::types::DataType;

pub use to_dpia::rise_to_dpia;
pub use translate::{translate_unit, Translator};

#[derive(Clone, Debug, PartialEq)]
pub enum LowerError {
    /// A high-level primitive survived rewriting.
    Unlowered {
        primitive: String,
        span: Option<Span>,
    },
    Unsupported {
        what: String,
        span: Option<Span>,
    },
    NoAcceptorRule(String),
    NoContinuationRule(String),
    Dpia(DpiaError),
}

impl LowerError {
    pub fn code(&self) -> &'static str {
        match self {
            LowerError::Unlowered { .. } => "StrategyIncomplete",
            LowerError::Unsupported { .. } => "Unsupported",
            LowerError::NoAcceptorRule(_) => "NoAcceptorRule",
            LowerError::NoContinuationRule(_) => "NoContinuationRule",
            LowerError::Dpia(e) => e.code(),
        }
    }

    pub fn span(&self) -> Option<Span> {
        match self {
            LowerError::Unlowered { span, .. } | LowerError::Unsupported { span, .. } => *span,
            LowerError::Dpia(e) => e.span,
            _ => None,
        }
    }
}

impl fmt::Display for LowerError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LowerError::Unlowered { primitive, span } => {
                write!(
                    f,
                    "unlowered primitive `{primitive}`: an implementation choice is still missing"
                )?;
                if let Some(s) = span {
                    write!(f, " at {s}")?;
                }
                Ok(())
            }
            LowerError::Unsupported { what, .. } => write!(f, "unsupported: {what}"),
            LowerError::NoAcceptorRule(w) => write!(f, "no acceptor translation for {w}"),
            LowerError::NoContinuationRule(w) => write!(f, "no continuation translation for {w}"),
            LowerError::Dpia(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for LowerError {}

impl From<DpiaError> for LowerError {
    fn from(e: DpiaError) -> Self {
        LowerError::Dpia(e)
    }
}

/// Hands out identifiers that avoid every name already in use.
#[derive(Clone, Debug, Default)]
pub struct NameSupply {
    used: BTreeSet<String>,
}

impl NameSupply {
    pub fn avoiding(names: impl IntoIterator<Item = String>) -> NameSupply {
        NameSupply {
            used: names.into_iter().collect(),
        }
    }

    pub fn reserve(&mut self, name: &str) {
        self.used.insert(name.to_string());
    }

    pub fn fresh(&mut self, base: &str) -> Ident {
        let name = if self.used.contains(base) {
            (1..)
                .map(|i| format!("{base}_{i}"))
                .find(|c| !self.used.contains(c))
                .expect("unbounded")
        } else {
            base.to_string()
        };
        self.used.insert(name.clone());
        Ident::fresh(name)
    }
}

/// Every identifier and type-level name mentioned in a phrase.
pub fn phrase_names(p: &Phrase) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    p.visit(&mut |q| {
        match &q.kind {
            PhraseKind::Ident(i) | PhraseKind::Lambda(i, _) => {
                out.insert(i.name.clone());
            }
            PhraseKind::DepLambda(_, x, _) => {
                out.insert(x.clone());
            }
            _ => {}
        }
        if let Some(d) = q.ty.data() {
            let mut dts = BTreeSet::new();
            d.collect_free(&mut out, &mut dts);
        }
    });
    out
}

/// A translated compilation unit: parameters, output and the command.
#[derive(Clone, Debug, PartialEq)]
pub struct Unit {
    pub name: String,
    pub nat_params: Vec<String>,
    pub inputs: Vec<(Ident, DataType)>,
    pub output: (Ident, DataType),
    pub body: Phrase,
    pub assumptions: Assumptions,
}

impl Unit {
    /// Free identifiers of the body with their phrase types.
    pub fn env(&self) -> Vec<(Ident, PhraseType)> {
        let mut env: Vec<_> = self
            .inputs
            .iter()
            .map(|(i, d)| (i.clone(), PhraseType::Exp(d.clone(), crate::dpia::Rw::Rd)))
            .collect();
        env.push((
            self.output.0.clone(),
            PhraseType::Acc(self.output.1.clone()),
        ));
        env
    }

    /// The unit closed over its parameters, output last.
    pub fn to_phrase(&self) -> Phrase {
        let mut p = Phrase::lambda(
            self.output.0.clone(),
            PhraseType::Acc(self.output.1.clone()),
            self.body.clone(),
        );
        for (i, d) in self.inputs.iter().rev() {
            p = Phrase::lambda(
                i.clone(),
                PhraseType::Exp(d.clone(), crate::dpia::Rw::Rd),
                p,
            );
        }
        for n in self.nat_params.iter().rev() {
            p = Phrase::dep_lambda(DKind::Nat, n.clone(), p);
        }
        p
    }

    /// Inverse of [`Unit::to_phrase`].
    pub fn from_phrase(name: &str, p: &Phrase, assumptions: Assumptions) -> Result<Unit, String> {
        let mut nat_params = Vec::new();
        let mut cur = p;
        while let PhraseKind::DepLambda(k, x, b) = &cur.kind {
            if *k != DKind::Nat {
                return Err(format!("unit parameter `{x}` must be a Nat"));
            }
            nat_params.push(x.clone());
            cur = b;
        }
        let mut params = Vec::new();
        while let PhraseKind::Lambda(x, b) = &cur.kind {
            let PhraseType::Fun(t, _) = &cur.ty else {
                unreachable!()
            };
            params.push((x.clone(), (**t).clone()));
            cur = b;
        }
        let Some((out, PhraseType::Acc(out_ty))) = params.pop() else {
            return Err("the last unit parameter must be the output acceptor".into());
        };
        let inputs = params
            .into_iter()
            .map(|(x, t)| match t {
                PhraseType::Exp(d, _) => Ok((x, d)),
                other => Err(format!("input `{x}` has non-expression type {other}")),
            })
            .collect::<Result<Vec<_>, _>>()?;
        if cur.ty != PhraseType::Comm {
            return Err(format!("unit body has type {}, expected Comm", cur.ty));
        }
        Ok(Unit {
            name: name.to_string(),
            nat_params,
            inputs,
            output: (out, out_ty),
            body: cur.clone(),
            assumptions,
        })
    }
}

/// Prints a phrase preceded by `assume n % d = 0;` lines for each
/// divisibility fact, which [`parse_dpia_file`] reads back.
pub fn print_dpia_file(asm: &Assumptions, p: &Phrase) -> String {
    let mut out = String::new();
    for (d, n) in asm.iter() {
        out.push_str(&format!("assume ({n}) % ({d}) = 0;\n"));
    }
    out.push_str(&crate::dpia::print_phrase(p));
    out.push('\n');
    out
}

pub fn parse_dpia_file(src: &str) -> Result<(Assumptions, Phrase), ParseError> {
    let mut asm = Assumptions::new();
    let mut rest = src;
    loop {
        let trimmed = rest.trim_start();
        let Some(after) = trimmed.strip_prefix("assume") else {
            break;
        };
        let end = after.find(';').ok_or_else(|| ParseError {
            line: 1,
            column: 1,
            message: "unterminated `assume`".into(),
        })?;
        let mut c = Cursor::new(&after[..end])?;
        let lhs = c.nat()?;
        c.expect(&Tok::Eq)?;
        if !matches!(c.bump(), Tok::Int(0)) {
            return Err(c.error("an assumption must have the form `n % d = 0`"));
        }
        c.finish()?;
        match lhs {
            crate::nat::Nat::Mod(n, d) => asm.assume_divides(&d, &n),
            _ => return Err(c.error("an assumption must have the form `n % d = 0`")),
        }
        rest = &after[end + 1..];
    }
    // keep line numbers of the phrase relative to the whole file
    let skipped = src.len() - rest.len();
    let lines_before = src[..skipped].matches('\n').count() as u32;
    let p = crate::dpia::parse_phrase(rest, &[]).map_err(|mut e| {
        e.line += lines_before;
        e
    })?;
    Ok((asm, p))
}
