//! Parser for strategy files.
//!
//! A file is a sequence of steps separated by `;` or line breaks (outside
//! parentheses). A step is a strategy term, optionally followed by
//! `@ outermost(pred)` or `@ every(pred)`.

use crate::parse::{Cursor, ParseError, Tok};
use crate::rules;
use crate::strategy::{Locator, Pred, Strategy};
use crate::types::{AddressSpace, TypeArg};

pub fn parse_strategy(src: &str) -> Result<Strategy, ParseError> {
    let mut steps = Vec::new();
    for (line_offset, chunk) in split_steps(src) {
        let mut c = Cursor::new(&chunk).map_err(|e| shift(e, line_offset))?;
        if c.at_eof() {
            continue;
        }
        let s = seq(&mut c).map_err(|e| shift(e, line_offset))?;
        c.finish().map_err(|e| shift(e, line_offset))?;
        steps.push(s);
    }
    Ok(Strategy::sequence(steps))
}

fn shift(mut e: ParseError, lines: u32) -> ParseError {
    e.line += lines;
    e
}

/// Cuts the source at line breaks that occur at parenthesis depth zero,
/// remembering the starting line of each piece.
fn split_steps(src: &str) -> Vec<(u32, String)> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut start = 0u32;
    let mut depth = 0i32;
    for (line, raw) in (0u32..).zip(src.split_inclusive('\n')) {
        let text = match raw.find("//") {
            Some(i) => &raw[..i],
            None => raw.trim_end_matches('\n'),
        };
        if cur.is_empty() {
            start = line;
        } else {
            cur.push('\n');
        }
        cur.push_str(text);
        depth += text.matches('(').count() as i32 - text.matches(')').count() as i32;
        let bare = text.replace('`', "");
        let continues = bare.trim_end().ends_with(';') || bare.trim_end().ends_with('@');
        if depth <= 0 && !continues {
            out.push((start, std::mem::take(&mut cur)));
            depth = 0;
        }
    }
    if !cur.trim().is_empty() {
        out.push((start, cur));
    }
    out
}

fn seq(c: &mut Cursor) -> Result<Strategy, ParseError> {
    let mut steps = vec![step(c)?];
    while c.eat(&Tok::Semi) {
        if matches!(c.peek(), Tok::Eof | Tok::RParen | Tok::Comma) {
            break;
        }
        steps.push(step(c)?);
    }
    Ok(Strategy::sequence(steps))
}

fn step(c: &mut Cursor) -> Result<Strategy, ParseError> {
    let s = term(c)?;
    if c.eat(&Tok::At) {
        let loc = c.ident()?;
        c.expect(&Tok::LParen)?;
        let p = pred(c)?;
        c.expect(&Tok::RParen)?;
        return match loc.as_str() {
            "outermost" => Ok(s.at(Locator::Outermost(p))),
            "every" => Ok(s.at(Locator::Every(p))),
            other => Err(c.error(format!("unknown locator `{other}`"))),
        };
    }
    Ok(s)
}

fn pred(c: &mut Cursor) -> Result<Pred, ParseError> {
    let name = c.ident()?;
    match name.as_str() {
        "isMap" => Ok(Pred::IsMap),
        "isReduce" => Ok(Pred::IsReduce),
        "isPrimitive" => {
            c.expect(&Tok::LParen)?;
            let p = c.ident()?;
            c.expect(&Tok::RParen)?;
            Ok(Pred::IsPrimitive(p))
        }
        other => Err(c.error(format!("unknown predicate `{other}`"))),
    }
}

fn term(c: &mut Cursor) -> Result<Strategy, ParseError> {
    if c.eat(&Tok::LParen) {
        let s = seq(c)?;
        c.expect(&Tok::RParen)?;
        return Ok(s);
    }
    let name = c.ident()?;
    let unary = |c: &mut Cursor| -> Result<Strategy, ParseError> {
        c.expect(&Tok::LParen)?;
        let s = seq(c)?;
        c.expect(&Tok::RParen)?;
        Ok(s)
    };
    match name.as_str() {
        "id" => Ok(Strategy::Id),
        "fail" => Ok(Strategy::Fail),
        "try" => Ok(Strategy::try_(unary(c)?)),
        "repeat" => Ok(Strategy::repeat(unary(c)?)),
        "topDown" => Ok(Strategy::top_down(unary(c)?)),
        "bottomUp" => Ok(Strategy::bottom_up(unary(c)?)),
        "lChoice" | "seq" => {
            c.expect(&Tok::LParen)?;
            let a = seq(c)?;
            c.expect(&Tok::Comma)?;
            let b = seq(c)?;
            c.expect(&Tok::RParen)?;
            Ok(if name == "seq" {
                Strategy::seq(a, b)
            } else {
                Strategy::lchoice(a, b)
            })
        }
        _ => {
            let mut args = Vec::new();
            if c.eat(&Tok::LParen) {
                if let Tok::Ident(w) = c.peek().clone() {
                    if let Some(a) = AddressSpace::parse(&w) {
                        c.bump();
                        args.push(TypeArg::AddressSpace(a));
                    }
                }
                if args.is_empty() {
                    args.push(TypeArg::Nat(c.nat()?));
                }
                c.expect(&Tok::RParen)?;
            }
            let r = rules::lookup(&name, args).map_err(|m| c.error(m))?;
            Ok(Strategy::Rule(r))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const LISTING: &str = "    splitJoinMap    `@` outermost(isMap)    `;`
    toMapWorkGroup  `@` outermost(isMap)    `;`
    toMapLocal      `@` outermost(isMap)    `;`
    fuseReduceMap   `@` every(isReduce)     `;`
    toReduceSeq     `@` every(isReduce)
";

    #[test]
    fn five_step_file_parses() {
        let s = parse_strategy(LISTING).unwrap();
        assert_eq!(
            s.to_string(),
            "splitJoinMap @ outermost(isMap) ; toMapWorkGroup @ outermost(isMap) ; toMapLocal @ outermost(isMap) ; \
             fuseReduceMap @ every(isReduce) ; toReduceSeq @ every(isReduce)"
        );
    }

    #[test]
    fn newline_separated_and_combinators() {
        let s = parse_strategy("try(mapFusion @ outermost(isMap))\nrepeat(lChoice(fail, id))\n")
            .unwrap();
        assert_eq!(
            s.to_string(),
            "try(mapFusion @ outermost(isMap)) ; repeat(lChoice(fail, id))"
        );
        let s = parse_strategy(
            "splitJoinMap(4) @ outermost(isMap); toReduceSeq(Local) @ every(isReduce)",
        )
        .unwrap();
        assert_eq!(
            s.to_string(),
            "splitJoinMap(4) @ outermost(isMap) ; toReduceSeq(Local) @ every(isReduce)"
        );
    }

    #[test]
    fn unknown_rule_is_an_error() {
        let e = parse_strategy("\n\nnoSuchRule @ outermost(isMap)").unwrap_err();
        assert_eq!(e.line, 3);
        assert!(e.message.contains("noSuchRule"));
    }
}
