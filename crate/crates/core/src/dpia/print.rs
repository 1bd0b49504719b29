//! Text form of phrases and phrase types. The output is accepted by
//! [`super::parse_phrase`].

use std::fmt;

use super::{Phrase, PhraseKind, PhraseType, Prim};

impl fmt::Display for PhraseType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhraseType::Exp(d, rw) => write!(f, "Exp[{d}, {rw}]"),
            PhraseType::Acc(d) => write!(f, "Acc[{d}]"),
            PhraseType::Comm => f.write_str("Comm"),
            PhraseType::Fun(a, b) => {
                if matches!(**a, PhraseType::Fun(..) | PhraseType::DepFun { .. }) {
                    write!(f, "({a}) -> {b}")
                } else {
                    write!(f, "{a} -> {b}")
                }
            }
            PhraseType::DepFun { kind, param, body } => write!(f, "({param}: {kind}) -> {body}"),
            PhraseType::Pair(a, b) => {
                let wrap = |t: &PhraseType| match t {
                    PhraseType::Fun(..) | PhraseType::DepFun { .. } | PhraseType::Pair(..) => {
                        format!("({t})")
                    }
                    other => other.to_string(),
                };
                write!(f, "{} x {}", wrap(a), wrap(b))
            }
        }
    }
}

const WIDTH: usize = 100;

pub fn print_phrase(p: &Phrase) -> String {
    render(p, 0, true, 0)
}

fn prec(p: &Phrase) -> u8 {
    match &p.kind {
        PhraseKind::Prim(Prim { tag, .. }) => match tag.as_str() {
            "seq" => 0,
            "assign" => 1,
            "add" | "sub" => 2,
            "mul" => 3,
            _ => 4,
        },
        _ => 4,
    }
}

fn pad(n: usize) -> String {
    " ".repeat(n)
}

/// Renders `p` assuming it starts at column `indent`. `annotate` controls
/// lambda parameter annotations; `min_prec` forces parentheses around
/// looser operators.
fn render(p: &Phrase, indent: usize, annotate: bool, min_prec: u8) -> String {
    let s = render_bare(p, indent, annotate);
    if prec(p) < min_prec {
        format!("({s})")
    } else {
        s
    }
}

fn render_bare(p: &Phrase, indent: usize, annotate: bool) -> String {
    match &p.kind {
        PhraseKind::Ident(i) => i.name.clone(),
        PhraseKind::Literal(l) => l.to_string(),
        PhraseKind::Lambda(..) => render_lambda(p, indent, annotate),
        PhraseKind::DepLambda(..) => render_dep_lambda(p, indent),
        PhraseKind::Apply(f, a) => {
            format!(
                "{}({})",
                render(f, indent, true, 4),
                render(a, indent + 2, true, 0)
            )
        }
        PhraseKind::DepApply(f, a) => format!("{}({a})", render(f, indent, true, 4)),
        PhraseKind::Pair(a, b) => call("pair", vec![], &[a, b], indent),
        PhraseKind::Proj1(a) => call("proj1", vec![], &[a], indent),
        PhraseKind::Proj2(a) => call("proj2", vec![], &[a], indent),
        PhraseKind::Prim(prim) => render_prim(prim, indent),
    }
}

fn render_prim(prim: &Prim, indent: usize) -> String {
    let a = &prim.args;
    match prim.tag.as_str() {
        "seq" => {
            let mut items = Vec::new();
            flatten_seq(a[0].clone(), &mut items);
            flatten_seq(a[1].clone(), &mut items);
            items
                .iter()
                .map(|c| render(c, indent, true, 1))
                .collect::<Vec<_>>()
                .join(&format!(" ;\n{}", pad(indent)))
        }
        "assign" => format!(
            "{} = {}",
            render(&a[0], indent, true, 2),
            render(&a[1], indent + 2, true, 2)
        ),
        "add" | "sub" | "mul" => {
            let (op, p) = match prim.tag.as_str() {
                "add" => ("+", 2),
                "sub" => ("-", 2),
                _ => ("*", 3),
            };
            format!(
                "{} {op} {}",
                render(&a[0], indent, true, p),
                render(&a[1], indent, true, p + 1)
            )
        }
        "if" => {
            let inner = indent + 2;
            format!(
                "if ({} < {}) {{\n{}{}\n{}}} else {{\n{}{}\n{}}}",
                prim.targs[0],
                prim.targs[1],
                pad(inner),
                render(&a[0], inner, true, 0),
                pad(indent),
                pad(inner),
                render(&a[1], inner, true, 0),
                pad(indent)
            )
        }
        tag => {
            let targs = prim.targs.iter().map(|t| t.to_string()).collect();
            let args: Vec<&Phrase> = a.iter().collect();
            call(tag, targs, &args, indent)
        }
    }
}

fn flatten_seq(p: Phrase, out: &mut Vec<Phrase>) {
    match p.kind {
        PhraseKind::Prim(Prim { tag, mut args, .. }) if tag == "seq" => {
            let second = args.pop().expect("seq has two arguments");
            let first = args.pop().expect("seq has two arguments");
            flatten_seq(first, out);
            flatten_seq(second, out);
        }
        kind => out.push(Phrase { kind, ty: p.ty }),
    }
}

/// `tag(targs..., args...)`, broken over lines when too wide.
fn call(tag: &str, targs: Vec<String>, args: &[&Phrase], indent: usize) -> String {
    let inner = indent + 2;
    let mut parts: Vec<String> = targs;
    let first_arg = parts.len();
    for a in args {
        // Lambdas in argument slots take their parameter types from the signature.
        parts.push(render(a, inner, false, 0));
    }
    let inline = format!("{tag}({})", parts.join(", "));
    if !inline.contains('\n') && indent + inline.len() <= WIDTH {
        return inline;
    }
    let big = |s: &String| s.contains('\n') || s.len() > 40;
    let split = parts
        .iter()
        .enumerate()
        .position(|(i, s)| i >= first_arg && big(s))
        .unwrap_or(parts.len());
    let head = &parts[..split];
    let mut out = format!("{tag}(");
    out.push_str(&head.join(", "));
    for (i, s) in parts[split..].iter().enumerate() {
        if i > 0 || !head.is_empty() {
            out.push(',');
        }
        out.push('\n');
        out.push_str(&pad(inner));
        out.push_str(s);
    }
    out.push(')');
    out
}

fn render_lambda(p: &Phrase, indent: usize, annotate: bool) -> String {
    let mut params = Vec::new();
    let mut cur = p;
    while let PhraseKind::Lambda(x, body) = &cur.kind {
        let PhraseType::Fun(pt, _) = &cur.ty else {
            unreachable!("lambda without a function type")
        };
        params.push(if annotate {
            format!("{x}: {pt}")
        } else {
            x.name.clone()
        });
        cur = body;
    }
    let head = if params.len() == 1 {
        params[0].clone()
    } else {
        format!("({})", params.join(", "))
    };
    wrap_binder("fun", &head, cur, indent)
}

fn render_dep_lambda(p: &Phrase, indent: usize) -> String {
    let mut params = Vec::new();
    let mut cur = p;
    while let PhraseKind::DepLambda(k, x, body) = &cur.kind {
        params.push(format!("{x}: {k}"));
        cur = body;
    }
    wrap_binder("depFun", &format!("({})", params.join(", ")), cur, indent)
}

fn wrap_binder(kw: &str, head: &str, body: &Phrase, indent: usize) -> String {
    let inline_body = render(body, indent + 2, true, 0);
    let inline = format!("{kw}({head} => {inline_body})");
    if !inline.contains('\n') && indent + inline.len() <= WIDTH {
        return inline;
    }
    let b = render(body, indent + 2, true, 0);
    format!("{kw}({head} =>\n{}{b})", pad(indent + 2))
}
